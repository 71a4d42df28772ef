#pragma once

#include "w2i/backend.hpp"
#include "w2i/json_extract.hpp"
#include "w2i/scoring.hpp"
#include "w2i/types.hpp"

#include <filesystem>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace w2i {

struct ManifestEntry {
    std::string id;
    std::string prompt;
    std::optional<std::string> subcategory;
};

struct PromptManifest {
    std::vector<ManifestEntry> entries;
    std::string source_path;
};

/// JSON list of {"id", "prompt", "subcategory"?}. Throws ConfigError for
/// duplicate ids, empty prompts or an empty list.
PromptManifest parse_manifest(const Json& j, std::string source_path = {});
PromptManifest load_manifest(const std::filesystem::path& path);

using DimensionMeans = std::map<GraderDimension, double>;

struct EvalOutcome {
    std::string entry_id;
    std::optional<std::string> subcategory;
    std::string run_id;
    bool ok = false;
    /// Grader report of the best iteration.
    std::optional<GraderReport> best_report;
    std::string error;
};

struct EvalSummary {
    DimensionMeans per_dimension_means;  // 0..100
    std::map<std::string, DimensionMeans> per_subcategory;
    int run_count = 0;  // runs attempted, failed ones included
    std::vector<std::string> failures;  // run ids (entry ids when no run started)
};

/// Means over successful outcomes only, on the 0-100 scale.
EvalSummary summarize(const std::vector<EvalOutcome>& outcomes);

Json to_json(const EvalSummary& summary);
/// Throws ConfigError when `j` is not an eval summary.
EvalSummary summary_from_json(const Json& j);

std::string render_summary_markdown(const EvalSummary& summary);

struct EvalOptions {
    RunConfig config;
    std::filesystem::path out_dir;
    int parallel = 1;
    /// Fresh backends for one manifest entry.
    std::function<BackendBundle(const ManifestEntry&)> backends;
};

/// Runs every entry (up to `parallel` at once), persists each run under
/// <out_dir>/runs, and writes eval_summary.json and eval_summary.md.
EvalSummary run_eval(const PromptManifest& manifest, const EvalOptions& options,
                     std::vector<EvalOutcome>* outcomes = nullptr);

enum class ReportFormat { markdown, csv };

struct LabeledSummary {
    std::string label;
    EvalSummary summary;
};

/// Rows: the five grader dimensions then Overall; one column per label. The
/// row maximum is bolded (markdown) or named in a "best" column (csv).
std::string render_report(const std::vector<LabeledSummary>& columns, ReportFormat format);

}  // namespace w2i
