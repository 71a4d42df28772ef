#include "w2i/eval.hpp"

#include "w2i/engine.hpp"
#include "w2i/error.hpp"
#include "w2i/run_store.hpp"

#include <atomic>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>
#include <thread>

namespace w2i {

namespace fs = std::filesystem;

// ---------------------------------------------------------------------------
// Manifest
// ---------------------------------------------------------------------------

PromptManifest parse_manifest(const Json& j, std::string source_path) {
    if (!j.is_array()) throw ConfigError("manifest: expected a JSON list");
    if (j.empty()) throw ConfigError("manifest: no entries");
    PromptManifest m;
    m.source_path = std::move(source_path);
    std::set<std::string> ids;
    for (std::size_t i = 0; i < j.size(); ++i) {
        const auto& item = j[i];
        const auto where = "manifest[" + std::to_string(i) + "]";
        if (!item.is_object()) throw ConfigError(where + ": expected an object");
        if (!item.contains("id") || !item["id"].is_string() || item["id"].get<std::string>().empty()) {
            throw ConfigError(where + ".id: expected a non-empty string");
        }
        if (!item.contains("prompt") || !item["prompt"].is_string() ||
            item["prompt"].get<std::string>().empty()) {
            throw ConfigError(where + ".prompt: expected a non-empty string");
        }
        ManifestEntry e;
        e.id = item["id"].get<std::string>();
        e.prompt = item["prompt"].get<std::string>();
        if (auto s = item.find("subcategory"); s != item.end() && !s->is_null()) {
            if (!s->is_string()) throw ConfigError(where + ".subcategory: expected a string");
            e.subcategory = s->get<std::string>();
        }
        if (!ids.insert(e.id).second) throw ConfigError(where + ".id: duplicate id '" + e.id + "'");
        m.entries.push_back(std::move(e));
    }
    return m;
}

PromptManifest load_manifest(const fs::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("manifest: cannot open " + path.string());
    try {
        return parse_manifest(Json::parse(in), path.string());
    } catch (const Json::parse_error& e) {
        throw ConfigError("manifest: " + path.string() + " is not valid JSON: " + e.what());
    }
}

// ---------------------------------------------------------------------------
// Summary
// ---------------------------------------------------------------------------

namespace {

DimensionMeans mean_of(const std::vector<const GraderReport*>& reports) {
    DimensionMeans out;
    if (reports.empty()) return out;
    for (auto d : kReportRows) out[d] = 0.0;
    for (const auto* r : reports) {
        for (const auto& [d, v] : report_scale(*r)) out[d] += v;
    }
    for (auto& [_, v] : out) v /= static_cast<double>(reports.size());
    return out;
}

Json means_json(const DimensionMeans& m) {
    Json j = Json::object();
    for (auto d : kReportRows) {
        if (auto it = m.find(d); it != m.end()) j[std::string(key_of(d))] = it->second;
    }
    return j;
}

DimensionMeans means_from_json(const Json& j, const std::string& where) {
    if (!j.is_object()) throw ConfigError(where + ": expected an object");
    DimensionMeans m;
    for (auto d : kReportRows) {
        auto it = j.find(std::string(key_of(d)));
        if (it == j.end()) continue;
        if (!it->is_number()) throw ConfigError(where + "." + std::string(key_of(d)) + ": expected a number");
        m[d] = it->get<double>();
    }
    return m;
}

std::string fmt1(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.1f", v);
    return buf;
}

}  // namespace

EvalSummary summarize(const std::vector<EvalOutcome>& outcomes) {
    EvalSummary s;
    s.run_count = static_cast<int>(outcomes.size());
    std::vector<const GraderReport*> all;
    std::map<std::string, std::vector<const GraderReport*>> by_sub;
    for (const auto& o : outcomes) {
        if (!o.ok || !o.best_report) {
            s.failures.push_back(o.run_id.empty() ? o.entry_id : o.run_id);
            continue;
        }
        all.push_back(&*o.best_report);
        if (o.subcategory) by_sub[*o.subcategory].push_back(&*o.best_report);
    }
    s.per_dimension_means = mean_of(all);
    for (const auto& [name, reports] : by_sub) s.per_subcategory[name] = mean_of(reports);
    return s;
}

Json to_json(const EvalSummary& s) {
    Json sub = Json::object();
    for (const auto& [name, m] : s.per_subcategory) sub[name] = means_json(m);
    return Json{{"per_dimension_means", means_json(s.per_dimension_means)},
                {"per_subcategory", sub},
                {"run_count", s.run_count},
                {"failures", s.failures}};
}

EvalSummary summary_from_json(const Json& j) {
    if (!j.is_object()) throw ConfigError("eval summary: expected an object");
    EvalSummary s;
    s.per_dimension_means = means_from_json(j.value("per_dimension_means", Json::object()), "per_dimension_means");
    if (auto sub = j.find("per_subcategory"); sub != j.end() && sub->is_object()) {
        for (const auto& [name, m] : sub->items()) {
            s.per_subcategory[name] = means_from_json(m, "per_subcategory." + name);
        }
    }
    s.run_count = j.value("run_count", 0);
    if (auto f = j.find("failures"); f != j.end() && f->is_array()) {
        for (const auto& x : *f) {
            if (x.is_string()) s.failures.push_back(x.get<std::string>());
        }
    }
    return s;
}

std::string render_summary_markdown(const EvalSummary& s) {
    std::string out = "| Dimension | All";
    for (const auto& [name, _] : s.per_subcategory) out += " | " + name;
    out += " |\n|---|---:";
    for (std::size_t i = 0; i < s.per_subcategory.size(); ++i) out += "|---:";
    out += "|\n";
    auto cell = [](const DimensionMeans& m, GraderDimension d) {
        auto it = m.find(d);
        return it == m.end() ? std::string("-") : fmt1(it->second);
    };
    for (auto d : kReportRows) {
        out += "| " + std::string(label_of(d)) + " | " + cell(s.per_dimension_means, d);
        for (const auto& [_, m] : s.per_subcategory) out += " | " + cell(m, d);
        out += " |\n";
    }
    out += "\nRuns: " + std::to_string(s.run_count) + ", failures: " + std::to_string(s.failures.size()) + "\n";
    return out;
}

// ---------------------------------------------------------------------------
// Batch execution
// ---------------------------------------------------------------------------

EvalSummary run_eval(const PromptManifest& manifest, const EvalOptions& options,
                     std::vector<EvalOutcome>* outcomes_out) {
    if (manifest.entries.empty()) throw ConfigError("manifest: no entries");
    if (options.parallel < 1) throw ConfigError("parallel: must be >= 1");
    if (!options.backends) throw ConfigError("eval: no backend factory");
    options.config.validate();

    const auto runs_root = options.out_dir / "runs";
    fs::create_directories(runs_root);
    std::vector<EvalOutcome> outcomes(manifest.entries.size());

    auto run_one = [&](std::size_t i) {
        const auto& entry = manifest.entries[i];
        auto& o = outcomes[i];
        o.entry_id = entry.id;
        o.subcategory = entry.subcategory;
        try {
            const auto now = std::chrono::system_clock::now();
            o.run_id = reserve_run_dir(runs_root, make_run_id(entry.prompt, options.config, now));
            RunOptions ro;
            ro.run_id = o.run_id;
            ro.started = now;
            auto result = run_optimization(options.config, entry.prompt, options.backends(entry), ro);
            write_run(result, runs_root / o.run_id);
            if (result.termination == Termination::fatal_error || result.best_index < 0) {
                o.error = result.error;
                return;
            }
            o.best_report = result.iterations[static_cast<std::size_t>(result.best_index)].score.grader_report;
            o.ok = o.best_report.has_value();
        } catch (const std::exception& e) {
            o.error = e.what();
        }
    };

    const auto workers = std::min<std::size_t>(static_cast<std::size_t>(options.parallel), outcomes.size());
    if (workers <= 1) {
        for (std::size_t i = 0; i < outcomes.size(); ++i) run_one(i);
    } else {
        std::atomic<std::size_t> next{0};
        std::vector<std::jthread> pool;
        for (std::size_t w = 0; w < workers; ++w) {
            pool.emplace_back([&] {
                for (auto i = next++; i < outcomes.size(); i = next++) run_one(i);
            });
        }
    }

    auto summary = summarize(outcomes);
    {
        std::ofstream out(options.out_dir / "eval_summary.json");
        out << to_json(summary).dump(2) << "\n";
    }
    {
        std::ofstream out(options.out_dir / "eval_summary.md");
        out << render_summary_markdown(summary);
    }
    if (outcomes_out) *outcomes_out = std::move(outcomes);
    return summary;
}

// ---------------------------------------------------------------------------
// Comparison report
// ---------------------------------------------------------------------------

std::string render_report(const std::vector<LabeledSummary>& columns, ReportFormat format) {
    if (columns.empty()) throw ConfigError("report: no columns");
    auto csv_field = [](const std::string& s) {
        if (s.find_first_of(",\"\n") == std::string::npos) return s;
        std::string q = "\"";
        for (char c : s) {
            if (c == '"') q += '"';
            q += c;
        }
        return q + "\"";
    };

    std::string out;
    if (format == ReportFormat::markdown) {
        out = "| Dimension";
        for (const auto& c : columns) out += " | " + c.label;
        out += " |\n|---";
        for (std::size_t i = 0; i < columns.size(); ++i) out += "|---:";
        out += "|\n";
    } else {
        out = "dimension";
        for (const auto& c : columns) out += "," + csv_field(c.label);
        out += ",best\n";
    }

    for (auto d : kReportRows) {
        std::optional<double> best;
        for (const auto& c : columns) {
            auto it = c.summary.per_dimension_means.find(d);
            if (it != c.summary.per_dimension_means.end() && (!best || it->second > *best)) best = it->second;
        }
        auto is_best = [&](double v) { return best && std::abs(v - *best) < 1e-9; };

        std::string winners;
        if (format == ReportFormat::markdown) out += "| " + std::string(label_of(d));
        else out += csv_field(std::string(label_of(d)));
        for (const auto& c : columns) {
            auto it = c.summary.per_dimension_means.find(d);
            std::string cell = "-";
            if (it != c.summary.per_dimension_means.end()) {
                cell = fmt1(it->second);
                if (is_best(it->second)) {
                    if (format == ReportFormat::markdown) cell = "**" + cell + "**";
                    winners += (winners.empty() ? "" : ";") + c.label;
                }
            }
            out += format == ReportFormat::markdown ? " | " + cell : "," + cell;
        }
        out += format == ReportFormat::markdown ? " |\n" : "," + csv_field(winners) + "\n";
    }
    return out;
}

}  // namespace w2i
