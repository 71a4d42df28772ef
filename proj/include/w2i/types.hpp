#pragma once

#include "w2i/codec.hpp"
#include "w2i/transcript.hpp"

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace w2i {

// ---------------------------------------------------------------------------
// Images
// ---------------------------------------------------------------------------

enum class ImageOrigin { generated, retrieved };

std::string_view to_string(ImageOrigin origin);

/// An immutable image. `id` is the SHA-256 of the bytes, so equal bytes always
/// produce equal ids and the artifact can be shared freely across threads.
class ImageArtifact {
public:
    /// Empty placeholder (no bytes, empty id).
    ImageArtifact();

    static ImageArtifact generated(Bytes bytes, int iteration);
    static ImageArtifact retrieved(Bytes bytes);

    const std::string& id() const noexcept { return id_; }
    const Bytes& bytes() const noexcept { return *bytes_; }
    bool empty() const noexcept { return id_.empty(); }
    const std::string& extension() const noexcept { return extension_; }
    ImageOrigin origin() const noexcept { return origin_; }
    std::optional<int> created_at_iteration() const noexcept { return iteration_; }

    friend bool operator==(const ImageArtifact& a, const ImageArtifact& b) {
        return a.id_ == b.id_;
    }

private:
    ImageArtifact(Bytes bytes, ImageOrigin origin, std::optional<int> iteration);

    std::string id_;
    std::shared_ptr<const Bytes> bytes_;
    std::string extension_;
    ImageOrigin origin_;
    std::optional<int> iteration_;
};

// ---------------------------------------------------------------------------
// Exemplars
// ---------------------------------------------------------------------------

struct Exemplar {
    ImageArtifact image;
    std::string source_url;
    std::string query;
    double selection_score = 0.0;
    std::string rationale;
};

/// Ordered reference images. Position k (1-based) is "image k" in prompts
/// that use reference indexing.
class ExemplarSet {
public:
    ExemplarSet() = default;
    explicit ExemplarSet(std::size_t cap) : cap_(cap) {}

    /// Appends unless full; returns whether the item was kept.
    bool push(Exemplar e);

    const std::vector<Exemplar>& items() const noexcept { return items_; }
    std::size_t size() const noexcept { return items_.size(); }
    bool empty() const noexcept { return items_.empty(); }
    std::size_t cap() const noexcept { return cap_; }

    std::vector<std::string> ids() const;
    std::vector<ImageArtifact> images() const;

private:
    std::vector<Exemplar> items_;
    std::size_t cap_ = 0;
};

// ---------------------------------------------------------------------------
// Task types
// ---------------------------------------------------------------------------

enum class TaskType {
    text_to_image,
    text_image_to_image,
    image_editing_with_prompt,
    image_editing_with_prompt_and_reference,
};

inline constexpr TaskType kAllTaskTypes[] = {
    TaskType::text_to_image,
    TaskType::text_image_to_image,
    TaskType::image_editing_with_prompt,
    TaskType::image_editing_with_prompt_and_reference,
};

std::string_view to_string(TaskType type);
std::optional<TaskType> parse_task_type(std::string_view text);

enum class Strategy { prompt_optimizer, image_retrieval };

std::string_view to_string(Strategy s);
std::optional<Strategy> parse_strategy(std::string_view text);

// ---------------------------------------------------------------------------
// Scoring
// ---------------------------------------------------------------------------

struct Weights {
    double alpha = 0.5;
    double beta = 0.3;
    double gamma = 0.2;

    double sum() const noexcept { return alpha + beta + gamma; }
    friend bool operator==(const Weights&, const Weights&) = default;
};

struct Keyword {
    std::string text;  // canonical lowercase
    double weight = 1.0;
    bool critical = false;
};

struct KeywordJudgment {
    Keyword keyword;
    double grade = 0.0;  // exactly 1.0, 0.5 or 0.0
    std::string rationale;
};

struct DimensionScore {
    double score = 0.0;  // 0..10
    std::string explanation;
};

/// Five-dimension 0..10 rubric returned by the grader judge.
struct GraderReport {
    DimensionScore accuracy_to_prompt;
    DimensionScore creativity_and_originality;
    DimensionScore visual_quality_and_realism;
    DimensionScore consistency_and_cohesion;
    DimensionScore emotional_or_thematic_resonance;
    double overall_score = 0.0;       // as reported by the judge
    double overall_recomputed = 0.0;  // mean of the five dimensions
    std::vector<std::string> warnings;
};

struct ScoreBreakdown {
    double s_sem = 0.0;
    double k_coverage = 0.0;
    double aesthetic = 0.0;
    Weights weights;
    double total = 0.0;
    std::vector<KeywordJudgment> keyword_judgments;
    std::optional<GraderReport> grader_report;
};

// ---------------------------------------------------------------------------
// Orchestration
// ---------------------------------------------------------------------------

struct OrchestratorDecision {
    TaskType task_type = TaskType::text_to_image;
    std::vector<Strategy> strategies;
    std::vector<std::string> references_needed;
    std::string draft_prompt;
    std::string reasoning;
    std::string score_analysis;
    std::string keyword_analysis;
    double confidence = 0.0;
    bool early_stop = false;
    /// Audit trail of corrections applied by validate_decision.
    std::vector<std::string> repairs;
};

struct OptimizedPrompt {
    std::string prompt;
    std::vector<std::string> negative_prompts;

    std::string joined_negatives() const;
};

// ---------------------------------------------------------------------------
// Loop records
// ---------------------------------------------------------------------------

struct IterationRecord {
    int t = 0;
    std::optional<OrchestratorDecision> decision;
    std::string prompt_before;
    std::string prompt_after;
    std::vector<std::string> negative_prompts;
    std::vector<std::string> prompt_warnings;
    ExemplarSet exemplars;
    ImageArtifact image;
    TaskType generation_mode = TaskType::text_to_image;
    ScoreBreakdown score;
    std::string visual_analysis;
    Transcript transcript;
};

enum class BackendProfile { live, mock };

std::string_view to_string(BackendProfile p);

struct RunConfig {
    int t_max = 2;
    double threshold_tau = 0.85;
    Weights weights;
    bool allow_unnormalized_weights = false;
    int exemplar_cap = 2;
    int search_result_count = 8;
    int query_rewrite_attempts = 2;
    int json_parse_retries = 2;
    std::uint64_t seed = 0;
    BackendProfile backend_profile = BackendProfile::mock;
    bool retrieval_enabled = true;

    /// Throws ConfigError naming every offending field.
    void validate() const;
};

enum class Termination {
    threshold_met,
    budget_exhausted,
    orchestrator_early_stop,
    fatal_error,
};

std::string_view to_string(Termination t);

struct RunResult {
    std::string run_id;
    std::string created_at;
    std::string original_prompt;
    RunConfig config;
    std::vector<IterationRecord> iterations;
    int best_index = -1;  // -1 only when no iteration completed
    Termination termination = Termination::budget_exhausted;
    std::optional<ImageArtifact> final_image;
    /// Decision that ended the loop when termination=orchestrator_early_stop.
    std::optional<OrchestratorDecision> stop_decision;
    /// Calls made by the iteration that stopped early (it leaves no record).
    Transcript stop_transcript;
    std::string error;
};

/// What the agents see when deciding the next step.
struct OptimizationState {
    std::string original_prompt;
    std::string current_prompt;
    std::optional<ImageArtifact> current_image;
    ExemplarSet exemplars;
    std::optional<ScoreBreakdown> current_score;
    std::string visual_analysis;
    /// Latest completed record (null before the baseline exists).
    const IterationRecord* current_record = nullptr;
    /// Records before the current one, oldest first.
    std::vector<const IterationRecord*> history;

    static OptimizationState from_records(const std::string& original_prompt,
                                          const std::vector<IterationRecord>& records);
};

}  // namespace w2i
