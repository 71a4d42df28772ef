#pragma once

#include "w2i/backend.hpp"
#include "w2i/types.hpp"

#include <map>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace w2i {

// ---------------------------------------------------------------------------
// Keyword set
// ---------------------------------------------------------------------------

inline constexpr double kCriticalKeywordMultiplier = 2.0;

/// Rule-based first pass: drops stopwords, keeps content tokens and merges runs
/// of capitalized tokens into one entity ("Dr Strange"). Lowercase, deduped,
/// never empty for a non-empty prompt.
std::vector<std::string> rule_based_keyword_candidates(std::string_view prompt);

/// Canonicalizes (lowercase, trim, dedupe keeping the first occurrence and
/// OR-ing critical flags), assigns 2 to critical and 1 to other keywords,
/// then renormalizes weights to sum 1.
std::vector<Keyword> normalize_keywords(const std::vector<Keyword>& raw);

/// Parses the merge pass reply. Entries may be strings or
/// {"text", "critical"} objects. Throws KeywordExtractionError.
std::vector<Keyword> parse_keyword_list(std::string_view text);

struct KeywordExtraction {
    std::vector<Keyword> keywords;
    bool degraded = false;  // merge pass failed; rule-based list with uniform weights
};

KeywordExtraction extract_keywords(CallContext& ctx, const std::string& prompt,
                                   const ExemplarSet& exemplars);

// ---------------------------------------------------------------------------
// Keyword grading and coverage
// ---------------------------------------------------------------------------

/// "present" → 1, "partially present" → 0.5, "missing" → 0. Any other label
/// throws GradeParseError.
double grade_from_label(std::string_view label);

/// Maps judge output onto `keywords` (same order). Keywords the judge skipped
/// are graded 0 with rationale "not addressed by judge" and listed in
/// `notes`.
std::vector<KeywordJudgment> parse_keyword_judgments(std::string_view text,
                                                     const std::vector<Keyword>& keywords,
                                                     std::vector<std::string>& notes);

std::vector<KeywordJudgment> grade_keywords(CallContext& ctx, const std::vector<Keyword>& keywords,
                                            const std::string& prompt,
                                            const ExemplarSet& exemplars,
                                            const ImageArtifact& image,
                                            const std::string& visual_analysis);

/// Σ weight·grade. Throws EmptyKeywordSet on an empty list.
double coverage(const std::vector<KeywordJudgment>& judgments);

// ---------------------------------------------------------------------------
// Composite score
// ---------------------------------------------------------------------------

/// total = α·s_sem + β·k_cov + γ·aesthetic. Throws WeightError for negative
/// weights and ContractViolation for components outside [0,1].
ScoreBreakdown aggregate_score(double s_sem, double k_cov, double aesthetic, const Weights& weights);

// ---------------------------------------------------------------------------
// Grader rubric
// ---------------------------------------------------------------------------

/// Throws GraderParseError on schema violations. Dimension scores outside
/// [0,10] are clamped and a warning is kept on the report.
GraderReport parse_grader_report(std::string_view text);

GraderReport llm_grade(CallContext& ctx, const ImageArtifact& image, const std::string& prompt);

/// One grader call per (image, prompt) for the lifetime of the cache. Scoped
/// to a single iteration.
class GraderCache {
public:
    const GraderReport& get(CallContext& ctx, const ImageArtifact& image, const std::string& prompt);

private:
    std::map<std::pair<std::string, std::string>, GraderReport> reports_;
};

double semantic_score(CallContext& ctx, GraderCache& cache, const ImageArtifact& image,
                      const std::string& original_prompt);
double aesthetic_score(CallContext& ctx, GraderCache& cache, const ImageArtifact& image,
                       const std::string& original_prompt);

/// Free-text critique of `image` against `prompt`. An empty reply is returned
/// as "" and noted in the transcript.
std::string visual_analysis(CallContext& ctx, const ImageArtifact& image, const std::string& prompt);

// ---------------------------------------------------------------------------
// Report scaling
// ---------------------------------------------------------------------------

enum class GraderDimension {
    emotional_or_thematic_resonance,
    consistency_and_cohesion,
    visual_quality_and_realism,
    creativity_and_originality,
    accuracy_to_prompt,
    overall,
};

/// Table row order: the five dimensions then Overall.
inline constexpr GraderDimension kReportRows[] = {
    GraderDimension::emotional_or_thematic_resonance, GraderDimension::consistency_and_cohesion,
    GraderDimension::visual_quality_and_realism,      GraderDimension::creativity_and_originality,
    GraderDimension::accuracy_to_prompt,              GraderDimension::overall,
};

std::string_view key_of(GraderDimension d);    // JSON key, e.g. "accuracy_to_prompt"
std::string_view label_of(GraderDimension d);  // table label, e.g. "Accuracy-to-Prompt"

/// Every dimension ×10 (0–100). "overall" uses the recomputed mean.
std::map<GraderDimension, double> report_scale(const GraderReport& report);

// ---------------------------------------------------------------------------
// Iteration scoring
// ---------------------------------------------------------------------------

struct IterationScore {
    ScoreBreakdown breakdown;
    std::string visual_analysis;
};

/// Visual analysis, keyword grading and one grader call, combined into s_t.
/// Scoring is always against the original prompt.
IterationScore score_iteration(CallContext& ctx, const ImageArtifact& image,
                               const std::string& original_prompt, const ExemplarSet& exemplars,
                               const std::vector<Keyword>& keywords, const Weights& weights);

}  // namespace w2i
