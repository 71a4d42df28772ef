#pragma once

#include "w2i/backend.hpp"
#include "w2i/types.hpp"

#include <string>
#include <string_view>
#include <vector>

namespace w2i {

struct CandidateSelection {
    int image_index = 0;
    double score = 0.0;
    std::string reasoning;
};

/// Selections below this score are dropped unless nothing else survives.
inline constexpr double kSelectionThreshold = 0.6;
inline constexpr std::size_t kMaxRewriteWords = 8;

/// First non-empty line of the reply, surrounding quotes removed, cut to
/// eight words. Throws RewriteFailed when nothing is left.
std::string clean_rewrite_reply(std::string_view reply);

std::string rewrite_query(CallContext& ctx, const std::string& target_prompt,
                          const std::string& failed_query);

/// Raw selections as returned by the judge. Throws SelectionParseError on
/// malformed JSON, a missing or empty "selections" list, or scores outside
/// [0,1].
std::vector<CandidateSelection> parse_selections(std::string_view text);

/// Drops out-of-range indices (reported through `notes`), applies the 0.6
/// threshold with the keep-best fallback, and caps at `max_selections` by
/// descending score.
std::vector<CandidateSelection> apply_selection_rules(std::vector<CandidateSelection> raw,
                                                      std::size_t candidate_count,
                                                      std::size_t max_selections,
                                                      std::vector<std::string>& notes);

std::vector<CandidateSelection> select_candidates(CallContext& ctx,
                                                  const std::vector<SearchCandidate>& candidates,
                                                  const std::string& target_prompt,
                                                  const std::string& query,
                                                  const std::string& category,
                                                  std::size_t max_selections);

/// Dedupe by image id (first wins), keep order, truncate to cap.
ExemplarSet merge_exemplar_set(const std::vector<Exemplar>& selected, std::size_t cap);

/// "STYLE" when the orchestrator's keyword analysis talks about style,
/// otherwise "CONTENT".
std::string retrieval_category(const OrchestratorDecision& decision);

struct RetrievalOptions {
    std::size_t cap = 2;
    int search_result_count = 8;
    int query_rewrite_attempts = 2;
    std::string category = "CONTENT";
};

struct RetrievalResult {
    ExemplarSet exemplars;
    /// PartialRetrieval and similar non-fatal conditions.
    std::vector<std::string> warnings;
};

/// Runs search → (rewrite on empty) → thumbnail fetch → judge selection for
/// each query in order and returns a fresh exemplar set. `target_prompt` is
/// the working prompt for this iteration. Throws ExemplarsUnavailable when no
/// query yields an exemplar.
RetrievalResult retrieve_exemplars(CallContext& ctx, const std::vector<std::string>& queries,
                                   const std::string& target_prompt,
                                   const RetrievalOptions& options);

}  // namespace w2i
