#include "w2i/retriever.hpp"

#include "w2i/error.hpp"
#include "w2i/json_extract.hpp"
#include "w2i/templates.hpp"
#include "w2i/text.hpp"

#include <algorithm>
#include <set>
#include <sstream>

namespace w2i {

std::string clean_rewrite_reply(std::string_view reply) {
    std::string_view line;
    for (auto piece : split(reply, '\n')) {
        auto t = trim(piece);
        if (!t.empty()) {
            line = t;
            break;
        }
    }
    while (line.size() >= 2 &&
           ((line.front() == '"' && line.back() == '"') ||
            (line.front() == '\'' && line.back() == '\''))) {
        line = trim(line.substr(1, line.size() - 2));
    }
    std::istringstream words{std::string(line)};
    std::string word;
    std::string out;
    std::size_t count = 0;
    while (words >> word && count < kMaxRewriteWords) {
        if (count++) out += ' ';
        out += word;
    }
    if (out.empty()) throw RewriteFailed("query rewriter returned nothing", std::string(reply));
    return out;
}

std::string rewrite_query(CallContext& ctx, const std::string& target_prompt,
                          const std::string& failed_query) {
    if (failed_query.empty()) throw ContractViolation("failed_query is empty");
    auto text = templates::render(templates::query_rewriter(),
                                  {{"original_prompt", target_prompt},
                                   {"failed_query", failed_query}});
    auto reply = ctx.llm(LlmRequest::make(LlmRole::query_rewriter, std::move(text)), target_prompt);
    return clean_rewrite_reply(reply);
}

std::vector<CandidateSelection> parse_selections(std::string_view text) {
    Json j;
    try {
        j = extract_json_object(text);
    } catch (const ParseError& e) {
        throw SelectionParseError(std::string("selection reply is not JSON: ") + e.what(),
                                  std::string(text));
    }
    auto list = j.find("selections");
    if (list == j.end() || !list->is_array()) {
        throw SelectionParseError("selection reply has no 'selections' list", std::string(text));
    }
    if (list->empty()) {
        throw SelectionParseError("judge selected no image", std::string(text));
    }
    std::vector<CandidateSelection> out;
    for (const auto& item : *list) {
        if (!item.is_object()) {
            throw SelectionParseError("selection entries must be objects", std::string(text));
        }
        auto idx = item.find("image_index");
        auto score = item.find("score");
        if (idx == item.end() || !idx->is_number_integer() || score == item.end() ||
            !score->is_number()) {
            throw SelectionParseError("selection needs integer image_index and numeric score",
                                      std::string(text));
        }
        CandidateSelection s;
        s.image_index = idx->get<int>();
        s.score = score->get<double>();
        if (s.score < 0.0 || s.score > 1.0) {
            throw SelectionParseError("selection score outside [0,1]", std::string(text));
        }
        if (auto r = item.find("reasoning"); r != item.end() && r->is_string()) {
            s.reasoning = r->get<std::string>();
        }
        out.push_back(std::move(s));
    }
    return out;
}

std::vector<CandidateSelection> apply_selection_rules(std::vector<CandidateSelection> raw,
                                                      std::size_t candidate_count,
                                                      std::size_t max_selections,
                                                      std::vector<std::string>& notes) {
    if (max_selections < 1) throw ContractViolation("max_selections must be >= 1");
    std::vector<CandidateSelection> valid;
    std::set<int> seen;
    for (auto& s : raw) {
        if (s.image_index < 0 || static_cast<std::size_t>(s.image_index) >= candidate_count) {
            notes.push_back("dropped selection with out-of-range image_index " +
                            std::to_string(s.image_index));
            continue;
        }
        if (!seen.insert(s.image_index).second) continue;
        valid.push_back(std::move(s));
    }
    std::stable_sort(valid.begin(), valid.end(),
                     [](const auto& a, const auto& b) { return a.score > b.score; });
    std::vector<CandidateSelection> kept;
    for (const auto& s : valid) {
        if (s.score >= kSelectionThreshold) kept.push_back(s);
    }
    if (kept.empty() && !valid.empty()) {
        notes.push_back("no selection reached the threshold; keeping the best-scoring one");
        kept.push_back(valid.front());
    }
    if (kept.size() > max_selections) kept.resize(max_selections);
    return kept;
}

std::vector<CandidateSelection> select_candidates(CallContext& ctx,
                                                  const std::vector<SearchCandidate>& candidates,
                                                  const std::string& target_prompt,
                                                  const std::string& query,
                                                  const std::string& category,
                                                  std::size_t max_selections) {
    if (candidates.empty()) throw ContractViolation("select_candidates needs candidates");
    if (max_selections < 1) throw ContractViolation("max_selections must be >= 1");
    std::vector<ImageArtifact> attachments;
    for (const auto& c : candidates) {
        if (!c.thumbnail) throw ContractViolation("candidate thumbnail not fetched");
        attachments.push_back(*c.thumbnail);
    }
    auto text = templates::render(templates::retriever_selector(),
                                  {{"original_prompt", target_prompt},
                                   {"query", query},
                                   {"category", category},
                                   {"max_selections", std::to_string(max_selections)}});
    auto request = LlmRequest::make(LlmRole::retriever_selector, std::move(text),
                                    std::move(attachments));
    auto raw = ctx.ask_json(
        request, [](const std::string& reply) { return parse_selections(reply); }, target_prompt);
    std::vector<std::string> notes;
    auto kept = apply_selection_rules(std::move(raw), candidates.size(), max_selections, notes);
    for (auto& n : notes) ctx.note(std::move(n));
    return kept;
}

ExemplarSet merge_exemplar_set(const std::vector<Exemplar>& selected, std::size_t cap) {
    ExemplarSet out(cap);
    std::set<std::string> seen;
    for (const auto& e : selected) {
        if (out.size() >= cap) break;
        if (!seen.insert(e.image.id()).second) continue;
        out.push(e);
    }
    return out;
}

std::string retrieval_category(const OrchestratorDecision& decision) {
    return to_lower(decision.keyword_analysis).find("style") != std::string::npos ? "STYLE"
                                                                                   : "CONTENT";
}

RetrievalResult retrieve_exemplars(CallContext& ctx, const std::vector<std::string>& queries,
                                   const std::string& target_prompt,
                                   const RetrievalOptions& options) {
    if (queries.empty()) throw ContractViolation("retrieve_exemplars needs at least one query");
    if (options.cap < 1) throw ContractViolation("exemplar cap must be >= 1");

    RetrievalResult result;
    std::vector<Exemplar> selected;
    std::vector<std::string> failed;

    for (std::size_t qi = 0; qi < queries.size(); ++qi) {
        if (selected.size() >= options.cap) break;
        // Leave one slot for every later query so each keyword gets a position.
        const std::size_t later = queries.size() - qi - 1;
        const std::size_t free = options.cap - selected.size();
        const std::size_t max_selections = free > later ? free - later : 1;

        std::string query = queries[qi];
        std::vector<SearchCandidate> candidates;
        try {
            candidates = ctx.search(query, options.search_result_count, target_prompt);
            for (int attempt = 0; candidates.empty() && attempt < options.query_rewrite_attempts;
                 ++attempt) {
                std::string rewritten;
                try {
                    rewritten = rewrite_query(ctx, target_prompt, query);
                } catch (const RewriteFailed& e) {
                    ctx.note(std::string("query rewrite failed: ") + e.what());
                    break;
                }
                ctx.note("rewrote query '" + query + "' -> '" + rewritten + "'");
                query = rewritten;
                candidates = ctx.search(query, options.search_result_count, target_prompt);
            }
        } catch (const QuotaExceeded& e) {
            ctx.note(std::string("search quota exceeded: ") + e.what());
            candidates.clear();
        }
        if (candidates.empty()) {
            failed.push_back(queries[qi]);
            continue;
        }

        std::vector<SearchCandidate> usable;
        for (auto& c : candidates) {
            try {
                c.thumbnail = ImageArtifact::retrieved(ctx.fetch(c.thumbnail_url));
                usable.push_back(std::move(c));
            } catch (const FatalBackendError& e) {
                ctx.note("dropping candidate " + c.url + ": " + e.what());
            }
        }
        if (usable.empty()) {
            failed.push_back(queries[qi]);
            continue;
        }

        std::vector<CandidateSelection> picks;
        try {
            picks = select_candidates(ctx, usable, target_prompt, query, options.category,
                                      max_selections);
        } catch (const SelectionParseError& e) {
            ctx.note(std::string("selection failed for '") + query + "': " + e.what());
            failed.push_back(queries[qi]);
            continue;
        }

        for (const auto& pick : picks) {
            const auto& c = usable[static_cast<std::size_t>(pick.image_index)];
            ImageArtifact full = *c.thumbnail;
            if (c.url != c.thumbnail_url) {
                try {
                    full = ImageArtifact::retrieved(ctx.fetch(c.url));
                } catch (const FatalBackendError& e) {
                    ctx.note("full image fetch failed, using thumbnail: " + std::string(e.what()));
                }
            }
            selected.push_back(Exemplar{full, c.url, query, pick.score, pick.reasoning});
        }
    }

    result.exemplars = merge_exemplar_set(selected, options.cap);
    if (result.exemplars.empty()) {
        throw ExemplarsUnavailable("no exemplar could be retrieved for any query");
    }
    if (!failed.empty()) {
        std::string msg = "PartialRetrieval: no exemplar for";
        for (const auto& q : failed) msg += " '" + q + "'";
        result.warnings.push_back(msg);
        ctx.note(msg);
    }
    return result;
}

}  // namespace w2i
