#include "w2i/orchestrator.hpp"

#include "w2i/error.hpp"
#include "w2i/json_extract.hpp"
#include "w2i/serialize.hpp"
#include "w2i/templates.hpp"

#include <algorithm>

namespace w2i {

namespace {

Json history_json(const OptimizationState& state) {
    Json arr = Json::array();
    for (const auto* rec : state.history) {
        Json entry;
        entry["iteration"] = rec->t;
        if (rec->decision) {
            entry["task_type"] = to_string(rec->decision->task_type);
            Json strategies = Json::array();
            for (auto s : rec->decision->strategies) strategies.push_back(to_string(s));
            entry["strategies"] = strategies;
        } else {
            entry["task_type"] = nullptr;
            entry["strategies"] = Json::array();
        }
        entry["prompt"] = rec->prompt_after;
        Json queries = Json::array();
        for (const auto& e : rec->exemplars.items()) queries.push_back(e.query);
        entry["exemplar_queries"] = queries;
        entry["score"] = rec->score.total;
        arr.push_back(std::move(entry));
    }
    return arr;
}

std::string required_string(const Json& j, const char* key, std::string_view raw) {
    auto it = j.find(key);
    if (it == j.end() || it->is_null()) {
        throw DecisionParseError(std::string("decision missing '") + key + "'", std::string(raw));
    }
    if (!it->is_string()) {
        throw DecisionParseError(std::string("decision '") + key + "' is not a string",
                                 std::string(raw));
    }
    return it->get<std::string>();
}

std::string optional_string(const Json& j, const char* key, std::string_view raw) {
    auto it = j.find(key);
    if (it == j.end() || it->is_null()) return {};
    if (!it->is_string()) {
        throw DecisionParseError(std::string("decision '") + key + "' is not a string",
                                 std::string(raw));
    }
    return it->get<std::string>();
}

}  // namespace

LlmRequest build_orchestrator_request(const OptimizationState& state,
                                      const std::string& visual_analysis) {
    if (state.original_prompt.empty()) throw TemplateError("original prompt is empty");
    if (state.current_prompt.empty()) throw TemplateError("current prompt is empty");
    const Json scores = state.current_score ? score_brief(*state.current_score) : Json::object();
    auto text = templates::render(templates::orchestrator(),
                                  {{"original_prompt", state.original_prompt},
                                   {"current_prompt", state.current_prompt},
                                   {"current_scores", scores.dump(2)},
                                   {"optimization_history", history_json(state).dump(2)},
                                   {"visual_analysis", visual_analysis}});
    std::vector<ImageArtifact> attachments;
    if (state.current_image && !state.current_image->empty()) {
        attachments.push_back(*state.current_image);
    }
    return LlmRequest::make(LlmRole::orchestrator, std::move(text), std::move(attachments));
}

OrchestratorDecision parse_decision(std::string_view text) {
    Json j;
    try {
        j = extract_json_object(text);
    } catch (const ParseError& e) {
        throw DecisionParseError(std::string("decision is not JSON: ") + e.what(),
                                 std::string(text));
    }

    OrchestratorDecision d;
    const auto task = required_string(j, "task_type", text);
    auto parsed_task = parse_task_type(task);
    if (!parsed_task) {
        throw DecisionParseError("unknown task_type '" + task + "'", std::string(text));
    }
    d.task_type = *parsed_task;

    auto strategies = j.find("strategies");
    if (strategies == j.end() || !strategies->is_array()) {
        throw DecisionParseError("decision 'strategies' must be a list", std::string(text));
    }
    for (const auto& s : *strategies) {
        if (!s.is_string()) {
            throw DecisionParseError("strategy entries must be strings", std::string(text));
        }
        auto parsed = parse_strategy(s.get<std::string>());
        if (!parsed) {
            throw DecisionParseError("unknown strategy '" + s.get<std::string>() + "'",
                                     std::string(text));
        }
        if (std::find(d.strategies.begin(), d.strategies.end(), *parsed) == d.strategies.end()) {
            d.strategies.push_back(*parsed);
        }
    }

    // A bare string is accepted as a single keyword.
    auto refs = j.find("references_needed");
    if (refs != j.end() && !refs->is_null()) {
        if (refs->is_string()) {
            if (!refs->get<std::string>().empty()) d.references_needed.push_back(refs->get<std::string>());
        } else if (refs->is_array()) {
            for (const auto& r : *refs) {
                if (!r.is_string()) {
                    throw DecisionParseError("references_needed entries must be strings",
                                             std::string(text));
                }
                if (!r.get<std::string>().empty()) d.references_needed.push_back(r.get<std::string>());
            }
        } else {
            throw DecisionParseError("references_needed must be a list", std::string(text));
        }
    }

    d.draft_prompt = optional_string(j, "draft_prompt", text);
    d.reasoning = optional_string(j, "reasoning", text);
    d.score_analysis = optional_string(j, "score_analysis", text);
    d.keyword_analysis = optional_string(j, "keyword_analysis", text);

    auto conf = j.find("confidence");
    if (conf == j.end() || !conf->is_number()) {
        throw DecisionParseError("decision 'confidence' must be a number", std::string(text));
    }
    d.confidence = conf->get<double>();
    if (d.confidence < 0.0 || d.confidence > 1.0) {
        throw DecisionParseError("confidence outside [0,1]", std::string(text));
    }

    auto stop = j.find("early_stop");
    if (stop != j.end() && !stop->is_null()) {
        if (!stop->is_boolean()) {
            throw DecisionParseError("early_stop must be a boolean", std::string(text));
        }
        d.early_stop = stop->get<bool>();
    }

    auto repairs = j.find("repairs");
    if (repairs != j.end() && repairs->is_array()) {
        for (const auto& r : *repairs) {
            if (r.is_string()) d.repairs.push_back(r.get<std::string>());
        }
    }
    return d;
}

std::vector<Strategy> canonical_strategies(TaskType type) {
    switch (type) {
        case TaskType::text_to_image:
        case TaskType::image_editing_with_prompt:
            return {Strategy::prompt_optimizer};
        case TaskType::text_image_to_image:
        case TaskType::image_editing_with_prompt_and_reference:
            return {Strategy::prompt_optimizer, Strategy::image_retrieval};
    }
    return {Strategy::prompt_optimizer};
}

OrchestratorDecision validate_decision(OrchestratorDecision d) {
    auto canonical = canonical_strategies(d.task_type);
    if (d.strategies != canonical) {
        auto describe = [](const std::vector<Strategy>& v) {
            std::string out = "[";
            for (std::size_t i = 0; i < v.size(); ++i) {
                if (i) out += ", ";
                out += to_string(v[i]);
            }
            return out + "]";
        };
        d.repairs.push_back("strategies " + describe(d.strategies) + " -> " +
                            describe(canonical) + " for " + std::string(to_string(d.task_type)));
        d.strategies = std::move(canonical);
    }

    std::size_t min_refs = 0;
    std::size_t max_refs = 0;
    switch (d.task_type) {
        case TaskType::text_image_to_image: min_refs = 1; max_refs = 2; break;
        case TaskType::image_editing_with_prompt_and_reference: min_refs = 1; max_refs = 1; break;
        default: break;
    }
    if (d.references_needed.size() < min_refs && !d.early_stop) {
        throw DecisionValidationError(std::string(to_string(d.task_type)) +
                                          " needs at least one reference keyword",
                                      to_json(d).dump());
    }
    if (d.references_needed.size() > max_refs) {
        d.repairs.push_back("references_needed truncated from " +
                            std::to_string(d.references_needed.size()) + " to " +
                            std::to_string(max_refs));
        d.references_needed.resize(max_refs);
    }
    return d;
}

InvokeFlags decision_to_flags(const OrchestratorDecision& d) {
    auto has = [&](Strategy s) {
        return std::find(d.strategies.begin(), d.strategies.end(), s) != d.strategies.end();
    };
    return {has(Strategy::prompt_optimizer), has(Strategy::image_retrieval)};
}

OrchestratorDecision orchestrate(CallContext& ctx, const OptimizationState& state) {
    auto request = build_orchestrator_request(state, state.visual_analysis);
    auto decision = ctx.ask_json(
        request,
        [](const std::string& reply) { return validate_decision(parse_decision(reply)); },
        state.current_prompt);
    for (const auto& r : decision.repairs) ctx.note("decision repair: " + r);
    return decision;
}

}  // namespace w2i
