#include "w2i/prompt_optimizer.hpp"

#include "w2i/error.hpp"
#include "w2i/json_extract.hpp"
#include "w2i/serialize.hpp"
#include "w2i/templates.hpp"
#include "w2i/text.hpp"

#include <cstdio>
#include <regex>

namespace w2i {

std::string_view to_string(PromptWarningKind kind) {
    return kind == PromptWarningKind::missing_index_reference ? "MissingIndexReference"
                                                              : "IndexOutOfRange";
}

namespace {

std::string history_block(const OptimizationState& state) {
    std::vector<const IterationRecord*> records = state.history;
    if (state.current_record) records.push_back(state.current_record);
    if (records.empty()) return "none";
    const auto first = records.size() > kOptimizerHistoryWindow
                           ? records.size() - kOptimizerHistoryWindow
                           : std::size_t{0};
    std::string out;
    for (auto i = first; i < records.size(); ++i) {
        char score[32];
        std::snprintf(score, sizeof score, "%.4f", records[i]->score.total);
        out += "\n  - t=" + std::to_string(records[i]->t) + ", score=" + score +
               ", prompt: " + records[i]->prompt_after;
    }
    return out;
}

std::string score_summary(const OptimizationState& state) {
    if (!state.current_score) return "none";
    return score_brief(*state.current_score).dump();
}

}  // namespace

LlmRequest build_optimizer_request(TaskType task_type, const OptimizationState& state,
                                   const std::string& draft_prompt,
                                   const std::string& decision_reasoning,
                                   const std::string& visual_analysis) {
    if (trim(state.original_prompt).empty()) throw TemplateError("original prompt is empty");
    std::string reasoning = decision_reasoning;
    if (!draft_prompt.empty()) {
        if (!reasoning.empty()) reasoning += "\n";
        reasoning += "Draft prompt: " + draft_prompt;
    }
    const std::string current = state.current_prompt.empty() ? state.original_prompt
                                                             : state.current_prompt;
    auto text = templates::render(
        templates::prompt_optimizer(),
        {{"task_type", std::string(to_string(task_type))},
         {"original_prompt", state.original_prompt},
         {"current_prompt", current},
         {"visual_analysis", visual_analysis},
         {"score_summary", score_summary(state)},
         {"history_block", history_block(state)},
         {"reasoning", reasoning},
         {"output_rules", std::string(templates::prompt_optimizer_rules(task_type))},
         {"examples", std::string(templates::prompt_optimizer_examples(task_type))}});

    std::vector<ImageArtifact> attachments;
    if (state.current_image && !state.current_image->empty()) {
        attachments.push_back(*state.current_image);
    }
    for (const auto& e : state.exemplars.items()) attachments.push_back(e.image);
    return LlmRequest::make(LlmRole::prompt_optimizer, std::move(text), std::move(attachments));
}

OptimizedPrompt parse_optimized_prompt(std::string_view text) {
    Json j;
    try {
        j = extract_json_object(text);
    } catch (const ParseError& e) {
        throw PromptParseError(std::string("optimizer reply is not JSON: ") + e.what(),
                               std::string(text));
    }
    auto p = j.find("prompt");
    if (p == j.end() || !p->is_string() || trim(p->get<std::string>()).empty()) {
        throw PromptParseError("optimizer reply has no usable 'prompt'", std::string(text));
    }
    OptimizedPrompt out;
    out.prompt = p->get<std::string>();

    auto neg = j.find("negative_prompts");
    if (neg == j.end()) neg = j.find("negative prompts");  // spelling seen in the wild
    if (neg != j.end()) {
        auto add = [&](std::string_view piece) {
            for (auto& part : split(piece, ',')) {
                auto t = trim(part);
                if (!t.empty()) out.negative_prompts.emplace_back(t);
            }
        };
        if (neg->is_string()) {
            add(neg->get<std::string>());
        } else if (neg->is_array()) {
            for (const auto& item : *neg) {
                if (item.is_string()) add(item.get<std::string>());
            }
        } else if (!neg->is_null()) {
            throw PromptParseError("negative_prompts must be a string or list", std::string(text));
        }
    }
    return out;
}

std::vector<PromptWarning> validate_prompt_references(const OptimizedPrompt& opt,
                                                      TaskType task_type,
                                                      const ExemplarSet& exemplars) {
    std::size_t available = 0;
    switch (task_type) {
        case TaskType::text_image_to_image: available = exemplars.size(); break;
        case TaskType::image_editing_with_prompt_and_reference: available = 1 + exemplars.size(); break;
        default: return {};
    }

    static const std::regex kImageRef(R"(\bimage\s*#?\s*(\d+))", std::regex::icase);
    std::vector<PromptWarning> warnings;
    bool any = false;
    for (std::sregex_iterator it(opt.prompt.begin(), opt.prompt.end(), kImageRef), end; it != end;
         ++it) {
        any = true;
        const auto k = std::stoul((*it)[1].str());
        if (k < 1 || k > available) {
            warnings.push_back({PromptWarningKind::index_out_of_range,
                                "prompt references image " + std::to_string(k) + " but only " +
                                    std::to_string(available) + " positional image(s) exist"});
        }
    }
    if (!any) {
        warnings.push_back({PromptWarningKind::missing_index_reference,
                            "prompt for " + std::string(to_string(task_type)) +
                                " does not reference any image by index"});
    }
    return warnings;
}

OptimizedPrompt optimize_prompt(CallContext& ctx, const OptimizationState& state,
                                const OrchestratorDecision& decision) {
    auto request = build_optimizer_request(decision.task_type, state, decision.draft_prompt,
                                           decision.reasoning, state.visual_analysis);
    return ctx.ask_json(
        request, [](const std::string& reply) { return parse_optimized_prompt(reply); },
        state.current_prompt);
}

}  // namespace w2i
