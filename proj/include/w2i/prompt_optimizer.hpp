#pragma once

#include "w2i/backend.hpp"
#include "w2i/types.hpp"

#include <string>
#include <string_view>
#include <vector>

namespace w2i {

enum class PromptWarningKind { missing_index_reference, index_out_of_range };

struct PromptWarning {
    PromptWarningKind kind;
    std::string message;
};

std::string_view to_string(PromptWarningKind kind);

/// Number of recent iterations summarized in the optimizer's history block.
inline constexpr std::size_t kOptimizerHistoryWindow = 3;

/// Renders the optimizer template with the output-rule case and examples for
/// `task_type` only. Attaches the current image, then the exemplar images in
/// positional order. Throws TemplateError for an empty original prompt.
LlmRequest build_optimizer_request(TaskType task_type, const OptimizationState& state,
                                   const std::string& draft_prompt,
                                   const std::string& decision_reasoning,
                                   const std::string& visual_analysis);

/// Throws PromptParseError when "prompt" is absent or blank. Negatives may be
/// a comma-separated string or a list.
OptimizedPrompt parse_optimized_prompt(std::string_view text);

/// Advisory check of "image k" references for the reference-driven task
/// types. In editing-with-reference mode the current image is image 1.
std::vector<PromptWarning> validate_prompt_references(const OptimizedPrompt& opt,
                                                      TaskType task_type,
                                                      const ExemplarSet& exemplars);

OptimizedPrompt optimize_prompt(CallContext& ctx, const OptimizationState& state,
                                const OrchestratorDecision& decision);

}  // namespace w2i
