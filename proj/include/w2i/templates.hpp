#pragma once

#include "w2i/types.hpp"

#include <map>
#include <string>
#include <string_view>

namespace w2i::templates {

/// Substitutes `{{name}}` placeholders. Every placeholder in `tmpl` must have
/// a value in `values`; otherwise TemplateError.
std::string render(std::string_view tmpl, const std::map<std::string, std::string>& values);

// Placeholders: original_prompt, current_prompt, current_scores,
// optimization_history, visual_analysis.
std::string_view orchestrator();

// Placeholders: task_type, original_prompt, current_prompt, visual_analysis,
// score_summary, history_block, reasoning, output_rules, examples.
std::string_view prompt_optimizer();
/// Output-rule block for one task type (the A/B/C/D case).
std::string_view prompt_optimizer_rules(TaskType type);
/// Few-shot examples matching the same case.
std::string_view prompt_optimizer_examples(TaskType type);

// Placeholders: original_prompt, query, category, max_selections.
std::string_view retriever_selector();

// Placeholders: original_prompt, failed_query.
std::string_view query_rewriter();

// Placeholders: prompt.
std::string_view visual_analysis();

// Placeholders: prompt.
std::string_view grader();

// Placeholders: prompt, candidates, descriptors.
std::string_view keyword_extractor();

// Placeholders: prompt, visual_analysis, references, keywords.
std::string_view keyword_grader();

}  // namespace w2i::templates
