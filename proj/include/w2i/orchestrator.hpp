#pragma once

#include "w2i/backend.hpp"
#include "w2i/types.hpp"

#include <string>
#include <string_view>
#include <vector>

namespace w2i {

struct InvokeFlags {
    bool invoke_poa = false;
    bool invoke_ira = false;

    friend bool operator==(const InvokeFlags&, const InvokeFlags&) = default;
};

/// Renders the orchestrator template for the current state and attaches the
/// latest image, if there is one.
LlmRequest build_orchestrator_request(const OptimizationState& state,
                                      const std::string& visual_analysis);

/// Maps a model reply onto a decision. Missing score_analysis,
/// keyword_analysis and early_stop default to empty/false. Throws
/// DecisionParseError (carrying the raw reply) on bad JSON, unknown enum
/// values, or missing required keys.
OrchestratorDecision parse_decision(std::string_view text);

/// Strategy list each task type must use.
std::vector<Strategy> canonical_strategies(TaskType type);

/// Repairs strategies to the canonical table and truncates surplus
/// references; every repair is appended to `repairs`. Throws
/// DecisionValidationError when a retrieval task type has no references.
OrchestratorDecision validate_decision(OrchestratorDecision decision);

InvokeFlags decision_to_flags(const OrchestratorDecision& decision);

/// One orchestration step: request, parse, validate. Rejected replies are
/// re-asked up to the context's retry budget.
OrchestratorDecision orchestrate(CallContext& ctx, const OptimizationState& state);

}  // namespace w2i
