#pragma once

#include "w2i/backend.hpp"
#include "w2i/orchestrator.hpp"
#include "w2i/types.hpp"

#include <chrono>
#include <functional>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace w2i {

/// State update for one iteration: p_t and E_t from the previous record and
/// whichever agents ran. Throws ContractViolation when the presence of an
/// output disagrees with its flag.
std::pair<std::string, ExemplarSet> advance_state(const IterationRecord& prev, InvokeFlags flags,
                                                  const std::optional<OptimizedPrompt>& poa_out,
                                                  const std::optional<ExemplarSet>& ira_out);

struct BestPick {
    int index = 0;
    ImageArtifact image;
};

/// Lowest index with the maximum score.total. Throws EmptyHistory.
BestPick select_best(const std::vector<IterationRecord>& iterations);

/// Generator inputs for a task type. Falls back to a mode the available
/// images can satisfy (reference modes without exemplars) and says so in
/// `note`.
struct GenerationPlan {
    TaskType mode = TaskType::text_to_image;
    std::vector<ImageArtifact> positional_images;
    std::string note;
};

GenerationPlan plan_generation(TaskType requested, const std::optional<ImageArtifact>& current_image,
                               const ExemplarSet& exemplars);

struct RunOptions {
    std::string run_id;
    std::chrono::system_clock::time_point started = std::chrono::system_clock::now();
    /// Called after each completed iteration.
    std::function<void(const IterationRecord&)> on_iteration;
};

/// ISO-8601 UTC, second precision ("2026-10-19T12:00:00Z").
std::string iso_timestamp(std::chrono::system_clock::time_point tp);

/// The full loop: baseline generation at t=0, then up to t_max rounds of
/// orchestrate → prompt optimizer → image retrieval → generate → score.
/// Throws ConfigError before any backend call; backend and parse failures
/// end the run with termination=fatal_error and the completed records.
RunResult run_optimization(const RunConfig& config, const std::string& prompt,
                           const BackendBundle& backends, const RunOptions& options = {});

}  // namespace w2i
