#pragma once

#include "w2i/json_extract.hpp"
#include "w2i/types.hpp"

namespace w2i {

Json to_json(const ImageArtifact& image);
Json to_json(const Weights& weights);
Json to_json(const ExemplarSet& exemplars);
Json to_json(const Transcript& transcript);

/// decision.json: the orchestrator schema keys plus "early_stop" and "repairs".
Json to_json(const OrchestratorDecision& decision);

/// Grader schema plus "overall_recomputed" and "warnings".
Json to_json(const GraderReport& report);

/// score.json body.
Json to_json(const ScoreBreakdown& score);

/// prompt.json body.
Json prompt_json(const std::string& prompt, const std::vector<std::string>& negatives,
                 const std::vector<std::string>& warnings);

/// Compact score view fed back into agent prompts.
Json score_brief(const ScoreBreakdown& score);

}  // namespace w2i
