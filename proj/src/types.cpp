#include "w2i/types.hpp"

#include "w2i/error.hpp"

#include <cmath>
#include <sstream>

namespace w2i {

std::string_view to_string(ImageOrigin origin) {
    return origin == ImageOrigin::generated ? "generated" : "retrieved";
}

ImageArtifact::ImageArtifact()
    : bytes_(std::make_shared<const Bytes>()), origin_(ImageOrigin::generated) {}

ImageArtifact::ImageArtifact(Bytes bytes, ImageOrigin origin, std::optional<int> iteration)
    : id_(sha256_hex(bytes)),
      extension_(sniff_image_extension(bytes)),
      origin_(origin),
      iteration_(iteration) {
    bytes_ = std::make_shared<const Bytes>(std::move(bytes));
}

ImageArtifact ImageArtifact::generated(Bytes bytes, int iteration) {
    if (iteration < 0) throw ContractViolation("generated image needs iteration >= 0");
    return ImageArtifact(std::move(bytes), ImageOrigin::generated, iteration);
}

ImageArtifact ImageArtifact::retrieved(Bytes bytes) {
    return ImageArtifact(std::move(bytes), ImageOrigin::retrieved, std::nullopt);
}

bool ExemplarSet::push(Exemplar e) {
    if (e.selection_score < 0.0 || e.selection_score > 1.0) {
        throw ContractViolation("exemplar selection_score outside [0,1]");
    }
    if (items_.size() >= cap_) return false;
    items_.push_back(std::move(e));
    return true;
}

std::vector<std::string> ExemplarSet::ids() const {
    std::vector<std::string> out;
    out.reserve(items_.size());
    for (const auto& e : items_) out.push_back(e.image.id());
    return out;
}

std::vector<ImageArtifact> ExemplarSet::images() const {
    std::vector<ImageArtifact> out;
    out.reserve(items_.size());
    for (const auto& e : items_) out.push_back(e.image);
    return out;
}

std::string_view to_string(TaskType type) {
    switch (type) {
        case TaskType::text_to_image: return "text_to_image";
        case TaskType::text_image_to_image: return "text_image_to_image";
        case TaskType::image_editing_with_prompt: return "image_editing_with_prompt";
        case TaskType::image_editing_with_prompt_and_reference:
            return "image_editing_with_prompt_and_reference";
    }
    return "text_to_image";
}

std::optional<TaskType> parse_task_type(std::string_view text) {
    for (auto t : kAllTaskTypes) {
        if (to_string(t) == text) return t;
    }
    return std::nullopt;
}

std::string_view to_string(Strategy s) {
    return s == Strategy::prompt_optimizer ? "prompt_optimizer" : "image_retrieval";
}

std::optional<Strategy> parse_strategy(std::string_view text) {
    if (text == "prompt_optimizer") return Strategy::prompt_optimizer;
    if (text == "image_retrieval") return Strategy::image_retrieval;
    return std::nullopt;
}

std::string OptimizedPrompt::joined_negatives() const {
    std::string out;
    for (std::size_t i = 0; i < negative_prompts.size(); ++i) {
        if (i) out += ", ";
        out += negative_prompts[i];
    }
    return out;
}

std::string_view to_string(BackendProfile p) {
    return p == BackendProfile::live ? "live" : "mock";
}

std::string_view to_string(Termination t) {
    switch (t) {
        case Termination::threshold_met: return "threshold_met";
        case Termination::budget_exhausted: return "budget_exhausted";
        case Termination::orchestrator_early_stop: return "orchestrator_early_stop";
        case Termination::fatal_error: return "fatal_error";
    }
    return "fatal_error";
}

void RunConfig::validate() const {
    std::ostringstream problems;
    auto bad = [&](const char* field, const std::string& why) {
        problems << (problems.tellp() > 0 ? "; " : "") << field << ": " << why;
    };
    if (t_max < 1) bad("t_max", "must be >= 1");
    if (!(threshold_tau >= 0.0 && threshold_tau <= 1.0)) bad("threshold_tau", "must be in [0,1]");
    if (weights.alpha < 0.0) bad("weights.alpha", "must be >= 0");
    if (weights.beta < 0.0) bad("weights.beta", "must be >= 0");
    if (weights.gamma < 0.0) bad("weights.gamma", "must be >= 0");
    if (!allow_unnormalized_weights && std::abs(weights.sum() - 1.0) > 1e-9) {
        bad("weights", "must sum to 1 (set allow_unnormalized_weights to override)");
    }
    if (retrieval_enabled && exemplar_cap < 1) bad("exemplar_cap", "must be >= 1 when retrieval is enabled");
    if (exemplar_cap < 0) bad("exemplar_cap", "must be >= 0");
    if (search_result_count < 1) bad("search_result_count", "must be >= 1");
    if (query_rewrite_attempts < 0) bad("query_rewrite_attempts", "must be >= 0");
    if (json_parse_retries < 0) bad("json_parse_retries", "must be >= 0");
    if (problems.tellp() > 0) throw ConfigError(problems.str());
}

OptimizationState OptimizationState::from_records(const std::string& original_prompt,
                                                  const std::vector<IterationRecord>& records) {
    OptimizationState s;
    s.original_prompt = original_prompt;
    s.current_prompt = original_prompt;
    if (records.empty()) return s;
    const auto& last = records.back();
    s.current_prompt = last.prompt_after;
    s.current_image = last.image;
    s.exemplars = last.exemplars;
    s.current_score = last.score;
    s.visual_analysis = last.visual_analysis;
    s.current_record = &last;
    for (std::size_t i = 0; i + 1 < records.size(); ++i) s.history.push_back(&records[i]);
    return s;
}

}  // namespace w2i
