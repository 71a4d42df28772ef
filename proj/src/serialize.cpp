#include "w2i/serialize.hpp"

namespace w2i {

Json to_json(const ImageArtifact& image) {
    Json j;
    j["id"] = image.id();
    j["origin"] = to_string(image.origin());
    if (auto t = image.created_at_iteration()) j["created_at_iteration"] = *t;
    else j["created_at_iteration"] = nullptr;
    j["extension"] = image.extension();
    return j;
}

Json to_json(const Weights& w) {
    return Json{{"alpha", w.alpha}, {"beta", w.beta}, {"gamma", w.gamma}};
}

Json to_json(const ExemplarSet& exemplars) {
    Json arr = Json::array();
    for (const auto& e : exemplars.items()) {
        arr.push_back(Json{{"image_id", e.image.id()},
                           {"source_url", e.source_url},
                           {"query", e.query},
                           {"selection_score", e.selection_score},
                           {"reasoning", e.rationale}});
    }
    return arr;
}

Json to_json(const Transcript& transcript) {
    Json arr = Json::array();
    for (const auto& e : transcript) {
        Json j{{"role", e.role},
               {"request_digest", e.request_digest},
               {"response_digest", e.response_digest},
               {"attempts", e.attempts},
               {"ok", e.ok}};
        if (!e.prompt.empty()) j["prompt"] = e.prompt;
        if (!e.note.empty()) j["note"] = e.note;
        arr.push_back(std::move(j));
    }
    return arr;
}

Json to_json(const OrchestratorDecision& d) {
    Json strategies = Json::array();
    for (auto s : d.strategies) strategies.push_back(to_string(s));
    return Json{{"task_type", to_string(d.task_type)},
                {"strategies", strategies},
                {"references_needed", d.references_needed},
                {"draft_prompt", d.draft_prompt},
                {"reasoning", d.reasoning},
                {"score_analysis", d.score_analysis},
                {"keyword_analysis", d.keyword_analysis},
                {"confidence", d.confidence},
                {"early_stop", d.early_stop},
                {"repairs", d.repairs}};
}

namespace {

Json dim(const DimensionScore& d) {
    return Json{{"score", d.score}, {"explanation", d.explanation}};
}

}  // namespace

Json to_json(const GraderReport& r) {
    return Json{{"accuracy_to_prompt", dim(r.accuracy_to_prompt)},
                {"creativity_and_originality", dim(r.creativity_and_originality)},
                {"visual_quality_and_realism", dim(r.visual_quality_and_realism)},
                {"consistency_and_cohesion", dim(r.consistency_and_cohesion)},
                {"emotional_or_thematic_resonance", dim(r.emotional_or_thematic_resonance)},
                {"overall_score", r.overall_score},
                {"overall_recomputed", r.overall_recomputed},
                {"warnings", r.warnings}};
}

Json to_json(const ScoreBreakdown& s) {
    Json keywords = Json::array();
    for (const auto& kj : s.keyword_judgments) {
        keywords.push_back(Json{{"text", kj.keyword.text},
                                {"weight", kj.keyword.weight},
                                {"critical", kj.keyword.critical},
                                {"grade", kj.grade},
                                {"rationale", kj.rationale}});
    }
    Json j{{"s_sem", s.s_sem},
           {"k_coverage", s.k_coverage},
           {"aesthetic", s.aesthetic},
           {"weights", to_json(s.weights)},
           {"total", s.total},
           {"keywords", keywords}};
    j["grader_report"] = s.grader_report ? to_json(*s.grader_report) : Json(nullptr);
    return j;
}

Json prompt_json(const std::string& prompt, const std::vector<std::string>& negatives,
                 const std::vector<std::string>& warnings) {
    return Json{{"prompt", prompt}, {"negative_prompts", negatives}, {"warnings", warnings}};
}

Json score_brief(const ScoreBreakdown& s) {
    Json keywords = Json::object();
    for (const auto& kj : s.keyword_judgments) keywords[kj.keyword.text] = kj.grade;
    Json j{{"total", s.total},
           {"semantic_alignment", s.s_sem},
           {"keyword_coverage", s.k_coverage},
           {"aesthetic", s.aesthetic},
           {"keywords", keywords}};
    if (s.grader_report) {
        const auto& r = *s.grader_report;
        j["grader"] = Json{{"accuracy_to_prompt", r.accuracy_to_prompt.score},
                           {"creativity_and_originality", r.creativity_and_originality.score},
                           {"visual_quality_and_realism", r.visual_quality_and_realism.score},
                           {"consistency_and_cohesion", r.consistency_and_cohesion.score},
                           {"emotional_or_thematic_resonance",
                            r.emotional_or_thematic_resonance.score},
                           {"overall", r.overall_recomputed}};
    }
    return j;
}

}  // namespace w2i
