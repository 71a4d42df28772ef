#include "w2i/scoring.hpp"

#include "w2i/error.hpp"
#include "w2i/json_extract.hpp"
#include "w2i/templates.hpp"
#include "w2i/text.hpp"

#include <algorithm>
#include <cctype>
#include <set>

namespace w2i {

namespace {

const std::set<std::string>& stopwords() {
    static const std::set<std::string> kWords = {
        "a",     "an",    "the",   "and",   "or",    "but",   "nor",   "of",    "in",
        "on",    "at",    "to",    "for",   "from",  "by",    "with",  "without", "into",
        "onto",  "over",  "under", "above", "below", "near",  "as",    "is",    "are",
        "was",   "were",  "be",    "been",  "being", "it",    "its",   "this",  "that",
        "these", "those", "his",   "her",   "their", "our",   "my",    "your",  "some",
        "any",   "very",  "while", "then",  "than",  "there", "here",  "who",   "whom",
        "which", "what",  "where", "when",  "how",   "has",   "have",  "had",   "do",
        "does",  "did",   "not",   "no",    "so",    "if",    "about", "up",    "down",
        "out",   "off",   "through", "during", "after", "before", "between", "against",
        "s",     "just",  "also",  "like",  "make",  "show",  "showing", "image", "picture",
        "photo", "please", "create", "generate", "depict", "depicting",
    };
    return kWords;
}

bool is_word_char(char c) {
    return std::isalnum(static_cast<unsigned char>(c)) || c == '\'' || c == '-';
}

std::string canonical(std::string_view s) { return to_lower(trim(s)); }

}  // namespace

// ---------------------------------------------------------------------------
// Keyword set
// ---------------------------------------------------------------------------

std::vector<std::string> rule_based_keyword_candidates(std::string_view prompt) {
    std::vector<std::string> words;
    std::string cur;
    for (char c : prompt) {
        if (is_word_char(c)) {
            cur.push_back(c);
        } else {
            if (!cur.empty()) words.push_back(cur);
            cur.clear();
            // Punctuation separates entities.
            if (!std::isspace(static_cast<unsigned char>(c))) words.emplace_back();
        }
    }
    if (!cur.empty()) words.push_back(cur);

    std::vector<std::string> out;
    std::set<std::string> seen;
    auto emit = [&](const std::string& k) {
        if (!k.empty() && seen.insert(k).second) out.push_back(k);
    };

    std::string entity;  // run of capitalized tokens
    auto flush = [&] {
        emit(to_lower(entity));
        entity.clear();
    };
    for (const auto& w : words) {
        auto stripped = std::string(trim(w));
        while (!stripped.empty() && (stripped.front() == '\'' || stripped.front() == '-')) stripped.erase(0, 1);
        while (!stripped.empty() && (stripped.back() == '\'' || stripped.back() == '-')) stripped.pop_back();
        if (stripped.empty() || stopwords().count(to_lower(stripped))) {
            flush();
            continue;
        }
        const bool capitalized = std::isupper(static_cast<unsigned char>(stripped.front())) != 0;
        if (capitalized) {
            if (!entity.empty()) entity += ' ';
            entity += stripped;
            continue;
        }
        flush();
        if (stripped.size() >= 2 || std::isdigit(static_cast<unsigned char>(stripped.front()))) {
            emit(to_lower(stripped));
        }
    }
    flush();
    if (out.empty()) {
        auto whole = canonical(prompt);
        if (!whole.empty()) out.push_back(whole);
    }
    return out;
}

std::vector<Keyword> normalize_keywords(const std::vector<Keyword>& raw) {
    std::vector<Keyword> out;
    for (const auto& k : raw) {
        auto text = canonical(k.text);
        if (text.empty()) continue;
        auto it = std::find_if(out.begin(), out.end(), [&](const Keyword& o) { return o.text == text; });
        if (it != out.end()) {
            it->critical = it->critical || k.critical;
            continue;
        }
        out.push_back(Keyword{text, 1.0, k.critical});
    }
    double total = 0.0;
    for (auto& k : out) {
        k.weight = k.critical ? kCriticalKeywordMultiplier : 1.0;
        total += k.weight;
    }
    for (auto& k : out) k.weight /= total;
    return out;
}

std::vector<Keyword> parse_keyword_list(std::string_view text) {
    Json j;
    try {
        j = extract_json_object(text);
    } catch (const ParseError& e) {
        throw KeywordExtractionError(std::string("keyword reply is not JSON: ") + e.what(),
                                     std::string(text));
    }
    auto list = j.find("keywords");
    if (list == j.end() || !list->is_array()) {
        throw KeywordExtractionError("keyword reply has no 'keywords' list", std::string(text));
    }
    std::vector<Keyword> out;
    for (const auto& item : *list) {
        if (item.is_string()) {
            out.push_back(Keyword{item.get<std::string>(), 1.0, false});
        } else if (item.is_object() && item.contains("text") && item["text"].is_string()) {
            bool critical = false;
            if (auto c = item.find("critical"); c != item.end() && c->is_boolean()) critical = c->get<bool>();
            out.push_back(Keyword{item["text"].get<std::string>(), 1.0, critical});
        } else {
            throw KeywordExtractionError("malformed keyword entry", std::string(text));
        }
    }
    return out;
}

KeywordExtraction extract_keywords(CallContext& ctx, const std::string& prompt,
                                   const ExemplarSet& exemplars) {
    if (trim(prompt).empty()) throw ContractViolation("extract_keywords needs a prompt");
    const auto candidates = rule_based_keyword_candidates(prompt);

    Json cand_json = candidates;
    std::string descriptors;
    for (std::size_t i = 0; i < exemplars.size(); ++i) {
        const auto& e = exemplars.items()[i];
        descriptors += "\n- image " + std::to_string(i + 1) + ": " + e.query;
        if (!e.rationale.empty()) descriptors += " (" + e.rationale + ")";
    }
    if (descriptors.empty()) descriptors = "none";

    auto text = templates::render(templates::keyword_extractor(),
                                  {{"prompt", prompt},
                                   {"candidates", cand_json.dump()},
                                   {"descriptors", descriptors}});
    auto request = LlmRequest::make(LlmRole::keyword_extractor, std::move(text));

    KeywordExtraction out;
    try {
        auto merged = ctx.ask_json(
            request, [](const std::string& reply) { return parse_keyword_list(reply); }, prompt);
        out.keywords = normalize_keywords(merged);
    } catch (const KeywordExtractionError& e) {
        ctx.note(std::string("keyword merge failed, using rule-based keywords: ") + e.what());
    }
    if (out.keywords.empty()) {
        std::vector<Keyword> raw;
        for (const auto& c : candidates) raw.push_back(Keyword{c, 1.0, false});
        out.keywords = normalize_keywords(raw);
        out.degraded = true;
        ctx.note("keyword extraction degraded to rule-based candidates with uniform weights");
    }
    return out;
}

// ---------------------------------------------------------------------------
// Keyword grading
// ---------------------------------------------------------------------------

double grade_from_label(std::string_view label) {
    const auto l = canonical(label);
    if (l == "present") return 1.0;
    if (l == "partially present") return 0.5;
    if (l == "missing") return 0.0;
    throw GradeParseError("unknown keyword grade '" + std::string(label) + "'", std::string(label));
}

std::vector<KeywordJudgment> parse_keyword_judgments(std::string_view text,
                                                     const std::vector<Keyword>& keywords,
                                                     std::vector<std::string>& notes) {
    Json j;
    try {
        j = extract_json_object(text);
    } catch (const ParseError& e) {
        throw GradeParseError(std::string("grading reply is not JSON: ") + e.what(), std::string(text));
    }
    auto list = j.find("judgments");
    if (list == j.end() || !list->is_array()) {
        throw GradeParseError("grading reply has no 'judgments' list", std::string(text));
    }

    std::map<std::string, std::pair<double, std::string>> by_keyword;
    for (const auto& item : *list) {
        if (!item.is_object() || !item.contains("keyword") || !item["keyword"].is_string() ||
            !item.contains("grade") || !item["grade"].is_string()) {
            throw GradeParseError("judgment needs string 'keyword' and 'grade'", std::string(text));
        }
        double grade;
        try {
            grade = grade_from_label(item["grade"].get<std::string>());
        } catch (const GradeParseError& e) {
            throw GradeParseError(e.what(), std::string(text));
        }
        std::string rationale;
        if (auto r = item.find("rationale"); r != item.end() && r->is_string()) rationale = r->get<std::string>();
        auto key = canonical(item["keyword"].get<std::string>());
        by_keyword.emplace(key, std::make_pair(grade, std::move(rationale)));
    }

    std::vector<KeywordJudgment> out;
    for (const auto& k : keywords) {
        auto it = by_keyword.find(k.text);
        if (it == by_keyword.end()) {
            notes.push_back("judge did not grade keyword '" + k.text + "'; graded missing");
            out.push_back(KeywordJudgment{k, 0.0, "not addressed by judge"});
            continue;
        }
        out.push_back(KeywordJudgment{k, it->second.first, it->second.second});
        by_keyword.erase(it);
    }
    for (const auto& [extra, _] : by_keyword) {
        notes.push_back("judge graded unknown keyword '" + extra + "'; ignored");
    }
    return out;
}

std::vector<KeywordJudgment> grade_keywords(CallContext& ctx, const std::vector<Keyword>& keywords,
                                            const std::string& prompt,
                                            const ExemplarSet& exemplars,
                                            const ImageArtifact& image,
                                            const std::string& visual_analysis) {
    if (keywords.empty()) throw EmptyKeywordSet("grade_keywords needs keywords");
    std::string listing;
    for (std::size_t i = 0; i < keywords.size(); ++i) {
        listing += std::to_string(i + 1) + ". " + keywords[i].text;
        if (keywords[i].critical) listing += " (critical)";
        listing += "\n";
    }
    if (!listing.empty()) listing.pop_back();
    std::string references;
    for (std::size_t i = 0; i < exemplars.size(); ++i) {
        references += "\n- attachment " + std::to_string(i + 2) + ": " + exemplars.items()[i].query;
    }
    if (references.empty()) references = "none";

    auto text = templates::render(templates::keyword_grader(),
                                  {{"prompt", prompt},
                                   {"references", references},
                                   {"visual_analysis", visual_analysis.empty() ? "none" : visual_analysis},
                                   {"keywords", listing}});
    std::vector<ImageArtifact> attachments{image};
    for (const auto& e : exemplars.items()) attachments.push_back(e.image);
    auto request = LlmRequest::make(LlmRole::keyword_grader, std::move(text), std::move(attachments));

    std::vector<std::string> notes;
    auto out = ctx.ask_json(
        request,
        [&](const std::string& reply) {
            notes.clear();
            return parse_keyword_judgments(reply, keywords, notes);
        },
        prompt);
    for (auto& n : notes) ctx.note(std::move(n));
    return out;
}

double coverage(const std::vector<KeywordJudgment>& judgments) {
    if (judgments.empty()) throw EmptyKeywordSet("coverage of an empty keyword set");
    double sum = 0.0;
    for (const auto& j : judgments) sum += j.keyword.weight * j.grade;
    return sum;
}

// ---------------------------------------------------------------------------
// Composite score
// ---------------------------------------------------------------------------

ScoreBreakdown aggregate_score(double s_sem, double k_cov, double aesthetic, const Weights& weights) {
    if (weights.alpha < 0.0 || weights.beta < 0.0 || weights.gamma < 0.0) {
        throw WeightError("score weights must be >= 0");
    }
    auto in_unit = [](double v) { return v >= 0.0 && v <= 1.0; };
    if (!in_unit(s_sem) || !in_unit(k_cov) || !in_unit(aesthetic)) {
        throw ContractViolation("score components must lie in [0,1]");
    }
    ScoreBreakdown s;
    s.s_sem = s_sem;
    s.k_coverage = k_cov;
    s.aesthetic = aesthetic;
    s.weights = weights;
    s.total = weights.alpha * s_sem + weights.beta * k_cov + weights.gamma * aesthetic;
    return s;
}

// ---------------------------------------------------------------------------
// Grader rubric
// ---------------------------------------------------------------------------

namespace {

double clamp_score(double v, const char* what, std::vector<std::string>& warnings) {
    if (v < 0.0 || v > 10.0) {
        const double c = std::clamp(v, 0.0, 10.0);
        warnings.push_back(std::string(what) + " score " + std::to_string(v) + " clamped to " +
                           std::to_string(c));
        return c;
    }
    return v;
}

DimensionScore parse_dimension(const Json& j, const char* key, std::string_view raw,
                               std::vector<std::string>& warnings) {
    auto it = j.find(key);
    if (it == j.end() || !it->is_object()) {
        throw GraderParseError(std::string("grader reply missing '") + key + "'", std::string(raw));
    }
    auto score = it->find("score");
    if (score == it->end() || !score->is_number()) {
        throw GraderParseError(std::string("'") + key + ".score' must be a number", std::string(raw));
    }
    DimensionScore d;
    d.score = clamp_score(score->get<double>(), key, warnings);
    if (auto e = it->find("explanation"); e != it->end() && e->is_string()) d.explanation = e->get<std::string>();
    return d;
}

}  // namespace

GraderReport parse_grader_report(std::string_view text) {
    Json j;
    try {
        j = extract_json_object(text);
    } catch (const ParseError& e) {
        throw GraderParseError(std::string("grader reply is not JSON: ") + e.what(), std::string(text));
    }
    GraderReport r;
    r.accuracy_to_prompt = parse_dimension(j, "accuracy_to_prompt", text, r.warnings);
    r.creativity_and_originality = parse_dimension(j, "creativity_and_originality", text, r.warnings);
    r.visual_quality_and_realism = parse_dimension(j, "visual_quality_and_realism", text, r.warnings);
    r.consistency_and_cohesion = parse_dimension(j, "consistency_and_cohesion", text, r.warnings);
    r.emotional_or_thematic_resonance =
        parse_dimension(j, "emotional_or_thematic_resonance", text, r.warnings);
    auto overall = j.find("overall_score");
    if (overall == j.end() || !overall->is_number()) {
        throw GraderParseError("grader reply missing numeric 'overall_score'", std::string(text));
    }
    r.overall_score = clamp_score(overall->get<double>(), "overall", r.warnings);
    r.overall_recomputed = (r.accuracy_to_prompt.score + r.creativity_and_originality.score +
                            r.visual_quality_and_realism.score + r.consistency_and_cohesion.score +
                            r.emotional_or_thematic_resonance.score) /
                           5.0;
    return r;
}

GraderReport llm_grade(CallContext& ctx, const ImageArtifact& image, const std::string& prompt) {
    auto text = templates::render(templates::grader(), {{"prompt", prompt}});
    auto request = LlmRequest::make(LlmRole::grader, std::move(text), {image});
    auto report = ctx.ask_json(
        request, [](const std::string& reply) { return parse_grader_report(reply); }, prompt);
    for (const auto& w : report.warnings) ctx.note("grader: " + w);
    return report;
}

const GraderReport& GraderCache::get(CallContext& ctx, const ImageArtifact& image,
                                     const std::string& prompt) {
    auto key = std::make_pair(image.id(), prompt);
    auto it = reports_.find(key);
    if (it == reports_.end()) it = reports_.emplace(key, llm_grade(ctx, image, prompt)).first;
    return it->second;
}

double semantic_score(CallContext& ctx, GraderCache& cache, const ImageArtifact& image,
                      const std::string& original_prompt) {
    if (const auto& ext = ctx.backends().semantic_scorer) {
        return std::clamp(ext->score(image, original_prompt), 0.0, 1.0);
    }
    return cache.get(ctx, image, original_prompt).accuracy_to_prompt.score / 10.0;
}

double aesthetic_score(CallContext& ctx, GraderCache& cache, const ImageArtifact& image,
                       const std::string& original_prompt) {
    if (const auto& ext = ctx.backends().aesthetic_scorer) {
        return std::clamp(ext->score(image, original_prompt), 0.0, 1.0);
    }
    return cache.get(ctx, image, original_prompt).visual_quality_and_realism.score / 10.0;
}

std::string visual_analysis(CallContext& ctx, const ImageArtifact& image, const std::string& prompt) {
    auto text = templates::render(templates::visual_analysis(), {{"prompt", prompt}});
    auto reply = ctx.llm(LlmRequest::make(LlmRole::visual_analyst, std::move(text), {image}), prompt);
    if (trim(reply).empty()) {
        ctx.note("visual analysis came back empty");
        return {};
    }
    return reply;
}

// ---------------------------------------------------------------------------
// Report scaling
// ---------------------------------------------------------------------------

std::string_view key_of(GraderDimension d) {
    switch (d) {
        case GraderDimension::emotional_or_thematic_resonance: return "emotional_or_thematic_resonance";
        case GraderDimension::consistency_and_cohesion: return "consistency_and_cohesion";
        case GraderDimension::visual_quality_and_realism: return "visual_quality_and_realism";
        case GraderDimension::creativity_and_originality: return "creativity_and_originality";
        case GraderDimension::accuracy_to_prompt: return "accuracy_to_prompt";
        case GraderDimension::overall: return "overall";
    }
    return "overall";
}

std::string_view label_of(GraderDimension d) {
    switch (d) {
        case GraderDimension::emotional_or_thematic_resonance: return "Emotional / Thematic Resonance";
        case GraderDimension::consistency_and_cohesion: return "Consistency & Cohesion";
        case GraderDimension::visual_quality_and_realism: return "Visual Quality & Realism";
        case GraderDimension::creativity_and_originality: return "Creativity & Originality";
        case GraderDimension::accuracy_to_prompt: return "Accuracy-to-Prompt";
        case GraderDimension::overall: return "Overall";
    }
    return "Overall";
}

std::map<GraderDimension, double> report_scale(const GraderReport& r) {
    return {
        {GraderDimension::emotional_or_thematic_resonance, r.emotional_or_thematic_resonance.score * 10.0},
        {GraderDimension::consistency_and_cohesion, r.consistency_and_cohesion.score * 10.0},
        {GraderDimension::visual_quality_and_realism, r.visual_quality_and_realism.score * 10.0},
        {GraderDimension::creativity_and_originality, r.creativity_and_originality.score * 10.0},
        {GraderDimension::accuracy_to_prompt, r.accuracy_to_prompt.score * 10.0},
        {GraderDimension::overall, r.overall_recomputed * 10.0},
    };
}

// ---------------------------------------------------------------------------
// Iteration scoring
// ---------------------------------------------------------------------------

IterationScore score_iteration(CallContext& ctx, const ImageArtifact& image,
                               const std::string& original_prompt, const ExemplarSet& exemplars,
                               const std::vector<Keyword>& keywords, const Weights& weights) {
    IterationScore out;
    out.visual_analysis = visual_analysis(ctx, image, original_prompt);
    auto judgments = grade_keywords(ctx, keywords, original_prompt, exemplars, image, out.visual_analysis);
    GraderCache cache;
    const double sem = semantic_score(ctx, cache, image, original_prompt);
    const double aes = aesthetic_score(ctx, cache, image, original_prompt);
    out.breakdown = aggregate_score(sem, coverage(judgments), aes, weights);
    out.breakdown.keyword_judgments = std::move(judgments);
    // The rubric is always recorded, even when both components come from
    // external scorers.
    out.breakdown.grader_report = cache.get(ctx, image, original_prompt);
    return out;
}

}  // namespace w2i
