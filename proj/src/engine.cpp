#include "w2i/engine.hpp"

#include "w2i/error.hpp"
#include "w2i/prompt_optimizer.hpp"
#include "w2i/retriever.hpp"
#include "w2i/scoring.hpp"
#include "w2i/text.hpp"

#include <ctime>

namespace w2i {

std::pair<std::string, ExemplarSet> advance_state(const IterationRecord& prev, InvokeFlags flags,
                                                  const std::optional<OptimizedPrompt>& poa_out,
                                                  const std::optional<ExemplarSet>& ira_out) {
    if (flags.invoke_poa != poa_out.has_value()) {
        throw ContractViolation("prompt optimizer output must be present iff invoke_poa");
    }
    if (flags.invoke_ira != ira_out.has_value()) {
        throw ContractViolation("retrieval output must be present iff invoke_ira");
    }
    std::string prompt = flags.invoke_poa ? poa_out->prompt : prev.prompt_after;
    ExemplarSet exemplars = flags.invoke_ira ? *ira_out : prev.exemplars;
    return {std::move(prompt), std::move(exemplars)};
}

BestPick select_best(const std::vector<IterationRecord>& iterations) {
    if (iterations.empty()) throw EmptyHistory("select_best on an empty history");
    std::size_t best = 0;
    for (std::size_t i = 1; i < iterations.size(); ++i) {
        if (iterations[i].score.total > iterations[best].score.total) best = i;
    }
    return BestPick{static_cast<int>(best), iterations[best].image};
}

GenerationPlan plan_generation(TaskType requested, const std::optional<ImageArtifact>& current_image,
                               const ExemplarSet& exemplars) {
    const bool have_image = current_image && !current_image->empty();
    const auto& items = exemplars.items();
    GenerationPlan plan;
    auto fallback = [&](TaskType mode, const char* why) {
        plan.mode = mode;
        plan.note = std::string(to_string(requested)) + " needs " + why + "; generating with " +
                    std::string(to_string(mode));
    };

    switch (requested) {
        case TaskType::text_to_image:
            plan.mode = requested;
            break;
        case TaskType::text_image_to_image:
            if (items.empty()) {
                fallback(TaskType::text_to_image, "exemplars");
                break;
            }
            plan.mode = requested;
            for (std::size_t i = 0; i < items.size() && i < 2; ++i) {
                plan.positional_images.push_back(items[i].image);
            }
            break;
        case TaskType::image_editing_with_prompt:
            if (!have_image) {
                fallback(TaskType::text_to_image, "a current image");
                break;
            }
            plan.mode = requested;
            plan.positional_images.push_back(*current_image);
            break;
        case TaskType::image_editing_with_prompt_and_reference:
            if (!have_image && items.empty()) {
                fallback(TaskType::text_to_image, "a current image and an exemplar");
            } else if (!have_image) {
                fallback(TaskType::text_image_to_image, "a current image");
                plan.positional_images.push_back(items[0].image);
            } else if (items.empty()) {
                fallback(TaskType::image_editing_with_prompt, "an exemplar");
                plan.positional_images.push_back(*current_image);
            } else {
                plan.mode = requested;
                plan.positional_images = {*current_image, items[0].image};
            }
            break;
    }
    return plan;
}

std::string iso_timestamp(std::chrono::system_clock::time_point tp) {
    const std::time_t t = std::chrono::system_clock::to_time_t(tp);
    std::tm tm{};
    gmtime_r(&t, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

namespace {

class Loop {
public:
    Loop(const RunConfig& config, const std::string& prompt, const BackendBundle& backends,
         const RunOptions& options)
        : config_(config), prompt_(prompt), backends_(backends), options_(options) {}

    RunResult run() {
        result_.run_id = options_.run_id;
        result_.created_at = iso_timestamp(options_.started);
        result_.original_prompt = prompt_;
        result_.config = config_;

        for (int t = 0; t <= config_.t_max; ++t) {
            IterationRecord rec;
            rec.t = t;
            bool stop = false;
            try {
                stop = t == 0 ? baseline(rec) : step(rec);
            } catch (const Error& e) {
                result_.termination = Termination::fatal_error;
                result_.error = e.what();
                result_.stop_transcript = std::move(rec.transcript);
                break;
            }
            if (stop) break;
        }

        if (!result_.iterations.empty()) {
            auto best = select_best(result_.iterations);
            result_.best_index = best.index;
            result_.final_image = best.image;
        }
        return std::move(result_);
    }

private:
    bool baseline(IterationRecord& rec) {
        CallContext ctx(backends_, rec.transcript, config_.json_parse_retries);
        rec.prompt_before = rec.prompt_after = prompt_;
        rec.exemplars = ExemplarSet(static_cast<std::size_t>(config_.exemplar_cap));
        refresh_keywords(ctx, rec.exemplars);
        finish(ctx, rec, GenerationPlan{});
        return false;  // the baseline never triggers the threshold
    }

    bool step(IterationRecord& rec) {
        const IterationRecord& prev = result_.iterations.back();
        CallContext ctx(backends_, rec.transcript, config_.json_parse_retries);
        rec.prompt_before = prev.prompt_after;

        const auto state = OptimizationState::from_records(prompt_, result_.iterations);
        auto decision = orchestrate(ctx, state);
        if (decision.early_stop) {
            result_.termination = Termination::orchestrator_early_stop;
            result_.stop_decision = std::move(decision);
            result_.stop_transcript = std::move(rec.transcript);
            return true;
        }
        const auto flags = decision_to_flags(decision);

        std::optional<OptimizedPrompt> poa;
        if (flags.invoke_poa) poa = optimize_prompt(ctx, state, decision);
        const std::string& prompt_t = poa ? poa->prompt : prev.prompt_after;

        std::optional<ExemplarSet> ira;
        if (flags.invoke_ira) ira = retrieve(ctx, decision, prompt_t, prev, rec);

        auto [p_t, e_t] = advance_state(prev, flags, poa, ira);
        rec.prompt_after = std::move(p_t);
        rec.exemplars = std::move(e_t);
        rec.negative_prompts = poa ? poa->negative_prompts : prev.negative_prompts;
        if (poa) {
            for (const auto& w : validate_prompt_references(*poa, decision.task_type, rec.exemplars)) {
                rec.prompt_warnings.push_back(w.message);
                ctx.note("prompt warning: " + w.message);
            }
        }

        if (rec.exemplars.ids() != keyword_basis_) refresh_keywords(ctx, rec.exemplars);

        auto plan = plan_generation(decision.task_type, prev.image, rec.exemplars);
        if (!plan.note.empty()) ctx.note(plan.note);
        rec.decision = std::move(decision);
        finish(ctx, rec, std::move(plan));
        if (rec.score.total >= config_.threshold_tau) {
            result_.termination = Termination::threshold_met;
            return true;
        }
        return false;
    }

    ExemplarSet retrieve(CallContext& ctx, const OrchestratorDecision& decision,
                         const std::string& prompt_t, const IterationRecord& prev,
                         IterationRecord& rec) {
        if (!config_.retrieval_enabled || !backends_.search) {
            ctx.note("retrieval disabled; keeping the previous exemplars");
            return prev.exemplars;
        }
        RetrievalOptions opts;
        opts.cap = decision.task_type == TaskType::image_editing_with_prompt_and_reference
                       ? 1
                       : static_cast<std::size_t>(config_.exemplar_cap);
        opts.search_result_count = config_.search_result_count;
        opts.query_rewrite_attempts = config_.query_rewrite_attempts;
        opts.category = retrieval_category(decision);
        try {
            auto r = retrieve_exemplars(ctx, decision.references_needed, prompt_t, opts);
            for (auto& w : r.warnings) rec.prompt_warnings.push_back(std::move(w));
            return std::move(r.exemplars);
        } catch (const ExemplarsUnavailable& e) {
            const std::string msg = std::string("ExemplarsUnavailable: ") + e.what() +
                                    "; keeping the previous exemplars";
            rec.prompt_warnings.push_back(msg);
            ctx.note(msg);
            return prev.exemplars;
        }
    }

    void refresh_keywords(CallContext& ctx, const ExemplarSet& exemplars) {
        keywords_ = extract_keywords(ctx, prompt_, exemplars).keywords;
        keyword_basis_ = exemplars.ids();
    }

    void finish(CallContext& ctx, IterationRecord& rec, GenerationPlan plan) {
        GeneratorRequest req;
        req.mode = plan.mode;
        req.prompt = rec.prompt_after;
        req.negative_prompt = OptimizedPrompt{rec.prompt_after, rec.negative_prompts}.joined_negatives();
        req.positional_images = std::move(plan.positional_images);
        req.seed = config_.seed;
        rec.generation_mode = plan.mode;
        rec.image = ImageArtifact::generated(ctx.generate(req).bytes, rec.t);

        auto scored = score_iteration(ctx, rec.image, prompt_, rec.exemplars, keywords_, config_.weights);
        rec.score = std::move(scored.breakdown);
        rec.visual_analysis = std::move(scored.visual_analysis);

        result_.iterations.push_back(std::move(rec));
        if (options_.on_iteration) options_.on_iteration(result_.iterations.back());
    }

    const RunConfig& config_;
    const std::string& prompt_;
    const BackendBundle& backends_;
    const RunOptions& options_;
    RunResult result_;
    std::vector<Keyword> keywords_;
    std::vector<std::string> keyword_basis_;
};

}  // namespace

RunResult run_optimization(const RunConfig& config, const std::string& prompt,
                           const BackendBundle& backends, const RunOptions& options) {
    config.validate();
    if (trim(prompt).empty()) throw ConfigError("prompt: must not be empty");
    if (!backends.llm) throw ConfigError("backends: llm is required");
    if (!backends.generator) throw ConfigError("backends: generator is required");
    if (config.retrieval_enabled && !backends.search) {
        throw ConfigError("backends: search is required while retrieval_enabled is true");
    }
    return Loop(config, prompt, backends, options).run();
}

}  // namespace w2i
