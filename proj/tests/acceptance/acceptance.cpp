// Acceptance checks: one PASS/FAIL line per criterion, non-zero exit on any
// failure. Everything runs offline against the mock backends.

#include "w2i/backend.hpp"
#include "w2i/engine.hpp"
#include "w2i/error.hpp"
#include "w2i/json_extract.hpp"
#include "w2i/mock_backend.hpp"
#include "w2i/orchestrator.hpp"
#include "w2i/retriever.hpp"
#include "w2i/scoring.hpp"

#include "support/cli_support.hpp"
#include "support/scenario.hpp"

#include <chrono>
#include <cmath>
#include <functional>
#include <iostream>
#include <random>
#include <sstream>
#include <stdexcept>

using namespace w2i;
using namespace w2i::testing;

namespace {

struct Failure : std::runtime_error {
    using std::runtime_error::runtime_error;
};

void require(bool ok, const std::string& what) {
    if (!ok) throw Failure(what);
}

template <class A, class B>
void require_eq(const A& got, const B& want, const std::string& what) {
    if (!(got == want)) {
        std::ostringstream s;
        s << what << ": got " << got << ", want " << want;
        throw Failure(s.str());
    }
}

double seconds_since(std::chrono::steady_clock::time_point start) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

int count_role(const Transcript& t, const std::string& role) {
    int n = 0;
    for (const auto& e : t) n += e.role == role;
    return n;
}

// 1 -------------------------------------------------------------------------

void loop_fidelity() {
    MockBundle mocks;
    script_loop(mocks, {0.40, 0.90, 0.70});
    RunConfig config;
    config.threshold_tau = 1.0;
    config.t_max = 2;
    const auto start = std::chrono::steady_clock::now();
    const auto r = run_optimization(config, "Wooper by a pond", mocks.bundle());
    const double elapsed = seconds_since(start);
    require_eq(r.iterations.size(), 3u, "iteration records");
    require_eq(r.best_index, 1, "best_index");
    require(r.termination == Termination::budget_exhausted, "termination is budget_exhausted");
    require_eq(mocks.generator->call_count(), 3, "generator calls");
    require(elapsed < 1.0, "runtime under 1 s");
}

// 2 -------------------------------------------------------------------------

void early_stop() {
    MockBundle mocks;
    script_loop(mocks, {0.50, 0.95, 0.50});
    RunConfig config;
    config.threshold_tau = 0.90;
    config.t_max = 2;
    const auto start = std::chrono::steady_clock::now();
    const auto r = run_optimization(config, "Wooper by a pond", mocks.bundle());
    const double elapsed = seconds_since(start);
    require_eq(r.iterations.size(), 2u, "iteration records");
    require_eq(r.iterations[1].t, 1, "last record t");
    require(r.termination == Termination::threshold_met, "termination is threshold_met");
    require_eq(mocks.generator->call_count(), 2, "generator calls");
    require(elapsed < 1.0, "runtime under 1 s");
}

// 3 -------------------------------------------------------------------------

const TaskType kTypes[] = {TaskType::text_to_image, TaskType::text_image_to_image,
                           TaskType::image_editing_with_prompt,
                           TaskType::image_editing_with_prompt_and_reference};
const std::vector<std::string> kRefPool = {"alpha", "beta", "gamma"};

std::string random_decision(std::mt19937_64& rng) {
    const TaskType type = kTypes[rng() % 4];
    std::vector<std::string> refs;
    const std::size_t n = 1 + rng() % 3;
    for (std::size_t i = 0; i < n; ++i) refs.push_back(kRefPool[rng() % kRefPool.size()]);
    return decision_reply(type, refs, "draft " + std::to_string(rng() % 1000));
}

void script_random_run(MockBundle& mocks, std::mt19937_64& rng, int t_max) {
    static const char* grades[] = {"present", "partially present", "missing"};
    const auto& kw = default_keywords();
    mocks.llm->script(LlmRole::keyword_extractor, {keywords_reply()});
    std::vector<std::string> judgments, graders, analyses, decisions, prompts, selections;
    for (int t = 0; t <= t_max; ++t) {
        std::vector<std::string> g;
        for (std::size_t i = 0; i < kw.size(); ++i) g.push_back(grades[rng() % 3]);
        judgments.push_back(judgments_reply(kw, g));
        graders.push_back(grader_reply(static_cast<double>(rng() % 11), static_cast<double>(rng() % 11)));
        analyses.push_back("analysis " + std::to_string(t));
        decisions.push_back(random_decision(rng));
        prompts.push_back(prompt_reply("prompt " + std::to_string(t) + "." + std::to_string(rng() % 1000) +
                                       " with image 1"));
        selections.push_back(selection_reply({{static_cast<int>(rng() % 3), 0.9}, {static_cast<int>(rng() % 3), 0.7}}));
    }
    mocks.llm->script(LlmRole::keyword_grader, judgments);
    mocks.llm->script(LlmRole::grader, graders);
    mocks.llm->script(LlmRole::visual_analyst, analyses);
    mocks.llm->script(LlmRole::orchestrator, decisions);
    mocks.llm->script(LlmRole::prompt_optimizer, prompts);
    mocks.llm->script(LlmRole::retriever_selector, selections);
    for (const auto& r : kRefPool) add_search_hits(*mocks.search, r, 3);
}

ExemplarSet random_exemplars(std::mt19937_64& rng) {
    ExemplarSet set(2);
    const std::size_t n = rng() % 3;
    for (std::size_t i = 0; i < n; ++i) {
        set.push(Exemplar{ImageArtifact::retrieved(MockGenerator::synthesize("ex" + std::to_string(rng()))), "u", "q"});
    }
    return set;
}

void state_transitions() {
    std::mt19937_64 rng(20261019);
    int violations = 0;
    int poa_off = 0, ira_off = 0, joint = 0;
    std::string first;
    auto violation = [&](const std::string& what) {
        if (first.empty()) first = what;
        ++violations;
    };

    for (int run = 0; run < 200; ++run) {
        MockBundle mocks;
        RunConfig config;
        config.t_max = 1 + static_cast<int>(rng() % 3);
        config.threshold_tau = 1.0;
        config.seed = rng();
        script_random_run(mocks, rng, config.t_max);
        const auto r = run_optimization(config, "Wooper by a pond", mocks.bundle());
        if (r.termination == Termination::fatal_error) {
            violation("run " + std::to_string(run) + " failed: " + r.error);
            continue;
        }
        for (std::size_t i = 1; i < r.iterations.size(); ++i) {
            const auto& prev = r.iterations[i - 1];
            const auto& rec = r.iterations[i];
            const auto flags = decision_to_flags(*rec.decision);
            if (!flags.invoke_poa) {
                ++poa_off;
                if (rec.prompt_after != prev.prompt_after) violation("prompt changed without POA");
            }
            if (!flags.invoke_ira) {
                ++ira_off;
                if (rec.exemplars.ids() != prev.exemplars.ids()) violation("exemplars changed without IRA");
            }
            if (flags.invoke_poa && flags.invoke_ira) {
                ++joint;
                int seen = 0;
                for (const auto& e : rec.transcript) {
                    if (e.role != "search" && e.role != "retriever_selector") continue;
                    ++seen;
                    if (e.prompt != rec.prompt_after) violation("IRA entry without the POA prompt");
                }
                if (seen == 0) violation("joint activation without IRA entries");
            }
        }
    }

    // The orchestrator's strategy table always includes the prompt optimizer,
    // so POA-off steps only arise through the state update itself.
    for (int i = 0; i < 2000; ++i) {
        IterationRecord prev;
        prev.prompt_after = "prev prompt " + std::to_string(rng() % 100);
        prev.exemplars = random_exemplars(rng);
        const InvokeFlags flags{rng() % 2 == 0, rng() % 2 == 0};
        std::optional<OptimizedPrompt> poa;
        std::optional<ExemplarSet> ira;
        if (flags.invoke_poa) poa = OptimizedPrompt{"new prompt " + std::to_string(rng() % 100), {}};
        if (flags.invoke_ira) ira = random_exemplars(rng);
        const auto [p, e] = advance_state(prev, flags, poa, ira);
        if (!flags.invoke_poa) {
            ++poa_off;
            if (p != prev.prompt_after) violation("advance_state changed the prompt");
        } else if (p != poa->prompt) {
            violation("advance_state ignored the POA prompt");
        }
        if (!flags.invoke_ira) {
            ++ira_off;
            if (e.ids() != prev.exemplars.ids()) violation("advance_state changed exemplars");
        } else if (e.ids() != ira->ids()) {
            violation("advance_state ignored the IRA exemplars");
        }
        bool threw = false;
        try {
            advance_state(prev, flags, flags.invoke_poa ? std::nullopt : std::optional<OptimizedPrompt>(OptimizedPrompt{"x", {}}),
                          ira);
        } catch (const ContractViolation&) {
            threw = true;
        }
        if (!threw) violation("advance_state accepted a POA output that disagrees with its flag");
    }

    require(violations == 0, std::to_string(violations) + " violations, first: " + first);
    require(poa_off > 0 && ira_off > 0 && joint > 0, "every transition kind was exercised");
}

// 4 -------------------------------------------------------------------------

std::vector<Strategy> table(TaskType t) {
    switch (t) {
        case TaskType::text_to_image: return {Strategy::prompt_optimizer};
        case TaskType::text_image_to_image: return {Strategy::prompt_optimizer, Strategy::image_retrieval};
        case TaskType::image_editing_with_prompt: return {Strategy::prompt_optimizer};
        case TaskType::image_editing_with_prompt_and_reference:
            return {Strategy::prompt_optimizer, Strategy::image_retrieval};
    }
    return {};
}

std::size_t max_refs(TaskType t) {
    switch (t) {
        case TaskType::text_image_to_image: return 2;
        case TaskType::image_editing_with_prompt_and_reference: return 1;
        default: return 0;
    }
}

void strategy_table() {
    std::mt19937_64 rng(4);
    const char* names[] = {"prompt_optimizer", "image_retrieval"};
    int cases = 0;
    for (TaskType type : kTypes) {
        for (int i = 0; i < 40; ++i) {
            Json strategies = Json::array();
            const std::size_t n = rng() % 5;
            for (std::size_t k = 0; k < n; ++k) strategies.push_back(names[rng() % 2]);
            Json refs = Json::array();
            const std::size_t r = 1 + rng() % 4;
            for (std::size_t k = 0; k < r; ++k) refs.push_back("ref" + std::to_string(k));
            Json reply{{"task_type", to_string(type)}, {"strategies", strategies}, {"references_needed", refs},
                       {"draft_prompt", "d"}, {"reasoning", "r"}, {"score_analysis", "s"},
                       {"keyword_analysis", "k"}, {"confidence", 0.5}};
            const auto d = validate_decision(parse_decision(reply.dump()));
            ++cases;
            require(d.strategies == table(type), "strategies for " + std::string(to_string(type)) + " from " +
                                                     strategies.dump());
            require_eq(d.references_needed.size(), std::min(r, max_refs(type)),
                       "reference count for " + std::string(to_string(type)));
        }
        // Missing references are rejected where the table requires them.
        if (max_refs(type) > 0) {
            OrchestratorDecision d;
            d.task_type = type;
            bool threw = false;
            try {
                validate_decision(d);
            } catch (const DecisionValidationError&) {
                threw = true;
            }
            require(threw, "missing references rejected for " + std::string(to_string(type)));
        }
    }
    require(cases >= 100, "at least 100 cases");
}

// 5 -------------------------------------------------------------------------

std::vector<KeywordJudgment> judgments(const std::vector<double>& grades, const std::vector<double>& weights) {
    std::vector<KeywordJudgment> out;
    for (std::size_t i = 0; i < grades.size(); ++i) {
        out.push_back(KeywordJudgment{Keyword{"k" + std::to_string(i), weights[i], false}, grades[i], ""});
    }
    return out;
}

void coverage_formula() {
    std::mt19937_64 rng(5);
    const double levels[] = {0.0, 0.5, 1.0};
    std::uniform_real_distribution<double> unit(0.01, 1.0);
    for (int i = 0; i < 1000; ++i) {
        const std::size_t m = 1 + rng() % 12;
        std::vector<double> g(m), uniform(m, 1.0 / static_cast<double>(m)), w(m);
        double wsum = 0;
        for (std::size_t k = 0; k < m; ++k) {
            g[k] = levels[rng() % 3];
            w[k] = unit(rng);
            wsum += w[k];
        }
        for (auto& x : w) x /= wsum;

        long double mean = 0;
        for (double x : g) mean += x;
        mean /= static_cast<long double>(m);
        require(std::abs(coverage(judgments(g, uniform)) - static_cast<double>(mean)) <= 1e-12, "uniform coverage");

        long double dot = 0;
        for (std::size_t k = m; k-- > 0;) dot += static_cast<long double>(w[k]) * g[k];
        require(std::abs(coverage(judgments(g, w)) - static_cast<double>(dot)) <= 1e-12, "weighted coverage");
    }
    const double spot = coverage(judgments({1, 0.5, 0, 1}, {0.25, 0.25, 0.25, 0.25}));
    require(std::abs(spot - 0.625) <= 1e-12, "spot value 0.625");
}

// 6 -------------------------------------------------------------------------

void aggregate_formula() {
    std::mt19937_64 rng(6);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    const Weights w{0.5, 0.3, 0.2};
    for (int i = 0; i < 1000; ++i) {
        const double s = unit(rng), k = unit(rng), a = unit(rng);
        const double total = aggregate_score(s, k, a, w).total;
        require(std::abs(total - (0.5 * s + 0.3 * k + 0.2 * a)) <= 1e-12, "linear form");
        require(total >= 0.0 && total <= 1.0, "total in [0,1]");
    }
    require(std::abs(aggregate_score(0.8, 0.625, 0.9, w).total - 0.7675) <= 1e-12, "spot value 0.7675");
}

// 7 -------------------------------------------------------------------------

void retrieval_fallback() {
    {
        MockBundle mocks;
        add_search_hits(*mocks.search, "wooper plush", 2);
        mocks.llm->script(LlmRole::query_rewriter, {"wooper plush"});
        mocks.llm->script(LlmRole::retriever_selector, {selection_reply({{0, 0.9}})});
        auto backends = mocks.bundle();
        Transcript t;
        CallContext ctx(backends, t, 2);
        const auto r = retrieve_exemplars(ctx, {"wooper"}, "Wooper by a pond", {});
        require_eq(count_role(t, "query_rewriter"), 1, "rewrite calls");
        require(!r.exemplars.empty(), "rewritten query yields exemplars");
    }
    auto select = [](const std::vector<std::pair<int, double>>& picks, int hits) {
        MockBundle mocks;
        add_search_hits(*mocks.search, "squid game poster", hits);
        mocks.llm->script(LlmRole::retriever_selector, {selection_reply(picks)});
        auto backends = mocks.bundle();
        Transcript t;
        CallContext ctx(backends, t, 2);
        return retrieve_exemplars(ctx, {"squid game poster"}, "Gi-hun in front of the poster", {}).exemplars.size();
    };
    require_eq(select({{0, 0.85}, {1, 0.72}, {2, 0.40}}, 3), 2u, "exemplars for [0.85, 0.72, 0.40]");
    require_eq(select({{0, 0.5}, {1, 0.4}}, 2), 1u, "exemplars for [0.5, 0.4]");
}

// 8 -------------------------------------------------------------------------

struct JsonCase {
    std::string reply;
    bool recoverable = false;
    Json want;
};

JsonCase good(std::string reply, Json want) { return {std::move(reply), true, std::move(want)}; }
JsonCase bad(std::string reply) { return {std::move(reply), false, Json()}; }

void json_robustness() {
    const Json obj{{"prompt", "a cat"}, {"n", 1}};
    const std::string body = R"({"prompt": "a cat", "n": 1})";
    const std::vector<JsonCase> corpus = {
        good(body, obj),
        good("```json\n" + body + "\n```", obj),
        good("```\n" + body + "\n```", obj),
        good("Sure! Here is the result:\n" + body + "\nHope this helps.", obj),
        good("Here you go ```json\n" + body + "``` done", obj),
        good("  \n\t" + body + "\n\n", obj),
        good("```python\nprint('x')\n```\n```json\n" + body + "\n```", obj),
        good("Thinking {not json} then " + body, obj),
        good(R"({"prompt": "braces } inside { strings", "n": 1})", Json{{"prompt", "braces } inside { strings"}, {"n", 1}}),
        good(R"({"prompt": "escaped \" quote", "n": 1})", Json{{"prompt", "escaped \" quote"}, {"n", 1}}),
        good(R"({"outer": {"inner": [1, 2, {"x": null}]}})", Json{{"outer", {{"inner", {1, 2, {{"x", nullptr}}}}}}}),
        good("First: " + body + " Second: {\"prompt\": \"b\", \"n\": 2}", obj),
        good(R"({"prompt": "unicode é", "n": 1})", Json{{"prompt", "unicode é"}, {"n", 1}}),
        bad("```json\n{\"prompt\": \"a cat\", \"n\": 1,}\n```"),
        bad(R"({"prompt": "a cat", "n": 1,})"),
        bad(R"({"prompt": "a cat", "list": [1, 2,], "n": 1})"),
        bad(R"({"prompt": "a cat", "n": )"),
        bad(R"({"prompt": "a ca)"),
        bad("```json\n{\"prompt\": \"a cat\"\n```"),
        bad(""),
        bad("I cannot help with that."),
        bad("[1, 2, 3]"),
        bad("{'prompt': 'a cat'}"),
        bad("{prompt: a cat}"),
        bad("}}}{{{"),
        bad("```json\n```"),
        good("{\"a\": 1} // trailing comment but fine", Json{{"a", 1}}),
        bad("{\"a\": NaN}"),
    };
    require(corpus.size() >= 20, "corpus of at least 20 replies");
    for (std::size_t i = 0; i < corpus.size(); ++i) {
        const auto& c = corpus[i];
        try {
            const auto got = extract_json_object(c.reply);
            require(c.recoverable, "case " + std::to_string(i) + " parsed but should fail");
            require(got == c.want, "case " + std::to_string(i) + " parsed to " + got.dump());
        } catch (const ParseError&) {
            require(!c.recoverable, "case " + std::to_string(i) + " should parse");
        } catch (const Failure&) {
            throw;
        } catch (const std::exception& e) {
            throw Failure("case " + std::to_string(i) + " raised an untyped error: " + e.what());
        }
    }

    for (int retries : {0, 1, 2, 3}) {
        MockBundle mocks;
        mocks.llm->script(LlmRole::prompt_optimizer, {"no json here"});
        auto backends = mocks.bundle();
        Transcript t;
        CallContext ctx(backends, t, retries);
        bool typed = false;
        try {
            ctx.ask_json(LlmRequest::make(LlmRole::prompt_optimizer, "x"),
                         [](const std::string& s) { return extract_json_object(s); });
        } catch (const ParseError&) {
            typed = true;
        }
        require(typed, "exhausted retries raise a ParseError");
        require_eq(mocks.llm->call_count(LlmRole::prompt_optimizer), 1 + retries, "calls with retries");
    }
    {
        MockBundle mocks;
        mocks.llm->script(LlmRole::prompt_optimizer, {"nope", "```json\n" + body + "\n```"});
        auto backends = mocks.bundle();
        Transcript t;
        CallContext ctx(backends, t, 2);
        const auto j = ctx.ask_json(LlmRequest::make(LlmRole::prompt_optimizer, "x"),
                                    [](const std::string& s) { return extract_json_object(s); });
        require(j == obj, "retry recovers");
        require_eq(mocks.llm->call_count(LlmRole::prompt_optimizer), 2, "calls until recovery");
    }
}

// 9 -------------------------------------------------------------------------

void determinism() {
    const auto dir = scratch_dir("acceptance_determinism");
    Json results[2];
    for (int i = 0; i < 2; ++i) {
        const auto out = dir / ("out" + std::to_string(i));
        const auto r = cli({"run", "--prompt", "Wooper by a pond", "--backend", "mock", "--fixtures",
                            wooper_fixture().string(), "--seed", "7", "--out", out.string()});
        require_eq(r.code, 0, "run exit code (" + r.err + ")");
        const auto run_dir = fs::directory_iterator(out)->path();
        results[i] = strip_volatile(read_json(run_dir / "result.json"));
    }
    fs::remove_all(dir);
    require(results[0] == results[1], "normalized result.json differs");
    require(!results[0]["iterations"].empty(), "runs produced iterations");
}

// 10 ------------------------------------------------------------------------

void grader_and_report() {
    const auto report = parse_grader_report(grader_dims_reply({9, 8, 9, 8, 9}));
    require(std::abs(report.overall_recomputed - 8.6) <= 1e-9, "overall_recomputed 8.6");
    const auto scaled = report_scale(report);
    require(std::abs(scaled.at(GraderDimension::overall) - 86.0) <= 1e-9, "scaled overall 86.0");

    const auto dir = scratch_dir("acceptance_report");
    auto summary = [](double emotional, double consistency, double visual, double creativity, double accuracy,
                      double overall) {
        Json m{{"emotional_or_thematic_resonance", emotional}, {"consistency_and_cohesion", consistency},
               {"visual_quality_and_realism", visual},          {"creativity_and_originality", creativity},
               {"accuracy_to_prompt", accuracy},                {"overall", overall}};
        return Json{{"per_dimension_means", m}, {"per_subcategory", Json::object()}, {"run_count", 10},
                    {"failures", Json::array()}}
            .dump();
    };
    write_text(dir / "a" / "eval_summary.json", summary(70.2, 80.1, 75.0, 60.3, 87.8, 74.7));
    write_text(dir / "b" / "eval_summary.json", summary(71.9, 79.4, 75.0, 58.8, 80.5, 73.1));
    const auto r = cli({"report", "--runs", (dir / "a").string(), (dir / "b").string(), "--label", "ours",
                        "--label", "base"});
    fs::remove_all(dir);
    require_eq(r.code, 0, "report exit code");
    for (const char* row : {"| Accuracy-to-Prompt | **87.8** | 80.5 |", "| Emotional / Thematic Resonance | 70.2 | **71.9** |",
                            "| Visual Quality & Realism | **75.0** | **75.0** |", "| Overall | **74.7** | 73.1 |"}) {
        require(r.out.find(row) != std::string::npos, std::string("missing row ") + row);
    }
}

// 11 ------------------------------------------------------------------------

void figure_two_flow() {
    auto mocks = load_fixture_bundle(wooper_fixture());
    RunConfig config;
    config.t_max = 2;
    const auto start = std::chrono::steady_clock::now();
    const auto r = run_optimization(config, "Wooper by a pond", mocks.bundle());
    const double elapsed = seconds_since(start);
    require(r.termination != Termination::fatal_error, "run completed (" + r.error + ")");
    require_eq(r.iterations.size(), 3u, "iterations");
    const auto f1 = decision_to_flags(*r.iterations[1].decision);
    const auto f2 = decision_to_flags(*r.iterations[2].decision);
    require(f1.invoke_poa && f1.invoke_ira, "iteration 1 invokes the retriever");
    require(!r.iterations[1].exemplars.empty(), "iteration 1 grounded on exemplars");
    require(count_role(r.iterations[1].transcript, "search") >= 1, "iteration 1 searched");
    require(f2.invoke_poa && !f2.invoke_ira, "iteration 2 is prompt-only");
    require_eq(count_role(r.iterations[2].transcript, "search"), 0, "iteration 2 searches");
    require(r.iterations[2].exemplars.ids() == r.iterations[1].exemplars.ids(), "iteration 2 keeps exemplars");
    const double baseline = r.iterations[0].score.total;
    const double best = r.iterations[static_cast<std::size_t>(r.best_index)].score.total;
    require(best > baseline, "best score beats the baseline");
    require(elapsed < 2.0, "runtime under 2 s");
}

}  // namespace

int main() {
    const std::vector<std::pair<std::string, std::function<void()>>> criteria = {
        {"loop fidelity [0.40, 0.90, 0.70], tau=1, t_max=2", loop_fidelity},
        {"early stop [0.50, 0.95], tau=0.90", early_stop},
        {"state-transition identities over 200 randomized runs", state_transitions},
        {"strategy table conformance", strategy_table},
        {"coverage formula", coverage_formula},
        {"aggregate score", aggregate_formula},
        {"retrieval rewrite fallback and selection", retrieval_fallback},
        {"JSON robustness and retry bound", json_robustness},
        {"deterministic runs", determinism},
        {"grader scaling and comparison report", grader_and_report},
        {"end-to-end retrieval then prompt-only flow", figure_two_flow},
    };
    int failed = 0;
    for (std::size_t i = 0; i < criteria.size(); ++i) {
        const auto& [name, check] = criteria[i];
        std::string reason;
        try {
            check();
        } catch (const std::exception& e) {
            reason = e.what();
        }
        std::cout << (reason.empty() ? "PASS" : "FAIL") << " " << (i + 1) << " " << name;
        if (!reason.empty()) std::cout << ": " << reason;
        std::cout << std::endl;
        failed += !reason.empty();
    }
    return failed == 0 ? 0 : 1;
}
