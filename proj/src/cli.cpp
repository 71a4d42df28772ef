#include "w2i/cli.hpp"

#include "w2i/config.hpp"
#include "w2i/engine.hpp"
#include "w2i/error.hpp"
#include "w2i/eval.hpp"
#include "w2i/live_backend.hpp"
#include "w2i/mock_backend.hpp"
#include "w2i/run_store.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <fstream>
#include <optional>

namespace w2i {

namespace fs = std::filesystem;

namespace {

struct RunFlags {
    std::string config_path;
    std::optional<int> max_iters;
    std::optional<double> threshold;
    std::optional<std::uint64_t> seed;
    std::optional<std::string> backend;
    std::string fixtures;
};

void add_run_flags(CLI::App& cmd, RunFlags& f) {
    cmd.add_option("--config", f.config_path, "JSON config file")->check(CLI::ExistingFile);
    cmd.add_option("--max-iters", f.max_iters, "Iteration budget (t_max)");
    cmd.add_option("--threshold", f.threshold, "Convergence threshold tau");
    cmd.add_option("--seed", f.seed, "Generator seed");
    cmd.add_option("--backend", f.backend, "Backend profile")->check(CLI::IsMember({"live", "mock"}));
    cmd.add_option("--fixtures", f.fixtures, "Mock fixture directory");
}

RunConfig resolve(const RunFlags& f) {
    RunConfig base = f.config_path.empty() ? RunConfig{} : load_config(f.config_path);
    ConfigOverrides o;
    o.t_max = f.max_iters;
    o.threshold_tau = f.threshold;
    o.seed = f.seed;
    if (f.backend) o.backend_profile = *f.backend == "live" ? BackendProfile::live : BackendProfile::mock;
    return resolve_config(base, o);
}

void require_fixtures(const RunConfig& config, const RunFlags& f) {
    if (config.backend_profile == BackendProfile::mock && f.fixtures.empty()) {
        throw ConfigError("fixtures: --fixtures is required with the mock backend");
    }
}

std::string fmt4(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.4f", v);
    return buf;
}

int cmd_run(const RunFlags& f, const std::string& prompt, const fs::path& out_root,
            std::ostream& out, std::ostream& err) {
    RunConfig config;
    BackendBundle backends;
    try {
        config = resolve(f);
        require_fixtures(config, f);
        backends = config.backend_profile == BackendProfile::mock ? load_fixture_bundle(f.fixtures).bundle()
                                                                  : live_bundle_from_env();
    } catch (const ConfigError& e) {
        err << "config error: " << e.what() << "\n";
        return kExitConfig;
    }

    const auto now = std::chrono::system_clock::now();
    RunResult result;
    std::string run_id;
    try {
        run_id = reserve_run_dir(out_root, make_run_id(prompt, config, now));
        RunOptions ro;
        ro.run_id = run_id;
        ro.started = now;
        result = run_optimization(config, prompt, backends, ro);
    } catch (const ConfigError& e) {
        err << "config error: " << e.what() << "\n";
        if (!run_id.empty()) fs::remove_all(out_root / run_id);
        return kExitConfig;
    }
    write_run(result, out_root / run_id);

    out << "run_id: " << result.run_id << "\n";
    out << "run_dir: " << (out_root / run_id).string() << "\n";
    if (result.best_index >= 0) {
        out << "best_index: " << result.best_index << "\n";
        out << "best_score: " << fmt4(result.iterations[static_cast<std::size_t>(result.best_index)].score.total)
            << "\n";
    }
    out << "termination: " << to_string(result.termination) << "\n";
    if (result.termination == Termination::fatal_error) {
        err << "fatal: " << result.error << "\n";
        return kExitFatal;
    }
    return kExitOk;
}

int cmd_eval(const RunFlags& f, const std::string& manifest_path, const fs::path& out_dir, int parallel,
             std::ostream& out, std::ostream& err) {
    PromptManifest manifest;
    EvalOptions opts;
    try {
        manifest = load_manifest(manifest_path);
        opts.config = resolve(f);
        require_fixtures(opts.config, f);
        if (parallel < 1) throw ConfigError("parallel: must be >= 1");
    } catch (const ConfigError& e) {
        err << "config error: " << e.what() << "\n";
        return kExitConfig;
    }
    opts.out_dir = out_dir;
    opts.parallel = parallel;
    if (opts.config.backend_profile == BackendProfile::mock) {
        const fs::path fixtures = f.fixtures;
        opts.backends = [fixtures](const ManifestEntry& e) {
            const auto own = fixtures / e.id;
            return load_fixture_bundle(fs::is_directory(own) ? own : fixtures).bundle();
        };
    } else {
        auto shared = live_bundle_from_env();
        opts.backends = [shared](const ManifestEntry&) { return shared; };
    }

    const auto summary = run_eval(manifest, opts);
    out << render_summary_markdown(summary);
    out << "summary: " << (out_dir / "eval_summary.json").string() << "\n";
    for (const auto& id : summary.failures) err << "failed: " << id << "\n";
    const bool any_ok = summary.run_count > static_cast<int>(summary.failures.size());
    return any_ok ? kExitOk : kExitFatal;
}

int cmd_report(const std::vector<std::string>& dirs, std::vector<std::string> labels,
               const std::string& format, std::ostream& out, std::ostream& err) {
    if (!labels.empty() && labels.size() != dirs.size()) {
        err << "config error: --label must be given once per --runs directory\n";
        return kExitConfig;
    }
    std::vector<LabeledSummary> columns;
    for (std::size_t i = 0; i < dirs.size(); ++i) {
        const fs::path dir = dirs[i];
        std::ifstream in(dir / "eval_summary.json");
        if (!in) {
            err << "config error: no eval_summary.json in " << dir.string() << "\n";
            return kExitConfig;
        }
        try {
            auto summary = summary_from_json(Json::parse(in));
            auto label = labels.empty() ? dir.filename().string() : labels[i];
            if (label.empty()) label = dir.string();
            columns.push_back(LabeledSummary{std::move(label), std::move(summary)});
        } catch (const std::exception& e) {
            err << "config error: " << dir.string() << ": " << e.what() << "\n";
            return kExitConfig;
        }
    }
    out << render_report(columns, format == "csv" ? ReportFormat::csv : ReportFormat::markdown);
    return kExitOk;
}

int cmd_validate_fixtures(const std::string& dir, std::ostream& out, std::ostream& err) {
    const auto problems = validate_fixture_bundle(dir);
    for (const auto& p : problems) err << p << "\n";
    if (!problems.empty()) return kExitConfig;
    out << "fixtures ok: " << dir << "\n";
    return kExitOk;
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"World-to-image agentic optimization loop"};
    app.name("w2i");
    app.require_subcommand(1);

    RunFlags run_flags;
    std::string prompt;
    std::string run_out = "runs";
    auto* run = app.add_subcommand("run", "Optimize one prompt");
    run->add_option("--prompt", prompt, "Prompt to optimize")->required();
    run->add_option("--out", run_out, "Directory that receives the run directory");
    add_run_flags(*run, run_flags);

    RunFlags eval_flags;
    std::string manifest;
    std::string eval_out = "eval_out";
    int parallel = 1;
    auto* eval = app.add_subcommand("eval", "Run every prompt of a manifest and summarize");
    eval->add_option("--manifest", manifest, "JSON list of {id, prompt, subcategory}")->required();
    eval->add_option("--out", eval_out, "Output directory");
    eval->add_option("--parallel", parallel, "Concurrent runs");
    add_run_flags(*eval, eval_flags);

    std::vector<std::string> report_dirs;
    std::vector<std::string> report_labels;
    std::string format = "markdown";
    auto* report = app.add_subcommand("report", "Compare eval summaries");
    report->add_option("--runs", report_dirs, "Eval output directories")->required();
    report->add_option("--label", report_labels, "Column label per directory");
    report->add_option("--format", format, "Table format")->check(CLI::IsMember({"markdown", "csv"}));

    std::string fixture_dir;
    auto* validate = app.add_subcommand("validate-fixtures", "Check a mock fixture directory");
    validate->add_option("--fixtures,dir", fixture_dir, "Fixture directory")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kExitOk : kExitConfig;
    }

    try {
        if (*run) return cmd_run(run_flags, prompt, run_out, out, err);
        if (*eval) return cmd_eval(eval_flags, manifest, eval_out, parallel, out, err);
        if (*report) return cmd_report(report_dirs, report_labels, format, out, err);
        if (*validate) return cmd_validate_fixtures(fixture_dir, out, err);
    } catch (const ConfigError& e) {
        err << "config error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const std::exception& e) {
        err << "fatal: " << e.what() << "\n";
        return kExitFatal;
    }
    return kExitConfig;
}

}  // namespace w2i
