#include "w2i/run_store.hpp"

#include "w2i/config.hpp"
#include "w2i/engine.hpp"
#include "w2i/error.hpp"
#include "w2i/serialize.hpp"

#include <ctime>
#include <fstream>

namespace w2i {

namespace fs = std::filesystem;

std::string make_run_id(const std::string& prompt, const RunConfig& config,
                        std::chrono::system_clock::time_point now) {
    const std::time_t t = std::chrono::system_clock::to_time_t(now);
    std::tm tm{};
    gmtime_r(&t, &tm);
    char stamp[32];
    std::strftime(stamp, sizeof stamp, "%Y%m%dT%H%M%SZ", &tm);
    const auto digest = sha256_hex(prompt + "\n" + to_json(config).dump());
    return std::string(stamp) + "-" + digest.substr(0, 8);
}

std::string reserve_run_dir(const fs::path& root, const std::string& run_id) {
    fs::create_directories(root);
    for (int n = 1;; ++n) {
        const auto id = n == 1 ? run_id : run_id + "-" + std::to_string(n);
        if (fs::create_directory(root / id)) return id;
    }
}

namespace {

void write_file(const fs::path& path, std::string_view data) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("cannot write " + path.string());
    out.write(data.data(), static_cast<std::streamsize>(data.size()));
    if (!out) throw Error("write failed for " + path.string());
}

void write_json(const fs::path& path, const Json& j) { write_file(path, j.dump(2) + "\n"); }

void write_image(const fs::path& path, const ImageArtifact& image) {
    const auto& b = image.bytes();
    write_file(path, std::string_view(reinterpret_cast<const char*>(b.data()), b.size()));
}

Json iteration_summary(const IterationRecord& r) {
    Json strategies = Json::array();
    if (r.decision) {
        for (auto s : r.decision->strategies) strategies.push_back(to_string(s));
    }
    return Json{{"t", r.t},
                {"task_type", r.decision ? Json(to_string(r.decision->task_type)) : Json(nullptr)},
                {"strategies", strategies},
                {"generation_mode", to_string(r.generation_mode)},
                {"prompt", r.prompt_after},
                {"exemplar_ids", r.exemplars.ids()},
                {"image_id", r.image.id()},
                {"score_total", r.score.total}};
}

}  // namespace

Json result_json(const RunResult& r) {
    Json iterations = Json::array();
    for (const auto& rec : r.iterations) iterations.push_back(iteration_summary(rec));
    Json j{{"run_id", r.run_id},
           {"created_at", r.created_at},
           {"original_prompt", r.original_prompt},
           {"termination", to_string(r.termination)},
           {"best_index", r.best_index}};
    j["best_score"] = r.best_index >= 0 ? Json(r.iterations[static_cast<std::size_t>(r.best_index)].score.total)
                                        : Json(nullptr);
    j["final_image"] = r.final_image ? to_json(*r.final_image) : Json(nullptr);
    j["iterations"] = iterations;
    j["stop_decision"] = r.stop_decision ? to_json(*r.stop_decision) : Json(nullptr);
    j["stop_transcript"] = to_json(r.stop_transcript);
    j["error"] = r.error.empty() ? Json(nullptr) : Json(r.error);
    return j;
}

void write_run(const RunResult& result, const fs::path& dir) {
    fs::create_directories(dir / "iterations");
    write_json(dir / "config.json", to_json(result.config));
    for (const auto& rec : result.iterations) {
        const auto it_dir = dir / "iterations" / std::to_string(rec.t);
        fs::create_directories(it_dir);
        if (rec.decision) write_json(it_dir / "decision.json", to_json(*rec.decision));
        auto prompt = prompt_json(rec.prompt_after, rec.negative_prompts, rec.prompt_warnings);
        prompt["prompt_before"] = rec.prompt_before;
        prompt["generation_mode"] = to_string(rec.generation_mode);
        write_json(it_dir / "prompt.json", prompt);
        write_json(it_dir / "exemplars.json", to_json(rec.exemplars));
        for (std::size_t k = 0; k < rec.exemplars.size(); ++k) {
            const auto& img = rec.exemplars.items()[k].image;
            write_image(it_dir / ("exemplar_" + std::to_string(k + 1) + "." + img.extension()), img);
        }
        write_image(it_dir / ("image." + rec.image.extension()), rec.image);
        auto score = to_json(rec.score);
        score["visual_analysis"] = rec.visual_analysis;
        write_json(it_dir / "score.json", score);
        write_json(it_dir / "transcript.json", to_json(rec.transcript));
    }
    write_json(dir / "result.json", result_json(result));
}

std::vector<std::string> check_run_dir(const fs::path& dir) {
    std::vector<std::string> problems;
    auto parse = [&](const fs::path& p) -> std::optional<Json> {
        std::ifstream in(p);
        if (!in) {
            problems.push_back("missing " + fs::relative(p, dir).string());
            return std::nullopt;
        }
        try {
            return Json::parse(in);
        } catch (const Json::parse_error& e) {
            problems.push_back(fs::relative(p, dir).string() + ": " + e.what());
            return std::nullopt;
        }
    };
    parse(dir / "config.json");
    auto result = parse(dir / "result.json");
    if (!result) return problems;
    const auto& iterations = (*result)["iterations"];
    if (!iterations.is_array()) {
        problems.push_back("result.json: iterations is not a list");
        return problems;
    }
    for (const auto& it : iterations) {
        const int t = it.value("t", -1);
        const auto it_dir = dir / "iterations" / std::to_string(t);
        if (t >= 1) parse(it_dir / "decision.json");
        parse(it_dir / "prompt.json");
        parse(it_dir / "exemplars.json");
        parse(it_dir / "score.json");
        parse(it_dir / "transcript.json");
        bool image = false;
        if (fs::is_directory(it_dir)) {
            for (const auto& e : fs::directory_iterator(it_dir)) {
                if (e.path().stem() == "image") image = true;
            }
        }
        if (!image) problems.push_back("missing iterations/" + std::to_string(t) + "/image.<ext>");
    }
    return problems;
}

}  // namespace w2i
