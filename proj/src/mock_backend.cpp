#include "w2i/mock_backend.hpp"

#include "w2i/json_extract.hpp"
#include "w2i/text.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <optional>
#include <set>
#include <sstream>

namespace w2i {

namespace fs = std::filesystem;

// ---------------------------------------------------------------------------
// MockLlm
// ---------------------------------------------------------------------------

void MockLlm::script(LlmRole role, std::vector<std::string> replies) {
    std::lock_guard lock(mu_);
    scripts_[role] = std::move(replies);
    next_[role] = 0;
}

void MockLlm::push(LlmRole role, std::string reply) {
    std::lock_guard lock(mu_);
    scripts_[role].push_back(std::move(reply));
}

LlmResponse MockLlm::complete(const LlmRequest& request) {
    std::lock_guard lock(mu_);
    calls_.push_back(request);
    auto it = scripts_.find(request.role);
    if (it == scripts_.end() || it->second.empty()) {
        throw TransportError("mock llm has no script for role " + std::string(to_string(request.role)));
    }
    const auto& replies = it->second;
    int& index = next_[request.role];
    const auto pick = std::min<std::size_t>(static_cast<std::size_t>(index), replies.size() - 1);
    ++index;
    return LlmResponse{replies[pick], 1};
}

std::vector<LlmRequest> MockLlm::calls() const {
    std::lock_guard lock(mu_);
    return calls_;
}

std::vector<LlmRequest> MockLlm::calls(LlmRole role) const {
    std::lock_guard lock(mu_);
    std::vector<LlmRequest> out;
    for (const auto& c : calls_) {
        if (c.role == role) out.push_back(c);
    }
    return out;
}

int MockLlm::call_count(LlmRole role) const {
    std::lock_guard lock(mu_);
    return static_cast<int>(std::count_if(calls_.begin(), calls_.end(),
                                          [&](const LlmRequest& c) { return c.role == role; }));
}

// ---------------------------------------------------------------------------
// MockGenerator
// ---------------------------------------------------------------------------

Bytes MockGenerator::synthesize(std::string_view digest_hex) {
    const auto digest = sha256_hex(digest_hex);  // normalizes any input to 64 hex chars
    Bytes raw;
    for (std::size_t i = 0; i + 1 < digest.size(); i += 2) {
        std::uint8_t b = 0;
        std::from_chars(digest.data() + i, digest.data() + i + 2, b, 16);
        raw.push_back(b);
    }
    constexpr std::uint32_t kSide = 8;
    std::vector<std::uint8_t> rgb(kSide * kSide * 3);
    for (std::size_t i = 0; i < rgb.size(); ++i) rgb[i] = raw[i % raw.size()];
    return encode_png_rgb(kSide, kSide, rgb);
}

GeneratedImage MockGenerator::generate(const GeneratorRequest& request) {
    request.validate();
    std::lock_guard lock(mu_);
    const int index = static_cast<int>(calls_.size());
    calls_.push_back(request);
    if (std::find(failures_.begin(), failures_.end(), index) != failures_.end()) {
        throw GenerationError("mock generator scripted to fail on call " + std::to_string(index));
    }
    return GeneratedImage{synthesize(request.digest()), 1};
}

void MockGenerator::fail_on_call(int index) {
    std::lock_guard lock(mu_);
    failures_.push_back(index);
}

std::vector<GeneratorRequest> MockGenerator::calls() const {
    std::lock_guard lock(mu_);
    return calls_;
}

int MockGenerator::call_count() const {
    std::lock_guard lock(mu_);
    return static_cast<int>(calls_.size());
}

// ---------------------------------------------------------------------------
// MockSearch
// ---------------------------------------------------------------------------

void MockSearch::add_results(const std::string& query, std::vector<SearchHit> hits) {
    std::lock_guard lock(mu_);
    exact_[query] = std::move(hits);
}

void MockSearch::add_slug_results(const std::string& slug, std::vector<SearchHit> hits) {
    std::lock_guard lock(mu_);
    by_slug_[slug] = std::move(hits);
}

std::string MockSearch::add_image(Bytes bytes) {
    auto id = sha256_hex(bytes);
    std::lock_guard lock(mu_);
    images_[id] = std::move(bytes);
    return "fixture:" + id;
}

void MockSearch::set_quota_exceeded(const std::string& query) {
    std::lock_guard lock(mu_);
    quota_.push_back(query);
}

void MockSearch::set_fetch_failure(const std::string& url) {
    std::lock_guard lock(mu_);
    broken_urls_.push_back(url);
}

SearchResponse MockSearch::search(const std::string& query, int count) {
    if (query.empty() || count < 1) throw ContractViolation("mock search needs a query and count >= 1");
    std::lock_guard lock(mu_);
    queries_.push_back(query);
    if (std::find(quota_.begin(), quota_.end(), query) != quota_.end()) {
        throw QuotaExceeded("mock search quota exceeded for '" + query + "'");
    }
    const std::vector<SearchHit>* hits = nullptr;
    if (auto it = exact_.find(query); it != exact_.end()) {
        hits = &it->second;
    } else if (auto s = by_slug_.find(slugify(query)); s != by_slug_.end()) {
        hits = &s->second;
    }
    SearchResponse out;
    if (hits) {
        out.hits.assign(hits->begin(),
                        hits->begin() + std::min<std::ptrdiff_t>(count, static_cast<std::ptrdiff_t>(hits->size())));
    }
    return out;
}

FetchResponse MockSearch::fetch(const std::string& url) {
    std::lock_guard lock(mu_);
    if (std::find(broken_urls_.begin(), broken_urls_.end(), url) != broken_urls_.end()) {
        throw TransportError("mock fetch failure for " + url);
    }
    constexpr std::string_view kScheme = "fixture:";
    if (url.rfind(kScheme, 0) == 0) {
        auto it = images_.find(url.substr(kScheme.size()));
        if (it == images_.end()) throw TransportError("unknown fixture image " + url);
        return FetchResponse{it->second, 1};
    }
    return FetchResponse{MockGenerator::synthesize(url), 1};
}

std::vector<std::string> MockSearch::queries() const {
    std::lock_guard lock(mu_);
    return queries_;
}

BackendBundle MockBundle::bundle() const {
    BackendBundle b;
    b.llm = llm;
    b.generator = generator;
    b.search = search;
    return b;
}

// ---------------------------------------------------------------------------
// Fixture bundles
// ---------------------------------------------------------------------------

namespace {

std::string read_text(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    if (!in) throw ConfigError("cannot read " + p.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::optional<int> index_of(const fs::path& p) {
    if (p.extension() != ".txt") return std::nullopt;
    const auto stem = p.stem().string();
    int value = 0;
    auto [ptr, ec] = std::from_chars(stem.data(), stem.data() + stem.size(), value);
    if (ec != std::errc{} || ptr != stem.data() + stem.size() || value < 0) return std::nullopt;
    return value;
}

std::vector<SearchHit> parse_hits(const std::string& text, const fs::path& source) {
    Json j;
    try {
        j = Json::parse(text);
    } catch (const Json::parse_error& e) {
        throw ConfigError(source.string() + ": " + e.what());
    }
    if (!j.is_array()) throw ConfigError(source.string() + ": expected a JSON list");
    std::vector<SearchHit> hits;
    for (const auto& item : j) {
        if (!item.is_object() || !item.contains("image_url") || !item["image_url"].is_string()) {
            throw ConfigError(source.string() + ": every hit needs a string image_url");
        }
        SearchHit h;
        h.image_url = item["image_url"].get<std::string>();
        h.thumbnail_url = item.value("thumbnail_url", std::string{});
        h.position = item.value("position", static_cast<int>(hits.size()) + 1);
        hits.push_back(std::move(h));
    }
    return hits;
}

std::vector<fs::path> sorted_entries(const fs::path& dir) {
    std::vector<fs::path> out;
    for (const auto& e : fs::directory_iterator(dir)) out.push_back(e.path());
    std::sort(out.begin(), out.end());
    return out;
}

}  // namespace

MockBundle load_fixture_bundle(const fs::path& dir) {
    if (!fs::is_directory(dir)) throw ConfigError("fixture directory not found: " + dir.string());
    if (auto problems = validate_fixture_bundle(dir); !problems.empty()) {
        std::string msg = "invalid fixture bundle " + dir.string() + ":";
        for (const auto& p : problems) msg += "\n  " + p;
        throw ConfigError(msg);
    }
    MockBundle m;
    if (fs::is_directory(dir / "responses")) {
        for (const auto& role_dir : sorted_entries(dir / "responses")) {
            auto role = parse_llm_role(role_dir.filename().string());
            std::map<int, std::string> replies;
            for (const auto& f : sorted_entries(role_dir)) replies[*index_of(f)] = read_text(f);
            std::vector<std::string> script;
            for (auto& [_, text] : replies) script.push_back(std::move(text));
            m.llm->script(*role, std::move(script));
        }
    }
    if (fs::is_directory(dir / "search")) {
        for (const auto& f : sorted_entries(dir / "search")) {
            m.search->add_slug_results(f.stem().string(), parse_hits(read_text(f), f));
        }
    }
    if (fs::is_directory(dir / "images")) {
        for (const auto& f : sorted_entries(dir / "images")) {
            auto text = read_text(f);
            m.search->add_image(Bytes(text.begin(), text.end()));
        }
    }
    return m;
}

std::vector<std::string> validate_fixture_bundle(const fs::path& dir) {
    std::vector<std::string> problems;
    if (!fs::is_directory(dir)) return {"not a directory: " + dir.string()};

    std::set<std::string> images;
    if (fs::is_directory(dir / "images")) {
        for (const auto& f : sorted_entries(dir / "images")) {
            const auto text = read_text(f);
            const auto digest = sha256_hex(text);
            if (f.stem().string() != digest) {
                problems.push_back("images/" + f.filename().string() + ": name does not match sha256 " + digest);
            }
            images.insert(digest);
        }
    }

    if (fs::is_directory(dir / "responses")) {
        for (const auto& role_dir : sorted_entries(dir / "responses")) {
            const auto name = role_dir.filename().string();
            if (!fs::is_directory(role_dir) || !parse_llm_role(name)) {
                problems.push_back("responses/" + name + ": unknown role");
                continue;
            }
            std::set<int> indices;
            for (const auto& f : sorted_entries(role_dir)) {
                auto idx = index_of(f);
                if (!idx) {
                    problems.push_back("responses/" + name + "/" + f.filename().string() +
                                       ": expected <index>.txt");
                    continue;
                }
                indices.insert(*idx);
            }
            if (indices.empty()) problems.push_back("responses/" + name + ": no replies");
            int expected = 0;
            for (int i : indices) {
                if (i != expected) {
                    problems.push_back("responses/" + name + ": missing reply " + std::to_string(expected));
                    break;
                }
                ++expected;
            }
        }
    } else {
        problems.push_back("missing responses/ directory");
    }

    if (fs::is_directory(dir / "search")) {
        for (const auto& f : sorted_entries(dir / "search")) {
            const auto rel = "search/" + f.filename().string();
            if (f.extension() != ".json") {
                problems.push_back(rel + ": expected .json");
                continue;
            }
            if (slugify(f.stem().string()) != f.stem().string()) {
                problems.push_back(rel + ": file name is not a query slug");
            }
            try {
                for (const auto& h : parse_hits(read_text(f), f)) {
                    for (const auto& url : {h.image_url, h.thumbnail_url}) {
                        if (url.rfind("fixture:", 0) == 0 && !images.count(url.substr(8))) {
                            problems.push_back(rel + ": " + url + " has no file in images/");
                        }
                    }
                }
            } catch (const ConfigError& e) {
                problems.push_back(e.what());
            }
        }
    }
    return problems;
}

}  // namespace w2i
