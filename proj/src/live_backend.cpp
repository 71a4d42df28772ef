#include "w2i/live_backend.hpp"

#include "w2i/json_extract.hpp"

#include <httplib.h>

#include <cstdlib>
#include <thread>

namespace w2i {

namespace {

class GateLock {
public:
    explicit GateLock(ConcurrencyGate& g) : g_(g) { g_.acquire(); }
    ~GateLock() { g_.release(); }
    GateLock(const GateLock&) = delete;
    GateLock& operator=(const GateLock&) = delete;

private:
    ConcurrencyGate& g_;
};

std::unique_ptr<httplib::Client> make_client(const std::string& origin, const HttpOptions& o) {
    auto cli = std::make_unique<httplib::Client>(origin);
    cli->set_connection_timeout(o.timeout);
    cli->set_read_timeout(o.timeout);
    cli->set_write_timeout(o.timeout);
    cli->set_follow_location(true);
    return cli;
}

enum class On429 { retry, quota };

struct Reply {
    httplib::Response response;
    int attempts = 1;
};

/// Runs `send` under the retry policy. Auth failures and non-retryable 4xx
/// stop immediately; connection errors, 5xx and (optionally) 429 back off
/// and try again.
template <class Send>
Reply send_with_retry(const RetryPolicy& policy, const std::string& what, On429 on429, Send&& send) {
    auto backoff = policy.initial_backoff;
    std::string last_error;
    bool rate_limited = false;
    const int attempts = std::max(1, policy.attempts);
    for (int attempt = 1; attempt <= attempts; ++attempt) {
        if (attempt > 1) {
            std::this_thread::sleep_for(backoff);
            backoff = std::chrono::milliseconds(
                static_cast<long long>(static_cast<double>(backoff.count()) * policy.multiplier));
        }
        httplib::Result res = send();
        if (!res) {
            last_error = what + ": " + httplib::to_string(res.error());
            rate_limited = false;
            continue;
        }
        const int status = res->status;
        if (status >= 200 && status < 300) return Reply{*res, attempt};
        if (status == 401 || status == 403) {
            throw AuthError(what + ": HTTP " + std::to_string(status));
        }
        if (status == 429) {
            if (on429 == On429::quota) throw QuotaExceeded(what + ": HTTP 429");
            last_error = what + ": HTTP 429";
            rate_limited = true;
            continue;
        }
        if (status >= 500) {
            last_error = what + ": HTTP " + std::to_string(status);
            rate_limited = false;
            continue;
        }
        throw TransportError(what + ": HTTP " + std::to_string(status) + " " + res->body.substr(0, 200));
    }
    const auto msg = last_error + " (after " + std::to_string(attempts) + " attempts)";
    if (rate_limited) throw RateLimited(msg);
    throw TransportError(msg);
}

std::string env_or(const char* name, std::string fallback) {
    const char* v = std::getenv(name);
    return v && *v ? std::string(v) : std::move(fallback);
}

}  // namespace

std::pair<std::string, std::string> split_url(const std::string& url) {
    const auto scheme_end = url.find("://");
    if (scheme_end == std::string::npos) throw ConfigError("not a URL: " + url);
    const auto scheme = url.substr(0, scheme_end);
    if (scheme != "http" && scheme != "https") throw ConfigError("unsupported URL scheme: " + url);
    const auto path_start = url.find('/', scheme_end + 3);
    std::string origin = url.substr(0, path_start);
    std::string path = path_start == std::string::npos ? "" : url.substr(path_start);
    while (!path.empty() && path.back() == '/') path.pop_back();
    if (origin.size() <= scheme_end + 3) throw ConfigError("URL has no host: " + url);
    return {std::move(origin), std::move(path)};
}

ConcurrencyGate::ConcurrencyGate(int max_concurrent)
    : sem_(std::clamp<std::ptrdiff_t>(max_concurrent, 1, 1024)) {}

// ---------------------------------------------------------------------------
// LLM
// ---------------------------------------------------------------------------

HttpLlm::HttpLlm(std::string base_url, std::string api_key, std::string model, HttpOptions options)
    : base_url_(std::move(base_url)),
      api_key_(std::move(api_key)),
      model_(std::move(model)),
      options_(options),
      gate_(options.max_concurrent) {}

LlmResponse HttpLlm::complete(const LlmRequest& request) {
    if (api_key_.empty()) throw AuthError("W2I_LLM_API_KEY is not set");
    if (request.text.empty()) throw ContractViolation("llm request text is empty");
    const auto [origin, prefix] = split_url(base_url_);

    Json content = Json::array();
    content.push_back({{"type", "text"}, {"text", request.text}});
    for (const auto& img : request.image_attachments) {
        const auto url = "data:" + mime_for_extension(img.extension()) + ";base64," +
                         base64_encode(img.bytes());
        content.push_back({{"type", "image_url"}, {"image_url", {{"url", url}}}});
    }
    Json body = {
        {"model", model_},
        {"temperature", request.temperature},
        {"max_tokens", request.max_output_tokens},
        {"messages", Json::array({{{"role", "user"}, {"content", content}}})},
    };
    const auto payload = body.dump();

    GateLock lock(gate_);
    auto cli = make_client(origin, options_);
    httplib::Headers headers = {{"Authorization", "Bearer " + api_key_}};
    auto reply = send_with_retry(options_.retry, "llm " + std::string(to_string(request.role)),
                                 On429::retry, [&] {
                                     return cli->Post(prefix + "/chat/completions", headers, payload,
                                                      "application/json");
                                 });
    try {
        auto j = Json::parse(reply.response.body);
        auto& msg = j.at("choices").at(0).at("message").at("content");
        if (!msg.is_string()) throw TransportError("llm reply content is not a string");
        return LlmResponse{msg.get<std::string>(), reply.attempts};
    } catch (const Json::exception& e) {
        throw TransportError(std::string("unexpected chat-completions reply: ") + e.what());
    }
}

// ---------------------------------------------------------------------------
// Generator
// ---------------------------------------------------------------------------

HttpGenerator::HttpGenerator(std::string base_url, HttpOptions options)
    : base_url_(std::move(base_url)), options_(options), gate_(options.max_concurrent) {}

GeneratedImage HttpGenerator::generate(const GeneratorRequest& request) {
    request.validate();
    if (base_url_.empty()) throw GenerationError("W2I_GEN_BASE_URL is not set");
    const auto [origin, prefix] = split_url(base_url_);

    Json images = Json::array();
    for (const auto& img : request.positional_images) images.push_back(base64_encode(img.bytes()));
    Json body = {
        {"mode", to_string(request.mode)},
        {"prompt", request.prompt},
        {"negative_prompt", request.negative_prompt},
        {"images", images},
        {"seed", request.seed},
    };
    const auto payload = body.dump();

    GateLock lock(gate_);
    auto cli = make_client(origin, options_);
    Reply reply;
    try {
        reply = send_with_retry(options_.retry, "generator", On429::retry, [&] {
            return cli->Post(prefix + "/generate", payload, "application/json");
        });
    } catch (const TransportError& e) {
        throw GenerationError(e.what());
    }

    const auto& res = reply.response;
    Bytes bytes;
    if (res.get_header_value("Content-Type").rfind("application/json", 0) == 0) {
        try {
            auto j = Json::parse(res.body);
            bytes = base64_decode(j.at("image").get<std::string>());
        } catch (const std::exception& e) {
            throw GenerationError(std::string("generator reply has no usable image: ") + e.what());
        }
    } else {
        bytes.assign(res.body.begin(), res.body.end());
    }
    if (bytes.empty()) throw GenerationError("generator returned no bytes");
    return GeneratedImage{std::move(bytes), reply.attempts};
}

// ---------------------------------------------------------------------------
// Search
// ---------------------------------------------------------------------------

HttpSearch::HttpSearch(std::string base_url, std::string api_key, HttpOptions options)
    : base_url_(std::move(base_url)),
      api_key_(std::move(api_key)),
      options_(options),
      gate_(options.max_concurrent) {}

SearchResponse HttpSearch::search(const std::string& query, int count) {
    if (query.empty() || count < 1) throw ContractViolation("search needs a query and count >= 1");
    if (api_key_.empty()) throw AuthError("W2I_SEARCH_API_KEY is not set");
    const auto [origin, prefix] = split_url(base_url_);

    httplib::Params params = {
        {"engine", "google_images"},
        {"q", query},
        {"num", std::to_string(count)},
        {"api_key", api_key_},
    };
    GateLock lock(gate_);
    auto cli = make_client(origin, options_);
    auto reply = send_with_retry(options_.retry, "search", On429::quota, [&] {
        return cli->Get(prefix + "/search", params, httplib::Headers{});
    });

    SearchResponse out;
    out.attempts = reply.attempts;
    try {
        auto j = Json::parse(reply.response.body);
        if (auto err = j.is_object() ? j.find("error") : j.end(); err != j.end() && err->is_string()) {
            const auto msg = err->get<std::string>();
            if (msg.find("hasn't returned any results") != std::string::npos) return out;
            throw QuotaExceeded("search error: " + msg);
        }
        // Either the plain contract (a list of {image_url, thumbnail_url,
        // position}) or a SERP-style {"images_results": [...]} body.
        const bool plain = j.is_array();
        const Json* results = plain ? &j : nullptr;
        if (!plain) {
            auto it = j.find("images_results");
            if (it == j.end()) return out;
            results = &*it;
        }
        for (const auto& r : *results) {
            SearchHit h;
            h.image_url = r.value(plain ? "image_url" : "original", std::string{});
            h.thumbnail_url = r.value(plain ? "thumbnail_url" : "thumbnail", std::string{});
            h.position = r.value("position", static_cast<int>(out.hits.size()) + 1);
            if (h.image_url.empty()) continue;
            out.hits.push_back(std::move(h));
            if (static_cast<int>(out.hits.size()) >= count) break;
        }
    } catch (const Json::exception& e) {
        throw TransportError(std::string("unexpected search reply: ") + e.what());
    }
    return out;
}

FetchResponse HttpSearch::fetch(const std::string& url) {
    const auto scheme_end = url.find("://");
    const auto path_start = scheme_end == std::string::npos ? std::string::npos : url.find('/', scheme_end + 3);
    const auto origin = url.substr(0, path_start);
    const auto path = path_start == std::string::npos ? std::string("/") : url.substr(path_start);
    split_url(origin);  // validates the scheme

    GateLock lock(gate_);
    auto cli = make_client(origin, options_);
    auto reply = send_with_retry(options_.retry, "fetch", On429::retry, [&] { return cli->Get(path); });
    if (reply.response.body.empty()) throw TransportError("empty image body from " + url);
    return FetchResponse{Bytes(reply.response.body.begin(), reply.response.body.end()), reply.attempts};
}

BackendBundle live_bundle_from_env(const HttpOptions& options) {
    BackendBundle b;
    b.llm = std::make_shared<HttpLlm>(env_or("W2I_LLM_BASE_URL", "https://api.openai.com/v1"),
                                      env_or("W2I_LLM_API_KEY", ""),
                                      env_or("W2I_LLM_MODEL", "gpt-4o"), options);
    b.generator = std::make_shared<HttpGenerator>(env_or("W2I_GEN_BASE_URL", ""), options);
    b.search = std::make_shared<HttpSearch>(env_or("W2I_SEARCH_BASE_URL", "https://serpapi.com"),
                                            env_or("W2I_SEARCH_API_KEY", ""), options);
    return b;
}

}  // namespace w2i
