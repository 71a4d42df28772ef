#pragma once

#include "w2i/backend.hpp"

#include <chrono>
#include <memory>
#include <semaphore>
#include <string>

namespace w2i {

struct RetryPolicy {
    int attempts = 3;
    std::chrono::milliseconds initial_backoff{500};
    double multiplier = 2.0;
};

struct HttpOptions {
    RetryPolicy retry;
    /// Concurrent requests allowed per client.
    int max_concurrent = 4;
    std::chrono::seconds timeout{120};
};

/// Splits "https://host:port/base/path" into the origin ("https://host:port")
/// and the path prefix ("/base/path", without a trailing slash). Throws
/// ConfigError for anything that is not an http(s) URL.
std::pair<std::string, std::string> split_url(const std::string& url);

class ConcurrencyGate {
public:
    explicit ConcurrencyGate(int max_concurrent);
    void acquire() { sem_.acquire(); }
    void release() { sem_.release(); }

private:
    std::counting_semaphore<1024> sem_;
};

/// Chat-completions client (OpenAI wire format). Images are sent inline as
/// base64 data URLs in attachment order.
class HttpLlm : public LlmBackend {
public:
    HttpLlm(std::string base_url, std::string api_key, std::string model, HttpOptions options = {});

    LlmResponse complete(const LlmRequest& request) override;

private:
    std::string base_url_;
    std::string api_key_;
    std::string model_;
    HttpOptions options_;
    ConcurrencyGate gate_;
};

/// POSTs {"mode", "prompt", "negative_prompt", "images", "seed"} to
/// <base>/generate. Accepts raw image bytes or {"image": "<base64>"}.
class HttpGenerator : public ImageGenerator {
public:
    HttpGenerator(std::string base_url, HttpOptions options = {});

    GeneratedImage generate(const GeneratorRequest& request) override;

private:
    std::string base_url_;
    HttpOptions options_;
    ConcurrencyGate gate_;
};

/// Image search: GET <base>/search?engine=google_images&q=..&num=..&api_key=..
/// returning a list of {"image_url", "thumbnail_url", "position"}. A
/// SERP-style {"images_results": [{"original", "thumbnail", "position"}]}
/// body is accepted as well.
class HttpSearch : public ImageSearch {
public:
    HttpSearch(std::string base_url, std::string api_key, HttpOptions options = {});

    SearchResponse search(const std::string& query, int count) override;
    FetchResponse fetch(const std::string& url) override;

private:
    std::string base_url_;
    std::string api_key_;
    HttpOptions options_;
    ConcurrencyGate gate_;
};

/// Builds live clients from W2I_LLM_API_KEY, W2I_LLM_BASE_URL,
/// W2I_LLM_MODEL, W2I_GEN_BASE_URL, W2I_SEARCH_API_KEY and
/// W2I_SEARCH_BASE_URL. Missing keys surface as AuthError on first use.
BackendBundle live_bundle_from_env(const HttpOptions& options = {});

}  // namespace w2i
