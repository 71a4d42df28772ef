#pragma once

#include "w2i/backend.hpp"

#include <filesystem>
#include <map>
#include <mutex>
#include <string>
#include <vector>

namespace w2i {

/// Scripted LLM. Replies are keyed by (role, call index); once a role's
/// script runs out its last reply repeats. A role with no script throws
/// TransportError.
class MockLlm : public LlmBackend {
public:
    void script(LlmRole role, std::vector<std::string> replies);
    void push(LlmRole role, std::string reply);

    LlmResponse complete(const LlmRequest& request) override;

    std::vector<LlmRequest> calls() const;
    std::vector<LlmRequest> calls(LlmRole role) const;
    int call_count(LlmRole role) const;

private:
    mutable std::mutex mu_;
    std::map<LlmRole, std::vector<std::string>> scripts_;
    std::map<LlmRole, int> next_;
    std::vector<LlmRequest> calls_;
};

/// Emits an 8x8 PNG whose pixels spell out the request digest, so the image
/// id is a pure function of the request.
class MockGenerator : public ImageGenerator {
public:
    GeneratedImage generate(const GeneratorRequest& request) override;

    /// Makes call number `index` (0-based) throw GenerationError.
    void fail_on_call(int index);

    std::vector<GeneratorRequest> calls() const;
    int call_count() const;

    static Bytes synthesize(std::string_view digest_hex);

private:
    mutable std::mutex mu_;
    std::vector<GeneratorRequest> calls_;
    std::vector<int> failures_;
};

/// Search hits keyed by exact query string, falling back to the query slug.
/// Unknown queries return no hits. `fixture:<digest>` URLs resolve to stored
/// images; any other URL yields a synthetic image derived from the URL.
class MockSearch : public ImageSearch {
public:
    void add_results(const std::string& query, std::vector<SearchHit> hits);
    void add_slug_results(const std::string& slug, std::vector<SearchHit> hits);
    /// Stores `bytes` and returns its "fixture:<digest>" URL.
    std::string add_image(Bytes bytes);
    void set_quota_exceeded(const std::string& query);
    void set_fetch_failure(const std::string& url);

    SearchResponse search(const std::string& query, int count) override;
    FetchResponse fetch(const std::string& url) override;

    std::vector<std::string> queries() const;

private:
    mutable std::mutex mu_;
    std::map<std::string, std::vector<SearchHit>> exact_;
    std::map<std::string, std::vector<SearchHit>> by_slug_;
    std::map<std::string, Bytes> images_;
    std::vector<std::string> quota_;
    std::vector<std::string> broken_urls_;
    std::vector<std::string> queries_;
};

struct MockBundle {
    std::shared_ptr<MockLlm> llm = std::make_shared<MockLlm>();
    std::shared_ptr<MockGenerator> generator = std::make_shared<MockGenerator>();
    std::shared_ptr<MockSearch> search = std::make_shared<MockSearch>();

    BackendBundle bundle() const;
};

/// Loads a fixture directory:
///   responses/<role>/<index>.txt   scripted LLM replies
///   search/<query-slug>.json       [{"image_url", "thumbnail_url", "position"}]
///   images/<sha256>.png            bytes served for "fixture:<sha256>"
/// Throws ConfigError when the directory is unusable.
MockBundle load_fixture_bundle(const std::filesystem::path& dir);

/// Problems found in a fixture directory; empty when it is valid.
std::vector<std::string> validate_fixture_bundle(const std::filesystem::path& dir);

}  // namespace w2i
