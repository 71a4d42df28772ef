#pragma once

#include "w2i/error.hpp"
#include "w2i/transcript.hpp"
#include "w2i/types.hpp"

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace w2i {

enum class LlmRole {
    orchestrator,
    prompt_optimizer,
    retriever_selector,
    query_rewriter,
    visual_analyst,
    keyword_extractor,
    keyword_grader,
    grader,
};

inline constexpr LlmRole kAllLlmRoles[] = {
    LlmRole::orchestrator,      LlmRole::prompt_optimizer, LlmRole::retriever_selector,
    LlmRole::query_rewriter,    LlmRole::visual_analyst,   LlmRole::keyword_extractor,
    LlmRole::keyword_grader,    LlmRole::grader,
};

std::string_view to_string(LlmRole role);
std::optional<LlmRole> parse_llm_role(std::string_view text);

/// 0 for judging roles, 0.7 for the generative agents.
double default_temperature(LlmRole role);

struct LlmRequest {
    LlmRole role = LlmRole::orchestrator;
    std::string text;
    /// Order defines "image k" semantics for the model.
    std::vector<ImageArtifact> image_attachments;
    double temperature = 0.0;
    int max_output_tokens = 2048;

    static LlmRequest make(LlmRole role, std::string text,
                           std::vector<ImageArtifact> attachments = {});

    std::string digest() const;
};

struct LlmResponse {
    std::string text;
    int attempts = 1;
};

class LlmBackend {
public:
    virtual ~LlmBackend() = default;
    /// Must be safe to call concurrently.
    virtual LlmResponse complete(const LlmRequest& request) = 0;
};

struct GeneratorRequest {
    TaskType mode = TaskType::text_to_image;
    std::string prompt;
    std::string negative_prompt;
    std::vector<ImageArtifact> positional_images;
    std::uint64_t seed = 0;

    /// Throws ModeError when the positional images do not fit `mode`.
    void validate() const;
    std::string digest() const;
};

struct GeneratedImage {
    Bytes bytes;
    int attempts = 1;
};

class ImageGenerator {
public:
    virtual ~ImageGenerator() = default;
    virtual GeneratedImage generate(const GeneratorRequest& request) = 0;
};

/// Raw search-engine hit, matching the search wire format.
struct SearchHit {
    std::string image_url;
    std::string thumbnail_url;
    int position = 0;
};

struct SearchResponse {
    std::vector<SearchHit> hits;
    int attempts = 1;
};

struct FetchResponse {
    Bytes bytes;
    int attempts = 1;
};

class ImageSearch {
public:
    virtual ~ImageSearch() = default;
    virtual SearchResponse search(const std::string& query, int count) = 0;
    virtual FetchResponse fetch(const std::string& url) = 0;
};

struct SearchCandidate {
    std::string url;
    std::string thumbnail_url;
    std::optional<ImageArtifact> thumbnail;
    std::string query;
    int rank = 0;
};

/// Slot for an external quality or similarity model. Values are clamped to
/// [0,1] by the caller.
class ExternalScorer {
public:
    virtual ~ExternalScorer() = default;
    virtual double score(const ImageArtifact& image, const std::string& prompt) = 0;
};

struct BackendBundle {
    std::shared_ptr<LlmBackend> llm;
    std::shared_ptr<ImageGenerator> generator;
    std::shared_ptr<ImageSearch> search;
    std::shared_ptr<ExternalScorer> semantic_scorer;
    std::shared_ptr<ExternalScorer> aesthetic_scorer;
};

/// Routes every backend call of one iteration through a transcript. Agents
/// receive this instead of raw backends so each call is logged exactly once.
class CallContext {
public:
    CallContext(const BackendBundle& backends, Transcript& transcript, int json_parse_retries)
        : backends_(backends), transcript_(transcript), json_parse_retries_(json_parse_retries) {}

    std::string llm(const LlmRequest& request, const std::string& working_prompt = {});

    /// Sends `request` and feeds the reply to `parse`. A ParseError triggers a
    /// re-ask, at most json_parse_retries times; the last error propagates.
    template <class Parse>
    auto ask_json(const LlmRequest& request, Parse&& parse,
                  const std::string& working_prompt = {}) {
        for (int attempt = 0;; ++attempt) {
            auto reply = llm(request, working_prompt);
            try {
                return parse(reply);
            } catch (const ParseError& e) {
                note(std::string(to_string(request.role)) + " reply rejected (attempt " +
                     std::to_string(attempt + 1) + "): " + e.what());
                if (attempt >= json_parse_retries_) throw;
            }
        }
    }

    GeneratedImage generate(const GeneratorRequest& request);
    std::vector<SearchCandidate> search(const std::string& query, int count,
                                        const std::string& working_prompt = {});
    Bytes fetch(const std::string& url);
    void note(std::string message);

    const BackendBundle& backends() const noexcept { return backends_; }
    Transcript& transcript() noexcept { return transcript_; }
    int json_parse_retries() const noexcept { return json_parse_retries_; }

private:
    const BackendBundle& backends_;
    Transcript& transcript_;
    int json_parse_retries_;
};

}  // namespace w2i
