#include "w2i/backend.hpp"

namespace w2i {

std::string_view to_string(LlmRole role) {
    switch (role) {
        case LlmRole::orchestrator: return "orchestrator";
        case LlmRole::prompt_optimizer: return "prompt_optimizer";
        case LlmRole::retriever_selector: return "retriever_selector";
        case LlmRole::query_rewriter: return "query_rewriter";
        case LlmRole::visual_analyst: return "visual_analyst";
        case LlmRole::keyword_extractor: return "keyword_extractor";
        case LlmRole::keyword_grader: return "keyword_grader";
        case LlmRole::grader: return "grader";
    }
    return "orchestrator";
}

std::optional<LlmRole> parse_llm_role(std::string_view text) {
    for (auto r : kAllLlmRoles) {
        if (to_string(r) == text) return r;
    }
    return std::nullopt;
}

double default_temperature(LlmRole role) {
    switch (role) {
        case LlmRole::orchestrator:
        case LlmRole::prompt_optimizer:
        case LlmRole::query_rewriter:
            return 0.7;
        default:
            return 0.0;
    }
}

LlmRequest LlmRequest::make(LlmRole role, std::string text,
                            std::vector<ImageArtifact> attachments) {
    LlmRequest r;
    r.role = role;
    r.text = std::move(text);
    r.image_attachments = std::move(attachments);
    r.temperature = default_temperature(role);
    r.max_output_tokens = role == LlmRole::query_rewriter ? 64 : 2048;
    return r;
}

std::string LlmRequest::digest() const {
    std::string material;
    material += to_string(role);
    material += '\n';
    material += text;
    for (const auto& img : image_attachments) {
        material += '\n';
        material += img.id();
    }
    return sha256_hex(material);
}

void GeneratorRequest::validate() const {
    const auto n = positional_images.size();
    switch (mode) {
        case TaskType::text_to_image:
            if (n != 0) throw ModeError("text_to_image takes no positional images");
            break;
        case TaskType::text_image_to_image:
            if (n < 1 || n > 2) throw ModeError("text_image_to_image takes 1-2 positional images");
            break;
        case TaskType::image_editing_with_prompt:
            if (n != 1) throw ModeError("image_editing_with_prompt takes exactly 1 positional image");
            break;
        case TaskType::image_editing_with_prompt_and_reference:
            if (n != 2) {
                throw ModeError(
                    "image_editing_with_prompt_and_reference takes exactly 2 positional images");
            }
            break;
    }
    if (prompt.empty()) throw ModeError("generator prompt is empty");
}

std::string GeneratorRequest::digest() const {
    std::string material;
    material += to_string(mode);
    material += '\n';
    material += prompt;
    material += '\n';
    material += negative_prompt;
    for (const auto& img : positional_images) {
        material += '\n';
        material += img.id();
    }
    material += '\n';
    material += std::to_string(seed);
    return sha256_hex(material);
}

std::string CallContext::llm(const LlmRequest& request, const std::string& working_prompt) {
    if (!backends_.llm) throw FatalBackendError("no LLM backend configured");
    TranscriptEntry entry;
    entry.role = std::string(to_string(request.role));
    entry.request_digest = request.digest();
    entry.prompt = working_prompt;
    try {
        auto response = backends_.llm->complete(request);
        entry.response_digest = sha256_hex(response.text);
        entry.attempts = response.attempts;
        transcript_.push_back(std::move(entry));
        return std::move(response.text);
    } catch (const std::exception& e) {
        entry.ok = false;
        entry.note = e.what();
        transcript_.push_back(std::move(entry));
        throw;
    }
}

GeneratedImage CallContext::generate(const GeneratorRequest& request) {
    request.validate();
    if (!backends_.generator) throw FatalBackendError("no generator backend configured");
    TranscriptEntry entry;
    entry.role = "generator";
    entry.request_digest = request.digest();
    entry.prompt = request.prompt;
    try {
        auto out = backends_.generator->generate(request);
        entry.response_digest = sha256_hex(out.bytes);
        entry.attempts = out.attempts;
        transcript_.push_back(std::move(entry));
        return out;
    } catch (const std::exception& e) {
        entry.ok = false;
        entry.note = e.what();
        transcript_.push_back(std::move(entry));
        throw;
    }
}

std::vector<SearchCandidate> CallContext::search(const std::string& query, int count,
                                                 const std::string& working_prompt) {
    if (query.empty()) throw ContractViolation("search query is empty");
    if (count < 1) throw ContractViolation("search count must be >= 1");
    if (!backends_.search) throw FatalBackendError("no search backend configured");
    TranscriptEntry entry;
    entry.role = "search";
    entry.request_digest = sha256_hex(query + "\n" + std::to_string(count));
    entry.prompt = working_prompt;
    entry.note = "query: " + query;
    try {
        auto resp = backends_.search->search(query, count);
        std::string material;
        std::vector<SearchCandidate> out;
        int rank = 0;
        for (auto& hit : resp.hits) {
            if (hit.image_url.empty()) continue;
            material += hit.image_url + "\n";
            SearchCandidate c;
            c.url = hit.image_url;
            c.thumbnail_url = hit.thumbnail_url.empty() ? hit.image_url : hit.thumbnail_url;
            c.query = query;
            c.rank = rank++;
            out.push_back(std::move(c));
            if (static_cast<int>(out.size()) >= count) break;
        }
        entry.response_digest = sha256_hex(material);
        entry.attempts = resp.attempts;
        entry.note += " (" + std::to_string(out.size()) + " results)";
        transcript_.push_back(std::move(entry));
        return out;
    } catch (const std::exception& e) {
        entry.ok = false;
        entry.note += std::string(" failed: ") + e.what();
        transcript_.push_back(std::move(entry));
        throw;
    }
}

Bytes CallContext::fetch(const std::string& url) {
    if (!backends_.search) throw FatalBackendError("no search backend configured");
    TranscriptEntry entry;
    entry.role = "fetch";
    entry.request_digest = sha256_hex(url);
    entry.note = url;
    try {
        auto resp = backends_.search->fetch(url);
        entry.response_digest = sha256_hex(resp.bytes);
        entry.attempts = resp.attempts;
        transcript_.push_back(std::move(entry));
        return std::move(resp.bytes);
    } catch (const std::exception& e) {
        entry.ok = false;
        entry.note += std::string(" failed: ") + e.what();
        transcript_.push_back(std::move(entry));
        throw;
    }
}

void CallContext::note(std::string message) {
    TranscriptEntry entry;
    entry.role = "note";
    entry.attempts = 0;
    entry.note = std::move(message);
    transcript_.push_back(std::move(entry));
}

}  // namespace w2i
