#pragma once

#include <string>
#include <vector>

namespace w2i {

/// One backend call (or an engine note) inside an iteration.
struct TranscriptEntry {
    std::string role;  // llm role tag, "generator", "search", "fetch", or "note"
    std::string request_digest;
    std::string response_digest;
    int attempts = 1;
    /// Working prompt the calling agent was operating on, when relevant.
    std::string prompt;
    std::string note;
    bool ok = true;
};

using Transcript = std::vector<TranscriptEntry>;

}  // namespace w2i
