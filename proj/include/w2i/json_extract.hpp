#pragma once

#include <nlohmann/json.hpp>

#include <string>
#include <string_view>

namespace w2i {

using Json = nlohmann::ordered_json;

/// Pulls the first well-formed top-level JSON object out of a model reply.
///
/// Fenced code blocks are searched first (in order), then the whole text.
/// Within a region, top-level balanced `{...}` spans are tried left to right
/// with a string-aware brace scanner; each span is parsed strictly (no
/// trailing commas, no single quotes, no comments).
///
/// Throws NoJsonFound when no balanced object exists, MalformedJson when at
/// least one balanced span exists but none is valid JSON.
Json extract_json_object(std::string_view text);

}  // namespace w2i
