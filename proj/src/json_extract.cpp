#include "w2i/json_extract.hpp"

#include "w2i/error.hpp"

#include <optional>
#include <vector>

namespace w2i {

namespace {

// Bodies of ``` fenced blocks, in order. An unterminated fence runs to the
// end of the text.
std::vector<std::string_view> fenced_blocks(std::string_view text) {
    std::vector<std::string_view> blocks;
    std::size_t pos = 0;
    while (true) {
        auto open = text.find("```", pos);
        if (open == std::string_view::npos) break;
        auto body = text.find('\n', open + 3);
        if (body == std::string_view::npos) break;
        ++body;
        auto close = text.find("```", body);
        if (close == std::string_view::npos) {
            blocks.push_back(text.substr(body));
            break;
        }
        blocks.push_back(text.substr(body, close - body));
        pos = close + 3;
    }
    return blocks;
}

// End index (inclusive) of the object starting at `start`, or nullopt when the
// braces never balance.
std::optional<std::size_t> balanced_end(std::string_view s, std::size_t start) {
    int depth = 0;
    bool in_string = false;
    bool escaped = false;
    for (std::size_t i = start; i < s.size(); ++i) {
        const char c = s[i];
        if (in_string) {
            if (escaped) escaped = false;
            else if (c == '\\') escaped = true;
            else if (c == '"') in_string = false;
            continue;
        }
        if (c == '"') in_string = true;
        else if (c == '{') ++depth;
        else if (c == '}' && --depth == 0) return i;
    }
    return std::nullopt;
}

struct ScanOutcome {
    std::optional<Json> value;
    bool saw_balanced = false;
    std::string first_error;
};

ScanOutcome scan(std::string_view region) {
    ScanOutcome out;
    std::size_t pos = 0;
    while (true) {
        auto start = region.find('{', pos);
        if (start == std::string_view::npos) return out;
        auto end = balanced_end(region, start);
        if (!end) return out;
        out.saw_balanced = true;
        auto candidate = region.substr(start, *end - start + 1);
        try {
            out.value = Json::parse(candidate);
            return out;
        } catch (const Json::parse_error& e) {
            if (out.first_error.empty()) out.first_error = e.what();
        }
        pos = *end + 1;
    }
}

}  // namespace

Json extract_json_object(std::string_view text) {
    bool saw_balanced = false;
    std::string first_error;
    auto consider = [&](const ScanOutcome& r) {
        saw_balanced = saw_balanced || r.saw_balanced;
        if (first_error.empty()) first_error = r.first_error;
    };

    for (auto block : fenced_blocks(text)) {
        auto r = scan(block);
        if (r.value) return *r.value;
        consider(r);
    }
    auto r = scan(text);
    if (r.value) return *r.value;
    consider(r);

    if (saw_balanced) {
        throw MalformedJson("balanced object failed to parse: " + first_error,
                            std::string(text));
    }
    throw NoJsonFound("no balanced JSON object in reply", std::string(text));
}

}  // namespace w2i
