#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace w2i {

std::string_view trim(std::string_view s);
std::vector<std::string_view> split(std::string_view s, char sep);
std::string to_lower(std::string_view s);

/// Lowercase, non-alphanumerics collapsed to single '-', no leading or
/// trailing '-'. Used for fixture file names.
std::string slugify(std::string_view s);

}  // namespace w2i
