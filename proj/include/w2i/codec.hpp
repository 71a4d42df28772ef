#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace w2i {

using Bytes = std::vector<std::uint8_t>;

/// Lowercase hex SHA-256 (64 chars).
std::string sha256_hex(std::span<const std::uint8_t> data);
std::string sha256_hex(std::string_view text);

std::string base64_encode(std::span<const std::uint8_t> data);
Bytes base64_decode(std::string_view text);

/// Encodes an 8-bit RGB raster as a PNG file. `rgb.size()` must equal
/// width * height * 3.
Bytes encode_png_rgb(std::uint32_t width, std::uint32_t height,
                     std::span<const std::uint8_t> rgb);

/// File extension guessed from magic bytes ("png", "jpg", "gif", "webp",
/// or "bin").
std::string sniff_image_extension(std::span<const std::uint8_t> data);

std::string mime_for_extension(std::string_view ext);

}  // namespace w2i
