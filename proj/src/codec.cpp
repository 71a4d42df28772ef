#include "w2i/codec.hpp"

#include <openssl/evp.h>
#include <openssl/sha.h>
#include <zlib.h>

#include <array>
#include <stdexcept>

namespace w2i {

namespace {

void put_u32_be(Bytes& out, std::uint32_t v) {
    out.push_back(static_cast<std::uint8_t>(v >> 24));
    out.push_back(static_cast<std::uint8_t>(v >> 16));
    out.push_back(static_cast<std::uint8_t>(v >> 8));
    out.push_back(static_cast<std::uint8_t>(v));
}

void put_chunk(Bytes& out, const char (&type)[5], const Bytes& payload) {
    put_u32_be(out, static_cast<std::uint32_t>(payload.size()));
    const auto type_start = out.size();
    out.insert(out.end(), type, type + 4);
    out.insert(out.end(), payload.begin(), payload.end());
    const auto crc = crc32(0L, out.data() + type_start,
                           static_cast<uInt>(out.size() - type_start));
    put_u32_be(out, static_cast<std::uint32_t>(crc));
}

}  // namespace

std::string sha256_hex(std::span<const std::uint8_t> data) {
    std::array<unsigned char, SHA256_DIGEST_LENGTH> digest{};
    SHA256(data.data(), data.size(), digest.data());
    static constexpr char kHex[] = "0123456789abcdef";
    std::string out;
    out.reserve(digest.size() * 2);
    for (auto b : digest) {
        out.push_back(kHex[b >> 4]);
        out.push_back(kHex[b & 0x0f]);
    }
    return out;
}

std::string sha256_hex(std::string_view text) {
    return sha256_hex(std::span<const std::uint8_t>(
        reinterpret_cast<const std::uint8_t*>(text.data()), text.size()));
}

std::string base64_encode(std::span<const std::uint8_t> data) {
    if (data.empty()) return {};
    std::string out(4 * ((data.size() + 2) / 3), '\0');
    const int n = EVP_EncodeBlock(reinterpret_cast<unsigned char*>(out.data()),
                                  data.data(), static_cast<int>(data.size()));
    out.resize(static_cast<std::size_t>(n));
    return out;
}

Bytes base64_decode(std::string_view text) {
    std::string clean;
    clean.reserve(text.size());
    for (char c : text) {
        if (c != '\n' && c != '\r' && c != ' ') clean.push_back(c);
    }
    if (clean.empty()) return {};
    if (clean.size() % 4 != 0) throw std::invalid_argument("base64: bad length");
    Bytes out(3 * clean.size() / 4);
    const int n = EVP_DecodeBlock(out.data(),
                                  reinterpret_cast<const unsigned char*>(clean.data()),
                                  static_cast<int>(clean.size()));
    if (n < 0) throw std::invalid_argument("base64: bad input");
    std::size_t pad = 0;
    if (clean.ends_with("==")) pad = 2;
    else if (clean.ends_with('=')) pad = 1;
    out.resize(static_cast<std::size_t>(n) - pad);
    return out;
}

Bytes encode_png_rgb(std::uint32_t width, std::uint32_t height,
                     std::span<const std::uint8_t> rgb) {
    if (rgb.size() != static_cast<std::size_t>(width) * height * 3) {
        throw std::invalid_argument("encode_png_rgb: raster size mismatch");
    }
    Bytes out = {0x89, 'P', 'N', 'G', '\r', '\n', 0x1a, '\n'};

    Bytes ihdr;
    put_u32_be(ihdr, width);
    put_u32_be(ihdr, height);
    ihdr.insert(ihdr.end(), {8, 2, 0, 0, 0});  // 8-bit, truecolor, no interlace
    put_chunk(out, "IHDR", ihdr);

    Bytes raw;
    raw.reserve((width * 3 + 1) * height);
    for (std::uint32_t y = 0; y < height; ++y) {
        raw.push_back(0);  // filter: none
        auto row = rgb.subspan(static_cast<std::size_t>(y) * width * 3, width * 3);
        raw.insert(raw.end(), row.begin(), row.end());
    }
    uLongf packed_len = compressBound(static_cast<uLong>(raw.size()));
    Bytes packed(packed_len);
    if (compress2(packed.data(), &packed_len, raw.data(),
                  static_cast<uLong>(raw.size()), Z_BEST_COMPRESSION) != Z_OK) {
        throw std::runtime_error("encode_png_rgb: deflate failed");
    }
    packed.resize(packed_len);
    put_chunk(out, "IDAT", packed);
    put_chunk(out, "IEND", {});
    return out;
}

std::string sniff_image_extension(std::span<const std::uint8_t> d) {
    auto starts = [&](std::initializer_list<std::uint8_t> sig, std::size_t at = 0) {
        if (d.size() < at + sig.size()) return false;
        std::size_t i = at;
        for (auto b : sig) {
            if (d[i++] != b) return false;
        }
        return true;
    };
    if (starts({0x89, 'P', 'N', 'G'})) return "png";
    if (starts({0xff, 0xd8, 0xff})) return "jpg";
    if (starts({'G', 'I', 'F', '8'})) return "gif";
    if (starts({'R', 'I', 'F', 'F'}) && starts({'W', 'E', 'B', 'P'}, 8)) return "webp";
    return "bin";
}

std::string mime_for_extension(std::string_view ext) {
    if (ext == "png") return "image/png";
    if (ext == "jpg") return "image/jpeg";
    if (ext == "gif") return "image/gif";
    if (ext == "webp") return "image/webp";
    return "application/octet-stream";
}

}  // namespace w2i
