#include "thermovis/core/hash.hpp"

#include <array>
#include <cstdio>

#include <openssl/sha.h>

namespace thermovis {

std::string sha256_hex(std::span<const std::uint8_t> bytes) {
    std::array<unsigned char, SHA256_DIGEST_LENGTH> digest{};
    SHA256(bytes.data(), bytes.size(), digest.data());
    std::string hex;
    hex.reserve(digest.size() * 2);
    char buf[3];
    for (unsigned char b : digest) {
        std::snprintf(buf, sizeof(buf), "%02x", b);
        hex += buf;
    }
    return hex;
}

std::string sha256_hex(std::string_view text) {
    return sha256_hex(std::span<const std::uint8_t>(
        reinterpret_cast<const std::uint8_t*>(text.data()), text.size()));
}

std::string canonical_json(const nlohmann::json& doc) {
    // nlohmann::json objects are std::map backed, so keys are already sorted.
    return doc.dump();
}

std::string short_hash(const nlohmann::json& doc) {
    return sha256_hex(canonical_json(doc)).substr(0, 16);
}

}  // namespace thermovis
