#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <string_view>

#include <json.hpp>

namespace thermovis {

std::string sha256_hex(std::span<const std::uint8_t> bytes);
std::string sha256_hex(std::string_view text);

/// Compact JSON with lexicographically sorted keys. Two equal documents
/// always serialize to the same bytes.
std::string canonical_json(const nlohmann::json& doc);

/// First 16 hex digits of sha256(canonical_json(doc)).
std::string short_hash(const nlohmann::json& doc);

}  // namespace thermovis
