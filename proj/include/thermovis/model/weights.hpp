#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "thermovis/model/unet.hpp"

namespace thermovis {

struct NamedTensor {
    std::vector<int> shape;
    std::vector<float> values;

    bool operator==(const NamedTensor&) const = default;
};

/// Named tensors of one model plus the fingerprint of its config.
///
/// Byte layout (all integers u32 little-endian, floats IEEE-754 binary32 LE):
///
///   "TVWS"  magic
///   version (= 1)
///   fingerprint length, fingerprint bytes (hex sha256 of the canonical config JSON)
///   tensor count
///   per tensor, in model order:
///     name length, name bytes (UTF-8)
///     ndim, dims[ndim]
///     prod(dims) float32 values
///
/// Trailing bytes after the last tensor are rejected.
struct WeightStore {
    static constexpr std::uint32_t kVersion = 1;

    std::uint32_t version = kVersion;
    std::string fingerprint;
    std::vector<std::string> order;
    std::map<std::string, NamedTensor> tensors;

    std::vector<std::uint8_t> serialize() const;
    static WeightStore deserialize(const std::vector<std::uint8_t>& bytes);

    void write(const std::filesystem::path& path) const;
    static WeightStore read(const std::filesystem::path& path);

    bool operator==(const WeightStore&) const = default;
};

WeightStore save_weights(const Model& model);

/// Validates the whole store first; on any error the model is left unchanged.
void load_weights(Model& model, const WeightStore& store);

}  // namespace thermovis
