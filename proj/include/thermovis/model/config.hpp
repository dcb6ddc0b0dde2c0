#pragma once

#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

namespace thermovis {

enum class DecoderVariant { bilinear, upconv };

std::string_view to_string(DecoderVariant v);
DecoderVariant parse_decoder_variant(std::string_view text);

/// U-Net style encoder/decoder. Each encoder stage halves the resolution,
/// so the bottleneck is input_size / 2^stages pixels wide (224 -> 14 for the
/// default four stages). Decoder stage widths mirror the encoder.
struct ModelConfig {
    int input_size = 224;
    int input_channels = 3;
    int output_channels = 1;
    std::vector<int> encoder_channels = {64, 128, 256, 512};
    int bottleneck_channels = 512;
    DecoderVariant decoder_variant = DecoderVariant::upconv;
    bool use_skip_connections = true;
    int conv_kernel = 3;
    int pool_window = 2;

    /// Throws ErrorCode::config_error on an unusable configuration.
    void validate() const;
    int stages() const { return static_cast<int>(encoder_channels.size()); }
    int bottleneck_size() const { return input_size >> stages(); }

    nlohmann::json to_json() const;
    static ModelConfig from_json(const nlohmann::json& j);
    /// sha256 of the canonical JSON form.
    std::string fingerprint() const;

    bool operator==(const ModelConfig&) const = default;
};

}  // namespace thermovis
