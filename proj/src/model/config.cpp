#include "thermovis/model/config.hpp"

#include "thermovis/core/error.hpp"
#include "thermovis/core/hash.hpp"

namespace thermovis {

std::string_view to_string(DecoderVariant v) {
    return v == DecoderVariant::bilinear ? "bilinear" : "upconv";
}

DecoderVariant parse_decoder_variant(std::string_view text) {
    if (text == "bilinear") return DecoderVariant::bilinear;
    if (text == "upconv") return DecoderVariant::upconv;
    throw Error(ErrorCode::config_error, "unknown decoder variant '" + std::string(text) + "'");
}

void ModelConfig::validate() const {
    auto fail = [](const std::string& msg) { throw Error(ErrorCode::config_error, "model config: " + msg); };
    if (input_channels != 1 && input_channels != 3) fail("input_channels must be 1 or 3");
    if (output_channels < 1) fail("output_channels must be positive");
    if (encoder_channels.empty()) fail("encoder_channels must not be empty");
    for (int c : encoder_channels) {
        if (c < 1) fail("encoder widths must be positive");
    }
    if (bottleneck_channels < 1) fail("bottleneck_channels must be positive");
    if (conv_kernel < 1 || conv_kernel % 2 == 0) fail("conv_kernel must be odd and positive");
    if (pool_window != 2) fail("only a pooling window of 2 is supported");
    if (stages() > 16) fail("too many stages");
    const int factor = 1 << stages();
    if (input_size < factor || input_size % factor != 0) {
        fail("input_size " + std::to_string(input_size) + " is not divisible by 2^" +
             std::to_string(stages()));
    }
}

nlohmann::json ModelConfig::to_json() const {
    return {{"input_size", input_size},
            {"input_channels", input_channels},
            {"output_channels", output_channels},
            {"encoder_channels", encoder_channels},
            {"bottleneck_channels", bottleneck_channels},
            {"decoder_variant", std::string(to_string(decoder_variant))},
            {"use_skip_connections", use_skip_connections},
            {"conv_kernel", conv_kernel},
            {"pool_window", pool_window}};
}

ModelConfig ModelConfig::from_json(const nlohmann::json& j) {
    ModelConfig c;
    try {
        c.input_size = j.value("input_size", c.input_size);
        c.input_channels = j.value("input_channels", c.input_channels);
        c.output_channels = j.value("output_channels", c.output_channels);
        c.encoder_channels = j.value("encoder_channels", c.encoder_channels);
        c.bottleneck_channels = j.value("bottleneck_channels", c.bottleneck_channels);
        c.decoder_variant = parse_decoder_variant(j.value("decoder_variant", std::string("upconv")));
        c.use_skip_connections = j.value("use_skip_connections", c.use_skip_connections);
        c.conv_kernel = j.value("conv_kernel", c.conv_kernel);
        c.pool_window = j.value("pool_window", c.pool_window);
    } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorCode::config_error, std::string("model config: ") + e.what());
    }
    return c;
}

std::string ModelConfig::fingerprint() const {
    return sha256_hex(canonical_json(to_json()));
}

}  // namespace thermovis
