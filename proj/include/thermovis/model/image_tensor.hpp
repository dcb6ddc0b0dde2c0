#pragma once

#include <vector>

#include "thermovis/imaging/image.hpp"
#include "thermovis/model/tensor.hpp"

namespace thermovis {

/// Packs equally sized images into one N x C x H x W batch.
Tensor<float> to_tensor(const std::vector<const Image*>& images);
Tensor<float> to_tensor(const Image& image);

/// Image `index` of a batch.
Image to_image(const Tensor<float>& batch, int index = 0);

}  // namespace thermovis
