#include "thermovis/model/image_tensor.hpp"

#include <algorithm>

#include "thermovis/core/error.hpp"

namespace thermovis {

Tensor<float> to_tensor(const std::vector<const Image*>& images) {
    if (images.empty()) throw Error(ErrorCode::invalid_argument, "to_tensor: no images");
    const Image& first = *images.front();
    Tensor<float> t(static_cast<int>(images.size()), first.channels(), first.height(), first.width());
    for (std::size_t i = 0; i < images.size(); ++i) {
        const Image& img = *images[i];
        if (img.width() != first.width() || img.height() != first.height() ||
            img.channels() != first.channels()) {
            throw Error(ErrorCode::shape_mismatch, "to_tensor: images differ in shape");
        }
        std::copy(img.values().begin(), img.values().end(), t.image(static_cast<int>(i)));
    }
    return t;
}

Tensor<float> to_tensor(const Image& image) { return to_tensor(std::vector<const Image*>{&image}); }

Image to_image(const Tensor<float>& batch, int index) {
    if (index < 0 || index >= batch.shape.n) throw Error(ErrorCode::invalid_argument, "to_image: index out of range");
    const float* p = batch.image(index);
    return Image(batch.shape.w, batch.shape.h, batch.shape.c, std::vector<float>(p, p + batch.image_size()));
}

}  // namespace thermovis
