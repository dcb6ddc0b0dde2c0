#pragma once

#include "thermovis/imaging/image.hpp"

namespace thermovis {

// All kernels treat out-of-range taps by replicating the nearest edge pixel
// and return a new image; inputs are never modified.

/// Rec. 601 luminance, 0.299 R + 0.587 G + 0.114 B. 1-channel input is returned unchanged.
Image to_grayscale(const Image& img);

/// Replicates a 1-channel image into `channels` identical planes.
Image expand_channels(const Image& img, int channels);

/// k x k box average per channel; k must be odd and positive.
Image mean_filter(const Image& img, int k = 3);

/// Normalized sampled Gaussian with radius ceil(3 sigma), applied separably.
Image gaussian_blur(const Image& img, double sigma);

/// blur(sigma_inner) - blur(sigma_outer) on a 1-channel image, not rescaled.
Image dog_response(const Image& img, double sigma_inner, double sigma_outer);

/// dog_response followed by min_max_rescale.
Image dog_filter(const Image& img, double sigma_inner = 1.0, double sigma_outer = 2.0);

/// Affine map of the image range onto [0, 1]; a flat image maps to 0.5.
Image min_max_rescale(const Image& img);

/// Bilinear resampling with half-pixel centres (align_corners = false):
/// output pixel x samples source position (x + 0.5) * in_w / out_w - 0.5,
/// clamped to the valid range.
Image resize_bilinear(const Image& img, int out_w, int out_h);

/// Down to low x low and back up to out x out (112 and 224 by default).
Image degrade_resolution(const Image& img, int low = 112, int out = 224);

}  // namespace thermovis
