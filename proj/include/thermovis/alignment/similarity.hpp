#pragma once

#include "thermovis/alignment/landmarks.hpp"
#include "thermovis/imaging/image.hpp"

namespace thermovis {

/// p' = scale * R(rotation) * p + (tx, ty). Reflections are not representable.
struct SimilarityTransform {
    double scale = 1.0;
    double rotation = 0.0;  // radians, counter-clockwise in x-right / y-down pixel space
    double tx = 0.0;
    double ty = 0.0;

    Point2 apply(Point2 p) const;
    SimilarityTransform inverse() const;
    /// (*this) after `first`: x -> this(first(x)).
    SimilarityTransform compose(const SimilarityTransform& first) const;
    LandmarkSet apply(const LandmarkSet& lm) const;
};

/// Closed-form least-squares similarity mapping src onto dst.
/// Throws ErrorCode::singular_configuration for coincident or collinear src.
SimilarityTransform estimate_similarity(const LandmarkSet& src, const LandmarkSet& dst);

/// Root-mean-square distance between t(src) and dst.
double landmark_rms(const SimilarityTransform& t, const LandmarkSet& src, const LandmarkSet& dst);

/// Inverse-mapped bilinear warp; samples outside the source replicate its edge.
Image warp_image(const Image& img, const SimilarityTransform& t, int out_w, int out_h);

/// estimate_similarity(lm -> tmpl) followed by warp_image.
Image align_face(const Image& img, const LandmarkSet& lm, const LandmarkSet& tmpl,
                 int out_w = 224, int out_h = 224);

}  // namespace thermovis
