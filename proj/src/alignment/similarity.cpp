#include "thermovis/alignment/similarity.hpp"

#include <algorithm>
#include <cmath>

#include "thermovis/core/error.hpp"

namespace thermovis {

Point2 SimilarityTransform::apply(Point2 p) const {
    const double c = scale * std::cos(rotation);
    const double s = scale * std::sin(rotation);
    return {c * p.x - s * p.y + tx, s * p.x + c * p.y + ty};
}

SimilarityTransform SimilarityTransform::inverse() const {
    SimilarityTransform inv;
    inv.scale = 1.0 / scale;
    inv.rotation = -rotation;
    const Point2 t = SimilarityTransform{inv.scale, inv.rotation, 0.0, 0.0}.apply(Point2{tx, ty});
    inv.tx = -t.x;
    inv.ty = -t.y;
    return inv;
}

SimilarityTransform SimilarityTransform::compose(const SimilarityTransform& first) const {
    SimilarityTransform out;
    out.scale = scale * first.scale;
    out.rotation = rotation + first.rotation;
    const Point2 t = apply(Point2{first.tx, first.ty});
    out.tx = t.x;
    out.ty = t.y;
    return out;
}

LandmarkSet SimilarityTransform::apply(const LandmarkSet& lm) const {
    LandmarkSet out;
    for (std::size_t i = 0; i < kLandmarkCount; ++i) out.points[i] = apply(lm.points[i]);
    return out;
}

SimilarityTransform estimate_similarity(const LandmarkSet& src, const LandmarkSet& dst) {
    if (!src.all_finite() || !dst.all_finite()) {
        throw Error(ErrorCode::invalid_argument, "estimate_similarity: non-finite landmark");
    }
    constexpr double n = static_cast<double>(kLandmarkCount);
    Point2 ms, md;
    for (std::size_t i = 0; i < kLandmarkCount; ++i) {
        ms.x += src.points[i].x / n;
        ms.y += src.points[i].y / n;
        md.x += dst.points[i].x / n;
        md.y += dst.points[i].y / n;
    }

    double sxx = 0, syy = 0, sxy = 0, a = 0, b = 0;
    for (std::size_t i = 0; i < kLandmarkCount; ++i) {
        const double px = src.points[i].x - ms.x;
        const double py = src.points[i].y - ms.y;
        const double qx = dst.points[i].x - md.x;
        const double qy = dst.points[i].y - md.y;
        sxx += px * px;
        syy += py * py;
        sxy += px * py;
        a += px * qx + py * qy;
        b += px * qy - py * qx;
    }

    // Smallest vs largest eigenvalue of the source scatter matrix.
    const double half_trace = 0.5 * (sxx + syy);
    const double spread = std::sqrt(0.25 * (sxx - syy) * (sxx - syy) + sxy * sxy);
    const double lambda_max = half_trace + spread;
    const double lambda_min = half_trace - spread;
    if (!(lambda_max > 1e-12) || lambda_min <= 1e-10 * lambda_max) {
        throw Error(ErrorCode::singular_configuration,
                    "estimate_similarity: source landmarks are coincident or collinear");
    }

    const double norm = sxx + syy;
    const double c = a / norm;
    const double s = b / norm;
    SimilarityTransform t;
    t.scale = std::hypot(c, s);
    if (!(t.scale > 0.0)) {
        throw Error(ErrorCode::singular_configuration,
                    "estimate_similarity: destination landmarks are coincident");
    }
    t.rotation = std::atan2(s, c);
    t.tx = md.x - (c * ms.x - s * ms.y);
    t.ty = md.y - (s * ms.x + c * ms.y);
    return t;
}

double landmark_rms(const SimilarityTransform& t, const LandmarkSet& src, const LandmarkSet& dst) {
    double acc = 0.0;
    for (std::size_t i = 0; i < kLandmarkCount; ++i) {
        const Point2 p = t.apply(src.points[i]);
        const double dx = p.x - dst.points[i].x;
        const double dy = p.y - dst.points[i].y;
        acc += dx * dx + dy * dy;
    }
    return std::sqrt(acc / kLandmarkCount);
}

Image warp_image(const Image& img, const SimilarityTransform& t, int out_w, int out_h) {
    if (!(t.scale > 0.0) || !std::isfinite(t.scale) || !std::isfinite(t.rotation) ||
        !std::isfinite(t.tx) || !std::isfinite(t.ty)) {
        throw Error(ErrorCode::invalid_argument, "warp_image: transform is not invertible");
    }
    if (out_w < 1 || out_h < 1) {
        throw Error(ErrorCode::invalid_argument, "warp_image: output size must be positive");
    }
    if (img.width() < 1 || img.height() < 1) {
        throw Error(ErrorCode::invalid_argument, "warp_image: empty source image");
    }
    const SimilarityTransform inv = t.inverse();
    const double c = inv.scale * std::cos(inv.rotation);
    const double s = inv.scale * std::sin(inv.rotation);
    const int w = img.width();
    const int h = img.height();

    Image out(out_w, out_h, img.channels());
    for (int y = 0; y < out_h; ++y) {
        for (int x = 0; x < out_w; ++x) {
            const double sx = std::clamp(c * x - s * y + inv.tx, 0.0, static_cast<double>(w - 1));
            const double sy = std::clamp(s * x + c * y + inv.ty, 0.0, static_cast<double>(h - 1));
            const int x0 = static_cast<int>(std::floor(sx));
            const int y0 = static_cast<int>(std::floor(sy));
            const int x1 = std::min(x0 + 1, w - 1);
            const int y1 = std::min(y0 + 1, h - 1);
            const double fx = sx - x0;
            const double fy = sy - y0;
            for (int ch = 0; ch < img.channels(); ++ch) {
                const double top = img.at(ch, y0, x0) + fx * (img.at(ch, y0, x1) - img.at(ch, y0, x0));
                const double bot = img.at(ch, y1, x0) + fx * (img.at(ch, y1, x1) - img.at(ch, y1, x0));
                out.at(ch, y, x) = static_cast<float>(top + fy * (bot - top));
            }
        }
    }
    return out;
}

Image align_face(const Image& img, const LandmarkSet& lm, const LandmarkSet& tmpl, int out_w,
                 int out_h) {
    return warp_image(img, estimate_similarity(lm, tmpl), out_w, out_h);
}

}  // namespace thermovis
