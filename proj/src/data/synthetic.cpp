#include "thermovis/data/synthetic.hpp"

#include <array>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numbers>

#include "thermovis/alignment/similarity.hpp"
#include "thermovis/core/error.hpp"
#include "thermovis/core/random.hpp"
#include "thermovis/imaging/filters.hpp"
#include "thermovis/imaging/io.hpp"

namespace thermovis {

namespace fs = std::filesystem;

namespace {

using Rgb = std::array<double, 3>;

struct Blob {
    double x, y, sigma, amp;
};

struct Mark {
    double x, y, radius, amp;
};

// Geometry is expressed in a 224 x 224 canonical frame.
struct SubjectTraits {
    double cx, cy, ax, ay;
    Rgb skin, hair, lips;
    double hairline, hair_wave, hair_phase;
    double eye_y, eye_gap, eye_w, eye_h;
    double brow_offset, brow_thick;
    double mouth_y, mouth_half, mouth_thick;
    double nose_w, nose_depth;
    std::array<Blob, 6> blobs;
    std::array<Mark, 14> marks;  // sharp-edged spots that survive band-pass filtering
    LandmarkSet landmarks;
};

struct Nuisance {
    SimilarityTransform to_image;  // canonical -> output pixels
    double gain, offset, background;
    std::uint64_t noise_seed;
};

// Soft inside-indicator for a signed distance (negative inside).
double soft_inside(double d) { return 1.0 / (1.0 + std::exp(d / 0.75)); }

double ellipse_distance(double x, double y, double cx, double cy, double ax, double ay) {
    const double r = std::hypot((x - cx) / ax, (y - cy) / ay);
    return (r - 1.0) * std::min(ax, ay);
}

SubjectTraits make_traits(std::uint64_t seed, int subject) {
    Rng rng(mix_seed(seed, 1000 + static_cast<std::uint64_t>(subject)));
    SubjectTraits t{};
    t.cx = 112.0 + rng.uniform(-4, 4);
    t.cy = 122.0 + rng.uniform(-4, 4);
    t.ax = rng.uniform(62, 80);
    t.ay = rng.uniform(84, 100);
    const double tone = rng.uniform(0.40, 0.80);
    t.skin = {tone + rng.uniform(0.05, 0.15), tone, tone - rng.uniform(0.05, 0.15)};
    const double h = rng.uniform(0.05, 0.35);
    t.hair = {h + rng.uniform(0.0, 0.1), h, h * rng.uniform(0.6, 1.0)};
    t.lips = {rng.uniform(0.5, 0.75), rng.uniform(0.15, 0.35), rng.uniform(0.15, 0.35)};
    t.hairline = t.cy - t.ay + rng.uniform(14, 40);
    t.hair_wave = rng.uniform(0, 8);
    t.hair_phase = rng.uniform(0, 2 * std::numbers::pi);
    t.eye_y = rng.uniform(86, 92);
    t.eye_gap = rng.uniform(69, 76);
    t.eye_w = rng.uniform(26, 30.5);
    t.eye_h = rng.uniform(6, 11);
    t.brow_offset = rng.uniform(10, 18);
    t.brow_thick = rng.uniform(3, 7);
    t.mouth_y = t.eye_y + rng.uniform(76, 84);
    t.mouth_half = rng.uniform(31, 37);
    t.mouth_thick = rng.uniform(5, 10);
    t.nose_w = rng.uniform(6, 14);
    t.nose_depth = rng.uniform(0.05, 0.2);
    for (auto& b : t.blobs) {
        b.x = t.cx + rng.uniform(-0.8, 0.8) * t.ax;
        b.y = t.cy + rng.uniform(-0.7, 0.8) * t.ay;
        b.sigma = rng.uniform(7, 18);
        b.amp = rng.uniform(-0.2, 0.2);
    }
    for (auto& m : t.marks) {
        m.x = t.cx + rng.uniform(-0.75, 0.75) * t.ax;
        m.y = t.cy + rng.uniform(-0.55, 0.75) * t.ay;
        m.radius = rng.uniform(2.5, 6.0);
        m.amp = (rng.uniform(0, 1) < 0.5 ? -1.0 : 1.0) * rng.uniform(0.15, 0.3);
    }

    const double left = t.cx - 0.5 * t.eye_gap;
    const double right = t.cx + 0.5 * t.eye_gap;
    t.landmarks[Landmark::left_eye_outer] = {left - 0.5 * t.eye_w, t.eye_y};
    t.landmarks[Landmark::left_eye_inner] = {left + 0.5 * t.eye_w, t.eye_y};
    t.landmarks[Landmark::right_eye_inner] = {right - 0.5 * t.eye_w, t.eye_y};
    t.landmarks[Landmark::right_eye_outer] = {right + 0.5 * t.eye_w, t.eye_y};
    t.landmarks[Landmark::mouth_left] = {t.cx - t.mouth_half, t.mouth_y};
    t.landmarks[Landmark::mouth_right] = {t.cx + t.mouth_half, t.mouth_y};
    return t;
}

Nuisance make_nuisance(const SyntheticConfig& cfg, int subject, int index) {
    Rng rng(mix_seed(mix_seed(cfg.seed, static_cast<std::uint64_t>(subject)),
                     5000 + static_cast<std::uint64_t>(index)));
    const double unit = cfg.size / 224.0;
    const double angle = rng.uniform(-5.0, 5.0) * std::numbers::pi / 180.0;
    const double scale = rng.uniform(0.95, 1.05) * unit;
    const double shift_x = rng.uniform(-6, 6) * unit;
    const double shift_y = rng.uniform(-6, 6) * unit;

    // Rotate/scale about the canonical centre, then map to output pixels.
    SimilarityTransform to_center{1.0, 0.0, -112.0, -112.0};
    SimilarityTransform spin{scale, angle, 0.5 * cfg.size + shift_x, 0.5 * cfg.size + shift_y};
    Nuisance n{};
    n.to_image = spin.compose(to_center);
    n.gain = rng.uniform(0.85, 1.15);
    n.offset = rng.uniform(-0.04, 0.04);
    n.background = rng.uniform(0.15, 0.40);
    n.noise_seed = rng.next_u64();
    return n;
}

Rgb shade(const SubjectTraits& t, double background, double x, double y) {
    Rgb bg = {background * 0.9, background * 0.95, background};
    for (auto& c : bg) c += 0.1 * (y / 224.0);

    // Face: skin, identity blobs, nose ridge, falloff towards the rim.
    const double face_d = ellipse_distance(x, y, t.cx, t.cy, t.ax, t.ay);
    const double face = soft_inside(face_d);
    double detail = 0.0;
    for (const auto& b : t.blobs) {
        const double dx = x - b.x, dy = y - b.y;
        detail += b.amp * std::exp(-(dx * dx + dy * dy) / (2 * b.sigma * b.sigma));
    }
    for (const auto& m : t.marks) {
        detail += m.amp * soft_inside(std::hypot(x - m.x, y - m.y) - m.radius);
    }
    const double r2 = std::pow((x - t.cx) / t.ax, 2) + std::pow((y - t.cy) / t.ay, 2);
    detail -= 0.12 * r2;
    if (y > t.eye_y + 8 && y < t.mouth_y - 12) {
        detail -= t.nose_depth * soft_inside(std::abs(x - t.cx) - 0.5 * t.nose_w);
    }
    Rgb color;
    for (int c = 0; c < 3; ++c) color[c] = t.skin[c] + detail;

    // Hair cap above a wavy hairline.
    const double line = t.hairline + t.hair_wave * std::sin(x / 14.0 + t.hair_phase);
    const double hair = soft_inside(ellipse_distance(x, y, t.cx, t.cy - 4, t.ax * 1.08, t.ay * 1.06)) *
                        soft_inside(y - line);

    // Eyebrows, eyes, mouth.
    double brow = 0.0;
    for (double ex : {t.cx - 0.5 * t.eye_gap, t.cx + 0.5 * t.eye_gap}) {
        const double by = t.eye_y - t.brow_offset;
        brow = std::max(brow, soft_inside(std::abs(y - by) - 0.5 * t.brow_thick) *
                                  soft_inside(std::abs(x - ex) - 0.6 * t.eye_w));
    }
    double sclera = 0.0, iris = 0.0;
    for (double ex : {t.cx - 0.5 * t.eye_gap, t.cx + 0.5 * t.eye_gap}) {
        sclera = std::max(sclera, soft_inside(ellipse_distance(x, y, ex, t.eye_y, 0.5 * t.eye_w, 0.5 * t.eye_h)));
        iris = std::max(iris, soft_inside(std::hypot(x - ex, y - t.eye_y) - 0.45 * t.eye_h));
    }
    const double mouth =
        soft_inside(ellipse_distance(x, y, t.cx, t.mouth_y, t.mouth_half, 0.5 * t.mouth_thick));

    Rgb out;
    for (int c = 0; c < 3; ++c) {
        double v = color[c];
        v = v + brow * (0.6 * t.hair[c] - v);
        v = v + sclera * (0.92 - v);
        v = v + iris * (0.12 - v);
        v = v + mouth * (t.lips[c] - v);
        v = face * v + (1.0 - face) * bg[c];
        v = v + hair * (t.hair[c] - v);
        out[c] = v;
    }
    return out;
}

std::string subject_name(int subject) {
    char buf[16];
    std::snprintf(buf, sizeof(buf), "s%03d", subject);
    return buf;
}

std::string variation_name(int index) {
    char buf[16];
    std::snprintf(buf, sizeof(buf), "v%02d", index);
    return buf;
}

}  // namespace

Image pseudo_thermal(const Image& visible) {
    Image lum = to_grayscale(visible);
    for (float& v : lum.data()) {
        const double inv = 1.0 - std::clamp(static_cast<double>(v), 0.0, 1.0);
        v = static_cast<float>(0.05 + 0.9 * std::pow(inv, 1.5));
    }
    return gaussian_blur(lum, 1.5 * visible.width() / 224.0);
}

SyntheticPair render_synthetic_pair(const SyntheticConfig& cfg, int subject, int index) {
    if (cfg.n_subjects < 1 || cfg.images_per_subject < 1 || cfg.size < 16) {
        throw Error(ErrorCode::invalid_argument, "synthetic: counts must be >= 1 and size >= 16");
    }
    const SubjectTraits traits = make_traits(cfg.seed, subject);
    const Nuisance n = make_nuisance(cfg, subject, index);
    const SimilarityTransform to_canonical = n.to_image.inverse();

    Rng noise(n.noise_seed);
    Image visible(cfg.size, cfg.size, 3);
    for (int y = 0; y < cfg.size; ++y) {
        for (int x = 0; x < cfg.size; ++x) {
            const Point2 q = to_canonical.apply(Point2{static_cast<double>(x), static_cast<double>(y)});
            const Rgb c = shade(traits, n.background, q.x, q.y);
            for (int ch = 0; ch < 3; ++ch) {
                const double v = n.gain * c[ch] + n.offset + 0.01 * noise.normal();
                visible.at(ch, y, x) = static_cast<float>(std::clamp(v, 0.0, 1.0));
            }
        }
    }
    return {visible, pseudo_thermal(visible), n.to_image.apply(traits.landmarks)};
}

DatasetManifest generate_synthetic(const SyntheticConfig& cfg, const fs::path& out) {
    if (cfg.n_subjects < 1 || cfg.images_per_subject < 1) {
        throw Error(ErrorCode::invalid_argument, "synthetic: n_subjects and images_per_subject must be >= 1");
    }
    std::error_code ec;
    fs::create_directories(out, ec);
    if (ec) throw Error(ErrorCode::io_error, "cannot create " + out.string() + ": " + ec.message());

    std::vector<Sample> samples;
    LandmarkTable table;
    for (int s = 0; s < cfg.n_subjects; ++s) {
        const auto subject = subject_name(s);
        fs::create_directories(out / subject / "visible");
        fs::create_directories(out / subject / "thermal");
        for (int i = 0; i < cfg.images_per_subject; ++i) {
            const auto tag = variation_name(i);
            const SyntheticPair pair = render_synthetic_pair(cfg, s, i);
            const std::string vis_rel = subject + "/visible/" + tag + ".png";
            const std::string thr_rel = subject + "/thermal/" + tag + ".png";
            save_image(out / vis_rel, pair.visible);
            save_image(out / thr_rel, pair.thermal);
            table[vis_rel] = pair.landmarks;
            table[thr_rel] = pair.landmarks;
            samples.push_back(Sample{subject, Modality::visible, tag, vis_rel, pair.landmarks});
            samples.push_back(Sample{subject, Modality::thermal, tag, thr_rel, pair.landmarks});
        }
    }
    DatasetManifest manifest = make_manifest("synthetic", out, std::move(samples));

    auto write_text = [&](const fs::path& p, const std::string& text) {
        std::ofstream f(p, std::ios::binary | std::ios::trunc);
        f << text;
        if (!f) throw Error(ErrorCode::io_error, "cannot write " + p.string());
    };
    write_text(out / "landmarks.csv", format_landmark_file(table));
    write_text(out / "manifest.csv", manifest_to_csv(manifest));
    return manifest;
}

}  // namespace thermovis
