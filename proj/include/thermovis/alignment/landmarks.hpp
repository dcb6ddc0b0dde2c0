#pragma once

#include <array>
#include <cstddef>
#include <map>
#include <string>
#include <string_view>

namespace thermovis {

struct Point2 {
    double x = 0.0;
    double y = 0.0;
    bool operator==(const Point2&) const = default;
};

enum class Landmark : std::size_t {
    left_eye_outer = 0,
    left_eye_inner,
    right_eye_inner,
    right_eye_outer,
    mouth_left,
    mouth_right,
};

inline constexpr std::size_t kLandmarkCount = 6;

std::string_view landmark_name(Landmark id);

/// Six annotated facial points in pixel coordinates; pixel (i, j) has its
/// centre at (x = i, y = j).
struct LandmarkSet {
    std::array<Point2, kLandmarkCount> points{};

    Point2& operator[](Landmark id) { return points[static_cast<std::size_t>(id)]; }
    const Point2& operator[](Landmark id) const { return points[static_cast<std::size_t>(id)]; }

    bool all_finite() const;
    bool inside(int width, int height) const;
    /// Upright-face sanity check: both eye rows above both mouth corners.
    bool eyes_above_mouth() const;
    /// Distance between the midpoints of the two eyes.
    double eye_distance() const;

    bool operator==(const LandmarkSet&) const = default;
};

/// Canonical 224 x 224 template the faces are aligned to.
LandmarkSet default_template();

using LandmarkTable = std::map<std::string, LandmarkSet>;

/// Annotation file: one record per line, `path,x1,y1,...,x6,y6` in the
/// enumerator order above. Blank lines and lines starting with '#' are skipped.
LandmarkTable parse_landmark_file(std::string_view text);
LandmarkTable read_landmark_file(const std::string& path);
std::string format_landmark_file(const LandmarkTable& table);

}  // namespace thermovis
