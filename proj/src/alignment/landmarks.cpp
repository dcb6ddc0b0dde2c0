#include "thermovis/alignment/landmarks.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <sstream>
#include <vector>

#include "thermovis/core/error.hpp"

namespace thermovis {

namespace {

std::string_view trim(std::string_view s) {
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string_view::npos) return {};
    const auto last = s.find_last_not_of(" \t\r");
    return s.substr(first, last - first + 1);
}

std::vector<std::string_view> split_commas(std::string_view line) {
    std::vector<std::string_view> fields;
    std::size_t start = 0;
    while (true) {
        const auto pos = line.find(',', start);
        fields.push_back(trim(line.substr(start, pos - start)));
        if (pos == std::string_view::npos) break;
        start = pos + 1;
    }
    return fields;
}

}  // namespace

std::string_view landmark_name(Landmark id) {
    switch (id) {
        case Landmark::left_eye_outer: return "left_eye_outer";
        case Landmark::left_eye_inner: return "left_eye_inner";
        case Landmark::right_eye_inner: return "right_eye_inner";
        case Landmark::right_eye_outer: return "right_eye_outer";
        case Landmark::mouth_left: return "mouth_left";
        case Landmark::mouth_right: return "mouth_right";
    }
    return "unknown";
}

bool LandmarkSet::all_finite() const {
    for (const auto& p : points) {
        if (!std::isfinite(p.x) || !std::isfinite(p.y)) return false;
    }
    return true;
}

bool LandmarkSet::inside(int width, int height) const {
    for (const auto& p : points) {
        if (p.x < 0.0 || p.y < 0.0 || p.x > width - 1 || p.y > height - 1) return false;
    }
    return true;
}

bool LandmarkSet::eyes_above_mouth() const {
    double lowest_eye = points[0].y;
    for (std::size_t i = 1; i < 4; ++i) lowest_eye = std::max(lowest_eye, points[i].y);
    return lowest_eye < std::min(points[4].y, points[5].y);
}

double LandmarkSet::eye_distance() const {
    const auto& lo = (*this)[Landmark::left_eye_outer];
    const auto& li = (*this)[Landmark::left_eye_inner];
    const auto& ri = (*this)[Landmark::right_eye_inner];
    const auto& ro = (*this)[Landmark::right_eye_outer];
    const double dx = 0.5 * (ri.x + ro.x) - 0.5 * (lo.x + li.x);
    const double dy = 0.5 * (ri.y + ro.y) - 0.5 * (lo.y + li.y);
    return std::hypot(dx, dy);
}

LandmarkSet default_template() {
    LandmarkSet t;
    t[Landmark::left_eye_outer] = {62, 88};
    t[Landmark::left_eye_inner] = {90, 88};
    t[Landmark::right_eye_inner] = {134, 88};
    t[Landmark::right_eye_outer] = {162, 88};
    t[Landmark::mouth_left] = {78, 168};
    t[Landmark::mouth_right] = {146, 168};
    return t;
}

LandmarkTable parse_landmark_file(std::string_view text) {
    LandmarkTable table;
    std::size_t line_no = 0;
    std::size_t start = 0;
    while (start <= text.size()) {
        const auto end = text.find('\n', start);
        const auto raw = text.substr(start, end == std::string_view::npos ? text.size() - start
                                                                          : end - start);
        ++line_no;
        start = end == std::string_view::npos ? text.size() + 1 : end + 1;

        const auto line = trim(raw);
        if (line.empty() || line.front() == '#') continue;

        const auto fields = split_commas(line);
        const auto where = "landmark file line " + std::to_string(line_no) + ": ";
        if (fields.size() != 1 + 2 * kLandmarkCount) {
            throw Error(ErrorCode::parse_error,
                        where + "expected 13 fields, got " + std::to_string(fields.size()));
        }
        if (fields[0].empty()) throw Error(ErrorCode::parse_error, where + "empty image path");

        LandmarkSet lm;
        for (std::size_t i = 0; i < 2 * kLandmarkCount; ++i) {
            const auto f = fields[i + 1];
            double v = 0.0;
            const auto [ptr, ec] = std::from_chars(f.data(), f.data() + f.size(), v);
            if (ec != std::errc() || ptr != f.data() + f.size() || !std::isfinite(v)) {
                throw Error(ErrorCode::parse_error,
                            where + "non-numeric field '" + std::string(f) + "'");
            }
            auto& p = lm.points[i / 2];
            (i % 2 == 0 ? p.x : p.y) = v;
        }
        std::string path(fields[0]);
        if (!table.emplace(path, lm).second) {
            throw Error(ErrorCode::parse_error, where + "duplicate image path '" + path + "'");
        }
    }
    return table;
}

LandmarkTable read_landmark_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorCode::io_error, "cannot open landmark file: " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_landmark_file(ss.str());
}

std::string format_landmark_file(const LandmarkTable& table) {
    std::ostringstream out;
    out << "# path";
    for (std::size_t i = 0; i < kLandmarkCount; ++i) {
        const auto name = landmark_name(static_cast<Landmark>(i));
        out << ',' << name << "_x," << name << "_y";
    }
    out << '\n';
    out << std::setprecision(17);
    for (const auto& [path, lm] : table) {
        out << path;
        for (const auto& p : lm.points) out << ',' << p.x << ',' << p.y;
        out << '\n';
    }
    return out.str();
}

}  // namespace thermovis
