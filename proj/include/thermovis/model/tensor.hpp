#pragma once

#include <cstddef>
#include <string>
#include <vector>

namespace thermovis {

struct Shape {
    int n = 0, c = 0, h = 0, w = 0;
    std::size_t size() const {
        return static_cast<std::size_t>(n) * static_cast<std::size_t>(c) *
               static_cast<std::size_t>(h) * static_cast<std::size_t>(w);
    }
    bool operator==(const Shape&) const = default;
    std::string str() const {
        return std::to_string(n) + "x" + std::to_string(c) + "x" + std::to_string(h) + "x" +
               std::to_string(w);
    }
};

/// Dense NCHW batch.
template <typename T>
struct Tensor {
    Shape shape;
    std::vector<T> data;

    Tensor() = default;
    explicit Tensor(Shape s, T fill = T{}) : shape(s), data(s.size(), fill) {}
    Tensor(int n, int c, int h, int w) : Tensor(Shape{n, c, h, w}) {}

    std::size_t plane_size() const {
        return static_cast<std::size_t>(shape.h) * static_cast<std::size_t>(shape.w);
    }
    std::size_t image_size() const { return static_cast<std::size_t>(shape.c) * plane_size(); }

    T* image(int i) { return data.data() + static_cast<std::size_t>(i) * image_size(); }
    const T* image(int i) const { return data.data() + static_cast<std::size_t>(i) * image_size(); }
    T* plane(int i, int c) { return image(i) + static_cast<std::size_t>(c) * plane_size(); }
    const T* plane(int i, int c) const {
        return image(i) + static_cast<std::size_t>(c) * plane_size();
    }

    void release() {
        data.clear();
        data.shrink_to_fit();
        shape = {};
    }
};

}  // namespace thermovis
