#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

namespace statecast {

// 8-bit interleaved RGB frame, row-major from the top-left corner.
struct RgbFrame {
    int width = 0;
    int height = 0;
    std::vector<uint8_t> pixels; // width * height * 3

    RgbFrame() = default;
    RgbFrame(int w, int h, uint8_t fill = 0)
        : width(w), height(h), pixels(size_t(w) * h * 3, fill) {}

    size_t idx(int x, int y) const { return (size_t(y) * width + x) * 3; }

    uint8_t* at(int x, int y) { return &pixels[idx(x, y)]; }
    const uint8_t* at(int x, int y) const { return &pixels[idx(x, y)]; }

    void fill(uint8_t r, uint8_t g, uint8_t b) {
        for (size_t i = 0; i + 2 < pixels.size(); i += 3) {
            pixels[i] = r;
            pixels[i + 1] = g;
            pixels[i + 2] = b;
        }
    }

    bool same_size(const RgbFrame& o) const { return width == o.width && height == o.height; }
    bool operator==(const RgbFrame& o) const = default;
};

// Single-channel float image used by the flow estimator.
struct GrayImage {
    int width = 0;
    int height = 0;
    std::vector<float> data;

    GrayImage() = default;
    GrayImage(int w, int h, float fill = 0.f)
        : width(w), height(h), data(size_t(w) * h, fill) {}

    float& at(int x, int y) { return data[size_t(y) * width + x]; }
    float at(int x, int y) const { return data[size_t(y) * width + x]; }

    // Clamp-to-edge access so convolution loops stay branch-light.
    float at_clamped(int x, int y) const {
        x = std::clamp(x, 0, width - 1);
        y = std::clamp(y, 0, height - 1);
        return data[size_t(y) * width + x];
    }
};

// Per-pixel 0/1 mask at frame resolution (coverage, overwrite regions...).
struct PixelMask {
    int width = 0;
    int height = 0;
    std::vector<uint8_t> data;

    PixelMask() = default;
    PixelMask(int w, int h, uint8_t fill = 0)
        : width(w), height(h), data(size_t(w) * h, fill) {}

    uint8_t& at(int x, int y) { return data[size_t(y) * width + x]; }
    uint8_t at(int x, int y) const { return data[size_t(y) * width + x]; }

    size_t count_set() const {
        size_t n = 0;
        for (uint8_t v : data) n += (v != 0);
        return n;
    }
};

inline uint8_t clamp_u8(double v) {
    return uint8_t(std::lround(std::clamp(v, 0.0, 255.0)));
}

// BT.601 luma from 8-bit RGB, kept in [0, 255].
inline double luma601(uint8_t r, uint8_t g, uint8_t b) {
    return 0.299 * r + 0.587 * g + 0.114 * b;
}

inline GrayImage to_luma(const RgbFrame& f) {
    GrayImage g(f.width, f.height);
    for (int y = 0; y < f.height; ++y)
        for (int x = 0; x < f.width; ++x) {
            const uint8_t* p = f.at(x, y);
            g.at(x, y) = float(luma601(p[0], p[1], p[2]));
        }
    return g;
}

} // namespace statecast
