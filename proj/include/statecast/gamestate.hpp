#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "statecast/scene.hpp"

namespace statecast {

// Sparse low-resolution snapshot of the visible geometry: each cell is
// either empty or holds the palette index and positive view-space depth of
// the nearest projected vertex that landed in it.
struct GameStateFrame {
    int width = 0;
    int height = 0;
    int frame_index = 0;
    int downsample_k = 1;
    std::vector<uint8_t> occupied;   // 0/1
    std::vector<int32_t> color_index;
    std::vector<float> depth;        // view-space distance, > 0 where occupied

    GameStateFrame() = default;
    GameStateFrame(int w, int h)
        : width(w), height(h), occupied(size_t(w) * h, 0),
          color_index(size_t(w) * h, 0), depth(size_t(w) * h, 0.f) {}

    size_t idx(int x, int y) const { return size_t(y) * width + x; }
    bool cell_occupied(int x, int y) const { return occupied[idx(x, y)] != 0; }

    size_t occupied_count() const {
        size_t n = 0;
        for (uint8_t v : occupied) n += (v != 0);
        return n;
    }
};

// Object ids that survived culling, sorted ascending.
using VisibilitySet = std::vector<int>;

// Conservative world-space AABB vs. frustum test from the combined
// projection*view matrix. Never excludes an object with any vertex inside
// the full clip volume; may include extra objects.
VisibilitySet frustum_cull(const SceneModel& scene, int frame);

// Projects every k-th vertex (stride over each object's vertex order,
// starting at index 0) of every culled-in object through
// projection * view * transform, keeps points with clip w > 0, positive
// view depth, and all NDC components in [-1, 1], and bins them into state
// cells by flooring the continuous screen coordinate. Points that floor to
// the right or bottom edge are dropped. When several vertices share a cell
// the smallest depth wins (first writer wins exact ties).
GameStateFrame extract_state(const SceneModel& scene, int frame, int k, int state_w, int state_h);

// Occupied cells take their palette color, empty cells are black.
RgbFrame state_to_image(const GameStateFrame& state, const Palette& palette);

// On-disk form: a P5 grayscale image holding color_index + 1 (0 = empty)
// plus a raw little-endian float32 depth sidecar at <path> + ".depth".
void save_state(const GameStateFrame& state, const std::string& path);
GameStateFrame load_state(const std::string& path);

} // namespace statecast
