#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "statecast/geometry.hpp"
#include "statecast/image.hpp"

namespace statecast {

using Rgb = std::array<uint8_t, 3>;
using Palette = std::map<int, Rgb>;

struct Triangle {
    int a = 0, b = 0, c = 0;
};

// A rigid mesh instance. Vertices are immutable after load; motion is
// expressed through the per-frame transform list (a single entry means the
// object is static for the whole session).
struct GameObject {
    int id = 0;
    int color_index = 0;
    std::vector<Vec3> vertices;   // local space
    std::vector<Triangle> triangles;
    std::vector<Mat4> transforms; // local -> world, one per frame, clamped to last
    Aabb aabb;                    // local-space bounds, derived from vertices

    const Mat4& transform_at(int frame) const {
        if (transforms.empty()) { static const Mat4 kId = Mat4::identity(); return kId; }
        size_t i = size_t(frame) < transforms.size() ? size_t(frame) : transforms.size() - 1;
        return transforms[i];
    }
};

struct CameraPose {
    int frame_index = 0;
    Mat4 view = Mat4::identity();       // world -> view
    Mat4 projection = Mat4::identity(); // view -> clip
};

struct SceneModel {
    Palette palette;
    std::vector<GameObject> objects;
    std::vector<CameraPose> camera_path;
    int rgb_width = 256;
    int rgb_height = 144;
    int state_width = 128;
    int state_height = 64;
};

// Line-oriented scene text. Grammar (one record per line, '#' comments):
//   resolution <rgb_w> <rgb_h> <state_w> <state_h>
//   palette <index> <r> <g> <b>
//   object <id> <color_index>
//   v <x> <y> <z>            (belongs to the open object)
//   t <i> <j> <k>            (vertex indices into the open object)
//   T <16 floats, row-major> (appends a per-frame transform; repeatable)
//   camera <16 floats view> <16 floats projection>
// Local AABBs are computed from the vertices while loading.
SceneModel load_scene(const std::string& path);
void save_scene(const SceneModel& scene, const std::string& path);

// Background color of rendered frames.
inline constexpr uint8_t kBackgroundGray = 128;

// Depth shading reference distance: pixel color is scaled by
// clamp(1 - depth / kShadingFar, 0.2, 1.0) with depth the positive
// view-space distance.
inline constexpr double kShadingFar = 100.0;

// Flat-shaded z-buffered rasterization of every object triangle under
// camera_path[frame]. Top-left fill rule at pixel centers, perspective
// correct depth, near-plane clipping in clip space. Bit-identical across
// repeated runs on the same input.
RgbFrame render_ground_truth(const SceneModel& scene, int frame);

} // namespace statecast
