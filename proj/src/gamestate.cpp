#include "statecast/gamestate.hpp"

#include <algorithm>
#include <cmath>

#include "statecast/error.hpp"
#include "statecast/image_io.hpp"

namespace statecast {

namespace {

struct Plane {
    double a, b, c, d; // inside: a*x + b*y + c*z + d >= 0
};

// Frustum planes extracted from the world->clip matrix (rows m3 +- mi).
std::array<Plane, 6> frustum_planes(const Mat4& clip) {
    auto row = [&](int i) {
        return std::array<double, 4>{clip.m[i][0], clip.m[i][1], clip.m[i][2], clip.m[i][3]};
    };
    auto r0 = row(0), r1 = row(1), r2 = row(2), r3 = row(3);
    auto make = [](const std::array<double, 4>& p, const std::array<double, 4>& q, double sign) {
        return Plane{p[0] + sign * q[0], p[1] + sign * q[1], p[2] + sign * q[2],
                     p[3] + sign * q[3]};
    };
    return {make(r3, r0, 1.0),  make(r3, r0, -1.0), // left, right
            make(r3, r1, 1.0),  make(r3, r1, -1.0), // bottom, top
            make(r3, r2, 1.0),  make(r3, r2, -1.0)}; // near, far
}

Aabb world_aabb(const GameObject& obj, const Mat4& transform) {
    Aabb box;
    bool first = true;
    for (const Vec3& c : obj.aabb.corners()) {
        Vec4 w = mul(transform, to_vec4(c));
        Vec3 p{w.x, w.y, w.z};
        if (first) {
            box.min = box.max = p;
            first = false;
        } else {
            box.expand(p);
        }
    }
    return box;
}

bool aabb_outside_plane(const Aabb& box, const Plane& p) {
    // Test the corner most aligned with the plane normal; if even that
    // corner is outside the whole box is.
    double x = p.a >= 0 ? box.max.x : box.min.x;
    double y = p.b >= 0 ? box.max.y : box.min.y;
    double z = p.c >= 0 ? box.max.z : box.min.z;
    return p.a * x + p.b * y + p.c * z + p.d < 0;
}

} // namespace

VisibilitySet frustum_cull(const SceneModel& scene, int frame) {
    if (frame < 0 || size_t(frame) >= scene.camera_path.size())
        fail("frustum_cull: frame " + std::to_string(frame) + " outside camera path");
    const CameraPose& pose = scene.camera_path[frame];
    const Mat4 vp = mul(pose.projection, pose.view);
    const auto planes = frustum_planes(vp);

    VisibilitySet visible;
    for (const auto& obj : scene.objects) {
        if (obj.vertices.empty()) continue;
        Aabb box = world_aabb(obj, obj.transform_at(frame));
        bool excluded = false;
        for (const auto& plane : planes) {
            if (aabb_outside_plane(box, plane)) {
                excluded = true;
                break;
            }
        }
        if (!excluded) visible.push_back(obj.id);
    }
    std::sort(visible.begin(), visible.end());
    return visible;
}

GameStateFrame extract_state(const SceneModel& scene, int frame, int k, int state_w,
                             int state_h) {
    if (k < 1) fail("extract_state: downsample stride must be >= 1");
    if (state_w < 1 || state_h < 1) fail("extract_state: state resolution must be positive");
    if (frame < 0 || size_t(frame) >= scene.camera_path.size())
        fail("extract_state: frame " + std::to_string(frame) + " outside camera path");
    const CameraPose& pose = scene.camera_path[frame];

    GameStateFrame state(state_w, state_h);
    state.frame_index = frame;
    state.downsample_k = k;

    VisibilitySet visible = frustum_cull(scene, frame);

    for (const auto& obj : scene.objects) {
        if (!std::binary_search(visible.begin(), visible.end(), obj.id)) continue;
        const Mat4 mv = mul(pose.view, obj.transform_at(frame));
        for (size_t vi = 0; vi < obj.vertices.size(); vi += size_t(k)) {
            Vec4 view = mul(mv, to_vec4(obj.vertices[vi]));
            double depth = -view.z;
            if (depth <= 0) continue;
            Vec4 clip = mul(pose.projection, view);
            if (clip.w <= 0) continue;
            double nx = clip.x / clip.w;
            double ny = clip.y / clip.w;
            double nz = clip.z / clip.w;
            if (nx < -1 || nx > 1 || ny < -1 || ny > 1 || nz < -1 || nz > 1) continue;

            double sx = (nx + 1.0) * 0.5 * state_w;
            double sy = (1.0 - ny) * 0.5 * state_h;
            int cx = int(std::floor(sx));
            int cy = int(std::floor(sy));
            // A point exactly on the right or bottom edge floors to an
            // out-of-range cell and is dropped.
            if (cx < 0 || cx >= state_w || cy < 0 || cy >= state_h) continue;

            size_t ci = state.idx(cx, cy);
            if (!state.occupied[ci] || depth < state.depth[ci]) {
                state.occupied[ci] = 1;
                state.color_index[ci] = obj.color_index;
                state.depth[ci] = float(depth);
            }
        }
    }
    return state;
}

RgbFrame state_to_image(const GameStateFrame& state, const Palette& palette) {
    RgbFrame img(state.width, state.height);
    for (int y = 0; y < state.height; ++y)
        for (int x = 0; x < state.width; ++x) {
            size_t ci = state.idx(x, y);
            if (!state.occupied[ci]) continue;
            auto it = palette.find(state.color_index[ci]);
            if (it == palette.end())
                fail("state_to_image: unknown color index " +
                     std::to_string(state.color_index[ci]));
            uint8_t* p = img.at(x, y);
            p[0] = it->second[0];
            p[1] = it->second[1];
            p[2] = it->second[2];
        }
    return img;
}

void save_state(const GameStateFrame& state, const std::string& path) {
    std::vector<uint8_t> gray(size_t(state.width) * state.height);
    for (size_t i = 0; i < gray.size(); ++i) {
        if (!state.occupied[i]) {
            gray[i] = 0;
            continue;
        }
        int32_t idx = state.color_index[i];
        if (idx < 0 || idx > 254)
            fail("save_state: color index " + std::to_string(idx) + " not storable");
        gray[i] = uint8_t(idx + 1);
    }
    save_pgm(gray, state.width, state.height, path);
    save_f32(state.depth, path + ".depth");
}

GameStateFrame load_state(const std::string& path) {
    int w = 0, h = 0;
    auto gray = load_pgm(path, w, h);
    GameStateFrame state(w, h);
    for (size_t i = 0; i < gray.size(); ++i) {
        if (gray[i] == 0) continue;
        state.occupied[i] = 1;
        state.color_index[i] = int32_t(gray[i]) - 1;
    }
    state.depth = load_f32(path + ".depth", size_t(w) * h);
    for (size_t i = 0; i < state.depth.size(); ++i)
        if (state.occupied[i] && !(state.depth[i] > 0))
            fail("load_state: non-positive depth on occupied cell: " + path);
    return state;
}

} // namespace statecast
