#include "oracles.hpp"

#include <cmath>

namespace oracle {

using statecast::EncodedFrame;
using statecast::GameObject;
using statecast::Mat4;
using statecast::MbMode;
using statecast::RgbFrame;
using statecast::SceneModel;
using statecast::Vec3;

namespace {

// Own 4x4 arithmetic. The accumulation order matches the documented
// row-times-column convention, which is what makes bit-exact comparison
// against the library meaningful.
struct M4 {
    double m[4][4];
};

M4 from_lib(const Mat4& a) {
    M4 r;
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j) r.m[i][j] = a.m[i][j];
    return r;
}

M4 mat_mul(const M4& a, const M4& b) {
    M4 r;
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j) {
            double s = 0.0;
            for (int k = 0; k < 4; ++k) s += a.m[i][k] * b.m[k][j];
            r.m[i][j] = s;
        }
    return r;
}

struct V4 {
    double x, y, z, w;
};

V4 mat_vec(const M4& a, const V4& v) {
    V4 r;
    r.x = a.m[0][0] * v.x + a.m[0][1] * v.y + a.m[0][2] * v.z + a.m[0][3] * v.w;
    r.y = a.m[1][0] * v.x + a.m[1][1] * v.y + a.m[1][2] * v.z + a.m[1][3] * v.w;
    r.z = a.m[2][0] * v.x + a.m[2][1] * v.y + a.m[2][2] * v.z + a.m[2][3] * v.w;
    r.w = a.m[3][0] * v.x + a.m[3][1] * v.y + a.m[3][2] * v.z + a.m[3][3] * v.w;
    return r;
}

// Runs one vertex through the projection filters. Returns false when any
// filter rejects it; otherwise fills the landing cell and view depth.
bool project_vertex(const M4& mv, const M4& proj, const Vec3& vert, int w, int h, int* out_cx,
                    int* out_cy, double* out_depth) {
    V4 view = mat_vec(mv, {vert.x, vert.y, vert.z, 1.0});
    double depth = -view.z;
    if (depth <= 0) return false;
    V4 clip = mat_vec(proj, view);
    if (clip.w <= 0) return false;
    double nx = clip.x / clip.w;
    double ny = clip.y / clip.w;
    double nz = clip.z / clip.w;
    if (nx < -1 || nx > 1 || ny < -1 || ny > 1 || nz < -1 || nz > 1) return false;
    int cx = int(std::floor((nx + 1.0) * 0.5 * w));
    int cy = int(std::floor((1.0 - ny) * 0.5 * h));
    if (cx < 0 || cx >= w || cy < 0 || cy >= h) return false;
    *out_cx = cx;
    *out_cy = cy;
    *out_depth = depth;
    return true;
}

} // namespace

std::map<size_t, CellRef> project_all_vertices(const SceneModel& scene, int frame, int k, int w,
                                               int h) {
    const auto& pose = scene.camera_path.at(size_t(frame));
    M4 proj = from_lib(pose.projection);
    std::map<size_t, CellRef> cells;
    for (const auto& obj : scene.objects) {
        M4 mv = mat_mul(from_lib(pose.view), from_lib(obj.transform_at(frame)));
        for (size_t vi = 0; vi < obj.vertices.size(); vi += size_t(k)) {
            int cx, cy;
            double depth;
            if (!project_vertex(mv, proj, obj.vertices[vi], w, h, &cx, &cy, &depth)) continue;
            size_t key = size_t(cy) * w + cx;
            auto it = cells.find(key);
            // Mirror the store: depth is held as float, and a later writer
            // only displaces an earlier one when strictly nearer.
            if (it == cells.end()) {
                cells[key] = {obj.color_index, float(depth)};
            } else if (depth < double(it->second.depth)) {
                it->second = {obj.color_index, float(depth)};
            }
        }
    }
    return cells;
}

std::set<int> truly_visible_ids(const SceneModel& scene, int frame) {
    const auto& pose = scene.camera_path.at(size_t(frame));
    M4 proj = from_lib(pose.projection);
    std::set<int> ids;
    for (const auto& obj : scene.objects) {
        M4 mv = mat_mul(from_lib(pose.view), from_lib(obj.transform_at(frame)));
        for (const auto& vert : obj.vertices) {
            int cx, cy;
            double depth;
            // Use a generous screen grid here; only the on-screen property
            // matters, not the landing cell.
            if (project_vertex(mv, proj, vert, 1 << 14, 1 << 14, &cx, &cy, &depth)) {
                ids.insert(obj.id);
                break;
            }
        }
    }
    return ids;
}

// ---------------------------------------------------------------------------

std::vector<std::vector<uint8_t>> corruption_chain(const std::vector<EncodedFrame>& frames,
                                                   const std::vector<std::set<int>>& lost,
                                                   int width, int height) {
    const int cells_w = width / 4;
    const int cells_h = height / 4;
    const int mb_cols = width / 16;

    std::vector<std::vector<uint8_t>> out;
    std::vector<uint8_t> prev(size_t(cells_w) * cells_h, 0);

    for (size_t f = 0; f < frames.size(); ++f) {
        const EncodedFrame& ef = frames[f];
        std::vector<uint8_t> cur(size_t(cells_w) * cells_h, 0);

        std::vector<uint8_t> mb_lost(ef.macroblocks.size(), 0);
        for (const auto& pr : ef.packet_map) {
            if (!lost[f].count(pr.packet_id)) continue;
            for (int i = 0; i < pr.mb_count; ++i) mb_lost[size_t(pr.first_mb + i)] = 1;
        }

        for (size_t m = 0; m < ef.macroblocks.size(); ++m) {
            const auto& mb = ef.macroblocks[m];
            int px0 = int(m) % mb_cols * 16;
            int py0 = int(m) / mb_cols * 16;

            bool bad = mb_lost[m] != 0;
            if (!bad && ef.kind == 'P' && mb.mode != MbMode::Intra) {
                // Walk each 4x4 sub-block's motion-compensated source patch.
                for (int sy = 0; sy < 4 && !bad; ++sy)
                    for (int sx = 0; sx < 4 && !bad; ++sx) {
                        int rx = px0 + 4 * sx - mb.mv_dx;
                        int ry = py0 + 4 * sy - mb.mv_dy;
                        int cx0 = std::max(0, rx / 4);
                        int cy0 = std::max(0, ry / 4);
                        int cx1 = std::min(cells_w - 1, (rx + 3) / 4);
                        int cy1 = std::min(cells_h - 1, (ry + 3) / 4);
                        for (int cy = cy0; cy <= cy1 && !bad; ++cy)
                            for (int cx = cx0; cx <= cx1; ++cx)
                                if (prev[size_t(cy) * cells_w + cx]) {
                                    bad = true;
                                    break;
                                }
                    }
            }

            if (bad) {
                int c0x = px0 / 4, c0y = py0 / 4;
                for (int cy = 0; cy < 4; ++cy)
                    for (int cx = 0; cx < 4; ++cx)
                        cur[size_t(c0y + cy) * cells_w + (c0x + cx)] = 1;
            }
        }

        out.push_back(cur);
        prev = std::move(cur);
    }
    return out;
}

long recount_frame_bytes(const EncodedFrame& frame) {
    long total = 0;
    for (const auto& mb : frame.macroblocks) {
        long cost = 4;
        if (mb.mode == MbMode::Inter) cost += 2;
        if (!mb.residual.empty()) {
            for (int p = 0; p < 16 * 16; ++p) {
                const int16_t* v = &mb.residual[size_t(p) * 3];
                if (v[0] != 0 || v[1] != 0 || v[2] != 0) cost += 2;
            }
        }
        total += cost;
    }
    return total;
}

// ---------------------------------------------------------------------------

double charbonnier_scalar(const RgbFrame& a, const RgbFrame& b) {
    const double eps = 1e-12;
    double sum = 0.0;
    for (size_t i = 0; i < a.pixels.size(); ++i) {
        double d = double(a.pixels[i]) - double(b.pixels[i]);
        sum += std::sqrt(d * d + eps * eps);
    }
    return sum;
}

// ---------------------------------------------------------------------------

RgbFrame noise_frame(int w, int h, uint64_t seed) {
    RgbFrame f(w, h);
    TestRng rng(seed);
    for (auto& px : f.pixels) px = uint8_t(rng.next() & 0xff);
    return f;
}

SceneModel random_scene(uint64_t seed, int state_w, int state_h) {
    TestRng rng(seed);
    SceneModel scene;
    scene.rgb_width = 64;
    scene.rgb_height = 64;
    scene.state_width = state_w;
    scene.state_height = state_h;

    for (int c = 0; c <= 8; ++c)
        scene.palette[c] = {uint8_t(rng.integer(0, 255)), uint8_t(rng.integer(0, 255)),
                            uint8_t(rng.integer(0, 255))};

    int object_count = rng.integer(6, 14);
    for (int oi = 0; oi < object_count; ++oi) {
        GameObject obj;
        obj.id = oi + 1;
        obj.color_index = rng.integer(0, 8);
        // Centers scattered all around the camera, including behind it, so
        // the culling paths actually fire.
        Vec3 center{rng.real(-14.0, 14.0), rng.real(0.0, 6.0), rng.real(-14.0, 14.0)};
        int vert_count = rng.integer(4, 10);
        for (int vi = 0; vi < vert_count; ++vi)
            obj.vertices.push_back({center.x + rng.real(-1.5, 1.5),
                                    center.y + rng.real(-1.5, 1.5),
                                    center.z + rng.real(-1.5, 1.5)});
        int tri_count = rng.integer(2, 6);
        for (int ti = 0; ti < tri_count; ++ti)
            obj.triangles.push_back({rng.integer(0, vert_count - 1),
                                     rng.integer(0, vert_count - 1),
                                     rng.integer(0, vert_count - 1)});
        if (rng.real01() < 0.3)
            obj.transforms.push_back(statecast::translation(
                {rng.real(-2.0, 2.0), rng.real(-1.0, 1.0), rng.real(-2.0, 2.0)}));
        obj.aabb.min = obj.aabb.max = obj.vertices[0];
        for (const auto& v : obj.vertices) obj.aabb.expand(v);
        scene.objects.push_back(std::move(obj));
    }

    double yaw = rng.real(0.0, 6.283);
    double radius = rng.real(8.0, 16.0);
    Vec3 eye{radius * std::cos(yaw), rng.real(2.0, 7.0), radius * std::sin(yaw)};
    Vec3 target{rng.real(-3.0, 3.0), rng.real(0.0, 2.0), rng.real(-3.0, 3.0)};
    statecast::CameraPose pose;
    pose.view = statecast::look_at(eye, target, {0.0, 1.0, 0.0});
    pose.projection = statecast::perspective(
        rng.real(50.0, 75.0) * 3.14159265358979323846 / 180.0,
        double(scene.rgb_width) / scene.rgb_height, 0.1, 200.0);
    pose.frame_index = 0;
    scene.camera_path.push_back(pose);
    pose.frame_index = 1;
    scene.camera_path.push_back(pose); // identical pose: a static pair
    return scene;
}

} // namespace oracle
