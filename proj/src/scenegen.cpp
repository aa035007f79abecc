#include "statecast/scenegen.hpp"

#include <cmath>

#include "statecast/error.hpp"
#include "statecast/rng.hpp"

namespace statecast {

namespace {

constexpr double kPi = 3.14159265358979323846;

Palette fixture_palette() {
    return {
        {0, {90, 110, 60}},   {1, {200, 60, 50}},   {2, {60, 120, 200}},
        {3, {230, 180, 60}},  {4, {150, 80, 160}},  {5, {80, 180, 120}},
        {6, {210, 210, 200}}, {7, {170, 110, 60}},  {8, {100, 100, 220}},
        {9, {220, 120, 160}}, {10, {120, 200, 210}}, {11, {240, 240, 110}},
    };
}

void finish_mesh(GameObject& obj) {
    obj.aabb.min = obj.aabb.max = obj.vertices[0];
    for (const Vec3& v : obj.vertices) obj.aabb.expand(v);
}

GameObject make_box(int id, int color, const Vec3& center, const Vec3& half) {
    GameObject obj;
    obj.id = id;
    obj.color_index = color;
    for (int i = 0; i < 8; ++i) {
        double sx = (i & 1) ? 1.0 : -1.0;
        double sy = (i & 2) ? 1.0 : -1.0;
        double sz = (i & 4) ? 1.0 : -1.0;
        obj.vertices.push_back(
            {center.x + sx * half.x, center.y + sy * half.y, center.z + sz * half.z});
    }
    const int faces[6][4] = {
        {0, 1, 3, 2}, {4, 5, 7, 6}, {0, 1, 5, 4}, {2, 3, 7, 6}, {0, 2, 6, 4}, {1, 3, 7, 5},
    };
    for (const auto& f : faces) {
        obj.triangles.push_back({f[0], f[1], f[2]});
        obj.triangles.push_back({f[0], f[2], f[3]});
    }
    obj.transforms.push_back(Mat4::identity());
    finish_mesh(obj);
    return obj;
}

GameObject make_pyramid(int id, int color, const Vec3& base_center, double half, double height) {
    GameObject obj;
    obj.id = id;
    obj.color_index = color;
    obj.vertices = {
        {base_center.x - half, base_center.y, base_center.z - half},
        {base_center.x + half, base_center.y, base_center.z - half},
        {base_center.x + half, base_center.y, base_center.z + half},
        {base_center.x - half, base_center.y, base_center.z + half},
        {base_center.x, base_center.y + height, base_center.z},
    };
    obj.triangles = {{0, 1, 4}, {1, 2, 4}, {2, 3, 4}, {3, 0, 4}, {0, 1, 2}, {0, 2, 3}};
    obj.transforms.push_back(Mat4::identity());
    finish_mesh(obj);
    return obj;
}

GameObject make_ground(int id, int color, double extent) {
    GameObject obj;
    obj.id = id;
    obj.color_index = color;
    obj.vertices = {
        {-extent, 0.0, -extent}, {extent, 0.0, -extent},
        {extent, 0.0, extent},   {-extent, 0.0, extent},
    };
    obj.triangles = {{0, 1, 2}, {0, 2, 3}};
    obj.transforms.push_back(Mat4::identity());
    finish_mesh(obj);
    return obj;
}

void set_resolution(SceneModel& scene, int rw, int rh, int sw, int sh) {
    scene.rgb_width = rw;
    scene.rgb_height = rh;
    scene.state_width = sw;
    scene.state_height = sh;
}

Mat4 standard_projection(const SceneModel& scene) {
    double aspect = double(scene.rgb_width) / scene.rgb_height;
    return perspective(60.0 * kPi / 180.0, aspect, 0.1, 100.0);
}

void add_pose(SceneModel& scene, int frame, const Vec3& eye, const Vec3& target,
              const Mat4& proj) {
    CameraPose pose;
    pose.frame_index = frame;
    pose.view = look_at(eye, target, {0.0, 1.0, 0.0});
    pose.projection = proj;
    scene.camera_path.push_back(pose);
}

// Surface sample grid over the six faces of an axis-aligned box. The extra
// vertices are not referenced by any triangle, so rendering is untouched;
// they only enrich the extracted state, which projects raw vertices. Without
// them a box contributes eight isolated dots and the state-image flow solver
// has nothing to lock onto.
void densify_box(GameObject& obj, const Vec3& center, const Vec3& half, double spacing) {
    auto steps = [&](double extent) { return std::max(2, int(std::ceil(2.0 * extent / spacing))); };
    int nx = steps(half.x), ny = steps(half.y), nz = steps(half.z);
    auto lerp = [](double lo, double hi, int i, int n) {
        return lo + (hi - lo) * (double(i) / double(n));
    };
    for (int s = -1; s <= 1; s += 2) {
        for (int i = 0; i <= ny; ++i)
            for (int j = 0; j <= nz; ++j)
                obj.vertices.push_back({center.x + s * half.x,
                                        lerp(center.y - half.y, center.y + half.y, i, ny),
                                        lerp(center.z - half.z, center.z + half.z, j, nz)});
        for (int i = 0; i <= nx; ++i)
            for (int j = 0; j <= nz; ++j)
                obj.vertices.push_back({lerp(center.x - half.x, center.x + half.x, i, nx),
                                        center.y + s * half.y,
                                        lerp(center.z - half.z, center.z + half.z, j, nz)});
        for (int i = 0; i <= nx; ++i)
            for (int j = 0; j <= ny; ++j)
                obj.vertices.push_back({lerp(center.x - half.x, center.x + half.x, i, nx),
                                        lerp(center.y - half.y, center.y + half.y, j, ny),
                                        center.z + s * half.z});
    }
}

// Shared box field for the camera-motion fixtures.
void scatter_boxes(SceneModel& scene, Rng& rng, int count, int first_id) {
    for (int i = 0; i < count; ++i) {
        double x = rng.uniform(-14.0, 14.0);
        double z = rng.uniform(-14.0, 14.0);
        double h = rng.uniform(0.6, 2.6);
        double w = rng.uniform(0.5, 1.6);
        int color = 1 + int(rng.uniform_int(0, 10));
        GameObject box = make_box(first_id + i, color, {x, h, z}, {w, h, w});
        densify_box(box, {x, h, z}, {w, h, w}, 0.35);
        finish_mesh(box);
        scene.objects.push_back(box);
    }
}

SceneModel make_pan(int frames, uint64_t seed) {
    SceneModel scene;
    scene.palette = fixture_palette();
    set_resolution(scene, 128, 96, 64, 48);
    scene.objects.push_back(make_ground(0, 0, 60.0));
    Rng rng(hash_mix(seed, 0x70616eULL));
    scatter_boxes(scene, rng, 14, 1);

    Mat4 proj = standard_projection(scene);
    Vec3 step{0.45, 0.0, 0.0};
    for (int f = 0; f < frames; ++f) {
        Vec3 eye{-4.0 + step.x * f, 3.0, 16.0};
        Vec3 target{eye.x, 1.2, 0.0};
        add_pose(scene, f, eye, target, proj);
    }
    return scene;
}

SceneModel make_orbit(int frames, uint64_t seed) {
    SceneModel scene;
    scene.palette = fixture_palette();
    set_resolution(scene, 128, 96, 64, 48);
    scene.objects.push_back(make_ground(0, 0, 60.0));
    Rng rng(hash_mix(seed, 0x6f72626974ULL));
    scatter_boxes(scene, rng, 12, 1);

    Mat4 proj = standard_projection(scene);
    for (int f = 0; f < frames; ++f) {
        double angle = 2.0 * kPi * f / frames;
        Vec3 eye{16.0 * std::cos(angle), 6.0, 16.0 * std::sin(angle)};
        add_pose(scene, f, eye, {0.0, 1.0, 0.0}, proj);
    }
    return scene;
}

SceneModel make_two_motion(int frames, uint64_t seed) {
    SceneModel scene;
    scene.palette = fixture_palette();
    set_resolution(scene, 128, 96, 64, 48);
    scene.objects.push_back(make_ground(0, 0, 80.0));

    Rng rng(hash_mix(seed, 0x74776f6dULL));
    int id = 1;
    // Left group drifts right, right group drifts left; speeds differ so the
    // two regions carry clearly distinct flow.
    for (int g = 0; g < 2; ++g) {
        double side = g == 0 ? -1.0 : 1.0;
        double vx = g == 0 ? 0.11 : -0.06;
        for (int i = 0; i < 5; ++i) {
            double x = side * rng.uniform(4.0, 9.0);
            double z = rng.uniform(-5.0, 5.0);
            double h = rng.uniform(0.8, 2.2);
            int color = (g == 0 ? 1 : 6) + int(rng.uniform_int(0, 4));
            GameObject obj = make_box(id++, color, {x, h, z}, {0.9, h, 0.9});
            obj.transforms.clear();
            for (int f = 0; f < frames; ++f)
                obj.transforms.push_back(translation({vx * f, 0.0, 0.0}));
            scene.objects.push_back(obj);
        }
    }

    Mat4 proj = standard_projection(scene);
    for (int f = 0; f < frames; ++f)
        add_pose(scene, f, {0.0, 6.0, 20.0}, {0.0, 1.0, 0.0}, proj);
    return scene;
}

SceneModel make_village(int frames, uint64_t seed) {
    SceneModel scene;
    scene.palette = fixture_palette();
    set_resolution(scene, 256, 144, 128, 64);
    scene.objects.push_back(make_ground(0, 0, 90.0));

    Rng rng(hash_mix(seed, 0x76696c6cULL));
    int id = 1;
    while (id < 40) {
        double x = rng.uniform(-18.0, 18.0);
        double z = rng.uniform(-48.0, 42.0);
        int color = 1 + int(rng.uniform_int(0, 10));
        double pick = rng.uniform01();
        if (pick < 0.55) {
            double w = rng.uniform(1.2, 3.2);
            double h = rng.uniform(1.0, 3.0);
            scene.objects.push_back(make_box(id++, color, {x, h, z}, {w, h, w * 0.8}));
        } else if (pick < 0.8) {
            double half = rng.uniform(1.0, 2.4);
            double h = rng.uniform(2.0, 5.0);
            scene.objects.push_back(make_pyramid(id++, color, {x, 0.0, z}, half, h));
        } else {
            double w = rng.uniform(0.8, 1.6);
            double h = rng.uniform(3.5, 7.0);
            scene.objects.push_back(make_box(id++, color, {x, h, z}, {w, h, w}));
        }
    }

    // Flyover with deliberately non-constant velocity: lateral sway, height
    // bob, uneven forward progress, plus white per-frame pose jitter in the
    // style of hand-held mouse look. The jitter is the part one-step motion
    // extrapolation cannot predict.
    Mat4 proj = standard_projection(scene);
    int n = frames;
    auto jit = [&](int f, uint64_t axis, double amp) {
        return amp * (2.0 * hash_uniform01(seed, uint64_t(f), axis) - 1.0);
    };
    for (int f = 0; f < n; ++f) {
        double t = n > 1 ? double(f) / (n - 1) : 0.0;
        Vec3 eye{
            12.0 * std::sin(2.2 * kPi * t + 0.4) + jit(f, 1, 0.25),
            4.2 + 1.4 * std::sin(5.0 * kPi * t) + jit(f, 2, 0.15),
            38.0 - 76.0 * t + 8.0 * std::sin(3.1 * kPi * t + 1.0),
        };
        Vec3 target{3.0 * std::sin(2.0 * kPi * t) + jit(f, 3, 0.22),
                    1.5 + jit(f, 4, 0.15), eye.z - 12.0};
        add_pose(scene, f, eye, target, proj);
    }
    return scene;
}

} // namespace

SceneModel make_scene(const std::string& kind, int frames, uint64_t seed) {
    if (kind == "pan") return make_pan(frames > 0 ? frames : 60, seed);
    if (kind == "orbit") return make_orbit(frames > 0 ? frames : 60, seed);
    if (kind == "two-motion") return make_two_motion(frames > 0 ? frames : 60, seed);
    if (kind == "village_toy") return make_village(frames > 0 ? frames : 300, seed);
    fail("unknown scene kind '" + kind + "' (expected pan, orbit, two-motion or village_toy)");
}

} // namespace statecast
