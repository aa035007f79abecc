#include "statecast/scene.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "statecast/error.hpp"
#include "statecast/image_io.hpp"

namespace statecast {

namespace {

// ---------------------------------------------------------------------------
// Parsing

std::vector<std::string> split_tokens(const std::string& line) {
    std::vector<std::string> toks;
    size_t i = 0;
    while (i < line.size()) {
        while (i < line.size() && (line[i] == ' ' || line[i] == '\t' || line[i] == '\r')) ++i;
        if (i >= line.size() || line[i] == '#') break;
        size_t start = i;
        while (i < line.size() && line[i] != ' ' && line[i] != '\t' && line[i] != '\r' &&
               line[i] != '#')
            ++i;
        toks.push_back(line.substr(start, i - start));
    }
    return toks;
}

[[noreturn]] void parse_fail(const std::string& path, int line, const std::string& msg) {
    fail(path + ":" + std::to_string(line) + ": " + msg);
}

double parse_num(const std::string& tok, const std::string& path, int line) {
    double value = 0.0;
    auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), value);
    if (ec != std::errc() || ptr != tok.data() + tok.size())
        parse_fail(path, line, "expected number, got '" + tok + "'");
    return value;
}

int parse_int(const std::string& tok, const std::string& path, int line) {
    int value = 0;
    auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), value);
    if (ec != std::errc() || ptr != tok.data() + tok.size())
        parse_fail(path, line, "expected integer, got '" + tok + "'");
    return value;
}

Mat4 parse_mat4(const std::vector<std::string>& toks, size_t offset, const std::string& path,
                int line) {
    Mat4 m;
    for (int i = 0; i < 16; ++i) m.m[i / 4][i % 4] = parse_num(toks[offset + i], path, line);
    return m;
}

void append_num(std::string& out, double v) {
    char buf[40];
    // %.17g round-trips doubles exactly, keeping save/load/save byte-stable.
    std::snprintf(buf, sizeof buf, "%.17g", v);
    out += buf;
}

// ---------------------------------------------------------------------------
// Rasterization

// Homogeneous clip-space vertex with its view-space position carried along
// (needed for the depth term after clipping).
struct ClipVert {
    Vec4 clip;
    Vec3 view;
};

ClipVert lerp_vert(const ClipVert& a, const ClipVert& b, double t) {
    ClipVert r;
    r.clip.x = a.clip.x + (b.clip.x - a.clip.x) * t;
    r.clip.y = a.clip.y + (b.clip.y - a.clip.y) * t;
    r.clip.z = a.clip.z + (b.clip.z - a.clip.z) * t;
    r.clip.w = a.clip.w + (b.clip.w - a.clip.w) * t;
    r.view = a.view + (b.view - a.view) * t;
    return r;
}

// Sutherland-Hodgman against one half-space given by a signed distance.
template <typename DistFn>
int clip_half_space(const ClipVert* in, int n, ClipVert* out, DistFn dist) {
    int m = 0;
    for (int i = 0; i < n; ++i) {
        const ClipVert& a = in[i];
        const ClipVert& b = in[(i + 1) % n];
        double da = dist(a);
        double db = dist(b);
        if (da >= 0) out[m++] = a;
        if ((da >= 0) != (db >= 0)) out[m++] = lerp_vert(a, b, da / (da - db));
    }
    return m;
}

constexpr double kWEps = 1e-9;

struct ScreenVert {
    double sx, sy;  // continuous screen coordinates
    double inv_w;   // 1 / clip.w
    double d;       // positive view-space depth (-view.z)
};

ScreenVert project_vert(const ClipVert& v, int width, int height) {
    ScreenVert s;
    s.inv_w = 1.0 / v.clip.w;
    double nx = v.clip.x * s.inv_w;
    double ny = v.clip.y * s.inv_w;
    s.sx = (nx + 1.0) * 0.5 * width;
    s.sy = (1.0 - ny) * 0.5 * height;
    s.d = -v.view.z;
    return s;
}

double edge_fn(double ax, double ay, double bx, double by, double px, double py) {
    return (bx - ax) * (py - ay) - (by - ay) * (px - ax);
}

// Boundary ownership for screen-space edges (y grows downward): an edge on
// the shared border belongs to the triangle for which it is a top or left
// edge, so adjacent triangles never both claim a pixel.
bool edge_is_top_left(const ScreenVert& a, const ScreenVert& b) {
    if (a.sy == b.sy) return b.sx > a.sx; // horizontal: interior below => top
    return b.sy > a.sy;                   // descending in y-down => left
}

void raster_triangle(RgbFrame& frame, std::vector<double>& zbuf, ScreenVert v0, ScreenVert v1,
                     ScreenVert v2, const Rgb& base) {
    double area2 = (v1.sx - v0.sx) * (v2.sy - v0.sy) - (v1.sy - v0.sy) * (v2.sx - v0.sx);
    if (area2 == 0) return;
    if (area2 < 0) {
        std::swap(v1, v2);
        area2 = -area2;
    }

    int W = frame.width, H = frame.height;
    double minx = std::min({v0.sx, v1.sx, v2.sx});
    double maxx = std::max({v0.sx, v1.sx, v2.sx});
    double miny = std::min({v0.sy, v1.sy, v2.sy});
    double maxy = std::max({v0.sy, v1.sy, v2.sy});
    int x0 = std::max(0, int(std::floor(minx)));
    int x1 = std::min(W - 1, int(std::ceil(maxx)));
    int y0 = std::max(0, int(std::floor(miny)));
    int y1 = std::min(H - 1, int(std::ceil(maxy)));

    bool tl0 = edge_is_top_left(v1, v2);
    bool tl1 = edge_is_top_left(v2, v0);
    bool tl2 = edge_is_top_left(v0, v1);

    for (int y = y0; y <= y1; ++y) {
        double py = y + 0.5;
        for (int x = x0; x <= x1; ++x) {
            double px = x + 0.5;
            // Edge functions are evaluated directly per pixel (no incremental
            // stepping) so coverage is an exact function of the vertex data.
            double e0 = edge_fn(v1.sx, v1.sy, v2.sx, v2.sy, px, py);
            double e1 = edge_fn(v2.sx, v2.sy, v0.sx, v0.sy, px, py);
            double e2 = edge_fn(v0.sx, v0.sy, v1.sx, v1.sy, px, py);
            bool in0 = e0 > 0 || (e0 == 0 && tl0);
            bool in1 = e1 > 0 || (e1 == 0 && tl1);
            bool in2 = e2 > 0 || (e2 == 0 && tl2);
            if (!in0 || !in1 || !in2) continue;

            double l0 = e0 / area2, l1 = e1 / area2, l2 = e2 / area2;
            double denom = l0 * v0.inv_w + l1 * v1.inv_w + l2 * v2.inv_w;
            double depth = (l0 * v0.d * v0.inv_w + l1 * v1.d * v1.inv_w + l2 * v2.d * v2.inv_w) /
                           denom;

            size_t zi = size_t(y) * W + x;
            if (depth < zbuf[zi]) {
                zbuf[zi] = depth;
                double atten = std::clamp(1.0 - depth / kShadingFar, 0.2, 1.0);
                uint8_t* p = frame.at(x, y);
                p[0] = clamp_u8(base[0] * atten);
                p[1] = clamp_u8(base[1] * atten);
                p[2] = clamp_u8(base[2] * atten);
            }
        }
    }
}

} // namespace

SceneModel load_scene(const std::string& path) {
    std::ifstream in(path);
    if (!in) fail("cannot open scene file: " + path);

    SceneModel scene;
    bool have_resolution = false;
    GameObject* open = nullptr;

    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        auto toks = split_tokens(line);
        if (toks.empty()) continue;
        const std::string& kw = toks[0];

        if (kw == "resolution") {
            if (toks.size() != 5) parse_fail(path, lineno, "resolution expects 4 values");
            scene.rgb_width = parse_int(toks[1], path, lineno);
            scene.rgb_height = parse_int(toks[2], path, lineno);
            scene.state_width = parse_int(toks[3], path, lineno);
            scene.state_height = parse_int(toks[4], path, lineno);
            if (scene.rgb_width <= 0 || scene.rgb_height <= 0 || scene.state_width <= 0 ||
                scene.state_height <= 0)
                parse_fail(path, lineno, "resolution values must be positive");
            have_resolution = true;
        } else if (kw == "palette") {
            if (toks.size() != 5) parse_fail(path, lineno, "palette expects index r g b");
            int idx = parse_int(toks[1], path, lineno);
            int r = parse_int(toks[2], path, lineno);
            int g = parse_int(toks[3], path, lineno);
            int b = parse_int(toks[4], path, lineno);
            if (idx < 0 || idx > 254)
                parse_fail(path, lineno, "palette index must be in [0, 254]");
            if (r < 0 || r > 255 || g < 0 || g > 255 || b < 0 || b > 255)
                parse_fail(path, lineno, "palette components must be in [0, 255]");
            scene.palette[idx] = {uint8_t(r), uint8_t(g), uint8_t(b)};
        } else if (kw == "object") {
            if (toks.size() != 3) parse_fail(path, lineno, "object expects id and color index");
            GameObject obj;
            obj.id = parse_int(toks[1], path, lineno);
            obj.color_index = parse_int(toks[2], path, lineno);
            for (const auto& existing : scene.objects)
                if (existing.id == obj.id)
                    parse_fail(path, lineno, "duplicate object id " + std::to_string(obj.id));
            scene.objects.push_back(std::move(obj));
            open = &scene.objects.back();
        } else if (kw == "v") {
            if (!open) parse_fail(path, lineno, "vertex record outside of an object");
            if (toks.size() != 4) parse_fail(path, lineno, "v expects 3 coordinates");
            open->vertices.push_back({parse_num(toks[1], path, lineno),
                                      parse_num(toks[2], path, lineno),
                                      parse_num(toks[3], path, lineno)});
        } else if (kw == "t") {
            if (!open) parse_fail(path, lineno, "triangle record outside of an object");
            if (toks.size() != 4) parse_fail(path, lineno, "t expects 3 vertex indices");
            open->triangles.push_back({parse_int(toks[1], path, lineno),
                                       parse_int(toks[2], path, lineno),
                                       parse_int(toks[3], path, lineno)});
        } else if (kw == "T") {
            if (!open) parse_fail(path, lineno, "transform record outside of an object");
            if (toks.size() != 17) parse_fail(path, lineno, "T expects 16 values");
            open->transforms.push_back(parse_mat4(toks, 1, path, lineno));
        } else if (kw == "camera") {
            if (toks.size() != 33) parse_fail(path, lineno, "camera expects 32 values");
            CameraPose pose;
            pose.frame_index = int(scene.camera_path.size());
            pose.view = parse_mat4(toks, 1, path, lineno);
            pose.projection = parse_mat4(toks, 17, path, lineno);
            scene.camera_path.push_back(pose);
        } else {
            parse_fail(path, lineno, "unknown record '" + kw + "'");
        }
    }

    (void)have_resolution; // defaults apply when the record is absent

    // Validation pass: record order is free-form, so referential checks run
    // only after the whole file is read.
    for (auto& obj : scene.objects) {
        if (!scene.palette.count(obj.color_index))
            fail(path + ": unknown color index " + std::to_string(obj.color_index) +
                 " (object " + std::to_string(obj.id) + ")");
        for (const auto& tri : obj.triangles) {
            int n = int(obj.vertices.size());
            if (tri.a < 0 || tri.a >= n || tri.b < 0 || tri.b >= n || tri.c < 0 || tri.c >= n)
                fail(path + ": triangle vertex index out of range (object " +
                     std::to_string(obj.id) + ")");
        }
        if (obj.transforms.empty()) obj.transforms.push_back(Mat4::identity());
        if (!obj.vertices.empty()) {
            obj.aabb.min = obj.aabb.max = obj.vertices[0];
            for (const auto& v : obj.vertices) obj.aabb.expand(v);
        }
    }
    for (const auto& pose : scene.camera_path) {
        if (determinant(pose.view) == 0.0)
            fail(path + ": camera view matrix not invertible (frame " +
                 std::to_string(pose.frame_index) + ")");
        if (determinant(pose.projection) == 0.0)
            fail(path + ": camera projection matrix not invertible (frame " +
                 std::to_string(pose.frame_index) + ")");
    }
    return scene;
}

void save_scene(const SceneModel& scene, const std::string& path) {
    std::string out;
    out += "# statecast scene\n";
    out += "resolution " + std::to_string(scene.rgb_width) + " " +
           std::to_string(scene.rgb_height) + " " + std::to_string(scene.state_width) + " " +
           std::to_string(scene.state_height) + "\n";
    for (const auto& [idx, rgb] : scene.palette) {
        out += "palette " + std::to_string(idx) + " " + std::to_string(rgb[0]) + " " +
               std::to_string(rgb[1]) + " " + std::to_string(rgb[2]) + "\n";
    }
    auto append_mat = [&](const Mat4& m) {
        for (int i = 0; i < 16; ++i) {
            out += ' ';
            append_num(out, m.m[i / 4][i % 4]);
        }
    };
    for (const auto& obj : scene.objects) {
        out += "object " + std::to_string(obj.id) + " " + std::to_string(obj.color_index) + "\n";
        for (const auto& v : obj.vertices) {
            out += "v";
            out += ' ';
            append_num(out, v.x);
            out += ' ';
            append_num(out, v.y);
            out += ' ';
            append_num(out, v.z);
            out += "\n";
        }
        for (const auto& t : obj.triangles)
            out += "t " + std::to_string(t.a) + " " + std::to_string(t.b) + " " +
                   std::to_string(t.c) + "\n";
        for (const auto& m : obj.transforms) {
            out += "T";
            append_mat(m);
            out += "\n";
        }
    }
    for (const auto& pose : scene.camera_path) {
        out += "camera";
        append_mat(pose.view);
        append_mat(pose.projection);
        out += "\n";
    }
    write_file_bytes(path, out);
}

RgbFrame render_ground_truth(const SceneModel& scene, int frame) {
    if (frame < 0 || size_t(frame) >= scene.camera_path.size())
        fail("render: frame " + std::to_string(frame) + " outside camera path");
    const CameraPose& pose = scene.camera_path[frame];

    RgbFrame out(scene.rgb_width, scene.rgb_height);
    out.fill(kBackgroundGray, kBackgroundGray, kBackgroundGray);
    std::vector<double> zbuf(size_t(scene.rgb_width) * scene.rgb_height, 1e300);

    for (const auto& obj : scene.objects) {
        const Mat4 mv = mul(pose.view, obj.transform_at(frame));
        const Rgb& base = scene.palette.at(obj.color_index);
        for (const auto& tri : obj.triangles) {
            ClipVert poly[8], tmp[8];
            for (int i = 0; i < 3; ++i) {
                const Vec3& lv = obj.vertices[i == 0 ? tri.a : (i == 1 ? tri.b : tri.c)];
                Vec4 view = mul(mv, to_vec4(lv));
                poly[i].view = {view.x, view.y, view.z};
                poly[i].clip = mul(pose.projection, view);
            }
            // Drop the region behind the camera, then clip at the near plane.
            int n = clip_half_space(poly, 3, tmp,
                                    [](const ClipVert& v) { return v.clip.w - kWEps; });
            n = clip_half_space(tmp, n, poly,
                                [](const ClipVert& v) { return v.clip.z + v.clip.w; });
            if (n < 3) continue;

            ScreenVert sv0 = project_vert(poly[0], out.width, out.height);
            for (int i = 1; i + 1 < n; ++i) {
                ScreenVert sv1 = project_vert(poly[i], out.width, out.height);
                ScreenVert sv2 = project_vert(poly[i + 1], out.width, out.height);
                raster_triangle(out, zbuf, sv0, sv1, sv2, base);
            }
        }
    }
    return out;
}

} // namespace statecast
