#pragma once

#include <array>
#include <cmath>

namespace statecast {

// Linear algebra for the renderer and projection pipeline.
//
// Conventions, shared by everything downstream (and by the test oracles):
//   * right-handed world space, camera looks down -z in view space
//   * Mat4 is row-major, m(r, c), and acts on column vectors: out = M * v
//   * clip -> NDC via perspective divide, NDC x/y/z in [-1, 1]
//   * screen x = (ndc.x + 1) * 0.5 * width
//     screen y = (1 - ndc.y) * 0.5 * height   (y flipped, origin top-left)

struct Vec3 {
    double x = 0, y = 0, z = 0;

    Vec3 operator+(const Vec3& o) const { return {x + o.x, y + o.y, z + o.z}; }
    Vec3 operator-(const Vec3& o) const { return {x - o.x, y - o.y, z - o.z}; }
    Vec3 operator*(double s) const { return {x * s, y * s, z * s}; }
};

inline double dot(const Vec3& a, const Vec3& b) { return a.x * b.x + a.y * b.y + a.z * b.z; }
inline Vec3 cross(const Vec3& a, const Vec3& b) {
    return {a.y * b.z - a.z * b.y, a.z * b.x - a.x * b.z, a.x * b.y - a.y * b.x};
}
inline double length(const Vec3& v) { return std::sqrt(dot(v, v)); }
inline Vec3 normalized(const Vec3& v) {
    double len = length(v);
    return len > 0 ? v * (1.0 / len) : v;
}

struct Vec4 {
    double x = 0, y = 0, z = 0, w = 0;
};

struct Mat4 {
    // m[row][col]
    std::array<std::array<double, 4>, 4> m{};

    static Mat4 identity() {
        Mat4 r;
        for (int i = 0; i < 4; ++i) r.m[i][i] = 1.0;
        return r;
    }

    double& operator()(int r, int c) { return m[r][c]; }
    double operator()(int r, int c) const { return m[r][c]; }

    bool operator==(const Mat4& o) const { return m == o.m; }
};

inline Mat4 mul(const Mat4& a, const Mat4& b) {
    Mat4 r;
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j) {
            double s = 0.0;
            for (int k = 0; k < 4; ++k) s += a.m[i][k] * b.m[k][j];
            r.m[i][j] = s;
        }
    return r;
}

inline Vec4 mul(const Mat4& a, const Vec4& v) {
    Vec4 r;
    r.x = a.m[0][0] * v.x + a.m[0][1] * v.y + a.m[0][2] * v.z + a.m[0][3] * v.w;
    r.y = a.m[1][0] * v.x + a.m[1][1] * v.y + a.m[1][2] * v.z + a.m[1][3] * v.w;
    r.z = a.m[2][0] * v.x + a.m[2][1] * v.y + a.m[2][2] * v.z + a.m[2][3] * v.w;
    r.w = a.m[3][0] * v.x + a.m[3][1] * v.y + a.m[3][2] * v.z + a.m[3][3] * v.w;
    return r;
}

inline Vec4 to_vec4(const Vec3& v, double w = 1.0) { return {v.x, v.y, v.z, w}; }

inline Mat4 translation(const Vec3& t) {
    Mat4 r = Mat4::identity();
    r.m[0][3] = t.x;
    r.m[1][3] = t.y;
    r.m[2][3] = t.z;
    return r;
}

inline Mat4 scaling(double sx, double sy, double sz) {
    Mat4 r = Mat4::identity();
    r.m[0][0] = sx;
    r.m[1][1] = sy;
    r.m[2][2] = sz;
    return r;
}

inline Mat4 rotation_y(double radians) {
    Mat4 r = Mat4::identity();
    double c = std::cos(radians), s = std::sin(radians);
    r.m[0][0] = c;
    r.m[0][2] = s;
    r.m[2][0] = -s;
    r.m[2][2] = c;
    return r;
}

inline Mat4 rotation_x(double radians) {
    Mat4 r = Mat4::identity();
    double c = std::cos(radians), s = std::sin(radians);
    r.m[1][1] = c;
    r.m[1][2] = -s;
    r.m[2][1] = s;
    r.m[2][2] = c;
    return r;
}

// View matrix with the camera at `eye` looking at `target`; forward maps to -z.
inline Mat4 look_at(const Vec3& eye, const Vec3& target, const Vec3& up) {
    Vec3 f = normalized(target - eye);
    Vec3 s = normalized(cross(f, up));
    Vec3 u = cross(s, f);
    Mat4 r = Mat4::identity();
    r.m[0][0] = s.x;  r.m[0][1] = s.y;  r.m[0][2] = s.z;  r.m[0][3] = -dot(s, eye);
    r.m[1][0] = u.x;  r.m[1][1] = u.y;  r.m[1][2] = u.z;  r.m[1][3] = -dot(u, eye);
    r.m[2][0] = -f.x; r.m[2][1] = -f.y; r.m[2][2] = -f.z; r.m[2][3] = dot(f, eye);
    return r;
}

// Symmetric-frustum perspective with NDC z in [-1, 1]; clip w equals the
// positive view-space distance, which the rasterizer relies on.
inline Mat4 perspective(double fov_y_radians, double aspect, double znear, double zfar) {
    double f = 1.0 / std::tan(fov_y_radians * 0.5);
    Mat4 r;
    r.m[0][0] = f / aspect;
    r.m[1][1] = f;
    r.m[2][2] = (zfar + znear) / (znear - zfar);
    r.m[2][3] = 2.0 * zfar * znear / (znear - zfar);
    r.m[3][2] = -1.0;
    return r;
}

inline double det3(double a, double b, double c, double d, double e, double f,
                   double g, double h, double i) {
    return a * (e * i - f * h) - b * (d * i - f * g) + c * (d * h - e * g);
}

inline double determinant(const Mat4& a) {
    const auto& m = a.m;
    double d = 0.0;
    d += m[0][0] * det3(m[1][1], m[1][2], m[1][3], m[2][1], m[2][2], m[2][3], m[3][1], m[3][2], m[3][3]);
    d -= m[0][1] * det3(m[1][0], m[1][2], m[1][3], m[2][0], m[2][2], m[2][3], m[3][0], m[3][2], m[3][3]);
    d += m[0][2] * det3(m[1][0], m[1][1], m[1][3], m[2][0], m[2][1], m[2][3], m[3][0], m[3][1], m[3][3]);
    d -= m[0][3] * det3(m[1][0], m[1][1], m[1][2], m[2][0], m[2][1], m[2][2], m[3][0], m[3][1], m[3][2]);
    return d;
}

struct Aabb {
    Vec3 min{0, 0, 0};
    Vec3 max{0, 0, 0};

    void expand(const Vec3& p) {
        min.x = std::min(min.x, p.x);
        min.y = std::min(min.y, p.y);
        min.z = std::min(min.z, p.z);
        max.x = std::max(max.x, p.x);
        max.y = std::max(max.y, p.y);
        max.z = std::max(max.z, p.z);
    }

    std::array<Vec3, 8> corners() const {
        return {Vec3{min.x, min.y, min.z}, Vec3{max.x, min.y, min.z},
                Vec3{min.x, max.y, min.z}, Vec3{max.x, max.y, min.z},
                Vec3{min.x, min.y, max.z}, Vec3{max.x, min.y, max.z},
                Vec3{min.x, max.y, max.z}, Vec3{max.x, max.y, max.z}};
    }
};

} // namespace statecast
