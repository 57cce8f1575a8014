// Copyright 2026 The Foveascan Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef FOVEASCAN_GEOMETRY_HPP
#define FOVEASCAN_GEOMETRY_HPP

#include <cmath>
#include <optional>

namespace foveascan {

constexpr double kPi = 3.14159265358979323846;

inline double deg2rad(double d) { return d * (kPi / 180.0); }
inline double rad2deg(double r) { return r * (180.0 / kPi); }

struct Vec3 {
    double x = 0.0, y = 0.0, z = 0.0;
};

inline Vec3 operator+(const Vec3& a, const Vec3& b) { return {a.x + b.x, a.y + b.y, a.z + b.z}; }
inline Vec3 operator-(const Vec3& a, const Vec3& b) { return {a.x - b.x, a.y - b.y, a.z - b.z}; }
inline Vec3 operator*(double s, const Vec3& v) { return {s * v.x, s * v.y, s * v.z}; }
inline Vec3 operator*(const Vec3& v, double s) { return s * v; }
inline Vec3 operator-(const Vec3& v) { return {-v.x, -v.y, -v.z}; }

inline double dot(const Vec3& a, const Vec3& b) { return a.x * b.x + a.y * b.y + a.z * b.z; }

inline Vec3 cross(const Vec3& a, const Vec3& b) {
    return {a.y * b.z - a.z * b.y, a.z * b.x - a.x * b.z, a.x * b.y - a.y * b.x};
}

inline double norm(const Vec3& v) { return std::sqrt(dot(v, v)); }

inline Vec3 normalized(const Vec3& v) {
    const double n = norm(v);
    return {v.x / n, v.y / n, v.z / n};
}

/// Angle between two vectors in degrees, in [0, 180]. The atan2 form
/// stays accurate for nearly parallel vectors where acos loses digits.
inline double angle_deg(const Vec3& a, const Vec3& b) {
    const Vec3 c = cross(a, b);
    return rad2deg(std::atan2(norm(c), dot(a, b)));
}

/// Rodrigues rotation of v about a unit axis.
inline Vec3 rotate(const Vec3& v, const Vec3& unit_axis, double angle_rad) {
    const double c = std::cos(angle_rad);
    const double s = std::sin(angle_rad);
    return c * v + s * cross(unit_axis, v) + (1.0 - c) * dot(unit_axis, v) * unit_axis;
}

/// Mirror reflection of v off a surface with unit normal n.
inline Vec3 reflect(const Vec3& v, const Vec3& unit_normal) {
    return v - (2.0 * dot(unit_normal, v)) * unit_normal;
}

/// Right-handed orthonormal frame: local (x, y, z) map to (ex, ey, ez).
struct Frame {
    Vec3 origin{};
    Vec3 ex{1, 0, 0};
    Vec3 ey{0, 1, 0};
    Vec3 ez{0, 0, 1};

    Vec3 dir_to_world(const Vec3& v) const { return v.x * ex + v.y * ey + v.z * ez; }
    Vec3 to_world(const Vec3& v) const { return origin + dir_to_world(v); }
    Vec3 dir_to_local(const Vec3& v) const { return {dot(v, ex), dot(v, ey), dot(v, ez)}; }
    Vec3 to_local(const Vec3& p) const { return dir_to_local(p - origin); }
};

/// Planar rectangle: center, unit normal, unit in-plane u axis.
/// The in-plane v axis is normal x u.
struct Quad {
    Vec3 center{};
    Vec3 normal{1, 0, 0};
    Vec3 u_axis{0, 1, 0};
    double half_width = 0.5;   // along u_axis
    double half_height = 0.5;  // along v_axis

    Vec3 v_axis() const { return cross(normal, u_axis); }
    Vec3 corner(int i) const {
        const double su = (i == 0 || i == 3) ? -1.0 : 1.0;
        const double sv = (i < 2) ? -1.0 : 1.0;
        return center + su * half_width * u_axis + sv * half_height * v_axis();
    }
};

struct QuadHit {
    double t;  // ray parameter (metres for unit dir)
    double u;  // in-plane offset along u_axis
    double v;  // in-plane offset along v_axis
};

inline std::optional<QuadHit> intersect_quad(const Vec3& origin, const Vec3& dir, const Quad& q) {
    const double denom = dot(dir, q.normal);
    if (std::fabs(denom) < 1e-12) return std::nullopt;
    const double t = dot(q.center - origin, q.normal) / denom;
    if (t <= 1e-9) return std::nullopt;
    const Vec3 p = origin + t * dir;
    const Vec3 d = p - q.center;
    const double u = dot(d, q.u_axis);
    const double v = dot(d, q.v_axis());
    if (std::fabs(u) > q.half_width || std::fabs(v) > q.half_height) return std::nullopt;
    return QuadHit{t, u, v};
}

/// Builds a quad facing `normal` with its u axis horizontal. Falls back
/// to the world x axis as the up reference for near-vertical normals.
inline Quad make_facing_quad(const Vec3& center, const Vec3& normal, double width, double height) {
    Quad q;
    q.center = center;
    q.normal = normalized(normal);
    const Vec3 up = (std::fabs(q.normal.z) > 0.99) ? Vec3{1, 0, 0} : Vec3{0, 0, 1};
    q.u_axis = normalized(cross(up, q.normal));
    q.half_width = width / 2.0;
    q.half_height = height / 2.0;
    return q;
}

}  // namespace foveascan

#endif  // FOVEASCAN_GEOMETRY_HPP
