#pragma once

#include <Eigen/Dense>
#include <Eigen/Geometry>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <optional>

// View convention: -Z is forward, +X is right, +Y is up. Yaw is positive to the
// right, pitch is positive upwards. All public angles are in degrees.
namespace ftvr {

template <typename Scalar>
using Vec3 = Eigen::Matrix<Scalar, 3, 1>;

template <typename Scalar>
using Rotation3 = Eigen::Matrix<Scalar, 3, 3>;

template <typename Scalar>
using Isometry3 = Eigen::Transform<Scalar, 3, Eigen::Isometry>;

template <typename Scalar>
constexpr Scalar deg_to_rad(Scalar deg) {
    return deg * std::numbers::pi_v<Scalar> / Scalar(180);
}

template <typename Scalar>
constexpr Scalar rad_to_deg(Scalar rad) {
    return rad * Scalar(180) / std::numbers::pi_v<Scalar>;
}

template <typename Scalar>
Vec3<Scalar> forward_axis() {
    return Vec3<Scalar>(0, 0, -1);
}

/// Unit view direction for a yaw/pitch pair.
template <typename Scalar>
Vec3<Scalar> direction_from_angles(Scalar yaw_deg, Scalar pitch_deg) {
    const Scalar yaw = deg_to_rad(yaw_deg);
    const Scalar pitch = deg_to_rad(pitch_deg);
    return Vec3<Scalar>(std::cos(pitch) * std::sin(yaw), std::sin(pitch),
                        -std::cos(pitch) * std::cos(yaw));
}

/// Inverse of direction_from_angles for a non-zero vector. Returns (yaw, pitch).
template <typename Scalar>
Eigen::Matrix<Scalar, 2, 1> angles_from_direction(const Vec3<Scalar>& dir) {
    const Vec3<Scalar> d = dir.normalized();
    const Scalar pitch = std::asin(std::clamp(d.y(), Scalar(-1), Scalar(1)));
    const Scalar yaw = std::atan2(d.x(), -d.z());
    return {rad_to_deg(yaw), rad_to_deg(pitch)};
}

/// Rotation taking the forward axis onto direction_from_angles(yaw, pitch)
/// while keeping the local x axis horizontal.
template <typename Scalar>
Rotation3<Scalar> head_rotation(Scalar yaw_deg, Scalar pitch_deg) {
    using AngleAxis = Eigen::AngleAxis<Scalar>;
    return (AngleAxis(-deg_to_rad(yaw_deg), Vec3<Scalar>::UnitY()) *
            AngleAxis(deg_to_rad(pitch_deg), Vec3<Scalar>::UnitX()))
        .toRotationMatrix();
}

template <typename Scalar>
struct Interval {
    Scalar lo;
    Scalar hi;

    Scalar width() const { return hi - lo; }
};

template <typename Scalar>
struct Aabb {
    Vec3<Scalar> min = Vec3<Scalar>::Constant(std::numeric_limits<Scalar>::infinity());
    Vec3<Scalar> max = Vec3<Scalar>::Constant(-std::numeric_limits<Scalar>::infinity());

    static Aabb empty() { return {}; }

    static Aabb from_points(const Vec3<Scalar>& a, const Vec3<Scalar>& b) {
        Aabb box;
        box.extend(a);
        box.extend(b);
        return box;
    }

    bool is_empty() const { return (min.array() > max.array()).any(); }

    void extend(const Vec3<Scalar>& p) {
        min = min.cwiseMin(p);
        max = max.cwiseMax(p);
    }

    void extend(const Aabb& other) {
        if (other.is_empty()) return;
        min = min.cwiseMin(other.min);
        max = max.cwiseMax(other.max);
    }

    bool contains(const Vec3<Scalar>& p) const {
        return (p.array() >= min.array()).all() && (p.array() <= max.array()).all();
    }

    /// An empty box is contained in every box.
    bool contains(const Aabb& other) const {
        if (other.is_empty()) return true;
        if (is_empty()) return false;
        return (other.min.array() >= min.array()).all() &&
               (other.max.array() <= max.array()).all();
    }

    /// Closed-box overlap; boxes that only touch on a face count as overlapping.
    bool overlaps(const Aabb& other) const {
        if (is_empty() || other.is_empty()) return false;
        return (min.array() <= other.max.array()).all() &&
               (other.min.array() <= max.array()).all();
    }

    Vec3<Scalar> center() const { return (min + max) / Scalar(2); }
};

template <typename Scalar>
struct Ray {
    Vec3<Scalar> origin = Vec3<Scalar>::Zero();
    Vec3<Scalar> direction = forward_axis<Scalar>();
    Scalar t_min = 0;
    Scalar t_max = 100;

    Vec3<Scalar> at(Scalar t) const { return origin + t * direction; }
};

/// Slab test. Returns the part of [t_min, t_max] inside the closed box.
template <typename Scalar>
std::optional<Interval<Scalar>> ray_aabb_clip(const Ray<Scalar>& ray, const Aabb<Scalar>& box) {
    if (box.is_empty()) return std::nullopt;
    Scalar lo = ray.t_min;
    Scalar hi = ray.t_max;
    for (int axis = 0; axis < 3; ++axis) {
        const Scalar o = ray.origin[axis];
        const Scalar d = ray.direction[axis];
        if (d == Scalar(0)) {
            if (o < box.min[axis] || o > box.max[axis]) return std::nullopt;
            continue;
        }
        const Scalar inv = Scalar(1) / d;
        Scalar t0 = (box.min[axis] - o) * inv;
        Scalar t1 = (box.max[axis] - o) * inv;
        if (t0 > t1) std::swap(t0, t1);
        lo = std::max(lo, t0);
        hi = std::min(hi, t1);
        if (lo > hi) return std::nullopt;
    }
    return Interval<Scalar>{lo, hi};
}

/// Moller-Trumbore. Edges and vertices count as hits, with a few ulps of slack
/// so that a ray through an edge shared by two triangles hits at least one of
/// them. Degenerate triangles never hit.
template <typename Scalar>
std::optional<Scalar> ray_triangle(const Ray<Scalar>& ray, const Vec3<Scalar>& v0,
                                   const Vec3<Scalar>& v1, const Vec3<Scalar>& v2) {
    const Vec3<Scalar> e1 = v1 - v0;
    const Vec3<Scalar> e2 = v2 - v0;
    const Scalar area2 = e1.cross(e2).norm();
    if (area2 <= std::numeric_limits<Scalar>::epsilon() * (e1.squaredNorm() + e2.squaredNorm())) {
        return std::nullopt;
    }
    const Vec3<Scalar> p = ray.direction.cross(e2);
    const Scalar det = e1.dot(p);
    // Ray parallel to the triangle plane: coplanar grazing rays are treated as misses.
    if (std::abs(det) <= std::numeric_limits<Scalar>::epsilon() * area2 * ray.direction.norm()) {
        return std::nullopt;
    }
    const Scalar inv_det = Scalar(1) / det;
    const Scalar slack = 64 * std::numeric_limits<Scalar>::epsilon();
    const Vec3<Scalar> s = ray.origin - v0;
    const Scalar u = s.dot(p) * inv_det;
    if (u < -slack || u > Scalar(1) + slack) return std::nullopt;
    const Vec3<Scalar> q = s.cross(e1);
    const Scalar v = ray.direction.dot(q) * inv_det;
    if (v < -slack || u + v > Scalar(1) + slack) return std::nullopt;
    const Scalar t = e2.dot(q) * inv_det;
    if (t < ray.t_min || t > ray.t_max) return std::nullopt;
    return t;
}

using Vec3d = Vec3<double>;
using Aabbd = Aabb<double>;
using Rayd = Ray<double>;
using Isometry3d = Isometry3<double>;

}  // namespace ftvr
