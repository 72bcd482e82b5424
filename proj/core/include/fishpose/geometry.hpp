#pragma once

#include <array>
#include <cmath>

#include "fishpose/errors.hpp"

namespace fishpose {

struct Vec3 {
    double x{0.0};
    double y{0.0};
    double z{0.0};

    Vec3() = default;
    Vec3(double x_, double y_, double z_) : x(x_), y(y_), z(z_) {}

    Vec3 operator+(const Vec3& o) const { return {x + o.x, y + o.y, z + o.z}; }
    Vec3 operator-(const Vec3& o) const { return {x - o.x, y - o.y, z - o.z}; }
    Vec3 operator*(double s) const { return {x * s, y * s, z * s}; }
    Vec3 operator-() const { return {-x, -y, -z}; }

    double dot(const Vec3& o) const { return x * o.x + y * o.y + z * o.z; }
    Vec3 cross(const Vec3& o) const {
        return {y * o.z - z * o.y, z * o.x - x * o.z, x * o.y - y * o.x};
    }
    double squaredNorm() const { return dot(*this); }
    double norm() const { return std::sqrt(squaredNorm()); }

    /// Unit vector in the same direction. Throws on (near-)zero input.
    Vec3 normalized() const;

    bool isFinite() const {
        return std::isfinite(x) && std::isfinite(y) && std::isfinite(z);
    }
};

inline Vec3 operator*(double s, const Vec3& v) { return v * s; }

/// Unit quaternion in (w, x, y, z) order. Construction normalizes the input
/// and rejects vectors whose norm is not already close to 1.
struct UnitQuaternion {
    double w{1.0};
    double x{0.0};
    double y{0.0};
    double z{0.0};

    UnitQuaternion() = default;
    UnitQuaternion(double w_, double x_, double y_, double z_);

    static UnitQuaternion identity() { return {}; }
    static UnitQuaternion fromAxisAngle(const Vec3& axis, double angle_rad);

    /// Hamilton product: (a * b) rotates by b first, then a.
    UnitQuaternion operator*(const UnitQuaternion& o) const;

    UnitQuaternion conjugate() const { return makeUnchecked(w, -x, -y, -z); }
    UnitQuaternion negated() const { return makeUnchecked(-w, -x, -y, -z); }

    /// Representative with w >= 0 (q and -q are the same rotation).
    UnitQuaternion canonical() const { return w < 0.0 ? negated() : *this; }

    double dot(const UnitQuaternion& o) const {
        return w * o.w + x * o.x + y * o.y + z * o.z;
    }

    Vec3 rotate(const Vec3& v) const;

private:
    static UnitQuaternion makeUnchecked(double w, double x, double y, double z) {
        UnitQuaternion q;
        q.w = w;
        q.x = x;
        q.y = y;
        q.z = z;
        return q;
    }
};

/// Row-major 3x3 rotation matrix.
struct RotationMatrix {
    std::array<double, 9> m{1, 0, 0, 0, 1, 0, 0, 0, 1};

    static RotationMatrix identity() { return {}; }
    static RotationMatrix fromRows(const Vec3& r0, const Vec3& r1, const Vec3& r2) {
        RotationMatrix R;
        R.m = {r0.x, r0.y, r0.z, r1.x, r1.y, r1.z, r2.x, r2.y, r2.z};
        return R;
    }

    double operator()(int row, int col) const { return m[3 * row + col]; }
    double& operator()(int row, int col) { return m[3 * row + col]; }

    Vec3 row(int i) const { return {m[3 * i], m[3 * i + 1], m[3 * i + 2]}; }
    Vec3 col(int i) const { return {m[i], m[i + 3], m[i + 6]}; }

    Vec3 operator*(const Vec3& v) const {
        return {row(0).dot(v), row(1).dot(v), row(2).dot(v)};
    }
    RotationMatrix operator*(const RotationMatrix& o) const;

    RotationMatrix transpose() const;
    double determinant() const;

    /// max-norm of M*M^T - I.
    double orthonormalityResidual() const;
};

/// q -> 3x3 matrix. quat_to_matrix(q) == quat_to_matrix(-q).
RotationMatrix quatToMatrix(const UnitQuaternion& q);

/// Matrix -> canonical quaternion (w >= 0). Throws InvalidInputError when M is
/// not orthonormal within 1e-6.
UnitQuaternion matrixToQuat(const RotationMatrix& M);

/// Geodesic distance on SO(3): 2*acos(|q1.q2|), in [0, pi].
double geodesicAngle(const UnitQuaternion& q1, const UnitQuaternion& q2);

/// Rigid transform: p_out = R * p_in + t.
struct Pose6D {
    UnitQuaternion rotation;
    Vec3 translation;

    Pose6D() = default;
    Pose6D(const UnitQuaternion& q, const Vec3& t);

    static Pose6D identity() { return {}; }

    Vec3 transform(const Vec3& p) const { return rotation.rotate(p) + translation; }
    Pose6D compose(const Pose6D& o) const;
    Pose6D inverse() const;
};

} // namespace fishpose
