#include "fishpose/geometry.hpp"

#include <algorithm>

namespace fishpose {

namespace {
constexpr double kUnitNormTol = 1e-6;
}

Vec3 Vec3::normalized() const {
    const double n = norm();
    if (n < 1e-12) {
        throw InvalidInputError("cannot normalize a near-zero vector");
    }
    return {x / n, y / n, z / n};
}

UnitQuaternion::UnitQuaternion(double w_, double x_, double y_, double z_) {
    const double n = std::sqrt(w_ * w_ + x_ * x_ + y_ * y_ + z_ * z_);
    if (!std::isfinite(n) || std::abs(n - 1.0) > kUnitNormTol) {
        throw InvalidInputError("quaternion norm deviates from 1 beyond tolerance");
    }
    w = w_ / n;
    x = x_ / n;
    y = y_ / n;
    z = z_ / n;
}

UnitQuaternion UnitQuaternion::fromAxisAngle(const Vec3& axis, double angle_rad) {
    const Vec3 a = axis.normalized();
    const double h = 0.5 * angle_rad;
    const double s = std::sin(h);
    return {std::cos(h), a.x * s, a.y * s, a.z * s};
}

UnitQuaternion UnitQuaternion::operator*(const UnitQuaternion& o) const {
    return makeUnchecked(w * o.w - x * o.x - y * o.y - z * o.z,
                         w * o.x + x * o.w + y * o.z - z * o.y,
                         w * o.y - x * o.z + y * o.w + z * o.x,
                         w * o.z + x * o.y - y * o.x + z * o.w);
}

Vec3 UnitQuaternion::rotate(const Vec3& v) const {
    // v' = v + 2w(u x v) + 2(u x (u x v)), u = (x, y, z)
    const Vec3 u{x, y, z};
    const Vec3 t = 2.0 * u.cross(v);
    return v + w * t + u.cross(t);
}

RotationMatrix RotationMatrix::operator*(const RotationMatrix& o) const {
    RotationMatrix r;
    for (int i = 0; i < 3; ++i) {
        for (int j = 0; j < 3; ++j) {
            r(i, j) = (*this)(i, 0) * o(0, j) + (*this)(i, 1) * o(1, j) +
                      (*this)(i, 2) * o(2, j);
        }
    }
    return r;
}

RotationMatrix RotationMatrix::transpose() const {
    RotationMatrix r;
    for (int i = 0; i < 3; ++i) {
        for (int j = 0; j < 3; ++j) {
            r(i, j) = (*this)(j, i);
        }
    }
    return r;
}

double RotationMatrix::determinant() const {
    return row(0).dot(row(1).cross(row(2)));
}

double RotationMatrix::orthonormalityResidual() const {
    double worst = 0.0;
    for (int i = 0; i < 3; ++i) {
        for (int j = 0; j < 3; ++j) {
            const double g = row(i).dot(row(j)) - (i == j ? 1.0 : 0.0);
            worst = std::max(worst, std::abs(g));
        }
    }
    return worst;
}

RotationMatrix quatToMatrix(const UnitQuaternion& q) {
    const double w = q.w, x = q.x, y = q.y, z = q.z;
    RotationMatrix R;
    R.m = {1 - 2 * (y * y + z * z), 2 * (x * y - w * z),     2 * (x * z + w * y),
           2 * (x * y + w * z),     1 - 2 * (x * x + z * z), 2 * (y * z - w * x),
           2 * (x * z - w * y),     2 * (y * z + w * x),     1 - 2 * (x * x + y * y)};
    return R;
}

UnitQuaternion matrixToQuat(const RotationMatrix& M) {
    if (M.orthonormalityResidual() > 1e-6 || M.determinant() < 0.0) {
        throw InvalidInputError("matrix is not a rotation within tolerance");
    }
    // Shepperd's method: pick the largest of the four squared components.
    const double t = M(0, 0) + M(1, 1) + M(2, 2);
    double w, x, y, z;
    if (t > 0.0) {
        const double s = std::sqrt(t + 1.0) * 2.0;
        w = 0.25 * s;
        x = (M(2, 1) - M(1, 2)) / s;
        y = (M(0, 2) - M(2, 0)) / s;
        z = (M(1, 0) - M(0, 1)) / s;
    } else if (M(0, 0) > M(1, 1) && M(0, 0) > M(2, 2)) {
        const double s = std::sqrt(1.0 + M(0, 0) - M(1, 1) - M(2, 2)) * 2.0;
        w = (M(2, 1) - M(1, 2)) / s;
        x = 0.25 * s;
        y = (M(0, 1) + M(1, 0)) / s;
        z = (M(0, 2) + M(2, 0)) / s;
    } else if (M(1, 1) > M(2, 2)) {
        const double s = std::sqrt(1.0 + M(1, 1) - M(0, 0) - M(2, 2)) * 2.0;
        w = (M(0, 2) - M(2, 0)) / s;
        x = (M(0, 1) + M(1, 0)) / s;
        y = 0.25 * s;
        z = (M(1, 2) + M(2, 1)) / s;
    } else {
        const double s = std::sqrt(1.0 + M(2, 2) - M(0, 0) - M(1, 1)) * 2.0;
        w = (M(1, 0) - M(0, 1)) / s;
        x = (M(0, 2) + M(2, 0)) / s;
        y = (M(1, 2) + M(2, 1)) / s;
        z = 0.25 * s;
    }
    return UnitQuaternion(w, x, y, z).canonical();
}

double geodesicAngle(const UnitQuaternion& q1, const UnitQuaternion& q2) {
    // 2*acos(|q1.q2|), evaluated as atan2 of the relative rotation so that
    // angles near zero keep full precision (acos loses ~1e-8 there).
    const UnitQuaternion r = q1.conjugate() * q2;
    const double s = std::sqrt(r.x * r.x + r.y * r.y + r.z * r.z);
    return 2.0 * std::atan2(s, std::abs(r.w));
}

Pose6D::Pose6D(const UnitQuaternion& q, const Vec3& t) : rotation(q), translation(t) {
    if (!t.isFinite()) {
        throw InvalidInputError("pose translation must be finite");
    }
}

Pose6D Pose6D::compose(const Pose6D& o) const {
    return {rotation * o.rotation, rotation.rotate(o.translation) + translation};
}

Pose6D Pose6D::inverse() const {
    const UnitQuaternion qi = rotation.conjugate();
    return {qi, -qi.rotate(translation)};
}

} // namespace fishpose
