#ifndef BILLIARDS_TEST_SHAPES_HPP
#define BILLIARDS_TEST_SHAPES_HPP

#include "billiards/cone_shape.hpp"

namespace billiards::testing {

inline Vec vec2(double a, double b) {
    Vec v(2);
    v << a, b;
    return v;
}

inline Vec vec3(double a, double b, double c) {
    Vec v(3);
    v << a, b, c;
    return v;
}

inline Vec vec4(double a, double b, double c, double d) {
    Vec v(4);
    v << a, b, c, d;
    return v;
}

/// (x^1)^2 + (x^2)^2 = (x^3)^2: the unit circular cone in R^3.
inline ConeShape unit_circular_cone() {
    return ConeShape::ellipsoid(3, Vec::Zero(2), Mat::Identity(2, 2));
}

/// Ellipse section with semi-axes 1 and 0.5 in the hyperplane x^3 = 1.
inline ConeShape ellipse_cone() {
    Mat m = Mat::Zero(2, 2);
    m(0, 0) = 1.0;
    m(1, 1) = 4.0;
    return ConeShape::ellipsoid(3, Vec::Zero(2), m);
}

/// rho(phi) = 1 + 0.1 cos(3 phi).
inline ConeShape fourier_cone() {
    return ConeShape::radial_fourier(1.0, {0.0, 0.0, 0.1}, {});
}

/// Off-center anisotropic ellipsoid section in R^4, mildly rotated.
inline ConeShape r4_cone() {
    Mat d = Mat::Zero(3, 3);
    d(0, 0) = 1.0;
    d(1, 1) = 1.0 / (0.8 * 0.8);
    d(2, 2) = 1.0 / (0.6 * 0.6);
    const double c = std::cos(0.3), s = std::sin(0.3);
    Mat r = Mat::Identity(3, 3);
    r(0, 0) = c;
    r(0, 1) = -s;
    r(1, 0) = s;
    r(1, 1) = c;
    Mat m = r.transpose() * d * r;
    Vec center(3);
    center << 0.1, 0.0, 0.0;
    return ConeShape::ellipsoid(4, center, m);
}

} // namespace billiards::testing

#endif
