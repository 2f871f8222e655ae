#include "billiards/sampling.hpp"

#include <cmath>

namespace billiards {

LineSampler::LineSampler(const ConeShape& shape, std::uint64_t seed, double q_radius)
    : shape_(&shape), rng_(seed), q_radius_(q_radius) {
    shape.require_valid();
    if (!(q_radius > 0.0)) fail(Errc::InvalidArgument, "sampling ball radius must be positive");
}

Vec LineSampler::unit_sphere_vector(int dim) {
    std::normal_distribution<double> gauss(0.0, 1.0);
    Vec v(dim);
    double norm2 = 0.0;
    do {
        for (int i = 0; i < dim; ++i) v[i] = gauss(rng_);
        norm2 = v.squaredNorm();
    } while (norm2 < 1e-12);
    return v / std::sqrt(norm2);
}

Vec LineSampler::ball_vector_in_perp(const Vec& v, double radius) {
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    const int n = static_cast<int>(v.size());
    Vec w;
    double norm = 0.0;
    do {
        w = unit_sphere_vector(n);
        w -= w.dot(v) * v;
        norm = w.norm();
    } while (norm < 1e-9);
    const double r = radius * std::pow(unif(rng_), 1.0 / double(n - 1));
    return (r / norm) * w;
}

Vec LineSampler::random_section_parameter() {
    if (shape_->is_ellipsoid()) return unit_sphere_vector(shape_->dim() - 1);
    std::uniform_real_distribution<double> unif(0.0, 2.0 * M_PI);
    Vec u(1);
    u[0] = unif(rng_);
    return u;
}

OrientedLine LineSampler::candidate() {
    const int n = shape_->dim();
    while (true) {
        const Vec v = unit_sphere_vector(n);
        const Vec q = ball_vector_in_perp(v, q_radius_);
        if (q.norm() <= 1e-12) continue;  // through the vertex
        return OrientedLine(v, q);
    }
}

LineSampler::Sample LineSampler::next_in_psi() {
    while (true) {
        ++proposals_;
        OrientedLine line = candidate();
        PhaseClass cls = classify(*shape_, line);
        if (cls.in_psi()) {
            ++accepted_;
            return {std::move(line), cls};
        }
    }
}

OrientedLine LineSampler::delta0_line() {
    while (true) {
        const Vec p = shape_->section_point(random_section_parameter());
        const Vec v = p / p.norm();
        const Vec n_v = shape_->normal_at(v);
        Vec q = ball_vector_in_perp(v, q_radius_);
        const double side = n_v.dot(q);
        if (std::abs(side) < 1e-6 || q.norm() < 1e-6) continue;
        if (side < 0.0) q = -q;
        return OrientedLine(v, q);
    }
}

Vec LineSampler::direction_in_d(double shrink) {
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    const int n = shape_->dim();
    const Vec p = shape_->section_point(random_section_parameter());
    // Pull the boundary point of the section toward the interior axis point.
    const double r = shrink * std::pow(unif(rng_), 1.0 / double(n - 1));
    Vec x = Vec::Zero(n);
    x[n - 1] = 1.0;
    x.head(n - 1) = r * p.head(n - 1);
    return x / x.norm();
}

Vec LineSampler::direction_on_gamma() {
    const Vec p = shape_->section_point(random_section_parameter());
    return p / p.norm();
}

OrientedLine LineSampler::psi_plus_interior_line(double shrink) {
    while (true) {
        const Vec v = direction_in_d(shrink);
        const Vec q = ball_vector_in_perp(v, q_radius_);
        if (q.norm() <= 1e-9) continue;
        return OrientedLine(v, q);
    }
}

} // namespace billiards
