#include "billiards/integrals.hpp"

#include <Eigen/SVD>
#include <cmath>

namespace billiards {

namespace {
constexpr double kAxisBand = 1e-13;  // treat v within this geodesic distance as v0
}

TransportField::TransportField(const ConeShape& shape) : shape_(&shape) {
    shape.require_valid();
    v0_ = Vec::Zero(shape.dim());
    v0_[shape.dim() - 1] = 1.0;
    if (!(shape.inside_indicator(v0_) < 0.0))
        fail(Errc::InvalidArgument, "v0 is not interior to the cone");
}

TransportField::GeodesicExit TransportField::gamma_exit(const Vec& v) const {
    if (!shape_->direction_escapes(v)) fail(Errc::OutsideClosedD, "direction not in closed D");
    if (shape_->direction_on_gamma(v)) return {v, std::acos(clamp_unit(v.dot(v0_)))};

    const double d_v = std::acos(clamp_unit(v.dot(v0_)));
    if (d_v <= kAxisBand) fail(Errc::InvalidArgument, "meridian through v0 is undefined at v0");
    const Vec e = (v - v.dot(v0_) * v0_).normalized();

    // G along the meridian changes sign exactly once between v and the
    // equator, where the sentinel takes over.
    double lo = d_v, hi = M_PI / 2.0;
    const auto g_at = [&](double s) {
        return shape_->inside_indicator(std::cos(s) * v0_ + std::sin(s) * e);
    };
    if (!(g_at(lo) < 0.0) || !(g_at(hi) > 0.0))
        fail(Errc::RootFindFailure, "meridian bracket lost on the sphere");
    for (int i = 0; i < shape_->tol().max_root_iter && hi - lo > 1e-15; ++i) {
        const double mid = 0.5 * (lo + hi);
        (g_at(mid) < 0.0 ? lo : hi) = mid;
    }
    const double s = 0.5 * (lo + hi);
    return {(std::cos(s) * v0_ + std::sin(s) * e).normalized(), s};
}

Vec TransportField::x_field(const Vec& v) const {
    if (!shape_->direction_escapes(v)) fail(Errc::OutsideClosedD, "direction not in closed D");
    if (shape_->direction_on_gamma(v)) return shape_->normal_at(v);
    const double d_v = std::acos(clamp_unit(v.dot(v0_)));
    if (d_v <= kAxisBand) return Vec::Zero(shape_->dim());

    const GeodesicExit exit = gamma_exit(v);
    const Vec n_p = shape_->normal_at(exit.p);
    const double denom = 1.0 + exit.p.dot(v);
    if (denom < 1e-6)
        fail(Errc::RootFindFailure, "transport endpoints nearly antipodal");
    const Vec transported = n_p - (n_p.dot(v) / denom) * (exit.p + v);
    return (d_v / exit.s) * transported;
}

double TransportField::g(const Vec& v) const {
    if (!shape_->direction_escapes(v)) fail(Errc::OutsideClosedD, "direction not in closed D");
    if (shape_->direction_on_gamma(v)) return 1.0;
    const double d_v = std::acos(clamp_unit(v.dot(v0_)));
    if (d_v <= kAxisBand) return 0.0;
    return d_v / gamma_exit(v).s;
}

double TransportField::g1(const Vec& v) const {
    if (!shape_->direction_escapes(v)) fail(Errc::OutsideClosedD, "direction not in closed D");
    if (shape_->direction_on_gamma(v)) return 1.0;
    const int n = shape_->dim();
    const double num = v.head(n - 1).norm();
    if (std::acos(clamp_unit(v.dot(v0_))) <= kAxisBand) return 0.0;
    const GeodesicExit exit = gamma_exit(v);
    return num / exit.p.head(n - 1).norm();
}

double integral_I(const OrientedLine& line) {
    const int n = line.dim();
    double sum = 0.0;
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j) {
            const double m_ij = line.q[i] * line.v[j] - line.q[j] * line.v[i];
            sum += m_ij * m_ij;
        }
    return sum;
}

CausticReport caustic_check(const Trajectory& traj) {
    if (traj.steps.empty())
        fail(Errc::InvalidArgument, "caustic check needs at least one recorded chord");
    CausticReport report;
    const double radius = std::sqrt(integral_I(traj.initial));
    if (radius <= 0.0) fail(Errc::InvalidArgument, "degenerate caustic of a vertex line");
    report.sqrt_I = radius;
    for (std::size_t i = 0; i < traj.steps.size(); ++i) {
        const auto& step = traj.steps[i];
        // dist(l,O)^2 = ||p||^2 - <p,v>^2 from the raw surface point.
        const auto chord_dist = [&](const Vec& p) {
            return std::sqrt(std::max(0.0, p.squaredNorm() - std::pow(p.dot(step.line.v), 2)));
        };
        double dev = std::abs(chord_dist(step.p) - radius);
        if (i + 1 < traj.steps.size())
            dev = std::max(dev, std::abs(chord_dist(traj.steps[i + 1].p) - radius));
        report.max_rel_dev = std::max(report.max_rel_dev, dev / radius);
        ++report.chords;
    }
    return report;
}

Vec f_components(const TransportField& field, const OrientedLine& line) {
    const int n = field.shape().dim();
    const Vec x = field.x_field(line.v);
    const Vec projected = line.q - line.q.dot(x) * x;
    return projected.head(n - 1);
}

std::pair<double, int> lift(const ConeShape& shape,
                            const std::function<double(const OrientedLine&)>& base,
                            const OrientedLine& line, int cap) {
    const Trajectory traj = run_trajectory(shape, line, cap);
    return {base(traj.final_line), traj.reflection_count};
}

IntegralVector integral_vector(const TransportField& field, const OrientedLine& line, int cap) {
    const ConeShape& shape = field.shape();
    const int n = shape.dim();
    const Trajectory traj = run_trajectory(shape, line, cap);
    const OrientedLine& y = traj.final_line;

    IntegralVector out;
    out.m = traj.reflection_count;
    out.values.resize(2 * n - 1);
    out.smooth_values.resize(2 * n - 1);

    for (int i = 0; i < n - 1; ++i) out.values[i] = y.v[i];
    const Vec f = f_components(field, y);
    for (int i = 0; i < n - 1; ++i) out.values[n - 1 + i] = f[i];
    out.values[2 * n - 2] = line.q.squaredNorm();

    const double hv = field.h(y.v);
    for (int i = 0; i < n - 1; ++i) out.smooth_values[i] = y.v[i] * hv;
    for (int i = 0; i < n - 1; ++i) out.smooth_values[n - 1 + i] = y.q[i] * hv;
    out.smooth_values[2 * n - 2] = hv;
    return out;
}

std::vector<double> smooth_integral_vector(const TransportField& field, const OrientedLine& line,
                                           int cap) {
    return integral_vector(field, line, cap).smooth_values;
}

OrientedLine reconstruct_from_integrals(const TransportField& field,
                                        const std::vector<double>& values) {
    const ConeShape& shape = field.shape();
    const int n = shape.dim();
    if (values.size() != static_cast<std::size_t>(2 * n - 1))
        fail(Errc::InvalidArgument, "integral vector has the wrong length");

    Vec v(n);
    double head2 = 0.0;
    for (int i = 0; i < n - 1; ++i) {
        v[i] = values[i];
        head2 += v[i] * v[i];
    }
    if (head2 >= 1.0) fail(Errc::OutsideClosedD, "decoded direction is not on the upper sphere");
    v[n - 1] = std::sqrt(1.0 - head2);
    if (!shape.direction_escapes(v))
        fail(Errc::OutsideClosedD, "decoded direction outside closed D");

    const Vec x = field.x_field(v);
    Mat a(n, n);
    Vec rhs(n);
    for (int j = 0; j < n - 1; ++j) {
        for (int k = 0; k < n; ++k) a(j, k) = (j == k ? 1.0 : 0.0) - x[j] * x[k];
        rhs[j] = values[n - 1 + j];
    }
    a.row(n - 1) = v.transpose();
    rhs[n - 1] = 0.0;
    const Vec q = a.fullPivLu().solve(rhs);
    return OrientedLine(v, q);
}

OrientedLine reconstruct_from_smooth(const std::vector<double>& values) {
    if (values.size() < 3 || values.size() % 2 == 0)
        fail(Errc::InvalidArgument, "smooth vector has the wrong length");
    const int n = static_cast<int>(values.size() + 1) / 2;
    const double hv = values[2 * n - 2];
    if (std::abs(hv) <= 1e-300)
        fail(Errc::InvalidArgument, "smooth vector vanishes; line on Delta");

    Vec v(n), q(n);
    double head2 = 0.0;
    for (int i = 0; i < n - 1; ++i) {
        v[i] = values[i] / hv;
        q[i] = values[n - 1 + i] / hv;
        head2 += v[i] * v[i];
    }
    if (head2 >= 1.0) fail(Errc::OutsideClosedD, "decoded direction is not on the upper sphere");
    v[n - 1] = std::sqrt(1.0 - head2);
    double qn = 0.0;
    for (int i = 0; i < n - 1; ++i) qn -= q[i] * v[i];
    q[n - 1] = qn / v[n - 1];
    return OrientedLine(v, q);
}

Vec f_map_singular_values(const TransportField& field, const Vec& v) {
    const int n = field.shape().dim();
    const Vec x = field.x_field(v);

    // Orthonormal basis of v-perp from a Householder QR of v.
    Mat id = Mat::Identity(n, n);
    Eigen::HouseholderQR<Mat> qr(v);
    Mat full = qr.householderQ() * id;
    Mat basis = full.rightCols(n - 1);

    Mat map(n - 1, n - 1);
    for (int k = 0; k < n - 1; ++k) {
        const Vec b = basis.col(k);
        const Vec image = b - b.dot(x) * x;
        map.col(k) = image.head(n - 1);
    }
    Eigen::JacobiSVD<Mat> svd(map);
    return svd.singularValues();
}

} // namespace billiards
