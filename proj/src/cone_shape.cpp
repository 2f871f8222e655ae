#include "billiards/cone_shape.hpp"

#include <Eigen/Eigenvalues>
#include <cmath>
#include <limits>
#include <sstream>

namespace billiards {

const char* errc_name(Errc c) {
    switch (c) {
        case Errc::NonConvexSection: return "NonConvexSection";
        case Errc::AxisNotInterior: return "AxisNotInterior";
        case Errc::NotOnSurface: return "NotOnSurface";
        case Errc::TangentLine: return "TangentLine";
        case Errc::RootFindFailure: return "RootFindFailure";
        case Errc::NotReflectable: return "NotReflectable";
        case Errc::MaxReflectionsExceeded: return "MaxReflectionsExceeded";
        case Errc::DegenerateStep: return "DegenerateStep";
        case Errc::NotOnDelta0: return "NotOnDelta0";
        case Errc::OutsideClosedD: return "OutsideClosedD";
        case Errc::InvalidArgument: return "InvalidArgument";
        case Errc::IoError: return "IoError";
    }
    return "UnknownError";
}

OrientedLine line_from_point_direction(const Vec& point, const Vec& direction) {
    if (std::abs(direction.norm() - 1.0) > 1e-9)
        fail(Errc::InvalidArgument, "direction must be a unit vector");
    return OrientedLine(direction, point - point.dot(direction) * direction);
}

void check_line(const OrientedLine& line) {
    if (line.v.size() != line.q.size() || line.v.size() < 2)
        fail(Errc::InvalidArgument, "oriented line needs matching dimensions >= 2");
    if (std::abs(line.v.norm() - 1.0) > 1e-12)
        fail(Errc::InvalidArgument, "direction is not unit length");
    if (std::abs(line.v.dot(line.q)) > 1e-12 * std::max(1.0, line.q.norm()))
        fail(Errc::InvalidArgument, "foot point is not perpendicular to the direction");
}

double RadialFourierSection::rho(double phi) const {
    double r = a0;
    for (std::size_t k = 0; k < cos_coeffs.size(); ++k)
        r += cos_coeffs[k] * std::cos(double(k + 1) * phi);
    for (std::size_t k = 0; k < sin_coeffs.size(); ++k)
        r += sin_coeffs[k] * std::sin(double(k + 1) * phi);
    return r;
}

double RadialFourierSection::drho(double phi) const {
    double r = 0.0;
    for (std::size_t k = 0; k < cos_coeffs.size(); ++k)
        r -= cos_coeffs[k] * double(k + 1) * std::sin(double(k + 1) * phi);
    for (std::size_t k = 0; k < sin_coeffs.size(); ++k)
        r += sin_coeffs[k] * double(k + 1) * std::cos(double(k + 1) * phi);
    return r;
}

double RadialFourierSection::ddrho(double phi) const {
    double r = 0.0;
    for (std::size_t k = 0; k < cos_coeffs.size(); ++k)
        r -= cos_coeffs[k] * double(k + 1) * double(k + 1) * std::cos(double(k + 1) * phi);
    for (std::size_t k = 0; k < sin_coeffs.size(); ++k)
        r -= sin_coeffs[k] * double(k + 1) * double(k + 1) * std::sin(double(k + 1) * phi);
    return r;
}

void ValidationReport::add(const std::string& invariant, bool ok, const std::string& detail) {
    checks.push_back({invariant, ok, detail});
    pass = pass && ok;
}

std::string ValidationReport::summary() const {
    std::ostringstream out;
    for (const auto& c : checks)
        out << (c.pass ? "  pass  " : "  FAIL  ") << c.invariant
            << (c.detail.empty() ? "" : " (" + c.detail + ")") << "\n";
    return out.str();
}

ConeShape::ConeShape(int dim, std::variant<EllipsoidSection, RadialFourierSection> section,
                     Tolerances tol)
    : dim_(dim), section_(std::move(section)), tol_(tol) {
    run_validation();
}

ConeShape ConeShape::ellipsoid(int dim, Vec center, Mat matrix, Tolerances tol) {
    if (dim < 2) fail(Errc::InvalidArgument, "ambient dimension must be >= 2");
    if (center.size() != dim - 1 || matrix.rows() != dim - 1 || matrix.cols() != dim - 1)
        fail(Errc::InvalidArgument, "ellipsoid section data must have dimension n-1");
    return ConeShape(dim, EllipsoidSection{std::move(center), std::move(matrix)}, tol);
}

ConeShape ConeShape::radial_fourier(double a0, std::vector<double> cos_coeffs,
                                    std::vector<double> sin_coeffs, Tolerances tol) {
    return ConeShape(3, RadialFourierSection{a0, std::move(cos_coeffs), std::move(sin_coeffs)}, tol);
}

ConeShape ConeShape::planar_angle(double theta, Tolerances tol) {
    if (!(theta > 0.0 && theta < M_PI))
        fail(Errc::InvalidArgument, "planar angle must lie in (0, pi)");
    // Rays (+-r, 1) subtend the full angle theta, r = tan(theta/2); as a 1-d
    // "ellipsoid" section this is the point pair {-r, +r}.
    const double r = std::tan(theta / 2.0);
    Vec center = Vec::Zero(1);
    Mat m(1, 1);
    m(0, 0) = 1.0 / (r * r);
    return ellipsoid(2, center, m, tol);
}

void ConeShape::run_validation() {
    if (std::holds_alternative<EllipsoidSection>(section_)) {
        const auto& sec = std::get<EllipsoidSection>(section_);
        const double scale = std::max(1.0, sec.matrix.cwiseAbs().maxCoeff());
        const bool symmetric = (sec.matrix - sec.matrix.transpose()).cwiseAbs().maxCoeff() <= 1e-12 * scale;
        validation_.add("section matrix symmetric", symmetric);

        bool spd = false;
        if (symmetric) {
            Eigen::SelfAdjointEigenSolver<Mat> eig(sec.matrix);
            spd = eig.info() == Eigen::Success && eig.eigenvalues().minCoeff() > 0.0;
        }
        validation_.add("section strictly convex (SPD matrix)", spd,
                        spd ? "" : "NonConvexSection");
        if (spd) {
            Eigen::LLT<Mat> llt(sec.matrix);
            chol_lower_ = llt.matrixL();
            const double c2 = sec.center.dot(sec.matrix * sec.center);
            validation_.add("hyperplane origin interior to section", c2 < 1.0,
                            c2 < 1.0 ? "" : "AxisNotInterior");
        } else {
            validation_.add("hyperplane origin interior to section", false, "not checked: section invalid");
        }
    } else {
        const auto& sec = std::get<RadialFourierSection>(section_);
        constexpr int kGrid = 4096;
        double min_rho = std::numeric_limits<double>::infinity();
        double min_curv = std::numeric_limits<double>::infinity();
        for (int i = 0; i < kGrid; ++i) {
            const double phi = 2.0 * M_PI * i / kGrid;
            const double r = sec.rho(phi);
            const double r1 = sec.drho(phi);
            const double r2 = sec.ddrho(phi);
            min_rho = std::min(min_rho, r);
            min_curv = std::min(min_curv, r * r + 2.0 * r1 * r1 - r * r2);
        }
        std::ostringstream rd, cd;
        rd << "min rho = " << min_rho;
        cd << "min of rho^2 + 2 rho'^2 - rho rho'' = " << min_curv;
        // Slack of one rounding unit: sections sitting exactly on the
        // convexity margin sample to +-1e-16 and are still usable cones.
        const double curv_ok = -1e-12 * std::max(1.0, sec.a0 * sec.a0);
        validation_.add("hyperplane origin interior to section (rho > 0)", min_rho > 0.0,
                        min_rho > 0.0 ? rd.str() : rd.str() + "; AxisNotInterior");
        validation_.add("section strictly convex (polar curvature > 0)", min_curv > curv_ok,
                        min_curv > curv_ok ? cd.str() : cd.str() + "; NonConvexSection");
    }
}

void ConeShape::require_valid() const {
    if (validation_.pass) return;
    for (const auto& c : validation_.checks) {
        if (c.pass) continue;
        if (c.detail.find("AxisNotInterior") != std::string::npos)
            fail(Errc::AxisNotInterior, c.invariant);
        fail(Errc::NonConvexSection, c.invariant);
    }
}

double ConeShape::inside_indicator(const Vec& x) const {
    const int n = dim_;
    const double xn = x[n - 1];
    if (!(xn > 0.0)) return std::numeric_limits<double>::infinity();

    if (is_ellipsoid()) {
        const auto& sec = ellipsoid_section();
        Vec w = x.head(n - 1) / xn - sec.center;
        return std::sqrt(std::max(0.0, w.dot(sec.matrix * w))) - 1.0;
    }
    const auto& sec = radial_section();
    const double rh = std::hypot(x[0], x[1]);
    const double phi = (rh > 0.0) ? std::atan2(x[1], x[0]) : 0.0;
    return rh / (xn * sec.rho(phi)) - 1.0;
}

Vec ConeShape::normal_at(const Vec& x) const {
    const int n = dim_;
    const double xn = x[n - 1];
    if (!(xn > 0.0)) fail(Errc::NotOnSurface, "point below the vertex hyperplane");

    Vec grad(n);
    if (is_ellipsoid()) {
        const auto& sec = ellipsoid_section();
        const Vec y = x.head(n - 1) / xn;
        const Vec mw = sec.matrix * (y - sec.center);
        const double rm = std::sqrt(std::max(0.0, (y - sec.center).dot(mw)));
        if (rm <= 0.0) fail(Errc::NotOnSurface, "point on the cone axis");
        grad.head(n - 1) = mw / (rm * xn);
        grad[n - 1] = -y.dot(mw) / (rm * xn);
    } else {
        const auto& sec = radial_section();
        const double rh = std::hypot(x[0], x[1]);
        if (rh <= 0.0) fail(Errc::NotOnSurface, "point on the cone axis");
        const double phi = std::atan2(x[1], x[0]);
        const double rho = sec.rho(phi);
        const double drho = sec.drho(phi);
        grad[0] = x[0] / (rh * rho * xn) + x[1] * drho / (rh * rho * rho * xn);
        grad[1] = x[1] / (rh * rho * xn) - x[0] * drho / (rh * rho * rho * xn);
        grad[2] = -rh / (rho * xn * xn);
    }
    Vec normal = (-grad).normalized();
    // Inward means positive pairing with interior points; G decreases inward,
    // so -grad points inward already. The pairing with (0,...,0,1) is the guard.
    if (normal[n - 1] < 0.0) normal = -normal;
    return normal;
}

Vec ConeShape::surface_point_normal(const Vec& x) const {
    require_valid();
    const double g = inside_indicator(x);
    if (!std::isfinite(g) || std::abs(g) > tol_.gamma)
        fail(Errc::NotOnSurface, "indicator gap exceeds the surface tolerance");
    return normal_at(x);
}

bool ConeShape::direction_escapes(const Vec& v) const {
    require_valid();
    const int n = dim_;
    if (!(v[n - 1] > 0.0)) return false;
    return inside_indicator(v) <= tol_.gamma;
}

bool ConeShape::direction_on_gamma(const Vec& v) const {
    require_valid();
    const int n = dim_;
    if (!(v[n - 1] > 0.0)) return false;
    return std::abs(inside_indicator(v)) <= tol_.gamma;
}

Vec ConeShape::section_point(const Vec& u) const {
    require_valid();
    const int n = dim_;
    Vec p(n);
    if (is_ellipsoid()) {
        const auto& sec = ellipsoid_section();
        if (u.size() != n - 1) fail(Errc::InvalidArgument, "section parameter must be an (n-1)-vector");
        // Map a nonzero direction u to the ellipsoid point c + L^{-T} u / ||u||.
        Vec dir = u.normalized();
        Vec y = chol_lower_.transpose().triangularView<Eigen::Upper>().solve(dir);
        p.head(n - 1) = sec.center + y / std::sqrt(y.dot(sec.matrix * y));
    } else {
        const auto& sec = radial_section();
        const double phi = u[0];
        const double r = sec.rho(phi);
        p[0] = r * std::cos(phi);
        p[1] = r * std::sin(phi);
    }
    p[n - 1] = 1.0;
    return p;
}

} // namespace billiards
