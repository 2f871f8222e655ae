#ifndef BILLIARDS_CONE_SHAPE_HPP
#define BILLIARDS_CONE_SHAPE_HPP

#include <memory>
#include <variant>
#include <vector>

#include "billiards/types.hpp"

namespace billiards {

/// Cross-section {y : (y-c)^T M (y-c) = 1} of the hyperplane x^n = 1, M SPD.
struct EllipsoidSection {
    Vec center;  // (n-1)-dimensional
    Mat matrix;  // (n-1)x(n-1), symmetric positive definite
};

/// Cross-section rho(phi) = a0 + sum c_k cos(k phi) + s_k sin(k phi), n = 3 only.
struct RadialFourierSection {
    double a0 = 1.0;
    std::vector<double> cos_coeffs;
    std::vector<double> sin_coeffs;

    double rho(double phi) const;
    double drho(double phi) const;
    double ddrho(double phi) const;
};

struct ValidationCheck {
    std::string invariant;
    bool pass;
    std::string detail;
};

struct ValidationReport {
    std::vector<ValidationCheck> checks;
    bool pass = true;

    void add(const std::string& invariant, bool ok, const std::string& detail = "");
    std::string summary() const;
};

/// The cone K = { t p | p in gamma, t > 0 } over a strictly convex cross-section
/// gamma of the hyperplane x^n = 1. Immutable after construction; all queries are
/// const and safe to share across threads.
class ConeShape {
public:
    static ConeShape ellipsoid(int dim, Vec center, Mat matrix, Tolerances tol = {});
    static ConeShape radial_fourier(double a0, std::vector<double> cos_coeffs,
                                    std::vector<double> sin_coeffs, Tolerances tol = {});
    /// Planar wedge of full opening angle theta in R^2, symmetric about the axis.
    static ConeShape planar_angle(double theta, Tolerances tol = {});

    int dim() const { return dim_; }
    const Tolerances& tol() const { return tol_; }

    bool is_ellipsoid() const { return std::holds_alternative<EllipsoidSection>(section_); }
    const EllipsoidSection& ellipsoid_section() const { return std::get<EllipsoidSection>(section_); }
    const RadialFourierSection& radial_section() const { return std::get<RadialFourierSection>(section_); }

    const ValidationReport& validation() const { return validation_; }
    bool valid() const { return validation_.pass; }
    void require_valid() const;

    /// Signed interiority indicator G: the relative radial gap of x to the cone.
    /// G < 0 inside conv(K), G = 0 on K, G > 0 outside; +inf sentinel for x^n <= 0.
    /// Scale-invariant: G(t x) = G(x) for t > 0, so the value of G at a unit
    /// direction is also the limit of G along any line escaping in that direction.
    double inside_indicator(const Vec& x) const;

    /// Inward unit normal of K at x; does not check that x lies on K.
    Vec normal_at(const Vec& x) const;

    /// Checked variant: requires |G(x)| <= tol.gamma, else NotOnSurface.
    Vec surface_point_normal(const Vec& x) const;

    /// True iff v (unit) is in the closed escape region D-bar: v^n > 0 and G(v) <= gamma band.
    bool direction_escapes(const Vec& v) const;

    /// True iff v (unit) lies on Gamma = K cap S^{n-1} within the gamma band.
    bool direction_on_gamma(const Vec& v) const;

    /// Point of gamma at section parameter(s); used by samplers and tests.
    /// For ellipsoid sections u is an (n-2)-sphere direction; for radial, u = (phi).
    Vec section_point(const Vec& u) const;

private:
    ConeShape(int dim, std::variant<EllipsoidSection, RadialFourierSection> section, Tolerances tol);
    void run_validation();

    int dim_;
    std::variant<EllipsoidSection, RadialFourierSection> section_;
    Tolerances tol_;
    ValidationReport validation_;
    Mat chol_lower_;  // Cholesky factor of M for ellipsoid sections
};

/// validate_shape in the artifact's API: the report computed at construction.
inline const ValidationReport& validate_shape(const ConeShape& shape) { return shape.validation(); }

} // namespace billiards

#endif
