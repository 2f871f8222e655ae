#ifndef BILLIARDS_INTEGRALS_HPP
#define BILLIARDS_INTEGRALS_HPP

#include <functional>

#include "billiards/dynamics.hpp"

namespace billiards {

/// The tangent field X on the closed escape region D-bar of the sphere:
/// the inward normal field of Gamma parallel-transported to v along the
/// meridian geodesic through v0 = (0,...,0,1) and scaled by the relative
/// geodesic distance g(v). X(v0) = 0, X = n_v on Gamma, ||X|| = g in between.
class TransportField {
public:
    explicit TransportField(const ConeShape& shape);

    struct GeodesicExit {
        Vec p;     // point of Gamma hit by the meridian through v
        double s;  // geodesic distance from v0 to p
    };

    /// Meridian exit point; v in D-bar, v != v0.
    GeodesicExit gamma_exit(const Vec& v) const;

    Vec x_field(const Vec& v) const;
    double g(const Vec& v) const;   // geodesic ratio d(v0,v)/d(v0,p_v)
    double g1(const Vec& v) const;  // equatorial-radius ratio; 0 at v0, 1 on Gamma
    double h(const Vec& v) const {  // the smooth cutoff (g1 - 1)^2
        const double d = g1(v) - 1.0;
        return d * d;
    }

    const ConeShape& shape() const { return *shape_; }

private:
    const ConeShape* shape_;
    Vec v0_;
};

/// Quadratic first integral I = sum_{i<j} (x^i v^j - x^j v^i)^2 at x = Q.
double integral_I(const OrientedLine& line);

struct CausticReport {
    double sqrt_I = 0.0;
    double max_rel_dev = 0.0;  // of per-chord distances from sqrt(I)
    int chords = 0;
};

/// Confirms every recorded chord of the trajectory is tangent to the sphere
/// of radius sqrt(I), recomputing each distance from the raw surface points.
CausticReport caustic_check(const Trajectory& traj);

/// First n-1 components of Q - <Q,X(v)>X(v); line must have v in D-bar.
Vec f_components(const TransportField& field, const OrientedLine& line);

/// Lift of a function on psi+ through the dynamics: runs the trajectory and
/// evaluates at its final line. Returns the value and the depth m.
std::pair<double, int> lift(const ConeShape& shape,
                            const std::function<double(const OrientedLine&)>& base,
                            const OrientedLine& line, int cap = 100000);

struct IntegralVector {
    std::vector<double> values;         // I_1 ... I_{2n-1}
    std::vector<double> smooth_values;  // I^s_1 ... I^s_{2n-1}
    int m = 0;                          // lift depth used
};

/// All 2n-1 integrals of a line: lifted direction components, lifted
/// F-components, and <Q,Q>; plus the smooth family built from h = (g1-1)^2.
IntegralVector integral_vector(const TransportField& field, const OrientedLine& line,
                               int cap = 100000);

/// The smooth family alone.
std::vector<double> smooth_integral_vector(const TransportField& field, const OrientedLine& line,
                                           int cap = 100000);

/// Inverts (I_1..I_{2n-1}) on the open part of psi+ (v in D): linear solve
/// against the F-map at the decoded direction.
OrientedLine reconstruct_from_integrals(const TransportField& field,
                                        const std::vector<double>& values);

/// Inverts the smooth family where its last entry h is nonzero.
OrientedLine reconstruct_from_smooth(const std::vector<double>& values);

/// Singular values of the linear map Q -> (F_1..F_{n-1}) on T_v S^{n-1},
/// sorted descending; rank n-1 for v in D, rank n-2 on Gamma.
Vec f_map_singular_values(const TransportField& field, const Vec& v);

} // namespace billiards

#endif
