#ifndef BILLIARDS_DYNAMICS_HPP
#define BILLIARDS_DYNAMICS_HPP

#include <vector>

#include "billiards/intersect.hpp"

namespace billiards {

/// Specular reflection v - 2<v,n>n; both arguments unit.
Vec reflect_direction(const Vec& v, const Vec& n);

/// One application of the billiard map: reflect at the exiting hit and
/// re-foot the resulting oriented line. Requires the line in psi- or psi.
OrientedLine billiard_map(const ConeShape& shape, const OrientedLine& line);

/// Per-segment diagnostics. Step k describes the k-th recorded line of the
/// trajectory at its first surface point p: the start line at its entering
/// hit when one exists, then every reflected line at its reflection point.
struct ReflectionStep {
    int k = 0;
    OrientedLine line;  // the departing line
    Vec p;              // surface point the line departs from
    Vec q_section;      // p scaled to the hyperplane x^n = 1
    double alpha = 0.0; // angle between line.v and p
    double theta = 0.0; // vertex angle from p to the next surface point;
                        // for the last step, the limit value alpha
    double a_value = 0.0;  // A = ||p|| <v,n_p> / ||q||
    double dist = 0.0;     // distance of the line to the origin
};

struct Trajectory {
    OrientedLine initial;
    OrientedLine final_line;
    PhaseTag final_tag = PhaseTag::PsiPlus;
    std::vector<ReflectionStep> steps;
    int reflection_count = 0;  // m: number of reflections
};

/// Iterates the billiard map until the line escapes (psi+ or Delta0),
/// recording diagnostics. Theorem-level contract: terminates for every
/// valid start; the cap is a numerical safety net and a breach is an error.
Trajectory run_trajectory(const ConeShape& shape, const OrientedLine& start, int cap = 100000);

/// Fills alpha, A and dist of a step from its departing line and surface
/// point; incidence_out = <line.v, n_p>. Throws DegenerateStep for p at the
/// vertex.
ReflectionStep make_step(int k, const OrientedLine& departing, const Vec& p, double incidence_out);

/// Vertex angle between two reflection points, in (0, pi).
double vertex_angle(const Vec& p_from, const Vec& p_to);

/// The boundary involution sigma(v,Q) = (v, Q - 2<Q,n_v>n_v) on Delta0.
OrientedLine sigma_map(const ConeShape& shape, const OrientedLine& line);

struct SigmaLimitReport {
    std::vector<double> scales;
    std::vector<double> distances;  // || mu(x_eps) - sigma(x) ||
    bool converged = false;         // below 1e-6 before the scale reaches 1e-9
    std::string note;
};

/// Builds a psi-sequence x_eps -> x in Delta0 by tilting v out of the closed
/// escape region at scales s st 2^-k and compares mu(x_eps) with sigma(x).
SigmaLimitReport sigma_limit_check(const ConeShape& shape, const OrientedLine& x, double scale);

} // namespace billiards

#endif
