#ifndef BILLIARDS_VERIFY_HPP
#define BILLIARDS_VERIFY_HPP

#include <cstdint>
#include <iosfwd>
#include <limits>

#include "billiards/integrals.hpp"
#include "billiards/sampling.hpp"

namespace billiards {

struct SuiteConfig {
    std::size_t samples = 1000;
    std::uint64_t seed = 1;
    int cap = 100000;
    double q_radius = 3.0;
};

struct CheckResult {
    std::string name;
    std::size_t samples = 0;
    double max_dev = 0.0;
    double tolerance = 0.0;
    bool pass = false;
    std::string note;
};

struct VerificationReport {
    std::vector<CheckResult> checks;

    bool all_pass() const;
    void add(CheckResult c) { checks.push_back(std::move(c)); }
    void append(const VerificationReport& other);
    void print(std::ostream& out) const;
};

/// One pass over a seeded ensemble of phase-space lines, accumulating every
/// per-trajectory diagnostic the invariant checks need.
struct TrajectoryEnsembleStats {
    std::size_t trajectories = 0;
    std::size_t total_steps = 0;
    int max_m = 0;
    std::size_t cap_breaches = 0;
    std::size_t skipped = 0;  // tangent or root-find rejects while sampling
    double max_I_drift = 0.0;
    double max_dist_drift = 0.0;
    double max_caustic_dev = 0.0;
    double max_alpha_recursion_dev = 0.0;
    double max_theta_telescope_dev = 0.0;
    bool alpha_strictly_decreasing = true;
    bool theta_positive = true;
    double min_A = std::numeric_limits<double>::infinity();
    double max_m12_drift = 0.0;  // per-reflection angular-momentum drift (n >= 3)
};

TrajectoryEnsembleStats run_trajectory_ensemble(const ConeShape& shape, const SuiteConfig& cfg);

/// True when the shape is a circular cone about the axis (section a centered
/// ball), so the planar angular momenta are conserved per reflection.
bool is_rotationally_symmetric(const ConeShape& shape);

namespace checks {

CheckResult line_invariants(const ConeShape& shape, const SuiteConfig& cfg);
CheckResult intersection_cross_validation(const ConeShape& shape, const SuiteConfig& cfg);
CheckResult surface_normals(const ConeShape& shape, const SuiteConfig& cfg);
CheckResult time_reversal(const ConeShape& shape, const SuiteConfig& cfg);
CheckResult indicator_ray_monotone(const ConeShape& shape, const SuiteConfig& cfg);
CheckResult reflection_involution(int dim, const SuiteConfig& cfg);

CheckResult distance_invariance(const TrajectoryEnsembleStats& stats);
CheckResult integral_drift(const TrajectoryEnsembleStats& stats);
CheckResult caustic_tangency(const TrajectoryEnsembleStats& stats);
CheckResult alpha_recursion(const TrajectoryEnsembleStats& stats);
CheckResult termination(const TrajectoryEnsembleStats& stats, int cap);
CheckResult a_positivity(const TrajectoryEnsembleStats& stats);
CheckResult angular_momentum(const ConeShape& shape, const TrajectoryEnsembleStats& stats);

CheckResult sigma_involution(const ConeShape& shape, const SuiteConfig& cfg);
CheckResult sigma_limit(const ConeShape& shape, const SuiteConfig& cfg);
CheckResult transport_boundary(const TransportField& field, const SuiteConfig& cfg);
CheckResult glue_identity(const TransportField& field, const SuiteConfig& cfg);
CheckResult rank_dichotomy(const TransportField& field, const SuiteConfig& cfg);
CheckResult integral_I_definition(const ConeShape& shape, const SuiteConfig& cfg);
CheckResult vector_invariance(const TransportField& field, const SuiteConfig& cfg);
CheckResult trajectory_uniqueness(const TransportField& field, const SuiteConfig& cfg);
CheckResult reconstruction(const TransportField& field, const SuiteConfig& cfg);
CheckResult smooth_vanishing(const TransportField& field, const SuiteConfig& cfg);
CheckResult smooth_recovery(const TransportField& field, const SuiteConfig& cfg);
CheckResult lift_continuity(const TransportField& field, const SuiteConfig& cfg);

} // namespace checks

VerificationReport verify_geometry(const ConeShape& shape, const SuiteConfig& cfg);
VerificationReport verify_dynamics(const ConeShape& shape, const SuiteConfig& cfg);
VerificationReport verify_integrals(const ConeShape& shape, const SuiteConfig& cfg);
VerificationReport verify_all(const ConeShape& shape, const SuiteConfig& cfg);

/// Planar-angle reflection counts checked against the pure-angle unfolding
/// oracle; the classical bound is ceil(pi/theta).
struct AngleOracleReport {
    double theta = 0.0;
    int bound = 0;
    int max_count = 0;
    int min_count = std::numeric_limits<int>::max();
    std::size_t samples = 0;
    std::size_t over_bound = 0;
    std::size_t mismatches = 0;  // simulator vs oracle disagreements
    bool bound_attained = false;
    bool bound_minus_one_attained = false;
};

AngleOracleReport run_angle_oracle(double theta, std::size_t samples, std::uint64_t seed);

/// Reflection count of a 2-d wedge billiard by unfolding; pure angle
/// arithmetic, independent of the cone machinery. Returns -1 for lines that
/// do not meet the wedge (or pass through the vertex).
int unfolding_reflection_count(double theta, const OrientedLine& line);

} // namespace billiards

#endif
