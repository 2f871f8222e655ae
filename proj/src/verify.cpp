#include "billiards/verify.hpp"

#include <cmath>
#include <iomanip>
#include <ostream>
#include <sstream>

namespace billiards {

namespace {

constexpr double kPi = 3.14159265358979323846;

double line_distance(const OrientedLine& a, const OrientedLine& b) {
    return std::sqrt((a.v - b.v).squaredNorm() + (a.q - b.q).squaredNorm());
}

CheckResult make_result(std::string name, std::size_t samples, double max_dev, double tol,
                        bool pass, std::string note = "") {
    return CheckResult{std::move(name), samples, max_dev, tol, pass, std::move(note)};
}

} // namespace

bool VerificationReport::all_pass() const {
    for (const auto& c : checks)
        if (!c.pass) return false;
    return true;
}

void VerificationReport::append(const VerificationReport& other) {
    checks.insert(checks.end(), other.checks.begin(), other.checks.end());
}

void VerificationReport::print(std::ostream& out) const {
    for (const auto& c : checks) {
        out << (c.pass ? "[PASS] " : "[FAIL] ") << c.name << ": max deviation "
            << std::scientific << std::setprecision(3) << c.max_dev << " (tol " << c.tolerance
            << ", n=" << c.samples << ")";
        if (!c.note.empty()) out << " -- " << c.note;
        out << "\n";
    }
    out.flush();
}

bool is_rotationally_symmetric(const ConeShape& shape) {
    if (!shape.is_ellipsoid() || shape.dim() < 3) return false;
    const auto& sec = shape.ellipsoid_section();
    if (sec.center.norm() > 1e-12) return false;
    const double lambda = sec.matrix(0, 0);
    return (sec.matrix - lambda * Mat::Identity(sec.matrix.rows(), sec.matrix.cols()))
               .cwiseAbs()
               .maxCoeff() <= 1e-12 * std::abs(lambda);
}

TrajectoryEnsembleStats run_trajectory_ensemble(const ConeShape& shape, const SuiteConfig& cfg) {
    TrajectoryEnsembleStats stats;
    LineSampler sampler(shape, cfg.seed, cfg.q_radius);
    const int n = shape.dim();

    while (stats.trajectories < cfg.samples) {
        const auto sample = sampler.next_in_psi();
        Trajectory traj;
        try {
            traj = run_trajectory(shape, sample.line, cfg.cap);
        } catch (const BilliardError& err) {
            if (err.code() == Errc::MaxReflectionsExceeded) {
                ++stats.cap_breaches;
                ++stats.trajectories;
                continue;
            }
            ++stats.skipped;
            continue;
        }
        ++stats.trajectories;
        stats.total_steps += traj.steps.size();
        stats.max_m = std::max(stats.max_m, traj.reflection_count);

        const double i0 = integral_I(traj.initial);
        const double d0 = traj.initial.dist_to_origin();
        for (const auto& step : traj.steps) {
            stats.max_I_drift =
                std::max(stats.max_I_drift, std::abs(integral_I(step.line) - i0) / i0);
            stats.max_dist_drift = std::max(stats.max_dist_drift, std::abs(step.dist - d0) / d0);
            stats.min_A = std::min(stats.min_A, step.a_value);
            if (!(step.theta > 0.0)) stats.theta_positive = false;
        }
        stats.max_I_drift =
            std::max(stats.max_I_drift, std::abs(integral_I(traj.final_line) - i0) / i0);

        if (!traj.steps.empty()) {
            stats.max_caustic_dev = std::max(stats.max_caustic_dev, caustic_check(traj).max_rel_dev);
            double theta_sum = 0.0;
            for (std::size_t j = 0; j + 1 < traj.steps.size(); ++j) {
                const auto& cur = traj.steps[j];
                const auto& nxt = traj.steps[j + 1];
                if (!(nxt.alpha < cur.alpha)) stats.alpha_strictly_decreasing = false;
                stats.max_alpha_recursion_dev = std::max(
                    stats.max_alpha_recursion_dev, std::abs(nxt.alpha - (cur.alpha - cur.theta)));
                theta_sum += cur.theta;
            }
            stats.max_theta_telescope_dev =
                std::max(stats.max_theta_telescope_dev,
                         std::abs(theta_sum - (traj.steps.front().alpha - traj.steps.back().alpha)));
            // sin(alpha_k) ||p_k|| = dist for every step; fold into the recursion bound.
            for (const auto& step : traj.steps)
                stats.max_alpha_recursion_dev =
                    std::max(stats.max_alpha_recursion_dev,
                             std::abs(std::sin(step.alpha) * step.p.norm() - d0) / d0);
        }

        if (n >= 3) {
            const std::size_t first_reflection = traj.steps.size() - traj.reflection_count;
            for (std::size_t j = first_reflection; j < traj.steps.size(); ++j) {
                const Vec& v_in =
                    (j == 0) ? traj.initial.v : traj.steps[j - 1].line.v;
                const Vec& v_out = traj.steps[j].line.v;
                const Vec& p = traj.steps[j].p;
                const double m_in = p[0] * v_in[1] - p[1] * v_in[0];
                const double m_out = p[0] * v_out[1] - p[1] * v_out[0];
                stats.max_m12_drift = std::max(stats.max_m12_drift, std::abs(m_out - m_in));
            }
        }
    }
    return stats;
}

namespace checks {

CheckResult line_invariants(const ConeShape& shape, const SuiteConfig& cfg) {
    LineSampler sampler(shape, cfg.seed, cfg.q_radius);
    double max_dev = 0.0;
    std::size_t count = 0;
    for (std::size_t i = 0; i < cfg.samples; ++i) {
        auto sample = sampler.next_in_psi();
        OrientedLine line = sample.line;
        // push a few map applications through to catch drift in <v,Q>
        for (int hop = 0; hop < 3; ++hop) {
            max_dev = std::max(max_dev, std::abs(line.v.norm() - 1.0));
            max_dev = std::max(max_dev, std::abs(line.v.dot(line.q)));
            ++count;
            const PhaseClass cls = classify(shape, line);
            if (cls.tag != PhaseTag::PsiMinus && cls.tag != PhaseTag::Psi) break;
            try {
                line = billiard_map(shape, line);
            } catch (const BilliardError&) {
                break;
            }
        }
    }
    return make_result("oriented-line invariants (unit v, <v,Q>=0)", count, max_dev, 1e-12,
                       max_dev <= 1e-12);
}

CheckResult intersection_cross_validation(const ConeShape& shape, const SuiteConfig& cfg) {
    if (!shape.is_ellipsoid())
        return make_result("closed-form vs bracketing intersection", 0, 0.0, 1e-9, true,
                           "skipped: no closed form for this section");
    LineSampler sampler(shape, cfg.seed, cfg.q_radius);
    double max_dev = 0.0;
    std::size_t compared = 0, skipped = 0, structural = 0;
    for (std::size_t i = 0; i < cfg.samples; ++i) {
        const OrientedLine line = sampler.candidate();
        IntervalRecord closed, generic;
        try {
            closed = intersect_closed_form(shape, line);
            generic = intersect_generic(shape, line);
        } catch (const BilliardError&) {
            ++skipped;
            continue;
        }
        if (closed.empty != generic.empty ||
            std::isfinite(closed.t_enter) != std::isfinite(generic.t_enter) ||
            std::isfinite(closed.t_exit) != std::isfinite(generic.t_exit)) {
            ++structural;
            continue;
        }
        if (closed.empty) continue;
        if (std::isfinite(closed.t_enter))
            max_dev = std::max(max_dev, std::abs(closed.t_enter - generic.t_enter));
        if (std::isfinite(closed.t_exit))
            max_dev = std::max(max_dev, std::abs(closed.t_exit - generic.t_exit));
        ++compared;
    }
    std::ostringstream note;
    note << skipped << " tangent-band skips, " << structural << " structural mismatches";
    return make_result("closed-form vs bracketing intersection", compared, max_dev, 1e-9,
                       structural == 0 && max_dev <= 1e-9, note.str());
}

CheckResult surface_normals(const ConeShape& shape, const SuiteConfig& cfg) {
    LineSampler sampler(shape, cfg.seed, cfg.q_radius);
    std::uniform_real_distribution<double> scale(0.1, 10.0);
    double max_dev = 0.0;
    bool inward = true;
    for (std::size_t i = 0; i < cfg.samples; ++i) {
        const Vec x = scale(sampler.rng()) * sampler.direction_on_gamma();
        const Vec n = shape.surface_point_normal(x);
        max_dev = std::max(max_dev, std::abs(x.dot(n)) / x.norm());
        max_dev = std::max(max_dev, std::abs(n.norm() - 1.0));
        if (!(n[shape.dim() - 1] > 0.0)) inward = false;
    }
    return make_result("surface normals (<x,n>=0, inward, unit)", cfg.samples, max_dev, 1e-10,
                       inward && max_dev <= 1e-10, inward ? "" : "normal not inward");
}

CheckResult time_reversal(const ConeShape& shape, const SuiteConfig& cfg) {
    LineSampler sampler(shape, cfg.seed, cfg.q_radius);
    std::size_t mismatches = 0, tested = 0;
    for (std::size_t i = 0; i < cfg.samples; ++i) {
        const OrientedLine line = sampler.candidate();
        if (shape.direction_on_gamma(line.v) || shape.direction_on_gamma(-line.v)) continue;
        const PhaseTag fwd = classify(shape, line).tag;
        const PhaseTag bwd = classify(shape, line.reversed()).tag;
        ++tested;
        const bool ok = (fwd == PhaseTag::Psi && bwd == PhaseTag::Psi) ||
                        (fwd == PhaseTag::PsiMinus && bwd == PhaseTag::PsiPlus) ||
                        (fwd == PhaseTag::PsiPlus && bwd == PhaseTag::PsiMinus) ||
                        (fwd == PhaseTag::NotInPhaseSpace && bwd == PhaseTag::NotInPhaseSpace);
        if (!ok) ++mismatches;
    }
    return make_result("classification respects time reversal", tested,
                       static_cast<double>(mismatches), 0.0, mismatches == 0);
}

CheckResult indicator_ray_monotone(const ConeShape& shape, const SuiteConfig& cfg) {
    LineSampler sampler(shape, cfg.seed, cfg.q_radius);
    std::uniform_real_distribution<double> scale(0.2, 5.0);
    std::size_t violations = 0;
    for (std::size_t i = 0; i < cfg.samples; ++i) {
        const Vec z = scale(sampler.rng()) * sampler.direction_in_d(0.9);
        const Vec x = scale(sampler.rng()) * sampler.direction_on_gamma();
        for (double s = 0.0; s < 1.0; s += 0.05)
            if (!(shape.inside_indicator(z + s * (x - z)) < 0.0)) ++violations;
        for (double s = 1.05; s <= 2.0; s += 0.05)
            if (!(shape.inside_indicator(z + s * (x - z)) > 0.0)) ++violations;
    }
    return make_result("indicator monotone along interior-to-surface rays", cfg.samples,
                       static_cast<double>(violations), 0.0, violations == 0);
}

CheckResult reflection_involution(int dim, const SuiteConfig& cfg) {
    std::mt19937_64 rng(cfg.seed);
    std::normal_distribution<double> gauss(0.0, 1.0);
    double max_dev = 0.0;
    for (std::size_t i = 0; i < cfg.samples; ++i) {
        Vec v(dim), n(dim);
        for (int k = 0; k < dim; ++k) {
            v[k] = gauss(rng);
            n[k] = gauss(rng);
        }
        v.normalize();
        n.normalize();
        const Vec r = reflect_direction(v, n);
        max_dev = std::max(max_dev, std::abs(r.norm() - 1.0));
        max_dev = std::max(max_dev, (reflect_direction(r, n) - v).cwiseAbs().maxCoeff());
    }
    return make_result("reflection involution and unit norm", cfg.samples, max_dev, 1e-15,
                       max_dev <= 1e-15);
}

CheckResult distance_invariance(const TrajectoryEnsembleStats& stats) {
    return make_result("distance to vertex invariant along trajectories", stats.trajectories,
                       stats.max_dist_drift, 1e-9, stats.max_dist_drift <= 1e-9);
}

CheckResult integral_drift(const TrajectoryEnsembleStats& stats) {
    return make_result("quadratic integral I invariant along trajectories", stats.trajectories,
                       stats.max_I_drift, 1e-8, stats.max_I_drift <= 1e-8);
}

CheckResult caustic_tangency(const TrajectoryEnsembleStats& stats) {
    return make_result("chords tangent to the sphere of radius sqrt(I)", stats.trajectories,
                       stats.max_caustic_dev, 1e-9, stats.max_caustic_dev <= 1e-9);
}

CheckResult alpha_recursion(const TrajectoryEnsembleStats& stats) {
    const bool pass = stats.max_alpha_recursion_dev <= 1e-9 && stats.alpha_strictly_decreasing &&
                      stats.theta_positive && stats.max_theta_telescope_dev <= 1e-9;
    std::ostringstream note;
    note << "telescoping dev " << stats.max_theta_telescope_dev
         << (stats.alpha_strictly_decreasing ? "" : "; alpha not strictly decreasing")
         << (stats.theta_positive ? "" : "; non-positive theta");
    return make_result("alpha recursion, monotonicity and sin(alpha)||p|| = R",
                       stats.total_steps, stats.max_alpha_recursion_dev, 1e-9, pass, note.str());
}

CheckResult termination(const TrajectoryEnsembleStats& stats, int cap) {
    std::ostringstream note;
    note << "max m = " << stats.max_m << ", cap " << cap << ", skipped " << stats.skipped;
    return make_result("finite reflections (no cap breaches)", stats.trajectories,
                       static_cast<double>(stats.cap_breaches), 0.0, stats.cap_breaches == 0,
                       note.str());
}

CheckResult a_positivity(const TrajectoryEnsembleStats& stats) {
    return make_result("A_k positive at every step", stats.total_steps,
                       stats.min_A, 0.0, stats.min_A > 0.0, "value shown is min A_k");
}

CheckResult angular_momentum(const ConeShape& shape, const TrajectoryEnsembleStats& stats) {
    if (!is_rotationally_symmetric(shape))
        return make_result("angular momentum m12 per reflection", 0, 0.0, 1e-10, true,
                           "skipped: shape not rotationally symmetric");
    return make_result("angular momentum m12 per reflection", stats.trajectories,
                       stats.max_m12_drift, 1e-10, stats.max_m12_drift <= 1e-10);
}

CheckResult sigma_involution(const ConeShape& shape, const SuiteConfig& cfg) {
    LineSampler sampler(shape, cfg.seed, cfg.q_radius);
    double max_dev = 0.0;
    for (std::size_t i = 0; i < cfg.samples; ++i) {
        const OrientedLine x = sampler.delta0_line();
        const OrientedLine sx = sigma_map(shape, x);
        const Vec n_v = shape.normal_at(x.v);
        // sigma lands in the open part of Delta1 and flips the pairing sign
        max_dev = std::max(max_dev, std::abs(n_v.dot(sx.q) + n_v.dot(x.q)));
        max_dev = std::max(max_dev, std::abs(sx.q.squaredNorm() - x.q.squaredNorm()));
        const OrientedLine back(sx.v, sx.q - 2.0 * sx.q.dot(n_v) * n_v);
        max_dev = std::max(max_dev, line_distance(back, x));
    }
    return make_result("sigma is an involution onto Delta1 interior", cfg.samples, max_dev, 1e-12,
                       max_dev <= 1e-12);
}

CheckResult sigma_limit(const ConeShape& shape, const SuiteConfig& cfg) {
    LineSampler sampler(shape, cfg.seed, cfg.q_radius);
    const std::size_t n_lines = std::max<std::size_t>(1, cfg.samples / 20);
    std::size_t failures = 0;
    double worst_final = 0.0;
    for (std::size_t i = 0; i < n_lines; ++i) {
        const OrientedLine x = sampler.delta0_line();
        const SigmaLimitReport report = sigma_limit_check(shape, x, 1e-2);
        if (!report.converged) ++failures;
        if (!report.distances.empty())
            worst_final = std::max(worst_final, report.distances.back());
    }
    return make_result("billiard map converges to sigma at Delta0", n_lines, worst_final, 1e-6,
                       failures == 0);
}

CheckResult transport_boundary(const TransportField& field, const SuiteConfig& cfg) {
    const ConeShape& shape = field.shape();
    LineSampler sampler(shape, cfg.seed, cfg.q_radius);
    double max_dev = 0.0;
    Vec v0 = Vec::Zero(shape.dim());
    v0[shape.dim() - 1] = 1.0;
    max_dev = std::max(max_dev, field.x_field(v0).norm());  // X(v0) = 0
    for (std::size_t i = 0; i < cfg.samples; ++i) {
        const Vec g = sampler.direction_on_gamma();
        max_dev = std::max(max_dev, (field.x_field(g) - shape.normal_at(g)).norm());
        const Vec d = sampler.direction_in_d(0.999);
        const Vec x = field.x_field(d);
        max_dev = std::max(max_dev, std::abs(x.norm() - field.g(d)));
        if (x.norm() > 1.0 + 1e-12) max_dev = std::max(max_dev, x.norm() - 1.0);
        max_dev = std::max(max_dev, std::abs(x.dot(d)));  // tangency
    }
    return make_result("transport field boundary values (X(v0)=0, X=n on Gamma, ||X||=g)",
                       cfg.samples, max_dev, 1e-9, max_dev <= 1e-9);
}

CheckResult glue_identity(const TransportField& field, const SuiteConfig& cfg) {
    const ConeShape& shape = field.shape();
    LineSampler sampler(shape, cfg.seed, cfg.q_radius);
    double max_dev = 0.0;
    for (std::size_t i = 0; i < cfg.samples; ++i) {
        const OrientedLine x = sampler.delta0_line();
        const OrientedLine sx = sigma_map(shape, x);
        const Vec fa = f_components(field, x);
        const Vec fb = f_components(field, sx);
        max_dev = std::max(max_dev, (fa - fb).cwiseAbs().maxCoeff());
    }
    return make_result("glue identity F_i = F_i o sigma on Delta0", cfg.samples, max_dev, 1e-12,
                       max_dev <= 1e-12);
}

CheckResult rank_dichotomy(const TransportField& field, const SuiteConfig& cfg) {
    const ConeShape& shape = field.shape();
    LineSampler sampler(shape, cfg.seed, cfg.q_radius);
    const int n = shape.dim();
    double min_sv_on_d = std::numeric_limits<double>::infinity();
    double max_small_sv_on_gamma = 0.0;
    double min_second_sv_on_gamma = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < cfg.samples; ++i) {
        const Vec sv_d = f_map_singular_values(field, sampler.direction_in_d(0.99));
        min_sv_on_d = std::min(min_sv_on_d, sv_d[sv_d.size() - 1]);
        const Vec sv_g = f_map_singular_values(field, sampler.direction_on_gamma());
        max_small_sv_on_gamma = std::max(max_small_sv_on_gamma, sv_g[sv_g.size() - 1]);
        if (n > 2)
            min_second_sv_on_gamma = std::min(min_second_sv_on_gamma, sv_g[sv_g.size() - 2]);
    }
    const bool pass = min_sv_on_d > 1e-6 && max_small_sv_on_gamma < 1e-9 &&
                      (n == 2 || min_second_sv_on_gamma > 1e-6);
    std::ostringstream note;
    note << "min sv on D " << min_sv_on_d << ", max small sv on Gamma " << max_small_sv_on_gamma;
    if (n > 2) note << ", min second sv on Gamma " << min_second_sv_on_gamma;
    return make_result("F-map rank n-1 on D, n-2 on Gamma", cfg.samples, max_small_sv_on_gamma,
                       1e-9, pass, note.str());
}

CheckResult integral_I_definition(const ConeShape& shape, const SuiteConfig& cfg) {
    LineSampler sampler(shape, cfg.seed, cfg.q_radius);
    double max_dev = 0.0;
    for (std::size_t i = 0; i < cfg.samples; ++i) {
        const OrientedLine line = sampler.candidate();
        max_dev = std::max(max_dev, std::abs(integral_I(line) - line.q.squaredNorm()) /
                                        std::max(1.0, line.q.squaredNorm()));
    }
    return make_result("I equals <Q,Q> on sampled lines", cfg.samples, max_dev, 1e-12,
                       max_dev <= 1e-12);
}

CheckResult vector_invariance(const TransportField& field, const SuiteConfig& cfg) {
    const ConeShape& shape = field.shape();
    LineSampler sampler(shape, cfg.seed, cfg.q_radius);
    double max_dev = 0.0;
    std::size_t used = 0;
    const std::size_t n_lines = std::max<std::size_t>(1, cfg.samples / 10);
    while (used < n_lines) {
        const auto sample = sampler.next_in_psi();
        Trajectory traj;
        IntegralVector ref;
        try {
            traj = run_trajectory(shape, sample.line, cfg.cap);
            ref = integral_vector(field, sample.line, cfg.cap);
        } catch (const BilliardError&) {
            continue;
        }
        ++used;
        for (const auto& step : traj.steps) {
            if (step.line.v == sample.line.v && step.line.q == sample.line.q) continue;
            const IntegralVector iv = integral_vector(field, step.line, cfg.cap);
            for (std::size_t j = 0; j < iv.values.size(); ++j) {
                const double scale = std::max({1.0, std::abs(ref.values[j]), std::abs(iv.values[j])});
                max_dev = std::max(max_dev, std::abs(iv.values[j] - ref.values[j]) / scale);
            }
        }
    }
    return make_result("integral vector invariant along each trajectory", used, max_dev, 1e-8,
                       max_dev <= 1e-8);
}

CheckResult trajectory_uniqueness(const TransportField& field, const SuiteConfig& cfg) {
    const ConeShape& shape = field.shape();
    LineSampler sampler(shape, cfg.seed, cfg.q_radius);
    double min_sep = std::numeric_limits<double>::infinity();
    std::size_t pairs = 0;
    while (pairs < cfg.samples) {
        try {
            const IntegralVector a = integral_vector(field, sampler.next_in_psi().line, cfg.cap);
            const IntegralVector b = integral_vector(field, sampler.next_in_psi().line, cfg.cap);
            double sep = 0.0;
            for (std::size_t j = 0; j < a.values.size(); ++j)
                sep = std::max(sep, std::abs(a.values[j] - b.values[j]));
            min_sep = std::min(min_sep, sep);
            ++pairs;
        } catch (const BilliardError&) {
            continue;
        }
    }
    return make_result("distinct trajectories have separated integral vectors", pairs, min_sep,
                       1e-6, min_sep > 1e-6, "value shown is min pair separation");
}

CheckResult reconstruction(const TransportField& field, const SuiteConfig& cfg) {
    const ConeShape& shape = field.shape();
    LineSampler sampler(shape, cfg.seed, cfg.q_radius);
    double max_dev = 0.0;
    for (std::size_t i = 0; i < cfg.samples; ++i) {
        const OrientedLine line = sampler.psi_plus_interior_line(0.99);
        const IntegralVector iv = integral_vector(field, line, cfg.cap);
        const OrientedLine back = reconstruct_from_integrals(field, iv.values);
        max_dev = std::max(max_dev, line_distance(back, line));
    }
    return make_result("line reconstruction from the integral vector on psi+", cfg.samples,
                       max_dev, 1e-8, max_dev <= 1e-8);
}

CheckResult smooth_vanishing(const TransportField& field, const SuiteConfig& cfg) {
    const ConeShape& shape = field.shape();
    LineSampler sampler(shape, cfg.seed, cfg.q_radius);
    double max_dev = 0.0;
    std::size_t produced = 0;
    for (std::size_t i = 0; i < cfg.samples; ++i) {
        const OrientedLine x = sampler.delta0_line();
        for (double s : smooth_integral_vector(field, x, cfg.cap))
            max_dev = std::max(max_dev, std::abs(s));
        // a mu-preimage of x must vanish as well
        const IntervalRecord rec = intersect(shape, x);
        if (!rec.enter_hit) continue;
        const Vec w = reflect_direction(x.v, rec.enter_hit->normal);
        const OrientedLine pre = line_from_point_direction(rec.enter_hit->point, w);
        const PhaseClass cls = classify(shape, pre);
        if (cls.tag != PhaseTag::Psi && cls.tag != PhaseTag::PsiMinus) continue;
        ++produced;
        for (double s : smooth_integral_vector(field, pre, cfg.cap))
            max_dev = std::max(max_dev, std::abs(s));
    }
    std::ostringstream note;
    note << produced << " preimages exercised";
    return make_result("smooth integrals vanish on Delta0 and its preimages", cfg.samples,
                       max_dev, 1e-12, max_dev <= 1e-12, note.str());
}

CheckResult smooth_recovery(const TransportField& field, const SuiteConfig& cfg) {
    const ConeShape& shape = field.shape();
    LineSampler sampler(shape, cfg.seed, cfg.q_radius);
    double max_dev = 0.0;
    for (std::size_t i = 0; i < cfg.samples; ++i) {
        const OrientedLine line = sampler.psi_plus_interior_line(0.99);
        const std::vector<double> s = smooth_integral_vector(field, line, cfg.cap);
        const OrientedLine back = reconstruct_from_smooth(s);
        max_dev = std::max(max_dev, line_distance(back, line));
    }
    return make_result("line recovery from the smooth integral vector on psi+", cfg.samples,
                       max_dev, 1e-8, max_dev <= 1e-8);
}

CheckResult lift_continuity(const TransportField& field, const SuiteConfig& cfg) {
    const ConeShape& shape = field.shape();
    LineSampler sampler(shape, cfg.seed, cfg.q_radius);
    const std::size_t n_lines = std::max<std::size_t>(1, cfg.samples / 20);
    std::size_t failures = 0;
    double worst = 0.0;
    for (std::size_t i = 0; i < n_lines; ++i) {
        const OrientedLine x = sampler.delta0_line();
        const IntegralVector target = integral_vector(field, x, cfg.cap);
        const Vec n_v = shape.normal_at(x.v);
        bool converged = false;
        for (double eps = 1e-2; eps >= 1e-9; eps *= 0.5) {
            const Vec v_eps = std::cos(eps) * x.v - std::sin(eps) * n_v;
            const OrientedLine x_eps(v_eps, x.q - x.q.dot(v_eps) * v_eps);
            if (classify(shape, x_eps).tag != PhaseTag::Psi) continue;
            IntegralVector iv;
            try {
                iv = integral_vector(field, x_eps, cfg.cap);
            } catch (const BilliardError&) {
                break;
            }
            double dev = 0.0;
            for (std::size_t j = 0; j < iv.values.size(); ++j)
                dev = std::max(dev, std::abs(iv.values[j] - target.values[j]));
            if (dev < 1e-6) {
                converged = true;
                worst = std::max(worst, dev);
                break;
            }
        }
        if (!converged) ++failures;
    }
    return make_result("lifted integrals continuous across Delta0", n_lines, worst, 1e-6,
                       failures == 0);
}

} // namespace checks

VerificationReport verify_geometry(const ConeShape& shape, const SuiteConfig& cfg) {
    VerificationReport report;
    report.add(checks::line_invariants(shape, cfg));
    report.add(checks::intersection_cross_validation(shape, cfg));
    report.add(checks::surface_normals(shape, cfg));
    report.add(checks::time_reversal(shape, cfg));
    report.add(checks::indicator_ray_monotone(shape, cfg));
    return report;
}

VerificationReport verify_dynamics(const ConeShape& shape, const SuiteConfig& cfg) {
    VerificationReport report;
    report.add(checks::reflection_involution(shape.dim(), cfg));
    const TrajectoryEnsembleStats stats = run_trajectory_ensemble(shape, cfg);
    report.add(checks::distance_invariance(stats));
    report.add(checks::alpha_recursion(stats));
    report.add(checks::termination(stats, cfg.cap));
    report.add(checks::a_positivity(stats));
    report.add(checks::angular_momentum(shape, stats));
    report.add(checks::sigma_involution(shape, cfg));
    report.add(checks::sigma_limit(shape, cfg));
    return report;
}

VerificationReport verify_integrals(const ConeShape& shape, const SuiteConfig& cfg) {
    VerificationReport report;
    const TransportField field(shape);
    report.add(checks::integral_I_definition(shape, cfg));
    const TrajectoryEnsembleStats stats = run_trajectory_ensemble(shape, cfg);
    report.add(checks::integral_drift(stats));
    report.add(checks::caustic_tangency(stats));
    report.add(checks::transport_boundary(field, cfg));
    report.add(checks::glue_identity(field, cfg));
    report.add(checks::rank_dichotomy(field, cfg));
    report.add(checks::vector_invariance(field, cfg));
    report.add(checks::trajectory_uniqueness(field, cfg));
    report.add(checks::reconstruction(field, cfg));
    report.add(checks::smooth_vanishing(field, cfg));
    report.add(checks::smooth_recovery(field, cfg));
    report.add(checks::lift_continuity(field, cfg));
    return report;
}

VerificationReport verify_all(const ConeShape& shape, const SuiteConfig& cfg) {
    VerificationReport report;
    report.append(verify_geometry(shape, cfg));
    report.append(verify_dynamics(shape, cfg));
    report.append(verify_integrals(shape, cfg));

    LineSampler sampler(shape, cfg.seed, cfg.q_radius);
    for (std::size_t i = 0; i < std::min<std::size_t>(cfg.samples, 200); ++i) sampler.next_in_psi();
    report.add(CheckResult{"sampling acceptance rate positive", sampler.proposals(),
                           sampler.acceptance_rate(), 0.0, sampler.acceptance_rate() > 0.0,
                           "value shown is the acceptance rate"});
    return report;
}

int unfolding_reflection_count(double theta, const OrientedLine& line) {
    const double r = std::tan(theta / 2.0);
    const double w_right = std::atan2(1.0, r);
    const Vec& v = line.v;
    const Vec& q = line.q;
    const double cross = q[0] * v[1] - q[1] * v[0];
    if (std::abs(cross) < 1e-12) return -1;  // through the vertex

    const double phi_v = std::atan2(v[1], v[0]);
    const double lo = (cross > 0.0) ? phi_v - kPi : phi_v;
    const double hi = (cross > 0.0) ? phi_v : phi_v + kPi;

    const auto grid_in_open = [&](double a, double b) {
        const long k_min = static_cast<long>(std::floor((a - w_right) / theta)) + 1;
        const long k_max = static_cast<long>(std::ceil((b - w_right) / theta)) - 1;
        return static_cast<int>(std::max(0L, k_max - k_min + 1));
    };
    const auto in_sector = [&](double ang) {
        double x = std::fmod(ang - w_right, 2.0 * kPi);
        if (x < 0.0) x += 2.0 * kPi;
        return x > 0.0 && x < theta;
    };

    if (in_sector(phi_v)) return 0;                 // escaping direction: psi+
    if (in_sector(phi_v + kPi)) return grid_in_open(lo, hi);  // came from inside: psi-

    // psi or miss: probe the mid-sector ray for a chord point
    const double mid = w_right + theta / 2.0;
    const double dx = std::cos(mid), dy = std::sin(mid);
    const double denom = v[0] * dy - v[1] * dx;
    if (std::abs(denom) < 1e-15) return -1;
    const double t_mid = -(q[0] * dy - q[1] * dx) / denom;
    const Vec x0 = line.point_at(t_mid);
    if (!(x0[0] * dx + x0[1] * dy > 0.0)) return -1;  // crosses the opposite ray: misses

    double phi0 = std::atan2(x0[1], x0[0]);
    phi0 += 2.0 * kPi * std::round((0.5 * (lo + hi) - phi0) / (2.0 * kPi));
    if (!(phi0 > lo && phi0 < hi)) return -1;
    return (cross > 0.0) ? grid_in_open(phi0, hi) : grid_in_open(lo, phi0);
}

AngleOracleReport run_angle_oracle(double theta, std::size_t samples, std::uint64_t seed) {
    AngleOracleReport report;
    report.theta = theta;
    report.bound = static_cast<int>(std::ceil(kPi / theta - 1e-9));

    const ConeShape wedge = ConeShape::planar_angle(theta);
    LineSampler sampler(wedge, seed);
    while (report.samples < samples) {
        const auto sample = sampler.next_in_psi();
        int m_sim = 0;
        try {
            m_sim = run_trajectory(wedge, sample.line).reflection_count;
        } catch (const BilliardError&) {
            continue;
        }
        const int m_oracle = unfolding_reflection_count(theta, sample.line);
        ++report.samples;
        if (m_sim != m_oracle) ++report.mismatches;
        report.max_count = std::max(report.max_count, m_sim);
        report.min_count = std::min(report.min_count, m_sim);
        if (m_sim > report.bound) ++report.over_bound;
        if (m_sim == report.bound) report.bound_attained = true;
        if (m_sim == report.bound - 1) report.bound_minus_one_attained = true;
    }
    return report;
}

} // namespace billiards
