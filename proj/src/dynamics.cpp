#include "billiards/dynamics.hpp"

#include <cmath>
#include <sstream>

namespace billiards {

Vec reflect_direction(const Vec& v, const Vec& n) {
    if (std::abs(v.norm() - 1.0) > 1e-9 || std::abs(n.norm() - 1.0) > 1e-9)
        fail(Errc::InvalidArgument, "reflection needs unit direction and unit normal");
    // Householder form with the exact <n,n> ratio: the double application is
    // then an algebraic identity even when n is one ulp off unit length, and
    // extended precision keeps the defect below 1e-15 per component.
    long double dot = 0.0L, nn = 0.0L;
    for (int i = 0; i < v.size(); ++i) {
        dot += static_cast<long double>(v[i]) * n[i];
        nn += static_cast<long double>(n[i]) * n[i];
    }
    const long double scale = 2.0L * dot / nn;
    Vec out(v.size());
    for (int i = 0; i < v.size(); ++i)
        out[i] = static_cast<double>(v[i] - scale * n[i]);
    return out;
}

OrientedLine billiard_map(const ConeShape& shape, const OrientedLine& line) {
    const PhaseClass cls = classify(shape, line);
    if (cls.tag != PhaseTag::PsiMinus && cls.tag != PhaseTag::Psi)
        fail(Errc::NotReflectable,
             std::string("line classifies as ") + phase_tag_name(cls.tag) +
                 (cls.reason.empty() ? "" : " (" + cls.reason + ")"));
    const IntervalRecord rec = intersect(shape, line);
    if (!rec.exit_hit) fail(Errc::RootFindFailure, "reflectable line lost its exiting hit");
    const Vec w = reflect_direction(line.v, rec.exit_hit->normal);
    return line_from_point_direction(rec.exit_hit->point, w);
}

ReflectionStep make_step(int k, const OrientedLine& departing, const Vec& p, double incidence_out) {
    const double pn = p[p.size() - 1];
    const double pnorm = p.norm();
    if (pnorm <= 1e-12 || pn <= 0.0)
        fail(Errc::DegenerateStep, "surface point at or below the vertex");
    ReflectionStep step;
    step.k = k;
    step.line = departing;
    step.p = p;
    step.q_section = p / pn;
    step.alpha = std::acos(clamp_unit(departing.v.dot(p) / pnorm));
    step.a_value = pn * incidence_out;  // ||p||/||q|| = p^n
    step.dist = departing.q.norm();
    step.theta = 0.0;  // filled once the next surface point is known
    return step;
}

double vertex_angle(const Vec& p_from, const Vec& p_to) {
    const double denom = p_from.norm() * p_to.norm();
    if (denom <= 1e-24) fail(Errc::DegenerateStep, "vertex angle of a degenerate point pair");
    return std::acos(clamp_unit(p_from.dot(p_to) / denom));
}

Trajectory run_trajectory(const ConeShape& shape, const OrientedLine& start, int cap) {
    shape.require_valid();
    check_line(start);
    if (cap < 0) fail(Errc::InvalidArgument, "reflection cap must be non-negative");

    const PhaseClass c0 = classify(shape, start);
    if (!c0.in_psi() && c0.tag != PhaseTag::Delta0)
        fail(Errc::NotReflectable,
             std::string("start line classifies as ") + phase_tag_name(c0.tag) +
                 (c0.reason.empty() ? "" : " (" + c0.reason + ")"));

    Trajectory traj;
    traj.initial = start;
    OrientedLine current = start;
    bool first = true;
    int m = 0;

    while (true) {
        if (current.q.norm() <= 1e-12)
            fail(Errc::DegenerateStep, "trajectory reached a line through the vertex");
        if (shape.direction_on_gamma(current.v)) {
            const Vec n_v = shape.normal_at(current.v);
            traj.final_tag = n_v.dot(current.q) > 0.0 ? PhaseTag::Delta0 : PhaseTag::Delta1;
            break;
        }
        IntervalRecord rec;
        try {
            rec = intersect(shape, current);
        } catch (const BilliardError& err) {
            if (err.code() == Errc::TangentLine && !first)
                fail(Errc::TangentLine, "trajectory became tangent after " + std::to_string(m) +
                                            " reflections");
            throw;
        }
        if (first && rec.enter_hit)
            traj.steps.push_back(make_step(static_cast<int>(traj.steps.size()) + 1, current,
                                           rec.enter_hit->point, rec.enter_hit->incidence));
        first = false;
        if (rec.empty) fail(Errc::RootFindFailure, "trajectory lost the cone mid-flight");
        if (!rec.exit_hit) {
            traj.final_tag = PhaseTag::PsiPlus;
            break;
        }
        if (m >= cap) {
            std::ostringstream what;
            what << "cap of " << cap << " reflections reached; last distance "
                 << current.q.norm() << ", last alpha "
                 << (traj.steps.empty() ? -1.0 : traj.steps.back().alpha);
            fail(Errc::MaxReflectionsExceeded, what.str());
        }
        const Vec w = reflect_direction(current.v, rec.exit_hit->normal);
        const OrientedLine next = line_from_point_direction(rec.exit_hit->point, w);
        ++m;
        traj.steps.push_back(make_step(static_cast<int>(traj.steps.size()) + 1, next,
                                       rec.exit_hit->point, -rec.exit_hit->incidence));
        current = next;
    }

    traj.final_line = current;
    traj.reflection_count = m;
    for (std::size_t i = 0; i + 1 < traj.steps.size(); ++i)
        traj.steps[i].theta = vertex_angle(traj.steps[i].p, traj.steps[i + 1].p);
    if (!traj.steps.empty()) {
        // The escape segment recedes along its direction, so the vertex angle
        // to "the next point" tends to the step's own alpha.
        traj.steps.back().theta = traj.steps.back().alpha;
    }
    return traj;
}

OrientedLine sigma_map(const ConeShape& shape, const OrientedLine& line) {
    const PhaseClass cls = classify(shape, line);
    if (cls.tag != PhaseTag::Delta0)
        fail(Errc::NotOnDelta0,
             std::string("line classifies as ") + phase_tag_name(cls.tag));
    const Vec n_v = shape.normal_at(line.v);
    return OrientedLine(line.v, line.q - 2.0 * line.q.dot(n_v) * n_v);
}

SigmaLimitReport sigma_limit_check(const ConeShape& shape, const OrientedLine& x, double scale) {
    if (!(scale > 0.0)) fail(Errc::InvalidArgument, "perturbation scale must be positive");
    const OrientedLine target = sigma_map(shape, x);  // also enforces x in Delta0
    const Vec n_v = shape.normal_at(x.v);

    SigmaLimitReport report;
    for (double eps = scale; eps >= 1e-9; eps *= 0.5) {
        // Tilt v against the inward normal: leaves the closed escape region,
        // so the perturbed line re-enters psi.
        const Vec v_eps = std::cos(eps) * x.v - std::sin(eps) * n_v;
        const OrientedLine x_eps(v_eps, x.q - x.q.dot(v_eps) * v_eps);
        const PhaseClass cls = classify(shape, x_eps);
        if (cls.tag != PhaseTag::Psi) {
            // Entering hits of Delta0 lines can be nearly tangent; large
            // tilts then miss the cone. Smaller scales restore psi.
            report.note = std::string("skipped scale ") + std::to_string(eps) + " (" +
                          phase_tag_name(cls.tag) + ")";
            continue;
        }
        const OrientedLine image = billiard_map(shape, x_eps);
        const double dist = std::sqrt((image.v - target.v).squaredNorm() +
                                      (image.q - target.q).squaredNorm());
        report.scales.push_back(eps);
        report.distances.push_back(dist);
        if (dist < 1e-6) {
            report.converged = true;
            break;
        }
    }
    return report;
}

} // namespace billiards
