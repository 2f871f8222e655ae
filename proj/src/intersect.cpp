#include "billiards/intersect.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

namespace billiards {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kScanBound = 65536.0;  // 2^16, outer bound of the grid scan
constexpr int kGridPoints = 129;

double ray_indicator(const ConeShape& shape, const OrientedLine& line, double t) {
    return shape.inside_indicator(line.point_at(t));
}

/// Indicator seen from infinity: G(v + u Q) equals G(Q + t v) at t = 1/u for
/// t > 0, by scale invariance of G. Defined for u >= 0 (u = 0 is the
/// directional limit G(v)).
double far_indicator(const ConeShape& shape, const OrientedLine& line, double u) {
    return shape.inside_indicator(line.v + u * line.q);
}

SurfaceHit make_hit(const ConeShape& shape, const OrientedLine& line, double t, bool entering) {
    SurfaceHit hit;
    hit.t = t;
    hit.point = line.point_at(t);
    hit.normal = shape.normal_at(hit.point);
    hit.incidence = line.v.dot(hit.normal);
    if (std::abs(hit.incidence) <= shape.tol().tangent)
        fail(Errc::TangentLine, "endpoint incidence below the tangency threshold");
    if (entering != (hit.incidence > 0.0))
        fail(Errc::RootFindFailure, "endpoint incidence has the wrong sign");
    return hit;
}

/// Bisection for the sign change of f between t_neg (f < 0) and t_pos (f > 0),
/// followed by a few guarded secant steps to polish the root.
template <typename F>
double bisect_root(F&& f, double t_neg, double t_pos, const Tolerances& tol) {
    double f_neg = f(t_neg);
    double f_pos = f(t_pos);
    if (!(f_neg < 0.0) || !(f_pos > 0.0))
        fail(Errc::RootFindFailure, "lost the bracket for a surface crossing");
    for (int i = 0; i < tol.max_root_iter; ++i) {
        const double width = std::abs(t_pos - t_neg);
        if (width <= tol.root * std::max({1.0, std::abs(t_neg), std::abs(t_pos)})) break;
        double mid = 0.5 * (t_neg + t_pos);
        // Secant proposal once the bracket is tight enough to trust the slope.
        if (std::isfinite(f_pos) && std::isfinite(f_neg) && f_pos != f_neg) {
            const double sec = t_neg - f_neg * (t_pos - t_neg) / (f_pos - f_neg);
            const double margin = 0.01 * width;
            if (sec > std::min(t_neg, t_pos) + margin && sec < std::max(t_neg, t_pos) - margin)
                mid = sec;
        }
        const double fm = f(mid);
        if (fm < 0.0) {
            t_neg = mid;
            f_neg = fm;
        } else {
            t_pos = mid;
            f_pos = fm;
        }
    }
    return 0.5 * (t_neg + t_pos);
}

/// Golden-section refinement of a minimum inside [lo, hi]; returns the best
/// parameter found (not necessarily a negative value).
template <typename F>
double golden_min(F&& f, double lo, double hi, int iters = 60) {
    constexpr double inv_phi = 0.6180339887498949;
    double a = lo, b = hi;
    double x1 = b - inv_phi * (b - a);
    double x2 = a + inv_phi * (b - a);
    double f1 = f(x1), f2 = f(x2);
    for (int i = 0; i < iters && (b - a) > 1e-14 * std::max(1.0, std::abs(a) + std::abs(b)); ++i) {
        if (f1 < f2) {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - inv_phi * (b - a);
            f1 = f(x1);
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + inv_phi * (b - a);
            f2 = f(x2);
        }
    }
    return f1 < f2 ? x1 : x2;
}

/// Directional limit of the indicator along the ray of direction w:
/// finite iff w^n > 0, +inf otherwise.
double direction_limit(const ConeShape& shape, const Vec& w) {
    if (!(w[shape.dim() - 1] > 0.0)) return kInf;
    return shape.inside_indicator(w);
}

/// Looks for a point of the line strictly inside the cone by scanning
/// [-T, T] with doubling T, refining the most promising grid dips by
/// golden section. Returns false if no interior point was found.
bool scan_for_interior(const ConeShape& shape, const OrientedLine& line, double& t_interior,
                       double& best_min) {
    const auto f = [&](double t) { return ray_indicator(shape, line, t); };
    best_min = kInf;
    for (double T = 1.0; T <= kScanBound; T *= 2.0) {
        std::vector<double> ts(kGridPoints), fs(kGridPoints);
        for (int i = 0; i < kGridPoints; ++i) {
            ts[i] = -T + 2.0 * T * i / (kGridPoints - 1);
            fs[i] = f(ts[i]);
            best_min = std::min(best_min, fs[i]);
            if (fs[i] < 0.0) {
                t_interior = ts[i];
                return true;
            }
        }
        // Collect interior local minima of the grid and refine the best few.
        std::vector<int> dips;
        for (int i = 1; i + 1 < kGridPoints; ++i)
            if (fs[i] <= fs[i - 1] && fs[i] <= fs[i + 1] && std::isfinite(fs[i])) dips.push_back(i);
        std::sort(dips.begin(), dips.end(), [&](int a, int b) { return fs[a] < fs[b]; });
        if (dips.size() > 3) dips.resize(3);
        for (int i : dips) {
            const double t_best = golden_min(f, ts[i - 1], ts[i + 1]);
            const double f_best = f(t_best);
            best_min = std::min(best_min, f_best);
            if (f_best < 0.0) {
                t_interior = t_best;
                return true;
            }
        }
    }
    return false;
}

struct ForwardBoundary {
    bool finite = false;
    double t = kInf;
};

/// Resolves the forward end (t -> +inf) of the interior interval, starting
/// from an interior point t_in. Far crossings beyond the probe range are
/// found by bisecting the reciprocal parameter u = 1/t, where the indicator
/// extends continuously to u = 0 with value G(v).
ForwardBoundary forward_boundary(const ConeShape& shape, const OrientedLine& line, double t_in) {
    const auto& tol = shape.tol();
    const double limit = direction_limit(shape, line.v);
    if (limit < 0.0) return {};  // escapes forward

    const auto f = [&](double t) { return ray_indicator(shape, line, t); };
    double t_neg = t_in;
    const double probe_cap = std::max(kScanBound, 8.0 * std::abs(t_in));
    for (double step = 1.0;; step *= 2.0) {
        const double t_probe = t_neg + step;
        const double f_probe = f(t_probe);
        if (f_probe > 0.0)
            return {true, bisect_root(f, t_neg, t_probe, tol)};
        if (f_probe < 0.0) t_neg = t_probe;
        if (t_probe > probe_cap) break;
    }
    if (!(t_neg > 0.0))
        fail(Errc::RootFindFailure, "no positive anchor for the far crossing");
    // Far crossing: G < 0 at t_neg yet the directional limit is positive.
    const auto phi = [&](double u) { return far_indicator(shape, line, u); };
    double u_neg = 1.0 / t_neg;
    double u_pos = 0.0;  // phi(0) = G(v) > 0 analytically
    for (int i = 0; i < tol.max_root_iter; ++i) {
        if (u_neg - u_pos <= tol.root * std::max(1e-30, u_neg)) break;
        const double mid = 0.5 * (u_neg + u_pos);
        if (phi(mid) < 0.0)
            u_neg = mid;
        else
            u_pos = mid;
    }
    return {true, 2.0 / (u_neg + u_pos)};
}

/// Interval record for a line whose direction lies in the Gamma band:
/// the line is asymptotically parallel to a ruling of K, so it has at most
/// one finite transversal crossing, decided by the sign of <n_v, Q>.
IntervalRecord gamma_direction_record(const ConeShape& shape, const OrientedLine& line) {
    IntervalRecord rec;
    const Vec n_v = shape.normal_at(line.v);
    if (!(n_v.dot(line.q) > 0.0)) return rec;  // Delta1-type: stays outside

    const auto f = [&](double t) { return ray_indicator(shape, line, t); };
    double t_neg = kInf;
    for (double t = 1.0; t <= kScanBound; t *= 2.0) {
        if (f(t) < 0.0) {
            t_neg = t;
            break;
        }
    }
    if (!std::isfinite(t_neg))
        fail(Errc::RootFindFailure, "no interior point on an asymptotic line");
    double t_pos = t_neg;
    for (double step = 1.0; t_pos > -kScanBound; step *= 2.0) {
        t_pos = t_neg - step;
        if (f(t_pos) > 0.0) break;
    }
    if (!(f(t_pos) > 0.0))
        fail(Errc::RootFindFailure, "no outside anchor on an asymptotic line");
    rec.empty = false;
    rec.t_enter = bisect_root(f, t_neg, t_pos, shape.tol());
    rec.enter_hit = make_hit(shape, line, rec.t_enter, true);
    rec.t_exit = kInf;
    return rec;
}

IntervalRecord reversed_record(const IntervalRecord& rec) {
    IntervalRecord out;
    out.empty = rec.empty;
    out.t_enter = -rec.t_exit;
    out.t_exit = -rec.t_enter;
    auto flip = [](const SurfaceHit& h) {
        SurfaceHit g = h;
        g.t = -h.t;
        g.incidence = -h.incidence;
        return g;
    };
    if (rec.exit_hit) out.enter_hit = flip(*rec.exit_hit);
    if (rec.enter_hit) out.exit_hit = flip(*rec.enter_hit);
    return out;
}

} // namespace

IntervalRecord intersect_closed_form(const ConeShape& shape, const OrientedLine& line) {
    shape.require_valid();
    if (!shape.is_ellipsoid())
        fail(Errc::InvalidArgument, "closed-form intersection requires an ellipsoid section");
    if (shape.direction_on_gamma(line.v)) return gamma_direction_record(shape, line);
    if (shape.direction_on_gamma(-line.v))
        return reversed_record(gamma_direction_record(shape, line.reversed()));

    const int n = shape.dim();
    const auto& sec = shape.ellipsoid_section();
    const double qn = line.q[n - 1];
    const double vn = line.v[n - 1];
    const Vec u = line.q.head(n - 1) - sec.center * qn;
    const Vec w = line.v.head(n - 1) - sec.center * vn;
    const Vec mu = sec.matrix * u;
    const Vec mw = sec.matrix * w;

    // Homogeneous quadratic along the line; negative inside the double cone.
    const double a = w.dot(mw) - vn * vn;
    const double b = 2.0 * (u.dot(mw) - qn * vn);
    const double c = u.dot(mu) - qn * qn;

    IntervalRecord rec;
    const double disc = b * b - 4.0 * a * c;
    const double mag = std::abs(a) + std::abs(b) + std::abs(c);
    if (std::abs(a) <= 1e-15 * mag) {
        // Direction numerically on the asymptotic cone but outside the Gamma
        // band; fall back to the bracketing solver to settle the geometry.
        return intersect_generic(shape, line);
    }
    if (a > 0.0) {
        if (disc <= 0.0) {
            // A vanishing discriminant with the double root in the upper
            // half-space is an exact grazing contact, not a miss.
            if (disc >= -1e-12 * (b * b + std::abs(4.0 * a * c)) &&
                qn - b / (2.0 * a) * vn > 0.0)
                fail(Errc::TangentLine, "line grazes the cone without crossing");
            return rec;
        }
        const double root = std::sqrt(disc);
        const double r1 = (b >= 0.0) ? (-b - root) / (2.0 * a) : (-b + root) / (2.0 * a);
        const double r2 = (r1 != 0.0) ? c / (a * r1) : -b / a;
        const double lo = std::min(r1, r2), hi = std::max(r1, r2);
        const double mid_height = qn + 0.5 * (lo + hi) * vn;
        if (!(mid_height > 0.0)) return rec;  // interval lies in the mirror cone
        rec.empty = false;
        rec.t_enter = lo;
        rec.t_exit = hi;
        rec.enter_hit = make_hit(shape, line, lo, true);
        rec.exit_hit = make_hit(shape, line, hi, false);
        return rec;
    }
    // a < 0: the interior interval is the unbounded component on the side
    // where x^n grows; the crossing is its single finite endpoint.
    if (disc <= 0.0)
        fail(Errc::RootFindFailure, "degenerate near-vertex line");
    const double root = std::sqrt(disc);
    const double r1 = (b >= 0.0) ? (-b - root) / (2.0 * a) : (-b + root) / (2.0 * a);
    const double r2 = (r1 != 0.0) ? c / (a * r1) : -b / a;
    rec.empty = false;
    if (vn > 0.0) {
        rec.t_enter = std::max(r1, r2);
        rec.enter_hit = make_hit(shape, line, rec.t_enter, true);
    } else {
        rec.t_exit = std::min(r1, r2);
        rec.exit_hit = make_hit(shape, line, rec.t_exit, false);
    }
    return rec;
}

IntervalRecord intersect_generic(const ConeShape& shape, const OrientedLine& line) {
    shape.require_valid();
    if (shape.direction_on_gamma(line.v)) return gamma_direction_record(shape, line);
    if (shape.direction_on_gamma(-line.v))
        return reversed_record(gamma_direction_record(shape, line.reversed()));

    const double fwd_limit = direction_limit(shape, line.v);
    const double bwd_limit = direction_limit(shape, -line.v);

    double t_in = 0.0;
    bool found = false;
    if (fwd_limit < 0.0 || bwd_limit < 0.0) {
        // The line is eventually interior on one side; walk that limit in
        // from infinity with the reciprocal parameter.
        const OrientedLine probe_line = (fwd_limit < 0.0) ? line : line.reversed();
        for (double u = 1.0; u >= 1e-30; u *= 0.5) {
            if (far_indicator(shape, probe_line, u) < 0.0) {
                t_in = (fwd_limit < 0.0) ? 1.0 / u : -1.0 / u;
                found = true;
                break;
            }
        }
        if (!found) fail(Errc::RootFindFailure, "escaping line has no reachable interior point");
    } else {
        double best_min = kInf;
        found = scan_for_interior(shape, line, t_in, best_min);
        if (!found) {
            if (best_min <= shape.tol().tangent)
                fail(Errc::TangentLine, "line grazes the cone without crossing");
            return IntervalRecord{};  // misses the cone
        }
    }

    IntervalRecord rec;
    rec.empty = false;
    const ForwardBoundary fwd = forward_boundary(shape, line, t_in);
    if (fwd.finite) {
        rec.t_exit = fwd.t;
        rec.exit_hit = make_hit(shape, line, fwd.t, false);
    }
    const ForwardBoundary bwd = forward_boundary(shape, line.reversed(), -t_in);
    if (bwd.finite) {
        rec.t_enter = -bwd.t;
        rec.enter_hit = make_hit(shape, line, rec.t_enter, true);
    }
    return rec;
}

IntervalRecord intersect(const ConeShape& shape, const OrientedLine& line) {
    if (shape.is_ellipsoid()) return intersect_closed_form(shape, line);
    return intersect_generic(shape, line);
}

const char* phase_tag_name(PhaseTag tag) {
    switch (tag) {
        case PhaseTag::PsiMinus: return "PsiMinus";
        case PhaseTag::Psi: return "Psi";
        case PhaseTag::PsiPlus: return "PsiPlus";
        case PhaseTag::Delta0: return "Delta0";
        case PhaseTag::Delta1: return "Delta1";
        case PhaseTag::NotInPhaseSpace: return "NotInPhaseSpace";
    }
    return "Unknown";
}

PhaseClass classify(const ConeShape& shape, const OrientedLine& line) {
    shape.require_valid();
    check_line(line);
    if (line.q.norm() <= 1e-12)
        return {PhaseTag::NotInPhaseSpace, "line through the vertex"};
    if (shape.direction_on_gamma(line.v)) {
        const Vec n_v = shape.normal_at(line.v);
        return n_v.dot(line.q) > 0.0 ? PhaseClass{PhaseTag::Delta0, ""}
                                     : PhaseClass{PhaseTag::Delta1, ""};
    }
    if (shape.direction_on_gamma(-line.v))
        return {PhaseTag::NotInPhaseSpace, "direction opposite to a ruling of K"};

    IntervalRecord rec;
    try {
        rec = intersect(shape, line);
    } catch (const BilliardError& err) {
        if (err.code() == Errc::TangentLine)
            return {PhaseTag::NotInPhaseSpace, std::string("tangent: ") + err.what()};
        throw;
    }
    if (rec.empty) return {PhaseTag::NotInPhaseSpace, "no transversal intersection"};
    const bool enter_finite = std::isfinite(rec.t_enter);
    const bool exit_finite = std::isfinite(rec.t_exit);
    if (enter_finite && exit_finite) return {PhaseTag::Psi, ""};
    if (exit_finite) return {PhaseTag::PsiMinus, ""};
    if (enter_finite) return {PhaseTag::PsiPlus, ""};
    fail(Errc::RootFindFailure, "interval unbounded on both sides");
}

} // namespace billiards
