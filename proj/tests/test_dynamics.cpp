#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "billiards/dynamics.hpp"
#include "billiards/sampling.hpp"
#include "test_shapes.hpp"

using namespace billiards;
using namespace billiards::testing;

namespace {
const double kSqrt2 = std::sqrt(2.0);
}

TEST_CASE("reflection law on worked vectors") {
    const Vec n = vec3(1, 0, 1) / kSqrt2;
    CHECK((reflect_direction(vec3(-1, 0, 0), n) - vec3(0, 0, 1)).norm() < 1e-15);

    // Grazing direction is fixed.
    const Vec g = vec3(0, 1, 0);
    CHECK((reflect_direction(g, n) - g).norm() == 0.0);

    // Normal incidence reverses.
    CHECK((reflect_direction(n, n) + n).norm() < 1e-15);
}

TEST_CASE("reflection is an involution preserving unit norm") {
    std::mt19937_64 rng(2024);
    std::normal_distribution<double> gauss(0.0, 1.0);
    for (int i = 0; i < 2000; ++i) {
        Vec v(4), n(4);
        for (int k = 0; k < 4; ++k) {
            v[k] = gauss(rng);
            n[k] = gauss(rng);
        }
        v.normalize();
        n.normalize();
        const Vec r = reflect_direction(v, n);
        CHECK(std::abs(r.norm() - 1.0) <= 1e-15);
        CHECK((reflect_direction(r, n) - v).cwiseAbs().maxCoeff() <= 1e-15);
    }
}

TEST_CASE("billiard map on the worked line") {
    const ConeShape cone = unit_circular_cone();
    const OrientedLine in(vec3(-1, 0, 0), vec3(0, 0, 1));
    const OrientedLine out = billiard_map(cone, in);
    CHECK((out.v - vec3(0, 0, 1)).norm() < 1e-12);
    CHECK((out.q - vec3(-1, 0, 0)).norm() < 1e-12);
    CHECK(out.dist_to_origin() == doctest::Approx(in.dist_to_origin()).epsilon(1e-12));

    // Reflecting the time-reversed output recovers the time-reversed input.
    const OrientedLine back = billiard_map(cone, out.reversed());
    CHECK((back.v - in.reversed().v).norm() < 1e-12);
    CHECK((back.q - in.reversed().q).norm() < 1e-12);
}

TEST_CASE("billiard map requires a reflectable line") {
    const ConeShape cone = unit_circular_cone();
    try {
        billiard_map(cone, OrientedLine(vec3(0, 0, 1), vec3(1, 0, 0)));  // psi+
        CHECK(false);
    } catch (const BilliardError& err) {
        CHECK(err.code() == Errc::NotReflectable);
    }
}

TEST_CASE("single-reflection trajectory diagnostics") {
    const ConeShape cone = unit_circular_cone();
    const OrientedLine start(vec3(-1, 0, 0), vec3(0, 0, 1));
    const Trajectory traj = run_trajectory(cone, start);

    CHECK(traj.reflection_count == 1);
    CHECK(traj.final_tag == PhaseTag::PsiPlus);
    CHECK((traj.final_line.v - vec3(0, 0, 1)).norm() < 1e-12);

    // Pre-reflection step at the entering hit plus the reflected step.
    REQUIRE(traj.steps.size() == 2);
    CHECK((traj.steps[0].p - vec3(1, 0, 1)).norm() < 1e-12);
    CHECK(traj.steps[0].alpha == doctest::Approx(3.0 * M_PI / 4.0).epsilon(1e-12));
    CHECK(traj.steps[0].theta == doctest::Approx(M_PI / 2.0).epsilon(1e-12));
    CHECK((traj.steps[1].p - vec3(-1, 0, 1)).norm() < 1e-12);
    CHECK(traj.steps[1].alpha == doctest::Approx(M_PI / 4.0).epsilon(1e-12));
    // alpha recursion over the recorded pair
    CHECK(std::abs(traj.steps[1].alpha - (traj.steps[0].alpha - traj.steps[0].theta)) <= 1e-12);
    // sin(alpha) ||p|| equals the invariant distance 1
    for (const auto& step : traj.steps) {
        CHECK(std::sin(step.alpha) * step.p.norm() == doctest::Approx(1.0).epsilon(1e-12));
        CHECK(step.dist == doctest::Approx(1.0).epsilon(1e-12));
        CHECK(step.a_value > 0.0);
    }
}

TEST_CASE("trajectory from psi+ has no reflections") {
    const ConeShape cone = unit_circular_cone();
    const Trajectory traj = run_trajectory(cone, OrientedLine(vec3(0, 0, 1), vec3(1, 0, 0)));
    CHECK(traj.reflection_count == 0);
    CHECK((traj.final_line.v - vec3(0, 0, 1)).norm() == 0.0);
    CHECK((traj.final_line.q - vec3(1, 0, 0)).norm() == 0.0);
}

TEST_CASE("cap breach is a loud error") {
    const ConeShape cone = unit_circular_cone();
    try {
        run_trajectory(cone, OrientedLine(vec3(-1, 0, 0), vec3(0, 0, 1)), 0);
        CHECK(false);
    } catch (const BilliardError& err) {
        CHECK(err.code() == Errc::MaxReflectionsExceeded);
    }
}

TEST_CASE("planar wedge trajectories respect the ceil(pi/theta) bound") {
    const double theta = M_PI / 3.0;
    const ConeShape wedge = ConeShape::planar_angle(theta);
    LineSampler sampler(wedge, 17);
    int max_m = 0;
    for (int i = 0; i < 500; ++i) {
        const auto sample = sampler.next_in_psi();
        Trajectory traj;
        try {
            traj = run_trajectory(wedge, sample.line);
        } catch (const BilliardError&) {
            continue;
        }
        max_m = std::max(max_m, traj.reflection_count);
        CHECK(traj.reflection_count <= 3);
    }
    CHECK(max_m >= 2);
}

TEST_CASE("make_step rejects degenerate data") {
    const OrientedLine line(vec3(0, 0, 1), vec3(1, 0, 0));
    CHECK_THROWS_AS(make_step(1, line, Vec::Zero(3), 0.5), BilliardError);
    CHECK_THROWS_AS(vertex_angle(Vec::Zero(3), vec3(1, 0, 1)), BilliardError);
}

TEST_CASE("sigma map on the worked Delta0 line") {
    const ConeShape cone = unit_circular_cone();
    const Vec v = vec3(1, 0, 1) / kSqrt2;
    const Vec q = vec3(-1, 0, 1) / kSqrt2;
    const OrientedLine x(v, q);

    const OrientedLine sx = sigma_map(cone, x);
    CHECK((sx.v - v).norm() == 0.0);
    CHECK((sx.q - vec3(1, 0, -1) / kSqrt2).norm() < 1e-15);

    // Lands in the open part of Delta1 with the pairing sign flipped.
    const Vec n_v = cone.normal_at(v);
    CHECK(n_v.dot(sx.q) == doctest::Approx(-n_v.dot(q)).epsilon(1e-15));
    CHECK(sx.q.squaredNorm() == doctest::Approx(q.squaredNorm()).epsilon(1e-15));

    // Applying the same formula again returns the input exactly.
    const OrientedLine back(sx.v, sx.q - 2.0 * sx.q.dot(n_v) * n_v);
    CHECK((back.q - q).norm() <= 1e-15);
}

TEST_CASE("sigma is an involution on constructed Delta0 lines") {
    for (const ConeShape& cone : {unit_circular_cone(), fourier_cone(), r4_cone()}) {
        LineSampler sampler(cone, 23);
        for (int i = 0; i < 300; ++i) {
            const OrientedLine x = sampler.delta0_line();
            REQUIRE(classify(cone, x).tag == PhaseTag::Delta0);
            const OrientedLine sx = sigma_map(cone, x);
            const Vec n_v = cone.normal_at(x.v);
            const OrientedLine back(sx.v, sx.q - 2.0 * sx.q.dot(n_v) * n_v);
            CHECK((back.q - x.q).norm() <= 1e-12);
            CHECK(std::abs(sx.q.squaredNorm() - x.q.squaredNorm()) <= 1e-12);
        }
    }
}

TEST_CASE("sigma map rejects lines off Delta0") {
    const ConeShape cone = unit_circular_cone();
    try {
        sigma_map(cone, OrientedLine(vec3(0, 0, 1), vec3(1, 0, 0)));
        CHECK(false);
    } catch (const BilliardError& err) {
        CHECK(err.code() == Errc::NotOnDelta0);
    }
}

TEST_CASE("billiard map converges to sigma along psi sequences") {
    for (const ConeShape& cone : {unit_circular_cone(), fourier_cone()}) {
        LineSampler sampler(cone, 29);
        for (int i = 0; i < 10; ++i) {
            const OrientedLine x = sampler.delta0_line();
            const SigmaLimitReport report = sigma_limit_check(cone, x, 1e-2);
            CHECK(report.converged);
            REQUIRE(report.distances.size() >= 2);
            // distances shrink as the perturbation scale halves
            CHECK(report.distances.back() < report.distances.front());
            CHECK(report.distances.back() < 1e-6);
        }
    }
}

TEST_CASE("sigma limit rejects a zero scale") {
    const ConeShape cone = unit_circular_cone();
    LineSampler sampler(cone, 31);
    const OrientedLine x = sampler.delta0_line();
    CHECK_THROWS_AS(sigma_limit_check(cone, x, 0.0), BilliardError);
}

TEST_CASE("angular momentum is conserved per reflection on the circular cone") {
    const ConeShape cone = unit_circular_cone();
    LineSampler sampler(cone, 37);
    for (int i = 0; i < 200; ++i) {
        const auto sample = sampler.next_in_psi();
        Trajectory traj;
        try {
            traj = run_trajectory(cone, sample.line);
        } catch (const BilliardError&) {
            continue;
        }
        const std::size_t first_reflection = traj.steps.size() - traj.reflection_count;
        for (std::size_t j = first_reflection; j < traj.steps.size(); ++j) {
            const Vec& v_in = (j == 0) ? traj.initial.v : traj.steps[j - 1].line.v;
            const Vec& p = traj.steps[j].p;
            const double m_in = p[0] * v_in[1] - p[1] * v_in[0];
            const double m_out = p[0] * traj.steps[j].line.v[1] - p[1] * traj.steps[j].line.v[0];
            CHECK(std::abs(m_out - m_in) <= 1e-10);
        }
    }
}

TEST_CASE("random trajectories terminate with consistent diagnostics") {
    for (const ConeShape& cone : {ellipse_cone(), fourier_cone(), r4_cone()}) {
        LineSampler sampler(cone, 41);
        int done = 0;
        while (done < 150) {
            const auto sample = sampler.next_in_psi();
            Trajectory traj;
            try {
                traj = run_trajectory(cone, sample.line);
            } catch (const BilliardError& err) {
                REQUIRE(err.code() != Errc::MaxReflectionsExceeded);
                continue;
            }
            ++done;
            const double d0 = traj.initial.dist_to_origin();
            for (std::size_t j = 0; j + 1 < traj.steps.size(); ++j) {
                CHECK(std::abs(traj.steps[j + 1].alpha -
                               (traj.steps[j].alpha - traj.steps[j].theta)) <= 1e-9);
                CHECK(traj.steps[j + 1].alpha < traj.steps[j].alpha);
            }
            for (const auto& step : traj.steps) {
                CHECK(step.a_value > 0.0);
                CHECK(std::abs(step.dist - d0) / d0 <= 1e-9);
                CHECK(step.theta > 0.0);
                CHECK(step.alpha > 0.0);
                CHECK(step.alpha < M_PI);
            }
        }
    }
}
