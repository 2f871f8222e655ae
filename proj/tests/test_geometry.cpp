#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "billiards/intersect.hpp"
#include "billiards/sampling.hpp"
#include "test_shapes.hpp"

using namespace billiards;
using namespace billiards::testing;

namespace {
const double kSqrt2 = std::sqrt(2.0);
}

TEST_CASE("shape validation accepts the unit circular cone") {
    const ConeShape cone = unit_circular_cone();
    CHECK(cone.valid());
    CHECK(validate_shape(cone).pass);
}

TEST_CASE("shape validation rejects a non-convex radial section") {
    // rho = 1 + 0.8 cos(2 phi) violates rho^2 + 2 rho'^2 - rho rho'' > 0.
    const ConeShape bad = ConeShape::radial_fourier(1.0, {0.0, 0.8}, {});
    CHECK(!bad.valid());
    bool saw_convexity_failure = false;
    for (const auto& c : bad.validation().checks)
        if (!c.pass && c.detail.find("NonConvexSection") != std::string::npos)
            saw_convexity_failure = true;
    CHECK(saw_convexity_failure);
    CHECK_THROWS_AS(bad.require_valid(), BilliardError);
}

TEST_CASE("shape validation rejects an off-axis section") {
    Vec center(2);
    center << 5.0, 0.0;
    const ConeShape bad = ConeShape::ellipsoid(3, center, Mat::Identity(2, 2));
    CHECK(!bad.valid());
    bool saw_axis_failure = false;
    for (const auto& c : bad.validation().checks)
        if (!c.pass && c.detail.find("AxisNotInterior") != std::string::npos)
            saw_axis_failure = true;
    CHECK(saw_axis_failure);
    try {
        bad.require_valid();
        CHECK(false);
    } catch (const BilliardError& err) {
        CHECK(err.code() == Errc::AxisNotInterior);
    }
}

TEST_CASE("inside indicator signs on the unit circular cone") {
    const ConeShape cone = unit_circular_cone();
    CHECK(cone.inside_indicator(vec3(0, 0, 1)) < 0.0);
    CHECK(cone.inside_indicator(vec3(1, 0, 1)) == doctest::Approx(0.0).epsilon(1e-14));
    CHECK(cone.inside_indicator(vec3(2, 0, 1)) > 0.0);
    CHECK(std::isinf(cone.inside_indicator(vec3(1, 0, -1))));
    CHECK(std::isinf(cone.inside_indicator(vec3(1, 0, 0))));
}

TEST_CASE("surface normals of the unit circular cone") {
    const ConeShape cone = unit_circular_cone();
    const Vec n1 = cone.surface_point_normal(vec3(1, 0, 1));
    CHECK((n1 - vec3(-1, 0, 1) / kSqrt2).norm() == doctest::Approx(0.0).epsilon(1e-12));
    const Vec n2 = cone.surface_point_normal(vec3(-1, 0, 1));
    CHECK((n2 - vec3(1, 0, 1) / kSqrt2).norm() == doctest::Approx(0.0).epsilon(1e-12));
    CHECK_THROWS_AS(cone.surface_point_normal(vec3(0, 0, 1)), BilliardError);
}

TEST_CASE("surface normals annihilate the radial direction") {
    for (const ConeShape& cone : {ellipse_cone(), fourier_cone(), r4_cone()}) {
        LineSampler sampler(cone, 7);
        for (int i = 0; i < 200; ++i) {
            const Vec x = 2.7 * sampler.direction_on_gamma();
            const Vec n = cone.surface_point_normal(x);
            CHECK(std::abs(x.dot(n)) / x.norm() <= 1e-10);
            CHECK(std::abs(n.norm() - 1.0) <= 1e-12);
            CHECK(n[cone.dim() - 1] > 0.0);
        }
    }
}

TEST_CASE("line from point and direction re-foots the point") {
    const OrientedLine l1 = line_from_point_direction(vec3(1, 0, 1), vec3(-1, 0, 0));
    CHECK((l1.q - vec3(0, 0, 1)).norm() == doctest::Approx(0.0).epsilon(1e-15));
    const Vec v = vec3(0, 1, 0);
    const OrientedLine l2 = line_from_point_direction(vec3(1, 0, 1), v);
    const OrientedLine l3 = line_from_point_direction(l2.q, v);
    CHECK((l2.q - l3.q).norm() == 0.0);
    const OrientedLine l4 = line_from_point_direction(Vec::Zero(3), vec3(0, 0, 1));
    CHECK(l4.q.norm() == 0.0);
}

TEST_CASE("intersection of worked lines with the unit circular cone") {
    const ConeShape cone = unit_circular_cone();

    const IntervalRecord rec1 = intersect(cone, OrientedLine(vec3(-1, 0, 0), vec3(0, 0, 1)));
    CHECK(rec1.t_enter == doctest::Approx(-1.0).epsilon(1e-12));
    CHECK(rec1.t_exit == doctest::Approx(1.0).epsilon(1e-12));
    REQUIRE(rec1.enter_hit.has_value());
    REQUIRE(rec1.exit_hit.has_value());
    CHECK((rec1.enter_hit->point - vec3(1, 0, 1)).norm() < 1e-12);
    CHECK((rec1.exit_hit->point - vec3(-1, 0, 1)).norm() < 1e-12);
    CHECK(rec1.enter_hit->incidence > 0.0);
    CHECK(rec1.exit_hit->incidence < 0.0);

    const IntervalRecord rec2 = intersect(cone, OrientedLine(vec3(0, 0, 1), vec3(1, 0, 0)));
    CHECK(rec2.t_enter == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(std::isinf(rec2.t_exit));
    REQUIRE(rec2.enter_hit.has_value());
    CHECK((rec2.enter_hit->point - vec3(1, 0, 1)).norm() < 1e-12);

    const IntervalRecord rec3 = intersect(cone, OrientedLine(vec3(0, 0, 1), vec3(2, 0, 0)));
    CHECK(rec3.t_enter == doctest::Approx(2.0).epsilon(1e-12));
    REQUIRE(rec3.enter_hit.has_value());
    CHECK((rec3.enter_hit->point - vec3(2, 0, 2)).norm() < 1e-11);
}

TEST_CASE("exact grazing contact raises TangentLine") {
    const ConeShape cone = unit_circular_cone();
    // Through (1,0,1) along the tangent direction (0,1,0).
    const OrientedLine tangent(vec3(0, 1, 0), vec3(1, 0, 1));
    CHECK_THROWS_AS(intersect(cone, tangent), BilliardError);
    const PhaseClass cls = classify(cone, tangent);
    CHECK(cls.tag == PhaseTag::NotInPhaseSpace);
    CHECK(cls.reason.find("tangent") != std::string::npos);
}

TEST_CASE("classification of worked lines") {
    const ConeShape cone = unit_circular_cone();
    CHECK(classify(cone, OrientedLine(vec3(0, 0, 1), vec3(1, 0, 0))).tag == PhaseTag::PsiPlus);
    CHECK(classify(cone, OrientedLine(vec3(0, 0, -1), vec3(1, 0, 0))).tag == PhaseTag::PsiMinus);
    CHECK(classify(cone, OrientedLine(vec3(-1, 0, 0), vec3(0, 0, 1))).tag == PhaseTag::Psi);

    const Vec v_gamma = vec3(1, 0, 1) / kSqrt2;
    const Vec q_delta0 = vec3(-1, 0, 1) / kSqrt2;
    CHECK(classify(cone, OrientedLine(v_gamma, q_delta0)).tag == PhaseTag::Delta0);
    CHECK(classify(cone, OrientedLine(v_gamma, -q_delta0)).tag == PhaseTag::Delta1);

    // Lines through the vertex are outside the phase space.
    CHECK(classify(cone, OrientedLine(vec3(0, 0, 1), Vec::Zero(3))).tag ==
          PhaseTag::NotInPhaseSpace);
    // Direction opposite to a ruling (Delta2 stratum).
    CHECK(classify(cone, OrientedLine(-v_gamma, q_delta0)).tag == PhaseTag::NotInPhaseSpace);
}

TEST_CASE("direction escape predicate") {
    const ConeShape cone = unit_circular_cone();
    CHECK(cone.direction_escapes(vec3(0, 0, 1)));
    CHECK(!cone.direction_escapes(vec3(1, 0, 0)));
    CHECK(cone.direction_escapes(vec3(1, 0, 1) / kSqrt2));  // boundary of D
    CHECK(cone.direction_on_gamma(vec3(1, 0, 1) / kSqrt2));
    CHECK(!cone.direction_on_gamma(vec3(0, 0, 1)));
}

TEST_CASE("classification respects time reversal") {
    for (const ConeShape& cone : {unit_circular_cone(), fourier_cone(), r4_cone()}) {
        LineSampler sampler(cone, 11);
        int checked = 0;
        for (int i = 0; i < 400; ++i) {
            const OrientedLine line = sampler.candidate();
            if (cone.direction_on_gamma(line.v) || cone.direction_on_gamma(-line.v)) continue;
            const PhaseTag fwd = classify(cone, line).tag;
            const PhaseTag bwd = classify(cone, line.reversed()).tag;
            ++checked;
            switch (fwd) {
                case PhaseTag::Psi: CHECK(bwd == PhaseTag::Psi); break;
                case PhaseTag::PsiMinus: CHECK(bwd == PhaseTag::PsiPlus); break;
                case PhaseTag::PsiPlus: CHECK(bwd == PhaseTag::PsiMinus); break;
                default: CHECK(bwd == PhaseTag::NotInPhaseSpace); break;
            }
        }
        CHECK(checked > 300);
    }
}

TEST_CASE("closed form and bracketing solver agree on ellipsoid cones") {
    for (const ConeShape& cone : {unit_circular_cone(), ellipse_cone(), r4_cone()}) {
        LineSampler sampler(cone, 3);
        int compared = 0;
        for (int i = 0; i < 1500; ++i) {
            const OrientedLine line = sampler.candidate();
            IntervalRecord closed, generic;
            try {
                closed = intersect_closed_form(cone, line);
                generic = intersect_generic(cone, line);
            } catch (const BilliardError&) {
                continue;
            }
            REQUIRE(closed.empty == generic.empty);
            if (closed.empty) continue;
            REQUIRE(std::isfinite(closed.t_enter) == std::isfinite(generic.t_enter));
            REQUIRE(std::isfinite(closed.t_exit) == std::isfinite(generic.t_exit));
            if (std::isfinite(closed.t_enter))
                CHECK(std::abs(closed.t_enter - generic.t_enter) <= 1e-9);
            if (std::isfinite(closed.t_exit))
                CHECK(std::abs(closed.t_exit - generic.t_exit) <= 1e-9);
            ++compared;
        }
        CHECK(compared > 200);
    }
}

TEST_CASE("indicator is monotone along rays from interior points") {
    for (const ConeShape& cone : {ellipse_cone(), fourier_cone()}) {
        LineSampler sampler(cone, 5);
        for (int i = 0; i < 100; ++i) {
            const Vec z = 1.5 * sampler.direction_in_d(0.9);
            const Vec x = 2.0 * sampler.direction_on_gamma();
            for (double s = 0.0; s < 1.0; s += 0.02)
                CHECK(cone.inside_indicator(z + s * (x - z)) < 0.0);
            for (double s = 1.02; s <= 2.0; s += 0.02)
                CHECK(cone.inside_indicator(z + s * (x - z)) > 0.0);
        }
    }
}

TEST_CASE("planar wedge is a valid two-point section cone") {
    const ConeShape wedge = ConeShape::planar_angle(M_PI / 3.0);
    CHECK(wedge.valid());
    CHECK(wedge.dim() == 2);
    // Wall direction at angle pi/3 from the axis pair: r = tan(pi/6).
    const double r = std::tan(M_PI / 6.0);
    const Vec wall = vec2(r, 1.0).normalized();
    CHECK(wedge.direction_on_gamma(wall));
    CHECK(wedge.direction_escapes(vec2(0, 1)));
    CHECK(!wedge.direction_escapes(vec2(1, 0)));
}

TEST_CASE("malformed oriented lines are rejected") {
    CHECK_THROWS_AS(check_line(OrientedLine(vec3(1, 1, 0), vec3(0, 0, 1))), BilliardError);
    CHECK_THROWS_AS(check_line(OrientedLine(vec3(1, 0, 0), vec3(1, 0, 1))), BilliardError);
}
