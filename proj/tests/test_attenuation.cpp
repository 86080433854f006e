#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>

#include "helpers.hpp"
#include "qsweep/attenuation.hpp"
#include "qsweep/screens.hpp"

using namespace qsweep;
using namespace qsweep::testing;

TEST_CASE("stochastic attenuation scales the amplitude by sqrt(a)") {
    PacketParams p;
    CHECK(apply_stochastic(p, 1.0).weight == 1.0);
    CHECK(apply_stochastic(p, 0.25).weight == doctest::Approx(0.5).epsilon(1e-15));
    CHECK(apply_stochastic(p, 1e-10).weight == doctest::Approx(1e-5).epsilon(1e-12));
    PacketParams q = p;
    q.center = 3.0;
    q.group_velocity = 0.2;
    const PacketParams r = apply_stochastic(q, 0.5);
    CHECK(r.center == q.center);
    CHECK(r.group_velocity == q.group_velocity);
    CHECK_THROWS_AS(apply_stochastic(p, -0.1), std::invalid_argument);
    CHECK_THROWS_AS(apply_stochastic(p, 1.5), std::invalid_argument);
}

TEST_CASE("deterministic intensity is the convex mixture") {
    const double p1s = 0.7, p1 = 1.1, p2 = 0.9;
    CHECK(deterministic_intensity(p1s, p1, p2, 0.0) == p1s);
    CHECK(deterministic_intensity(p1s, p1, p2, 1.0) == p1 + p2);
    // equal-amplitude fringe maximum: P1' = R^2, P1 = P2 = 2 R^2
    const double r2 = 0.37;
    CHECK(deterministic_intensity(r2, 2.0 * r2, 2.0 * r2, 0.25)
          == doctest::Approx(1.75 * r2).epsilon(1e-15));
    CHECK_THROWS_AS(deterministic_intensity(p1s, p1, p2, 1.01), std::invalid_argument);
}

TEST_CASE("theoretical visibility of both attenuation laws") {
    CHECK(theoretical_visibility(1.0, AttenuationKind::Stochastic).value == 1.0);
    CHECK(theoretical_visibility(1.0, AttenuationKind::Deterministic).value == 1.0);

    CHECK(theoretical_visibility(0.25, AttenuationKind::Stochastic).value
          == doctest::Approx(0.8).epsilon(1e-15));
    CHECK(theoretical_visibility(0.25, AttenuationKind::Deterministic).value
          == doctest::Approx(0.4).epsilon(1e-15));

    CHECK(theoretical_visibility(0.0025, AttenuationKind::Stochastic).value
          == doctest::Approx(0.09975062344139651).epsilon(1e-12));
    CHECK(theoretical_visibility(0.0025, AttenuationKind::Deterministic).value
          == doctest::Approx(0.004987531172069825).epsilon(1e-12));

    const Visibility degenerate = theoretical_visibility(0.0, AttenuationKind::Stochastic);
    CHECK(degenerate.value == 0.0);
    CHECK(degenerate.degenerate);
}

TEST_CASE("contrast ordering, ratio and monotonicity") {
    double prev_s = 0.0, prev_d = 0.0;
    for (double a = 0.02; a <= 1.0; a += 0.02) {
        const double vs = theoretical_visibility(a, AttenuationKind::Stochastic).value;
        const double vd = theoretical_visibility(a, AttenuationKind::Deterministic).value;
        if (a < 1.0) CHECK(vs > vd);
        CHECK(rel_err(vs / vd, 1.0 / std::sqrt(a)) < 1e-12);
        CHECK(vs > prev_s);
        CHECK(vd > prev_d);
        prev_s = vs;
        prev_d = vd;
    }
}

namespace {

struct ProfilePair {
    std::vector<double> xs;
    ProfileResult stochastic;
    ProfileResult deterministic;
    double t = 0.0;
    PacketParams p1, p2;
};

ProfilePair screen_profiles(double a, CoherenceMode mode = CoherenceMode::Coherent) {
    const ExperimentSetup setup = fringe_setup();
    ProfilePair out;
    out.p1.center = setup.slit1_center();
    out.p2.center = setup.slit2_center();
    out.t = setup.screen_time_internal();
    const double half = 8.0 * dispersed_sigma(out.p1, out.t) + 0.5 * setup.separation_internal();
    out.xs = linspace(-half, half, 32769);
    out.stochastic = analytic_profile(out.p1, out.p2,
                                      make_attenuation(AttenuationKind::Stochastic, a), mode,
                                      out.t, out.xs);
    out.deterministic = analytic_profile(out.p1, out.p2,
                                         make_attenuation(AttenuationKind::Deterministic, a), mode,
                                         out.t, out.xs);
    return out;
}

} // namespace

TEST_CASE("mode None is observably Stochastic(1)") {
    const ExperimentSetup setup = fringe_setup();
    PacketParams p1, p2;
    p1.center = setup.slit1_center();
    p2.center = setup.slit2_center();
    const double t = setup.screen_time_internal();
    const auto xs = linspace(-2000.0, 2000.0, 513);
    const ProfileResult none = analytic_profile(p1, p2, make_attenuation(AttenuationKind::None, 1.0),
                                                CoherenceMode::Coherent, t, xs);
    const ProfileResult stoch = analytic_profile(
        p1, p2, make_attenuation(AttenuationKind::Stochastic, 1.0), CoherenceMode::Coherent, t, xs);
    for (std::size_t i = 0; i < xs.size(); ++i) {
        CHECK(none.intensity[i] == stoch.intensity[i]);
    }
    CHECK(theoretical_visibility(1.0, AttenuationKind::None).value
          == theoretical_visibility(1.0, AttenuationKind::Stochastic).value);
}

TEST_CASE("equal areas: the two attenuation laws carry the same throughput") {
    for (double a : {0.25, 0.025, 0.0025}) {
        const ProfilePair pair = screen_profiles(a);
        // raw areas, before unit normalization
        CHECK(rel_err(pair.stochastic.raw_area, pair.deterministic.raw_area) < 1e-8);
        CHECK(!pair.stochastic.narrow_grid_warning);
        CHECK(!pair.deterministic.narrow_grid_warning);
    }
}

TEST_CASE("measured visibility tracks the closed forms within 2 percent") {
    for (double a : {0.25, 0.025, 0.0025}) {
        const ProfilePair pair = screen_profiles(a);
        const double window = equal_envelope_halfwidth(pair.p1, pair.p2, pair.t);
        const MeasuredVisibility vs =
            extract_visibility(pair.xs, pair.stochastic.intensity, 0.0, window);
        const MeasuredVisibility vd =
            extract_visibility(pair.xs, pair.deterministic.intensity, 0.0, window);
        REQUIRE(vs.ok);
        REQUIRE(vd.ok);
        CHECK(rel_err(vs.value, theoretical_visibility(a, AttenuationKind::Stochastic).value)
              < 0.02);
        CHECK(rel_err(vd.value, theoretical_visibility(a, AttenuationKind::Deterministic).value)
              < 0.02);
    }
}
