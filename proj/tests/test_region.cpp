#include "ceo/region.hpp"

#include <doctest.h>

#include "helpers.hpp"

#include <cmath>

using namespace ceo;

TEST_CASE("subset bounds on the scalar instance") {
    const auto t = subset_bounds(th::scalar_model(), th::scalar_gains());
    REQUIRE(t.size() == 4);
    CHECK(t.f[0] == doctest::Approx(1.072365).epsilon(1e-6));
    CHECK(t.f[1] == doctest::Approx(1.562780).epsilon(1e-6));
    CHECK(t.f[2] == doctest::Approx(1.562780).epsilon(1e-6));
    CHECK(t.f[3] == doctest::Approx(2.112086).epsilon(1e-6));
    CHECK(t.rate_sum_term[3] == doctest::Approx(std::log(2.0)).epsilon(1e-9));
    // f(empty) is the distortion floor h(X | U_1..U_K).
    CHECK(t.f[0] == doctest::Approx(t.cond_entropy_term[0]));
}

TEST_CASE("zero gains collapse every bound to the prior entropy") {
    const auto m = th::scalar_model();
    const auto t = subset_bounds(m, TestChannelGains::zero(m));
    for (std::uint32_t s = 0; s < t.size(); ++s)
        CHECK(t.f[s] == doctest::Approx(m.prior_entropy()).epsilon(1e-12));
}

TEST_CASE("box-boundary gains poison only the subsets containing the agent") {
    const auto m = th::scalar_model();
    const auto t = subset_bounds(m, th::scalar_gains(1.0, 0.5));
    CHECK(std::isfinite(t.f[0]));
    CHECK(std::isinf(t.f[1]));
    CHECK(std::isfinite(t.f[2]));
    CHECK(std::isinf(t.f[3]));
}

TEST_CASE("feasibility of the zero-rate point and the scalar corner") {
    const auto m = th::scalar_model();
    {
        RegionPoint p;
        p.rates = {0.0, 0.0};
        p.distortion = m.prior_entropy();
        const auto fe = is_feasible_for_gains(m, TestChannelGains::zero(m), p);
        CHECK(fe.feasible);
        CHECK(fe.margin == doctest::Approx(0.0).epsilon(1e-12));
    }
    {
        RegionPoint p;
        p.rates = {0.549306, 0.490415};
        p.distortion = 1.072365;
        const auto fe = is_feasible_for_gains(m, th::scalar_gains(), p);
        CHECK(fe.feasible);
        CHECK(std::abs(fe.margin) < 2e-6);  // tight up to the 6-decimal rounding
    }
    {
        RegionPoint p;
        p.rates = {0.0, 0.0};
        p.distortion = 1.0;
        const auto fe = is_feasible_for_gains(m, th::scalar_gains(), p);
        CHECK(!fe.feasible);
        // With zero rates every subset sum vanishes, so the worst bound is
        // the largest f, which is the full set.
        CHECK(fe.margin == doctest::Approx(1.0 - 2.1120857).epsilon(1e-6));
        CHECK(fe.worst_subset == 3u);
        // The floor bound alone is already violated.
        CHECK(1.0 < 1.0723649);
    }
}

TEST_CASE("achievable_point hits the floor at the corner sum-rate") {
    const auto m = th::scalar_model();
    const auto g = th::scalar_gains();
    const auto p = achievable_point(m, g, {0.5, 0.5}, 1.039721);
    CHECK(p.distortion == doctest::Approx(1.072365).epsilon(1e-5));
    const auto fe = is_feasible_for_gains(m, g, p);
    CHECK(fe.feasible);
    CHECK(fe.margin <= 1e-9);  // at least one subset is binding
    CHECK(fe.margin >= -1e-9);
}

TEST_CASE("achievable_point at zero budget returns the worst bound") {
    const auto m = th::scalar_model();
    const auto g = th::scalar_gains();
    const auto t = subset_bounds(m, g);
    const auto p = achievable_point(m, g, {0.5, 0.5}, 0.0);
    CHECK(p.distortion == doctest::Approx(t.f[3]).epsilon(1e-12));
}

TEST_CASE("information/distortion duality round trip") {
    const auto m = th::scalar_model();
    CHECK(information_from_distortion(m, m.prior_entropy()) ==
          doctest::Approx(0.0));
    CHECK(information_from_distortion(m, 1.0723649) ==
          doctest::Approx(0.3465736).epsilon(1e-6));
    for (double d : {0.2, 0.9, 1.5}) {
        const double delta = information_from_distortion(m, d);
        CHECK(delta + d == doctest::Approx(m.prior_entropy()).epsilon(1e-12));
    }
}

TEST_CASE("conditioning on more observations cannot raise conditional entropy") {
    for (std::uint64_t seed = 0; seed < 100; ++seed) {
        const auto m = th::random_model(seed, 3, 2, 2);
        const auto g = th::random_gains(seed, m);
        const auto t = subset_bounds(m, g);
        const double floor = t.cond_entropy_term[0];
        for (std::uint32_t s = 0; s < t.size(); ++s) {
            CHECK(t.f[s] - t.rate_sum_term[s] ==
                  doctest::Approx(t.cond_entropy_term[s]).epsilon(1e-12));
            CHECK(t.cond_entropy_term[s] >= floor - 1e-10);
        }
    }
}

TEST_CASE("mixing gains: both bound ingredients are convex in the gains") {
    // rate_term = -alpha ln det(I - Omega sigma) and cond_entropy =
    // gamma - alpha ln det J(Omega) with J affine in Omega; log-det
    // concavity makes both convex, so mixtures sit below averages.
    for (std::uint64_t seed = 0; seed < 30; ++seed) {
        const auto m = th::random_model(seed, 2, 2, 2);
        const auto ga = th::random_gains(seed, m);
        const auto gb = th::random_gains(seed + 500, m);
        for (double lam : {0.25, 0.5, 0.75}) {
            TestChannelGains gm;
            for (int k = 0; k < 2; ++k)
                gm.omegas.push_back(lam * ga.omegas[k] +
                                    (1.0 - lam) * gb.omegas[k]);
            for (int k = 0; k < 2; ++k) {
                const double mixed = rate_term(m, gm, k);
                const double avg = lam * rate_term(m, ga, k) +
                                   (1.0 - lam) * rate_term(m, gb, k);
                CHECK(mixed <= avg + 1e-10);
            }
            for (std::uint32_t s = 0; s <= 3u; ++s) {
                const double mixed = cond_entropy_given(m, gm, s);
                const double avg = lam * cond_entropy_given(m, ga, s) +
                                   (1.0 - lam) * cond_entropy_given(m, gb, s);
                CHECK(mixed <= avg + 1e-10);
            }
        }
    }
}
