// Shift-model tests: exceedance probability closed forms against Monte Carlo
// oracles, rank moments against direct simulation, and the noncentrality
// identities.

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "rcbd/errors.hpp"
#include "rcbd/shift_model.hpp"
#include "support/mc_oracle.hpp"

using namespace rcbd;

namespace {

const Family kFamilies[] = {Family::uniform, Family::normal, Family::laplace,
                            Family::exponential};

std::vector<double> admissible_shifts(Family family, std::mt19937_64& rng, int k) {
    std::uniform_real_distribution<double> unif(-1.0, 1.0);
    std::vector<double> theta(k);
    double scale = (family == Family::uniform) ? 0.45 : 1.2;
    for (auto& t : theta) t = scale * unif(rng);
    return theta;
}

}  // namespace

// ===========================================================================
// P1
// ===========================================================================

TEST_CASE("p1: equal shifts give 1/2 in every family") {
    for (Family family : kFamilies) {
        ShiftModel model(family, {0.3, 0.3, 0.3});
        for (int i = 0; i < 3; ++i)
            for (int l = 0; l < 3; ++l)
                if (i != l) CHECK(p1(model, i, l) == doctest::Approx(0.5).epsilon(1e-12));
    }
}

TEST_CASE("p1: exponential closed form at a -0.5 gap") {
    ShiftModel model(Family::exponential, {0.0, 0.5});
    CHECK(p1(model, 0, 1) == doctest::Approx(0.5 * std::exp(-0.5)).epsilon(1e-12));
    CHECK(p1(model, 0, 1) == doctest::Approx(0.30327).epsilon(1e-4));
    CHECK(p1(model, 1, 0) == doctest::Approx(1.0 - 0.5 * std::exp(-0.5)).epsilon(1e-12));
}

TEST_CASE("p1: complement identity on random admissible models") {
    std::mt19937_64 rng(11);
    for (Family family : kFamilies) {
        for (int trial = 0; trial < 25; ++trial) {
            ShiftModel model(family, admissible_shifts(family, rng, 4));
            for (int i = 0; i < 4; ++i) {
                for (int l = i + 1; l < 4; ++l) {
                    CHECK(p1(model, i, l) + p1(model, l, i) == doctest::Approx(1.0).epsilon(1e-12));
                    CHECK(p1(model, i, l) > 0.0);
                    CHECK(p1(model, i, l) < 1.0);
                }
            }
        }
    }
}

// ===========================================================================
// P2
// ===========================================================================

TEST_CASE("p2: equal shifts give 1/3, including the normal quadrature path") {
    for (Family family : kFamilies) {
        ShiftModel model(family, {0.0, 0.0, 0.0, 0.0});
        CHECK(p2(model, 0, 1, 2) == doctest::Approx(1.0 / 3.0).epsilon(1e-8));
        CHECK(p2(model, 2, 3, 0) == doctest::Approx(1.0 / 3.0).epsilon(1e-8));
    }
}

TEST_CASE("p2: symmetric in the pair and within Frechet bounds") {
    std::mt19937_64 rng(13);
    for (Family family : kFamilies) {
        for (int trial = 0; trial < 12; ++trial) {
            ShiftModel model(family, admissible_shifts(family, rng, 4));
            for (int i = 0; i < 4; ++i) {
                for (int l = 0; l < 4; ++l) {
                    for (int m = l + 1; m < 4; ++m) {
                        if (i == l || i == m) continue;
                        double v = p2(model, i, l, m);
                        CHECK(v == doctest::Approx(p2(model, i, m, l)).epsilon(1e-12));
                        double a = p1(model, i, l), b = p1(model, i, m);
                        CHECK(v >= std::max(0.0, a + b - 1.0) - 1e-9);
                        CHECK(v <= std::min(a, b) + 1e-9);
                    }
                }
            }
        }
    }
}

TEST_CASE("p1/p2: closed forms match the Monte Carlo oracle" * doctest::timeout(120)) {
    std::mt19937_64 rng(17);
    long reps = 2'000'000;
    for (Family family : kFamilies) {
        ShiftModel model(family, admissible_shifts(family, rng, 3));
        for (auto [i, l, m] : {std::array{0, 1, 2}, {1, 0, 2}, {2, 1, 0}}) {
            auto est = rcbd_test::mc_p1_p2(model, i, l, m, reps, rng());
            CHECK(std::fabs(p1(model, i, l) - est.p1) < 4.0 * est.se1 + 1e-9);
            CHECK(std::fabs(p2(model, i, l, m) - est.p2) < 4.0 * est.se2 + 1e-9);
        }
    }
}

TEST_CASE("uniform width constraint enforced") {
    CHECK_THROWS_AS(ShiftModel(Family::uniform, {-0.6, 0.0, 0.6}), DomainError);
    CHECK_NOTHROW(ShiftModel(Family::uniform, {-0.45, 0.0, 0.45}));
    // Other families accept wide shifts.
    CHECK_NOTHROW(ShiftModel(Family::normal, {-3.0, 0.0, 3.0}));
}

// ===========================================================================
// Rank moments
// ===========================================================================

TEST_CASE("rank_moments: null shifts recover the closed-form moments") {
    for (Family family : kFamilies) {
        for (int k : {2, 3, 5}) {
            for (int b : {2, 9}) {
                ShiftModel model(family, std::vector<double>(k, 0.25));
                auto mom = rank_moments(model, b);
                for (int i = 0; i < k; ++i) {
                    CHECK(mom.mu[i] == doctest::Approx(b * (k + 1) / 2.0).epsilon(1e-9));
                    CHECK(mom.sigma2[i] ==
                          doctest::Approx(b * (k * k - 1) / 12.0).epsilon(1e-7));
                }
                CHECK(mom.mu_t == doctest::Approx(k - 1.0).epsilon(1e-7));
            }
        }
    }
}

TEST_CASE("rank_moments: rank-sum means are conserved") {
    std::mt19937_64 rng(19);
    for (Family family : kFamilies) {
        for (int trial = 0; trial < 10; ++trial) {
            int k = 3 + static_cast<int>(rng() % 3);
            ShiftModel model(family, admissible_shifts(family, rng, k));
            int b = 4 + static_cast<int>(rng() % 9);
            auto mom = rank_moments(model, b);
            double total = 0.0;
            for (double m : mom.mu) total += m;
            CHECK(total == doctest::Approx(b * k * (k + 1) / 2.0).epsilon(1e-10));
            for (double v : mom.sigma2) CHECK(v > 0.0);
        }
    }
}

TEST_CASE("rank_moments: nonnull mean of T matches simulation" * doctest::timeout(120)) {
    ShiftModel model(Family::normal, {-1.0, 0.0, 1.0});
    auto mom = rank_moments(model, 9);
    auto est = rcbd_test::mc_mean_t(model, 9, 1'000'000, 2024);
    CHECK(std::fabs(mom.mu_t - est.mean) < 3.0 * est.se);

    ShiftModel expo(Family::exponential, {-0.5, 0.1, 0.6});
    auto mom2 = rank_moments(expo, 6);
    auto est2 = rcbd_test::mc_mean_t(expo, 6, 600'000, 2025);
    CHECK(std::fabs(mom2.mu_t - est2.mean) < 3.5 * est2.se);
}

TEST_CASE("label equivariance and translation invariance") {
    ShiftModel model(Family::laplace, {-0.7, 0.2, 0.9});
    ShiftModel permuted(Family::laplace, {0.9, -0.7, 0.2});  // labels 2,0,1
    auto a = rank_moments(model, 7);
    auto b = rank_moments(permuted, 7);
    CHECK(a.mu[0] == doctest::Approx(b.mu[1]).epsilon(1e-12));
    CHECK(a.mu[1] == doctest::Approx(b.mu[2]).epsilon(1e-12));
    CHECK(a.mu[2] == doctest::Approx(b.mu[0]).epsilon(1e-12));
    CHECK(a.mu_t == doctest::Approx(b.mu_t).epsilon(1e-12));
    CHECK(tau_h(model, 7) == doctest::Approx(tau_h(permuted, 7)).epsilon(1e-12));

    ShiftModel shifted(Family::laplace, {-0.7 + 5.0, 0.2 + 5.0, 0.9 + 5.0});
    auto c = rank_moments(shifted, 7);
    CHECK(a.mu_t == doctest::Approx(c.mu_t).epsilon(1e-10));
    CHECK(tau_h(model, 7) == doctest::Approx(tau_h(shifted, 7)).epsilon(1e-10));
    for (auto variant : {Variant::MA, Variant::MB, Variant::LA, Variant::LB}) {
        CHECK(noncentrality(model, 7, variant).value ==
              doctest::Approx(noncentrality(shifted, 7, variant).value).epsilon(1e-8));
    }
}

TEST_CASE("rank_moments: nonnull mean of T at or above the null value") {
    // Monitored expectation rather than a proven invariant; WARN keeps it
    // visible without failing the build if a counterexample ever shows up.
    std::mt19937_64 rng(23);
    for (Family family : kFamilies) {
        for (int trial = 0; trial < 20; ++trial) {
            int k = 3 + static_cast<int>(rng() % 3);
            ShiftModel model(family, admissible_shifts(family, rng, k));
            auto mom = rank_moments(model, 6);
            WARN(mom.mu_t >= k - 1.0 - 1e-7);
        }
    }
}

// ===========================================================================
// f*(0) and tau_H
// ===========================================================================

TEST_CASE("f_star_zero values") {
    CHECK(f_star_zero(Family::uniform) == 1.0);
    CHECK(f_star_zero(Family::normal) == doctest::Approx(0.2820948).epsilon(1e-7));
    CHECK(f_star_zero(Family::laplace) == 0.25);
    CHECK(f_star_zero(Family::exponential) == 0.5);
}

TEST_CASE("tau_h: closed-form value and scaling") {
    ShiftModel model(Family::normal, {-1.0, 0.0, 1.0});
    CHECK(tau_h(model, 9) == doctest::Approx(162.0 / (4.0 * M_PI)).epsilon(1e-12));
    CHECK(tau_h(model, 9) == doctest::Approx(12.8916).epsilon(1e-4));

    ShiftModel flat(Family::laplace, {0.4, 0.4, 0.4, 0.4});
    CHECK(tau_h(flat, 12) == 0.0);

    ShiftModel doubled(Family::normal, {-2.0, 0.0, 2.0});
    CHECK(tau_h(doubled, 9) == doctest::Approx(4.0 * tau_h(model, 9)).epsilon(1e-12));

    // Centering: an uncentered version changes nothing.
    ShiftModel uncentered(Family::normal, {0.0, 1.0, 2.0});
    CHECK(tau_h(uncentered, 9) == doctest::Approx(tau_h(model, 9)).epsilon(1e-12));
}

// ===========================================================================
// Noncentralities
// ===========================================================================

TEST_CASE("noncentrality: null identities per variant") {
    for (Family family : kFamilies) {
        for (int k : {3, 5}) {
            for (int b : {4, 12}) {
                ShiftModel null_model(family, std::vector<double>(k, 0.0));
                CHECK(noncentrality(null_model, b, Variant::MA).value == 0.0);
                CHECK(noncentrality(null_model, b, Variant::LA).value == 0.0);
                double m1 = k - 1.0 - 2.0 / b, m2 = (b - 1.0) * m1;
                double l1 = k - 1.0, l2 = (b - 1.0) * (k + 1.0);
                CHECK(noncentrality(null_model, b, Variant::MB).value ==
                      doctest::Approx(2.0 * m1 / (m2 - 2.0)).epsilon(1e-6));
                CHECK(noncentrality(null_model, b, Variant::LB).value ==
                      doctest::Approx(2.0 * l1 / (l2 - 2.0)).epsilon(1e-6));
                CHECK(noncentrality(null_model, b, Variant::H).value == 0.0);
            }
        }
    }
}

TEST_CASE("noncentrality: variant H carries tau and the chi-square df") {
    ShiftModel model(Family::normal, {-1.0, 0.0, 1.0});
    auto nc = noncentrality(model, 9, Variant::H);
    CHECK(nc.value == doctest::Approx(tau_h(model, 9)).epsilon(1e-12));
    CHECK(nc.dfs.d1 == 2.0);
}

TEST_CASE("noncentrality: B-variants exceed A-variants away from the null") {
    ShiftModel model(Family::normal, {-0.8, 0.0, 0.8});
    for (int b : {5, 9, 20}) {
        CHECK(noncentrality(model, b, Variant::MB).value >
              noncentrality(model, b, Variant::MA).value);
        CHECK(noncentrality(model, b, Variant::LB).value >
              noncentrality(model, b, Variant::LA).value);
    }
}

TEST_CASE("noncentrality: f2 <= 2 rejected") {
    ShiftModel model(Family::normal, {-1.0, 0.0, 1.0});
    CHECK_THROWS_AS(noncentrality(model, 2, Variant::MB), DomainError);  // m2 = 4/3
}
