#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "oracles.hpp"
#include "splinepsd/splines.hpp"

#include <cmath>
#include <random>

using namespace splinepsd;

namespace {

KnotSequence clamped(int r, std::vector<double> internal) {
    std::vector<double> t(static_cast<std::size_t>(r + 1), 0.0);
    t.insert(t.end(), internal.begin(), internal.end());
    t.insert(t.end(), static_cast<std::size_t>(r + 1), 1.0);
    return KnotSequence(r, t);
}

} // namespace

TEST_CASE("knot sequence validation") {
    CHECK_NOTHROW(KnotSequence(0, {0.0, 0.5, 1.0}));
    CHECK_THROWS_AS(KnotSequence(1, {0.0, 0.5, 0.5, 1.0}), std::invalid_argument);  // not clamped
    CHECK_THROWS_AS(KnotSequence(0, {0.0, 0.7, 0.5, 1.0}), std::invalid_argument);  // decreasing
    CHECK_THROWS_AS(KnotSequence(-1, {0.0, 1.0}), std::invalid_argument);
    CHECK_THROWS_AS(KnotSequence(2, {0.0, 0.0, 0.0, 1.0, 1.0}), std::invalid_argument);  // k < r + 1
    const auto ks = clamped(3, {0.4});
    CHECK(ks.basis_size() == 5);
    CHECK(ks.find_span(0.0) == 3);
    CHECK(ks.find_span(0.4) == 4);
    CHECK(ks.find_span(1.0) == 4);
}

TEST_CASE("eval_bspline hand values") {
    const KnotSequence step(0, {0.0, 0.5, 1.0});
    CHECK(eval_bspline(0.25, 0, step) == 1.0);
    CHECK(eval_bspline(0.25, 1, step) == 0.0);
    CHECK(eval_bspline(1.0, 1, step) == 1.0);

    const KnotSequence hat(1, {0.0, 0.0, 0.5, 1.0, 1.0});
    CHECK(eval_bspline(0.5, 1, hat) == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(eval_bspline(0.25, 1, hat) == doctest::Approx(0.5));

    const auto cubic = clamped(3, {0.25, 0.5, 0.75});
    double sum = 0.0;
    for (int i = 0; i < cubic.basis_size(); ++i) sum += eval_bspline(0.3, i, cubic);
    CHECK(std::abs(sum - 1.0) < 1e-12);

    CHECK_THROWS_AS(eval_bspline(0.5, 7, cubic), std::out_of_range);
    CHECK_THROWS_AS(eval_bspline(1.5, 0, cubic), std::domain_error);
}

TEST_CASE("bspline_integral") {
    CHECK(bspline_integral(0, KnotSequence(0, {0.0, 0.5, 1.0})) == 0.5);
    const auto bern = clamped(3, {});
    for (int i = 0; i < 4; ++i) {
        CHECK(bspline_integral(i, bern) == doctest::Approx(0.25));
        const double quad = oracle::piecewise_integral([&](double w) { return eval_bspline(w, i, bern); },
                                                       bern.knots());
        CHECK(std::abs(quad - 0.25) < 1e-12);
    }
    // Five coincident interior knots leave spline 4 with zero-width support.
    const auto pile = clamped(3, {0.5, 0.5, 0.5, 0.5, 0.5});
    CHECK(bspline_integral(4, pile) == 0.0);
    CHECK(bspline_integral(3, pile) > 0.0);
}

TEST_CASE("eval_density and degenerate splines") {
    const BsplineDensityBasis bern(clamped(3, {}));
    CHECK(eval_density(0.0, 0, bern) == doctest::Approx(4.0));
    for (int i = 0; i < 4; ++i) {
        const double quad = oracle::piecewise_integral([&](double w) { return eval_density(w, i, bern); },
                                                       bern.knots().knots());
        CHECK(std::abs(quad - 1.0) < 1e-8);
    }
    const BsplineDensityBasis pile(clamped(3, {0.5, 0.5, 0.5, 0.5, 0.5}));
    CHECK(pile.degenerate(4));
    CHECK_FALSE(pile.degenerate(3));
    for (double w : {0.0, 0.3, 0.5, 0.7, 1.0}) CHECK(eval_density(w, 4, pile) == 0.0);
}

TEST_CASE("build_knots") {
    const std::vector<double> one{1.0};
    const auto ks = build_knots(one, 3);
    CHECK(std::vector<double>(ks.knots().begin(), ks.knots().end()) ==
          std::vector<double>{0, 0, 0, 0, 1, 1, 1, 1});

    const std::vector<double> halves{0.5, 0.5};
    const auto k0 = build_knots(halves, 0);
    CHECK(std::vector<double>(k0.knots().begin(), k0.knots().end()) == std::vector<double>{0.0, 0.5, 1.0});

    const std::vector<double> gap{0.2, 0.0, 0.8};
    const auto k1 = build_knots(gap, 1);
    CHECK(k1[2] == doctest::Approx(0.2));
    CHECK(k1[3] == doctest::Approx(0.2));
    CHECK(k1[k1.knots().size() - 1] == 1.0);

    // Unnormalized input is rescaled and the last knot is exactly one.
    const std::vector<double> loose{0.1, 0.1, 0.1};
    const auto k2 = build_knots(loose, 2);
    CHECK(k2[3] == doctest::Approx(1.0 / 3.0));
    CHECK(k2[5] == 1.0);

    const std::vector<double> negative{0.5, -0.1};
    CHECK_THROWS_AS(build_knots(negative, 1), std::invalid_argument);
    const std::vector<double> zeros{0.0, 0.0};
    CHECK_THROWS_AS(build_knots(zeros, 1), std::invalid_argument);
}

TEST_CASE("eval_mixture") {
    const BsplineDensityBasis bern(clamped(3, {}));
    const std::vector<double> first{1.0, 0.0, 0.0, 0.0};
    CHECK(eval_mixture(0.0, first, bern) == doctest::Approx(4.0));
    const std::vector<double> zero(4, 0.0);
    CHECK(eval_mixture(0.4, zero, bern) == 0.0);

    const BsplineDensityBasis basis(clamped(2, {0.1, 0.35, 0.35, 0.8}));
    const std::vector<double> uniform(static_cast<std::size_t>(basis.size()), 1.0 / basis.size());
    const double quad = oracle::piecewise_integral([&](double w) { return eval_mixture(w, uniform, basis); },
                                                   basis.knots().knots());
    CHECK(std::abs(quad - 1.0) < 1e-8);
}

TEST_CASE("weight on degenerate splines is redistributed") {
    const BsplineDensityBasis pile(clamped(3, {0.5, 0.5, 0.5, 0.5, 0.5}));
    std::vector<double> w(static_cast<std::size_t>(pile.size()), 0.0);
    w[4] = 0.4;
    w[0] = 0.3;
    w[8] = 0.1;
    const auto eff = effective_weights(w, pile);
    CHECK(eff[4] == 0.0);
    CHECK(eff[0] == doctest::Approx(0.3 * 0.8 / 0.4));
    CHECK(eff[8] == doctest::Approx(0.1 * 0.8 / 0.4));
    const double quad =
        oracle::piecewise_integral([&](double x) { return eval_mixture(x, w, pile); }, pile.knots().knots());
    CHECK(quad == doctest::Approx(0.8).epsilon(1e-8));

    // All weight on the degenerate spline: spread evenly over the rest.
    std::vector<double> only(static_cast<std::size_t>(pile.size()), 0.0);
    only[4] = 1.0;
    const auto spread = effective_weights(only, pile);
    double total = 0.0;
    for (double x : spread) total += x;
    CHECK(total == doctest::Approx(1.0));
    CHECK(spread[0] == doctest::Approx(spread[8]));
}

TEST_CASE("eval_nonzero_basis agrees with the recursion") {
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    for (int trial = 0; trial < 200; ++trial) {
        const int r = trial % 4;
        const auto ks = oracle::random_clamped_knots(r, rng);
        std::vector<double> vals(static_cast<std::size_t>(r + 1));
        for (int g = 0; g < 20; ++g) {
            const double w = g == 0 ? 1.0 : unif(rng);
            const int span = eval_nonzero_basis(w, ks, vals);
            for (int i = 0; i < ks.basis_size(); ++i) {
                const double expect = eval_bspline(w, i, ks);
                const double got = (i >= span - r && i <= span) ? vals[i - span + r] : 0.0;
                CHECK(std::abs(expect - got) < 1e-12);
            }
        }
    }
}

TEST_CASE("local support") {
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    for (int trial = 0; trial < 100; ++trial) {
        const int r = trial % 4;
        const auto ks = oracle::random_clamped_knots(r, rng);
        for (int g = 0; g < 20; ++g) {
            const double w = unif(rng);
            for (int i = 0; i < ks.basis_size(); ++i) {
                if (w < ks[i] || w > ks[i + r + 1]) CHECK(eval_bspline(w, i, ks) == 0.0);
            }
        }
    }
}

TEST_CASE("random clamped sequences: partition of unity and analytic integrals") {
    std::mt19937_64 rng(2024);
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    double worst_sum = 0.0, worst_integral = 0.0;
    for (int trial = 0; trial < 1000; ++trial) {
        const int r = trial % 4;
        const auto ks = oracle::random_clamped_knots(r, rng);
        for (int g = 0; g <= 50; ++g) {
            const double w = g == 50 ? 1.0 : (g == 0 ? 0.0 : unif(rng));
            double sum = 0.0;
            for (int i = 0; i < ks.basis_size(); ++i) sum += eval_bspline(w, i, ks);
            worst_sum = std::max(worst_sum, std::abs(sum - 1.0));
        }
        for (int i = 0; i < ks.basis_size(); ++i) {
            const double quad = oracle::piecewise_integral([&](double w) { return eval_bspline(w, i, ks); }, ks.knots());
            worst_integral = std::max(worst_integral, std::abs(quad - bspline_integral(i, ks)));
        }
    }
    CHECK(worst_sum < 1e-12);
    CHECK(worst_integral < 1e-8);
}

TEST_CASE("no interior knots gives the Beta densities") {
    for (int r = 1; r <= 3; ++r) {
        const BsplineDensityBasis basis(clamped(r, {}));
        for (int g = 0; g <= 100; ++g) {
            const double w = g / 100.0;
            for (int i = 0; i <= r; ++i) {
                const double expect = oracle::beta_density(w, i + 1.0, r - i + 1.0);
                CHECK(std::abs(eval_density(w, i, basis) - expect) < 1e-10);
            }
        }
    }
}
