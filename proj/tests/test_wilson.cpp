#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>

#include "sos/coupling.hpp"
#include "sos/exact.hpp"
#include "sos/wilson.hpp"

using namespace sos;

TEST_CASE("weights are positive, symmetric, and normalized as expected") {
    for (int n : {1, 2, 5, 16}) {
        WilsonWeights ww = wilson_weights(n);
        REQUIRE(static_cast<int>(ww.w.size()) == n);
        for (int i = 1; i <= n; ++i) {
            CHECK(ww.w[static_cast<std::size_t>(i - 1)] > 0.0);
            CHECK(ww.w[static_cast<std::size_t>(i - 1)] ==
                  doctest::Approx(ww.w[static_cast<std::size_t>(n - i)]));
        }
        CHECK(ww.lambda ==
              doctest::Approx(1.0 - std::cos(std::numbers::pi / (n + 1))));
        CHECK(ww.w_min == doctest::Approx(ww.w.front()));
    }
    CHECK_THROWS(wilson_weights(0));
}

TEST_CASE("weights satisfy the discrete harmonic identity") {
    // w(i-1) + w(i+1) = 2 (1 - lambda) w(i), with w = 0 outside [1, n]
    for (int n : {3, 7, 12}) {
        WilsonWeights ww = wilson_weights(n);
        auto w = [&](int i) {
            return (i >= 1 && i <= n) ? ww.w[static_cast<std::size_t>(i - 1)] : 0.0;
        };
        for (int i = 1; i <= n; ++i) {
            // the zero extension is exact: the weight profile vanishes at 0 and n+1
            double lhs = w(i - 1) + w(i + 1);
            CHECK(lhs == doctest::Approx(2.0 * (1.0 - ww.lambda) * w(i)).epsilon(1e-12));
        }
    }
}

TEST_CASE("distance is linear with positive coefficients") {
    WilsonWeights ww = wilson_weights(4);
    Contour lo{0, 0, 0, 0}, hi{1, 0, 2, 0};
    double d = wilson_distance(lo, hi, ww);
    CHECK(d == doctest::Approx(ww.w[0] + 2.0 * ww.w[2]));
    CHECK(wilson_distance(lo, lo, ww) == 0.0);
    CHECK_THROWS(wilson_distance(hi, lo, ww));
    CHECK_THROWS(wilson_distance(lo, Contour{0, 0, 0}, ww));
}

TEST_CASE("drift bound holds on random ordered pairs") {
    for (int n : {4, 8}) {
        ModelParams p = ModelParams::standard(n, 1.0);
        WilsonWeights ww = wilson_weights(n);
        Rng rng(314);
        for (int k = 0; k < 500; ++k) {
            CoupledPair pair;
            pair.lower.resize(static_cast<std::size_t>(n));
            pair.upper.resize(static_cast<std::size_t>(n));
            for (int i = 0; i < n; ++i) {
                int lo = static_cast<int>(rng.next_below(static_cast<std::uint64_t>(n + 1)));
                int hi = lo + static_cast<int>(
                                  rng.next_below(static_cast<std::uint64_t>(n - lo + 1)));
                pair.lower[static_cast<std::size_t>(i)] = lo;
                pair.upper[static_cast<std::size_t>(i)] = hi;
            }
            double dist = wilson_distance(pair.lower, pair.upper, ww);
            double drift = exact_pair_drift(pair, ww, p);
            CHECK(drift <= -ww.lambda / static_cast<double>(n) * dist + 1e-10);
        }
    }
}

TEST_CASE("exact Rayleigh quotient upper-bounds the exact gap") {
    for (int n : {2, 3})
        for (double beta : {0.3, 1.0})
            for (ChainKind kind : {ChainKind::single_site, ChainKind::column,
                                   ChainKind::parallel_oe}) {
                ModelParams p = ModelParams::standard(n, beta);
                ExactChain chain = enumerate_chain(p);
                double gap =
                    spectral_gap_exact(transition_matrix(kind, chain), chain.stationary);
                double rq = gap_upper_bound_exact(kind, p);
                CHECK(gap <= rq + 1e-12);
                CHECK(rq > 0.0);
            }
}

TEST_CASE("Monte Carlo Rayleigh quotient approximates the exact one") {
    ModelParams p = ModelParams::standard(3, 1.0);
    double exact = gap_upper_bound_exact(ChainKind::column, p);
    double mc = gap_upper_bound_mc(ChainKind::column, p, 40000, 5);
    CHECK(mc == doctest::Approx(exact).epsilon(0.08));
    double mc_ss = gap_upper_bound_mc(ChainKind::single_site, p, 40000, 5);
    double exact_ss = gap_upper_bound_exact(ChainKind::single_site, p);
    CHECK(mc_ss == doctest::Approx(exact_ss).epsilon(0.08));
}

TEST_CASE("Monte Carlo Rayleigh quotient is deterministic in the seed") {
    ModelParams p = ModelParams::standard(8, 1.0);
    CHECK(gap_upper_bound_mc(ChainKind::column, p, 500, 9) ==
          gap_upper_bound_mc(ChainKind::column, p, 500, 9));
    CHECK_THROWS(gap_upper_bound_mc(ChainKind::parallel_oe, p, 500, 9));
    CHECK_THROWS(gap_upper_bound_exact(ChainKind::column, ModelParams::standard(1, 1.0)));
}
