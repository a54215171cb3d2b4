#include "sos/wilson.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

#include "sos/equilibrium.hpp"
#include "sos/exact.hpp"

namespace sos {

WilsonWeights wilson_weights(int n) {
    if (n < 1) throw std::invalid_argument("wilson_weights: n must be >= 1");
    WilsonWeights ww;
    ww.n = n;
    ww.w.resize(static_cast<std::size_t>(n));
    const double pi = std::numbers::pi;
    for (int i = 1; i <= n; ++i)
        ww.w[static_cast<std::size_t>(i - 1)] =
            std::cos(-pi / 2.0 + pi * static_cast<double>(i) / (n + 1));
    ww.lambda = 1.0 - std::cos(pi / (n + 1));
    ww.w_min = ww.w.front();
    return ww;
}

double wilson_distance(const Contour& lower, const Contour& upper,
                       const WilsonWeights& weights) {
    if (lower.size() != upper.size() ||
        static_cast<int>(lower.size()) != weights.n)
        throw std::invalid_argument("wilson_distance: size mismatch");
    double d = 0.0;
    for (std::size_t i = 0; i < lower.size(); ++i) {
        if (lower[i] > upper[i])
            throw std::invalid_argument("wilson_distance: pair not ordered");
        d += weights.w[i] * static_cast<double>(upper[i] - lower[i]);
    }
    return d;
}

double gap_test_function(const Contour& contour, const WilsonWeights& weights,
                         const ModelParams& params) {
    validate_contour(contour, params);
    if (weights.n != params.n)
        throw std::invalid_argument("gap_test_function: size mismatch");
    double f = 0.0;
    for (int i = 1; i <= params.n; ++i)
        f += weights.w[static_cast<std::size_t>(i - 1)] *
             static_cast<double>(height_at(contour, params, i + 1) -
                                 height_at(contour, params, i - 1));
    return f;
}

namespace {

// Coefficient of eta(i) in the test function: w(i-1) - w(i+1).
std::vector<double> test_function_coefficients(const WilsonWeights& ww) {
    std::vector<double> c(static_cast<std::size_t>(ww.n));
    auto w = [&](int i) {
        return (i >= 1 && i <= ww.n) ? ww.w[static_cast<std::size_t>(i - 1)] : 0.0;
    };
    for (int i = 1; i <= ww.n; ++i)
        c[static_cast<std::size_t>(i - 1)] = w(i - 1) - w(i + 1);
    return c;
}

} // namespace

double gap_upper_bound_exact(ChainKind kind, const ModelParams& params) {
    if (params.n < 2)
        throw std::domain_error("gap_upper_bound: test function degenerate for n < 2");
    ExactChain chain = enumerate_chain(params);
    Eigen::MatrixXd P = transition_matrix(kind, chain);
    WilsonWeights ww = wilson_weights(params.n);

    const auto N = chain.states.size();
    Eigen::VectorXd f(static_cast<Eigen::Index>(N));
    for (std::size_t s = 0; s < N; ++s)
        f(static_cast<Eigen::Index>(s)) =
            gap_test_function(chain.states[s], ww, params);

    double mean = chain.stationary.dot(f);
    double var = 0.0;
    for (std::size_t s = 0; s < N; ++s) {
        double d = f(static_cast<Eigen::Index>(s)) - mean;
        var += chain.stationary(static_cast<Eigen::Index>(s)) * d * d;
    }
    if (!(var > 0.0))
        throw std::domain_error("gap_upper_bound: Var(f) = 0");

    double dirichlet = 0.0;
    for (std::size_t s = 0; s < N; ++s)
        for (std::size_t t = 0; t < N; ++t) {
            double p = P(static_cast<Eigen::Index>(s), static_cast<Eigen::Index>(t));
            if (p == 0.0) continue;
            double d = f(static_cast<Eigen::Index>(s)) - f(static_cast<Eigen::Index>(t));
            dirichlet += chain.stationary(static_cast<Eigen::Index>(s)) * p * d * d;
        }
    return 0.5 * dirichlet / var;
}

double gap_upper_bound_mc(ChainKind kind, const ModelParams& params,
                          int samples, std::uint64_t seed) {
    if (params.n < 2)
        throw std::domain_error("gap_upper_bound: test function degenerate for n < 2");
    if (kind != ChainKind::single_site && kind != ChainKind::column)
        throw std::invalid_argument(
            "gap_upper_bound_mc: single-site and column kinds only");
    if (samples < 2) throw std::invalid_argument("gap_upper_bound_mc: samples >= 2");
    if (!params.is_bounded())
        throw std::domain_error("gap_upper_bound_mc: bounded mode only");

    TransferTables tables = build_tables(params);
    WilsonWeights ww = wilson_weights(params.n);
    std::vector<double> coeff = test_function_coefficients(ww);
    const double inv_n = 1.0 / static_cast<double>(params.n);

    double dirichlet_sum = 0.0;
    double f_sum = 0.0, f_sq_sum = 0.0;
    for (int k = 0; k < samples; ++k) {
        Rng rng = make_stream(seed, static_cast<std::uint64_t>(k));
        Contour eta = sample_exact(tables, rng);

        double fval = gap_test_function(eta, ww, params);
        f_sum += fval;
        f_sq_sum += fval * fval;

        double local = 0.0;
        for (int i = 1; i <= params.n; ++i) {
            if (params.is_pinned(i)) continue;
            double c2 = coeff[static_cast<std::size_t>(i - 1)] *
                        coeff[static_cast<std::size_t>(i - 1)];
            int h = eta[static_cast<std::size_t>(i - 1)];
            int left = height_at(eta, params, i - 1);
            int right = height_at(eta, params, i + 1);
            int a = std::min(left, right), b = std::max(left, right);
            if (kind == ChainKind::single_site) {
                double pm = (h <= a) ? 0.25 * params.x : 0.25;
                double pp = (h >= b) ? 0.25 * params.x : 0.25;
                if (h > 0) local += inv_n * pm * c2;
                if (h < params.cap) local += inv_n * pp * c2;
            } else {
                ConditionalLaw law = conditional_law(a, b, params);
                double m1 = 0.0, m2 = 0.0;
                for (int j = 0; j <= params.cap; ++j) {
                    double p = law.prob(j);
                    m1 += p * j;
                    m2 += p * static_cast<double>(j) * j;
                }
                double sq = m2 - 2.0 * h * m1 + static_cast<double>(h) * h;
                local += inv_n * c2 * sq;
            }
        }
        dirichlet_sum += local;
    }

    double dirichlet = dirichlet_sum / samples;
    double f_mean = f_sum / samples;
    double var = f_sq_sum / samples - f_mean * f_mean;
    if (!(var > 0.0))
        throw std::domain_error("gap_upper_bound_mc: sample Var(f) = 0");
    return 0.5 * dirichlet / var;
}

} // namespace sos
