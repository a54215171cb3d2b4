#pragma once

#include <cstdint>
#include <vector>

#include "sos/dynamics.hpp"
#include "sos/model.hpp"

namespace sos {

// Second eigenvector of the discrete Laplacian on [1, n] with zero
// boundary: w(i) = cos(-pi/2 + pi i/(n+1)), eigenvalue 1 - cos(pi/(n+1)).
struct WilsonWeights {
    int n = 0;
    std::vector<double> w;
    double lambda = 0.0;
    double w_min = 0.0;
};

WilsonWeights wilson_weights(int n);

// D = sum_i w(i) (upper(i) - lower(i)); requires lower <= upper pointwise.
double wilson_distance(const Contour& lower, const Contour& upper,
                       const WilsonWeights& weights);

// Spectral-gap test function f(eta) = sum_i w(i) (eta(i+1) - eta(i-1)),
// boundary heights substituted at i = 1 and i = n.
double gap_test_function(const Contour& contour, const WilsonWeights& weights,
                         const ModelParams& params);

// Rayleigh quotient (1/2) Dirichlet(f) / Var(f) of the test function: an
// upper bound on the spectral gap of the chosen dynamics.  Exact mode
// enumerates the state space (small n only); Monte Carlo mode averages the
// exact per-move Dirichlet contribution over exact equilibrium samples.
double gap_upper_bound_exact(ChainKind kind, const ModelParams& params);
double gap_upper_bound_mc(ChainKind kind, const ModelParams& params,
                          int samples, std::uint64_t seed);

} // namespace sos
