#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "sos/model.hpp"
#include "sos/rng.hpp"

namespace sos {

// Restriction of the configuration space used when building transfer
// tables: a uniform floor (the events A_h), an explicit ceiling, and a
// gradient cap |eta(i+1) - eta(i)| < gradient_cap on every bond including
// the boundary bonds (complement of the events B_d).
struct Restriction {
    int min_height = 0;
    std::optional<int> max_height;
    std::optional<int> gradient_cap;
};

// Forward/backward partial partition sums of the Gibbs weight, scaled per
// column with the log-scale accumulated separately, so partition functions
// stay representable for long lattices.
struct TransferTables {
    ModelParams params;
    Restriction restriction;
    int hmax = 0;      // top of the height range actually tabulated
    double log_z = 0.0;
    // log of a crude geometric bound on the probability mass lost to
    // truncation; -inf in bounded mode
    double truncation_tail_log_bound = 0.0;
    std::vector<std::vector<double>> fwd; // fwd[i-1][h], scaled
    std::vector<std::vector<double>> bwd; // bwd[i-1][h], scaled

    explicit TransferTables(ModelParams p) : params(std::move(p)) {}
};

TransferTables build_tables(const ModelParams& params, const Restriction& restriction = {});
// Serial reference kernel for the OpenMP build; kept for tests and the
// benchmark target.
TransferTables build_tables_serial(const ModelParams& params,
                                   const Restriction& restriction = {});

// log of the total restricted Gibbs weight.
double log_total_weight(const TransferTables& tables);

// Exact event probabilities, each a ratio of restricted to unrestricted
// total weights.
double event_prob_min_height(const ModelParams& params, int h);  // mu(A_h)
double event_prob_gradient(const ModelParams& params, int d);    // mu(B_d)
double event_prob_exceed(const ModelParams& params, int level);  // mu(some eta(i) > level)
double marginal_geq(const TransferTables& tables, int pos, int h); // mu(eta(pos) >= h)

// Exact draw from the (restricted) Gibbs law by forward sampling against
// the backward tables.  Read-only w.r.t. the tables; thread-parallel with
// per-thread streams.
Contour sample_exact(const TransferTables& tables, Rng& rng);
Contour sample_exact(const ModelParams& params, const Restriction& restriction,
                     std::uint64_t seed);

// Mean and variance of sum_i eta(i) under the restricted law, via an
// augmented forward pass; used to pin equilibrium bands for experiments.
struct SumMoments {
    double mean = 0.0;
    double variance = 0.0;
};
SumMoments height_sum_moments(const TransferTables& tables);

} // namespace sos
