#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "sos/coupling.hpp"
#include "sos/dynamics.hpp"
#include "sos/equilibrium.hpp"
#include "sos/model.hpp"

namespace sos {

struct FitResult {
    double slope = 0.0;
    double intercept = 0.0;
    double stderr_slope = 0.0;
};

// Least squares of y against x; loglog_fit fits log y against log x.
FitResult linear_fit(const std::vector<double>& xs, const std::vector<double>& ys);
FitResult loglog_fit(const std::vector<double>& xs, const std::vector<double>& ys);

struct ScalingPoint {
    int n = 0;
    double median = 0.0;
    double q25 = 0.0;
    double q75 = 0.0;
    int replicas = 0;
    int timeouts = 0;
};

struct ScalingResult {
    std::vector<ScalingPoint> points;
    FitResult fit;
    bool partial = false; // some size had only timeouts
};

// Coalescence-time medians over n_list with a log-log fit.  Requires at
// least 3 sizes and 16 replicas per size.  Replica streams derive from
// (seed, global replica index).
ScalingResult scaling_sweep(ChainKind kind, const std::vector<int>& n_list,
                            int replicas, std::uint64_t seed, double beta,
                            long long t_max = 0);

enum class StartKind { top, bottom, conditioned_min_height, pinned_equilibrium };

StartKind start_kind_from_string(const std::string& name);
std::string to_string(StartKind start);

struct Band {
    double lo = 0.0;
    double hi = 0.0;
    double mean = 0.0;
    double sd = 0.0;
};

// Exact equilibrium band mean +/- num_sd standard deviations for the
// mean-height statistic, from the transfer-matrix moments.
Band equilibrium_band(const ModelParams& params, double num_sd = 2.0);

struct RelaxSpec {
    StartKind start = StartKind::bottom;
    int cond_h = 0;       // conditioned_min_height
    int pin_spacing = 0;  // pinned_equilibrium
    ChainKind kind = ChainKind::single_site;
    Band band;
    long long dwell = 0;  // 0 -> n^2
    long long budget = 0; // 0 -> coalescence default
};

struct HittingResult {
    long long steps = 0;
    bool timed_out = false;
};

// First time the running mean-height statistic enters the band and stays
// there for the dwell window.
HittingResult relaxation_experiment(const RelaxSpec& spec, const ModelParams& params,
                                    std::uint64_t seed);

struct DescentProfile {
    // stage_steps[k-1] = first step with max height <= cap - k*ceil(sqrt(n))
    std::vector<long long> stage_steps;
    std::vector<std::pair<long long, double>> max_height_series;
    std::vector<std::pair<long long, double>> mean_height_series;
    HittingResult band_hit;
};

// Top-down descent under the given dynamics, recording per-stage crossing
// times and the equilibrium-band hitting time.
DescentProfile descent_profile(const ModelParams& params, ChainKind kind,
                               std::uint64_t seed, long long budget = 0,
                               long long stride = 0);

// Single-column mixing check: replicated single-site updates of one height
// with neighbors frozen at (a, b), started at distance ell above the
// interval; returns the number of per-replica updates until the empirical
// law is within tv_target of the exact conditional law.
long long column_walk_mixing_steps(int a, int b, int ell, double beta,
                                   int replicas, std::uint64_t seed,
                                   double tv_target = 0.25);

} // namespace sos
