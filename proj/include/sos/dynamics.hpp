#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "sos/model.hpp"
#include "sos/rng.hpp"

namespace sos {

enum class ChainKind { single_site, column, parallel_oe, parallel_eo };

ChainKind chain_kind_from_string(const std::string& name);
std::string to_string(ChainKind kind);
inline bool is_parallel(ChainKind kind) {
    return kind == ChainKind::parallel_oe || kind == ChainKind::parallel_eo;
}

// Randomness for one update, factored so that sharing a draw across coupled
// copies yields a monotone coupling: single-site uses (pos, up, u) with a
// fair direction coin and a uniform acceptance variable; column uses
// (pos, r) with r fed to the inverse CDF.
struct UpdateDraw {
    int pos = 1;
    bool up = false;
    double u = 0.0;
    double r = 0.0;
};

UpdateDraw draw_single_site(Rng& rng, int n);
UpdateDraw draw_column(Rng& rng, int n);

// One single-site heat-bath move: direction coin up/down, acceptance
// u < 2 p(+/-) with p in {1/4, 1/4 e^{-2 beta}} per the neighbor rule,
// clamped moves at 0 and at the cap realized as self-loops.
void ss_apply(Contour& contour, const UpdateDraw& draw, const ModelParams& params);
Contour ss_step(const Contour& contour, const UpdateDraw& draw, const ModelParams& params);

// One column move: resample the full height at pos from mu_ab via the
// inverse CDF evaluated at draw.r.
void col_apply(Contour& contour, const UpdateDraw& draw, const ModelParams& params);
Contour col_step(const Contour& contour, const UpdateDraw& draw, const ModelParams& params);

// Column-update every position of the given parity (1 = odd, 0 = even),
// each with an independent r from the stream.
void par_sweep_apply(Contour& contour, int parity, Rng& rng, const ModelParams& params);
Contour par_sweep(const Contour& contour, int parity, Rng& rng, const ModelParams& params);

enum class Statistic { mean_height, max_height, max_gradient, wilson_distance };

Statistic statistic_from_string(const std::string& name);
std::string to_string(Statistic stat);

double evaluate_statistic(Statistic stat, const Contour& contour,
                          const ModelParams& params, const Contour& reference);

struct RunOptions {
    long long stride = 0; // 0 -> n^2
    std::vector<Statistic> statistics = {Statistic::mean_height};
    Contour reference; // for Statistic::wilson_distance; defaults to bottom
};

struct TrajectorySample {
    long long step = 0;
    Statistic stat = Statistic::mean_height;
    double value = 0.0;
};

struct TrajectorySummary {
    Contour final;
    std::vector<TrajectorySample> series;
    long long steps = 0;
};

// Deterministic in (kind, start, steps, seed, params).  For the parallel
// kinds a "step" is one full sweep pair (OE or EO).
TrajectorySummary run_chain(ChainKind kind, const Contour& start, long long steps,
                            std::uint64_t seed, const ModelParams& params,
                            const RunOptions& options = {});

// Censored single-site schedules: M epochs of m proposed updates each;
// draws whose position parity does not match the epoch pattern are
// discarded.
enum class EpochPattern { odd_only, even_only, free };

struct CensorSchedule {
    long long epochs = 1;
    long long epoch_length = 1;
    std::vector<EpochPattern> pattern; // one entry per epoch
    int d_param = 1;                   // D = ceil(log(1/mu(A)))

    static CensorSchedule alternating(long long epochs, long long epoch_length,
                                      int d_param, bool odd_first = true);
    void validate() const;
};

// Default gradient-event threshold.
int default_gradient_threshold(int n);

struct CensoredRunResult {
    Contour final;
    long long total_steps = 0;
    long long applied_steps = 0;
    long long steps_in_b = 0;  // steps at which some |gradient| >= threshold
    long long first_b_step = -1;
    int max_gradient = 0;
};

CensoredRunResult censored_run(const CensorSchedule& schedule, const Contour& start,
                               std::uint64_t seed, const ModelParams& params,
                               int gradient_threshold);

} // namespace sos
