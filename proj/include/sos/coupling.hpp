#pragma once

#include <cstdint>

#include "sos/dynamics.hpp"
#include "sos/model.hpp"
#include "sos/wilson.hpp"

namespace sos {

// Ordered pair of coupled copies; lower <= upper pointwise at all times.
struct CoupledPair {
    Contour lower;
    Contour upper;
};

// The two extreme starts (bottom, top).
CoupledPair coupled_extremes(const ModelParams& params);

// Apply the identical draw to both copies (grand coupling).  Checks the
// order at the updated position and throws std::logic_error on violation.
// Kind must be single_site or column; parallel sweeps use
// grand_sweep_apply.
void grand_apply(CoupledPair& pair, const UpdateDraw& draw, ChainKind kind,
                 const ModelParams& params);
CoupledPair grand_step(const CoupledPair& pair, const UpdateDraw& draw,
                       ChainKind kind, const ModelParams& params);

// One coupled parity sweep with a shared r per position.
void grand_sweep_apply(CoupledPair& pair, int parity, Rng& rng,
                       const ModelParams& params);

struct CoalescenceResult {
    long long steps = 0;
    bool timed_out = false;
};

// Timeout scaled from the mixing-time bounds: 64 n^3 ln n column steps,
// 64 n^3.5 ln n single-site steps.
long long default_coalescence_budget(ChainKind kind, int n);

// First step at which the coupled copies started from (bottom, top)
// agree.  Deterministic in seed.
CoalescenceResult coalescence_time(ChainKind kind, const ModelParams& params,
                                   std::uint64_t seed, long long t_max = 0);

// Exact conditional drift E[D(t+1) - D(t) | pair] of the Wilson distance
// under one column step, by direct summation of both conditional means at
// every position.
double exact_pair_drift(const CoupledPair& pair, const WilsonWeights& weights,
                        const ModelParams& params);

} // namespace sos
