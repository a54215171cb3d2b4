#include "sos/coupling.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace sos {

CoupledPair coupled_extremes(const ModelParams& params) {
    return {bottom_contour(params), top_contour(params)};
}

void grand_apply(CoupledPair& pair, const UpdateDraw& draw, ChainKind kind,
                 const ModelParams& params) {
    switch (kind) {
    case ChainKind::single_site:
        ss_apply(pair.lower, draw, params);
        ss_apply(pair.upper, draw, params);
        break;
    case ChainKind::column:
        col_apply(pair.lower, draw, params);
        col_apply(pair.upper, draw, params);
        break;
    default:
        throw std::invalid_argument("grand_apply: parallel kinds use grand_sweep_apply");
    }
    std::size_t i = static_cast<std::size_t>(draw.pos - 1);
    if (pair.lower[i] > pair.upper[i])
        throw std::logic_error("grand coupling: order violated at updated position");
}

CoupledPair grand_step(const CoupledPair& pair, const UpdateDraw& draw,
                       ChainKind kind, const ModelParams& params) {
    if (!leq(pair.lower, pair.upper))
        throw std::invalid_argument("grand_step: input pair not ordered");
    CoupledPair next = pair;
    grand_apply(next, draw, kind, params);
    return next;
}

void grand_sweep_apply(CoupledPair& pair, int parity, Rng& rng,
                       const ModelParams& params) {
    UpdateDraw d;
    for (int i = (parity % 2 == 1) ? 1 : 2; i <= params.n; i += 2) {
        d.pos = i;
        d.r = rng.next_unit();
        grand_apply(pair, d, ChainKind::column, params);
    }
}

long long default_coalescence_budget(ChainKind kind, int n) {
    double nn = static_cast<double>(n);
    double logn = std::log(std::max(nn, 2.0));
    double budget;
    switch (kind) {
    case ChainKind::single_site:
        budget = 64.0 * std::pow(nn, 3.5) * logn;
        break;
    case ChainKind::column:
        budget = 64.0 * nn * nn * nn * logn;
        break;
    default: // parallel: one step is a full sweep pair
        budget = 64.0 * nn * nn * logn;
        break;
    }
    return static_cast<long long>(budget) + 1;
}

CoalescenceResult coalescence_time(ChainKind kind, const ModelParams& params,
                                   std::uint64_t seed, long long t_max) {
    if (!params.is_bounded())
        throw std::domain_error("coalescence_time: bounded mode only");
    if (t_max <= 0) t_max = default_coalescence_budget(kind, params.n);

    CoupledPair pair = coupled_extremes(params);
    long long gap_total = 0;
    for (std::size_t i = 0; i < pair.lower.size(); ++i)
        gap_total += pair.upper[i] - pair.lower[i];
    if (gap_total == 0) return {0, false};

    Rng rng(seed);
    for (long long t = 1; t <= t_max; ++t) {
        if (kind == ChainKind::single_site || kind == ChainKind::column) {
            UpdateDraw d = (kind == ChainKind::single_site)
                               ? draw_single_site(rng, params.n)
                               : draw_column(rng, params.n);
            std::size_t i = static_cast<std::size_t>(d.pos - 1);
            int before = pair.upper[i] - pair.lower[i];
            grand_apply(pair, d, kind, params);
            gap_total += (pair.upper[i] - pair.lower[i]) - before;
        } else {
            int first = (kind == ChainKind::parallel_oe) ? 1 : 0;
            grand_sweep_apply(pair, first, rng, params);
            grand_sweep_apply(pair, 1 - first, rng, params);
            gap_total = 0;
            for (std::size_t i = 0; i < pair.lower.size(); ++i)
                gap_total += pair.upper[i] - pair.lower[i];
        }
        if (gap_total == 0) return {t, false};
    }
    return {t_max, true};
}

double exact_pair_drift(const CoupledPair& pair, const WilsonWeights& weights,
                        const ModelParams& params) {
    if (!leq(pair.lower, pair.upper))
        throw std::invalid_argument("exact_pair_drift: pair not ordered");
    if (weights.n != params.n)
        throw std::invalid_argument("exact_pair_drift: weight size mismatch");
    double drift = 0.0;
    for (int i = 1; i <= params.n; ++i) {
        if (params.is_pinned(i)) continue; // self-loop, no contribution
        int lo_a = std::min(height_at(pair.lower, params, i - 1),
                            height_at(pair.lower, params, i + 1));
        int lo_b = std::max(height_at(pair.lower, params, i - 1),
                            height_at(pair.lower, params, i + 1));
        int up_a = std::min(height_at(pair.upper, params, i - 1),
                            height_at(pair.upper, params, i + 1));
        int up_b = std::max(height_at(pair.upper, params, i - 1),
                            height_at(pair.upper, params, i + 1));
        double mean_gap = conditional_mean_direct(up_a, up_b, params) -
                          conditional_mean_direct(lo_a, lo_b, params);
        double gap = static_cast<double>(pair.upper[static_cast<std::size_t>(i - 1)] -
                                         pair.lower[static_cast<std::size_t>(i - 1)]);
        drift += weights.w[static_cast<std::size_t>(i - 1)] * (mean_gap - gap);
    }
    return drift / static_cast<double>(params.n);
}

} // namespace sos
