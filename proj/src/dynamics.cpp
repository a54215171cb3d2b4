#include "sos/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "sos/wilson.hpp"

namespace sos {

ChainKind chain_kind_from_string(const std::string& name) {
    if (name == "single-site" || name == "single_site" || name == "ss")
        return ChainKind::single_site;
    if (name == "column" || name == "col") return ChainKind::column;
    if (name == "parallel-oe" || name == "parallel") return ChainKind::parallel_oe;
    if (name == "parallel-eo") return ChainKind::parallel_eo;
    throw std::invalid_argument("unknown chain kind: " + name);
}

std::string to_string(ChainKind kind) {
    switch (kind) {
    case ChainKind::single_site: return "single-site";
    case ChainKind::column: return "column";
    case ChainKind::parallel_oe: return "parallel-oe";
    case ChainKind::parallel_eo: return "parallel-eo";
    }
    return "?";
}

UpdateDraw draw_single_site(Rng& rng, int n) {
    UpdateDraw d;
    d.pos = 1 + static_cast<int>(rng.next_below(static_cast<std::uint64_t>(n)));
    d.up = rng.next_bit();
    d.u = rng.next_unit();
    return d;
}

UpdateDraw draw_column(Rng& rng, int n) {
    UpdateDraw d;
    d.pos = 1 + static_cast<int>(rng.next_below(static_cast<std::uint64_t>(n)));
    d.r = rng.next_unit();
    return d;
}

void ss_apply(Contour& contour, const UpdateDraw& draw, const ModelParams& params) {
    int i = draw.pos;
    if (params.is_pinned(i)) return;
    int h = contour[static_cast<std::size_t>(i - 1)];
    int left = height_at(contour, params, i - 1);
    int right = height_at(contour, params, i + 1);
    int a = std::min(left, right);
    int b = std::max(left, right);
    if (!draw.up) {
        double p = (h <= a) ? 0.25 * params.x : 0.25;
        if (draw.u < 2.0 * p)
            contour[static_cast<std::size_t>(i - 1)] = std::max(h - 1, 0);
    } else {
        double p = (h >= b) ? 0.25 * params.x : 0.25;
        if (draw.u < 2.0 * p) {
            int up = h + 1;
            if (params.is_bounded()) up = std::min(up, params.cap);
            contour[static_cast<std::size_t>(i - 1)] = up;
        }
    }
}

Contour ss_step(const Contour& contour, const UpdateDraw& draw, const ModelParams& params) {
    validate_contour(contour, params);
    Contour next = contour;
    ss_apply(next, draw, params);
    return next;
}

void col_apply(Contour& contour, const UpdateDraw& draw, const ModelParams& params) {
    int i = draw.pos;
    if (params.is_pinned(i)) return;
    int left = height_at(contour, params, i - 1);
    int right = height_at(contour, params, i + 1);
    ConditionalLaw law =
        conditional_law(std::min(left, right), std::max(left, right), params);
    contour[static_cast<std::size_t>(i - 1)] = law.quantile(draw.r);
}

Contour col_step(const Contour& contour, const UpdateDraw& draw, const ModelParams& params) {
    validate_contour(contour, params);
    Contour next = contour;
    col_apply(next, draw, params);
    return next;
}

void par_sweep_apply(Contour& contour, int parity, Rng& rng, const ModelParams& params) {
    // same-parity positions are not neighbors, so in-place sequential
    // updates coincide with the simultaneous sweep
    UpdateDraw d;
    for (int i = (parity % 2 == 1) ? 1 : 2; i <= params.n; i += 2) {
        d.pos = i;
        d.r = rng.next_unit();
        col_apply(contour, d, params);
    }
}

Contour par_sweep(const Contour& contour, int parity, Rng& rng, const ModelParams& params) {
    validate_contour(contour, params);
    Contour next = contour;
    par_sweep_apply(next, parity, rng, params);
    return next;
}

Statistic statistic_from_string(const std::string& name) {
    if (name == "mean-height" || name == "mean_height") return Statistic::mean_height;
    if (name == "max-height" || name == "max_height") return Statistic::max_height;
    if (name == "max-gradient" || name == "max_gradient") return Statistic::max_gradient;
    if (name == "wilson-distance" || name == "wilson_distance")
        return Statistic::wilson_distance;
    throw std::invalid_argument("unknown statistic: " + name);
}

std::string to_string(Statistic stat) {
    switch (stat) {
    case Statistic::mean_height: return "mean-height";
    case Statistic::max_height: return "max-height";
    case Statistic::max_gradient: return "max-gradient";
    case Statistic::wilson_distance: return "wilson-distance";
    }
    return "?";
}

double evaluate_statistic(Statistic stat, const Contour& contour,
                          const ModelParams& params, const Contour& reference) {
    switch (stat) {
    case Statistic::mean_height: {
        long long sum = 0;
        for (int h : contour) sum += h;
        return static_cast<double>(sum) / static_cast<double>(params.n);
    }
    case Statistic::max_height:
        return static_cast<double>(*std::max_element(contour.begin(), contour.end()));
    case Statistic::max_gradient: {
        int best = 0;
        for (int i = 0; i <= params.n; ++i)
            best = std::max(best, std::abs(height_at(contour, params, i) -
                                           height_at(contour, params, i + 1)));
        return static_cast<double>(best);
    }
    case Statistic::wilson_distance: {
        WilsonWeights ww = wilson_weights(params.n);
        double d = 0.0;
        for (int i = 1; i <= params.n; ++i)
            d += ww.w[static_cast<std::size_t>(i - 1)] *
                 std::abs(contour[static_cast<std::size_t>(i - 1)] -
                          reference[static_cast<std::size_t>(i - 1)]);
        return d;
    }
    }
    throw std::logic_error("unreachable");
}

TrajectorySummary run_chain(ChainKind kind, const Contour& start, long long steps,
                            std::uint64_t seed, const ModelParams& params,
                            const RunOptions& options) {
    if (steps < 0) throw std::invalid_argument("run_chain: steps must be >= 0");
    validate_contour(start, params);
    long long stride = options.stride > 0
                           ? options.stride
                           : static_cast<long long>(params.n) * params.n;
    Contour reference =
        options.reference.empty() ? bottom_contour(params) : options.reference;

    TrajectorySummary out;
    out.final = start;
    out.steps = steps;
    Rng rng(seed);

    auto record = [&](long long step) {
        for (Statistic stat : options.statistics)
            out.series.push_back(
                {step, stat, evaluate_statistic(stat, out.final, params, reference)});
    };

    record(0);
    for (long long t = 1; t <= steps; ++t) {
        switch (kind) {
        case ChainKind::single_site:
            ss_apply(out.final, draw_single_site(rng, params.n), params);
            break;
        case ChainKind::column:
            col_apply(out.final, draw_column(rng, params.n), params);
            break;
        case ChainKind::parallel_oe:
            par_sweep_apply(out.final, 1, rng, params);
            par_sweep_apply(out.final, 0, rng, params);
            break;
        case ChainKind::parallel_eo:
            par_sweep_apply(out.final, 0, rng, params);
            par_sweep_apply(out.final, 1, rng, params);
            break;
        }
        if (t % stride == 0 || t == steps) record(t);
    }
    return out;
}

CensorSchedule CensorSchedule::alternating(long long epochs, long long epoch_length,
                                           int d_param, bool odd_first) {
    CensorSchedule s;
    s.epochs = epochs;
    s.epoch_length = epoch_length;
    s.d_param = d_param;
    s.pattern.resize(static_cast<std::size_t>(epochs));
    for (long long k = 0; k < epochs; ++k) {
        bool odd = (k % 2 == 0) == odd_first;
        s.pattern[static_cast<std::size_t>(k)] =
            odd ? EpochPattern::odd_only : EpochPattern::even_only;
    }
    return s;
}

void CensorSchedule::validate() const {
    if (epochs < 1 || epoch_length < 1 || d_param < 1)
        throw std::invalid_argument("CensorSchedule: epochs, epoch_length, d_param >= 1");
    if (static_cast<long long>(pattern.size()) != epochs)
        throw std::invalid_argument("CensorSchedule: pattern size must equal epochs");
}

int default_gradient_threshold(int n) {
    return static_cast<int>(std::ceil(4.0 * std::log(std::max(n, 2))));
}

CensoredRunResult censored_run(const CensorSchedule& schedule, const Contour& start,
                               std::uint64_t seed, const ModelParams& params,
                               int gradient_threshold) {
    schedule.validate();
    validate_contour(start, params);
    if (gradient_threshold < 1)
        throw std::invalid_argument("censored_run: gradient threshold must be >= 1");

    CensoredRunResult out;
    out.final = start;
    Rng rng(seed);

    auto gradient = [&](int bond) {
        return std::abs(height_at(out.final, params, bond) -
                        height_at(out.final, params, bond + 1));
    };
    int bad_bonds = 0;
    int max_grad = 0;
    for (int bond = 0; bond <= params.n; ++bond) {
        int g = gradient(bond);
        max_grad = std::max(max_grad, g);
        if (g >= gradient_threshold) ++bad_bonds;
    }

    long long step = 0;
    for (long long k = 0; k < schedule.epochs; ++k) {
        EpochPattern pat = schedule.pattern[static_cast<std::size_t>(k)];
        for (long long s = 0; s < schedule.epoch_length; ++s) {
            ++step;
            UpdateDraw d = draw_single_site(rng, params.n);
            bool censored = (pat == EpochPattern::odd_only && d.pos % 2 == 0) ||
                            (pat == EpochPattern::even_only && d.pos % 2 == 1);
            if (!censored) {
                int before_l = gradient(d.pos - 1);
                int before_r = gradient(d.pos);
                ss_apply(out.final, d, params);
                int after_l = gradient(d.pos - 1);
                int after_r = gradient(d.pos);
                bad_bonds += (after_l >= gradient_threshold) - (before_l >= gradient_threshold);
                bad_bonds += (after_r >= gradient_threshold) - (before_r >= gradient_threshold);
                max_grad = std::max({max_grad, after_l, after_r});
                ++out.applied_steps;
            }
            if (bad_bonds > 0) {
                ++out.steps_in_b;
                if (out.first_b_step < 0) out.first_b_step = step;
            }
        }
    }
    out.total_steps = step;
    out.max_gradient = max_grad;
    return out;
}

} // namespace sos
