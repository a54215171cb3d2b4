#include "sos/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace sos {

FitResult linear_fit(const std::vector<double>& xs, const std::vector<double>& ys) {
    const std::size_t m = xs.size();
    if (m != ys.size() || m < 2)
        throw std::invalid_argument("linear_fit: need >= 2 matching points");
    double sx = 0.0, sy = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
        sx += xs[i];
        sy += ys[i];
    }
    double mx = sx / static_cast<double>(m), my = sy / static_cast<double>(m);
    double sxx = 0.0, sxy = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
        sxx += (xs[i] - mx) * (xs[i] - mx);
        sxy += (xs[i] - mx) * (ys[i] - my);
    }
    if (sxx == 0.0) throw std::invalid_argument("linear_fit: degenerate x values");
    FitResult fit;
    fit.slope = sxy / sxx;
    fit.intercept = my - fit.slope * mx;
    double rss = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
        double r = ys[i] - (fit.intercept + fit.slope * xs[i]);
        rss += r * r;
    }
    fit.stderr_slope =
        (m > 2) ? std::sqrt(rss / (static_cast<double>(m) - 2.0) / sxx) : 0.0;
    return fit;
}

FitResult loglog_fit(const std::vector<double>& xs, const std::vector<double>& ys) {
    std::vector<double> lx(xs.size()), ly(ys.size());
    for (std::size_t i = 0; i < xs.size(); ++i) {
        if (xs[i] <= 0.0 || (i < ys.size() && ys[i] <= 0.0))
            throw std::invalid_argument("loglog_fit: values must be positive");
        lx[i] = std::log(xs[i]);
    }
    for (std::size_t i = 0; i < ys.size(); ++i) ly[i] = std::log(ys[i]);
    return linear_fit(lx, ly);
}

namespace {

double quantile_sorted(const std::vector<double>& sorted, double p) {
    if (sorted.empty()) throw std::invalid_argument("quantile of empty sample");
    double idx = p * (static_cast<double>(sorted.size()) - 1.0);
    std::size_t lo = static_cast<std::size_t>(idx);
    std::size_t hi = std::min(lo + 1, sorted.size() - 1);
    double frac = idx - static_cast<double>(lo);
    return sorted[lo] * (1.0 - frac) + sorted[hi] * frac;
}

} // namespace

ScalingResult scaling_sweep(ChainKind kind, const std::vector<int>& n_list,
                            int replicas, std::uint64_t seed, double beta,
                            long long t_max) {
    if (n_list.size() < 3)
        throw std::invalid_argument("scaling_sweep: need >= 3 sizes");
    if (replicas < 16)
        throw std::invalid_argument("scaling_sweep: need >= 16 replicas");

    ScalingResult out;
    std::uint64_t stream = 0;
    for (int n : n_list) {
        std::vector<long long> times(static_cast<std::size_t>(replicas), 0);
        std::vector<char> failed(static_cast<std::size_t>(replicas), 0);
        ModelParams params = ModelParams::standard(n, beta);
        std::uint64_t base = stream;
#ifdef _OPENMP
#pragma omp parallel for schedule(dynamic)
#endif
        for (int r = 0; r < replicas; ++r) {
            CoalescenceResult cr = coalescence_time(
                kind, params, mix_stream(seed, base + static_cast<std::uint64_t>(r)),
                t_max);
            times[static_cast<std::size_t>(r)] = cr.steps;
            failed[static_cast<std::size_t>(r)] = cr.timed_out ? 1 : 0;
        }
        stream += static_cast<std::uint64_t>(replicas);

        std::vector<double> ok;
        int timeouts = 0;
        for (int r = 0; r < replicas; ++r) {
            if (failed[static_cast<std::size_t>(r)])
                ++timeouts;
            else
                ok.push_back(static_cast<double>(times[static_cast<std::size_t>(r)]));
        }
        ScalingPoint pt;
        pt.n = n;
        pt.replicas = replicas;
        pt.timeouts = timeouts;
        if (ok.empty()) {
            out.partial = true;
        } else {
            std::sort(ok.begin(), ok.end());
            pt.median = quantile_sorted(ok, 0.5);
            pt.q25 = quantile_sorted(ok, 0.25);
            pt.q75 = quantile_sorted(ok, 0.75);
        }
        out.points.push_back(pt);
    }

    std::vector<double> xs, ys;
    for (const ScalingPoint& pt : out.points)
        if (pt.median > 0.0) {
            xs.push_back(static_cast<double>(pt.n));
            ys.push_back(pt.median);
        }
    if (xs.size() >= 2) out.fit = loglog_fit(xs, ys);
    else out.partial = true;
    return out;
}

StartKind start_kind_from_string(const std::string& name) {
    if (name == "top") return StartKind::top;
    if (name == "bottom") return StartKind::bottom;
    if (name == "conditioned" || name == "conditioned-min-height")
        return StartKind::conditioned_min_height;
    if (name == "pinned" || name == "pinned-equilibrium")
        return StartKind::pinned_equilibrium;
    throw std::invalid_argument("unknown start kind: " + name);
}

std::string to_string(StartKind start) {
    switch (start) {
    case StartKind::top: return "top";
    case StartKind::bottom: return "bottom";
    case StartKind::conditioned_min_height: return "conditioned-min-height";
    case StartKind::pinned_equilibrium: return "pinned-equilibrium";
    }
    return "?";
}

Band equilibrium_band(const ModelParams& params, double num_sd) {
    TransferTables tables = build_tables(params);
    SumMoments mm = height_sum_moments(tables);
    Band band;
    band.mean = mm.mean / static_cast<double>(params.n);
    band.sd = std::sqrt(mm.variance) / static_cast<double>(params.n);
    band.lo = band.mean - num_sd * band.sd;
    band.hi = band.mean + num_sd * band.sd;
    return band;
}

namespace {

Contour make_start(const RelaxSpec& spec, const ModelParams& params,
                   std::uint64_t seed) {
    switch (spec.start) {
    case StartKind::top:
        return top_contour(params);
    case StartKind::bottom:
        return bottom_contour(params);
    case StartKind::conditioned_min_height: {
        Restriction floor;
        floor.min_height = spec.cond_h;
        return sample_exact(params, floor, mix_stream(seed, 0x5747u));
    }
    case StartKind::pinned_equilibrium: {
        if (spec.pin_spacing < 2)
            throw std::invalid_argument("relaxation: pin spacing must be >= 2");
        std::vector<int> pins;
        for (int i = spec.pin_spacing; i <= params.n; i += spec.pin_spacing)
            pins.push_back(i);
        ModelParams pinned = params.with_pins(pins);
        return sample_exact(pinned, {}, mix_stream(seed, 0x5747u));
    }
    }
    throw std::logic_error("unreachable");
}

// Tracks the mean-height statistic incrementally and reports the first
// step from which it stays inside the band for a full dwell window.
class BandTracker {
  public:
    BandTracker(const Band& band, long long dwell, long long height_sum, int n)
        : band_(band), dwell_(dwell), sum_(height_sum), n_(n) {
        check(0);
    }

    void bump(long long step, int delta) {
        sum_ += delta;
        check(step);
    }

    void touch(long long step) { check(step); }

    bool done() const { return hit_ >= 0; }
    long long hit_step() const { return hit_; }

  private:
    void check(long long step) {
        double v = static_cast<double>(sum_) / static_cast<double>(n_);
        if (v >= band_.lo && v <= band_.hi) {
            if (streak_start_ < 0) streak_start_ = step;
            if (hit_ < 0 && step - streak_start_ >= dwell_) hit_ = streak_start_;
        } else {
            streak_start_ = -1;
        }
    }

    Band band_;
    long long dwell_;
    long long sum_;
    int n_;
    long long streak_start_ = -1;
    long long hit_ = -1;
};

} // namespace

HittingResult relaxation_experiment(const RelaxSpec& spec, const ModelParams& params,
                                    std::uint64_t seed) {
    Contour eta = make_start(spec, params, seed);
    long long dwell = spec.dwell > 0
                          ? spec.dwell
                          : static_cast<long long>(params.n) * params.n;
    long long budget = spec.budget > 0
                           ? spec.budget
                           : default_coalescence_budget(spec.kind, params.n);

    long long sum = 0;
    for (int h : eta) sum += h;
    BandTracker tracker(spec.band, dwell, sum, params.n);

    Rng rng(mix_stream(seed, 0xC4A1u));
    for (long long t = 1; t <= budget && !tracker.done(); ++t) {
        if (spec.kind == ChainKind::single_site || spec.kind == ChainKind::column) {
            UpdateDraw d = (spec.kind == ChainKind::single_site)
                               ? draw_single_site(rng, params.n)
                               : draw_column(rng, params.n);
            std::size_t i = static_cast<std::size_t>(d.pos - 1);
            int before = eta[i];
            if (spec.kind == ChainKind::single_site)
                ss_apply(eta, d, params);
            else
                col_apply(eta, d, params);
            sum += eta[i] - before;
            tracker.bump(t, eta[i] - before);
        } else {
            int first = (spec.kind == ChainKind::parallel_oe) ? 1 : 0;
            par_sweep_apply(eta, first, rng, params);
            par_sweep_apply(eta, 1 - first, rng, params);
            long long s = 0;
            for (int h : eta) s += h;
            tracker.bump(t, static_cast<int>(s - sum));
            sum = s;
        }
    }
    if (tracker.done()) return {tracker.hit_step(), false};
    return {budget, true};
}

DescentProfile descent_profile(const ModelParams& params, ChainKind kind,
                               std::uint64_t seed, long long budget,
                               long long stride) {
    if (!params.is_bounded())
        throw std::domain_error("descent_profile: bounded mode only");
    if (budget <= 0) budget = default_coalescence_budget(kind, params.n);
    if (stride <= 0) stride = static_cast<long long>(params.n) * params.n;

    Contour eta = top_contour(params);
    std::vector<long long> cnt(static_cast<std::size_t>(params.cap) + 1, 0);
    for (int h : eta) ++cnt[static_cast<std::size_t>(h)];
    int cur_max = params.cap;
    auto settle_max = [&]() {
        while (cur_max > 0 && cnt[static_cast<std::size_t>(cur_max)] == 0) --cur_max;
    };
    settle_max();
    long long sum = 0;
    for (int h : eta) sum += h;

    int stage_width = static_cast<int>(std::ceil(std::sqrt(static_cast<double>(params.n))));
    Band band = equilibrium_band(params);
    long long dwell = static_cast<long long>(params.n) * params.n;
    BandTracker tracker(band, dwell, sum, params.n);

    DescentProfile out;
    int stages = params.cap / stage_width;
    out.stage_steps.assign(static_cast<std::size_t>(stages), -1);
    auto record_stages = [&](long long step) {
        for (int k = 1; k <= stages; ++k)
            if (out.stage_steps[static_cast<std::size_t>(k - 1)] < 0 &&
                cur_max <= params.cap - k * stage_width)
                out.stage_steps[static_cast<std::size_t>(k - 1)] = step;
    };
    auto record_series = [&](long long step) {
        out.max_height_series.emplace_back(step, static_cast<double>(cur_max));
        out.mean_height_series.emplace_back(
            step, static_cast<double>(sum) / static_cast<double>(params.n));
    };
    record_stages(0);
    record_series(0);

    Rng rng(seed);
    long long t = 0;
    for (t = 1; t <= budget; ++t) {
        if (kind == ChainKind::single_site || kind == ChainKind::column) {
            UpdateDraw d = (kind == ChainKind::single_site)
                               ? draw_single_site(rng, params.n)
                               : draw_column(rng, params.n);
            std::size_t i = static_cast<std::size_t>(d.pos - 1);
            int before = eta[i];
            if (kind == ChainKind::single_site)
                ss_apply(eta, d, params);
            else
                col_apply(eta, d, params);
            int after = eta[i];
            if (after != before) {
                --cnt[static_cast<std::size_t>(before)];
                ++cnt[static_cast<std::size_t>(after)];
                cur_max = std::max(cur_max, after);
                settle_max();
                sum += after - before;
            }
            tracker.bump(t, after - before);
        } else {
            int first = (kind == ChainKind::parallel_oe) ? 1 : 0;
            par_sweep_apply(eta, first, rng, params);
            par_sweep_apply(eta, 1 - first, rng, params);
            std::fill(cnt.begin(), cnt.end(), 0);
            long long prev_sum = sum;
            sum = 0;
            cur_max = 0;
            for (int h : eta) {
                ++cnt[static_cast<std::size_t>(h)];
                sum += h;
                cur_max = std::max(cur_max, h);
            }
            tracker.bump(t, static_cast<int>(sum - prev_sum));
        }
        record_stages(t);
        if (t % stride == 0) record_series(t);
        if (tracker.done() &&
            (out.stage_steps.empty() || out.stage_steps.back() >= 0))
            break;
    }
    record_series(std::min(t, budget));
    if (tracker.done())
        out.band_hit = {tracker.hit_step(), false};
    else
        out.band_hit = {budget, true};
    return out;
}

long long column_walk_mixing_steps(int a, int b, int ell, double beta,
                                   int replicas, std::uint64_t seed,
                                   double tv_target) {
    if (a > b) std::swap(a, b);
    if (a < 0 || ell < 0 || replicas < 1 || beta <= 0.0)
        throw std::invalid_argument("column_walk_mixing_steps: bad arguments");

    ModelParams one = ModelParams::unbounded(1, beta, a, b);
    ConditionalLaw law = conditional_law(a, b, one);

    std::vector<int> walker(static_cast<std::size_t>(replicas), b + ell);
    std::vector<Rng> streams;
    streams.reserve(static_cast<std::size_t>(replicas));
    for (int r = 0; r < replicas; ++r)
        streams.push_back(make_stream(seed, static_cast<std::uint64_t>(r)));

    int hist_top = b + ell + 8;
    std::vector<long long> hist;
    auto tv_now = [&]() {
        hist.assign(static_cast<std::size_t>(hist_top) + 1, 0);
        for (int h : walker) {
            if (h > hist_top) {
                hist_top = h;
                hist.resize(static_cast<std::size_t>(hist_top) + 1, 0);
            }
            ++hist[static_cast<std::size_t>(h)];
        }
        double tv = 0.0;
        double seen_mass = 0.0;
        for (int h = 0; h <= hist_top; ++h) {
            double p = law.prob(h);
            seen_mass += p;
            double emp = static_cast<double>(hist[static_cast<std::size_t>(h)]) /
                         static_cast<double>(replicas);
            tv += std::abs(emp - p);
        }
        tv += 1.0 - seen_mass; // exact mass above the histogram
        return 0.5 * tv;
    };

    long long t_cap = 400LL * (static_cast<long long>(ell + b - a + 2) *
                               (ell + b - a + 2)) + 1000;
    const double x = one.x;
    for (long long t = 1; t <= t_cap; ++t) {
        for (int r = 0; r < replicas; ++r) {
            Rng& rng = streams[static_cast<std::size_t>(r)];
            int h = walker[static_cast<std::size_t>(r)];
            bool up = rng.next_bit();
            double u = rng.next_unit();
            if (up) {
                double p = (h >= b) ? 0.25 * x : 0.25;
                if (u < 2.0 * p) walker[static_cast<std::size_t>(r)] = h + 1;
            } else {
                double p = (h <= a) ? 0.25 * x : 0.25;
                if (u < 2.0 * p) walker[static_cast<std::size_t>(r)] = std::max(h - 1, 0);
            }
        }
        if (tv_now() <= tv_target) return t;
    }
    return -1;
}

} // namespace sos
