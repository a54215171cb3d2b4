#include "sos/equilibrium.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace sos {

namespace {

struct Lattice {
    int n = 0;
    int hmax = 0;
    int gradient_cap = 0; // 0 means none
    std::vector<int> lo, hi;        // allowed height range per position 1..n
    std::vector<double> bfac;       // exp(-beta d)
    int h_left = 0, h_right = 0;

    double bond(int a, int b) const {
        int d = std::abs(a - b);
        if (gradient_cap > 0 && d >= gradient_cap) return 0.0;
        return bfac[static_cast<std::size_t>(d)];
    }
};

int pick_hmax(const ModelParams& params, const Restriction& restriction) {
    if (params.is_bounded()) {
        int h = params.cap;
        if (restriction.max_height) h = std::min(h, *restriction.max_height);
        return h;
    }
    if (restriction.max_height) return *restriction.max_height;
    int base = std::max({params.n, params.boundary_left, params.boundary_right,
                         restriction.min_height});
    int margin = static_cast<int>(
        std::ceil(20.0 / params.beta * std::log(std::max(params.n, 2))));
    return base + std::max(margin, 8);
}

Lattice make_lattice(const ModelParams& params, const Restriction& restriction) {
    Lattice lat;
    lat.n = params.n;
    lat.hmax = pick_hmax(params, restriction);
    lat.gradient_cap = restriction.gradient_cap.value_or(0);
    lat.h_left = params.boundary_left;
    lat.h_right = params.boundary_right;
    if (lat.h_left > lat.hmax || lat.h_right > lat.hmax)
        throw std::invalid_argument("build_tables: boundary height above table range");

    lat.lo.resize(static_cast<std::size_t>(params.n));
    lat.hi.resize(static_cast<std::size_t>(params.n));
    for (int i = 1; i <= params.n; ++i) {
        int lo = restriction.min_height;
        int hi = params.is_pinned(i) ? 0 : lat.hmax;
        lat.lo[static_cast<std::size_t>(i - 1)] = lo;
        lat.hi[static_cast<std::size_t>(i - 1)] = hi;
        if (lo > hi)
            throw std::invalid_argument("build_tables: empty restricted space");
    }

    int dmax = lat.hmax + std::max(lat.h_left, lat.h_right);
    lat.bfac.resize(static_cast<std::size_t>(dmax) + 1);
    for (int d = 0; d <= dmax; ++d)
        lat.bfac[static_cast<std::size_t>(d)] = std::exp(-params.beta * d);
    return lat;
}

// One column of the recursion next[h] = sum_{h'} prev[h'] * bond(h', h)
// over allowed h; returns the column maximum for rescaling.
double forward_column(const Lattice& lat, int pos, const std::vector<double>& prev,
                      std::vector<double>& next, bool parallel) {
    const int lo = lat.lo[static_cast<std::size_t>(pos - 1)];
    const int hi = lat.hi[static_cast<std::size_t>(pos - 1)];
    const int plo = (pos == 1) ? lat.h_left : lat.lo[static_cast<std::size_t>(pos - 2)];
    const int phi = (pos == 1) ? lat.h_left : lat.hi[static_cast<std::size_t>(pos - 2)];
    std::fill(next.begin(), next.end(), 0.0);
#ifdef _OPENMP
#pragma omp parallel for schedule(static) if (parallel && hi - lo > 63)
#endif
    for (int h = lo; h <= hi; ++h) {
        double acc = 0.0;
        for (int hp = plo; hp <= phi; ++hp)
            acc += prev[static_cast<std::size_t>(hp)] * lat.bond(hp, h);
        next[static_cast<std::size_t>(h)] = acc;
    }
    (void)parallel;
    double m = 0.0;
    for (int h = lo; h <= hi; ++h) m = std::max(m, next[static_cast<std::size_t>(h)]);
    return m;
}

double backward_column(const Lattice& lat, int pos, const std::vector<double>& prev,
                       std::vector<double>& next, bool parallel) {
    const int lo = lat.lo[static_cast<std::size_t>(pos - 1)];
    const int hi = lat.hi[static_cast<std::size_t>(pos - 1)];
    const int plo = (pos == lat.n) ? lat.h_right : lat.lo[static_cast<std::size_t>(pos)];
    const int phi = (pos == lat.n) ? lat.h_right : lat.hi[static_cast<std::size_t>(pos)];
    std::fill(next.begin(), next.end(), 0.0);
#ifdef _OPENMP
#pragma omp parallel for schedule(static) if (parallel && hi - lo > 63)
#endif
    for (int h = lo; h <= hi; ++h) {
        double acc = 0.0;
        for (int hp = plo; hp <= phi; ++hp)
            acc += prev[static_cast<std::size_t>(hp)] * lat.bond(h, hp);
        next[static_cast<std::size_t>(h)] = acc;
    }
    (void)parallel;
    double m = 0.0;
    for (int h = lo; h <= hi; ++h) m = std::max(m, next[static_cast<std::size_t>(h)]);
    return m;
}

TransferTables build_impl(const ModelParams& params, const Restriction& restriction,
                          bool parallel) {
    Lattice lat = make_lattice(params, restriction);
    TransferTables tables(params);
    tables.restriction = restriction;
    tables.hmax = lat.hmax;

    const std::size_t width = static_cast<std::size_t>(lat.hmax) + 1;
    tables.fwd.assign(static_cast<std::size_t>(lat.n), std::vector<double>(width, 0.0));
    tables.bwd.assign(static_cast<std::size_t>(lat.n), std::vector<double>(width, 0.0));

    // Forward: fwd[i-1][h] carries bonds 1..i, with eta(i) = h.
    std::vector<double> seed_left(width, 0.0);
    seed_left[static_cast<std::size_t>(lat.h_left)] = 1.0;
    double fwd_log = 0.0;
    {
        // pos = 1 uses the boundary column directly
        std::vector<double>* prev = &seed_left;
        for (int i = 1; i <= lat.n; ++i) {
            double m = forward_column(lat, i, *prev, tables.fwd[static_cast<std::size_t>(i - 1)],
                                      parallel);
            if (m <= 0.0)
                throw std::invalid_argument("build_tables: empty restricted space");
            for (double& v : tables.fwd[static_cast<std::size_t>(i - 1)]) v /= m;
            fwd_log += std::log(m);
            prev = &tables.fwd[static_cast<std::size_t>(i - 1)];
        }
    }

    // Backward: bwd[i-1][h] carries bonds i+1..n+1, with eta(i) = h.
    std::vector<double> seed_right(width, 0.0);
    seed_right[static_cast<std::size_t>(lat.h_right)] = 1.0;
    double bwd_log = 0.0;
    {
        std::vector<double>* prev = &seed_right;
        for (int i = lat.n; i >= 1; --i) {
            double m = backward_column(lat, i, *prev, tables.bwd[static_cast<std::size_t>(i - 1)],
                                       parallel);
            if (m <= 0.0)
                throw std::invalid_argument("build_tables: empty restricted space");
            for (double& v : tables.bwd[static_cast<std::size_t>(i - 1)]) v /= m;
            bwd_log += std::log(m);
            prev = &tables.bwd[static_cast<std::size_t>(i - 1)];
        }
    }

    // Z from the last forward column closed with the right boundary bond.
    double tail = 0.0;
    for (int h = lat.lo[static_cast<std::size_t>(lat.n - 1)];
         h <= lat.hi[static_cast<std::size_t>(lat.n - 1)]; ++h)
        tail += tables.fwd[static_cast<std::size_t>(lat.n - 1)][static_cast<std::size_t>(h)] *
                lat.bond(h, lat.h_right);
    if (tail <= 0.0)
        throw std::invalid_argument("build_tables: empty restricted space");
    tables.log_z = fwd_log + std::log(tail);

    if (params.is_bounded() || restriction.max_height) {
        tables.truncation_tail_log_bound = -std::numeric_limits<double>::infinity();
    } else {
        // mass above hmax <= n * x^(hmax - base) / (1 - x), relative to a
        // configuration touching the reference level
        int base = std::max({params.n, params.boundary_left, params.boundary_right,
                             restriction.min_height});
        tables.truncation_tail_log_bound =
            std::log(static_cast<double>(params.n)) - std::log1p(-params.x) -
            2.0 * params.beta * static_cast<double>(lat.hmax - base);
    }
    (void)bwd_log;
    return tables;
}

} // namespace

TransferTables build_tables(const ModelParams& params, const Restriction& restriction) {
    return build_impl(params, restriction, true);
}

TransferTables build_tables_serial(const ModelParams& params,
                                   const Restriction& restriction) {
    return build_impl(params, restriction, false);
}

double log_total_weight(const TransferTables& tables) { return tables.log_z; }

double event_prob_min_height(const ModelParams& params, int h) {
    if (h <= 0) return 1.0;
    Restriction full;
    Restriction floor;
    floor.min_height = h;
    TransferTables whole = build_tables(params, full);
    TransferTables restricted = [&]() {
        try {
            return build_tables(params, floor);
        } catch (const std::invalid_argument&) {
            TransferTables empty(params);
            empty.log_z = -std::numeric_limits<double>::infinity();
            return empty;
        }
    }();
    if (!std::isfinite(restricted.log_z)) return 0.0;
    return std::exp(restricted.log_z - whole.log_z);
}

double event_prob_gradient(const ModelParams& params, int d) {
    if (d <= 0) return 1.0;
    Restriction capped;
    capped.gradient_cap = d;
    TransferTables whole = build_tables(params, {});
    double log_ratio;
    try {
        log_ratio = build_tables(params, capped).log_z - whole.log_z;
    } catch (const std::invalid_argument&) {
        return 1.0;
    }
    double p = -std::expm1(log_ratio);
    return p == 0.0 ? 0.0 : p;
}

double event_prob_exceed(const ModelParams& params, int level) {
    if (level < 0) return 1.0;
    Restriction ceiling;
    ceiling.max_height = level;
    TransferTables whole = build_tables(params, {});
    double log_ratio;
    try {
        log_ratio = build_tables(params, ceiling).log_z - whole.log_z;
    } catch (const std::invalid_argument&) {
        return 1.0;
    }
    double p = -std::expm1(log_ratio);
    return p == 0.0 ? 0.0 : p;
}

double marginal_geq(const TransferTables& tables, int pos, int h) {
    if (pos < 1 || pos > tables.params.n)
        throw std::invalid_argument("marginal_geq: position out of range");
    if (h <= 0) return 1.0;
    const auto& f = tables.fwd[static_cast<std::size_t>(pos - 1)];
    const auto& b = tables.bwd[static_cast<std::size_t>(pos - 1)];
    double total = 0.0, above = 0.0;
    for (int k = 0; k <= tables.hmax; ++k) {
        double w = f[static_cast<std::size_t>(k)] * b[static_cast<std::size_t>(k)];
        total += w;
        if (k >= h) above += w;
    }
    if (total <= 0.0) throw std::logic_error("marginal_geq: zero column weight");
    return above / total;
}

Contour sample_exact(const TransferTables& tables, Rng& rng) {
    const ModelParams& params = tables.params;
    Contour eta(static_cast<std::size_t>(params.n), 0);
    double beta = params.beta;
    int prev = params.boundary_left;
    std::vector<double> weight(static_cast<std::size_t>(tables.hmax) + 1);
    int gcap = tables.restriction.gradient_cap.value_or(0);
    for (int i = 1; i <= params.n; ++i) {
        const auto& bw = tables.bwd[static_cast<std::size_t>(i - 1)];
        double total = 0.0;
        for (int h = 0; h <= tables.hmax; ++h) {
            double v = bw[static_cast<std::size_t>(h)];
            if (v > 0.0) {
                int d = std::abs(h - prev);
                v = (gcap > 0 && d >= gcap) ? 0.0 : v * std::exp(-beta * d);
            }
            weight[static_cast<std::size_t>(h)] = v;
            total += v;
        }
        if (total <= 0.0) throw std::logic_error("sample_exact: stranded prefix");
        double target = rng.next_unit() * total;
        double acc = 0.0;
        int chosen = tables.hmax;
        for (int h = 0; h <= tables.hmax; ++h) {
            acc += weight[static_cast<std::size_t>(h)];
            if (acc >= target) {
                chosen = h;
                break;
            }
        }
        eta[static_cast<std::size_t>(i - 1)] = chosen;
        prev = chosen;
    }
    return eta;
}

Contour sample_exact(const ModelParams& params, const Restriction& restriction,
                     std::uint64_t seed) {
    TransferTables tables = build_tables(params, restriction);
    Rng rng(seed);
    return sample_exact(tables, rng);
}

SumMoments height_sum_moments(const TransferTables& tables) {
    const ModelParams& params = tables.params;
    Lattice lat = make_lattice(params, tables.restriction);
    const std::size_t width = static_cast<std::size_t>(lat.hmax) + 1;

    // Augmented forward pass: z carries weight, a carries weight * sum,
    // q carries weight * sum^2, all rescaled by the same per-column factor.
    std::vector<double> z(width, 0.0), a(width, 0.0), q(width, 0.0);
    std::vector<double> nz(width), na(width), nq(width);
    z[static_cast<std::size_t>(lat.h_left)] = 1.0;

    for (int i = 1; i <= lat.n; ++i) {
        std::fill(nz.begin(), nz.end(), 0.0);
        std::fill(na.begin(), na.end(), 0.0);
        std::fill(nq.begin(), nq.end(), 0.0);
        const int lo = lat.lo[static_cast<std::size_t>(i - 1)];
        const int hi = lat.hi[static_cast<std::size_t>(i - 1)];
        const int plo = (i == 1) ? lat.h_left : lat.lo[static_cast<std::size_t>(i - 2)];
        const int phi = (i == 1) ? lat.h_left : lat.hi[static_cast<std::size_t>(i - 2)];
        double m = 0.0;
        for (int h = lo; h <= hi; ++h) {
            double sz = 0.0, sa = 0.0, sq = 0.0;
            for (int hp = plo; hp <= phi; ++hp) {
                double b = lat.bond(hp, h);
                if (b == 0.0) continue;
                std::size_t j = static_cast<std::size_t>(hp);
                sz += b * z[j];
                sa += b * (a[j] + static_cast<double>(h) * z[j]);
                sq += b * (q[j] + 2.0 * h * a[j] +
                           static_cast<double>(h) * h * z[j]);
            }
            std::size_t k = static_cast<std::size_t>(h);
            nz[k] = sz;
            na[k] = sa;
            nq[k] = sq;
            m = std::max(m, sz);
        }
        if (m <= 0.0)
            throw std::invalid_argument("height_sum_moments: empty restricted space");
        for (std::size_t k = 0; k < width; ++k) {
            nz[k] /= m;
            na[k] /= m;
            nq[k] /= m;
        }
        z.swap(nz);
        a.swap(na);
        q.swap(nq);
    }

    double zt = 0.0, at = 0.0, qt = 0.0;
    for (int h = lat.lo[static_cast<std::size_t>(lat.n - 1)];
         h <= lat.hi[static_cast<std::size_t>(lat.n - 1)]; ++h) {
        double b = lat.bond(h, lat.h_right);
        std::size_t k = static_cast<std::size_t>(h);
        zt += b * z[k];
        at += b * a[k];
        qt += b * q[k];
    }
    if (zt <= 0.0)
        throw std::invalid_argument("height_sum_moments: empty restricted space");
    SumMoments mm;
    mm.mean = at / zt;
    mm.variance = qt / zt - mm.mean * mm.mean;
    if (mm.variance < 0.0) mm.variance = 0.0;
    return mm;
}

} // namespace sos
