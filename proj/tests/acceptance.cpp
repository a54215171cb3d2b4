// Acceptance gate: twelve fixed checks, one PASS/FAIL line each.
// Exit code is the number of failed checks.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <functional>
#include <map>
#include <string>
#include <vector>

#include "sos/coupling.hpp"
#include "sos/dynamics.hpp"
#include "sos/equilibrium.hpp"
#include "sos/exact.hpp"
#include "sos/experiments.hpp"
#include "sos/model.hpp"
#include "sos/wilson.hpp"

using namespace sos;

namespace {

const double kLn2 = 0.6931471805599453;
const std::vector<double> kBetas{0.3, 1.0, kLn2, 3.0};

struct Check {
    std::string name;
    std::function<bool(std::string&)> run;
};

bool rel_close(double a, double b, double tol) {
    return std::abs(a - b) <= tol * std::max({1.0, std::abs(a), std::abs(b)});
}

// 1. closed-form conditional mean vs direct summation
bool check_closed_form(std::string& detail) {
    double worst = 0.0;
    for (double beta : kBetas)
        for (int n = 1; n <= 30; ++n) {
            ModelParams p = ModelParams::standard(n, beta);
            for (int a = 0; a <= n; ++a)
                for (int b = a; a + b <= n; ++b) {
                    double direct = conditional_mean_direct(a, b, p);
                    double closed = conditional_mean_closed(a, b, p);
                    double rel = std::abs(direct - closed) /
                                 std::max(1.0, std::abs(direct));
                    worst = std::max(worst, rel);
                }
        }
    detail = "worst relative error " + std::to_string(worst);
    return worst <= 1e-12;
}

// 2. repulsion-term monotonicity and the mean sandwich, exhaustively
bool check_monotonicity(std::string& detail) {
    long long violations = 0;
    for (double beta : kBetas)
        for (int n = 1; n <= 20; ++n) {
            ModelParams p = ModelParams::standard(n, beta);
            // monotone mean in each neighbor, all barrier cases via reflection
            for (int a = 0; a <= n; ++a)
                for (int b = a; b <= n; ++b) {
                    double m = conditional_mean_closed(a, b, p);
                    if (b + 1 <= n && conditional_mean_closed(a, b + 1, p) < m - 1e-12)
                        ++violations;
                    if (a + 1 <= b && conditional_mean_closed(a + 1, b, p) < m - 1e-12)
                        ++violations;
                    if (a + b <= n && epsilon(a, b, p) < -1e-15) ++violations;
                }
            // sandwich on every admissible neighbor quadruple
            for (int cl = 0; cl <= n; ++cl)
                for (int au = cl; au <= n; ++au)
                    for (int dl = cl; dl <= n; ++dl)
                        for (int bu = std::max(au, dl); bu <= n; ++bu) {
                            auto [diff, bound] = mean_sandwich(au, bu, cl, dl, p);
                            if (diff < -1e-12 || diff > bound + 1e-12) ++violations;
                        }
        }
    detail = std::to_string(violations) + " violations";
    return violations == 0;
}

// 3. brute-force chain: stochasticity, reversibility, stationarity, chi-squared
bool check_exact_chain(std::string& detail) {
    double worst = 0.0;
    for (int n = 1; n <= 3; ++n)
        for (double beta : {0.3, kLn2, 3.0})
            for (ChainKind kind : {ChainKind::single_site, ChainKind::column,
                                   ChainKind::parallel_oe}) {
                ModelParams p = ModelParams::standard(n, beta);
                ExactChain chain = enumerate_chain(p);
                Eigen::MatrixXd P = transition_matrix(kind, chain);
                const auto N = P.rows();
                for (Eigen::Index s = 0; s < N; ++s)
                    worst = std::max(worst, std::abs(P.row(s).sum() - 1.0));
                for (Eigen::Index s = 0; s < N; ++s)
                    for (Eigen::Index t = 0; t < N; ++t)
                        worst = std::max(worst,
                                         std::abs(chain.stationary(s) * P(s, t) -
                                                  chain.stationary(t) * P(t, s)));
                Eigen::RowVectorXd mu = chain.stationary.transpose() * P;
                worst = std::max(
                    worst, (mu.transpose() - chain.stationary).cwiseAbs().maxCoeff());
            }
    if (worst > 1e-12) {
        detail = "matrix identity residual " + std::to_string(worst);
        return false;
    }

    // chi-squared of simulated visit frequencies, all kinds, n = 2
    ModelParams p = ModelParams::standard(2, kLn2);
    ExactChain chain = enumerate_chain(p);
    for (ChainKind kind : {ChainKind::single_site, ChainKind::column,
                           ChainKind::parallel_oe}) {
        const long long stride = 64;
        const int samples = 120000;
        Contour eta = bottom_contour(p);
        Rng rng(20240 + static_cast<int>(kind));
        std::map<int, long long> counts;
        for (int k = 0; k < samples; ++k) {
            for (long long t = 0; t < stride; ++t) {
                switch (kind) {
                case ChainKind::single_site:
                    ss_apply(eta, draw_single_site(rng, p.n), p);
                    break;
                case ChainKind::column:
                    col_apply(eta, draw_column(rng, p.n), p);
                    break;
                default:
                    par_sweep_apply(eta, 1, rng, p);
                    par_sweep_apply(eta, 0, rng, p);
                    break;
                }
            }
            ++counts[chain.index_of(eta)];
        }
        double chi2 = 0.0;
        int dof = -1;
        for (std::size_t s = 0; s < chain.states.size(); ++s) {
            double expct =
                samples * chain.stationary(static_cast<Eigen::Index>(s));
            double obs = counts.count(static_cast<int>(s))
                             ? static_cast<double>(counts[static_cast<int>(s)])
                             : 0.0;
            chi2 += (obs - expct) * (obs - expct) / expct;
            ++dof;
        }
        double threshold = dof + 4.0 * std::sqrt(2.0 * dof);
        if (chi2 >= threshold) {
            detail = "chi2 " + std::to_string(chi2) + " vs threshold " +
                     std::to_string(threshold) + " for kind " + to_string(kind);
            return false;
        }
    }
    detail = "residuals <= 1e-12, chi-squared within 4 sigma for all kinds";
    return true;
}

// 4. monotone grand coupling
bool check_coupling(std::string& detail) {
    try {
        ModelParams p16 = ModelParams::standard(16, 1.0);
        for (ChainKind kind : {ChainKind::single_site, ChainKind::column}) {
            CoupledPair pair = coupled_extremes(p16);
            Rng rng(515);
            for (int t = 0; t < 100000; ++t) {
                UpdateDraw d = (kind == ChainKind::single_site)
                                   ? draw_single_site(rng, p16.n)
                                   : draw_column(rng, p16.n);
                grand_apply(pair, d, kind, p16); // throws on violation
            }
        }
        // exhaustive draw regions at n = 2
        ModelParams p2 = ModelParams::standard(2, 0.9);
        for (int l1 = 0; l1 <= 2; ++l1)
            for (int l2 = 0; l2 <= 2; ++l2)
                for (int u1 = l1; u1 <= 2; ++u1)
                    for (int u2 = l2; u2 <= 2; ++u2) {
                        CoupledPair base{{l1, l2}, {u1, u2}};
                        for (int pos = 1; pos <= 2; ++pos) {
                            for (bool up : {false, true})
                                for (double u :
                                     {0.0, 0.5 * p2.x - 1e-9, 0.5 * p2.x + 1e-9,
                                      0.5 - 1e-9, 0.5 + 1e-9, 0.999999}) {
                                    UpdateDraw d{pos, up, u, 0.0};
                                    grand_step(base, d, ChainKind::single_site, p2);
                                }
                            for (int grid = 0; grid <= 4000; ++grid) {
                                UpdateDraw d{pos, false, 0.0, grid / 4001.0};
                                grand_step(base, d, ChainKind::column, p2);
                            }
                        }
                    }
    } catch (const std::logic_error& e) {
        detail = e.what();
        return false;
    }
    detail = "no order violation in 2 x 1e5 coupled steps + exhaustive n=2 regions";
    return true;
}

// 5. exact contraction of the weighted distance under one column update
bool check_drift(std::string& detail) {
    long long violations = 0;
    double worst_slack = 1.0;
    for (int n : {4, 8, 16, 32}) {
        ModelParams p = ModelParams::standard(n, 1.0);
        WilsonWeights ww = wilson_weights(n);
        Rng rng(606 + n);
        for (int k = 0; k < 10000; ++k) {
            CoupledPair pair;
            pair.lower.resize(static_cast<std::size_t>(n));
            pair.upper.resize(static_cast<std::size_t>(n));
            bool equal = true;
            for (int i = 0; i < n; ++i) {
                int lo = static_cast<int>(
                    rng.next_below(static_cast<std::uint64_t>(n) + 1));
                int hi = lo + static_cast<int>(rng.next_below(
                                  static_cast<std::uint64_t>(n - lo) + 1));
                pair.lower[static_cast<std::size_t>(i)] = lo;
                pair.upper[static_cast<std::size_t>(i)] = hi;
                if (hi != lo) equal = false;
            }
            if (equal) continue;
            double dist = wilson_distance(pair.lower, pair.upper, ww);
            double drift = exact_pair_drift(pair, ww, p);
            double bound = -ww.lambda / static_cast<double>(n) * dist;
            if (drift > bound + 1e-10) ++violations;
            worst_slack = std::min(worst_slack, bound - drift);
        }
    }
    detail = std::to_string(violations) + " violations, minimum slack " +
             std::to_string(worst_slack);
    return violations == 0;
}

// 6. transfer-matrix oracle vs enumeration, plus sampler chi-squared
bool check_transfer(std::string& detail) {
    double worst = 0.0;
    for (int n = 1; n <= 4; ++n)
        for (double beta : {0.3, kLn2, 2.0}) {
            ModelParams p = ModelParams::standard(n, beta);
            ExactChain chain = enumerate_chain(p);
            TransferTables tables = build_tables(p);
            worst = std::max(worst, std::abs(log_total_weight(tables) -
                                             std::log(chain.z_sum)));
            for (int h = 0; h <= n; ++h) {
                double direct = 0.0;
                for (std::size_t s = 0; s < chain.states.size(); ++s) {
                    bool all = true;
                    for (int v : chain.states[s])
                        if (v < h) all = false;
                    if (all)
                        direct += chain.stationary(static_cast<Eigen::Index>(s));
                }
                worst = std::max(worst,
                                 std::abs(event_prob_min_height(p, h) - direct));
            }
            for (int d = 1; d <= n + 1; ++d) {
                double direct = 0.0;
                for (std::size_t s = 0; s < chain.states.size(); ++s) {
                    bool big = false;
                    for (int i = 0; i <= n; ++i)
                        if (std::abs(height_at(chain.states[s], p, i) -
                                     height_at(chain.states[s], p, i + 1)) >= d)
                            big = true;
                    if (big)
                        direct += chain.stationary(static_cast<Eigen::Index>(s));
                }
                worst =
                    std::max(worst, std::abs(event_prob_gradient(p, d) - direct));
            }
            for (int pos = 1; pos <= n; ++pos)
                for (int h = 0; h <= n; ++h) {
                    double direct = 0.0;
                    for (std::size_t s = 0; s < chain.states.size(); ++s)
                        if (chain.states[s][static_cast<std::size_t>(pos - 1)] >= h)
                            direct +=
                                chain.stationary(static_cast<Eigen::Index>(s));
                    worst = std::max(
                        worst, std::abs(marginal_geq(tables, pos, h) - direct));
                }
        }
    if (worst > 1e-10) {
        detail = "worst oracle deviation " + std::to_string(worst);
        return false;
    }

    ModelParams p = ModelParams::standard(3, 1.0);
    ExactChain chain = enumerate_chain(p);
    TransferTables tables = build_tables(p);
    const int reps = 100000;
    std::map<int, long long> counts;
    Rng rng(321);
    for (int k = 0; k < reps; ++k)
        ++counts[chain.index_of(sample_exact(tables, rng))];
    double chi2 = 0.0;
    int dof = 0;
    for (std::size_t s = 0; s < chain.states.size(); ++s) {
        double expct = reps * chain.stationary(static_cast<Eigen::Index>(s));
        if (expct < 5.0) continue;
        double obs = counts.count(static_cast<int>(s))
                         ? static_cast<double>(counts[static_cast<int>(s)])
                         : 0.0;
        chi2 += (obs - expct) * (obs - expct) / expct;
        ++dof;
    }
    --dof;
    double threshold = dof + 4.0 * std::sqrt(2.0 * dof);
    detail = "oracle deviation <= 1e-10, sampler chi2 " + std::to_string(chi2) +
             " vs " + std::to_string(threshold);
    return chi2 < threshold;
}

// 7. single-column walk: linear in the squared interval width and in the offset
bool check_column_walk(std::string& detail) {
    std::vector<double> gap2, steps_gap;
    for (int g : {4, 8, 16, 32}) {
        long long s = column_walk_mixing_steps(0, g, 1, 1.0, 4096, 7001 + g);
        if (s < 0) {
            detail = "walk failed to mix at gap " + std::to_string(g);
            return false;
        }
        gap2.push_back(static_cast<double>(g) * g);
        steps_gap.push_back(static_cast<double>(s));
    }
    FitResult fit_gap = loglog_fit(gap2, steps_gap);

    std::vector<double> ells, steps_ell;
    for (int ell : {4, 8, 16, 32}) {
        long long s = column_walk_mixing_steps(0, 1, ell, 1.0, 4096, 8001 + ell);
        if (s < 0) {
            detail = "walk failed to mix at offset " + std::to_string(ell);
            return false;
        }
        ells.push_back(static_cast<double>(ell));
        steps_ell.push_back(static_cast<double>(s));
    }
    FitResult fit_ell = loglog_fit(ells, steps_ell);

    detail = "slope vs squared width " + std::to_string(fit_gap.slope) +
             ", slope vs offset " + std::to_string(fit_ell.slope);
    return fit_gap.slope >= 0.7 && fit_gap.slope <= 1.3 && fit_ell.slope >= 0.7 &&
           fit_ell.slope <= 1.3;
}

// 8 & 9. coalescence scaling exponents
bool check_sweep(ChainKind kind, double lo, double hi, std::uint64_t seed,
                 std::string& detail) {
    ScalingResult r = scaling_sweep(kind, {8, 16, 32, 64}, 32, seed, 1.0);
    detail = "slope " + std::to_string(r.fit.slope) + " +/- " +
             std::to_string(r.fit.stderr_slope);
    if (r.partial) {
        detail += " (timeout-dominated)";
        return false;
    }
    return r.fit.slope >= lo && r.fit.slope <= hi;
}

// 10. band-hitting relaxation exponents for bottom and conditioned starts
bool check_relaxation(std::string& detail) {
    const std::vector<int> sizes{64, 128, 256, 512};
    const int replicas = 32;
    auto slope_for = [&](StartKind start, std::uint64_t seed, double& out) {
        std::vector<double> xs, ys;
        for (int n : sizes) {
            ModelParams p = ModelParams::standard(n, 1.0);
            RelaxSpec spec;
            spec.start = start;
            spec.cond_h = static_cast<int>(std::ceil(std::sqrt(n)));
            spec.kind = ChainKind::column;
            spec.band = equilibrium_band(p);
            std::vector<double> times;
            for (int r = 0; r < replicas; ++r) {
                HittingResult hr = relaxation_experiment(
                    spec, p, mix_stream(seed, static_cast<std::uint64_t>(
                                                  n * 1000 + r)));
                if (hr.timed_out) return false;
                times.push_back(static_cast<double>(std::max<long long>(hr.steps, 1)));
            }
            std::sort(times.begin(), times.end());
            xs.push_back(static_cast<double>(n));
            ys.push_back(0.5 * (times[replicas / 2 - 1] + times[replicas / 2]));
        }
        out = loglog_fit(xs, ys).slope;
        return true;
    };
    double slope_bottom = 0.0, slope_cond = 0.0;
    if (!slope_for(StartKind::bottom, 9090, slope_bottom)) {
        detail = "bottom start timed out";
        return false;
    }
    if (!slope_for(StartKind::conditioned_min_height, 9191, slope_cond)) {
        detail = "conditioned start timed out";
        return false;
    }
    detail = "bottom slope " + std::to_string(slope_bottom) +
             ", conditioned slope " + std::to_string(slope_cond);
    return slope_bottom >= 2.5 && slope_bottom <= 3.7 && slope_cond >= 2.5 &&
           slope_cond <= 3.7;
}

// 11. equilibrium decay shapes
bool check_decay_shapes(std::string& detail) {
    ModelParams p32 = ModelParams::standard(32, 1.0);
    double prev = std::log(event_prob_gradient(p32, 5));
    double max_slope = -1e9;
    for (int d = 6; d <= 12; ++d) {
        double cur = std::log(event_prob_gradient(p32, d));
        max_slope = std::max(max_slope, cur - prev);
        prev = cur;
    }
    bool gradient_ok = max_slope <= -1.0 + 0.2;

    ModelParams p64 = ModelParams::standard(64, 1.0);
    TransferTables tables = build_tables(p64);
    const int ell = 16;
    std::vector<double> xs, ys;
    for (int h = 2; h <= ell / 2; ++h) { // h <= beta * ell / 2 with beta = 1
        xs.push_back(static_cast<double>(h) * h / ell);
        ys.push_back(std::log(marginal_geq(tables, ell, h)));
    }
    FitResult fit = linear_fit(xs, ys);
    bool exceed_ok = fit.slope < 0.0;
    for (std::size_t i = 1; i < ys.size(); ++i)
        if (ys[i] >= ys[i - 1]) exceed_ok = false;

    detail = "max gradient log-slope " + std::to_string(max_slope) +
             ", exceedance slope vs h^2/l " + std::to_string(fit.slope);
    return gradient_ok && exceed_ok;
}

// 12. variational gap bound, exact and Monte Carlo
bool check_gap_bound(std::string& detail) {
    for (int n : {2, 3})
        for (double beta : {0.3, 1.0})
            for (ChainKind kind : {ChainKind::single_site, ChainKind::column,
                                   ChainKind::parallel_oe}) {
                ModelParams p = ModelParams::standard(n, beta);
                ExactChain chain = enumerate_chain(p);
                double gap = spectral_gap_exact(transition_matrix(kind, chain),
                                                chain.stationary);
                double rq = gap_upper_bound_exact(kind, p);
                if (gap > rq + 1e-12) {
                    detail = "exact gap " + std::to_string(gap) +
                             " exceeds quotient " + std::to_string(rq);
                    return false;
                }
            }
    std::vector<double> xs, ys;
    for (int n : {8, 16, 32, 64, 128}) {
        ModelParams p = ModelParams::standard(n, 1.0);
        xs.push_back(static_cast<double>(n));
        ys.push_back(gap_upper_bound_mc(ChainKind::column, p, 4000, 7777));
    }
    FitResult fit = loglog_fit(xs, ys);
    detail = "exact bound holds at n <= 3; Monte Carlo quotient slope " +
             std::to_string(fit.slope);
    return fit.slope >= -3.5 && fit.slope <= -2.5;
}

} // namespace

int main() {
    std::vector<Check> checks = {
        {"closed-form conditional mean equals direct summation", check_closed_form},
        {"repulsion monotonicity and mean sandwich, exhaustive", check_monotonicity},
        {"brute-force chain identities and simulated frequencies", check_exact_chain},
        {"monotone grand coupling never violates the order", check_coupling},
        {"weighted-distance drift bound on random ordered pairs", check_drift},
        {"transfer-matrix oracle agreement and sampler frequencies", check_transfer},
        {"single-column walk scaling in width and offset", check_column_walk},
        {"column-dynamics coalescence exponent",
         [](std::string& d) { return check_sweep(ChainKind::column, 2.6, 3.6, 424242, d); }},
        {"single-site coalescence exponent",
         [](std::string& d) { return check_sweep(ChainKind::single_site, 2.7, 3.8, 434343, d); }},
        {"band-hitting relaxation exponents", check_relaxation},
        {"equilibrium decay shapes", check_decay_shapes},
        {"variational spectral-gap bound", check_gap_bound},
    };

    int failures = 0;
    for (std::size_t i = 0; i < checks.size(); ++i) {
        std::string detail;
        bool ok = false;
        try {
            ok = checks[i].run(detail);
        } catch (const std::exception& e) {
            detail = std::string("exception: ") + e.what();
        }
        std::printf("%s %2zu. %s: %s\n", ok ? "PASS" : "FAIL", i + 1,
                    checks[i].name.c_str(), detail.c_str());
        std::fflush(stdout);
        if (!ok) ++failures;
    }
    return failures;
}
