// Command-line front end: experiment dispatch and CSV emission.
// Exit codes: 0 success, 2 configuration error, 3 timeout-dominated result.

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "sos/coupling.hpp"
#include "sos/csv.hpp"
#include "sos/dynamics.hpp"
#include "sos/equilibrium.hpp"
#include "sos/exact.hpp"
#include "sos/experiments.hpp"
#include "sos/model.hpp"
#include "sos/wilson.hpp"

namespace {

using namespace sos;

constexpr const char* kOutputDirEnv = "SOS_OUTPUT_DIR";

struct Output {
    std::ofstream file;
    std::ostream* stream = nullptr;

    explicit Output(const std::string& path, const std::string& command) {
        std::string target = path;
        if (target.empty()) {
            const char* dir = std::getenv(kOutputDirEnv);
            target = dir ? std::string(dir) + "/" + command + ".csv" : "-";
        }
        if (target == "-") {
            stream = &std::cout;
        } else {
            file.open(target);
            if (!file) throw CLI::ValidationError("--output", "cannot open " + target);
            stream = &file;
        }
    }
};

std::string fmt(double v) { return format_double(v); }
std::string fmt(long long v) { return std::to_string(v); }
std::string fmt(int v) { return std::to_string(v); }

struct Config {
    std::vector<std::pair<std::string, std::string>> kv;
    void add(const std::string& k, const std::string& v) { kv.emplace_back(k, v); }
    void add(const std::string& k, double v) { add(k, fmt(v)); }
    void add(const std::string& k, long long v) { add(k, fmt(v)); }
    void add(const std::string& k, int v) { add(k, fmt(v)); }
    void add(const std::string& k, std::uint64_t v) { add(k, std::to_string(v)); }

    std::string line(const std::string& command) const {
        std::ostringstream os;
        os << "config: command=" << command;
        for (const auto& [k, v] : kv) os << " " << k << "=" << v;
        return os.str();
    }
};

ModelParams make_params(int n, double beta, int cap, bool unbounded) {
    if (unbounded) return ModelParams::unbounded(n, beta);
    if (cap > 0) return ModelParams::bounded(n, beta, cap);
    return ModelParams::standard(n, beta);
}

int run_simulate(const std::string& out_path, int n, double beta, int cap,
                 bool unbounded, const std::string& kind_name,
                 const std::string& start_name, long long steps, long long stride,
                 std::uint64_t seed, const std::vector<std::string>& stat_names) {
    ModelParams params = make_params(n, beta, cap, unbounded);
    ChainKind kind = chain_kind_from_string(kind_name);
    Contour start = (start_name == "top") ? top_contour(params)
                                          : bottom_contour(params);
    RunOptions opts;
    opts.stride = stride;
    opts.statistics.clear();
    for (const std::string& s : stat_names)
        opts.statistics.push_back(statistic_from_string(s));
    if (opts.statistics.empty()) opts.statistics = {Statistic::mean_height};

    TrajectorySummary summary = run_chain(kind, start, steps, seed, params, opts);

    Output out(out_path, "simulate");
    CsvWriter csv(*out.stream);
    Config cfg;
    cfg.add("n", n);
    cfg.add("beta", beta);
    cfg.add("cap", unbounded ? std::string("none") : fmt(params.cap));
    cfg.add("kind", kind_name);
    cfg.add("start", start_name);
    cfg.add("steps", steps);
    cfg.add("stride", stride);
    cfg.add("seed", seed);
    csv.comment(cfg.line("simulate"));
    csv.row({"step", "statistic", "value"});
    for (const TrajectorySample& s : summary.series)
        csv.row({fmt(s.step), to_string(s.stat), fmt(s.value)});
    return 0;
}

int run_coalesce(const std::string& out_path, int n, double beta,
                 const std::string& kind_name, std::uint64_t seed, int replicas,
                 long long t_max) {
    ModelParams params = ModelParams::standard(n, beta);
    ChainKind kind = chain_kind_from_string(kind_name);
    std::vector<CoalescenceResult> results(static_cast<std::size_t>(replicas));
#ifdef _OPENMP
#pragma omp parallel for schedule(dynamic)
#endif
    for (int r = 0; r < replicas; ++r)
        results[static_cast<std::size_t>(r)] = coalescence_time(
            kind, params, mix_stream(seed, static_cast<std::uint64_t>(r)), t_max);

    Output out(out_path, "coalesce");
    CsvWriter csv(*out.stream);
    Config cfg;
    cfg.add("kind", kind_name);
    cfg.add("n", n);
    cfg.add("beta", beta);
    cfg.add("seed", seed);
    cfg.add("replicas", replicas);
    cfg.add("t_max", t_max);
    csv.comment(cfg.line("coalesce"));
    csv.row({"kind", "n", "beta", "seed", "steps", "timed_out"});
    int timeouts = 0;
    for (int r = 0; r < replicas; ++r) {
        const CoalescenceResult& cr = results[static_cast<std::size_t>(r)];
        csv.row({kind_name, fmt(n), fmt(beta),
                 std::to_string(mix_stream(seed, static_cast<std::uint64_t>(r))),
                 fmt(cr.steps), cr.timed_out ? "1" : "0"});
        if (cr.timed_out) ++timeouts;
    }
    return 2 * timeouts > replicas ? 3 : 0;
}

int run_sweep(const std::string& out_path, const std::vector<int>& n_list,
              double beta, const std::string& kind_name, std::uint64_t seed,
              int replicas, long long t_max) {
    ChainKind kind = chain_kind_from_string(kind_name);
    ScalingResult res = scaling_sweep(kind, n_list, replicas, seed, beta, t_max);

    Output out(out_path, "sweep");
    CsvWriter csv(*out.stream);
    Config cfg;
    cfg.add("kind", kind_name);
    std::ostringstream ns;
    for (std::size_t i = 0; i < n_list.size(); ++i)
        ns << (i ? "," : "") << n_list[i];
    cfg.add("n", ns.str());
    cfg.add("beta", beta);
    cfg.add("seed", seed);
    cfg.add("replicas", replicas);
    cfg.add("t_max", t_max);
    csv.comment(cfg.line("sweep"));
    csv.row({"n", "median", "q25", "q75", "replicas", "timeouts", "slope",
             "slope_stderr"});
    for (const ScalingPoint& pt : res.points)
        csv.row({fmt(pt.n), fmt(pt.median), fmt(pt.q25), fmt(pt.q75),
                 fmt(pt.replicas), fmt(pt.timeouts), fmt(res.fit.slope),
                 fmt(res.fit.stderr_slope)});
    return res.partial ? 3 : 0;
}

int run_drift_check(const std::string& out_path, const std::vector<int>& n_list,
                    double beta, int pairs, std::uint64_t seed) {
    Output out(out_path, "drift-check");
    CsvWriter csv(*out.stream);
    Config cfg;
    std::ostringstream ns;
    for (std::size_t i = 0; i < n_list.size(); ++i)
        ns << (i ? "," : "") << n_list[i];
    cfg.add("n", ns.str());
    cfg.add("beta", beta);
    cfg.add("pairs", pairs);
    cfg.add("seed", seed);
    csv.comment(cfg.line("drift-check"));
    csv.row({"n", "pair", "distance", "drift", "bound", "violation"});

    for (int n : n_list) {
        ModelParams params = ModelParams::standard(n, beta);
        WilsonWeights ww = wilson_weights(n);
        Rng rng = make_stream(seed, static_cast<std::uint64_t>(n));
        for (int k = 0; k < pairs; ++k) {
            CoupledPair pair;
            pair.lower.resize(static_cast<std::size_t>(n));
            pair.upper.resize(static_cast<std::size_t>(n));
            for (int i = 0; i < n; ++i) {
                int lo = static_cast<int>(
                    rng.next_below(static_cast<std::uint64_t>(params.cap) + 1));
                int hi = lo + static_cast<int>(rng.next_below(
                                  static_cast<std::uint64_t>(params.cap - lo) + 1));
                pair.lower[static_cast<std::size_t>(i)] = lo;
                pair.upper[static_cast<std::size_t>(i)] = hi;
            }
            double dist = wilson_distance(pair.lower, pair.upper, ww);
            double drift = exact_pair_drift(pair, ww, params);
            double bound = -ww.lambda / static_cast<double>(n) * dist;
            bool violation = drift > bound + 1e-10;
            csv.row({fmt(n), fmt(k), fmt(dist), fmt(drift), fmt(bound),
                     violation ? "1" : "0"});
        }
    }
    return 0;
}

int run_exact(const std::string& out_path, int n, double beta, int cap,
              const std::string& kind_name, long long horizon) {
    ModelParams params = make_params(n, beta, cap, false);
    ChainKind kind = chain_kind_from_string(kind_name);
    ExactChain chain = enumerate_chain(params);
    Eigen::MatrixXd P = transition_matrix(kind, chain);
    Eigen::VectorXd start =
        Eigen::VectorXd::Zero(static_cast<Eigen::Index>(chain.states.size()));
    start(chain.index_of(top_contour(params))) = 1.0;
    std::vector<double> curve = tv_curve(chain, P, start, static_cast<int>(horizon));
    double gap = spectral_gap_exact(P, chain.stationary);

    Output out(out_path, "exact");
    CsvWriter csv(*out.stream);
    Config cfg;
    cfg.add("n", n);
    cfg.add("beta", beta);
    cfg.add("cap", params.cap);
    cfg.add("kind", kind_name);
    cfg.add("horizon", horizon);
    csv.comment(cfg.line("exact"));
    csv.comment("spectral_gap=" + fmt(gap));
    csv.row({"record", "index", "value"});
    for (std::size_t s = 0; s < chain.states.size(); ++s)
        csv.row({"stationary", fmt(static_cast<long long>(s)),
                 fmt(chain.stationary(static_cast<Eigen::Index>(s)))});
    for (std::size_t t = 0; t < curve.size(); ++t)
        csv.row({"tv", fmt(static_cast<long long>(t)), fmt(curve[t])});
    return 0;
}

int run_equilibrium(const std::string& out_path, int n, double beta, int cap,
                    bool unbounded, const std::string& event, int from, int to) {
    ModelParams params = make_params(n, beta, cap, unbounded);
    Output out(out_path, "equilibrium");
    CsvWriter csv(*out.stream);
    Config cfg;
    cfg.add("n", n);
    cfg.add("beta", beta);
    cfg.add("cap", unbounded ? std::string("none") : fmt(params.cap));
    cfg.add("event", event);
    cfg.add("from", from);
    cfg.add("to", to);
    csv.comment(cfg.line("equilibrium"));
    csv.row({"event", "parameter", "probability", "log_probability"});
    for (int p = from; p <= to; ++p) {
        double prob;
        if (event == "min-height") prob = event_prob_min_height(params, p);
        else if (event == "gradient") prob = event_prob_gradient(params, p);
        else if (event == "exceed") prob = event_prob_exceed(params, p);
        else throw CLI::ValidationError("--event", "unknown event " + event);
        csv.row({event, fmt(p), fmt(prob), fmt(std::log(prob))});
    }
    return 0;
}

int run_relax(const std::string& out_path, int n, double beta,
              const std::string& kind_name, const std::string& start_name,
              int cond_h, int pin_spacing, std::uint64_t seed, int replicas,
              long long dwell, long long budget) {
    ModelParams params = ModelParams::standard(n, beta);
    RelaxSpec spec;
    spec.start = start_kind_from_string(start_name);
    spec.cond_h = cond_h;
    spec.pin_spacing = pin_spacing;
    spec.kind = chain_kind_from_string(kind_name);
    spec.band = equilibrium_band(params);
    spec.dwell = dwell;
    spec.budget = budget;

    std::vector<HittingResult> results(static_cast<std::size_t>(replicas));
#ifdef _OPENMP
#pragma omp parallel for schedule(dynamic)
#endif
    for (int r = 0; r < replicas; ++r)
        results[static_cast<std::size_t>(r)] = relaxation_experiment(
            spec, params, mix_stream(seed, static_cast<std::uint64_t>(r)));

    Output out(out_path, "relax");
    CsvWriter csv(*out.stream);
    Config cfg;
    cfg.add("n", n);
    cfg.add("beta", beta);
    cfg.add("kind", kind_name);
    cfg.add("start", start_name);
    cfg.add("cond_h", cond_h);
    cfg.add("pin_spacing", pin_spacing);
    cfg.add("seed", seed);
    cfg.add("replicas", replicas);
    cfg.add("dwell", dwell);
    cfg.add("budget", budget);
    csv.comment(cfg.line("relax"));
    csv.comment("band_lo=" + fmt(spec.band.lo) + " band_hi=" + fmt(spec.band.hi));
    csv.row({"start", "kind", "n", "beta", "replica", "steps", "timed_out"});
    int timeouts = 0;
    for (int r = 0; r < replicas; ++r) {
        const HittingResult& hr = results[static_cast<std::size_t>(r)];
        csv.row({start_name, kind_name, fmt(n), fmt(beta), fmt(r), fmt(hr.steps),
                 hr.timed_out ? "1" : "0"});
        if (hr.timed_out) ++timeouts;
    }
    return 2 * timeouts > replicas ? 3 : 0;
}

int run_descent(const std::string& out_path, int n, double beta,
                const std::string& kind_name, std::uint64_t seed, long long budget,
                long long stride) {
    ModelParams params = ModelParams::standard(n, beta);
    ChainKind kind = chain_kind_from_string(kind_name);
    DescentProfile profile = descent_profile(params, kind, seed, budget, stride);

    Output out(out_path, "descent");
    CsvWriter csv(*out.stream);
    Config cfg;
    cfg.add("n", n);
    cfg.add("beta", beta);
    cfg.add("kind", kind_name);
    cfg.add("seed", seed);
    cfg.add("budget", budget);
    cfg.add("stride", stride);
    csv.comment(cfg.line("descent"));
    csv.row({"record", "index", "value"});
    for (std::size_t k = 0; k < profile.stage_steps.size(); ++k)
        csv.row({"stage", fmt(static_cast<long long>(k + 1)),
                 fmt(profile.stage_steps[k])});
    for (const auto& [step, v] : profile.max_height_series)
        csv.row({"max_height", fmt(step), fmt(v)});
    for (const auto& [step, v] : profile.mean_height_series)
        csv.row({"mean_height", fmt(step), fmt(v)});
    csv.row({"band_hit", fmt(profile.band_hit.steps),
             profile.band_hit.timed_out ? "1" : "0"});
    return profile.band_hit.timed_out ? 3 : 0;
}

int run_column_walk(const std::string& out_path, int a,
                    const std::vector<int>& gaps, const std::vector<int>& ells,
                    double beta, int replicas, std::uint64_t seed,
                    double tv_target) {
    Output out(out_path, "column-walk");
    CsvWriter csv(*out.stream);
    Config cfg;
    cfg.add("a", a);
    std::ostringstream gs, ls;
    for (std::size_t i = 0; i < gaps.size(); ++i) gs << (i ? "," : "") << gaps[i];
    for (std::size_t i = 0; i < ells.size(); ++i) ls << (i ? "," : "") << ells[i];
    cfg.add("gap", gs.str());
    cfg.add("ell", ls.str());
    cfg.add("beta", beta);
    cfg.add("replicas", replicas);
    cfg.add("seed", seed);
    cfg.add("tv_target", tv_target);
    csv.comment(cfg.line("column-walk"));
    csv.row({"a", "b", "ell", "steps"});
    bool any_timeout = false;
    std::uint64_t stream = 0;
    for (int g : gaps)
        for (int ell : ells) {
            long long steps = column_walk_mixing_steps(
                a, a + g, ell, beta, replicas, mix_stream(seed, stream++), tv_target);
            if (steps < 0) any_timeout = true;
            csv.row({fmt(a), fmt(a + g), fmt(ell), fmt(steps)});
        }
    return any_timeout ? 3 : 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Interface-model simulation laboratory"};
    app.require_subcommand(1);

    int threads = 0;
    app.add_option("--threads", threads, "cap the worker pool (0 = default)");

    std::string out_path;
    int n = 8;
    std::vector<int> n_list{8, 16, 32};
    double beta = 1.0;
    int cap = 0;
    bool unbounded = false;
    std::uint64_t seed = 1;
    std::string kind = "column";
    std::string start = "bottom";
    std::string event = "min-height";
    std::vector<std::string> stats;
    long long steps = 1000, stride = 0, t_max = 0, budget = 0, dwell = 0;
    int replicas = 4, pairs = 100, from = 0, to = 8;
    int cond_h = 0, pin_spacing = 0;
    long long horizon = 64;
    int cw_a = 0;
    std::vector<int> cw_gaps{1, 2, 4, 8};
    std::vector<int> cw_ells{2, 4, 8, 16};
    double tv_target = 0.25;

    auto add_common = [&](CLI::App* cmd) {
        cmd->add_option("--output", out_path,
                        "output file; '-' for stdout (default: $" +
                            std::string(kOutputDirEnv) + " or stdout)");
        cmd->add_option("--beta", beta, "inverse temperature")->check(CLI::PositiveNumber);
        cmd->add_option("--seed", seed, "64-bit master seed");
    };

    CLI::App* c_sim = app.add_subcommand("simulate", "run one trajectory");
    add_common(c_sim);
    c_sim->add_option("--n", n)->check(CLI::PositiveNumber);
    c_sim->add_option("--cap", cap, "height cap (default n)");
    c_sim->add_flag("--unbounded", unbounded, "no height cap");
    c_sim->add_option("--kind", kind, "single-site|column|parallel-oe|parallel-eo");
    c_sim->add_option("--start", start, "top|bottom");
    c_sim->add_option("--steps", steps)->check(CLI::NonNegativeNumber);
    c_sim->add_option("--stride", stride, "sample stride (0 = n^2)");
    c_sim->add_option("--statistic", stats,
                      "mean-height|max-height|max-gradient|wilson-distance");

    CLI::App* c_coal = app.add_subcommand("coalesce", "coupled coalescence times");
    add_common(c_coal);
    c_coal->add_option("--n", n)->check(CLI::PositiveNumber);
    c_coal->add_option("--kind", kind);
    c_coal->add_option("--replicas", replicas)->check(CLI::PositiveNumber);
    c_coal->add_option("--t-max", t_max, "step budget (0 = default)");

    CLI::App* c_sweep = app.add_subcommand("sweep", "coalescence scaling sweep");
    add_common(c_sweep);
    c_sweep->add_option("--n", n_list, "comma-separated sizes")->delimiter(',');
    c_sweep->add_option("--kind", kind);
    c_sweep->add_option("--replicas", replicas);
    c_sweep->add_option("--t-max", t_max);

    CLI::App* c_drift = app.add_subcommand("drift-check", "distance-drift bound check");
    add_common(c_drift);
    c_drift->add_option("--n", n_list, "comma-separated sizes")->delimiter(',');
    c_drift->add_option("--pairs", pairs)->check(CLI::PositiveNumber);

    CLI::App* c_exact = app.add_subcommand("exact", "brute-force chain report");
    add_common(c_exact);
    c_exact->add_option("--n", n)->check(CLI::Range(1, 12));
    c_exact->add_option("--cap", cap);
    c_exact->add_option("--kind", kind);
    c_exact->add_option("--horizon", horizon, "TV curve length");

    CLI::App* c_eq = app.add_subcommand("equilibrium", "exact event probabilities");
    add_common(c_eq);
    c_eq->add_option("--n", n)->check(CLI::PositiveNumber);
    c_eq->add_option("--cap", cap);
    c_eq->add_flag("--unbounded", unbounded);
    c_eq->add_option("--event", event, "min-height|gradient|exceed");
    c_eq->add_option("--from", from);
    c_eq->add_option("--to", to);

    CLI::App* c_relax = app.add_subcommand("relax", "band-hitting relaxation times");
    add_common(c_relax);
    c_relax->add_option("--n", n)->check(CLI::PositiveNumber);
    c_relax->add_option("--kind", kind);
    c_relax->add_option("--start", start,
                        "top|bottom|conditioned-min-height|pinned-equilibrium");
    c_relax->add_option("--cond-h", cond_h);
    c_relax->add_option("--pin-spacing", pin_spacing);
    c_relax->add_option("--replicas", replicas);
    c_relax->add_option("--dwell", dwell, "in-band dwell window (0 = n^2)");
    c_relax->add_option("--budget", budget, "step budget (0 = default)");

    CLI::App* c_desc = app.add_subcommand("descent", "top-start descent profile");
    add_common(c_desc);
    c_desc->add_option("--n", n)->check(CLI::PositiveNumber);
    c_desc->add_option("--kind", kind);
    c_desc->add_option("--budget", budget);
    c_desc->add_option("--stride", stride);

    CLI::App* c_cw = app.add_subcommand("column-walk", "single-column mixing check");
    add_common(c_cw);
    c_cw->add_option("--a", cw_a, "lower neighbor height");
    c_cw->add_option("--gap", cw_gaps, "b - a values")->delimiter(',');
    c_cw->add_option("--ell", cw_ells, "start offsets above b")->delimiter(',');
    c_cw->add_option("--replicas", replicas);
    c_cw->add_option("--tv-target", tv_target);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

#ifdef _OPENMP
    if (threads > 0) omp_set_num_threads(threads);
#endif

    try {
        if (c_sim->parsed())
            return run_simulate(out_path, n, beta, cap, unbounded, kind, start,
                                steps, stride, seed, stats);
        if (c_coal->parsed())
            return run_coalesce(out_path, n, beta, kind, seed, replicas, t_max);
        if (c_sweep->parsed())
            return run_sweep(out_path, n_list, beta, kind, seed, replicas, t_max);
        if (c_drift->parsed())
            return run_drift_check(out_path, n_list, beta, pairs, seed);
        if (c_exact->parsed())
            return run_exact(out_path, n, beta, cap, kind, horizon);
        if (c_eq->parsed())
            return run_equilibrium(out_path, n, beta, cap, unbounded, event, from, to);
        if (c_relax->parsed())
            return run_relax(out_path, n, beta, kind, start, cond_h, pin_spacing,
                             seed, replicas, dwell, budget);
        if (c_desc->parsed())
            return run_descent(out_path, n, beta, kind, seed, budget, stride);
        if (c_cw->parsed())
            return run_column_walk(out_path, cw_a, cw_gaps, cw_ells, beta, replicas,
                                   seed, tv_target);
    } catch (const CLI::ValidationError& e) {
        std::cerr << e.what() << "\n";
        return 2;
    } catch (const std::invalid_argument& e) {
        std::cerr << "configuration error: " << e.what() << "\n";
        return 2;
    } catch (const std::domain_error& e) {
        std::cerr << "configuration error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 2;
}
