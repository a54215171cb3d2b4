#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "sos/dynamics.hpp"

using namespace sos;

TEST_CASE("kind and statistic names round-trip") {
    for (ChainKind k : {ChainKind::single_site, ChainKind::column,
                        ChainKind::parallel_oe, ChainKind::parallel_eo})
        CHECK(chain_kind_from_string(to_string(k)) == k);
    for (Statistic s : {Statistic::mean_height, Statistic::max_height,
                        Statistic::max_gradient, Statistic::wilson_distance})
        CHECK(statistic_from_string(to_string(s)) == s);
    CHECK_THROWS(chain_kind_from_string("nope"));
}

TEST_CASE("single-site move respects the neighbor rule") {
    ModelParams p = ModelParams::standard(3, 1.0);
    // at (0,2,0): position 2 has a=b=0, h=2 > b so the down move is free
    UpdateDraw down{2, false, 0.49, 0.0};
    CHECK(ss_step({0, 2, 0}, down, p) == Contour{0, 1, 0});
    // up move from h >= b needs u < 2 * x / 4
    UpdateDraw up{2, true, 2.0 * 0.25 * p.x - 1e-12, 0.0};
    CHECK(ss_step({0, 2, 0}, up, p) == Contour{0, 3, 0});
    up.u = 2.0 * 0.25 * p.x + 1e-12;
    CHECK(ss_step({0, 2, 0}, up, p) == Contour{0, 2, 0});
    // between the neighbors both directions are free coin flips
    UpdateDraw mid{2, true, 0.49, 0.0};
    CHECK(ss_step({0, 1, 3}, mid, p) == Contour{0, 2, 3});
}

TEST_CASE("clamped moves are self-loops") {
    ModelParams p = ModelParams::standard(2, 0.5);
    UpdateDraw down{1, false, 0.0, 0.0};
    CHECK(ss_step({0, 0}, down, p) == Contour{0, 0});
    UpdateDraw up{1, true, 0.0, 0.0};
    CHECK(ss_step({2, 0}, up, p) == Contour{2, 0});
}

TEST_CASE("pinned positions never move") {
    ModelParams p = ModelParams::standard(3, 1.0).with_pins({2});
    UpdateDraw up{2, true, 0.0, 0.0};
    CHECK(ss_step({1, 0, 1}, up, p) == Contour{1, 0, 1});
    UpdateDraw col{2, false, 0.0, 0.999};
    CHECK(col_step({1, 0, 1}, col, p) == Contour{1, 0, 1});
}

TEST_CASE("column move is the conditional quantile") {
    ModelParams p = ModelParams::standard(4, 0.8);
    Contour eta{0, 3, 1, 0};
    ConditionalLaw law = conditional_law(0, 3, p); // neighbors of position 3
    for (double r : {0.01, 0.3, 0.77, 0.99}) {
        UpdateDraw d{3, false, 0.0, r};
        Contour next = col_step(eta, d, p);
        CHECK(next[2] == law.quantile(r));
    }
}

TEST_CASE("parity sweep touches only its parity") {
    ModelParams p = ModelParams::standard(6, 1.0);
    Contour eta{3, 3, 3, 3, 3, 3};
    Rng rng(5);
    Contour odd = par_sweep(eta, 1, rng, p);
    CHECK(odd[1] == 3);
    CHECK(odd[3] == 3);
    CHECK(odd[5] == 3);
    Rng rng2(5);
    Contour even = par_sweep(eta, 0, rng2, p);
    CHECK(even[0] == 3);
    CHECK(even[2] == 3);
    CHECK(even[4] == 3);
}

TEST_CASE("trajectories are deterministic in the seed") {
    ModelParams p = ModelParams::standard(8, 1.0);
    for (ChainKind k : {ChainKind::single_site, ChainKind::column,
                        ChainKind::parallel_oe}) {
        TrajectorySummary a = run_chain(k, bottom_contour(p), 500, 42, p);
        TrajectorySummary b = run_chain(k, bottom_contour(p), 500, 42, p);
        TrajectorySummary c = run_chain(k, bottom_contour(p), 500, 43, p);
        CHECK(a.final == b.final);
        CHECK(a.series.size() == b.series.size());
        for (std::size_t i = 0; i < a.series.size(); ++i)
            CHECK(a.series[i].value == b.series[i].value);
        CHECK(a.final != c.final); // overwhelmingly likely
    }
}

TEST_CASE("run_chain records at the stride and the end") {
    ModelParams p = ModelParams::standard(4, 1.0);
    RunOptions opt;
    opt.stride = 10;
    TrajectorySummary s = run_chain(ChainKind::column, bottom_contour(p), 25, 1, p, opt);
    REQUIRE(s.series.size() == 4); // t = 0, 10, 20, 25
    CHECK(s.series[0].step == 0);
    CHECK(s.series[1].step == 10);
    CHECK(s.series[2].step == 20);
    CHECK(s.series[3].step == 25);
}

TEST_CASE("statistics evaluate correctly") {
    ModelParams p = ModelParams::standard(4, 1.0);
    Contour eta{0, 3, 1, 2};
    CHECK(evaluate_statistic(Statistic::mean_height, eta, p, {}) ==
          doctest::Approx(1.5));
    CHECK(evaluate_statistic(Statistic::max_height, eta, p, {}) == 3.0);
    CHECK(evaluate_statistic(Statistic::max_gradient, eta, p, {}) == 3.0);
}

TEST_CASE("censored schedule bookkeeping") {
    ModelParams p = ModelParams::standard(8, 1.0);
    CensorSchedule sched = CensorSchedule::alternating(4, 100, 1);
    sched.validate();
    CensoredRunResult r = censored_run(sched, top_contour(p), 7, p, 4);
    CHECK(r.total_steps == 400);
    CHECK(r.applied_steps <= r.total_steps);
    CHECK(r.applied_steps > 0);
    CHECK(r.steps_in_b <= r.total_steps);
    // deterministic replay
    CensoredRunResult r2 = censored_run(sched, top_contour(p), 7, p, 4);
    CHECK(r.final == r2.final);
    CHECK(r.applied_steps == r2.applied_steps);
    CHECK(r.steps_in_b == r2.steps_in_b);

    // a free schedule applies every draw
    CensorSchedule free;
    free.epochs = 1;
    free.epoch_length = 50;
    free.pattern = {EpochPattern::free};
    free.d_param = 1;
    CensoredRunResult rf = censored_run(free, bottom_contour(p), 3, p, 4);
    CHECK(rf.applied_steps == 50);
}

TEST_CASE("censored run matches the uncensored chain when nothing is censored") {
    // free epochs consume the same draws as run_chain
    ModelParams p = ModelParams::standard(6, 1.0);
    CensorSchedule free;
    free.epochs = 1;
    free.epoch_length = 300;
    free.pattern = {EpochPattern::free};
    CensoredRunResult r = censored_run(free, bottom_contour(p), 11, p, 100);
    TrajectorySummary s = run_chain(ChainKind::single_site, bottom_contour(p), 300, 11, p);
    CHECK(r.final == s.final);
}

TEST_CASE("gradient threshold default") {
    CHECK(default_gradient_threshold(2) == static_cast<int>(std::ceil(4.0 * std::log(2.0))));
    CHECK(default_gradient_threshold(100) == static_cast<int>(std::ceil(4.0 * std::log(100.0))));
}
