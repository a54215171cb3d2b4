#pragma once

#include <limits>
#include <optional>
#include <utility>
#include <vector>

namespace sos {

enum class HeightMode { bounded, unbounded };

// Static description of one SOS instance: lattice length, inverse
// temperature, allowed height set, boundary heights and pinned positions.
// Immutable after construction; derived quantities (exp(-2 beta) powers,
// geometric tail sums) are precomputed here so the dynamics kernels stay
// allocation-free.
struct ModelParams {
    int n = 0;
    double beta = 0.0;
    HeightMode mode = HeightMode::bounded;
    int cap = 0; // height cap H, bounded mode only
    int boundary_left = 0;
    int boundary_right = 0;
    std::vector<int> pinned; // sorted positions in [1, n] forced to height 0

    double x = 0.0;     // exp(-2 beta)
    double s_inf = 0.0; // x / (1 - x)

    ModelParams(int n_, double beta_, HeightMode mode_, int cap_,
                int boundary_left_ = 0, int boundary_right_ = 0,
                std::vector<int> pinned_ = {});

    // The paper's standard instance: heights in [0, n], zero boundaries.
    static ModelParams standard(int n, double beta);
    static ModelParams bounded(int n, double beta, int cap,
                               int boundary_left = 0, int boundary_right = 0);
    static ModelParams unbounded(int n, double beta,
                                 int boundary_left = 0, int boundary_right = 0);

    ModelParams with_pins(std::vector<int> pins) const;

    bool is_bounded() const { return mode == HeightMode::bounded; }
    bool is_pinned(int pos) const; // pos in [1, n]
    int max_height(int pos) const; // cap, or 0 at pinned positions

    // Geometric tail sums S_m = sum_{j=1}^m x^j and the tail mean offset
    // T_m = (sum_{j=1}^m j x^j) / S_m, with T_0 = 0.
    double S(int m) const;
    double T(int m) const;

  private:
    std::vector<double> xpow_; // x^m for m = 0..cap+1 (bounded mode)
};

struct TailSums {
    int m = 0; // -1 encodes m = infinity
    double s = 0.0;
    double t = 0.0;
    double s_inf = 0.0;
};
TailSums tail_sums(int m, double beta);

// A configuration eta(1..n); boundary heights live in ModelParams.
using Contour = std::vector<int>;

Contour bottom_contour(const ModelParams& params);
Contour top_contour(const ModelParams& params); // bounded mode only

// Height at position i in [0, n+1], substituting the boundaries.
int height_at(const Contour& contour, const ModelParams& params, int pos);

void validate_contour(const Contour& contour, const ModelParams& params);

// Pointwise partial order eta <= xi.
bool leq(const Contour& lhs, const Contour& rhs);

// Sum of |eta(i-1) - eta(i)| over i = 1..n+1, boundary terms included.
long long energy(const Contour& contour, const ModelParams& params);

// log of the unnormalized Gibbs weight, -beta * energy.
double log_gibbs_weight(const Contour& contour, const ModelParams& params);

// The single-column conditional law mu_ab: uniform on [a, b], geometric
// decay by exp(-2 beta) per unit step outside, truncated at 0 and at the
// cap (bounded mode) or extending to infinity above (unbounded mode).
struct ConditionalLaw {
    int a = 0;
    int b = 0;
    double beta = 0.0;
    double x = 0.0;
    std::optional<int> cap; // empty in unbounded mode
    double s_low = 0.0;     // S_a
    double s_high = 0.0;    // S_{cap-b}, or S_inf
    double s_inf = 0.0;
    double z_reduced = 0.0; // S_a + (b - a + 1) + s_high
    double z = 0.0;         // exp(-beta (b-a)) * z_reduced

    double prob(int j) const;
    double cdf(int j) const;

    // Inverse CDF: min{k : cdf(k) >= r}, r in [0, 1).  Monotone in r and,
    // for fixed r, in (a, b) coordinatewise; this is what makes the grand
    // coupling monotone.
    int quantile(double r) const;

    // Direct-summation mean over the support (bounded mode only).
    double mean_direct() const;
};

ConditionalLaw conditional_law(int a, int b, const ModelParams& params);

double conditional_mean_direct(int a, int b, const ModelParams& params);

// Entropy-repulsion term: E[new height | a, b] = (a+b)/2 + epsilon(a, b),
// for a + b <= cap.  Nonnegative and monotone decreasing in (a, b).
double epsilon(int a, int b, const ModelParams& params);

// Closed-form conditional mean, valid in all barrier cases via the
// reflection a -> cap - a.
double conditional_mean_closed(int a, int b, const ModelParams& params);

// For ordered neighbor data cL <= min{aU, dL} <= max{aU, dL} <= bU, returns
// (E[upper'] - E[lower'], (aU+bU)/2 - (cL+dL)/2); the first component lies
// in [0, second].
std::pair<double, double> mean_sandwich(int a_upper, int b_upper,
                                        int c_lower, int d_lower,
                                        const ModelParams& params);

} // namespace sos
