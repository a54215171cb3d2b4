#include "sos/model.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace sos {

ModelParams::ModelParams(int n_, double beta_, HeightMode mode_, int cap_,
                         int boundary_left_, int boundary_right_,
                         std::vector<int> pinned_)
    : n(n_), beta(beta_), mode(mode_), cap(cap_),
      boundary_left(boundary_left_), boundary_right(boundary_right_),
      pinned(std::move(pinned_)) {
    if (n < 1) throw std::invalid_argument("ModelParams: n must be >= 1");
    if (!(beta > 0.0)) throw std::invalid_argument("ModelParams: beta must be > 0");
    if (boundary_left < 0 || boundary_right < 0)
        throw std::invalid_argument("ModelParams: boundary heights must be >= 0");
    if (mode == HeightMode::bounded) {
        if (cap < 0) throw std::invalid_argument("ModelParams: cap must be >= 0");
        if (boundary_left > cap || boundary_right > cap)
            throw std::invalid_argument("ModelParams: boundary heights exceed cap");
    }
    std::sort(pinned.begin(), pinned.end());
    for (int pos : pinned)
        if (pos < 1 || pos > n)
            throw std::invalid_argument("ModelParams: pinned position out of range");

    x = std::exp(-2.0 * beta);
    s_inf = x / (1.0 - x);
    if (mode == HeightMode::bounded) {
        xpow_.resize(static_cast<std::size_t>(cap) + 2);
        xpow_[0] = 1.0;
        for (std::size_t m = 1; m < xpow_.size(); ++m) xpow_[m] = xpow_[m - 1] * x;
    }
}

ModelParams ModelParams::standard(int n, double beta) {
    return ModelParams(n, beta, HeightMode::bounded, n);
}

ModelParams ModelParams::bounded(int n, double beta, int cap,
                                 int boundary_left, int boundary_right) {
    return ModelParams(n, beta, HeightMode::bounded, cap, boundary_left, boundary_right);
}

ModelParams ModelParams::unbounded(int n, double beta,
                                   int boundary_left, int boundary_right) {
    return ModelParams(n, beta, HeightMode::unbounded, 0, boundary_left, boundary_right);
}

ModelParams ModelParams::with_pins(std::vector<int> pins) const {
    return ModelParams(n, beta, mode, cap, boundary_left, boundary_right, std::move(pins));
}

bool ModelParams::is_pinned(int pos) const {
    return std::binary_search(pinned.begin(), pinned.end(), pos);
}

int ModelParams::max_height(int pos) const {
    if (is_pinned(pos)) return 0;
    if (mode == HeightMode::bounded) return cap;
    return std::numeric_limits<int>::max();
}

double ModelParams::S(int m) const {
    if (m <= 0) return 0.0;
    if (mode == HeightMode::bounded && m < static_cast<int>(xpow_.size()))
        return s_inf * (1.0 - xpow_[static_cast<std::size_t>(m)]);
    return s_inf * (1.0 - std::pow(x, m));
}

double ModelParams::T(int m) const {
    if (m <= 0) return 0.0;
    double xm = (mode == HeightMode::bounded && m < static_cast<int>(xpow_.size()))
                    ? xpow_[static_cast<std::size_t>(m)]
                    : std::pow(x, m);
    return 1.0 / (1.0 - x) - static_cast<double>(m) * xm / (1.0 - xm);
}

TailSums tail_sums(int m, double beta) {
    if (!(beta > 0.0)) throw std::invalid_argument("tail_sums: beta must be > 0");
    double x = std::exp(-2.0 * beta);
    double s_inf = x / (1.0 - x);
    TailSums out;
    out.s_inf = s_inf;
    if (m < 0) { // infinity
        out.m = -1;
        out.s = s_inf;
        out.t = 1.0 / (1.0 - x);
        return out;
    }
    out.m = m;
    if (m == 0) return out;
    double xm = std::pow(x, m);
    out.s = s_inf * (1.0 - xm);
    out.t = 1.0 / (1.0 - x) - static_cast<double>(m) * xm / (1.0 - xm);
    return out;
}

Contour bottom_contour(const ModelParams& params) {
    return Contour(static_cast<std::size_t>(params.n), 0);
}

Contour top_contour(const ModelParams& params) {
    if (!params.is_bounded())
        throw std::domain_error("top_contour: undefined in unbounded mode");
    Contour c(static_cast<std::size_t>(params.n), params.cap);
    for (int pos : params.pinned) c[static_cast<std::size_t>(pos - 1)] = 0;
    return c;
}

int height_at(const Contour& contour, const ModelParams& params, int pos) {
    if (pos == 0) return params.boundary_left;
    if (pos == params.n + 1) return params.boundary_right;
    return contour[static_cast<std::size_t>(pos - 1)];
}

void validate_contour(const Contour& contour, const ModelParams& params) {
    if (static_cast<int>(contour.size()) != params.n)
        throw std::invalid_argument("contour length does not match params.n");
    for (int i = 1; i <= params.n; ++i) {
        int h = contour[static_cast<std::size_t>(i - 1)];
        if (h < 0) throw std::invalid_argument("contour height below 0");
        if (params.is_bounded() && h > params.cap)
            throw std::invalid_argument("contour height exceeds cap");
        if (params.is_pinned(i) && h != 0)
            throw std::invalid_argument("pinned position not at height 0");
    }
}

bool leq(const Contour& lhs, const Contour& rhs) {
    if (lhs.size() != rhs.size())
        throw std::invalid_argument("leq: contour length mismatch");
    for (std::size_t i = 0; i < lhs.size(); ++i)
        if (lhs[i] > rhs[i]) return false;
    return true;
}

long long energy(const Contour& contour, const ModelParams& params) {
    validate_contour(contour, params);
    long long total = 0;
    int prev = params.boundary_left;
    for (int h : contour) {
        total += std::abs(prev - h);
        prev = h;
    }
    total += std::abs(prev - params.boundary_right);
    return total;
}

double log_gibbs_weight(const Contour& contour, const ModelParams& params) {
    return -params.beta * static_cast<double>(energy(contour, params));
}

ConditionalLaw conditional_law(int a, int b, const ModelParams& params) {
    if (a < 0 || a > b) throw std::invalid_argument("conditional_law: need 0 <= a <= b");
    ConditionalLaw law;
    law.a = a;
    law.b = b;
    law.beta = params.beta;
    law.x = params.x;
    law.s_inf = params.s_inf;
    law.s_low = params.S(a);
    if (params.is_bounded()) {
        if (b > params.cap)
            throw std::invalid_argument("conditional_law: b exceeds height cap");
        law.cap = params.cap;
        law.s_high = params.S(params.cap - b);
    } else {
        law.s_high = params.s_inf;
    }
    law.z_reduced = law.s_low + static_cast<double>(b - a + 1) + law.s_high;
    law.z = std::exp(-params.beta * static_cast<double>(b - a)) * law.z_reduced;
    return law;
}

double ConditionalLaw::prob(int j) const {
    if (j < 0 || (cap && j > *cap)) return 0.0;
    if (j < a) return std::pow(x, a - j) / z_reduced;
    if (j <= b) return 1.0 / z_reduced;
    return std::pow(x, j - b) / z_reduced;
}

double ConditionalLaw::cdf(int j) const {
    if (j < 0) return 0.0;
    if (cap && j >= *cap) return 1.0;
    double c;
    if (j < a) {
        // sum_{t=a-j}^{a} x^t = S_a - S_{a-j-1}
        c = s_low - s_inf * (1.0 - std::pow(x, a - j - 1));
    } else if (j <= b) {
        c = s_low + static_cast<double>(j - a + 1);
    } else {
        c = s_low + static_cast<double>(b - a + 1) + s_inf * (1.0 - std::pow(x, j - b));
    }
    return c / z_reduced;
}

int ConditionalLaw::quantile(double r) const {
    if (!(r >= 0.0) || r >= 1.0)
        throw std::invalid_argument("quantile: r must lie in [0, 1)");
    double c = r * z_reduced;

    if (c < s_low) {
        // lower geometric tail, at most a terms
        double cum = 0.0;
        double term = std::pow(x, a);
        for (int k = 0; k < a; ++k) {
            cum += term;
            if (cum >= c) return k;
            term /= x;
        }
        return a; // fp slack: fall through to the uniform block
    }
    c -= s_low;
    double width = static_cast<double>(b - a + 1);
    if (c < width) {
        int off = static_cast<int>(std::ceil(c)) - 1;
        if (off < 0) off = 0;
        return std::min(a + off, b);
    }
    c -= width;

    if (!cap) {
        // unbounded upper tail: closed-form geometric inversion, O(1)
        double frac = 1.0 - c / s_inf; // in (0, 1]
        int m = 1;
        if (frac < 1.0) {
            m = static_cast<int>(std::ceil(std::log(frac) / std::log(x)));
            if (m < 1) m = 1;
        }
        while (m > 1 && s_inf * (1.0 - std::pow(x, m - 1)) >= c) --m;
        while (s_inf * (1.0 - std::pow(x, m)) < c) ++m;
        return b + m;
    }

    double cum = 0.0;
    double term = x;
    for (int k = b + 1; k < *cap; ++k) {
        cum += term;
        if (cum >= c) return k;
        term *= x;
    }
    return *cap;
}

double ConditionalLaw::mean_direct() const {
    if (!cap)
        throw std::domain_error("mean_direct: unbounded support, use the closed form");
    double num = 0.0;
    for (int j = 0; j <= *cap; ++j) num += static_cast<double>(j) * prob(j);
    return num;
}

double conditional_mean_direct(int a, int b, const ModelParams& params) {
    return conditional_law(a, b, params).mean_direct();
}

double epsilon(int a, int b, const ModelParams& params) {
    if (!params.is_bounded())
        throw std::domain_error("epsilon: bounded mode only");
    if (a < 0 || a > b || b > params.cap)
        throw std::invalid_argument("epsilon: need 0 <= a <= b <= cap");
    int m = params.cap - (a + b);
    if (m < 0)
        throw std::domain_error("epsilon: a + b exceeds cap, use the reflected form");
    if (m == 0) return 0.0;
    double z = params.S(a) + static_cast<double>(b - a + 1) + params.S(params.cap - b);
    double pr_above = std::pow(params.x, a) * params.S(m) / z;
    return pr_above * (static_cast<double>(a + b) / 2.0 + params.T(m));
}

double conditional_mean_closed(int a, int b, const ModelParams& params) {
    if (!params.is_bounded())
        throw std::domain_error("conditional_mean_closed: bounded mode only");
    double half = static_cast<double>(a + b) / 2.0;
    if (a + b <= params.cap) return half + epsilon(a, b, params);
    // reflection j -> cap - j swaps the two barriers
    return half - epsilon(params.cap - b, params.cap - a, params);
}

std::pair<double, double> mean_sandwich(int a_upper, int b_upper,
                                        int c_lower, int d_lower,
                                        const ModelParams& params) {
    if (!(c_lower <= std::min(a_upper, d_lower) &&
          std::max(a_upper, d_lower) <= b_upper))
        throw std::invalid_argument("mean_sandwich: neighbor ordering violated");
    double diff = conditional_mean_closed(a_upper, b_upper, params) -
                  conditional_mean_closed(c_lower, d_lower, params);
    double bound = static_cast<double>(a_upper + b_upper) / 2.0 -
                   static_cast<double>(c_lower + d_lower) / 2.0;
    return {diff, bound};
}

} // namespace sos
