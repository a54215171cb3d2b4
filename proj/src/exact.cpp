#include "sos/exact.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace sos {

namespace {

constexpr long long kStateGuard = 1000000; // enumeration guard
constexpr long long kMatrixGuard = 20000;  // dense-matrix dimension guard

} // namespace

int ExactChain::index_of(const Contour& contour) const {
    long long idx = 0;
    for (int i = 1; i <= params.n; ++i)
        idx += stride_[static_cast<std::size_t>(i - 1)] *
               contour[static_cast<std::size_t>(i - 1)];
    return static_cast<int>(idx);
}

ExactChain enumerate_chain(const ModelParams& params) {
    if (!params.is_bounded())
        throw std::domain_error("enumerate_chain: bounded mode only");

    std::vector<int> radix(static_cast<std::size_t>(params.n));
    long long count = 1;
    for (int i = 1; i <= params.n; ++i) {
        radix[static_cast<std::size_t>(i - 1)] = params.max_height(i) + 1;
        count *= radix[static_cast<std::size_t>(i - 1)];
        if (count > kStateGuard)
            throw std::domain_error("enumerate_chain: state space too large");
    }

    ExactChain chain(params);
    chain.stride_.assign(static_cast<std::size_t>(params.n), 0);
    long long s = 1;
    for (int i = params.n; i >= 1; --i) {
        chain.stride_[static_cast<std::size_t>(i - 1)] = s;
        s *= radix[static_cast<std::size_t>(i - 1)];
    }

    chain.states.reserve(static_cast<std::size_t>(count));
    Contour current(static_cast<std::size_t>(params.n), 0);
    for (long long k = 0; k < count; ++k) {
        chain.states.push_back(current);
        for (int i = params.n; i >= 1; --i) {
            std::size_t j = static_cast<std::size_t>(i - 1);
            if (++current[j] < radix[j]) break;
            current[j] = 0;
        }
    }

    chain.stationary.resize(static_cast<Eigen::Index>(count));
    double z = 0.0;
    for (long long k = 0; k < count; ++k) {
        double w = std::exp(-params.beta *
                            static_cast<double>(energy(chain.states[static_cast<std::size_t>(k)], params)));
        chain.stationary(static_cast<Eigen::Index>(k)) = w;
        z += w;
    }
    chain.stationary /= z;
    chain.z_sum = z;
    return chain;
}

namespace {

// Column-update matrix at a single position (identity at pinned ones).
Eigen::MatrixXd column_update_matrix(const ExactChain& chain, int pos) {
    const auto N = static_cast<Eigen::Index>(chain.states.size());
    const ModelParams& params = chain.params;
    Eigen::MatrixXd P = Eigen::MatrixXd::Zero(N, N);
    if (params.is_pinned(pos)) return Eigen::MatrixXd::Identity(N, N);
    for (Eigen::Index s = 0; s < N; ++s) {
        Contour eta = chain.states[static_cast<std::size_t>(s)];
        int left = height_at(eta, params, pos - 1);
        int right = height_at(eta, params, pos + 1);
        ConditionalLaw law =
            conditional_law(std::min(left, right), std::max(left, right), params);
        for (int j = 0; j <= params.cap; ++j) {
            eta[static_cast<std::size_t>(pos - 1)] = j;
            P(s, chain.index_of(eta)) += law.prob(j);
        }
    }
    return P;
}

} // namespace

Eigen::MatrixXd transition_matrix(ChainKind kind, const ExactChain& chain) {
    const auto N = static_cast<Eigen::Index>(chain.states.size());
    if (N > kMatrixGuard)
        throw std::domain_error("transition_matrix: state space too large for dense matrix");
    const ModelParams& params = chain.params;
    const double inv_n = 1.0 / static_cast<double>(params.n);

    if (is_parallel(kind)) {
        Eigen::MatrixXd odd = Eigen::MatrixXd::Identity(N, N);
        Eigen::MatrixXd even = Eigen::MatrixXd::Identity(N, N);
        for (int i = 1; i <= params.n; i += 2) odd = odd * column_update_matrix(chain, i);
        for (int i = 2; i <= params.n; i += 2) even = even * column_update_matrix(chain, i);
        return 0.5 * (odd * even + even * odd);
    }

    Eigen::MatrixXd P = Eigen::MatrixXd::Zero(N, N);
    for (Eigen::Index s = 0; s < N; ++s) {
        Contour eta = chain.states[static_cast<std::size_t>(s)];
        for (int i = 1; i <= params.n; ++i) {
            if (params.is_pinned(i)) {
                P(s, s) += inv_n;
                continue;
            }
            int h = eta[static_cast<std::size_t>(i - 1)];
            int left = height_at(eta, params, i - 1);
            int right = height_at(eta, params, i + 1);
            int a = std::min(left, right), b = std::max(left, right);
            if (kind == ChainKind::single_site) {
                double pm = (h <= a) ? 0.25 * params.x : 0.25;
                double pp = (h >= b) ? 0.25 * params.x : 0.25;
                Contour next = eta;
                next[static_cast<std::size_t>(i - 1)] = std::max(h - 1, 0);
                P(s, chain.index_of(next)) += inv_n * pm;
                next[static_cast<std::size_t>(i - 1)] = std::min(h + 1, params.cap);
                P(s, chain.index_of(next)) += inv_n * pp;
                P(s, s) += inv_n * (1.0 - pm - pp);
            } else {
                ConditionalLaw law = conditional_law(a, b, params);
                Contour next = eta;
                for (int j = 0; j <= params.cap; ++j) {
                    next[static_cast<std::size_t>(i - 1)] = j;
                    P(s, chain.index_of(next)) += inv_n * law.prob(j);
                }
            }
        }
    }
    return P;
}

double tv_distance(const Eigen::VectorXd& lhs, const Eigen::VectorXd& rhs) {
    return 0.5 * (lhs - rhs).cwiseAbs().sum();
}

std::vector<double> tv_curve(const ExactChain& chain, const Eigen::MatrixXd& matrix,
                             const Eigen::VectorXd& start, int t_max) {
    if (start.size() != chain.stationary.size())
        throw std::invalid_argument("tv_curve: start size mismatch");
    std::vector<double> curve;
    curve.reserve(static_cast<std::size_t>(t_max) + 1);
    Eigen::RowVectorXd nu = start.transpose();
    curve.push_back(tv_distance(nu.transpose(), chain.stationary));
    for (int t = 1; t <= t_max; ++t) {
        nu = nu * matrix;
        curve.push_back(tv_distance(nu.transpose(), chain.stationary));
    }
    return curve;
}

long long tau_mix(const ExactChain& chain, const Eigen::MatrixXd& matrix,
                  double eps, int t_max) {
    const auto N = chain.stationary.size();
    Eigen::RowVectorXd from_top = Eigen::RowVectorXd::Zero(N);
    Eigen::RowVectorXd from_bottom = Eigen::RowVectorXd::Zero(N);
    from_top(chain.index_of(top_contour(chain.params))) = 1.0;
    from_bottom(chain.index_of(bottom_contour(chain.params))) = 1.0;
    for (int t = 0; t <= t_max; ++t) {
        double tv = std::max(tv_distance(from_top.transpose(), chain.stationary),
                             tv_distance(from_bottom.transpose(), chain.stationary));
        if (tv <= eps) return t;
        from_top = from_top * matrix;
        from_bottom = from_bottom * matrix;
    }
    return -1;
}

double spectral_gap_exact(const Eigen::MatrixXd& matrix,
                          const Eigen::VectorXd& stationary) {
    const auto N = matrix.rows();
    if (N < 2) throw std::invalid_argument("spectral_gap_exact: need >= 2 states");
    for (Eigen::Index s = 0; s < N; ++s)
        for (Eigen::Index t = 0; t < N; ++t) {
            double flow = stationary(s) * matrix(s, t);
            double back = stationary(t) * matrix(t, s);
            if (std::abs(flow - back) > 1e-10 * std::max(1.0, std::abs(flow)))
                throw std::invalid_argument("spectral_gap_exact: matrix not reversible");
        }
    Eigen::MatrixXd sym(N, N);
    for (Eigen::Index s = 0; s < N; ++s)
        for (Eigen::Index t = 0; t < N; ++t)
            sym(s, t) = matrix(s, t) * std::sqrt(stationary(s) / stationary(t));
    sym = 0.5 * (sym + sym.transpose());
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(sym);
    return 1.0 - solver.eigenvalues()(N - 2);
}

} // namespace sos
