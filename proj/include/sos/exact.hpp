#pragma once

#include <Eigen/Dense>
#include <vector>

#include "sos/dynamics.hpp"
#include "sos/model.hpp"

namespace sos {

// Brute-force oracle: full state enumeration with the exact stationary
// vector.  Intended for tiny instances; enumerate_chain guards the state
// count.
struct ExactChain {
    ModelParams params;
    std::vector<Contour> states;
    Eigen::VectorXd stationary;
    double z_sum = 0.0; // sum of exp(-beta * energy) over all states

    int index_of(const Contour& contour) const;

  private:
    friend ExactChain enumerate_chain(const ModelParams& params);
    std::vector<long long> stride_; // mixed-radix strides, 0 at pinned slots
    explicit ExactChain(ModelParams p) : params(std::move(p)) {}
};

ExactChain enumerate_chain(const ModelParams& params);

// Exact one-step matrix for the given dynamics; both parallel kinds map to
// the fair-coin average of the OE and EO sweep products.
Eigen::MatrixXd transition_matrix(ChainKind kind, const ExactChain& chain);

double tv_distance(const Eigen::VectorXd& lhs, const Eigen::VectorXd& rhs);

// Exact total variation to stationarity at t = 0..t_max from the given
// start distribution.
std::vector<double> tv_curve(const ExactChain& chain, const Eigen::MatrixXd& matrix,
                             const Eigen::VectorXd& start, int t_max);

// First t at which the worst of the two extreme starts (top, bottom) has
// TV <= eps; -1 if not reached within t_max.
long long tau_mix(const ExactChain& chain, const Eigen::MatrixXd& matrix,
                  double eps, int t_max);

// 1 minus the second-largest eigenvalue of the symmetrized matrix; the
// input must be reversible w.r.t. the stationary vector.
double spectral_gap_exact(const Eigen::MatrixXd& matrix,
                          const Eigen::VectorXd& stationary);

} // namespace sos
