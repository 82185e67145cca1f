#pragma once

#include <boost/multiprecision/cpp_int.hpp>
#include <optional>

#include "su2rb/protocols.hpp"

namespace su2rb {

using Rational = boost::multiprecision::cpp_rational;
using BigInt = boost::multiprecision::cpp_int;

// Weighted nonlinear least-squares fit of m -> A * f^m.
struct DecayFit {
  double A = 0;
  double f = 0;
  double sigma_A = 0;
  double sigma_f = 0;
  double residual_norm = 0;
  int iterations = 0;
  bool converged = false;
};

// Gauss-Newton with Levenberg damping. `weights` are inverse variances; when
// empty, uniform weights are used and the parameter covariance is scaled by
// the residual variance estimate. Throws std::domain_error for < 2 points.
DecayFit fit_exponential(const std::vector<int>& ms, const std::vector<double>& values,
                         const std::vector<double>& weights = {});

// p_raw = F^{-1} f (normalized F); p_clipped = max(p_raw, 0) elementwise.
std::pair<Eigen::VectorXd, Eigen::VectorXd> error_rates(const Eigen::VectorXd& f, const FMatrix& F);

// sigma_p = sqrt(diag(F^{-1} diag(sigma_f^2) F^{-T})).
Eigen::VectorXd propagate_uncertainty(const Eigen::VectorXd& sigma_f, const FMatrix& F);

// Exact zero-noise variance of the normalized estimator X_k. `ell` is
// required for the physical-SPAM protocols (chirb, r1rb, ffrb); `frame` for
// the frame protocols.
double zero_noise_variance(Protocol proto, HalfInt j, int k,
                           std::optional<HalfInt> ell = std::nullopt,
                           const FiniteFrame* frame = nullptr);

// Designated level minimizing the physical-SPAM zero-noise variance
// (exhaustive over ell; the nonnegative representative is returned).
HalfInt best_ell(Protocol proto, HalfInt j, int k);

// Analytic upper bound on the zero-noise variance.
double variance_bound(Protocol proto, HalfInt j, int k, const FiniteFrame* frame = nullptr);

// Fitted quality parameters and derived error rates for one experiment.
struct RBResult {
  Eigen::VectorXd f, sigma_f;
  Eigen::VectorXd p_raw, p_clipped, sigma_p;
  double avg_fidelity = 0;
  std::vector<DecayFit> fits;
};

// Fits every rank of a k-resolved probability table and converts to error
// rates through the cached normalized-F inverse.
RBResult analyze(const ProbabilityTable& table, const FMatrix& F);

// Single-qubit / n-qubit frame sample-complexity calculator, exact rationals.
enum class FrameScheme {
  clifford_char,
  pauli_char,
  z2_char,
  pauli_frame_full,
  nonpauli_frame_full,
  nqubit_full,
  nqubit_rank1,
};

struct FrameComplexity {
  BigInt n_group;
  // Coefficient multiset as (value, multiplicity) pairs.
  std::vector<std::pair<Rational, BigInt>> coefficients;
  Rational uniform_metric;  // N_group * |c|_2^2
  Rational optimal_metric;  // |c|_1^2
};

FrameComplexity qubit_frame_complexity(FrameScheme scheme, int n = 1);

}  // namespace su2rb
