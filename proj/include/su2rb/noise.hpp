#pragma once

#include <vector>

#include "su2rb/superop.hpp"

namespace su2rb {

// Gate-noise channel description. coherent_jz2 is the unitary
// U = exp(-i gamma Jz^2); dephasing suppresses off-diagonal matrix elements
// <l|rho|l'> by exp(-gamma (l-l')^2).
struct NoiseModel {
  enum class Kind { none, coherent_jz2, dephasing, custom_kraus };
  Kind kind = Kind::none;
  double gamma = 0;
  std::vector<Operator> kraus;  // custom_kraus only

  static NoiseModel none() { return {}; }
  static NoiseModel coherent(double gamma) { return {Kind::coherent_jz2, gamma, {}}; }
  static NoiseModel dephasing(double gamma) { return {Kind::dephasing, gamma, {}}; }
  static NoiseModel custom(std::vector<Operator> ks) { return {Kind::custom_kraus, 0, std::move(ks)}; }
};

// SPAM-error description. Preparation |l><l| is conjugated by
// V_l = exp(-i phi n_l . J) with a per-level axis n_l drawn once (seeded) and
// then frozen. Measurement errors either conjugate every ideal effect by one
// fixed rotation or permute the effect labels; both keep the POVM complete.
struct SpamModel {
  double prep_angle = 0;  // phi
  enum class MeasKind { ideal, coherent_rotation, permutation };
  MeasKind meas_kind = MeasKind::ideal;
  double meas_angle = 0;  // phi for coherent_rotation

  static SpamModel ideal() { return {}; }
};

// Superoperator of the gate-error channel in the spherical-tensor basis.
Superoperator gate_error_channel(HalfInt j, const NoiseModel& model);

// Fast state-space application of the same channel (density matrix in, out).
// Precomputes the closed forms once; this is the per-gate hot path.
class NoiseAction {
 public:
  NoiseAction(HalfInt j, const NoiseModel& model);
  bool trivial() const { return trivial_; }
  void apply(Operator& rho) const;

 private:
  bool trivial_ = true;
  NoiseModel::Kind kind_ = NoiseModel::Kind::none;
  Eigen::VectorXcd phase_;     // coherent_jz2: diag of exp(-i gamma Jz^2)
  Eigen::MatrixXd damp_;       // dephasing: elementwise damping mask
  std::vector<Operator> kraus_;
};

// Rotation exp(-i angle n.J), built by conjugating the diagonal exponential
// with an axis-aligning rotation (no general matrix exponential).
Operator axis_rotation(HalfInt j, const double axis[3], double angle);

// The 2j+1 noisy prepared states, descending ell. Axes are drawn from the
// provided stream (one sub-draw per level, in order) and frozen.
std::vector<Operator> noisy_preparations(HalfInt j, const SpamModel& spam, RandomStream& rng);

// The 2j+1 POVM effects, descending ell; always sum to the identity.
std::vector<Operator> noisy_povm(HalfInt j, const SpamModel& spam, RandomStream& rng);

}  // namespace su2rb
