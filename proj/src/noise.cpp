#include "su2rb/noise.hpp"

#include <cmath>
#include <numbers>
#include <numeric>
#include <stdexcept>

namespace su2rb {

namespace {

Eigen::VectorXcd jz2_phases(HalfInt j, double gamma) {
  const int d = dim(j);
  Eigen::VectorXcd ph(d);
  for (int r = 0; r < d; ++r) {
    double ell = level_of_index(j, r).value();
    ph(r) = std::polar(1.0, -gamma * ell * ell);
  }
  return ph;
}

Eigen::MatrixXd dephasing_mask(HalfInt j, double gamma) {
  const int d = dim(j);
  Eigen::MatrixXd mask(d, d);
  for (int r = 0; r < d; ++r)
    for (int c = 0; c < d; ++c) {
      double diff = level_of_index(j, r).value() - level_of_index(j, c).value();
      mask(r, c) = std::exp(-gamma * diff * diff);
    }
  return mask;
}

// Random unit vector from two uniforms (uniform on the sphere).
void random_axis(RandomStream& rng, double axis[3]) {
  double z = 1.0 - 2.0 * rng.uniform();
  double phi = 2.0 * std::numbers::pi * rng.uniform();
  double s = std::sqrt(std::max(0.0, 1.0 - z * z));
  axis[0] = s * std::cos(phi);
  axis[1] = s * std::sin(phi);
  axis[2] = z;
}

void check_gamma(const NoiseModel& model) {
  if ((model.kind == NoiseModel::Kind::coherent_jz2 || model.kind == NoiseModel::Kind::dephasing) &&
      model.gamma < 0)
    throw std::domain_error("NoiseModel: gamma must be nonnegative");
}

}  // namespace

Operator axis_rotation(HalfInt j, const double axis[3], double angle) {
  // Quaternion built directly so the angle may fall outside [0, pi].
  double h = 0.5 * angle;
  double s = std::sin(h);
  GroupElement g(std::cos(h), s * axis[0], s * axis[1], s * axis[2]);
  return rotation_matrix(j, g);
}

Superoperator gate_error_channel(HalfInt j, const NoiseModel& model) {
  check_gamma(model);
  switch (model.kind) {
    case NoiseModel::Kind::none:
      return channel_superop(j, {Operator::Identity(dim(j), dim(j))});
    case NoiseModel::Kind::coherent_jz2: {
      Operator u = jz2_phases(j, model.gamma).asDiagonal();
      return channel_superop(j, {u});
    }
    case NoiseModel::Kind::dephasing: {
      // Build directly from the elementwise action on matrix elements.
      const auto mask = dephasing_mask(j, model.gamma);
      const int d = dim(j);
      Superoperator s(j);
      const int n = s.size();
      // <<T^kq | E(T^k'q') >> with E acting elementwise.
      std::vector<Operator> basis;
      for (int k = 0; k <= j.twice(); ++k)
        for (int q = k; q >= -k; --q) basis.push_back(spherical_tensor(j, HalfInt(k), HalfInt(q)));
      for (int c = 0; c < n; ++c) {
        Operator img = basis[size_t(c)].cwiseProduct(mask.cast<std::complex<double>>());
        for (int r = 0; r < n; ++r) s.mat(r, c) = (basis[size_t(r)].adjoint() * img).trace();
      }
      return s;
    }
    case NoiseModel::Kind::custom_kraus:
      return channel_superop(j, model.kraus);
  }
  throw std::logic_error("gate_error_channel: unreachable");
}

NoiseAction::NoiseAction(HalfInt j, const NoiseModel& model) {
  check_gamma(model);
  kind_ = model.kind;
  switch (model.kind) {
    case NoiseModel::Kind::none:
      trivial_ = true;
      break;
    case NoiseModel::Kind::coherent_jz2:
      trivial_ = (model.gamma == 0);
      phase_ = jz2_phases(j, model.gamma);
      break;
    case NoiseModel::Kind::dephasing:
      trivial_ = (model.gamma == 0);
      damp_ = dephasing_mask(j, model.gamma);
      break;
    case NoiseModel::Kind::custom_kraus:
      trivial_ = false;
      kraus_ = model.kraus;
      break;
  }
}

void NoiseAction::apply(Operator& rho) const {
  if (trivial_) return;
  switch (kind_) {
    case NoiseModel::Kind::none:
      return;
    case NoiseModel::Kind::coherent_jz2:
      rho = phase_.asDiagonal() * rho * phase_.conjugate().asDiagonal();
      return;
    case NoiseModel::Kind::dephasing:
      rho = rho.cwiseProduct(damp_.cast<std::complex<double>>());
      return;
    case NoiseModel::Kind::custom_kraus: {
      Operator out = Operator::Zero(rho.rows(), rho.cols());
      for (const auto& k : kraus_) out += k * rho * k.adjoint();
      rho = std::move(out);
      return;
    }
  }
}

std::vector<Operator> noisy_preparations(HalfInt j, const SpamModel& spam, RandomStream& rng) {
  const int d = dim(j);
  std::vector<Operator> preps;
  preps.reserve(size_t(d));
  for (int r = 0; r < d; ++r) {
    // One axis draw per level, in descending-ell order, even when phi = 0,
    // so the stream layout does not depend on the angle.
    double axis[3];
    random_axis(rng, axis);
    Operator rho = Operator::Zero(d, d);
    rho(r, r) = 1.0;
    if (spam.prep_angle != 0) {
      Operator v = axis_rotation(j, axis, spam.prep_angle);
      rho = v * rho * v.adjoint();
    }
    preps.push_back(std::move(rho));
  }
  return preps;
}

std::vector<Operator> noisy_povm(HalfInt j, const SpamModel& spam, RandomStream& rng) {
  const int d = dim(j);
  std::vector<Operator> effects;
  effects.reserve(size_t(d));
  for (int r = 0; r < d; ++r) {
    Operator e = Operator::Zero(d, d);
    e(r, r) = 1.0;
    effects.push_back(std::move(e));
  }
  switch (spam.meas_kind) {
    case SpamModel::MeasKind::ideal:
      break;
    case SpamModel::MeasKind::coherent_rotation: {
      double axis[3];
      random_axis(rng, axis);
      Operator v = axis_rotation(j, axis, spam.meas_angle);
      for (auto& e : effects) e = v * e * v.adjoint();
      break;
    }
    case SpamModel::MeasKind::permutation: {
      // Fisher-Yates with the dedicated SPAM stream; identity permutations
      // are legal (and the stream determines which one we get).
      std::vector<int> perm(static_cast<size_t>(d));
      std::iota(perm.begin(), perm.end(), 0);
      for (int i = d - 1; i > 0; --i)
        std::swap(perm[size_t(i)], perm[size_t(rng.below(uint64_t(i) + 1))]);
      std::vector<Operator> permuted;
      permuted.reserve(size_t(d));
      for (int r = 0; r < d; ++r) permuted.push_back(effects[size_t(perm[size_t(r)])]);
      effects = std::move(permuted);
      break;
    }
  }
  return effects;
}

}  // namespace su2rb
