#include "su2rb/superop.hpp"

#include <cmath>
#include <mutex>
#include <stdexcept>
#include <unordered_map>

namespace su2rb {

Superoperator rotation_superop(HalfInt j, const GroupElement& g) {
  Superoperator s(j);
  EulerAngles e = g.euler_angles_su2();
  for (int k = 0; k <= j.twice(); ++k) {
    Eigen::MatrixXd dmat = small_d_matrix(HalfInt(k), e.beta);
    const int n = block_size(k);
    Eigen::VectorXcd pa(n), pg(n);
    for (int r = 0; r < n; ++r) {
      double q = k - r;  // q descending within the block
      pa(r) = std::polar(1.0, -q * e.alpha);
      pg(r) = std::polar(1.0, -q * e.gamma);
    }
    s.block(k) = pa.asDiagonal() * dmat * pg.asDiagonal();
  }
  return s;
}

namespace {

// The spherical-tensor operator basis for spin j, flattened in basis order.
// Built once per j; immutable afterwards.
const std::vector<Operator>& tensor_basis(HalfInt j) {
  static std::mutex mu;
  static std::unordered_map<int, std::vector<Operator>*> cache;
  {
    std::lock_guard<std::mutex> lock(mu);
    auto it = cache.find(j.twice());
    if (it != cache.end()) return *it->second;
  }
  auto* basis = new std::vector<Operator>();
  for (int k = 0; k <= j.twice(); ++k)
    for (int tq = k; tq >= -k; --tq) basis->push_back(spherical_tensor(j, HalfInt(k), HalfInt(tq)));
  std::lock_guard<std::mutex> lock(mu);
  auto [it, inserted] = cache.emplace(j.twice(), basis);
  if (!inserted) delete basis;
  return *it->second;
}

}  // namespace

Superoperator channel_superop(HalfInt j, const std::vector<Operator>& kraus) {
  const int d = dim(j);
  for (const auto& kop : kraus)
    if (kop.rows() != d || kop.cols() != d)
      throw std::invalid_argument("channel_superop: Kraus operator dimension mismatch");
  const auto& basis = tensor_basis(j);
  Superoperator s(j);
  const int n = s.size();
  // Column c: image of basis op c under the channel, projected on every row op.
  for (int c = 0; c < n; ++c) {
    Operator img = Operator::Zero(d, d);
    for (const auto& kop : kraus) img += kop * basis[size_t(c)] * kop.adjoint();
    for (int r = 0; r < n; ++r) s.mat(r, c) = (basis[size_t(r)].adjoint() * img).trace();
  }
  return s;
}

Superoperator irrep_projector(HalfInt j, int k) {
  if (k < 0 || k > j.twice()) throw std::domain_error("irrep_projector: k out of range");
  Superoperator s(j);
  for (int i = 0; i < block_size(k); ++i) s.mat(block_offset(k) + i, block_offset(k) + i) = 1.0;
  return s;
}

MMatrix m_matrix(HalfInt j) {
  const int d = dim(j);
  MMatrix m{j, Eigen::MatrixXd(d, d)};
  for (int k = 0; k < d; ++k) {
    double norm = std::sqrt(double(2 * k + 1) / double(d));
    for (int c = 0; c < d; ++c) {
      HalfInt ell = level_of_index(j, c);
      m.mat(k, c) = norm * clebsch_gordan(j, ell, HalfInt(k), HalfInt(0), j, ell);
    }
  }
  return m;
}

FMatrix f_matrix(HalfInt j, bool normalized) {
  const int d = dim(j);
  FMatrix f;
  f.j = j;
  f.normalized = normalized;
  f.mat.resize(d, d);
  for (int k = 0; k < d; ++k)
    for (int kp = 0; kp < d; ++kp) {
      // F_{kk'} = (-1)^{2j+k+k'} {k j j; k' j j}, times (2j+1) when normalized.
      double sixj = wigner_6j(HalfInt(k), j, j, HalfInt(kp), j, j);
      double sign = ((j.twice() + k + kp) % 2 == 0) ? 1.0 : -1.0;
      f.mat(k, kp) = sign * sixj * (normalized ? double(d) : 1.0);
    }
  // Cache the inverse (direct solve) and the condition number once.
  Eigen::FullPivLU<Eigen::MatrixXd> lu(f.mat);
  f.inv = lu.inverse();
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(f.mat);
  f.condition_number = svd.singularValues()(0) / svd.singularValues()(d - 1);
  return f;
}

Superoperator weight_k_map(HalfInt j, int k) {
  if (k < 0 || k > j.twice()) throw std::domain_error("weight_k_map: k out of range");
  double norm = 1.0 / std::sqrt(double(2 * k + 1));
  std::vector<Operator> kraus;
  for (int q = k; q >= -k; --q) kraus.push_back(norm * spherical_tensor(j, HalfInt(k), HalfInt(q)));
  return channel_superop(j, kraus);
}

Eigen::VectorXd exact_quality_params(const Superoperator& channel) {
  const int nk = channel.j.twice() + 1;
  Eigen::VectorXd f(nk);
  for (int k = 0; k < nk; ++k)
    f(k) = channel.block(k).trace().real() / double(block_size(k));
  return f;
}

Superoperator twirl(const Superoperator& channel) {
  Eigen::VectorXd f = exact_quality_params(channel);
  Superoperator s(channel.j);
  for (int k = 0; k <= channel.j.twice(); ++k)
    for (int i = 0; i < block_size(k); ++i)
      s.mat(block_offset(k) + i, block_offset(k) + i) = f(k);
  return s;
}

double average_fidelity(HalfInt j, const Eigen::VectorXd& f) {
  const int d = dim(j);
  if (f.size() != d) throw std::invalid_argument("average_fidelity: f has wrong length");
  double acc = 0;
  for (int k = 0; k < d; ++k) acc += (2 * k + 1) * f(k);
  return (acc / d + 1.0) / (d + 1.0);
}

Superoperator rank1_spam_superop(HalfInt j, int k) {
  if (k < 0 || k > j.twice()) throw std::domain_error("rank1_spam_superop: k out of range");
  Superoperator s(j);
  s.mat(tensor_index(k, 0), tensor_index(k, 0)) = 1.0;
  return s;
}

}  // namespace su2rb
