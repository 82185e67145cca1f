#pragma once

#include <Eigen/Dense>
#include <vector>

#include "su2rb/spinrep.hpp"

namespace su2rb {

// Ordered spherical-tensor basis index: blocks k = 0..2j in ascending order,
// q = k..-k descending within each block. Block k starts at offset k^2 and
// has size 2k+1; d^k_00 sits at the middle diagonal entry of block k.
inline int block_offset(int k) { return k * k; }
inline int block_size(int k) { return 2 * k + 1; }
// Index of |T^{(k)}_q>> in the flattened basis.
inline int tensor_index(int k, int q) { return k * k + (k - q); }

// Dense superoperator on the spin-j operator space, expressed in the ordered
// spherical-tensor basis, with the block-diagonal ("kite") structure carried
// as metadata. Rotation superoperators are exactly block diagonal.
struct Superoperator {
  HalfInt j;
  Eigen::MatrixXcd mat;
  std::vector<int> block_sizes;  // (1, 3, ..., 4j+1)

  explicit Superoperator(HalfInt spin)
      : j(spin), mat(Eigen::MatrixXcd::Zero(dim(spin) * dim(spin), dim(spin) * dim(spin))) {
    for (int k = 0; k <= spin.twice(); ++k) block_sizes.push_back(block_size(k));
  }

  int size() const { return int(mat.rows()); }
  // View of irrep block k (O(1) index arithmetic on the dense storage).
  Eigen::Block<Eigen::MatrixXcd> block(int k) {
    return mat.block(block_offset(k), block_offset(k), block_size(k), block_size(k));
  }
  Eigen::Block<const Eigen::MatrixXcd> block(int k) const {
    return mat.block(block_offset(k), block_offset(k), block_size(k), block_size(k));
  }
};

// Orthogonal change of basis between Jz eigenprojectors (physical SPAM) and
// diagonal spherical tensors (synthetic SPAM). Rows k = 0..2j,
// columns ell = j..-j; M_{k,ell} = <ell| T^{(k)}_0 |ell>.
struct MMatrix {
  HalfInt j;
  Eigen::MatrixXd mat;
};

// Discrete "Fourier" matrix relating error rates to quality parameters,
// f = F p. The normalized variant omits the 1/(2j+1) prefactor so that the
// first row and column are all ones. The inverse is solved once and cached
// together with the condition number.
struct FMatrix {
  HalfInt j;
  bool normalized = true;
  Eigen::MatrixXd mat;
  Eigen::MatrixXd inv;
  double condition_number = 0;
};

// Block-diagonal rotation superoperator: block k equals D^k(g).
Superoperator rotation_superop(HalfInt j, const GroupElement& g);

// Superoperator of the channel rho -> sum_i K_i rho K_i^dag in the
// spherical-tensor basis; entries <<T^{(k)}_q| E(T^{(k')}_{q'})>>.
Superoperator channel_superop(HalfInt j, const std::vector<Operator>& kraus);

// Diagonal 0/1 projector onto irrep block k; idempotent, rank 2k+1.
Superoperator irrep_projector(HalfInt j, int k);

MMatrix m_matrix(HalfInt j);
FMatrix f_matrix(HalfInt j, bool normalized = true);

// Uniformly-random-weight-k error map
// G^{(k)}: rho -> (1/(2k+1)) sum_q T^{(k)}_q rho (T^{(k)}_q)^dag.
Superoperator weight_k_map(HalfInt j, int k);

// Quality parameters f_k = (1/(2k+1)) sum_q <<T^{(k)}_q| E(T^{(k)}_q)>>
// (the normalized trace of diagonal block k).
Eigen::VectorXd exact_quality_params(const Superoperator& channel);

// Group twirl of a channel: sum_k f_k Pi_k.
Superoperator twirl(const Superoperator& channel);

// Average fidelity (d^{-1} sum_k (2k+1) f_k + 1) / (d+1), d = 2j+1.
double average_fidelity(HalfInt j, const Eigen::VectorXd& f);

// Rank-1 projector |T^{(k)}_0>><<T^{(k)}_0|.
Superoperator rank1_spam_superop(HalfInt j, int k);

}  // namespace su2rb
