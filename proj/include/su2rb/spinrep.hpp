#pragma once

#include <Eigen/Dense>
#include <array>

#include "su2rb/half_int.hpp"
#include "su2rb/rng.hpp"
#include "su2rb/wigner.hpp"

namespace su2rb {

// SU(2) group element stored exactly as a unit quaternion (w, x, y, z),
// identified with the matrix w*I - i (x sx + y sy + z sz) in the fundamental
// representation. Composition is the quaternion product (renormalized), so
// m-fold products and inversion gates carry no representation-dimension error.
class GroupElement {
 public:
  GroupElement() : w_(1), x_(0), y_(0), z_(0) {}
  // Builds from raw components; throws if the norm deviates from 1 by more
  // than 1e-12, otherwise renormalizes exactly.
  GroupElement(double w, double x, double y, double z);

  static GroupElement identity() { return GroupElement(); }
  static GroupElement from_euler(const EulerAngles& e);
  static GroupElement from_axis_angle(const AxisAngle& aa);

  double w() const { return w_; }
  double x() const { return x_; }
  double y() const { return y_; }
  double z() const { return z_; }

  GroupElement inverse() const {
    GroupElement g;
    g.w_ = w_; g.x_ = -x_; g.y_ = -y_; g.z_ = -z_;
    return g;
  }

  // Canonical Euler angles of the SO(3) rotation (alpha in [0,2pi),
  // beta in [0,pi], gamma in [0,2pi)); beta in {0,pi} resolved by gamma = 0
  // with the full phase in alpha.
  EulerAngles euler_angles() const;

  // Euler angles that reproduce this quaternion exactly, including its sign
  // as an SU(2) element (alpha/gamma may fall outside the canonical ranges).
  // Used internally so that representation matrices multiply exactly.
  EulerAngles euler_angles_su2() const;

  // Canonical axis-angle of the SO(3) rotation; theta = 0 maps to the z axis.
  AxisAngle axis_angle() const;

  friend GroupElement compose(const GroupElement& a, const GroupElement& b);

 private:
  void renormalize();
  double w_, x_, y_, z_;
};

// Group product with D(compose(a,b)) = D(a) D(b), i.e. b acts first.
GroupElement compose(const GroupElement& a, const GroupElement& b);
inline GroupElement inverse(const GroupElement& a) { return a.inverse(); }

// Dense complex operator on the spin-j space. Rows/columns are indexed by
// ell = j, j-1, ..., -j (descending).
using Operator = Eigen::MatrixXcd;

inline int dim(HalfInt j) { return j.twice() + 1; }
// Row/column index of the Jz level ell.
inline int level_index(HalfInt j, HalfInt ell) { return (j.twice() - ell.twice()) / 2; }
inline HalfInt level_of_index(HalfInt j, int idx) { return HalfInt::from_twice(j.twice() - 2 * idx); }

// (Jx, Jy, Jz) from the ladder-operator formulas; all Hermitian.
std::array<Operator, 3> angular_momentum(HalfInt j);

// Spherical tensor operator T^{(k)}_q, entries
// sqrt((2k+1)/(2j+1)) C^{j,m'+q}_{j,m';k,q} at (row m'+q, col m').
Operator spherical_tensor(HalfInt j, HalfInt k, HalfInt q);

// Full small-d matrix d^j(beta) (real orthogonal), rows/cols descending m.
// Uses a per-j cached coefficient table; this is the hot path of the
// simulation engine.
Eigen::MatrixXd small_d_matrix(HalfInt j, double beta);

// Unitary D(g) = diag-phase(alpha) d^j(beta) diag-phase(gamma), built from the
// sign-preserving SU(2) Euler angles so D(g1)D(g2) = D(g1 g2) exactly.
Operator rotation_matrix(HalfInt j, const GroupElement& g);

// Uniform (Haar) sample: alpha = 2*pi*a, beta = arccos(1-2b), gamma = 2*pi*c.
GroupElement haar_sample(RandomStream& rng);

// Parametrization conversions; round-trips preserve the SO(3) rotation.
AxisAngle euler_to_axis_angle(const EulerAngles& e);
EulerAngles axis_angle_to_euler(const AxisAngle& aa);

}  // namespace su2rb
