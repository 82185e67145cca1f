#pragma once

#include <complex>

#include "su2rb/half_int.hpp"

namespace su2rb {

// Euler angles in the z-y-z convention: D(g) = e^{-i alpha Jz} e^{-i beta Jy} e^{-i gamma Jz}.
// Canonical domain: alpha in [0,2pi), beta in [0,pi], gamma in [0,2pi).
struct EulerAngles {
  double alpha = 0;
  double beta = 0;
  double gamma = 0;
};

// Axis-angle parametrization: D(g) = exp(-i theta n.J), theta in [0,pi],
// axis = (sin T cos P, sin T sin P, cos T) a unit 3-vector.
struct AxisAngle {
  double theta = 0;
  double axis[3] = {0, 0, 1};
};

// log(n!) with a cached table; n must be >= 0.
double log_factorial(int n);

// Clebsch-Gordan coefficient C^{j,m}_{j1,m1;j2,m2} (Condon-Shortley phase,
// all coefficients real). Returns 0 when m != m1+m2 or the triangle
// inequality fails; throws std::domain_error when a magnetic label is out of
// range or has the wrong parity for its spin.
double clebsch_gordan(HalfInt j1, HalfInt m1, HalfInt j2, HalfInt m2, HalfInt j, HalfInt m);

// Wigner 6-j symbol {j1 j2 j3; j4 j5 j6} by the Racah sum. Returns 0 when any
// of the four triads violates the triangle condition.
double wigner_6j(HalfInt j1, HalfInt j2, HalfInt j3, HalfInt j4, HalfInt j5, HalfInt j6);

// Wigner small-d matrix element d^k_{q,q'}(beta) = <k,q| e^{-i beta Jy} |k,q'>.
double wigner_small_d(HalfInt k, HalfInt q, HalfInt qp, double beta);

// Wigner big-D matrix element D^k_{q,q'}(g) = e^{-i q alpha} d^k_{q,q'}(beta) e^{-i q' gamma}.
std::complex<double> wigner_big_D(HalfInt k, HalfInt q, HalfInt qp, const EulerAngles& g);

// SU(2) irreducible character chi_k(theta) = sin((2k+1) theta/2) / sin(theta/2).
// The theta -> 0 limit (value 2k+1) is handled by a Taylor expansion.
double character(HalfInt k, double theta);

// Legendre polynomial P_k(x) by the three-term recurrence.
double legendre_p(int k, double x);

}  // namespace su2rb
