// End-to-end acceptance suite. Each criterion prints exactly one PASS/FAIL
// line; the process exits with the number of failed criteria. All tolerances
// are pinned in this file.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <string>
#include <vector>

#include "su2rb/campaign.hpp"

using namespace su2rb;

namespace {

HalfInt h2(int twice) { return HalfInt::from_twice(twice); }

struct Check {
  bool ok = true;
  std::string detail;
  void require(bool cond, const std::string& what) {
    if (!cond && ok) {
      ok = false;
      detail = what;
    }
  }
};

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.6g", v);
  return buf;
}

// |got - want| within half a unit of want's 4th significant digit.
bool sig4(double got, double want) {
  if (want == 0.0) return std::abs(got) < 1e-10;
  double tol = 0.55 * std::pow(10.0, std::floor(std::log10(std::abs(want))) - 3);
  return std::abs(got - want) <= tol;
}

// ---------------------------------------------------------------------------
// Criterion 1: exact M matrix at j = 7/2 to 1e-12.
bool criterion1(Check& c) {
  const double s = 0.5;  // global prefactor
  auto r = [](double num, double den) { return std::sqrt(num / den); };
  // Rows k = 0..7, columns ell = 7/2 ... -7/2.
  const double want[8][8] = {
      {r(1, 2), r(1, 2), r(1, 2), r(1, 2), r(1, 2), r(1, 2), r(1, 2), r(1, 2)},
      {r(7, 6), 5 / std::sqrt(42.0), r(3, 14), 1 / std::sqrt(42.0), -1 / std::sqrt(42.0),
       -r(3, 14), -5 / std::sqrt(42.0), -r(7, 6)},
      {r(7, 6), 1 / std::sqrt(42.0), -r(3, 14), -5 / std::sqrt(42.0), -5 / std::sqrt(42.0),
       -r(3, 14), 1 / std::sqrt(42.0), r(7, 6)},
      {7 / std::sqrt(66.0), -5 / std::sqrt(66.0), -7 / std::sqrt(66.0), -r(3, 22), r(3, 22),
       7 / std::sqrt(66.0), 5 / std::sqrt(66.0), -7 / std::sqrt(66.0)},
      {r(7, 22), -13 / std::sqrt(154.0), -3 / std::sqrt(154.0), 9 / std::sqrt(154.0),
       9 / std::sqrt(154.0), -3 / std::sqrt(154.0), -13 / std::sqrt(154.0), r(7, 22)},
      {r(7, 78), -23 / std::sqrt(546.0), 17 / std::sqrt(546.0), 5 * r(3, 182), -5 * r(3, 182),
       -17 / std::sqrt(546.0), 23 / std::sqrt(546.0), -r(7, 78)},
      {1 / std::sqrt(66.0), -5 / std::sqrt(66.0), 3 * r(3, 22), -5 / std::sqrt(66.0),
       -5 / std::sqrt(66.0), 3 * r(3, 22), -5 / std::sqrt(66.0), 1 / std::sqrt(66.0)},
      {1 / std::sqrt(858.0), -7 / std::sqrt(858.0), 7 * r(3, 286), -35 / std::sqrt(858.0),
       35 / std::sqrt(858.0), -7 * r(3, 286), 7 / std::sqrt(858.0), -1 / std::sqrt(858.0)},
  };
  MMatrix m = m_matrix(h2(7));
  for (int k = 0; k < 8; ++k)
    for (int col = 0; col < 8; ++col)
      c.require(std::abs(m.mat(k, col) - s * want[k][col]) < 1e-12,
                "M(" + std::to_string(k) + "," + std::to_string(col) + ") = " + fmt(m.mat(k, col)) +
                    " want " + fmt(s * want[k][col]));
  return c.ok;
}

// ---------------------------------------------------------------------------
// Criterion 2: normalized F at j = 7/2 to 1e-12; 6-j route equals the
// four-tensor trace average for j in {1/2, 1, 3/2, 2} to 1e-10.
double f_trace_entry(HalfInt j, int k, int kp) {
  std::complex<double> acc = 0;
  for (int q = -k; q <= k; ++q) {
    Operator tkq = spherical_tensor(j, HalfInt(k), HalfInt(q));
    Operator tkmq = spherical_tensor(j, HalfInt(k), HalfInt(-q));
    for (int qp = -kp; qp <= kp; ++qp) {
      double sign = ((q + qp) % 2 == 0) ? 1.0 : -1.0;
      acc += sign * (tkq * spherical_tensor(j, HalfInt(kp), HalfInt(qp)) * tkmq *
                     spherical_tensor(j, HalfInt(kp), HalfInt(-qp)))
                        .trace();
    }
  }
  return acc.real() * dim(j) / double((2 * k + 1) * (2 * kp + 1));
}

bool criterion2(Check& c) {
  auto q = [](double num, double den) { return num / den; };
  const double want[8][8] = {
      {1, 1, 1, 1, 1, 1, 1, 1},
      {1, q(59, 63), q(17, 21), q(13, 21), q(23, 63), q(1, 21), q(-1, 3), q(-7, 9)},
      {1, q(17, 21), q(7, 15), q(1, 21), q(-1, 3), q(-11, 21), q(-1, 3), q(7, 15)},
      {1, q(13, 21), q(1, 21), q(-31, 77), q(-101, 231), q(1, 77), q(17, 33), q(-7, 33)},
      {1, q(23, 63), q(-1, 3), q(-101, 231), q(1, 9), q(103, 231), q(-1, 3), q(7, 99)},
      {1, q(1, 21), q(-11, 21), q(1, 77), q(103, 231), q(-33, 91), q(53, 429), q(-7, 429)},
      {1, q(-1, 3), q(-1, 3), q(17, 33), q(-1, 3), q(53, 429), q(-1, 39), q(1, 429)},
      {1, q(-7, 9), q(7, 15), q(-7, 33), q(7, 99), q(-7, 429), q(1, 429), q(-1, 6435)},
  };
  FMatrix fm = f_matrix(h2(7), true);
  for (int k = 0; k < 8; ++k)
    for (int kp = 0; kp < 8; ++kp)
      c.require(std::abs(fm.mat(k, kp) - want[k][kp]) < 1e-12,
                "F(" + std::to_string(k) + "," + std::to_string(kp) + ") = " +
                    fmt(fm.mat(k, kp)) + " want " + fmt(want[k][kp]));
  for (int tj : {1, 2, 3, 4}) {
    HalfInt j = h2(tj);
    FMatrix f = f_matrix(j, true);
    for (int k = 0; k <= tj; ++k)
      for (int kp = 0; kp <= tj; ++kp)
        c.require(std::abs(f.mat(k, kp) - f_trace_entry(j, k, kp)) < 1e-10,
                  "trace-oracle mismatch at 2j=" + std::to_string(tj));
  }
  return c.ok;
}

// ---------------------------------------------------------------------------
// Criterion 3: both 32-entry zero-noise variance tables to 1e-3 absolute,
// with automatic best-level selection for the physical-SPAM columns.
bool criterion3(Check& c) {
  // Per-rank table at j = 7/2: columns chirb, r1rb, sschirb, ssr1rb.
  const double with_k[8][4] = {
      {7, 7, 0, 0},
      {28.6816, 7.52245, 1.07619, 0.269048},
      {91.8386, 12.5807, 3.23842, 0.540816},
      {308.139, 42.3744, 6.15572, 0.773292},
      {268.103, 21.0241, 10.4498, 1.02387},
      {514.734, 32.779, 15.668, 1.28994},
      {404.56, 23.2173, 23.0531, 1.62223},
      {381.656, 21.6442, 34.0697, 2.11888},
  };
  HalfInt j72 = h2(7);
  const int best_chirb_twice[8] = {7, 7, 7, 3, 5, 5, 3, 1};
  for (int k = 0; k < 8; ++k) {
    HalfInt lc = best_ell(Protocol::chirb, j72, k);
    HalfInt lr = best_ell(Protocol::r1rb, j72, k);
    c.require(lc.twice() == best_chirb_twice[k],
              "best level for weighted physical SPAM at k=" + std::to_string(k) + " is " +
                  lc.str());
    double v[4] = {zero_noise_variance(Protocol::chirb, j72, k, lc),
                   zero_noise_variance(Protocol::r1rb, j72, k, lr),
                   zero_noise_variance(Protocol::sschirb, j72, k),
                   zero_noise_variance(Protocol::ssr1rb, j72, k)};
    for (int col = 0; col < 4; ++col)
      c.require(std::abs(v[col] - with_k[k][col]) < 1e-3,
                "per-rank table (" + std::to_string(k) + "," + std::to_string(col) + ") = " +
                    fmt(v[col]) + " want " + fmt(with_k[k][col]));
  }
  // Per-spin table at k = 2j, rows 2j = 0..7.
  const double with_j[8][4] = {
      {0, 0, 0, 0},
      {23, 5, 4, 1},
      {25.25, 4.89286, 8.66667, 1.40476},
      {91.1811, 9.9465, 13.408, 1.63867},
      {95.25, 11.163, 18.4047, 1.80578},
      {209.672, 15.5894, 23.5132, 1.9322},
      {215.636, 18.0822, 28.7441, 2.03407},
      {381.656, 21.6442, 34.0697, 2.11888},
  };
  for (int tj = 0; tj <= 7; ++tj) {
    HalfInt j = h2(tj);
    int k = tj;
    HalfInt lc = best_ell(Protocol::chirb, j, k);
    HalfInt lr = best_ell(Protocol::r1rb, j, k);
    if (tj > 0)
      c.require(lc.twice() == (tj % 2 == 0 ? 0 : 1),
                "per-spin best level at 2j=" + std::to_string(tj) + " is " + lc.str());
    double v[4] = {zero_noise_variance(Protocol::chirb, j, k, lc),
                   zero_noise_variance(Protocol::r1rb, j, k, lr),
                   zero_noise_variance(Protocol::sschirb, j, k),
                   zero_noise_variance(Protocol::ssr1rb, j, k)};
    for (int col = 0; col < 4; ++col)
      c.require(std::abs(v[col] - with_j[tj][col]) < 1e-3,
                "per-spin table (" + std::to_string(tj) + "," + std::to_string(col) + ") = " +
                    fmt(v[col]) + " want " + fmt(with_j[tj][col]));
  }
  // Headline complexity ratio at k = 7 is about two orders of magnitude.
  double ratio = with_k[7][0] / with_k[7][3];
  c.require(ratio > 100.0, "complexity ratio");
  return c.ok;
}

// ---------------------------------------------------------------------------
// Criterion 4: SSRB zero-noise degeneracy at N = 1000 circuits.
bool criterion4(Check& c) {
  ExperimentPlan plan;
  plan.j = h2(7);
  plan.protocol = Protocol::ssrb;
  plan.num_circuits = 1000;
  plan.shots = Shots::infinite_shots();
  plan.seed = 2026;
  ProbabilityTable t = estimate(plan);
  MMatrix m = m_matrix(plan.j);
  for (size_t mi = 0; mi < t.ms.size(); ++mi) {
    Eigen::MatrixXd conj = m.mat * t.P(int(mi)) * m.mat.transpose();
    double err =
        (conj - Eigen::MatrixXd::Identity(conj.rows(), conj.cols())).cwiseAbs().maxCoeff();
    c.require(err < 1e-12, "M P_m M^T deviates from identity by " + fmt(err) + " at m=" +
                               std::to_string(t.ms[mi]));
    for (int k = 0; k < t.n_k; ++k)
      c.require(t.variance(int(mi), k) <= 1e-24,
                "estimator variance " + fmt(t.variance(int(mi), k)) + " at m=" +
                    std::to_string(t.ms[mi]) + ", k=" + std::to_string(k));
  }
  return c.ok;
}

// ---------------------------------------------------------------------------
// Criterion 5: empirical vs closed-form zero-noise variances at j = 7/2,
// 1e5 single-shot circuits, m = 1, k in {1, 4, 7}, within 5%.
bool criterion5(Check& c) {
  for (Protocol proto : {Protocol::sschirb, Protocol::ssr1rb}) {
    ExperimentPlan plan;
    plan.j = h2(7);
    plan.protocol = proto;
    plan.sequence_lengths = {1};
    plan.num_circuits = 100000;
    plan.shots = Shots::finite(1);
    plan.seed = 515;
    ProbabilityTable t = estimate(plan);
    for (int k : {1, 4, 7}) {
      double want = zero_noise_variance(proto, plan.j, k);
      double got = t.variance(0, k);
      c.require(std::abs(got - want) < 0.05 * want,
                std::string(protocol_name(proto)) + " k=" + std::to_string(k) + ": " + fmt(got) +
                    " vs " + fmt(want));
    }
  }
  return c.ok;
}

// ---------------------------------------------------------------------------
// Shared campaign runner for criteria 6-8.
RBResult run_campaign_inline(Protocol proto, const NoiseModel& noise, const SpamModel& spam,
                             uint64_t seed) {
  ExperimentPlan plan;
  plan.j = h2(7);
  plan.protocol = proto;
  plan.num_circuits = 10000;
  plan.shots = Shots::infinite_shots();
  plan.noise = noise;
  plan.spam = spam;
  plan.seed = seed;
  ProbabilityTable t = estimate(plan);
  return analyze(t, f_matrix(plan.j, true));
}

const double kCoherentPRow[8] = {0.9668, 0.0, 0.03301, 0.0, 1.434e-4, 0.0, 1.110e-7, 0.0};
const double kDephasingPRow[8] = {0.9068, 0.08787, 0.005118, 1.991e-4,
                                  5.315e-6, 9.504e-8, 1.039e-9, 5.297e-12};

// Criterion 6: coherent-noise campaign plus exact prediction.
bool criterion6(Check& c) {
  NoiseModel noise = NoiseModel::coherent(0.04);
  for (Protocol proto : {Protocol::sschirb, Protocol::ssr1rb}) {
    RBResult res = run_campaign_inline(proto, noise, SpamModel::ideal(), 606);
    c.require(std::abs(res.p_raw(2) - 0.03301) < 3 * res.sigma_p(2),
              std::string(protocol_name(proto)) + " p2 = " + fmt(res.p_raw(2)) + " +- " +
                  fmt(res.sigma_p(2)));
    c.require(std::abs(res.p_raw(1)) < 3 * res.sigma_p(1),
              std::string(protocol_name(proto)) + " p1 not consistent with 0");
    c.require(std::abs(res.p_raw(3)) < 3 * res.sigma_p(3),
              std::string(protocol_name(proto)) + " p3 not consistent with 0");
  }
  Prediction pred = predict_error_rates(h2(7), noise);
  for (int k = 0; k < 8; ++k)
    c.require(sig4(pred.p_raw(k), kCoherentPRow[k]),
              "predicted p" + std::to_string(k) + " = " + fmt(pred.p_raw(k)) + " want " +
                  fmt(kCoherentPRow[k]));
  return c.ok;
}

// Criterion 7: dephasing campaign plus exact prediction.
bool criterion7(Check& c) {
  NoiseModel noise = NoiseModel::dephasing(0.01);
  for (Protocol proto : {Protocol::sschirb, Protocol::ssr1rb}) {
    RBResult res = run_campaign_inline(proto, noise, SpamModel::ideal(), 707);
    c.require(std::abs(res.p_raw(1) - 0.08787) < 3 * res.sigma_p(1),
              std::string(protocol_name(proto)) + " p1 = " + fmt(res.p_raw(1)) + " +- " +
                  fmt(res.sigma_p(1)));
  }
  Prediction pred = predict_error_rates(h2(7), noise);
  for (int k = 0; k < 8; ++k)
    c.require(sig4(pred.p_raw(k), kDephasingPRow[k]),
              "predicted p" + std::to_string(k) + " = " + fmt(pred.p_raw(k)) + " want " +
                  fmt(kDephasingPRow[k]));
  return c.ok;
}

// Criterion 8: SPAM robustness contrast under large preparation error and a
// permuted readout.
bool criterion8(Check& c) {
  NoiseModel noise = NoiseModel::coherent(0.04);
  SpamModel spam;
  spam.prep_angle = 0.2;
  spam.meas_kind = SpamModel::MeasKind::permutation;
  for (Protocol proto : {Protocol::sschirb, Protocol::ssr1rb}) {
    RBResult res = run_campaign_inline(proto, noise, spam, 808);
    c.require(std::abs(res.p_raw(2) - 0.03301) < 3 * res.sigma_p(2),
              std::string(protocol_name(proto)) + " p2 = " + fmt(res.p_raw(2)) + " +- " +
                  fmt(res.sigma_p(2)) + " under SPAM error");
  }
  RBResult ssrb = run_campaign_inline(Protocol::ssrb, noise, spam, 808);
  c.require(std::abs(ssrb.p_raw(2) - 0.03301) > 3 * ssrb.sigma_p(2),
            "ssrb p2 = " + fmt(ssrb.p_raw(2)) + " +- " + fmt(ssrb.sigma_p(2)) +
                " unexpectedly robust to SPAM error");
  return c.ok;
}

// ---------------------------------------------------------------------------
// Criterion 9: frame sample-complexity calculator in exact rationals.
bool criterion9(Check& c) {
  using R = Rational;
  auto check = [&](FrameScheme scheme, int n, const BigInt& group, const R& uniform,
                   const R& optimal, const char* name) {
    FrameComplexity fc = qubit_frame_complexity(scheme, n);
    c.require(fc.n_group == group && fc.uniform_metric == uniform && fc.optimal_metric == optimal,
              std::string(name) + " metrics");
    BigInt count = 0;
    R l1 = 0, l2 = 0;
    for (const auto& [v, mult] : fc.coefficients) {
      count += mult;
      l1 += R(mult) * boost::multiprecision::abs(v);
      l2 += R(mult) * v * v;
    }
    c.require(count == group && R(group) * l2 == uniform && l1 * l1 == optimal,
              std::string(name) + " coefficient multiset");
  };
  check(FrameScheme::clifford_char, 1, 24, R(9), R(81, 16), "clifford_char");
  check(FrameScheme::pauli_char, 1, 4, R(1), R(1), "pauli_char");
  check(FrameScheme::z2_char, 1, 2, R(1), R(1), "z2_char");
  check(FrameScheme::pauli_frame_full, 1, 4, R(3), R(9, 4), "pauli_frame_full");
  check(FrameScheme::nonpauli_frame_full, 1, 12, R(9), R(9), "nonpauli_frame_full");
  for (int n = 1; n <= 4; ++n) {
    BigInt group = boost::multiprecision::pow(BigInt(4), unsigned(n));
    R q(1, group);
    check(FrameScheme::nqubit_full, n, group, R(group) - 1, 4 * (1 - q) * (1 - q), "nqubit_full");
    check(FrameScheme::nqubit_rank1, n, group, R(1), R(1), "nqubit_rank1");
  }
  return c.ok;
}

// ---------------------------------------------------------------------------
// Criterion 10: special-function and representation invariants for all spins
// up to 4 in half-integer steps.
bool criterion10(Check& c) {
  RandomStream rng(1010);
  for (int tj = 0; tj <= 8; ++tj) {
    HalfInt j = h2(tj);
    int d = dim(j);
    Operator id = Operator::Identity(d, d);

    // Representation homomorphism and exact inversion.
    for (int trial = 0; trial < 5; ++trial) {
      GroupElement a = haar_sample(rng), b = haar_sample(rng);
      double err = (rotation_matrix(j, compose(a, b)) - rotation_matrix(j, a) * rotation_matrix(j, b))
                       .cwiseAbs()
                       .maxCoeff();
      c.require(err < 1e-12, "homomorphism at 2j=" + std::to_string(tj));
      c.require((rotation_matrix(j, a) * rotation_matrix(j, a.inverse()) - id)
                        .cwiseAbs()
                        .maxCoeff() < 1e-12,
                "inversion at 2j=" + std::to_string(tj));
      Operator u = rotation_matrix(j, a);
      c.require((u * u.adjoint() - id).cwiseAbs().maxCoeff() < 1e-12,
                "unitarity at 2j=" + std::to_string(tj));
    }

    // Angular momentum algebra.
    if (tj > 0) {
      auto [jx, jy, jz] = angular_momentum(j);
      std::complex<double> i(0, 1);
      c.require((jx * jy - jy * jx - i * jz).cwiseAbs().maxCoeff() < 1e-12,
                "commutator at 2j=" + std::to_string(tj));
      double jv = j.value();
      c.require((jx * jx + jy * jy + jz * jz - jv * (jv + 1) * id).cwiseAbs().maxCoeff() < 1e-12,
                "Casimir at 2j=" + std::to_string(tj));
    }

    // Spherical tensor orthonormality, adjoint symmetry, covariance.
    GroupElement g = haar_sample(rng);
    Operator u = rotation_matrix(j, g);
    EulerAngles eg = g.euler_angles();
    for (int k = 0; k <= tj; ++k)
      for (int q = -k; q <= k; ++q) {
        Operator t = spherical_tensor(j, HalfInt(k), HalfInt(q));
        c.require((t.adjoint() -
                   double(parity_sign(q)) * spherical_tensor(j, HalfInt(k), HalfInt(-q)))
                          .cwiseAbs()
                          .maxCoeff() < 1e-12,
                  "tensor adjoint at 2j=" + std::to_string(tj));
        for (int kp = 0; kp <= tj; ++kp)
          for (int qp = -kp; qp <= kp; ++qp) {
            std::complex<double> ip =
                (t.adjoint() * spherical_tensor(j, HalfInt(kp), HalfInt(qp))).trace();
            double want = (k == kp && q == qp) ? 1.0 : 0.0;
            c.require(std::abs(ip - want) < 1e-12,
                      "tensor orthonormality at 2j=" + std::to_string(tj));
          }
        Operator cov = Operator::Zero(d, d);
        for (int qp = -k; qp <= k; ++qp)
          cov += wigner_big_D(HalfInt(k), HalfInt(qp), HalfInt(q), eg) *
                 spherical_tensor(j, HalfInt(k), HalfInt(qp));
        c.require((u * t * u.adjoint() - cov).cwiseAbs().maxCoeff() < 1e-11,
                  "tensor covariance at 2j=" + std::to_string(tj));
      }

    // Clebsch-Gordan orthogonality when coupling j with itself.
    if (tj > 0) {
      for (int tk = 0; tk <= 2 * tj; tk += 2)
        for (int tkp = 0; tkp <= 2 * tj; tkp += 2) {
          double acc = 0;
          for (int tm1 = -tj; tm1 <= tj; tm1 += 2)
            for (int tm2 = -tj; tm2 <= tj; tm2 += 2) {
              if (tm1 + tm2 != 0) continue;
              acc += clebsch_gordan(j, h2(tm1), j, h2(tm2), h2(tk), h2(0)) *
                     clebsch_gordan(j, h2(tm1), j, h2(tm2), h2(tkp), h2(0));
            }
          c.require(std::abs(acc - (tk == tkp ? 1.0 : 0.0)) < 1e-12,
                    "CG orthogonality at 2j=" + std::to_string(tj));
        }

      // 6-j contraction identity.
      for (int k = 0; k <= tj; ++k)
        for (int kp = 0; kp <= tj; ++kp) {
          double acc = 0;
          for (int l = 0; l <= tj; ++l)
            acc += parity_sign(h2(2 * tj - 2 * l)) * double(2 * l + 1) *
                   wigner_6j(h2(2 * l), j, j, h2(2 * k), j, j) *
                   wigner_6j(h2(2 * l), j, j, h2(2 * kp), j, j);
          double want =
              parity_sign(h2(2 * tj + 2 * k + 2 * kp)) * wigner_6j(h2(2 * k), j, j, h2(2 * kp), j, j);
          c.require(std::abs(acc - want) < 1e-11, "6-j contraction at 2j=" + std::to_string(tj));
        }
    }

    // Small-d orthogonality and the Legendre diagonal.
    for (double beta : {0.37, 2.6}) {
      Eigen::MatrixXd dmat = small_d_matrix(j, beta);
      c.require((dmat * dmat.transpose() - Eigen::MatrixXd::Identity(d, d)).cwiseAbs().maxCoeff() <
                    1e-12,
                "small-d orthogonality at 2j=" + std::to_string(tj));
      if (tj % 2 == 0 && tj > 0)
        c.require(std::abs(wigner_small_d(j, h2(0), h2(0), beta) -
                           legendre_p(tj / 2, std::cos(beta))) < 1e-12,
                  "Legendre diagonal at 2j=" + std::to_string(tj));
    }

    // Character sum rule: trace of the rotation superoperator block.
    if (tj > 0) {
      Superoperator s = rotation_superop(j, g);
      double theta = g.axis_angle().theta;
      for (int k = 0; k <= tj; ++k)
        c.require(std::abs(s.block(k).trace().real() - character(HalfInt(k), theta)) < 1e-10,
                  "block character at 2j=" + std::to_string(tj));
    }
  }
  return c.ok;
}

// ---------------------------------------------------------------------------
// Criterion 11: Monte Carlo projector synthesis converges as 1/sqrt(N).
bool criterion11(Check& c) {
  HalfInt j = h2(3);
  const int k = 2;
  const std::vector<long> ns = {1000, 4000, 16000};
  const int replicas = 6;
  Superoperator pi_k = irrep_projector(j, k);
  Superoperator q_k = rank1_spam_superop(j, k);
  RandomStream rng(1111);

  std::vector<double> err_pi(ns.size(), 0.0), err_q(ns.size(), 0.0);
  for (int rep = 0; rep < replicas; ++rep) {
    RandomStream stream = rng.child(uint64_t(rep));
    for (size_t ni = 0; ni < ns.size(); ++ni) {
      Eigen::MatrixXcd acc_pi = Eigen::MatrixXcd::Zero(pi_k.size(), pi_k.size());
      Eigen::MatrixXcd acc_q = acc_pi;
      RandomStream s = stream.child(uint64_t(ni));
      for (long i = 0; i < ns[ni]; ++i) {
        GroupElement g = haar_sample(s);
        Superoperator rot = rotation_superop(j, g);
        double theta = g.axis_angle().theta;
        double beta = g.euler_angles().beta;
        acc_pi += (2 * k + 1) * character(HalfInt(k), theta) * rot.mat;
        acc_q += (2 * k + 1) * wigner_small_d(HalfInt(k), h2(0), h2(0), beta) * rot.mat;
      }
      err_pi[ni] += (acc_pi / double(ns[ni]) - pi_k.mat).norm() / replicas;
      err_q[ni] += (acc_q / double(ns[ni]) - q_k.mat).norm() / replicas;
    }
  }
  auto slope = [&](const std::vector<double>& errs) {
    // Least-squares slope of log(err) against log(N).
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    int n = int(ns.size());
    for (int i = 0; i < n; ++i) {
      double x = std::log(double(ns[size_t(i)])), y = std::log(errs[size_t(i)]);
      sx += x;
      sy += y;
      sxx += x * x;
      sxy += x * y;
    }
    return (n * sxy - sx * sy) / (n * sxx - sx * sx);
  };
  double s_pi = slope(err_pi), s_q = slope(err_q);
  c.require(std::abs(s_pi + 0.5) < 0.2, "projector-synthesis slope " + fmt(s_pi));
  c.require(std::abs(s_q + 0.5) < 0.2, "rank-1-synthesis slope " + fmt(s_q));
  return c.ok;
}

}  // namespace

int main() {
  struct Criterion {
    const char* label;
    std::function<bool(Check&)> fn;
    double budget_seconds;
  };
  const std::vector<Criterion> criteria = {
      {"1 exact M matrix (2j=7)", criterion1, 1.0},
      {"2 exact F matrix and trace-average cross-check", criterion2, 10.0},
      {"3 zero-noise variance tables (64 entries, best levels)", criterion3, 10.0},
      {"4 SSRB zero-noise degeneracy (N=1000)", criterion4, 30.0},
      {"5 empirical single-shot variances within 5% (N=1e5)", criterion5, 600.0},
      {"6 coherent-noise campaign and exact prediction", criterion6, 900.0},
      {"7 dephasing campaign and exact prediction", criterion7, 900.0},
      {"8 SPAM-robustness contrast", criterion8, 1200.0},
      {"9 frame sample-complexity calculator (exact rationals)", criterion9, 5.0},
      {"10 representation-theory invariant suite (2j <= 8)", criterion10, 60.0},
      {"11 projector-synthesis 1/sqrt(N) convergence", criterion11, 300.0},
  };
  int failures = 0;
  for (const auto& crit : criteria) {
    auto t0 = std::chrono::steady_clock::now();
    Check check;
    bool ok = false;
    std::string what;
    try {
      ok = crit.fn(check);
      what = check.detail;
    } catch (const std::exception& e) {
      ok = false;
      what = std::string("exception: ") + e.what();
    }
    double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (secs > crit.budget_seconds) {
      ok = false;
      if (what.empty()) what = "exceeded time budget";
    }
    std::printf("%s criterion %s [%.2fs]%s%s\n", ok ? "PASS" : "FAIL", crit.label, secs,
                what.empty() ? "" : " -- ", what.c_str());
    std::fflush(stdout);
    if (!ok) ++failures;
  }
  return failures;
}
