#include "su2rb/analysis.hpp"

#include <cmath>
#include <limits>

namespace su2rb {

DecayFit fit_exponential(const std::vector<int>& ms, const std::vector<double>& values,
                         const std::vector<double>& weights) {
  const size_t n = ms.size();
  if (n < 2 || values.size() != n) throw std::domain_error("fit_exponential: need >= 2 points");
  const bool uniform = weights.empty();
  if (!uniform && weights.size() != n)
    throw std::domain_error("fit_exponential: weight length mismatch");
  std::vector<double> w(n, 1.0);
  if (!uniform)
    for (size_t i = 0; i < n; ++i) {
      if (weights[i] < 0) throw std::domain_error("fit_exponential: negative weight");
      w[i] = weights[i];
    }

  // Initialization: amplitude from the first point, base from the geometric
  // mean of consecutive ratios (negative/zero data are legal for weighted
  // estimators, so ratios can be unusable; fall back to 0.9 then).
  double A = values[0] != 0 ? values[0] : 1.0;
  double logf_sum = 0;
  int logf_cnt = 0;
  for (size_t i = 0; i + 1 < n; ++i) {
    if (values[i] > 0 && values[i + 1] > 0) {
      logf_sum += std::log(values[i + 1] / values[i]) / double(ms[i + 1] - ms[i]);
      ++logf_cnt;
    }
  }
  double f = logf_cnt ? std::exp(logf_sum / logf_cnt) : 0.9;
  f = std::min(std::max(f, 1e-6), 2.0);

  auto cost_of = [&](double a, double b) {
    double c = 0;
    for (size_t i = 0; i < n; ++i) {
      double r = values[i] - a * std::pow(b, ms[i]);
      c += w[i] * r * r;
    }
    return c;
  };

  double cost = cost_of(A, f);
  double lambda = 1e-3;
  int iter = 0;
  bool converged = false;
  Eigen::Matrix2d h_final = Eigen::Matrix2d::Zero();
  const int max_iter = 500;
  for (; iter < max_iter; ++iter) {
    // Gauss-Newton normal equations on residuals r_i = sqrt(w)(y - A f^m).
    Eigen::Matrix2d h = Eigen::Matrix2d::Zero();
    Eigen::Vector2d g = Eigen::Vector2d::Zero();
    for (size_t i = 0; i < n; ++i) {
      double m = ms[i];
      double fm = std::pow(f, m);
      double r = values[i] - A * fm;
      double ja = fm;                                       // d(model)/dA
      double jf = (m == 0) ? 0 : A * m * std::pow(f, m - 1);  // d(model)/df
      h(0, 0) += w[i] * ja * ja;
      h(0, 1) += w[i] * ja * jf;
      h(1, 1) += w[i] * jf * jf;
      g(0) += w[i] * ja * r;
      g(1) += w[i] * jf * r;
    }
    h(1, 0) = h(0, 1);
    h_final = h;

    bool accepted = false;
    for (int tries = 0; tries < 30; ++tries) {
      Eigen::Matrix2d hd = h;
      hd(0, 0) += lambda * std::max(h(0, 0), 1e-30);
      hd(1, 1) += lambda * std::max(h(1, 1), 1e-30);
      Eigen::Vector2d delta = hd.ldlt().solve(g);
      double a_new = A + delta(0);
      double f_new = f + delta(1);
      if (f_new > 1e-12) {  // keep the base positive
        double c_new = cost_of(a_new, f_new);
        if (c_new <= cost) {
          double rel = (cost - c_new) / std::max(cost, 1e-300);
          bool tiny_step = std::abs(delta(0)) < 1e-14 * (1 + std::abs(A)) &&
                           std::abs(delta(1)) < 1e-14 * (1 + std::abs(f));
          A = a_new;
          f = f_new;
          cost = c_new;
          lambda = std::max(lambda / 3.0, 1e-14);
          accepted = true;
          if (rel < 1e-15 || tiny_step) converged = true;
          break;
        }
      }
      lambda *= 7.0;
    }
    if (!accepted || converged) {
      if (!accepted) converged = true;  // stationary within damping limits
      break;
    }
  }

  DecayFit fit;
  fit.A = A;
  fit.f = f;
  fit.iterations = iter;
  fit.converged = converged;
  fit.residual_norm = std::sqrt(cost);
  // Standard errors from the local quadratic model of the objective.
  Eigen::Matrix2d cov = h_final.inverse();
  double scale = 1.0;
  if (uniform) scale = (n > 2) ? cost / double(n - 2) : 0.0;
  fit.sigma_A = std::sqrt(std::max(0.0, scale * cov(0, 0)));
  fit.sigma_f = std::sqrt(std::max(0.0, scale * cov(1, 1)));
  if (!converged) throw std::runtime_error("fit_exponential: no convergence (best iterate: A=" +
                                           std::to_string(A) + ", f=" + std::to_string(f) + ")");
  return fit;
}

std::pair<Eigen::VectorXd, Eigen::VectorXd> error_rates(const Eigen::VectorXd& f,
                                                        const FMatrix& F) {
  if (f.size() != F.mat.rows()) throw std::invalid_argument("error_rates: length mismatch");
  if (!F.normalized) throw std::invalid_argument("error_rates: normalized F required");
  Eigen::VectorXd p_raw = F.inv * f;
  return {p_raw, p_raw.cwiseMax(0.0)};
}

Eigen::VectorXd propagate_uncertainty(const Eigen::VectorXd& sigma_f, const FMatrix& F) {
  if (sigma_f.size() != F.mat.rows())
    throw std::invalid_argument("propagate_uncertainty: length mismatch");
  if ((sigma_f.array() < 0).any())
    throw std::domain_error("propagate_uncertainty: negative input sigma");
  Eigen::MatrixXd cov =
      F.inv * sigma_f.array().square().matrix().asDiagonal() * F.inv.transpose();
  return cov.diagonal().cwiseMax(0.0).cwiseSqrt();
}

namespace {

// Clebsch-Gordan weight of rank k' in the second moment: 1 for character
// weighting, (C^{k',0}_{k,0;k,0})^2 for rank-1 weighting.
double second_moment_weight(Protocol proto, int k, int kp) {
  if (proto == Protocol::chirb || proto == Protocol::sschirb) return 1.0;
  double cg = clebsch_gordan(HalfInt(k), HalfInt(0), HalfInt(k), HalfInt(0), HalfInt(kp), HalfInt(0));
  return cg * cg;
}

// sum_i |c_i| d^{k'}_00(g_i) over the frame, for rank-k coefficients.
double frame_second_moment(const FiniteFrame& frame, int k, int kp) {
  const Eigen::VectorXd& c = frame.coeffs[size_t(k)];
  double s = 0;
  for (long i = 0; i < c.size(); ++i) {
    double beta = frame.elements[size_t(i)].euler_angles().beta;
    s += std::abs(c(i)) * legendre_p(kp, std::cos(beta));
  }
  return s;
}

}  // namespace

double zero_noise_variance(Protocol proto, HalfInt j, int k, std::optional<HalfInt> ell,
                           const FiniteFrame* frame) {
  if (k < 0 || k > j.twice()) throw std::domain_error("zero_noise_variance: k out of range");
  if (proto == Protocol::ssrb) return 0.0;
  if (proto == Protocol::rb)
    throw std::invalid_argument("zero_noise_variance: not defined for plain rb");
  const bool physical = !is_synthetic_spam(proto);
  if (physical && !ell) throw std::domain_error("zero_noise_variance: ell required");
  if (is_frame(proto) && !frame) throw std::domain_error("zero_noise_variance: frame required");

  const MMatrix mm = m_matrix(j);
  const int d = dim(j);
  const int kp_max = is_frame(proto) ? j.twice() : std::min(2 * k, j.twice());

  if (physical) {
    const int e = level_index(j, *ell);
    const double m2 = mm.mat(k, e) * mm.mat(k, e);
    double s = 0;
    for (int kp = 0; kp <= kp_max; ++kp) {
      double second = is_frame(proto)
                          ? frame_second_moment(*frame, k, kp) *
                                frame->coeffs[size_t(k)].cwiseAbs().sum()
                          : double((2 * k + 1) * (2 * k + 1)) / double(2 * kp + 1) *
                                second_moment_weight(proto, k, kp);
      s += second * mm.mat(kp, e) * mm.mat(kp, e);
    }
    return s / (m2 * m2) - 1.0;
  }

  // Synthetic SPAM: variance of the M-combined estimator.
  double m4 = 0;
  for (int c = 0; c < d; ++c) m4 += std::pow(mm.mat(k, c), 4);
  double s = 0;
  for (int kp = 0; kp <= kp_max; ++kp) {
    double overlap = 0;  // sum_ell M_{k,ell}^2 M_{k',ell}
    for (int c = 0; c < d; ++c) overlap += mm.mat(k, c) * mm.mat(k, c) * mm.mat(kp, c);
    double second = is_frame(proto)
                        ? frame_second_moment(*frame, k, kp) *
                              frame->coeffs[size_t(k)].cwiseAbs().sum()
                        : double((2 * k + 1) * (2 * k + 1)) / double(2 * kp + 1) *
                              second_moment_weight(proto, k, kp);
    s += second * overlap * overlap;
  }
  return s - m4;
}

HalfInt best_ell(Protocol proto, HalfInt j, int k) {
  double best = std::numeric_limits<double>::infinity();
  HalfInt arg = j;
  // Scan from +j downward so the nonnegative representative wins ties
  // (variances are invariant under ell -> -ell).
  for (int t = j.twice(); t >= -j.twice(); t -= 2) {
    HalfInt ell = HalfInt::from_twice(t);
    double v = zero_noise_variance(proto, j, k, ell);
    if (std::isfinite(v) && v < best - 1e-12) {
      best = v;
      arg = ell;
    }
  }
  return arg;
}

double variance_bound(Protocol proto, HalfInt j, int k, const FiniteFrame* frame) {
  if (k < 0 || k > j.twice()) throw std::domain_error("variance_bound: k out of range");
  const double dk = 2 * k + 1;
  const double dj = j.twice() + 1;  // 2j+1
  switch (proto) {
    case Protocol::chirb:
    case Protocol::r1rb: {
      // The raw bound (2k+1)^2 applies to the estimator of A_k f_k^m with
      // SPAM coefficient A_k = M_{k,ell}^2; the normalized estimator divides
      // by A_k, so the bound picks up 1/A_k^2 at the designated level.
      HalfInt ell = best_ell(proto, j, k);
      double a = m_matrix(j).mat(k, level_index(j, ell));
      double a2 = a * a;
      if (a2 == 0) return std::numeric_limits<double>::infinity();
      return dk * dk / (a2 * a2);
    }
    case Protocol::ssrb:
      return j.twice() + 2;  // 2j + 2
    case Protocol::sschirb:
      return dk * dk * (1.0 + dj * dk * dk);
    case Protocol::ssr1rb:
      return dk * (1.0 + dj * dk);
    case Protocol::ffrb:
    case Protocol::ssffrb: {
      if (!frame) throw std::domain_error("variance_bound: frame required");
      double l1 = frame->coeffs[size_t(k)].cwiseAbs().sum();
      if (proto == Protocol::ssffrb) return (j.twice() + 2) * l1 * l1;
      // Physical SPAM: normalize by the SPAM coefficient as for the other
      // weighted physical-SPAM protocols.
      HalfInt ell = best_ell(Protocol::chirb, j, k);
      double a = m_matrix(j).mat(k, level_index(j, ell));
      double a2 = a * a;
      if (a2 == 0) return std::numeric_limits<double>::infinity();
      return l1 * l1 / (a2 * a2);
    }
    case Protocol::rb:
      break;
  }
  throw std::invalid_argument("variance_bound: not defined for plain rb");
}

RBResult analyze(const ProbabilityTable& table, const FMatrix& F) {
  const int nk = table.n_k;
  if (nk != F.mat.rows())
    throw std::invalid_argument("analyze: table is not k-resolved for this spin");
  RBResult res;
  res.f.resize(nk);
  res.sigma_f.resize(nk);
  for (int k = 0; k < nk; ++k) {
    std::vector<double> vals, wts;
    bool usable = true;
    for (size_t mi = 0; mi < table.ms.size(); ++mi) {
      vals.push_back(table.d(int(mi), k));
      double se = table.std_error(int(mi), k);
      if (se <= 0) usable = false;
      wts.push_back(se > 0 ? 1.0 / (se * se) : 0.0);
    }
    // Inverse empirical variance weights when shot statistics exist for
    // every point; uniform otherwise.
    DecayFit fit = fit_exponential(table.ms, vals, usable ? wts : std::vector<double>{});
    res.f(k) = fit.f;
    res.sigma_f(k) = fit.sigma_f;
    res.fits.push_back(fit);
  }
  auto [p_raw, p_clipped] = error_rates(res.f, F);
  res.p_raw = p_raw;
  res.p_clipped = p_clipped;
  res.sigma_p = propagate_uncertainty(res.sigma_f, F);
  res.avg_fidelity = average_fidelity(table.j, res.f);
  return res;
}

FrameComplexity qubit_frame_complexity(FrameScheme scheme, int n) {
  FrameComplexity out;
  auto add = [&](const Rational& v, const BigInt& mult) { out.coefficients.push_back({v, mult}); };
  switch (scheme) {
    case FrameScheme::clifford_char:
      out.n_group = 24;
      add(Rational(3, 8), 1);
      add(Rational(-1, 8), 9);
      add(Rational(1, 8), 6);
      add(Rational(0), 8);
      break;
    case FrameScheme::pauli_char:
      out.n_group = 4;
      add(Rational(1, 4), 2);
      add(Rational(-1, 4), 2);
      break;
    case FrameScheme::z2_char:
      out.n_group = 2;
      add(Rational(1, 2), 1);
      add(Rational(-1, 2), 1);
      break;
    case FrameScheme::pauli_frame_full:
      out.n_group = 4;
      add(Rational(3, 4), 1);
      add(Rational(-1, 4), 3);
      break;
    case FrameScheme::nonpauli_frame_full:
      out.n_group = 12;
      add(Rational(1, 4), 6);
      add(Rational(-1, 4), 6);
      break;
    case FrameScheme::nqubit_full: {
      if (n < 1) throw std::domain_error("qubit_frame_complexity: n >= 1 required");
      BigInt fourn = boost::multiprecision::pow(BigInt(4), unsigned(n));
      out.n_group = fourn;
      add(Rational(fourn - 1, fourn), 1);            // 1 - 4^{-n}
      add(Rational(BigInt(-1), fourn), fourn - 1);   // -4^{-n}, 4^n - 1 times
      break;
    }
    case FrameScheme::nqubit_rank1: {
      if (n < 1) throw std::domain_error("qubit_frame_complexity: n >= 1 required");
      BigInt fourn = boost::multiprecision::pow(BigInt(4), unsigned(n));
      out.n_group = fourn;
      add(Rational(BigInt(1), fourn), fourn / 2);
      add(Rational(BigInt(-1), fourn), fourn / 2);
      break;
    }
  }
  Rational l2sq = 0, l1 = 0;
  for (const auto& [v, mult] : out.coefficients) {
    l2sq += Rational(mult) * v * v;
    l1 += Rational(mult) * abs(v);
  }
  out.uniform_metric = Rational(out.n_group) * l2sq;
  out.optimal_metric = l1 * l1;
  return out;
}

}  // namespace su2rb
