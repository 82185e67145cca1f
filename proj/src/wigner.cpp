#include "su2rb/wigner.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

namespace su2rb {

namespace {

// Fixed-size factorial log table; anything past it falls back to lgamma.
// The table is immutable after construction, so concurrent reads are safe.
constexpr int kLfSize = 4096;

const std::vector<double>& lf_table() {
  static const std::vector<double>* table = [] {
    auto* t = new std::vector<double>();
    t->reserve(kLfSize);
    t->push_back(0.0);  // 0! = 1
    for (int n = 1; n < kLfSize; ++n) t->push_back(t->back() + std::log(double(n)));
    return t;
  }();
  return *table;
}

// Integer from an even twice-value, used for factorial arguments that are
// guaranteed integral by the parity checks of the caller.
int half_twice(int twice) { return twice / 2; }

bool triangle_ok(HalfInt a, HalfInt b, HalfInt c) {
  // |a-b| <= c <= a+b with integer perimeter.
  if ((a.twice() + b.twice() + c.twice()) % 2 != 0) return false;
  return c.twice() >= std::abs(a.twice() - b.twice()) && c.twice() <= a.twice() + b.twice();
}

// log of Delta(a,b,c) = (a+b-c)! (a-b+c)! (-a+b+c)! / (a+b+c+1)!
double log_delta(HalfInt a, HalfInt b, HalfInt c) {
  int t1 = half_twice(a.twice() + b.twice() - c.twice());
  int t2 = half_twice(a.twice() - b.twice() + c.twice());
  int t3 = half_twice(-a.twice() + b.twice() + c.twice());
  int t4 = half_twice(a.twice() + b.twice() + c.twice()) + 1;
  return log_factorial(t1) + log_factorial(t2) + log_factorial(t3) - log_factorial(t4);
}

}  // namespace

double log_factorial(int n) {
  if (n < 0) throw std::domain_error("log_factorial: negative argument");
  const auto& t = lf_table();
  if (n < int(t.size())) return t[size_t(n)];
  return std::lgamma(double(n) + 1.0);
}

double clebsch_gordan(HalfInt j1, HalfInt m1, HalfInt j2, HalfInt m2, HalfInt j, HalfInt m) {
  if (m1.abs() > j1 || m2.abs() > j2 || m.abs() > j)
    throw std::domain_error("clebsch_gordan: |m| > j");
  if (!same_parity(j1, m1) || !same_parity(j2, m2) || !same_parity(j, m))
    throw std::domain_error("clebsch_gordan: m has wrong parity for its j");
  if (m.twice() != m1.twice() + m2.twice()) return 0.0;
  if (!triangle_ok(j1, j2, j)) return 0.0;

  // Racah's closed form; every factorial argument below is a true integer.
  const int a = half_twice(j1.twice() + j2.twice() - j.twice());   // j1+j2-j
  const int b = half_twice(j1.twice() - m1.twice());               // j1-m1
  const int c = half_twice(j2.twice() + m2.twice());               // j2+m2
  const int d = half_twice(j.twice() - j2.twice() + m1.twice());   // j-j2+m1 (may be < 0)
  const int e = half_twice(j.twice() - j1.twice() - m2.twice());   // j-j1-m2 (may be < 0)

  double logpre = std::log(double(j.twice() + 1)) + log_delta(j1, j2, j) +
                  log_factorial(half_twice(j.twice() + m.twice())) +
                  log_factorial(half_twice(j.twice() - m.twice())) +
                  log_factorial(half_twice(j1.twice() - m1.twice())) +
                  log_factorial(half_twice(j1.twice() + m1.twice())) +
                  log_factorial(half_twice(j2.twice() - m2.twice())) +
                  log_factorial(half_twice(j2.twice() + m2.twice()));

  int t_min = std::max({0, -d, -e});
  int t_max = std::min({a, b, c});
  double sum = 0.0;
  for (int t = t_min; t <= t_max; ++t) {
    double logterm = 0.5 * logpre - log_factorial(t) - log_factorial(a - t) -
                     log_factorial(b - t) - log_factorial(c - t) -
                     log_factorial(d + t) - log_factorial(e + t);
    sum += parity_sign(t) * std::exp(logterm);
  }
  return sum;
}

double wigner_6j(HalfInt j1, HalfInt j2, HalfInt j3, HalfInt j4, HalfInt j5, HalfInt j6) {
  if (j1 < HalfInt(0) || j2 < HalfInt(0) || j3 < HalfInt(0) || j4 < HalfInt(0) ||
      j5 < HalfInt(0) || j6 < HalfInt(0))
    throw std::domain_error("wigner_6j: negative spin");
  // The four coupled triads.
  if (!triangle_ok(j1, j2, j3) || !triangle_ok(j1, j5, j6) || !triangle_ok(j4, j2, j6) ||
      !triangle_ok(j4, j5, j3))
    return 0.0;

  double logpre = log_delta(j1, j2, j3) + log_delta(j1, j5, j6) + log_delta(j4, j2, j6) +
                  log_delta(j4, j5, j3);

  // Racah sum limits: t at least each triad perimeter, at most each opposite pair sum.
  const int s1 = half_twice(j1.twice() + j2.twice() + j3.twice());
  const int s2 = half_twice(j1.twice() + j5.twice() + j6.twice());
  const int s3 = half_twice(j4.twice() + j2.twice() + j6.twice());
  const int s4 = half_twice(j4.twice() + j5.twice() + j3.twice());
  const int p1 = half_twice(j1.twice() + j2.twice() + j4.twice() + j5.twice());
  const int p2 = half_twice(j2.twice() + j3.twice() + j5.twice() + j6.twice());
  const int p3 = half_twice(j3.twice() + j1.twice() + j6.twice() + j4.twice());

  int t_min = std::max({s1, s2, s3, s4});
  int t_max = std::min({p1, p2, p3});
  double sum = 0.0;
  for (int t = t_min; t <= t_max; ++t) {
    double logterm = 0.5 * logpre + log_factorial(t + 1) - log_factorial(t - s1) -
                     log_factorial(t - s2) - log_factorial(t - s3) - log_factorial(t - s4) -
                     log_factorial(p1 - t) - log_factorial(p2 - t) - log_factorial(p3 - t);
    sum += parity_sign(t) * std::exp(logterm);
  }
  return sum;
}

double wigner_small_d(HalfInt k, HalfInt q, HalfInt qp, double beta) {
  if (q.abs() > k || qp.abs() > k) throw std::domain_error("wigner_small_d: |q| > k");
  if (!same_parity(k, q) || !same_parity(k, qp))
    throw std::domain_error("wigner_small_d: q has wrong parity for k");

  const int kpq = half_twice(k.twice() + q.twice());
  const int kmq = half_twice(k.twice() - q.twice());
  const int kpqp = half_twice(k.twice() + qp.twice());
  const int kmqp = half_twice(k.twice() - qp.twice());
  const int qmqp = half_twice(q.twice() - qp.twice());  // q - q'

  double logpre = 0.5 * (log_factorial(kpq) + log_factorial(kmq) + log_factorial(kpqp) +
                         log_factorial(kmqp));
  const double ch = std::cos(0.5 * beta);
  const double sh = std::sin(0.5 * beta);

  int s_min = std::max(0, -qmqp);
  int s_max = std::min(kpqp, kmq);
  double sum = 0.0;
  for (int s = s_min; s <= s_max; ++s) {
    int pc = kpqp + kmq - 2 * s;  // power of cos(beta/2): 2k + q' - q - 2s
    int ps = qmqp + 2 * s;        // power of sin(beta/2)
    double logden = log_factorial(kpqp - s) + log_factorial(s) + log_factorial(qmqp + s) +
                    log_factorial(kmq - s);
    double mag = std::exp(logpre - logden);
    // Guard 0^0 at the interval endpoints.
    double term = mag * (pc ? std::pow(ch, pc) : 1.0) * (ps ? std::pow(sh, ps) : 1.0);
    sum += parity_sign(qmqp + s) * term;
  }
  return sum;
}

std::complex<double> wigner_big_D(HalfInt k, HalfInt q, HalfInt qp, const EulerAngles& g) {
  double d = wigner_small_d(k, q, qp, g.beta);
  double phase = -(q.value() * g.alpha + qp.value() * g.gamma);
  return std::polar(d, phase);
}

double character(HalfInt k, double theta) {
  if (k < HalfInt(0)) throw std::domain_error("character: negative rank");
  const double n = k.twice() + 1;  // 2k+1
  double x = 0.5 * theta;
  if (std::abs(theta) < 1e-6) {
    // sin(n x)/sin(x) = n [1 - (n^2-1) x^2/6 + (n^2-1)(3n^2-7) x^4/360 + O(x^6)]
    double x2 = x * x;
    return n * (1.0 - (n * n - 1.0) * x2 / 6.0 + (n * n - 1.0) * (3.0 * n * n - 7.0) * x2 * x2 / 360.0);
  }
  return std::sin(n * x) / std::sin(x);
}

double legendre_p(int k, double x) {
  if (k < 0) throw std::domain_error("legendre_p: negative degree");
  if (k == 0) return 1.0;
  double pm1 = 1.0, p = x;
  for (int n = 1; n < k; ++n) {
    double pn1 = ((2 * n + 1) * x * p - n * pm1) / (n + 1);
    pm1 = p;
    p = pn1;
  }
  return p;
}

}  // namespace su2rb
