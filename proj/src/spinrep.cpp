#include "su2rb/spinrep.hpp"

#include <cmath>
#include <mutex>
#include <numbers>
#include <stdexcept>
#include <unordered_map>
#include <vector>

namespace su2rb {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kTwoPi = 2.0 * std::numbers::pi;

double wrap_2pi(double a) {
  a = std::fmod(a, kTwoPi);
  if (a < 0) a += kTwoPi;
  // fmod can return exactly 2pi after the correction when a was a tiny
  // negative number; fold it back.
  if (a >= kTwoPi) a = 0.0;
  return a;
}

}  // namespace

GroupElement::GroupElement(double w, double x, double y, double z) : w_(w), x_(x), y_(y), z_(z) {
  double n2 = w_ * w_ + x_ * x_ + y_ * y_ + z_ * z_;
  if (std::abs(n2 - 1.0) > 2e-12)
    throw std::domain_error("GroupElement: quaternion norm deviates from 1 by more than 1e-12");
  renormalize();
}

void GroupElement::renormalize() {
  double n = std::sqrt(w_ * w_ + x_ * x_ + y_ * y_ + z_ * z_);
  w_ /= n; x_ /= n; y_ /= n; z_ /= n;
}

GroupElement GroupElement::from_euler(const EulerAngles& e) {
  // q = qz(alpha) * qy(beta) * qz(gamma)
  double ha = 0.5 * e.alpha, hb = 0.5 * e.beta, hg = 0.5 * e.gamma;
  double cb = std::cos(hb), sb = std::sin(hb);
  GroupElement g;
  g.w_ = cb * std::cos(ha + hg);
  g.x_ = -sb * std::sin(ha - hg);
  g.y_ = sb * std::cos(ha - hg);
  g.z_ = cb * std::sin(ha + hg);
  g.renormalize();
  return g;
}

GroupElement GroupElement::from_axis_angle(const AxisAngle& aa) {
  double h = 0.5 * aa.theta;
  double s = std::sin(h);
  GroupElement g;
  g.w_ = std::cos(h);
  g.x_ = s * aa.axis[0];
  g.y_ = s * aa.axis[1];
  g.z_ = s * aa.axis[2];
  g.renormalize();
  return g;
}

GroupElement compose(const GroupElement& a, const GroupElement& b) {
  GroupElement g;
  g.w_ = a.w_ * b.w_ - a.x_ * b.x_ - a.y_ * b.y_ - a.z_ * b.z_;
  g.x_ = a.w_ * b.x_ + a.x_ * b.w_ + a.y_ * b.z_ - a.z_ * b.y_;
  g.y_ = a.w_ * b.y_ - a.x_ * b.z_ + a.y_ * b.w_ + a.z_ * b.x_;
  g.z_ = a.w_ * b.z_ + a.x_ * b.y_ - a.y_ * b.x_ + a.z_ * b.w_;
  g.renormalize();
  return g;
}

EulerAngles GroupElement::euler_angles_su2() const {
  // Invert  w = cos(b/2)cos((a+g)/2), x = -sin(b/2)sin((a-g)/2),
  //         y = sin(b/2)cos((a-g)/2), z = cos(b/2)sin((a+g)/2).
  double cb = std::hypot(w_, z_);   // cos(beta/2) >= 0
  double sb = std::hypot(x_, y_);   // sin(beta/2) >= 0
  EulerAngles e;
  e.beta = 2.0 * std::atan2(sb, cb);
  if (sb < 1e-15) {
    // beta = 0: rotation purely about z; put the whole phase in alpha.
    e.alpha = 2.0 * std::atan2(z_, w_);
    e.gamma = 0.0;
  } else if (cb < 1e-15) {
    // beta = pi: w = z = 0; gamma = 0 by convention.
    e.alpha = 2.0 * std::atan2(-x_, y_);
    e.gamma = 0.0;
  } else {
    double sum = 2.0 * std::atan2(z_, w_);   // alpha + gamma
    double diff = 2.0 * std::atan2(-x_, y_); // alpha - gamma
    e.alpha = 0.5 * (sum + diff);
    e.gamma = 0.5 * (sum - diff);
  }
  return e;
}

EulerAngles GroupElement::euler_angles() const {
  // Canonicalize to the SO(3) representative with w >= 0 so the angles land
  // in the documented ranges.
  GroupElement g = *this;
  if (g.w_ < 0 || (g.w_ == 0 && g.z_ < 0)) {
    g.w_ = -g.w_; g.x_ = -g.x_; g.y_ = -g.y_; g.z_ = -g.z_;
  }
  EulerAngles e = g.euler_angles_su2();
  e.alpha = wrap_2pi(e.alpha);
  e.gamma = wrap_2pi(e.gamma);
  return e;
}

AxisAngle GroupElement::axis_angle() const {
  GroupElement g = *this;
  if (g.w_ < 0 || (g.w_ == 0 && g.z_ < 0)) {
    g.w_ = -g.w_; g.x_ = -g.x_; g.y_ = -g.y_; g.z_ = -g.z_;
  }
  double s = std::sqrt(g.x_ * g.x_ + g.y_ * g.y_ + g.z_ * g.z_);
  AxisAngle aa;
  aa.theta = 2.0 * std::atan2(s, g.w_);  // in [0, pi] since w >= 0
  if (s < 1e-15) {
    aa.axis[0] = 0; aa.axis[1] = 0; aa.axis[2] = 1;  // identity: z by convention
  } else {
    aa.axis[0] = g.x_ / s; aa.axis[1] = g.y_ / s; aa.axis[2] = g.z_ / s;
  }
  return aa;
}

std::array<Operator, 3> angular_momentum(HalfInt j) {
  if (j < HalfInt(0)) throw std::domain_error("angular_momentum: negative spin");
  const int d = dim(j);
  const double jj = j.value() * (j.value() + 1.0);
  Operator jp = Operator::Zero(d, d);
  Operator jz = Operator::Zero(d, d);
  for (int c = 0; c < d; ++c) {
    double ell = level_of_index(j, c).value();
    jz(c, c) = ell;
    if (c > 0) jp(c - 1, c) = std::sqrt(jj - ell * (ell + 1.0));  // raises ell by 1
  }
  Operator jm = jp.adjoint();
  std::array<Operator, 3> out;
  out[0] = 0.5 * (jp + jm);
  out[1] = std::complex<double>(0, -0.5) * (jp - jm);
  out[2] = jz;
  return out;
}

Operator spherical_tensor(HalfInt j, HalfInt k, HalfInt q) {
  if (!k.is_integer() || k < HalfInt(0) || k.twice() > 2 * j.twice())
    throw std::domain_error("spherical_tensor: need integer 0 <= k <= 2j");
  if (q.abs() > k) throw std::domain_error("spherical_tensor: |q| > k");
  const int d = dim(j);
  Operator t = Operator::Zero(d, d);
  double norm = std::sqrt(double(k.twice() + 1) / double(j.twice() + 1));
  for (int c = 0; c < d; ++c) {
    HalfInt mp = level_of_index(j, c);
    HalfInt m = mp + q;
    if (m.abs() > j) continue;
    t(level_index(j, m), c) = norm * clebsch_gordan(j, mp, k, q, j, m);
  }
  return t;
}

namespace {

// Precomputed expansion d^j_{m,m'}(beta) = sum_s coef * cos(b/2)^pc * sin(b/2)^ps.
struct DTermTable {
  int d = 0;
  // terms[row*d + col] lists (coef, pc, ps).
  std::vector<std::vector<std::array<double, 3>>> terms;
};

const DTermTable& d_term_table(HalfInt j) {
  static std::mutex mu;
  static std::unordered_map<int, DTermTable*> cache;
  {
    std::lock_guard<std::mutex> lock(mu);
    auto it = cache.find(j.twice());
    if (it != cache.end()) return *it->second;
  }
  auto* tab = new DTermTable;
  const int d = dim(j);
  tab->d = d;
  tab->terms.resize(size_t(d) * d);
  for (int r = 0; r < d; ++r) {
    for (int c = 0; c < d; ++c) {
      HalfInt m = level_of_index(j, r);   // row label
      HalfInt mp = level_of_index(j, c);  // column label
      const int kpq = (j.twice() + m.twice()) / 2;
      const int kmq = (j.twice() - m.twice()) / 2;
      const int kpqp = (j.twice() + mp.twice()) / 2;
      const int kmqp = (j.twice() - mp.twice()) / 2;
      const int qmqp = (m.twice() - mp.twice()) / 2;
      double logpre = 0.5 * (log_factorial(kpq) + log_factorial(kmq) + log_factorial(kpqp) +
                             log_factorial(kmqp));
      int s_min = std::max(0, -qmqp);
      int s_max = std::min(kpqp, kmq);
      auto& list = tab->terms[size_t(r) * d + c];
      for (int s = s_min; s <= s_max; ++s) {
        double logden = log_factorial(kpqp - s) + log_factorial(s) +
                        log_factorial(qmqp + s) + log_factorial(kmq - s);
        double coef = parity_sign(qmqp + s) * std::exp(logpre - logden);
        list.push_back({coef, double(kpqp + kmq - 2 * s), double(qmqp + 2 * s)});
      }
    }
  }
  std::lock_guard<std::mutex> lock(mu);
  auto [it, inserted] = cache.emplace(j.twice(), tab);
  if (!inserted) delete tab;  // lost a race; keep the winner
  return *it->second;
}

}  // namespace

Eigen::MatrixXd small_d_matrix(HalfInt j, double beta) {
  const DTermTable& tab = d_term_table(j);
  const int d = tab.d;
  // Power tables for cos(beta/2), sin(beta/2) up to 2j.
  const double ch = std::cos(0.5 * beta), sh = std::sin(0.5 * beta);
  std::vector<double> cp(size_t(j.twice()) + 1), sp(size_t(j.twice()) + 1);
  cp[0] = sp[0] = 1.0;
  for (int p = 1; p <= j.twice(); ++p) {
    cp[size_t(p)] = cp[size_t(p - 1)] * ch;
    sp[size_t(p)] = sp[size_t(p - 1)] * sh;
  }
  Eigen::MatrixXd out(d, d);
  for (int r = 0; r < d; ++r)
    for (int c = 0; c < d; ++c) {
      double v = 0;
      for (const auto& t : tab.terms[size_t(r) * d + c])
        v += t[0] * cp[size_t(t[1])] * sp[size_t(t[2])];
      out(r, c) = v;
    }
  return out;
}

Operator rotation_matrix(HalfInt j, const GroupElement& g) {
  EulerAngles e = g.euler_angles_su2();
  Eigen::MatrixXd dmat = small_d_matrix(j, e.beta);
  const int n = dim(j);
  Eigen::VectorXcd pa(n), pg(n);
  for (int r = 0; r < n; ++r) {
    double m = level_of_index(j, r).value();
    pa(r) = std::polar(1.0, -m * e.alpha);
    pg(r) = std::polar(1.0, -m * e.gamma);
  }
  return pa.asDiagonal() * dmat * pg.asDiagonal();
}

GroupElement haar_sample(RandomStream& rng) {
  double a = rng.uniform(), b = rng.uniform(), c = rng.uniform();
  EulerAngles e;
  e.alpha = kTwoPi * a;
  e.beta = std::acos(1.0 - 2.0 * b);
  e.gamma = kTwoPi * c;
  return GroupElement::from_euler(e);
}

AxisAngle euler_to_axis_angle(const EulerAngles& e) {
  return GroupElement::from_euler(e).axis_angle();
}

EulerAngles axis_angle_to_euler(const AxisAngle& aa) {
  double n = std::sqrt(aa.axis[0] * aa.axis[0] + aa.axis[1] * aa.axis[1] + aa.axis[2] * aa.axis[2]);
  if (std::abs(n - 1.0) > 1e-12) throw std::domain_error("axis_angle_to_euler: axis not unit length");
  return GroupElement::from_axis_angle(aa).euler_angles();
}

}  // namespace su2rb
