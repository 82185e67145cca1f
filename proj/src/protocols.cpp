#include "su2rb/protocols.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <mutex>
#include <numeric>
#include <thread>

namespace su2rb {

namespace {

// Child-stream tags; arbitrary but fixed, they define the output format.
constexpr uint64_t kTagSpamPrep = 0x7072657061786573ULL;
constexpr uint64_t kTagSpamMeas = 0x6d6561737572656dULL;
constexpr uint64_t kTagFrame = 0x6672616d65736574ULL;
constexpr uint64_t kTagCircuits = 0x63697263756974ULL;

}  // namespace

const char* protocol_name(Protocol p) {
  switch (p) {
    case Protocol::rb: return "rb";
    case Protocol::chirb: return "chirb";
    case Protocol::r1rb: return "r1rb";
    case Protocol::ssrb: return "ssrb";
    case Protocol::sschirb: return "sschirb";
    case Protocol::ssr1rb: return "ssr1rb";
    case Protocol::ffrb: return "ffrb";
    case Protocol::ssffrb: return "ssffrb";
  }
  return "?";
}

std::optional<Protocol> protocol_from_name(const std::string& s) {
  for (Protocol p : {Protocol::rb, Protocol::chirb, Protocol::r1rb, Protocol::ssrb,
                     Protocol::sschirb, Protocol::ssr1rb, Protocol::ffrb, Protocol::ssffrb})
    if (s == protocol_name(p)) return p;
  return std::nullopt;
}

bool is_weighted(Protocol p) {
  return p == Protocol::chirb || p == Protocol::r1rb || p == Protocol::sschirb ||
         p == Protocol::ssr1rb || p == Protocol::ffrb || p == Protocol::ssffrb;
}

bool is_synthetic_spam(Protocol p) {
  return p == Protocol::ssrb || p == Protocol::sschirb || p == Protocol::ssr1rb ||
         p == Protocol::ssffrb;
}

bool is_frame(Protocol p) { return p == Protocol::ffrb || p == Protocol::ssffrb; }

void ExperimentPlan::validate() const {
  if (j < HalfInt(0)) throw std::domain_error("ExperimentPlan: negative spin");
  if (num_circuits < 1) throw std::domain_error("ExperimentPlan: num_circuits must be >= 1");
  if (sequence_lengths.empty()) throw std::domain_error("ExperimentPlan: no sequence lengths");
  for (size_t i = 0; i < sequence_lengths.size(); ++i) {
    if (sequence_lengths[i] < 1)
      throw std::domain_error("ExperimentPlan: sequence lengths must be positive");
    if (i > 0 && sequence_lengths[i] <= sequence_lengths[i - 1])
      throw std::domain_error("ExperimentPlan: sequence lengths must be strictly increasing");
  }
  if (!shots.infinite && shots.per_circuit < 1)
    throw std::domain_error("ExperimentPlan: shots per circuit must be >= 1");
  if (!is_synthetic_spam(protocol)) {
    if (!same_parity(ell, j) || ell.abs() > j)
      throw std::domain_error("ExperimentPlan: designated ell invalid for this spin");
  }
}

long frame_dimension(HalfInt j) {
  long n = 0;
  for (int k = 0; k <= j.twice(); ++k) n += long(block_size(k)) * block_size(k);
  return n;
}

FiniteFrame build_finite_frame(HalfInt j, RandomStream& rng, FrameTarget target,
                               double cond_threshold, int max_redraws) {
  const long nj = frame_dimension(j);
  const int nk = j.twice() + 1;
  for (int attempt = 0; attempt <= max_redraws; ++attempt) {
    std::vector<GroupElement> elements;
    elements.reserve(size_t(nj));
    for (long i = 0; i < nj; ++i) elements.push_back(haar_sample(rng));

    // Frame matrix: column i = block entries of the rotation superoperator
    // of g_i, stacked rank by rank, row-major within each block.
    Eigen::MatrixXcd a(nj, nj);
    for (long i = 0; i < nj; ++i) {
      Superoperator g = rotation_superop(j, elements[size_t(i)]);
      long row = 0;
      for (int k = 0; k < nk; ++k) {
        auto blk = g.block(k);
        for (int r = 0; r < block_size(k); ++r)
          for (int c = 0; c < block_size(k); ++c) a(row++, i) = blk(r, c);
      }
    }
    // Coefficients are real; solve the stacked real least-squares system.
    Eigen::MatrixXd b(2 * nj, nj);
    b.topRows(nj) = a.real();
    b.bottomRows(nj) = a.imag();
    Eigen::BDCSVD<Eigen::MatrixXd> svd(b, Eigen::ComputeThinU | Eigen::ComputeThinV);
    double cond = svd.singularValues()(0) / svd.singularValues()(nj - 1);
    if (!(cond < cond_threshold)) continue;

    FiniteFrame frame;
    frame.elements = std::move(elements);
    frame.condition_number = cond;
    for (int k = 0; k < nk; ++k) {
      Eigen::VectorXd t = Eigen::VectorXd::Zero(2 * nj);
      long off = 0;
      for (int kp = 0; kp < k; ++kp) off += long(block_size(kp)) * block_size(kp);
      if (target == FrameTarget::rank1) {
        t(off + long(k) * block_size(k) + k) = 1.0;  // (q=0, q'=0) entry of block k
      } else {
        for (int r = 0; r < block_size(k); ++r) t(off + long(r) * block_size(k) + r) = 1.0;
      }
      frame.coeffs.push_back(svd.solve(t));
    }
    return frame;
  }
  throw std::runtime_error("build_finite_frame: condition threshold not met after max redraws");
}

std::vector<long> allocate_shots(const Eigen::VectorXd& c, long total_shots) {
  if (total_shots < 1) throw std::domain_error("allocate_shots: total_shots must be >= 1");
  double l1 = c.cwiseAbs().sum();
  if (l1 == 0) throw std::domain_error("allocate_shots: all-zero coefficient vector");
  const long n = c.size();
  std::vector<long> alloc(size_t(n), 0);
  std::vector<std::pair<double, long>> rem;  // (fractional part, index)
  long assigned = 0;
  for (long i = 0; i < n; ++i) {
    double q = double(total_shots) * std::abs(c(i)) / l1;
    alloc[size_t(i)] = long(std::floor(q));
    assigned += alloc[size_t(i)];
    rem.push_back({q - std::floor(q), i});
  }
  // Largest remainder first; ties broken by lower index.
  std::stable_sort(rem.begin(), rem.end(),
                   [](const auto& x, const auto& y) { return x.first > y.first; });
  for (long i = 0; assigned < total_shots; ++i, ++assigned) ++alloc[size_t(rem[size_t(i)].second)];
  return alloc;
}

std::pair<std::vector<GroupElement>, GroupElement> sample_sequence(int m, RandomStream& rng) {
  if (m < 1) throw std::domain_error("sample_sequence: m must be >= 1");
  std::vector<GroupElement> gates;
  gates.reserve(size_t(m));
  GroupElement prod = GroupElement::identity();
  for (int i = 0; i < m; ++i) {
    gates.push_back(haar_sample(rng));
    prod = compose(gates.back(), prod);  // running product g_i ... g_1
  }
  return {std::move(gates), prod.inverse()};
}

Eigen::VectorXd run_circuit(HalfInt j, const Operator& prep,
                            const std::vector<GroupElement>& gates, const GroupElement& inversion,
                            const NoiseAction& noise, const std::vector<Operator>& povm,
                            long shots, RandomStream* shot_rng, Eigen::VectorXd* sampled) {
  const int d = dim(j);
  Operator rho = prep;
  auto apply_gate = [&](const GroupElement& g) {
    Operator u = rotation_matrix(j, g);
    rho = u * rho * u.adjoint();
    noise.apply(rho);
  };
  for (const auto& g : gates) apply_gate(g);
  apply_gate(inversion);

  Eigen::VectorXd probs(d);
  for (int i = 0; i < d; ++i)
    probs(i) = povm[size_t(i)].transpose().cwiseProduct(rho).sum().real();
  for (int i = 0; i < d; ++i) {
    if (probs(i) < -1e-10 || probs(i) > 1.0 + 1e-10)
      throw NumericalHealthError("run_circuit: Born probability outside [0,1] tolerance");
  }
  if (sampled) {
    if (!shot_rng || shots < 1)
      throw std::invalid_argument("run_circuit: sampling requested without shots/stream");
    Eigen::VectorXd clamped = probs.cwiseMax(0.0);
    double total = clamped.sum();
    sampled->setZero(d);
    for (long s = 0; s < shots; ++s) {
      double u = shot_rng->uniform() * total;
      int out = d - 1;
      for (int i = 0; i < d; ++i) {
        u -= clamped(i);
        if (u <= 0) { out = i; break; }
      }
      (*sampled)(out) += 1.0;
    }
    *sampled /= double(shots);
  }
  return probs;
}

namespace {

// Per-chunk accumulator. Scalar estimators use Welford running moments so
// that the variance of a (near-)constant estimator is not swamped by the
// cancellation error of a raw sum-of-squares accumulator.
struct Accum {
  std::vector<Eigen::MatrixXd> y;
  long n = 0;
  std::vector<double> mean, m2;

  void init(int ny, int nk, int d) {
    y.assign(size_t(ny), Eigen::MatrixXd::Zero(d, d));
    n = 0;
    mean.assign(size_t(nk), 0.0);
    m2.assign(size_t(nk), 0.0);
  }
  void push(size_t k, double x) {
    // n is advanced once per circuit by the caller, after all k updates.
    double delta = x - mean[k];
    mean[k] += delta / double(n + 1);
    m2[k] += delta * (x - mean[k]);
  }
  void merge(const Accum& o) {
    for (size_t i = 0; i < y.size(); ++i) y[i] += o.y[i];
    if (o.n == 0) return;
    const long total = n + o.n;
    for (size_t i = 0; i < mean.size(); ++i) {
      double delta = o.mean[i] - mean[i];
      mean[i] += delta * double(o.n) / double(total);
      m2[i] += o.m2[i] + delta * delta * double(n) * double(o.n) / double(total);
    }
    n = total;
  }
};

}  // namespace

ProbabilityTable estimate(const ExperimentPlan& plan, const FiniteFrame* frame_in) {
  plan.validate();
  const HalfInt j = plan.j;
  const int d = dim(j);
  const Protocol proto = plan.protocol;
  const int nk = (proto == Protocol::rb) ? 1 : d;
  const bool per_k = is_weighted(proto);
  const int ny = per_k ? nk : 1;
  const bool synth = is_synthetic_spam(proto);

  RandomStream base(plan.seed);
  RandomStream prep_rng = base.child(kTagSpamPrep);
  RandomStream meas_rng = base.child(kTagSpamMeas);
  const std::vector<Operator> preps = noisy_preparations(j, plan.spam, prep_rng);
  const std::vector<Operator> povm = noisy_povm(j, plan.spam, meas_rng);
  const NoiseAction noise(j, plan.noise);
  const MMatrix mm = m_matrix(j);
  const int ell_idx = synth ? 0 : level_index(j, plan.ell);

  // Frame protocols: one frame per campaign, reused for every m.
  FiniteFrame local_frame;
  const FiniteFrame* frame = frame_in;
  if (is_frame(proto) && !frame) {
    RandomStream frng = base.child(kTagFrame);
    local_frame = build_finite_frame(j, frng, FrameTarget::rank1);
    frame = &local_frame;
  }
  // Per-rank sampling CDF over |c_i| and signed-importance weights.
  std::vector<Eigen::VectorXd> frame_cdf;
  std::vector<double> frame_l1;
  if (frame) {
    for (int k = 0; k < nk; ++k) {
      const Eigen::VectorXd& c = frame->coeffs[size_t(k)];
      double l1 = c.cwiseAbs().sum();
      Eigen::VectorXd cdf(c.size());
      double acc = 0;
      for (long i = 0; i < c.size(); ++i) { acc += std::abs(c(i)) / l1; cdf(i) = acc; }
      frame_cdf.push_back(std::move(cdf));
      frame_l1.push_back(l1);
    }
  }

  ProbabilityTable table;
  table.j = j;
  table.protocol = proto;
  table.ms = plan.sequence_lengths;
  table.n_circuits = plan.num_circuits;
  table.n_k = nk;
  table.per_k_matrices = per_k;

  const long n_threads_req = plan.threads > 0 ? plan.threads
                                              : long(std::max(1u, std::thread::hardware_concurrency()));
  const long chunk = 256;
  const long n_chunks = (plan.num_circuits + chunk - 1) / chunk;
  const long n_threads = std::max(1L, std::min(n_threads_req, n_chunks));

  RandomStream circuits_root = base.child(kTagCircuits);

  // Weight of rank k for the extra sampled element (character / rank-1
  // protocols). Frame weights are handled separately.
  auto weight_of = [&](int k, const GroupElement& g) -> double {
    if (proto == Protocol::chirb || proto == Protocol::sschirb)
      return (2 * k + 1) * character(HalfInt(k), g.axis_angle().theta);
    // d^k_00(beta) = P_k(cos beta)
    return (2 * k + 1) * legendre_p(k, std::cos(g.euler_angles().beta));
  };

  for (size_t mi = 0; mi < plan.sequence_lengths.size(); ++mi) {
    const int m = plan.sequence_lengths[mi];
    RandomStream m_root = circuits_root.child(mi);

    std::vector<Accum> partials(static_cast<size_t>(n_chunks));
    std::atomic<long> next_chunk{0};
    std::exception_ptr first_error;
    std::mutex error_mu;

    auto eval_circuit = [&](long i, Accum& acc) {
      RandomStream sc = m_root.child(uint64_t(i));
      const long shots = plan.shots.infinite ? 0 : plan.shots.per_circuit;

      // Per-circuit outcome matrices for synthetic-SPAM combination.
      std::vector<Eigen::MatrixXd> ylocal(size_t(ny), Eigen::MatrixXd::Zero(d, d));

      auto outcome_of = [&](RandomStream& sp, const std::vector<GroupElement>& gates,
                            const GroupElement& ginv, int prep_row) -> Eigen::VectorXd {
        if (plan.shots.infinite)
          return run_circuit(j, preps[size_t(prep_row)], gates, ginv, noise, povm);
        Eigen::VectorXd sampled;
        run_circuit(j, preps[size_t(prep_row)], gates, ginv, noise, povm, shots, &sp, &sampled);
        return sampled;
      };

      const int first_prep = synth ? 0 : ell_idx;
      const int last_prep = synth ? d - 1 : ell_idx;
      for (int p = first_prep; p <= last_prep; ++p) {
        RandomStream sp = sc.child(uint64_t(p));
        auto [gates, ginv] = sample_sequence(m, sp);
        if (!is_weighted(proto)) {
          Eigen::VectorXd out = outcome_of(sp, gates, ginv, p);
          ylocal[0].row(p) += out.transpose();
        } else if (!is_frame(proto)) {
          GroupElement g = haar_sample(sp);
          std::vector<GroupElement> word = gates;
          word[0] = compose(word[0], g);  // extra element compiled into gate 1
          Eigen::VectorXd out = outcome_of(sp, word, ginv, p);
          for (int k = 0; k < nk; ++k) ylocal[size_t(k)].row(p) += weight_of(k, g) * out.transpose();
        } else {
          // Frame protocols: per rank, importance-sample a frame element.
          for (int k = 0; k < nk; ++k) {
            double u = sp.uniform();
            const Eigen::VectorXd& cdf = frame_cdf[size_t(k)];
            long idx = std::lower_bound(cdf.data(), cdf.data() + cdf.size(), u) - cdf.data();
            if (idx >= cdf.size()) idx = cdf.size() - 1;
            double c = frame->coeffs[size_t(k)](idx);
            double w = (c < 0 ? -1.0 : 1.0) * frame_l1[size_t(k)];
            std::vector<GroupElement> word = gates;
            word[0] = compose(word[0], frame->elements[size_t(idx)]);
            Eigen::VectorXd out = outcome_of(sp, word, ginv, p);
            ylocal[size_t(k)].row(p) += w * out.transpose();
          }
        }
      }

      // Post-process this circuit's contribution into the scalar estimators.
      for (int k = 0; k < nk; ++k) {
        double x = 0;
        const Eigen::MatrixXd& yk = ylocal[size_t(per_k ? k : 0)];
        if (proto == Protocol::rb) {
          x = yk(ell_idx, ell_idx);
        } else if (synth) {
          x = mm.mat.row(k) * yk * mm.mat.row(k).transpose();
        } else {
          double mke = mm.mat(k, ell_idx);
          x = yk(ell_idx, ell_idx) / (mke * mke);
        }
        acc.push(size_t(k), x);
      }
      acc.n += 1;
      for (int yi = 0; yi < ny; ++yi) acc.y[size_t(yi)] += ylocal[size_t(yi)];
    };

    auto worker = [&]() {
      try {
        for (;;) {
          long c = next_chunk.fetch_add(1);
          if (c >= n_chunks) break;
          Accum& acc = partials[size_t(c)];
          acc.init(ny, nk, d);
          long lo = c * chunk;
          long hi = std::min(plan.num_circuits, lo + chunk);
          for (long i = lo; i < hi; ++i) eval_circuit(i, acc);
        }
      } catch (...) {
        std::lock_guard<std::mutex> lock(error_mu);
        if (!first_error) first_error = std::current_exception();
      }
    };

    if (n_threads == 1) {
      worker();
    } else {
      std::vector<std::thread> pool;
      for (long t = 0; t < n_threads; ++t) pool.emplace_back(worker);
      for (auto& t : pool) t.join();
    }
    if (first_error) std::rethrow_exception(first_error);

    // Deterministic merge in chunk order.
    Accum total;
    total.init(ny, nk, d);
    for (const auto& p : partials) total.merge(p);
    table.sum_y.push_back(std::move(total.y));
    table.mean_x.push_back(std::move(total.mean));
    table.m2_x.push_back(std::move(total.m2));
  }
  return table;
}

double ProbabilityTable::variance(int mi, int k) const {
  if (n_circuits < 2) return 0;
  return std::max(0.0, m2_x[size_t(mi)][size_t(k)] / double(n_circuits - 1));
}

double ProbabilityTable::std_error(int mi, int k) const {
  return std::sqrt(variance(mi, k) / double(n_circuits));
}

}  // namespace su2rb
