#pragma once

#include <optional>
#include <stdexcept>
#include <vector>

#include "su2rb/noise.hpp"

namespace su2rb {

enum class Protocol { rb, chirb, r1rb, ssrb, sschirb, ssr1rb, ffrb, ssffrb };

const char* protocol_name(Protocol p);
std::optional<Protocol> protocol_from_name(const std::string& s);

// True for the character / rank-1 / frame weighted protocols (an extra group
// element is drawn per circuit and compiled into the first gate).
bool is_weighted(Protocol p);
// True for the synthetic-SPAM family (all 2j+1 preparations run).
bool is_synthetic_spam(Protocol p);
bool is_frame(Protocol p);

// Thrown when simulated probabilities leave [ -1e-10, 1 + 1e-10 ].
struct NumericalHealthError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct Shots {
  bool infinite = false;
  long per_circuit = 1;  // ignored when infinite

  static Shots infinite_shots() { return {true, 0}; }
  static Shots finite(long n) { return {false, n}; }
};

// Finite superoperator frame: N_j random group elements plus, for each rank
// k, real coefficients with sum_i c_i G(g_i) equal to the target (rank-1
// |T^k_0>><<T^k_0| or the irrep projector Pi_k).
struct FiniteFrame {
  std::vector<GroupElement> elements;
  std::vector<Eigen::VectorXd> coeffs;  // one vector per k = 0..2j
  double condition_number = 0;
};

enum class FrameTarget { rank1, projector };

// Dimension of the block-diagonal superoperator space,
// N_j = sum_{k=0}^{2j} (2k+1)^2 = (2j+1)(4j+1)(4j+3)/3.
long frame_dimension(HalfInt j);

// Draws N_j Haar elements and solves the vectorized linear system for the
// coefficients of every rank; redraws (up to max_redraws) whenever the frame
// matrix condition number exceeds the threshold.
FiniteFrame build_finite_frame(HalfInt j, RandomStream& rng, FrameTarget target,
                               double cond_threshold = 1e6, int max_redraws = 5);

// Largest-remainder allocation of s total shots proportionally to |c_i|.
std::vector<long> allocate_shots(const Eigen::VectorXd& c, long total_shots);

struct ExperimentPlan {
  HalfInt j;
  Protocol protocol = Protocol::ssrb;
  std::vector<int> sequence_lengths{1, 2, 4, 8, 16, 32, 64};
  long num_circuits = 1;
  Shots shots = Shots::finite(1);  // one shot per circuit, gates resampled every shot
  NoiseModel noise;
  SpamModel spam;
  uint64_t seed = 0;
  HalfInt ell;        // designated level for physical-SPAM protocols
  int threads = 0;    // 0 = hardware concurrency

  void validate() const;
};

// Accumulated estimates. For weighted protocols one outcome matrix is kept
// per rank k; for rb/ssrb a single unweighted matrix. d(mi,k) is the
// post-processed per-irrep decay estimate with mean-of-X semantics, and the
// empirical variance of the per-circuit estimator X_k backs the standard
// errors.
struct ProbabilityTable {
  HalfInt j;
  Protocol protocol = Protocol::ssrb;
  std::vector<int> ms;
  long n_circuits = 0;
  int n_k = 1;       // ranks tracked (2j+1, or 1 for plain rb)
  bool per_k_matrices = false;

  // Running means and centered second moments (Welford), so the variance is
  // free of catastrophic cancellation: a constant estimator reports a
  // variance at the level of its own rounding noise, not the accumulator's.
  std::vector<std::vector<Eigen::MatrixXd>> sum_y;  // [mi][k or 0]
  std::vector<std::vector<double>> mean_x;          // [mi][k]
  std::vector<std::vector<double>> m2_x;            // [mi][k], sum (x - mean)^2

  // Mean outcome matrix P_m (per rank for weighted protocols).
  Eigen::MatrixXd P(int mi, int k = 0) const {
    return sum_y[size_t(mi)][size_t(per_k_matrices ? k : 0)] / double(n_circuits);
  }
  double d(int mi, int k) const { return mean_x[size_t(mi)][size_t(k)]; }
  // Unbiased sample variance of the per-circuit estimator X_k.
  double variance(int mi, int k) const;
  // Standard error of d(mi,k): sqrt(variance/N).
  double std_error(int mi, int k) const;
};

// Samples m Haar gates plus the exact group inverse of their ordered product.
std::pair<std::vector<GroupElement>, GroupElement> sample_sequence(int m, RandomStream& rng);

// Applies prep -> gates (noise after each ideal gate, inversion included) ->
// POVM. Returns Born probabilities over the 2j+1 outcomes; when sampled is
// non-null, additionally draws `shots` multinomial outcomes into it
// (normalized counts).
Eigen::VectorXd run_circuit(HalfInt j, const Operator& prep,
                            const std::vector<GroupElement>& gates, const GroupElement& inversion,
                            const NoiseAction& noise, const std::vector<Operator>& povm,
                            long shots = 0, RandomStream* shot_rng = nullptr,
                            Eigen::VectorXd* sampled = nullptr);

// Runs the full experiment described by the plan. For frame protocols a
// prebuilt frame may be supplied; otherwise one is built from a child stream
// of the plan seed and reused for all sequence lengths. Deterministic for a
// fixed plan, independent of thread count.
ProbabilityTable estimate(const ExperimentPlan& plan, const FiniteFrame* frame = nullptr);

}  // namespace su2rb
