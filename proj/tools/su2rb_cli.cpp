#include <CLI11.hpp>

#include <cstdio>
#include <fstream>
#include <iostream>

#include "su2rb/campaign.hpp"

namespace {

using namespace su2rb;

std::string fmt17(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

// CSV writer targeting stdout or a file.
struct Out {
  std::ofstream file;
  std::ostream& stream() { return file.is_open() ? file : std::cout; }
  void open(const std::string& path) {
    if (path.empty()) return;
    file.open(path);
    if (!file) throw ConfigError("cannot open output file: " + path);
  }
};

void emit_matrix_csv(std::ostream& os, const std::string& name, const Eigen::MatrixXd& m) {
  os << "matrix," << name << '\n';
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    for (Eigen::Index c = 0; c < m.cols(); ++c) os << (c ? "," : "") << fmt17(m(r, c));
    os << '\n';
  }
}

int cmd_run(const std::string& config_path, const std::string& out_root,
            std::optional<uint64_t> seed, std::optional<int> threads, bool force) {
  CampaignConfig cfg = load_campaign_config(config_path);
  if (seed) {
    cfg.plan.seed = *seed;
    cfg.canonical["seed"] = *seed;
  }
  if (threads) {
    cfg.plan.threads = *threads;
    cfg.canonical["threads"] = *threads;
  }
  CampaignFiles files = run_campaign(cfg, out_root, force);
  std::cout << files.dir.string() << '\n';
  return 0;
}

int cmd_tables(int twice_j, const std::string& out_path) {
  HalfInt j = HalfInt::from_twice(twice_j);
  Out out;
  out.open(out_path);
  std::ostream& os = out.stream();
  os << "k,chirb,r1rb,sschirb,ssr1rb,twice_best_ell_chirb,twice_best_ell_r1rb\n";
  for (int k = 0; k <= j.twice(); ++k) {
    HalfInt lc = best_ell(Protocol::chirb, j, k);
    HalfInt lr = best_ell(Protocol::r1rb, j, k);
    os << k << ',' << fmt17(zero_noise_variance(Protocol::chirb, j, k, lc)) << ','
       << fmt17(zero_noise_variance(Protocol::r1rb, j, k, lr)) << ','
       << fmt17(zero_noise_variance(Protocol::sschirb, j, k)) << ','
       << fmt17(zero_noise_variance(Protocol::ssr1rb, j, k)) << ',' << lc.twice() << ','
       << lr.twice() << '\n';
  }
  return 0;
}

int cmd_matrices(int twice_j, const std::string& out_path) {
  HalfInt j = HalfInt::from_twice(twice_j);
  Out out;
  out.open(out_path);
  std::ostream& os = out.stream();
  emit_matrix_csv(os, "M", m_matrix(j).mat);
  FMatrix fm = f_matrix(j, /*normalized=*/true);
  emit_matrix_csv(os, "F_normalized", fm.mat);
  emit_matrix_csv(os, "F_normalized_inverse", fm.inv);
  return 0;
}

int cmd_predict(int twice_j, const std::string& noise_kind, double gamma,
                const std::string& out_path) {
  HalfInt j = HalfInt::from_twice(twice_j);
  NoiseModel noise;
  if (noise_kind == "none") noise = NoiseModel::none();
  else if (noise_kind == "coherent_jz2") noise = NoiseModel::coherent(gamma);
  else if (noise_kind == "dephasing") noise = NoiseModel::dephasing(gamma);
  else throw ConfigError("unknown noise kind '" + noise_kind + "'");

  Prediction pred = predict_error_rates(j, noise);
  Out out;
  out.open(out_path);
  std::ostream& os = out.stream();
  os << "k,f,p_raw,p_clipped\n";
  for (int k = 0; k < pred.f.size(); ++k)
    os << k << ',' << fmt17(pred.f(k)) << ',' << fmt17(pred.p_raw(k)) << ','
       << fmt17(pred.p_clipped(k)) << '\n';
  os << "average_fidelity," << fmt17(pred.avg_fidelity) << '\n';
  return 0;
}

int cmd_complexity(const std::string& scheme_name, int n, const std::string& out_path) {
  FrameScheme scheme;
  if (scheme_name == "clifford_char") scheme = FrameScheme::clifford_char;
  else if (scheme_name == "pauli_char") scheme = FrameScheme::pauli_char;
  else if (scheme_name == "z2_char") scheme = FrameScheme::z2_char;
  else if (scheme_name == "pauli_frame_full") scheme = FrameScheme::pauli_frame_full;
  else if (scheme_name == "nonpauli_frame_full") scheme = FrameScheme::nonpauli_frame_full;
  else if (scheme_name == "nqubit_full") scheme = FrameScheme::nqubit_full;
  else if (scheme_name == "nqubit_rank1") scheme = FrameScheme::nqubit_rank1;
  else throw ConfigError("unknown scheme '" + scheme_name + "'");

  FrameComplexity fc = qubit_frame_complexity(scheme, n);
  Out out;
  out.open(out_path);
  std::ostream& os = out.stream();
  os << "scheme," << scheme_name << '\n';
  os << "n_group," << fc.n_group.str() << '\n';
  os << "coefficient,multiplicity\n";
  for (const auto& [value, mult] : fc.coefficients)
    os << value.str() << ',' << mult.str() << '\n';
  os << "uniform_metric," << fc.uniform_metric.str() << '\n';
  os << "optimal_metric," << fc.optimal_metric.str() << '\n';
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Spin-j randomized benchmarking simulator and calculator"};
  app.require_subcommand(1);

  // run
  std::string config_path, run_out = "results";
  std::optional<uint64_t> seed;
  std::optional<int> threads;
  bool force = false;
  auto* run = app.add_subcommand("run", "Run a benchmarking campaign from a JSON config");
  run->add_option("--config", config_path, "Campaign config (JSON)")->required();
  run->add_option("--out", run_out, "Results root directory");
  run->add_option("--seed", seed, "Override the config seed");
  run->add_option("--threads", threads, "Worker threads (0 = hardware concurrency)");
  run->add_flag("--force", force, "Overwrite an existing results directory");

  // tables
  int tab_twice_j = 7;
  std::string tab_out;
  auto* tables = app.add_subcommand("tables", "Zero-noise variance table per rank k");
  tables->add_option("--twice-j", tab_twice_j, "Twice the spin (e.g. 7 for j = 7/2)")->required();
  tables->add_option("--out", tab_out, "Output CSV (default stdout)");

  // matrices
  int mat_twice_j = 7;
  std::string mat_out;
  auto* matrices = app.add_subcommand("matrices", "M, normalized F, and F inverse as CSV");
  matrices->add_option("--twice-j", mat_twice_j, "Twice the spin")->required();
  matrices->add_option("--out", mat_out, "Output CSV (default stdout)");

  // predict
  int pre_twice_j = 7;
  std::string pre_noise = "none", pre_out;
  double pre_gamma = 0;
  auto* predict = app.add_subcommand("predict", "Exact quality parameters and error rates");
  predict->add_option("--twice-j", pre_twice_j, "Twice the spin")->required();
  predict->add_option("--noise", pre_noise, "none | coherent_jz2 | dephasing")->required();
  predict->add_option("--gamma", pre_gamma, "Noise strength");
  predict->add_option("--out", pre_out, "Output CSV (default stdout)");

  // complexity
  std::string cx_scheme, cx_out;
  int cx_n = 1;
  auto* complexity = app.add_subcommand("complexity", "Qubit frame sample-complexity calculator");
  complexity->add_option("--scheme", cx_scheme, "Scheme name")->required();
  complexity->add_option("--n", cx_n, "Number of qubits (n-qubit schemes)");
  complexity->add_option("--out", cx_out, "Output CSV (default stdout)");

  CLI11_PARSE(app, argc, argv);

  try {
    if (run->parsed()) return cmd_run(config_path, run_out, seed, threads, force);
    if (tables->parsed()) return cmd_tables(tab_twice_j, tab_out);
    if (matrices->parsed()) return cmd_matrices(mat_twice_j, mat_out);
    if (predict->parsed()) return cmd_predict(pre_twice_j, pre_noise, pre_gamma, pre_out);
    if (complexity->parsed()) return cmd_complexity(cx_scheme, cx_n, cx_out);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return 2;
  } catch (const NumericalHealthError& e) {
    std::cerr << "numerical health error: " << e.what() << '\n';
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
