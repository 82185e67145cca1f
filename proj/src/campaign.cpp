#include "su2rb/campaign.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>

namespace su2rb {

namespace {

using nlohmann::json;
using nlohmann::ordered_json;

void reject_unknown_keys(const json& obj, std::initializer_list<const char*> allowed,
                         const std::string& where) {
  for (auto it = obj.begin(); it != obj.end(); ++it) {
    bool known = false;
    for (const char* k : allowed)
      if (it.key() == k) { known = true; break; }
    if (!known) throw ConfigError("unknown key '" + it.key() + "' in " + where);
  }
}

NoiseModel parse_noise(const json& obj) {
  reject_unknown_keys(obj, {"kind", "gamma"}, "noise");
  std::string kind = obj.value("kind", "none");
  double gamma = obj.value("gamma", 0.0);
  if (gamma < 0) throw ConfigError("noise.gamma must be nonnegative");
  if (kind == "none") return NoiseModel::none();
  if (kind == "coherent_jz2") return NoiseModel::coherent(gamma);
  if (kind == "dephasing") return NoiseModel::dephasing(gamma);
  throw ConfigError("unknown noise.kind '" + kind + "'");
}

SpamModel parse_spam(const json& obj) {
  reject_unknown_keys(obj, {"phi", "meas_kind", "meas_phi"}, "spam");
  SpamModel spam;
  spam.prep_angle = obj.value("phi", 0.0);
  spam.meas_angle = obj.value("meas_phi", 0.0);
  std::string mk = obj.value("meas_kind", "ideal");
  if (mk == "ideal") spam.meas_kind = SpamModel::MeasKind::ideal;
  else if (mk == "coherent_rotation") spam.meas_kind = SpamModel::MeasKind::coherent_rotation;
  else if (mk == "permutation") spam.meas_kind = SpamModel::MeasKind::permutation;
  else throw ConfigError("unknown spam.meas_kind '" + mk + "'");
  return spam;
}

const char* noise_kind_name(NoiseModel::Kind k) {
  switch (k) {
    case NoiseModel::Kind::none: return "none";
    case NoiseModel::Kind::coherent_jz2: return "coherent_jz2";
    case NoiseModel::Kind::dephasing: return "dephasing";
    case NoiseModel::Kind::custom_kraus: return "custom_kraus";
  }
  return "?";
}

const char* meas_kind_name(SpamModel::MeasKind k) {
  switch (k) {
    case SpamModel::MeasKind::ideal: return "ideal";
    case SpamModel::MeasKind::coherent_rotation: return "coherent_rotation";
    case SpamModel::MeasKind::permutation: return "permutation";
  }
  return "?";
}

std::string fmt17(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

}  // namespace

CampaignConfig parse_campaign_config(const json& doc) {
  if (!doc.is_object()) throw ConfigError("config root must be a JSON object");
  reject_unknown_keys(doc,
                      {"twice_j", "protocol", "noise", "spam", "sequence_lengths",
                       "num_circuits", "shots", "seed", "twice_ell", "threads"},
                      "config");
  CampaignConfig cfg;
  try {
    if (!doc.contains("twice_j")) throw ConfigError("missing required key 'twice_j'");
    int twice_j = doc.at("twice_j").get<int>();
    if (twice_j < 0) throw ConfigError("twice_j must be nonnegative");
    cfg.plan.j = HalfInt::from_twice(twice_j);

    std::string proto_name = doc.value("protocol", "ssrb");
    auto proto = protocol_from_name(proto_name);
    if (!proto) throw ConfigError("unknown protocol '" + proto_name + "'");
    cfg.plan.protocol = *proto;

    cfg.plan.noise = doc.contains("noise") ? parse_noise(doc.at("noise")) : NoiseModel::none();
    cfg.plan.spam = doc.contains("spam") ? parse_spam(doc.at("spam")) : SpamModel::ideal();

    if (doc.contains("sequence_lengths"))
      cfg.plan.sequence_lengths = doc.at("sequence_lengths").get<std::vector<int>>();
    cfg.plan.num_circuits = doc.value("num_circuits", 1000L);
    cfg.plan.seed = doc.value("seed", uint64_t(0));
    cfg.plan.threads = doc.value("threads", 0);

    if (doc.contains("shots")) {
      const json& s = doc.at("shots");
      if (s.is_string() && s.get<std::string>() == "infinite")
        cfg.plan.shots = Shots::infinite_shots();
      else if (s.is_number_integer() && s.get<long>() >= 1)
        cfg.plan.shots = Shots::finite(s.get<long>());
      else
        throw ConfigError("shots must be \"infinite\" or a positive integer");
    }

    int twice_ell = doc.value("twice_ell", twice_j);  // default: highest level
    cfg.plan.ell = HalfInt::from_twice(twice_ell);

    cfg.plan.validate();
  } catch (const ConfigError&) {
    throw;
  } catch (const json::exception& e) {
    throw ConfigError(std::string("malformed config: ") + e.what());
  } catch (const std::domain_error& e) {
    throw ConfigError(std::string("invalid config: ") + e.what());
  }

  // Canonical echo: every field explicit, fixed key order.
  ordered_json c;
  c["twice_j"] = cfg.plan.j.twice();
  c["protocol"] = protocol_name(cfg.plan.protocol);
  c["noise"] = {{"kind", noise_kind_name(cfg.plan.noise.kind)}, {"gamma", cfg.plan.noise.gamma}};
  c["spam"] = {{"phi", cfg.plan.spam.prep_angle},
               {"meas_kind", meas_kind_name(cfg.plan.spam.meas_kind)},
               {"meas_phi", cfg.plan.spam.meas_angle}};
  c["sequence_lengths"] = cfg.plan.sequence_lengths;
  c["num_circuits"] = cfg.plan.num_circuits;
  if (cfg.plan.shots.infinite)
    c["shots"] = "infinite";
  else
    c["shots"] = cfg.plan.shots.per_circuit;
  c["seed"] = cfg.plan.seed;
  c["twice_ell"] = cfg.plan.ell.twice();
  c["threads"] = cfg.plan.threads;
  cfg.canonical = std::move(c);
  return cfg;
}

CampaignConfig load_campaign_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file: " + path.string());
  json doc;
  try {
    in >> doc;
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config is not valid JSON: ") + e.what());
  }
  return parse_campaign_config(doc);
}

std::string config_hash(const ordered_json& canonical) {
  // Thread count must not change the results directory: results are
  // thread-count-invariant by the engine contract.
  ordered_json c = canonical;
  c.erase("threads");
  std::string s = c.dump();
  uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char ch : s) {
    h ^= ch;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

// Extended-precision evaluation of the exact prediction. The smallest error
// rate of a weakly noisy spin-7/2 channel sits ~12 orders of magnitude below
// the quality parameters it is extracted from, so computing f through the
// dense double-precision superoperator and then solving F p = f loses the
// fourth significant digit of p_{2j} to cancellation. For the analytic noise
// kinds, f_k has the closed form
//   f_k = (1/(2j+1)) sum_{l,l'} (C^{j,l}_{j,l'; k,l-l'})^2 w(l, l')
// with w = exp(-gamma (l-l')^2) for dephasing and cos(gamma (l^2 - l'^2))
// for the coherent Jz^2 rotation, which we evaluate in 80-bit long double
// together with the F solve. Custom Kraus noise keeps the generic path.
namespace {
namespace hp {

using real = long double;

real fact(int n) {
  real r = 1;
  for (int i = 2; i <= n; ++i) r *= i;
  return r;
}

// Triangle coefficient Delta(a,b,c); arguments are twice-values.
real tri(int ta, int tb, int tc) {
  return fact((ta + tb - tc) / 2) * fact((ta - tb + tc) / 2) * fact((-ta + tb + tc) / 2) /
         fact((ta + tb + tc) / 2 + 1);
}

// Clebsch-Gordan C^{j,m}_{j1,m1; j2,m2} by the Racah sum; twice-values.
real cg(int tj1, int tm1, int tj2, int tm2, int tj, int tm) {
  if (tm1 + tm2 != tm) return 0;
  if (tj < std::abs(tj1 - tj2) || tj > tj1 + tj2 || (tj1 + tj2 + tj) % 2 != 0) return 0;
  const int a = (tj1 + tj2 - tj) / 2;
  const int b = (tj1 - tm1) / 2;
  const int c = (tj2 + tm2) / 2;
  const int d = (tj - tj2 + tm1) / 2;
  const int e = (tj - tj1 - tm2) / 2;
  real pre = sqrtl(real(tj + 1) * tri(tj1, tj2, tj) * fact((tj1 + tm1) / 2) *
                   fact((tj1 - tm1) / 2) * fact((tj2 + tm2) / 2) * fact((tj2 - tm2) / 2) *
                   fact((tj + tm) / 2) * fact((tj - tm) / 2));
  real sum = 0;
  for (int t = std::max({0, -d, -e}); t <= std::min({a, b, c}); ++t) {
    real term = 1 / (fact(t) * fact(a - t) * fact(b - t) * fact(c - t) * fact(d + t) *
                     fact(e + t));
    sum += (t % 2 ? -term : term);
  }
  return pre * sum;
}

// 6-j symbol {j1 j2 j3; j4 j5 j6} by the Racah sum; twice-values. Triangle
// validity is guaranteed by the caller (k, k' <= 2j with integer k).
real sixj(int ta, int tb, int tc, int td, int te, int tf) {
  real pre = sqrtl(tri(ta, tb, tc) * tri(ta, te, tf) * tri(td, tb, tf) * tri(td, te, tc));
  const int s1 = (ta + tb + tc) / 2, s2 = (ta + te + tf) / 2;
  const int s3 = (td + tb + tf) / 2, s4 = (td + te + tc) / 2;
  const int p1 = (ta + tb + td + te) / 2, p2 = (tb + tc + te + tf) / 2;
  const int p3 = (tc + ta + tf + td) / 2;
  real sum = 0;
  for (int t = std::max({s1, s2, s3, s4}); t <= std::min({p1, p2, p3}); ++t) {
    real term = fact(t + 1) / (fact(t - s1) * fact(t - s2) * fact(t - s3) * fact(t - s4) *
                               fact(p1 - t) * fact(p2 - t) * fact(p3 - t));
    sum += (t % 2 ? -term : term);
  }
  return pre * sum;
}

// f_k for the analytic noise kinds; returns an empty vector for kinds that
// must go through the generic superoperator path.
std::vector<real> quality_params(int tj, const NoiseModel& noise) {
  const int n_k = tj + 1;
  std::vector<real> f(size_t(n_k), 1.0L);
  if (noise.kind == NoiseModel::Kind::none) return f;
  if (noise.kind != NoiseModel::Kind::coherent_jz2 && noise.kind != NoiseModel::Kind::dephasing)
    return {};
  const real gamma = noise.gamma;
  for (int k = 0; k < n_k; ++k) {
    real s = 0;
    for (int tl = -tj; tl <= tj; tl += 2)
      for (int tlp = -tj; tlp <= tj; tlp += 2) {
        const int tq = tl - tlp;
        if (std::abs(tq) > 2 * k) continue;
        real c = cg(tj, tlp, 2 * k, tq, tj, tl);
        real w;
        if (noise.kind == NoiseModel::Kind::dephasing) {
          const real n = real(tq) / 2;
          w = expl(-gamma * n * n);
        } else {
          // <l| U T^k_q U^dag |l'> phase for U = exp(-i gamma Jz^2).
          w = cosl(gamma * (real(tl) * tl - real(tlp) * tlp) / 4);
        }
        s += c * c * w;
      }
    f[size_t(k)] = s / (tj + 1);
  }
  return f;
}

// Solve F p = f with the normalized F matrix built in long double.
std::vector<real> error_rates_hp(int tj, const std::vector<real>& f) {
  const int n = tj + 1;
  std::vector<std::vector<real>> F(static_cast<size_t>(n),
                                   std::vector<real>(static_cast<size_t>(n)));
  for (int k = 0; k < n; ++k)
    for (int kp = 0; kp < n; ++kp) {
      const int sign = ((tj + k + kp) % 2 == 0) ? 1 : -1;
      F[size_t(k)][size_t(kp)] = real(n) * sign * sixj(2 * k, tj, tj, 2 * kp, tj, tj);
    }
  std::vector<real> p = f;
  for (int c = 0; c < n; ++c) {  // Gauss-Jordan with partial pivoting
    int piv = c;
    for (int r = c + 1; r < n; ++r)
      if (fabsl(F[size_t(r)][size_t(c)]) > fabsl(F[size_t(piv)][size_t(c)])) piv = r;
    std::swap(F[size_t(c)], F[size_t(piv)]);
    std::swap(p[size_t(c)], p[size_t(piv)]);
    for (int r = 0; r < n; ++r) {
      if (r == c) continue;
      real m = F[size_t(r)][size_t(c)] / F[size_t(c)][size_t(c)];
      for (int cc = c; cc < n; ++cc) F[size_t(r)][size_t(cc)] -= m * F[size_t(c)][size_t(cc)];
      p[size_t(r)] -= m * p[size_t(c)];
    }
  }
  for (int k = 0; k < n; ++k) p[size_t(k)] /= F[size_t(k)][size_t(k)];
  return p;
}

}  // namespace hp
}  // namespace

Prediction predict_error_rates(HalfInt j, const NoiseModel& noise) {
  Prediction out;
  std::vector<hp::real> f_hp = hp::quality_params(j.twice(), noise);
  if (!f_hp.empty()) {
    std::vector<hp::real> p_hp = hp::error_rates_hp(j.twice(), f_hp);
    const Eigen::Index n = Eigen::Index(f_hp.size());
    out.f.resize(n);
    out.p_raw.resize(n);
    out.p_clipped.resize(n);
    for (Eigen::Index k = 0; k < n; ++k) {
      out.f[k] = double(f_hp[size_t(k)]);
      out.p_raw[k] = double(p_hp[size_t(k)]);
      out.p_clipped[k] = std::max(out.p_raw[k], 0.0);
    }
  } else {
    Superoperator chan = gate_error_channel(j, noise);
    out.f = exact_quality_params(chan);
    FMatrix fm = f_matrix(j, /*normalized=*/true);
    auto [p_raw, p_clipped] = error_rates(out.f, fm);
    out.p_raw = p_raw;
    out.p_clipped = p_clipped;
  }
  out.avg_fidelity = average_fidelity(j, out.f);
  return out;
}

CampaignFiles run_campaign(const CampaignConfig& config, const std::filesystem::path& out_root,
                           bool force) {
  namespace fs = std::filesystem;
  CampaignFiles files;
  files.dir = out_root / config_hash(config.canonical);
  if (fs::exists(files.dir)) {
    if (!force)
      throw ConfigError("results directory already exists (use --force to overwrite): " +
                        files.dir.string());
    fs::remove_all(files.dir);
  }
  fs::create_directories(files.dir);

  auto t0 = std::chrono::steady_clock::now();
  ProbabilityTable table = estimate(config.plan);

  files.decays_csv = files.dir / "decays.csv";
  {
    std::ofstream csv(files.decays_csv);
    csv << "k,m,d_km,stderr,n_circuits\n";
    for (int k = 0; k < table.n_k; ++k)
      for (size_t mi = 0; mi < table.ms.size(); ++mi)
        csv << k << ',' << table.ms[mi] << ',' << fmt17(table.d(int(mi), k)) << ','
            << fmt17(table.std_error(int(mi), k)) << ',' << table.n_circuits << '\n';
  }

  ordered_json result;
  result["config"] = config.canonical;
  result["seed"] = config.plan.seed;
  if (table.n_k == dim(config.plan.j)) {
    FMatrix fm = f_matrix(config.plan.j, /*normalized=*/true);
    RBResult rb = analyze(table, fm);
    auto vec = [](const Eigen::VectorXd& v) {
      std::vector<double> o(v.data(), v.data() + v.size());
      return o;
    };
    result["f"] = vec(rb.f);
    result["sigma_f"] = vec(rb.sigma_f);
    result["p_raw"] = vec(rb.p_raw);
    result["p_clipped"] = vec(rb.p_clipped);
    result["sigma_p"] = vec(rb.sigma_p);
    result["average_fidelity"] = rb.avg_fidelity;
    result["f_condition_number"] = fm.condition_number;
  }
  result["metadata"] = {
      {"per_k_weights_share_circuit_stream", is_weighted(config.plan.protocol)},
      {"measurement_axis_stream", "independent of preparation axes"},
      {"default_sequence_lengths", "geometric {1,2,4,8,16,32,64}"},
  };
  double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  result["wall_time_seconds"] = wall;

  files.result_json = files.dir / "result.json";
  std::ofstream(files.result_json) << result.dump(2) << '\n';
  return files;
}

}  // namespace su2rb
