#include "harness.hpp"

#include <algorithm>
#include <array>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <exception>
#include <filesystem>
#include <fstream>
#include <limits>
#include <mutex>
#include <set>
#include <sstream>
#include <thread>

namespace mdn {

using nlohmann::json;

namespace {

const char* p_mode_name(UpdateProbabilityMode m) {
  return m == UpdateProbabilityMode::Pilot ? "pilot" : "analytic";
}

UpdateProbabilityMode parse_p_mode(const std::string& s) {
  if (s == "pilot") return UpdateProbabilityMode::Pilot;
  if (s == "analytic") return UpdateProbabilityMode::Analytic;
  fail(ErrorKind::Config, "theory.p_mode must be 'pilot' or 'analytic', got '" + s + "'");
}

json number_or_inf(double x) {
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  return x;
}

double read_number(const json& v, const std::string& key) {
  if (v.is_string()) {
    const auto s = v.get<std::string>();
    if (s == "inf") return std::numeric_limits<double>::infinity();
    fail(ErrorKind::Config, key + ": expected a number, got '" + s + "'");
  }
  if (!v.is_number()) fail(ErrorKind::Config, key + ": expected a number");
  return v.get<double>();
}

long read_integer(const json& v, const std::string& key) {
  if (!v.is_number_integer()) fail(ErrorKind::Config, key + ": expected an integer");
  return v.get<long>();
}

// Visits every member of obj, rejecting keys outside `allowed`.
template <class F>
void for_members(const json& obj, const std::string& where, std::initializer_list<const char*> allowed,
                 F&& f) {
  if (!obj.is_object()) fail(ErrorKind::Config, where + ": expected an object");
  const std::set<std::string> ok(allowed.begin(), allowed.end());
  for (auto it = obj.begin(); it != obj.end(); ++it) {
    if (!ok.count(it.key()))
      fail(ErrorKind::Config, "unknown config key '" + (where.empty() ? "" : where + ".") + it.key() + "'");
    f(it.key(), it.value());
  }
}

std::string fmt(const char* format, double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, format, x);
  return buf;
}

}  // namespace

json config_to_json(const ExperimentConfig& c) {
  json doc;
  doc["topology"] = c.topology;
  doc["bank_file"] = c.bank_file;
  doc["input"] = {{"kind", to_string(c.input_kind)}, {"coefficients", c.input_coefficients}};
  doc["noise"] = {{"p_r", c.p_r}, {"kappa", c.kappa}};
  doc["algorithm"] = to_string(c.algorithm);
  doc["step"] = {{"mu", c.step.mu},
                 {"eta", c.step.eta},
                 {"eps_reg", c.step.eps_reg},
                 {"n_d", c.step.subbands},
                 {"P", c.step.projection_order},
                 {"sigma_mcc", c.step.sigma_mcc},
                 {"prototype_length", c.prototype_length}};
  doc["robust"] = {{"gamma", c.robust.gamma},
                   {"k_xi", number_or_inf(c.robust.k_xi)},
                   {"n_w", c.robust.n_w},
                   {"sigma0_sq", c.robust.sigma0_sq}};
  doc["M"] = c.M;
  doc["iterations"] = c.iterations;
  doc["trials"] = c.trials;
  doc["seed"] = c.seed;
  doc["tracking_flip"] = c.tracking_flip;
  doc["sweep"] = {{"mu", c.sweep_mu}, {"n_d", c.sweep_nd}};
  doc["theory"] = {{"samples", c.theory.samples},
                   {"p_mode", p_mode_name(c.theory.p_mode)},
                   {"pilot_updates", c.theory.pilot_updates},
                   {"pilot_window", c.theory.pilot_window},
                   {"pilot_trials", c.theory.pilot_trials},
                   {"cap", c.theory_cap},
                   {"cache", c.moments_cache}};
  std::vector<std::string> algos;
  for (auto a : c.compare_algorithms) algos.push_back(to_string(a));
  doc["compare"] = {{"figure", c.compare_figure},
                    {"input", to_string(c.compare_input)},
                    {"algorithms", algos}};
  doc["threads"] = c.threads;
  doc["output"] = c.output;
  return doc;
}

ExperimentConfig config_from_json(const json& doc) {
  ExperimentConfig c;
  try {
    for_members(doc, "",
                {"topology", "bank_file", "input", "noise", "algorithm", "step", "robust", "M",
                 "iterations", "trials", "seed", "tracking_flip", "sweep", "theory", "compare",
                 "threads", "output"},
                [&](const std::string& key, const json& v) {
      if (key == "topology") c.topology = v.get<std::string>();
      else if (key == "bank_file") c.bank_file = v.get<std::string>();
      else if (key == "algorithm") c.algorithm = parse_algorithm(v.get<std::string>());
      else if (key == "M") c.M = static_cast<int>(read_integer(v, key));
      else if (key == "iterations") c.iterations = read_integer(v, key);
      else if (key == "trials") c.trials = static_cast<int>(read_integer(v, key));
      else if (key == "seed") {
        if (!v.is_number_unsigned()) fail(ErrorKind::Config, "seed: expected a nonnegative integer");
        c.seed = v.get<std::uint64_t>();
      }
      else if (key == "tracking_flip") c.tracking_flip = read_integer(v, key);
      else if (key == "threads") c.threads = static_cast<int>(read_integer(v, key));
      else if (key == "output") c.output = v.get<std::string>();
      else if (key == "input") {
        for_members(v, key, {"kind", "coefficients"}, [&](const std::string& k, const json& x) {
          if (k == "kind") c.input_kind = parse_input_kind(x.get<std::string>());
          else c.input_coefficients = x.get<std::vector<double>>();
        });
      } else if (key == "noise") {
        for_members(v, key, {"p_r", "kappa"}, [&](const std::string& k, const json& x) {
          (k == "p_r" ? c.p_r : c.kappa) = read_number(x, "noise." + k);
        });
      } else if (key == "step") {
        for_members(v, key, {"mu", "eta", "eps_reg", "n_d", "P", "sigma_mcc", "prototype_length"},
                    [&](const std::string& k, const json& x) {
          const std::string where = "step." + k;
          if (k == "mu") c.step.mu = read_number(x, where);
          else if (k == "eta") c.step.eta = read_number(x, where);
          else if (k == "eps_reg") c.step.eps_reg = read_number(x, where);
          else if (k == "n_d") c.step.subbands = static_cast<int>(read_integer(x, where));
          else if (k == "P") c.step.projection_order = static_cast<int>(read_integer(x, where));
          else if (k == "sigma_mcc") c.step.sigma_mcc = read_number(x, where);
          else c.prototype_length = static_cast<int>(read_integer(x, where));
        });
      } else if (key == "robust") {
        for_members(v, key, {"gamma", "k_xi", "n_w", "sigma0_sq"}, [&](const std::string& k, const json& x) {
          const std::string where = "robust." + k;
          if (k == "gamma") c.robust.gamma = read_number(x, where);
          else if (k == "k_xi") c.robust.k_xi = read_number(x, where);
          else if (k == "n_w") c.robust.n_w = static_cast<int>(read_integer(x, where));
          else c.robust.sigma0_sq = read_number(x, where);
        });
      } else if (key == "sweep") {
        for_members(v, key, {"mu", "n_d"}, [&](const std::string& k, const json& x) {
          if (k == "mu") c.sweep_mu = x.get<std::vector<double>>();
          else c.sweep_nd = x.get<std::vector<int>>();
        });
      } else if (key == "theory") {
        for_members(v, key,
                    {"samples", "p_mode", "pilot_updates", "pilot_window", "pilot_trials", "cap", "cache"},
                    [&](const std::string& k, const json& x) {
          const std::string where = "theory." + k;
          if (k == "samples") c.theory.samples = read_integer(x, where);
          else if (k == "p_mode") c.theory.p_mode = parse_p_mode(x.get<std::string>());
          else if (k == "pilot_updates") c.theory.pilot_updates = read_integer(x, where);
          else if (k == "pilot_window") c.theory.pilot_window = read_integer(x, where);
          else if (k == "pilot_trials") c.theory.pilot_trials = static_cast<int>(read_integer(x, where));
          else if (k == "cap") c.theory_cap = read_integer(x, where);
          else c.moments_cache = x.get<std::string>();
        });
      } else if (key == "compare") {
        for_members(v, key, {"figure", "input", "algorithms"}, [&](const std::string& k, const json& x) {
          if (k == "figure") c.compare_figure = x.get<std::string>();
          else if (k == "input") c.compare_input = parse_input_kind(x.get<std::string>());
          else {
            c.compare_algorithms.clear();
            for (const auto& s : x.get<std::vector<std::string>>())
              c.compare_algorithms.push_back(parse_algorithm(s));
          }
        });
      }
    });
  } catch (const json::exception& e) {
    fail(ErrorKind::Config, std::string("config: ") + e.what());
  } catch (const Error& e) {
    if (e.kind() == ErrorKind::InvalidArgument) fail(ErrorKind::Config, e.what());
    throw;
  }
  c.theory.seed = c.seed;
  return c;
}

void apply_override(json& doc, const std::string& assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string::npos || eq == 0)
    fail(ErrorKind::Config, "override '" + assignment + "' is not of the form key=value");
  const std::string key = assignment.substr(0, eq);
  const std::string text = assignment.substr(eq + 1);
  json value = json::parse(text, nullptr, false);
  if (value.is_discarded()) value = text;
  json* node = &doc;
  std::stringstream path(key);
  std::string part;
  std::vector<std::string> parts;
  while (std::getline(path, part, '.')) parts.push_back(part);
  for (std::size_t i = 0; i < parts.size(); ++i) {
    if (parts[i].empty()) fail(ErrorKind::Config, "override key '" + key + "' has an empty segment");
    if (!node->is_object()) *node = json::object();
    node = &(*node)[parts[i]];
  }
  *node = std::move(value);
}

void merge_json(json& dst, const json& src) {
  if (!src.is_object() || !dst.is_object()) {
    dst = src;
    return;
  }
  for (auto it = src.begin(); it != src.end(); ++it) {
    if (dst.contains(it.key()) && dst[it.key()].is_object() && it.value().is_object())
      merge_json(dst[it.key()], it.value());
    else
      dst[it.key()] = it.value();
  }
}

json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorKind::Config, "cannot open config file '" + path + "'");
  json doc = json::parse(in, nullptr, false);
  if (doc.is_discarded()) fail(ErrorKind::Config, "config file '" + path + "' is not valid JSON");
  return doc;
}

void validate(const ExperimentConfig& c) {
  require(c.trials >= 1, "trials must be at least 1", ErrorKind::Config);
  require(c.iterations >= 1, "iterations must be at least 1", ErrorKind::Config);
  require(c.M >= 1, "filter length M must be positive", ErrorKind::Config);
  require(c.threads >= 0, "threads must be nonnegative", ErrorKind::Config);
  require(c.prototype_length >= 0, "prototype_length must be nonnegative", ErrorKind::Config);
  require(c.theory_cap >= 1, "theory cap must be positive", ErrorKind::Config);
  require(c.compare_figure == "fig8" || c.compare_figure == "fig9",
          "compare.figure must be 'fig8' or 'fig9'", ErrorKind::Config);
  for (double mu : c.sweep_mu) require(mu >= 0.0, "sweep step sizes must be nonnegative", ErrorKind::Config);
  for (int nd : c.sweep_nd) require(nd >= 1, "sweep subband counts must be positive", ErrorKind::Config);
  try {
    c.step.validate(c.algorithm);
    (void)init_threshold(c.robust);
  } catch (const Error& e) {
    fail(ErrorKind::Config, e.what());
  }
}

std::uint64_t config_hash(const ExperimentConfig& c) {
  json doc = config_to_json(c);
  doc.erase("threads");
  doc.erase("output");
  const std::string text = doc.dump();
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char ch : text) {
    h ^= ch;
    h *= 1099511628211ULL;
  }
  return h;
}

Scenario build_scenario(const ExperimentConfig& c) {
  validate(c);
  const NetworkPreset preset = resolve_network_preset(c.topology);
  Scenario sc;
  try {
    sc.topology = build_topology(preset.spec);
  } catch (const Error& e) {
    fail(ErrorKind::Config, "topology '" + c.topology + "': " + e.what());
  }
  const int n = sc.topology.size();
  sc.alpha = uniform_combination_weights(sc.topology);
  sc.gamma = inter_cluster_weights(sc.topology);
  sc.M = c.M;
  std::vector<double> offsets = preset.offsets;
  if (offsets.empty()) offsets.assign(sc.topology.cluster_count(), 0.0);
  require(static_cast<int>(offsets.size()) == sc.topology.cluster_count(),
          "topology '" + c.topology + "' needs one offset per cluster", ErrorKind::Config);
  sc.targets = generate_targets(sc.topology, c.M, offsets,
                                derive_seed(c.seed, 0, 0, StreamRole::Target));

  std::vector<double> coef = c.input_coefficients;
  if (coef.empty()) {
    if (c.input_kind == InputKind::Ar1) coef = {0.95};
    if (c.input_kind == InputKind::Ar2) coef = {0.1, 0.8};
  }
  const std::size_t need = c.input_kind == InputKind::White ? 0 : c.input_kind == InputKind::Ar1 ? 1 : 2;
  require(coef.size() == need,
          "input." + to_string(c.input_kind) + " takes " + std::to_string(need) + " coefficient(s)",
          ErrorKind::Config);
  for (int k = 0; k < n; ++k) {
    InputModel in;
    in.kind = c.input_kind;
    in.beta1 = need > 0 ? coef[0] : 0.0;
    in.beta2 = need > 1 ? coef[1] : 0.0;
    in.sigma_delta_sq = preset.sigma_delta_sq[k];
    NoiseModel nm{preset.sigma_g_sq[k], c.p_r, c.kappa};
    try {
      in.validate();
      nm.validate();
    } catch (const Error& e) {
      fail(ErrorKind::Config, e.what());
    }
    sc.inputs.push_back(in);
    sc.noises.push_back(nm);
  }

  sc.algorithm = c.algorithm;
  sc.step = c.step;
  sc.threshold = c.robust;
  sc.flip_at = c.tracking_flip;
  if (is_subband(c.algorithm)) {
    if (!c.bank_file.empty()) {
      sc.bank = load_bank_file(c.bank_file);
      require(sc.bank.subbands == c.step.subbands,
              "bank file has " + std::to_string(sc.bank.subbands) + " subbands but step.n_d is " +
                  std::to_string(c.step.subbands),
              ErrorKind::Config);
    } else {
      const int lp = c.prototype_length > 0 ? c.prototype_length : default_prototype_length(c.step.subbands);
      try {
        sc.bank = design_bank(c.step.subbands, lp);
      } catch (const Error& e) {
        fail(ErrorKind::Config, e.what());
      }
    }
  }
  return sc;
}

double to_db(double linear) {
  if (!(linear > 0.0)) return kDbFloor;
  return std::max(kDbFloor, 10.0 * std::log10(linear));
}

double empirical_msd(const std::vector<NodeFilterState>& states, const std::vector<Vec>& targets) {
  require(states.size() == targets.size() && !states.empty(), "states and targets differ in size");
  double acc = 0.0;
  for (std::size_t k = 0; k < states.size(); ++k) {
    require(states[k].w.size() == targets[k].size(), "weight and target lengths differ");
    acc += (targets[k] - states[k].w).squaredNorm();
  }
  return acc / static_cast<double>(states.size());
}

namespace {

constexpr int kChunkTrials = 10;
constexpr double kSaturation = 1e10;

struct ChunkSum {
  std::vector<double> sum, sumsq;
  bool diverged = false;
};

ChunkSum run_chunk(const Scenario& sc, long iterations, int first, int last, std::uint64_t seed) {
  ChunkSum out;
  out.sum.assign(iterations, 0.0);
  out.sumsq.assign(iterations, 0.0);
  for (int trial = first; trial < last; ++trial) {
    TrialSimulator sim(sc, seed, static_cast<std::uint64_t>(trial));
    for (long t = 0; t < iterations; ++t) {
      double m = sim.msd();
      if (!std::isfinite(m) || m > kSaturation) {
        // Blown-up trial: hold it at the saturation level from here on.
        out.diverged = true;
        for (long r = t; r < iterations; ++r) {
          out.sum[r] += kSaturation;
          out.sumsq[r] += kSaturation * kSaturation;
        }
        break;
      }
      out.sum[t] += m;
      out.sumsq[t] += m * m;
      sim.step();
    }
  }
  return out;
}

int resolve_threads(int requested, int work) {
  int n = requested > 0 ? requested : static_cast<int>(std::thread::hardware_concurrency());
  return std::clamp(n, 1, std::max(1, work));
}

}  // namespace

MsdCurve run_monte_carlo(const Scenario& sc, long iterations, int trials, std::uint64_t seed,
                         int threads) {
  require(trials >= 1 && iterations >= 1, "trials and iterations must be positive");
  const int chunks = (trials + kChunkTrials - 1) / kChunkTrials;
  std::vector<ChunkSum> parts(chunks);
  std::atomic<int> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  auto worker = [&] {
    for (int c = next++; c < chunks; c = next++) {
      try {
        parts[c] = run_chunk(sc, iterations, c * kChunkTrials, std::min(trials, (c + 1) * kChunkTrials), seed);
      } catch (...) {
        std::lock_guard<std::mutex> lock(error_mutex);
        if (!error) error = std::current_exception();
      }
    }
  };
  const int nthreads = resolve_threads(threads, chunks);
  if (nthreads == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int i = 0; i < nthreads; ++i) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }
  if (error) std::rethrow_exception(error);

  MsdCurve curve;
  curve.trials = trials;
  std::vector<double> sum(iterations, 0.0), sumsq(iterations, 0.0);
  for (const auto& p : parts) {
    curve.diverged = curve.diverged || p.diverged;
    for (long t = 0; t < iterations; ++t) {
      sum[t] += p.sum[t];
      sumsq[t] += p.sumsq[t];
    }
  }
  curve.msd_lin.resize(iterations);
  curve.msd_db.resize(iterations);
  curve.std_error.resize(iterations);
  const double T = trials;
  for (long t = 0; t < iterations; ++t) {
    const double mean = sum[t] / T;
    curve.msd_lin[t] = mean;
    curve.msd_db[t] = to_db(mean);
    if (trials > 1) {
      const double var = std::max(0.0, (sumsq[t] - T * mean * mean) / (T - 1.0));
      curve.std_error[t] = std::sqrt(var / T);
    }
    if (curve.msd_db[t] > kDivergenceDb) curve.diverged = true;
  }
  const long tail = std::min<long>(100, iterations);
  double acc = 0.0;
  for (long t = iterations - tail; t < iterations; ++t) acc += curve.msd_lin[t];
  curve.steady_state_db = to_db(acc / tail);
  return curve;
}

MsdCurve run_monte_carlo(const ExperimentConfig& cfg) {
  const Scenario sc = build_scenario(cfg);
  MsdCurve c = run_monte_carlo(sc, cfg.iterations, cfg.trials, cfg.seed, cfg.threads);
  c.config_hash = config_hash(cfg);
  return c;
}

MsdCurve tracking_experiment(const ExperimentConfig& cfg) {
  require(cfg.tracking_flip >= 0, "tracking experiment needs tracking_flip", ErrorKind::Config);
  return run_monte_carlo(cfg);
}

MomentSet theory_moments(const ExperimentConfig& cfg, const Scenario& sc) {
  MomentOptions opt = cfg.theory;
  opt.seed = cfg.seed;
  std::string path;
  if (!cfg.moments_cache.empty()) {
    char name[64];
    std::snprintf(name, sizeof name, "moments-%016llx.csv",
                  static_cast<unsigned long long>(config_hash(cfg)));
    std::filesystem::create_directories(cfg.moments_cache);
    path = (std::filesystem::path(cfg.moments_cache) / name).string();
    if (std::filesystem::exists(path)) return load_moments(path);
  }
  MomentSet m = estimate_moments(sc, opt);
  if (!path.empty()) save_moments(m, path);
  return m;
}

TheoryReport theory_experiment(const ExperimentConfig& cfg, bool with_bound) {
  require(is_subband(cfg.algorithm), "theory is available for md-nmsaf only", ErrorKind::Config);
  const Scenario sc = build_scenario(cfg);
  const long d = static_cast<long>(sc.nodes()) * sc.M;
  if (d * d > cfg.theory_cap)
    fail(ErrorKind::Capacity, "theory needs N^2 M^2 = " + std::to_string(d * d) +
                                  " which exceeds theory.cap = " + std::to_string(cfg.theory_cap));
  TheoryReport r;
  r.moments = theory_moments(cfg, sc);
  const NetworkMatrices net = network_matrices(sc);
  r.mean_bound = mean_step_bound(r.moments, cfg.step.eta);
  if (with_bound) r.ms_bound = ms_step_bound(r.moments, net);
  const long stride = sc.update_stride();
  const long T = (cfg.iterations + stride - 1) / stride;
  r.transient_lin = transient_msd(r.moments, net, cfg.step.mu, T, cfg.theory_cap);
  try {
    r.steady_state_lin = steady_state_msd(r.moments, net, cfg.step.mu, cfg.theory_cap);
  } catch (const Error& e) {
    if (e.kind() != ErrorKind::Unstable) throw;
    r.note = e.what();
  }
  return r;
}

std::vector<double> theory_on_sample_axis(const std::vector<double>& transient, long iterations,
                                          int stride) {
  std::vector<double> out(iterations);
  for (long t = 0; t < iterations; ++t) {
    const std::size_t n = static_cast<std::size_t>((t + stride - 1) / stride);
    out[t] = transient[std::min(n, transient.size() - 1)];
  }
  return out;
}

std::vector<SweepRow> sweep_steady_state(const ExperimentConfig& cfg, bool with_theory) {
  const std::vector<double> mus = cfg.sweep_mu.empty() ? std::vector<double>{cfg.step.mu} : cfg.sweep_mu;
  const std::vector<int> nds = cfg.sweep_nd.empty() ? std::vector<int>{cfg.step.subbands} : cfg.sweep_nd;
  std::vector<SweepRow> rows;
  for (int nd : nds)
    for (double mu : mus) {
      ExperimentConfig c = cfg;
      c.step.mu = mu;
      c.step.subbands = nd;
      c.sweep_mu.clear();
      c.sweep_nd.clear();
      const Scenario sc = build_scenario(c);
      SweepRow row;
      row.mu = mu;
      row.n_d = nd;
      row.curve = run_monte_carlo(sc, c.iterations, c.trials, c.seed, c.threads);
      row.curve.config_hash = config_hash(c);
      row.sim_db = row.curve.steady_state_db;
      row.diverged = row.curve.diverged;
      row.theory_db = std::numeric_limits<double>::quiet_NaN();
      const long d = static_cast<long>(sc.nodes()) * sc.M;
      if (with_theory && is_subband(c.algorithm) && d * d <= c.theory_cap) {
        row.moments = theory_moments(c, sc);
        try {
          row.theory_db = to_db(steady_state_msd(*row.moments, network_matrices(sc), mu, c.theory_cap));
        } catch (const Error& e) {
          if (e.kind() != ErrorKind::Unstable) throw;
        }
      }
      rows.push_back(std::move(row));
    }
  return rows;
}

ComplexityCounts complexity_report(Algorithm a, const Topology& t, int M, int n_d, int P) {
  require(M >= 1 && n_d >= 1 && P >= 1, "complexity parameters must be positive");
  ComplexityCounts c{a, 0, 0, "0"};
  const long long L = M, D = n_d, p = P;
  for (int k = 0; k < t.size(); ++k) {
    const long long m = static_cast<long long>(t.inter_neighbors(k).size());
    const long long n = static_cast<long long>(t.intra_neighbors(k).size());
    switch (a) {
      case Algorithm::MdLms:
        c.multiplications += (m + n + 1) * L + 1;
        c.additions += (m + n) * L;
        break;
      case Algorithm::MdApa:
      case Algorithm::MdApm:
      case Algorithm::MdApmcc:
        c.multiplications += (p * p + 2 * p + m + n) * L + p * p * p + p * p;
        if (a == Algorithm::MdApmcc) c.multiplications += 6 * p;
        c.additions += (p * p + 2 * p + 2 * m + n - 1) * L + p * p * p;
        c.dmi = "O(P^3)";
        break;
      case Algorithm::MdNmsaf:
        c.multiplications += (m + n + D + 2) * L + 2;
        c.additions += (m + n + 2 * D - 1) * L - D;
        break;
    }
  }
  return c;
}

std::vector<ComplexityCounts> complexity_table(const ExperimentConfig& cfg) {
  const NetworkPreset preset = resolve_network_preset(cfg.topology);
  const Topology t = build_topology(preset.spec);
  std::vector<ComplexityCounts> out;
  for (auto a : {Algorithm::MdLms, Algorithm::MdApa, Algorithm::MdApm, Algorithm::MdApmcc, Algorithm::MdNmsaf})
    out.push_back(complexity_report(a, t, cfg.M, cfg.step.subbands, cfg.step.projection_order));
  return out;
}

ExperimentConfig comparison_settings(const ExperimentConfig& base, Algorithm a, InputKind input) {
  ExperimentConfig c = base;
  const int col = input == InputKind::White ? 0 : input == InputKind::Ar1 ? 1 : 2;
  c.topology = "n15";
  c.M = 16;
  c.algorithm = a;
  c.input_kind = input;
  c.input_coefficients = input == InputKind::Ar1   ? std::vector<double>{0.9}
                         : input == InputKind::Ar2 ? std::vector<double>{0.1, 0.8}
                                                   : std::vector<double>{};
  c.p_r = std::array<double, 3>{0.01, 0.001, 0.01}[col];
  c.kappa = 1e4;
  c.step.eta = 0.01;
  c.prototype_length = 0;
  c.bank_file.clear();
  switch (a) {
    case Algorithm::MdLms: c.step.mu = 0.002; break;
    case Algorithm::MdApa:
      c.step.mu = 0.008;
      c.step.projection_order = 2;
      break;
    case Algorithm::MdApm:
      c.step.mu = std::array<double, 3>{0.009, 0.009, 0.0065}[col];
      c.step.projection_order = 2;
      break;
    case Algorithm::MdApmcc:
      c.step.mu = 0.008;
      c.step.projection_order = 2;
      c.step.sigma_mcc = 4.0;
      break;
    case Algorithm::MdNmsaf:
      c.step.mu = std::array<double, 3>{0.017, 0.015, 0.018}[col];
      c.step.subbands = 4;
      break;
  }
  c.tracking_flip = base.compare_figure == "fig9" ? base.iterations / 2 : -1;
  return c;
}

Comparison comparison_experiment(const ExperimentConfig& base) {
  validate(base);
  Comparison out;
  out.algorithms = base.compare_algorithms;
  if (out.algorithms.empty())
    out.algorithms = {Algorithm::MdLms, Algorithm::MdApa, Algorithm::MdApm, Algorithm::MdApmcc,
                      Algorithm::MdNmsaf};
  for (auto a : out.algorithms) out.curves.push_back(run_monte_carlo(comparison_settings(base, a, base.compare_input)));
  return out;
}

long first_crossing(const MsdCurve& c, double level_db) {
  for (std::size_t t = 0; t < c.msd_db.size(); ++t)
    if (c.msd_db[t] <= level_db) return static_cast<long>(t);
  return -1;
}

std::string curve_csv(const MsdCurve& c) {
  std::string out = "n,msd_db\n";
  for (std::size_t t = 0; t < c.msd_db.size(); ++t)
    out += std::to_string(t) + "," + fmt("%.6f", c.msd_db[t]) + "\n";
  return out;
}

std::string comparison_csv(const Comparison& c) {
  std::string out = "n,msd_db,algorithm\n";
  for (std::size_t a = 0; a < c.curves.size(); ++a) {
    const std::string name = to_string(c.algorithms[a]);
    for (std::size_t t = 0; t < c.curves[a].msd_db.size(); ++t)
      out += std::to_string(t) + "," + fmt("%.6f", c.curves[a].msd_db[t]) + "," + name + "\n";
  }
  return out;
}

std::string sweep_csv(const std::vector<SweepRow>& rows) {
  std::string out = "mu,n_d,sim_db,theory_db,diverged\n";
  for (const auto& r : rows)
    out += fmt("%.6g", r.mu) + "," + std::to_string(r.n_d) + "," + fmt("%.6f", r.sim_db) + "," +
           (std::isnan(r.theory_db) ? std::string("nan") : fmt("%.6f", r.theory_db)) + "," +
           (r.diverged ? "1" : "0") + "\n";
  return out;
}

std::string theory_csv(const std::vector<double>& lin, double mu, int n_d) {
  std::string out = "n,msd_db,mu,n_d\n";
  const std::string tail = "," + fmt("%.6g", mu) + "," + std::to_string(n_d) + "\n";
  for (std::size_t t = 0; t < lin.size(); ++t)
    out += std::to_string(t) + "," + fmt("%.6f", to_db(lin[t])) + tail;
  return out;
}

std::string complexity_csv(const std::vector<ComplexityCounts>& rows) {
  std::string out = "algorithm,multiplications,additions,dmi\n";
  for (const auto& r : rows)
    out += to_string(r.algorithm) + "," + std::to_string(r.multiplications) + "," +
           std::to_string(r.additions) + "," + r.dmi + "\n";
  return out;
}

std::string signals_csv(const ExperimentConfig& cfg, long samples) {
  const Scenario sc = build_scenario(cfg);
  TrialSimulator sim(sc, cfg.seed, 0);
  std::string out = "n,node,u,v,d\n";
  for (long t = 0; t < samples; ++t) {
    sim.step();
    for (int k = 0; k < sc.nodes(); ++k)
      out += std::to_string(t) + "," + std::to_string(k) + "," + fmt("%.9g", sim.last_input(k)) + "," +
             fmt("%.9g", sim.last_noise(k)) + "," + fmt("%.9g", sim.last_reference(k)) + "\n";
  }
  return out;
}

void write_text(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) fail(ErrorKind::Io, "cannot write '" + path + "'");
  out << text;
  if (!out) fail(ErrorKind::Io, "write to '" + path + "' failed");
}

}  // namespace mdn
