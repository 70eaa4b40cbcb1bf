#pragma once

#include "theory.hpp"

#include <json.hpp>

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace mdn {

struct ExperimentConfig {
  std::string topology = "n7";
  std::string bank_file;  // optional analysis bank replacing the designed one
  InputKind input_kind = InputKind::White;
  std::vector<double> input_coefficients;  // AR lag coefficients, newest first
  double p_r = 0.001;
  double kappa = 1000.0;
  Algorithm algorithm = Algorithm::MdNmsaf;
  StepConfig step;
  int prototype_length = 0;  // 0 selects 8 N_D
  ThresholdParams robust;
  int M = 8;
  long iterations = 50000;
  int trials = 200;
  std::uint64_t seed = 1;
  long tracking_flip = -1;
  std::vector<double> sweep_mu;
  std::vector<int> sweep_nd;
  MomentOptions theory;
  long theory_cap = kDefaultTheoryCap;
  std::string moments_cache;  // directory; empty disables caching
  std::string compare_figure = "fig8";
  InputKind compare_input = InputKind::White;
  std::vector<Algorithm> compare_algorithms;  // empty selects all five
  int threads = 0;  // 0 selects the hardware concurrency
  std::string output;
};

nlohmann::json config_to_json(const ExperimentConfig& cfg);
// Strict: unknown keys and ill-typed values raise a Config error.
ExperimentConfig config_from_json(const nlohmann::json& doc);
// "a.b.c=value"; value is parsed as JSON when possible, else taken as a string.
void apply_override(nlohmann::json& doc, const std::string& assignment);
// Merges src into dst key by key (objects recursively).
void merge_json(nlohmann::json& dst, const nlohmann::json& src);
nlohmann::json read_json_file(const std::string& path);
void validate(const ExperimentConfig& cfg);
std::uint64_t config_hash(const ExperimentConfig& cfg);

Scenario build_scenario(const ExperimentConfig& cfg);

inline constexpr double kDbFloor = -300.0;
inline constexpr double kDivergenceDb = 50.0;

double to_db(double linear);
// (1/N) sum_k ||w*_k - w_k||^2
double empirical_msd(const std::vector<NodeFilterState>& states, const std::vector<Vec>& targets);

struct MsdCurve {
  std::vector<double> msd_lin;  // ensemble mean per input sample
  std::vector<double> msd_db;
  std::vector<double> std_error;  // standard error of the ensemble mean, linear
  int trials = 0;
  std::uint64_t config_hash = 0;
  bool diverged = false;
  double steady_state_db = 0.0;  // mean of the final 100 points
};

// Trials run in fixed chunks reduced in order, so the result does not depend
// on the thread count.
MsdCurve run_monte_carlo(const Scenario& sc, long iterations, int trials, std::uint64_t seed,
                         int threads = 0);
MsdCurve run_monte_carlo(const ExperimentConfig& cfg);
MsdCurve tracking_experiment(const ExperimentConfig& cfg);

struct TheoryReport {
  MomentSet moments;
  double mean_bound = 0.0;
  std::optional<MsBound> ms_bound;
  std::vector<double> transient_lin;  // per decimated update, n = 0..T
  std::optional<double> steady_state_lin;
  std::string note;  // reason a quantity is missing
};

// Moments (cached when configured) for the MD-NMSAF scenario of cfg.
MomentSet theory_moments(const ExperimentConfig& cfg, const Scenario& sc);
TheoryReport theory_experiment(const ExperimentConfig& cfg, bool with_bound = true);
// Theory value on the full-rate sample axis: update count ceil(t / N_D).
std::vector<double> theory_on_sample_axis(const std::vector<double>& transient, long iterations,
                                          int stride);

struct SweepRow {
  double mu = 0.0;
  int n_d = 1;
  double sim_db = 0.0;
  double theory_db = 0.0;  // NaN when unavailable
  bool diverged = false;
  MsdCurve curve;
  std::optional<MomentSet> moments;
};

std::vector<SweepRow> sweep_steady_state(const ExperimentConfig& cfg, bool with_theory = true);

struct ComplexityCounts {
  Algorithm algorithm;
  long long multiplications = 0;
  long long additions = 0;
  std::string dmi;
};

ComplexityCounts complexity_report(Algorithm a, const Topology& t, int M, int n_d, int P);
std::vector<ComplexityCounts> complexity_table(const ExperimentConfig& cfg);

// Per-algorithm settings of the comparison study for one input kind.
ExperimentConfig comparison_settings(const ExperimentConfig& base, Algorithm a, InputKind input);

struct Comparison {
  std::vector<Algorithm> algorithms;
  std::vector<MsdCurve> curves;
};

Comparison comparison_experiment(const ExperimentConfig& base);

// Iterations until the curve first reaches level_db; -1 if never.
long first_crossing(const MsdCurve& c, double level_db);

std::string curve_csv(const MsdCurve& c);
std::string comparison_csv(const Comparison& c);
std::string sweep_csv(const std::vector<SweepRow>& rows);
std::string theory_csv(const std::vector<double>& lin, double mu, int n_d);
std::string complexity_csv(const std::vector<ComplexityCounts>& rows);
// Raw per-node u, v, d of trial 0 for the configured scenario.
std::string signals_csv(const ExperimentConfig& cfg, long samples);
void write_text(const std::string& path, const std::string& text);

}  // namespace mdn
