#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "harness.hpp"

#include <cmath>
#include <numeric>

using namespace mdn;
using nlohmann::json;

namespace {

ExperimentConfig quick(long iterations = 400, int trials = 4) {
  ExperimentConfig c;
  c.iterations = iterations;
  c.trials = trials;
  c.threads = 1;
  return c;
}

double tail_mean(const std::vector<double>& x, std::size_t from) {
  return std::accumulate(x.begin() + from, x.end(), 0.0) / (x.size() - from);
}

}  // namespace

TEST_CASE("default config survives a JSON round trip") {
  const ExperimentConfig c;
  const ExperimentConfig r = config_from_json(config_to_json(c));
  CHECK(config_hash(r) == config_hash(c));
  CHECK(r.step.mu == 0.005);
  CHECK(r.step.eta == 0.01);
  CHECK(r.robust.k_xi == 2.576);
}

TEST_CASE("overrides reach nested keys") {
  json doc = config_to_json(ExperimentConfig{});
  apply_override(doc, "step.mu=0.02");
  apply_override(doc, "topology=n15");
  apply_override(doc, "robust.k_xi=inf");
  apply_override(doc, "sweep.n_d=[2,4]");
  const ExperimentConfig c = config_from_json(doc);
  CHECK(c.step.mu == 0.02);
  CHECK(c.topology == "n15");
  CHECK(std::isinf(c.robust.k_xi));
  CHECK(c.sweep_nd == std::vector<int>{2, 4});
  CHECK_THROWS_AS(apply_override(doc, "no-equals"), Error);
  CHECK_THROWS_AS(apply_override(doc, "a..b=1"), Error);
}

TEST_CASE("config errors") {
  auto kind_of = [](const json& doc) {
    try {
      validate(config_from_json(doc));
    } catch (const Error& e) {
      return e.kind();
    }
    return ErrorKind::Io;  // sentinel: no error raised
  };
  CHECK(kind_of(json{{"bogus", 1}}) == ErrorKind::Config);
  CHECK(kind_of(json{{"step", {{"mux", 1}}}}) == ErrorKind::Config);
  CHECK(kind_of(json{{"step", {{"mu", "fast"}}}}) == ErrorKind::Config);
  CHECK(kind_of(json{{"trials", 0}}) == ErrorKind::Config);
  CHECK(kind_of(json{{"algorithm", "nlms"}}) == ErrorKind::Config);
  CHECK(kind_of(json{{"robust", {{"gamma", 1.0}}}}) == ErrorKind::Config);
  CHECK(kind_of(json{{"seed", -3}}) == ErrorKind::Config);
  CHECK(kind_of(json{{"M", 2.5}}) == ErrorKind::Config);
  ExperimentConfig c;
  c.topology = "nowhere";
  CHECK_THROWS_AS(build_scenario(c), Error);
  c = ExperimentConfig{};
  c.input_kind = InputKind::Ar1;
  c.input_coefficients = {0.1, 0.2};
  CHECK_THROWS_AS(build_scenario(c), Error);
}

TEST_CASE("merge keeps untouched keys") {
  json a = {{"step", {{"mu", 0.1}, {"eta", 0.2}}}, {"M", 8}};
  merge_json(a, json{{"step", {{"mu", 0.3}}}});
  CHECK(a["step"]["mu"] == 0.3);
  CHECK(a["step"]["eta"] == 0.2);
  CHECK(a["M"] == 8);
}

TEST_CASE("config hash ignores threads and output only") {
  ExperimentConfig a, b;
  b.threads = 3;
  b.output = "x.csv";
  CHECK(config_hash(a) == config_hash(b));
  b.seed = 2;
  CHECK(config_hash(a) != config_hash(b));
}

TEST_CASE("empirical MSD on toy states") {
  std::vector<NodeFilterState> s(2);
  s[0].w = (Vec(2) << 1.0, 0.0).finished();
  s[1].w = (Vec(2) << 0.0, 0.0).finished();
  const std::vector<Vec> t = {(Vec(2) << 1.0, 0.0).finished(), (Vec(2) << 3.0, 4.0).finished()};
  CHECK(empirical_msd(s, t) == doctest::Approx(12.5));
  s[1].w = t[1];
  CHECK(empirical_msd(s, t) == 0.0);
  CHECK(to_db(0.0) == kDbFloor);
  CHECK(to_db(100.0) == doctest::Approx(20.0));
}

TEST_CASE("zero step size gives a flat curve at the initial MSD") {
  ExperimentConfig c = quick(200, 2);
  c.step.mu = 0.0;
  const Scenario sc = build_scenario(c);
  const MsdCurve r = run_monte_carlo(c);
  REQUIRE(r.msd_lin.size() == 200);
  for (double v : r.msd_lin) CHECK(v == doctest::Approx(sc.initial_msd()).epsilon(1e-12));
  CHECK_FALSE(r.diverged);
}

TEST_CASE("curve starts at the initial MSD and decreases") {
  const ExperimentConfig c = quick(4000, 4);
  const Scenario sc = build_scenario(c);
  const MsdCurve r = run_monte_carlo(c);
  CHECK(r.msd_lin[0] == doctest::Approx(sc.initial_msd()));
  CHECK(r.msd_db.back() < r.msd_db.front() - 3.0);
  CHECK(r.steady_state_db == doctest::Approx(to_db(tail_mean(r.msd_lin, r.msd_lin.size() - 100))));
}

TEST_CASE("reruns are identical regardless of the thread count") {
  ExperimentConfig c = quick(300, 12);
  const std::string a = curve_csv(run_monte_carlo(c));
  c.threads = 3;
  const std::string b = curve_csv(run_monte_carlo(c));
  CHECK(a == b);
  c.seed = 5;
  CHECK(curve_csv(run_monte_carlo(c)) != a);
  CHECK(a.rfind("n,msd_db\n0,", 0) == 0);
}

TEST_CASE("ensemble standard error shrinks as one over root trials") {
  ExperimentConfig c = quick(1500, 50);
  const MsdCurve a = run_monte_carlo(c);
  c.trials = 200;
  const MsdCurve b = run_monte_carlo(c);
  const double ratio = tail_mean(a.std_error, 500) / tail_mean(b.std_error, 500);
  CHECK(ratio == doctest::Approx(2.0).epsilon(0.25));
}

TEST_CASE("fullband algorithms run and converge") {
  for (auto algo : {Algorithm::MdLms, Algorithm::MdApa, Algorithm::MdApm, Algorithm::MdApmcc}) {
    ExperimentConfig c = quick(3000, 2);
    c.algorithm = algo;
    c.step.mu = algo == Algorithm::MdLms ? 0.01 : 0.05;
    const MsdCurve r = run_monte_carlo(c);
    CHECK_FALSE(r.diverged);
    CHECK(r.msd_db.back() < r.msd_db.front() - 3.0);
  }
}

TEST_CASE("huge step size is flagged as divergent") {
  ExperimentConfig c = quick(2000, 2);
  c.algorithm = Algorithm::MdLms;
  c.step.mu = 5.0;
  const MsdCurve r = run_monte_carlo(c);
  CHECK(r.diverged);
  for (double v : r.msd_lin) CHECK(std::isfinite(v));
}

TEST_CASE("target sign flip doubles the error vector") {
  ExperimentConfig c = quick(6000, 4);
  c.step.mu = 0.05;
  c.tracking_flip = 4000;
  const MsdCurve r = tracking_experiment(c);
  const Scenario sc = build_scenario(c);
  double w2 = 0.0;
  for (const auto& w : sc.targets.w_star) w2 += w.squaredNorm();
  w2 /= sc.nodes();
  const double before = tail_mean(std::vector<double>(r.msd_lin.begin() + 3500, r.msd_lin.begin() + 4000), 0);
  CHECK(before < 0.01 * w2);
  CHECK(to_db(r.msd_lin[4001]) == doctest::Approx(to_db(4.0 * w2)).epsilon(0.02));
  ExperimentConfig bad = quick();
  CHECK_THROWS_AS(tracking_experiment(bad), Error);
}

TEST_CASE("complexity counts follow the per-node formulas") {
  const Topology t = build_topology(resolve_network_preset("n15").spec);
  const long long M = 16, D = 4, P = 2;
  long long lms_m = 0, lms_a = 0, apa_m = 0, apa_a = 0, mcc_m = 0, saf_m = 0, saf_a = 0;
  for (int k = 0; k < t.size(); ++k) {
    const long long m = static_cast<long long>(t.inter_neighbors(k).size());
    const long long n = static_cast<long long>(t.intra_neighbors(k).size());
    lms_m += (m + n + 1) * M + 1;
    lms_a += (m + n) * M;
    apa_m += (P * P + 2 * P + m + n) * M + P * P * P + P * P;
    apa_a += (P * P + 2 * P + 2 * m + n - 1) * M + P * P * P;
    mcc_m += (P * P + 2 * P + m + n) * M + P * P * P + P * P + 6 * P;
    saf_m += (m + n + D + 2) * M + 2;
    saf_a += (m + n + 2 * D - 1) * M - D;
  }
  const auto lms = complexity_report(Algorithm::MdLms, t, 16, 4, 2);
  CHECK(lms.multiplications == lms_m);
  CHECK(lms.additions == lms_a);
  CHECK(lms.dmi == "0");
  const auto apm = complexity_report(Algorithm::MdApm, t, 16, 4, 2);
  CHECK(apm.multiplications == apa_m);
  CHECK(apm.additions == apa_a);
  CHECK(apm.dmi == "O(P^3)");
  CHECK(complexity_report(Algorithm::MdApa, t, 16, 4, 2).multiplications == apa_m);
  CHECK(complexity_report(Algorithm::MdApmcc, t, 16, 4, 2).multiplications == mcc_m);
  const auto saf = complexity_report(Algorithm::MdNmsaf, t, 16, 4, 2);
  CHECK(saf.multiplications == saf_m);
  CHECK(saf.additions == saf_a);
  // AP family grows with P^3
  CHECK(complexity_report(Algorithm::MdApm, t, 16, 4, 8).multiplications > 2 * apm.multiplications);
  CHECK(saf.multiplications < apm.multiplications);
}

TEST_CASE("comparison settings") {
  ExperimentConfig base;
  const auto c = comparison_settings(base, Algorithm::MdNmsaf, InputKind::White);
  CHECK(c.topology == "n15");
  CHECK(c.M == 16);
  CHECK(c.step.mu == 0.017);
  CHECK(c.step.eta == 0.01);
  CHECK(c.step.subbands == 4);
  CHECK(c.p_r == 0.01);
  CHECK(c.kappa == 1e4);
  CHECK(c.tracking_flip == -1);
  const auto a = comparison_settings(base, Algorithm::MdApm, InputKind::Ar2);
  CHECK(a.input_coefficients == std::vector<double>{0.1, 0.8});
  CHECK(a.step.projection_order == 2);
  base.compare_figure = "fig9";
  base.iterations = 1000;
  CHECK(comparison_settings(base, Algorithm::MdApa, InputKind::White).tracking_flip == 500);
}

TEST_CASE("theory values map onto the sample axis") {
  const std::vector<double> th = {10, 9, 8, 7};
  const auto s = theory_on_sample_axis(th, 10, 4);
  REQUIRE(s.size() == 10);
  // update count ceil(t / 4)
  const std::vector<double> expect = {10, 9, 9, 9, 9, 8, 8, 8, 8, 7};
  CHECK(s == expect);
}

TEST_CASE("first crossing") {
  MsdCurve c;
  c.msd_db = {0, -5, -10, -21, -19, -25};
  CHECK(first_crossing(c, -20) == 3);
  CHECK(first_crossing(c, -30) == -1);
}

TEST_CASE("csv writers") {
  CHECK(complexity_csv({}).rfind("algorithm,multiplications,additions,dmi", 0) == 0);
  CHECK(sweep_csv({}).rfind("mu,n_d,sim_db,theory_db,diverged", 0) == 0);
  CHECK(theory_csv({1.0, 0.1}, 0.01, 4) == "n,msd_db,mu,n_d\n0,0.000000,0.01,4\n1,-10.000000,0.01,4\n");
  const std::string sig = signals_csv(quick(), 3);
  CHECK(sig.rfind("n,node,u,v,d\n", 0) == 0);
  CHECK(std::count(sig.begin(), sig.end(), '\n') == 1 + 3 * 7);
}
