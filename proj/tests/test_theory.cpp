#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "harness.hpp"
#include "theory.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <random>

using namespace mdn;

namespace {

Mat kron(const Mat& A, const Mat& B) {
  Mat out(A.rows() * B.rows(), A.cols() * B.cols());
  for (Eigen::Index i = 0; i < A.rows(); ++i)
    for (Eigen::Index j = 0; j < A.cols(); ++j)
      out.block(i * B.rows(), j * B.cols(), B.rows(), B.cols()) = A(i, j) * B;
  return out;
}

Vec vec(const Mat& W) { return Eigen::Map<const Vec>(W.data(), W.size()); }

// Three nodes, M = 2: nodes 0 and 1 form one cluster, node 2 another,
// with an inter-cluster link between 1 and 2.
struct Toy {
  MomentSet m;
  NetworkMatrices net;
  std::vector<std::vector<Mat>> draws;  // per node, sampled B matrices
};

Toy make_toy(double eta, int S = 40, double scale = 0.3) {
  const int N = 3, M = 2;
  std::mt19937_64 rng(99);
  std::normal_distribution<double> nd;
  Toy t;
  t.draws.resize(N);
  t.m.N = N;
  t.m.M = M;
  t.m.eta = eta;
  Mat gamma = Mat::Zero(N, N);
  gamma(1, 2) = 1.0;
  gamma(2, 1) = 1.0;
  t.m.Q = Mat::Identity(N * M, N * M) - kron(gamma, Mat::Identity(M, M));
  for (int k = 0; k < N; ++k) {
    Mat EB = Mat::Zero(M, M), EBB = Mat::Zero(M * M, M * M);
    for (int s = 0; s < S; ++s) {
      Vec u(M);
      for (auto& x : u) x = nd(rng);
      const Mat B = scale * (u * u.transpose()) / u.squaredNorm() + 0.2 * scale * Mat::Identity(M, M);
      t.draws[k].push_back(B);
      EB += B / S;
      EBB += kron(B, B) / S;
    }
    t.m.EB_blocks.push_back(EB);
    t.m.EBB_blocks.push_back(EBB);
    t.m.ETT_blocks.push_back(0.01 * (k + 1) * Mat::Identity(M, M));
  }
  t.net.N = N;
  t.net.M = M;
  t.net.C = Mat::Zero(N, N);
  t.net.C(0, 0) = t.net.C(1, 0) = t.net.C(0, 1) = t.net.C(1, 1) = 0.5;
  t.net.C(2, 2) = 1.0;
  t.net.Gamma = gamma;
  t.net.G = kron(t.net.C.transpose(), Mat::Identity(M, M));
  t.net.Q = t.m.Q;
  t.net.w_star.resize(N * M);
  t.net.w_star << 0.4, -0.2, 0.4, -0.2, 0.5, 0.1;
  return t;
}

// E{Z W Z^T} by brute force over every combination of per-node draws.
Mat brute_zz(const Toy& t, const Mat& W) {
  const int M = t.m.M, D = t.m.dim();
  const int S = static_cast<int>(t.draws[0].size());
  Mat acc = Mat::Zero(D, D);
  long count = 0;
  for (int a = 0; a < S; ++a)
    for (int b = 0; b < S; ++b)
      for (int c = 0; c < S; ++c) {
        Mat Z = t.m.eta * t.m.Q;
        Z.block(0, 0, M, M) += t.draws[0][a];
        Z.block(M, M, M, M) += t.draws[1][b];
        Z.block(2 * M, 2 * M, M, M) += t.draws[2][c];
        acc += Z * W * Z.transpose();
        ++count;
      }
  return acc / count;
}

Mat random_sym(int D, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> nd;
  Mat R(D, D);
  for (Eigen::Index i = 0; i < R.size(); ++i) R.data()[i] = nd(rng);
  return R + R.transpose();
}

ExperimentConfig small_config() {
  ExperimentConfig cfg;
  cfg.M = 4;
  cfg.step.subbands = 4;
  cfg.theory.samples = 20000;
  cfg.theory.p_mode = UpdateProbabilityMode::Analytic;
  return cfg;
}

}  // namespace

TEST_CASE("structured E{Z W Z^T} matches a brute-force expectation") {
  for (double eta : {0.0, 0.3}) {
    const Toy t = make_toy(eta, 12);
    const Mat W = random_sym(t.m.dim(), 5);
    const Mat ref = brute_zz(t, W);
    CHECK((t.m.apply_zz(W) - ref).norm() < 1e-10 * (1 + ref.norm()));
    CHECK((t.m.dense_zz() * vec(W) - vec(ref)).norm() < 1e-10 * (1 + ref.norm()));
  }
}

TEST_CASE("dense and structured mean-square operators agree") {
  const Toy t = make_toy(0.1);
  const double mu = 0.7;
  const Mat F = dense_msd_operator(t.m, t.net, mu);
  for (std::uint64_t s = 0; s < 3; ++s) {
    const Mat W = random_sym(t.m.dim(), 10 + s);
    const Mat Y = apply_msd_operator(t.m, t.net, mu, W);
    CHECK((F * vec(W) - vec(Y)).norm() < 1e-12 * (1 + Y.norm()));
    // explicit formula
    const Mat EZ = t.m.EZ();
    const Vec zz = t.m.dense_zz() * vec(W);
    const Mat inner = W - mu * (EZ * W + W * EZ.transpose()) +
                      mu * mu * Eigen::Map<const Mat>(zz.data(), t.m.dim(), t.m.dim());
    CHECK((t.net.G * inner * t.net.G.transpose() - Y).norm() < 1e-12 * (1 + Y.norm()));
  }
}

TEST_CASE("EZ equals EB without the inter-cluster term") {
  const Toy t = make_toy(0.0);
  CHECK((t.m.EZ() - t.m.EB()).norm() == 0.0);
  const Toy u = make_toy(0.2);
  CHECK((u.m.EZ() - u.m.EB() - 0.2 * u.m.Q).norm() < 1e-15);
}

TEST_CASE("companion bound: scalar case is 2/z") {
  for (double z : {0.1, 0.5, 2.0}) {
    Mat EZ(1, 1);
    EZ(0, 0) = z;
    CHECK(companion_bound_kron(EZ) == doctest::Approx(2.0 / z));
    Mat A(1, 1), F(1, 1);
    A(0, 0) = 2 * z;
    F(0, 0) = z * z;
    CHECK(companion_bound_dense(A, F) == doctest::Approx(2.0 / z));
  }
}

TEST_CASE("companion bound: Kronecker shortcut matches the dense evaluation") {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> ud(-0.05, 0.05);
  for (int trial = 0; trial < 5; ++trial) {
    const int D = 4;
    Mat EZ = 0.1 * random_sym(D, 100 + trial);
    EZ = EZ * EZ.transpose() + 0.05 * Mat::Identity(D, D);
    for (Eigen::Index i = 0; i < EZ.size(); ++i) EZ.data()[i] += ud(rng);
    const Mat I = Mat::Identity(D, D);
    const Mat A = kron(EZ.transpose(), I) + kron(I, EZ.transpose());
    const Mat F = kron(EZ.transpose(), EZ.transpose());
    CHECK(companion_bound_kron(EZ) == doctest::Approx(companion_bound_dense(A, F)).epsilon(1e-8));
  }
}

TEST_CASE("spectral radius crosses one at the bisection bound") {
  const Toy t = make_toy(0.05, 40, 0.5);
  const MsBound b = ms_step_bound(t.m, t.net);
  CHECK(b.bisection > 0.0);
  CHECK(b.value <= b.bisection);
  CHECK(msd_spectral_radius(t.m, t.net, 0.98 * b.bisection) < 1.0);
  CHECK(msd_spectral_radius(t.m, t.net, 1.02 * b.bisection) > 1.0);
  // eigenvalues of the dense operator agree with the power iteration
  const double mu = 0.5 * b.bisection;
  Eigen::EigenSolver<Mat> es(dense_msd_operator(t.m, t.net, mu), false);
  CHECK(msd_spectral_radius(t.m, t.net, mu, 4000) ==
        doctest::Approx(es.eigenvalues().cwiseAbs().maxCoeff()).epsilon(1e-3));
}

TEST_CASE("transient MSD converges to the closed-form steady state") {
  const Toy t = make_toy(0.05);
  const double mu = 0.5;
  const auto curve = transient_msd(t.m, t.net, mu, 3000);
  const double ss = steady_state_msd(t.m, t.net, mu);
  CHECK(std::abs(10 * std::log10(curve.back() / ss)) < 0.1);
  CHECK(curve.front() == doctest::Approx(t.net.w_star.squaredNorm() / 3));
}

TEST_CASE("mean weight error reaches its fixed point") {
  const Toy t = make_toy(0.2);
  const double mu = 0.5;
  const auto traj = mean_weight_error(t.m, t.net, mu, 3000);
  const Vec fp = mean_weight_error_fixed_point(t.m, t.net, mu);
  CHECK((traj.back() - fp).norm() < 1e-10);
  // nonzero bias because of the inter-cluster pull between different targets
  CHECK(fp.norm() > 0.0);
}

TEST_CASE("zero step size keeps the MSD at its initial value") {
  const Toy t = make_toy(0.2);
  const auto curve = transient_msd(t.m, t.net, 0.0, 50);
  for (double v : curve) CHECK(v == doctest::Approx(curve.front()).epsilon(1e-12));
}

TEST_CASE("steady state refuses an unstable step size") {
  const Toy t = make_toy(0.05, 40, 0.5);
  const MsBound b = ms_step_bound(t.m, t.net);
  try {
    steady_state_msd(t.m, t.net, 1.5 * b.bisection);
    FAIL("expected an unstable error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::Unstable);
  }
}

TEST_CASE("analytic update probability") {
  CHECK(analytic_update_probability(2.576, 0.0) == doctest::Approx(0.99).epsilon(1e-4));
  CHECK(analytic_update_probability(2.576, 0.01) == doctest::Approx(0.99 * 0.99).epsilon(1e-4));
}

TEST_CASE("moments of a white-input network") {
  const ExperimentConfig cfg = small_config();
  const Scenario sc = build_scenario(cfg);
  const MomentSet m = estimate_moments(sc, cfg.theory);
  REQUIRE(m.N == 7);
  REQUIRE(m.subbands == 4);
  for (int k = 0; k < m.N; ++k)
    for (int i = 0; i < 4; ++i) {
      const Mat& A = m.EA[k][i];
      CHECK(A.trace() == doctest::Approx(1.0).epsilon(1e-5));
      // white input: roughly I / M, with the subband filters adding some
      // off-diagonal structure
      CHECK(A.diagonal().minCoeff() > 0.15);
      CHECK(A.diagonal().maxCoeff() < 0.35);
    }
  const double p = analytic_update_probability(2.576, 0.001);
  CHECK(m.p_upd[0][0] == doctest::Approx(p));
  CHECK(m.EB_blocks[0].trace() == doctest::Approx(4 * p).epsilon(1e-4));
  // E{B (x) B} is a second moment: its trace is E{||B||_F^2} >= ||E B||_F^2
  CHECK(m.EBB_blocks[0].trace() >= m.EB_blocks[0].squaredNorm());
  CHECK_FALSE(m.undersampled);
  // mean bound: 2 / (lambda_max(E B) + 2 eta), E B close to N_D P / M
  const double bound = mean_step_bound(m, cfg.step.eta);
  CHECK(bound == doctest::Approx(2.0 / (4 * p / 4.0 + 0.02)).epsilon(0.25));
}

TEST_CASE("moment sets survive a save/load round trip") {
  const ExperimentConfig cfg = small_config();
  const Scenario sc = build_scenario(cfg);
  MomentOptions opt = cfg.theory;
  opt.samples = 500;
  const MomentSet m = estimate_moments(sc, opt);
  const auto path = (std::filesystem::temp_directory_path() / "mdn_moments_test.csv").string();
  save_moments(m, path);
  const MomentSet r = load_moments(path);
  std::filesystem::remove(path);
  CHECK(r.N == m.N);
  CHECK(r.M == m.M);
  CHECK(r.subbands == m.subbands);
  CHECK(r.eta == m.eta);
  CHECK(r.undersampled == m.undersampled);
  for (int k = 0; k < m.N; ++k) {
    CHECK((r.EB_blocks[k] - m.EB_blocks[k]).norm() == 0.0);
    CHECK((r.EBB_blocks[k] - m.EBB_blocks[k]).norm() == 0.0);
    CHECK((r.ETT_blocks[k] - m.ETT_blocks[k]).norm() == 0.0);
    CHECK(r.p_upd[k] == m.p_upd[k]);
  }
  CHECK((r.Q - m.Q).norm() == 0.0);
  CHECK_THROWS_AS(load_moments("/nonexistent/moments.csv"), Error);
}

TEST_CASE("theory beyond the capacity cap is refused") {
  ExperimentConfig cfg = small_config();
  cfg.topology = "n15";
  cfg.M = 16;
  const Scenario sc = build_scenario(cfg);
  MomentOptions opt = cfg.theory;
  opt.samples = 200;
  opt.fourth_order = false;
  const MomentSet m = estimate_moments(sc, opt);
  const NetworkMatrices net = network_matrices(sc);
  try {
    transient_msd(m, net, 0.01, 10);
    FAIL("expected a capacity error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::Capacity);
  }
}

TEST_CASE("pilot update probabilities are close to the analytic value") {
  ExperimentConfig cfg = small_config();
  cfg.theory.p_mode = UpdateProbabilityMode::Pilot;
  cfg.theory.pilot_trials = 4;
  const Scenario sc = build_scenario(cfg);
  const auto p = calibrate_update_probability(sc, cfg.theory);
  const double a = analytic_update_probability(2.576, 0.001);
  for (const auto& row : p)
    for (double v : row) CHECK(std::abs(v - a) < 0.05);
}
