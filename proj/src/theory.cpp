#include "theory.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdio>
#include <fstream>
#include <map>
#include <numeric>
#include <random>
#include <sstream>
#include <tuple>

namespace mdn {

namespace {

Mat kron(const Mat& A, const Mat& B) {
  Mat out(A.rows() * B.rows(), A.cols() * B.cols());
  for (Eigen::Index i = 0; i < A.rows(); ++i)
    for (Eigen::Index j = 0; j < A.cols(); ++j)
      out.block(i * B.rows(), j * B.cols(), B.rows(), B.cols()) = A(i, j) * B;
  return out;
}

Vec vec(const Mat& W) { return Eigen::Map<const Vec>(W.data(), W.size()); }

Mat unvec(const Vec& v, Eigen::Index rows) {
  return Eigen::Map<const Mat>(v.data(), rows, v.size() / rows);
}

void check_cap(const MomentSet& m, long cap) {
  const long d = static_cast<long>(m.dim());
  if (d * d > cap)
    fail(ErrorKind::Capacity, "theory needs N^2 M^2 = " + std::to_string(d * d) +
                                  " which exceeds the cap of " + std::to_string(cap));
}

// Precomputed pieces of the mean-square operator at one step size.
struct MsdOperator {
  const MomentSet& m;
  const NetworkMatrices& net;
  double mu;
  Mat EB, EZ, Q;

  MsdOperator(const MomentSet& ms, const NetworkMatrices& nm, double step)
      : m(ms), net(nm), mu(step), EB(ms.EB()), EZ(ms.EB() + ms.eta * ms.Q), Q(ms.Q) {}

  Mat zz(const Mat& W) const {
    const int M = m.M;
    Mat R = EB * W * EB;
    for (int k = 0; k < m.N; ++k) {
      const Mat Wkk = W.block(k * M, k * M, M, M);
      const Vec r = m.EBB_blocks[k] * vec(Wkk);
      R.block(k * M, k * M, M, M) = unvec(r, M);
    }
    if (m.eta != 0.0) {
      R += m.eta * (EB * W * Q.transpose() + Q * W * EB);
      R += (m.eta * m.eta) * (Q * W * Q.transpose());
    }
    return R;
  }

  Mat apply(const Mat& W) const {
    Mat Y = W - mu * (EZ * W + W * EZ.transpose());
    if (mu != 0.0) Y += (mu * mu) * zz(W);
    return net.G * Y * net.G.transpose();
  }
};

double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); }

}  // namespace

NetworkMatrices network_matrices(const Scenario& sc) {
  NetworkMatrices net;
  net.N = sc.nodes();
  net.M = sc.M;
  net.C = sc.alpha;
  net.Gamma = sc.gamma;
  const Mat I_M = Mat::Identity(sc.M, sc.M);
  net.G = kron(sc.alpha.transpose(), I_M);
  net.Q = Mat::Identity(net.N * net.M, net.N * net.M) - kron(sc.gamma, I_M);
  net.w_star.resize(net.N * net.M);
  for (int k = 0; k < net.N; ++k) net.w_star.segment(k * net.M, net.M) = sc.targets.w_star[k];
  return net;
}

Mat MomentSet::EB() const {
  Mat out = Mat::Zero(dim(), dim());
  for (int k = 0; k < N; ++k) out.block(k * M, k * M, M, M) = EB_blocks[k];
  return out;
}

Mat MomentSet::ETT() const {
  Mat out = Mat::Zero(dim(), dim());
  for (int k = 0; k < N; ++k) out.block(k * M, k * M, M, M) = ETT_blocks[k];
  return out;
}

Mat MomentSet::apply_zz(const Mat& W) const {
  const NetworkMatrices dummy;
  return MsdOperator(*this, dummy, 0.0).zz(W);
}

Mat MomentSet::dense_zz() const {
  const int D = dim();
  const Mat EBm = EB();
  Mat out = Mat::Zero(D * D, D * D);
  // E{B (x) B}: blocks of distinct nodes factor by spatial independence.
  for (int a = 0; a < D; ++a)
    for (int c = 0; c < D; ++c) {
      if (a / M != c / M) continue;
      for (int b = 0; b < D; ++b)
        for (int d = 0; d < D; ++d) {
          if (b / M != d / M) continue;
          double v;
          if (a / M == b / M) {
            const int k = a / M;
            const int ia = a % M, ib = b % M, ic = c % M, id = d % M;
            v = EBB_blocks[k](ia * M + ib, ic * M + id);
          } else {
            v = EBm(a, c) * EBm(b, d);
          }
          out(a * D + b, c * D + d) = v;
        }
    }
  if (eta != 0.0) out += eta * (kron(EBm, Q) + kron(Q, EBm)) + eta * eta * kron(Q, Q);
  return out;
}

double analytic_update_probability(double k_xi, double p_r) {
  return (1.0 - p_r) * (2.0 * normal_cdf(k_xi) - 1.0);
}

std::vector<std::vector<double>> calibrate_update_probability(const Scenario& sc,
                                                              const MomentOptions& opt) {
  require(is_subband(sc.algorithm), "update probabilities are defined for MD-NMSAF");
  require(opt.pilot_updates > opt.pilot_window && opt.pilot_window > 0,
          "pilot window must be shorter than the pilot run");
  Scenario pilot = sc;
  pilot.flip_at = -1;
  const int n = pilot.nodes();
  const int nd = pilot.step.subbands;
  std::vector<std::vector<long>> pass(n, std::vector<long>(nd, 0));
  std::vector<std::vector<long>> total(n, std::vector<long>(nd, 0));
  const long stride = pilot.update_stride();
  const long samples = opt.pilot_updates * stride;
  const long count_from = (opt.pilot_updates - opt.pilot_window) * stride;

  for (int trial = 0; trial < opt.pilot_trials; ++trial) {
    TrialSimulator sim(pilot, derive_seed(opt.seed, 0, 0, StreamRole::Pilot), trial);
    for (long t = 0; t < samples; ++t) {
      if (t == count_from) sim.reset_gate_counts();
      sim.step();
    }
    for (int k = 0; k < n; ++k)
      for (int i = 0; i < nd; ++i) {
        pass[k][i] += sim.states()[k].gate_pass[i];
        total[k][i] += sim.states()[k].gate_total[i];
      }
  }
  std::vector<std::vector<double>> p(n, std::vector<double>(nd, 1.0));
  for (int k = 0; k < n; ++k)
    for (int i = 0; i < nd; ++i)
      if (total[k][i] > 0) p[k][i] = static_cast<double>(pass[k][i]) / total[k][i];
  return p;
}

MomentSet estimate_moments(const Scenario& sc, const MomentOptions& opt) {
  require(is_subband(sc.algorithm), "theory is defined for MD-NMSAF");
  require(opt.samples >= 100, "moment estimation needs at least 100 draws");
  const int N = sc.nodes();
  const int M = sc.M;
  const int nd = sc.bank.subbands;
  const int M2 = M * M;

  MomentSet ms;
  ms.N = N;
  ms.M = M;
  ms.subbands = nd;
  ms.eta = sc.step.eta;
  ms.Q = Mat::Identity(N * M, N * M) - kron(sc.gamma, Mat::Identity(M, M));

  if (opt.p_mode == UpdateProbabilityMode::Pilot) {
    ms.p_upd = calibrate_update_probability(sc, opt);
  } else {
    ms.p_upd.assign(N, std::vector<double>(nd, 0.0));
    for (int k = 0; k < N; ++k)
      std::fill(ms.p_upd[k].begin(), ms.p_upd[k].end(),
                analytic_update_probability(sc.threshold.k_xi, sc.noises[k].p_r));
  }

  // A = u u^T / ||u||^2 is scale invariant and u u^T / ||u||^4 scales with
  // 1/sigma_delta^2, so nodes sharing an AR shape share one set of draws.
  std::map<std::tuple<int, double, double>, std::vector<int>> groups;
  for (int k = 0; k < N; ++k) {
    const auto& in = sc.inputs[k];
    groups[{static_cast<int>(in.kind), in.beta1, in.beta2}].push_back(k);
  }

  ms.EA.assign(N, std::vector<Mat>(nd));
  ms.EB_blocks.assign(N, Mat::Zero(M, M));
  ms.ETT_blocks.assign(N, Mat::Zero(M, M));
  if (opt.fourth_order) ms.EBB_blocks.assign(N, Mat::Zero(M2, M2));

  std::vector<double> band_energy(nd);
  for (int i = 0; i < nd; ++i)
    for (double h : sc.bank.filters[i]) band_energy[i] += h * h;

  constexpr int kChunk = 2048;
  constexpr int kBatches = 20;
  int group_index = 0;
  for (const auto& [shape, members] : groups) {
    InputModel unit = sc.inputs[members[0]];
    unit.sigma_delta_sq = 1.0;
    InputSource src(unit, derive_seed(opt.seed, 0, group_index++, StreamRole::Moments),
                    default_burn_in(M));
    SubbandAnalyzer an(sc.bank, M);
    const long warm = sc.bank.length() + static_cast<long>(M) * nd;
    for (long t = 0; t < warm; ++t) an.push(src.next(), 0.0);

    std::vector<Mat> EA(nd, Mat::Zero(M, M)), E4(nd, Mat::Zero(M, M));
    std::vector<Mat> chunk;
    std::vector<Mat> Mvv;
    if (opt.fourth_order) {
      chunk.assign(members.size(), Mat::Zero(kChunk, M2));
      Mvv.assign(members.size(), Mat::Zero(M2, M2));
    }
    std::vector<double> batch_sum(kBatches, 0.0);
    std::vector<long> batch_n(kBatches, 0);
    Mat A(M, M);
    int filled = 0;

    auto flush = [&] {
      for (std::size_t g = 0; g < members.size(); ++g)
        Mvv[g].selfadjointView<Eigen::Lower>().rankUpdate(chunk[g].topRows(filled).transpose());
      filled = 0;
    };

    for (long s = 0; s < opt.samples; ++s) {
      for (int j = 0; j < nd; ++j) an.push(src.next(), 0.0);
      double e4_trace = 0.0;
      if (opt.fourth_order)
        for (auto& c : chunk) c.row(filled).setZero();
      for (int i = 0; i < nd; ++i) {
        const Eigen::Map<const Vec> u(an.regressor(i).data(), M);
        const double nrm = u.squaredNorm();
        if (nrm <= 0.0) continue;
        A.noalias() = (u * u.transpose()) / nrm;
        EA[i] += A;
        E4[i] += A / nrm;
        e4_trace += 1.0 / nrm;
        if (opt.fourth_order) {
          const Eigen::Map<const Eigen::RowVectorXd> a(A.data(), M2);
          for (std::size_t g = 0; g < members.size(); ++g)
            chunk[g].row(filled) += ms.p_upd[members[g]][i] * a;
        }
      }
      const int b = static_cast<int>(s * kBatches / opt.samples);
      batch_sum[b] += e4_trace;
      ++batch_n[b];
      if (opt.fourth_order && ++filled == kChunk) flush();
    }
    if (opt.fourth_order && filled > 0) flush();

    const double S = static_cast<double>(opt.samples);
    for (int i = 0; i < nd; ++i) {
      EA[i] /= S;
      E4[i] /= S;
    }
    // Batch means absorb the correlation between consecutive draws.
    std::vector<double> means(kBatches);
    for (int b = 0; b < kBatches; ++b) means[b] = batch_sum[b] / std::max<long>(1, batch_n[b]);
    const double grand = std::accumulate(means.begin(), means.end(), 0.0) / kBatches;
    double var = 0.0;
    for (double x : means) var += (x - grand) * (x - grand);
    var /= (kBatches - 1);
    const double rel_se = std::sqrt(var / kBatches) / grand;
    ms.max_relative_se = std::max(ms.max_relative_se, rel_se);

    for (std::size_t g = 0; g < members.size(); ++g) {
      const int k = members[g];
      const double sd2 = sc.inputs[k].sigma_delta_sq;
      const double sg2 = sc.noises[k].sigma_g_sq;
      for (int i = 0; i < nd; ++i) {
        const double p = ms.p_upd[k][i];
        ms.EA[k][i] = EA[i];
        ms.EB_blocks[k] += p * EA[i];
        ms.ETT_blocks[k] += (p * p * sg2 * band_energy[i] / sd2) * E4[i];
      }
      if (opt.fourth_order) {
        Mat V = Mvv[g].selfadjointView<Eigen::Lower>();
        V /= S;
        // E{B (x) B}[(j M + i), (q M + p)] = E{vec(B) vec(B)^T}[(j + M q), (i + M p)]
        Mat& K = ms.EBB_blocks[k];
        for (int j = 0; j < M; ++j)
          for (int i = 0; i < M; ++i)
            for (int q = 0; q < M; ++q)
              for (int p = 0; p < M; ++p) K(j * M + i, q * M + p) = V(j + M * q, i + M * p);
      }
    }
  }
  ms.undersampled = ms.max_relative_se > 0.05;
  return ms;
}

double mean_step_bound(const MomentSet& m, double eta) {
  double lmax = 0.0;
  for (const auto& B : m.EB_blocks) {
    Eigen::SelfAdjointEigenSolver<Mat> es(B, Eigen::EigenvaluesOnly);
    lmax = std::max(lmax, es.eigenvalues().maxCoeff());
  }
  return 2.0 / (lmax + 2.0 * eta);
}

namespace {

bool is_positive_real(std::complex<double> z) {
  return z.real() > 0.0 && std::abs(z.imag()) <= 1e-9 * std::abs(z);
}

double bound_from(double max_ratio, double max_companion) {
  double b = std::numeric_limits<double>::infinity();
  if (max_ratio > 0.0) b = std::min(b, 1.0 / max_ratio);
  if (max_companion > 0.0) b = std::min(b, 1.0 / max_companion);
  return b;
}

}  // namespace

double companion_bound_dense(const Mat& A, const Mat& F) {
  const auto n = A.rows();
  Eigen::FullPivLU<Mat> lu(A);
  if (!lu.isInvertible()) return 0.0;
  Eigen::EigenSolver<Mat> es_ratio(lu.solve(F), false);
  double max_ratio = 0.0;
  for (auto z : es_ratio.eigenvalues())
    if (is_positive_real(z)) max_ratio = std::max(max_ratio, z.real());

  Mat H = Mat::Zero(2 * n, 2 * n);
  H.topLeftCorner(n, n) = 0.5 * A;
  H.topRightCorner(n, n) = -0.5 * F;
  H.bottomLeftCorner(n, n).setIdentity();
  Eigen::EigenSolver<Mat> es_h(H, false);
  double max_comp = 0.0;
  for (auto z : es_h.eigenvalues())
    if (is_positive_real(z)) max_comp = std::max(max_comp, z.real());
  return bound_from(max_ratio, max_comp);
}

double companion_bound_kron(const Mat& EZ) {
  Eigen::EigenSolver<Mat> es(EZ, false);
  const auto lam = es.eigenvalues();
  const double scale = lam.cwiseAbs().maxCoeff();
  double max_ratio = 0.0, max_comp = 0.0;
  for (Eigen::Index i = 0; i < lam.size(); ++i)
    for (Eigen::Index j = 0; j < lam.size(); ++j) {
      const std::complex<double> s = lam[i] + lam[j];
      const std::complex<double> p = lam[i] * lam[j];
      if (std::abs(s) <= 1e-12 * scale) return 0.0;  // A singular
      const auto r = p / s;
      if (is_positive_real(r)) max_ratio = std::max(max_ratio, r.real());
      // eigenvalues of [[s/2, -p/2], [1, 0]]
      const std::complex<double> disc = std::sqrt(s * s / 4.0 - 2.0 * p);
      for (auto z : {(s / 2.0 + disc) / 2.0, (s / 2.0 - disc) / 2.0})
        if (is_positive_real(z)) max_comp = std::max(max_comp, z.real());
    }
  return bound_from(max_ratio, max_comp);
}

Mat apply_msd_operator(const MomentSet& m, const NetworkMatrices& net, double mu,
                       const Mat& W) {
  return MsdOperator(m, net, mu).apply(W);
}

Mat dense_msd_operator(const MomentSet& m, const NetworkMatrices& net, double mu) {
  const MsdOperator op(m, net, mu);
  const int D = m.dim();
  Mat F(D * D, D * D);
  Mat E = Mat::Zero(D, D);
  for (int c = 0; c < D; ++c)
    for (int r = 0; r < D; ++r) {
      E(r, c) = 1.0;
      const Mat Y = op.apply(E);
      F.col(static_cast<Eigen::Index>(c) * D + r) = vec(Y);
      E(r, c) = 0.0;
    }
  return F;
}

double msd_spectral_radius(const MomentSet& m, const NetworkMatrices& net, double mu,
                           int iterations) {
  const MsdOperator op(m, net, mu);
  const int D = m.dim();
  std::mt19937_64 rng(12345);
  std::normal_distribution<double> nd;
  Mat R(D, D);
  for (Eigen::Index i = 0; i < R.size(); ++i) R.data()[i] = nd(rng);
  Mat X = Mat::Identity(D, D) + 0.1 * (R + R.transpose());
  X /= X.norm();
  const int tail = std::max(1, iterations / 3);
  double log_sum = 0.0;
  for (int it = 0; it < iterations; ++it) {
    X = op.apply(X);
    const double nrm = X.norm();
    if (!(nrm > 0.0) || !std::isfinite(nrm)) return nrm > 0.0 ? INFINITY : 0.0;
    X /= nrm;
    if (it >= iterations - tail) log_sum += std::log(nrm);
  }
  return std::exp(log_sum / tail);
}

MsBound ms_step_bound(const MomentSet& m, const NetworkMatrices& net) {
  require(!m.EBB_blocks.empty(), "mean-square bound needs fourth-order moments");
  MsBound out;
  out.companion = companion_bound_kron(m.EZ());
  out.companion_available = out.companion > 0.0 && std::isfinite(out.companion);

  auto stable = [&](double mu) { return msd_spectral_radius(m, net, mu) < 1.0; };
  double lo = 0.0;
  double hi = mean_step_bound(m, m.eta);
  for (int grow = 0; grow < 10 && stable(hi); ++grow) {
    lo = hi;
    hi *= 1.5;
  }
  for (int it = 0; it < 20; ++it) {
    const double mid = 0.5 * (lo + hi);
    (stable(mid) ? lo : hi) = mid;
  }
  out.bisection = lo;
  out.value = out.companion_available ? std::min(out.companion, out.bisection) : out.bisection;
  return out;
}

std::vector<Vec> mean_weight_error(const MomentSet& m, const NetworkMatrices& net,
                                   double mu, long n) {
  const int D = m.dim();
  const Mat H = net.G * (Mat::Identity(D, D) - mu * m.EZ());
  const Vec zeta = net.zeta(mu, m.eta);
  std::vector<Vec> out;
  out.reserve(n + 1);
  Vec w = net.w_star;
  out.push_back(w);
  for (long i = 0; i < n; ++i) {
    w = H * w + zeta;
    out.push_back(w);
  }
  return out;
}

Vec mean_weight_error_fixed_point(const MomentSet& m, const NetworkMatrices& net, double mu) {
  const int D = m.dim();
  const Mat H = net.G * (Mat::Identity(D, D) - mu * m.EZ());
  return (Mat::Identity(D, D) - H).partialPivLu().solve(net.zeta(mu, m.eta));
}

std::vector<double> transient_msd(const MomentSet& m, const NetworkMatrices& net, double mu,
                                  long T, long cap) {
  check_cap(m, cap);
  require(!m.EBB_blocks.empty(), "transient MSD needs fourth-order moments");
  const MsdOperator op(m, net, mu);
  const int D = m.dim();
  const Mat H = net.G * (Mat::Identity(D, D) - mu * op.EZ);
  const Vec zeta = net.zeta(mu, m.eta);
  const Mat forcing = (mu * mu) * (net.G * m.ETT() * net.G.transpose()) + zeta * zeta.transpose();

  std::vector<double> out;
  out.reserve(T + 1);
  Vec mean = net.w_star;
  Mat W = net.w_star * net.w_star.transpose();
  for (long n = 0; n <= T; ++n) {
    out.push_back(W.trace() / m.N);
    if (n == T) break;
    const Vec hm = H * mean;
    Mat next = op.apply(W) + forcing;
    next.noalias() += hm * zeta.transpose();
    next.noalias() += zeta * hm.transpose();
    W = std::move(next);
    mean = hm + zeta;
  }
  return out;
}

double steady_state_msd(const MomentSet& m, const NetworkMatrices& net, double mu, long cap) {
  check_cap(m, cap);
  require(!m.EBB_blocks.empty(), "steady-state MSD needs fourth-order moments");
  const double rho = msd_spectral_radius(m, net, mu);
  if (!(rho < 1.0))
    fail(ErrorKind::Unstable, "not mean-square stable at mu = " + std::to_string(mu) +
                                  " (spectral radius " + std::to_string(rho) + ")");
  const int D = m.dim();
  const Mat H = net.G * (Mat::Identity(D, D) - mu * m.EZ());
  const Vec zeta = net.zeta(mu, m.eta);
  const Vec mean_inf = (Mat::Identity(D, D) - H).partialPivLu().solve(zeta);
  const Vec hm = H * mean_inf;
  const Mat rhs = hm * zeta.transpose() + zeta * hm.transpose() +
                  (mu * mu) * (net.G * m.ETT() * net.G.transpose()) + zeta * zeta.transpose();

  Mat K = dense_msd_operator(m, net, mu);
  K = Mat::Identity(K.rows(), K.cols()) - K;
  Eigen::PartialPivLU<Eigen::Ref<Mat>> lu(K);
  const Vec x = lu.solve(vec(rhs));
  if (!x.allFinite()) fail(ErrorKind::Unstable, "I - F is singular at mu = " + std::to_string(mu));
  return unvec(x, D).trace() / m.N;
}

namespace {

void write_matrix(std::ostream& out, const std::string& tag, const Mat& A) {
  out << "# " << tag << ' ' << A.rows() << ' ' << A.cols() << '\n';
  char buf[40];
  for (Eigen::Index i = 0; i < A.rows(); ++i) {
    for (Eigen::Index j = 0; j < A.cols(); ++j) {
      std::snprintf(buf, sizeof buf, "%.17g", A(i, j));
      out << (j ? "," : "") << buf;
    }
    out << '\n';
  }
}

}  // namespace

void save_moments(const MomentSet& m, const std::string& path) {
  std::ofstream out(path);
  if (!out) fail(ErrorKind::Io, "cannot write moments to '" + path + "'");
  Mat meta(1, 6);
  meta << m.N, m.M, m.subbands, m.eta, m.max_relative_se, m.undersampled ? 1.0 : 0.0;
  write_matrix(out, "meta", meta);
  Mat p(m.N, m.subbands);
  for (int k = 0; k < m.N; ++k)
    for (int i = 0; i < m.subbands; ++i) p(k, i) = m.p_upd[k][i];
  write_matrix(out, "p_upd", p);
  write_matrix(out, "Q", m.Q);
  for (int k = 0; k < m.N; ++k) {
    for (int i = 0; i < m.subbands; ++i)
      write_matrix(out, "EA " + std::to_string(k) + " " + std::to_string(i), m.EA[k][i]);
    write_matrix(out, "EB " + std::to_string(k), m.EB_blocks[k]);
    write_matrix(out, "ETT " + std::to_string(k), m.ETT_blocks[k]);
    if (!m.EBB_blocks.empty()) write_matrix(out, "EBB " + std::to_string(k), m.EBB_blocks[k]);
  }
}

MomentSet load_moments(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorKind::Io, "cannot read moments from '" + path + "'");
  std::map<std::string, Mat> sections;
  std::string line;
  while (std::getline(in, line)) {
    if (line.rfind("# ", 0) != 0) fail(ErrorKind::Config, "moments file: expected a section header");
    std::istringstream hdr(line.substr(2));
    std::vector<std::string> words;
    for (std::string w; hdr >> w;) words.push_back(w);
    require(words.size() >= 3, "moments file: malformed header", ErrorKind::Config);
    const long rows = std::stol(words[words.size() - 2]);
    const long cols = std::stol(words.back());
    std::string tag = words[0];
    for (std::size_t i = 1; i + 2 < words.size(); ++i) tag += " " + words[i];
    Mat A(rows, cols);
    for (long r = 0; r < rows; ++r) {
      if (!std::getline(in, line)) fail(ErrorKind::Config, "moments file: truncated section " + tag);
      std::istringstream row(line);
      std::string cell;
      for (long c = 0; c < cols; ++c) {
        if (!std::getline(row, cell, ','))
          fail(ErrorKind::Config, "moments file: short row in " + tag);
        A(r, c) = std::stod(cell);
      }
    }
    sections[tag] = std::move(A);
  }
  auto get = [&](const std::string& tag) -> const Mat& {
    auto it = sections.find(tag);
    if (it == sections.end()) fail(ErrorKind::Config, "moments file: missing section " + tag);
    return it->second;
  };
  MomentSet m;
  const Mat& meta = get("meta");
  m.N = static_cast<int>(meta(0, 0));
  m.M = static_cast<int>(meta(0, 1));
  m.subbands = static_cast<int>(meta(0, 2));
  m.eta = meta(0, 3);
  m.max_relative_se = meta(0, 4);
  m.undersampled = meta(0, 5) != 0.0;
  const Mat& p = get("p_upd");
  m.p_upd.assign(m.N, std::vector<double>(m.subbands));
  for (int k = 0; k < m.N; ++k)
    for (int i = 0; i < m.subbands; ++i) m.p_upd[k][i] = p(k, i);
  m.Q = get("Q");
  m.EA.assign(m.N, std::vector<Mat>(m.subbands));
  for (int k = 0; k < m.N; ++k) {
    for (int i = 0; i < m.subbands; ++i)
      m.EA[k][i] = get("EA " + std::to_string(k) + " " + std::to_string(i));
    m.EB_blocks.push_back(get("EB " + std::to_string(k)));
    m.ETT_blocks.push_back(get("ETT " + std::to_string(k)));
    if (sections.count("EBB " + std::to_string(k)))
      m.EBB_blocks.push_back(get("EBB " + std::to_string(k)));
  }
  return m;
}

}  // namespace mdn
