#include "algorithms.hpp"

#include <cmath>

namespace mdn {

std::string to_string(Algorithm a) {
  switch (a) {
    case Algorithm::MdNmsaf: return "md-nmsaf";
    case Algorithm::MdLms: return "md-lms";
    case Algorithm::MdApa: return "md-apa";
    case Algorithm::MdApm: return "md-apm";
    case Algorithm::MdApmcc: return "md-apmcc";
  }
  return "md-nmsaf";
}

Algorithm parse_algorithm(const std::string& s) {
  if (s == "md-nmsaf") return Algorithm::MdNmsaf;
  if (s == "md-lms") return Algorithm::MdLms;
  if (s == "md-apa") return Algorithm::MdApa;
  if (s == "md-apm") return Algorithm::MdApm;
  if (s == "md-apmcc") return Algorithm::MdApmcc;
  fail(ErrorKind::Config, "unknown algorithm '" + s + "'");
}

bool is_subband(Algorithm a) { return a == Algorithm::MdNmsaf; }

bool uses_projection(Algorithm a) {
  return a == Algorithm::MdApa || a == Algorithm::MdApm || a == Algorithm::MdApmcc;
}

void StepConfig::validate(Algorithm a) const {
  require(mu >= 0.0, "step size must be nonnegative");
  require(eta >= 0.0, "regularization strength must be nonnegative");
  require(eps_reg > 0.0, "normalization regularizer must be positive");
  if (is_subband(a)) require(subbands >= 1, "subband count must be positive");
  if (uses_projection(a)) require(projection_order >= 1, "projection order must be positive");
  if (a == Algorithm::MdApmcc) require(sigma_mcc > 0.0, "kernel width must be positive");
}

void NodeFilterState::reset_gate_counts() {
  std::fill(gate_total.begin(), gate_total.end(), 0);
  std::fill(gate_pass.begin(), gate_pass.end(), 0);
}

NodeFilterState make_node_state(Algorithm a, int M, const StepConfig& cfg,
                                const ThresholdParams& tp) {
  NodeFilterState s;
  s.w = Vec::Zero(M);
  s.psi = Vec::Zero(M);
  int gates = 0;
  if (a == Algorithm::MdNmsaf) gates = cfg.subbands;
  if (a == Algorithm::MdApm) gates = 1;
  s.thresholds.assign(gates, init_threshold(tp));
  s.gate_total.assign(gates, 0);
  s.gate_pass.assign(gates, 0);
  return s;
}

Vec inter_cluster_term(const std::vector<Vec>& weights, int k, const Mat& gamma) {
  Vec acc = Vec::Zero(weights[k].size());
  for (Eigen::Index l = 0; l < gamma.cols(); ++l) {
    const double g = gamma(k, l);
    if (g != 0.0) acc += g * (weights[l] - weights[k]);
  }
  return acc;
}

Vec mdnmsaf_adapt(const std::vector<Vec>& weights, int k,
                  std::span<const SubbandSample> data, NodeFilterState& self,
                  const Mat& gamma, const StepConfig& cfg) {
  const Vec& w = weights[k];
  const auto M = w.size();
  Vec psi = w;
  for (std::size_t i = 0; i < data.size(); ++i) {
    const Eigen::Map<const Vec> u(data[i].regressor.data(), M);
    const double e = data[i].reference - u.dot(w);
    const double xi = self.thresholds[i].update(e);
    ++self.gate_total[i];
    const double score = phi_score(e, xi);
    if (score == 0.0) continue;
    ++self.gate_pass[i];
    psi.noalias() += (cfg.mu * score / (u.squaredNorm() + cfg.eps_reg)) * u;
  }
  if (cfg.eta != 0.0) psi += (cfg.mu * cfg.eta) * inter_cluster_term(weights, k, gamma);
  return psi;
}

Vec mdlms_adapt(const std::vector<Vec>& weights, int k, std::span<const double> regressor,
                double reference, const Mat& gamma, const StepConfig& cfg) {
  const Vec& w = weights[k];
  const Eigen::Map<const Vec> u(regressor.data(), w.size());
  const double e = reference - u.dot(w);
  Vec psi = w + (cfg.mu * e) * u;
  if (cfg.eta != 0.0) psi += (cfg.mu * cfg.eta) * inter_cluster_term(weights, k, gamma);
  return psi;
}

namespace {

// w + mu U (eps I + U^T U)^{-1} g, plus the inter-cluster pull.
Vec projection_step(const std::vector<Vec>& weights, int k, const Eigen::Ref<const Mat>& U,
                    const Vec& g, const Mat& gamma, const StepConfig& cfg) {
  Mat gram = U.transpose() * U;
  gram.diagonal().array() += cfg.eps_reg;
  const Vec coef = gram.llt().solve(g);
  Vec psi = weights[k] + cfg.mu * (U * coef);
  if (cfg.eta != 0.0) psi += (cfg.mu * cfg.eta) * inter_cluster_term(weights, k, gamma);
  return psi;
}

}  // namespace

Vec mdapa_adapt(const std::vector<Vec>& weights, int k, const Eigen::Ref<const Mat>& U,
                const Eigen::Ref<const Vec>& d, const Mat& gamma, const StepConfig& cfg) {
  const Vec e = d - U.transpose() * weights[k];
  return projection_step(weights, k, U, e, gamma, cfg);
}

Vec mdapm_adapt(const std::vector<Vec>& weights, int k, const Eigen::Ref<const Mat>& U,
                const Eigen::Ref<const Vec>& d, NodeFilterState& self, const Mat& gamma,
                const StepConfig& cfg) {
  Vec e = d - U.transpose() * weights[k];
  // The fullband threshold tracks the most recent a-priori error only.
  const double xi = self.thresholds[0].update(e[0]);
  ++self.gate_total[0];
  if (std::abs(e[0]) < xi) ++self.gate_pass[0];
  for (auto& x : e) x = phi_score(x, xi);
  return projection_step(weights, k, U, e, gamma, cfg);
}

Vec mdapmcc_adapt(const std::vector<Vec>& weights, int k, const Eigen::Ref<const Mat>& U,
                  const Eigen::Ref<const Vec>& d, const Mat& gamma, const StepConfig& cfg) {
  Vec e = d - U.transpose() * weights[k];
  const double two_s2 = 2.0 * cfg.sigma_mcc * cfg.sigma_mcc;
  for (auto& x : e) x *= std::exp(-x * x / two_s2);
  return projection_step(weights, k, U, e, gamma, cfg);
}

Vec combine(const std::vector<Vec>& psis, int k, const Mat& alpha) {
  Vec acc = Vec::Zero(psis[k].size());
  for (Eigen::Index m = 0; m < alpha.rows(); ++m) {
    const double a = alpha(m, k);
    if (a != 0.0) acc += a * psis[m];
  }
  return acc;
}

void run_iteration(Algorithm algo, const Mat& alpha, const Mat& gamma,
                   std::span<const NodeSample> data, const StepConfig& cfg,
                   std::vector<NodeFilterState>& states) {
  const int n = static_cast<int>(states.size());
  std::vector<Vec> weights(n);
  for (int k = 0; k < n; ++k) weights[k] = states[k].w;
  const auto M = weights.empty() ? 0 : weights[0].size();
  const int P = cfg.projection_order;

  std::vector<Vec> psis(n);
  for (int k = 0; k < n; ++k) {
    const NodeSample& s = data[k];
    switch (algo) {
      case Algorithm::MdNmsaf:
        psis[k] = mdnmsaf_adapt(weights, k, s.subbands, states[k], gamma, cfg);
        break;
      case Algorithm::MdLms:
        psis[k] = mdlms_adapt(weights, k, s.history, s.references[0], gamma, cfg);
        break;
      default: {
        // Column j of U starts j samples back in the newest-first history.
        const Eigen::Map<const Mat, 0, Eigen::OuterStride<>> U(
            s.history.data(), M, P, Eigen::OuterStride<>(1));
        const Eigen::Map<const Vec> d(s.references.data(), P);
        if (algo == Algorithm::MdApa)
          psis[k] = mdapa_adapt(weights, k, U, d, gamma, cfg);
        else if (algo == Algorithm::MdApm)
          psis[k] = mdapm_adapt(weights, k, U, d, states[k], gamma, cfg);
        else
          psis[k] = mdapmcc_adapt(weights, k, U, d, gamma, cfg);
      }
    }
  }
  for (int k = 0; k < n; ++k) {
    states[k].psi = psis[k];
    states[k].w = combine(psis, k, alpha);
  }
}

}  // namespace mdn
