#include "simulator.hpp"

namespace mdn {

double Scenario::initial_msd() const {
  double acc = 0.0;
  for (const auto& w : targets.w_star) acc += w.squaredNorm();
  return acc / nodes();
}

TrialSimulator::TrialSimulator(const Scenario& scenario, std::uint64_t master_seed,
                               std::uint64_t trial)
    : sc_(&scenario) {
  const int n = scenario.nodes();
  const int M = scenario.M;
  const int P = uses_projection(scenario.algorithm) ? scenario.step.projection_order : 1;
  inputs_.reserve(n);
  noises_.reserve(n);
  for (int k = 0; k < n; ++k) {
    inputs_.emplace_back(scenario.inputs[k],
                         derive_seed(master_seed, trial, k, StreamRole::Input),
                         default_burn_in(M));
    noises_.emplace_back(scenario.noises[k],
                         derive_seed(master_seed, trial, k, StreamRole::Noise));
  }
  u_hist_.assign(n, DelayLine(M + P - 1));
  d_hist_.assign(n, DelayLine(P));
  if (is_subband(scenario.algorithm)) {
    analyzers_.reserve(n);
    for (int k = 0; k < n; ++k) analyzers_.emplace_back(scenario.bank, M);
  }
  states_.reserve(n);
  for (int k = 0; k < n; ++k)
    states_.push_back(make_node_state(scenario.algorithm, M, scenario.step, scenario.threshold));
  samples_.resize(n);
  for (auto& s : samples_) s.subbands.resize(is_subband(scenario.algorithm) ? scenario.bank.subbands : 0);
  last_u_.assign(n, 0.0);
  last_v_.assign(n, 0.0);
  last_d_.assign(n, 0.0);
}

void TrialSimulator::step() {
  const int n = sc_->nodes();
  const int M = sc_->M;
  const double sign = flipped(t_) ? -1.0 : 1.0;
  const bool subband = is_subband(sc_->algorithm);

  for (int k = 0; k < n; ++k) {
    const double u = inputs_[k].next();
    const double v = noises_[k].next();
    u_hist_[k].push(u);
    const Eigen::Map<const Vec> x(u_hist_[k].window().data(), M);
    const double d = sign * sc_->targets.w_star[k].dot(x) + v;
    d_hist_[k].push(d);
    if (subband) analyzers_[k].push(u, d);
    last_u_[k] = u;
    last_v_[k] = v;
    last_d_[k] = d;
  }

  const int stride = sc_->update_stride();
  if (t_ % stride == 0) {
    for (int k = 0; k < n; ++k) {
      NodeSample& s = samples_[k];
      if (subband) {
        for (int i = 0; i < analyzers_[k].subbands(); ++i)
          s.subbands[i] = {analyzers_[k].regressor(i), analyzers_[k].reference(i)};
      } else {
        s.history = u_hist_[k].window();
        s.references = d_hist_[k].window();
      }
    }
    run_iteration(sc_->algorithm, sc_->alpha, sc_->gamma, samples_, sc_->step, states_);
  }
  ++t_;
}

double TrialSimulator::msd() const {
  const double sign = flipped(t_) ? -1.0 : 1.0;
  double acc = 0.0;
  for (int k = 0; k < sc_->nodes(); ++k)
    acc += (sign * sc_->targets.w_star[k] - states_[k].w).squaredNorm();
  return acc / sc_->nodes();
}

void TrialSimulator::reset_gate_counts() {
  for (auto& s : states_) s.reset_gate_counts();
}

}  // namespace mdn
