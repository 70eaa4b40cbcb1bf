#pragma once

#include "algorithms.hpp"
#include "filterbank.hpp"
#include "network.hpp"
#include "signals.hpp"

#include <cstdint>
#include <functional>
#include <memory>
#include <vector>

namespace mdn {

// Fully resolved description of one simulated network: everything a trial
// needs except its seed.
struct Scenario {
  Topology topology;
  Mat alpha;
  Mat gamma;
  TargetSet targets;
  std::vector<InputModel> inputs;  // per node
  std::vector<NoiseModel> noises;  // per node
  AnalysisBank bank;               // used by MD-NMSAF only
  int M = 8;
  Algorithm algorithm = Algorithm::MdNmsaf;
  StepConfig step;
  ThresholdParams threshold;
  long flip_at = -1;  // sample index where every target changes sign; < 0 disables

  int nodes() const { return topology.size(); }
  // Input samples consumed per weight update.
  int update_stride() const { return is_subband(algorithm) ? step.subbands : 1; }
  double initial_msd() const;
};

// One Monte-Carlo trial. Time advances one full-rate input sample per step();
// MD-NMSAF adapts every N_D samples, the fullband algorithms every sample.
class TrialSimulator {
 public:
  TrialSimulator(const Scenario& scenario, std::uint64_t master_seed, std::uint64_t trial);

  void step();
  long time() const { return t_; }
  // Network MSD (1/N) sum_k ||w*_k - w_k||^2 against the targets in force now.
  double msd() const;
  const std::vector<NodeFilterState>& states() const { return states_; }
  std::vector<NodeFilterState>& states() { return states_; }
  void reset_gate_counts();

  // Raw full-rate samples of the last step, per node (for signal dumps).
  double last_input(int k) const { return last_u_[k]; }
  double last_noise(int k) const { return last_v_[k]; }
  double last_reference(int k) const { return last_d_[k]; }

 private:
  bool flipped(long t) const { return sc_->flip_at >= 0 && t >= sc_->flip_at; }

  const Scenario* sc_;
  long t_ = 0;
  std::vector<InputSource> inputs_;
  std::vector<NoiseSource> noises_;
  std::vector<DelayLine> u_hist_;
  std::vector<DelayLine> d_hist_;
  std::vector<SubbandAnalyzer> analyzers_;
  std::vector<NodeFilterState> states_;
  std::vector<NodeSample> samples_;
  std::vector<double> last_u_, last_v_, last_d_;
};

}  // namespace mdn
