#pragma once

#include "common.hpp"
#include "network.hpp"
#include "robust.hpp"

#include <span>
#include <string>
#include <vector>

namespace mdn {

enum class Algorithm { MdNmsaf, MdLms, MdApa, MdApm, MdApmcc };

std::string to_string(Algorithm a);
Algorithm parse_algorithm(const std::string& s);
bool is_subband(Algorithm a);
bool uses_projection(Algorithm a);

struct StepConfig {
  double mu = 0.005;
  double eta = 0.01;
  double eps_reg = 1e-6;
  int subbands = 4;          // N_D, MD-NMSAF only
  int projection_order = 2;  // P, affine projection family
  double sigma_mcc = 4.0;    // correntropy kernel width, MD-APMCC only

  void validate(Algorithm a) const;
};

struct NodeFilterState {
  Vec w;
  Vec psi;
  std::vector<ThresholdState> thresholds;
  // Gate statistics per threshold: errors seen and errors that passed.
  std::vector<long> gate_total;
  std::vector<long> gate_pass;

  void reset_gate_counts();
};

// Zero-initialized state; one threshold per subband for MD-NMSAF, one
// fullband threshold for MD-APM, none otherwise.
NodeFilterState make_node_state(Algorithm a, int M, const StepConfig& cfg,
                                const ThresholdParams& tp);

// One subband's decimated data pair for a node.
struct SubbandSample {
  std::span<const double> regressor;  // u_{k,i}(n), newest first, length M
  double reference = 0.0;             // d_{k,iD}(n)
};

// Everything node k observes at one update instant.
struct NodeSample {
  std::vector<SubbandSample> subbands;  // MD-NMSAF
  std::span<const double> history;      // fullband inputs, newest first, >= M+P-1
  std::span<const double> references;   // fullband references, newest first, >= P
};

// sum_{l in N_k \ C(k)} gamma_{k,l} (w_l - w_k), unscaled.
Vec inter_cluster_term(const std::vector<Vec>& weights, int k, const Mat& gamma);

// psi_k for MD-NMSAF; mutates node k's thresholds and gate counters.
Vec mdnmsaf_adapt(const std::vector<Vec>& weights, int k,
                  std::span<const SubbandSample> data, NodeFilterState& self,
                  const Mat& gamma, const StepConfig& cfg);

Vec mdlms_adapt(const std::vector<Vec>& weights, int k, std::span<const double> regressor,
                double reference, const Mat& gamma, const StepConfig& cfg);

// U is M x P (column j = regressor j steps back), d holds the P references.
Vec mdapa_adapt(const std::vector<Vec>& weights, int k, const Eigen::Ref<const Mat>& U,
                const Eigen::Ref<const Vec>& d, const Mat& gamma, const StepConfig& cfg);
Vec mdapm_adapt(const std::vector<Vec>& weights, int k, const Eigen::Ref<const Mat>& U,
                const Eigen::Ref<const Vec>& d, NodeFilterState& self, const Mat& gamma,
                const StepConfig& cfg);
Vec mdapmcc_adapt(const std::vector<Vec>& weights, int k, const Eigen::Ref<const Mat>& U,
                  const Eigen::Ref<const Vec>& d, const Mat& gamma, const StepConfig& cfg);

// w_k(n+1) = sum_m alpha_{m,k} psi_m(n+1).
Vec combine(const std::vector<Vec>& psis, int k, const Mat& alpha);

// Synchronous adapt-then-combine over the whole network: every adapt step
// reads iteration-n weights, then every combine reads the new psi's.
void run_iteration(Algorithm algo, const Mat& alpha, const Mat& gamma,
                   std::span<const NodeSample> data, const StepConfig& cfg,
                   std::vector<NodeFilterState>& states);

}  // namespace mdn
