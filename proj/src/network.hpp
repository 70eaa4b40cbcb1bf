#pragma once

#include "common.hpp"

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

namespace mdn {

// Input to build_topology: undirected edge list plus 1-based cluster labels.
struct TopologySpec {
  int nodes = 0;
  std::vector<std::pair<int, int>> edges;
  std::vector<int> clusters;
};

// Clustered multitask network. Neighbor sets include the node itself and are
// kept sorted; cluster labels are 0-based internally.
class Topology {
 public:
  int size() const { return static_cast<int>(neighbors_.size()); }
  int cluster_count() const { return cluster_count_; }
  int cluster(int k) const { return cluster_[k]; }
  const std::vector<int>& neighbors(int k) const { return neighbors_[k]; }

  // N_k intersected with C(k), self included.
  std::vector<int> intra_neighbors(int k) const;
  // N_k minus C(k).
  std::vector<int> inter_neighbors(int k) const;
  bool adjacent(int k, int l) const;

  friend Topology build_topology(const TopologySpec& spec);

 private:
  std::vector<std::vector<int>> neighbors_;
  std::vector<int> cluster_;
  int cluster_count_ = 0;
};

Topology build_topology(const TopologySpec& spec);

// [alpha]_{m,k}: column k holds node k's intra-cluster combination weights.
Mat uniform_combination_weights(const Topology& t);
// [gamma]_{k,l}: row k holds node k's inter-cluster weights (zero row if none).
Mat inter_cluster_weights(const Topology& t);

struct TargetSet {
  Vec base;
  std::vector<double> offsets;
  std::vector<Vec> w_star;  // one per node
};

TargetSet generate_targets(const Topology& t, int M,
                           const std::vector<double>& offsets,
                           std::uint64_t seed);

// A topology preset as stored on disk: network plus per-node signal profiles.
struct NetworkPreset {
  std::string name;
  TopologySpec spec;
  std::vector<double> offsets;
  std::vector<double> sigma_delta_sq;
  std::vector<double> sigma_g_sq;
};

NetworkPreset parse_network_preset(const std::string& json_text);
NetworkPreset load_network_preset(const std::string& path);
// Resolves a compiled-in preset name ("n7", "n15") or a file path.
NetworkPreset resolve_network_preset(const std::string& name_or_path);
std::vector<std::string> builtin_preset_names();

}  // namespace mdn
