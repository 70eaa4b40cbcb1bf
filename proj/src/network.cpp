#include "network.hpp"

#include "presets.hpp"

#include <json.hpp>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <queue>
#include <random>
#include <sstream>

namespace mdn {

std::vector<int> Topology::intra_neighbors(int k) const {
  std::vector<int> out;
  for (int l : neighbors_[k])
    if (cluster_[l] == cluster_[k]) out.push_back(l);
  return out;
}

std::vector<int> Topology::inter_neighbors(int k) const {
  std::vector<int> out;
  for (int l : neighbors_[k])
    if (cluster_[l] != cluster_[k]) out.push_back(l);
  return out;
}

bool Topology::adjacent(int k, int l) const {
  const auto& nk = neighbors_[k];
  return std::binary_search(nk.begin(), nk.end(), l);
}

Topology build_topology(const TopologySpec& spec) {
  const int n = spec.nodes;
  require(n >= 1, "topology needs at least one node");
  require(static_cast<int>(spec.clusters.size()) == n,
          "cluster label count does not match node count");

  Topology t;
  t.neighbors_.assign(n, {});
  for (int k = 0; k < n; ++k) t.neighbors_[k].push_back(k);

  for (auto [a, b] : spec.edges) {
    require(a >= 0 && a < n && b >= 0 && b < n,
            "edge (" + std::to_string(a) + "," + std::to_string(b) +
                ") references a missing node");
    if (a == b) continue;
    t.neighbors_[a].push_back(b);
    t.neighbors_[b].push_back(a);
  }
  for (auto& nk : t.neighbors_) {
    std::sort(nk.begin(), nk.end());
    nk.erase(std::unique(nk.begin(), nk.end()), nk.end());
  }

  const int labels = *std::max_element(spec.clusters.begin(), spec.clusters.end());
  require(*std::min_element(spec.clusters.begin(), spec.clusters.end()) >= 1,
          "cluster labels are 1-based");
  std::vector<int> count(labels, 0);
  t.cluster_.resize(n);
  for (int k = 0; k < n; ++k) {
    t.cluster_[k] = spec.clusters[k] - 1;
    ++count[t.cluster_[k]];
  }
  for (int c = 0; c < labels; ++c)
    require(count[c] > 0, "cluster " + std::to_string(c + 1) + " is empty");
  t.cluster_count_ = labels;

  // Each cluster must be connected through intra-cluster edges.
  for (int c = 0; c < labels; ++c) {
    int start = -1;
    for (int k = 0; k < n && start < 0; ++k)
      if (t.cluster_[k] == c) start = k;
    std::vector<char> seen(n, 0);
    std::queue<int> q;
    q.push(start);
    seen[start] = 1;
    int reached = 0;
    while (!q.empty()) {
      int k = q.front();
      q.pop();
      ++reached;
      for (int l : t.neighbors_[k])
        if (!seen[l] && t.cluster_[l] == c) {
          seen[l] = 1;
          q.push(l);
        }
    }
    require(reached == count[c],
            "cluster " + std::to_string(c + 1) + " is not connected");
  }
  return t;
}

Mat uniform_combination_weights(const Topology& t) {
  const int n = t.size();
  Mat alpha = Mat::Zero(n, n);
  for (int k = 0; k < n; ++k) {
    auto intra = t.intra_neighbors(k);
    const double w = 1.0 / static_cast<double>(intra.size());
    for (int m : intra) alpha(m, k) = w;
  }
  return alpha;
}

Mat inter_cluster_weights(const Topology& t) {
  const int n = t.size();
  Mat gamma = Mat::Zero(n, n);
  for (int k = 0; k < n; ++k) {
    auto inter = t.inter_neighbors(k);
    if (inter.empty()) continue;
    const double w = 1.0 / static_cast<double>(inter.size());
    for (int l : inter) gamma(k, l) = w;
  }
  return gamma;
}

TargetSet generate_targets(const Topology& t, int M,
                           const std::vector<double>& offsets,
                           std::uint64_t seed) {
  require(M >= 1, "filter length must be positive");
  require(static_cast<int>(offsets.size()) == t.cluster_count(),
          "need exactly one offset per cluster");
  TargetSet ts;
  ts.offsets = offsets;
  ts.base.resize(M);
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  for (int j = 0; j < M; ++j) ts.base[j] = unif(rng);

  std::vector<Vec> per_cluster;
  for (double h : offsets) per_cluster.push_back((1.0 + h) * ts.base);
  ts.w_star.reserve(t.size());
  for (int k = 0; k < t.size(); ++k) ts.w_star.push_back(per_cluster[t.cluster(k)]);
  return ts;
}

namespace {

std::vector<double> double_array(const nlohmann::json& j, const char* key) {
  std::vector<double> out;
  if (!j.contains(key)) return out;
  for (const auto& v : j.at(key)) out.push_back(v.get<double>());
  return out;
}

}  // namespace

NetworkPreset parse_network_preset(const std::string& json_text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(json_text);
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorKind::Config, std::string("topology file: ") + e.what());
  }
  NetworkPreset p;
  try {
    p.name = j.value("name", std::string{});
    p.spec.nodes = j.at("nodes").get<int>();
    p.spec.clusters = j.at("clusters").get<std::vector<int>>();
    for (const auto& e : j.at("edges"))
      p.spec.edges.emplace_back(e.at(0).get<int>(), e.at(1).get<int>());
    p.offsets = double_array(j, "offsets");
    p.sigma_delta_sq = double_array(j, "sigma_delta_sq");
    p.sigma_g_sq = double_array(j, "sigma_g_sq");
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorKind::Config, std::string("topology file: ") + e.what());
  }
  const auto n = static_cast<std::size_t>(p.spec.nodes);
  if (p.sigma_delta_sq.empty()) p.sigma_delta_sq.assign(n, 1.0);
  if (p.sigma_g_sq.empty()) p.sigma_g_sq.assign(n, 1.0);
  require(p.sigma_delta_sq.size() == n && p.sigma_g_sq.size() == n,
          "topology file: per-node profiles must have one entry per node",
          ErrorKind::Config);
  return p;
}

NetworkPreset load_network_preset(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorKind::Io, "cannot open topology file '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_network_preset(ss.str());
}

NetworkPreset resolve_network_preset(const std::string& name_or_path) {
  if (auto text = builtin_preset_text(name_or_path)) return parse_network_preset(*text);
  if (std::filesystem::exists(name_or_path)) return load_network_preset(name_or_path);
  fail(ErrorKind::Config, "unknown topology preset '" + name_or_path + "'");
}

std::vector<std::string> builtin_preset_names() { return builtin_preset_list(); }

}  // namespace mdn
