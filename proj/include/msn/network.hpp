#pragma once

#include <algorithm>
#include <memory>
#include <numeric>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "msn/layers.hpp"

namespace msn {

struct AggregationConfig {
  LayerVector alpha = [] {
    LayerVector a;
    a.fill(1.0);
    return a;
  }();

  void validate() const {
    double sum = 0.0;
    for (double a : alpha) {
      if (!(a >= 0.0)) throw Error(ErrorCode::InvalidConfig, "alpha must be nonnegative");
      sum += a;
    }
    if (!(sum > 0.0)) throw Error(ErrorCode::InvalidConfig, "alpha must not sum to zero");
  }
};

// One aggregated tie with its per-layer breakdown (zero for absent layers).
struct Tie {
  UserIndex src = 0;
  UserIndex dst = 0;
  double strength = 0.0;
  LayerVector layers{};

  std::size_t layer_count() const {
    return static_cast<std::size_t>(
        std::count_if(layers.begin(), layers.end(), [](double s) { return s > 0.0; }));
  }
};

struct Neighbor {
  UserIndex user = 0;
  double strength = 0.0;
  LayerVector layers{};
};

// The aggregated multidimensional network. Immutable once built. User indices
// refer to `names()`; only users holding at least one tie are members.
class Network {
 public:
  Network() = default;

  Network(std::vector<std::string> names, std::array<RelationLayer, kLayerCount> layers,
          std::vector<Tie> ties, AggregationConfig cfg)
      : names_(std::move(names)), layers_(std::move(layers)), ties_(std::move(ties)), cfg_(cfg) {
    std::sort(ties_.begin(), ties_.end(), [](const Tie& a, const Tie& b) {
      return std::pair(a.src, a.dst) < std::pair(b.src, b.dst);
    });
    member_.assign(names_.size(), false);
    for (const auto& t : ties_) member_[t.src] = member_[t.dst] = true;
    for (UserIndex u = 0; u < names_.size(); ++u)
      if (member_[u]) users_.push_back(u);
    for (std::size_t k = 0; k < kLayerCount; ++k) layer_max_[k] = layers_[k].max_strength();
  }

  const std::vector<std::string>& names() const { return names_; }
  const std::string& name(UserIndex u) const { return names_.at(u); }
  const std::vector<UserIndex>& users() const { return users_; }
  std::size_t user_count() const { return users_.size(); }
  const AggregationConfig& config() const { return cfg_; }

  const RelationLayer& layer(LayerKind k) const { return layers_[index_of(k)]; }
  const std::array<RelationLayer, kLayerCount>& layers() const { return layers_; }
  std::span<const Tie> ties() const { return ties_; }

  // Largest strength present in each layer over all pairs.
  const LayerVector& layer_max() const { return layer_max_; }

  bool is_member(UserIndex u) const { return u < member_.size() && member_[u]; }

  std::optional<UserIndex> find(std::string_view name) const {
    auto it = std::lower_bound(names_.begin(), names_.end(), name);
    if (it == names_.end() || *it != name) return std::nullopt;
    return static_cast<UserIndex>(it - names_.begin());
  }

  // Throws UnknownUser unless the id names a non-isolated user.
  UserIndex require_member(std::string_view name) const {
    auto u = find(name);
    if (!u || !is_member(*u))
      throw Error(ErrorCode::UnknownUser, "unknown user '" + std::string(name) + "'");
    return *u;
  }

  std::span<const Tie> out_ties(UserIndex u) const {
    auto lo = std::lower_bound(ties_.begin(), ties_.end(), u,
                               [](const Tie& t, UserIndex v) { return t.src < v; });
    auto hi = std::upper_bound(lo, ties_.end(), u,
                               [](UserIndex v, const Tie& t) { return v < t.src; });
    return {lo, hi};
  }

  const Tie* find_tie(UserIndex i, UserIndex j) const {
    auto out = out_ties(i);
    auto it = std::lower_bound(out.begin(), out.end(), j,
                               [](const Tie& t, UserIndex v) { return t.dst < v; });
    return it != out.end() && it->dst == j ? &*it : nullptr;
  }

 private:
  std::vector<std::string> names_;
  std::array<RelationLayer, kLayerCount> layers_;
  std::vector<Tie> ties_;
  AggregationConfig cfg_;
  std::vector<bool> member_;
  std::vector<UserIndex> users_;
  LayerVector layer_max_{};
};

inline double weighted_strength(const LayerVector& layers, const AggregationConfig& cfg) {
  double num = 0.0, den = 0.0;
  for (std::size_t k = 0; k < kLayerCount; ++k) {
    num += cfg.alpha[k] * layers[k];
    den += cfg.alpha[k];
  }
  return num / den;
}

// Ties are the union of all layer edges; strength is the alpha-weighted mean
// of the per-layer strengths. Users without any tie drop out of the network.
inline Network aggregate(LayerSet layers, const AggregationConfig& cfg = {}) {
  cfg.validate();
  std::unordered_map<std::uint64_t, std::size_t> slot;
  std::vector<Tie> ties;
  for (std::size_t k = 0; k < kLayerCount; ++k) {
    for (const auto& e : layers.layers[k].edges()) {
      auto [it, inserted] = slot.emplace(detail::pair_key(e.src, e.dst), ties.size());
      if (inserted) ties.push_back({e.src, e.dst, 0.0, {}});
      ties[it->second].layers[k] = e.strength;
    }
  }
  for (auto& t : ties) t.strength = weighted_strength(t.layers, cfg);
  return Network(std::move(layers.users), std::move(layers.layers), std::move(ties), cfg);
}

inline std::vector<Neighbor> tie_neighbors(const Network& msn, UserIndex u) {
  if (!msn.is_member(u))
    throw Error(ErrorCode::UnknownUser, "user index " + std::to_string(u) + " not in network");
  std::vector<Neighbor> out;
  for (const auto& t : msn.out_ties(u)) out.push_back({t.dst, t.strength, t.layers});
  return out;
}

inline std::vector<Neighbor> tie_neighbors(const Network& msn, std::string_view user) {
  return tie_neighbors(msn, msn.require_member(user));
}

}  // namespace msn
