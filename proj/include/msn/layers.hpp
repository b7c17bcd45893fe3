#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include "msn/activity_store.hpp"

namespace msn {

// Layer order is fixed everywhere: weight vectors, files, reports.
enum class LayerKind : std::uint8_t { C, RC, COC, T, G, FF, FA, AF, OO, AO, OA };

inline constexpr std::size_t kLayerCount = 11;
using LayerVector = std::array<double, kLayerCount>;

inline constexpr std::array<LayerKind, kLayerCount> kAllLayers = {
    LayerKind::C,  LayerKind::RC, LayerKind::COC, LayerKind::T,  LayerKind::G, LayerKind::FF,
    LayerKind::FA, LayerKind::AF, LayerKind::OO,  LayerKind::AO, LayerKind::OA};

inline constexpr std::size_t index_of(LayerKind k) { return static_cast<std::size_t>(k); }

inline std::string_view to_string(LayerKind k) {
  static constexpr std::array<std::string_view, kLayerCount> kNames = {
      "c", "rc", "coc", "t", "g", "ff", "fa", "af", "oo", "ao", "oa"};
  return kNames[index_of(k)];
}

inline std::optional<LayerKind> parse_layer_kind(std::string_view name) {
  for (LayerKind k : kAllLayers)
    if (to_string(k) == name) return k;
  return std::nullopt;
}

struct Edge {
  UserIndex src = 0;
  UserIndex dst = 0;
  double strength = 0.0;

  bool operator==(const Edge&) const = default;
};

// Directed weighted edge set of one relation kind. Edges are sorted by
// (src, dst), unique, non-self, with strength in (0, 1].
class RelationLayer {
 public:
  RelationLayer() = default;
  RelationLayer(LayerKind kind, std::vector<Edge> edges,
                std::optional<std::size_t> meeting_objects = std::nullopt)
      : kind_(kind), edges_(std::move(edges)), meeting_objects_(meeting_objects) {
    std::sort(edges_.begin(), edges_.end(), [](const Edge& a, const Edge& b) {
      return std::pair(a.src, a.dst) < std::pair(b.src, b.dst);
    });
  }

  LayerKind kind() const { return kind_; }
  std::span<const Edge> edges() const { return edges_; }
  std::size_t size() const { return edges_.size(); }
  bool empty() const { return edges_.empty(); }
  std::optional<std::size_t> meeting_object_count() const { return meeting_objects_; }

  std::span<const Edge> out_edges(UserIndex u) const {
    auto lo = std::lower_bound(edges_.begin(), edges_.end(), u,
                               [](const Edge& e, UserIndex v) { return e.src < v; });
    auto hi = std::upper_bound(lo, edges_.end(), u,
                               [](UserIndex v, const Edge& e) { return v < e.src; });
    return {lo, hi};
  }

  // Zero when the edge is absent.
  double strength(UserIndex i, UserIndex j) const {
    auto out = out_edges(i);
    auto it = std::lower_bound(out.begin(), out.end(), j,
                               [](const Edge& e, UserIndex v) { return e.dst < v; });
    return it != out.end() && it->dst == j ? it->strength : 0.0;
  }

  bool contains(UserIndex i, UserIndex j) const { return strength(i, j) > 0.0; }

  double max_strength() const {
    double m = 0.0;
    for (const auto& e : edges_) m = std::max(m, e.strength);
    return m;
  }

 private:
  LayerKind kind_ = LayerKind::C;
  std::vector<Edge> edges_;
  std::optional<std::size_t> meeting_objects_;
};

// All eleven layers over one user table.
struct LayerSet {
  std::vector<std::string> users;
  std::array<RelationLayer, kLayerCount> layers;

  const RelationLayer& operator[](LayerKind k) const { return layers[index_of(k)]; }
  RelationLayer& operator[](LayerKind k) { return layers[index_of(k)]; }
};

// Each historical activity counts 1/lambda^tp, tp = whole periods elapsed
// between the activity and `reference_time`.
struct DecayConfig {
  bool enabled = false;
  double lambda = 2.0;
  Timestamp period_seconds = 86400;
  Timestamp reference_time = 0;

  void validate() const {
    if (!enabled) return;
    if (!(lambda > 1.0)) throw Error(ErrorCode::InvalidConfig, "decay lambda must exceed 1");
    if (period_seconds <= 0) throw Error(ErrorCode::InvalidConfig, "decay period must be positive");
  }
};

// nullopt for activities after the reference time.
inline std::optional<double> activity_weight(Timestamp t, const DecayConfig& cfg) {
  if (!cfg.enabled) return 1.0;
  if (t > cfg.reference_time) return std::nullopt;
  const Timestamp periods = (cfg.reference_time - t) / cfg.period_seconds;
  return std::pow(cfg.lambda, -static_cast<double>(periods));
}

struct DecayedCount {
  double value = 0.0;
  std::size_t skipped_future = 0;
};

inline DecayedCount decayed_count(std::span<const Timestamp> timestamps, const DecayConfig& cfg) {
  cfg.validate();
  DecayedCount out;
  for (Timestamp t : timestamps) {
    if (auto w = activity_weight(t, cfg))
      out.value += *w;
    else
      ++out.skipped_future;
  }
  return out;
}

namespace detail {

inline std::uint64_t pair_key(UserIndex i, UserIndex j) {
  return (static_cast<std::uint64_t>(i) << 32) | j;
}

// Numerators per ordered pair plus one denominator per source user; strength
// is numerator / denominator of the source.
class StrengthAccumulator {
 public:
  explicit StrengthAccumulator(std::size_t users) : denominators_(users, 0.0) {}

  void add_pair(UserIndex i, UserIndex j, double w) {
    if (i != j && w > 0.0) numerators_[pair_key(i, j)] += w;
  }
  void add_denominator(UserIndex i, double w) { denominators_[i] += w; }

  RelationLayer finish(LayerKind kind, std::optional<std::size_t> meeting_objects) const {
    std::vector<Edge> edges;
    edges.reserve(numerators_.size());
    for (const auto& [key, num] : numerators_) {
      const auto i = static_cast<UserIndex>(key >> 32);
      const auto j = static_cast<UserIndex>(key & 0xffffffffu);
      const double den = denominators_[i];
      if (den <= 0.0 || num <= 0.0) continue;
      edges.push_back({i, j, std::min(1.0, num / den)});
    }
    return RelationLayer(kind, std::move(edges), meeting_objects);
  }

 private:
  std::unordered_map<std::uint64_t, double> numerators_;
  std::vector<double> denominators_;
};

inline double weight_or_zero(Timestamp t, const DecayConfig& cfg) {
  return activity_weight(t, cfg).value_or(0.0);
}

// Shared-object relations with equal roles: every participant of an object with
// at least two participants is linked to every other one. Participant maps give
// the timestamp of each user's activity on that object.
template <class ObjectMap, class PerUser>
RelationLayer equal_role_layer(LayerKind kind, std::size_t users, const ObjectMap& participants,
                               const PerUser& qualifies, const DecayConfig& cfg) {
  StrengthAccumulator acc(users);
  std::size_t meeting = 0;
  for (const auto& [object, members] : participants) {
    if (!qualifies(object, members)) continue;
    for (const auto& [u, t] : members) acc.add_denominator(u, weight_or_zero(t, cfg));
    if (members.size() < 2) continue;
    ++meeting;
    for (const auto& [a, ta] : members) {
      const double w = weight_or_zero(ta, cfg);
      for (const auto& [b, tb] : members) acc.add_pair(a, b, w);
    }
  }
  return acc.finish(kind, meeting);
}

struct RoleLayers {
  RelationLayer equal;    // FF or OO
  RelationLayer to_author;  // FA or OA
  RelationLayer from_author;  // AF or AO
};

// Favourite and opinion relations share one shape: users act on objects owned
// by an author. Activities by the author on its own object are ignored.
inline RoleLayers object_role_layers(
    const ActivityStore& store,
    const std::map<std::string, std::map<UserIndex, Timestamp>>& actors_by_object,
    LayerKind equal, LayerKind to_author, LayerKind from_author, const DecayConfig& cfg) {
  const std::size_t n = store.users.size();

  std::map<std::string, std::map<UserIndex, Timestamp>> foreign;
  for (const auto& [object, actors] : actors_by_object) {
    const UserIndex author = store.photo_authors.at(object);
    for (const auto& [u, t] : actors)
      if (u != author) foreign[object][u] = t;
  }

  RoleLayers out;
  out.equal = equal_role_layer(
      equal, n, foreign, [](const auto&, const auto&) { return true; }, cfg);

  StrengthAccumulator to(n), from(n);
  for (const auto& [object, actors] : foreign) {
    const UserIndex author = store.photo_authors.at(object);
    double author_weight = 0.0;
    for (const auto& [u, t] : actors) {
      const double w = weight_or_zero(t, cfg);
      author_weight = std::max(author_weight, w);
      to.add_denominator(u, w);
      to.add_pair(u, author, w);
    }
    from.add_denominator(author, author_weight);
    for (const auto& [u, t] : actors) from.add_pair(author, u, author_weight);
  }
  out.to_author = to.finish(to_author, foreign.size());
  out.from_author = from.finish(from_author, foreign.size());
  return out;
}

}  // namespace detail

struct ContactLayers {
  RelationLayer c, rc, coc;
};

inline ContactLayers build_contact_layers(const ActivityStore& store, const DecayConfig& cfg = {}) {
  cfg.validate();
  const std::size_t n = store.users.size();
  detail::StrengthAccumulator c(n), rc(n), coc(n);
  for (const auto& [i, list] : store.contact_lists) {
    for (const auto& [j, t] : list) {
      const double w = detail::weight_or_zero(t, cfg);
      c.add_denominator(i, w);
      c.add_pair(i, j, w);
      coc.add_denominator(i, w);
      auto second = store.contact_lists.find(j);
      if (second == store.contact_lists.end()) continue;
      for (const auto& [k, _] : second->second) coc.add_pair(i, k, w);
    }
  }
  // RC(i, j) is C(j, i): the strength is normalized by the list holder j.
  std::vector<Edge> reversed;
  RelationLayer direct = c.finish(LayerKind::C, std::nullopt);
  reversed.reserve(direct.size());
  for (const auto& e : direct.edges()) reversed.push_back({e.dst, e.src, e.strength});
  return {std::move(direct), RelationLayer(LayerKind::RC, std::move(reversed)),
          coc.finish(LayerKind::COC, std::nullopt)};
}

inline RelationLayer build_tag_layer(const ActivityStore& store, const DecayConfig& cfg = {}) {
  cfg.validate();
  std::map<std::string, std::map<UserIndex, Timestamp>> users_by_tag;
  for (const auto& [u, tags] : store.user_tags)
    for (const auto& [tag, t] : tags) users_by_tag[tag][u] = t;
  // Only shared tags (used by two or more users) count, including in n_i.
  return detail::equal_role_layer(
      LayerKind::T, store.users.size(), users_by_tag,
      [](const auto&, const auto& members) { return members.size() > 1; }, cfg);
}

inline RelationLayer build_group_layer(const ActivityStore& store, const DecayConfig& cfg = {}) {
  cfg.validate();
  return detail::equal_role_layer(
      LayerKind::G, store.users.size(), store.group_members,
      [](const auto&, const auto& members) { return members.size() > 1; }, cfg);
}

struct FavouriteLayers {
  RelationLayer ff, fa, af;
};

inline FavouriteLayers build_favourite_layers(const ActivityStore& store,
                                              const DecayConfig& cfg = {}) {
  cfg.validate();
  std::map<std::string, std::map<UserIndex, Timestamp>> by_object;
  for (const auto& [u, objects] : store.favourites)
    for (const auto& [o, t] : objects) by_object[o][u] = t;
  auto r = detail::object_role_layers(store, by_object, LayerKind::FF, LayerKind::FA,
                                      LayerKind::AF, cfg);
  return {std::move(r.equal), std::move(r.to_author), std::move(r.from_author)};
}

struct OpinionLayers {
  RelationLayer oo, ao, oa;
};

inline OpinionLayers build_opinion_layers(const ActivityStore& store,
                                          const DecayConfig& cfg = {}) {
  cfg.validate();
  auto r = detail::object_role_layers(store, store.comments, LayerKind::OO, LayerKind::OA,
                                      LayerKind::AO, cfg);
  return {std::move(r.equal), std::move(r.from_author), std::move(r.to_author)};
}

inline LayerSet build_all_layers(const ActivityStore& store, const DecayConfig& cfg = {}) {
  LayerSet set;
  set.users = store.users;
  auto contacts = build_contact_layers(store, cfg);
  auto favourites = build_favourite_layers(store, cfg);
  auto opinions = build_opinion_layers(store, cfg);
  set[LayerKind::C] = std::move(contacts.c);
  set[LayerKind::RC] = std::move(contacts.rc);
  set[LayerKind::COC] = std::move(contacts.coc);
  set[LayerKind::T] = build_tag_layer(store, cfg);
  set[LayerKind::G] = build_group_layer(store, cfg);
  set[LayerKind::FF] = std::move(favourites.ff);
  set[LayerKind::FA] = std::move(favourites.fa);
  set[LayerKind::AF] = std::move(favourites.af);
  set[LayerKind::OO] = std::move(opinions.oo);
  set[LayerKind::AO] = std::move(opinions.ao);
  set[LayerKind::OA] = std::move(opinions.oa);
  return set;
}

}  // namespace msn
