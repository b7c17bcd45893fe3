#pragma once

#include <cmath>
#include <cstdio>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "msn/network.hpp"

namespace msn {

// Raw per-layer totals. Everything in LayerStats is derived from these, so the
// same formulas serve measured layers and externally published summaries.
struct LayerTotals {
  std::size_t relation_count = 0;
  std::size_t tie_count = 0;
  std::size_t non_isolated_users = 0;
  std::size_t universe_size = 0;
  std::optional<std::size_t> meeting_object_count;
  double avg_strength = 0.0;
  double strength_std_dev = 0.0;
};

struct LayerStats {
  LayerKind kind = LayerKind::C;
  std::size_t relation_count = 0;
  double contribution_in_ties = 0.0;
  std::size_t non_isolated_users = 0;
  double non_isolated_fraction = 0.0;
  double avg_strength = 0.0;
  double strength_std_dev = 0.0;
  double avg_relations_per_user = 0.0;
  std::optional<std::size_t> meeting_object_count;
  std::optional<double> relations_per_object;
  double graph_density = 0.0;
  double strength_density = 0.0;
};

inline double ordered_pairs(std::size_t n) {
  return n < 2 ? 0.0 : static_cast<double>(n) * static_cast<double>(n - 1);
}

inline LayerStats derive_stats(LayerKind kind, const LayerTotals& t) {
  LayerStats s;
  s.kind = kind;
  s.relation_count = t.relation_count;
  s.non_isolated_users = t.non_isolated_users;
  s.meeting_object_count = t.meeting_object_count;
  s.avg_strength = t.avg_strength;
  s.strength_std_dev = t.strength_std_dev;
  const double rel = static_cast<double>(t.relation_count);
  if (t.tie_count > 0) s.contribution_in_ties = rel / static_cast<double>(t.tie_count);
  if (t.universe_size > 0)
    s.non_isolated_fraction =
        static_cast<double>(t.non_isolated_users) / static_cast<double>(t.universe_size);
  if (t.non_isolated_users > 0)
    s.avg_relations_per_user = rel / static_cast<double>(t.non_isolated_users);
  if (t.meeting_object_count)
    s.relations_per_object =
        *t.meeting_object_count == 0 ? 0.0 : rel / static_cast<double>(*t.meeting_object_count);
  if (const double pairs = ordered_pairs(t.universe_size); pairs > 0.0) {
    s.graph_density = rel / pairs;
    s.strength_density = t.avg_strength * rel / pairs;
  }
  return s;
}

inline LayerStats layer_stats(const RelationLayer& layer, const Network& universe) {
  LayerTotals t;
  t.relation_count = layer.size();
  t.tie_count = universe.ties().size();
  t.universe_size = universe.user_count();
  t.meeting_object_count = layer.meeting_object_count();

  std::vector<bool> touched(universe.names().size(), false);
  double sum = 0.0;
  for (const auto& e : layer.edges()) {
    touched[e.src] = touched[e.dst] = true;
    sum += e.strength;
  }
  t.non_isolated_users = static_cast<std::size_t>(std::count(touched.begin(), touched.end(), true));
  if (!layer.empty()) {
    const double n = static_cast<double>(layer.size());
    t.avg_strength = sum / n;
    double sq = 0.0;
    for (const auto& e : layer.edges()) sq += (e.strength - t.avg_strength) * (e.strength - t.avg_strength);
    t.strength_std_dev = std::sqrt(sq / n);
  }
  return derive_stats(layer.kind(), t);
}

struct LayerSimilarity {
  LayerKind first = LayerKind::C;
  LayerKind second = LayerKind::C;
  double union_density = 0.0;
  double cosine = 0.0;
  double jaccard = 0.0;
  std::optional<double> pearson;  // nullopt when either strength vector is constant
};

// Pearson runs over every ordered pair of network users with absent edges as
// zeros; the sums are accumulated over edges only.
inline LayerSimilarity compare_layers(const RelationLayer& a, const RelationLayer& b,
                                      const Network& universe) {
  LayerSimilarity r;
  r.first = a.kind();
  r.second = b.kind();

  double sa = 0, sb = 0, saa = 0, sbb = 0, sab = 0;
  std::size_t common = 0;
  auto ea = a.edges(), eb = b.edges();
  auto ia = ea.begin(), ib = eb.begin();
  while (ia != ea.end() || ib != eb.end()) {
    const bool take_a = ib == eb.end() ||
                        (ia != ea.end() && std::pair(ia->src, ia->dst) <= std::pair(ib->src, ib->dst));
    const bool take_b = ia == ea.end() ||
                        (ib != eb.end() && std::pair(ib->src, ib->dst) <= std::pair(ia->src, ia->dst));
    const double x = take_a ? ia->strength : 0.0;
    const double y = take_b ? ib->strength : 0.0;
    if (take_a && take_b) ++common;
    sa += x;
    sb += y;
    saa += x * x;
    sbb += y * y;
    sab += x * y;
    if (take_a) ++ia;
    if (take_b) ++ib;
  }

  const double na = static_cast<double>(a.size()), nb = static_cast<double>(b.size());
  const double uni = na + nb - static_cast<double>(common);
  const double pairs = ordered_pairs(universe.user_count());
  if (pairs > 0) r.union_density = uni / pairs;
  if (na > 0 && nb > 0) r.cosine = static_cast<double>(common) / std::sqrt(na * nb);
  if (uni > 0) r.jaccard = static_cast<double>(common) / uni;

  const double var_a = pairs * saa - sa * sa;
  const double var_b = pairs * sbb - sb * sb;
  const double tol = 1e-12;
  if (var_a > tol * pairs * saa && var_b > tol * pairs * sbb) {
    double p = (pairs * sab - sa * sb) / std::sqrt(var_a * var_b);
    r.pearson = std::clamp(p, -1.0, 1.0);
  }
  return r;
}

// All 55 unordered layer pairs in layer order.
inline std::vector<LayerSimilarity> compare_all_layers(const Network& msn) {
  std::vector<LayerSimilarity> out;
  for (std::size_t i = 0; i < kLayerCount; ++i)
    for (std::size_t j = i + 1; j < kLayerCount; ++j)
      out.push_back(compare_layers(msn.layers()[i], msn.layers()[j], msn));
  return out;
}

// Buckets 1..11: how many ties are made of exactly that many layers.
inline std::map<std::size_t, std::size_t> tie_overlap_histogram(const Network& msn) {
  std::map<std::size_t, std::size_t> h;
  for (std::size_t k = 1; k <= kLayerCount; ++k) h[k] = 0;
  for (const auto& t : msn.ties()) ++h[t.layer_count()];
  return h;
}

inline std::string format_percent(double fraction) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f%%", fraction * 100.0);
  return buf;
}

}  // namespace msn
