#pragma once

#include <ostream>
#include <string>
#include <vector>

#include <json.hpp>

#include "msn/analytics.hpp"
#include "msn/io.hpp"

namespace msn {

inline nlohmann::json layer_object(const LayerVector& v) {
  nlohmann::json j = nlohmann::json::object();
  for (LayerKind k : kAllLayers) j[std::string(to_string(k))] = v[index_of(k)];
  return j;
}

inline nlohmann::json to_json(const LayerStats& s) {
  nlohmann::json j = {{"layer", std::string(to_string(s.kind))},
                      {"relation_count", s.relation_count},
                      {"contribution_in_ties", s.contribution_in_ties},
                      {"non_isolated_users", s.non_isolated_users},
                      {"non_isolated_fraction", s.non_isolated_fraction},
                      {"avg_strength", s.avg_strength},
                      {"strength_std_dev", s.strength_std_dev},
                      {"avg_relations_per_user", s.avg_relations_per_user},
                      {"meeting_object_count", nullptr},
                      {"relations_per_object", nullptr},
                      {"graph_density", s.graph_density},
                      {"strength_density", s.strength_density}};
  if (s.meeting_object_count) j["meeting_object_count"] = *s.meeting_object_count;
  if (s.relations_per_object) j["relations_per_object"] = *s.relations_per_object;
  return j;
}

inline nlohmann::json to_json(const LayerSimilarity& s) {
  nlohmann::json j = {{"first", std::string(to_string(s.first))},
                      {"second", std::string(to_string(s.second))},
                      {"union_density", s.union_density},
                      {"cosine", s.cosine},
                      {"jaccard", s.jaccard},
                      {"pearson", nullptr}};
  if (s.pearson) j["pearson"] = *s.pearson;
  return j;
}

inline std::vector<LayerStats> all_layer_stats(const Network& msn) {
  std::vector<LayerStats> out;
  for (LayerKind k : kAllLayers) out.push_back(layer_stats(msn.layer(k), msn));
  return out;
}

inline nlohmann::json stats_document(const Network& msn) {
  nlohmann::json layers = nlohmann::json::array();
  for (const auto& s : all_layer_stats(msn)) layers.push_back(to_json(s));
  nlohmann::json histogram = nlohmann::json::object();
  for (const auto& [k, v] : tie_overlap_histogram(msn)) histogram[std::to_string(k)] = v;
  return {{"users", msn.user_count()},
          {"ties", msn.ties().size()},
          {"layers", layers},
          {"tie_overlap_histogram", histogram}};
}

// Column order follows the LayerStats field order; percentages use two decimals.
inline void write_stats_csv(std::ostream& out, const std::vector<LayerStats>& stats) {
  out << "layer,relation_count,contribution_in_ties,non_isolated_users,non_isolated_fraction,"
         "avg_strength,strength_std_dev,avg_relations_per_user,meeting_object_count,"
         "relations_per_object,graph_density,strength_density\n";
  for (const auto& s : stats) {
    out << to_string(s.kind) << ',' << s.relation_count << ',' << format_percent(s.contribution_in_ties)
        << ',' << s.non_isolated_users << ',' << format_percent(s.non_isolated_fraction) << ','
        << format_strength(s.avg_strength) << ',' << format_strength(s.strength_std_dev) << ','
        << format_strength(s.avg_relations_per_user) << ','
        << (s.meeting_object_count ? std::to_string(*s.meeting_object_count) : "NA") << ','
        << (s.relations_per_object ? format_strength(*s.relations_per_object) : "NA") << ','
        << format_percent(s.graph_density) << ',' << format_percent(s.strength_density) << '\n';
  }
}

inline void write_compare_csv(std::ostream& out, const std::vector<LayerSimilarity>& rows) {
  out << "first,second,union_density,cosine,jaccard,pearson\n";
  for (const auto& r : rows)
    out << to_string(r.first) << ',' << to_string(r.second) << ',' << format_strength(r.union_density)
        << ',' << format_strength(r.cosine) << ',' << format_strength(r.jaccard) << ','
        << (r.pearson ? format_strength(*r.pearson) : "undefined") << '\n';
}

inline nlohmann::json neighbors_document(const Network& msn, std::string_view user) {
  nlohmann::json arr = nlohmann::json::array();
  for (const auto& n : tie_neighbors(msn, user))
    arr.push_back({{"user", msn.name(n.user)}, {"strength", n.strength}, {"layers", layer_object(n.layers)}});
  return {{"user", std::string(user)}, {"neighbors", arr}};
}

}  // namespace msn
