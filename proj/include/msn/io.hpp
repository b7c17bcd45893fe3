#pragma once

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <tuple>
#include <vector>

#include "msn/network.hpp"

namespace msn {

// Round-trippable text form of a strength (17 significant digits).
inline std::string format_strength(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

inline double parse_strength(const std::string& s) {
  char* end = nullptr;
  const double v = std::strtod(s.c_str(), &end);
  if (end == s.c_str() || *end != '\0')
    throw Error(ErrorCode::MalformedRecord, "invalid number '" + s + "'");
  return v;
}

inline std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string field;
  std::istringstream in(s);
  while (std::getline(in, field, sep)) out.push_back(field);
  if (!s.empty() && s.back() == sep) out.emplace_back();
  return out;
}

inline std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::Io, "cannot read " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline void write_file(const std::filesystem::path& path, const std::string& content) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::Io, "cannot write " + path.string());
  out << content;
}

// 64-bit FNV-1a, hex encoded. Names content-addressed snapshot files.
inline std::string content_hash(const std::string& content) {
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char c : content) {
    h ^= c;
    h *= 1099511628211ull;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

inline std::filesystem::path save_snapshot(const std::filesystem::path& dir,
                                           const std::string& content, const std::string& ext) {
  auto path = dir / (content_hash(content) + ext);
  if (!std::filesystem::exists(path)) write_file(path, content);
  return path;
}

// Layer dump: a header line, then one `kind <TAB> u_i <TAB> u_j <TAB> strength`
// record per edge.
inline void write_layer(std::ostream& out, const RelationLayer& layer,
                        const std::vector<std::string>& users) {
  out << "#layer\t" << to_string(layer.kind()) << "\tmeeting_objects\t";
  if (auto m = layer.meeting_object_count())
    out << *m;
  else
    out << "NA";
  out << '\n';
  for (const auto& e : layer.edges())
    out << to_string(layer.kind()) << '\t' << users.at(e.src) << '\t' << users.at(e.dst) << '\t'
        << format_strength(e.strength) << '\n';
}

struct NamedLayer {
  LayerKind kind = LayerKind::C;
  std::optional<std::size_t> meeting_objects;
  std::vector<std::tuple<std::string, std::string, double>> edges;
};

inline NamedLayer read_layer(std::istream& in) {
  NamedLayer layer;
  bool have_header = false;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    auto f = split(line, '\t');
    if (line[0] == '#') {
      if (f.size() != 4 || f[0] != "#layer" || f[2] != "meeting_objects")
        throw Error(ErrorCode::MalformedRecord, "bad layer header", lineno);
      auto kind = parse_layer_kind(f[1]);
      if (!kind) throw Error(ErrorCode::MalformedRecord, "unknown layer '" + f[1] + "'", lineno);
      layer.kind = *kind;
      if (f[3] != "NA") layer.meeting_objects = std::stoull(f[3]);
      have_header = true;
      continue;
    }
    if (f.size() != 4) throw Error(ErrorCode::MalformedRecord, "expected 4 fields", lineno);
    auto kind = parse_layer_kind(f[0]);
    if (!kind || (have_header && *kind != layer.kind))
      throw Error(ErrorCode::MalformedRecord, "record kind does not match layer", lineno);
    if (!have_header) {
      layer.kind = *kind;
      have_header = true;
    }
    layer.edges.emplace_back(f[1], f[2], parse_strength(f[3]));
  }
  return layer;
}

// Re-indexes named layers onto one sorted user table. Missing kinds stay empty.
inline LayerSet layers_from_named(const std::vector<NamedLayer>& named) {
  std::set<std::string> names;
  for (const auto& l : named)
    for (const auto& [a, b, s] : l.edges) {
      names.insert(a);
      names.insert(b);
    }
  LayerSet set;
  set.users.assign(names.begin(), names.end());
  for (LayerKind k : kAllLayers) set[k] = RelationLayer(k, {});
  auto idx = [&](const std::string& n) {
    return static_cast<UserIndex>(std::lower_bound(set.users.begin(), set.users.end(), n) -
                                  set.users.begin());
  };
  for (const auto& l : named) {
    std::vector<Edge> edges;
    for (const auto& [a, b, s] : l.edges) {
      if (a == b) throw Error(ErrorCode::MalformedRecord, "self edge for '" + a + "'");
      if (!(s > 0.0 && s <= 1.0))
        throw Error(ErrorCode::MalformedRecord, "strength out of (0, 1] for " + a + "->" + b);
      edges.push_back({idx(a), idx(b), s});
    }
    set[l.kind] = RelationLayer(l.kind, std::move(edges), l.meeting_objects);
  }
  return set;
}

// Network snapshot: alpha and meeting-object counts in header lines, then one
// tie record per line: `l <TAB> u_i <TAB> u_j <TAB> strength <TAB> s_1,...,s_11`.
inline void write_network(std::ostream& out, const Network& msn) {
  out << "#msn\t1\n#alpha";
  for (std::size_t k = 0; k < kLayerCount; ++k)
    out << (k ? ',' : '\t') << format_strength(msn.config().alpha[k]);
  out << '\n';
  for (LayerKind k : kAllLayers) {
    out << "#meeting_objects\t" << to_string(k) << '\t';
    if (auto m = msn.layer(k).meeting_object_count())
      out << *m;
    else
      out << "NA";
    out << '\n';
  }
  for (const auto& t : msn.ties()) {
    out << "l\t" << msn.name(t.src) << '\t' << msn.name(t.dst) << '\t'
        << format_strength(t.strength);
    for (std::size_t k = 0; k < kLayerCount; ++k)
      out << (k ? ',' : '\t') << format_strength(t.layers[k]);
    out << '\n';
  }
}

inline std::string network_to_string(const Network& msn) {
  std::ostringstream ss;
  write_network(ss, msn);
  return ss.str();
}

inline Network read_network(std::istream& in) {
  AggregationConfig cfg;
  std::map<LayerKind, std::optional<std::size_t>> meeting;
  struct Record {
    std::string src, dst;
    double strength;
    LayerVector layers;
  };
  std::vector<Record> records;
  std::set<std::string> names;
  std::string line;
  std::size_t lineno = 0;
  auto parse_vector = [&](const std::string& csv) {
    auto f = split(csv, ',');
    if (f.size() != kLayerCount)
      throw Error(ErrorCode::MalformedRecord, "expected 11 layer values", lineno);
    LayerVector v;
    for (std::size_t k = 0; k < kLayerCount; ++k) v[k] = parse_strength(f[k]);
    return v;
  };
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    auto f = split(line, '\t');
    if (f[0] == "#msn") continue;
    if (f[0] == "#alpha" && f.size() == 2) {
      cfg.alpha = parse_vector(f[1]);
    } else if (f[0] == "#meeting_objects" && f.size() == 3) {
      auto k = parse_layer_kind(f[1]);
      if (!k) throw Error(ErrorCode::MalformedRecord, "unknown layer '" + f[1] + "'", lineno);
      meeting[*k] = f[2] == "NA" ? std::nullopt : std::optional<std::size_t>(std::stoull(f[2]));
    } else if (f[0] == "l" && f.size() == 5) {
      records.push_back({f[1], f[2], parse_strength(f[3]), parse_vector(f[4])});
      names.insert(f[1]);
      names.insert(f[2]);
    } else {
      throw Error(ErrorCode::MalformedRecord, "unrecognized network record", lineno);
    }
  }
  cfg.validate();
  std::vector<std::string> users(names.begin(), names.end());
  auto idx = [&](const std::string& n) {
    return static_cast<UserIndex>(std::lower_bound(users.begin(), users.end(), n) - users.begin());
  };
  std::array<std::vector<Edge>, kLayerCount> edges;
  std::vector<Tie> ties;
  ties.reserve(records.size());
  for (const auto& r : records) {
    Tie t{idx(r.src), idx(r.dst), r.strength, r.layers};
    for (std::size_t k = 0; k < kLayerCount; ++k)
      if (r.layers[k] > 0.0) edges[k].push_back({t.src, t.dst, r.layers[k]});
    ties.push_back(t);
  }
  std::array<RelationLayer, kLayerCount> layers;
  for (LayerKind k : kAllLayers)
    layers[index_of(k)] = RelationLayer(k, std::move(edges[index_of(k)]), meeting[k]);
  return Network(std::move(users), std::move(layers), std::move(ties), cfg);
}

inline Network network_from_string(const std::string& text) {
  std::istringstream in(text);
  return read_network(in);
}

}  // namespace msn
