#pragma once

// Brute-force reference implementations used only by tests. They work from raw
// events and user-id strings, enumerate every ordered pair directly and share
// no code with the library beyond the event type and tag normalization.

#include <algorithm>
#include <array>
#include <cmath>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "msn/activity_store.hpp"

namespace oracle {

using Pair = std::pair<std::string, std::string>;
using Layer = std::map<Pair, double>;  // only positive strengths are stored
using Layers = std::array<Layer, 11>;

enum : std::size_t { C, RC, COC, T, G, FF, FA, AF, OO, AO, OA };

struct Raw {
  std::set<std::string> users;
  std::map<std::string, std::set<std::string>> contacts;
  std::map<std::string, std::string> author;
  std::map<std::string, std::set<std::string>> tags;    // user -> tags
  std::map<std::string, std::set<std::string>> groups;  // user -> groups
  std::map<std::string, std::set<std::string>> favs;    // user -> foreign objects
  std::map<std::string, std::set<std::string>> coms;    // user -> foreign objects
};

inline Raw collect(const std::vector<msn::ActivityEvent>& events, msn::Timestamp cutoff) {
  Raw r;
  for (const auto& e : events) {
    if (e.timestamp > cutoff) continue;
    r.users.insert(e.actor);
    switch (e.kind) {
      case msn::EventKind::ContactAdd:
        r.users.insert(*e.target_user);
        r.contacts[e.actor].insert(*e.target_user);
        break;
      case msn::EventKind::Upload: r.author[*e.object_id] = e.actor; break;
      case msn::EventKind::TagUse: r.tags[e.actor].insert(msn::normalize_tag(*e.tag)); break;
      case msn::EventKind::GroupJoin: r.groups[e.actor].insert(*e.group_id); break;
      case msn::EventKind::FavouriteMark:
        if (r.author.at(*e.object_id) != e.actor) r.favs[e.actor].insert(*e.object_id);
        break;
      case msn::EventKind::Comment:
        if (r.author.at(*e.object_id) != e.actor) r.coms[e.actor].insert(*e.object_id);
        break;
    }
  }
  return r;
}

template <class T>
std::size_t common(const std::set<T>& a, const std::set<T>& b) {
  std::size_t n = 0;
  for (const auto& x : a) n += b.count(x);
  return n;
}

template <class M>
const std::set<std::string>& get(const M& m, const std::string& k) {
  static const std::set<std::string> empty;
  auto it = m.find(k);
  return it == m.end() ? empty : it->second;
}

// Items of `per_user` held by at least two users.
inline std::set<std::string> shared(const std::map<std::string, std::set<std::string>>& per_user) {
  std::map<std::string, int> count;
  for (const auto& [u, items] : per_user)
    for (const auto& x : items) ++count[x];
  std::set<std::string> out;
  for (const auto& [x, c] : count)
    if (c > 1) out.insert(x);
  return out;
}

inline std::set<std::string> intersect(const std::set<std::string>& a, const std::set<std::string>& b) {
  std::set<std::string> out;
  for (const auto& x : a)
    if (b.count(x)) out.insert(x);
  return out;
}

inline Layers layers(const std::vector<msn::ActivityEvent>& events, msn::Timestamp cutoff) {
  const Raw r = collect(events, cutoff);
  const auto shared_tags = shared(r.tags);
  const auto shared_groups = shared(r.groups);
  Layers out;
  auto put = [&](std::size_t k, const std::string& i, const std::string& j, double num, double den) {
    if (num > 0 && den > 0) out[k][{i, j}] = num / den;
  };
  auto authored_by = [&](const std::string& o, const std::string& u) {
    auto it = r.author.find(o);
    return it != r.author.end() && it->second == u;
  };
  // Photos of `u` that some other user acted on.
  auto acted_on_photos_of = [&](const std::map<std::string, std::set<std::string>>& acts,
                                const std::string& u) {
    std::set<std::string> photos;
    for (const auto& [v, objs] : acts)
      for (const auto& o : objs)
        if (authored_by(o, u)) photos.insert(o);
    return photos.size();
  };

  for (const auto& i : r.users) {
    for (const auto& j : r.users) {
      if (i == j) continue;
      const auto& cli = get(r.contacts, i);
      const auto& clj = get(r.contacts, j);
      if (cli.count(j)) put(C, i, j, 1, static_cast<double>(cli.size()));
      if (clj.count(i)) put(RC, i, j, 1, static_cast<double>(clj.size()));
      std::size_t witnesses = 0;
      for (const auto& k : cli)
        if (get(r.contacts, k).count(j)) ++witnesses;
      put(COC, i, j, static_cast<double>(witnesses), static_cast<double>(cli.size()));

      const auto ti = intersect(get(r.tags, i), shared_tags);
      put(T, i, j, static_cast<double>(common(ti, get(r.tags, j))), static_cast<double>(ti.size()));
      const auto gi = intersect(get(r.groups, i), shared_groups);
      put(G, i, j, static_cast<double>(common(gi, get(r.groups, j))), static_cast<double>(gi.size()));

      for (auto [acts, eq, to, from] :
           {std::tuple{&r.favs, FF, FA, AF}, std::tuple{&r.coms, OO, OA, AO}}) {
        const auto& ai = get(*acts, i);
        const auto& aj = get(*acts, j);
        put(eq, i, j, static_cast<double>(common(ai, aj)), static_cast<double>(ai.size()));
        std::size_t to_author = 0, from_author = 0;
        for (const auto& o : ai)
          if (authored_by(o, j)) ++to_author;
        for (const auto& o : aj)
          if (authored_by(o, i)) ++from_author;
        put(to, i, j, static_cast<double>(to_author), static_cast<double>(ai.size()));
        put(from, i, j, static_cast<double>(from_author),
            static_cast<double>(acted_on_photos_of(*acts, i)));
      }
    }
  }
  return out;
}

struct TieRef {
  double strength = 0;
  std::array<double, 11> layers{};
};

inline std::map<Pair, TieRef> ties(const Layers& l, const std::array<double, 11>& alpha) {
  std::map<Pair, TieRef> out;
  for (std::size_t k = 0; k < 11; ++k)
    for (const auto& [p, s] : l[k]) out[p].layers[k] = s;
  double den = 0;
  for (double a : alpha) den += a;
  for (auto& [p, t] : out) {
    double num = 0;
    for (std::size_t k = 0; k < 11; ++k) num += alpha[k] * t.layers[k];
    t.strength = num / den;
  }
  return out;
}

struct Similarity {
  double union_density = 0, cosine = 0, jaccard = 0;
  std::optional<double> pearson;
};

// Materializes both layers as dense vectors over every ordered pair of `users`.
inline Similarity similarity(const Layer& a, const Layer& b, const std::set<std::string>& users) {
  std::vector<double> x, y;
  for (const auto& i : users)
    for (const auto& j : users) {
      if (i == j) continue;
      auto fa = a.find({i, j});
      auto fb = b.find({i, j});
      x.push_back(fa == a.end() ? 0.0 : fa->second);
      y.push_back(fb == b.end() ? 0.0 : fb->second);
    }
  Similarity s;
  double inter = 0, uni = 0, na = 0, nb = 0;
  for (std::size_t p = 0; p < x.size(); ++p) {
    const bool ea = x[p] > 0, eb = y[p] > 0;
    inter += ea && eb;
    uni += ea || eb;
    na += ea;
    nb += eb;
  }
  if (!x.empty()) s.union_density = uni / static_cast<double>(x.size());
  if (na > 0 && nb > 0) s.cosine = inter / std::sqrt(na * nb);
  if (uni > 0) s.jaccard = inter / uni;
  const double n = static_cast<double>(x.size());
  double mx = 0, my = 0;
  for (std::size_t p = 0; p < x.size(); ++p) {
    mx += x[p] / n;
    my += y[p] / n;
  }
  double sxy = 0, sxx = 0, syy = 0, qx = 0, qy = 0;
  for (std::size_t p = 0; p < x.size(); ++p) {
    sxy += (x[p] - mx) * (y[p] - my);
    sxx += (x[p] - mx) * (x[p] - mx);
    syy += (y[p] - my) * (y[p] - my);
    qx += x[p] * x[p];
    qy += y[p] * y[p];
  }
  // A vector is constant when its spread is negligible next to its magnitude.
  if (sxx > 1e-12 * qx && syy > 1e-12 * qy && qx > 0 && qy > 0) s.pearson = sxy / std::sqrt(sxx * syy);
  return s;
}

// Recommendation value written out term by term.
inline double value(const std::array<double, 11>& s, const std::array<double, 11>& sys,
                    const std::array<double, 11>& usr) {
  double mx = 0;
  for (double v : s) mx = std::max(mx, v);
  if (mx <= 0) return 0;
  double v = 0;
  for (std::size_t k = 0; k < 11; ++k) v += (sys[k] + usr[k]) * s[k] / mx;
  return v;
}

}  // namespace oracle
