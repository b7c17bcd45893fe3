#pragma once

#include <algorithm>
#include <cstdint>
#include <cstdio>
#include <random>
#include <string>
#include <vector>

#include <json.hpp>

#include "msn/activity_store.hpp"

namespace msn {

// Parameters of a randomly generated photo-sharing community.
struct SyntheticWorld {
  std::size_t users = 60;
  std::size_t contacts_per_user = 3;
  std::size_t photos_per_user = 3;
  std::size_t tag_vocabulary = 80;
  std::size_t tags_per_photo = 2;
  std::size_t groups = 12;
  std::size_t groups_per_user = 1;
  std::size_t favourites_per_user = 2;
  std::size_t comments_per_user = 2;
  Timestamp start = 1167609600;  // 2007-01-01
  Timestamp span = 365 * 86400;
};

inline void from_json(const nlohmann::json& j, SyntheticWorld& w) {
  w.users = j.value("users", w.users);
  w.contacts_per_user = j.value("contacts_per_user", w.contacts_per_user);
  w.photos_per_user = j.value("photos_per_user", w.photos_per_user);
  w.tag_vocabulary = j.value("tag_vocabulary", w.tag_vocabulary);
  w.tags_per_photo = j.value("tags_per_photo", w.tags_per_photo);
  w.groups = j.value("groups", w.groups);
  w.groups_per_user = j.value("groups_per_user", w.groups_per_user);
  w.favourites_per_user = j.value("favourites_per_user", w.favourites_per_user);
  w.comments_per_user = j.value("comments_per_user", w.comments_per_user);
  w.start = j.value("start", w.start);
  w.span = j.value("span", w.span);
}

inline std::string synthetic_user(std::size_t i) {
  char buf[16];
  std::snprintf(buf, sizeof buf, "u%04zu", i);
  return buf;
}

// Valid event log in timestamp order: every upload precedes the references to
// its photo. Deterministic for a given seed.
inline std::vector<ActivityEvent> generate_events(const SyntheticWorld& w, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  auto pick = [&](std::size_t n) { return std::uniform_int_distribution<std::size_t>(0, n - 1)(rng); };
  const Timestamp half = w.span / 2;
  auto early = [&] { return w.start + std::uniform_int_distribution<Timestamp>(0, half - 1)(rng); };
  auto late = [&] { return w.start + half + std::uniform_int_distribution<Timestamp>(0, half - 1)(rng); };

  std::vector<ActivityEvent> events;
  auto emit = [&](ActivityEvent e) {
    e.event_id = "e" + std::to_string(events.size() + 1);
    events.push_back(std::move(e));
  };

  std::vector<std::pair<std::string, std::size_t>> photos;  // id, author
  for (std::size_t u = 0; u < w.users; ++u)
    for (std::size_t p = 0; p < w.photos_per_user; ++p) {
      std::string id = "p" + std::to_string(u) + "_" + std::to_string(p);
      emit({"", EventKind::Upload, synthetic_user(u), {}, id, {}, {}, early()});
      photos.emplace_back(id, u);
    }
  std::stable_sort(events.begin(), events.end(),
                   [](const auto& a, const auto& b) { return a.timestamp < b.timestamp; });

  const std::size_t uploads = events.size();
  for (std::size_t u = 0; u < w.users && w.users > 1; ++u) {
    const std::string actor = synthetic_user(u);
    for (std::size_t c = 0; c < w.contacts_per_user; ++c) {
      std::size_t v = pick(w.users);
      if (v == u) continue;
      emit({"", EventKind::ContactAdd, actor, synthetic_user(v), {}, {}, {}, late()});
    }
    for (std::size_t g = 0; g < w.groups_per_user && w.groups > 0; ++g)
      emit({"", EventKind::GroupJoin, actor, {}, {}, {}, "g" + std::to_string(pick(w.groups)), late()});
    for (std::size_t p = 0; p < w.photos_per_user; ++p)
      for (std::size_t t = 0; t < w.tags_per_photo && w.tag_vocabulary > 0; ++t)
        emit({"", EventKind::TagUse, actor, {}, "p" + std::to_string(u) + "_" + std::to_string(p),
              "tag" + std::to_string(pick(w.tag_vocabulary)), {}, late()});
    for (std::size_t f = 0; f < w.favourites_per_user && !photos.empty(); ++f) {
      const auto& [id, author] = photos[pick(photos.size())];
      if (author != u) emit({"", EventKind::FavouriteMark, actor, {}, id, {}, {}, late()});
    }
    for (std::size_t c = 0; c < w.comments_per_user && !photos.empty(); ++c) {
      const auto& [id, author] = photos[pick(photos.size())];
      if (author != u) emit({"", EventKind::Comment, actor, {}, id, {}, {}, late()});
    }
  }
  std::stable_sort(events.begin() + static_cast<std::ptrdiff_t>(uploads), events.end(),
                   [](const auto& a, const auto& b) { return a.timestamp < b.timestamp; });
  for (std::size_t i = 0; i < events.size(); ++i) events[i].event_id = "e" + std::to_string(i + 1);
  return events;
}

}  // namespace msn
