#pragma once

#include <random>
#include <string>
#include <vector>

#include "msn/activity_store.hpp"

namespace testing_support {

// Small valid event log: at most `max_users` users and `max_events` events,
// every reference follows its upload. Includes repeated contacts, repeated
// comments, self-favourites and mixed-case tags on purpose.
inline std::vector<msn::ActivityEvent> random_log(std::mt19937_64& rng, std::size_t max_users = 20,
                                                  std::size_t max_events = 60) {
  using msn::EventKind;
  auto uniform = [&](std::size_t lo, std::size_t hi) {
    return std::uniform_int_distribution<std::size_t>(lo, hi)(rng);
  };
  const std::size_t users = uniform(2, max_users);
  const std::size_t events = uniform(1, max_events);
  const std::size_t tags = uniform(1, 6), groups = uniform(1, 4);
  auto user = [&] { return "u" + std::to_string(uniform(0, users - 1)); };

  std::vector<msn::ActivityEvent> log;
  std::vector<std::string> photos;
  msn::Timestamp t = 1000;
  for (std::size_t n = 0; n < events; ++n) {
    msn::ActivityEvent e;
    e.event_id = "e" + std::to_string(n);
    e.actor = user();
    e.timestamp = t;
    t += static_cast<msn::Timestamp>(uniform(0, 3));
    std::size_t kind = uniform(0, 5);
    if (photos.empty() && (kind == 1 || kind >= 4)) kind = 3;
    switch (kind) {
      case 0: {
        std::string target = user();
        if (target == e.actor) target = e.actor == "u0" ? "u1" : "u0";
        e.kind = EventKind::ContactAdd;
        e.target_user = target;
        break;
      }
      case 1: {
        e.kind = EventKind::TagUse;
        e.object_id = photos[uniform(0, photos.size() - 1)];
        std::string tag = "tag" + std::to_string(uniform(0, tags - 1));
        if (uniform(0, 3) == 0) tag = " " + std::string(1, 'T') + tag.substr(1);
        e.tag = tag;
        break;
      }
      case 2:
        e.kind = EventKind::GroupJoin;
        e.group_id = "g" + std::to_string(uniform(0, groups - 1));
        break;
      case 3:
        e.kind = EventKind::Upload;
        e.object_id = "p" + std::to_string(photos.size());
        photos.push_back(*e.object_id);
        break;
      case 4:
        e.kind = EventKind::FavouriteMark;
        e.object_id = photos[uniform(0, photos.size() - 1)];
        break;
      default:
        e.kind = EventKind::Comment;
        e.object_id = photos[uniform(0, photos.size() - 1)];
        break;
    }
    log.push_back(std::move(e));
  }
  return log;
}

}  // namespace testing_support
