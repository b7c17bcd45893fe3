#pragma once

#include <string>
#include <vector>

#include "msn/activity_store.hpp"
#include "msn/layers.hpp"

namespace testing_support {

// Terse event-log construction for hand-written fixtures. Ids and timestamps
// are assigned in call order.
class LogBuilder {
 public:
  LogBuilder& contact(const std::string& from, const std::string& to) {
    return add(msn::EventKind::ContactAdd, from, [&](auto& e) { e.target_user = to; });
  }
  LogBuilder& upload(const std::string& user, const std::string& photo) {
    return add(msn::EventKind::Upload, user, [&](auto& e) { e.object_id = photo; });
  }
  LogBuilder& tag(const std::string& user, const std::string& photo, const std::string& tag) {
    return add(msn::EventKind::TagUse, user, [&](auto& e) {
      e.object_id = photo;
      e.tag = tag;
    });
  }
  LogBuilder& join(const std::string& user, const std::string& group) {
    return add(msn::EventKind::GroupJoin, user, [&](auto& e) { e.group_id = group; });
  }
  LogBuilder& favourite(const std::string& user, const std::string& photo) {
    return add(msn::EventKind::FavouriteMark, user, [&](auto& e) { e.object_id = photo; });
  }
  LogBuilder& comment(const std::string& user, const std::string& photo) {
    return add(msn::EventKind::Comment, user, [&](auto& e) { e.object_id = photo; });
  }
  LogBuilder& at(msn::Timestamp t) {
    next_time_ = t;
    return *this;
  }

  const std::vector<msn::ActivityEvent>& events() const { return events_; }
  msn::Timestamp last_time() const { return next_time_ - 1; }
  msn::ActivityStore store() const { return msn::build_store(events_, next_time_); }
  msn::LayerSet layers(const msn::DecayConfig& cfg = {}) const {
    return msn::build_all_layers(store(), cfg);
  }

 private:
  template <class F>
  LogBuilder& add(msn::EventKind kind, const std::string& actor, F&& fill) {
    msn::ActivityEvent e;
    e.event_id = "ev" + std::to_string(events_.size());
    e.kind = kind;
    e.actor = actor;
    e.timestamp = next_time_++;
    fill(e);
    events_.push_back(std::move(e));
    return *this;
  }

  std::vector<msn::ActivityEvent> events_;
  msn::Timestamp next_time_ = 1000;
};

// Strength of the edge between two named users, zero when absent.
inline double strength(const msn::LayerSet& set, msn::LayerKind k, const std::string& i,
                       const std::string& j) {
  auto find = [&](const std::string& name) -> std::optional<msn::UserIndex> {
    for (std::size_t u = 0; u < set.users.size(); ++u)
      if (set.users[u] == name) return static_cast<msn::UserIndex>(u);
    return std::nullopt;
  };
  auto a = find(i), b = find(j);
  if (!a || !b) return 0.0;
  return set[k].strength(*a, *b);
}

}  // namespace testing_support
