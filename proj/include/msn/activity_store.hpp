#pragma once

#include <algorithm>
#include <cctype>
#include <cstdint>
#include <ctime>
#include <istream>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <unordered_set>
#include <vector>

#include <json.hpp>

#include "msn/error.hpp"

namespace msn {

using UserIndex = std::uint32_t;
using Timestamp = std::int64_t;

enum class EventKind { ContactAdd, TagUse, GroupJoin, Upload, FavouriteMark, Comment };

inline std::string_view to_string(EventKind kind) {
  switch (kind) {
    case EventKind::ContactAdd: return "ContactAdd";
    case EventKind::TagUse: return "TagUse";
    case EventKind::GroupJoin: return "GroupJoin";
    case EventKind::Upload: return "Upload";
    case EventKind::FavouriteMark: return "FavouriteMark";
    case EventKind::Comment: return "Comment";
  }
  return "";
}

inline std::optional<EventKind> parse_event_kind(std::string_view name) {
  static constexpr EventKind kAll[] = {EventKind::ContactAdd, EventKind::TagUse,
                                       EventKind::GroupJoin,  EventKind::Upload,
                                       EventKind::FavouriteMark, EventKind::Comment};
  for (EventKind k : kAll)
    if (to_string(k) == name) return k;
  return std::nullopt;
}

struct ActivityEvent {
  std::string event_id;
  EventKind kind = EventKind::ContactAdd;
  std::string actor;
  std::optional<std::string> target_user;
  std::optional<std::string> object_id;
  std::optional<std::string> tag;
  std::optional<std::string> group_id;
  Timestamp timestamp = 0;

  bool operator==(const ActivityEvent&) const = default;
};

// Checks that `kind` determines exactly which optional fields are present.
// Returns an empty string when valid, otherwise the reason.
inline std::string validate_event(const ActivityEvent& e) {
  if (e.event_id.empty()) return "empty event_id";
  if (e.actor.empty()) return "empty actor";
  const bool target = e.target_user.has_value(), object = e.object_id.has_value(),
             tag = e.tag.has_value(), group = e.group_id.has_value();
  switch (e.kind) {
    case EventKind::ContactAdd:
      if (!target || object || tag || group) return "ContactAdd requires target_user only";
      if (*e.target_user == e.actor) return "ContactAdd actor equals target_user";
      break;
    case EventKind::TagUse:
      if (target || !object || !tag || group) return "TagUse requires tag and object_id";
      break;
    case EventKind::GroupJoin:
      if (target || object || tag || !group) return "GroupJoin requires group_id only";
      break;
    case EventKind::Upload:
    case EventKind::FavouriteMark:
    case EventKind::Comment:
      if (target || !object || tag || group)
        return std::string(to_string(e.kind)) + " requires object_id only";
      break;
  }
  return {};
}

inline nlohmann::json to_json(const ActivityEvent& e) {
  nlohmann::json j;
  j["event_id"] = e.event_id;
  j["kind"] = std::string(to_string(e.kind));
  j["actor"] = e.actor;
  if (e.target_user) j["target_user"] = *e.target_user;
  if (e.object_id) j["object_id"] = *e.object_id;
  if (e.tag) j["tag"] = *e.tag;
  if (e.group_id) j["group_id"] = *e.group_id;
  j["timestamp"] = e.timestamp;
  return j;
}

namespace detail {

inline std::optional<std::string> optional_string(const nlohmann::json& j, const char* key,
                                                  std::size_t line) {
  auto it = j.find(key);
  if (it == j.end() || it->is_null()) return std::nullopt;
  if (!it->is_string())
    throw Error(ErrorCode::MalformedRecord, std::string("field '") + key + "' must be a string",
                line);
  return it->get<std::string>();
}

}  // namespace detail

// Decodes one log record. `line` is only used for diagnostics.
inline ActivityEvent parse_event(std::string_view text, std::size_t line = 0) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& ex) {
    throw Error(ErrorCode::MalformedRecord, std::string("invalid JSON: ") + ex.what(), line);
  }
  if (!j.is_object()) throw Error(ErrorCode::MalformedRecord, "record is not an object", line);

  static const std::set<std::string> kFields = {"event_id", "kind",     "actor",   "target_user",
                                                "object_id", "tag",     "group_id", "timestamp"};
  for (const auto& [key, _] : j.items())
    if (!kFields.count(key))
      throw Error(ErrorCode::MalformedRecord, "unexpected field '" + key + "'", line);

  auto kind_it = j.find("kind");
  if (kind_it == j.end() || !kind_it->is_string())
    throw Error(ErrorCode::MalformedRecord, "missing kind", line);
  auto kind = parse_event_kind(kind_it->get<std::string>());
  if (!kind)
    throw Error(ErrorCode::UnknownKind, "unknown kind '" + kind_it->get<std::string>() + "'", line);

  ActivityEvent e;
  e.kind = *kind;
  auto id = detail::optional_string(j, "event_id", line);
  auto actor = detail::optional_string(j, "actor", line);
  if (!id) throw Error(ErrorCode::MalformedRecord, "missing event_id", line);
  if (!actor) throw Error(ErrorCode::MalformedRecord, "missing actor", line);
  e.event_id = *id;
  e.actor = *actor;
  e.target_user = detail::optional_string(j, "target_user", line);
  e.object_id = detail::optional_string(j, "object_id", line);
  e.tag = detail::optional_string(j, "tag", line);
  e.group_id = detail::optional_string(j, "group_id", line);

  auto ts = j.find("timestamp");
  if (ts == j.end() || !ts->is_number_integer())
    throw Error(ErrorCode::MalformedRecord, "timestamp must be integer epoch seconds", line);
  e.timestamp = ts->get<Timestamp>();

  if (auto why = validate_event(e); !why.empty()) throw Error(ErrorCode::MalformedRecord, why, line);
  return e;
}

// Reads a line-delimited log. Blank lines are skipped; the first bad line throws.
inline std::vector<ActivityEvent> parse_events(std::istream& in) {
  std::vector<ActivityEvent> events;
  std::unordered_set<std::string> seen;
  std::string text;
  std::size_t line = 0;
  while (std::getline(in, text)) {
    ++line;
    if (std::all_of(text.begin(), text.end(), [](unsigned char c) { return std::isspace(c); }))
      continue;
    ActivityEvent e = parse_event(text, line);
    if (!seen.insert(e.event_id).second)
      throw Error(ErrorCode::DuplicateEventId, "duplicate event_id '" + e.event_id + "'", line);
    events.push_back(std::move(e));
  }
  return events;
}

// Case-folded, whitespace-trimmed tag.
inline std::string normalize_tag(std::string_view tag) {
  auto not_space = [](unsigned char c) { return !std::isspace(c); };
  auto first = std::find_if(tag.begin(), tag.end(), not_space);
  auto last = std::find_if(tag.rbegin(), tag.rend(), not_space).base();
  std::string out;
  if (first < last) out.assign(first, last);
  std::transform(out.begin(), out.end(), out.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return out;
}

// Accepts plain epoch seconds or `YYYY-MM-DD[THH:MM[:SS]][Z]` (UTC).
inline std::optional<Timestamp> parse_timestamp(std::string_view text) {
  std::string s(text);
  if (!s.empty() && std::all_of(s.begin() + (s[0] == '-' ? 1 : 0), s.end(),
                                [](unsigned char c) { return std::isdigit(c); }))
    return std::stoll(s);
  std::tm tm{};
  int n = std::sscanf(s.c_str(), "%4d-%2d-%2dT%2d:%2d:%2d", &tm.tm_year, &tm.tm_mon, &tm.tm_mday,
                      &tm.tm_hour, &tm.tm_min, &tm.tm_sec);
  if (n != 3 && n != 5 && n != 6) return std::nullopt;
  tm.tm_year -= 1900;
  tm.tm_mon -= 1;
  return static_cast<Timestamp>(timegm(&tm));
}

// Canonical snapshot of the activity log at `cutoff`. Maps keep the most recent
// timestamp of each qualifying activity so decayed counts can be derived later.
// `users` is sorted, so user indices order the same way as user ids.
struct ActivityStore {
  Timestamp cutoff = 0;
  std::vector<std::string> users;
  std::map<UserIndex, std::map<UserIndex, Timestamp>> contact_lists;
  std::map<std::string, UserIndex> photo_authors;
  std::map<std::string, std::set<std::string>> photo_tags;
  std::map<UserIndex, std::map<std::string, Timestamp>> user_tags;
  std::map<std::string, std::map<UserIndex, Timestamp>> group_members;
  std::map<UserIndex, std::map<std::string, Timestamp>> favourites;
  std::map<std::string, std::map<UserIndex, Timestamp>> comments;

  bool operator==(const ActivityStore&) const = default;

  std::optional<UserIndex> find_user(std::string_view id) const {
    auto it = std::lower_bound(users.begin(), users.end(), id);
    if (it == users.end() || *it != id) return std::nullopt;
    return static_cast<UserIndex>(it - users.begin());
  }

  // Groups holding photos of more than one user.
  std::vector<std::string> shared_groups() const {
    std::vector<std::string> out;
    for (const auto& [group, members] : group_members)
      if (members.size() > 1) out.push_back(group);
    return out;
  }
};

namespace detail {

template <class Map, class Key>
void keep_latest(Map& m, const Key& key, Timestamp t) {
  auto [it, inserted] = m.emplace(key, t);
  if (!inserted) it->second = std::max(it->second, t);
}

}  // namespace detail

// Events are processed in sequence order; a reference to an object must follow
// its Upload. Events stamped after `cutoff` are ignored entirely.
inline ActivityStore build_store(const std::vector<ActivityEvent>& events, Timestamp cutoff) {
  ActivityStore store;
  store.cutoff = cutoff;

  std::set<std::string> names;
  for (const auto& e : events) {
    if (e.timestamp > cutoff) continue;
    names.insert(e.actor);
    if (e.kind == EventKind::ContactAdd && e.target_user) names.insert(*e.target_user);
  }
  store.users.assign(names.begin(), names.end());
  auto index = [&](const std::string& id) { return *store.find_user(id); };

  std::map<std::string, std::string> authors;
  for (const auto& e : events) {
    if (e.timestamp > cutoff) continue;
    if (auto why = validate_event(e); !why.empty())
      throw Error(ErrorCode::MalformedRecord, e.event_id + ": " + why);
    const UserIndex actor = index(e.actor);
    auto require_object = [&]() -> const std::string& {
      if (!authors.count(*e.object_id))
        throw Error(ErrorCode::UnknownObject,
                    e.event_id + ": object '" + *e.object_id + "' referenced before upload");
      return *e.object_id;
    };
    switch (e.kind) {
      case EventKind::ContactAdd: {
        if (*e.target_user == e.actor)
          throw Error(ErrorCode::SelfContact, e.event_id + ": user lists itself as contact");
        detail::keep_latest(store.contact_lists[actor], index(*e.target_user), e.timestamp);
        break;
      }
      case EventKind::Upload: {
        auto [it, inserted] = authors.emplace(*e.object_id, e.actor);
        if (!inserted && it->second != e.actor)
          throw Error(ErrorCode::ConflictingAuthor,
                      e.event_id + ": object '" + *e.object_id + "' already authored by " +
                          it->second);
        store.photo_authors[*e.object_id] = actor;
        break;
      }
      case EventKind::TagUse: {
        const auto& object = require_object();
        std::string tag = normalize_tag(*e.tag);
        if (tag.empty()) throw Error(ErrorCode::MalformedRecord, e.event_id + ": blank tag");
        store.photo_tags[object].insert(tag);
        detail::keep_latest(store.user_tags[actor], tag, e.timestamp);
        break;
      }
      case EventKind::GroupJoin:
        detail::keep_latest(store.group_members[*e.group_id], actor, e.timestamp);
        break;
      case EventKind::FavouriteMark:
        detail::keep_latest(store.favourites[actor], require_object(), e.timestamp);
        break;
      case EventKind::Comment:
        detail::keep_latest(store.comments[require_object()], actor, e.timestamp);
        break;
    }
  }
  return store;
}

// Serialized form keeps user ids instead of indices so it is self-describing.
inline nlohmann::json to_json(const ActivityStore& s) {
  using nlohmann::json;
  auto name = [&](UserIndex u) { return s.users.at(u); };
  json j;
  j["version"] = 1;
  j["cutoff"] = s.cutoff;
  j["users"] = s.users;
  json& contacts = j["contact_lists"] = json::object();
  for (const auto& [u, list] : s.contact_lists)
    for (const auto& [v, t] : list) contacts[name(u)][name(v)] = t;
  json& authors = j["photo_authors"] = json::object();
  for (const auto& [o, u] : s.photo_authors) authors[o] = name(u);
  j["photo_tags"] = s.photo_tags;
  json& tags = j["user_tags"] = json::object();
  for (const auto& [u, m] : s.user_tags) tags[name(u)] = m;
  json& groups = j["group_members"] = json::object();
  for (const auto& [g, m] : s.group_members)
    for (const auto& [u, t] : m) groups[g][name(u)] = t;
  json& favs = j["favourites"] = json::object();
  for (const auto& [u, m] : s.favourites) favs[name(u)] = m;
  json& comments = j["comments"] = json::object();
  for (const auto& [o, m] : s.comments)
    for (const auto& [u, t] : m) comments[o][name(u)] = t;
  return j;
}

inline ActivityStore store_from_json(const nlohmann::json& j) {
  try {
    ActivityStore s;
    s.cutoff = j.at("cutoff").get<Timestamp>();
    s.users = j.at("users").get<std::vector<std::string>>();
    if (!std::is_sorted(s.users.begin(), s.users.end()) ||
        std::adjacent_find(s.users.begin(), s.users.end()) != s.users.end())
      throw Error(ErrorCode::MalformedRecord, "store users must be sorted and unique");
    auto index = [&](const std::string& id) {
      auto u = s.find_user(id);
      if (!u) throw Error(ErrorCode::UnknownUser, "store references unknown user '" + id + "'");
      return *u;
    };
    for (const auto& [u, list] : j.at("contact_lists").items())
      for (const auto& [v, t] : list.items()) s.contact_lists[index(u)][index(v)] = t.get<Timestamp>();
    for (const auto& [o, u] : j.at("photo_authors").items())
      s.photo_authors[o] = index(u.get<std::string>());
    s.photo_tags = j.at("photo_tags").get<std::map<std::string, std::set<std::string>>>();
    for (const auto& [u, m] : j.at("user_tags").items())
      s.user_tags[index(u)] = m.get<std::map<std::string, Timestamp>>();
    for (const auto& [g, m] : j.at("group_members").items())
      for (const auto& [u, t] : m.items()) s.group_members[g][index(u)] = t.get<Timestamp>();
    for (const auto& [u, m] : j.at("favourites").items())
      s.favourites[index(u)] = m.get<std::map<std::string, Timestamp>>();
    for (const auto& [o, m] : j.at("comments").items())
      for (const auto& [u, t] : m.items()) s.comments[o][index(u)] = t.get<Timestamp>();
    return s;
  } catch (const nlohmann::json::exception& ex) {
    throw Error(ErrorCode::MalformedRecord, std::string("invalid store document: ") + ex.what());
  }
}

}  // namespace msn
