#pragma once

#include <algorithm>
#include <cmath>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include <json.hpp>

#include "msn/network.hpp"

namespace msn {

enum class FeedbackActivity { ViewProfile, Comment, Favourite, AddContact, ExplicitRating };

inline std::string_view to_string(FeedbackActivity a) {
  switch (a) {
    case FeedbackActivity::ViewProfile: return "ViewProfile";
    case FeedbackActivity::Comment: return "Comment";
    case FeedbackActivity::Favourite: return "Favourite";
    case FeedbackActivity::AddContact: return "AddContact";
    case FeedbackActivity::ExplicitRating: return "ExplicitRating";
  }
  return "";
}

inline std::optional<FeedbackActivity> parse_feedback_activity(std::string_view name) {
  for (auto a : {FeedbackActivity::ViewProfile, FeedbackActivity::Comment,
                 FeedbackActivity::Favourite, FeedbackActivity::AddContact,
                 FeedbackActivity::ExplicitRating})
    if (to_string(a) == name) return a;
  return std::nullopt;
}

inline LayerVector uniform_layer_vector() {
  LayerVector v;
  v.fill(1.0 / static_cast<double>(kLayerCount));
  return v;
}

// System weights, per-user personal weights and the importance of each
// feedback activity. Personal vectors lie on the probability simplex.
struct WeightState {
  LayerVector system = uniform_layer_vector();
  std::map<std::string, LayerVector> personal;
  double epsilon = 1e-6;
  std::map<FeedbackActivity, double> activity_importance = {
      {FeedbackActivity::ViewProfile, 0.1},
      {FeedbackActivity::Comment, 0.5},
      {FeedbackActivity::Favourite, 0.7},
      {FeedbackActivity::AddContact, 1.0},
  };

  bool operator==(const WeightState&) const = default;

  // New users start from the system weights.
  const LayerVector& personal_for(const std::string& user) const {
    auto it = personal.find(user);
    return it == personal.end() ? system : it->second;
  }
};

inline nlohmann::json to_json(const WeightState& w) {
  nlohmann::json j;
  j["version"] = 1;
  j["epsilon"] = w.epsilon;
  j["activity_importance"] = nlohmann::json::object();
  for (const auto& [a, v] : w.activity_importance) j["activity_importance"][std::string(to_string(a))] = v;
  j["system"] = w.system;
  j["personal"] = nlohmann::json::object();
  for (const auto& [u, v] : w.personal) j["personal"][u] = v;
  return j;
}

inline WeightState weights_from_json(const nlohmann::json& j) {
  try {
    if (j.value("version", 1) != 1)
      throw Error(ErrorCode::MalformedRecord, "unsupported weight document version");
    WeightState w;
    w.epsilon = j.at("epsilon").get<double>();
    w.activity_importance.clear();
    for (const auto& [name, v] : j.at("activity_importance").items()) {
      auto a = parse_feedback_activity(name);
      if (!a) throw Error(ErrorCode::MalformedRecord, "unknown activity '" + name + "'");
      w.activity_importance[*a] = v.get<double>();
    }
    w.system = j.at("system").get<LayerVector>();
    for (const auto& [u, v] : j.at("personal").items()) w.personal[u] = v.get<LayerVector>();
    return w;
  } catch (const nlohmann::json::exception& ex) {
    throw Error(ErrorCode::MalformedRecord, std::string("invalid weight document: ") + ex.what());
  }
}

struct FeedbackEvent {
  std::string user;
  std::string target;
  FeedbackActivity activity = FeedbackActivity::ViewProfile;
  std::optional<double> rating;
  Timestamp timestamp = 0;
};

inline nlohmann::json to_json(const FeedbackEvent& fb) {
  nlohmann::json j = {{"user", fb.user},
                      {"target", fb.target},
                      {"activity", std::string(to_string(fb.activity))},
                      {"timestamp", fb.timestamp}};
  if (fb.rating) j["rating"] = *fb.rating;
  return j;
}

inline FeedbackEvent feedback_from_json(const nlohmann::json& j) {
  try {
    FeedbackEvent fb;
    fb.user = j.at("user").get<std::string>();
    fb.target = j.at("target").get<std::string>();
    auto activity = parse_feedback_activity(j.at("activity").get<std::string>());
    if (!activity) throw Error(ErrorCode::MalformedRecord, "unknown feedback activity");
    fb.activity = *activity;
    if (j.contains("rating") && !j["rating"].is_null()) fb.rating = j["rating"].get<double>();
    fb.timestamp = j.value("timestamp", Timestamp{0});
    return fb;
  } catch (const nlohmann::json::exception& ex) {
    throw Error(ErrorCode::MalformedRecord, std::string("invalid feedback: ") + ex.what());
  }
}

// How each layer strength is scaled in the recommendation value: by the
// largest strength of the pair itself, or by the largest strength the layer
// reaches anywhere in the network.
enum class Normalization { PairMax, LayerMax };

inline double recommendation_value(const LayerVector& strengths, const LayerVector& system,
                                   const LayerVector& personal,
                                   Normalization norm = Normalization::PairMax,
                                   const LayerVector& layer_max = {}) {
  const double pair_max = *std::max_element(strengths.begin(), strengths.end());
  if (!(pair_max > 0.0)) return 0.0;
  double v = 0.0;
  for (std::size_t k = 0; k < kLayerCount; ++k) {
    if (strengths[k] <= 0.0) continue;
    const double den = norm == Normalization::PairMax ? pair_max : layer_max[k];
    if (den > 0.0) v += (system[k] + personal[k]) * strengths[k] / den;
  }
  return v;
}

inline double recommendation_value(const Network& msn, std::string_view rater,
                                   std::string_view candidate, const WeightState& w,
                                   Normalization norm = Normalization::PairMax) {
  const UserIndex i = msn.require_member(rater);
  const UserIndex j = msn.require_member(candidate);
  const Tie* tie = msn.find_tie(i, j);
  if (!tie) return 0.0;
  return recommendation_value(tie->layers, w.system, w.personal_for(std::string(rater)), norm,
                              msn.layer_max());
}

inline LayerVector contribution(const LayerVector& strengths) {
  double total = 0.0;
  for (double s : strengths) total += s;
  if (!(total > 0.0)) throw Error(ErrorCode::NoRelation, "pair has no positive layer strength");
  LayerVector c;
  for (std::size_t k = 0; k < kLayerCount; ++k) c[k] = strengths[k] / total;
  return c;
}

inline LayerVector contribution(const Network& msn, std::string_view rater,
                                std::string_view candidate) {
  const UserIndex i = msn.require_member(rater);
  const UserIndex j = msn.require_member(candidate);
  const Tie* tie = msn.find_tie(i, j);
  if (!tie)
    throw Error(ErrorCode::NoRelation,
                "no tie from '" + std::string(rater) + "' to '" + std::string(candidate) + "'");
  return contribution(tie->layers);
}

// One feedback step on a personal vector. The raw update is divided by the
// published denominator and then renormalized so the result sums to exactly 1.
inline LayerVector adapt_personal(const LayerVector& old, const LayerVector& contrib,
                                  double importance, double epsilon) {
  if (!(importance >= 0.0 && importance <= 1.0))
    throw Error(ErrorCode::InvalidImportance, "activity importance must lie in [0, 1]");
  LayerVector raw;
  double denominator = 0.0;
  for (std::size_t k = 0; k < kLayerCount; ++k) {
    const double delta = contrib[k] * (importance - old[k]);
    raw[k] = old[k] * (1.0 + epsilon) + delta;
    denominator += old[k] + delta;
  }
  if (denominator > 0.0)
    for (double& r : raw) r /= denominator;
  double sum = 0.0;
  for (double& r : raw) {
    r = std::max(0.0, r);
    sum += r;
  }
  if (!(sum > 0.0)) return old;
  for (double& r : raw) r = std::min(1.0, r / sum);
  return raw;
}

inline double feedback_importance(const WeightState& w, const FeedbackEvent& fb) {
  if (fb.activity == FeedbackActivity::ExplicitRating) {
    if (!fb.rating) throw Error(ErrorCode::InvalidImportance, "ExplicitRating requires a rating");
    return *fb.rating;
  }
  if (fb.rating) throw Error(ErrorCode::InvalidImportance, "rating only allowed for ExplicitRating");
  auto it = w.activity_importance.find(fb.activity);
  if (it == w.activity_importance.end())
    throw Error(ErrorCode::InvalidImportance,
                "no importance configured for " + std::string(to_string(fb.activity)));
  return it->second;
}

inline WeightState adapt_weights(WeightState w, const FeedbackEvent& fb, const Network& msn) {
  const double a = feedback_importance(w, fb);
  if (!(a >= 0.0 && a <= 1.0))
    throw Error(ErrorCode::InvalidImportance, "activity importance must lie in [0, 1]");
  const LayerVector c = contribution(msn, fb.user, fb.target);
  const LayerVector old = w.personal_for(fb.user);
  w.personal[fb.user] = adapt_personal(old, c, a, w.epsilon);
  return w;
}

inline WeightState refresh_system_weights(WeightState w) {
  if (w.personal.empty()) throw Error(ErrorCode::NoUsers, "no personal weight vectors");
  LayerVector mean{};
  for (const auto& [_, v] : w.personal)
    for (std::size_t k = 0; k < kLayerCount; ++k) mean[k] += v[k];
  for (double& m : mean) m /= static_cast<double>(w.personal.size());
  w.system = mean;
  return w;
}

enum class CandidateState { Fresh, Viewed, Contacted, Blocked };

inline std::string_view to_string(CandidateState s) {
  switch (s) {
    case CandidateState::Fresh: return "Fresh";
    case CandidateState::Viewed: return "Viewed";
    case CandidateState::Contacted: return "Contacted";
    case CandidateState::Blocked: return "Blocked";
  }
  return "";
}

struct RecommendationEntry {
  std::string candidate;
  double value = 0.0;
  LayerVector layer_contributions{};
  std::size_t presented_count = 0;
  CandidateState state = CandidateState::Fresh;
};

// What a rater has already seen or done, keyed by candidate id.
using History = std::map<std::string, RecommendationEntry>;

struct RankOptions {
  std::size_t n = 10;
  std::size_t rotation_offset = 0;
  double view_penalty = 0.8;
  std::size_t pool_factor = 5;
  Normalization normalization = Normalization::PairMax;
  std::set<std::string> exclude;
};

struct RecommendationList {
  std::string user;
  std::vector<RecommendationEntry> entries;
  std::size_t pool_size = 0;
  std::size_t next_offset = 0;
};

inline nlohmann::json to_json(const RecommendationEntry& e) {
  return {{"candidate", e.candidate},
          {"value", e.value},
          {"layer_contributions", e.layer_contributions},
          {"presented_count", e.presented_count},
          {"state", std::string(to_string(e.state))}};
}

inline nlohmann::json to_json(const RecommendationList& l) {
  nlohmann::json entries = nlohmann::json::array();
  for (const auto& e : l.entries) entries.push_back(to_json(e));
  return {{"user", l.user}, {"entries", entries}, {"pool_size", l.pool_size},
          {"next_offset", l.next_offset}};
}

// Scores every tie neighbour, drops existing contacts and blocked or already
// contacted candidates, discounts viewed ones, then presents a rotating window
// of `n` over the top `pool_factor * n`.
inline RecommendationList rank(const Network& msn, std::string_view rater, const WeightState& w,
                               const History& history, const RankOptions& opt) {
  const UserIndex i = msn.require_member(rater);
  const std::string rater_id(rater);
  const LayerVector& personal = w.personal_for(rater_id);
  const RelationLayer& contacts = msn.layer(LayerKind::C);

  struct Scored {
    UserIndex candidate;
    double value;
    const Tie* tie;
    const RecommendationEntry* seen;
  };
  std::vector<Scored> scored;
  for (const auto& tie : msn.out_ties(i)) {
    if (contacts.contains(i, tie.dst)) continue;
    const std::string& name = msn.name(tie.dst);
    if (opt.exclude.count(name)) continue;
    const RecommendationEntry* seen = nullptr;
    if (auto it = history.find(name); it != history.end()) {
      seen = &it->second;
      if (seen->state == CandidateState::Blocked || seen->state == CandidateState::Contacted)
        continue;
    }
    double v = recommendation_value(tie.layers, w.system, personal, opt.normalization,
                                    msn.layer_max());
    if (seen && seen->state == CandidateState::Viewed)
      v *= std::pow(opt.view_penalty, static_cast<double>(seen->presented_count));
    scored.push_back({tie.dst, v, &tie, seen});
  }
  std::sort(scored.begin(), scored.end(), [](const Scored& a, const Scored& b) {
    return a.value != b.value ? a.value > b.value : a.candidate < b.candidate;
  });
  scored.resize(std::min(scored.size(), opt.pool_factor * opt.n));

  RecommendationList list;
  list.user = rater_id;
  list.pool_size = scored.size();
  list.next_offset = opt.rotation_offset + opt.n;
  if (scored.empty() || opt.n == 0) return list;

  const bool rotate = scored.size() > opt.n;
  const std::size_t count = std::min(opt.n, scored.size());
  const std::size_t start = rotate ? opt.rotation_offset % scored.size() : 0;
  for (std::size_t k = 0; k < count; ++k) {
    const Scored& s = scored[(start + k) % scored.size()];
    RecommendationEntry e;
    e.candidate = msn.name(s.candidate);
    e.value = s.value;
    e.layer_contributions = contribution(s.tie->layers);
    if (s.seen) {
      e.presented_count = s.seen->presented_count;
      e.state = s.seen->state;
    }
    list.entries.push_back(std::move(e));
  }
  return list;
}

}  // namespace msn
