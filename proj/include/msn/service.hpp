#pragma once

#include <ctime>
#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include <httplib.h>
#include <json.hpp>

#include "msn/engine.hpp"
#include "msn/report.hpp"

namespace msn {

enum class SessionStage { Initial, PostAdaptation };

inline std::string_view to_string(SessionStage s) {
  return s == SessionStage::Initial ? "Initial" : "PostAdaptation";
}

struct SessionRecord {
  std::string user;
  SessionStage stage = SessionStage::Initial;
  std::vector<RecommendationEntry> presented;
  std::map<std::string, double> ratings;
  Timestamp created = 0;
  Timestamp rated = 0;
};

inline nlohmann::json to_json(const SessionRecord& s) {
  nlohmann::json presented = nlohmann::json::array();
  for (const auto& e : s.presented) presented.push_back(to_json(e));
  return {{"user", s.user},         {"stage", std::string(to_string(s.stage))},
          {"presented", presented}, {"ratings", s.ratings},
          {"created", s.created},    {"rated", s.rated}};
}

struct HttpResponse {
  int status = 200;
  nlohmann::json body;
};

struct ServiceConfig {
  std::size_t default_n = 10;
  std::optional<std::filesystem::path> weights_path;  // rewritten after each change
};

inline int status_for(ErrorCode code) {
  switch (code) {
    case ErrorCode::UnknownUser: return 404;
    case ErrorCode::OutOfOrderFeedback: return 409;
    case ErrorCode::MalformedRecord:
    case ErrorCode::InvalidImportance:
    case ErrorCode::NoRelation:
    case ErrorCode::InsufficientCandidates:
    case ErrorCode::InvalidConfig: return 422;
    default: return 500;
  }
}

// Request handling independent of the transport; `bind` wires it to an HTTP
// server. The network is never modified: only weights, histories and sessions.
class Service {
 public:
  Service(std::shared_ptr<RecommenderEngine> engine, ServiceConfig cfg = {})
      : engine_(std::move(engine)), cfg_(std::move(cfg)) {}

  RecommenderEngine& engine() { return *engine_; }

  HttpResponse handle(const std::string& method, const std::string& path,
                      const std::map<std::string, std::string>& query = {},
                      const std::string& body = {}) {
    try {
      return route(method, split_path(path), query, body);
    } catch (const Error& e) {
      return error(status_for(e.code()), std::string(to_string(e.code())), e.what());
    } catch (const nlohmann::json::exception& e) {
      return error(422, "MalformedRecord", e.what());
    } catch (const std::invalid_argument& e) {
      return error(422, "MalformedRecord", e.what());
    }
  }

  void bind(httplib::Server& server) {
    auto forward = [this](const httplib::Request& req, httplib::Response& res) {
      std::map<std::string, std::string> query;
      for (const auto& [k, v] : req.params) query[k] = v;
      HttpResponse r = handle(req.method, req.path, query, req.body);
      res.status = r.status;
      res.set_content(r.body.dump(), "application/json");
    };
    server.Get(".*", forward);
    server.Post(".*", forward);
  }

 private:
  static std::vector<std::string> split_path(const std::string& path) {
    std::vector<std::string> parts;
    std::string cur;
    for (char c : path) {
      if (c == '/') {
        if (!cur.empty()) parts.push_back(httplib::detail::decode_url(cur, false));
        cur.clear();
      } else {
        cur += c;
      }
    }
    if (!cur.empty()) parts.push_back(httplib::detail::decode_url(cur, false));
    return parts;
  }

  static HttpResponse error(int status, const std::string& code, const std::string& reason) {
    return {status, {{"error", code}, {"reason", reason}}};
  }

  std::size_t list_length(const std::map<std::string, std::string>& query) const {
    auto it = query.find("n");
    if (it == query.end()) return cfg_.default_n;
    const long n = std::stol(it->second);
    if (n <= 0) throw Error(ErrorCode::InvalidConfig, "n must be positive");
    return static_cast<std::size_t>(n);
  }

  Timestamp now() {
    std::lock_guard lock(clock_mutex_);
    clock_ = std::max<Timestamp>(clock_, static_cast<Timestamp>(std::time(nullptr)));
    return clock_;
  }

  HttpResponse route(const std::string& method, const std::vector<std::string>& p,
                     const std::map<std::string, std::string>& query, const std::string& body) {
    const Network& msn = engine_->network();
    if (method == "GET" && p.size() == 2 && p[0] == "recommendations") {
      msn.require_member(p[1]);
      return {200, to_json(engine_->recommend(p[1], list_length(query)))};
    }
    if (method == "POST" && p.size() == 1 && p[0] == "feedback") {
      FeedbackEvent fb = feedback_from_json(nlohmann::json::parse(body));
      msn.require_member(fb.user);
      msn.require_member(fb.target);
      engine_->submit(fb);
      persist();
      return {200, {{"user", fb.user}, {"weights", layer_object(engine_->weights().personal_for(fb.user))}}};
    }
    if (method == "GET" && p.size() == 2 && p[0] == "layers") return {200, neighbors_document(msn, p[1])};
    if (method == "GET" && p.size() == 2 && p[0] == "weights") {
      msn.require_member(p[1]);
      const WeightState w = engine_->weights();
      return {200, {{"user", p[1]}, {"personal", layer_object(w.personal_for(p[1]))},
                    {"system", layer_object(w.system)}}};
    }
    if (method == "GET" && p.size() == 1 && p[0] == "stats") return {200, stats_document(msn)};
    if (method == "GET" && p.size() == 1 && p[0] == "compare") {
      nlohmann::json rows = nlohmann::json::array();
      for (const auto& r : compare_all_layers(msn)) rows.push_back(to_json(r));
      return {200, rows};
    }
    if (method == "GET" && p.size() == 2 && p[0] == "session") return get_session(p[1], list_length(query));
    if (method == "POST" && p.size() == 3 && p[0] == "session" && p[2] == "ratings")
      return post_ratings(p[1], nlohmann::json::parse(body));
    return error(404, "NotFound", "no route for " + method + " /" + (p.empty() ? "" : p[0]));
  }

  struct SessionPair {
    SessionRecord initial;
    std::optional<SessionRecord> adapted;
  };

  static nlohmann::json session_document(const SessionPair& s) {
    const SessionRecord& current = s.adapted ? *s.adapted : s.initial;
    nlohmann::json j = to_json(current);
    j["initial"] = to_json(s.initial);
    return j;
  }

  HttpResponse get_session(const std::string& user, std::size_t n) {
    engine_->network().require_member(user);
    std::lock_guard lock(session_mutex_);
    auto it = sessions_.find(user);
    if (it == sessions_.end()) {
      SessionPair s;
      s.initial.user = user;
      s.initial.stage = SessionStage::Initial;
      s.initial.presented = engine_->peek(user, n, 0).entries;
      s.initial.created = now();
      it = sessions_.emplace(user, std::move(s)).first;
    }
    return {200, session_document(it->second)};
  }

  HttpResponse post_ratings(const std::string& user, const nlohmann::json& doc) {
    engine_->network().require_member(user);
    std::lock_guard lock(session_mutex_);
    auto it = sessions_.find(user);
    if (it == sessions_.end())
      return error(409, "NoSession", "request GET /session/" + user + " first");
    SessionPair& s = it->second;
    SessionRecord& current = s.adapted ? *s.adapted : s.initial;
    if (!current.ratings.empty())
      return error(409, "AlreadyRated", "current stage already rated");

    std::map<std::string, double> ratings;
    std::set<std::string> presented;
    for (const auto& e : current.presented) presented.insert(e.candidate);
    for (const auto& [cand, value] : doc.at("ratings").items()) {
      if (!presented.count(cand))
        return error(422, "NotPresented", "candidate '" + cand + "' was not presented");
      const double r = value.get<double>();
      if (!(r >= 0.0 && r <= 1.0))
        return error(422, "InvalidImportance", "rating for '" + cand + "' outside [0, 1]");
      ratings[cand] = r;
    }

    const LayerVector before = engine_->weights().personal_for(user);
    const Timestamp t = now();
    for (const auto& [cand, r] : ratings)
      engine_->submit({user, cand, FeedbackActivity::ExplicitRating, r, t});
    if (engine_->options().mode == FeedbackMode::Batched) engine_->flush();
    persist();
    current.ratings = ratings;
    current.rated = t;
    const LayerVector after = engine_->weights().personal_for(user);

    if (!s.adapted) {
      std::set<std::string> exclude = presented;
      SessionRecord next;
      next.user = user;
      next.stage = SessionStage::PostAdaptation;
      next.presented = engine_->peek(user, s.initial.presented.size(), 0, exclude).entries;
      next.created = t;
      s.adapted = std::move(next);
    }
    nlohmann::json j = session_document(s);
    j["weights_before"] = layer_object(before);
    j["weights_after"] = layer_object(after);
    return {200, j};
  }

  void persist() {
    if (cfg_.weights_path) write_file(*cfg_.weights_path, to_json(engine_->weights()).dump(2));
  }

  std::shared_ptr<RecommenderEngine> engine_;
  ServiceConfig cfg_;
  std::mutex session_mutex_;
  std::map<std::string, SessionPair> sessions_;
  std::mutex clock_mutex_;
  Timestamp clock_ = 0;
};

}  // namespace msn
