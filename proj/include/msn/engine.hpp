#pragma once

#include <algorithm>
#include <map>
#include <memory>
#include <mutex>
#include <set>
#include <string>
#include <vector>

#include "msn/recommender.hpp"

namespace msn {

enum class FeedbackMode { Immediate, Batched };

struct EngineOptions {
  FeedbackMode mode = FeedbackMode::Immediate;
  double view_penalty = 0.8;
  std::size_t pool_factor = 5;
  Normalization normalization = Normalization::PairMax;
};

// Serves recommendations over an immutable network and owns everything that
// changes: weights, per-user history, rotation offsets and pending feedback.
// All mutation goes through one lock, so feedback of a user applies in
// timestamp order.
class RecommenderEngine {
 public:
  RecommenderEngine(std::shared_ptr<const Network> msn, WeightState weights,
                    EngineOptions options = {})
      : msn_(std::move(msn)), weights_(std::move(weights)), options_(options) {}

  const Network& network() const { return *msn_; }
  const EngineOptions& options() const { return options_; }

  WeightState weights() const {
    std::lock_guard lock(mutex_);
    return weights_;
  }

  History history(const std::string& user) const {
    std::lock_guard lock(mutex_);
    auto it = histories_.find(user);
    return it == histories_.end() ? History{} : it->second;
  }

  std::size_t rotation_offset(const std::string& user) const {
    std::lock_guard lock(mutex_);
    auto it = offsets_.find(user);
    return it == offsets_.end() ? 0 : it->second;
  }

  // Next list for `user`; advances its rotation offset and presentation counts.
  RecommendationList recommend(const std::string& user, std::size_t n,
                               const std::set<std::string>& exclude = {}) {
    std::lock_guard lock(mutex_);
    RankOptions opt = rank_options(n);
    opt.rotation_offset = offsets_[user];
    opt.exclude = exclude;
    RecommendationList list = rank(*msn_, user, weights_, histories_[user], opt);
    offsets_[user] = list.next_offset;
    History& h = histories_[user];
    for (const auto& e : list.entries) {
      RecommendationEntry& seen = h[e.candidate];
      seen.candidate = e.candidate;
      seen.value = e.value;
      seen.layer_contributions = e.layer_contributions;
      ++seen.presented_count;
    }
    return list;
  }

  // Same ranking without touching any state.
  RecommendationList peek(const std::string& user, std::size_t n, std::size_t offset,
                          const std::set<std::string>& exclude = {}) const {
    std::lock_guard lock(mutex_);
    RankOptions opt = rank_options(n);
    opt.rotation_offset = offset;
    opt.exclude = exclude;
    auto it = histories_.find(user);
    return rank(*msn_, user, weights_, it == histories_.end() ? History{} : it->second, opt);
  }

  void block(const std::string& user, const std::string& target) {
    msn_->require_member(user);
    std::lock_guard lock(mutex_);
    RecommendationEntry& e = histories_[user][target];
    e.candidate = target;
    e.state = CandidateState::Blocked;
  }

  // Validates the event and applies it (or queues it in batched mode).
  // Immediate mode rejects events older than the user's last applied one.
  void submit(const FeedbackEvent& fb) {
    std::lock_guard lock(mutex_);
    validate(fb);
    if (options_.mode == FeedbackMode::Batched) {
      pending_.push_back({fb, sequence_++});
      return;
    }
    if (auto it = last_applied_.find(fb.user); it != last_applied_.end() && fb.timestamp < it->second)
      throw Error(ErrorCode::OutOfOrderFeedback,
                  "feedback for '" + fb.user + "' older than last applied event");
    apply(fb);
  }

  // Applies queued feedback per user in timestamp order; returns the count.
  std::size_t flush() {
    std::lock_guard lock(mutex_);
    std::stable_sort(pending_.begin(), pending_.end(), [](const Pending& a, const Pending& b) {
      if (a.event.user != b.event.user) return a.event.user < b.event.user;
      if (a.event.timestamp != b.event.timestamp) return a.event.timestamp < b.event.timestamp;
      return a.sequence < b.sequence;
    });
    for (const auto& p : pending_) apply(p.event);
    const std::size_t n = pending_.size();
    pending_.clear();
    return n;
  }

  void refresh_system() {
    std::lock_guard lock(mutex_);
    weights_ = refresh_system_weights(std::move(weights_));
  }

 private:
  struct Pending {
    FeedbackEvent event;
    std::size_t sequence;
  };

  RankOptions rank_options(std::size_t n) const {
    RankOptions opt;
    opt.n = n;
    opt.view_penalty = options_.view_penalty;
    opt.pool_factor = options_.pool_factor;
    opt.normalization = options_.normalization;
    return opt;
  }

  void validate(const FeedbackEvent& fb) const {
    const double a = feedback_importance(weights_, fb);
    if (!(a >= 0.0 && a <= 1.0))
      throw Error(ErrorCode::InvalidImportance, "activity importance must lie in [0, 1]");
    contribution(*msn_, fb.user, fb.target);
  }

  void apply(const FeedbackEvent& fb) {
    weights_ = adapt_weights(std::move(weights_), fb, *msn_);
    auto& last = last_applied_[fb.user];
    last = std::max(last, fb.timestamp);
    RecommendationEntry& e = histories_[fb.user][fb.target];
    e.candidate = fb.target;
    if (fb.activity == FeedbackActivity::AddContact)
      e.state = CandidateState::Contacted;
    else if (fb.activity != FeedbackActivity::ExplicitRating && e.state == CandidateState::Fresh)
      e.state = CandidateState::Viewed;
  }

  std::shared_ptr<const Network> msn_;
  WeightState weights_;
  EngineOptions options_;
  mutable std::mutex mutex_;
  std::map<std::string, History> histories_;
  std::map<std::string, std::size_t> offsets_;
  std::map<std::string, Timestamp> last_applied_;
  std::vector<Pending> pending_;
  std::size_t sequence_ = 0;
};

}  // namespace msn
