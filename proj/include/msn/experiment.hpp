#pragma once

#include <algorithm>
#include <random>
#include <set>
#include <string>
#include <vector>

#include <json.hpp>

#include "msn/layers.hpp"
#include "msn/network.hpp"
#include "msn/recommender.hpp"
#include "msn/synthetic.hpp"

namespace msn {

// A simulated rater: its rating of a candidate is the preference-weighted sum
// of that candidate's layer contributions, plus optional Gaussian noise,
// clipped to [0, 1].
struct RaterProfile {
  std::string user;
  LayerVector preference{};
  double noise = 0.0;
};

inline double simulated_rating(const RaterProfile& rater, const LayerVector& contributions,
                               std::mt19937_64& rng) {
  double r = 0.0;
  for (std::size_t k = 0; k < kLayerCount; ++k) r += rater.preference[k] * contributions[k];
  if (rater.noise > 0.0) r += std::normal_distribution<double>(0.0, rater.noise)(rng);
  return std::clamp(r, 0.0, 1.0);
}

struct ExperimentOptions {
  std::size_t n = 10;
  std::uint64_t seed = 0;
  double epsilon = 1e-6;
  std::size_t pool_factor = 5;
  Normalization normalization = Normalization::PairMax;
};

struct StageResult {
  std::vector<RecommendationEntry> presented;
  std::vector<double> ratings;
  double mean_rating = 0.0;
};

struct RaterReport {
  std::string user;
  StageResult initial;
  StageResult adapted;
  LayerVector weights_before{};
  LayerVector weights_after{};
  std::vector<LayerVector> trajectory;  // personal weights after each rating
};

struct ExperimentReport {
  std::size_t profiles = 0;
  std::vector<RaterReport> raters;
  double mean_initial = 0.0;
  double mean_adapted = 0.0;
  LayerVector avg_weights_before{};
  LayerVector avg_weights_after{};
};

// Candidates a rater could ever be shown: tie neighbours not already contacts.
inline std::size_t eligible_candidates(const Network& msn, UserIndex u) {
  const RelationLayer& contacts = msn.layer(LayerKind::C);
  std::size_t n = 0;
  for (const auto& t : msn.out_ties(u))
    if (!contacts.contains(u, t.dst)) ++n;
  return n;
}

// Two-stage protocol: rate a list ranked with uniform personal weights, adapt
// the weights from those ratings, then rate a second list that excludes every
// candidate of the first.
inline ExperimentReport run_experiment(const Network& msn, const std::vector<RaterProfile>& raters,
                                       const ExperimentOptions& opt) {
  ExperimentReport report;
  report.profiles = msn.user_count();
  if (raters.empty()) throw Error(ErrorCode::NoUsers, "experiment needs at least one rater");

  double sum_initial = 0.0, sum_adapted = 0.0;
  std::size_t count_initial = 0, count_adapted = 0;
  for (std::size_t ri = 0; ri < raters.size(); ++ri) {
    const RaterProfile& rater = raters[ri];
    const UserIndex u = msn.require_member(rater.user);
    if (eligible_candidates(msn, u) < 2 * opt.n)
      throw Error(ErrorCode::InsufficientCandidates,
                  "rater '" + rater.user + "' has fewer than 2n candidates");
    std::mt19937_64 rng(opt.seed * 0x9E3779B97F4A7C15ull + ri);

    WeightState w;
    w.epsilon = opt.epsilon;
    w.personal[rater.user] = uniform_layer_vector();

    RankOptions rank_opt;
    rank_opt.n = opt.n;
    rank_opt.pool_factor = opt.pool_factor;
    rank_opt.normalization = opt.normalization;

    RaterReport rr;
    rr.user = rater.user;
    rr.weights_before = w.personal[rater.user];

    auto rate_stage = [&](StageResult& stage, bool adapt) {
      RecommendationList list = rank(msn, rater.user, w, {}, rank_opt);
      stage.presented = list.entries;
      double sum = 0.0;
      for (const auto& e : list.entries) {
        const double r = simulated_rating(rater, e.layer_contributions, rng);
        stage.ratings.push_back(r);
        sum += r;
        if (adapt) {
          w = adapt_weights(std::move(w),
                            {rater.user, e.candidate, FeedbackActivity::ExplicitRating, r, 0}, msn);
          rr.trajectory.push_back(w.personal[rater.user]);
        }
      }
      if (!list.entries.empty()) stage.mean_rating = sum / static_cast<double>(list.entries.size());
    };

    rate_stage(rr.initial, true);
    rr.weights_after = w.personal[rater.user];
    for (const auto& e : rr.initial.presented) rank_opt.exclude.insert(e.candidate);
    rate_stage(rr.adapted, false);

    for (double r : rr.initial.ratings) sum_initial += r;
    for (double r : rr.adapted.ratings) sum_adapted += r;
    count_initial += rr.initial.ratings.size();
    count_adapted += rr.adapted.ratings.size();
    for (std::size_t k = 0; k < kLayerCount; ++k) {
      report.avg_weights_before[k] += rr.weights_before[k] / static_cast<double>(raters.size());
      report.avg_weights_after[k] += rr.weights_after[k] / static_cast<double>(raters.size());
    }
    report.raters.push_back(std::move(rr));
  }
  if (count_initial) report.mean_initial = sum_initial / static_cast<double>(count_initial);
  if (count_adapted) report.mean_adapted = sum_adapted / static_cast<double>(count_adapted);
  return report;
}

// A whole simulated run: generate a community, build its network, pick raters
// with enough candidates and give them all the same layer preference.
struct SimulationProfile {
  SyntheticWorld world;
  std::size_t raters = 8;
  std::size_t n = 5;
  LayerVector preference = uniform_layer_vector();
  double noise = 0.0;
  double epsilon = 1e-6;
};

inline LayerVector biased_preference(LayerKind layer, double bias, double background) {
  LayerVector p;
  p.fill(background);
  p[index_of(layer)] = bias;
  return p;
}

// Reads {"world": {...}, "raters", "n", "noise", "epsilon", and either
// "preference": [11 values] or "bias_layer" with optional "bias"/"background"}.
inline SimulationProfile simulation_profile_from_json(const nlohmann::json& j) {
  SimulationProfile p;
  try {
    if (j.contains("world")) j.at("world").get_to(p.world);
    p.raters = j.value("raters", p.raters);
    p.n = j.value("n", p.n);
    p.noise = j.value("noise", p.noise);
    p.epsilon = j.value("epsilon", p.epsilon);
    if (j.contains("preference")) {
      p.preference = j.at("preference").get<LayerVector>();
    } else if (j.contains("bias_layer")) {
      auto k = parse_layer_kind(j.at("bias_layer").get<std::string>());
      if (!k) throw Error(ErrorCode::InvalidConfig, "unknown bias_layer");
      p.preference = biased_preference(*k, j.value("bias", 1.0), j.value("background", 0.0));
    }
  } catch (const nlohmann::json::exception& ex) {
    throw Error(ErrorCode::InvalidConfig, std::string("invalid simulation profile: ") + ex.what());
  }
  return p;
}

inline Network build_network(const std::vector<ActivityEvent>& events, Timestamp cutoff,
                             const AggregationConfig& cfg = {}) {
  return aggregate(build_all_layers(build_store(events, cutoff)), cfg);
}

inline ExperimentReport simulate(const SimulationProfile& profile, std::uint64_t seed) {
  const auto events = generate_events(profile.world, seed);
  const Network msn = build_network(events, profile.world.start + profile.world.span);

  std::vector<UserIndex> pool;
  for (UserIndex u : msn.users())
    if (eligible_candidates(msn, u) >= 2 * profile.n) pool.push_back(u);
  std::mt19937_64 rng(seed);
  std::shuffle(pool.begin(), pool.end(), rng);
  if (pool.size() < profile.raters)
    throw Error(ErrorCode::InsufficientCandidates, "not enough users with 2n candidates");

  std::vector<RaterProfile> raters;
  for (std::size_t i = 0; i < profile.raters; ++i)
    raters.push_back({msn.name(pool[i]), profile.preference, profile.noise});
  std::sort(raters.begin(), raters.end(),
            [](const RaterProfile& a, const RaterProfile& b) { return a.user < b.user; });

  ExperimentOptions opt;
  opt.n = profile.n;
  opt.seed = seed;
  opt.epsilon = profile.epsilon;
  return run_experiment(msn, raters, opt);
}

inline nlohmann::json to_json(const ExperimentReport& r) {
  using nlohmann::json;
  json raters = json::array();
  for (const auto& rr : r.raters) {
    auto stage = [](const StageResult& s) {
      json presented = json::array();
      for (const auto& e : s.presented) presented.push_back(to_json(e));
      return json{{"presented", presented}, {"ratings", s.ratings}, {"mean_rating", s.mean_rating}};
    };
    raters.push_back({{"user", rr.user},
                      {"initial", stage(rr.initial)},
                      {"adapted", stage(rr.adapted)},
                      {"weights_before", rr.weights_before},
                      {"weights_after", rr.weights_after},
                      {"trajectory", rr.trajectory}});
  }
  return {{"profiles", r.profiles},
          {"volunteers", r.raters.size()},
          {"mean_initial", r.mean_initial},
          {"mean_adapted", r.mean_adapted},
          {"avg_weights_before", r.avg_weights_before},
          {"avg_weights_after", r.avg_weights_after},
          {"raters", raters}};
}

}  // namespace msn
