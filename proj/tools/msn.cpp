// Command-line front end: msn ingest|extract|aggregate|stats|compare|recommend|
// feedback|simulate|serve

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <httplib.h>
#include <json.hpp>

#include "msn/activity_store.hpp"
#include "msn/analytics.hpp"
#include "msn/engine.hpp"
#include "msn/experiment.hpp"
#include "msn/io.hpp"
#include "msn/layers.hpp"
#include "msn/report.hpp"
#include "msn/service.hpp"

namespace fs = std::filesystem;
using namespace msn;

namespace {

// Relative paths resolve against MSN_DATA_DIR when it is set.
fs::path data_path(const std::string& p) {
  fs::path path(p);
  if (path.is_absolute()) return path;
  if (const char* root = std::getenv("MSN_DATA_DIR")) return fs::path(root) / path;
  return path;
}

Network load_network(const std::string& p) {
  std::ifstream in(data_path(p));
  if (!in) throw Error(ErrorCode::Io, "cannot read " + data_path(p).string());
  return read_network(in);
}

WeightState load_weights_or_default(const fs::path& p) {
  if (!fs::exists(p)) return WeightState{};
  return weights_from_json(nlohmann::json::parse(read_file(p)));
}

LayerVector parse_vector(const std::string& csv) {
  auto f = split(csv, ',');
  if (f.size() != kLayerCount) throw Error(ErrorCode::InvalidConfig, "expected 11 comma-separated values");
  LayerVector v;
  for (std::size_t k = 0; k < kLayerCount; ++k) v[k] = parse_strength(f[k]);
  return v;
}

std::vector<LayerKind> parse_layer_list(const std::string& text) {
  if (text == "all") return {kAllLayers.begin(), kAllLayers.end()};
  std::vector<LayerKind> out;
  for (const auto& name : split(text, ',')) {
    auto k = parse_layer_kind(name);
    if (!k) throw Error(ErrorCode::InvalidConfig, "unknown layer '" + name + "'");
    out.push_back(*k);
  }
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Multidimensional social network extraction, analytics and people recommendation"};
  app.require_subcommand(1);

  std::string log_path, cutoff_text, out_path;
  auto* ingest = app.add_subcommand("ingest", "Parse an activity log into a store snapshot");
  ingest->add_option("--log", log_path, "Line-delimited event log")->required();
  ingest->add_option("--cutoff", cutoff_text, "Snapshot time (ISO 8601 or epoch seconds)")->required();
  ingest->add_option("--out", out_path, "Store output path")->required();

  std::string store_path, layer_arg = "all", decay_arg, out_dir;
  auto* extract = app.add_subcommand("extract", "Derive relation layers from a store");
  extract->add_option("--store", store_path)->required();
  extract->add_option("--layers", layer_arg, "all or a comma list such as c,rc,t");
  extract->add_option("--decay", decay_arg, "lambda,period_seconds");
  extract->add_option("--out", out_dir, "Output directory")->required();

  std::string layers_dir, alpha_arg;
  auto* aggregate_cmd = app.add_subcommand("aggregate", "Aggregate layer dumps into a network");
  aggregate_cmd->add_option("--layers", layers_dir, "Directory of layer dumps")->required();
  aggregate_cmd->add_option("--alpha", alpha_arg, "11 layer coefficients");
  aggregate_cmd->add_option("--out", out_path)->required();

  std::string msn_path, format = "csv";
  auto* stats = app.add_subcommand("stats", "Per-layer statistics");
  stats->add_option("--msn", msn_path)->required();
  stats->add_option("--format", format)->check(CLI::IsMember({"csv", "json"}));

  std::string pairs = "all";
  auto* compare = app.add_subcommand("compare", "Similarity of every layer pair");
  compare->add_option("--msn", msn_path)->required();
  compare->add_option("--pairs", pairs)->check(CLI::IsMember({"all"}));
  compare->add_option("--format", format)->check(CLI::IsMember({"csv", "json"}));

  std::string weights_path, user;
  std::size_t n = 10, offset = 0;
  bool layer_max = false;
  auto* recommend = app.add_subcommand("recommend", "Ranked people recommendations for one user");
  recommend->add_option("--msn", msn_path)->required();
  recommend->add_option("--weights", weights_path, "Weight document (defaults used if missing)")->required();
  recommend->add_option("--user", user)->required();
  recommend->add_option("-n", n);
  recommend->add_option("--offset", offset, "Rotation offset");
  recommend->add_flag("--layer-max", layer_max, "Normalize by per-layer maxima");

  std::string event_text;
  auto* feedback = app.add_subcommand("feedback", "Apply one feedback event to the weights");
  feedback->add_option("--msn", msn_path)->required();
  feedback->add_option("--weights", weights_path)->required();
  feedback->add_option("--event", event_text, "Feedback record (JSON)")->required();
  bool refresh = false;
  feedback->add_flag("--refresh-system", refresh, "Recompute system weights afterwards");

  std::string profile_path;
  std::size_t rounds = 1;
  std::uint64_t seed = 1;
  auto* simulate_cmd = app.add_subcommand("simulate", "Run the two-stage rating experiment on synthetic data");
  simulate_cmd->add_option("--profile", profile_path, "Simulation profile (JSON)")->required();
  simulate_cmd->add_option("--rounds", rounds, "Number of seeds");
  simulate_cmd->add_option("--seed", seed, "First seed");

  std::string host = "127.0.0.1";
  int port = 8080;
  bool batch = false;
  auto* serve = app.add_subcommand("serve", "HTTP service");
  serve->add_option("--msn", msn_path)->required();
  serve->add_option("--weights", weights_path);
  serve->add_option("--host", host);
  serve->add_option("--port", port);
  serve->add_flag("--batch", batch, "Queue feedback and apply it on rating submission");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*ingest) {
      std::ifstream in(data_path(log_path));
      if (!in) throw Error(ErrorCode::Io, "cannot read " + log_path);
      auto cutoff = parse_timestamp(cutoff_text);
      if (!cutoff) throw Error(ErrorCode::InvalidConfig, "bad cutoff '" + cutoff_text + "'");
      ActivityStore store = build_store(parse_events(in), *cutoff);
      write_file(data_path(out_path), to_json(store).dump());
      std::cout << "users " << store.users.size() << " objects " << store.photo_authors.size() << '\n';
    } else if (*extract) {
      ActivityStore store = store_from_json(nlohmann::json::parse(read_file(data_path(store_path))));
      DecayConfig decay;
      if (!decay_arg.empty()) {
        auto f = split(decay_arg, ',');
        if (f.size() != 2) throw Error(ErrorCode::InvalidConfig, "--decay expects lambda,period");
        decay.enabled = true;
        decay.lambda = parse_strength(f[0]);
        decay.period_seconds = std::stoll(f[1]);
        decay.reference_time = store.cutoff;
      }
      LayerSet set = build_all_layers(store, decay);
      fs::create_directories(data_path(out_dir));
      for (LayerKind k : parse_layer_list(layer_arg)) {
        std::ostringstream ss;
        write_layer(ss, set[k], set.users);
        write_file(data_path(out_dir) / (std::string(to_string(k)) + ".layer"), ss.str());
        std::cout << to_string(k) << ' ' << set[k].size() << '\n';
      }
    } else if (*aggregate_cmd) {
      std::vector<NamedLayer> named;
      for (const auto& entry : fs::directory_iterator(data_path(layers_dir))) {
        if (entry.path().extension() != ".layer") continue;
        std::ifstream in(entry.path());
        named.push_back(read_layer(in));
      }
      AggregationConfig cfg;
      if (!alpha_arg.empty()) cfg.alpha = parse_vector(alpha_arg);
      Network msn = aggregate(layers_from_named(named), cfg);
      const std::string text = network_to_string(msn);
      write_file(data_path(out_path), text);
      if (const char* root = std::getenv("MSN_DATA_DIR"))
        save_snapshot(fs::path(root) / "snapshots", text, ".msn");
      std::cout << "users " << msn.user_count() << " ties " << msn.ties().size() << '\n';
    } else if (*stats) {
      Network msn = load_network(msn_path);
      if (format == "json")
        std::cout << stats_document(msn).dump(2) << '\n';
      else
        write_stats_csv(std::cout, all_layer_stats(msn));
    } else if (*compare) {
      Network msn = load_network(msn_path);
      auto rows = compare_all_layers(msn);
      if (format == "json") {
        nlohmann::json j = nlohmann::json::array();
        for (const auto& r : rows) j.push_back(to_json(r));
        std::cout << j.dump(2) << '\n';
      } else {
        write_compare_csv(std::cout, rows);
      }
    } else if (*recommend) {
      Network msn = load_network(msn_path);
      WeightState w = load_weights_or_default(data_path(weights_path));
      RankOptions opt;
      opt.n = n;
      opt.rotation_offset = offset;
      opt.normalization = layer_max ? Normalization::LayerMax : Normalization::PairMax;
      std::cout << to_json(rank(msn, user, w, {}, opt)).dump(2) << '\n';
    } else if (*feedback) {
      Network msn = load_network(msn_path);
      const fs::path wp = data_path(weights_path);
      WeightState w = load_weights_or_default(wp);
      w = adapt_weights(std::move(w), feedback_from_json(nlohmann::json::parse(event_text)), msn);
      if (refresh) w = refresh_system_weights(std::move(w));
      write_file(wp, to_json(w).dump(2));
    } else if (*simulate_cmd) {
      SimulationProfile profile =
          simulation_profile_from_json(nlohmann::json::parse(read_file(data_path(profile_path))));
      nlohmann::json runs = nlohmann::json::array();
      std::size_t improved = 0;
      for (std::size_t r = 0; r < rounds; ++r) {
        ExperimentReport report = simulate(profile, seed + r);
        if (report.mean_adapted >= report.mean_initial) ++improved;
        nlohmann::json j = to_json(report);
        j["seed"] = seed + r;
        runs.push_back(std::move(j));
      }
      std::cout << nlohmann::json{{"rounds", rounds}, {"improved_rounds", improved}, {"runs", runs}}.dump(2)
                << '\n';
    } else if (*serve) {
      auto msn = std::make_shared<const Network>(load_network(msn_path));
      ServiceConfig cfg;
      WeightState w;
      if (!weights_path.empty()) {
        cfg.weights_path = data_path(weights_path);
        w = load_weights_or_default(*cfg.weights_path);
      }
      EngineOptions opt;
      opt.mode = batch ? FeedbackMode::Batched : FeedbackMode::Immediate;
      Service service(std::make_shared<RecommenderEngine>(msn, std::move(w), opt), cfg);
      httplib::Server server;
      service.bind(server);
      std::cout << "listening on " << host << ':' << port << std::endl;
      if (!server.listen(host, port)) throw Error(ErrorCode::Io, "cannot bind " + host);
    }
  } catch (const Error& e) {
    std::cerr << "error [" << to_string(e.code()) << "]: " << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
