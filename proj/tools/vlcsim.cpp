// vlcsim: runs one experiment per subcommand and writes tidy CSV plus a run manifest.
//
//   vlcsim sweep-divergence --preset fig3b --out out/fig3b
//   vlcsim protocol-sim --config my.json --seed 7 --out out/proto

#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "vlc/vlc.hpp"

namespace fs = std::filesystem;
using vlc::json;

namespace {

struct Options {
  std::string preset;
  std::string config;
  std::optional<std::uint64_t> seed;
  std::optional<unsigned> threads;
  std::string out = "out";
};

/// Files written by one run; all of them are deleted if the run fails.
class Outputs {
 public:
  explicit Outputs(fs::path dir) : dir_(std::move(dir)) {}

  std::ofstream open(const std::string& name) {
    fs::create_directories(dir_);
    const fs::path p = dir_ / name;
    written_.push_back(p);
    std::ofstream f(p, std::ios::binary);
    if (!f) throw std::runtime_error("cannot write " + p.string());
    return f;
  }

  void write_json(const std::string& name, const json& j) { open(name) << j.dump(2) << '\n'; }

  std::vector<std::string> names() const {
    std::vector<std::string> v;
    for (const auto& p : written_) v.push_back(p.filename().string());
    return v;
  }

  void discard() {
    std::error_code ec;
    for (const auto& p : written_) fs::remove(p, ec);
  }

 private:
  fs::path dir_;
  std::vector<fs::path> written_;
};

json load_document(const Options& opt) {
  json doc = json::object();
  if (!opt.preset.empty()) doc = vlc::preset_json(opt.preset);
  if (!opt.config.empty()) doc.merge_patch(vlc::read_json_file(opt.config));
  if (opt.preset.empty() && opt.config.empty())
    throw vlc::ConfigError("<cli>", "one of --preset or --config is required");
  if (opt.seed) doc["seed"] = *opt.seed;
  if (opt.threads) doc["threads"] = *opt.threads;
  return doc;
}

json rows_json(const std::vector<vlc::SweepRow>& rows, const char* x) {
  json a = json::array();
  for (const auto& r : rows) a.push_back({{x, r.x}, {"mean_sir_db", r.mean_sir_db}});
  return a;
}

json result_json(const vlc::OptimResult& r) {
  json j = {{"feasible", r.feasible}, {"feasible_count", r.feasible_count}};
  if (!r.message.empty()) j["message"] = r.message;
  if (r.feasible) {
    j["boards_per_layer"] = r.boards_per_layer;
    j["divergence_deg"] = r.divergence_deg;
    j["total_boards"] = r.best_design.total_boards();
    j["best_sir_db"] = std::isfinite(r.best_sir_db) ? json(r.best_sir_db) : json(nullptr);
    j["best_objective"] = std::isfinite(r.best_objective) ? json(r.best_objective) : json(nullptr);
    j["illum_std"] = r.illum_std;
    j["illum_variance"] = r.illum_variance;
  }
  return j;
}

using Runner = std::function<json(const vlc::ScenarioConfig&, Outputs&)>;

json cmd_sweep_room(const vlc::ScenarioConfig& cfg, Outputs& out) {
  const auto rows = vlc::run_room_sweep(cfg);
  auto f = out.open("sweep_room.csv");
  vlc::write_sweep_csv(f, "floor_dim_m", rows);
  return {{"rows", rows_json(rows, "floor_dim_m")}};
}

json cmd_sweep_divergence(const vlc::ScenarioConfig& cfg, Outputs& out) {
  const auto rows = vlc::run_divergence_sweep(cfg);
  auto f = out.open("sweep_divergence.csv");
  vlc::write_sweep_csv(f, "divergence_deg", rows);
  return {{"argmax_divergence_deg", rows[vlc::argmax_row(rows)].x}, {"rows", rows_json(rows, "divergence_deg")}};
}

json cmd_three_region(const vlc::ScenarioConfig& cfg, Outputs& out) {
  const auto cells = vlc::run_three_region(cfg);
  auto f = out.open("three_region.csv");
  vlc::write_three_region_csv(f, cells);
  json diag = json::array();
  for (const auto& c : vlc::diagonal(cells)) diag.push_back({{"d", c.d1}, {"mean_sir_db", c.mean_sir_db}});
  return {{"diagonal", diag}};
}

json cmd_optimize(const vlc::ScenarioConfig& cfg, Outputs& out) {
  const auto rows = vlc::run_optimize(cfg);
  auto f = out.open("frontier.csv");
  vlc::write_frontier_csv(f, rows);
  json frontier = json::array();
  for (const auto& r : rows)
    frontier.push_back({{"budget_w", r.budget},
                        {"without_illumination", result_json(r.unconstrained)},
                        {"with_illumination", result_json(r.constrained)}});
  const auto& space = cfg.optimizer;
  json ranges = json::array();
  for (const auto& r : space.boards_per_layer) ranges.push_back({{"min", r.min}, {"max", r.max}, {"step", r.step}});
  out.write_json("optimizer.json",
                 {{"space",
                   {{"boards_per_layer", ranges},
                    {"divergence", {{"min", space.divergence.min}, {"max", space.divergence.max}, {"step", space.divergence.step}}},
                    {"per_board_power", space.per_board_power},
                    {"budgets", space.budgets}}},
                  {"seed", cfg.require_seed()},
                  {"placements", cfg.placements},
                  {"frontier", frontier}});
  return {{"budgets", rows.size()}};
}

json cmd_sinr_cdf(const vlc::ScenarioConfig& cfg, Outputs& out) {
  json summary = json::array();
  for (const auto& layout : vlc::run_sinr_survey(cfg)) {
    json medians;
    for (auto s : {vlc::Scenario::S1, vlc::Scenario::S2, vlc::Scenario::S2Combined}) {
      const auto cdf = vlc::sinr_cdf(layout.samples, s);
      auto f = out.open("sinr_cdf_" + layout.name + "_" + vlc::scenario_name(s) + ".csv");
      vlc::write_cdf_csv(f, cdf);
      medians[vlc::scenario_name(s)] = cdf.median();
    }
    summary.push_back({{"layout", layout.name},
                       {"leds", layout.boards.size()},
                       {"points", layout.samples.size()},
                       {"median_db", medians},
                       {"combining_gain_db", medians["S2_combined"].get<double>() - medians["S2"].get<double>()}});
  }
  return {{"layouts", summary}};
}

json cmd_protocol_sim(const vlc::ScenarioConfig& cfg, Outputs& out) {
  const auto traces = vlc::protocol_traces(cfg);
  const auto result = vlc::run_protocol(cfg, traces);
  {
    auto f = out.open("mobility.csv");
    vlc::write_mobility_csv(f, traces);
  }
  {
    auto f = out.open("events.csv");
    vlc::write_event_log(f, result.log);
  }
  const auto stats = vlc::handover_stats(result.log);
  json table = json::object();
  for (const auto& [addr, e] : result.rat.entries)
    table[addr] = {{"state", vlc::state_name(e.state)}, {"best_board", e.best_board}, {"boards", e.boards}};
  return {{"rounds", result.rounds},
          {"handovers", stats.handovers},
          {"mean_association_latency_rounds", stats.mean_association_latency_rounds},
          {"repartitions", stats.repartitions},
          {"final_led_rat", table}};
}

int run(const std::string& command, const Runner& runner, const Options& opt) {
  Outputs out(opt.out);
  try {
    const json doc = load_document(opt);
    const vlc::ScenarioConfig cfg = vlc::parse_config(doc);
    json results = runner(cfg, out);
    json manifest = {{"command", command},
                     {"preset", opt.preset},
                     {"config_file", opt.config},
                     {"seed", cfg.seed ? json(*cfg.seed) : json(nullptr)},
                     {"threads", cfg.threads},
                     {"config", vlc::config_to_json(cfg)},
                     {"results", results}};
    manifest["outputs"] = out.names();
    out.write_json("manifest.json", manifest);
    return 0;
  } catch (const vlc::ConfigError& e) {
    out.discard();
    std::cerr << "config error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    out.discard();
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
}

void add_common(CLI::App* sub, Options& opt) {
  sub->add_option("--preset", opt.preset, "named preset (fig3a, fig3b, fig4, fig5, fig6, protocol)");
  sub->add_option("--config", opt.config, "JSON scenario file, merged over the preset")->check(CLI::ExistingFile);
  sub->add_option("--seed", opt.seed, "RNG seed (overrides the config)");
  sub->add_option("--out", opt.out, "output directory")->capture_default_str();
  sub->add_option("--threads", opt.threads, "worker threads, 0 = all cores");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Multi-element visible light communication simulator"};
  app.require_subcommand(1);
  Options opt;
  const std::vector<std::pair<std::string, Runner>> commands = {
      {"sweep-room", cmd_sweep_room},       {"sweep-divergence", cmd_sweep_divergence},
      {"three-region", cmd_three_region},   {"optimize", cmd_optimize},
      {"sinr-cdf", cmd_sinr_cdf},           {"protocol-sim", cmd_protocol_sim},
  };
  const std::vector<std::string> help = {
      "mean SIR versus square floor dimension", "power-averaged mean SIR versus divergence angle",
      "mean SIR versus both receivers' center distances", "optimum design versus power budget",
      "SINR distributions for flat cluster layouts", "association protocol simulation",
  };
  std::vector<CLI::App*> subs;
  for (std::size_t i = 0; i < commands.size(); ++i) {
    subs.push_back(app.add_subcommand(commands[i].first, help[i]));
    add_common(subs.back(), opt);
  }
  std::string show_name;
  auto* show = app.add_subcommand("show-preset", "print a preset document");
  show->add_option("name", show_name, "preset name")->required();

  CLI11_PARSE(app, argc, argv);

  if (show->parsed()) {
    try {
      std::cout << vlc::preset_json(show_name).dump(2) << '\n';
      return 0;
    } catch (const vlc::ConfigError& e) {
      std::cerr << "config error: " << e.what() << '\n';
      return 2;
    }
  }
  for (std::size_t i = 0; i < commands.size(); ++i)
    if (subs[i]->parsed()) return run(commands[i].first, commands[i].second, opt);
  return 1;
}
