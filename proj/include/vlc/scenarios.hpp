// Experiment runners shared by the command-line tool and the acceptance suite.
#pragma once

#include <fstream>
#include <string>
#include <vector>

#include "vlc/config.hpp"
#include "vlc/metrics.hpp"
#include "vlc/optimizer.hpp"
#include "vlc/protocol.hpp"

namespace vlc {

inline std::vector<SweepRow> run_room_sweep(const ScenarioConfig& cfg) {
  cfg.require_seed();
  return room_size_sweep(cfg.require_bulb(), cfg.room, cfg.sweeps.floor_dims, cfg.eval_protocol());
}

inline std::vector<SweepRow> run_divergence_sweep(const ScenarioConfig& cfg) {
  cfg.require_seed();
  BulbDesign bulb = cfg.require_bulb();
  bulb.center = cfg.room.ceiling_center();
  const auto angles = cfg.sweeps.divergence_angles.values();
  return divergence_sweep(bulb, angles, cfg.sweeps.total_powers, cfg.eval_protocol());
}

inline std::vector<RegionCell> run_three_region(const ScenarioConfig& cfg) {
  const auto seed = cfg.require_seed();
  const auto boards = build_bulb(cfg.require_bulb());
  return three_region_surface(boards, cfg.room, cfg.room.floor_center(), cfg.three_region.samples, seed,
                              cfg.placement(), cfg.three_region.bin_width, cfg.threads);
}

inline std::vector<RegionCell> diagonal(const std::vector<RegionCell>& cells) {
  std::vector<RegionCell> d;
  for (const auto& c : cells)
    if (c.bin1 == c.bin2) d.push_back(c);
  return d;
}

inline DesignSpace design_space(const ScenarioConfig& cfg) {
  DesignSpace s;
  s.base = cfg.require_bulb();
  if (cfg.optimizer.boards_per_layer.empty())
    throw ConfigError("optimizer.boards_per_layer", "required by this scenario");
  s.boards_per_layer = cfg.optimizer.boards_per_layer;
  s.divergence = cfg.optimizer.divergence;
  s.per_board_power = cfg.optimizer.per_board_power;
  s.power_constraint = cfg.optimizer.budgets.empty() ? 1.0 : cfg.optimizer.budgets.back();
  return s;
}

inline std::vector<FrontierRow> run_optimize(const ScenarioConfig& cfg) {
  cfg.require_seed();
  if (cfg.optimizer.budgets.empty()) throw ConfigError("optimizer.budgets", "required by this scenario");
  return power_sweep(design_space(cfg), cfg.optimizer.budgets, cfg.eval_protocol());
}

struct LayoutSurvey {
  std::string name;
  std::vector<TransmitterBoard> boards;
  std::vector<SinrSample> samples;
};

inline std::vector<LayoutSurvey> run_sinr_survey(const ScenarioConfig& cfg) {
  if (cfg.clusters.empty()) throw ConfigError("clusters", "required by this scenario");
  SinrSurveyConfig sc;
  sc.receiver_height = cfg.receiver.height;
  sc.elements = angle_diversity_elements(cfg.diversity.tilt_deg, cfg.diversity.ring, cfg.diversity.aperture_radius,
                                         cfg.diversity.fov_deg);
  sc.elements[0].aperture_radius = cfg.receiver.aperture_radius;
  sc.elements[0].fov_deg = cfg.receiver.fov_deg;
  sc.noise = cfg.noise;
  sc.gate = cfg.receiver.gate;
  sc.reflection_order = cfg.reflections.max_order;
  sc.patch_size = cfg.reflections.patch_size;
  sc.threads = cfg.threads;
  std::vector<LayoutSurvey> out;
  for (const auto& layout : cfg.clusters) {
    LayoutSurvey s;
    s.name = layout.name;
    s.boards = build_cluster_grid(cfg.room, layout.spec, layout.nx, layout.ny);
    s.samples = sinr_survey(s.boards, cfg.room, sc);
    out.push_back(std::move(s));
  }
  return out;
}

inline std::vector<MobilityTrace> protocol_traces(const ScenarioConfig& cfg) {
  const auto& p = cfg.protocol;
  if (!p.waypoints_csv.empty()) {
    if (p.receivers.empty()) throw ConfigError("protocol.receivers", "required with protocol.waypoints_csv");
    std::ifstream in(p.waypoints_csv);
    if (!in) throw ConfigError("protocol.waypoints_csv", "cannot open " + p.waypoints_csv);
    return read_mobility_csv(in, p.receivers);
  }
  if (!p.random) throw ConfigError("protocol", "needs either waypoints_csv + receivers or random");
  return random_traces(cfg.room, *p.random, cfg.require_seed());
}

inline SimulationResult run_protocol(const ScenarioConfig& cfg, const std::vector<MobilityTrace>& traces) {
  return run_simulation(traces, build_bulb(cfg.require_bulb()), cfg.room, cfg.protocol.config);
}

}  // namespace vlc
