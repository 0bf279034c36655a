// Scenario configuration: one JSON document covering every module, parsed with field paths
// in every error ("bulb.layers[1].board_count: must be >= 1").
#pragma once

#include <cstdint>
#include <fstream>
#include <initializer_list>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"
#include "vlc/error.hpp"
#include "vlc/geometry.hpp"
#include "vlc/metrics.hpp"
#include "vlc/optimizer.hpp"
#include "vlc/protocol.hpp"

namespace vlc {

using json = nlohmann::json;

struct ReceiverConfig {
  double height{0.0};
  double aperture_radius{0.0375};
  double fov_deg{90};
  CoverageGate gate{CoverageGate::Divergence};
};

struct DiversityConfig {
  double tilt_deg{40};
  int ring{6};
  double fov_deg{40};
  double aperture_radius{0.0375};
};

struct ReflectionConfig {
  int max_order{4};
  double patch_size{0.25};
};

struct ClusterLayoutConfig {
  std::string name;
  FlatClusterSpec spec;
  int nx{1};
  int ny{1};
};

struct SweepConfig {
  std::vector<double> floor_dims{4, 6, 8, 10, 12, 14, 16, 18, 20};
  AngleRange divergence_angles{5, 40, 1};
  std::vector<double> total_powers{5, 10, 20, 25, 50};
};

struct ThreeRegionConfig {
  int samples{100};
  double bin_width{0.25};
};

struct OptimizerConfig {
  std::vector<IntRange> boards_per_layer;
  AngleRange divergence{10, 40, 5};
  double per_board_power{1.0};
  std::vector<double> budgets;
};

struct ProtocolScenario {
  ProtocolConfig config;
  std::vector<ReceiverManifest> receivers;
  std::string waypoints_csv;
  std::optional<TraceGenerator> random;
};

struct ScenarioConfig {
  std::optional<std::uint64_t> seed;
  unsigned threads{0};
  RoomSpec room;
  std::optional<BulbDesign> bulb;
  std::vector<ClusterLayoutConfig> clusters;
  ReceiverConfig receiver;
  int placements{200};
  double sir_cap_db{20};
  NoiseModel noise;
  ReflectionConfig reflections;
  DiversityConfig diversity;
  SweepConfig sweeps;
  ThreeRegionConfig three_region;
  OptimizerConfig optimizer;
  ProtocolScenario protocol;

  std::uint64_t require_seed() const {
    if (!seed) throw ConfigError("seed", "required for stochastic scenarios");
    return *seed;
  }

  const BulbDesign& require_bulb() const {
    if (!bulb) throw ConfigError("bulb", "required by this scenario");
    return *bulb;
  }

  PlacementProtocol placement() const {
    PlacementProtocol p;
    p.placements = placements;
    p.seed = seed.value_or(0);
    p.receiver_height = receiver.height;
    p.aperture_radius = receiver.aperture_radius;
    p.fov_deg = receiver.fov_deg;
    p.gate = receiver.gate;
    p.sir_cap_db = sir_cap_db;
    return p;
  }

  EvalProtocol eval_protocol() const { return {room, placement(), threads}; }
};

// ---------------------------------------------------------------------------------------------

namespace detail {

inline std::string join_path(const std::string& base, const std::string& key) {
  return base.empty() ? key : base + "." + key;
}

inline std::string index_path(const std::string& base, std::size_t i) {
  return base + "[" + std::to_string(i) + "]";
}

/// Object view that rejects unknown keys and reports typed lookups by path.
class Obj {
 public:
  Obj(const json& j, std::string path, std::initializer_list<const char*> allowed) : j_(j), path_(std::move(path)) {
    if (!j.is_object()) throw ConfigError(path_.empty() ? "<root>" : path_, "expected an object");
    for (const auto& [key, _] : j.items()) {
      bool ok = false;
      for (const char* a : allowed) ok |= key == a;
      if (!ok) throw ConfigError(join_path(path_, key), "unknown field");
    }
  }

  bool has(const char* key) const { return j_.contains(key) && !j_.at(key).is_null(); }
  const json& at(const char* key) const { return j_.at(key); }
  std::string path(const char* key) const { return join_path(path_, key); }

  double number(const char* key, double def) const {
    if (!has(key)) return def;
    if (!at(key).is_number()) throw ConfigError(path(key), "expected a number");
    return at(key).get<double>();
  }

  double required_number(const char* key) const {
    if (!has(key)) throw ConfigError(path(key), "required field missing");
    return number(key, 0.0);
  }

  long integer(const char* key, long def) const {
    if (!has(key)) return def;
    if (!at(key).is_number_integer()) throw ConfigError(path(key), "expected an integer");
    return at(key).get<long>();
  }

  std::string string(const char* key, const std::string& def) const {
    if (!has(key)) return def;
    if (!at(key).is_string()) throw ConfigError(path(key), "expected a string");
    return at(key).get<std::string>();
  }

  std::vector<double> numbers(const char* key, std::vector<double> def) const {
    if (!has(key)) return def;
    if (!at(key).is_array()) throw ConfigError(path(key), "expected an array of numbers");
    std::vector<double> v;
    for (std::size_t i = 0; i < at(key).size(); ++i) {
      if (!at(key)[i].is_number()) throw ConfigError(index_path(path(key), i), "expected a number");
      v.push_back(at(key)[i].get<double>());
    }
    return v;
  }

  Vec3 vec3(const char* key, Vec3 def) const {
    if (!has(key)) return def;
    const auto v = numbers(key, {});
    if (v.size() != 3) throw ConfigError(path(key), "expected [x, y, z]");
    return {v[0], v[1], v[2]};
  }

 private:
  const json& j_;
  std::string path_;
};

inline void check(bool cond, const std::string& path, const std::string& msg) {
  if (!cond) throw ConfigError(path, msg);
}

inline CoverageGate parse_gate(const std::string& s, const std::string& path) {
  if (s == "DIVERGENCE") return CoverageGate::Divergence;
  if (s == "FOV") return CoverageGate::Fov;
  if (s == "BOTH") return CoverageGate::Both;
  if (s == "NONE") return CoverageGate::None;
  throw ConfigError(path, "expected one of DIVERGENCE, FOV, BOTH, NONE");
}

inline const char* gate_name(CoverageGate g) {
  switch (g) {
    case CoverageGate::Divergence: return "DIVERGENCE";
    case CoverageGate::Fov: return "FOV";
    case CoverageGate::Both: return "BOTH";
    case CoverageGate::None: return "NONE";
  }
  return "?";
}

inline AngleRange parse_range(const json& j, const std::string& path, AngleRange def) {
  Obj o(j, path, {"min", "max", "step"});
  AngleRange r{o.number("min", def.min), o.number("max", def.max), o.number("step", def.step)};
  check(r.step > 0, o.path("step"), "must be positive");
  check(r.max >= r.min, o.path("max"), "must be >= min");
  return r;
}

inline RoomSpec parse_room(const json& j, const std::string& path) {
  Obj o(j, path, {"width", "depth", "height", "wall_reflectivity", "ceiling_reflectivity", "floor_reflectivity",
                  "floor_grid_resolution"});
  RoomSpec r;
  r.width = o.number("width", r.width);
  r.depth = o.number("depth", r.depth);
  r.height = o.number("height", r.height);
  r.wall_reflectivity = o.number("wall_reflectivity", r.wall_reflectivity);
  r.ceiling_reflectivity = o.number("ceiling_reflectivity", r.ceiling_reflectivity);
  r.floor_reflectivity = o.number("floor_reflectivity", r.floor_reflectivity);
  r.floor_grid_resolution = o.number("floor_grid_resolution", r.floor_grid_resolution);
  for (const char* k : {"width", "depth", "height"}) check(o.number(k, 1.0) > 0, o.path(k), "must be positive");
  for (const char* k : {"wall_reflectivity", "ceiling_reflectivity", "floor_reflectivity"}) {
    const double v = o.number(k, 0.5);
    check(v >= 0 && v <= 1, o.path(k), "must lie in [0, 1]");
  }
  check(r.floor_grid_resolution > 0 && r.floor_grid_resolution <= std::min(r.width, r.depth),
        o.path("floor_grid_resolution"), "must lie in (0, min(width, depth)]");
  return r;
}

inline BulbDesign parse_bulb(const json& j, const std::string& path, const RoomSpec& room) {
  Obj o(j, path, {"center", "radius", "board_radius", "divergence_angle_deg", "half_intensity_angle_deg",
                  "power_per_board", "layers"});
  BulbDesign b;
  b.center = o.vec3("center", room.ceiling_center());
  b.radius = o.number("radius", b.radius);
  b.board_radius = o.number("board_radius", b.board_radius);
  b.divergence_angle_deg = o.number("divergence_angle_deg", b.divergence_angle_deg);
  b.half_intensity_angle_deg = o.number("half_intensity_angle_deg", b.half_intensity_angle_deg);
  b.power_per_board = o.number("power_per_board", b.power_per_board);
  check(b.radius > 0, o.path("radius"), "must be positive");
  check(b.board_radius > 0, o.path("board_radius"), "must be positive");
  check(b.divergence_angle_deg > 0 && b.divergence_angle_deg <= 90, o.path("divergence_angle_deg"),
        "must lie in (0, 90]");
  check(b.half_intensity_angle_deg > 0 && b.half_intensity_angle_deg < 90, o.path("half_intensity_angle_deg"),
        "must lie in (0, 90)");
  check(b.power_per_board >= 0, o.path("power_per_board"), "must be non-negative");
  check(o.has("layers") && o.at("layers").is_array() && !o.at("layers").empty(), o.path("layers"),
        "expected a non-empty array");
  for (std::size_t i = 0; i < o.at("layers").size(); ++i) {
    const std::string lp = index_path(o.path("layers"), i);
    Obj l(o.at("layers")[i], lp, {"elevation_deg", "board_count", "azimuth_offset_deg"});
    LayerSpec s;
    s.elevation_deg = l.required_number("elevation_deg");
    s.board_count = static_cast<int>(l.integer("board_count", 0));
    s.azimuth_offset_deg = l.number("azimuth_offset_deg", 0.0);
    check(s.elevation_deg >= 0 && s.elevation_deg <= 90, l.path("elevation_deg"), "must lie in [0, 90]");
    check(s.board_count >= 1, l.path("board_count"), "must be >= 1");
    check(s.azimuth_offset_deg >= 0 && s.azimuth_offset_deg < 360, l.path("azimuth_offset_deg"),
          "must lie in [0, 360)");
    b.layers.push_back(s);
  }
  return b;
}

inline ClusterLayoutConfig parse_cluster(const json& j, const std::string& path) {
  Obj o(j, path, {"name", "type", "nx", "ny", "tilt_deg", "element_spacing", "per_led_power",
                  "half_intensity_angle_deg", "divergence_angle_deg"});
  ClusterLayoutConfig c;
  const std::string type = o.string("type", "SEVEN_LED");
  if (type == "THREE_LED") c.spec.cluster_type = ClusterType::ThreeLed;
  else if (type == "SEVEN_LED") c.spec.cluster_type = ClusterType::SevenLed;
  else throw ConfigError(o.path("type"), "expected THREE_LED or SEVEN_LED");
  c.name = o.string("name", type == "THREE_LED" ? "3led" : "7led");
  c.nx = static_cast<int>(o.integer("nx", 1));
  c.ny = static_cast<int>(o.integer("ny", 1));
  check(c.nx >= 1, o.path("nx"), "must be >= 1");
  check(c.ny >= 1, o.path("ny"), "must be >= 1");
  c.spec.tilt_deg = o.number("tilt_deg", c.spec.tilt_deg);
  c.spec.element_spacing = o.number("element_spacing", c.spec.element_spacing);
  c.spec.per_led_power = o.number("per_led_power", c.spec.per_led_power);
  c.spec.half_intensity_angle_deg = o.number("half_intensity_angle_deg", c.spec.half_intensity_angle_deg);
  c.spec.divergence_angle_deg = o.number("divergence_angle_deg", c.spec.divergence_angle_deg);
  check(c.spec.tilt_deg >= 0 && c.spec.tilt_deg < 90, o.path("tilt_deg"), "must lie in [0, 90)");
  check(c.spec.element_spacing > 0, o.path("element_spacing"), "must be positive");
  check(c.spec.per_led_power >= 0, o.path("per_led_power"), "must be non-negative");
  check(c.spec.half_intensity_angle_deg > 0 && c.spec.half_intensity_angle_deg < 90,
        o.path("half_intensity_angle_deg"), "must lie in (0, 90)");
  return c;
}

inline LeaveMode parse_leave(const std::string& s, const std::string& path) {
  if (s == "GRACEFUL") return LeaveMode::Graceful;
  if (s == "UNGRACEFUL") return LeaveMode::Ungraceful;
  throw ConfigError(path, "expected GRACEFUL or UNGRACEFUL");
}

inline ProtocolScenario parse_protocol(const json& j, const std::string& path) {
  Obj o(j, path, {"search_period", "n_t", "duration_s", "receivers", "waypoints_csv", "random"});
  ProtocolScenario p;
  p.config.search_period = o.number("search_period", p.config.search_period);
  p.config.n_t = static_cast<int>(o.integer("n_t", p.config.n_t));
  p.config.duration_s = o.number("duration_s", 0.0);
  check(p.config.search_period > 0, o.path("search_period"), "must be positive");
  check(p.config.n_t >= 1, o.path("n_t"), "must be >= 1");
  check(p.config.duration_s >= 0, o.path("duration_s"), "must be non-negative");
  p.waypoints_csv = o.string("waypoints_csv", "");
  if (o.has("receivers")) {
    check(o.at("receivers").is_array(), o.path("receivers"), "expected an array");
    std::vector<std::string> seen;
    for (std::size_t i = 0; i < o.at("receivers").size(); ++i) {
      const std::string rp = index_path(o.path("receivers"), i);
      Obj r(o.at("receivers")[i], rp, {"id", "rf_address", "join_time", "leave_time", "leave_mode"});
      ReceiverManifest m;
      m.receiver_id = static_cast<int>(r.integer("id", static_cast<long>(i + 1)));
      m.rf_address = r.string("rf_address", "rx-" + std::to_string(m.receiver_id));
      m.join_time = r.number("join_time", 0.0);
      m.leave_time = r.number("leave_time", std::numeric_limits<double>::infinity());
      m.leave_mode = parse_leave(r.string("leave_mode", "UNGRACEFUL"), r.path("leave_mode"));
      check(m.leave_time > m.join_time, r.path("leave_time"), "must follow join_time");
      check(std::find(seen.begin(), seen.end(), m.rf_address) == seen.end(), r.path("rf_address"),
            "duplicate address");
      seen.push_back(m.rf_address);
      p.receivers.push_back(m);
    }
  }
  if (o.has("random")) {
    Obj r(o.at("random"), o.path("random"), {"receivers", "horizon_s", "step_s", "max_speed", "margin"});
    TraceGenerator g;
    g.receivers = static_cast<int>(r.integer("receivers", g.receivers));
    g.horizon_s = r.number("horizon_s", g.horizon_s);
    g.step_s = r.number("step_s", g.step_s);
    g.max_speed = r.number("max_speed", g.max_speed);
    g.margin = r.number("margin", g.margin);
    check(g.receivers >= 1, r.path("receivers"), "must be >= 1");
    check(g.horizon_s > 0, r.path("horizon_s"), "must be positive");
    check(g.step_s > 0, r.path("step_s"), "must be positive");
    p.random = g;
  }
  return p;
}

}  // namespace detail

inline ScenarioConfig parse_config(const json& doc) {
  using detail::check;
  detail::Obj root(doc, "", {"seed", "threads", "room", "bulb", "clusters", "receiver", "sampling", "noise",
                             "reflections", "diversity", "sweeps", "three_region", "optimizer", "protocol"});
  ScenarioConfig c;
  if (root.has("seed")) {
    check(doc.at("seed").is_number_unsigned() || (doc.at("seed").is_number_integer() && doc.at("seed").get<long>() >= 0),
          "seed", "expected a non-negative integer");
    c.seed = doc.at("seed").get<std::uint64_t>();
  }
  const long threads = root.integer("threads", 0);
  check(threads >= 0, "threads", "must be non-negative");
  c.threads = static_cast<unsigned>(threads);
  if (root.has("room")) c.room = detail::parse_room(doc.at("room"), "room");
  if (root.has("bulb")) c.bulb = detail::parse_bulb(doc.at("bulb"), "bulb", c.room);
  if (root.has("clusters")) {
    check(doc.at("clusters").is_array(), "clusters", "expected an array");
    for (std::size_t i = 0; i < doc.at("clusters").size(); ++i)
      c.clusters.push_back(detail::parse_cluster(doc.at("clusters")[i], detail::index_path("clusters", i)));
  }
  if (root.has("receiver")) {
    detail::Obj o(doc.at("receiver"), "receiver", {"height", "aperture_radius", "fov_deg", "gate"});
    c.receiver.height = o.number("height", c.receiver.height);
    c.receiver.aperture_radius = o.number("aperture_radius", c.receiver.aperture_radius);
    c.receiver.fov_deg = o.number("fov_deg", c.receiver.fov_deg);
    c.receiver.gate = detail::parse_gate(o.string("gate", "DIVERGENCE"), o.path("gate"));
    check(c.receiver.height >= 0 && c.receiver.height < c.room.height, o.path("height"),
          "must lie in [0, room.height)");
    check(c.receiver.aperture_radius > 0, o.path("aperture_radius"), "must be positive");
    check(c.receiver.fov_deg > 0 && c.receiver.fov_deg <= 90, o.path("fov_deg"), "must lie in (0, 90]");
  }
  if (root.has("sampling")) {
    detail::Obj o(doc.at("sampling"), "sampling", {"placements", "sir_cap_db"});
    c.placements = static_cast<int>(o.integer("placements", c.placements));
    c.sir_cap_db = o.number("sir_cap_db", c.sir_cap_db);
    check(c.placements >= 1, o.path("placements"), "must be >= 1");
    check(c.sir_cap_db > 0, o.path("sir_cap_db"), "must be positive");
  }
  if (root.has("noise")) {
    detail::Obj o(doc.at("noise"), "noise",
                  {"responsivity", "shot_coefficient", "thermal_variance", "bandwidth", "ambient_power"});
    c.noise.responsivity = o.number("responsivity", c.noise.responsivity);
    c.noise.shot_coefficient = o.number("shot_coefficient", c.noise.shot_coefficient);
    c.noise.thermal_variance = o.number("thermal_variance", c.noise.thermal_variance);
    c.noise.bandwidth = o.number("bandwidth", c.noise.bandwidth);
    c.noise.ambient_power = o.number("ambient_power", c.noise.ambient_power);
    for (const char* k : {"responsivity", "shot_coefficient", "thermal_variance", "bandwidth", "ambient_power"})
      check(o.number(k, 0.0) >= 0, o.path(k), "must be non-negative");
  }
  if (root.has("reflections")) {
    detail::Obj o(doc.at("reflections"), "reflections", {"max_order", "patch_size"});
    c.reflections.max_order = static_cast<int>(o.integer("max_order", c.reflections.max_order));
    c.reflections.patch_size = o.number("patch_size", c.reflections.patch_size);
    check(c.reflections.max_order >= 0 && c.reflections.max_order <= 4, o.path("max_order"), "must lie in [0, 4]");
    check(c.reflections.patch_size > 0, o.path("patch_size"), "must be positive");
  }
  if (root.has("diversity")) {
    detail::Obj o(doc.at("diversity"), "diversity", {"tilt_deg", "ring", "fov_deg", "aperture_radius"});
    c.diversity.tilt_deg = o.number("tilt_deg", c.diversity.tilt_deg);
    c.diversity.ring = static_cast<int>(o.integer("ring", c.diversity.ring));
    c.diversity.fov_deg = o.number("fov_deg", c.diversity.fov_deg);
    c.diversity.aperture_radius = o.number("aperture_radius", c.diversity.aperture_radius);
    check(c.diversity.ring >= 0, o.path("ring"), "must be >= 0");
    check(c.diversity.fov_deg > 0 && c.diversity.fov_deg <= 90, o.path("fov_deg"), "must lie in (0, 90]");
    check(c.diversity.aperture_radius > 0, o.path("aperture_radius"), "must be positive");
  }
  if (root.has("sweeps")) {
    detail::Obj o(doc.at("sweeps"), "sweeps", {"floor_dims", "divergence_angles", "total_powers"});
    c.sweeps.floor_dims = o.numbers("floor_dims", c.sweeps.floor_dims);
    c.sweeps.total_powers = o.numbers("total_powers", c.sweeps.total_powers);
    if (o.has("divergence_angles"))
      c.sweeps.divergence_angles = detail::parse_range(o.at("divergence_angles"), o.path("divergence_angles"),
                                                       c.sweeps.divergence_angles);
    for (std::size_t i = 0; i < c.sweeps.floor_dims.size(); ++i)
      check(c.sweeps.floor_dims[i] > 0, detail::index_path(o.path("floor_dims"), i), "must be positive");
    for (std::size_t i = 0; i < c.sweeps.total_powers.size(); ++i)
      check(c.sweeps.total_powers[i] > 0, detail::index_path(o.path("total_powers"), i), "must be positive");
  }
  if (root.has("three_region")) {
    detail::Obj o(doc.at("three_region"), "three_region", {"samples", "bin_width"});
    c.three_region.samples = static_cast<int>(o.integer("samples", c.three_region.samples));
    c.three_region.bin_width = o.number("bin_width", c.three_region.bin_width);
    check(c.three_region.samples >= 1, o.path("samples"), "must be >= 1");
    check(c.three_region.bin_width > 0, o.path("bin_width"), "must be positive");
  }
  if (root.has("optimizer")) {
    detail::Obj o(doc.at("optimizer"), "optimizer", {"boards_per_layer", "divergence", "per_board_power", "budgets"});
    if (o.has("boards_per_layer")) {
      check(o.at("boards_per_layer").is_array(), o.path("boards_per_layer"), "expected an array");
      for (std::size_t i = 0; i < o.at("boards_per_layer").size(); ++i) {
        const std::string rp = detail::index_path(o.path("boards_per_layer"), i);
        detail::Obj r(o.at("boards_per_layer")[i], rp, {"min", "max", "step"});
        IntRange ir{static_cast<int>(r.integer("min", 1)), static_cast<int>(r.integer("max", 1)),
                    static_cast<int>(r.integer("step", 1))};
        check(ir.min >= 1, r.path("min"), "must be >= 1");
        check(ir.max >= ir.min, r.path("max"), "must be >= min");
        check(ir.step >= 1, r.path("step"), "must be >= 1");
        c.optimizer.boards_per_layer.push_back(ir);
      }
    }
    if (o.has("divergence"))
      c.optimizer.divergence = detail::parse_range(o.at("divergence"), o.path("divergence"), c.optimizer.divergence);
    c.optimizer.per_board_power = o.number("per_board_power", c.optimizer.per_board_power);
    check(c.optimizer.per_board_power > 0, o.path("per_board_power"), "must be positive");
    c.optimizer.budgets = o.numbers("budgets", {});
    for (std::size_t i = 0; i < c.optimizer.budgets.size(); ++i) {
      check(c.optimizer.budgets[i] > 0, detail::index_path(o.path("budgets"), i), "must be positive");
      if (i) check(c.optimizer.budgets[i] > c.optimizer.budgets[i - 1], detail::index_path(o.path("budgets"), i),
                   "budgets must be strictly ascending");
    }
  }
  if (root.has("protocol")) c.protocol = detail::parse_protocol(doc.at("protocol"), "protocol");
  c.protocol.config.gate = c.receiver.gate;
  c.protocol.config.receiver_height = c.receiver.height;
  c.protocol.config.aperture_radius = c.receiver.aperture_radius;
  c.protocol.config.fov_deg = c.receiver.fov_deg;
  if (c.bulb && !c.optimizer.boards_per_layer.empty())
    check(c.optimizer.boards_per_layer.size() == c.bulb->layers.size(), "optimizer.boards_per_layer",
          "needs one range per bulb layer");
  return c;
}

inline json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("<file>", "cannot open " + path);
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError("<file>", std::string("malformed JSON in ") + path + ": " + e.what());
  }
}

/// Normalized document with every effective value, for run manifests.
inline json config_to_json(const ScenarioConfig& c) {
  json j;
  if (c.seed) j["seed"] = *c.seed;
  j["threads"] = c.threads;
  j["room"] = {{"width", c.room.width},
               {"depth", c.room.depth},
               {"height", c.room.height},
               {"wall_reflectivity", c.room.wall_reflectivity},
               {"ceiling_reflectivity", c.room.ceiling_reflectivity},
               {"floor_reflectivity", c.room.floor_reflectivity},
               {"floor_grid_resolution", c.room.floor_grid_resolution}};
  if (c.bulb) {
    const auto& b = *c.bulb;
    json layers = json::array();
    for (const auto& l : b.layers)
      layers.push_back(
          {{"elevation_deg", l.elevation_deg}, {"board_count", l.board_count}, {"azimuth_offset_deg", l.azimuth_offset_deg}});
    j["bulb"] = {{"center", {b.center.x, b.center.y, b.center.z}},
                 {"radius", b.radius},
                 {"board_radius", b.board_radius},
                 {"divergence_angle_deg", b.divergence_angle_deg},
                 {"half_intensity_angle_deg", b.half_intensity_angle_deg},
                 {"power_per_board", b.power_per_board},
                 {"layers", layers}};
  }
  if (!c.clusters.empty()) {
    json arr = json::array();
    for (const auto& cl : c.clusters)
      arr.push_back({{"name", cl.name},
                     {"type", cl.spec.cluster_type == ClusterType::ThreeLed ? "THREE_LED" : "SEVEN_LED"},
                     {"nx", cl.nx},
                     {"ny", cl.ny},
                     {"tilt_deg", cl.spec.tilt_deg},
                     {"element_spacing", cl.spec.element_spacing},
                     {"per_led_power", cl.spec.per_led_power},
                     {"half_intensity_angle_deg", cl.spec.half_intensity_angle_deg},
                     {"divergence_angle_deg", cl.spec.divergence_angle_deg}});
    j["clusters"] = arr;
  }
  j["receiver"] = {{"height", c.receiver.height},
                   {"aperture_radius", c.receiver.aperture_radius},
                   {"fov_deg", c.receiver.fov_deg},
                   {"gate", detail::gate_name(c.receiver.gate)}};
  j["sampling"] = {{"placements", c.placements}, {"sir_cap_db", c.sir_cap_db}};
  j["noise"] = {{"responsivity", c.noise.responsivity},
                {"shot_coefficient", c.noise.shot_coefficient},
                {"thermal_variance", c.noise.thermal_variance},
                {"bandwidth", c.noise.bandwidth},
                {"ambient_power", c.noise.ambient_power}};
  j["reflections"] = {{"max_order", c.reflections.max_order}, {"patch_size", c.reflections.patch_size}};
  j["diversity"] = {{"tilt_deg", c.diversity.tilt_deg},
                    {"ring", c.diversity.ring},
                    {"fov_deg", c.diversity.fov_deg},
                    {"aperture_radius", c.diversity.aperture_radius}};
  const auto& da = c.sweeps.divergence_angles;
  j["sweeps"] = {{"floor_dims", c.sweeps.floor_dims},
                 {"divergence_angles", {{"min", da.min}, {"max", da.max}, {"step", da.step}}},
                 {"total_powers", c.sweeps.total_powers}};
  j["three_region"] = {{"samples", c.three_region.samples}, {"bin_width", c.three_region.bin_width}};
  json ranges = json::array();
  for (const auto& r : c.optimizer.boards_per_layer) ranges.push_back({{"min", r.min}, {"max", r.max}, {"step", r.step}});
  const auto& od = c.optimizer.divergence;
  j["optimizer"] = {{"boards_per_layer", ranges},
                    {"divergence", {{"min", od.min}, {"max", od.max}, {"step", od.step}}},
                    {"per_board_power", c.optimizer.per_board_power},
                    {"budgets", c.optimizer.budgets}};
  json proto = {{"search_period", c.protocol.config.search_period},
                {"n_t", c.protocol.config.n_t},
                {"duration_s", c.protocol.config.duration_s}};
  if (!c.protocol.waypoints_csv.empty()) proto["waypoints_csv"] = c.protocol.waypoints_csv;
  if (!c.protocol.receivers.empty()) {
    json arr = json::array();
    for (const auto& m : c.protocol.receivers) {
      json r = {{"id", m.receiver_id},
                {"rf_address", m.rf_address},
                {"join_time", m.join_time},
                {"leave_mode", m.leave_mode == LeaveMode::Graceful ? "GRACEFUL" : "UNGRACEFUL"}};
      if (std::isfinite(m.leave_time)) r["leave_time"] = m.leave_time;
      arr.push_back(r);
    }
    proto["receivers"] = arr;
  }
  if (c.protocol.random) {
    const auto& g = *c.protocol.random;
    proto["random"] = {{"receivers", g.receivers},
                       {"horizon_s", g.horizon_s},
                       {"step_s", g.step_s},
                       {"max_speed", g.max_speed},
                       {"margin", g.margin}};
  }
  j["protocol"] = proto;
  return j;
}

}  // namespace vlc
