// Named scenario presets, one per reproduced experiment, as JSON documents.
#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "vlc/config.hpp"

namespace vlc {

namespace detail {

// 25 boards: apex board plus three rings of eight at 30/45/70 degrees, 20 mW each.
inline constexpr std::string_view kFig3Bulb = R"({
    "radius": 0.4, "board_radius": 0.0375,
    "divergence_angle_deg": 20, "half_intensity_angle_deg": 60, "power_per_board": 0.02,
    "layers": [
      {"elevation_deg": 0,  "board_count": 1, "azimuth_offset_deg": 0},
      {"elevation_deg": 30, "board_count": 8, "azimuth_offset_deg": 0},
      {"elevation_deg": 45, "board_count": 8, "azimuth_offset_deg": 0},
      {"elevation_deg": 70, "board_count": 8, "azimuth_offset_deg": 0}
    ]
  })";

inline constexpr std::string_view kSirReceiver =
    R"({"height": 0.0, "aperture_radius": 0.0375, "fov_deg": 60, "gate": "BOTH"})";

inline std::string fig3_common(const char* room_side) {
  return std::string(R"("seed": 1,
  "room": {"width": )") + room_side + R"(, "depth": )" + room_side + R"(, "height": 3},
  "bulb": )" + std::string(kFig3Bulb) + R"(,
  "receiver": )" + std::string(kSirReceiver) + R"(,
  "sampling": {"placements": 200, "sir_cap_db": 20})";
}

}  // namespace detail

inline std::vector<std::string> preset_names() { return {"fig3a", "fig3b", "fig4", "fig5", "fig6", "protocol"}; }

/// Preset document text; throws ConfigError for unknown names.
inline std::string preset_text(const std::string& name) {
  using detail::fig3_common;
  if (name == "fig3a")
    return "{\n  " + fig3_common("6") + R"(,
  "sweeps": {"floor_dims": [4, 6, 8, 10, 12, 14, 16, 18, 20]}
})";
  if (name == "fig3b")
    return "{\n  " + fig3_common("6") + R"(,
  "sweeps": {"divergence_angles": {"min": 5, "max": 40, "step": 1}, "total_powers": [5, 10, 20, 25, 50]}
})";
  if (name == "fig4")
    return R"({
  "seed": 1,
  "room": {"width": 8, "depth": 8, "height": 3},
  "bulb": {
    "radius": 0.4, "board_radius": 0.0375,
    "divergence_angle_deg": 45, "half_intensity_angle_deg": 60, "power_per_board": 0.02,
    "layers": [
      {"elevation_deg": 30, "board_count": 11, "azimuth_offset_deg": 0},
      {"elevation_deg": 50, "board_count": 17, "azimuth_offset_deg": 0}
    ]
  },
  "receiver": )" + std::string(detail::kSirReceiver) + R"(,
  "sampling": {"sir_cap_db": 20},
  "three_region": {"samples": 100, "bin_width": 0.25}
})";
  if (name == "fig5")
    return "{\n  " + fig3_common("6") + R"(,
  "optimizer": {
    "boards_per_layer": [
      {"min": 1, "max": 1, "step": 1},
      {"min": 2, "max": 8, "step": 2},
      {"min": 2, "max": 8, "step": 2},
      {"min": 2, "max": 8, "step": 2}
    ],
    "divergence": {"min": 10, "max": 40, "step": 5},
    "per_board_power": 1.0,
    "budgets": [4, 7, 10, 13, 16, 19, 22, 25, 28, 31]
  }
})";
  if (name == "fig6")
    return R"({
  "seed": 1,
  "room": {"width": 15, "depth": 17, "height": 4,
           "wall_reflectivity": 0.8, "ceiling_reflectivity": 0.8, "floor_reflectivity": 0.3,
           "floor_grid_resolution": 0.5},
  "clusters": [
    {"name": "3led", "type": "THREE_LED", "nx": 2, "ny": 7, "tilt_deg": 25, "element_spacing": 0.1,
     "per_led_power": 1.0, "half_intensity_angle_deg": 30, "divergence_angle_deg": 90},
    {"name": "7led", "type": "SEVEN_LED", "nx": 2, "ny": 3, "tilt_deg": 25, "element_spacing": 0.1,
     "per_led_power": 1.0, "half_intensity_angle_deg": 30, "divergence_angle_deg": 90}
  ],
  "receiver": {"height": 0.85, "aperture_radius": 0.0375, "fov_deg": 40, "gate": "FOV"},
  "diversity": {"tilt_deg": 40, "ring": 6, "fov_deg": 40, "aperture_radius": 0.0375},
  "noise": {"responsivity": 0.54, "shot_coefficient": 1.7303507647e-19, "thermal_variance": 1e-14,
            "bandwidth": 1e7, "ambient_power": 0},
  "reflections": {"max_order": 4, "patch_size": 0.5}
})";
  if (name == "protocol")
    return "{\n  " + fig3_common("6") + R"(,
  "protocol": {
    "search_period": 0.1, "n_t": 3,
    "random": {"receivers": 3, "horizon_s": 6.0, "step_s": 0.5, "max_speed": 1.0, "margin": 0.1}
  }
})";
  throw ConfigError("preset", "unknown preset '" + name + "'");
}

inline json preset_json(const std::string& name) { return json::parse(preset_text(name)); }

inline ScenarioConfig preset_config(const std::string& name) { return parse_config(preset_json(name)); }

}  // namespace vlc
