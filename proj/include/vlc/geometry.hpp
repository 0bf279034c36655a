// Rooms, hemispherical multi-layer bulbs, flat ceiling clusters and receivers.
//
// Frame: floor at z = 0, ceiling at z = room.height, x along the room width and
// y along its depth. All angles in degrees, lengths in meters, powers in watts.
#pragma once

#include <cmath>
#include <algorithm>
#include <cstddef>
#include <initializer_list>
#include <optional>
#include <string>
#include <vector>

#include "vlc/error.hpp"
#include "vlc/vec.hpp"

namespace vlc {

struct RoomSpec {
  double width{6.0};
  double depth{6.0};
  double height{3.0};
  double wall_reflectivity{0.8};
  double ceiling_reflectivity{0.8};
  double floor_reflectivity{0.3};
  double floor_grid_resolution{0.25};

  void validate() const {
    require(width > 0 && depth > 0 && height > 0, "room dimensions must be strictly positive");
    for (double r : {wall_reflectivity, ceiling_reflectivity, floor_reflectivity})
      require(r >= 0.0 && r <= 1.0, "room reflectivities must lie in [0, 1]");
    require(floor_grid_resolution > 0 && floor_grid_resolution <= std::min(width, depth),
            "floor_grid_resolution must be in (0, min(width, depth)]");
  }

  Vec3 ceiling_center() const { return {width / 2, depth / 2, height}; }
  Vec2 floor_center() const { return {width / 2, depth / 2}; }
  bool contains(Vec2 p) const { return p.x >= 0 && p.x <= width && p.y >= 0 && p.y <= depth; }
};

/// Cell-centered evaluation grid over the floor (or a horizontal plane at `z`).
struct FloorGrid {
  std::size_t nx{0}, ny{0};
  double cell_x{0}, cell_y{0};
  double z{0};

  static FloorGrid over(const RoomSpec& room, double z = 0.0) {
    FloorGrid g;
    g.nx = static_cast<std::size_t>(std::ceil(room.width / room.floor_grid_resolution - 1e-9));
    g.ny = static_cast<std::size_t>(std::ceil(room.depth / room.floor_grid_resolution - 1e-9));
    g.cell_x = room.width / static_cast<double>(g.nx);
    g.cell_y = room.depth / static_cast<double>(g.ny);
    g.z = z;
    return g;
  }

  std::size_t size() const { return nx * ny; }
  double x(std::size_t i) const { return (static_cast<double>(i) + 0.5) * cell_x; }
  double y(std::size_t j) const { return (static_cast<double>(j) + 0.5) * cell_y; }
  /// Row-major over y then x: index = j * nx + i.
  Vec3 point(std::size_t index) const { return {x(index % nx), y(index / nx), z}; }
};

struct LayerSpec {
  double elevation_deg{30};  // from the downward bulb normal; 0 is the apex board
  int board_count{8};
  double azimuth_offset_deg{0};
};

struct BulbDesign {
  Vec3 center{3, 3, 3};
  double radius{0.4};
  std::vector<LayerSpec> layers;
  double board_radius{0.0375};
  double divergence_angle_deg{20};
  double half_intensity_angle_deg{60};
  double power_per_board{0.02};

  int total_boards() const {
    int n = 0;
    for (const auto& l : layers) n += l.board_count;
    return n;
  }

  void validate() const {
    require(radius > 0, "bulb radius must be positive");
    require(board_radius > 0, "board_radius must be positive");
    require(divergence_angle_deg > 0 && divergence_angle_deg <= 90,
            "divergence_angle must lie in (0, 90] degrees");
    require(half_intensity_angle_deg > 0 && half_intensity_angle_deg < 90,
            "half_intensity_angle must lie in (0, 90) degrees");
    require(power_per_board >= 0, "power_per_board must be non-negative");
    require(!layers.empty(), "bulb needs at least one layer");
    for (std::size_t i = 0; i < layers.size(); ++i) {
      const auto& l = layers[i];
      const std::string where = "layer " + std::to_string(i) + ": ";
      require(l.board_count >= 1, where + "board_count must be >= 1");
      require(l.elevation_deg >= 0 && l.elevation_deg <= 90,
              where + "elevation must lie in [0, 90] degrees");
      require(l.azimuth_offset_deg >= 0 && l.azimuth_offset_deg < 360,
              where + "azimuth offset must lie in [0, 360) degrees");
    }
  }
};

struct TransmitterBoard {
  int id{0};
  int group{0};  // layer index on a bulb, cluster index on a flat layout
  Vec3 position;
  Vec3 orientation{0, 0, -1};
  double divergence_angle_deg{90};
  double half_intensity_angle_deg{60};
  double power{0};
  std::vector<Vec3> led_positions;
};

namespace detail {

/// Frame (u, v) spanning the plane orthogonal to `n`.
inline std::pair<Vec3, Vec3> plane_basis(const Vec3& n) {
  const Vec3 helper = std::abs(n.z) < 0.9 ? Vec3{0, 0, 1} : Vec3{1, 0, 0};
  const Vec3 u = helper.cross(n).normalized();
  return {u, n.cross(u)};
}

/// Center LED plus a ring of six at 60% of the board radius, in the board plane.
inline std::vector<Vec3> board_leds(const Vec3& center, const Vec3& normal, double board_radius) {
  std::vector<Vec3> leds{center};
  const auto [u, v] = plane_basis(normal);
  for (int k = 0; k < 6; ++k) {
    const double a = deg2rad(60.0 * k);
    leds.push_back(center + (u * std::cos(a) + v * std::sin(a)) * (0.6 * board_radius));
  }
  return leds;
}

}  // namespace detail

/// Boards are laid out layer by layer, equally spaced in azimuth, ids assigned in that order.
/// Throws ValidationError when two boards would overlap on the hemisphere.
inline std::vector<TransmitterBoard> build_bulb(const BulbDesign& design) {
  design.validate();
  std::vector<TransmitterBoard> boards;
  boards.reserve(static_cast<std::size_t>(design.total_boards()));
  int id = 0;
  for (std::size_t li = 0; li < design.layers.size(); ++li) {
    const LayerSpec& layer = design.layers[li];
    const double spacing = 360.0 / layer.board_count;
    for (int k = 0; k < layer.board_count; ++k) {
      const double azimuth = layer.azimuth_offset_deg + spacing * k;
      TransmitterBoard b;
      b.id = id++;
      b.group = static_cast<int>(li);
      b.orientation = downward_direction(layer.elevation_deg, azimuth);
      b.position = design.center + b.orientation * design.radius;
      b.divergence_angle_deg = design.divergence_angle_deg;
      b.half_intensity_angle_deg = design.half_intensity_angle_deg;
      b.power = design.power_per_board;
      b.led_positions = detail::board_leds(b.position, b.orientation, design.board_radius);
      boards.push_back(std::move(b));
    }
  }
  const double min_sep = 2.0 * design.board_radius;
  for (std::size_t i = 0; i < boards.size(); ++i) {
    for (std::size_t j = i + 1; j < boards.size(); ++j) {
      const double d = (boards[i].position - boards[j].position).norm();
      if (d < min_sep) {
        throw ValidationError("boards " + std::to_string(i) + " and " + std::to_string(j) +
                              " overlap: center distance " + std::to_string(d) +
                              " m < 2 * board_radius (" + std::to_string(min_sep) + " m)");
      }
    }
  }
  return boards;
}

enum class ClusterType { ThreeLed, SevenLed };

struct FlatClusterSpec {
  ClusterType cluster_type{ClusterType::SevenLed};
  Vec3 center;
  double tilt_deg{25};
  double element_spacing{0.1};
  double per_led_power{1.0};
  double half_intensity_angle_deg{30};
  double divergence_angle_deg{90};

  void validate() const {
    require(tilt_deg >= 0 && tilt_deg < 90, "cluster tilt must lie in [0, 90) degrees");
    require(element_spacing > 0, "cluster element_spacing must be positive");
    require(per_led_power >= 0, "per_led_power must be non-negative");
    require(half_intensity_angle_deg > 0 && half_intensity_angle_deg < 90,
            "half_intensity_angle must lie in (0, 90) degrees");
    require(divergence_angle_deg > 0 && divergence_angle_deg <= 90,
            "divergence_angle must lie in (0, 90] degrees");
  }
};

/// Every LED of a flat cluster becomes its own board (independently modulated).
/// Ids start at `first_id`; `group` tags all elements with the cluster index.
inline std::vector<TransmitterBoard> build_flat_cluster(const FlatClusterSpec& spec, int first_id = 0,
                                                        int group = 0) {
  spec.validate();
  std::vector<TransmitterBoard> out;
  auto add = [&](const Vec3& pos, const Vec3& dir) {
    TransmitterBoard b;
    b.id = first_id + static_cast<int>(out.size());
    b.group = group;
    b.position = pos;
    b.orientation = dir;
    b.divergence_angle_deg = spec.divergence_angle_deg;
    b.half_intensity_angle_deg = spec.half_intensity_angle_deg;
    b.power = spec.per_led_power;
    b.led_positions = {pos};
    out.push_back(std::move(b));
  };
  const bool seven = spec.cluster_type == ClusterType::SevenLed;
  if (seven) add(spec.center, {0, 0, -1});
  const int ring = seven ? 6 : 3;
  for (int i = 0; i < ring; ++i) {
    const double az = 360.0 / ring * i;
    const double a = deg2rad(az);
    add(spec.center + Vec3{std::cos(a), std::sin(a), 0} * spec.element_spacing,
        downward_direction(spec.tilt_deg, az));
  }
  return out;
}

/// Cluster centers on an nx-by-ny ceiling grid with half-spacing wall margins.
inline std::vector<TransmitterBoard> build_cluster_grid(const RoomSpec& room, FlatClusterSpec proto,
                                                        int nx, int ny) {
  require(nx >= 1 && ny >= 1, "cluster grid needs nx, ny >= 1");
  std::vector<TransmitterBoard> all;
  int group = 0;
  for (int i = 0; i < nx; ++i) {
    for (int j = 0; j < ny; ++j) {
      proto.center = {room.width * (i + 0.5) / nx, room.depth * (j + 0.5) / ny, room.height};
      auto boards = build_flat_cluster(proto, static_cast<int>(all.size()), group++);
      all.insert(all.end(), boards.begin(), boards.end());
    }
  }
  return all;
}

struct FloorProjection {
  Vec2 point;
  bool inside_room{true};
};

/// Where the board's boresight ray meets the floor, or nullopt when it never descends.
inline std::optional<FloorProjection> boresight_floor_projection(const TransmitterBoard& board,
                                                                 const RoomSpec& room) {
  if (board.orientation.z >= 0.0) return std::nullopt;
  const double t = -board.position.z / board.orientation.z;
  const Vec2 p{board.position.x + t * board.orientation.x, board.position.y + t * board.orientation.y};
  return FloorProjection{p, room.contains(p)};
}

struct PdElement {
  Vec3 normal{0, 0, 1};
  double aperture_radius{0.0375};
  double fov_deg{90};

  double area() const { return kPi * aperture_radius * aperture_radius; }
  void validate() const {
    require(aperture_radius > 0, "PD aperture_radius must be positive");
    require(fov_deg > 0 && fov_deg <= 90, "PD fov must lie in (0, 90] degrees");
    require(std::abs(normal.norm() - 1.0) < 1e-9, "PD normal must be a unit vector");
  }
};

struct ReceiverSpec {
  int id{0};
  Vec3 position;
  std::vector<PdElement> elements;
  std::string rf_address;

  void validate() const {
    require(!elements.empty(), "receiver needs at least one PD element");
    for (const auto& e : elements) e.validate();
  }
};

inline ReceiverSpec single_pd_receiver(int id, Vec3 position, double aperture_radius = 0.0375,
                                       double fov_deg = 90) {
  return {id, position, {PdElement{{0, 0, 1}, aperture_radius, fov_deg}}, "rx-" + std::to_string(id)};
}

/// One upward element plus `ring` elements tilted by `tilt_deg` toward equally spaced azimuths.
inline std::vector<PdElement> angle_diversity_elements(double tilt_deg = 40, int ring = 6,
                                                       double aperture_radius = 0.0375,
                                                       double fov_deg = 40) {
  std::vector<PdElement> els{PdElement{{0, 0, 1}, aperture_radius, fov_deg}};
  for (int i = 0; i < ring; ++i)
    els.push_back(PdElement{upward_direction(tilt_deg, 360.0 / ring * i), aperture_radius, fov_deg});
  return els;
}

}  // namespace vlc
