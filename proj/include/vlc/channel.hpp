// Line-of-sight optical DC gains under the generalized Lambertian emission model,
// received optical power and floor irradiance.
#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstring>
#include <initializer_list>
#include <ostream>
#include <stdexcept>
#include <span>
#include <string>
#include <vector>

#include "vlc/error.hpp"
#include "vlc/geometry.hpp"
#include "vlc/parallel.hpp"
#include "vlc/vec.hpp"

namespace vlc {

/// Lambertian order m = -ln 2 / ln cos(half_intensity). Evaluated in extended precision so
/// that the first- and second-order cases (60 and 45 degrees) come out exact.
inline double lambertian_order(double half_intensity_deg) {
  if (!(half_intensity_deg > 0.0 && half_intensity_deg < 90.0))
    throw std::domain_error("half-intensity angle must lie in (0, 90) degrees");
  constexpr long double pi = 3.141592653589793238462643383279502884L;
  const long double t = static_cast<long double>(half_intensity_deg) * pi / 180.0L;
  return static_cast<double>(-std::log(2.0L) / std::log(std::cos(t)));
}

struct LambertianParams {
  double order_m{1.0};
  double half_intensity_deg{60.0};

  static LambertianParams from_half_intensity(double deg) { return {lambertian_order(deg), deg}; }
};

enum class CoverageGate {
  Divergence,  // receiver inside the LED divergence cone
  Fov,         // LED inside the PD field of view
  Both,
  None,        // physical light only (illumination)
};

namespace detail {

inline bool within_angle(double cos_angle, double limit_deg) {
  // Inclusive boundary; the tolerance absorbs acos round-off at exactly the limit.
  return std::acos(std::clamp(cos_angle, -1.0, 1.0)) <= deg2rad(limit_deg) + 1e-12;
}

/// Radiant intensity pattern (m+1)/(2 pi) cos^m(phi) of a unit-power source.
inline double lambertian_intensity(double m, double cos_phi) {
  return (m + 1.0) / (2.0 * kPi) * std::pow(cos_phi, m);
}

}  // namespace detail

/// LOS DC gain between a board and one PD element located at `pd_position`.
/// Returns 0 when either end faces away or the selected coverage gate fails.
inline double los_gain(const TransmitterBoard& board, double lambertian_m, const PdElement& pd,
                       const Vec3& pd_position, CoverageGate gate) {
  const Vec3 v = pd_position - board.position;
  const double d2 = v.norm2();
  require(d2 > 0.0, "los_gain: PD coincides with the transmitter");
  const double d = std::sqrt(d2);
  const double cos_phi = board.orientation.dot(v) / d;
  const double cos_psi = -pd.normal.dot(v) / d;
  if (cos_phi <= 0.0 || cos_psi <= 0.0) return 0.0;
  const bool check_div = gate == CoverageGate::Divergence || gate == CoverageGate::Both;
  const bool check_fov = gate == CoverageGate::Fov || gate == CoverageGate::Both;
  if (check_div && !detail::within_angle(cos_phi, board.divergence_angle_deg)) return 0.0;
  if (check_fov && !detail::within_angle(cos_psi, pd.fov_deg)) return 0.0;
  return detail::lambertian_intensity(lambertian_m, cos_phi) / d2 * cos_psi * pd.area();
}

inline double los_gain(const TransmitterBoard& board, const PdElement& pd, const Vec3& pd_position,
                       CoverageGate gate) {
  return los_gain(board, lambertian_order(board.half_intensity_angle_deg), pd, pd_position, gate);
}

/// Per-board Lambertian orders, computed once per board list.
inline std::vector<double> lambertian_orders(std::span<const TransmitterBoard> boards) {
  std::vector<double> m(boards.size());
  for (std::size_t i = 0; i < boards.size(); ++i)
    m[i] = lambertian_order(boards[i].half_intensity_angle_deg);
  return m;
}

struct GainColumn {
  int receiver_id{0};
  int element{0};
};

/// Dense [board x (receiver, element)] gains, split into LOS and reflected parts.
struct GainMatrix {
  std::vector<int> board_ids;
  std::vector<GainColumn> columns;
  std::vector<double> los;        // row-major: board * columns.size() + column
  std::vector<double> reflected;  // same shape
  std::uint64_t room_fingerprint{0};
  std::uint64_t layout_fingerprint{0};

  std::size_t rows() const { return board_ids.size(); }
  std::size_t cols() const { return columns.size(); }
  std::size_t index(std::size_t board, std::size_t col) const { return board * cols() + col; }
  double total(std::size_t board, std::size_t col) const {
    return los[index(board, col)] + reflected[index(board, col)];
  }
  /// Column of the first element of receiver `id`, or cols() when absent.
  std::size_t column_of(int receiver_id, int element = 0) const {
    for (std::size_t c = 0; c < columns.size(); ++c)
      if (columns[c].receiver_id == receiver_id && columns[c].element == element) return c;
    return columns.size();
  }
};

namespace detail {

inline std::uint64_t fnv1a(std::uint64_t h, double v) {
  std::uint64_t bits;
  static_assert(sizeof bits == sizeof v);
  std::memcpy(&bits, &v, sizeof v);
  for (int i = 0; i < 8; ++i) {
    h ^= (bits >> (8 * i)) & 0xffU;
    h *= 0x100000001b3ULL;
  }
  return h;
}

inline constexpr std::uint64_t kFnvOffset = 0xcbf29ce484222325ULL;

}  // namespace detail

inline std::uint64_t fingerprint(const RoomSpec& r) {
  std::uint64_t h = detail::kFnvOffset;
  for (double v : {r.width, r.depth, r.height, r.wall_reflectivity, r.ceiling_reflectivity,
                   r.floor_reflectivity, r.floor_grid_resolution})
    h = detail::fnv1a(h, v);
  return h;
}

inline std::uint64_t fingerprint(std::span<const TransmitterBoard> boards) {
  std::uint64_t h = detail::kFnvOffset;
  for (const auto& b : boards) {
    for (double v : {static_cast<double>(b.id), b.position.x, b.position.y, b.position.z,
                     b.orientation.x, b.orientation.y, b.orientation.z, b.divergence_angle_deg,
                     b.half_intensity_angle_deg, b.power})
      h = detail::fnv1a(h, v);
  }
  return h;
}

/// LOS part of the gain matrix; `reflected` is zero-filled (see reflection.hpp).
inline GainMatrix compute_los_gains(std::span<const TransmitterBoard> boards,
                                    std::span<const ReceiverSpec> receivers, CoverageGate gate,
                                    const RoomSpec* room = nullptr) {
  GainMatrix g;
  for (const auto& b : boards) g.board_ids.push_back(b.id);
  for (const auto& r : receivers)
    for (std::size_t e = 0; e < r.elements.size(); ++e)
      g.columns.push_back({r.id, static_cast<int>(e)});
  g.los.assign(g.rows() * g.cols(), 0.0);
  g.reflected.assign(g.rows() * g.cols(), 0.0);
  const auto orders = lambertian_orders(boards);
  for (std::size_t bi = 0; bi < boards.size(); ++bi) {
    std::size_t col = 0;
    for (const auto& r : receivers)
      for (const auto& el : r.elements)
        g.los[g.index(bi, col++)] = los_gain(boards[bi], orders[bi], el, r.position, gate);
  }
  g.layout_fingerprint = fingerprint(boards);
  if (room) g.room_fingerprint = fingerprint(*room);
  return g;
}

/// Optical power received from one board: board power times its total (LOS + reflected) gain.
inline double received_power(const TransmitterBoard& board, double los, double reflected = 0.0) {
  return board.power * (los + reflected);
}

/// Summed received power at `col` over the boards whose row index is listed.
inline double received_power(std::span<const TransmitterBoard> boards, const GainMatrix& g,
                             std::size_t col, std::span<const std::size_t> rows) {
  double total = 0.0;
  for (std::size_t r : rows) total += received_power(boards[r], g.los[g.index(r, col)],
                                                     g.reflected[g.index(r, col)]);
  return total;
}

struct IrradianceMap {
  FloorGrid grid;
  std::vector<double> values;  // W/m^2, indexed like FloorGrid::point
};

/// Irradiance on the floor plane from all boards, ungated (physical light, not a link).
inline IrradianceMap floor_irradiance_map(std::span<const TransmitterBoard> boards,
                                          const RoomSpec& room, unsigned threads = 1) {
  IrradianceMap map{FloorGrid::over(room), {}};
  map.values.assign(map.grid.size(), 0.0);
  const auto orders = lambertian_orders(boards);
  parallel_for(map.grid.size(), threads, [&](std::size_t idx) {
    const Vec3 p = map.grid.point(idx);
    double e = 0.0;
    for (std::size_t b = 0; b < boards.size(); ++b) {
      const Vec3 v = p - boards[b].position;
      const double d2 = v.norm2();
      if (d2 == 0.0) continue;
      const double d = std::sqrt(d2);
      const double cos_phi = boards[b].orientation.dot(v) / d;
      const double cos_psi = -v.z / d;
      if (cos_phi <= 0.0 || cos_psi <= 0.0) continue;
      e += boards[b].power * detail::lambertian_intensity(orders[b], cos_phi) / d2 * cos_psi;
    }
    map.values[idx] = e;
  });
  return map;
}

inline void write_gain_csv(std::ostream& out, const GainMatrix& g) {
  out << "board_id,receiver_id,element_id,los_gain,reflected_gain\n";
  char buf[64];
  for (std::size_t b = 0; b < g.rows(); ++b) {
    for (std::size_t c = 0; c < g.cols(); ++c) {
      out << g.board_ids[b] << ',' << g.columns[c].receiver_id << ',' << g.columns[c].element;
      std::snprintf(buf, sizeof buf, ",%.9e,%.9e\n", g.los[g.index(b, c)], g.reflected[g.index(b, c)]);
      out << buf;
    }
  }
}

/// Grid CSV: header row of cell x centers, then one row per y center.
inline void write_irradiance_csv(std::ostream& out, const IrradianceMap& map) {
  char buf[64];
  out << "y_m\\x_m";
  for (std::size_t i = 0; i < map.grid.nx; ++i) {
    std::snprintf(buf, sizeof buf, ",%.4f", map.grid.x(i));
    out << buf;
  }
  out << '\n';
  for (std::size_t j = 0; j < map.grid.ny; ++j) {
    std::snprintf(buf, sizeof buf, "%.4f", map.grid.y(j));
    out << buf;
    for (std::size_t i = 0; i < map.grid.nx; ++i) {
      std::snprintf(buf, sizeof buf, ",%.9e", map.values[j * map.grid.nx + i]);
      out << buf;
    }
    out << '\n';
  }
}

}  // namespace vlc
