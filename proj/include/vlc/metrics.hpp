// SIR / SINR, diversity combining, illumination statistics and spatial distributions.
#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <cstdio>
#include <limits>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include "vlc/channel.hpp"
#include "vlc/error.hpp"
#include "vlc/geometry.hpp"
#include "vlc/parallel.hpp"
#include "vlc/partition.hpp"
#include "vlc/reflection.hpp"
#include "vlc/rng.hpp"

namespace vlc {

inline double to_db(double linear) { return 10.0 * std::log10(linear); }
inline double from_db(double db) { return std::pow(10.0, db / 10.0); }

inline std::string format_db(double db) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.4f", db);
  return buf;
}

// ---------------------------------------------------------------------------------------------
// Noise-free SIR between two receivers sharing one bulb.

enum class SirStatus { Finite, Infinite, ZeroSignal };

struct ReceiverSir {
  int receiver_id{0};
  double signal_w{0};
  double interference_w{0};
  SirStatus status{SirStatus::Finite};

  /// Linear SIR; +inf when INFINITE, 0 when ZERO_SIGNAL.
  double sir() const {
    switch (status) {
      case SirStatus::ZeroSignal: return 0.0;
      case SirStatus::Infinite: return std::numeric_limits<double>::infinity();
      case SirStatus::Finite: break;
    }
    return signal_w / interference_w;
  }
  double sir_db() const { return to_db(sir()); }
};

struct SirReport {
  std::vector<ReceiverSir> receivers;

  const ReceiverSir& of(int receiver_id) const {
    for (const auto& r : receivers)
      if (r.receiver_id == receiver_id) return r;
    throw ValidationError("SirReport: unknown receiver " + std::to_string(receiver_id));
  }
};

/// S_ij = sum over boards owned by receiver j of (board power x total gain to receiver i).
/// Each receiver's gain is read from its first PD element.
inline SirReport sir_two_receivers(const Partition& partition, const GainMatrix& gains,
                                   std::span<const TransmitterBoard> boards,
                                   std::span<const ReceiverSpec> receivers) {
  require(receivers.size() == 2, "sir_two_receivers needs exactly two receivers");
  require(partition.board_ids.size() == boards.size() && gains.rows() == boards.size(),
          "sir_two_receivers: partition, gains and boards disagree on the board count");
  SirReport report;
  for (std::size_t i = 0; i < 2; ++i) {
    const int self = receivers[i].id;
    const std::size_t col = gains.column_of(self);
    require(col < gains.cols(), "sir_two_receivers: receiver missing from gain matrix");
    ReceiverSir r{self, 0.0, 0.0, SirStatus::Finite};
    for (std::size_t b = 0; b < boards.size(); ++b) {
      const double p = received_power(boards[b], gains.los[gains.index(b, col)],
                                      gains.reflected[gains.index(b, col)]);
      if (partition.owner[b] == self) r.signal_w += p;
      else r.interference_w += p;
    }
    if (r.signal_w == 0.0) r.status = SirStatus::ZeroSignal;
    else if (r.interference_w == 0.0) r.status = SirStatus::Infinite;
    report.receivers.push_back(r);
  }
  return report;
}

struct AverageSir {
  SirStatus status{SirStatus::Finite};
  double value{0};  // meaningful only when Finite
};

/// (gamma_1 + gamma_2) / 2; ZERO_SIGNAL dominates INFINITE when flags must propagate.
inline AverageSir average_sir(const SirReport& report) {
  require(!report.receivers.empty(), "average_sir: empty report");
  AverageSir out;
  double sum = 0.0;
  for (const auto& r : report.receivers) {
    if (r.status == SirStatus::ZeroSignal) return {SirStatus::ZeroSignal, 0.0};
    if (r.status == SirStatus::Infinite) out.status = SirStatus::Infinite;
    else sum += r.sir();
  }
  if (out.status == SirStatus::Finite) out.value = sum / static_cast<double>(report.receivers.size());
  return out;
}

/// Per-receiver SIR limited to [-cap_db, +cap_db]; flags map to the bounds.
inline double clamped_sir(const ReceiverSir& r, double cap_db) {
  const double hi = from_db(cap_db), lo = 1.0 / hi;
  switch (r.status) {
    case SirStatus::ZeroSignal: return lo;
    case SirStatus::Infinite: return hi;
    case SirStatus::Finite: break;
  }
  return std::clamp(r.sir(), lo, hi);
}

inline double clamped_average_sir(const SirReport& report, double cap_db) {
  double sum = 0.0;
  for (const auto& r : report.receivers) sum += clamped_sir(r, cap_db);
  return sum / static_cast<double>(report.receivers.size());
}

/// How receiver pairs are placed and scored when averaging SIR over a room.
struct PlacementProtocol {
  int placements{200};
  std::uint64_t seed{1};
  double receiver_height{0.0};
  double aperture_radius{0.0375};
  double fov_deg{90};
  CoverageGate gate{CoverageGate::Divergence};
  double sir_cap_db{20};

  void validate() const {
    require(placements >= 1, "placements must be >= 1");
    require(sir_cap_db > 0, "sir_cap_db must be positive");
    require(aperture_radius > 0, "receiver aperture_radius must be positive");
    require(fov_deg > 0 && fov_deg <= 90, "receiver fov must lie in (0, 90] degrees");
    require(receiver_height >= 0, "receiver_height must be non-negative");
  }
};

struct PairSir {
  SirReport report;
  double clamped_average{0};
  bool zero_signal{false};  // some receiver gets nothing from its own partition
  bool uncovered{false};    // some receiver gets no light from any board
};

/// Places receivers 1 and 2 at floor points a and b, bisector-partitions the bulb and scores it.
inline PairSir evaluate_pair(std::span<const TransmitterBoard> boards, const RoomSpec& room, Vec2 a,
                             Vec2 b, const PlacementProtocol& proto) {
  const std::vector<ReceiverSpec> rx{
      single_pd_receiver(1, {a.x, a.y, proto.receiver_height}, proto.aperture_radius, proto.fov_deg),
      single_pd_receiver(2, {b.x, b.y, proto.receiver_height}, proto.aperture_radius, proto.fov_deg)};
  const GainMatrix g = compute_los_gains(boards, rx, proto.gate);
  const Partition part = bisector_partition(ReceiverPoint{1, a}, ReceiverPoint{2, b}, boards, room);
  PairSir out;
  out.report = sir_two_receivers(part, g, boards, rx);
  out.clamped_average = clamped_average_sir(out.report, proto.sir_cap_db);
  for (const auto& r : out.report.receivers) {
    out.zero_signal |= r.status == SirStatus::ZeroSignal;
    out.uncovered |= r.signal_w == 0.0 && r.interference_w == 0.0;
  }
  return out;
}

/// Receiver pair for placement `index`: both uniform over the floor.
inline std::pair<Vec2, Vec2> placement_pair(const RoomSpec& room, std::uint64_t seed, std::uint64_t index) {
  RandomStream rng(seed, streams::kPairPlacement, index);
  const Vec2 a{rng.uniform(0, room.width), rng.uniform(0, room.depth)};
  const Vec2 b{rng.uniform(0, room.width), rng.uniform(0, room.depth)};
  return {a, b};
}

struct PlacementSummary {
  double mean_sir{0};  // linear mean of clamped pair averages
  double mean_sir_db{0};
  int zero_signal_placements{0};
  int uncovered_placements{0};
  int placements{0};
};

inline PlacementSummary mean_pair_sir(std::span<const TransmitterBoard> boards, const RoomSpec& room,
                                      const PlacementProtocol& proto, unsigned threads = 1) {
  proto.validate();
  const auto n = static_cast<std::size_t>(proto.placements);
  std::vector<double> values(n);
  std::vector<char> zero(n), uncovered(n);
  parallel_for(n, threads, [&](std::size_t i) {
    const auto [a, b] = placement_pair(room, proto.seed, i);
    const PairSir s = evaluate_pair(boards, room, a, b, proto);
    values[i] = s.clamped_average;
    zero[i] = s.zero_signal;
    uncovered[i] = s.uncovered;
  });
  PlacementSummary out;
  out.placements = proto.placements;
  double sum = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    sum += values[i];
    out.zero_signal_placements += zero[i];
    out.uncovered_placements += uncovered[i];
  }
  out.mean_sir = sum / static_cast<double>(n);
  out.mean_sir_db = to_db(out.mean_sir);
  return out;
}

// ---------------------------------------------------------------------------------------------
// SIR as a function of both receivers' distance from the room center.

struct RegionCell {
  std::size_t bin1{0}, bin2{0};
  double d1{0}, d2{0};  // bin centers, meters
  double mean_sir{0};
  double mean_sir_db{0};
};

namespace detail {

/// Uniform distance within [lo, hi) and uniform azimuth around `center`, rejected until inside.
inline Vec2 point_at_distance(const RoomSpec& room, Vec2 center, double lo, double hi, RandomStream& rng) {
  for (int attempt = 0; attempt < 100000; ++attempt) {
    const double d = rng.uniform(lo, hi);
    const double a = rng.uniform(0, 2 * kPi);
    const Vec2 p{center.x + d * std::cos(a), center.y + d * std::sin(a)};
    if (room.contains(p)) return p;
  }
  throw ValidationError("three_region_surface: distance bin unreachable inside the room");
}

inline double max_center_distance(const RoomSpec& room, Vec2 c) {
  const double dx = std::max(c.x, room.width - c.x), dy = std::max(c.y, room.depth - c.y);
  return std::sqrt(dx * dx + dy * dy);
}

}  // namespace detail

/// Receiver pair for sample k of cell (i, j), i <= j; receiver 1 sits in bin i.
inline std::pair<Vec2, Vec2> region_pair(const RoomSpec& room, Vec2 center, double bin_width,
                                         std::size_t i, std::size_t j, std::uint64_t seed,
                                         std::uint64_t k) {
  const double dmax = detail::max_center_distance(room, center);
  const std::uint64_t cell = (static_cast<std::uint64_t>(i) << 32) | static_cast<std::uint64_t>(j);
  RandomStream rng(seed ^ splitmix64(cell), streams::kThreeRegion, k);
  auto bin = [&](std::size_t b) {
    return std::pair{b * bin_width, std::min((b + 1) * bin_width, dmax)};
  };
  const auto [lo1, hi1] = bin(i);
  const auto [lo2, hi2] = bin(j);
  const Vec2 a = detail::point_at_distance(room, center, lo1, hi1, rng);
  const Vec2 b = detail::point_at_distance(room, center, lo2, hi2, rng);
  return {a, b};
}

/// Mean SIR per (d1, d2) bin pair. The surface is computed for d1 <= d2 and mirrored.
inline std::vector<RegionCell> three_region_surface(std::span<const TransmitterBoard> boards,
                                                    const RoomSpec& room, Vec2 center, int n_samples,
                                                    std::uint64_t seed, const PlacementProtocol& proto,
                                                    double bin_width = 0.25, unsigned threads = 1) {
  require(n_samples >= 1, "three_region_surface: n_samples must be >= 1");
  require(bin_width > 0, "three_region_surface: bin width must be positive");
  const double dmax = detail::max_center_distance(room, center);
  const auto nb = static_cast<std::size_t>(std::ceil(dmax / bin_width - 1e-9));
  std::vector<std::pair<std::size_t, std::size_t>> cells;
  for (std::size_t i = 0; i < nb; ++i)
    for (std::size_t j = i; j < nb; ++j) cells.emplace_back(i, j);
  std::vector<double> mean(cells.size());
  parallel_for(cells.size(), threads, [&](std::size_t c) {
    const auto [i, j] = cells[c];
    double sum = 0.0;
    for (int k = 0; k < n_samples; ++k) {
      const auto [a, b] = region_pair(room, center, bin_width, i, j, seed, static_cast<std::uint64_t>(k));
      sum += evaluate_pair(boards, room, a, b, proto).clamped_average;
    }
    mean[c] = sum / n_samples;
  });
  std::vector<RegionCell> out;
  out.reserve(nb * nb);
  for (std::size_t c = 0; c < cells.size(); ++c) {
    const auto [i, j] = cells[c];
    auto center_of = [&](std::size_t b) { return (b + 0.5) * bin_width; };
    out.push_back({i, j, center_of(i), center_of(j), mean[c], to_db(mean[c])});
    if (i != j) out.push_back({j, i, center_of(j), center_of(i), mean[c], to_db(mean[c])});
  }
  std::sort(out.begin(), out.end(), [](const RegionCell& x, const RegionCell& y) {
    return x.bin1 != y.bin1 ? x.bin1 < y.bin1 : x.bin2 < y.bin2;
  });
  return out;
}

inline void write_three_region_csv(std::ostream& out, std::span<const RegionCell> cells) {
  out << "d1,d2,mean_sir_db\n";
  char buf[96];
  for (const auto& c : cells) {
    std::snprintf(buf, sizeof buf, "%.4f,%.4f,%.4f\n", c.d1, c.d2, c.mean_sir_db);
    out << buf;
  }
}

// ---------------------------------------------------------------------------------------------
// Electrical SINR with shot and thermal noise.

struct NoiseModel {
  double responsivity{0.54};            // A/W
  double shot_coefficient{1.7303507647e-19};  // A^2 / (W Hz), 2 q R
  double thermal_variance{1e-14};       // A^2
  double bandwidth{10e6};               // Hz
  double ambient_power{0.0};            // W

  void validate() const {
    require(responsivity >= 0 && shot_coefficient >= 0 && thermal_variance >= 0 && bandwidth >= 0 &&
                ambient_power >= 0,
            "noise parameters must be non-negative");
  }

  double variance(double total_optical_w) const {
    return shot_coefficient * (total_optical_w + ambient_power) * bandwidth + thermal_variance;
  }
};

inline double sinr_linear(double signal_w, std::span<const double> interferers_w, const NoiseModel& noise) {
  double total = signal_w, interference = 0.0;
  for (double p : interferers_w) {
    total += p;
    const double i = noise.responsivity * p;
    interference += i * i;
  }
  const double s = noise.responsivity * signal_w;
  return s * s / (noise.variance(total) + interference);
}

/// SINR in dB at gain column `col`, served by the `serving` rows with one interference term per
/// `interfering` row.
inline double sinr_at(const GainMatrix& g, std::span<const TransmitterBoard> boards, std::size_t col,
                      std::span<const std::size_t> serving, std::span<const std::size_t> interfering,
                      const NoiseModel& noise) {
  for (std::size_t s : serving)
    require(std::find(interfering.begin(), interfering.end(), s) == interfering.end(),
            "sinr_at: serving and interfering sets overlap");
  const double signal = received_power(boards, g, col, serving);
  std::vector<double> interferers;
  for (std::size_t r : interfering) interferers.push_back(received_power(boards, g, col, std::span(&r, 1)));
  return to_db(sinr_linear(signal, interferers, noise));
}

struct Branch {
  double signal_w{0};
  double interference_w{0};  // root-sum-square of per-interferer powers
  double noise_a2{0};
};

inline Branch make_branch(double signal_w, std::span<const double> interferers_w, const NoiseModel& noise) {
  double total = signal_w, sq = 0.0;
  for (double p : interferers_w) {
    total += p;
    sq += p * p;
  }
  return {signal_w, std::sqrt(sq), noise.variance(total)};
}

inline double branch_sinr(const Branch& b, const NoiseModel& noise) {
  const double s = noise.responsivity * b.signal_w;
  const double i = noise.responsivity * b.interference_w;
  return s * s / (b.noise_a2 + i * i);
}

/// Maximal-ratio combining: branch SINRs add.
inline double combine_optimal_linear(std::span<const Branch> branches, const NoiseModel& noise) {
  require(!branches.empty(), "combine_optimal needs at least one branch");
  double sum = 0.0;
  for (const auto& b : branches) sum += branch_sinr(b, noise);
  return sum;
}

inline double combine_optimal(std::span<const Branch> branches, const NoiseModel& noise) {
  return to_db(combine_optimal_linear(branches, noise));
}

// ---------------------------------------------------------------------------------------------
// Floor surveys and distributions.

struct IlluminationStats {
  double mean{0};
  double stddev{0};
  double min{0};
  double max{0};
  double variance() const { return stddev * stddev; }
};

/// Population statistics over the map cells (two-pass).
inline IlluminationStats illumination_stats(std::span<const double> values) {
  require(!values.empty(), "illumination_stats: empty map");
  double sum = 0.0;
  for (double v : values) sum += v;
  const double n = static_cast<double>(values.size());
  const double mean = sum / n;
  double ss = 0.0;
  for (double v : values) ss += (v - mean) * (v - mean);
  const auto [lo, hi] = std::minmax_element(values.begin(), values.end());
  return {mean, std::sqrt(ss / n), *lo, *hi};
}

inline IlluminationStats illumination_stats(const IrradianceMap& map) { return illumination_stats(map.values); }

class EmpiricalCdf {
 public:
  explicit EmpiricalCdf(std::vector<double> values) : v_(std::move(values)) {
    require(!v_.empty(), "EmpiricalCdf: no samples");
    std::sort(v_.begin(), v_.end());
  }

  std::size_t size() const { return v_.size(); }
  const std::vector<double>& sorted() const { return v_; }
  double probability(std::size_t i) const { return static_cast<double>(i + 1) / static_cast<double>(v_.size()); }

  /// Fraction of samples <= x.
  double operator()(double x) const {
    return static_cast<double>(std::upper_bound(v_.begin(), v_.end(), x) - v_.begin()) /
           static_cast<double>(v_.size());
  }

  double median() const {
    const std::size_t n = v_.size();
    return n % 2 ? v_[n / 2] : 0.5 * (v_[n / 2 - 1] + v_[n / 2]);
  }

  /// True when every quantile of *this is <= the same quantile of `other` (equal sample counts).
  bool dominated_by(const EmpiricalCdf& other) const {
    require(other.size() == size(), "dominated_by: sample counts differ");
    for (std::size_t i = 0; i < v_.size(); ++i)
      if (v_[i] > other.v_[i]) return false;
    return true;
  }

 private:
  std::vector<double> v_;
};

inline void write_cdf_csv(std::ostream& out, const EmpiricalCdf& cdf) {
  out << "sinr_db,cumulative_probability\n";
  char buf[96];
  for (std::size_t i = 0; i < cdf.size(); ++i) {
    std::snprintf(buf, sizeof buf, "%.4f,%.6f\n", cdf.sorted()[i], cdf.probability(i));
    out << buf;
  }
}

enum class Scenario { S1, S2, S2Combined };

inline const char* scenario_name(Scenario s) {
  switch (s) {
    case Scenario::S1: return "S1";
    case Scenario::S2: return "S2";
    case Scenario::S2Combined: return "S2_combined";
  }
  return "?";
}

struct SinrSample {
  Vec2 position;
  double s1_db{0};
  double s2_db{0};
  double s2_combined_db{0};

  double value(Scenario s) const {
    switch (s) {
      case Scenario::S1: return s1_db;
      case Scenario::S2: return s2_db;
      case Scenario::S2Combined: return s2_combined_db;
    }
    return 0.0;
  }
};

struct SinrSurveyConfig {
  double receiver_height{0.85};
  /// Element 0 is the single-PD receiver used by S1 and S2; all elements feed S2_combined.
  std::vector<PdElement> elements{angle_diversity_elements()};
  NoiseModel noise;
  CoverageGate gate{CoverageGate::Fov};
  int reflection_order{4};  // 0 disables reflections
  double patch_size{0.25};
  unsigned threads{1};
};

namespace detail {

/// Scenario SINRs at one point from per-element received powers pw[e][board].
inline SinrSample scenario_sinr(const std::vector<std::vector<double>>& pw,
                                std::span<const TransmitterBoard> boards, const NoiseModel& noise) {
  const std::size_t nb = boards.size();
  const std::vector<double>& p0 = pw[0];
  std::vector<double> others;
  others.reserve(nb);
  SinrSample out;

  // S1: serve with the best whole cluster (group).
  std::vector<int> groups;
  for (const auto& b : boards)
    if (std::find(groups.begin(), groups.end(), b.group) == groups.end()) groups.push_back(b.group);
  double best = -1.0;
  for (int grp : groups) {
    double sig = 0.0;
    others.clear();
    for (std::size_t b = 0; b < nb; ++b) {
      if (boards[b].group == grp) sig += p0[b];
      else others.push_back(p0[b]);
    }
    best = std::max(best, sinr_linear(sig, others, noise));
  }
  out.s1_db = to_db(best);

  // S2: serve with the best single LED, every other LED interferes.
  // S2_combined: same serving rule, judged by the combined SINR over all elements.
  auto single = [&](const std::vector<double>& p, std::size_t k) {
    others.clear();
    for (std::size_t b = 0; b < nb; ++b)
      if (b != k) others.push_back(p[b]);
    return make_branch(p[k], others, noise);
  };
  double best2 = -1.0, best2c = -1.0;
  std::vector<Branch> branches(pw.size());
  for (std::size_t k = 0; k < nb; ++k) {
    others.clear();
    for (std::size_t b = 0; b < nb; ++b)
      if (b != k) others.push_back(p0[b]);
    best2 = std::max(best2, sinr_linear(p0[k], others, noise));
    for (std::size_t e = 0; e < pw.size(); ++e) branches[e] = single(pw[e], k);
    best2c = std::max(best2c, combine_optimal_linear(branches, noise));
  }
  out.s2_db = to_db(best2);
  out.s2_combined_db = to_db(best2c);
  return out;
}

}  // namespace detail

/// Evaluates all three scenarios on the room's floor grid, lifted to the receiver height.
inline std::vector<SinrSample> sinr_survey(std::span<const TransmitterBoard> boards, const RoomSpec& room,
                                           const SinrSurveyConfig& cfg) {
  room.validate();
  cfg.noise.validate();
  require(!cfg.elements.empty(), "sinr_survey: receiver needs at least one element");
  require(!boards.empty(), "sinr_survey: no transmitters");
  require(cfg.reflection_order >= 0 && cfg.reflection_order <= 4, "reflection_order must lie in [0, 4]");
  const FloorGrid grid = FloorGrid::over(room, cfg.receiver_height);
  std::optional<SurfaceMesh> mesh;
  std::optional<ReflectionField> field;
  if (cfg.reflection_order > 0) {
    mesh = build_surface_mesh(room, cfg.patch_size);
    field.emplace(boards, *mesh, cfg.reflection_order, cfg.threads);
  }
  const auto orders = lambertian_orders(boards);
  std::vector<SinrSample> out(grid.size());
  parallel_for(grid.size(), cfg.threads, [&](std::size_t idx) {
    const Vec3 pos = grid.point(idx);
    std::vector<std::vector<double>> pw(cfg.elements.size(), std::vector<double>(boards.size()));
    std::vector<double> refl(boards.size(), 0.0);
    for (std::size_t e = 0; e < cfg.elements.size(); ++e) {
      if (field) field->gains_to(cfg.elements[e], pos, cfg.gate, refl);
      for (std::size_t b = 0; b < boards.size(); ++b)
        pw[e][b] = received_power(boards[b], los_gain(boards[b], orders[b], cfg.elements[e], pos, cfg.gate),
                                  refl[b]);
    }
    out[idx] = detail::scenario_sinr(pw, boards, cfg.noise);
    out[idx].position = pos.xy();
  });
  return out;
}

inline EmpiricalCdf sinr_cdf(std::span<const SinrSample> samples, Scenario scenario) {
  std::vector<double> v;
  v.reserve(samples.size());
  for (const auto& s : samples) v.push_back(s.value(scenario));
  return EmpiricalCdf(std::move(v));
}

}  // namespace vlc
