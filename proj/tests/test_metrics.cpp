#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "vlc/metrics.hpp"

using namespace vlc;

namespace {

TransmitterBoard board(int id, Vec3 pos, Vec3 dir, double power = 0.02, double divergence = 90, double half = 60) {
  TransmitterBoard b;
  b.id = id;
  b.position = pos;
  b.orientation = dir.normalized();
  b.power = power;
  b.divergence_angle_deg = divergence;
  b.half_intensity_angle_deg = half;
  return b;
}

// Mirror-image pair about the plane x = 3.
std::vector<TransmitterBoard> mirror_pair() {
  return {board(0, {3.2, 3, 2.65}, {0.5, 0, -0.8}), board(1, {2.8, 3, 2.65}, {-0.5, 0, -0.8})};
}

SirReport pair_report(const std::vector<TransmitterBoard>& boards, Vec2 a, Vec2 b, CoverageGate gate,
                      const RoomSpec& room) {
  const std::vector rx{single_pd_receiver(1, {a.x, a.y, 0}), single_pd_receiver(2, {b.x, b.y, 0})};
  const auto g = compute_los_gains(boards, rx, gate);
  return sir_two_receivers(bisector_partition(a, b, boards, room), g, boards, rx);
}

NoiseModel quiet() {
  NoiseModel n;
  n.shot_coefficient = 0;
  n.thermal_variance = 0;
  return n;
}

}  // namespace

TEST(Db, RoundTrip) {
  RandomStream rng(5, 0);
  for (int i = 0; i < 1000; ++i) {
    const double x = std::exp(rng.uniform(-40, 40));
    EXPECT_NEAR(from_db(to_db(x)) / x, 1.0, 1e-12);
  }
  EXPECT_EQ(to_db(100.0), 20.0);
  EXPECT_EQ(format_db(-3.14159), "-3.1416");
}

TEST(Sir, MirrorSymmetricReceiversAgree) {
  RoomSpec room;
  const auto r = pair_report(mirror_pair(), {4.5, 3}, {1.5, 3}, CoverageGate::None, room);
  EXPECT_EQ(r.of(1).status, SirStatus::Finite);
  EXPECT_EQ(r.of(1).sir(), r.of(2).sir());
}

TEST(Sir, HandExpandedTwoBoardFixture) {
  RoomSpec room;
  auto boards = mirror_pair();
  boards[1].power = 0.05;
  boards[1].half_intensity_angle_deg = 45;
  const Vec2 a{4.1, 2.2}, b{1.7, 3.9};
  const auto r = pair_report(boards, a, b, CoverageGate::None, room);
  // Expand S_ij by hand: m = 1 for board 0, m = 2 for board 1, A = pi r^2.
  auto s = [&](const TransmitterBoard& tx, double m, Vec2 p) {
    const Vec3 v = Vec3{p.x, p.y, 0} - tx.position;
    const double d = v.norm();
    const double cphi = tx.orientation.dot(v) / d, cpsi = -v.z / d;
    return tx.power * (m + 1) / (2 * kPi * d * d) * std::pow(cphi, m) * cpsi * kPi * 0.0375 * 0.0375;
  };
  // Board 0 projects toward +x (receiver a), board 1 toward -x (receiver b).
  const double s11 = s(boards[0], 1, a), s12 = s(boards[1], 2, a);
  const double s22 = s(boards[1], 2, b), s21 = s(boards[0], 1, b);
  EXPECT_NEAR(r.of(1).signal_w / s11, 1.0, 1e-12);
  EXPECT_NEAR(r.of(1).interference_w / s12, 1.0, 1e-12);
  EXPECT_NEAR(r.of(1).sir() / (s11 / s12), 1.0, 1e-12);
  EXPECT_NEAR(r.of(2).sir() / (s22 / s21), 1.0, 1e-12);
}

TEST(Sir, ZeroSignalWhenOwnBoardsOutOfCone) {
  RoomSpec room;
  // Narrow cones: board 0 lights only the area near receiver 1, board 1 also points there.
  std::vector boards{board(0, {3, 3, 3}, {0, 0, -1}, 0.02, 10), board(1, {4, 3, 3}, {-1, 0, -3}, 0.02, 10)};
  const auto r = pair_report(boards, {3, 3}, {4.5, 3}, CoverageGate::Divergence, room);
  EXPECT_EQ(r.of(2).status, SirStatus::ZeroSignal);
  EXPECT_EQ(r.of(2).sir(), 0.0);
  EXPECT_EQ(average_sir(r).status, SirStatus::ZeroSignal);
}

TEST(Sir, InfiniteWhenNoInterference) {
  RoomSpec room;
  std::vector boards{board(0, {1, 3, 3}, {0, 0, -1}, 0.02, 10), board(1, {5, 3, 3}, {0, 0, -1}, 0.02, 10)};
  const auto r = pair_report(boards, {1, 3}, {5, 3}, CoverageGate::Divergence, room);
  EXPECT_EQ(r.of(1).status, SirStatus::Infinite);
  EXPECT_EQ(average_sir(r).status, SirStatus::Infinite);
  EXPECT_EQ(clamped_average_sir(r, 20), 100.0);
}

TEST(Sir, PowerScalingLeavesSirUnchanged) {
  RoomSpec room;
  BulbDesign d;
  d.center = {3, 3, 3};
  d.layers = {{0, 1, 0}, {30, 8, 0}, {45, 8, 0}};
  const auto boards = build_bulb(d);
  auto scaled = boards;
  for (auto& b : scaled) b.power *= 37.5;
  const auto r1 = pair_report(boards, {1.2, 4.1}, {4.4, 1.3}, CoverageGate::None, room);
  const auto r2 = pair_report(scaled, {1.2, 4.1}, {4.4, 1.3}, CoverageGate::None, room);
  for (int id : {1, 2}) EXPECT_NEAR(r1.of(id).sir() / r2.of(id).sir(), 1.0, 1e-12);
}

TEST(AverageSirTest, Arithmetic) {
  SirReport r{{{1, 2, 1, SirStatus::Finite}, {2, 4, 1, SirStatus::Finite}}};
  EXPECT_EQ(average_sir(r).value, 3.0);
  SirReport same{{{1, 5, 2, SirStatus::Finite}, {2, 10, 4, SirStatus::Finite}}};
  EXPECT_EQ(average_sir(same).value, 2.5);
  RandomStream rng(9, 9);
  for (int i = 0; i < 200; ++i) {
    const double s1 = rng.uniform(0.1, 5), i1 = rng.uniform(0.1, 5), s2 = rng.uniform(0.1, 5), i2 = rng.uniform(0.1, 5);
    SirReport x{{{1, s1, i1, SirStatus::Finite}, {2, s2, i2, SirStatus::Finite}}};
    EXPECT_NEAR(average_sir(x).value, (s1 / i1 + s2 / i2) / 2, 1e-15);
  }
}

TEST(AverageSirTest, ClampedAverage) {
  SirReport r{{{1, 1000, 1, SirStatus::Finite}, {2, 1, 1000, SirStatus::Finite}}};
  EXPECT_NEAR(clamped_average_sir(r, 20), (100 + 0.01) / 2, 1e-12);
  SirReport z{{{1, 0, 1, SirStatus::ZeroSignal}, {2, 3, 1, SirStatus::Finite}}};
  EXPECT_NEAR(clamped_average_sir(z, 20), (0.01 + 3) / 2, 1e-12);
}

TEST(Placement, DeterministicAndThreadIndependent) {
  RoomSpec room;
  BulbDesign d;
  d.center = {3, 3, 3};
  d.layers = {{0, 1, 0}, {30, 8, 0}, {45, 8, 0}, {70, 8, 0}};
  const auto boards = build_bulb(d);
  PlacementProtocol p;
  p.placements = 64;
  p.gate = CoverageGate::Both;
  p.fov_deg = 60;
  const auto a = mean_pair_sir(boards, room, p, 1);
  const auto b = mean_pair_sir(boards, room, p, 4);
  EXPECT_EQ(a.mean_sir, b.mean_sir);
  EXPECT_EQ(a.zero_signal_placements, b.zero_signal_placements);
  // Oracle: plain loop over the same placements.
  double sum = 0;
  for (int i = 0; i < p.placements; ++i) {
    const auto [x, y] = placement_pair(room, p.seed, static_cast<std::uint64_t>(i));
    EXPECT_TRUE(room.contains(x) && room.contains(y));
    sum += evaluate_pair(boards, room, x, y, p).clamped_average;
  }
  EXPECT_NEAR(a.mean_sir, sum / p.placements, 1e-12 * a.mean_sir);
  p.seed = 2;
  EXPECT_NE(mean_pair_sir(boards, room, p).mean_sir, a.mean_sir);
}

TEST(Sinr, ThermalOnlyTwentyDb) {
  NoiseModel n = quiet();
  n.thermal_variance = 1e-14;
  const double signal = 1e-6 / n.responsivity;
  EXPECT_NEAR(to_db(sinr_linear(signal, {}, n)), 20.0, 1e-9);
}

TEST(Sinr, EqualInterfererZeroDb) {
  const std::vector<double> i{3e-6};
  EXPECT_NEAR(to_db(sinr_linear(3e-6, i, quiet())), 0.0, 1e-12);
  NoiseModel n;
  EXPECT_NEAR(to_db(sinr_linear(3e-3, std::vector<double>{3e-3}, n)), 0.0, 1e-3);
}

TEST(Sinr, BruteForceTermByTerm) {
  RandomStream rng(77, 1);
  for (int trial = 0; trial < 500; ++trial) {
    NoiseModel n;
    n.responsivity = rng.uniform(0.3, 0.7);
    n.thermal_variance = std::exp(rng.uniform(-40, -28));
    n.bandwidth = rng.uniform(1e6, 1e8);
    n.ambient_power = rng.uniform(0, 1e-5);
    const double s = std::exp(rng.uniform(-16, -8));
    std::vector<double> in(static_cast<std::size_t>(rng.uniform(0, 6)));
    for (auto& v : in) v = std::exp(rng.uniform(-16, -8));
    double total = s + n.ambient_power, interf = 0;
    for (double v : in) {
      total += v;
      interf += (n.responsivity * v) * (n.responsivity * v);
    }
    const double shot = 2 * 1.602176634e-19 * n.responsivity;
    n.shot_coefficient = shot;
    const double oracle = (n.responsivity * s) * (n.responsivity * s) / (shot * total * n.bandwidth + n.thermal_variance + interf);
    EXPECT_NEAR(sinr_linear(s, in, n) / oracle, 1.0, 1e-9);
  }
}

TEST(Sinr, DefaultShotCoefficientIsTwoQR) {
  EXPECT_NEAR(NoiseModel{}.shot_coefficient / (2 * 1.602176634e-19 * 0.54), 1.0, 1e-9);
}

TEST(Sinr, RemovingAnInterfererNeverHurts) {
  RandomStream rng(4, 4);
  NoiseModel n;
  for (int trial = 0; trial < 300; ++trial) {
    std::vector<double> in(5);
    for (auto& v : in) v = rng.uniform(0, 1e-5);
    const double s = rng.uniform(0, 1e-5);
    const double full = sinr_linear(s, in, n);
    for (std::size_t k = 0; k < in.size(); ++k) {
      auto fewer = in;
      fewer.erase(fewer.begin() + static_cast<long>(k));
      EXPECT_GE(sinr_linear(s, fewer, n), full);
    }
  }
}

TEST(Sinr, AtUsesGainMatrixRows) {
  std::vector boards{board(0, {1, 1, 3}, {0, 0, -1}, 1.0), board(1, {2, 1, 3}, {0, 0, -1}, 1.0),
                     board(2, {3, 1, 3}, {0, 0, -1}, 1.0)};
  const std::vector rx{single_pd_receiver(1, {1.5, 1, 0.85})};
  const auto g = compute_los_gains(boards, rx, CoverageGate::Fov);
  NoiseModel n;
  const std::vector<std::size_t> serving{0}, interfering{1, 2};
  const std::vector<double> p{g.los[1], g.los[2]};
  EXPECT_DOUBLE_EQ(sinr_at(g, boards, 0, serving, interfering, n), to_db(sinr_linear(g.los[0], p, n)));
  const std::vector<std::size_t> overlap{0, 1};
  EXPECT_THROW(sinr_at(g, boards, 0, serving, overlap, n), ValidationError);
}

TEST(Combine, SevenEqualBranches) {
  NoiseModel n;
  const Branch b = make_branch(2e-6, std::vector<double>{1e-6, 5e-7}, n);
  const std::vector<Branch> seven(7, b);
  EXPECT_NEAR(combine_optimal(seven, n) - to_db(branch_sinr(b, n)), 10 * std::log10(7.0), 1e-12);
  EXPECT_NEAR(10 * std::log10(7.0), 8.45, 0.005);
}

TEST(Combine, ShadowedBranchesContributeNothing) {
  NoiseModel n;
  std::vector<Branch> br{make_branch(2e-6, std::vector<double>{1e-6}, n)};
  const double single = combine_optimal(br, n);
  EXPECT_EQ(single, to_db(branch_sinr(br[0], n)));
  for (int i = 0; i < 6; ++i) br.push_back(make_branch(0.0, std::vector<double>{1e-6}, n));
  EXPECT_EQ(combine_optimal(br, n), single);
}

TEST(Combine, PermutationInvariant) {
  NoiseModel n;
  RandomStream rng(6, 6);
  std::vector<Branch> br;
  for (int i = 0; i < 7; ++i) br.push_back(make_branch(rng.uniform(0, 1e-5), std::vector<double>{rng.uniform(0, 1e-5)}, n));
  const double base = combine_optimal(br, n);
  std::reverse(br.begin(), br.end());
  EXPECT_NEAR(combine_optimal(br, n), base, 1e-12);
  std::rotate(br.begin(), br.begin() + 3, br.end());
  EXPECT_NEAR(combine_optimal(br, n), base, 1e-12);
}

TEST(Combine, WeightGridOracle) {
  // Combined SINR for weights w: (sum w_e R s_e)^2 / sum w_e^2 (noise_e + (R I_e)^2).
  NoiseModel n;
  RandomStream rng(1234, streams::kBranches);
  for (int set = 0; set < 100; ++set) {
    const int k = 2 + set % 2;
    std::vector<Branch> br;
    for (int e = 0; e < k; ++e) {
      std::vector<double> in(2);
      for (auto& v : in) v = std::exp(rng.uniform(-15, -11));
      br.push_back(make_branch(std::exp(rng.uniform(-14, -10)), in, n));
    }
    auto value = [&](const std::vector<double>& w) {
      double num = 0, den = 0;
      for (int e = 0; e < k; ++e) {
        num += w[e] * n.responsivity * br[e].signal_w;
        const double i = n.responsivity * br[e].interference_w;
        den += w[e] * w[e] * (br[e].noise_a2 + i * i);
      }
      return den > 0 ? num * num / den : 0.0;
    };
    // Per-branch weights on {0} and a log grid over [1e-3, 1], 20 points per decade.
    std::vector<double> grid{0.0};
    for (int i = 0; i <= 60; ++i) grid.push_back(std::pow(10.0, -3.0 + i / 20.0));
    double best = 0;
    std::vector<double> w(k);
    std::vector<std::size_t> idx(k, 0);
    while (true) {
      for (int e = 0; e < k; ++e) w[e] = grid[idx[e]];
      best = std::max(best, value(w));
      int e = 0;
      while (e < k && ++idx[e] == grid.size()) idx[e++] = 0;
      if (e == k) break;
    }
    const double combined = combine_optimal(br, n);
    EXPECT_LE(to_db(best), combined + 1e-9);
    EXPECT_NEAR(to_db(best), combined, 0.1) << set;
  }
}

TEST(Illumination, UniformAndTwoCell) {
  const std::vector<double> c(10, 0.7);
  const auto u = illumination_stats(c);
  EXPECT_DOUBLE_EQ(u.mean, 0.7);
  EXPECT_NEAR(u.stddev, 0.0, 1e-15);
  EXPECT_EQ(u.min, 0.7);
  EXPECT_EQ(u.max, 0.7);
  const auto t = illumination_stats(std::vector<double>{1, 3});
  EXPECT_EQ(t.mean, 2.0);
  EXPECT_EQ(t.stddev, 1.0);
  EXPECT_EQ(t.variance(), 1.0);
}

TEST(Illumination, StreamingOracle) {
  RandomStream rng(10, 10);
  for (int trial = 0; trial < 20; ++trial) {
    std::vector<double> v(500 + trial * 37);
    for (auto& x : v) x = rng.uniform(0, 2);
    // Welford's single-pass update.
    double mean = 0, m2 = 0;
    for (std::size_t i = 0; i < v.size(); ++i) {
      const double d = v[i] - mean;
      mean += d / static_cast<double>(i + 1);
      m2 += d * (v[i] - mean);
    }
    const auto s = illumination_stats(v);
    EXPECT_NEAR(s.mean, mean, 1e-12 * mean);
    EXPECT_NEAR(s.stddev, std::sqrt(m2 / static_cast<double>(v.size())), 1e-12);
    EXPECT_EQ(s.min, *std::min_element(v.begin(), v.end()));
  }
  EXPECT_THROW(illumination_stats(std::vector<double>{}), ValidationError);
}

TEST(Cdf, MonotoneFromZeroToOne) {
  RandomStream rng(1, 2);
  std::vector<double> v(101);
  for (auto& x : v) x = rng.uniform(-30, 30);
  const EmpiricalCdf cdf(v);
  EXPECT_EQ(cdf(-31), 0.0);
  EXPECT_EQ(cdf(31), 1.0);
  double prev = 0;
  for (double x = -31; x <= 31; x += 0.1) {
    EXPECT_GE(cdf(x), prev);
    prev = cdf(x);
  }
  for (std::size_t i = 1; i < cdf.size(); ++i) EXPECT_GT(cdf.probability(i), cdf.probability(i - 1));
  EXPECT_EQ(cdf.probability(cdf.size() - 1), 1.0);
  auto sorted = v;
  std::sort(sorted.begin(), sorted.end());
  EXPECT_EQ(cdf.median(), sorted[50]);
  EXPECT_EQ(EmpiricalCdf({4, 1, 3, 2}).median(), 2.5);
}

TEST(Cdf, Dominance) {
  const EmpiricalCdf low({1, 2, 3}), high({1.5, 2, 4});
  EXPECT_TRUE(low.dominated_by(high));
  EXPECT_FALSE(high.dominated_by(low));
  std::ostringstream out;
  write_cdf_csv(out, low);
  EXPECT_EQ(out.str(), "sinr_db,cumulative_probability\n1.0000,0.333333\n2.0000,0.666667\n3.0000,1.000000\n");
}

TEST(ThreeRegion, SymmetricAndSingleSampleCrossCheck) {
  RoomSpec room{4, 4, 3};
  BulbDesign d;
  d.center = room.ceiling_center();
  d.layers = {{30, 11, 0}, {50, 17, 0}};
  d.divergence_angle_deg = 45;
  const auto boards = build_bulb(d);
  PlacementProtocol p;
  p.gate = CoverageGate::Both;
  p.fov_deg = 60;
  const Vec2 c = room.floor_center();
  const double bw = 0.5;
  const auto cells = three_region_surface(boards, room, c, 1, 5, p, bw, 4);
  const std::size_t nb = static_cast<std::size_t>(std::ceil(std::sqrt(8.0) / bw));
  ASSERT_EQ(cells.size(), nb * nb);
  for (const auto& cell : cells) {
    const auto& mirror = cells[cell.bin2 * nb + cell.bin1];
    EXPECT_EQ(cell.mean_sir, mirror.mean_sir);
    EXPECT_EQ(cell.d1, mirror.d2);
    if (cell.bin1 > cell.bin2) continue;
    // Single sample: rebuild the pair and score it directly.
    const auto [a, b] = region_pair(room, c, bw, cell.bin1, cell.bin2, 5, 0);
    EXPECT_GE((a - c).norm(), cell.bin1 * bw);
    EXPECT_LE((a - c).norm(), (cell.bin1 + 1) * bw);
    EXPECT_GE((b - c).norm(), cell.bin2 * bw);
    const std::vector rx{single_pd_receiver(1, {a.x, a.y, 0}, p.aperture_radius, p.fov_deg),
                         single_pd_receiver(2, {b.x, b.y, 0}, p.aperture_radius, p.fov_deg)};
    const auto g = compute_los_gains(boards, rx, p.gate);
    const auto rep = sir_two_receivers(bisector_partition(a, b, boards, room), g, boards, rx);
    EXPECT_EQ(cell.mean_sir, clamped_average_sir(rep, p.sir_cap_db));
  }
  EXPECT_EQ(three_region_surface(boards, room, c, 1, 5, p, bw, 1)[3].mean_sir, cells[3].mean_sir);
  std::ostringstream out;
  write_three_region_csv(out, cells);
  EXPECT_EQ(out.str().substr(0, 19), "d1,d2,mean_sir_db\n0");
}

namespace {

std::vector<TransmitterBoard> two_clusters(const RoomSpec& room, ClusterType type) {
  FlatClusterSpec s;
  s.cluster_type = type;
  return build_cluster_grid(room, s, 2, 1);
}

SinrSurveyConfig small_survey() {
  SinrSurveyConfig c;
  c.elements = angle_diversity_elements(40, 6, 0.0375, 40);
  c.reflection_order = 2;
  c.patch_size = 0.5;
  c.threads = 2;
  return c;
}

}  // namespace

TEST(Survey, ScenarioOrdering) {
  RoomSpec room{6, 4, 3};
  room.floor_grid_resolution = 0.5;
  for (auto type : {ClusterType::ThreeLed, ClusterType::SevenLed}) {
    const auto boards = two_clusters(room, type);
    const auto samples = sinr_survey(boards, room, small_survey());
    ASSERT_EQ(samples.size(), 96u);
    for (const auto& s : samples) {
      EXPECT_LE(s.s2_db, s.s1_db + 1e-12);
      EXPECT_GE(s.s2_combined_db, s.s2_db - 1e-12);
    }
    EXPECT_TRUE(sinr_cdf(samples, Scenario::S2).dominated_by(sinr_cdf(samples, Scenario::S1)));
  }
}

TEST(Survey, SingletonClustersMakeS1EqualS2) {
  RoomSpec room{6, 4, 3};
  room.floor_grid_resolution = 0.5;
  auto boards = two_clusters(room, ClusterType::SevenLed);
  for (std::size_t i = 0; i < boards.size(); ++i) boards[i].group = static_cast<int>(i);
  for (const auto& s : sinr_survey(boards, room, small_survey())) EXPECT_EQ(s.s1_db, s.s2_db);
}

TEST(Survey, ThreadIndependent) {
  RoomSpec room{6, 4, 3};
  room.floor_grid_resolution = 0.5;
  const auto boards = two_clusters(room, ClusterType::ThreeLed);
  auto c = small_survey();
  const auto a = sinr_survey(boards, room, c);
  c.threads = 1;
  const auto b = sinr_survey(boards, room, c);
  for (std::size_t i = 0; i < a.size(); ++i) EXPECT_EQ(a[i].s2_combined_db, b[i].s2_combined_db);
}
