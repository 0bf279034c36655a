#include <gtest/gtest.h>

#include <cmath>
#include <limits>
#include <sstream>

#include "vlc/optimizer.hpp"

using namespace vlc;

namespace {

BulbDesign base_bulb() {
  BulbDesign d;
  d.center = {3, 3, 3};
  d.layers = {{0, 1, 0}, {35, 8, 0}, {60, 8, 0}};
  d.half_intensity_angle_deg = 60;
  d.divergence_angle_deg = 20;
  d.power_per_board = 0.02;
  return d;
}

EvalProtocol protocol(int placements = 40) {
  EvalProtocol p;
  p.room = RoomSpec{6, 6, 3};
  p.room.floor_grid_resolution = 0.5;
  p.placement.placements = placements;
  p.placement.gate = CoverageGate::Both;
  p.placement.fov_deg = 60;
  p.placement.seed = 3;
  return p;
}

// 1 x {4, 8} x {4, 8} boards and three divergences: 12 points.
DesignSpace toy_space() {
  DesignSpace s;
  s.base = base_bulb();
  s.boards_per_layer = {{1, 1, 1}, {4, 8, 4}, {4, 8, 4}};
  s.divergence = {20, 40, 10};
  s.per_board_power = 1.0;
  s.power_constraint = 100;
  return s;
}

}  // namespace

TEST(Evaluate, Deterministic) {
  const auto a = evaluate_design(base_bulb(), protocol());
  const auto b = evaluate_design(base_bulb(), protocol());
  auto p4 = protocol();
  p4.threads = 4;
  const auto c = evaluate_design(base_bulb(), p4);
  EXPECT_EQ(a.mean_sir, b.mean_sir);
  EXPECT_EQ(a.mean_sir, c.mean_sir);
  EXPECT_EQ(a.illumination.stddev, c.illumination.stddev);
  EXPECT_EQ(a.mean_sir_db, to_db(a.mean_sir));
}

TEST(Evaluate, UncoveredPlacementScoresMinusInfinity) {
  auto narrow = base_bulb();
  narrow.divergence_angle_deg = 3;
  const auto e = evaluate_design(narrow, protocol());
  EXPECT_TRUE(e.uncovered);
  EXPECT_EQ(e.objective(Objective::SirOnly), -std::numeric_limits<double>::infinity());
  EXPECT_EQ(e.objective(Objective::SirOverIllumVariance), -std::numeric_limits<double>::infinity());
  auto wide = base_bulb();
  wide.divergence_angle_deg = 90;
  const auto w = evaluate_design(wide, protocol());
  EXPECT_FALSE(w.uncovered);
  EXPECT_TRUE(std::isfinite(w.objective(Objective::SirOnly)));
  EXPECT_DOUBLE_EQ(w.objective(Objective::SirOverIllumVariance), w.mean_sir / w.illumination.variance());
}

TEST(Space, EnumeratesEveryCombination) {
  const auto c = enumerate_candidates(toy_space());
  ASSERT_EQ(c.size(), 12u);
  EXPECT_EQ(c.front().boards_per_layer, (std::vector<int>{1, 4, 4}));
  EXPECT_EQ(c.front().divergence_deg, 20);
  EXPECT_EQ(c.back().boards_per_layer, (std::vector<int>{1, 8, 8}));
  EXPECT_EQ(c.back().divergence_deg, 40);
  EXPECT_EQ(c.back().total_boards, 17);
  EXPECT_EQ((AngleRange{10, 40, 5}.values().size()), 7u);
  EXPECT_EQ((AngleRange{5, 40, 1}.values().back()), 40.0);
}

TEST(GridSearch, MatchesBruteForceOnTwelvePoints) {
  const auto space = toy_space();
  const auto proto = protocol();
  for (auto objective : {Objective::SirOnly, Objective::SirOverIllumVariance}) {
    for (double budget : {9.0, 13.0, 100.0}) {
      auto s = space;
      s.objective = objective;
      s.power_constraint = budget;
      // Independent loop: build each design by hand, keep the best with the declared tie rule.
      double best = -std::numeric_limits<double>::infinity();
      std::vector<int> best_counts;
      double best_div = 0;
      int best_total = 0;
      bool any = false;
      for (int n2 : {4, 8})
        for (int n3 : {4, 8})
          for (double div : {20.0, 30.0, 40.0}) {
            const int total = 1 + n2 + n3;
            if (total * 1.0 > budget) continue;
            BulbDesign d = base_bulb();
            d.layers[1].board_count = n2;
            d.layers[2].board_count = n3;
            d.divergence_angle_deg = div;
            d.power_per_board = 1.0;
            const double v = evaluate_design(d, proto).objective(objective);
            const std::vector<int> counts{1, n2, n3};
            const bool take = !any || v > best ||
                              (v == best && (total < best_total || (total == best_total && div < best_div)));
            if (take) {
              any = true;
              best = v;
              best_counts = counts;
              best_div = div;
              best_total = total;
            }
          }
      const auto r = grid_search(s, proto);
      ASSERT_TRUE(r.feasible);
      EXPECT_EQ(r.boards_per_layer, best_counts);
      EXPECT_EQ(r.divergence_deg, best_div);
      EXPECT_EQ(r.best_objective, best);
      EXPECT_LE(r.best_design.total_boards() * s.per_board_power, budget);
    }
  }
}

TEST(GridSearch, SingletonFeasibleSet) {
  auto s = toy_space();
  s.divergence = {25, 25, 5};
  s.power_constraint = 9;  // only 1 + 4 + 4 fits
  const auto r = grid_search(s, protocol());
  ASSERT_TRUE(r.feasible);
  EXPECT_EQ(r.feasible_count, 1u);
  EXPECT_EQ(r.boards_per_layer, (std::vector<int>{1, 4, 4}));
  EXPECT_EQ(r.divergence_deg, 25);
}

TEST(GridSearch, EmptyFeasibleSetReported) {
  auto s = toy_space();
  s.power_constraint = 8;
  const auto r = grid_search(s, protocol());
  EXPECT_FALSE(r.feasible);
  EXPECT_FALSE(r.message.empty());
}

TEST(GridSearch, OverlappingCandidatesSkipped) {
  auto s = toy_space();
  s.base.layers = {{0, 1, 0}, {20, 4, 0}};  // 16 boards on this ring collide
  s.boards_per_layer = {{1, 1, 1}, {4, 16, 12}};
  const auto cands = evaluate_candidates(s, protocol(10));
  ASSERT_EQ(cands.size(), 6u);
  EXPECT_TRUE(cands[0].buildable);
  EXPECT_FALSE(cands[3].buildable);
  const auto r = select_best(s, cands, 100, Objective::SirOnly);
  EXPECT_EQ(r.feasible_count, 3u);
  EXPECT_EQ(r.boards_per_layer, (std::vector<int>{1, 4}));
}

TEST(GridSearch, ParallelEqualsSequential) {
  auto p1 = protocol();
  auto p4 = protocol();
  p4.threads = 4;
  const auto a = evaluate_candidates(toy_space(), p1);
  const auto b = evaluate_candidates(toy_space(), p4);
  for (std::size_t i = 0; i < a.size(); ++i) EXPECT_EQ(a[i].eval.mean_sir, b[i].eval.mean_sir);
}

TEST(GridSearch, PowerScaleInvariance) {
  auto s = toy_space();
  s.power_constraint = 13;
  const auto a = grid_search(s, protocol());
  s.per_board_power *= 0.02;
  s.power_constraint *= 0.02;
  const auto b = grid_search(s, protocol());
  EXPECT_EQ(a.feasible_count, b.feasible_count);
  EXPECT_EQ(a.boards_per_layer, b.boards_per_layer);
  EXPECT_EQ(a.divergence_deg, b.divergence_deg);
  EXPECT_NEAR(a.best_sir_db, b.best_sir_db, 1e-9);
}

TEST(PowerSweep, FrontierProperties) {
  const std::vector<double> budgets{9, 11, 13, 15, 17, 19};
  const auto rows = power_sweep(toy_space(), budgets, protocol());
  ASSERT_EQ(rows.size(), budgets.size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const auto& r = rows[i];
    EXPECT_LE(r.constrained.best_sir_db, r.unconstrained.best_sir_db);
    if (i) {
      EXPECT_GE(r.unconstrained.best_objective, rows[i - 1].unconstrained.best_objective);
      EXPECT_GE(r.constrained.best_objective, rows[i - 1].constrained.best_objective);
      EXPECT_GE(r.unconstrained.best_sir_db, rows[i - 1].unconstrained.best_sir_db);
    }
  }
  // 17 W fits every board; beyond that nothing changes.
  EXPECT_EQ(rows[4].unconstrained.boards_per_layer, rows[5].unconstrained.boards_per_layer);
  EXPECT_EQ(rows[4].constrained.best_objective, rows[5].constrained.best_objective);
  // Shared evaluation matches per-budget grid searches.
  auto s = toy_space();
  s.power_constraint = 13;
  s.objective = Objective::SirOverIllumVariance;
  EXPECT_EQ(grid_search(s, protocol()).best_objective, rows[2].constrained.best_objective);
  std::ostringstream out;
  write_frontier_csv(out, rows);
  EXPECT_EQ(out.str().substr(0, out.str().find(',')), "budget_w");
}

TEST(PowerSweep, BudgetsMustAscend) {
  const std::vector<double> budgets{10, 9};
  EXPECT_THROW(power_sweep(toy_space(), budgets, protocol(5)), ValidationError);
}

TEST(DivergenceSweep, SingleAngleEqualsEvaluateDesign) {
  const std::vector<double> angles{15}, powers{5};
  const auto rows = divergence_sweep(base_bulb(), angles, powers, protocol());
  ASSERT_EQ(rows.size(), 1u);
  auto d = base_bulb();
  d.divergence_angle_deg = 15;
  d.power_per_board = 5.0 / d.total_boards();
  EXPECT_EQ(rows[0].mean_sir, evaluate_design(d, protocol()).mean_sir);
}

TEST(DivergenceSweep, PowerOrderInvariant) {
  const std::vector<double> angles{10, 20, 30};
  const std::vector<double> p1{5, 10, 20, 25, 50}, p2{50, 20, 5, 25, 10};
  const auto a = divergence_sweep(base_bulb(), angles, p1, protocol(20));
  const auto b = divergence_sweep(base_bulb(), angles, p2, protocol(20));
  for (std::size_t i = 0; i < a.size(); ++i) EXPECT_EQ(a[i].mean_sir, b[i].mean_sir);
  EXPECT_THROW(divergence_sweep(base_bulb(), std::vector<double>{90}, p1, protocol(5)), ValidationError);
}

TEST(RoomSweep, OneRowPerDimension) {
  const std::vector<double> dims{4, 8, 12};
  const auto rows = room_size_sweep(base_bulb(), RoomSpec{6, 6, 3}, dims, protocol(30));
  ASSERT_EQ(rows.size(), 3u);
  for (std::size_t i = 0; i < 3; ++i) EXPECT_EQ(rows[i].x, dims[i]);
  EXPECT_LE(rows[2].mean_sir, rows[0].mean_sir);
  std::ostringstream out;
  write_sweep_csv(out, "floor_dim_m", rows);
  EXPECT_EQ(out.str().substr(0, 24), "floor_dim_m,mean_sir_db\n");
  EXPECT_EQ(argmax_row(std::vector<SweepRow>{{1, 2, 0}, {2, 5, 0}, {3, 5, 0}}), 1u);
}
