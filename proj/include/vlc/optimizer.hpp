// Exhaustive bulb design search under a power budget, plus the room-size and divergence sweeps.
#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include "vlc/channel.hpp"
#include "vlc/error.hpp"
#include "vlc/geometry.hpp"
#include "vlc/metrics.hpp"
#include "vlc/parallel.hpp"

namespace vlc {

enum class Objective { SirOnly, SirOverIllumVariance };

struct EvalProtocol {
  RoomSpec room;
  PlacementProtocol placement;
  unsigned threads{1};
};

struct DesignEvaluation {
  double mean_sir{0};  // linear
  double mean_sir_db{0};
  bool zero_signal{false};  // some placement had a ZERO_SIGNAL receiver
  bool uncovered{false};    // some placement had a receiver outside every board's coverage
  IlluminationStats illumination;

  double objective(Objective kind) const {
    if (uncovered) return -std::numeric_limits<double>::infinity();
    if (kind == Objective::SirOnly) return mean_sir;
    return mean_sir / illumination.variance();
  }
};

inline DesignEvaluation evaluate_design(const BulbDesign& design, const EvalProtocol& protocol) {
  const auto boards = build_bulb(design);
  const PlacementSummary s = mean_pair_sir(boards, protocol.room, protocol.placement, protocol.threads);
  DesignEvaluation e;
  e.mean_sir = s.mean_sir;
  e.mean_sir_db = s.mean_sir_db;
  e.zero_signal = s.zero_signal_placements > 0;
  e.uncovered = s.uncovered_placements > 0;
  e.illumination = illumination_stats(floor_irradiance_map(boards, protocol.room, protocol.threads));
  return e;
}

struct IntRange {
  int min{1};
  int max{1};
  int step{1};
};

struct AngleRange {
  double min{10};
  double max{40};
  double step{5};

  std::vector<double> values() const {
    std::vector<double> v;
    for (int k = 0;; ++k) {
      const double a = min + k * step;
      if (a > max + 1e-9) break;
      v.push_back(a);
    }
    return v;
  }
};

struct DesignSpace {
  BulbDesign base;  // center, radius, layer elevations/offsets, optics; counts and divergence vary
  std::vector<IntRange> boards_per_layer;
  AngleRange divergence;
  double power_constraint{25};
  double per_board_power{1};
  Objective objective{Objective::SirOnly};

  void validate() const {
    require(!boards_per_layer.empty(), "design space needs at least one layer range");
    require(boards_per_layer.size() == base.layers.size(),
            "boards_per_layer must have one range per base layer");
    for (const auto& r : boards_per_layer)
      require(r.min >= 1 && r.max >= r.min && r.step > 0, "boards_per_layer ranges must be non-empty");
    require(divergence.step > 0 && divergence.max >= divergence.min && divergence.min > 0,
            "divergence range must be non-empty with positive step");
    require(power_constraint > 0, "power_constraint must be positive");
    require(per_board_power > 0, "per_board_power must be positive");
  }
};

struct Candidate {
  std::vector<int> boards_per_layer;
  double divergence_deg{0};
  int total_boards{0};
  bool buildable{true};  // false when boards would overlap
  DesignEvaluation eval;

  double power(double per_board) const { return total_boards * per_board; }
};

inline BulbDesign design_for(const DesignSpace& space, const Candidate& c) {
  BulbDesign d = space.base;
  for (std::size_t i = 0; i < d.layers.size(); ++i) d.layers[i].board_count = c.boards_per_layer[i];
  d.divergence_angle_deg = c.divergence_deg;
  d.power_per_board = space.per_board_power;
  return d;
}

/// Every (boards per layer x divergence) combination, in lexicographic order. Budget is ignored.
inline std::vector<Candidate> enumerate_candidates(const DesignSpace& space) {
  space.validate();
  std::vector<std::vector<int>> counts{{}};
  for (const auto& r : space.boards_per_layer) {
    std::vector<std::vector<int>> next;
    for (const auto& prefix : counts)
      for (int n = r.min; n <= r.max; n += r.step) {
        auto v = prefix;
        v.push_back(n);
        next.push_back(std::move(v));
      }
    counts = std::move(next);
  }
  std::vector<Candidate> out;
  for (const auto& c : counts)
    for (double div : space.divergence.values()) {
      Candidate cand;
      cand.boards_per_layer = c;
      cand.divergence_deg = div;
      for (int n : c) cand.total_boards += n;
      out.push_back(std::move(cand));
    }
  return out;
}

/// Evaluates every candidate once; candidates run in parallel, each evaluation sequentially.
inline std::vector<Candidate> evaluate_candidates(const DesignSpace& space, const EvalProtocol& protocol) {
  auto cands = enumerate_candidates(space);
  EvalProtocol inner = protocol;
  inner.threads = 1;
  parallel_for(cands.size(), protocol.threads, [&](std::size_t i) {
    try {
      cands[i].eval = evaluate_design(design_for(space, cands[i]), inner);
    } catch (const ValidationError&) {
      cands[i].buildable = false;
    }
  });
  return cands;
}

struct OptimResult {
  bool feasible{false};
  std::string message;
  BulbDesign best_design;
  std::vector<int> boards_per_layer;
  double divergence_deg{0};
  double best_objective{-std::numeric_limits<double>::infinity()};
  double best_sir_db{-std::numeric_limits<double>::infinity()};
  double illum_std{0};
  double illum_variance{0};
  std::size_t feasible_count{0};
};

namespace detail {

inline bool within_budget(const Candidate& c, double per_board, double budget) {
  return c.buildable && c.power(per_board) <= budget * (1.0 + 1e-12);
}

/// Strict ordering: higher objective, then fewer boards, smaller divergence, smaller counts.
inline bool better(const Candidate& a, double oa, const Candidate& b, double ob) {
  if (oa != ob) return oa > ob;
  if (a.total_boards != b.total_boards) return a.total_boards < b.total_boards;
  if (a.divergence_deg != b.divergence_deg) return a.divergence_deg < b.divergence_deg;
  return a.boards_per_layer < b.boards_per_layer;
}

}  // namespace detail

/// Picks the best evaluated candidate under `budget` for `objective`.
inline OptimResult select_best(const DesignSpace& space, std::span<const Candidate> cands, double budget,
                               Objective objective) {
  OptimResult r;
  const Candidate* best = nullptr;
  double best_obj = 0.0;
  for (const auto& c : cands) {
    if (!detail::within_budget(c, space.per_board_power, budget)) continue;
    ++r.feasible_count;
    const double o = c.eval.objective(objective);
    if (!best || detail::better(c, o, *best, best_obj)) {
      best = &c;
      best_obj = o;
    }
  }
  if (!best) {
    r.message = "no design fits the power budget of " + std::to_string(budget) + " W";
    return r;
  }
  r.feasible = true;
  r.best_design = design_for(space, *best);
  r.boards_per_layer = best->boards_per_layer;
  r.divergence_deg = best->divergence_deg;
  r.best_objective = best_obj;
  r.best_sir_db = std::isfinite(best_obj) ? best->eval.mean_sir_db : -std::numeric_limits<double>::infinity();
  r.illum_std = best->eval.illumination.stddev;
  r.illum_variance = best->eval.illumination.variance();
  if (!std::isfinite(best_obj)) r.message = "every design within budget leaves some placement without signal";
  return r;
}

inline OptimResult grid_search(const DesignSpace& space, const EvalProtocol& protocol) {
  const auto cands = evaluate_candidates(space, protocol);
  return select_best(space, cands, space.power_constraint, space.objective);
}

struct FrontierRow {
  double budget{0};
  OptimResult unconstrained;  // SIR only
  OptimResult constrained;    // SIR over illumination variance
};

/// grid_search per budget for both objectives; candidates are evaluated once and shared.
inline std::vector<FrontierRow> power_sweep(const DesignSpace& space, std::span<const double> budgets,
                                            const EvalProtocol& protocol) {
  for (std::size_t i = 1; i < budgets.size(); ++i)
    require(budgets[i] > budgets[i - 1], "power_sweep: budgets must be strictly ascending");
  const auto cands = evaluate_candidates(space, protocol);
  std::vector<FrontierRow> rows;
  for (double b : budgets)
    rows.push_back({b, select_best(space, cands, b, Objective::SirOnly),
                    select_best(space, cands, b, Objective::SirOverIllumVariance)});
  return rows;
}

inline std::string describe_counts(const std::vector<int>& counts) {
  std::string s;
  for (std::size_t i = 0; i < counts.size(); ++i) s += (i ? ";" : "") + std::to_string(counts[i]);
  return s;
}

inline void write_frontier_csv(std::ostream& out, std::span<const FrontierRow> rows) {
  out << "budget_w,best_sir_db,best_sir_db_illum,illum_variance,objective,"
         "boards_per_layer,divergence_deg,boards_per_layer_illum,divergence_deg_illum\n";
  char buf[256];
  for (const auto& r : rows) {
    std::snprintf(buf, sizeof buf, "%.4f,%.4f,%.4f,%.9e,%.9e,", r.budget, r.unconstrained.best_sir_db,
                  r.constrained.best_sir_db, r.constrained.illum_variance, r.constrained.best_objective);
    out << buf << describe_counts(r.unconstrained.boards_per_layer) << ',' << r.unconstrained.divergence_deg
        << ',' << describe_counts(r.constrained.boards_per_layer) << ',' << r.constrained.divergence_deg
        << '\n';
  }
}

// ---------------------------------------------------------------------------------------------

struct SweepRow {
  double x{0};  // divergence angle or floor dimension
  double mean_sir{0};
  double mean_sir_db{0};
};

/// Per angle: mean SIR at each total power (spread evenly over the boards), averaged over powers.
inline std::vector<SweepRow> divergence_sweep(const BulbDesign& bulb_template, std::span<const double> angles,
                                              std::span<const double> total_powers, const EvalProtocol& protocol) {
  require(!total_powers.empty(), "divergence_sweep: no powers");
  for (double a : angles) require(a > 0 && a < 90, "divergence_sweep: angles must lie in (0, 90)");
  std::vector<double> powers(total_powers.begin(), total_powers.end());
  std::sort(powers.begin(), powers.end());
  std::vector<SweepRow> rows(angles.size());
  std::vector<double> cell(angles.size() * powers.size());
  parallel_for(cell.size(), protocol.threads, [&](std::size_t idx) {
    BulbDesign d = bulb_template;
    d.divergence_angle_deg = angles[idx / powers.size()];
    d.power_per_board = powers[idx % powers.size()] / d.total_boards();
    cell[idx] = mean_pair_sir(build_bulb(d), protocol.room, protocol.placement).mean_sir;
  });
  for (std::size_t a = 0; a < angles.size(); ++a) {
    double sum = 0.0;
    for (std::size_t p = 0; p < powers.size(); ++p) sum += cell[a * powers.size() + p];
    rows[a] = {angles[a], sum / powers.size(), to_db(sum / powers.size())};
  }
  return rows;
}

/// Square rooms of each floor dimension, bulb re-centered on the ceiling.
inline std::vector<SweepRow> room_size_sweep(const BulbDesign& bulb_template, const RoomSpec& base_room,
                                             std::span<const double> floor_dims, const EvalProtocol& protocol) {
  std::vector<SweepRow> rows(floor_dims.size());
  parallel_for(floor_dims.size(), protocol.threads, [&](std::size_t i) {
    RoomSpec room = base_room;
    room.width = room.depth = floor_dims[i];
    room.floor_grid_resolution = std::min(room.floor_grid_resolution, floor_dims[i]);
    room.validate();
    BulbDesign d = bulb_template;
    d.center = room.ceiling_center();
    const auto s = mean_pair_sir(build_bulb(d), room, protocol.placement);
    rows[i] = {floor_dims[i], s.mean_sir, s.mean_sir_db};
  });
  return rows;
}

inline std::size_t argmax_row(std::span<const SweepRow> rows) {
  require(!rows.empty(), "argmax_row: empty table");
  std::size_t best = 0;
  for (std::size_t i = 1; i < rows.size(); ++i)
    if (rows[i].mean_sir > rows[best].mean_sir) best = i;
  return best;
}

inline void write_sweep_csv(std::ostream& out, const char* x_name, std::span<const SweepRow> rows) {
  out << x_name << ",mean_sir_db\n";
  char buf[96];
  for (const auto& r : rows) {
    std::snprintf(buf, sizeof buf, "%.4f,%.4f\n", r.x, r.mean_sir_db);
    out << buf;
  }
}

}  // namespace vlc
