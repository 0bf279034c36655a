// Discrete-event model of the bulb/receiver association protocol.
//
// Each SEARCH round every present receiver picks its strongest board and ACKs it over a
// lossless side channel. The bulb keeps an LED-receiver association table (LED-RAT),
// re-partitions its boards whenever membership or a best board changes, and drops
// receivers that CLOSE or stay silent for n_t rounds.
#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <cstdio>
#include <functional>
#include <istream>
#include <limits>
#include <map>
#include <optional>
#include <ostream>
#include <set>
#include <sstream>
#include <span>
#include <string>
#include <vector>

#include "vlc/channel.hpp"
#include "vlc/error.hpp"
#include "vlc/geometry.hpp"
#include "vlc/partition.hpp"
#include "vlc/rng.hpp"

namespace vlc {

enum class FrameKind { Search, Ack, Close, Data };

struct Frame {
  FrameKind kind{FrameKind::Search};
  int led_local_id{-1};
  std::string rf_address;
  std::string payload_dest;
};

enum class LeaveMode { Graceful, Ungraceful };

struct Waypoint {
  double time_s{0};
  Vec2 position;
};

struct MobilityTrace {
  int receiver_id{0};
  std::string rf_address;
  std::vector<Waypoint> waypoints;
  double join_time{0};
  double leave_time{std::numeric_limits<double>::infinity()};
  LeaveMode leave_mode{LeaveMode::Ungraceful};

  void validate(const RoomSpec& room) const {
    require(!waypoints.empty(), "trace " + rf_address + ": no waypoints");
    for (std::size_t i = 1; i < waypoints.size(); ++i)
      require(waypoints[i].time_s > waypoints[i - 1].time_s,
              "trace " + rf_address + ": waypoint times must be strictly increasing");
    for (const auto& w : waypoints)
      require(room.contains(w.position), "trace " + rf_address + ": waypoint outside the room");
    require(leave_time > join_time, "trace " + rf_address + ": leave_time must follow join_time");
  }

  /// Linear interpolation, held constant outside the waypoint span.
  Vec2 position_at(double t) const {
    if (t <= waypoints.front().time_s) return waypoints.front().position;
    if (t >= waypoints.back().time_s) return waypoints.back().position;
    auto it = std::upper_bound(waypoints.begin(), waypoints.end(), t,
                               [](double v, const Waypoint& w) { return v < w.time_s; });
    const Waypoint& b = *it;
    const Waypoint& a = *(it - 1);
    const double f = (t - a.time_s) / (b.time_s - a.time_s);
    return a.position + (b.position - a.position) * f;
  }
};

struct ProtocolConfig {
  double search_period{0.1};
  int n_t{3};
  CoverageGate gate{CoverageGate::Divergence};
  double receiver_height{0.0};
  double aperture_radius{0.0375};
  double fov_deg{90};
  double duration_s{0};  // 0: until every trace has finished plus the timeout window

  void validate() const {
    require(search_period > 0, "search_period must be positive");
    require(n_t >= 1, "n_t must be >= 1");
    require(duration_s >= 0, "duration must be non-negative");
  }
};

// ---------------------------------------------------------------------------------------------

/// Strongest SEARCH at a receiver: argmax of board power x LOS gain, lower id on ties.
inline std::optional<int> select_strongest(std::span<const TransmitterBoard> boards,
                                           std::span<const double> gains) {
  std::optional<int> best;
  double best_p = 0.0;
  for (std::size_t b = 0; b < boards.size(); ++b) {
    const double p = boards[b].power * gains[b];
    if (p <= 0.0) continue;
    if (!best || p > best_p || (p == best_p && boards[b].id < *best)) {
      best = boards[b].id;
      best_p = p;
    }
  }
  return best;
}

inline std::optional<int> select_strongest(const Vec3& position, std::span<const TransmitterBoard> boards,
                                           const PdElement& pd, CoverageGate gate) {
  std::vector<double> g(boards.size());
  for (std::size_t b = 0; b < boards.size(); ++b) g[b] = los_gain(boards[b], pd, position, gate);
  return select_strongest(boards, g);
}

enum class RatState { Associated, TimingOut, Removed };

inline const char* state_name(RatState s) {
  switch (s) {
    case RatState::Associated: return "ASSOCIATED";
    case RatState::TimingOut: return "TIMING_OUT";
    case RatState::Removed: return "REMOVED";
  }
  return "?";
}

struct RatEntry {
  int receiver_id{0};
  std::vector<int> boards;  // sorted
  int best_board{-1};
  long last_ack_round{-1};
  long associated_round{-1};
  RatState state{RatState::Associated};
  bool blocked{false};  // best board held by an earlier receiver; no boards this round
};

struct LedRat {
  std::map<std::string, RatEntry> entries;
  long round_counter{0};

  const RatEntry* find(const std::string& address) const {
    auto it = entries.find(address);
    return it == entries.end() ? nullptr : &it->second;
  }

  /// Board sets pairwise disjoint and within `boards`; removed entries hold nothing.
  bool disjoint(std::span<const TransmitterBoard> boards) const {
    std::set<int> valid, seen;
    for (const auto& b : boards) valid.insert(b.id);
    for (const auto& [addr, e] : entries) {
      for (int b : e.boards)
        if (!valid.count(b) || !seen.insert(b).second) return false;
      if (e.state == RatState::Removed && !e.boards.empty()) return false;
    }
    return true;
  }

  /// disjoint() plus each active, unblocked best board inside its own set. Holds once a
  /// repartition completes; ASSOCIATE and HANDOVER precede the repartition they trigger.
  bool consistent(std::span<const TransmitterBoard> boards) const {
    if (!disjoint(boards)) return false;
    for (const auto& [addr, e] : entries)
      if (e.state != RatState::Removed && !e.blocked &&
          !std::binary_search(e.boards.begin(), e.boards.end(), e.best_board))
        return false;
    return true;
  }
};

enum class EventKind { Join, Associate, Handover, TimingOut, Close, Removed, Repartition, Assign, Drop };

inline const char* event_name(EventKind k) {
  switch (k) {
    case EventKind::Join: return "JOIN";
    case EventKind::Associate: return "ASSOCIATE";
    case EventKind::Handover: return "HANDOVER";
    case EventKind::TimingOut: return "TIMING_OUT";
    case EventKind::Close: return "CLOSE";
    case EventKind::Removed: return "REMOVED";
    case EventKind::Repartition: return "REPARTITION";
    case EventKind::Assign: return "ASSIGN";
    case EventKind::Drop: return "DROP";
  }
  return "?";
}

struct Event {
  double time_s{0};
  long round{0};
  EventKind kind{EventKind::Join};
  int receiver_id{-1};
  std::string rf_address;  // "-" for bulb-wide events
  std::vector<int> boards;
};

inline std::string join_boards(const std::vector<int>& boards) {
  std::string s;
  for (std::size_t i = 0; i < boards.size(); ++i) s += (i ? ";" : "") + std::to_string(boards[i]);
  return s;
}

inline void write_event_log(std::ostream& out, std::span<const Event> log) {
  out << "time_s,round,event,receiver,boards\n";
  char buf[48];
  for (const auto& e : log) {
    std::snprintf(buf, sizeof buf, "%.6f", e.time_s);
    out << buf << ',' << e.round << ',' << event_name(e.kind) << ',' << e.rf_address << ','
        << join_boards(e.boards) << '\n';
  }
}

struct SimulationResult {
  std::vector<Event> log;
  LedRat rat;
  long rounds{0};
};

/// Called after every logged event with the table state at that instant.
using EventObserver = std::function<void(const Event&, const LedRat&)>;

namespace detail {

inline void validate_traces(std::span<const MobilityTrace> traces, const RoomSpec& room) {
  std::set<std::string> addresses;
  std::set<int> ids;
  for (const auto& t : traces) {
    t.validate(room);
    require(addresses.insert(t.rf_address).second, "duplicate rf_address " + t.rf_address);
    require(ids.insert(t.receiver_id).second, "duplicate receiver id " + std::to_string(t.receiver_id));
  }
}

class Simulator {
 public:
  Simulator(std::span<const MobilityTrace> traces, std::span<const TransmitterBoard> boards,
            const RoomSpec& room, const ProtocolConfig& cfg, EventObserver observer)
      : traces_(traces.begin(), traces.end()), boards_(boards), room_(room), cfg_(cfg),
        observer_(std::move(observer)), orders_(lambertian_orders(boards)) {
    std::sort(traces_.begin(), traces_.end(),
              [](const MobilityTrace& a, const MobilityTrace& b) { return a.receiver_id < b.receiver_id; });
    for (const auto& b : boards_)
      anchors_[b.id] = board_anchor(b, room_);
  }

  SimulationResult run() {
    const long rounds = round_count();
    std::vector<bool> joined(traces_.size(), false), closed(traces_.size(), false);
    for (long r = 0; r < rounds; ++r) {
      const double t = r * cfg_.search_period;
      result_.rat.round_counter = r;
      pre_round(r, t, joined, closed);
      search_round(r, t, joined, closed);
    }
    result_.rounds = rounds;
    return std::move(result_);
  }

 private:
  long round_count() const {
    if (cfg_.duration_s > 0) return static_cast<long>(std::floor(cfg_.duration_s / cfg_.search_period)) + 1;
    double end = 0.0;
    for (const auto& t : traces_) {
      end = std::max(end, t.waypoints.back().time_s);
      if (std::isfinite(t.leave_time)) end = std::max(end, t.leave_time);
      end = std::max(end, t.join_time);
    }
    return static_cast<long>(std::ceil(end / cfg_.search_period)) + cfg_.n_t + 2;
  }

  void emit(Event e) {
    result_.log.push_back(e);
    if (observer_) observer_(result_.log.back(), result_.rat);
  }

  Event make(double t, long r, EventKind k, const MobilityTrace* tr, std::vector<int> boards = {}) {
    return {t, r, k, tr ? tr->receiver_id : -1, tr ? tr->rf_address : "-", std::move(boards)};
  }

  /// JOINs and CLOSEs that happen after the previous SEARCH and no later than this one,
  /// grouped by time; a CLOSE at exactly t is applied before the SEARCH at t.
  void pre_round(long r, double t, std::vector<bool>& joined, std::vector<bool>& closed) {
    const double prev = r == 0 ? -std::numeric_limits<double>::infinity() : (r - 1) * cfg_.search_period;
    std::set<double> times;
    for (const auto& tr : traces_) {
      if (tr.join_time > prev && tr.join_time <= t) times.insert(tr.join_time);
      if (tr.leave_mode == LeaveMode::Graceful && tr.leave_time > prev && tr.leave_time <= t)
        times.insert(tr.leave_time);
    }
    for (double at : times) {
      bool removed = false;
      for (std::size_t i = 0; i < traces_.size(); ++i) {
        const auto& tr = traces_[i];
        if (tr.join_time == at && !joined[i]) {
          joined[i] = true;
          emit(make(at, r, EventKind::Join, &tr));
        }
        if (tr.leave_mode == LeaveMode::Graceful && tr.leave_time == at && !closed[i]) {
          closed[i] = true;
          emit(make(at, r, EventKind::Close, &tr));
          auto it = result_.rat.entries.find(tr.rf_address);
          if (it != result_.rat.entries.end() && it->second.state != RatState::Removed) {
            remove(it->second);
            emit(make(at, r, EventKind::Removed, &tr));
            removed = true;
          }
        }
      }
      if (removed) repartition(at, r);
    }
  }

  void search_round(long r, double t, const std::vector<bool>& joined, const std::vector<bool>& closed) {
    bool changed = false;
    const PdElement pd{{0, 0, 1}, cfg_.aperture_radius, cfg_.fov_deg};
    std::vector<double> g(boards_.size());
    for (std::size_t i = 0; i < traces_.size(); ++i) {
      const auto& tr = traces_[i];
      std::optional<int> ack;
      if (joined[i] && !closed[i] && t < tr.leave_time) {
        const Vec2 p = tr.position_at(t);
        const Vec3 pos{p.x, p.y, cfg_.receiver_height};
        for (std::size_t b = 0; b < boards_.size(); ++b)
          g[b] = los_gain(boards_[b], orders_[b], pd, pos, cfg_.gate);
        ack = select_strongest(boards_, g);
      }
      auto it = result_.rat.entries.find(tr.rf_address);
      const bool live = it != result_.rat.entries.end() && it->second.state != RatState::Removed;
      if (ack) {
        if (!live) {
          RatEntry e;
          e.receiver_id = tr.receiver_id;
          e.best_board = *ack;
          e.last_ack_round = r;
          e.associated_round = r;
          result_.rat.entries[tr.rf_address] = e;
          emit(make(t, r, EventKind::Associate, &tr, {*ack}));
          changed = true;
        } else {
          RatEntry& e = it->second;
          e.last_ack_round = r;
          e.state = RatState::Associated;
          if (e.best_board != *ack) {
            e.best_board = *ack;
            emit(make(t, r, EventKind::Handover, &tr, {*ack}));
            changed = true;
          }
        }
      } else if (live) {
        RatEntry& e = it->second;
        if (r - e.last_ack_round >= cfg_.n_t) {
          remove(e);
          emit(make(t, r, EventKind::Removed, &tr));
          changed = true;
        } else if (e.state == RatState::Associated) {
          e.state = RatState::TimingOut;
          emit(make(t, r, EventKind::TimingOut, &tr, e.boards));
        }
      }
    }
    if (changed) repartition(t, r);
  }

  void remove(RatEntry& e) {
    e.state = RatState::Removed;
    e.boards.clear();
    e.blocked = false;
  }

  const MobilityTrace* trace_of(const std::string& address) const {
    for (const auto& t : traces_)
      if (t.rf_address == address) return &t;
    return nullptr;
  }

  /// Active receivers are placed at the floor anchor of their best board; when several share an
  /// anchor the earliest-associated (then lowest id) keeps it and the rest are blocked.
  void repartition(double t, long r) {
    struct Active {
      std::string address;
      RatEntry* entry;
    };
    std::vector<Active> active;
    for (auto& [addr, e] : result_.rat.entries) {
      e.boards.clear();
      e.blocked = false;
      if (e.state != RatState::Removed) active.push_back({addr, &e});
    }
    std::sort(active.begin(), active.end(), [](const Active& a, const Active& b) {
      if (a.entry->associated_round != b.entry->associated_round)
        return a.entry->associated_round < b.entry->associated_round;
      return a.entry->receiver_id < b.entry->receiver_id;
    });
    std::vector<ReceiverPoint> points;
    std::map<int, RatEntry*> by_id;
    for (auto& a : active) {
      const Vec2 p = anchors_.at(a.entry->best_board);
      const bool taken = std::any_of(points.begin(), points.end(),
                                     [&](const ReceiverPoint& q) { return q.position == p; });
      if (taken) {
        a.entry->blocked = true;
        continue;
      }
      points.push_back({a.entry->receiver_id, p});
      by_id[a.entry->receiver_id] = a.entry;
    }
    if (!points.empty()) {
      const Partition part = vlc::repartition(points, boards_, room_);
      for (std::size_t i = 0; i < part.board_ids.size(); ++i) by_id.at(part.owner[i])->boards.push_back(part.board_ids[i]);
      for (auto& [id, e] : by_id) std::sort(e->boards.begin(), e->boards.end());
    }
    emit(make(t, r, EventKind::Repartition, nullptr));
    std::sort(active.begin(), active.end(),
              [](const Active& a, const Active& b) { return a.entry->receiver_id < b.entry->receiver_id; });
    for (const auto& a : active) emit(make(t, r, EventKind::Assign, trace_of(a.address), a.entry->boards));
  }

  std::vector<MobilityTrace> traces_;
  std::span<const TransmitterBoard> boards_;
  RoomSpec room_;
  ProtocolConfig cfg_;
  EventObserver observer_;
  std::vector<double> orders_;
  std::map<int, Vec2> anchors_;
  SimulationResult result_;
};

}  // namespace detail

inline SimulationResult run_simulation(std::span<const MobilityTrace> traces,
                                       std::span<const TransmitterBoard> boards, const RoomSpec& room,
                                       const ProtocolConfig& config, EventObserver observer = {}) {
  config.validate();
  room.validate();
  require(!boards.empty(), "run_simulation: no boards");
  detail::validate_traces(traces, room);
  return detail::Simulator(traces, boards, room, config, std::move(observer)).run();
}

struct HandoverStats {
  std::map<std::string, int> handovers;  // per receiver address
  double mean_association_latency_rounds{0};
  int repartitions{0};
};

/// Replays the log: HANDOVER lines per receiver, JOIN-to-first-ASSOCIATE latency, REPARTITION lines.
inline HandoverStats handover_stats(std::span<const Event> log) {
  HandoverStats s;
  std::map<std::string, long> join_round;
  std::set<std::string> measured;
  double latency_sum = 0.0;
  int latency_n = 0;
  for (const auto& e : log) {
    switch (e.kind) {
      case EventKind::Join:
        join_round[e.rf_address] = e.round;
        s.handovers.emplace(e.rf_address, 0);
        break;
      case EventKind::Associate:
        if (join_round.count(e.rf_address) && measured.insert(e.rf_address).second) {
          latency_sum += static_cast<double>(e.round - join_round[e.rf_address] + 1);
          ++latency_n;
        }
        break;
      case EventKind::Handover: ++s.handovers[e.rf_address]; break;
      case EventKind::Repartition: ++s.repartitions; break;
      default: break;
    }
  }
  if (latency_n) s.mean_association_latency_rounds = latency_sum / latency_n;
  return s;
}

/// Reverse lookup of a DATA frame's destination; unknown or removed receivers drop the frame.
inline std::vector<int> route_data(const Frame& frame, const LedRat& rat, std::vector<Event>* log = nullptr,
                                   double time_s = 0.0) {
  require(frame.kind == FrameKind::Data, "route_data expects a DATA frame");
  const RatEntry* e = rat.find(frame.payload_dest);
  if (e && e->state != RatState::Removed && !e->boards.empty()) return e->boards;
  if (log) log->push_back({time_s, rat.round_counter, EventKind::Drop, e ? e->receiver_id : -1, frame.payload_dest, {}});
  return {};
}

// ---------------------------------------------------------------------------------------------
// Trace ingestion and generation.

struct ReceiverManifest {
  int receiver_id{0};
  std::string rf_address;
  double join_time{0};
  double leave_time{std::numeric_limits<double>::infinity()};
  LeaveMode leave_mode{LeaveMode::Ungraceful};
};

/// Waypoints from CSV with header receiver_id,time_s,x_m,y_m, joined with the manifest.
inline std::vector<MobilityTrace> read_mobility_csv(std::istream& in, std::span<const ReceiverManifest> manifest) {
  std::map<int, std::vector<Waypoint>> points;
  std::string line;
  require(static_cast<bool>(std::getline(in, line)), "mobility CSV is empty");
  long lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::istringstream ss(line);
    std::string f[4];
    for (auto& s : f) std::getline(ss, s, ',');
    try {
      points[std::stoi(f[0])].push_back({std::stod(f[1]), {std::stod(f[2]), std::stod(f[3])}});
    } catch (const std::exception&) {
      throw ValidationError("mobility CSV line " + std::to_string(lineno) + ": malformed record");
    }
  }
  std::vector<MobilityTrace> traces;
  for (const auto& m : manifest) {
    auto it = points.find(m.receiver_id);
    require(it != points.end(), "no waypoints for receiver " + std::to_string(m.receiver_id));
    traces.push_back({m.receiver_id, m.rf_address, it->second, m.join_time, m.leave_time, m.leave_mode});
  }
  return traces;
}

inline void write_mobility_csv(std::ostream& out, std::span<const MobilityTrace> traces) {
  out << "receiver_id,time_s,x_m,y_m\n";
  char buf[96];
  for (const auto& t : traces)
    for (const auto& w : t.waypoints) {
      std::snprintf(buf, sizeof buf, "%d,%.6f,%.6f,%.6f\n", t.receiver_id, w.time_s, w.position.x, w.position.y);
      out << buf;
    }
}

struct TraceGenerator {
  int receivers{3};
  double horizon_s{6.0};
  double step_s{0.5};
  double max_speed{1.0};  // m/s
  double margin{0.1};     // keep waypoints this far from walls
};

/// Random-walk traces with random join/leave times and leave modes, a pure function of seed.
inline std::vector<MobilityTrace> random_traces(const RoomSpec& room, const TraceGenerator& gen,
                                                std::uint64_t seed) {
  require(gen.receivers >= 1 && gen.horizon_s > 0 && gen.step_s > 0, "invalid trace generator");
  std::vector<MobilityTrace> out;
  for (int i = 0; i < gen.receivers; ++i) {
    RandomStream rng(seed, streams::kMobility, static_cast<std::uint64_t>(i));
    MobilityTrace t;
    t.receiver_id = i + 1;
    char addr[32];
    std::snprintf(addr, sizeof addr, "02:00:00:00:%02x:%02x", ((i + 1) >> 8) & 0xff, (i + 1) & 0xff);
    t.rf_address = addr;
    t.join_time = rng.uniform(0, 0.25 * gen.horizon_s);
    t.leave_time = rng.uniform(0.5 * gen.horizon_s, gen.horizon_s);
    t.leave_mode = rng.uniform() < 0.5 ? LeaveMode::Graceful : LeaveMode::Ungraceful;
    Vec2 p{rng.uniform(gen.margin, room.width - gen.margin), rng.uniform(gen.margin, room.depth - gen.margin)};
    for (double time = 0.0; time <= gen.horizon_s + 1e-9; time += gen.step_s) {
      t.waypoints.push_back({time, p});
      const double a = rng.uniform(0, 2 * kPi), d = rng.uniform(0, gen.max_speed * gen.step_s);
      p = {std::clamp(p.x + d * std::cos(a), gen.margin, room.width - gen.margin),
           std::clamp(p.y + d * std::sin(a), gen.margin, room.depth - gen.margin)};
    }
    out.push_back(std::move(t));
  }
  return out;
}

}  // namespace vlc
