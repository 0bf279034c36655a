// Splitting bulb boards among receivers by where each boresight lands on the floor.
#pragma once

#include <algorithm>
#include <cstddef>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include "vlc/error.hpp"
#include "vlc/geometry.hpp"

namespace vlc {

inline constexpr int kUnassigned = -1;

struct ReceiverPoint {
  int id{0};
  Vec2 position;
};

struct Partition {
  std::vector<int> board_ids;
  std::vector<int> owner;  // receiver id per board, parallel to board_ids
  std::vector<ReceiverPoint> receivers;

  int owner_of(int board_id) const {
    for (std::size_t i = 0; i < board_ids.size(); ++i)
      if (board_ids[i] == board_id) return owner[i];
    return kUnassigned;
  }

  /// Row indices (positions in the board list) owned by `receiver_id`.
  std::vector<std::size_t> rows_of(int receiver_id) const {
    std::vector<std::size_t> rows;
    for (std::size_t i = 0; i < owner.size(); ++i)
      if (owner[i] == receiver_id) rows.push_back(i);
    return rows;
  }

  std::size_t count(int receiver_id) const {
    return static_cast<std::size_t>(std::count(owner.begin(), owner.end(), receiver_id));
  }

  bool operator==(const Partition&) const = default;
};

inline bool operator==(const ReceiverPoint& a, const ReceiverPoint& b) {
  return a.id == b.id && a.position == b.position;
}

namespace detail {

/// True when `p` lies strictly on a's side of the a/b bisector, or on it and a has the lower id.
/// Antisymmetric bit-for-bit in (a, b), so every caller agrees on boundary cases.
inline bool prefers(const Vec2& p, const ReceiverPoint& a, const ReceiverPoint& b) {
  const Vec2 mid = (a.position + b.position) * 0.5;
  const double s = (p - mid).dot(a.position - b.position);
  if (s > 0.0) return true;
  if (s < 0.0) return false;
  return a.id < b.id;
}

/// Point each board is classified by: its boresight floor hit, else its own horizontal position.
inline Vec2 board_anchor(const TransmitterBoard& b, const RoomSpec& room) {
  if (auto proj = boresight_floor_projection(b, room)) return proj->point;
  return b.position.xy();
}

inline int nearest_receiver(const Vec2& p, std::span<const ReceiverPoint> receivers) {
  std::size_t best = 0;
  for (std::size_t k = 1; k < receivers.size(); ++k)
    if (prefers(p, receivers[k], receivers[best])) best = k;
  return receivers[best].id;
}

}  // namespace detail

/// Two-receiver split along the perpendicular bisector of r1-r2.
inline Partition bisector_partition(const ReceiverPoint& r1, const ReceiverPoint& r2,
                                    std::span<const TransmitterBoard> boards, const RoomSpec& room) {
  require(!(r1.position == r2.position), "bisector_partition: receivers coincide");
  require(r1.id != r2.id, "bisector_partition: receiver ids must differ");
  require(!boards.empty(), "bisector_partition: no boards");
  Partition p;
  p.receivers = {r1, r2};
  for (const auto& b : boards) {
    p.board_ids.push_back(b.id);
    p.owner.push_back(detail::prefers(detail::board_anchor(b, room), r1, r2) ? r1.id : r2.id);
  }
  return p;
}

inline Partition bisector_partition(Vec2 r1, Vec2 r2, std::span<const TransmitterBoard> boards,
                                    const RoomSpec& room) {
  return bisector_partition(ReceiverPoint{1, r1}, ReceiverPoint{2, r2}, boards, room);
}

/// N-receiver generalization: each board goes to the receiver nearest its floor anchor.
inline Partition repartition(std::span<const ReceiverPoint> receivers,
                             std::span<const TransmitterBoard> boards, const RoomSpec& room) {
  require(!receivers.empty(), "repartition: no receivers");
  for (std::size_t i = 0; i < receivers.size(); ++i)
    for (std::size_t j = i + 1; j < receivers.size(); ++j) {
      require(!(receivers[i].position == receivers[j].position),
              "repartition: duplicate receiver positions");
      require(receivers[i].id != receivers[j].id, "repartition: duplicate receiver ids");
    }
  Partition p;
  p.receivers.assign(receivers.begin(), receivers.end());
  for (const auto& b : boards) {
    p.board_ids.push_back(b.id);
    p.owner.push_back(detail::nearest_receiver(detail::board_anchor(b, room), receivers));
  }
  return p;
}

inline void write_partition_csv(std::ostream& out, const Partition& p) {
  out << "board_id,receiver_id\n";
  for (std::size_t i = 0; i < p.board_ids.size(); ++i) out << p.board_ids[i] << ',' << p.owner[i] << '\n';
}

}  // namespace vlc
