#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <span>
#include <vector>

#include "cmplan/instance.hpp"
#include "cmplan/types.hpp"

namespace cmplan {

/// Closed axis-aligned rectangle [x0, x1] x [y0, y1].
struct Rect {
  std::int32_t x0 = 0, y0 = 0, x1 = -1, y1 = -1;

  [[nodiscard]] bool empty() const { return x1 < x0 || y1 < y0; }
  [[nodiscard]] bool contains(Cell c) const {
    return c.x >= x0 && c.x <= x1 && c.y >= y0 && c.y <= y1;
  }
  [[nodiscard]] std::int32_t width() const { return x1 - x0 + 1; }
  [[nodiscard]] std::int32_t height() const { return y1 - y0 + 1; }

  [[nodiscard]] Rect expanded(std::int32_t m) const { return {x0 - m, y0 - m, x1 + m, y1 + m}; }

  [[nodiscard]] Rect united(const Rect& o) const {
    if (empty()) return o;
    if (o.empty()) return *this;
    return {std::min(x0, o.x0), std::min(y0, o.y0), std::max(x1, o.x1), std::max(y1, o.y1)};
  }

  void include(Cell c) {
    if (empty()) {
      *this = {c.x, c.y, c.x, c.y};
      return;
    }
    x0 = std::min(x0, c.x);
    y0 = std::min(y0, c.y);
    x1 = std::max(x1, c.x);
    y1 = std::max(y1, c.y);
  }

  friend bool operator==(const Rect&, const Rect&) = default;
};

inline Rect bounding_box(std::span<const Cell> cells) {
  if (cells.empty()) throw Error("bounding box of an empty set");
  Rect r;
  for (const Cell& c : cells) r.include(c);
  return r;
}

/// Default working margin around the instance: ceil(sqrt(2n)) + 4.
inline std::int32_t default_margin(std::size_t robots) {
  return static_cast<std::int32_t>(std::ceil(std::sqrt(2.0 * static_cast<double>(robots)))) + 4;
}

using CellId = std::int32_t;
inline constexpr CellId kNoCell = -1;

/// Finite window over the unbounded plane with an obstacle bitmap. The window is
/// surrounded by a one-cell blocked frame so neighbour ids never wrap rows.
class GridIndex {
 public:
  GridIndex() = default;

  GridIndex(Rect bounds, std::span<const Cell> obstacles) : bounds_(bounds) {
    if (bounds.empty()) throw Error("empty grid window");
    stride_ = bounds.width() + 2;
    rows_ = bounds.height() + 2;
    blocked_.assign(static_cast<std::size_t>(stride_) * static_cast<std::size_t>(rows_), 1);
    for (std::int32_t y = bounds.y0; y <= bounds.y1; ++y) {
      for (std::int32_t x = bounds.x0; x <= bounds.x1; ++x) blocked_[static_cast<std::size_t>(id({x, y}))] = 0;
    }
    for (const Cell& o : obstacles) {
      if (bounds.contains(o)) blocked_[static_cast<std::size_t>(id(o))] = 1;
    }
    offsets_ = {stride_, 1, -stride_, -1, 0};
  }

  /// Window enclosing the instance plus `extra` cells, grown by `margin` on each side.
  static GridIndex covering(const Instance& inst, std::span<const Cell> extra, std::int32_t margin) {
    Rect r;
    for (const Cell& c : inst.obstacles) r.include(c);
    for (const Cell& c : inst.starts) r.include(c);
    for (const Cell& c : inst.targets) r.include(c);
    for (const Cell& c : extra) r.include(c);
    return GridIndex(r.expanded(margin), inst.obstacles);
  }

  static GridIndex covering(const Instance& inst) {
    return covering(inst, {}, default_margin(inst.num_robots()));
  }

  [[nodiscard]] const Rect& bounds() const { return bounds_; }
  [[nodiscard]] std::int32_t size() const { return stride_ * rows_; }
  [[nodiscard]] std::int32_t stride() const { return stride_; }

  [[nodiscard]] bool contains(Cell c) const { return bounds_.contains(c); }

  /// Id of a cell inside the window (frame cells included).
  [[nodiscard]] CellId id(Cell c) const {
    return (c.y - bounds_.y0 + 1) * stride_ + (c.x - bounds_.x0 + 1);
  }

  /// Id of `c`, or kNoCell outside the window.
  [[nodiscard]] CellId find(Cell c) const { return contains(c) ? id(c) : kNoCell; }

  [[nodiscard]] Cell cell(CellId i) const {
    return {i % stride_ - 1 + bounds_.x0, i / stride_ - 1 + bounds_.y0};
  }

  [[nodiscard]] bool passable(CellId i) const { return blocked_[static_cast<std::size_t>(i)] == 0; }
  [[nodiscard]] bool passable(Cell c) const { return contains(c) && passable(id(c)); }

  [[nodiscard]] CellId neighbor(CellId i, Direction d) const {
    return i + offsets_[static_cast<std::size_t>(d)];
  }

  [[nodiscard]] std::int32_t delta(Direction d) const { return offsets_[static_cast<std::size_t>(d)]; }

  /// Direction of a step between ids; Wait for equal ids.
  [[nodiscard]] Direction direction(CellId from, CellId to) const {
    const std::int32_t d = to - from;
    if (d == 0) return Direction::Wait;
    if (d == stride_) return Direction::N;
    if (d == 1) return Direction::E;
    if (d == -stride_) return Direction::S;
    if (d == -1) return Direction::W;
    throw Error("non-adjacent step");
  }

  /// Largest possible shortest-path length inside the window.
  [[nodiscard]] std::int32_t diameter() const { return bounds_.width() + bounds_.height(); }

 private:
  Rect bounds_;
  std::int32_t stride_ = 0;
  std::int32_t rows_ = 0;
  std::vector<std::uint8_t> blocked_;
  std::array<std::int32_t, 5> offsets_{};
};

inline constexpr std::int32_t kUnreachable = std::numeric_limits<std::int32_t>::max();

/// Obstacle-aware BFS distances from a source set over a GridIndex window.
class DistanceField {
 public:
  DistanceField() = default;
  explicit DistanceField(std::vector<std::int32_t> dist) : dist_(std::move(dist)) {}

  [[nodiscard]] std::int32_t operator[](CellId i) const { return dist_[static_cast<std::size_t>(i)]; }
  [[nodiscard]] std::int32_t at(const GridIndex& grid, Cell c) const {
    const CellId i = grid.find(c);
    return i == kNoCell ? kUnreachable : dist_[static_cast<std::size_t>(i)];
  }
  [[nodiscard]] bool reachable(CellId i) const { return (*this)[i] != kUnreachable; }
  [[nodiscard]] const std::vector<std::int32_t>& values() const { return dist_; }
  [[nodiscard]] bool empty() const { return dist_.empty(); }

 private:
  std::vector<std::int32_t> dist_;
};

/// Multi-source BFS. Stops expanding beyond `limit` when given.
inline DistanceField bfs_field(const GridIndex& grid, std::span<const CellId> sources,
                               std::int32_t limit = kUnreachable) {
  if (sources.empty()) throw Error("distance field needs at least one source");
  std::vector<std::int32_t> dist(static_cast<std::size_t>(grid.size()), kUnreachable);
  std::vector<CellId> queue;
  queue.reserve(static_cast<std::size_t>(grid.size()));
  for (CellId s : sources) {
    if (s < 0 || s >= grid.size() || !grid.passable(s)) {
      throw Error("distance field source is blocked or outside the window");
    }
    if (dist[static_cast<std::size_t>(s)] != 0) {
      dist[static_cast<std::size_t>(s)] = 0;
      queue.push_back(s);
    }
  }
  for (std::size_t head = 0; head < queue.size(); ++head) {
    const CellId v = queue[head];
    const std::int32_t dv = dist[static_cast<std::size_t>(v)];
    if (dv >= limit) continue;
    for (Direction d : kMoveDirections) {
      const CellId u = grid.neighbor(v, d);
      if (!grid.passable(u) || dist[static_cast<std::size_t>(u)] != kUnreachable) continue;
      dist[static_cast<std::size_t>(u)] = dv + 1;
      queue.push_back(u);
    }
  }
  return DistanceField(std::move(dist));
}

inline DistanceField bfs_field(const GridIndex& grid, std::span<const Cell> sources) {
  std::vector<CellId> ids;
  ids.reserve(sources.size());
  for (const Cell& c : sources) {
    const CellId i = grid.find(c);
    if (i == kNoCell) throw Error("distance field source outside the window");
    ids.push_back(i);
  }
  return bfs_field(grid, std::span<const CellId>(ids));
}

inline DistanceField bfs_field(const GridIndex& grid, Cell source) {
  return bfs_field(grid, std::span<const Cell>(&source, 1));
}

/// Depth value of every cell: BFS distance to the intermediate set H.
inline DistanceField depth_values(const GridIndex& grid, std::span<const Cell> intermediates) {
  return bfs_field(grid, intermediates);
}

}  // namespace cmplan
