#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <string_view>
#include <vector>

#include "cmplan/grid.hpp"
#include "cmplan/instance.hpp"

namespace cmplan {

enum class FillerShape { Hexagon, Octagon, Diamond, QuadRect, Rect };

inline constexpr std::array<FillerShape, 5> kAllShapes = {
    FillerShape::Hexagon, FillerShape::Octagon, FillerShape::Diamond, FillerShape::QuadRect,
    FillerShape::Rect};

inline std::string_view to_string(FillerShape s) {
  switch (s) {
    case FillerShape::Hexagon: return "hexagon";
    case FillerShape::Octagon: return "octagon";
    case FillerShape::Diamond: return "diamond";
    case FillerShape::QuadRect: return "quadrect";
    case FillerShape::Rect: return "rect";
  }
  return "?";
}

inline FillerShape parse_shape(std::string_view s) {
  for (FillerShape shape : kAllShapes) {
    if (to_string(shape) == s) return shape;
  }
  throw Error("unknown filler shape '" + std::string(s) + "'");
}

namespace detail {

// Ring level of a lattice point for a shape, in doubled units so octagon and
// hexagon outlines stay integral. Negative means "not part of this shape".
inline std::int64_t filler_level(FillerShape shape, const cmplan::Rect& box, Cell c) {
  const std::int64_t dx = std::max<std::int64_t>({box.x0 - c.x, 0, c.x - box.x1});
  const std::int64_t dy = std::max<std::int64_t>({box.y0 - c.y, 0, c.y - box.y1});
  switch (shape) {
    case FillerShape::Rect:
      return 2 * std::max(dx, dy);
    case FillerShape::QuadRect:
      // One strip beside each side; the corner quadrants stay empty.
      if (dx > 0 && dy > 0) return -1;
      return 2 * std::max(dx, dy);
    case FillerShape::Diamond: {
      // L1 distance from the box centre, offset so the first ring hugs the box.
      const std::int64_t cx2 = static_cast<std::int64_t>(box.x0) + box.x1;
      const std::int64_t cy2 = static_cast<std::int64_t>(box.y0) + box.y1;
      return std::abs(2 * c.x - cx2) + std::abs(2 * c.y - cy2);
    }
    case FillerShape::Octagon:
      return std::max({2 * dx, 2 * dy, (4 * (dx + dy)) / 3});
    case FillerShape::Hexagon:
      // Flat top and bottom, pointed left and right.
      return std::max(2 * dy, 2 * dx + dy);
  }
  return -1;
}

}  // namespace detail

/// Candidate intermediate cells around the bounding box of the starts. All
/// candidates lie on a spacing-2 lattice strictly outside the box, so no two
/// are 4-adjacent and the rows and columns between them stay free. Ordered by
/// ring level, then (y, x).
inline std::vector<Cell> generate_filler(FillerShape shape, const Instance& inst, std::size_t count) {
  const cmplan::Rect box = bounding_box(inst.starts);
  // Anchor the lattice one cell outside the lower-left box corner.
  const std::int32_t ax = box.x0 - 1;
  const std::int32_t ay = box.y0 - 1;
  auto on_lattice = [&](std::int32_t v, std::int32_t a) { return ((v - a) % 2 + 2) % 2 == 0; };

  std::int32_t reach = std::max<std::int32_t>(
      4, static_cast<std::int32_t>(std::ceil(std::sqrt(static_cast<double>(count)))) + 2);
  struct Ranked {
    std::int64_t level;
    Cell cell;
  };
  for (;;) {
    std::vector<Ranked> ranked;
    const cmplan::Rect area = box.expanded(reach);
    std::int64_t complete_level = -1;  // every point at or below this level is inside `area`
    for (std::int32_t y = area.y0; y <= area.y1; ++y) {
      if (!on_lattice(y, ay)) continue;
      for (std::int32_t x = area.x0; x <= area.x1; ++x) {
        if (!on_lattice(x, ax)) continue;
        const Cell c{x, y};
        if (box.contains(c) || inst.is_obstacle(c)) continue;
        const std::int64_t level = detail::filler_level(shape, box, c);
        if (level < 0) continue;
        ranked.push_back({level, c});
      }
    }
    // Levels grow at most by 2 per unit of Chebyshev distance from the box for
    // every shape except Diamond (which may grow by 4), so this bound is safe.
    complete_level = 2 * static_cast<std::int64_t>(reach) - 2;
    std::sort(ranked.begin(), ranked.end(), [](const Ranked& a, const Ranked& b) {
      if (a.level != b.level) return a.level < b.level;
      return a.cell.y != b.cell.y ? a.cell.y < b.cell.y : a.cell.x < b.cell.x;
    });
    std::size_t usable = 0;
    while (usable < ranked.size() && ranked[usable].level <= complete_level) ++usable;
    if (usable >= count) {
      std::vector<Cell> out;
      out.reserve(count);
      for (std::size_t i = 0; i < count; ++i) out.push_back(ranked[i].cell);
      return out;
    }
    reach *= 2;
  }
}

}  // namespace cmplan
