#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <limits>
#include <sstream>
#include <string>
#include <vector>

#include "cmplan/instance.hpp"
#include "cmplan/solution.hpp"

namespace cmplan {

struct SvgStyle {
  int cell = 20;
  int margin = 1;  // empty cells around the drawn content
  const char* obstacle = "#808080";
  const char* border = "#000000";
};

/// Stable color for a robot id, spread over the hue circle.
inline std::string robot_color(RobotId r) {
  std::uint64_t h = static_cast<std::uint64_t>(r) + 0x9e3779b97f4a7c15ull;
  h = (h ^ (h >> 30)) * 0xbf58476d1ce4e5b9ull;
  h = (h ^ (h >> 27)) * 0x94d049bb133111ebull;
  h ^= h >> 31;
  const double hue = static_cast<double>(h % 360);
  const double s = 0.65;
  const double l = 0.5 + 0.1 * static_cast<double>((h >> 16) % 3) / 2.0;
  // hsl -> rgb
  const double c = (1 - std::abs(2 * l - 1)) * s;
  const double hp = hue / 60.0;
  const double x = c * (1 - std::abs(hp - 2 * std::floor(hp / 2) - 1));
  double r1 = 0, g1 = 0, b1 = 0;
  if (hp < 1) r1 = c, g1 = x;
  else if (hp < 2) r1 = x, g1 = c;
  else if (hp < 3) g1 = c, b1 = x;
  else if (hp < 4) g1 = x, b1 = c;
  else if (hp < 5) r1 = x, b1 = c;
  else r1 = c, b1 = x;
  const double m = l - c / 2;
  auto byte = [&](double v) { return static_cast<int>(std::lround((v + m) * 255)); };
  char buf[8];
  std::snprintf(buf, sizeof buf, "#%02x%02x%02x", byte(r1), byte(g1), byte(b1));
  return buf;
}

namespace detail {

/// Collects cells to size the picture, then emits rects with y pointing up.
class SvgCanvas {
 public:
  SvgCanvas(const SvgStyle& style, const std::vector<Cell>& extent) : style_(style) {
    for (const Cell& c : extent) {
      lo_.x = std::min(lo_.x, c.x);
      lo_.y = std::min(lo_.y, c.y);
      hi_.x = std::max(hi_.x, c.x);
      hi_.y = std::max(hi_.y, c.y);
    }
    if (extent.empty()) lo_ = hi_ = {0, 0};
    lo_ = lo_ - Cell{style_.margin, style_.margin};
    hi_ = hi_ + Cell{style_.margin, style_.margin};
  }

  [[nodiscard]] int width() const { return (hi_.x - lo_.x + 1) * style_.cell; }
  [[nodiscard]] int height() const { return (hi_.y - lo_.y + 1) * style_.cell; }

  void rect(Cell c, const std::string& fill, const char* cls, const char* extra = "") {
    body_ << "<rect class=\"" << cls << "\" x=\"" << (c.x - lo_.x) * style_.cell << "\" y=\""
          << (hi_.y - c.y) * style_.cell << "\" width=\"" << style_.cell << "\" height=\""
          << style_.cell << "\" fill=\"" << fill << "\"" << extra << "/>\n";
  }

  void outline(Cell c, const std::string& stroke, const char* cls) {
    const int inset = std::max(1, style_.cell / 8);
    body_ << "<rect class=\"" << cls << "\" x=\"" << (c.x - lo_.x) * style_.cell + inset << "\" y=\""
          << (hi_.y - c.y) * style_.cell + inset << "\" width=\"" << style_.cell - 2 * inset
          << "\" height=\"" << style_.cell - 2 * inset << "\" fill=\"none\" stroke=\"" << stroke
          << "\" stroke-width=\"" << inset << "\"/>\n";
  }

  [[nodiscard]] std::string str(const std::string& title) const {
    std::ostringstream os;
    os << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
       << "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"" << width()
       << "\" height=\"" << height() << "\" viewBox=\"0 0 " << width() << ' ' << height() << "\">\n"
       << "<title>" << escape(title) << "</title>\n"
       << "<rect class=\"border\" x=\"0\" y=\"0\" width=\"" << width() << "\" height=\"" << height()
       << "\" fill=\"#ffffff\" stroke=\"" << style_.border << "\" stroke-width=\"2\"/>\n"
       << body_.str() << "</svg>\n";
    return os.str();
  }

 private:
  static std::string escape(const std::string& s) {
    std::string out;
    for (char ch : s) {
      switch (ch) {
        case '&': out += "&amp;"; break;
        case '<': out += "&lt;"; break;
        case '>': out += "&gt;"; break;
        default: out += ch;
      }
    }
    return out;
  }

  SvgStyle style_;
  Cell lo_{std::numeric_limits<std::int32_t>::max(), std::numeric_limits<std::int32_t>::max()};
  Cell hi_{std::numeric_limits<std::int32_t>::min(), std::numeric_limits<std::int32_t>::min()};
  std::ostringstream body_;
};

inline std::vector<Cell> instance_extent(const Instance& inst) {
  std::vector<Cell> cells = inst.obstacles;
  cells.insert(cells.end(), inst.starts.begin(), inst.starts.end());
  cells.insert(cells.end(), inst.targets.begin(), inst.targets.end());
  return cells;
}

}  // namespace detail

/// Start (or target) cells as filled boxes and each robot's matched
/// intermediate cell as a half-transparent box of the same color.
inline std::string render_matching(const Instance& inst, const std::vector<Cell>& intermediates,
                                   bool targets, const SvgStyle& style = {}) {
  if (intermediates.size() != inst.num_robots()) throw Error("one intermediate cell per robot expected");
  std::vector<Cell> extent = detail::instance_extent(inst);
  extent.insert(extent.end(), intermediates.begin(), intermediates.end());
  detail::SvgCanvas canvas(style, extent);
  for (const Cell& c : inst.obstacles) canvas.rect(c, style.obstacle, "obstacle");
  const std::vector<Cell>& ends = targets ? inst.targets : inst.starts;
  for (std::size_t r = 0; r < ends.size(); ++r) {
    const std::string color = robot_color(static_cast<RobotId>(r));
    canvas.rect(ends[r], color, targets ? "target" : "start");
    canvas.rect(intermediates[r], color, "intermediate", " fill-opacity=\"0.5\"");
  }
  return canvas.str(inst.name + (targets ? " targets" : " starts"));
}

/// Robot positions at timestep `t`, with each target drawn as an outline.
inline std::string render_frame(const Instance& inst, const Solution& s, int t, const SvgStyle& style = {}) {
  if (t < 0 || t > s.num_steps()) {
    throw Error("timestep " + std::to_string(t) + " outside 0.." + std::to_string(s.num_steps()));
  }
  if (s.num_robots() != inst.num_robots()) throw Error("solution and instance disagree on robot count");
  std::vector<Cell> extent = detail::instance_extent(inst);
  for (const Path& p : s.paths()) extent.insert(extent.end(), p.begin(), p.end());
  detail::SvgCanvas canvas(style, extent);
  for (const Cell& c : inst.obstacles) canvas.rect(c, style.obstacle, "obstacle");
  for (std::size_t r = 0; r < inst.num_robots(); ++r) {
    canvas.outline(inst.targets[r], robot_color(static_cast<RobotId>(r)), "target");
  }
  for (std::size_t r = 0; r < inst.num_robots(); ++r) {
    const auto id = static_cast<RobotId>(r);
    canvas.rect(s.position(id, t), robot_color(id), "robot");
  }
  return canvas.str(inst.name + " t=" + std::to_string(t));
}

}  // namespace cmplan
