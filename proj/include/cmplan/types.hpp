#pragma once

#include <array>
#include <compare>
#include <cstdint>
#include <cstdlib>
#include <functional>
#include <stdexcept>
#include <string>
#include <string_view>

namespace cmplan {

using RobotId = std::int32_t;
inline constexpr RobotId kNoRobot = -1;

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct ParseError : Error {
  using Error::Error;
};

/// Integer grid coordinate. The plane is unbounded; only obstacles restrict it.
struct Cell {
  std::int32_t x = 0;
  std::int32_t y = 0;

  friend constexpr auto operator<=>(const Cell&, const Cell&) = default;
  friend constexpr Cell operator+(Cell a, Cell b) { return {a.x + b.x, a.y + b.y}; }
  friend constexpr Cell operator-(Cell a, Cell b) { return {a.x - b.x, a.y - b.y}; }
};

constexpr int manhattan(Cell a, Cell b) { return std::abs(a.x - b.x) + std::abs(a.y - b.y); }

struct CellHash {
  std::size_t operator()(const Cell& c) const noexcept {
    auto ux = static_cast<std::uint64_t>(static_cast<std::uint32_t>(c.x));
    auto uy = static_cast<std::uint64_t>(static_cast<std::uint32_t>(c.y));
    return std::hash<std::uint64_t>{}((ux << 32) ^ uy);
  }
};

enum class Direction : std::uint8_t { N = 0, E = 1, S = 2, W = 3, Wait = 4 };

inline constexpr std::array<Direction, 4> kMoveDirections = {Direction::N, Direction::E,
                                                              Direction::S, Direction::W};

constexpr Cell offset(Direction d) {
  switch (d) {
    case Direction::N: return {0, 1};
    case Direction::E: return {1, 0};
    case Direction::S: return {0, -1};
    case Direction::W: return {-1, 0};
    case Direction::Wait: return {0, 0};
  }
  return {0, 0};
}

constexpr Direction opposite(Direction d) {
  switch (d) {
    case Direction::N: return Direction::S;
    case Direction::E: return Direction::W;
    case Direction::S: return Direction::N;
    case Direction::W: return Direction::E;
    case Direction::Wait: return Direction::Wait;
  }
  return Direction::Wait;
}

/// Direction of a unit step, or nullopt-like Wait for equal cells. Throws on a jump.
inline Direction direction_between(Cell from, Cell to) {
  const Cell d = to - from;
  if (d == Cell{0, 0}) return Direction::Wait;
  if (d == Cell{0, 1}) return Direction::N;
  if (d == Cell{1, 0}) return Direction::E;
  if (d == Cell{0, -1}) return Direction::S;
  if (d == Cell{-1, 0}) return Direction::W;
  throw Error("non-adjacent step");
}

constexpr char direction_char(Direction d) {
  switch (d) {
    case Direction::N: return 'N';
    case Direction::E: return 'E';
    case Direction::S: return 'S';
    case Direction::W: return 'W';
    case Direction::Wait: return '-';
  }
  return '?';
}

inline Direction parse_direction(std::string_view token) {
  if (token == "N") return Direction::N;
  if (token == "E") return Direction::E;
  if (token == "S") return Direction::S;
  if (token == "W") return Direction::W;
  throw ParseError("unknown direction token '" + std::string(token) + "'");
}

/// SUM counts position-changing moves, MAX counts timesteps.
enum class Objective { Sum, Max };

inline std::string_view to_string(Objective o) { return o == Objective::Sum ? "sum" : "max"; }

inline Objective other(Objective o) { return o == Objective::Sum ? Objective::Max : Objective::Sum; }

inline Objective parse_objective(std::string_view s) {
  if (s == "sum" || s == "distance" || s == "SUM") return Objective::Sum;
  if (s == "max" || s == "makespan" || s == "MAX") return Objective::Max;
  throw Error("unknown objective '" + std::string(s) + "'");
}

}  // namespace cmplan
