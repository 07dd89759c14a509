#pragma once

#include <fstream>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"

#include "cmplan/instance.hpp"
#include "cmplan/solution.hpp"

namespace cmplan {

namespace detail {

inline Cell cell_from_json(const nlohmann::json& j, std::string_view field, std::size_t index) {
  if (!j.is_array() || j.size() != 2 || !j[0].is_number_integer() || !j[1].is_number_integer()) {
    throw ParseError(std::string(field) + "[" + std::to_string(index) +
                     "] is not an [x, y] integer pair");
  }
  return {j[0].get<std::int32_t>(), j[1].get<std::int32_t>()};
}

inline std::vector<Cell> cells_from_json(const nlohmann::json& root, std::string_view field) {
  auto it = root.find(field);
  if (it == root.end()) throw ParseError("missing key '" + std::string(field) + "'");
  if (!it->is_array()) throw ParseError("'" + std::string(field) + "' is not an array");
  std::vector<Cell> out;
  out.reserve(it->size());
  for (std::size_t i = 0; i < it->size(); ++i) out.push_back(cell_from_json((*it)[i], field, i));
  return out;
}

inline nlohmann::json cells_to_json(const std::vector<Cell>& cells) {
  auto arr = nlohmann::json::array();
  for (const Cell& c : cells) arr.push_back({c.x, c.y});
  return arr;
}

inline nlohmann::json parse_json(std::string_view text) {
  try {
    return nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError(std::string("malformed JSON: ") + e.what());
  }
}

}  // namespace detail

/// Parses the contest instance format: keys name, obstacles, starts, targets.
inline Instance parse_instance(std::string_view text) {
  const nlohmann::json root = detail::parse_json(text);
  if (!root.is_object()) throw ParseError("instance JSON is not an object");
  std::string name;
  if (auto it = root.find("name"); it != root.end() && it->is_string()) name = it->get<std::string>();
  Instance inst(std::move(name), detail::cells_from_json(root, "obstacles"),
                detail::cells_from_json(root, "starts"), detail::cells_from_json(root, "targets"));
  // Density is optional metadata, either top level or under "meta".
  if (auto it = root.find("density"); it != root.end() && it->is_number()) {
    inst.density = it->get<double>();
  } else if (auto m = root.find("meta"); m != root.end() && m->is_object()) {
    if (auto d = m->find("density"); d != m->end() && d->is_number()) inst.density = d->get<double>();
  }
  inst.check();
  return inst;
}

inline std::string serialize_instance(const Instance& inst) {
  nlohmann::json root;
  root["name"] = inst.name;
  root["obstacles"] = detail::cells_to_json(inst.obstacles);
  root["starts"] = detail::cells_to_json(inst.starts);
  root["targets"] = detail::cells_to_json(inst.targets);
  if (inst.density) root["density"] = *inst.density;
  return root.dump();
}

/// `{"instance": name, "steps": [{"<id>": "<N|E|S|W>", ...}, ...]}`, waits omitted.
inline std::string serialize_solution(const Solution& s) {
  nlohmann::json root;
  root["instance"] = s.instance_name();
  auto steps = nlohmann::json::array();
  for (const auto& step : s.steps()) {
    auto obj = nlohmann::json::object();
    for (const auto& [r, d] : step) obj[std::to_string(r)] = std::string(1, direction_char(d));
    steps.push_back(std::move(obj));
  }
  root["steps"] = std::move(steps);
  return root.dump();
}

/// Rebuilds paths from the instance starts. An instance-name mismatch is only
/// reported through `warnings`.
inline Solution parse_solution(std::string_view text, const Instance& inst,
                               std::vector<std::string>* warnings = nullptr) {
  const nlohmann::json root = detail::parse_json(text);
  if (!root.is_object()) throw ParseError("solution JSON is not an object");
  std::string name;
  if (auto it = root.find("instance"); it != root.end() && it->is_string()) {
    name = it->get<std::string>();
  }
  if (name != inst.name && warnings) {
    warnings->push_back("solution names instance '" + name + "' but instance is '" + inst.name +
                        "'");
  }
  auto it = root.find("steps");
  if (it == root.end() || !it->is_array()) throw ParseError("missing 'steps' array");
  std::vector<std::map<RobotId, Direction>> steps;
  steps.reserve(it->size());
  for (std::size_t i = 0; i < it->size(); ++i) {
    const auto& obj = (*it)[i];
    if (!obj.is_object()) throw ParseError("step " + std::to_string(i) + " is not an object");
    auto& step = steps.emplace_back();
    for (const auto& [key, value] : obj.items()) {
      std::size_t used = 0;
      long id = -1;
      try {
        id = std::stol(key, &used);
      } catch (const std::exception&) {
        used = 0;
      }
      if (used != key.size() || id < 0 || static_cast<std::size_t>(id) >= inst.num_robots()) {
        throw ParseError("step " + std::to_string(i) + ": unknown robot id '" + key + "'");
      }
      if (!value.is_string()) {
        throw ParseError("step " + std::to_string(i) + ": direction for robot " + key +
                         " is not a string");
      }
      step[static_cast<RobotId>(id)] = parse_direction(value.get<std::string>());
    }
  }
  return Solution::from_steps(name.empty() ? inst.name : name, inst.starts, steps);
}

inline std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline void write_file(const std::string& path, std::string_view content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write '" + path + "'");
  out << content;
}

}  // namespace cmplan
