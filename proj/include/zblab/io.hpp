#pragma once

#include "zblab/dynamics.hpp"
#include "zblab/horizon.hpp"

#include <charconv>
#include <cstdio>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>

namespace zblab {

//==============================================================================
// Flat key-value documents:  key = value, '#' starts a comment

using KeyValues = std::map<std::string, std::string, std::less<>>;

inline std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string_view::npos)
    return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return std::string(s.substr(b, e - b + 1));
}

inline KeyValues parse_key_values(std::istream &in) {
  KeyValues out;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (const auto hash = line.find('#'); hash != std::string::npos)
      line.erase(hash);
    const std::string content = trim(line);
    if (content.empty())
      continue;
    const auto eq = content.find('=');
    if (eq == std::string::npos)
      throw Error(ErrorKind::InvalidConfig,
                  "line " + std::to_string(lineno) + ": expected key = value");
    const std::string key = trim(std::string_view(content).substr(0, eq));
    if (key.empty())
      throw Error(ErrorKind::InvalidConfig, "line " + std::to_string(lineno) + ": empty key");
    out[key] = trim(std::string_view(content).substr(eq + 1));
  }
  return out;
}

inline KeyValues parse_key_values(std::string_view text) {
  std::istringstream in{std::string(text)};
  return parse_key_values(in);
}

inline double parse_double(std::string_view key, std::string_view text) {
  const std::string s = trim(text);
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size())
    throw Error(ErrorKind::InvalidConfig, std::string(key) + ": not a number '" + s + "'");
  return v;
}

inline std::vector<double> parse_list(std::string_view key, std::string_view text) {
  std::vector<double> out;
  std::string item;
  std::istringstream in{std::string(text)};
  while (std::getline(in, item, ','))
    out.push_back(parse_double(key, item));
  return out;
}

inline Vec3 parse_vec3(std::string_view key, std::string_view text) {
  const auto v = parse_list(key, text);
  if (v.size() != 3)
    throw Error(ErrorKind::InvalidConfig, std::string(key) + ": expected three components");
  return Vec3(v[0], v[1], v[2]);
}

inline HorizonScenario parse_scenario(const KeyValues &kv) {
  HorizonScenario s;
  const std::array<std::pair<const char *, double *>, 5> fields{
      {{"r_g", &s.r_g}, {"r", &s.r}, {"r1", &s.r1}, {"r2", &s.r2}, {"r_prime", &s.r_prime}}};
  for (const auto &[name, target] : fields) {
    const auto it = kv.find(name);
    if (it == kv.end())
      throw Error(ErrorKind::InvalidConfig, std::string("scenario is missing key ") + name);
    *target = parse_double(name, it->second);
  }
  for (const auto &[key, value] : kv)
    if (std::none_of(fields.begin(), fields.end(), [&](auto &f) { return key == f.first; }))
      throw Error(ErrorKind::InvalidConfig, "unknown scenario key " + key);
  return s;
}

//==============================================================================
// Trajectory text format

inline constexpr std::string_view trajectory_header = "t,x1,x2,x3,j1,j2,j3,norm";

inline void write_trajectory_csv(std::ostream &out, const TrajectoryRecord &traj) {
  out << trajectory_header << '\n';
  char buf[32];
  auto put = [&](double v, char sep) {
    std::snprintf(buf, sizeof buf, "%.17g", v);
    out << buf << sep;
  };
  for (std::size_t i = 0; i < traj.size(); ++i) {
    put(traj.times[i], ',');
    for (int a = 0; a < 3; ++a)
      put(traj.position[i](a), ',');
    for (int a = 0; a < 3; ++a)
      put(traj.current[i](a), ',');
    put(traj.norm[i], '\n');
  }
}

inline TrajectoryRecord read_trajectory_csv(std::istream &in) {
  std::string line;
  if (!std::getline(in, line) || trim(line) != trajectory_header)
    throw Error(ErrorKind::InvalidConfig, "trajectory header must be " +
                                              std::string(trajectory_header));
  TrajectoryRecord traj;
  int lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (trim(line).empty())
      continue;
    const auto v = parse_list("trajectory line " + std::to_string(lineno), line);
    if (v.size() != 8)
      throw Error(ErrorKind::InvalidConfig,
                  "trajectory line " + std::to_string(lineno) + ": expected 8 columns");
    traj.times.push_back(v[0]);
    traj.position.emplace_back(v[1], v[2], v[3]);
    traj.current.emplace_back(v[4], v[5], v[6]);
    traj.norm.push_back(v[7]);
  }
  return traj;
}

} // namespace zblab
