#pragma once

#include "zblab/checks.hpp"
#include "zblab/io.hpp"

#include <fstream>

namespace zblab {

//! Everything a batch run needs. Built from a flat key-value document plus
//! command-line overrides.
struct RunConfig {
  // lattice
  LatticeSpec lattice{};
  std::vector<double> times{0.0, 0.3, 1.7};
  int random_times = 2;
  std::optional<PairReading> reading;
  std::optional<int> sector_charge;
  std::optional<IVec3> sector_momentum;

  // packet and grid
  PacketSpec packet{};
  GridSpec grid{};
  double periods = 8.0;
  int samples = 512;
  bool pure_branch = false;

  // spectrum
  std::optional<int> component;
  bool check_frequency = false;

  Tolerances tolerances = default_tolerances();
  std::uint64_t seed = 1;

  std::optional<Sector> sector() const {
    if (!sector_charge && !sector_momentum)
      return std::nullopt;
    return Sector{sector_charge, sector_momentum};
  }

  VerifyOptions verify_options() const {
    VerifyOptions v;
    v.lattice = lattice;
    v.times = times;
    v.random_times = random_times;
    v.seed = seed;
    v.reading = reading;
    v.sector = sector();
    v.tolerances = tolerances;
    return v;
  }

  PacketSpec effective_packet() const {
    PacketSpec p = packet;
    p.mass = lattice.mass;
    if (pure_branch) {
      p.w_plus = 1.0;
      p.w_minus = 0.0;
    }
    return p;
  }
};

struct ConfigKey {
  const char *name;
  const char *default_value;
  const char *help;
};

inline const std::vector<ConfigKey> &config_keys() {
  static const std::vector<ConfigKey> keys{
      {"mass", "1", "fermion mass m (required in a config file)"},
      {"spacing", "1", "lattice momentum spacing kappa"},
      {"n_max", "1", "lattice half extent: sites -n_max..n_max per resolved axis"},
      {"dim", "1", "lattice dimension, 1 or 3"},
      {"include_zero", "true", "keep the k = 0 site"},
      {"times", "0,0.3,1.7", "fixed operator check times"},
      {"random_times", "2", "extra check times drawn from [0, 10) with the seed"},
      {"reading", "auto", "pair channel reading: auto | as_written | relabeled"},
      {"sector_charge", "none", "restrict Fock space to this charge"},
      {"sector_momentum", "none", "restrict Fock space to this lattice momentum (3 ints)"},
      {"k0", "0,0,0", "packet center momentum"},
      {"sigma", "4", "packet width"},
      {"w_plus", "0.70710678118654757", "positive-branch weight"},
      {"w_minus", "0.70710678118654757", "negative-branch weight"},
      {"spin_axis", "1,0,0", "packet spin orientation"},
      {"pure_branch", "false", "force w_plus = 1, w_minus = 0"},
      {"grid_points", "512", "grid points per axis (power of two)"},
      {"box_length", "64", "box length L"},
      {"grid_dim", "1", "grid dimension, 1 or 3"},
      {"periods", "8", "ZB periods covered by the samples"},
      {"samples", "512", "number of time samples"},
      {"component", "auto", "current component for the spectrum: auto | 0 | 1 | 2"},
      {"check_frequency", "false", "spectrum: fail unless the peak is within tolerance of 2 omega(k0)"},
      {"seed", "1", "seed for every randomized choice"},
  };
  return keys;
}

inline bool parse_bool(std::string_view key, std::string_view text) {
  const std::string s = trim(text);
  if (s == "true" || s == "1" || s == "yes")
    return true;
  if (s == "false" || s == "0" || s == "no")
    return false;
  throw Error(ErrorKind::InvalidConfig, std::string(key) + ": expected true or false");
}

inline int parse_int(std::string_view key, std::string_view text) {
  const std::string s = trim(text);
  int v = 0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size())
    throw Error(ErrorKind::InvalidConfig, std::string(key) + ": not an integer '" + s + "'");
  return v;
}

inline std::optional<PairReading> parse_reading(std::string_view text) {
  const std::string s = trim(text);
  if (s == "auto")
    return std::nullopt;
  if (s == "as_written")
    return PairReading::as_written;
  if (s == "relabeled")
    return PairReading::relabeled;
  throw Error(ErrorKind::InvalidConfig, "reading: expected auto, as_written or relabeled");
}

//! Splits NAME=VALUE.
inline std::pair<std::string, std::string> split_assignment(std::string_view text) {
  const auto eq = text.find('=');
  if (eq == std::string_view::npos)
    throw Error(ErrorKind::InvalidConfig, "expected NAME=VALUE, got '" + std::string(text) + "'");
  return {trim(text.substr(0, eq)), trim(text.substr(eq + 1))};
}

inline void set_tolerance(Tolerances &tol, const std::string &name, std::string_view value) {
  const auto it = tol.find(name);
  if (it == tol.end())
    throw Error(ErrorKind::InvalidConfig, "unknown tolerance " + name);
  const double v = parse_double(name, value);
  if (!(v > 0.0) || !std::isfinite(v))
    throw Error(ErrorKind::InvalidConfig, "tolerance " + name + " must be > 0");
  it->second = v;
}

inline void apply_setting(RunConfig &c, const std::string &key, std::string_view value) {
  if (key.rfind("tolerance.", 0) == 0) {
    set_tolerance(c.tolerances, key.substr(10), value);
    return;
  }
  if (key == "mass")
    c.lattice.mass = parse_double(key, value);
  else if (key == "spacing")
    c.lattice.spacing = parse_double(key, value);
  else if (key == "n_max")
    c.lattice.half_extent = parse_int(key, value);
  else if (key == "dim")
    c.lattice.dim = parse_int(key, value);
  else if (key == "include_zero")
    c.lattice.include_zero = parse_bool(key, value);
  else if (key == "times")
    c.times = trim(value).empty() ? std::vector<double>{} : parse_list(key, value);
  else if (key == "random_times")
    c.random_times = parse_int(key, value);
  else if (key == "reading")
    c.reading = parse_reading(value);
  else if (key == "sector_charge")
    c.sector_charge = trim(value) == "none" ? std::nullopt : std::optional(parse_int(key, value));
  else if (key == "sector_momentum") {
    if (trim(value) == "none") {
      c.sector_momentum.reset();
    } else {
      const auto v = parse_vec3(key, value);
      if (v != v.array().round().matrix())
        throw Error(ErrorKind::InvalidConfig, "sector_momentum: expected integers");
      c.sector_momentum = v.cast<int>();
    }
  } else if (key == "k0")
    c.packet.k0 = parse_vec3(key, value);
  else if (key == "sigma")
    c.packet.sigma = parse_double(key, value);
  else if (key == "w_plus")
    c.packet.w_plus = parse_double(key, value);
  else if (key == "w_minus")
    c.packet.w_minus = parse_double(key, value);
  else if (key == "spin_axis")
    c.packet.spin_axis = parse_vec3(key, value);
  else if (key == "pure_branch")
    c.pure_branch = parse_bool(key, value);
  else if (key == "grid_points")
    c.grid.points = parse_int(key, value);
  else if (key == "box_length")
    c.grid.length = parse_double(key, value);
  else if (key == "grid_dim")
    c.grid.dim = parse_int(key, value);
  else if (key == "periods")
    c.periods = parse_double(key, value);
  else if (key == "samples")
    c.samples = parse_int(key, value);
  else if (key == "component")
    c.component = trim(value) == "auto" ? std::nullopt : std::optional(parse_int(key, value));
  else if (key == "check_frequency")
    c.check_frequency = parse_bool(key, value);
  else if (key == "seed")
    c.seed = std::uint64_t(parse_int(key, value));
  else
    throw Error(ErrorKind::InvalidConfig, "unknown config key " + key);
}

inline void check_config(const RunConfig &c) {
  if (!(c.lattice.mass >= 0.0) || !std::isfinite(c.lattice.mass))
    throw Error(ErrorKind::InvalidConfig, "mass must be finite and >= 0");
  if (c.random_times < 0)
    throw Error(ErrorKind::InvalidConfig, "random_times must be >= 0");
  if (c.samples < 1 || !(c.periods > 0.0))
    throw Error(ErrorKind::InvalidConfig, "samples and periods must be positive");
  if (c.component && (*c.component < 0 || *c.component > 2))
    throw Error(ErrorKind::InvalidConfig, "component must be 0, 1, 2 or auto");
}

//! A config document must name the mass explicitly; every other key has a default.
inline RunConfig load_config(const KeyValues &kv) {
  if (!kv.contains("mass"))
    throw Error(ErrorKind::InvalidConfig, "config is missing required key mass");
  RunConfig c;
  for (const auto &[key, value] : kv)
    apply_setting(c, key, value);
  return c;
}

inline RunConfig load_config_file(const std::string &path) {
  std::ifstream in(path);
  if (!in)
    throw Error(ErrorKind::InvalidConfig, "cannot read config " + path);
  return load_config(parse_key_values(in));
}

} // namespace zblab
