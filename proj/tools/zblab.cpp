#include "zblab/config.hpp"
#include "zblab/spectrum.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdlib>
#include <filesystem>
#include <iostream>

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;
using namespace zblab;

namespace {

constexpr const char *schema = "zblab.report/1";

enum Exit { ok = 0, check_failed = 1, usage = 2 };

struct Options {
  std::string config_path;
  std::string out_dir;
  std::optional<std::uint64_t> seed;
  std::vector<std::string> tolerances;
  std::vector<std::string> settings;
  std::string format = "svg";
  std::string input;
  bool pure_branch = false;
  bool check = false;
  bool flat = false;
};

RunConfig resolve_config(const Options &o) {
  RunConfig c = o.config_path.empty() ? RunConfig{} : load_config_file(o.config_path);
  for (const auto &s : o.settings) {
    const auto [k, v] = split_assignment(s);
    apply_setting(c, k, v);
  }
  for (const auto &t : o.tolerances) {
    const auto [k, v] = split_assignment(t);
    set_tolerance(c.tolerances, k, v);
  }
  if (o.seed)
    c.seed = *o.seed;
  if (o.pure_branch)
    c.pure_branch = true;
  if (o.check)
    c.check_frequency = true;
  check_config(c);
  return c;
}

fs::path output_dir(const Options &o) {
  fs::path dir = o.out_dir;
  if (dir.empty()) {
    const char *env = std::getenv("ZBLAB_OUT");
    dir = env && *env ? env : ".";
  }
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec)
    throw Error(ErrorKind::InvalidConfig, "cannot create output directory " + dir.string());
  return dir;
}

json vec_json(const Vec3 &v) { return json::array({v(0), v(1), v(2)}); }

class Report {
public:
  explicit Report(std::string command) { m_lines.push_back({{"schema", schema}, {"command", command}}); }

  json &header() { return m_lines.front(); }

  void check(const CheckResult &c) {
    m_lines.push_back({{"check", c.name},
                       {"value", c.value},
                       {"tolerance", c.tolerance},
                       {"status", c.passed ? "PASS" : "FAIL"}});
    std::printf("%s %-34s %.3e (tol %.1e)\n", c.passed ? "PASS" : "FAIL", c.name.c_str(), c.value,
                c.tolerance);
    if (!c.passed)
      ++m_failed;
    ++m_total;
  }

  void add(json line) { m_lines.push_back(std::move(line)); }

  int failed() const { return m_failed; }

  void write(const fs::path &path, json summary) {
    summary["checks"] = m_total;
    summary["failed"] = m_failed;
    summary["status"] = m_failed == 0 ? "PASS" : "FAIL";
    m_lines.push_back({{"summary", std::move(summary)}});
    std::ofstream out(path, std::ios::binary);
    if (!out)
      throw Error(ErrorKind::InvalidConfig, "cannot write " + path.string());
    for (const auto &line : m_lines)
      out << line.dump() << '\n';
  }

private:
  std::vector<json> m_lines;
  int m_failed = 0;
  int m_total = 0;
};

json lattice_json(const RunConfig &c) {
  json j{{"mass", c.lattice.mass},
         {"spacing", c.lattice.spacing},
         {"n_max", c.lattice.half_extent},
         {"dim", c.lattice.dim},
         {"include_zero", c.lattice.include_zero}};
  if (c.sector_charge)
    j["sector_charge"] = *c.sector_charge;
  if (c.sector_momentum)
    j["sector_momentum"] = {(*c.sector_momentum)(0), (*c.sector_momentum)(1),
                            (*c.sector_momentum)(2)};
  return j;
}

int run_verify(const RunConfig &c, const fs::path &dir) {
  const auto outcome = run_verification(c.verify_options());
  Report report("verify");
  report.header()["seed"] = c.seed;
  report.header()["lattice"] = lattice_json(c);
  report.header()["times"] = outcome.times;
  report.header()["fock_dimension"] = outcome.dimension;
  for (const auto &a : outcome.decomposition.attempts)
    report.add({{"reading", to_string(a.reading)},
                {"calibration_residual", a.calibration_residual},
                {"max_residual", a.max_residual},
                {"accepted", a.passed}});
  for (const auto &check : outcome.checks)
    report.check(check);
  const auto reading = to_string(outcome.decomposition.final_attempt().reading);
  report.write(dir / "verify_report.jsonl", {{"reading", reading}});
  std::printf("reading %s, Fock dimension %zu, %d failed\n", std::string(reading).c_str(),
              outcome.dimension, report.failed());
  return report.failed() == 0 ? ok : check_failed;
}

struct Simulation {
  TrajectoryRecord trajectory;
  Vec3 mean_velocity = Vec3::Zero();
  SpectrumReport spectrum;
  double norm_drift = 0.0;
  double expected_frequency = 0.0;
};

Simulation simulate(const RunConfig &c) {
  const auto packet = c.effective_packet();
  Simulation s;
  const auto times = zb_sample_times(packet.k0, packet.mass, c.periods, c.samples);
  s.trajectory = evolve_packet(packet, c.grid, times);
  for (std::size_t i = 0; i < s.trajectory.size(); ++i) {
    s.mean_velocity += s.trajectory.current[i];
    s.norm_drift = std::max(s.norm_drift, std::abs(s.trajectory.norm[i] - 1.0));
  }
  s.mean_velocity /= double(s.trajectory.size());
  s.spectrum = zb_spectrum(s.trajectory, c.component);
  s.expected_frequency = 2.0 * energy(packet.k0, packet.mass);
  return s;
}

json spectrum_json(const SpectrumReport &r) {
  json secondary = json::array();
  for (const auto &p : r.secondary)
    secondary.push_back({{"frequency", p.frequency}, {"amplitude", p.amplitude}});
  return {{"component", r.component},
          {"frequency", r.frequency},
          {"amplitude", r.amplitude},
          {"fit_residual", r.fit_residual},
          {"secondary", secondary}};
}

int run_simulate(const RunConfig &c, const fs::path &dir) {
  const auto s = simulate(c);
  {
    std::ofstream out(dir / "trajectory.csv", std::ios::binary);
    if (!out)
      throw Error(ErrorKind::InvalidConfig, "cannot write trajectory.csv");
    write_trajectory_csv(out, s.trajectory);
  }
  const auto packet = c.effective_packet();
  Report report("simulate");
  report.header()["seed"] = c.seed;
  report.header()["packet"] = {{"k0", vec_json(packet.k0)},
                               {"sigma", packet.sigma},
                               {"w_plus", {packet.w_plus.real(), packet.w_plus.imag()}},
                               {"w_minus", {packet.w_minus.real(), packet.w_minus.imag()}},
                               {"spin_axis", vec_json(packet.spin_axis)},
                               {"mass", packet.mass}};
  report.header()["grid"] = {
      {"points", c.grid.points}, {"length", c.grid.length}, {"dim", c.grid.dim}};
  report.add({{"mean_velocity", vec_json(s.mean_velocity)},
              {"zb_amplitude", s.spectrum.amplitude},
              {"zb_frequency", s.spectrum.frequency},
              {"expected_frequency", s.expected_frequency}});
  report.check({"norm.drift", s.norm_drift, c.tolerances.at("norm"),
                s.norm_drift <= c.tolerances.at("norm")});
  report.write(dir / "simulate_report.jsonl", {{"trajectory", "trajectory.csv"}});
  std::printf("mean velocity (%.6f, %.6f, %.6f)\n", s.mean_velocity(0), s.mean_velocity(1),
              s.mean_velocity(2));
  std::printf("ZB amplitude %.6e at frequency %.6f (2 omega = %.6f)\n", s.spectrum.amplitude,
              s.spectrum.frequency, s.expected_frequency);
  return report.failed() == 0 ? ok : check_failed;
}

int run_spectrum(const RunConfig &c, const Options &o, const fs::path &dir) {
  std::ifstream in(o.input, std::ios::binary);
  if (!in)
    throw Error(ErrorKind::InvalidConfig, "cannot read trajectory " + o.input);
  const auto traj = read_trajectory_csv(in);
  const auto r = zb_spectrum(traj, c.component);
  const double expected = 2.0 * energy(c.packet.k0, c.lattice.mass);
  const double rel = expected > 0.0 ? std::abs(r.frequency - expected) / expected : 0.0;

  Report report("spectrum");
  report.header()["expected_frequency"] = expected;
  report.add({{"spectrum", spectrum_json(r)}});
  std::printf("dominant frequency %.6f, amplitude %.6e (component %d)\n", r.frequency, r.amplitude,
              r.component);
  if (c.check_frequency)
    report.check({"spectrum.frequency", rel, c.tolerances.at("frequency"),
                  rel <= c.tolerances.at("frequency")});
  report.write(dir / "spectrum_report.jsonl", {{"relative_error", rel}});
  return report.failed() == 0 ? ok : check_failed;
}

int run_horizon(const RunConfig &, const Options &o, const fs::path &dir) {
  const auto format = parse_diagram_format(o.format);
  EventTimeline tl;
  if (o.flat) {
    tl = flat_space_analogue(FlatExchange{});
  } else {
    if (o.input.empty())
      throw Error(ErrorKind::InvalidConfig, "horizon needs a scenario file (or --flat)");
    std::ifstream in(o.input);
    if (!in)
      throw Error(ErrorKind::InvalidConfig, "cannot read scenario " + o.input);
    const auto scenario = parse_scenario(parse_key_values(in));
    const auto check = validate_scenario(scenario);
    if (!check.ok()) {
      for (const auto &v : check.violations)
        std::fprintf(stderr, "violation: %s (%s)\n", v.constraint.c_str(), v.detail.c_str());
      return check_failed;
    }
    std::printf("scenario ok, variant %s\n", std::string(to_string(*check.variant)).c_str());
    tl = horizon_timeline(scenario);
  }
  const auto name = format == DiagramFormat::svg ? "horizon.svg" : "horizon.txt";
  std::ofstream out(dir / name, std::ios::binary);
  if (!out)
    throw Error(ErrorKind::InvalidConfig, std::string("cannot write ") + name);
  out << emit_diagram(tl, format);
  std::printf("wrote %s\n", (dir / name).string().c_str());
  return ok;
}

int run_selftest(const RunConfig &c, const fs::path &dir) {
  Report report("selftest");
  report.header()["seed"] = c.seed;

  RunConfig vc = c;
  vc.lattice = LatticeSpec{};
  vc.sector_charge.reset();
  vc.sector_momentum.reset();
  const auto outcome = run_verification(vc.verify_options());
  for (auto check : outcome.checks) {
    check.name = "verify." + check.name;
    report.check(check);
  }

  RunConfig sc = c;
  sc.packet = PacketSpec{};
  sc.grid = GridSpec{};
  sc.lattice.mass = 1.0;
  sc.pure_branch = false;
  const auto s = simulate(sc);
  report.check({"simulate.norm", s.norm_drift, c.tolerances.at("norm"),
                s.norm_drift <= c.tolerances.at("norm")});
  const double rel = std::abs(s.spectrum.frequency - s.expected_frequency) / s.expected_frequency;
  report.check({"simulate.frequency", rel, c.tolerances.at("frequency"),
                rel <= c.tolerances.at("frequency")});

  const auto scenario = validate_scenario(HorizonScenario{});
  report.check({"horizon.scenario", double(scenario.violations.size()), 0.5, scenario.ok()});
  const auto svg = emit_diagram(horizon_timeline(HorizonScenario{}), DiagramFormat::svg);
  const bool same = svg == emit_diagram(horizon_timeline(HorizonScenario{}), DiagramFormat::svg);
  report.check({"horizon.determinism", same ? 0.0 : 1.0, 0.5, same});

  report.write(dir / "selftest_report.jsonl", json::object());
  return report.failed() == 0 ? ok : check_failed;
}

std::string config_help() {
  std::string text = "Config keys (flat 'key = value' file, '#' comments; override with --set):\n";
  char buf[256];
  for (const auto &k : config_keys()) {
    std::snprintf(buf, sizeof buf, "  %-16s %-22s %s\n", k.name, k.default_value, k.help);
    text += buf;
  }
  text += "Tolerances (--tolerance NAME=VALUE or tolerance.NAME in the config):\n";
  for (const auto &[name, value] : default_tolerances()) {
    std::snprintf(buf, sizeof buf, "  %-16s %g\n", name.c_str(), value);
    text += buf;
  }
  text += "Output directory: --out, else $ZBLAB_OUT, else the working directory.\n"
          "Exit codes: 0 success, 1 check failure, 2 usage or config error.\n";
  return text;
}

void add_common(CLI::App *cmd, Options &o) {
  cmd->add_option("--config", o.config_path, "key-value config file")->check(CLI::ExistingFile);
  cmd->add_option("--out", o.out_dir, "output directory");
  cmd->add_option("--seed", o.seed, "seed for randomized choices");
  cmd->add_option("--tolerance", o.tolerances, "override a tolerance, NAME=VALUE");
  cmd->add_option("--set", o.settings, "override a config key, KEY=VALUE");
}

} // namespace

int main(int argc, char **argv) {
  CLI::App app{"Zitterbewegung field-theory lab"};
  app.footer(config_help());
  app.require_subcommand(1);
  Options o;

  auto *verify = app.add_subcommand("verify", "check spinor, Fock and current identities");
  auto *sim = app.add_subcommand("simulate", "evolve a wave packet and write trajectory.csv");
  auto *spec = app.add_subcommand("spectrum", "dominant ZB frequency of a trajectory");
  auto *horizon = app.add_subcommand("horizon", "validate a scenario and draw the diagram");
  auto *self = app.add_subcommand("selftest", "quick end-to-end battery");
  for (auto *cmd : {verify, sim, spec, horizon, self})
    add_common(cmd, o);
  sim->add_flag("--pure-branch", o.pure_branch, "positive branch only");
  spec->add_option("trajectory", o.input, "trajectory CSV")->required();
  spec->add_flag("--check", o.check, "fail unless the peak matches 2 omega(k0)");
  horizon->add_option("scenario", o.input, "scenario key-value file");
  horizon->add_option("--format", o.format, "svg | ascii")->capture_default_str();
  horizon->add_flag("--flat", o.flat, "draw the flat-space exchange instead");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError &e) {
    const int code = app.exit(e);
    return code == 0 ? ok : usage;
  }

  try {
    const RunConfig config = resolve_config(o);
    const auto dir = output_dir(o);
    if (verify->parsed())
      return run_verify(config, dir);
    if (sim->parsed())
      return run_simulate(config, dir);
    if (spec->parsed())
      return run_spectrum(config, o, dir);
    if (horizon->parsed())
      return run_horizon(config, o, dir);
    return run_selftest(config, dir);
  } catch (const Error &e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    std::fprintf(stderr, "run with --help for usage\n");
    return usage;
  }
}
