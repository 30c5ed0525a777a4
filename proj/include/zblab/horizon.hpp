#pragma once

#include "zblab/errors.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace zblab {

//==============================================================================
// Scenario and validation

//! Radii of the horizon exchange picture. r_prime is a finite stand-in for
//! the escape to infinity.
struct HorizonScenario {
  double r_g = 1.0;
  double r = 0.5;
  double r1 = 1.5;
  double r2 = 0.7;
  double r_prime = 10.0;
};

enum class HorizonVariant { r_inside_r2, r2_inside_r };

inline std::string_view to_string(HorizonVariant v) {
  return v == HorizonVariant::r_inside_r2 ? "r_inside_r2" : "r2_inside_r";
}

namespace constraint {
inline constexpr std::string_view creation_outside = "r1 > r_g";
inline constexpr std::string_view annihilation_inside = "r2 < r_g";
inline constexpr std::string_view original_inside = "r < r_g";
inline constexpr std::string_view escape_beyond = "r_prime > r1";
inline constexpr std::string_view variant = "r < r2 < r_g or r2 < r < r_g";
} // namespace constraint

struct Violation {
  std::string constraint;
  std::string detail;
};

struct ScenarioCheck {
  std::vector<Violation> violations;
  std::optional<HorizonVariant> variant;

  bool ok() const { return violations.empty(); }
  bool violates(std::string_view name) const {
    return std::any_of(violations.begin(), violations.end(),
                       [&](const Violation &v) { return v.constraint == name; });
  }
};

inline ScenarioCheck validate_scenario(const HorizonScenario &s) {
  const std::array<std::pair<const char *, double>, 5> radii{
      {{"r_g", s.r_g}, {"r", s.r}, {"r1", s.r1}, {"r2", s.r2}, {"r_prime", s.r_prime}}};
  for (const auto &[name, value] : radii)
    if (!std::isfinite(value) || !(value > 0.0))
      throw Error(ErrorKind::NonPositiveRadius, std::string(name) + " must be finite and > 0");

  ScenarioCheck out;
  auto require = [&](bool holds, std::string_view name, std::string detail) {
    if (!holds)
      out.violations.push_back({std::string(name), std::move(detail)});
  };
  char buf[160];
  std::snprintf(buf, sizeof buf, "r1 = %g, r_g = %g", s.r1, s.r_g);
  require(s.r1 > s.r_g, constraint::creation_outside, buf);
  std::snprintf(buf, sizeof buf, "r2 = %g, r_g = %g", s.r2, s.r_g);
  require(s.r2 < s.r_g, constraint::annihilation_inside, buf);
  std::snprintf(buf, sizeof buf, "r = %g, r_g = %g", s.r, s.r_g);
  require(s.r < s.r_g, constraint::original_inside, buf);
  std::snprintf(buf, sizeof buf, "r_prime = %g, r1 = %g", s.r_prime, s.r1);
  require(s.r_prime > s.r1, constraint::escape_beyond, buf);

  const bool inner = s.r < s.r2 && s.r2 < s.r_g;
  const bool outer = s.r2 < s.r && s.r < s.r_g;
  std::snprintf(buf, sizeof buf, "r = %g, r2 = %g, r_g = %g", s.r, s.r2, s.r_g);
  require(inner || outer, constraint::variant, buf);
  if (inner)
    out.variant = HorizonVariant::r_inside_r2;
  else if (outer)
    out.variant = HorizonVariant::r2_inside_r;
  return out;
}

//==============================================================================
// Event timelines

enum class EventKind { origin, creation, annihilation, escape };
enum class Particle { original, pair_electron, pair_positron };

inline std::string_view to_string(EventKind k) {
  switch (k) {
  case EventKind::origin: return "origin";
  case EventKind::creation: return "creation";
  case EventKind::annihilation: return "annihilation";
  case EventKind::escape: return "escape";
  }
  return "";
}

inline std::string_view to_string(Particle p) {
  switch (p) {
  case Particle::original: return "original";
  case Particle::pair_electron: return "pair_electron";
  case Particle::pair_positron: return "pair_positron";
  }
  return "";
}

struct Event {
  EventKind kind;
  double position;
  double time;
  std::string label; //!< coordinate name, e.g. "x1" or "r1"
};

struct Segment {
  Particle particle;
  std::size_t from; //!< event index
  std::size_t to;
  std::string label; //!< charge label drawn on the worldline
};

//! Schematic spacetime picture: events on a line at equally spaced times
//! (origin 0, creation 1, annihilation 2, escape 3).
struct EventTimeline {
  std::optional<double> horizon;
  std::vector<Event> events;
  std::vector<Segment> segments;
  bool escape_to_infinity = false;

  const Event &event(EventKind k) const {
    return *std::find_if(events.begin(), events.end(), [&](const Event &e) { return e.kind == k; });
  }
  const Segment &segment(Particle p) const {
    return *std::find_if(segments.begin(), segments.end(),
                         [&](const Segment &s) { return s.particle == p; });
  }

  //! Number of segment endpoints attached to the first event of this kind.
  std::size_t degree(EventKind k) const {
    std::size_t idx = 0;
    while (idx < events.size() && events[idx].kind != k)
      ++idx;
    std::size_t d = 0;
    for (const auto &s : segments)
      d += std::size_t(s.from == idx) + std::size_t(s.to == idx);
    return d;
  }

  std::size_t count(EventKind k) const {
    return std::size_t(std::count_if(events.begin(), events.end(),
                                     [&](const Event &e) { return e.kind == k; }));
  }

  //! Segments crossing the horizon inward / outward.
  std::pair<std::size_t, std::size_t> horizon_crossings() const {
    std::size_t in = 0, out = 0;
    if (!horizon)
      return {0, 0};
    for (const auto &s : segments) {
      const double a = events[s.from].position, b = events[s.to].position;
      if (a > *horizon && b < *horizon)
        ++in;
      if (a < *horizon && b > *horizon)
        ++out;
    }
    return {in, out};
  }
};

namespace detail {

inline EventTimeline exchange_timeline(double origin, double create, double annihilate,
                                       double survive, const char *prefix) {
  const std::string p(prefix);
  EventTimeline tl;
  tl.events = {{EventKind::origin, origin, 0.0, p},
               {EventKind::creation, create, 1.0, p + "1"},
               {EventKind::annihilation, annihilate, 2.0, p + "2"},
               {EventKind::escape, survive, 3.0, p + "'"}};
  tl.segments = {{Particle::original, 0, 2, "e⁻"},
                 {Particle::pair_positron, 1, 2, "e⁺"},
                 {Particle::pair_electron, 1, 3, "e⁻"}};
  return tl;
}

} // namespace detail

//! Positions of the flat-space exchange: original electron at x, pair created
//! at x1, positron meets the original at x2, pair electron left over at x'.
struct FlatExchange {
  double x = 0.0;
  double x1 = 0.4;
  double x2 = 0.1;
  double x_prime = 0.5;
};

inline EventTimeline flat_space_analogue(const FlatExchange &f) {
  for (const double v : {f.x, f.x1, f.x2, f.x_prime})
    if (!std::isfinite(v))
      throw Error(ErrorKind::InconsistentInput, "positions must be finite");
  return detail::exchange_timeline(f.x, f.x1, f.x2, f.x_prime, "x");
}

//! The same exchange with a horizon between creation and annihilation.
inline EventTimeline horizon_timeline(const HorizonScenario &s) {
  const auto check = validate_scenario(s);
  if (!check.ok())
    throw Error(ErrorKind::InconsistentInput,
                "scenario violates " + check.violations.front().constraint);
  auto tl = detail::exchange_timeline(s.r, s.r1, s.r2, s.r_prime, "r");
  tl.horizon = s.r_g;
  tl.escape_to_infinity = true;
  return tl;
}

//==============================================================================
// Rendering

enum class DiagramFormat { svg, ascii };

inline DiagramFormat parse_diagram_format(std::string_view name) {
  if (name == "svg")
    return DiagramFormat::svg;
  if (name == "ascii")
    return DiagramFormat::ascii;
  throw Error(ErrorKind::UnsupportedFormat, "unknown diagram format '" + std::string(name) + "'");
}

namespace detail {

struct Frame {
  double lo, hi;
  double left, right, bottom, top;

  double x(double r) const { return left + (r - lo) / (hi - lo) * (right - left); }
  double y(double t) const { return bottom - t / 3.0 * (bottom - top); }
};

inline Frame make_frame(const EventTimeline &tl, double left, double right, double bottom,
                        double top) {
  double lo = tl.events.front().position, hi = lo;
  for (const auto &e : tl.events) {
    lo = std::min(lo, e.position);
    hi = std::max(hi, e.position);
  }
  if (tl.horizon) {
    lo = std::min(lo, *tl.horizon);
    hi = std::max(hi, *tl.horizon);
  }
  if (hi - lo < 1e-12) {
    lo -= 1.0;
    hi += 1.0;
  }
  const double pad = 0.08 * (hi - lo);
  return {lo - pad, hi + pad, left, right, bottom, top};
}

inline std::string fmt(const char *pattern, double a) {
  char buf[64];
  std::snprintf(buf, sizeof buf, pattern, a);
  return buf;
}

inline std::string num(double v) { return fmt("%.2f", v); }

inline std::string render_svg(const EventTimeline &tl) {
  const double width = 640, height = 420;
  const auto frame = make_frame(tl, 60, width - 60, height - 60, 40);
  const char *axis_name = tl.horizon ? "r" : "x";
  std::string out;
  out += "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
  out += "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"" + num(width) +
         "\" height=\"" + num(height) + "\" viewBox=\"0 0 " + num(width) + " " + num(height) +
         "\">\n";
  out += "<rect x=\"0\" y=\"0\" width=\"" + num(width) + "\" height=\"" + num(height) +
         "\" fill=\"white\"/>\n";

  // axes: radial coordinate horizontal, time vertical
  out += "<line class=\"axis\" x1=\"" + num(frame.left) + "\" y1=\"" + num(frame.bottom) +
         "\" x2=\"" + num(frame.right) + "\" y2=\"" + num(frame.bottom) +
         "\" stroke=\"black\" stroke-width=\"1\"/>\n";
  out += "<line class=\"axis\" x1=\"" + num(frame.left) + "\" y1=\"" + num(frame.bottom) +
         "\" x2=\"" + num(frame.left) + "\" y2=\"" + num(frame.top - 10) +
         "\" stroke=\"black\" stroke-width=\"1\"/>\n";
  out += "<text x=\"" + num(frame.right + 10) + "\" y=\"" + num(frame.bottom + 4) +
         "\" font-family=\"sans-serif\" font-size=\"14\">" + axis_name + "</text>\n";
  out += "<text x=\"" + num(frame.left - 4) + "\" y=\"" + num(frame.top - 16) +
         "\" font-family=\"sans-serif\" font-size=\"14\">t</text>\n";

  if (tl.horizon) {
    const double hx = frame.x(*tl.horizon);
    out += "<line class=\"horizon\" x1=\"" + num(hx) + "\" y1=\"" + num(frame.bottom) +
           "\" x2=\"" + num(hx) + "\" y2=\"" + num(frame.top) +
           "\" stroke=\"gray\" stroke-width=\"1.5\" stroke-dasharray=\"6,4\"/>\n";
    out += "<text x=\"" + num(hx + 4) + "\" y=\"" + num(frame.top + 2) +
           "\" font-family=\"sans-serif\" font-size=\"12\">r_g</text>\n";
  }

  for (const auto &s : tl.segments) {
    const auto &a = tl.events[s.from];
    const auto &b = tl.events[s.to];
    const double x1 = frame.x(a.position), y1 = frame.y(a.time);
    const double x2 = frame.x(b.position), y2 = frame.y(b.time);
    const char *color = s.particle == Particle::pair_positron ? "#c0392b" : "#1f4e9c";
    out += "<line class=\"worldline\" data-particle=\"" + std::string(to_string(s.particle)) +
           "\" x1=\"" + num(x1) + "\" y1=\"" + num(y1) + "\" x2=\"" + num(x2) + "\" y2=\"" +
           num(y2) + "\" stroke=\"" + color + "\" stroke-width=\"2\"/>\n";
    out += "<text class=\"worldline-label\" x=\"" + num(0.5 * (x1 + x2) + 6) + "\" y=\"" +
           num(0.5 * (y1 + y2)) + "\" font-family=\"sans-serif\" font-size=\"13\" fill=\"" +
           color + "\">" + s.label + "</text>\n";
  }

  for (const auto &e : tl.events) {
    const double x = frame.x(e.position), y = frame.y(e.time);
    if (e.kind == EventKind::creation || e.kind == EventKind::annihilation) {
      out += "<circle class=\"vertex\" data-kind=\"" + std::string(to_string(e.kind)) +
             "\" cx=\"" + num(x) + "\" cy=\"" + num(y) + "\" r=\"4\" fill=\"" +
             (e.kind == EventKind::creation ? "white" : "black") +
             "\" stroke=\"black\" stroke-width=\"1.5\"/>\n";
    }
    if (e.kind == EventKind::escape && tl.escape_to_infinity) {
      out += "<path class=\"escape-arrow\" d=\"M " + num(x) + " " + num(y) + " L " +
             num(x - 10) + " " + num(y - 5) + " L " + num(x - 10) + " " + num(y + 5) +
             " Z\" fill=\"#1f4e9c\"/>\n";
    }
    const std::string label =
        e.kind == EventKind::escape && tl.escape_to_infinity ? e.label + " → ∞" : e.label;
    out += "<text class=\"event-label\" x=\"" + num(x) + "\" y=\"" + num(frame.bottom + 18) +
           "\" font-family=\"sans-serif\" font-size=\"11\" text-anchor=\"middle\">" + label +
           "</text>\n";
  }
  out += "</svg>\n";
  return out;
}

inline std::string render_ascii(const EventTimeline &tl) {
  constexpr int cols = 61, rows = 19;
  const auto frame = make_frame(tl, 0, cols - 1, rows - 1, 0);
  std::vector<std::string> grid(rows, std::string(cols, ' '));
  auto put = [&](double px, double py, char c) {
    const int cx = int(std::lround(px)), cy = int(std::lround(py));
    if (cx >= 0 && cx < cols && cy >= 0 && cy < rows)
      grid[std::size_t(cy)][std::size_t(cx)] = c;
  };
  if (tl.horizon)
    for (int y = 0; y < rows; ++y)
      put(frame.x(*tl.horizon), y, ':');
  for (const auto &s : tl.segments) {
    const auto &a = tl.events[s.from];
    const auto &b = tl.events[s.to];
    const char c = s.particle == Particle::original ? 'E'
                   : s.particle == Particle::pair_electron ? 'e'
                                                           : 'p';
    const int steps = 4 * cols;
    for (int i = 0; i <= steps; ++i) {
      const double u = double(i) / steps;
      put(frame.x(a.position + u * (b.position - a.position)),
          frame.y(a.time + u * (b.time - a.time)), c);
    }
  }
  for (const auto &e : tl.events) {
    char c = 'o';
    if (e.kind == EventKind::creation)
      c = '*';
    else if (e.kind == EventKind::annihilation)
      c = 'X';
    else if (e.kind == EventKind::escape)
      c = tl.escape_to_infinity ? '>' : 'o';
    put(frame.x(e.position), frame.y(e.time), c);
  }

  std::string out;
  out += tl.horizon ? "horizon exchange picture (time up, r right)\n"
                    : "flat-space exchange (time up, x right)\n";
  for (const auto &line : grid) {
    std::string trimmed = line;
    while (!trimmed.empty() && trimmed.back() == ' ')
      trimmed.pop_back();
    out += "|" + trimmed + "\n";
  }
  out += "+" + std::string(cols, '-') + "\n";
  out += "E original e- | e pair e- | p pair e+ | * creation | X annihilation";
  out += tl.escape_to_infinity ? " | > escape to infinity" : " | o endpoint";
  if (tl.horizon)
    out += " | : horizon r_g = " + fmt("%g", *tl.horizon);
  out += "\n";
  for (const auto &e : tl.events)
    out += std::string(to_string(e.kind)) + " " + e.label + " = " + fmt("%g", e.position) + "\n";
  return out;
}

} // namespace detail

inline std::string emit_diagram(const EventTimeline &tl, DiagramFormat format) {
  if (tl.events.size() != 4 || tl.segments.size() != 3)
    throw Error(ErrorKind::InconsistentInput, "timeline is not an exchange diagram");
  return format == DiagramFormat::svg ? detail::render_svg(tl) : detail::render_ascii(tl);
}

inline std::string emit_diagram(const EventTimeline &tl, std::string_view format) {
  return emit_diagram(tl, parse_diagram_format(format));
}

} // namespace zblab
