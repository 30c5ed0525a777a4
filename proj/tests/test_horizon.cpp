#include "oracles.hpp"

#include "zblab/io.hpp"

#include <gtest/gtest.h>

using namespace zblab;

namespace {

std::size_t occurrences(const std::string &text, const std::string &needle) {
  std::size_t n = 0;
  for (auto pos = text.find(needle); pos != std::string::npos; pos = text.find(needle, pos + 1))
    ++n;
  return n;
}

HorizonScenario ok_scenario() { return {1.0, 0.5, 1.5, 0.7, 10.0}; }

} // namespace

TEST(Scenario, AcceptsBothVariants) {
  const auto a = validate_scenario(ok_scenario());
  EXPECT_TRUE(a.ok());
  EXPECT_EQ(a.variant, HorizonVariant::r_inside_r2);

  const auto b = validate_scenario({1.0, 0.6, 2.0, 0.3, 10.0});
  EXPECT_TRUE(b.ok());
  EXPECT_EQ(b.variant, HorizonVariant::r2_inside_r);
}

TEST(Scenario, CreationInsideHorizon) {
  auto s = ok_scenario();
  s.r1 = 0.9;
  const auto check = validate_scenario(s);
  EXPECT_FALSE(check.ok());
  EXPECT_TRUE(check.violates(constraint::creation_outside));
  EXPECT_EQ(std::string(constraint::creation_outside), "r1 > r_g");
}

TEST(Scenario, NonPositiveRadius) {
  for (double bad : {0.0, -1.0, std::numeric_limits<double>::infinity()}) {
    auto s = ok_scenario();
    s.r2 = bad;
    try {
      validate_scenario(s);
      FAIL();
    } catch (const Error &e) {
      EXPECT_EQ(e.kind(), ErrorKind::NonPositiveRadius);
    }
  }
}

TEST(Scenario, SingleConstraintMutations) {
  struct Mutation {
    std::string_view constraint;
    void (*apply)(HorizonScenario &);
  };
  const std::vector<Mutation> mutations{
      {constraint::creation_outside, [](HorizonScenario &s) { s.r1 = 0.9; }},
      {constraint::annihilation_inside, [](HorizonScenario &s) { s.r2 = 1.2; }},
      {constraint::original_inside, [](HorizonScenario &s) { s.r = 1.2; }},
      {constraint::escape_beyond, [](HorizonScenario &s) { s.r_prime = 1.2; }},
      {constraint::variant, [](HorizonScenario &s) { s.r2 = s.r; }},
  };
  for (const auto &m : mutations) {
    auto s = ok_scenario();
    m.apply(s);
    const auto check = validate_scenario(s);
    EXPECT_FALSE(check.ok()) << m.constraint;
    EXPECT_TRUE(check.violates(m.constraint)) << m.constraint;
  }
}

TEST(Scenario, PredicateEquivalenceOnRandomTuples) {
  std::mt19937_64 rng(31);
  std::uniform_real_distribution<double> radius(0.05, 3.0);
  int accepted = 0;
  for (int n = 0; n < 10000; ++n) {
    const HorizonScenario s{radius(rng), radius(rng), radius(rng), radius(rng), radius(rng)};
    const bool expected = oracle::scenario_valid(s.r_g, s.r, s.r1, s.r2, s.r_prime);
    ASSERT_EQ(validate_scenario(s).ok(), expected)
        << s.r_g << " " << s.r << " " << s.r1 << " " << s.r2 << " " << s.r_prime;
    accepted += expected;
  }
  EXPECT_GT(accepted, 0);
}

TEST(Scenario, ParsedFromKeyValues) {
  const auto s = parse_scenario(parse_key_values("r_g = 1\nr = 0.5 # inside\nr1 = 1.5\nr2 = 0.7\n"
                                                 "r_prime = 10\n"));
  EXPECT_DOUBLE_EQ(s.r2, 0.7);
  EXPECT_THROW(parse_scenario(parse_key_values("r_g = 1\n")), Error);
  EXPECT_THROW(parse_scenario(parse_key_values("r_g=1\nr=1\nr1=1\nr2=1\nr_prime=1\nmass=2\n")),
               Error);
  EXPECT_THROW(parse_key_values("r_g 1\n"), Error);
}

TEST(Timeline, FlatExchangeTopology) {
  const auto tl = flat_space_analogue({0.0, 0.4, 0.1, 0.5});
  EXPECT_EQ(tl.segments.size(), 3u);
  EXPECT_FALSE(tl.horizon.has_value());
  EXPECT_EQ(tl.count(EventKind::annihilation), 1u);
  EXPECT_EQ(tl.degree(EventKind::annihilation), 2u);
  const auto &survivor = tl.segment(Particle::pair_electron);
  EXPECT_EQ(tl.events[survivor.to].kind, EventKind::escape);
  EXPECT_DOUBLE_EQ(tl.events[survivor.to].position, 0.5);

  const auto degenerate = flat_space_analogue({0.0, 0.3, 0.3, 0.5});
  EXPECT_EQ(degenerate.degree(EventKind::annihilation), 2u);
  EXPECT_EQ(degenerate.segments.size(), 3u);
}

TEST(Timeline, HorizonExchange) {
  const auto tl = horizon_timeline(ok_scenario());
  ASSERT_TRUE(tl.horizon.has_value());
  const auto &ann = tl.events[tl.segment(Particle::pair_positron).to];
  EXPECT_EQ(ann.kind, EventKind::annihilation);
  EXPECT_EQ(tl.segment(Particle::original).to, tl.segment(Particle::pair_positron).to);
  EXPECT_EQ(tl.events[tl.segment(Particle::pair_electron).to].kind, EventKind::escape);
  EXPECT_EQ(tl.horizon_crossings(), std::make_pair(std::size_t(1), std::size_t(0)));
  EXPECT_TRUE(tl.escape_to_infinity);
  for (std::size_t i = 1; i < tl.events.size(); ++i)
    EXPECT_LT(tl.events[i - 1].time, tl.events[i].time);

  auto bad = ok_scenario();
  bad.r1 = 0.9;
  EXPECT_THROW(horizon_timeline(bad), Error);
}

TEST(Diagram, SvgStructure) {
  const auto svg = emit_diagram(horizon_timeline(ok_scenario()), DiagramFormat::svg);
  EXPECT_EQ(occurrences(svg, "class=\"horizon\""), 1u);
  EXPECT_EQ(occurrences(svg, "stroke-dasharray"), 1u);
  EXPECT_EQ(occurrences(svg, "class=\"worldline\""), 3u);
  EXPECT_EQ(occurrences(svg, "class=\"worldline-label\""), 3u);
  EXPECT_EQ(occurrences(svg, ">e⁻<"), 2u);
  EXPECT_EQ(occurrences(svg, ">e⁺<"), 1u);
  EXPECT_EQ(occurrences(svg, "class=\"vertex\""), 2u);
  EXPECT_EQ(occurrences(svg, "class=\"escape-arrow\""), 1u);
  EXPECT_EQ(svg.rfind("<?xml", 0), 0u);
  EXPECT_NE(svg.find("</svg>"), std::string::npos);

  const auto flat = emit_diagram(flat_space_analogue({}), DiagramFormat::svg);
  EXPECT_EQ(occurrences(flat, "class=\"horizon\""), 0u);
  EXPECT_EQ(occurrences(flat, "stroke-dasharray"), 0u);
  EXPECT_EQ(occurrences(flat, "class=\"worldline\""), 3u);
}

TEST(Diagram, Deterministic) {
  for (const auto &s : {ok_scenario(), HorizonScenario{1.0, 0.6, 2.0, 0.3, 10.0}}) {
    for (auto f : {DiagramFormat::svg, DiagramFormat::ascii}) {
      const auto a = emit_diagram(horizon_timeline(s), f);
      const auto b = emit_diagram(horizon_timeline(s), f);
      EXPECT_EQ(a, b);
      EXPECT_FALSE(a.empty());
    }
  }
}

TEST(Diagram, AsciiMarks) {
  const auto txt = emit_diagram(horizon_timeline(ok_scenario()), "ascii");
  EXPECT_NE(txt.find('*'), std::string::npos);
  EXPECT_NE(txt.find('X'), std::string::npos);
  EXPECT_NE(txt.find('>'), std::string::npos);
  EXPECT_NE(txt.find(':'), std::string::npos);
  const auto flat = emit_diagram(flat_space_analogue({}), "ascii");
  EXPECT_EQ(flat.find(':'), std::string::npos);
}

TEST(Diagram, UnsupportedFormat) {
  try {
    emit_diagram(flat_space_analogue({}), "png");
    FAIL();
  } catch (const Error &e) {
    EXPECT_EQ(e.kind(), ErrorKind::UnsupportedFormat);
  }
}
