#include "zblab/io.hpp"
#include "zblab/spectrum.hpp"

#include <gtest/gtest.h>

#include <sstream>

using namespace zblab;

namespace {

std::vector<double> uniform_times(int n, double span) {
  std::vector<double> t;
  for (int i = 0; i < n; ++i)
    t.push_back(span * i / n);
  return t;
}

} // namespace

TEST(Spectrum, SyntheticCosine) {
  const auto t = uniform_times(512, 8 * std::numbers::pi);
  std::vector<double> y;
  for (double v : t)
    y.push_back(0.3 + std::cos(2.0 * v));
  const auto r = dominant_frequency(t, y);
  EXPECT_NEAR(r.frequency, 2.0, 0.01);
  EXPECT_NEAR(r.amplitude, 1.0, 1e-3);
  EXPECT_LE(r.fit_residual, 1e-3);
}

TEST(Spectrum, SecondaryPeak) {
  const auto t = uniform_times(1024, 40 * std::numbers::pi);
  std::vector<double> y;
  for (double v : t)
    y.push_back(std::sin(3.0 * v) + 0.2 * std::cos(7.0 * v));
  const auto r = dominant_frequency(t, y);
  EXPECT_NEAR(r.frequency, 3.0, 0.01);
  ASSERT_FALSE(r.secondary.empty());
  EXPECT_NEAR(r.secondary.front().frequency, 7.0, 0.1);
}

TEST(Spectrum, FlatSignalIsBelowNoiseFloor) {
  const auto t = uniform_times(128, 10.0);
  const std::vector<double> y(128, 0.6);
  const auto r = dominant_frequency(t, y);
  EXPECT_EQ(r.frequency, 0.0);
  EXPECT_LE(r.amplitude, 1e-8);
}

TEST(Spectrum, InsufficientSamples) {
  auto kind_of = [](const std::vector<double> &t, const std::vector<double> &y) {
    try {
      dominant_frequency(t, y);
    } catch (const Error &e) {
      return e.kind();
    }
    return ErrorKind::InvalidConfig;
  };
  auto t = uniform_times(63, 100.0);
  std::vector<double> y;
  for (double v : t)
    y.push_back(std::cos(2.0 * v));
  EXPECT_EQ(kind_of(t, y), ErrorKind::InsufficientSamples);

  t = uniform_times(128, 100.0);
  y.clear();
  for (double v : t)
    y.push_back(std::cos(2.0 * v));
  t[5] += 0.01;
  EXPECT_EQ(kind_of(t, y), ErrorKind::InsufficientSamples);

  t = uniform_times(128, 2.0 * std::numbers::pi); // two periods of cos(2t)
  y.clear();
  for (double v : t)
    y.push_back(std::cos(2.0 * v));
  EXPECT_EQ(kind_of(t, y), ErrorKind::InsufficientSamples);
}

TEST(Spectrum, ComponentSelection) {
  TrajectoryRecord traj;
  traj.times = uniform_times(256, 16 * std::numbers::pi);
  for (double v : traj.times) {
    traj.current.emplace_back(0.1 * std::cos(5.0 * v), std::cos(2.0 * v), 0.0);
    traj.position.emplace_back(Vec3::Zero());
    traj.norm.push_back(1.0);
  }
  const auto r = zb_spectrum(traj);
  EXPECT_EQ(r.component, 1);
  EXPECT_NEAR(r.frequency, 2.0, 0.01);
  EXPECT_NEAR(zb_spectrum(traj, 0).frequency, 5.0, 0.05);
}

TEST(Spectrum, MixedBranchRestFrame) {
  const auto times = zb_sample_times(Vec3::Zero(), 1.0, 8, 512);
  const auto r = zb_spectrum(evolve_packet(PacketSpec{}, GridSpec{}, times));
  EXPECT_NEAR(r.frequency, 2.0, 0.02);
}

TEST(TrajectoryFile, RoundTripIsExact) {
  const auto times = zb_sample_times(Vec3(0.5, 0, 0), 1.0, 4, 70);
  const auto traj = evolve_packet(PacketSpec{}, GridSpec{}, times);
  std::stringstream buffer;
  write_trajectory_csv(buffer, traj);
  const std::string text = buffer.str();
  EXPECT_EQ(text.substr(0, text.find('\n')), "t,x1,x2,x3,j1,j2,j3,norm");
  const auto back = read_trajectory_csv(buffer);
  ASSERT_EQ(back.size(), traj.size());
  for (std::size_t i = 0; i < traj.size(); ++i) {
    EXPECT_EQ(back.times[i], traj.times[i]);
    EXPECT_EQ(back.position[i], traj.position[i]);
    EXPECT_EQ(back.current[i], traj.current[i]);
    EXPECT_EQ(back.norm[i], traj.norm[i]);
  }
  std::stringstream bad("t,x\n1,2\n");
  EXPECT_THROW(read_trajectory_csv(bad), Error);
}
