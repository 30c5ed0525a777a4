#include "oracles.hpp"

#include "zblab/spectrum.hpp"

#include <gtest/gtest.h>

using namespace zblab;

namespace {

std::vector<double> column(const std::vector<Vec3> &v, int axis) {
  std::vector<double> out;
  for (const auto &x : v)
    out.push_back(x(axis));
  return out;
}

PacketSpec pure(const Vec3 &k0, double m = 1.0) {
  PacketSpec p;
  p.k0 = k0;
  p.mass = m;
  p.w_plus = 1.0;
  p.w_minus = 0.0;
  return p;
}

void expect_kind(ErrorKind kind, const std::function<void()> &f) {
  try {
    f();
    ADD_FAILURE() << "no error";
  } catch (const Error &e) {
    EXPECT_EQ(e.kind(), kind) << e.what();
  }
}

// spinor  w+ P+(chi,0)/|.| + w- P-(0,chi)/|.|  evolved with a dense exponential
Eigen::Vector3d dense_single_mode_current(const Vec3 &k, double m, cplx wp, cplx wm, double t) {
  const oracle::Mat4 h = oracle::hamiltonian(k, m);
  const double w = std::sqrt(k.squaredNorm() + m * m);
  const oracle::Mat4 pp = (w * oracle::Mat4::Identity() + h) / (2 * w);
  const oracle::Mat4 pm = (w * oracle::Mat4::Identity() - h) / (2 * w);
  Eigen::Vector4cd up(1, 1, 0, 0), down(0, 0, 1, 1); // chi = spin up along x
  up /= std::sqrt(2.0);
  down /= std::sqrt(2.0);
  const Eigen::Vector4cd psi0 = wp * (pp * up).normalized() + wm * (pm * down).normalized();
  const Eigen::Vector4cd psi = (cplx(0, -t) * h).exp() * psi0;
  const auto g = oracle::gammas();
  Eigen::Vector3d j;
  for (int i = 0; i < 3; ++i)
    j(i) = psi.dot(g.alpha[i] * psi).real();
  return j;
}

} // namespace

TEST(Validation, RejectsUnresolvedPackets) {
  GridSpec g;
  PacketSpec p;
  EXPECT_NO_THROW(validate(g, p));
  g.points = 500;
  expect_kind(ErrorKind::UnresolvedPacket, [&] { validate(g, p); });
  g = GridSpec{};
  p.sigma = 0.4; // below four grid spacings
  expect_kind(ErrorKind::UnresolvedPacket, [&] { validate(g, p); });
  p = PacketSpec{};
  p.k0 = Vec3(10, 0, 0); // Nyquist ~ 25 < 4 (10 + 1/4)
  expect_kind(ErrorKind::UnresolvedPacket, [&] { validate(g, p); });
  p = PacketSpec{};
  p.sigma = 10.0; // 8 sigma > L
  expect_kind(ErrorKind::UnresolvedPacket, [&] { validate(g, p); });
  p = PacketSpec{};
  p.w_plus = 1.0;
  expect_kind(ErrorKind::UnresolvedPacket, [&] { validate(g, p); });
  p = PacketSpec{};
  p.mass = 0.0;
  expect_kind(ErrorKind::ZeroEnergyMode, [&] { evolve_packet(p, g, {0.0}); });
}

TEST(Evolution, NormIsConserved) {
  const auto times = zb_sample_times(Vec3::Zero(), 1.0, 8, 512);
  const auto traj = evolve_packet(PacketSpec{}, GridSpec{}, times);
  ASSERT_EQ(traj.size(), 512u);
  for (double n : traj.norm)
    EXPECT_NEAR(n, 1.0, 1e-10);
}

TEST(Evolution, PureBranchHasNoZitterbewegung) {
  for (const Vec3 k0 : {Vec3(0, 0, 0), Vec3(1, 0, 0), Vec3(3, 0, 0)}) {
    const auto times = zb_sample_times(k0, 1.0, 8, 256);
    const auto traj = evolve_packet(pure(k0), GridSpec{}, times);
    for (int i = 0; i < 3; ++i) {
      const auto j = column(traj.current, i);
      const auto [lo, hi] = std::minmax_element(j.begin(), j.end());
      EXPECT_LE(*hi - *lo, 1e-8);
    }
    EXPECT_LE(zb_spectrum(traj).amplitude, 1e-8);
  }
}

TEST(Evolution, RestFrameOscillation) {
  const auto times = zb_sample_times(Vec3::Zero(), 1.0, 8, 512);
  const auto traj = evolve_packet(PacketSpec{}, GridSpec{}, times);
  const auto x = column(traj.position, 0);
  const auto peak = dominant_frequency(traj.times, x);
  EXPECT_NEAR(peak.frequency, 2.0, 0.02);
  // amplitude of order 1/(2m)
  EXPECT_GT(peak.amplitude, 0.25);
  EXPECT_LT(peak.amplitude, 1.0);
  EXPECT_NEAR(zb_spectrum(traj).frequency, 2.0, 0.02);
}

TEST(Evolution, ContinuityOnDefaultGrid) {
  const auto times = zb_sample_times(Vec3::Zero(), 1.0, 8, 512);
  const auto traj = evolve_packet(PacketSpec{}, GridSpec{}, times);
  EXPECT_LE(oracle::continuity_defect(traj.times, column(traj.position, 0),
                                      column(traj.current, 0)),
            1e-3);
}

TEST(Evolution, UnwrappedCenterFollowsTheBox) {
  // a drifting packet crosses the periodic boundary more than once
  PacketSpec p = pure(Vec3(1, 0, 0));
  p.center = Vec3(5, 0, 0);
  std::vector<double> times;
  for (int n = 0; n < 400; ++n)
    times.push_back(0.25 * n);
  const auto traj = evolve_packet(p, GridSpec{}, times);
  EXPECT_NEAR(traj.position.front()(0), 5.0, 1e-6);
  const double v = traj.current.front()(0);
  const double travelled = traj.position.back()(0) - traj.position.front()(0);
  EXPECT_GT(travelled, GridSpec{}.length);
  EXPECT_NEAR(travelled, v * times.back(), 1e-3 * travelled);
  EXPECT_LE(oracle::continuity_defect(traj.times, column(traj.position, 0),
                                      column(traj.current, 0)),
            1e-3);
}

TEST(Evolution, ThreeDimensionalGrid) {
  // box of 16 sigma, as on the default 1D grid
  GridSpec g{64, 48.0, 3};
  PacketSpec p;
  p.sigma = 3.0;
  p.k0 = Vec3(0.5, 0.25, 0);
  p.spin_axis = Vec3(0, 0, 1);
  const auto times = zb_sample_times(p.k0, 1.0, 1, 32);
  const auto traj = evolve_packet(p, g, times);
  EXPECT_EQ(traj.resolved_axes, 3);
  for (double n : traj.norm)
    EXPECT_NEAR(n, 1.0, 1e-10);
  // drift cancels between the branches; the oscillation is along z
  double scale = 0.0;
  for (const auto &j : traj.current)
    scale = std::max(scale, j.norm());
  for (int axis : {0, 1, 2})
    EXPECT_LE(oracle::continuity_defect(traj.times, column(traj.position, axis),
                                        column(traj.current, axis), scale),
              1e-3)
        << axis;
}

TEST(Oracle, ClosedFormAgainstDenseEvolution) {
  std::mt19937_64 rng(3);
  std::normal_distribution<double> g(0.0, 1.5);
  const double r = std::sqrt(0.5);
  for (int n = 0; n < 20; ++n) {
    const Vec3 k(g(rng), g(rng), g(rng));
    const double m = 0.3 + std::abs(g(rng));
    const auto zb = analytic_zb_oracle(k, m, r, r);
    EXPECT_NEAR(zb.frequency, 2.0 * std::sqrt(k.squaredNorm() + m * m), 1e-14);
    for (double t : {0.0, 0.6, 2.9}) {
      const Eigen::Vector3d ref = dense_single_mode_current(k, m, r, r, t);
      EXPECT_LE((zb.current(t) - ref).norm(), 1e-12);
    }
  }
}

TEST(Oracle, SpecialCases) {
  const auto positive = analytic_zb_oracle(Vec3(3, 0, 0), 4.0, 1.0, 0.0);
  EXPECT_LE((positive.classical - Vec3(0.6, 0, 0)).norm(), 1e-14);
  EXPECT_LE(positive.amplitude().norm(), 1e-15);
  const auto rest = analytic_zb_oracle(Vec3::Zero(), 1.0, std::sqrt(0.5), std::sqrt(0.5));
  EXPECT_DOUBLE_EQ(rest.frequency, 2.0);
  EXPECT_GT(rest.amplitude().norm(), 0.5);
  EXPECT_THROW(analytic_zb_oracle(Vec3::Zero(), 0.0, 1.0, 0.0), Error);
}

TEST(Oracle, MomentumNarrowPacketConverges) {
  const GridSpec g{4096, 512.0, 1};
  for (const double k : {0.0, 1.0}) {
    PacketSpec p;
    p.k0 = Vec3(k, 0, 0);
    p.sigma = 32.0;
    const auto zb = analytic_zb_oracle(p.k0, 1.0, p.w_plus, p.w_minus);
    const auto times = zb_sample_times(p.k0, 1.0, 2, 64);
    const auto traj = evolve_packet(p, g, times);
    double worst = 0.0, scale = 0.0;
    for (std::size_t i = 0; i < traj.size(); ++i) {
      worst = std::max(worst, (traj.current[i] - zb.current(traj.times[i])).norm());
      scale = std::max(scale, zb.current(traj.times[i]).norm());
    }
    EXPECT_LE(worst / scale, 1e-2) << "k0 = " << k;
  }
}

TEST(Heisenberg, DiagonalAndGeneralPropagation) {
  SparseMatrix h(2, 2);
  h.insert(0, 1) = 1.0;
  h.insert(1, 0) = 1.0;
  StateVector psi(2);
  psi << 1.0, 0.0;
  const auto out = propagate(h, psi, 0.8);
  EXPECT_NEAR(std::abs(out(0) - std::cos(0.8)), 0.0, 1e-14);
  EXPECT_NEAR(std::abs(out(1) + I * std::sin(0.8)), 0.0, 1e-14);
}
