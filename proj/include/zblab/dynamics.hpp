#pragma once

#include "zblab/fock.hpp"
#include "zblab/kinematics.hpp"

#include <Eigen/Eigenvalues>
#include <unsupported/Eigen/FFT>

#include <numbers>

namespace zblab {

//==============================================================================
// Grid and packet

struct GridSpec {
  int points = 512; //!< per axis, power of two
  double length = 64.0;
  int dim = 1;

  double spacing() const { return length / points; }
  double momentum_step() const { return 2.0 * std::numbers::pi / length; }
  double nyquist() const { return std::numbers::pi / spacing(); }
  std::size_t size() const {
    std::size_t n = 1;
    for (int a = 0; a < dim; ++a)
      n *= std::size_t(points);
    return n;
  }
};

//! Gaussian packet |psi(x)|^2 ~ exp(-(x-center)^2 / 2 sigma^2) with spinor
//! content w_plus e_+(k) + w_minus e_-(k) in every momentum mode, where
//! e_+(k) ~ P_+(k) (chi, 0) and e_-(k) ~ P_-(k) (0, chi) and chi is the Pauli
//! spinor polarized along spin_axis. At k = k0 these are the branch
//! components picked out by the projectors of H(k0).
struct PacketSpec {
  Vec3 k0 = Vec3::Zero();
  double sigma = 4.0;
  cplx w_plus{std::numbers::sqrt2 / 2.0, 0.0};
  cplx w_minus{std::numbers::sqrt2 / 2.0, 0.0};
  Vec3 spin_axis = Vec3::UnitX();
  double mass = 1.0;
  Vec3 center = Vec3::Zero();
};

struct TrajectoryRecord {
  std::vector<double> times;
  std::vector<Vec3> position;
  std::vector<Vec3> current;
  std::vector<double> norm;
  int resolved_axes = 1;

  std::size_t size() const { return times.size(); }
};

inline bool is_power_of_two(int n) { return n > 0 && (n & (n - 1)) == 0; }

//! Pauli spinor with spin +1/2 along the (normalized) axis.
inline Eigen::Vector2cd spin_state(const Vec3 &axis) {
  const Vec3 n = axis.normalized();
  const auto sigma = pauli();
  const Mat2 sn = n(0) * sigma[0] + n(1) * sigma[1] + n(2) * sigma[2];
  Eigen::SelfAdjointEigenSolver<Mat2> es(sn);
  Eigen::Vector2cd chi = es.eigenvectors().col(1);
  // fix the overall phase: largest component real positive
  const int big = std::abs(chi(0)) >= std::abs(chi(1)) ? 0 : 1;
  chi *= std::abs(chi(big)) / chi(big);
  return chi;
}

inline void validate(const GridSpec &grid, const PacketSpec &packet) {
  if (grid.dim != 1 && grid.dim != 3)
    throw Error(ErrorKind::UnresolvedPacket, "grid dim must be 1 or 3");
  if (!is_power_of_two(grid.points) || grid.points < 8)
    throw Error(ErrorKind::UnresolvedPacket, "grid points must be a power of two >= 8");
  if (!(grid.length > 0.0))
    throw Error(ErrorKind::UnresolvedPacket, "box length must be > 0");
  if (!(packet.sigma >= 4.0 * grid.spacing()))
    throw Error(ErrorKind::UnresolvedPacket, "sigma below four grid spacings");
  if (!(8.0 * packet.sigma <= grid.length))
    throw Error(ErrorKind::UnresolvedPacket, "packet wider than an eighth of the box");
  const double scale = packet.k0.cwiseAbs().maxCoeff() + 1.0 / packet.sigma;
  if (!(grid.nyquist() > 4.0 * scale))
    throw Error(ErrorKind::UnresolvedPacket, "Nyquist momentum below 4x packet momentum scale");
  if (!(packet.mass >= 0.0))
    throw Error(ErrorKind::UnresolvedPacket, "mass must be >= 0");
  const double wn = std::norm(packet.w_plus) + std::norm(packet.w_minus);
  if (std::abs(wn - 1.0) > 1e-12)
    throw Error(ErrorKind::UnresolvedPacket, "branch weights must satisfy |w+|^2 + |w-|^2 = 1");
  if (!(packet.spin_axis.norm() > 0.0))
    throw Error(ErrorKind::UnresolvedPacket, "spin axis must be nonzero");
  if (grid.dim == 1 && packet.mass == 0.0 && packet.k0.norm() == 0.0)
    throw Error(ErrorKind::ZeroEnergyMode, "massless packet at rest");
}

namespace detail {

//! Signed FFT bin index -> momentum index
inline int signed_bin(int m, int n) { return m < n / 2 ? m : m - n; }

//! 1D or 3D FFT of one spinor component; layout index = ((a*N)+b)*N+c.
class GridFFT {
public:
  explicit GridFFT(const GridSpec &g) : m_grid(g) {}

  void forward(std::vector<cplx> &data) { apply(data, false); }
  void inverse(std::vector<cplx> &data) { apply(data, true); }

private:
  void apply(std::vector<cplx> &data, bool inverse) {
    const int n = m_grid.points;
    std::vector<cplx> line(static_cast<std::size_t>(n)), out(static_cast<std::size_t>(n));
    const std::size_t stride_count = m_grid.dim == 1 ? 1 : 3;
    for (std::size_t axis = 0; axis < stride_count; ++axis) {
      const std::size_t stride =
          m_grid.dim == 1 ? 1 : (axis == 0 ? std::size_t(n) * n : (axis == 1 ? std::size_t(n) : 1));
      const std::size_t total = data.size();
      for (std::size_t start = 0; start < total; ++start) {
        // start must be the first element of a line along this axis
        if ((start / stride) % std::size_t(n) != 0)
          continue;
        for (int i = 0; i < n; ++i)
          line[std::size_t(i)] = data[start + std::size_t(i) * stride];
        if (inverse)
          m_fft.inv(out, line);
        else
          m_fft.fwd(out, line);
        for (int i = 0; i < n; ++i)
          data[start + std::size_t(i) * stride] = out[std::size_t(i)];
      }
    }
  }

  GridSpec m_grid;
  Eigen::FFT<double> m_fft;
};

inline std::vector<Vec3> momentum_grid(const GridSpec &g) {
  const int n = g.points;
  const double dk = g.momentum_step();
  std::vector<Vec3> ks;
  ks.reserve(g.size());
  if (g.dim == 1) {
    for (int a = 0; a < n; ++a)
      ks.emplace_back(dk * signed_bin(a, n), 0.0, 0.0);
  } else {
    for (int a = 0; a < n; ++a)
      for (int b = 0; b < n; ++b)
        for (int c = 0; c < n; ++c)
          ks.emplace_back(dk * signed_bin(a, n), dk * signed_bin(b, n), dk * signed_bin(c, n));
  }
  return ks;
}

//! Grid coordinate of a linear index, x_0 = -L/2.
inline Vec3 grid_position(const GridSpec &g, std::size_t idx) {
  const int n = g.points;
  const double dx = g.spacing();
  if (g.dim == 1)
    return Vec3(-0.5 * g.length + dx * double(idx), 0.0, 0.0);
  const std::size_t a = idx / (std::size_t(n) * n);
  const std::size_t b = (idx / std::size_t(n)) % std::size_t(n);
  const std::size_t c = idx % std::size_t(n);
  return Vec3(-0.5 * g.length + dx * double(a), -0.5 * g.length + dx * double(b),
              -0.5 * g.length + dx * double(c));
}

//! Per-mode spectral decomposition of H(k). Eigenvalues ascending: the first
//! two columns span the negative branch.
struct ModeEigensystem {
  Mat4 vectors;
  Eigen::Vector4d values;
};

} // namespace detail

//==============================================================================
// Evolution

//! A packet laid out on the momentum grid with the total momentum fixed by the
//! transverse components of k0 when the grid is 1D.
class PacketPropagator {
public:
  PacketPropagator(const PacketSpec &packet, const GridSpec &grid)
      : m_packet(packet), m_grid(grid), m_fft(grid) {
    validate(grid, packet);
    auto ks = detail::momentum_grid(grid);
    m_modes.resize(ks.size());
    m_k.resize(ks.size());
    const Eigen::Vector2cd chi = spin_state(packet.spin_axis);
    Spinor ref_plus = Spinor::Zero(), ref_minus = Spinor::Zero();
    ref_plus.head<2>() = chi;
    ref_minus.tail<2>() = chi;

    m_initial.assign(4, std::vector<cplx>(ks.size()));
    const double s2 = packet.sigma * packet.sigma;
    for (std::size_t idx = 0; idx < ks.size(); ++idx) {
      Vec3 k = ks[idx];
      if (grid.dim == 1) {
        k(1) = packet.k0(1);
        k(2) = packet.k0(2);
      }
      m_k[idx] = k;
      Eigen::SelfAdjointEigenSolver<Mat4> es(dirac_hamiltonian(k, packet.mass));
      m_modes[idx] = {es.eigenvectors(), es.eigenvalues()};

      const auto &V = m_modes[idx].vectors;
      const Mat4 p_minus = V.leftCols<2>() * V.leftCols<2>().adjoint();
      const Mat4 p_plus = V.rightCols<2>() * V.rightCols<2>().adjoint();
      const Spinor e_plus = (p_plus * ref_plus).normalized();
      const Spinor e_minus = (p_minus * ref_minus).normalized();

      const Vec3 dk = k - packet.k0;
      const double d2 = dk.head(grid.dim).squaredNorm();
      const Vec3 x0 = detail::grid_position(grid, 0);
      double phase_arg = 0.0;
      for (int a = 0; a < grid.dim; ++a)
        phase_arg += k(a) * (x0(a) - packet.center(a));
      // e^{-ik.center}, shifted so FFT index 0 sits at x_0
      const cplx amp = std::exp(-d2 * s2) * std::exp(I * phase_arg);
      const Spinor phi = amp * (packet.w_plus * e_plus + packet.w_minus * e_minus);
      for (int c = 0; c < 4; ++c)
        m_initial[std::size_t(c)][idx] = phi(c);
    }
    // normalize in position space
    auto psi = m_initial;
    for (auto &comp : psi)
      m_fft.inverse(comp);
    double total = 0.0;
    for (const auto &comp : psi)
      for (const auto &z : comp)
        total += std::norm(z);
    total *= cell_volume();
    const double scale = 1.0 / std::sqrt(total);
    for (auto &comp : m_initial)
      for (auto &z : comp)
        z *= scale;
  }

  double cell_volume() const { return std::pow(m_grid.spacing(), m_grid.dim); }

  //! Position-space spinor field at time t: FFT -> e^{-iH(k)t} per mode -> IFFT.
  std::vector<std::vector<cplx>> field(double t) {
    auto psi = position_field_initial();
    for (auto &comp : psi)
      m_fft.forward(comp);
    for (std::size_t idx = 0; idx < m_k.size(); ++idx) {
      Spinor phi;
      for (int c = 0; c < 4; ++c)
        phi(c) = psi[std::size_t(c)][idx];
      const auto &ms = m_modes[idx];
      Eigen::Vector4cd phases;
      for (int e = 0; e < 4; ++e)
        phases(e) = std::exp(-I * (ms.values(e) * t));
      phi = ms.vectors * phases.asDiagonal() * (ms.vectors.adjoint() * phi);
      for (int c = 0; c < 4; ++c)
        psi[std::size_t(c)][idx] = phi(c);
    }
    for (auto &comp : psi)
      m_fft.inverse(comp);
    return psi;
  }

  const GridSpec &grid() const { return m_grid; }
  const PacketSpec &packet() const { return m_packet; }

private:
  std::vector<std::vector<cplx>> position_field_initial() {
    if (m_position0.empty()) {
      m_position0 = m_initial;
      for (auto &comp : m_position0)
        m_fft.inverse(comp);
    }
    return m_position0;
  }

  PacketSpec m_packet;
  GridSpec m_grid;
  detail::GridFFT m_fft;
  std::vector<detail::ModeEigensystem> m_modes;
  std::vector<Vec3> m_k;
  std::vector<std::vector<cplx>> m_initial;
  std::vector<std::vector<cplx>> m_position0;
};

//! Exact free evolution sampled at the given times. Position is tracked as an
//! unwrapped center of charge: each sample is measured in a periodic window
//! centered on the previous sample's center.
inline TrajectoryRecord evolve_packet(const PacketSpec &packet, const GridSpec &grid,
                                      const std::vector<double> &times) {
  PacketPropagator prop(packet, grid);
  const auto &dm = dirac_matrices();
  const double dv = prop.cell_volume();
  const double L = grid.length;

  TrajectoryRecord rec;
  rec.resolved_axes = grid.dim;
  Vec3 center = packet.center;
  for (const double t : times) {
    const auto psi = prop.field(t);
    double norm = 0.0;
    Vec3 x = Vec3::Zero();
    CVec3 j = CVec3::Zero();
    for (std::size_t idx = 0; idx < grid.size(); ++idx) {
      Spinor s;
      for (int c = 0; c < 4; ++c)
        s(c) = psi[std::size_t(c)][idx];
      const double rho = s.squaredNorm();
      norm += rho;
      Vec3 pos = detail::grid_position(grid, idx);
      for (int a = 0; a < grid.dim; ++a)
        pos(a) -= L * std::floor((pos(a) - center(a) + 0.5 * L) / L);
      x += rho * pos;
      for (int i = 0; i < 3; ++i)
        j(i) += s.dot(dm.alpha[i] * s);
    }
    norm *= dv;
    x *= dv / norm;
    for (int a = grid.dim; a < 3; ++a)
      x(a) = 0.0;
    center = x;
    rec.times.push_back(t);
    rec.position.push_back(x);
    rec.current.push_back((j * dv).real());
    rec.norm.push_back(norm);
  }
  return rec;
}

//! Sample times covering `periods` ZB periods (pi / omega(k0)) with the end
//! point excluded.
inline std::vector<double> zb_sample_times(const Vec3 &k0, double m, double periods,
                                           int samples) {
  const double w = energy(k0, m);
  if (!(w > 0.0))
    throw Error(ErrorKind::ZeroEnergyMode, "omega(k0) = 0");
  const double span = periods * std::numbers::pi / w;
  std::vector<double> t(static_cast<std::size_t>(samples));
  for (int n = 0; n < samples; ++n)
    t[std::size_t(n)] = span * n / samples;
  return t;
}

//==============================================================================
// Closed-form single-mode oracle

//! <j>(t) = classical + 2 Re(interference e^{2 i w t}) for the spinor
//! w_+ e_+ + w_- e_- at a single momentum.
struct AnalyticZitterbewegung {
  Vec3 classical;
  CVec3 interference;
  double frequency; //!< 2 omega

  Vec3 current(double t) const {
    return classical + 2.0 * (interference * std::exp(I * (frequency * t))).real();
  }
  Vec3 amplitude() const { return 2.0 * interference.cwiseAbs(); }
};

inline AnalyticZitterbewegung analytic_zb_oracle(const Vec3 &k, double m, cplx w_plus,
                                                 cplx w_minus,
                                                 const Vec3 &spin_axis = Vec3::UnitX()) {
  const double w = energy(k, m);
  if (!(w > 0.0))
    throw Error(ErrorKind::ZeroEnergyMode, "omega(k) = 0");
  const auto [p_plus, p_minus] = energy_projectors(k, m);
  const Eigen::Vector2cd chi = spin_state(spin_axis);
  Spinor ref_plus = Spinor::Zero(), ref_minus = Spinor::Zero();
  ref_plus.head<2>() = chi;
  ref_minus.tail<2>() = chi;
  const Spinor a = w_plus * (p_plus * ref_plus).normalized();
  const Spinor b = w_minus * (p_minus * ref_minus).normalized();

  const auto &dm = dirac_matrices();
  AnalyticZitterbewegung out;
  out.frequency = 2.0 * w;
  for (int i = 0; i < 3; ++i) {
    out.classical(i) = (a.dot(dm.alpha[i] * a) + b.dot(dm.alpha[i] * b)).real();
    out.interference(i) = a.dot(dm.alpha[i] * b);
  }
  return out;
}

//==============================================================================
// Heisenberg-picture expectation on Fock space

inline constexpr std::size_t max_heisenberg_dimension = std::size_t{1} << 16;

//! e^{-iHt} psi. Diagonal H is applied exactly; otherwise a Taylor series on
//! sub-steps with |H| dt <= 1/2.
inline StateVector propagate(const SparseMatrix &H, const StateVector &psi, double t) {
  bool diagonal = true;
  for (int k = 0; k < H.outerSize() && diagonal; ++k)
    for (SparseMatrix::InnerIterator it(H, k); it; ++it)
      if (it.row() != it.col() && it.value() != cplx(0.0)) {
        diagonal = false;
        break;
      }
  if (diagonal) {
    StateVector out = psi;
    const Eigen::VectorXcd d = H.diagonal();
    for (Eigen::Index i = 0; i < out.size(); ++i)
      out(i) *= std::exp(-I * (d(i).real() * t));
    return out;
  }
  double bound = 0.0; // max absolute row sum bounds the spectral radius
  {
    Eigen::VectorXd rows = Eigen::VectorXd::Zero(H.rows());
    for (int k = 0; k < H.outerSize(); ++k)
      for (SparseMatrix::InnerIterator it(H, k); it; ++it)
        rows(it.row()) += std::abs(it.value());
    bound = rows.size() ? rows.maxCoeff() : 0.0;
  }
  const int steps = std::max(1, int(std::ceil(2.0 * bound * std::abs(t))));
  const double dt = t / steps;
  StateVector out = psi;
  for (int s = 0; s < steps; ++s) {
    StateVector term = out;
    StateVector sum = out;
    for (int n = 1; n < 60; ++n) {
      term = (-I * dt / double(n)) * (H * term);
      sum += term;
      if (term.norm() < 1e-17 * std::max(1.0, sum.norm()))
        break;
    }
    out = sum;
  }
  return out;
}

//! <psi| e^{iHt} op e^{-iHt} |psi>
inline cplx heisenberg_expectation(const StateVector &psi, const SparseMatrix &op,
                                   const SparseMatrix &H, double t) {
  const auto n = std::size_t(psi.size());
  if (n > max_heisenberg_dimension)
    throw Error(ErrorKind::TooLarge, "dimension above 2^16");
  if (op.rows() != psi.size() || op.cols() != psi.size() || H.rows() != psi.size() ||
      H.cols() != psi.size())
    throw Error(ErrorKind::InconsistentInput, "dimension mismatch");
  const StateVector evolved = propagate(H, psi, t);
  return evolved.dot(op * evolved);
}

} // namespace zblab
