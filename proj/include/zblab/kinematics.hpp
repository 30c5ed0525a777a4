#pragma once

#include "zblab/errors.hpp"

#include <Eigen/Dense>

#include <array>
#include <cmath>
#include <complex>
#include <vector>

namespace zblab {

using cplx = std::complex<double>;
using Vec3 = Eigen::Vector3d;
using CVec3 = Eigen::Vector3cd;
using IVec3 = Eigen::Vector3i;
using Spinor = Eigen::Vector4cd;
using Mat4 = Eigen::Matrix4cd;
using Mat2 = Eigen::Matrix2cd;

inline constexpr cplx I{0.0, 1.0};

//==============================================================================
// Momentum lattice

//! Box-normalized momentum lattice: k = spacing * n, n an integer vector with
//! |n_i| <= half_extent along each active axis (x only when dim == 1).
struct LatticeSpec {
  double mass = 1.0;
  double spacing = 1.0;
  int half_extent = 1;
  int dim = 1;
  //! false drops the k = 0 site, leaving only {+k, -k} pairs
  bool include_zero = true;
};

struct MomentumMode {
  IVec3 site = IVec3::Zero(); //!< integer lattice coordinates
  Vec3 k = Vec3::Zero();
  double omega = 0.0;
  std::size_t index = 0;
};

inline double energy(const Vec3 &k, double m) {
  return std::sqrt(k.squaredNorm() + m * m);
}

inline std::vector<MomentumMode> build_lattice(const LatticeSpec &spec) {
  if (!(spec.spacing > 0.0) || !std::isfinite(spec.spacing))
    throw Error(ErrorKind::InvalidLattice, "spacing must be finite and > 0");
  if (!(spec.mass >= 0.0) || !std::isfinite(spec.mass))
    throw Error(ErrorKind::InvalidLattice, "mass must be finite and >= 0");
  if (spec.half_extent < 0)
    throw Error(ErrorKind::InvalidLattice, "half_extent must be >= 0");
  if (spec.dim != 1 && spec.dim != 3)
    throw Error(ErrorKind::InvalidLattice, "dim must be 1 or 3");
  if (spec.mass == 0.0 && spec.include_zero)
    throw Error(ErrorKind::ZeroEnergyMode,
                "massless lattice contains k = 0 with omega = 0");

  const int n = spec.half_extent;
  const int ny = spec.dim == 3 ? n : 0;
  std::vector<MomentumMode> modes;
  for (int a = -n; a <= n; ++a) {
    for (int b = -ny; b <= ny; ++b) {
      for (int c = -ny; c <= ny; ++c) {
        if (!spec.include_zero && a == 0 && b == 0 && c == 0)
          continue;
        MomentumMode mode;
        mode.site = IVec3(a, b, c);
        mode.k = spec.spacing * mode.site.cast<double>();
        mode.omega = energy(mode.k, spec.mass);
        mode.index = modes.size();
        modes.push_back(mode);
      }
    }
  }
  return modes;
}

//==============================================================================
// Dirac matrices, standard (Dirac-Pauli) representation

struct DiracMatrices {
  std::array<Mat4, 3> alpha;
  Mat4 beta;
};

inline std::array<Mat2, 3> pauli() {
  Mat2 s1, s2, s3;
  s1 << 0, 1, 1, 0;
  s2 << 0, -I, I, 0;
  s3 << 1, 0, 0, -1;
  return {s1, s2, s3};
}

inline const DiracMatrices &dirac_matrices() {
  static const DiracMatrices dm = [] {
    DiracMatrices out;
    const auto sigma = pauli();
    for (int i = 0; i < 3; ++i) {
      out.alpha[i].setZero();
      out.alpha[i].topRightCorner<2, 2>() = sigma[i];
      out.alpha[i].bottomLeftCorner<2, 2>() = sigma[i];
    }
    out.beta.setZero();
    out.beta.diagonal() << 1, 1, -1, -1;
    return out;
  }();
  return dm;
}

//! Single-particle Dirac Hamiltonian H(k) = alpha.k + beta m
inline Mat4 dirac_hamiltonian(const Vec3 &k, double m) {
  const auto &dm = dirac_matrices();
  return k(0) * dm.alpha[0] + k(1) * dm.alpha[1] + k(2) * dm.alpha[2] +
         m * dm.beta;
}

//==============================================================================
// Spinors

//! u(k,s), v(k,s) for s = 1,2 stored at [s-1]. Normalized u^dag u = v^dag v = 1.
//! u(k,s) is the positive-energy solution of H(k) with upper block along the
//! z-axis spin state s; v(k,s) = i gamma^2 u(k,s)^* is its charge conjugate,
//! a negative-energy solution of H(-k) (the e^{+ikx} partner in the field
//! expansion).
struct DiracSpinorSet {
  std::array<Spinor, 2> u;
  std::array<Spinor, 2> v;
};

inline DiracSpinorSet make_spinors(const Vec3 &k, double m) {
  const double w = energy(k, m);
  if (!(w > 0.0))
    throw Error(ErrorKind::ZeroEnergyMode, "omega(k) = 0");
  const auto sigma = pauli();
  const Mat2 sk = k(0) * sigma[0] + k(1) * sigma[1] + k(2) * sigma[2];
  const double norm = std::sqrt((w + m) / (2.0 * w));

  const auto &dm = dirac_matrices();
  const Mat4 gamma2 = dm.beta * dm.alpha[1];

  DiracSpinorSet out;
  for (int s = 0; s < 2; ++s) {
    Eigen::Vector2cd chi = Eigen::Vector2cd::Zero();
    chi(s) = 1.0;
    Spinor u;
    u.head<2>() = chi;
    u.tail<2>() = sk * chi / (w + m);
    out.u[s] = norm * u;
    out.v[s] = I * gamma2 * out.u[s].conjugate();
  }
  return out;
}

//! (omega + H(k)) / 2 omega and (omega - H(k)) / 2 omega
inline std::pair<Mat4, Mat4> energy_projectors(const Vec3 &k, double m) {
  const double w = energy(k, m);
  if (!(w > 0.0))
    throw Error(ErrorKind::ZeroEnergyMode, "omega(k) = 0");
  const Mat4 h = dirac_hamiltonian(k, m);
  const Mat4 id = Mat4::Identity();
  return {(w * id + h) / (2.0 * w), (w * id - h) / (2.0 * w)};
}

//==============================================================================
// Polarization triad

struct PolarizationBasis {
  CVec3 eta_plus;
  CVec3 eta_zero;
  CVec3 eta_minus;
  bool axis_degenerate = false;

  const CVec3 &operator[](int lambda) const {
    return lambda > 0 ? eta_plus : (lambda < 0 ? eta_minus : eta_zero);
  }
};

//! Circular/longitudinal triad. Written with e^{i phi} = (k1 + i k2)/rho so the
//! removable 0/0 at k1 = k2 = 0 never forms; on that axis phi = 0, which is the
//! limit k1 -> 0+, k2 = 0.
inline PolarizationBasis polarization_basis(const Vec3 &k) {
  const double kn = k.norm();
  if (!(kn > 0.0))
    throw Error(ErrorKind::ZeroMomentum, "polarization basis undefined at k = 0");
  const double rho = std::hypot(k(0), k(1));

  PolarizationBasis out;
  double c = 1.0, s = 0.0;
  if (rho > 0.0) {
    c = k(0) / rho;
    s = k(1) / rho;
  } else {
    out.axis_degenerate = true;
  }
  const cplx phase(c, s);
  const double scale = 1.0 / (std::sqrt(2.0) * kn);
  out.eta_plus = scale * CVec3(phase * cplx(k(2) * c, -kn * s),
                               phase * cplx(k(2) * s, kn * c), -rho * phase);
  out.eta_minus = out.eta_plus.conjugate();
  out.eta_zero = (k / kn).cast<cplx>();
  return out;
}

//==============================================================================
// Pair coefficients

//! C_i(s,s') = u^dag(k,s) alpha_i v(-k,s'): coefficient of c^dag(k,s) d^dag(-k,s')
//! in the current. L = khat.C, T_i = C_i - khat_i L.
struct PairCoefficientTensor {
  Vec3 khat;
  std::array<Mat2, 3> C;
  Mat2 L;
  std::array<Mat2, 3> T;

  double frobenius_squared() const {
    double total = 0.0;
    for (const auto &c : C)
      total += c.squaredNorm();
    return total;
  }
  Mat2 transverse_gram() const {
    Mat2 g = Mat2::Zero();
    for (const auto &t : T)
      g += t.adjoint() * t;
    return g;
  }
  Mat2 longitudinal_gram() const { return L.adjoint() * L; }
};

//! Tensor for an electron basis u(k,.) and positron basis v(-k,.) given
//! explicitly; the axis is used to split longitudinal/transverse parts.
inline PairCoefficientTensor pair_coefficients(const std::array<Spinor, 2> &u_k,
                                               const std::array<Spinor, 2> &v_minus_k,
                                               const Vec3 &axis) {
  const auto &dm = dirac_matrices();
  PairCoefficientTensor out;
  out.khat = axis.normalized();
  out.L.setZero();
  for (int i = 0; i < 3; ++i) {
    for (int s = 0; s < 2; ++s)
      for (int t = 0; t < 2; ++t)
        out.C[i](s, t) = u_k[s].dot(dm.alpha[i] * v_minus_k[t]);
    out.L += out.khat(i) * out.C[i];
  }
  for (int i = 0; i < 3; ++i)
    out.T[i] = out.C[i] - out.khat(i) * out.L;
  return out;
}

inline PairCoefficientTensor pair_coefficients(const Vec3 &k, double m) {
  if (!(energy(k, m) > 0.0))
    throw Error(ErrorKind::ZeroEnergyMode, "omega(k) = 0");
  if (!(k.norm() > 0.0))
    throw Error(ErrorKind::ZeroMomentum, "pair split needs |k| > 0");
  const auto plus = make_spinors(k, m);
  const auto minus = make_spinors(-k, m);
  return pair_coefficients(plus.u, minus.v, k);
}

inline Vec3 classical_velocity(const Vec3 &k, double m) {
  const double w = energy(k, m);
  if (!(w > 0.0))
    throw Error(ErrorKind::ZeroEnergyMode, "omega(k) = 0");
  return k / w;
}

} // namespace zblab
