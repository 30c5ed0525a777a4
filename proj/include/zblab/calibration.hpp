#pragma once

#include "zblab/kinematics.hpp"

#include <Eigen/SVD>

#include <functional>
#include <limits>
#include <random>
#include <string_view>

namespace zblab {

//! Two readings of the annihilation term in the transverse ZB current.
//! as_written: c(-k,1) d(k,2); relabeled: c(k,1) d(-k,2).
enum class PairReading { as_written, relabeled };

inline std::string_view to_string(PairReading r) {
  return r == PairReading::as_written ? "as_written" : "relabeled";
}

//! Supplies eta(k, lambda). Swappable so a corrupted triad can be injected.
using PolarizationProvider = std::function<PolarizationBasis(const Vec3 &)>;

//! Rest modes have no direction of their own; they borrow the limit k -> 0+
//! along the x axis.
inline PolarizationBasis mode_polarization(const Vec3 &k) {
  if (k.norm() > 0.0)
    return polarization_basis(k);
  return polarization_basis(Vec3::UnitX());
}

inline PolarizationProvider default_polarizations() { return mode_polarization; }

//! Polarization vectors with their first two Cartesian components exchanged.
inline PolarizationProvider swapped_polarizations() {
  return [](const Vec3 &k) {
    auto basis = mode_polarization(k);
    for (CVec3 *e : {&basis.eta_plus, &basis.eta_zero, &basis.eta_minus})
      std::swap((*e)(0), (*e)(1));
    return basis;
  };
}

inline Vec3 mode_axis(const Vec3 &k) {
  return k.norm() > 0.0 ? Vec3(k.normalized()) : Vec3(Vec3::UnitX());
}

//! Creation-channel layout of the ZB currents for the pair (electron k,
//! positron -k): entry (s,s') multiplies c^dag(k,s) d^dag(-k,s').
inline std::array<Mat2, 3> literal_pair_layout(const Vec3 &k, double m,
                                               PairReading reading,
                                               const PolarizationProvider &eta) {
  const double w = energy(k, m);
  if (!(w > 0.0))
    throw Error(ErrorKind::ZeroEnergyMode, "omega(k) = 0");
  const auto here = eta(k);
  const auto there = eta(-k);
  const double root2 = std::sqrt(2.0);
  std::array<Mat2, 3> out;
  for (int i = 0; i < 3; ++i) {
    out[i].setZero();
    out[i](0, 0) = (m / w) * here.eta_zero(i);
    out[i](1, 1) = -(m / w) * here.eta_zero(i);
    out[i](1, 0) = root2 * here.eta_plus(i);
    out[i](0, 1) = root2 * (reading == PairReading::relabeled
                                ? here.eta_minus(i)
                                : there.eta_minus(i));
  }
  return out;
}

struct SpinCalibration {
  Mat2 electron = Mat2::Identity(); //!< u'(k,s) = sum_r u(k,r) electron(r,s)
  Mat2 positron = Mat2::Identity(); //!< v'(-k,s) = sum_r v(-k,r) positron(r,s)
  double residual = 0.0;            //!< max entry of |U^dag C W - target|
};

namespace detail {

//! Unitary polar factor of m.
inline Mat2 polar_unitary(const Mat2 &m) {
  Eigen::JacobiSVD<Mat2> svd(m, Eigen::ComputeFullU | Eigen::ComputeFullV);
  return svd.matrixU() * svd.matrixV().adjoint();
}

inline Mat2 random_unitary(std::mt19937_64 &rng) {
  std::normal_distribution<double> g;
  Mat2 z;
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j)
      z(i, j) = cplx(g(rng), g(rng));
  return polar_unitary(z);
}

inline double layout_residual(const std::array<Mat2, 3> &C,
                              const std::array<Mat2, 3> &target, const Mat2 &U,
                              const Mat2 &W) {
  double worst = 0.0;
  for (int i = 0; i < 3; ++i)
    worst = std::max(worst, (U.adjoint() * C[i] * W - target[i]).cwiseAbs().maxCoeff());
  return worst;
}

} // namespace detail

//! Finds unitaries U, W minimizing sum_i |U^dag C_i W - target_i|_F^2 by
//! alternating orthogonal Procrustes steps from several seeded starts.
inline SpinCalibration calibrate_spin_channels(const std::array<Mat2, 3> &C,
                                               const std::array<Mat2, 3> &target,
                                               std::uint64_t seed = 7,
                                               int starts = 12,
                                               int max_iterations = 4000) {
  std::mt19937_64 rng(seed);
  SpinCalibration best;
  best.residual = std::numeric_limits<double>::infinity();

  for (int start = 0; start < starts; ++start) {
    Mat2 U = start == 0 ? Mat2::Identity() : detail::random_unitary(rng);
    Mat2 W = Mat2::Identity();
    double previous = std::numeric_limits<double>::infinity();
    for (int it = 0; it < max_iterations; ++it) {
      Mat2 toW = Mat2::Zero();
      for (int i = 0; i < 3; ++i)
        toW += C[i].adjoint() * U * target[i];
      W = detail::polar_unitary(toW);
      Mat2 toU = Mat2::Zero();
      for (int i = 0; i < 3; ++i)
        toU += C[i] * W * target[i].adjoint();
      U = detail::polar_unitary(toU);

      const double r = detail::layout_residual(C, target, U, W);
      if (r < 1e-15 || std::abs(previous - r) < 1e-17)
        break;
      previous = r;
    }
    const double r = detail::layout_residual(C, target, U, W);
    if (r < best.residual) {
      best = {U, W, r};
      if (r < 1e-14)
        break;
    }
  }
  return best;
}

} // namespace zblab
