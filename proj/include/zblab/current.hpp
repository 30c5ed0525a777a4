#pragma once

#include "zblab/calibration.hpp"
#include "zblab/fock.hpp"

#include <optional>

namespace zblab {

//! One spinor set per registry mode, indexed like the modes.
using FieldSpinors = std::vector<DiracSpinorSet>;
using CurrentOperator = std::array<OperatorMatrix, 3>;

inline FieldSpinors default_field_spinors(const ModeRegistry &reg) {
  FieldSpinors out;
  out.reserve(reg.num_modes());
  for (const auto &m : reg.modes())
    out.push_back(make_spinors(m.k, reg.mass()));
  return out;
}

namespace detail {

inline void check_spinors(const ModeRegistry &reg, const FieldSpinors &spinors) {
  if (spinors.size() != reg.num_modes())
    throw Error(ErrorKind::InconsistentInput, "need one spinor set per mode");
}

inline LadderOp c_dag(const ModeRegistry &r, std::size_t q, int s) {
  return {r.dof_index(q, s, Species::electron), true};
}
inline LadderOp c_op(const ModeRegistry &r, std::size_t q, int s) {
  return {r.dof_index(q, s, Species::electron), false};
}
inline LadderOp d_dag(const ModeRegistry &r, std::size_t q, int s) {
  return {r.dof_index(q, s, Species::positron), true};
}
inline LadderOp d_op(const ModeRegistry &r, std::size_t q, int s) {
  return {r.dof_index(q, s, Species::positron), false};
}

inline CurrentOperator build_components(const FockBasis &basis,
                                        const std::array<std::vector<Term>, 3> &terms) {
  CurrentOperator out;
  for (int i = 0; i < 3; ++i)
    out[i] = build_operator(basis, terms[i]);
  return out;
}

} // namespace detail

//------------------------------------------------------------------------------
// Direct assembly of  integral psi^dag alpha psi d^3x

//! c-number produced by moving d d^dag into -d^dag d: sum_{k,s} v^dag alpha v.
inline CVec3 reordering_constant(const ModeRegistry &reg, const FieldSpinors &spinors) {
  detail::check_spinors(reg, spinors);
  const auto &dm = dirac_matrices();
  CVec3 total = CVec3::Zero();
  for (std::size_t q = 0; q < reg.num_modes(); ++q)
    for (int s = 0; s < 2; ++s)
      for (int i = 0; i < 3; ++i)
        total(i) += spinors[q].v[s].dot(dm.alpha[i] * spinors[q].v[s]);
  return total;
}

//! Field bilinear with the spatial integral reduced to momentum Kronecker
//! deltas. Electron components carry (c, u, e^{-i w t}, +k), positron
//! components (d^dag, v, e^{+i w t}, -k). With normal_order the d d^dag
//! products are rewritten as -d^dag d and the c-number is dropped.
inline CurrentOperator assemble_current_direct(const ModeRegistry &reg, const FockBasis &basis,
                                               const FieldSpinors &spinors,
                                               bool normal_order = true) {
  detail::check_spinors(reg, spinors);
  using namespace detail;
  const auto &dm = dirac_matrices();
  std::array<std::vector<Term>, 3> terms;
  for (std::size_t q = 0; q < reg.num_modes(); ++q) {
    const std::size_t r = reg.partner(q);
    const double w_pair = reg.mode(q).omega + reg.mode(r).omega;
    const auto &sq = spinors[q];
    const auto &sr = spinors[r];
    for (int i = 0; i < 3; ++i) {
      for (int s = 1; s <= 2; ++s) {
        for (int t = 1; t <= 2; ++t) {
          const cplx ee = sq.u[s - 1].dot(dm.alpha[i] * sq.u[t - 1]);
          const cplx pp = sq.v[s - 1].dot(dm.alpha[i] * sq.v[t - 1]);
          const cplx ep = sq.u[s - 1].dot(dm.alpha[i] * sr.v[t - 1]);
          const cplx pe = sq.v[s - 1].dot(dm.alpha[i] * sr.u[t - 1]);
          terms[i].push_back({ee, 0.0, {c_dag(reg, q, s), c_op(reg, q, t)}});
          if (normal_order)
            terms[i].push_back({-pp, 0.0, {d_dag(reg, q, t), d_op(reg, q, s)}});
          else
            terms[i].push_back({pp, 0.0, {d_op(reg, q, s), d_dag(reg, q, t)}});
          terms[i].push_back({ep, w_pair, {c_dag(reg, q, s), d_dag(reg, r, t)}});
          terms[i].push_back({pe, -w_pair, {d_op(reg, q, s), c_op(reg, r, t)}});
        }
      }
    }
  }
  return build_components(basis, terms);
}

//------------------------------------------------------------------------------
// The three pieces

//! sum_{k,s} (k/w) [c^dag c - d^dag d]
inline CurrentOperator assemble_classical(const ModeRegistry &reg, const FockBasis &basis) {
  using namespace detail;
  std::array<std::vector<Term>, 3> terms;
  for (const auto &m : reg.modes()) {
    const Vec3 vel = m.k / m.omega;
    for (int i = 0; i < 3; ++i) {
      for (int s = 1; s <= 2; ++s) {
        terms[i].push_back({vel(i), 0.0, {c_dag(reg, m.index, s), c_op(reg, m.index, s)}});
        terms[i].push_back({-vel(i), 0.0, {d_dag(reg, m.index, s), d_op(reg, m.index, s)}});
      }
    }
  }
  return build_components(basis, terms);
}

//! sum_k { sqrt2 eta(k,1) [c^dag(k,2) d^dag(-k,1) e^{2iwt} - c(a,1) d(b,2) e^{-2iwt}] + h.c. }
//! with (a,b) = (-k,k) as written or (k,-k) relabeled.
inline CurrentOperator assemble_zb_transverse(const ModeRegistry &reg, const FockBasis &basis,
                                              const PolarizationProvider &eta,
                                              PairReading reading) {
  using namespace detail;
  std::array<std::vector<Term>, 3> terms;
  const double root2 = std::sqrt(2.0);
  for (const auto &m : reg.modes()) {
    const std::size_t q = m.index;
    const std::size_t r = reg.partner(q);
    const std::size_t a = reading == PairReading::as_written ? r : q;
    const std::size_t b = reading == PairReading::as_written ? q : r;
    const double f = 2.0 * m.omega;
    const auto pol = eta(m.k);
    for (int i = 0; i < 3; ++i) {
      const cplx A = root2 * pol.eta_plus(i);
      terms[i].push_back({A, f, {c_dag(reg, q, 2), d_dag(reg, r, 1)}});
      terms[i].push_back({std::conj(A), -f, {d_op(reg, r, 1), c_op(reg, q, 2)}});
      terms[i].push_back({-A, -f, {c_op(reg, a, 1), d_op(reg, b, 2)}});
      terms[i].push_back({-std::conj(A), f, {d_dag(reg, b, 2), c_dag(reg, a, 1)}});
    }
  }
  return build_components(basis, terms);
}

//! sum_k (m/w) eta(k,0) { [c^dag(k,1) d^dag(-k,1) - c^dag(k,2) d^dag(-k,2)] e^{2iwt} + h.c. }
inline CurrentOperator assemble_zb_longitudinal(const ModeRegistry &reg, const FockBasis &basis,
                                                const PolarizationProvider &eta) {
  using namespace detail;
  std::array<std::vector<Term>, 3> terms;
  for (const auto &m : reg.modes()) {
    const std::size_t q = m.index;
    const std::size_t r = reg.partner(q);
    const double f = 2.0 * m.omega;
    const double ratio = reg.mass() / m.omega;
    const auto pol = eta(m.k);
    for (int i = 0; i < 3; ++i) {
      const cplx A = ratio * pol.eta_zero(i);
      for (int s = 1; s <= 2; ++s) {
        const cplx sA = s == 1 ? A : -A;
        terms[i].push_back({sA, f, {c_dag(reg, q, s), d_dag(reg, r, s)}});
        terms[i].push_back({std::conj(sA), -f, {d_op(reg, r, s), c_op(reg, q, s)}});
      }
    }
  }
  return build_components(basis, terms);
}

//------------------------------------------------------------------------------
// Conserved quantities

//! sum w (c^dag c + d^dag d)
inline OperatorMatrix free_hamiltonian(const ModeRegistry &reg, const FockBasis &basis) {
  std::vector<Term> terms;
  for (std::size_t j = 0; j < reg.num_dofs(); ++j)
    terms.push_back({reg.mode(j / 4).omega, 0.0, {{j, true}, {j, false}}});
  return build_operator(basis, terms);
}

//! sum (c^dag c - d^dag d), unit charge
inline OperatorMatrix charge_operator(const ModeRegistry &reg, const FockBasis &basis) {
  std::vector<Term> terms;
  for (std::size_t j = 0; j < reg.num_dofs(); ++j) {
    const double sign = reg.dof(j).species == Species::electron ? 1.0 : -1.0;
    terms.push_back({sign, 0.0, {{j, true}, {j, false}}});
  }
  return build_operator(basis, terms);
}

//! sum k (c^dag c + d^dag d)
inline CurrentOperator momentum_operator(const ModeRegistry &reg, const FockBasis &basis) {
  std::array<std::vector<Term>, 3> terms;
  for (std::size_t j = 0; j < reg.num_dofs(); ++j)
    for (int i = 0; i < 3; ++i)
      terms[i].push_back({reg.mode(j / 4).k(i), 0.0, {{j, true}, {j, false}}});
  return detail::build_components(basis, terms);
}

//------------------------------------------------------------------------------
// Spin-channel calibration of the whole field

struct FieldCalibration {
  FieldSpinors spinors;
  std::vector<double> mode_residuals; //!< per mode, pair (k, -k)
  double max_residual = 0.0;
};

//! Rotates u(k,.) and v(-k,.) for every mode so that the pair tensor matches
//! the literal channel layout as closely as unitaries allow.
inline FieldCalibration calibrate_field(const ModeRegistry &reg, PairReading reading,
                                        const PolarizationProvider &eta,
                                        std::uint64_t seed = 7) {
  const FieldSpinors base = default_field_spinors(reg);
  FieldCalibration out;
  out.spinors = base;
  for (const auto &m : reg.modes()) {
    const std::size_t q = m.index;
    const std::size_t r = reg.partner(q);
    const auto tensor = pair_coefficients(base[q].u, base[r].v, mode_axis(m.k));
    const auto target = literal_pair_layout(m.k, reg.mass(), reading, eta);
    const auto cal = calibrate_spin_channels(tensor.C, target, seed + q);
    for (int s = 0; s < 2; ++s) {
      out.spinors[q].u[s] = base[q].u[0] * cal.electron(0, s) + base[q].u[1] * cal.electron(1, s);
      out.spinors[r].v[s] = base[r].v[0] * cal.positron(0, s) + base[r].v[1] * cal.positron(1, s);
    }
    out.mode_residuals.push_back(cal.residual);
    out.max_residual = std::max(out.max_residual, cal.residual);
  }
  return out;
}

//------------------------------------------------------------------------------
// Decomposition check  V = V_classic + Z_perp + Z_par

struct DecompositionOptions {
  std::vector<double> times{0.0, 0.3, 1.7};
  std::optional<PairReading> reading; //!< nullopt: as written, then relabeled
  PolarizationProvider eta = default_polarizations();
  double tolerance = 1e-10;
  std::uint64_t seed = 7;
};

struct ReadingAttempt {
  PairReading reading;
  double calibration_residual = 0.0;
  double max_residual = 0.0;
  //! residuals[time][component]
  std::vector<std::array<double, 3>> residuals;
  bool passed = false;
};

struct DecompositionReport {
  std::vector<double> times;
  std::vector<ReadingAttempt> attempts;
  std::size_t dimension = 0;
  double tolerance = 0.0;

  const ReadingAttempt &final_attempt() const { return attempts.back(); }
  bool passed() const { return !attempts.empty() && attempts.back().passed; }
  double max_residual() const { return attempts.empty() ? 0.0 : attempts.back().max_residual; }
};

struct CurrentDecomposition {
  CurrentOperator direct;
  CurrentOperator classical;
  CurrentOperator zb_transverse;
  CurrentOperator zb_longitudinal;
};

inline CurrentDecomposition assemble_decomposition(const ModeRegistry &reg,
                                                   const FockBasis &basis,
                                                   const FieldSpinors &spinors,
                                                   const PolarizationProvider &eta,
                                                   PairReading reading) {
  return {assemble_current_direct(reg, basis, spinors), assemble_classical(reg, basis),
          assemble_zb_transverse(reg, basis, eta, reading),
          assemble_zb_longitudinal(reg, basis, eta)};
}

//! max entrywise |V_direct(t) - (V_classic + Z_perp(t) + Z_par(t))| per component
inline std::array<double, 3> decomposition_residual(const CurrentDecomposition &d, double t) {
  std::array<double, 3> out{};
  for (int i = 0; i < 3; ++i) {
    SparseMatrix diff = d.direct[i].at(t) - d.classical[i].at(t) - d.zb_transverse[i].at(t) -
                        d.zb_longitudinal[i].at(t);
    out[i] = OperatorMatrix::max_abs(diff);
  }
  return out;
}

inline DecompositionReport verify_decomposition(const ModeRegistry &reg, const FockBasis &basis,
                                                const DecompositionOptions &options = {}) {
  DecompositionReport report;
  report.times = options.times;
  report.dimension = basis.dimension();
  report.tolerance = options.tolerance;

  std::vector<PairReading> readings;
  if (options.reading)
    readings.push_back(*options.reading);
  else
    readings = {PairReading::as_written, PairReading::relabeled};

  for (const auto reading : readings) {
    const auto cal = calibrate_field(reg, reading, options.eta, options.seed);
    const auto parts = assemble_decomposition(reg, basis, cal.spinors, options.eta, reading);
    ReadingAttempt attempt{reading, cal.max_residual, 0.0, {}, false};
    for (const double t : options.times) {
      const auto r = decomposition_residual(parts, t);
      attempt.residuals.push_back(r);
      for (const double v : r)
        attempt.max_residual = std::max(attempt.max_residual, v);
    }
    attempt.passed = attempt.max_residual <= options.tolerance;
    report.attempts.push_back(std::move(attempt));
    if (report.attempts.back().passed)
      break;
  }
  return report;
}

} // namespace zblab
