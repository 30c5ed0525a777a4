#pragma once

#include "zblab/current.hpp"

#include <map>
#include <random>
#include <string>

namespace zblab {

//! One line of a verification report.
struct CheckResult {
  std::string name;
  double value = 0.0;
  double tolerance = 0.0;
  bool passed = false;
};

//! Named tolerances used by the verification battery.
using Tolerances = std::map<std::string, double, std::less<>>;

inline Tolerances default_tolerances() {
  return {
      {"clifford", 1e-12},    {"spinor", 1e-12},      {"polarization", 1e-12},
      {"gram", 1e-10},        {"car", 1e-14},         {"hermiticity", 1e-12},
      {"reordering", 1e-12},  {"calibration", 1e-10}, {"decomposition", 1e-10},
      {"commutator", 1e-12},  {"vacuum", 1e-12},      {"norm", 1e-10},
      {"frequency", 1e-2},
  };
}

struct VerifyOptions {
  LatticeSpec lattice{1.0, 1.0, 1, 1, true};
  std::vector<double> times{0.0, 0.3, 1.7};
  int random_times = 2;
  std::uint64_t seed = 1;
  std::optional<PairReading> reading;
  std::optional<Sector> sector;
  Tolerances tolerances = default_tolerances();
  //! CAR is checked on the unfiltered space only up to this many dofs
  std::size_t car_dof_limit = 12;
};

struct VerifyOutcome {
  std::vector<CheckResult> checks;
  DecompositionReport decomposition;
  std::vector<double> times;
  std::size_t dimension = 0;

  bool passed() const {
    return std::all_of(checks.begin(), checks.end(), [](const CheckResult &c) { return c.passed; });
  }
};

namespace detail {

class CheckList {
public:
  explicit CheckList(const Tolerances &tol) : m_tol(tol) {}

  void add(const std::string &name, const std::string &tolerance_name, double value) {
    const auto it = m_tol.find(tolerance_name);
    if (it == m_tol.end())
      throw Error(ErrorKind::InvalidConfig, "no tolerance named " + tolerance_name);
    m_checks.push_back({name, value, it->second, value <= it->second});
  }

  std::vector<CheckResult> take() { return std::move(m_checks); }

private:
  const Tolerances &m_tol;
  std::vector<CheckResult> m_checks;
};

inline double max_abs(const Mat4 &m) { return m.cwiseAbs().maxCoeff(); }

inline double clifford_defect() {
  const auto &dm = dirac_matrices();
  const Mat4 id = Mat4::Identity();
  double worst = max_abs(dm.beta * dm.beta - id);
  worst = std::max(worst, max_abs(dm.beta - dm.beta.adjoint()));
  for (int i = 0; i < 3; ++i) {
    worst = std::max(worst, max_abs(dm.alpha[i] * dm.beta + dm.beta * dm.alpha[i]));
    worst = std::max(worst, max_abs(dm.alpha[i] - dm.alpha[i].adjoint()));
    for (int j = 0; j < 3; ++j) {
      const Mat4 ac = dm.alpha[i] * dm.alpha[j] + dm.alpha[j] * dm.alpha[i];
      worst = std::max(worst, max_abs(ac - (i == j ? 2.0 : 0.0) * id));
    }
  }
  return worst;
}

} // namespace detail

//! Spinor identities for one momentum: eigen-equations, orthonormality,
//! positive-energy completeness and <alpha> = k/w. Returns the worst defect.
inline double spinor_defect(const Vec3 &k, double m) {
  const auto sp = make_spinors(k, m);
  const double w = energy(k, m);
  const Mat4 h = dirac_hamiltonian(k, m);
  const Mat4 h_minus = dirac_hamiltonian(-k, m);
  const auto &dm = dirac_matrices();
  double worst = 0.0;
  Mat4 completeness = Mat4::Zero();
  for (int s = 0; s < 2; ++s) {
    worst = std::max(worst, (h * sp.u[s] - w * sp.u[s]).cwiseAbs().maxCoeff());
    worst = std::max(worst, (h_minus * sp.v[s] + w * sp.v[s]).cwiseAbs().maxCoeff());
    for (int t = 0; t < 2; ++t) {
      const double delta = s == t ? 1.0 : 0.0;
      worst = std::max(worst, std::abs(sp.u[s].dot(sp.u[t]) - delta));
      worst = std::max(worst, std::abs(sp.v[s].dot(sp.v[t]) - delta));
    }
    completeness += sp.u[s] * sp.u[s].adjoint();
    for (int i = 0; i < 3; ++i)
      worst = std::max(worst, std::abs(sp.u[s].dot(dm.alpha[i] * sp.u[s]) - k(i) / w));
  }
  const Mat4 expected = (w * Mat4::Identity() + h) / (2.0 * w);
  worst = std::max(worst, (completeness - expected).cwiseAbs().maxCoeff());
  return worst;
}

//! Orthonormality, completeness, transversality, eta(0) = khat and
//! eta(-1) = eta(+1)^*.
inline double polarization_defect(const Vec3 &k) {
  const auto pb = polarization_basis(k);
  const std::array<const CVec3 *, 3> e{&pb.eta_plus, &pb.eta_zero, &pb.eta_minus};
  double worst = 0.0;
  Eigen::Matrix3cd completeness = Eigen::Matrix3cd::Zero();
  for (int a = 0; a < 3; ++a) {
    for (int b = 0; b < 3; ++b)
      worst = std::max(worst, std::abs(e[a]->dot(*e[b]) - (a == b ? 1.0 : 0.0)));
    completeness += (*e[a]) * e[a]->adjoint();
  }
  worst = std::max(worst, (completeness - Eigen::Matrix3cd::Identity()).cwiseAbs().maxCoeff());
  const CVec3 kc = k.cast<cplx>();
  worst = std::max(worst, std::abs(kc.dot(pb.eta_plus)) / k.norm());
  worst = std::max(worst, std::abs(kc.dot(pb.eta_minus)) / k.norm());
  worst = std::max(worst, (pb.eta_zero - (k / k.norm()).cast<cplx>()).cwiseAbs().maxCoeff());
  worst = std::max(worst, (pb.eta_minus - pb.eta_plus.conjugate()).cwiseAbs().maxCoeff());
  return worst;
}

//! Deviations of the Gram spectra and the Frobenius total from their closed forms.
struct GramDefect {
  double transverse = 0.0;
  double longitudinal = 0.0;
  double frobenius = 0.0;
};

inline GramDefect gram_defect(const Vec3 &k, double m) {
  const auto t = pair_coefficients(k, m);
  const double w = energy(k, m);
  const double ratio2 = m * m / (w * w);
  Eigen::SelfAdjointEigenSolver<Mat2> tg(t.transverse_gram());
  Eigen::SelfAdjointEigenSolver<Mat2> lg(t.longitudinal_gram());
  GramDefect out;
  out.transverse = (tg.eigenvalues().array() - 2.0).abs().maxCoeff();
  out.longitudinal = (lg.eigenvalues().array() - ratio2).abs().maxCoeff();
  out.frobenius = std::abs(t.frobenius_squared() - (4.0 + 2.0 * ratio2));
  return out;
}

//! max over dof pairs of |{a_i, a_j^dag} - delta_ij| and |{a_i, a_j}|.
inline double car_defect(const ModeRegistry &reg) {
  const auto basis = enumerate_basis(reg);
  std::vector<SparseMatrix> ann;
  for (std::size_t j = 0; j < reg.num_dofs(); ++j)
    ann.push_back(ladder(reg, basis, j, false).at(0.0));
  const auto dim = Eigen::Index(basis.dimension());
  SparseMatrix id(dim, dim);
  id.setIdentity();
  double worst = 0.0;
  for (std::size_t i = 0; i < ann.size(); ++i) {
    for (std::size_t j = i; j < ann.size(); ++j) {
      const SparseMatrix adj = ann[j].adjoint();
      SparseMatrix mixed = anticommutator(ann[i], adj);
      if (i == j)
        mixed -= id;
      worst = std::max(worst, OperatorMatrix::max_abs(mixed));
      worst = std::max(worst, OperatorMatrix::max_abs(anticommutator(ann[i], ann[j])));
    }
  }
  return worst;
}

inline std::string time_tag(double t) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.6g", t);
  return buf;
}

inline VerifyOutcome run_verification(const VerifyOptions &opt) {
  VerifyOutcome out;
  detail::CheckList checks(opt.tolerances);

  const auto reg = ModeRegistry::from_lattice(opt.lattice);
  const double m = opt.lattice.mass;

  out.times = opt.times;
  std::mt19937_64 rng(opt.seed);
  std::uniform_real_distribution<double> pick(0.0, 10.0);
  for (int i = 0; i < opt.random_times; ++i)
    out.times.push_back(pick(rng));

  checks.add("clifford", "clifford", detail::clifford_defect());

  double spinor = 0.0, pol = 0.0, tg = 0.0, lg = 0.0, fro = 0.0;
  for (const auto &mode : reg.modes()) {
    spinor = std::max(spinor, spinor_defect(mode.k, m));
    if (mode.k.norm() > 0.0) {
      pol = std::max(pol, polarization_defect(mode.k));
      const auto g = gram_defect(mode.k, m);
      tg = std::max(tg, g.transverse);
      lg = std::max(lg, g.longitudinal);
      fro = std::max(fro, g.frobenius);
    }
  }
  checks.add("spinor.identities", "spinor", spinor);
  checks.add("polarization.triad", "polarization", pol);
  checks.add("gram.transverse", "gram", tg);
  checks.add("gram.longitudinal", "gram", lg);
  checks.add("gram.frobenius", "gram", fro);

  if (reg.num_dofs() <= opt.car_dof_limit)
    checks.add("fock.car", "car", car_defect(reg));

  const auto basis = enumerate_basis(reg, opt.sector);
  out.dimension = basis.dimension();

  DecompositionOptions dopt;
  dopt.times = out.times;
  dopt.reading = opt.reading;
  dopt.tolerance = opt.tolerances.at("decomposition");
  dopt.seed = opt.seed;
  out.decomposition = verify_decomposition(reg, basis, dopt);
  const auto &attempt = out.decomposition.final_attempt();

  checks.add("calibration.residual", "calibration", attempt.calibration_residual);
  const char *axis = "xyz";
  for (std::size_t ti = 0; ti < out.times.size(); ++ti)
    for (int i = 0; i < 3; ++i)
      checks.add("decomposition[t=" + time_tag(out.times[ti]) + "][" + axis[i] + "]",
                 "decomposition", attempt.residuals[ti][std::size_t(i)]);

  // pieces with the calibrated spinors of the reading that was accepted
  const auto cal = calibrate_field(reg, attempt.reading, default_polarizations(), opt.seed);
  const auto parts =
      assemble_decomposition(reg, basis, cal.spinors, default_polarizations(), attempt.reading);
  double herm = 0.0;
  for (const auto *piece : {&parts.direct, &parts.classical, &parts.zb_transverse,
                            &parts.zb_longitudinal})
    for (const auto &op : *piece)
      herm = std::max(herm, op.hermiticity_defect());
  checks.add("hermiticity", "hermiticity", herm);
  checks.add("reordering.constant", "reordering",
             reordering_constant(reg, cal.spinors).cwiseAbs().maxCoeff());

  // vacuum expectation values (the vacuum is basis state 0 when present)
  if (const auto vac = basis.find(0u)) {
    double worst = 0.0;
    for (const double t : out.times)
      for (const auto *piece : {&parts.direct, &parts.classical, &parts.zb_transverse,
                                &parts.zb_longitudinal})
        for (const auto &op : *piece)
          worst = std::max(worst, std::abs(op.at(t).coeff(Eigen::Index(*vac), Eigen::Index(*vac))));
    checks.add("vacuum.expectation", "vacuum", worst);
  }

  const SparseMatrix Q = charge_operator(reg, basis).at(0.0);
  std::array<SparseMatrix, 3> P;
  const auto pop = momentum_operator(reg, basis);
  for (int i = 0; i < 3; ++i)
    P[std::size_t(i)] = pop[std::size_t(i)].at(0.0);
  double qc = 0.0, pc = 0.0;
  for (const double t : out.times) {
    for (const auto *piece : {&parts.direct, &parts.classical, &parts.zb_transverse,
                              &parts.zb_longitudinal}) {
      for (const auto &op : *piece) {
        const SparseMatrix mt = op.at(t);
        qc = std::max(qc, OperatorMatrix::max_abs(commutator(mt, Q)));
        if (piece == &parts.zb_transverse || piece == &parts.zb_longitudinal)
          for (const auto &p : P)
            pc = std::max(pc, OperatorMatrix::max_abs(commutator(mt, p)));
      }
    }
  }
  checks.add("commutator.charge", "commutator", qc);
  checks.add("commutator.momentum", "commutator", pc);

  out.checks = checks.take();
  return out;
}

} // namespace zblab
