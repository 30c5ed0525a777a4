#pragma once

#include "zblab/kinematics.hpp"

#include <Eigen/Sparse>

#include <algorithm>
#include <bit>
#include <cstdint>
#include <map>
#include <optional>
#include <span>

namespace zblab {

using SparseMatrix = Eigen::SparseMatrix<cplx>;
using StateVector = Eigen::VectorXcd;

enum class Species { electron, positron };

struct Dof {
  std::size_t mode = 0;
  int spin = 1; //!< 1 or 2
  Species species = Species::electron;
};

//! Fermionic degrees of freedom in registry order: for each momentum mode,
//! electron s=1, electron s=2, positron s=1, positron s=2.
class ModeRegistry {
public:
  explicit ModeRegistry(std::vector<MomentumMode> modes, double mass)
      : m_modes(std::move(modes)), m_mass(mass) {
    for (std::size_t q = 0; q < m_modes.size(); ++q) {
      if (m_modes[q].index != q)
        throw Error(ErrorKind::InconsistentInput, "modes must be ordered by index");
      if (!(m_modes[q].omega > 0.0))
        throw Error(ErrorKind::ZeroEnergyMode, "registry mode with omega = 0");
    }
    for (std::size_t q = 0; q < m_modes.size(); ++q) {
      const auto partner = find_site(-m_modes[q].site);
      if (!partner)
        throw Error(ErrorKind::InvalidLattice, "mode set is not closed under k -> -k");
      m_partner.push_back(*partner);
    }
  }

  static ModeRegistry from_lattice(const LatticeSpec &spec) {
    return ModeRegistry(build_lattice(spec), spec.mass);
  }

  double mass() const { return m_mass; }
  std::size_t num_modes() const { return m_modes.size(); }
  std::size_t num_dofs() const { return 4 * m_modes.size(); }
  const std::vector<MomentumMode> &modes() const { return m_modes; }
  const MomentumMode &mode(std::size_t q) const { return m_modes.at(q); }
  //! Index of the mode carrying -k.
  std::size_t partner(std::size_t q) const { return m_partner.at(q); }

  std::size_t dof_index(std::size_t q, int spin, Species species) const {
    if (q >= m_modes.size() || (spin != 1 && spin != 2))
      throw Error(ErrorKind::UnknownDof, "no such mode/spin");
    return 4 * q + (species == Species::positron ? 2 : 0) + std::size_t(spin - 1);
  }

  Dof dof(std::size_t j) const {
    if (j >= num_dofs())
      throw Error(ErrorKind::UnknownDof, "dof index out of range");
    return {j / 4, int(j % 2) + 1, (j % 4) >= 2 ? Species::positron : Species::electron};
  }

  std::optional<std::size_t> find_site(const IVec3 &site) const {
    for (const auto &m : m_modes)
      if (m.site == site)
        return m.index;
    return std::nullopt;
  }

private:
  std::vector<MomentumMode> m_modes;
  double m_mass;
  std::vector<std::size_t> m_partner;
};

//==============================================================================
// Occupation-number basis

//! Optional conserved-quantity sector. Charge counts electrons minus positrons;
//! momentum is the summed lattice site of all occupied dofs.
struct Sector {
  std::optional<int> charge;
  std::optional<IVec3> momentum;
};

inline constexpr std::size_t max_fock_dofs = 24;

class FockBasis {
public:
  FockBasis() = default;
  FockBasis(std::vector<std::uint32_t> states, bool full)
      : m_states(std::move(states)), m_full(full) {}

  std::size_t dimension() const { return m_states.size(); }
  bool is_full() const { return m_full; }
  std::uint32_t state(std::size_t i) const { return m_states[i]; }
  const std::vector<std::uint32_t> &states() const { return m_states; }

  //! Position of an occupation pattern, or nullopt when outside the basis.
  std::optional<std::size_t> find(std::uint32_t pattern) const {
    if (m_full)
      return pattern < m_states.size() ? std::optional<std::size_t>(pattern) : std::nullopt;
    const auto it = std::lower_bound(m_states.begin(), m_states.end(), pattern);
    if (it == m_states.end() || *it != pattern)
      return std::nullopt;
    return std::size_t(it - m_states.begin());
  }

private:
  std::vector<std::uint32_t> m_states;
  bool m_full = true;
};

inline int pattern_charge(const ModeRegistry &reg, std::uint32_t pattern) {
  int q = 0;
  for (std::size_t j = 0; j < reg.num_dofs(); ++j)
    if (pattern >> j & 1u)
      q += reg.dof(j).species == Species::electron ? 1 : -1;
  return q;
}

inline IVec3 pattern_momentum(const ModeRegistry &reg, std::uint32_t pattern) {
  IVec3 p = IVec3::Zero();
  for (std::size_t j = 0; j < reg.num_dofs(); ++j)
    if (pattern >> j & 1u)
      p += reg.mode(j / 4).site;
  return p;
}

inline FockBasis enumerate_basis(const ModeRegistry &reg,
                                 const std::optional<Sector> &filter = std::nullopt) {
  const std::size_t n = reg.num_dofs();
  if (n > max_fock_dofs)
    throw Error(ErrorKind::TooLarge,
                std::to_string(n) + " dofs exceeds the limit of " +
                    std::to_string(max_fock_dofs));
  const std::uint64_t count = std::uint64_t{1} << n;
  std::vector<std::uint32_t> states;
  const bool full = !filter || (!filter->charge && !filter->momentum);
  if (full) {
    states.resize(count);
    for (std::uint64_t s = 0; s < count; ++s)
      states[s] = std::uint32_t(s);
    return FockBasis(std::move(states), true);
  }

  // Per-dof charge and site, so the sector test is a tight loop.
  std::vector<int> dq(n);
  std::vector<IVec3> dp(n);
  for (std::size_t j = 0; j < n; ++j) {
    dq[j] = reg.dof(j).species == Species::electron ? 1 : -1;
    dp[j] = reg.mode(j / 4).site;
  }
  for (std::uint64_t s = 0; s < count; ++s) {
    int q = 0;
    IVec3 p = IVec3::Zero();
    for (std::size_t j = 0; j < n; ++j) {
      if (s >> j & 1u) {
        q += dq[j];
        p += dp[j];
      }
    }
    if (filter->charge && q != *filter->charge)
      continue;
    if (filter->momentum && p != *filter->momentum)
      continue;
    states.push_back(std::uint32_t(s));
  }
  return FockBasis(std::move(states), false);
}

//==============================================================================
// Ladder strings

struct LadderOp {
  std::size_t dof;
  bool create;
};

//! Applies one ladder operator with the Jordan-Wigner sign: the parity of the
//! occupied dofs ordered before it. Returns false when the result vanishes.
inline bool apply_ladder(const LadderOp &op, std::uint32_t &pattern, int &sign) {
  const std::uint32_t bit = std::uint32_t{1} << op.dof;
  const bool occupied = pattern & bit;
  if (occupied == op.create)
    return false;
  if (std::popcount(pattern & (bit - 1u)) & 1)
    sign = -sign;
  pattern ^= bit;
  return true;
}

//! Product of ladder operators, leftmost first, times coefficient * e^{i f t}.
struct Term {
  cplx coefficient;
  double frequency = 0.0;
  std::vector<LadderOp> ops;
};

//==============================================================================
// Operator matrices

//! M(t) = sum_f matrix_f e^{i f t}; frequency 0 is the static part.
struct Harmonic {
  double frequency;
  SparseMatrix matrix;
};

class OperatorMatrix {
public:
  OperatorMatrix() = default;
  OperatorMatrix(std::size_t dim, std::vector<Harmonic> harmonics)
      : m_dim(dim), m_harmonics(std::move(harmonics)) {
    std::sort(m_harmonics.begin(), m_harmonics.end(),
              [](const Harmonic &a, const Harmonic &b) { return a.frequency < b.frequency; });
    m_hermitian = hermiticity_defect() <= 1e-12;
  }

  static OperatorMatrix from_static(SparseMatrix m) {
    const auto dim = std::size_t(m.rows());
    std::vector<Harmonic> h;
    h.push_back({0.0, std::move(m)});
    return OperatorMatrix(dim, std::move(h));
  }

  std::size_t dimension() const { return m_dim; }
  bool hermitian() const { return m_hermitian; }
  bool is_static() const {
    return std::all_of(m_harmonics.begin(), m_harmonics.end(),
                       [](const Harmonic &h) { return h.frequency == 0.0; });
  }
  const std::vector<Harmonic> &harmonics() const { return m_harmonics; }

  SparseMatrix at(double t) const {
    SparseMatrix out = zero_matrix();
    for (const auto &h : m_harmonics) {
      if (h.frequency == 0.0)
        out += h.matrix;
      else
        out += std::exp(I * (h.frequency * t)) * h.matrix;
    }
    out.makeCompressed();
    return out;
  }

  //! max |M_f - (M_{-f})^dag| over harmonics: zero iff M(t) is hermitian for
  //! every t.
  double hermiticity_defect() const {
    double worst = 0.0;
    for (const auto &h : m_harmonics) {
      SparseMatrix mirror = zero_matrix();
      for (const auto &g : m_harmonics)
        if (g.frequency == -h.frequency)
          mirror += g.matrix;
      SparseMatrix diff = SparseMatrix(h.matrix - SparseMatrix(mirror.adjoint()));
      worst = std::max(worst, max_abs(diff));
    }
    return worst;
  }

  OperatorMatrix &operator+=(const OperatorMatrix &other) {
    if (other.m_dim != m_dim)
      throw Error(ErrorKind::InconsistentInput, "dimension mismatch");
    for (const auto &g : other.m_harmonics) {
      auto it = std::find_if(m_harmonics.begin(), m_harmonics.end(),
                             [&](const Harmonic &h) { return h.frequency == g.frequency; });
      if (it == m_harmonics.end())
        m_harmonics.push_back(g);
      else
        it->matrix += g.matrix;
    }
    *this = OperatorMatrix(m_dim, std::move(m_harmonics));
    return *this;
  }

  friend OperatorMatrix operator+(OperatorMatrix a, const OperatorMatrix &b) {
    a += b;
    return a;
  }

  static double max_abs(const SparseMatrix &m) {
    double worst = 0.0;
    for (int k = 0; k < m.outerSize(); ++k)
      for (SparseMatrix::InnerIterator it(m, k); it; ++it)
        worst = std::max(worst, std::abs(it.value()));
    return worst;
  }

private:
  SparseMatrix zero_matrix() const {
    const auto n = Eigen::Index(m_dim);
    return SparseMatrix(n, n);
  }

  std::size_t m_dim = 0;
  std::vector<Harmonic> m_harmonics;
  bool m_hermitian = true;
};

//! Matrix of a sum of ladder strings in the given basis. Terms must preserve
//! the basis sector; a string leaving it raises InconsistentInput.
inline OperatorMatrix build_operator(const FockBasis &basis, std::span<const Term> terms) {
  std::map<double, std::vector<Eigen::Triplet<cplx>>> by_frequency;
  for (const auto &term : terms) {
    if (term.coefficient == cplx(0.0))
      continue;
    auto &triplets = by_frequency[term.frequency];
    for (std::size_t col = 0; col < basis.dimension(); ++col) {
      std::uint32_t pattern = basis.state(col);
      int sign = 1;
      bool alive = true;
      for (auto op = term.ops.rbegin(); op != term.ops.rend() && alive; ++op)
        alive = apply_ladder(*op, pattern, sign);
      if (!alive)
        continue;
      const auto row = basis.find(pattern);
      if (!row)
        throw Error(ErrorKind::InconsistentInput, "operator leaves the basis sector");
      triplets.emplace_back(Eigen::Index(*row), Eigen::Index(col),
                            double(sign) * term.coefficient);
    }
  }
  const auto dim = Eigen::Index(basis.dimension());
  std::vector<Harmonic> harmonics;
  for (auto &[f, triplets] : by_frequency) {
    SparseMatrix m(dim, dim);
    m.setFromTriplets(triplets.begin(), triplets.end());
    m.prune(cplx(0.0));
    harmonics.push_back({f, std::move(m)});
  }
  if (harmonics.empty())
    harmonics.push_back({0.0, SparseMatrix(dim, dim)});
  return OperatorMatrix(basis.dimension(), std::move(harmonics));
}

//! Single creation or annihilation operator on the full 2^n space.
inline OperatorMatrix ladder(const ModeRegistry &reg, const FockBasis &full_basis,
                             std::size_t dof, bool create) {
  if (dof >= reg.num_dofs())
    throw Error(ErrorKind::UnknownDof, "dof " + std::to_string(dof) + " not registered");
  if (!full_basis.is_full())
    throw Error(ErrorKind::InconsistentInput, "ladder operators need the unfiltered basis");
  const Term t{1.0, 0.0, {{dof, create}}};
  return build_operator(full_basis, std::span<const Term>(&t, 1));
}

inline SparseMatrix anticommutator(const SparseMatrix &a, const SparseMatrix &b) {
  return SparseMatrix(a * b + b * a);
}

inline SparseMatrix commutator(const SparseMatrix &a, const SparseMatrix &b) {
  return SparseMatrix(a * b - b * a);
}

} // namespace zblab
