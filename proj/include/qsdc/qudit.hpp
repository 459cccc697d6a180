// qudit.hpp
// Exact complex linear algebra for 4-dimensional qudits and qudit ⊗ ancilla
// composites: state construction, unitary application, projective measurement
// in the Z and X bases, and phase-aware state comparison.

#pragma once

#include <array>
#include <cmath>
#include <complex>
#include <numbers>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "qsdc/rng.hpp"

namespace qsdc {

using cx = std::complex<double>;

inline constexpr int kDim = 4;            // single-qudit dimension
inline constexpr int kCompositeDim = 16;  // qudit ⊗ ancilla

// Tolerances: exact constructions stay within 1e-12; user-supplied matrices
// are accepted as unitary within 1e-10.
inline constexpr double kNormTol = 1e-12;
inline constexpr double kUnitaryTol = 1e-10;

// A message/license digit or measurement outcome: an integer in {0,1,2,3}.
class Symbol {
 public:
  explicit Symbol(int value) : value_(value) {
    if (value < 0 || value >= kDim)
      throw std::domain_error("Symbol: value out of range");
  }
  int value() const { return value_; }
  friend bool operator==(const Symbol&, const Symbol&) = default;

 private:
  int value_;
};

inline Symbol uniform_symbol(RandomStream& rng) {
  return Symbol(rng.uniform_int(kDim));
}

// Z = computational basis; X = its Fourier conjugate with ω = i.
enum class Basis { Z, X };

inline Basis uniform_basis(RandomStream& rng) {
  return rng.uniform_int(2) == 0 ? Basis::Z : Basis::X;
}

// i^k, exact.
inline cx omega_power(int k) {
  switch (((k % 4) + 4) % 4) {
    case 0: return {1.0, 0.0};
    case 1: return {0.0, 1.0};
    case 2: return {-1.0, 0.0};
    default: return {0.0, -1.0};
  }
}

// A pure state as a dense amplitude vector. Immutable after construction;
// every entry must be finite.
class StateVec {
 public:
  StateVec(int dim, std::vector<cx> amps) : amps_(std::move(amps)) {
    if (dim < 1 || static_cast<std::size_t>(dim) != amps_.size())
      throw std::domain_error("StateVec: dimension/amplitude count mismatch");
    for (const cx& a : amps_) {
      if (!std::isfinite(a.real()) || !std::isfinite(a.imag()))
        throw std::domain_error("StateVec: non-finite amplitude");
    }
  }

  static StateVec basis_state(int dim, int index) {
    if (index < 0 || index >= dim)
      throw std::domain_error("StateVec: basis index out of range");
    std::vector<cx> amps(dim, cx{0.0, 0.0});
    amps[index] = cx{1.0, 0.0};
    return StateVec(dim, std::move(amps));
  }

  int dim() const { return static_cast<int>(amps_.size()); }
  const std::vector<cx>& amps() const { return amps_; }
  cx operator[](int i) const { return amps_[i]; }

  double norm_sq() const {
    double n = 0.0;
    for (const cx& a : amps_) n += std::norm(a);
    return n;
  }

  bool is_normalized(double tol = kNormTol) const {
    return std::abs(norm_sq() - 1.0) <= tol;
  }

  StateVec normalized() const {
    const double n = std::sqrt(norm_sq());
    if (n <= 0.0) throw std::domain_error("StateVec: cannot normalize zero vector");
    std::vector<cx> amps(amps_);
    for (cx& a : amps) a /= n;
    return StateVec(dim(), std::move(amps));
  }

 private:
  std::vector<cx> amps_;
};

inline StateVec make_z_state(Symbol j) {
  return StateVec::basis_state(kDim, j.value());
}

// |X_k⟩ = (1/2) Σ_j i^{jk} |j⟩
inline StateVec make_x_state(Symbol k) {
  std::vector<cx> amps(kDim);
  for (int j = 0; j < kDim; ++j) amps[j] = 0.5 * omega_power(j * k.value());
  return StateVec(kDim, std::move(amps));
}

inline StateVec basis_vector(Basis b, Symbol k) {
  return b == Basis::Z ? make_z_state(k) : make_x_state(k);
}

// ⟨a|b⟩
inline cx inner(const StateVec& a, const StateVec& b) {
  if (a.dim() != b.dim()) throw std::domain_error("inner: dimension mismatch");
  cx acc{0.0, 0.0};
  for (int i = 0; i < a.dim(); ++i) acc += std::conj(a[i]) * b[i];
  return acc;
}

namespace detail {

inline void require_normalized(const StateVec& psi, const char* who) {
  if (!psi.is_normalized(1e-9))
    throw std::domain_error(std::string(who) + ": state not normalized");
}

}  // namespace detail

// |⟨φ|ψ⟩|²
inline double fidelity(const StateVec& psi, const StateVec& phi) {
  if (psi.dim() != phi.dim())
    throw std::domain_error("fidelity: dimension mismatch");
  detail::require_normalized(psi, "fidelity");
  detail::require_normalized(phi, "fidelity");
  return std::norm(inner(phi, psi));
}

// ψ ⊗ χ, carrier-major: index = (carrier index)·dim(χ) + ancilla index.
inline StateVec tensor(const StateVec& psi, const StateVec& chi) {
  std::vector<cx> amps(static_cast<std::size_t>(psi.dim()) * chi.dim());
  for (int i = 0; i < psi.dim(); ++i)
    for (int j = 0; j < chi.dim(); ++j) amps[i * chi.dim() + j] = psi[i] * chi[j];
  return StateVec(psi.dim() * chi.dim(), std::move(amps));
}

struct PhaseMatch {
  bool equal;
  cx phase;  // meaningful only when equal
};

// True iff ψ = c·φ entrywise within tol for some unit-modulus c. The phase is
// read off the largest-modulus entry of φ.
inline PhaseMatch equal_up_to_global_phase(const StateVec& psi,
                                           const StateVec& phi, double tol) {
  if (psi.dim() != phi.dim())
    throw std::domain_error("equal_up_to_global_phase: dimension mismatch");
  if (psi.norm_sq() < 1e-24 || phi.norm_sq() < 1e-24)
    throw std::domain_error("equal_up_to_global_phase: zero vector input");

  int m = 0;
  for (int i = 1; i < phi.dim(); ++i)
    if (std::abs(phi[i]) > std::abs(phi[m])) m = i;

  const cx raw = psi[m] / phi[m];
  if (std::abs(raw) < 1e-12) return {false, cx{0.0, 0.0}};
  const cx c = raw / std::abs(raw);

  for (int i = 0; i < phi.dim(); ++i)
    if (std::abs(psi[i] - c * phi[i]) > tol) return {false, cx{0.0, 0.0}};
  return {true, c};
}

// A dim × dim operator, row-major.
class UnitaryOp {
 public:
  UnitaryOp(int dim, std::vector<cx> entries)
      : dim_(dim), entries_(std::move(entries)) {
    if (dim < 1 ||
        entries_.size() != static_cast<std::size_t>(dim) * static_cast<std::size_t>(dim))
      throw std::domain_error("UnitaryOp: dimension/entry count mismatch");
    for (const cx& e : entries_) {
      if (!std::isfinite(e.real()) || !std::isfinite(e.imag()))
        throw std::domain_error("UnitaryOp: non-finite entry");
    }
  }

  static UnitaryOp identity(int dim) {
    std::vector<cx> m(static_cast<std::size_t>(dim) * dim, cx{0.0, 0.0});
    for (int i = 0; i < dim; ++i) m[static_cast<std::size_t>(i) * dim + i] = cx{1.0, 0.0};
    return UnitaryOp(dim, std::move(m));
  }

  int dim() const { return dim_; }
  cx at(int r, int c) const { return entries_[static_cast<std::size_t>(r) * dim_ + c]; }
  const std::vector<cx>& entries() const { return entries_; }

  UnitaryOp dagger() const {
    std::vector<cx> m(entries_.size());
    for (int r = 0; r < dim_; ++r)
      for (int c = 0; c < dim_; ++c)
        m[static_cast<std::size_t>(c) * dim_ + r] = std::conj(at(r, c));
    return UnitaryOp(dim_, std::move(m));
  }

  // U†U = I entrywise within tol.
  bool is_unitary(double tol = kUnitaryTol) const {
    for (int r = 0; r < dim_; ++r) {
      for (int c = 0; c < dim_; ++c) {
        cx acc{0.0, 0.0};
        for (int k = 0; k < dim_; ++k) acc += std::conj(at(k, r)) * at(k, c);
        const cx want = r == c ? cx{1.0, 0.0} : cx{0.0, 0.0};
        if (std::abs(acc - want) > tol) return false;
      }
    }
    return true;
  }

 private:
  int dim_;
  std::vector<cx> entries_;
};

inline StateVec apply(const UnitaryOp& u, const StateVec& psi) {
  if (u.dim() != psi.dim()) throw std::domain_error("apply: dimension mismatch");
  std::vector<cx> out(psi.dim(), cx{0.0, 0.0});
  for (int r = 0; r < u.dim(); ++r) {
    cx acc{0.0, 0.0};
    for (int c = 0; c < u.dim(); ++c) acc += u.at(r, c) * psi[c];
    out[r] = acc;
  }
  return StateVec(psi.dim(), std::move(out));
}

inline UnitaryOp matmul(const UnitaryOp& a, const UnitaryOp& b) {
  if (a.dim() != b.dim()) throw std::domain_error("matmul: dimension mismatch");
  const int d = a.dim();
  std::vector<cx> m(static_cast<std::size_t>(d) * d, cx{0.0, 0.0});
  for (int r = 0; r < d; ++r)
    for (int k = 0; k < d; ++k) {
      const cx ark = a.at(r, k);
      if (ark == cx{0.0, 0.0}) continue;
      for (int c = 0; c < d; ++c) m[static_cast<std::size_t>(r) * d + c] += ark * b.at(k, c);
    }
  return UnitaryOp(d, std::move(m));
}

// Entry ((ar,br),(ac,bc)) = a[ar,ac] · b[br,bc], carrier-major.
inline UnitaryOp tensor(const UnitaryOp& a, const UnitaryOp& b) {
  const int d = a.dim() * b.dim();
  std::vector<cx> m(static_cast<std::size_t>(d) * d);
  for (int ar = 0; ar < a.dim(); ++ar)
    for (int br = 0; br < b.dim(); ++br)
      for (int ac = 0; ac < a.dim(); ++ac)
        for (int bc = 0; bc < b.dim(); ++bc)
          m[static_cast<std::size_t>(ar * b.dim() + br) * d + (ac * b.dim() + bc)] =
              a.at(ar, ac) * b.at(br, bc);
  return UnitaryOp(d, std::move(m));
}

// U₄ acting on the carrier factor of a 16-dim composite (carrier-major).
inline StateVec apply_to_carrier(const UnitaryOp& u4, const StateVec& composite) {
  if (u4.dim() != kDim || composite.dim() != kCompositeDim)
    throw std::domain_error("apply_to_carrier: dimension mismatch");
  std::vector<cx> out(kCompositeDim, cx{0.0, 0.0});
  for (int a = 0; a < kDim; ++a)
    for (int r = 0; r < kDim; ++r) {
      cx acc{0.0, 0.0};
      for (int c = 0; c < kDim; ++c) acc += u4.at(r, c) * composite[c * kDim + a];
      out[r * kDim + a] = acc;
    }
  return StateVec(kCompositeDim, std::move(out));
}

namespace detail {

inline const std::array<StateVec, kDim>& x_basis() {
  static const std::array<StateVec, kDim> basis = {
      make_x_state(Symbol(0)), make_x_state(Symbol(1)), make_x_state(Symbol(2)),
      make_x_state(Symbol(3))};
  return basis;
}

inline int sample_index(const double* p, int n, RandomStream& rng) {
  double total = 0.0;
  for (int i = 0; i < n; ++i) total += p[i];
  const double r = rng.next_double() * total;
  double cum = 0.0;
  int last_positive = -1;
  for (int i = 0; i < n; ++i) {
    if (p[i] <= 0.0) continue;
    last_positive = i;
    cum += p[i];
    if (r < cum) return i;
  }
  if (last_positive < 0)
    throw std::logic_error("sample_index: no positive-probability branch");
  return last_positive;
}

}  // namespace detail

struct Measurement {
  Symbol outcome;
  StateVec collapsed;
};

// Projective measurement of a single qudit in basis b with Born sampling.
inline Measurement measure(const StateVec& psi, Basis b, RandomStream& rng) {
  if (psi.dim() != kDim) throw std::domain_error("measure: single-qudit state required");
  detail::require_normalized(psi, "measure");
  double p[kDim];
  if (b == Basis::Z) {
    for (int k = 0; k < kDim; ++k) p[k] = std::norm(psi[k]);
  } else {
    for (int k = 0; k < kDim; ++k) p[k] = std::norm(inner(detail::x_basis()[k], psi));
  }
  const int k = detail::sample_index(p, kDim, rng);
  return {Symbol(k), basis_vector(b, Symbol(k))};
}

struct SubsystemMeasurement {
  Symbol outcome;
  StateVec ancilla;  // renormalized post-measurement ancilla state
};

// Measures the carrier factor of a 16-dim composite in basis b.
inline SubsystemMeasurement measure_subsystem(const StateVec& composite, Basis b,
                                              RandomStream& rng) {
  if (composite.dim() != kCompositeDim)
    throw std::domain_error("measure_subsystem: composite state required");
  detail::require_normalized(composite, "measure_subsystem");

  // Unnormalized ancilla branch for outcome k: χ_k[a] = Σ_c conj(b_k[c]) Ψ[c·4+a]
  std::array<std::array<cx, kDim>, kDim> branch{};
  double p[kDim];
  for (int k = 0; k < kDim; ++k) {
    const StateVec bk = basis_vector(b, Symbol(k));
    double pk = 0.0;
    for (int a = 0; a < kDim; ++a) {
      cx acc{0.0, 0.0};
      for (int c = 0; c < kDim; ++c) acc += std::conj(bk[c]) * composite[c * kDim + a];
      branch[k][a] = acc;
      pk += std::norm(acc);
    }
    p[k] = pk;
  }

  const int k = detail::sample_index(p, kDim, rng);
  if (p[k] <= 0.0)
    throw std::logic_error("measure_subsystem: zero-probability branch");
  const double inv = 1.0 / std::sqrt(p[k]);
  std::vector<cx> anc(kDim);
  for (int a = 0; a < kDim; ++a) anc[a] = branch[k][a] * inv;
  return {Symbol(k), StateVec(kDim, std::move(anc))};
}

namespace detail {

inline double gaussian(RandomStream& rng) {
  const double u1 = 1.0 - rng.next_double();  // (0, 1]
  const double u2 = rng.next_double();
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

}  // namespace detail

// Haar-ish random unitary: complex Gaussian matrix, Gram-Schmidt the columns.
inline UnitaryOp random_unitary(int dim, RandomStream& rng) {
  std::vector<std::vector<cx>> cols(dim, std::vector<cx>(dim));
  for (auto& col : cols)
    for (cx& e : col) e = cx{detail::gaussian(rng), detail::gaussian(rng)};

  for (int c = 0; c < dim; ++c) {
    for (int pass = 0; pass < 2; ++pass) {  // re-orthogonalize for stability
      for (int prev = 0; prev < c; ++prev) {
        cx proj{0.0, 0.0};
        for (int r = 0; r < dim; ++r) proj += std::conj(cols[prev][r]) * cols[c][r];
        for (int r = 0; r < dim; ++r) cols[c][r] -= proj * cols[prev][r];
      }
    }
    double n = 0.0;
    for (int r = 0; r < dim; ++r) n += std::norm(cols[c][r]);
    const double inv = 1.0 / std::sqrt(n);
    for (int r = 0; r < dim; ++r) cols[c][r] *= inv;
  }

  std::vector<cx> m(static_cast<std::size_t>(dim) * dim);
  for (int r = 0; r < dim; ++r)
    for (int c = 0; c < dim; ++c) m[static_cast<std::size_t>(r) * dim + c] = cols[c][r];
  return UnitaryOp(dim, std::move(m));
}

}  // namespace qsdc
