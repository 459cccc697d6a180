// grover.hpp
// The sixteen symmetric initial states, the phase-flip oracle and the
// inversion-about-the-mean diffusion operator, the deterministic decoding
// sequence, and its exhaustive verification over all 256 input triples.

#pragma once

#include <array>
#include <map>
#include <string>
#include <vector>

#include "qsdc/qudit.hpp"

namespace qsdc {

// Index into the 16-row table of symmetric initial states.
class InitialStateId {
 public:
  static constexpr int kCount = 16;

  explicit InitialStateId(int id) : id_(id) {
    if (id < 0 || id >= kCount)
      throw std::domain_error("InitialStateId: id out of range");
  }
  int value() const { return id_; }
  friend bool operator==(const InitialStateId&, const InitialStateId&) = default;

 private:
  int id_;
};

// Row m, column j holds 2·(amplitude of |j⟩ in the m-th initial state); every
// entry is one of {+1, −1, +i, −i}. Kept as literal data, not generated.
using PhaseTable = std::array<std::array<cx, kDim>, InitialStateId::kCount>;

inline const PhaseTable& phase_table() {
  static const PhaseTable table = [] {
    const cx one{1.0, 0.0}, neg{-1.0, 0.0}, im{0.0, 1.0}, neg_im{0.0, -1.0};
    return PhaseTable{{
        {{one, one, one, one}},
        {{one, neg, one, neg}},
        {{one, im, one, im}},
        {{one, neg_im, one, neg_im}},
        {{one, one, neg, neg}},
        {{one, neg, neg, one}},
        {{one, im, neg, neg_im}},
        {{one, neg_im, neg, im}},
        {{one, one, im, im}},
        {{one, neg, im, neg_im}},
        {{one, im, im, neg}},
        {{one, neg_im, im, one}},
        {{one, one, neg_im, neg_im}},
        {{one, neg, neg_im, im}},
        {{one, im, neg_im, one}},
        {{one, neg_im, neg_im, neg}},
    }};
  }();
  return table;
}

inline StateVec initial_state(InitialStateId id, const PhaseTable& table) {
  std::vector<cx> amps(kDim);
  for (int j = 0; j < kDim; ++j) amps[j] = 0.5 * table[id.value()][j];
  return StateVec(kDim, std::move(amps));
}

inline StateVec initial_state(InitialStateId id) {
  return initial_state(id, phase_table());
}

// U_w = I − 2|w⟩⟨w|: diagonal, −1 at w, +1 elsewhere. Involutory.
inline UnitaryOp oracle(Symbol w) {
  std::vector<cx> m(kDim * kDim, cx{0.0, 0.0});
  for (int i = 0; i < kDim; ++i)
    m[i * kDim + i] = i == w.value() ? cx{-1.0, 0.0} : cx{1.0, 0.0};
  return UnitaryOp(kDim, std::move(m));
}

// U_S = 2|S⟩⟨S| − I for the given initial state.
inline UnitaryOp diffusion_about(const StateVec& s) {
  if (s.dim() != kDim) throw std::domain_error("diffusion_about: single-qudit state required");
  std::vector<cx> m(kDim * kDim);
  for (int r = 0; r < kDim; ++r)
    for (int c = 0; c < kDim; ++c) {
      cx e = 2.0 * s[r] * std::conj(s[c]);
      if (r == c) e -= 1.0;
      m[r * kDim + c] = e;
    }
  return UnitaryOp(kDim, std::move(m));
}

inline UnitaryOp diffusion(InitialStateId id, const PhaseTable& table) {
  return diffusion_about(initial_state(id, table));
}

inline UnitaryOp diffusion(InitialStateId id) {
  return diffusion(id, phase_table());
}

// U_S · U_{w_C} · U_{w_A} · U_{w_C} applied to an arbitrary symmetric state.
// Decodes to |w_A⟩ up to a global phase whenever every amplitude of s has
// modulus 1/2.
inline StateVec decode_sequence(const StateVec& s, Symbol w_a, Symbol w_c) {
  StateVec psi = apply(oracle(w_c), s);
  psi = apply(oracle(w_a), psi);
  psi = apply(oracle(w_c), psi);
  return apply(diffusion_about(s), psi);
}

inline StateVec decode_sequence(InitialStateId id, Symbol w_a, Symbol w_c,
                                const PhaseTable& table) {
  return decode_sequence(initial_state(id, table), w_a, w_c);
}

inline StateVec decode_sequence(InitialStateId id, Symbol w_a, Symbol w_c) {
  return decode_sequence(id, w_a, w_c, phase_table());
}

// Classifies a unit-modulus phase as one of the fourth roots of unity.
// Returns "" when the phase is not within tol of any of them.
inline std::string phase_label(cx phase, double tol = 1e-9) {
  static const std::array<std::pair<cx, const char*>, 4> roots = {{
      {cx{1.0, 0.0}, "+1"},
      {cx{-1.0, 0.0}, "-1"},
      {cx{0.0, 1.0}, "+i"},
      {cx{0.0, -1.0}, "-i"},
  }};
  for (const auto& [root, label] : roots)
    if (std::abs(phase - root) <= tol) return label;
  return "";
}

struct TheoremFailure {
  int id;
  int w_a;
  int w_c;
  std::string reason;
};

struct TheoremReport {
  int total = 0;
  int passed = 0;
  std::vector<TheoremFailure> failures;
  std::map<std::string, int> phase_histogram;

  bool all_passed() const { return passed == total && failures.empty(); }
};

// Runs the decoding sequence for every (initial state, w_A, w_C) triple and
// checks that the result is |w_A⟩ up to a global phase in {±1, ±i}.
inline TheoremReport verify_theorem_exhaustive(const PhaseTable& table) {
  TheoremReport report;
  for (int id = 0; id < InitialStateId::kCount; ++id) {
    for (int wa = 0; wa < kDim; ++wa) {
      for (int wc = 0; wc < kDim; ++wc) {
        ++report.total;
        const StateVec out =
            decode_sequence(InitialStateId(id), Symbol(wa), Symbol(wc), table);
        const PhaseMatch match =
            equal_up_to_global_phase(out, make_z_state(Symbol(wa)), kNormTol);
        if (!match.equal) {
          report.failures.push_back({id, wa, wc, "result is not the target state"});
          continue;
        }
        const std::string label = phase_label(match.phase);
        if (label.empty()) {
          report.failures.push_back({id, wa, wc, "global phase outside {+1,-1,+i,-i}"});
          continue;
        }
        ++report.passed;
        ++report.phase_histogram[label];
      }
    }
  }
  return report;
}

inline TheoremReport verify_theorem_exhaustive() {
  return verify_theorem_exhaustive(phase_table());
}

// U_{w_C} · U_{w_A} · U_{w_C} = U_{w_A} entrywise, exactly: all entries are
// integer-valued so floating-point comparison is exact.
inline bool verify_corollary() {
  for (int wa = 0; wa < kDim; ++wa) {
    for (int wc = 0; wc < kDim; ++wc) {
      const UnitaryOp composed =
          matmul(oracle(Symbol(wc)), matmul(oracle(Symbol(wa)), oracle(Symbol(wc))));
      const UnitaryOp direct = oracle(Symbol(wa));
      for (int r = 0; r < kDim; ++r)
        for (int c = 0; c < kDim; ++c)
          if (composed.at(r, c) != direct.at(r, c)) return false;
    }
  }
  return true;
}

}  // namespace qsdc
