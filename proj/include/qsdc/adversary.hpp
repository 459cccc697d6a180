// adversary.hpp
// Attack strategies on the quantum channel legs: intercept-resend with a
// guessed basis, entangle-and-measure with an explicit 16-dim probe unitary,
// and man-in-the-middle impersonation of a detection-round participant.

#pragma once

#include <cmath>
#include <optional>
#include <stdexcept>
#include <string_view>
#include <vector>

#include "qsdc/grover.hpp"
#include "qsdc/qudit.hpp"

namespace qsdc {

enum class AttackKind { None, InterceptResend, EntangleMeasure, Impersonate };

struct AttackSpec {
  AttackKind kind = AttackKind::None;
  int leg = 0;                     // quantum leg the attack acts on: 1 or 2
  std::optional<UnitaryOp> probe;  // EntangleMeasure only; validated 16×16

  bool active_on(int which_leg) const {
    return kind != AttackKind::None && leg == which_leg;
  }

  void validate() const {
    if (kind == AttackKind::None) return;
    if (leg != 1 && leg != 2)
      throw std::invalid_argument("AttackSpec: leg must be 1 or 2");
    if (kind == AttackKind::EntangleMeasure) {
      if (!probe) throw std::invalid_argument("AttackSpec: entangle attack needs a probe");
      if (probe->dim() != kCompositeDim || !probe->is_unitary())
        throw std::invalid_argument("AttackSpec: probe must be a 16-dim unitary");
    }
  }
};

// Per-slot record of what Eve saw or still holds.
struct EveRecord {
  std::optional<Symbol> outcome;
  std::optional<Basis> basis;
  std::optional<StateVec> ancilla;  // residual after the legitimate measurement
};

struct EveTranscript {
  std::vector<EveRecord> records;
};

// Built-in probes --------------------------------------------------------

inline UnitaryOp probe_identity() { return UnitaryOp::identity(kCompositeDim); }

// |j⟩|a⟩ → |j⟩|a + j mod 4⟩: records the carrier's Z value in the ancilla.
inline UnitaryOp probe_controlled_shift() {
  std::vector<cx> m(kCompositeDim * kCompositeDim, cx{0.0, 0.0});
  for (int j = 0; j < kDim; ++j)
    for (int a = 0; a < kDim; ++a)
      m[(j * kDim + (a + j) % kDim) * kCompositeDim + (j * kDim + a)] = cx{1.0, 0.0};
  return UnitaryOp(kCompositeDim, std::move(m));
}

inline std::optional<UnitaryOp> probe_by_name(std::string_view name) {
  if (name == "identity") return probe_identity();
  if (name == "controlled_shift") return probe_controlled_shift();
  return std::nullopt;
}

// Attack primitives ------------------------------------------------------

struct InterceptResult {
  StateVec resent;
  Symbol eve_outcome;
  Basis eve_basis;
};

// Eve picks Z or X uniformly, measures, and forwards the collapsed eigenstate.
inline InterceptResult intercept_resend(const StateVec& slot, RandomStream& rng) {
  if (slot.dim() != kDim)
    throw std::domain_error("intercept_resend: single-qudit slot required");
  const Basis guess = uniform_basis(rng);
  const Measurement m = measure(slot, guess, rng);
  return {m.collapsed, m.outcome, guess};
}

// U_e · (slot ⊗ |0⟩); the carrier factor travels on, entangled with the
// ancilla Eve keeps. The fiducial ancilla state is fixed to |0⟩.
inline StateVec entangle_probe(const StateVec& slot, const UnitaryOp& probe) {
  if (slot.dim() != kDim || probe.dim() != kCompositeDim)
    throw std::domain_error("entangle_probe: dimension mismatch");
  return apply(probe, tensor(slot, make_z_state(Symbol(0))));
}

struct DecoyQber {
  double z;
  double x;
};

// Exact (projection, no sampling) error probability a legitimate measurement
// sees on each decoy basis after the probe, averaged over decoy values.
inline DecoyQber decoy_qber_under_probe(const UnitaryOp& probe) {
  if (probe.dim() != kCompositeDim)
    throw std::domain_error("decoy_qber_under_probe: 16-dim probe required");

  const auto correct_probability = [&](Basis b, int value) {
    const StateVec joint = entangle_probe(basis_vector(b, Symbol(value)), probe);
    const StateVec bk = basis_vector(b, Symbol(value));
    double p = 0.0;
    for (int a = 0; a < kDim; ++a) {
      cx acc{0.0, 0.0};
      for (int c = 0; c < kDim; ++c) acc += std::conj(bk[c]) * joint[c * kDim + a];
      p += std::norm(acc);
    }
    return p;
  };

  DecoyQber q{0.0, 0.0};
  for (int v = 0; v < kDim; ++v) {
    q.z += 1.0 - correct_probability(Basis::Z, v);
    q.x += 1.0 - correct_probability(Basis::X, v);
  }
  q.z /= kDim;
  q.x /= kDim;
  return q;
}

struct ProbeFidelity {
  double fidelity;  // probability the decoded Z measurement yields w_A
  double error;     // 1 − fidelity
};

// Fidelity of the decoded carrier against |w_A⟩ when the probe acted on the
// encoded carrier in transit: builds U_e·((U_{w_A} U_{w_C} |S⟩) ⊗ |0⟩),
// applies the authorized decoding to the carrier factor, and projects.
inline ProbeFidelity probe_fidelity(const UnitaryOp& probe, InitialStateId id,
                                    Symbol w_a, Symbol w_c) {
  if (probe.dim() != kCompositeDim)
    throw std::domain_error("probe_fidelity: 16-dim probe required");

  StateVec carrier = apply(oracle(w_c), initial_state(id));
  carrier = apply(oracle(w_a), carrier);
  StateVec joint = apply(probe, tensor(carrier, make_z_state(Symbol(0))));
  joint = apply_to_carrier(oracle(w_c), joint);
  joint = apply_to_carrier(diffusion(id), joint);

  double f = 0.0;
  for (int a = 0; a < kDim; ++a) f += std::norm(joint[w_a.value() * kDim + a]);
  return {f, 1.0 - f};
}

struct ImpersonationEstimate {
  double per_decoy_pass;
  long trials;

  double detection_probability(int k) const {
    return 1.0 - std::pow(per_decoy_pass, k);
  }
};

// Eve answers a detection round without knowing the preparation bases: she
// guesses a basis per decoy, measures, and reports the outcome digit. Leg 1
// decoys follow an identity-sequence basis rule; leg 2 decoys use uniformly
// random bases. Both hide the basis from Eve, so the statistics agree.
inline ImpersonationEstimate impersonate_detection(int leg, long trials,
                                                   RandomStream& rng) {
  if (leg != 1 && leg != 2)
    throw std::domain_error("impersonate_detection: leg must be 1 or 2");
  if (trials < 1) throw std::domain_error("impersonate_detection: trials >= 1");

  long passes = 0;
  for (long t = 0; t < trials; ++t) {
    Basis prepared;
    if (leg == 1) {
      const int identity_entry = rng.uniform_int(kDim);
      prepared = identity_entry % 2 == 0 ? Basis::Z : Basis::X;
    } else {
      prepared = uniform_basis(rng);
    }
    const Symbol value = uniform_symbol(rng);
    const StateVec slot = basis_vector(prepared, value);

    const Basis guess = uniform_basis(rng);
    const Measurement m = measure(slot, guess, rng);
    if (m.outcome == value) ++passes;
  }
  return {static_cast<double>(passes) / static_cast<double>(trials), trials};
}

}  // namespace qsdc
