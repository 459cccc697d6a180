// protocol.hpp
// The six-step three-party session: carrier preparation and license encoding
// by the controller, decoy interleaving, two detection rounds with QBER
// gates, message encoding by the sender, authorization release, and
// deterministic decoding by the receiver.

#pragma once

#include <algorithm>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "qsdc/adversary.hpp"
#include "qsdc/grover.hpp"
#include "qsdc/qudit.hpp"

namespace qsdc {

using IdentitySequence = std::vector<Symbol>;  // nonempty, cycled when short
using LicenseKey = std::vector<Symbol>;        // one digit per carrier
using Message = std::vector<Symbol>;           // one digit per carrier

struct DecoyRecord {
  std::size_t position;  // index into the interleaved frame
  Basis basis;
  Symbol value;
};

// Ordered photon slots as seen on the channel. A slot is a 4-dim state, or a
// 16-dim carrier ⊗ ancilla composite after an entangling attack; the channel
// carries only states, never roles.
struct TransmissionFrame {
  std::vector<StateVec> slots;

  std::size_t size() const { return slots.size(); }
};

struct SessionSecrets {
  std::vector<InitialStateId> initial_ids;
  LicenseKey license;
  std::vector<DecoyRecord> decoys;
};

struct EfficiencyCounters {
  long q_t = 0;   // qudits spent: carriers + both legs' decoys
  long b_s = 0;   // secret classical bits carried: 2 per carrier
  double eta = 0.0;
};

struct RunReport {
  double leg1_qber = 0.0;
  double leg2_qber = 0.0;
  std::optional<std::string> aborted_at;  // "step2" or "step4"
  std::optional<Message> recovered;       // present iff not aborted
  EfficiencyCounters counters;
};

struct ProtocolConfig {
  int carriers = 0;       // N
  int decoys_leg1 = -1;   // negative means "same as N"
  int decoys_leg2 = -1;
  double qber_threshold = 0.05;
  std::uint64_t seed = 0;
  AttackSpec attack;
  std::optional<Message> message;         // random when absent
  std::optional<IdentitySequence> id_c;   // pre-shared; random when absent
  std::optional<IdentitySequence> id_b;
  bool bind_leg2_decoys_to_identity = false;

  int k1() const { return decoys_leg1 < 0 ? carriers : decoys_leg1; }
  int k2() const { return decoys_leg2 < 0 ? carriers : decoys_leg2; }

  void validate() const {
    if (carriers < 1) throw std::invalid_argument("config: N >= 1 required");
    if (qber_threshold < 0.0 || qber_threshold > 1.0)
      throw std::invalid_argument("config: qber_threshold in [0,1] required");
    if (message && static_cast<int>(message->size()) != carriers)
      throw std::invalid_argument("config: message length must equal N");
    if (id_c && id_c->empty())
      throw std::invalid_argument("config: id_c must be nonempty");
    if (id_b && id_b->empty())
      throw std::invalid_argument("config: id_b must be nonempty");
    attack.validate();
  }
};

// Slot-local operations: act on the carrier factor when the slot is a
// composite, on the slot itself otherwise.

inline StateVec apply_local(const UnitaryOp& u4, const StateVec& slot) {
  return slot.dim() == kCompositeDim ? apply_to_carrier(u4, slot) : apply(u4, slot);
}

struct LocalMeasurement {
  Symbol outcome;
  std::optional<StateVec> residual_ancilla;  // set for composite slots
};

inline LocalMeasurement measure_local(const StateVec& slot, Basis b,
                                      RandomStream& rng) {
  if (slot.dim() == kCompositeDim) {
    SubsystemMeasurement m = measure_subsystem(slot, b, rng);
    return {m.outcome, std::move(m.ancilla)};
  }
  return {measure(slot, b, rng).outcome, std::nullopt};
}

// Decoy interleaving -----------------------------------------------------

struct DecoyInsertion {
  TransmissionFrame frame;
  std::vector<DecoyRecord> decoys;
};

// Inserts k decoys at uniformly random positions. With an identity sequence
// the i-th decoy's basis follows entry i (cycled, entry mod 2: even → Z,
// odd → X); without one, bases are uniformly random. Values are uniform.
inline DecoyInsertion insert_decoys(const TransmissionFrame& carriers, int k,
                                    const IdentitySequence* identity,
                                    RandomStream& rng) {
  if (k < 0) throw std::domain_error("insert_decoys: k >= 0 required");
  if (identity && identity->empty())
    throw std::domain_error("insert_decoys: empty identity sequence");

  const std::size_t total = carriers.size() + static_cast<std::size_t>(k);
  std::vector<std::size_t> order(total);
  for (std::size_t i = 0; i < total; ++i) order[i] = i;
  for (std::size_t i = total; i > 1; --i) {  // Fisher-Yates
    const auto j = static_cast<std::size_t>(rng.uniform_int(static_cast<int>(i)));
    std::swap(order[i - 1], order[j]);
  }
  std::vector<std::size_t> positions(order.begin(), order.begin() + k);
  std::sort(positions.begin(), positions.end());

  std::vector<DecoyRecord> decoys;
  decoys.reserve(k);
  for (int i = 0; i < k; ++i) {
    Basis basis;
    if (identity) {
      const Symbol entry = (*identity)[static_cast<std::size_t>(i) % identity->size()];
      basis = entry.value() % 2 == 0 ? Basis::Z : Basis::X;
    } else {
      basis = uniform_basis(rng);
    }
    decoys.push_back({positions[i], basis, uniform_symbol(rng)});
  }

  DecoyInsertion out;
  out.frame.slots.reserve(total);
  std::size_t next_decoy = 0, next_carrier = 0;
  for (std::size_t pos = 0; pos < total; ++pos) {
    if (next_decoy < decoys.size() && decoys[next_decoy].position == pos) {
      const DecoyRecord& d = decoys[next_decoy++];
      out.frame.slots.push_back(basis_vector(d.basis, d.value));
    } else {
      out.frame.slots.push_back(carriers.slots[next_carrier++]);
    }
  }
  out.decoys = std::move(decoys);
  return out;
}

// Step 1 ------------------------------------------------------------------

struct PreparedLeg {
  TransmissionFrame frame;
  SessionSecrets secrets;
};

// Charlie draws N carriers uniformly from the 16 initial states, encodes each
// with his license digit, and interleaves k identity-keyed decoys.
inline PreparedLeg charlie_prepare(int carriers, int decoys,
                                   const IdentitySequence& id_c,
                                   RandomStream& rng) {
  if (carriers < 1) throw std::domain_error("charlie_prepare: N >= 1 required");
  if (decoys > 0 && id_c.empty())
    throw std::domain_error("charlie_prepare: empty identity sequence");

  PreparedLeg leg;
  TransmissionFrame bare;
  bare.slots.reserve(carriers);
  for (int j = 0; j < carriers; ++j) {
    const InitialStateId id(rng.uniform_int(InitialStateId::kCount));
    const Symbol w_c = uniform_symbol(rng);
    leg.secrets.initial_ids.push_back(id);
    leg.secrets.license.push_back(w_c);
    bare.slots.push_back(apply(oracle(w_c), initial_state(id)));
  }

  DecoyInsertion inserted = insert_decoys(bare, decoys, &id_c, rng);
  leg.frame = std::move(inserted.frame);
  leg.secrets.decoys = std::move(inserted.decoys);
  return leg;
}

// Step 2 / Step 4 ---------------------------------------------------------

struct DetectionResult {
  double qber;
  TransmissionFrame stripped;  // carriers in original order
};

namespace detail {

inline TransmissionFrame strip_decoys(const TransmissionFrame& frame,
                                      const std::vector<DecoyRecord>& meta) {
  std::vector<bool> is_decoy(frame.size(), false);
  for (const DecoyRecord& d : meta) {
    if (d.position >= frame.size() || is_decoy[d.position])
      throw std::domain_error("detection_round: invalid decoy position");
    is_decoy[d.position] = true;
  }
  TransmissionFrame stripped;
  stripped.slots.reserve(frame.size() - meta.size());
  for (std::size_t i = 0; i < frame.size(); ++i)
    if (!is_decoy[i]) stripped.slots.push_back(frame.slots[i]);
  return stripped;
}

}  // namespace detail

// Measures each decoy in its declared basis, records the outcome digit, and
// compares against the preparation record. QBER is the exact mismatch
// fraction over the decoys; aborting on it is the caller's decision.
inline DetectionResult detection_round(const TransmissionFrame& frame,
                                       const std::vector<DecoyRecord>& meta,
                                       RandomStream& rng) {
  TransmissionFrame stripped = detail::strip_decoys(frame, meta);
  long mismatches = 0;
  for (const DecoyRecord& d : meta) {
    const LocalMeasurement m = measure_local(frame.slots[d.position], d.basis, rng);
    if (!(m.outcome == d.value)) ++mismatches;
  }
  const double qber =
      meta.empty() ? 0.0 : static_cast<double>(mismatches) / static_cast<double>(meta.size());
  return {qber, std::move(stripped)};
}

// Detection round answered by an impersonating adversary: Eve knows the decoy
// positions (disclosed so the round can happen) but not the bases, so she
// measures each decoy in a guessed basis and reports that digit.
inline DetectionResult detection_round_impersonated(
    const TransmissionFrame& frame, const std::vector<DecoyRecord>& meta,
    RandomStream& rng, EveTranscript* transcript = nullptr) {
  TransmissionFrame stripped = detail::strip_decoys(frame, meta);
  long mismatches = 0;
  for (const DecoyRecord& d : meta) {
    const Basis guess = uniform_basis(rng);
    const LocalMeasurement m = measure_local(frame.slots[d.position], guess, rng);
    if (transcript) transcript->records.push_back({m.outcome, guess, std::nullopt});
    if (!(m.outcome == d.value)) ++mismatches;
  }
  const double qber =
      meta.empty() ? 0.0 : static_cast<double>(mismatches) / static_cast<double>(meta.size());
  return {qber, std::move(stripped)};
}

// Step 3 ------------------------------------------------------------------

inline TransmissionFrame alice_encode(TransmissionFrame carriers,
                                      const Message& msg) {
  if (carriers.size() != msg.size())
    throw std::domain_error("alice_encode: carrier/message length mismatch");
  for (std::size_t j = 0; j < msg.size(); ++j)
    carriers.slots[j] = apply_local(oracle(msg[j]), carriers.slots[j]);
  return carriers;
}

// Alice's decoys are identity-independent: uniformly random basis and value.
inline DecoyInsertion alice_insert_random_decoys(const TransmissionFrame& carriers,
                                                 int k, RandomStream& rng) {
  return insert_decoys(carriers, k, nullptr, rng);
}

// Step 5 ------------------------------------------------------------------

inline TransmissionFrame bob_apply_authorization(TransmissionFrame carriers,
                                                 const LicenseKey& license) {
  if (carriers.size() != license.size())
    throw std::domain_error("bob_apply_authorization: carrier/license length mismatch");
  for (std::size_t j = 0; j < license.size(); ++j)
    carriers.slots[j] = apply_local(oracle(license[j]), carriers.slots[j]);
  return carriers;
}

// Step 6 ------------------------------------------------------------------

inline Message bob_decode_measure(const TransmissionFrame& carriers,
                                  const std::vector<InitialStateId>& initial_ids,
                                  RandomStream& rng,
                                  EveTranscript* transcript = nullptr) {
  if (carriers.size() != initial_ids.size())
    throw std::domain_error("bob_decode_measure: carrier/id length mismatch");
  Message out;
  out.reserve(carriers.size());
  for (std::size_t j = 0; j < carriers.size(); ++j) {
    const StateVec amplified =
        apply_local(diffusion(initial_ids[j]), carriers.slots[j]);
    LocalMeasurement m = measure_local(amplified, Basis::Z, rng);
    if (transcript && m.residual_ancilla)
      transcript->records.push_back(
          {std::nullopt, std::nullopt, std::move(m.residual_ancilla)});
    out.push_back(m.outcome);
  }
  return out;
}

// Full session ------------------------------------------------------------

namespace detail {

inline void attack_frame(TransmissionFrame& frame, const AttackSpec& attack,
                         RandomStream& rng, EveTranscript* transcript) {
  switch (attack.kind) {
    case AttackKind::InterceptResend:
      for (StateVec& slot : frame.slots) {
        InterceptResult r = intercept_resend(slot, rng);
        if (transcript)
          transcript->records.push_back({r.eve_outcome, r.eve_basis, std::nullopt});
        slot = std::move(r.resent);
      }
      break;
    case AttackKind::EntangleMeasure:
      for (StateVec& slot : frame.slots) slot = entangle_probe(slot, *attack.probe);
      break;
    default:
      break;  // None acts nowhere; Impersonate acts at the detection round
  }
}

inline Message random_message(int n, RandomStream& rng) {
  Message msg;
  msg.reserve(n);
  for (int i = 0; i < n; ++i) msg.push_back(uniform_symbol(rng));
  return msg;
}

inline IdentitySequence random_identity(int length, RandomStream& rng) {
  IdentitySequence id;
  id.reserve(length);
  for (int i = 0; i < length; ++i) id.push_back(uniform_symbol(rng));
  return id;
}

}  // namespace detail

// Executes steps 1-6 with the configured adversary on one channel leg.
// Aborts at step 2 or step 4 when the measured QBER exceeds the threshold;
// attacks produce aborts, never errors. Efficiency counters always reflect
// the configured budget: q_t = N + k1 + k2, b_s = 2N.
inline RunReport run_session(const ProtocolConfig& cfg, RandomStream rng,
                             EveTranscript* transcript = nullptr) {
  cfg.validate();

  const int n = cfg.carriers;
  RunReport report;
  report.counters.q_t = static_cast<long>(n) + cfg.k1() + cfg.k2();
  report.counters.b_s = 2L * n;
  report.counters.eta =
      static_cast<double>(report.counters.b_s) / static_cast<double>(report.counters.q_t);

  RandomStream id_rng = rng.derive("identity");
  const IdentitySequence id_c =
      cfg.id_c ? *cfg.id_c : detail::random_identity(std::max(1, cfg.k1()), id_rng);
  const IdentitySequence id_b =
      cfg.id_b ? *cfg.id_b : detail::random_identity(std::max(1, cfg.k2()), id_rng);

  RandomStream msg_rng = rng.derive("message");
  const Message msg = cfg.message ? *cfg.message : detail::random_message(n, msg_rng);

  // Step 1: Charlie prepares, encodes his license, and interleaves decoys.
  RandomStream step1 = rng.derive("step1");
  PreparedLeg leg1 = charlie_prepare(n, cfg.k1(), id_c, step1);

  RandomStream attack1 = rng.derive("attack-leg1");
  if (cfg.attack.active_on(1))
    detail::attack_frame(leg1.frame, cfg.attack, attack1, transcript);

  // Step 2: first detection round gates the Charlie→Alice leg.
  RandomStream detect1 = rng.derive("detect-leg1");
  DetectionResult round1 =
      cfg.attack.active_on(1) && cfg.attack.kind == AttackKind::Impersonate
          ? detection_round_impersonated(leg1.frame, leg1.secrets.decoys, attack1,
                                         transcript)
          : detection_round(leg1.frame, leg1.secrets.decoys, detect1);
  report.leg1_qber = round1.qber;
  if (round1.qber > cfg.qber_threshold) {
    report.aborted_at = "step2";
    return report;
  }

  // Step 3: Alice encodes the message and interleaves her own decoys.
  TransmissionFrame encoded = alice_encode(std::move(round1.stripped), msg);
  RandomStream step3 = rng.derive("step3");
  DecoyInsertion leg2 =
      cfg.bind_leg2_decoys_to_identity
          ? insert_decoys(encoded, cfg.k2(), &id_b, step3)
          : alice_insert_random_decoys(encoded, cfg.k2(), step3);

  RandomStream attack2 = rng.derive("attack-leg2");
  if (cfg.attack.active_on(2))
    detail::attack_frame(leg2.frame, cfg.attack, attack2, transcript);

  // Step 4: second detection round gates the Alice→Bob leg.
  RandomStream detect2 = rng.derive("detect-leg2");
  DetectionResult round2 =
      cfg.attack.active_on(2) && cfg.attack.kind == AttackKind::Impersonate
          ? detection_round_impersonated(leg2.frame, leg2.decoys, attack2, transcript)
          : detection_round(leg2.frame, leg2.decoys, detect2);
  report.leg2_qber = round2.qber;
  if (round2.qber > cfg.qber_threshold) {
    report.aborted_at = "step4";
    return report;
  }

  // Steps 5-6: Charlie releases the license; Bob decodes deterministically.
  TransmissionFrame authorized =
      bob_apply_authorization(std::move(round2.stripped), leg1.secrets.license);
  RandomStream step6 = rng.derive("step6");
  report.recovered =
      bob_decode_measure(authorized, leg1.secrets.initial_ids, step6, transcript);
  return report;
}

}  // namespace qsdc
