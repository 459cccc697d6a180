// serialize.hpp
// External formats: protocol config and probe parsing from JSON, report
// serialization, hex message packing, and the detection-curve CSV.

#pragma once

#include <cstdint>
#include <cstdio>
#include <fstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "qsdc/adversary.hpp"
#include "qsdc/analysis.hpp"
#include "qsdc/grover.hpp"
#include "qsdc/protocol.hpp"

namespace qsdc {

using json = nlohmann::ordered_json;

// Hex message packing: each byte maps to 4 symbols, most-significant 2-bit
// pair first ("D" "E" → 0xDE → 3,1,3,2).

inline Message hex_to_symbols(const std::string& hex) {
  if (hex.size() % 2 != 0)
    throw std::invalid_argument("message_hex: even number of hex digits required");
  Message out;
  out.reserve(hex.size() * 2);
  for (std::size_t i = 0; i < hex.size(); i += 2) {
    int byte = 0;
    for (int half = 0; half < 2; ++half) {
      const char c = hex[i + half];
      int nibble;
      if (c >= '0' && c <= '9') nibble = c - '0';
      else if (c >= 'a' && c <= 'f') nibble = c - 'a' + 10;
      else if (c >= 'A' && c <= 'F') nibble = c - 'A' + 10;
      else throw std::invalid_argument("message_hex: invalid hex digit");
      byte = byte << 4 | nibble;
    }
    for (int pair = 3; pair >= 0; --pair) out.push_back(Symbol(byte >> (2 * pair) & 3));
  }
  return out;
}

// Trailing partial bytes are zero-padded; uppercase output.
inline std::string symbols_to_hex(const Message& msg) {
  static const char* digits = "0123456789ABCDEF";
  std::string out;
  out.reserve((msg.size() + 3) / 4 * 2);
  for (std::size_t i = 0; i < msg.size(); i += 4) {
    int byte = 0;
    for (std::size_t pair = 0; pair < 4; ++pair) {
      byte <<= 2;
      if (i + pair < msg.size()) byte |= msg[i + pair].value();
    }
    out.push_back(digits[byte >> 4]);
    out.push_back(digits[byte & 15]);
  }
  return out;
}

// Probe parsing -----------------------------------------------------------

// A 16×16 complex matrix as a JSON array: 16 rows of 16 [re, im] pairs.
inline UnitaryOp probe_from_json(const json& j) {
  if (!j.is_array() || j.size() != kCompositeDim)
    throw std::invalid_argument("probe: expected 16 rows");
  std::vector<cx> entries;
  entries.reserve(kCompositeDim * kCompositeDim);
  for (const auto& row : j) {
    if (!row.is_array() || row.size() != kCompositeDim)
      throw std::invalid_argument("probe: expected 16 entries per row");
    for (const auto& e : row) {
      if (!e.is_array() || e.size() != 2)
        throw std::invalid_argument("probe: entries are [re, im] pairs");
      entries.emplace_back(e[0].get<double>(), e[1].get<double>());
    }
  }
  UnitaryOp probe(kCompositeDim, std::move(entries));
  if (!probe.is_unitary())
    throw std::invalid_argument("probe: matrix is not unitary");
  return probe;
}

inline json probe_to_json(const UnitaryOp& probe) {
  json rows = json::array();
  for (int r = 0; r < probe.dim(); ++r) {
    json row = json::array();
    for (int c = 0; c < probe.dim(); ++c)
      row.push_back({probe.at(r, c).real(), probe.at(r, c).imag()});
    rows.push_back(std::move(row));
  }
  return rows;
}

// Named built-in, or a path to a JSON matrix file.
inline UnitaryOp load_probe(const std::string& name_or_path) {
  if (auto builtin = probe_by_name(name_or_path)) return *builtin;
  std::ifstream in(name_or_path);
  if (!in) throw std::invalid_argument("probe: unknown name and unreadable path: " +
                                       name_or_path);
  json j;
  in >> j;
  return probe_from_json(j);
}

// Config ------------------------------------------------------------------

inline AttackKind attack_kind_from_string(const std::string& s) {
  if (s == "none") return AttackKind::None;
  if (s == "intercept_resend") return AttackKind::InterceptResend;
  if (s == "entangle_measure") return AttackKind::EntangleMeasure;
  if (s == "impersonate") return AttackKind::Impersonate;
  throw std::invalid_argument("attack: unknown kind: " + s);
}

inline std::string to_string(AttackKind kind) {
  switch (kind) {
    case AttackKind::None: return "none";
    case AttackKind::InterceptResend: return "intercept_resend";
    case AttackKind::EntangleMeasure: return "entangle_measure";
    case AttackKind::Impersonate: return "impersonate";
  }
  return "none";
}

inline IdentitySequence identity_from_json(const json& j) {
  IdentitySequence id;
  for (const auto& e : j) id.push_back(Symbol(e.get<int>()));
  return id;
}

// {N, k1, k2, qber_threshold, seed, attack: {leg, kind, params}, message_hex}
// id_c / id_b / bind_leg2_decoys_to_identity are optional extensions.
inline ProtocolConfig parse_config(const json& j) {
  ProtocolConfig cfg;
  if (j.contains("message_hex")) {
    cfg.message = hex_to_symbols(j.at("message_hex").get<std::string>());
    cfg.carriers = static_cast<int>(cfg.message->size());
  }
  if (j.contains("N")) cfg.carriers = j.at("N").get<int>();
  if (cfg.message && static_cast<int>(cfg.message->size()) != cfg.carriers)
    throw std::invalid_argument("config: N disagrees with message_hex length");
  if (j.contains("k1")) cfg.decoys_leg1 = j.at("k1").get<int>();
  if (j.contains("k2")) cfg.decoys_leg2 = j.at("k2").get<int>();
  if (j.contains("qber_threshold")) cfg.qber_threshold = j.at("qber_threshold").get<double>();
  if (j.contains("seed")) cfg.seed = j.at("seed").get<std::uint64_t>();
  if (j.contains("id_c")) cfg.id_c = identity_from_json(j.at("id_c"));
  if (j.contains("id_b")) cfg.id_b = identity_from_json(j.at("id_b"));
  if (j.contains("bind_leg2_decoys_to_identity"))
    cfg.bind_leg2_decoys_to_identity = j.at("bind_leg2_decoys_to_identity").get<bool>();

  if (j.contains("attack") && !j.at("attack").is_null()) {
    const json& a = j.at("attack");
    cfg.attack.kind = attack_kind_from_string(a.at("kind").get<std::string>());
    if (cfg.attack.kind != AttackKind::None) cfg.attack.leg = a.at("leg").get<int>();
    if (a.contains("params") && a.at("params").contains("probe")) {
      const json& p = a.at("params").at("probe");
      cfg.attack.probe = p.is_string() ? load_probe(p.get<std::string>())
                                       : probe_from_json(p);
    }
  }

  cfg.validate();
  return cfg;
}

inline ProtocolConfig parse_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("config: cannot open " + path);
  json j;
  try {
    in >> j;
  } catch (const json::parse_error& e) {
    throw std::invalid_argument(std::string("config: JSON parse error: ") + e.what());
  }
  return parse_config(j);
}

// Reports -----------------------------------------------------------------

inline json to_json(const RunReport& report) {
  json j;
  j["leg1_qber"] = report.leg1_qber;
  j["leg2_qber"] = report.leg2_qber;
  j["aborted_at"] = report.aborted_at ? json(*report.aborted_at) : json(nullptr);
  j["recovered_hex"] =
      report.recovered ? json(symbols_to_hex(*report.recovered)) : json(nullptr);
  j["counters"] = {{"q_t", report.counters.q_t},
                   {"b_s", report.counters.b_s},
                   {"eta", report.counters.eta}};
  return j;
}

inline json to_json(const TheoremReport& report) {
  json j;
  j["total"] = report.total;
  j["passed"] = report.passed;
  json failures = json::array();
  for (const TheoremFailure& f : report.failures)
    failures.push_back({{"id", f.id}, {"w_a", f.w_a}, {"w_c", f.w_c}, {"reason", f.reason}});
  j["failures"] = std::move(failures);
  json histogram;
  for (const char* label : {"+1", "-1", "+i", "-i"}) {
    const auto it = report.phase_histogram.find(label);
    histogram[label] = it == report.phase_histogram.end() ? 0 : it->second;
  }
  j["phase_histogram"] = std::move(histogram);
  return j;
}

inline json to_json(const EfficiencyReport& report) {
  json j;
  j["N"] = report.carriers;
  j["q_t"] = report.q_t;
  j["b_s"] = report.b_s;
  j["eta"] = report.eta;
  if (report.eta > 1.0)
    j["note"] = "efficiency exceeds 1: no detection decoys are being counted";
  return j;
}

// CSV ---------------------------------------------------------------------

inline constexpr const char* kDetectionCurveHeader =
    "k,p_paper,p_ref,p_physical,p_mc,ci_low,ci_high,trials";

inline std::string detection_curve_csv(const DetectionCurve& curve) {
  std::string out = kDetectionCurveHeader;
  out.push_back('\n');
  char line[256];
  for (const DetectionCurveRow& row : curve) {
    std::snprintf(line, sizeof line, "%d,%.9f,%.9f,%.9f,%.9f,%.9f,%.9f,%ld\n",
                  row.k, row.p_paper, row.p_ref, row.p_physical, row.p_mc,
                  row.ci_low, row.ci_high, row.trials);
    out += line;
  }
  return out;
}

}  // namespace qsdc
