#pragma once

#include <cstddef>
#include <functional>
#include <iosfwd>
#include <string>
#include <string_view>

#include "qtp/protocol_synthesis.hpp"
#include "qtp/teleport_engine.hpp"

namespace qtp {

enum class ReportFormat { text, jsonl };

// "text" or "jsonl". Throws ValidationError.
ReportFormat parse_report_format(std::string_view text);

const char* to_string(RunMode mode);

using RecoveryLabeler = std::function<std::string(std::size_t i, std::size_t k)>;

struct ReportContext {
  std::string scenario;
  RecoveryLabeler label;  // optional
};

// Text: header plus one table row per branch. JSON lines: exactly one object
// per branch, fixed key order, shortest round-trip float formatting.
void emit_report(const TeleportReport& report, ReportFormat format, std::ostream& out,
                 const ReportContext& context = {});

// Generalized-Pauli name of the Fourier-family recovery operator O_{ik} for
// input dimension n1 and teleported dimension n, e.g. "I", "X", "Z", "Z X",
// "Z^2 X^2". "Z" is diag(w^(m-1)), w = exp(2 pi i / n1); "X" the cyclic shift.
std::string fourier_recovery_label(std::size_t i, std::size_t k, std::size_t n1, std::size_t n);

// Parses every line as JSON and re-serializes it the way emit_report does.
std::string reserialize_jsonl(std::string_view jsonl);

}  // namespace qtp
