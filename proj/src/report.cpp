#include "qtp/report.hpp"

#include <iomanip>
#include <ostream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "qtp/errors.hpp"

namespace qtp {

using Json = nlohmann::ordered_json;

ReportFormat parse_report_format(std::string_view text) {
  if (text == "text") return ReportFormat::text;
  if (text == "jsonl") return ReportFormat::jsonl;
  throw ValidationError("format must be 'text' or 'jsonl', got '" + std::string(text) + "'");
}

const char* to_string(RunMode mode) {
  switch (mode) {
    case RunMode::exhaustive:
      return "exhaustive";
    case RunMode::sampled:
      return "sampled";
    case RunMode::session:
      return "session";
  }
  return "?";
}

std::string fourier_recovery_label(std::size_t i, std::size_t k, std::size_t n1, std::size_t n) {
  const std::size_t z = (n1 - (i - 1) % n1) % n1;
  const std::size_t x = (n - (k - 1) % n) % n;
  auto power = [](const char* name, std::size_t p) {
    std::string s = name;
    if (p > 1) s += "^" + std::to_string(p);
    return s;
  };
  std::string label;
  if (z != 0) label = power("Z", z);
  if (x != 0) label += (label.empty() ? "" : " ") + power("X", x);
  return label.empty() ? "I" : label;
}

namespace {

Json branch_record(const TeleportReport& report, const BranchRecord& b, const ReportContext& ctx) {
  Json j;
  j["scenario"] = ctx.scenario;
  j["mode"] = to_string(report.mode);
  j["seed"] = report.seed;
  j["i"] = b.outcome_i;
  j["k"] = b.outcome_k;
  j["probability"] = b.probability;
  j["fidelity"] = b.fidelity;
  j["recovery"] = ctx.label ? ctx.label(b.outcome_i, b.outcome_k) : "";
  if (b.bob_state_post) {
    Json amps = Json::array();
    for (const Complex& z : b.bob_state_post->amplitudes().entries()) {
      amps.push_back(Json::array({z.real(), z.imag()}));
    }
    j["bob"] = std::move(amps);
  } else {
    j["bob"] = nullptr;
  }
  return j;
}

void emit_text(const TeleportReport& report, std::ostream& out, const ReportContext& ctx) {
  out << "scenario: " << (ctx.scenario.empty() ? "-" : ctx.scenario) << "\n";
  out << "mode: " << to_string(report.mode) << "  dims: N1=" << report.dims.n1
      << " N2=" << report.dims.n2 << " N3=" << report.dims.n3
      << "  branches: " << report.branches.size();
  if (report.mode != RunMode::exhaustive) out << "  seed: " << report.seed;
  out << "\n";
  out << std::setw(6) << "i" << std::setw(6) << "k" << std::setw(18) << "probability"
      << std::setw(18) << "fidelity" << "  recovery\n";
  for (const BranchRecord& b : report.branches) {
    out << std::setw(6) << b.outcome_i << std::setw(6) << b.outcome_k << std::fixed
        << std::setprecision(12) << std::setw(18) << b.probability;
    if (b.bob_state_post) {
      out << std::setw(18) << b.fidelity;
    } else {
      out << std::setw(18) << "-";
    }
    out << "  " << (ctx.label ? ctx.label(b.outcome_i, b.outcome_k) : "") << "\n";
    out.unsetf(std::ios::floatfield);
  }
  out << "mean fidelity: " << std::fixed << std::setprecision(12) << report.mean_fidelity << "\n";
  out.unsetf(std::ios::floatfield);
}

}  // namespace

void emit_report(const TeleportReport& report, ReportFormat format, std::ostream& out,
                 const ReportContext& context) {
  if (format == ReportFormat::text) {
    emit_text(report, out, context);
    return;
  }
  for (const BranchRecord& b : report.branches) {
    out << branch_record(report, b, context).dump() << "\n";
  }
}

std::string reserialize_jsonl(std::string_view jsonl) {
  std::istringstream in{std::string(jsonl)};
  std::ostringstream out;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    out << Json::parse(line).dump() << "\n";
  }
  return out.str();
}

}  // namespace qtp
