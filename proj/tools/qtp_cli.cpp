// qtp: run, verify or check feasibility of teleportation scenarios.

#include <charconv>
#include <cmath>
#include <cstdlib>
#include <iomanip>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "qtp/scenario.hpp"

namespace {

struct Options {
  std::vector<std::string> configs;
  std::optional<std::uint64_t> seed;
  std::string format = "text";
  std::string transport;
};

std::optional<double> env_tolerance() {
  const char* raw = std::getenv("QT_TOL");
  if (raw == nullptr || *raw == '\0') return std::nullopt;
  const std::string text(raw);
  double value = 0.0;
  const auto [end, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc{} || end != text.data() + text.size() || !std::isfinite(value) || value < 0.0) {
    throw qtp::ValidationError("QT_TOL must be a non-negative decimal, got '" + text + "'");
  }
  return value;
}

void print_spectrum(std::ostream& out, const qtp::FeasibilityVerdict& v) {
  out << "schmidt spectrum:";
  out << std::setprecision(12);
  for (double l : v.lambdas) out << " " << l;
  out << "\n";
}

int cmd_run(const std::string& path, const Options& opt) {
  const qtp::Scenario s = qtp::load_scenario(path);
  const qtp::ReportFormat format = qtp::parse_report_format(opt.format);
  qtp::RunOverrides overrides;
  overrides.seed = opt.seed;
  if (!opt.transport.empty()) overrides.transport = qtp::TransportSpec::parse(opt.transport);
  overrides.tolerance = env_tolerance().value_or(qtp::kDefaultRunTolerance);

  const qtp::ScenarioOutcome outcome = qtp::run_scenario(s, overrides);
  if (outcome.exit_code == qtp::kExitInfeasible) {
    std::cerr << path << ": " << outcome.message << "\n";
    print_spectrum(std::cerr, outcome.verdict);
    return outcome.exit_code;
  }
  const qtp::ScenarioInputs inputs = qtp::build_inputs(s);
  qtp::emit_report(*outcome.report, format, std::cout,
                   qtp::ReportContext{s.name, qtp::labeler_for(s, inputs)});
  if (!outcome.message.empty()) std::cerr << path << ": " << outcome.message << "\n";
  return outcome.exit_code;
}

int cmd_verify(const std::string& path) {
  const qtp::Scenario s = qtp::load_scenario(path);
  const double tol = env_tolerance().value_or(qtp::kNumericTol);
  const qtp::VerifyOutcome v = qtp::verify_scenario(s, tol);
  std::cout << "scenario: " << s.name << "\n";
  if (v.exit_code == qtp::kExitInfeasible) {
    std::cout << "verdict: infeasible\n";
    print_spectrum(std::cout, v.verdict);
    return v.exit_code;
  }
  std::cout << std::scientific << std::setprecision(3)
            << "condition residual:  " << v.condition_residual << "\n"
            << "constraint residual: " << v.constraint_residual << "\n"
            << "unitarity defect:    " << v.unitarity_defect << "\n"
            << "tolerance:           " << tol << "\n"
            << "verdict: " << (v.exit_code == qtp::kExitOk ? "ok" : "FAILED") << "\n";
  return v.exit_code;
}

int cmd_feasibility(const std::string& path) {
  const qtp::Scenario s = qtp::load_scenario(path);
  const qtp::ScenarioInputs inputs = qtp::build_inputs(s);
  const std::size_t n = inputs.options.input_support.empty() ? s.dims.n1
                                                             : inputs.options.input_support.size();
  const qtp::FeasibilityVerdict v = qtp::feasibility(inputs.resource, n);
  std::cout << "scenario: " << s.name << "\n"
            << "teleported dimension: " << n << "\n";
  print_spectrum(std::cout, v);
  std::cout << "verdict: " << (v.feasible ? "feasible" : "infeasible") << "\n";
  return v.feasible ? qtp::kExitOk : qtp::kExitInfeasible;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Synthesize and simulate teleportation protocols for finite-dimensional states"};
  app.require_subcommand(1);
  Options opt;

  auto add_configs = [&](CLI::App* sub) {
    sub->add_option("config", opt.configs, "Scenario file(s)")->required()->check(CLI::ExistingFile);
  };
  CLI::App* run = app.add_subcommand("run", "Synthesize and simulate a scenario");
  add_configs(run);
  run->add_option("--seed", opt.seed, "Override the [run] seed");
  run->add_option("--format", opt.format, "Report format")
      ->check(CLI::IsMember({"text", "jsonl"}));
  run->add_option("--transport", opt.transport, "memory | tcp:<host>:<port> (session mode)");
  CLI::App* verify = app.add_subcommand("verify", "Synthesis and residual checks, no simulation");
  add_configs(verify);
  CLI::App* feas = app.add_subcommand("feasibility", "Report the resource Schmidt spectrum");
  add_configs(feas);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? qtp::kExitOk : qtp::kExitInvalid;
  }

  int worst = qtp::kExitOk;
  for (const std::string& path : opt.configs) {
    int code = qtp::kExitInvalid;
    try {
      if (run->parsed()) {
        code = cmd_run(path, opt);
      } else if (verify->parsed()) {
        code = cmd_verify(path);
      } else {
        code = cmd_feasibility(path);
      }
    } catch (const qtp::Error& e) {
      std::cerr << "error: " << e.what() << "\n";
    } catch (const std::exception& e) {
      std::cerr << "error: " << path << ": " << e.what() << "\n";
    }
    worst = std::max(worst, code);
  }
  return worst;
}
