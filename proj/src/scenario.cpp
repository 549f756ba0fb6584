#include "qtp/scenario.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <regex>
#include <sstream>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include "qtp/session.hpp"

namespace qtp {
namespace {

namespace pt = boost::property_tree;

std::string trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\n");
  return std::string(s.substr(first, last - first + 1));
}

std::vector<std::string> split_tokens(std::string_view text, std::string_view separators) {
  std::vector<std::string> tokens;
  std::size_t pos = 0;
  while (pos < text.size()) {
    const std::size_t start = text.find_first_not_of(separators, pos);
    if (start == std::string_view::npos) break;
    std::size_t end = text.find_first_of(separators, start);
    if (end == std::string_view::npos) end = text.size();
    tokens.emplace_back(text.substr(start, end - start));
    pos = end;
  }
  return tokens;
}

template <typename T>
std::optional<T> parse_number(std::string_view text) {
  T value{};
  const auto [end, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc{} || end != text.data() + text.size()) return std::nullopt;
  return value;
}

// Line numbers of "[section]" headers and "section.key" entries, for diagnostics.
std::map<std::string, int> index_lines(const std::string& text) {
  std::map<std::string, int> lines;
  std::istringstream in(text);
  std::string line;
  std::string section;
  int number = 0;
  while (std::getline(in, line)) {
    ++number;
    const std::string t = trim(line);
    if (t.empty() || t[0] == ';' || t[0] == '#') continue;
    if (t[0] == '[') {
      section = trim(t.substr(1, t.find(']') - 1));
      lines.emplace(section, number);
      continue;
    }
    const auto eq = t.find('=');
    if (eq != std::string::npos) lines.emplace(section + "." + trim(t.substr(0, eq)), number);
  }
  return lines;
}

class Fields {
 public:
  Fields(const pt::ptree& root, std::map<std::string, int> lines, std::string source)
      : root_(root), lines_(std::move(lines)), source_(std::move(source)) {}

  [[noreturn]] void fail(const std::string& section, const std::string& key,
                         const std::string& message) const {
    std::string where = source_;
    auto it = lines_.find(key.empty() ? section : section + "." + key);
    if (it == lines_.end()) it = lines_.find(section);
    if (it != lines_.end()) where += ":" + std::to_string(it->second);
    where += ": [" + section + "]";
    if (!key.empty()) where += " " + key;
    throw ScenarioError(where + ": " + message);
  }

  const pt::ptree* section(const std::string& name) const {
    const auto it = root_.find(name);
    return it == root_.not_found() ? nullptr : &it->second;
  }

  std::optional<std::string> get(const std::string& sec, const std::string& key) const {
    const pt::ptree* s = section(sec);
    if (s == nullptr) return std::nullopt;
    const auto it = s->find(key);
    if (it == s->not_found()) return std::nullopt;
    return trim(it->second.data());
  }

  std::string require(const std::string& sec, const std::string& key) const {
    auto v = get(sec, key);
    if (!v) fail(sec, key, "missing required key");
    if (v->empty()) fail(sec, key, "empty value");
    return *v;
  }

  std::size_t positive(const std::string& sec, const std::string& key) const {
    const std::string text = require(sec, key);
    const auto v = parse_number<std::size_t>(text);
    if (!v || *v == 0) fail(sec, key, "expected a positive integer, got '" + text + "'");
    return *v;
  }

  std::uint64_t u64(const std::string& sec, const std::string& key) const {
    const std::string text = require(sec, key);
    const auto v = parse_number<std::uint64_t>(text);
    if (!v) fail(sec, key, "expected an unsigned 64-bit integer, got '" + text + "'");
    return *v;
  }

  std::vector<std::size_t> index_list(const std::string& sec, const std::string& key) const {
    std::vector<std::size_t> out;
    for (const std::string& tok : split_tokens(require(sec, key), " \t,")) {
      const auto v = parse_number<std::size_t>(tok);
      if (!v || *v == 0) fail(sec, key, "expected 1-based indices, got '" + tok + "'");
      out.push_back(*v);
    }
    return out;
  }

  std::vector<Complex> complex_list(const std::string& sec, const std::string& key) const {
    std::vector<Complex> out;
    for (const std::string& tok : split_tokens(require(sec, key), " \t")) {
      const auto comma = tok.find(',');
      const std::string re_text = tok.substr(0, comma);
      const std::string im_text = comma == std::string::npos ? "0" : tok.substr(comma + 1);
      const auto re = parse_number<double>(re_text);
      const auto im = parse_number<double>(im_text);
      if (!re || !im || !std::isfinite(*re) || !std::isfinite(*im)) {
        fail(sec, key, "expected 're,im' pairs, got '" + tok + "'");
      }
      out.emplace_back(*re, *im);
    }
    return out;
  }

  void check_keys(const std::string& sec, const std::regex& allowed) const {
    const pt::ptree* s = section(sec);
    if (s == nullptr) return;
    for (const auto& [key, value] : *s) {
      if (!std::regex_match(key, allowed)) fail(sec, key, "unknown key");
    }
  }

 private:
  const pt::ptree& root_;
  std::map<std::string, int> lines_;
  std::string source_;
};

ResourceSpec parse_resource(const Fields& f, const JointDims& dims) {
  ResourceSpec spec;
  const std::string kind = f.require("resource", "kind");
  if (kind == "maximal") {
    spec.kind = ResourceSpec::Kind::maximal;
    if (dims.n2 != dims.n3) f.fail("resource", "kind", "maximal resource needs n2 == n3");
  } else if (kind == "epr-product") {
    spec.kind = ResourceSpec::Kind::epr_product;
    spec.pairs = f.positive("resource", "m");
    if (spec.pairs > 10 || (std::size_t{1} << spec.pairs) != dims.n2 ||
        dims.n2 != dims.n3) {
      f.fail("resource", "m", "epr-product with m pairs needs n2 == n3 == 2^m");
    }
  } else if (kind == "injection") {
    spec.kind = ResourceSpec::Kind::injection;
    const std::size_t logical = f.positive("resource", "logical");
    if (logical != dims.n2) f.fail("resource", "logical", "must equal n2");
    std::vector<std::size_t> targets(logical, 0);
    for (const std::string& tok : split_tokens(f.require("resource", "map"), " \t,")) {
      const auto colon = tok.find(':');
      const auto from = parse_number<std::size_t>(tok.substr(0, colon));
      const auto to = colon == std::string::npos ? std::nullopt
                                                 : parse_number<std::size_t>(tok.substr(colon + 1));
      if (!from || !to || *from < 1 || *from > logical || *to < 1 || *to > dims.n3) {
        f.fail("resource", "map", "bad entry '" + tok + "' (expected i:j, 1 <= i <= " +
                                      std::to_string(logical) + ", 1 <= j <= " +
                                      std::to_string(dims.n3) + ")");
      }
      if (targets[*from - 1] != 0) f.fail("resource", "map", "index " + std::to_string(*from) + " mapped twice");
      targets[*from - 1] = *to;
    }
    if (std::find(targets.begin(), targets.end(), 0) != targets.end()) {
      f.fail("resource", "map", "every index 1.." + std::to_string(logical) + " must be mapped");
    }
    spec.injection.targets = targets;
    try {
      spec.injection.validate(dims.n3);
    } catch (const ValidationError& e) {
      f.fail("resource", "map", e.what());
    }
  } else if (kind == "matrix") {
    spec.kind = ResourceSpec::Kind::matrix;
    std::vector<Complex> entries;
    for (std::size_t r = 1; r <= dims.n2; ++r) {
      const std::string key = "row" + std::to_string(r);
      const std::vector<Complex> row = f.complex_list("resource", key);
      if (row.size() != dims.n3) {
        f.fail("resource", key, "expected " + std::to_string(dims.n3) + " entries, got " +
                                    std::to_string(row.size()));
      }
      entries.insert(entries.end(), row.begin(), row.end());
    }
    spec.matrix = ComplexMatrix(dims.n2, dims.n3, std::move(entries));
    if (spec.matrix.frobenius_norm() == 0.0) f.fail("resource", "row1", "resource matrix is zero");
  } else {
    f.fail("resource", "kind", "expected maximal | epr-product | injection | matrix, got '" + kind + "'");
  }
  return spec;
}

PhaseSpec parse_phase(const Fields& f, const JointDims& dims) {
  PhaseSpec spec;
  const std::string kind = f.get("phase", "kind").value_or("fourier");
  if (kind == "fourier") return spec;
  if (kind != "explicit") f.fail("phase", "kind", "expected fourier | explicit, got '" + kind + "'");
  spec.kind = PhaseSpec::Kind::explicit_tensor;
  spec.entries.assign(dims.n1 * dims.n1 * dims.n2, Complex{});
  for (std::size_t k = 1; k <= dims.n2; ++k) {
    for (std::size_t s = 1; s <= dims.n1; ++s) {
      const std::string key = "slice" + std::to_string(k) + "_row" + std::to_string(s);
      const std::vector<Complex> row = f.complex_list("phase", key);
      if (row.size() != dims.n1) {
        f.fail("phase", key, "expected " + std::to_string(dims.n1) + " entries");
      }
      for (std::size_t j = 1; j <= dims.n1; ++j) {
        spec.entries[((s - 1) * dims.n1 + (j - 1)) * dims.n2 + (k - 1)] = row[j - 1];
      }
    }
  }
  try {
    PhaseTensor(dims.n1, dims.n2, spec.entries);
  } catch (const Error& e) {
    f.fail("phase", "kind", e.what());
  }
  return spec;
}

InputSpec parse_input(const Fields& f, const JointDims& dims) {
  InputSpec spec;
  const std::string kind = f.require("input", "kind");
  if (kind == "random") {
    spec.kind = InputSpec::Kind::random;
    spec.seed = f.u64("input", "seed");
  } else if (kind == "amplitudes") {
    spec.kind = InputSpec::Kind::amplitudes;
    spec.amplitudes = f.complex_list("input", "amplitudes");
    if (spec.amplitudes.size() != dims.n1) {
      f.fail("input", "amplitudes", "expected " + std::to_string(dims.n1) + " amplitudes");
    }
    double norm = 0.0;
    for (const Complex& z : spec.amplitudes) norm += std::norm(z);
    if (norm == 0.0) f.fail("input", "amplitudes", "all amplitudes are zero");
  } else if (kind == "basis") {
    spec.kind = InputSpec::Kind::basis;
    spec.index = f.positive("input", "index");
    if (spec.index > dims.n1) f.fail("input", "index", "must be at most n1");
  } else {
    f.fail("input", "kind", "expected random | amplitudes | basis, got '" + kind + "'");
  }
  if (f.get("input", "support")) {
    spec.support = f.index_list("input", "support");
    try {
      SupportInjection{spec.support}.validate(dims.n1);
    } catch (const ValidationError& e) {
      f.fail("input", "support", e.what());
    }
  }
  if (f.get("input", "output_support")) {
    spec.output_support = f.index_list("input", "output_support");
    try {
      SupportInjection{spec.output_support}.validate(dims.n3);
    } catch (const ValidationError& e) {
      f.fail("input", "output_support", e.what());
    }
    const std::size_t n = spec.support.empty() ? dims.n1 : spec.support.size();
    if (spec.output_support.size() != n) {
      f.fail("input", "output_support", "needs " + std::to_string(n) + " indices");
    }
  }
  return spec;
}

ModeSpec parse_run(const Fields& f) {
  ModeSpec spec;
  const std::string mode = f.get("run", "mode").value_or("exhaustive");
  if (mode == "exhaustive") {
    spec.mode = RunMode::exhaustive;
  } else if (mode == "sampled") {
    spec.mode = RunMode::sampled;
    if (f.get("run", "count")) {
      const auto count = parse_number<std::size_t>(*f.get("run", "count"));
      if (!count) f.fail("run", "count", "expected a non-negative integer");
      spec.count = *count;
    }
  } else if (mode == "session") {
    spec.mode = RunMode::session;
  } else {
    f.fail("run", "mode", "expected exhaustive | sampled | session, got '" + mode + "'");
  }
  if (f.get("run", "seed")) spec.seed = f.u64("run", "seed");
  if (auto t = f.get("run", "transport")) {
    try {
      spec.transport = TransportSpec::parse(*t);
    } catch (const ValidationError& e) {
      f.fail("run", "transport", e.what());
    }
  }
  return spec;
}

}  // namespace

Scenario parse_scenario(std::istream& in, const std::string& source) {
  const std::string text{std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
  pt::ptree root;
  try {
    std::istringstream stream(text);
    pt::read_ini(stream, root);
  } catch (const pt::ini_parser_error& e) {
    throw ScenarioError(source + ":" + std::to_string(e.line()) + ": " + e.message());
  }
  const Fields f(root, index_lines(text), source);

  static const std::map<std::string, std::regex> allowed{
      {"scenario", std::regex("name|description")},
      {"dims", std::regex("n1|n2|n3")},
      {"resource", std::regex("kind|m|logical|map|row[0-9]+")},
      {"phase", std::regex("kind|slice[0-9]+_row[0-9]+")},
      {"input", std::regex("kind|seed|amplitudes|index|support|output_support")},
      {"run", std::regex("mode|count|seed|transport")},
  };
  for (const auto& [name, child] : root) {
    if (child.empty() && !child.data().empty()) f.fail(name, "", "key outside of a section");
    const auto it = allowed.find(name);
    if (it == allowed.end()) f.fail(name, "", "unknown section");
    f.check_keys(name, it->second);
  }

  Scenario s;
  s.name = f.require("scenario", "name");
  s.description = f.get("scenario", "description").value_or("");
  s.dims = JointDims{f.positive("dims", "n1"), f.positive("dims", "n2"), f.positive("dims", "n3")};
  if (s.dims.total() > kMaxJointDim) f.fail("dims", "", "N1*N2*N3 exceeds the simulator limit");
  s.resource = parse_resource(f, s.dims);
  s.phase = parse_phase(f, s.dims);
  s.input = parse_input(f, s.dims);
  s.run = parse_run(f);

  if (s.dims.n3 < s.dims.n1 && s.input.output_support.empty()) {
    const auto& support = s.input.support;
    const bool fits = !support.empty() && std::all_of(support.begin(), support.end(),
                                                      [&](std::size_t i) { return i <= s.dims.n3; });
    if (!fits) {
      f.fail("dims", "n3", "n3 < n1 needs an [input] support that fits in H3 or an output_support");
    }
  }
  return s;
}

Scenario load_scenario(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ScenarioError(path.string() + ": cannot open scenario file");
  return parse_scenario(in, path.string());
}

ScenarioInputs build_inputs(const Scenario& s) {
  const JointDims& d = s.dims;

  StateVector psi0;
  switch (s.input.kind) {
    case InputSpec::Kind::random:
      psi0 = random_state(d.n1, s.input.seed);
      break;
    case InputSpec::Kind::amplitudes:
      psi0 = StateVector::normalized(ComplexVector(s.input.amplitudes));
      break;
    case InputSpec::Kind::basis:
      psi0 = StateVector(ComplexVector::basis(d.n1, s.input.index));
      break;
  }

  std::optional<ResourceMatrix> resource;
  switch (s.resource.kind) {
    case ResourceSpec::Kind::maximal:
      resource = maximally_entangled_resource(d.n2);
      break;
    case ResourceSpec::Kind::epr_product:
      resource = epr_product_resource(s.resource.pairs);
      break;
    case ResourceSpec::Kind::injection:
      resource = injection_resource(d.n2, d.n3, s.resource.injection);
      break;
    case ResourceSpec::Kind::matrix:
      resource = resource_from_matrix(s.resource.matrix);
      break;
  }

  PhaseTensor phase = s.phase.kind == PhaseSpec::Kind::fourier
                          ? fourier_phase_tensor(d.n1, d.n2)
                          : PhaseTensor(d.n1, d.n2, s.phase.entries);

  SynthesisOptions options;
  options.input_support = s.input.support;
  options.output_support = s.input.output_support;
  const std::size_t n = options.input_support.empty() ? d.n1 : options.input_support.size();
  if (options.output_support.empty() && s.resource.kind == ResourceSpec::Kind::injection &&
      d.n3 > d.n1 && s.resource.injection.size() == n) {
    options.output_support = s.resource.injection.targets;
  }
  return ScenarioInputs{std::move(psi0), std::move(*resource), std::move(phase), std::move(options)};
}

RecoveryLabeler labeler_for(const Scenario& s, const ScenarioInputs& inputs) {
  const std::size_t n1 = s.dims.n1;
  const std::size_t n = inputs.options.input_support.empty() ? n1 : inputs.options.input_support.size();
  if (s.phase.kind == PhaseSpec::Kind::fourier && n == n1 && inputs.options.output_support.empty()) {
    return [n1, n](std::size_t i, std::size_t k) { return fourier_recovery_label(i, k, n1, n); };
  }
  return [](std::size_t i, std::size_t k) {
    std::string label = "C(" + std::to_string(i) + "," + std::to_string(k) + ")";
    if (k > 1) label += " X^-" + std::to_string(k - 1);
    return label;
  };
}

namespace {

std::string spectrum_text(const std::vector<double>& lambdas) {
  std::ostringstream out;
  out.precision(12);
  out << "(";
  for (std::size_t m = 0; m < lambdas.size(); ++m) out << (m ? ", " : "") << lambdas[m];
  out << ")";
  return out.str();
}

std::size_t teleported_dim(const Scenario& s) {
  return s.input.support.empty() ? s.dims.n1 : s.input.support.size();
}

}  // namespace

ScenarioOutcome run_scenario(const Scenario& s, const RunOverrides& overrides) {
  const ScenarioInputs inputs = build_inputs(s);
  ScenarioOutcome outcome;
  outcome.verdict = feasibility(inputs.resource, teleported_dim(s));
  if (!outcome.verdict.feasible) {
    outcome.exit_code = kExitInfeasible;
    outcome.message = "infeasible: resource Schmidt spectrum " + spectrum_text(outcome.verdict.lambdas) +
                      " is not uniform over " + std::to_string(teleported_dim(s)) + " terms";
    return outcome;
  }

  const std::uint64_t seed = overrides.seed.value_or(s.run.seed);
  TeleportReport report;
  if (s.run.mode == RunMode::session) {
    const TransportSpec transport = overrides.transport.value_or(s.run.transport);
    const SessionScenario session{inputs.psi0, inputs.resource, inputs.phase, inputs.options};
    const auto [alice, bob] = run_session_pair(session, transport, seed);
    const Protocol protocol = synthesize(inputs.resource, s.dims.n1, inputs.phase, inputs.options);
    const StateVector phi =
        apply_sender_unitary(prepare_joint(inputs.psi0, inputs.resource), protocol.unitary);
    const JointDims dims{s.dims.n1, s.dims.n2, s.dims.n3};
    const double p = outcome_probabilities(phi, dims)[(bob.outcome_i - 1) * dims.n2 + (bob.outcome_k - 1)];
    report.mode = RunMode::session;
    report.dims = dims;
    report.seed = seed;
    report.branches.push_back(
        BranchRecord{bob.outcome_i, bob.outcome_k, p, bob.recovered_state, *bob.final_fidelity});
    report.mean_fidelity = *bob.final_fidelity;
  } else {
    const Protocol protocol = synthesize(inputs.resource, s.dims.n1, inputs.phase, inputs.options);
    report = execute(protocol, inputs.psi0, inputs.resource,
                     RunConfig{s.run.mode, seed, s.run.count});
  }

  if (report.min_fidelity() < 1.0 - overrides.tolerance) {
    outcome.exit_code = kExitInvalid;
    outcome.message = "branch fidelity " + std::to_string(report.min_fidelity()) +
                      " below threshold";
  }
  outcome.report = std::move(report);
  return outcome;
}

VerifyOutcome verify_scenario(const Scenario& s, double tolerance) {
  const ScenarioInputs inputs = build_inputs(s);
  VerifyOutcome outcome;
  outcome.verdict = feasibility(inputs.resource, teleported_dim(s));
  if (!outcome.verdict.feasible) {
    outcome.exit_code = kExitInfeasible;
    return outcome;
  }
  const Protocol protocol = synthesize(inputs.resource, s.dims.n1, inputs.phase, inputs.options);
  outcome.condition_residual =
      condition_residual(protocol.unitary, inputs.resource, inputs.phase, inputs.psi0);
  outcome.constraint_residual = constraint_residual(protocol.unitary, inputs.resource, inputs.phase);
  outcome.unitarity_defect = unitarity_defect(protocol.unitary.matrix());
  for (std::size_t i = 1; i <= s.dims.n1; ++i) {
    for (std::size_t k = 1; k <= s.dims.n2; ++k) {
      outcome.unitarity_defect =
          std::max(outcome.unitarity_defect, unitarity_defect(protocol.recovery.op(i, k)));
    }
  }
  const bool ok = outcome.condition_residual <= tolerance &&
                  outcome.constraint_residual <= tolerance && outcome.unitarity_defect <= tolerance;
  outcome.exit_code = ok ? kExitOk : kExitInvalid;
  return outcome;
}

}  // namespace qtp
