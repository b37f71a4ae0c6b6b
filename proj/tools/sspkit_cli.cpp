// sspkit command-line front end: check, envelope, strictify, objective, demo.
//
// Exit codes: 0 strictly strategy-proof, 1 weakly only, 2 not weakly
// strategy-proof, 3 input error, 4 internal inconsistency.

#include <CLI11.hpp>

#include <cstdint>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "sspkit/sspkit.hpp"

namespace {

using nlohmann::json;
using namespace sspkit;

enum ExitCode : int { kStrict = 0, kWeakOnly = 1, kNotSP = 2, kInput = 3, kInternal = 4 };

struct RunConfig {
  std::string subcommand;
  std::vector<std::string> inputs;
  std::string out;
  std::string report;
  std::string csv;
  double tol = kDefaultTol;
  double strict_margin = kDefaultStrictIncrement;
  unsigned threads = 1;
  std::uint64_t seed = 1;
  std::string interp = "linear";

  // check
  std::string ir;
  // strictify
  double eps = 0.01;
  std::string rule = "linear";
  bool no_canonicalize = false;
  // objective
  std::string kind = "revenue";
  std::string dist = "uniform";
  // demo
  std::string name;
  std::size_t agents = 2;
  std::size_t grid_points = 3;
  std::string grid;
  double price = 0.5;
  double x = 0.5;
  double p = 0.0;
  bool strict = false;
  bool canonicalize = false;
  std::string feasibility = "sum_le_1";
};

json config_echo(const RunConfig& c) {
  json cfg = {{"subcommand", c.subcommand}, {"inputs", c.inputs},   {"threads", c.threads},
              {"seed", c.seed},             {"interp", c.interp}};
  if (c.subcommand == "check") cfg["ir"] = c.ir;
  if (c.subcommand == "strictify") {
    cfg["eps"] = c.eps;
    cfg["rule"] = c.rule;
    cfg["canonicalize"] = !c.no_canonicalize;
  }
  if (c.subcommand == "objective") {
    cfg["kind"] = c.kind;
    cfg["dist"] = c.dist;
  }
  if (c.subcommand == "demo") {
    cfg["name"] = c.name;
    cfg["agents"] = c.agents;
    cfg["grid_points"] = c.grid_points;
    cfg["grid"] = c.grid;
  }
  return cfg;
}

json report_header(const RunConfig& c) {
  return {{"tool", "sspkit"},
          {"version", kVersion},
          {"config", config_echo(c)},
          {"tolerances",
           {{"tol", c.tol},
            {"strict_margin", c.strict_margin},
            {"envelope_gate", kEnvelopeGate},
            {"feasibility_tol", kFeasibilityTol}}}};
}

void emit_report(const RunConfig& c, const json& doc) {
  if (!c.report.empty()) write_json_file(c.report, doc);
}

std::vector<double> parse_list(const std::string& text, const std::string& what) {
  std::vector<double> out;
  std::stringstream in(text);
  std::string item;
  while (std::getline(in, item, ',')) {
    try {
      std::size_t used = 0;
      out.push_back(std::stod(item, &used));
      if (used != item.size()) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      throw InputError(what, "cannot parse '" + item + "' as a number");
    }
  }
  if (out.empty()) throw InputError(what, "expected a comma-separated list of numbers");
  return out;
}

TypeGrid demo_grid(const RunConfig& c) {
  if (!c.grid.empty()) return TypeGrid(parse_list(c.grid, "--grid"));
  return TypeGrid::uniform(c.grid_points);
}

VerifyOptions verify_options(const RunConfig& c) {
  VerifyOptions o;
  o.tol = c.tol;
  o.strict_increment = c.strict_margin;
  o.interp = interpolation_from_string(c.interp);
  o.threads = c.threads;
  return o;
}

int verdict_code(const VerificationResult& r) {
  if (r.strict_sp) return kStrict;
  return r.weak_sp ? kWeakOnly : kNotSP;
}

int run_check(const RunConfig& c) {
  const auto file = load_mechanism(c.inputs.at(0));
  const auto opts = verify_options(c);
  const auto rep = characterize(file.payoff, file.mech, opts);
  json doc = report_header(c);
  doc["feasibility"] = to_json(check_feasibility(file.mech));
  doc["regularity"] = to_json(check_regularity(file.payoff));
  doc["weak"] = to_json(rep.weak);
  doc["strict"] = to_json(rep.strict);
  doc["characterization"] = to_json(rep);
  if (!c.ir.empty()) {
    auto w = parse_list(c.ir, "--ir");
    if (w.size() == 1) w.assign(file.mech.agents(), w[0]);
    try {
      doc["ir"] = to_json(check_ir(file.payoff, file.mech, w, opts));
    } catch (const PreconditionError& e) {
      doc["ir"] = {{"error", e.what()}};
    } catch (const DomainError& e) {
      throw InputError("--ir", e.what());
    }
  }
  const int code = rep.consistent ? verdict_code(rep.strict) : kInternal;
  doc["exit_code"] = code;
  emit_report(c, doc);

  std::cout << "weak SP:   " << (rep.weak.weak_sp ? "pass" : "FAIL") << "  (min loss " << rep.weak.min_loss
            << ")\n"
            << "strict SP: " << (rep.strict.strict_sp ? "pass" : "FAIL") << "  (margin "
            << rep.strict.strict_margin << ")\n"
            << "monotonicity: " << to_string(rep.strict.monotonicity)
            << ", envelope residual: " << rep.envelope_residual << " (" << c.interp << ")\n";
  if (!rep.strict.strict_sp && !rep.strict.witnesses.empty()) {
    const auto& w = rep.strict.witnesses.front();
    std::cout << "witness: agent " << w.agent + 1 << ", type " << w.true_type << " reporting "
              << w.report << ", loss " << w.loss << '\n';
  }
  if (!rep.consistent) std::cout << "INTERNAL_INCONSISTENCY: characterization violated\n";
  return code;
}

int run_envelope(const RunConfig& c) {
  const auto file = load_mechanism(c.inputs.at(0));
  const auto interp = interpolation_from_string(c.interp);
  const auto out = envelope_payments(file.payoff, file.mech, std::nullopt, interp);
  if (!c.out.empty()) save_mechanism(c.out, file.payoff, out);
  if (!c.csv.empty()) {
    std::ofstream csv(c.csv);
    if (!csv) throw InputError(c.csv, "cannot open file for writing");
    write_csv(csv, out);
  }
  json doc = report_header(c);
  doc["input_residual"] = envelope_residual(file.payoff, file.mech, interp);
  doc["output_residual"] = envelope_residual(file.payoff, out, interp);
  doc["sup_dp"] = closeness(file.mech, out).sup_dp;
  emit_report(c, doc);
  std::cout << "envelope payments written; input residual " << doc["input_residual"].get<double>()
            << '\n';
  return 0;
}

int run_strictify(const RunConfig& c) {
  const auto file = load_mechanism(c.inputs.at(0));
  StrictifyOptions opts;
  opts.rule = mixing_rule_from_string(c.rule);
  opts.canonicalize = !c.no_canonicalize;
  opts.interp = interpolation_from_string(c.interp);
  opts.tol = c.tol;
  opts.threads = c.threads;
  json doc = report_header(c);
  StrictifiedMechanism result{file.mech};
  try {
    result = strictify(file.payoff, file.mech, c.eps, opts);
  } catch (const PreconditionError& e) {
    doc["error"] = e.what();
    doc["exit_code"] = static_cast<int>(kNotSP);
    emit_report(c, doc);
    std::cerr << "sspkit strictify: " << e.what() << '\n';
    return kNotSP;
  }
  if (!c.out.empty()) save_mechanism(c.out, file.payoff, result.mech);
  doc["result"] = to_json(result);
  doc["feasibility"] = to_json(check_feasibility(result.mech));
  const int code = result.strict_sp ? kStrict : kWeakOnly;
  doc["exit_code"] = code;
  emit_report(c, doc);
  std::cout << "delta " << result.delta << " (" << to_string(result.rule_used) << "), sup|dX| "
            << result.sup_dx << ", sup|dP| " << result.sup_dp << ", strict margin "
            << result.strict_margin << '\n';
  if (result.fallback) std::cout << "note: proportional mixing was not strict; fell back to linear\n";
  if (result.substituted) std::cout << "note: sum_eq_1 input; used balanced_linear mixing\n";
  if (result.heuristic) std::cout << "warning: input payments are not envelope payments (HEURISTIC)\n";
  return code;
}

int run_objective(const RunConfig& c) {
  if (c.inputs.empty() || c.inputs.size() > 2) throw InputError("objective", "expects one or two mechanism files");
  const auto first = load_mechanism(c.inputs[0]);
  ObjectiveSpec spec = ObjectiveSpec::uniform(objective_kind_from_string(c.kind), first.mech);
  if (spec.kind == ObjectiveKind::Custom) throw InputError("--kind", "custom objectives are library-only");
  if (c.dist != "uniform") {
    std::ifstream in(c.dist);
    if (!in) throw InputError(c.dist, "cannot open weights file");
    json w;
    try {
      w = json::parse(in);
    } catch (const json::parse_error& e) {
      throw InputError(c.dist, e.what());
    }
    spec.distribution = distribution_from_json(w, first.mech.agents(), first.mech.grid().size());
  }
  json doc = report_header(c);
  const double value = evaluate_objective(first.mech, spec);
  doc["value"] = value;
  std::cout << c.kind << ": " << value << '\n';
  if (c.inputs.size() == 2) {
    const auto second = load_mechanism(c.inputs[1]);
    if (!first.mech.same_shape(second.mech)) throw InputError(c.inputs[1], "grid or agent count differs");
    const auto gap = objective_gap(first.mech, second.mech, spec);
    doc["gap"] = to_json(gap);
    std::cout << "gap " << gap.gap << " (bound " << gap.bound << ", " << (gap.bound_holds ? "holds" : "VIOLATED")
              << ")\n";
  }
  emit_report(c, doc);
  return 0;
}

int run_demo(const RunConfig& c) {
  const auto grid = demo_grid(c);
  const auto payoff = PayoffModel::product();
  const auto interp = interpolation_from_string(c.interp);
  std::optional<MechanismTable> mech;
  if (c.name == "second_price") {
    mech = make_second_price(c.agents, grid);
    if (c.canonicalize) mech = envelope_payments(payoff, *mech, std::nullopt, interp);
  } else if (c.name == "posted_price") {
    mech = make_posted_price(grid, c.price);
  } else if (c.name == "constant") {
    mech = make_constant(c.agents, grid, c.x, c.p, feasibility_from_string(c.feasibility));
  } else if (c.name == "random_monotone") {
    mech = envelope_payments(payoff, make_random_monotone(c.agents, grid, c.seed, c.strict), std::nullopt,
                             interp);
  } else {
    throw CLI::ValidationError("--name", "unknown demo '" + c.name + "'");
  }
  if (c.out.empty()) {
    std::cout << mechanism_to_json(payoff, *mech).dump(2) << '\n';
  } else {
    save_mechanism(c.out, payoff, *mech);
    std::cout << "wrote " << c.out << '\n';
  }
  json doc = report_header(c);
  doc["profiles"] = mech->profile_count();
  emit_report(c, doc);
  return 0;
}

void shared_flags(CLI::App* sub, RunConfig& c) {
  sub->add_option("--tol", c.tol, "Strictness / weak-SP tolerance")->check(CLI::NonNegativeNumber);
  sub->add_option("--threads", c.threads, "Worker threads for verification")->check(CLI::PositiveNumber);
  sub->add_option("--seed", c.seed, "Seed for all randomness");
  sub->add_option("--report", c.report, "Write a JSON report to this path");
  sub->add_option("--interp", c.interp, "Continuum interpolation of grid slices")
      ->check(CLI::IsMember({"linear", "left_step", "step"}));
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Strategy-proofness verification and strictification of grid mechanisms"};
  app.set_version_flag("--version", std::string(sspkit::kVersion));
  app.require_subcommand(1);
  RunConfig c;

  auto* check = app.add_subcommand("check", "Verify weak/strict strategy-proofness and IR");
  check->add_option("mechanism", c.inputs, "Mechanism JSON file")->required()->check(CLI::ExistingFile);
  check->add_option("--strict-margin", c.strict_margin, "Minimum increment for strict monotonicity")
      ->check(CLI::NonNegativeNumber);
  check->add_option("--ir", c.ir, "Outside option w, or one per agent: w1,w2,...");
  shared_flags(check, c);

  auto* envelope = app.add_subcommand("envelope", "Recompute envelope payments");
  envelope->add_option("mechanism", c.inputs, "Mechanism JSON file")->required()->check(CLI::ExistingFile);
  envelope->add_option("--out", c.out, "Output mechanism JSON");
  envelope->add_option("--csv", c.csv, "Also write the table as CSV");
  shared_flags(envelope, c);

  auto* strictify_cmd = app.add_subcommand("strictify", "Perturb into a strictly strategy-proof mechanism");
  strictify_cmd->add_option("mechanism", c.inputs, "Mechanism JSON file")->required()->check(CLI::ExistingFile);
  strictify_cmd->add_option("--eps", c.eps, "Uniform closeness bound")->check(CLI::PositiveNumber);
  strictify_cmd->add_option("--rule", c.rule, "Mixing rule")
      ->check(CLI::IsMember({"linear", "proportional", "balanced_linear"}));
  strictify_cmd->add_flag("--no-canonicalize", c.no_canonicalize,
                          "Measure closeness against the input payments as given");
  strictify_cmd->add_option("--out", c.out, "Output mechanism JSON");
  shared_flags(strictify_cmd, c);

  auto* objective = app.add_subcommand("objective", "Evaluate the principal's objective (two files: gap)");
  objective->add_option("mechanisms", c.inputs, "One or two mechanism JSON files")
      ->required()
      ->expected(1, 2)
      ->check(CLI::ExistingFile);
  objective->add_option("--kind", c.kind, "Objective kind")
      ->check(CLI::IsMember({"revenue", "efficiency", "welfare"}));
  objective->add_option("--dist", c.dist, "'uniform' or a weights JSON file");
  shared_flags(objective, c);

  auto* demo = app.add_subcommand("demo", "Write a builtin mechanism");
  demo->add_option("--name", c.name, "second_price | posted_price | constant | random_monotone")->required();
  demo->add_option("--agents", c.agents, "Number of agents")->check(CLI::PositiveNumber);
  demo->add_option("--grid-points", c.grid_points, "Uniform grid size")->check(CLI::Range(2, 1000000));
  demo->add_option("--grid", c.grid, "Explicit grid, comma-separated");
  demo->add_option("--price", c.price, "Posted price");
  demo->add_option("--x", c.x, "Constant allocation");
  demo->add_option("--p", c.p, "Constant payment");
  demo->add_option("--feasibility", c.feasibility, "Feasibility of the constant demo")
      ->check(CLI::IsMember({"free", "sum_le_1", "sum_eq_1"}));
  demo->add_flag("--strict", c.strict, "random_monotone: strictly increasing slices");
  demo->add_flag("--canonicalize", c.canonicalize, "second_price: replace payments by envelope payments");
  demo->add_option("--out", c.out, "Output mechanism JSON (stdout when omitted)");
  shared_flags(demo, c);

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kInput;
  }

  try {
    c.subcommand = app.get_subcommands().front()->get_name();
    if (c.subcommand == "check") return run_check(c);
    if (c.subcommand == "envelope") return run_envelope(c);
    if (c.subcommand == "strictify") return run_strictify(c);
    if (c.subcommand == "objective") return run_objective(c);
    if (c.subcommand == "demo") return run_demo(c);
  } catch (const InputError& e) {
    std::cerr << "sspkit: input error: " << e.what() << '\n';
    return kInput;
  } catch (const CLI::ValidationError& e) {
    std::cerr << "sspkit: " << e.what() << '\n';
    return kInput;
  } catch (const DomainError& e) {
    std::cerr << "sspkit: input error: " << e.what() << '\n';
    return kInput;
  } catch (const ConstraintError& e) {
    std::cerr << "sspkit: input error: " << e.what() << '\n';
    return kInput;
  } catch (const std::exception& e) {
    std::cerr << "sspkit: internal error: " << e.what() << '\n';
    return kInternal;
  }
  return kInput;
}
