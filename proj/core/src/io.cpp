#include "sspkit/io.hpp"

#include <fstream>
#include <ostream>
#include <sstream>

#include "sspkit/errors.hpp"

namespace sspkit {

using nlohmann::json;

namespace {

const json& require(const json& doc, const std::string& key, const std::string& where) {
  if (!doc.is_object()) throw InputError(where, "expected an object");
  auto it = doc.find(key);
  if (it == doc.end()) throw InputError(where.empty() ? key : where + "." + key, "missing field");
  return *it;
}

double number_at(const json& node, const std::string& where) {
  if (!node.is_number()) throw InputError(where, "expected a number");
  return node.get<double>();
}

std::vector<double> number_list(const json& node, const std::string& where) {
  if (!node.is_array()) throw InputError(where, "expected an array of numbers");
  std::vector<double> out;
  out.reserve(node.size());
  for (std::size_t k = 0; k < node.size(); ++k) {
    out.push_back(number_at(node[k], where + "[" + std::to_string(k) + "]"));
  }
  return out;
}

// Reads a depth-n nested array of per-agent leaves into profile-major order.
void read_tensor(const json& node, std::size_t depth, std::size_t agents, std::size_t m,
                 const std::string& where, std::vector<double>& out) {
  if (!node.is_array()) throw InputError(where, "expected an array");
  if (depth == agents) {
    if (node.size() != agents) {
      throw InputError(where, "expected " + std::to_string(agents) + " per-agent values, got " +
                                  std::to_string(node.size()));
    }
    for (std::size_t i = 0; i < agents; ++i) {
      out.push_back(number_at(node[i], where + "[" + std::to_string(i) + "]"));
    }
    return;
  }
  if (node.size() != m) {
    throw InputError(where, "expected " + std::to_string(m) + " entries (one per grid point), got " +
                                std::to_string(node.size()));
  }
  for (std::size_t k = 0; k < m; ++k) {
    read_tensor(node[k], depth + 1, agents, m, where + "[" + std::to_string(k) + "]", out);
  }
}

json write_tensor(std::span<const double> values, std::size_t agents, std::size_t m,
                  std::size_t depth, std::size_t& cursor) {
  json node = json::array();
  if (depth == agents) {
    for (std::size_t i = 0; i < agents; ++i) node.push_back(values[cursor++]);
    return node;
  }
  for (std::size_t k = 0; k < m; ++k) node.push_back(write_tensor(values, agents, m, depth + 1, cursor));
  return node;
}

}  // namespace

PayoffModel payoff_from_json(const json& doc) {
  const std::string where = "payoff";
  const auto& fam = require(doc, "family", where);
  if (!fam.is_string()) throw InputError("payoff.family", "expected a string");
  const std::string family = fam.get<std::string>();
  const json params = doc.contains("params") ? doc.at("params") : json::object();
  if (!params.is_object()) throw InputError("payoff.params", "expected an object");
  try {
    if (family == "product") return PayoffModel::product();
    if (family == "power") return PayoffModel::power(number_at(require(params, "a", "payoff.params"), "payoff.params.a"));
    if (family == "quadratic") {
      return PayoffModel::quadratic(number_at(require(params, "c", "payoff.params"), "payoff.params.c"));
    }
    if (family == "tabulated") {
      const auto& samples = require(doc, "samples", where);
      PayoffLattice lat;
      lat.x = number_list(require(samples, "x", "payoff.samples"), "payoff.samples.x");
      lat.t = number_list(require(samples, "t", "payoff.samples"), "payoff.samples.t");
      const auto& rows = require(samples, "g2", "payoff.samples");
      if (!rows.is_array() || rows.size() != lat.x.size()) {
        throw InputError("payoff.samples.g2", "expected one row per x sample");
      }
      for (std::size_t ix = 0; ix < rows.size(); ++ix) {
        const std::string row_where = "payoff.samples.g2[" + std::to_string(ix) + "]";
        auto row = number_list(rows[ix], row_where);
        if (row.size() != lat.t.size()) throw InputError(row_where, "expected one value per t sample");
        lat.g2.insert(lat.g2.end(), row.begin(), row.end());
      }
      lat.g0 = number_list(require(samples, "g0", "payoff.samples"), "payoff.samples.g0");
      std::optional<double> bound;
      if (params.contains("g2_bound")) bound = number_at(params.at("g2_bound"), "payoff.params.g2_bound");
      return PayoffModel::tabulated(std::move(lat), bound);
    }
  } catch (const ConstraintError& e) {
    throw InputError(where, e.what());
  }
  throw InputError("payoff.family", "unknown family '" + family + "'");
}

json payoff_to_json(const PayoffModel& model) {
  json doc;
  doc["family"] = to_string(model.family());
  switch (model.family()) {
    case PayoffFamily::Product: doc["params"] = json::object(); break;
    case PayoffFamily::Power: doc["params"] = {{"a", model.exponent()}}; break;
    case PayoffFamily::Quadratic: doc["params"] = {{"c", model.curvature()}}; break;
    case PayoffFamily::Tabulated: {
      const auto& lat = *model.lattice();
      doc["params"] = {{"g2_bound", model.g2_bound()}};
      json rows = json::array();
      for (std::size_t ix = 0; ix < lat.x.size(); ++ix) {
        rows.push_back(std::vector<double>(lat.g2.begin() + static_cast<std::ptrdiff_t>(ix * lat.t.size()),
                                           lat.g2.begin() + static_cast<std::ptrdiff_t>((ix + 1) * lat.t.size())));
      }
      doc["samples"] = {{"x", lat.x}, {"t", lat.t}, {"g2", rows}, {"g0", lat.g0}};
      break;
    }
  }
  return doc;
}

MechanismFile mechanism_from_json(const json& doc) {
  if (!doc.is_object()) throw InputError("", "mechanism file must hold a JSON object");
  const auto& agents_node = require(doc, "agents", "");
  if (!agents_node.is_number_integer() || agents_node.get<long long>() < 1) {
    throw InputError("agents", "expected a positive integer");
  }
  const auto agents = static_cast<std::size_t>(agents_node.get<long long>());
  std::vector<double> points = number_list(require(doc, "grid", ""), "grid");
  std::optional<TypeGrid> grid;
  try {
    grid.emplace(std::move(points));
  } catch (const DomainError& e) {
    throw InputError("grid", e.what());
  }
  Feasibility feas = Feasibility::Free;
  const auto& feas_node = require(doc, "feasibility", "");
  if (!feas_node.is_string()) throw InputError("feasibility", "expected a string");
  try {
    feas = feasibility_from_string(feas_node.get<std::string>());
  } catch (const DomainError& e) {
    throw InputError("feasibility", e.what());
  }
  std::vector<double> alloc, pay;
  read_tensor(require(doc, "allocation", ""), 0, agents, grid->size(), "allocation", alloc);
  read_tensor(require(doc, "payments", ""), 0, agents, grid->size(), "payments", pay);
  PayoffModel payoff = doc.contains("payoff") ? payoff_from_json(doc.at("payoff")) : PayoffModel::product();
  try {
    return MechanismFile{payoff, MechanismTable(agents, std::move(*grid), std::move(alloc), std::move(pay), feas)};
  } catch (const DomainError& e) {
    throw InputError("allocation", e.what());
  }
}

MechanismFile parse_mechanism(std::string_view text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw InputError("json", e.what());
  }
  return mechanism_from_json(doc);
}

MechanismFile load_mechanism(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw InputError(path.string(), "cannot open file");
  std::stringstream buf;
  buf << in.rdbuf();
  try {
    return parse_mechanism(buf.str());
  } catch (const InputError& e) {
    throw InputError(path.string() + ": " + e.where(), e.detail());
  }
}

json mechanism_to_json(const PayoffModel& model, const MechanismTable& mech) {
  json doc;
  doc["agents"] = mech.agents();
  doc["grid"] = std::vector<double>(mech.grid().points().begin(), mech.grid().points().end());
  doc["feasibility"] = to_string(mech.feasibility());
  std::size_t cursor = 0;
  doc["allocation"] = write_tensor(mech.allocations(), mech.agents(), mech.grid().size(), 0, cursor);
  cursor = 0;
  doc["payments"] = write_tensor(mech.payments(), mech.agents(), mech.grid().size(), 0, cursor);
  doc["payoff"] = payoff_to_json(model);
  return doc;
}

void write_json_file(const std::filesystem::path& path, const json& doc) {
  std::ofstream out(path);
  if (!out) throw InputError(path.string(), "cannot open file for writing");
  out << doc.dump(2) << '\n';
  if (!out) throw InputError(path.string(), "write failed");
}

void save_mechanism(const std::filesystem::path& path, const PayoffModel& model,
                    const MechanismTable& mech) {
  write_json_file(path, mechanism_to_json(model, mech));
}

void write_csv(std::ostream& out, const MechanismTable& mech) {
  const std::size_t n = mech.agents();
  for (std::size_t i = 1; i <= n; ++i) out << (i > 1 ? "," : "") << 't' << i;
  for (std::size_t i = 1; i <= n; ++i) out << ",X" << i;
  for (std::size_t i = 1; i <= n; ++i) out << ",P" << i;
  out << '\n';
  const auto old_precision = out.precision(17);
  for (std::size_t p = 0; p < mech.profile_count(); ++p) {
    for (std::size_t i = 0; i < n; ++i) out << (i > 0 ? "," : "") << mech.grid()[mech.type_index(p, i)];
    for (std::size_t i = 0; i < n; ++i) out << ',' << mech.allocation(p, i);
    for (std::size_t i = 0; i < n; ++i) out << ',' << mech.payment(p, i);
    out << '\n';
  }
  out.precision(old_precision);
}

TypeDistribution distribution_from_json(const json& doc, std::size_t agents, std::size_t grid_points) {
  TypeDistribution dist;
  if (!doc.is_array() || doc.empty()) throw InputError("weights", "expected a list of weights");
  if (doc[0].is_array()) {
    for (std::size_t i = 0; i < doc.size(); ++i) {
      dist.weights.push_back(number_list(doc[i], "weights[" + std::to_string(i) + "]"));
    }
  } else {
    dist.weights.assign(agents, number_list(doc, "weights"));
  }
  try {
    dist.validate(agents, grid_points);
  } catch (const DomainError& e) {
    throw InputError("weights", e.what());
  }
  return dist;
}

json to_json(const Deviation& d) {
  return {{"agent", d.agent},       {"opponents", d.opponents}, {"true_type", d.true_type},
          {"report", d.report},     {"loss", d.loss}};
}

json to_json(const VerificationResult& r) {
  json w = json::array();
  for (const auto& d : r.witnesses) w.push_back(to_json(d));
  return {{"weak_sp", r.weak_sp},
          {"strict_sp", r.strict_sp},
          {"tol", r.tol},
          {"min_loss", r.min_loss},
          {"strict_margin", r.strict_margin},
          {"monotonicity", to_string(r.monotonicity)},
          {"envelope_residual", r.envelope_residual},
          {"deviations_checked", r.deviations_checked},
          {"argmin", to_json(r.argmin)},
          {"witnesses", w}};
}

json to_json(const MonotonicityReport& r, std::size_t max_slices) {
  json bad = json::array();
  for (const auto& s : r.slices) {
    if (bad.size() >= max_slices) break;
    const bool failing = r.mode == MonotonicityMode::Weak ? s.cls == Monotonicity::NonMonotone
                                                          : s.cls != Monotonicity::Strict;
    if (!failing) continue;
    bad.push_back({{"agent", s.agent},
                   {"slice_base", s.base},
                   {"class", to_string(s.cls)},
                   {"min_increment", s.min_increment},
                   {"pair", {s.lo, s.hi}}});
  }
  return {{"mode", r.mode == MonotonicityMode::Weak ? "weak" : "strict"},
          {"margin", r.margin},
          {"pass", r.pass},
          {"worst", to_string(r.worst)},
          {"failing_slices", bad}};
}

json to_json(const CharacterizationReport& r) {
  json imps = json::array();
  for (const auto& imp : r.implications) {
    imps.push_back({{"name", imp.name}, {"premise", imp.premise}, {"holds", imp.holds}});
  }
  return {{"weak_monotonicity", to_json(r.weak_monotonicity)},
          {"strict_monotonicity", to_json(r.strict_monotonicity)},
          {"envelope_residual", r.envelope_residual},
          {"implications", imps},
          {"resolution_limited", r.resolution_limited},
          {"consistent", r.consistent}};
}

json to_json(const IRReport& r) {
  json w = json::array();
  for (const auto& x : r.witnesses) {
    w.push_back({{"agent", x.agent}, {"opponents", x.opponents}, {"type", x.type},
                 {"utility", x.utility}, {"outside", x.outside}});
  }
  return {{"outside", r.outside},
          {"reduction_pass", r.reduction_pass},
          {"reduction_min_slack", r.reduction_min_slack},
          {"direct_pass", r.direct_pass},
          {"direct_min_slack", r.direct_min_slack},
          {"agree", r.agree},
          {"witnesses", w}};
}

json to_json(const RegularityReport& r) {
  return {{"resolution", r.resolution},
          {"fd_max_error", r.fd_max_error},
          {"fd_pass", r.fd_pass},
          {"single_crossing", r.single_crossing},
          {"single_crossing_margin", r.single_crossing_margin},
          {"g2_modulus", r.g2_modulus},
          {"modulus_step", r.modulus_step},
          {"g2_max_abs", r.g2_max_abs},
          {"bound_ok", r.bound_ok},
          {"pass", r.pass()}};
}

json to_json(const StrictifiedMechanism& s) {
  return {{"delta", s.delta},
          {"epsilon", s.epsilon},
          {"rule", to_string(s.rule)},
          {"rule_used", to_string(s.rule_used)},
          {"sup_dx", s.sup_dx},
          {"sup_dp", s.sup_dp},
          {"sup_dp_input", s.sup_dp_input},
          {"input_residual", s.input_residual},
          {"strict_sp", s.strict_sp},
          {"strict_margin", s.strict_margin},
          {"canonicalized", s.canonicalized},
          {"heuristic", s.heuristic},
          {"fallback", s.fallback},
          {"substituted", s.substituted},
          {"iterations", s.iterations}};
}

json to_json(const GapReport& g) {
  return {{"original", g.original_value}, {"strictified", g.strictified_value},
          {"gap", g.gap},                 {"epsilon", g.epsilon},
          {"lipschitz", g.lipschitz},     {"bound", g.bound},
          {"bound_holds", g.bound_holds}};
}

json to_json(const FeasibilityVerdict& v, std::size_t max_violations) {
  json bad = json::array();
  for (const auto& x : v.violations) {
    if (bad.size() >= max_violations) break;
    bad.push_back({{"types", x.types}, {"slack", x.slack}});
  }
  return {{"feasible", v.feasible}, {"worst_slack", v.worst_slack},
          {"violation_count", v.violations.size()}, {"violations", bad}};
}

}  // namespace sspkit
