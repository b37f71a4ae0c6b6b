#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <string_view>

#include <nlohmann/json.hpp>

#include "sspkit/mechanism.hpp"
#include "sspkit/objective.hpp"
#include "sspkit/payoff_model.hpp"
#include "sspkit/strictifier.hpp"
#include "sspkit/verifier.hpp"

namespace sspkit {

/// Contents of a mechanism file:
///
///   {"agents": n, "grid": [...], "feasibility": "free"|"sum_le_1"|"sum_eq_1",
///    "allocation": nested array of depth n over the grid, leaves [X_1..X_n],
///    "payments":   same shape, leaves [P_1..P_n],
///    "payoff": {"family": "product"|"power"|"quadratic"|"tabulated",
///               "params": {"a": ..} | {"c": ..} | {"g2_bound": ..},
///               "samples": {"x": [...], "t": [...], "g2": [[...]], "g0": [...]}}}
struct MechanismFile {
  PayoffModel payoff;
  MechanismTable mech;
};

/// Throws InputError naming the offending field.
MechanismFile mechanism_from_json(const nlohmann::json& doc);
MechanismFile parse_mechanism(std::string_view text);
MechanismFile load_mechanism(const std::filesystem::path& path);

nlohmann::json payoff_to_json(const PayoffModel& model);
PayoffModel payoff_from_json(const nlohmann::json& doc);

nlohmann::json mechanism_to_json(const PayoffModel& model, const MechanismTable& mech);
void save_mechanism(const std::filesystem::path& path, const PayoffModel& model,
                    const MechanismTable& mech);

/// One row per profile: t1..tn, X1..Xn, P1..Pn.
void write_csv(std::ostream& out, const MechanismTable& mech);

/// Weights file: either one list shared by all agents or one list per agent.
TypeDistribution distribution_from_json(const nlohmann::json& doc, std::size_t agents,
                                        std::size_t grid_points);

nlohmann::json to_json(const Deviation& d);
nlohmann::json to_json(const VerificationResult& r);
nlohmann::json to_json(const MonotonicityReport& r, std::size_t max_slices = 16);
nlohmann::json to_json(const CharacterizationReport& r);
nlohmann::json to_json(const IRReport& r);
nlohmann::json to_json(const RegularityReport& r);
nlohmann::json to_json(const StrictifiedMechanism& s);
nlohmann::json to_json(const GapReport& g);
nlohmann::json to_json(const FeasibilityVerdict& v, std::size_t max_violations = 16);

void write_json_file(const std::filesystem::path& path, const nlohmann::json& doc);

}  // namespace sspkit
