#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "sspkit/mechanism.hpp"
#include "sspkit/strictifier.hpp"

namespace sspkit {

enum class ObjectiveKind { Revenue, Efficiency, Welfare, Custom };

std::string to_string(ObjectiveKind kind);
ObjectiveKind objective_kind_from_string(const std::string& name);

/// Independent per-agent probability weights over the grid points.
struct TypeDistribution {
  std::vector<std::vector<double>> weights;  // [agent][grid index]

  static TypeDistribution uniform(std::size_t agents, std::size_t grid_points);

  /// DomainError on shape mismatch, negative weights, or sums off 1 by > 1e-12.
  void validate(std::size_t agents, std::size_t grid_points) const;
};

/// Per-agent flow pi(x, p, t) integrated against the product distribution.
///   Revenue     p
///   Efficiency  x t
///   Welfare     x t - p
///   Custom      x_weight * x + p_weight * p, coefficients given per profile
///               and agent (index profile * n + agent)
struct ObjectiveSpec {
  ObjectiveKind kind = ObjectiveKind::Revenue;
  TypeDistribution distribution;
  std::vector<double> custom_x_weight;
  std::vector<double> custom_p_weight;

  static ObjectiveSpec uniform(ObjectiveKind kind, const MechanismTable& mech);

  /// Per-agent Lipschitz constant of pi in (x, p) under the sup norm.
  double lipschitz() const;
};

double evaluate_objective(const MechanismTable& mech, const ObjectiveSpec& spec);

struct GapReport {
  double original_value = 0.0;
  double strictified_value = 0.0;
  double gap = 0.0;        // original - strictified
  double epsilon = 0.0;    // max(sup_dx, sup_dp) between the two tables
  double lipschitz = 0.0;
  double bound = 0.0;      // lipschitz * n * epsilon
  bool bound_holds = false;
};

GapReport objective_gap(const MechanismTable& original, const StrictifiedMechanism& strictified,
                        const ObjectiveSpec& spec);
GapReport objective_gap(const MechanismTable& original, const MechanismTable& other,
                        const ObjectiveSpec& spec);

}  // namespace sspkit
