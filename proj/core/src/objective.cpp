#include "sspkit/objective.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "sspkit/errors.hpp"

namespace sspkit {

std::string to_string(ObjectiveKind kind) {
  switch (kind) {
    case ObjectiveKind::Revenue: return "revenue";
    case ObjectiveKind::Efficiency: return "efficiency";
    case ObjectiveKind::Welfare: return "welfare";
    case ObjectiveKind::Custom: return "custom";
  }
  return "unknown";
}

ObjectiveKind objective_kind_from_string(const std::string& name) {
  if (name == "revenue") return ObjectiveKind::Revenue;
  if (name == "efficiency") return ObjectiveKind::Efficiency;
  if (name == "welfare") return ObjectiveKind::Welfare;
  if (name == "custom") return ObjectiveKind::Custom;
  throw DomainError("unknown objective kind '" + name + "'");
}

TypeDistribution TypeDistribution::uniform(std::size_t agents, std::size_t grid_points) {
  TypeDistribution d;
  d.weights.assign(agents, std::vector<double>(grid_points, 1.0 / static_cast<double>(grid_points)));
  return d;
}

void TypeDistribution::validate(std::size_t agents, std::size_t grid_points) const {
  if (weights.size() != agents) {
    std::ostringstream msg;
    msg << "distribution lists " << weights.size() << " agents, mechanism has " << agents;
    throw DomainError(msg.str());
  }
  for (std::size_t i = 0; i < agents; ++i) {
    if (weights[i].size() != grid_points) {
      std::ostringstream msg;
      msg << "distribution of agent " << i << " has " << weights[i].size()
          << " weights, grid has " << grid_points << " points";
      throw DomainError(msg.str());
    }
    double sum = 0.0;
    for (double w : weights[i]) {
      if (!(w >= 0.0)) throw DomainError("distribution weights must be nonnegative");
      sum += w;
    }
    if (std::abs(sum - 1.0) > 1e-12) {
      std::ostringstream msg;
      msg << "weights of agent " << i << " sum to " << sum << ", not 1";
      throw DomainError(msg.str());
    }
  }
}

ObjectiveSpec ObjectiveSpec::uniform(ObjectiveKind kind, const MechanismTable& mech) {
  ObjectiveSpec spec;
  spec.kind = kind;
  spec.distribution = TypeDistribution::uniform(mech.agents(), mech.grid().size());
  return spec;
}

double ObjectiveSpec::lipschitz() const {
  switch (kind) {
    case ObjectiveKind::Revenue:
    case ObjectiveKind::Efficiency: return 1.0;
    case ObjectiveKind::Welfare: return 2.0;
    case ObjectiveKind::Custom: {
      double worst = 0.0;
      for (std::size_t k = 0; k < custom_x_weight.size() && k < custom_p_weight.size(); ++k) {
        worst = std::max(worst, std::abs(custom_x_weight[k]) + std::abs(custom_p_weight[k]));
      }
      return worst;
    }
  }
  return 0.0;
}

double evaluate_objective(const MechanismTable& mech, const ObjectiveSpec& spec) {
  const std::size_t n = mech.agents();
  const auto& grid = mech.grid();
  spec.distribution.validate(n, grid.size());
  if (spec.kind == ObjectiveKind::Custom) {
    const std::size_t expected = mech.profile_count() * n;
    if (spec.custom_x_weight.size() != expected || spec.custom_p_weight.size() != expected) {
      throw DomainError("custom objective weights must have profiles x agents entries");
    }
  }
  double total = 0.0;
  for (std::size_t p = 0; p < mech.profile_count(); ++p) {
    double prob = 1.0;
    double flow = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const std::size_t k = mech.type_index(p, i);
      prob *= spec.distribution.weights[i][k];
      const double x = mech.allocation(p, i);
      const double pay = mech.payment(p, i);
      const double t = grid[k];
      switch (spec.kind) {
        case ObjectiveKind::Revenue: flow += pay; break;
        case ObjectiveKind::Efficiency: flow += x * t; break;
        case ObjectiveKind::Welfare: flow += x * t - pay; break;
        case ObjectiveKind::Custom:
          flow += spec.custom_x_weight[p * n + i] * x + spec.custom_p_weight[p * n + i] * pay;
          break;
      }
    }
    total += prob * flow;
  }
  return total;
}

GapReport objective_gap(const MechanismTable& original, const MechanismTable& other,
                        const ObjectiveSpec& spec) {
  const auto dist = closeness(original, other);
  GapReport rep;
  rep.original_value = evaluate_objective(original, spec);
  rep.strictified_value = evaluate_objective(other, spec);
  rep.gap = rep.original_value - rep.strictified_value;
  rep.epsilon = std::max(dist.sup_dx, dist.sup_dp);
  rep.lipschitz = spec.lipschitz();
  rep.bound = rep.lipschitz * static_cast<double>(original.agents()) * rep.epsilon;
  rep.bound_holds = rep.gap <= rep.bound + 1e-12;
  return rep;
}

GapReport objective_gap(const MechanismTable& original, const StrictifiedMechanism& strictified,
                        const ObjectiveSpec& spec) {
  return objective_gap(original, strictified.mech, spec);
}

}  // namespace sspkit
