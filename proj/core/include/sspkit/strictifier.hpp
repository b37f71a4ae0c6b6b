#pragma once

#include <cstddef>
#include <string>

#include "sspkit/envelope.hpp"
#include "sspkit/mechanism.hpp"
#include "sspkit/payoff_model.hpp"
#include "sspkit/verifier.hpp"

namespace sspkit {

/// Strictly increasing mixing rules m_i(t) for X_delta = delta m + (1 - delta) X.
///
///   Proportional    t_i / sum_j t_j  (1/n at the all-zero profile)
///   Linear          t_i / n
///   BalancedLinear  t_i / n + (1 - sum_j t_j / n) / n; sums to exactly 1,
///                   so it keeps sum_i X_i = 1 feasibility
enum class MixingRule { Proportional, Linear, BalancedLinear };

std::string to_string(MixingRule rule);
MixingRule mixing_rule_from_string(const std::string& name);

/// Mixing weight of `agent` at `profile`.
double mixing_term(const MechanismTable& mech, std::size_t profile, std::size_t agent,
                   MixingRule rule);

/// delta-mixture of the allocation with `rule`; payments are copied unchanged.
/// DomainError for delta outside (0, 1); ConstraintError for Linear on a
/// sum_eq_1 mechanism.
MechanismTable perturb_allocation(const MechanismTable& mech, double delta, MixingRule rule);

struct Closeness {
  double sup_dx = 0.0;
  double sup_dp = 0.0;
};

/// Coordinate-wise sup-norm distances; DomainError on shape mismatch.
Closeness closeness(const MechanismTable& a, const MechanismTable& b);

struct StrictifyOptions {
  MixingRule rule = MixingRule::Linear;
  bool canonicalize = true;
  Interpolation interp = Interpolation::Linear;
  double tol = kDefaultTol;
  double delta_floor = 1e-12;
  unsigned threads = 1;
};

struct StrictifiedMechanism {
  MechanismTable mech;
  double delta = 0.0;
  double epsilon = 0.0;
  MixingRule rule = MixingRule::Linear;       // requested
  MixingRule rule_used = MixingRule::Linear;  // after fallback or substitution
  // Distances to the reference payments (envelope-canonical input by default).
  double sup_dx = 0.0;
  double sup_dp = 0.0;
  // Distance to the raw input payments.
  double sup_dp_input = 0.0;
  double input_residual = 0.0;
  double strict_margin = 0.0;
  bool strict_sp = false;
  bool canonicalized = false;
  bool heuristic = false;
  // Proportional mixing left some slice non-strict and Linear took over.
  bool fallback = false;
  // Linear was requested on a sum_eq_1 mechanism and BalancedLinear was used.
  bool substituted = false;
  std::size_t iterations = 0;
};

/// Builds a feasible, strictly strategy-proof mechanism uniformly epsilon-close
/// to a feasible, weakly strategy-proof input: halves delta from
/// min(epsilon, 0.5) until the envelope payments of the mixed allocation,
/// anchored at the input's type-0 payments, lie within epsilon of the
/// reference payments.
StrictifiedMechanism strictify(const PayoffModel& model, const MechanismTable& mech,
                               double epsilon, const StrictifyOptions& opts = {});

}  // namespace sspkit
