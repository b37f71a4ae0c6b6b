#include "sspkit/strictifier.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "sspkit/errors.hpp"

namespace sspkit {

std::string to_string(MixingRule rule) {
  switch (rule) {
    case MixingRule::Proportional: return "proportional";
    case MixingRule::Linear: return "linear";
    case MixingRule::BalancedLinear: return "balanced_linear";
  }
  return "unknown";
}

MixingRule mixing_rule_from_string(const std::string& name) {
  if (name == "proportional") return MixingRule::Proportional;
  if (name == "linear") return MixingRule::Linear;
  if (name == "balanced_linear") return MixingRule::BalancedLinear;
  throw DomainError("unknown mixing rule '" + name + "'");
}

double mixing_term(const MechanismTable& mech, std::size_t profile, std::size_t agent,
                   MixingRule rule) {
  const auto& grid = mech.grid();
  const std::size_t n = mech.agents();
  const double nd = static_cast<double>(n);
  const double own = grid[mech.type_index(profile, agent)];
  double total = 0.0;
  for (std::size_t j = 0; j < n; ++j) total += grid[mech.type_index(profile, j)];
  switch (rule) {
    case MixingRule::Proportional: return total == 0.0 ? 1.0 / nd : own / total;
    case MixingRule::Linear: return own / nd;
    case MixingRule::BalancedLinear: return own / nd + (1.0 - total / nd) / nd;
  }
  return 0.0;
}

MechanismTable perturb_allocation(const MechanismTable& mech, double delta, MixingRule rule) {
  if (!(delta > 0.0 && delta < 1.0)) {
    std::ostringstream msg;
    msg << "delta = " << delta << " must lie in (0, 1)";
    throw DomainError(msg.str());
  }
  if (rule == MixingRule::Linear && mech.feasibility() == Feasibility::SumEqOne) {
    throw ConstraintError("linear mixing cannot keep sum_i X_i = 1; use proportional or balanced_linear");
  }
  const std::size_t n = mech.agents();
  std::vector<double> alloc(mech.allocations().begin(), mech.allocations().end());
  for (std::size_t p = 0; p < mech.profile_count(); ++p) {
    for (std::size_t i = 0; i < n; ++i) {
      const double mixed = delta * mixing_term(mech, p, i, rule) + (1.0 - delta) * alloc[p * n + i];
      alloc[p * n + i] = std::clamp(mixed, 0.0, 1.0);
    }
  }
  return mech.with_allocation(std::move(alloc));
}

Closeness closeness(const MechanismTable& a, const MechanismTable& b) {
  if (!a.same_shape(b)) throw DomainError("closeness needs mechanisms on the same grid and agents");
  Closeness c;
  const auto xa = a.allocations(), xb = b.allocations();
  const auto pa = a.payments(), pb = b.payments();
  for (std::size_t k = 0; k < xa.size(); ++k) {
    c.sup_dx = std::max(c.sup_dx, std::abs(xa[k] - xb[k]));
    c.sup_dp = std::max(c.sup_dp, std::abs(pa[k] - pb[k]));
  }
  return c;
}

StrictifiedMechanism strictify(const PayoffModel& model, const MechanismTable& mech,
                               double epsilon, const StrictifyOptions& opts) {
  if (!(epsilon > 0.0)) throw DomainError("epsilon must be positive");
  const auto feasible = check_feasibility(mech);
  if (!feasible.feasible) {
    throw PreconditionError("strictify needs a feasible mechanism");
  }
  VerifyOptions vopts;
  vopts.tol = opts.tol;
  vopts.interp = opts.interp;
  vopts.threads = opts.threads;
  const auto weak = check_weak_sp(model, mech, vopts);
  if (!weak.weak_sp) {
    std::ostringstream msg;
    msg << "strictify needs a weakly strategy-proof mechanism (min loss " << weak.min_loss << ")";
    throw PreconditionError(msg.str());
  }

  StrictifiedMechanism out{mech};
  out.epsilon = epsilon;
  out.rule = opts.rule;
  out.input_residual = weak.envelope_residual;
  out.canonicalized = opts.canonicalize;
  out.heuristic = !opts.canonicalize && out.input_residual > kEnvelopeGate;

  const MechanismTable reference =
      opts.canonicalize ? envelope_payments(model, mech, std::nullopt, opts.interp) : mech;
  const BaseRow base = base_row_of(mech);

  MixingRule rule = opts.rule;
  if (rule == MixingRule::Linear && mech.feasibility() == Feasibility::SumEqOne) {
    rule = MixingRule::BalancedLinear;
    out.substituted = true;
  }
  const MixingRule linear_like =
      mech.feasibility() == Feasibility::SumEqOne ? MixingRule::BalancedLinear : MixingRule::Linear;

  double delta = std::min(epsilon, 0.5);
  while (true) {
    ++out.iterations;
    auto mixed = perturb_allocation(mech, delta, rule);
    if (rule == MixingRule::Proportional &&
        !check_monotonicity(mixed, MonotonicityMode::Strict).pass) {
      rule = linear_like;
      out.fallback = true;
      mixed = perturb_allocation(mech, delta, rule);
    }
    auto candidate = envelope_payments(model, mixed, base, opts.interp);
    const auto dist = closeness(candidate, reference);
    if (dist.sup_dx <= epsilon && dist.sup_dp <= epsilon) {
      out.mech = std::move(candidate);
      out.delta = delta;
      out.rule_used = rule;
      out.sup_dx = dist.sup_dx;
      out.sup_dp = dist.sup_dp;
      out.sup_dp_input = closeness(out.mech, mech).sup_dp;
      break;
    }
    delta *= 0.5;
    if (delta < opts.delta_floor) {
      const auto reg = check_regularity(model);
      std::ostringstream msg;
      msg << "strictify: delta fell below " << opts.delta_floor << " without sup |dP| <= "
          << epsilon << " (last sup |dP| = " << dist.sup_dp << ", g2 modulus " << reg.g2_modulus
          << " at step " << reg.modulus_step << ")";
      throw ConvergenceError(msg.str());
    }
  }

  const auto strict = check_strict_sp(model, out.mech, vopts);
  out.strict_sp = strict.strict_sp;
  out.strict_margin = strict.strict_margin;
  return out;
}

}  // namespace sspkit
