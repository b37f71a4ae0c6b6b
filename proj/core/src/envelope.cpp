#include "sspkit/envelope.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "sspkit/errors.hpp"

namespace sspkit {

std::string to_string(Interpolation interp) {
  return interp == Interpolation::LeftStep ? "left_step" : "linear";
}

Interpolation interpolation_from_string(const std::string& name) {
  if (name == "left_step" || name == "step") return Interpolation::LeftStep;
  if (name == "linear") return Interpolation::Linear;
  throw DomainError("unknown interpolation '" + name + "'");
}

double AllocationSlice::at(double s) const {
  if (!(s >= 0.0 && s <= 1.0)) throw DomainError("slice argument outside [0, 1]");
  auto it = std::upper_bound(breakpoints.begin(), breakpoints.end(), s);
  const std::size_t k = static_cast<std::size_t>(it - breakpoints.begin()) - 1;
  if (k + 1 >= breakpoints.size() || interp == Interpolation::LeftStep) return values[k];
  const double u = (s - breakpoints[k]) / (breakpoints[k + 1] - breakpoints[k]);
  return values[k] + u * (values[k + 1] - values[k]);
}

AllocationSlice allocation_slice(const MechanismTable& mech, std::size_t agent, std::size_t base,
                                 Interpolation interp) {
  if (agent >= mech.agents()) throw DomainError("agent index out of range");
  if (base >= mech.profile_count() || mech.type_index(base, agent) != 0) {
    throw DomainError("slice base must be a profile with the agent's own type at 0");
  }
  AllocationSlice slice;
  slice.agent = agent;
  slice.base = base;
  slice.interp = interp;
  const auto pts = mech.grid().points();
  slice.breakpoints.assign(pts.begin(), pts.end());
  slice.values.resize(pts.size());
  for (std::size_t k = 0; k < pts.size(); ++k) {
    slice.values[k] = mech.allocation(base + k * mech.stride(agent), agent);
  }
  return slice;
}

namespace {

double piece_integral(const PayoffModel& model, const AllocationSlice& slice, std::size_t k) {
  const double a = slice.breakpoints[k];
  const double b = slice.breakpoints[k + 1];
  if (slice.interp == Interpolation::LeftStep) {
    return model.integrate_g2_fixed(slice.values[k], a, b);
  }
  return model.integrate_g2_linear(slice.values[k], slice.values[k + 1], a, b);
}

std::size_t grid_index(const AllocationSlice& slice, double t) {
  auto it = std::lower_bound(slice.breakpoints.begin(), slice.breakpoints.end(), t - 1e-12);
  if (it == slice.breakpoints.end() || std::abs(*it - t) > 1e-12) {
    std::ostringstream msg;
    msg << "integration endpoint " << t << " is not a grid point";
    throw DomainError(msg.str());
  }
  return static_cast<std::size_t>(it - slice.breakpoints.begin());
}

}  // namespace

std::vector<double> cumulative_g2(const PayoffModel& model, const AllocationSlice& slice) {
  std::vector<double> out(slice.breakpoints.size(), 0.0);
  for (std::size_t k = 0; k + 1 < slice.breakpoints.size(); ++k) {
    try {
      out[k + 1] = out[k] + piece_integral(model, slice, k);
    } catch (const NumericError& e) {
      std::ostringstream msg;
      msg << e.what() << " (agent " << slice.agent << ", slice base " << slice.base << ", piece "
          << k << ")";
      throw NumericError(msg.str());
    }
  }
  return out;
}

double integrate_g2_along(const PayoffModel& model, const AllocationSlice& slice, double a,
                          double b) {
  const std::size_t ia = grid_index(slice, a);
  const std::size_t ib = grid_index(slice, b);
  if (ia == ib) return 0.0;
  const std::size_t lo = std::min(ia, ib), hi = std::max(ia, ib);
  double total = 0.0;
  for (std::size_t k = lo; k < hi; ++k) total += piece_integral(model, slice, k);
  return ia < ib ? total : -total;
}

BaseRow base_row_of(const MechanismTable& mech) {
  BaseRow row(mech.agents());
  for (std::size_t i = 0; i < mech.agents(); ++i) {
    for (std::size_t base : mech.slice_bases(i)) row[i].push_back(mech.payment(base, i));
  }
  return row;
}

MechanismTable envelope_payments(const PayoffModel& model, const MechanismTable& mech,
                                 const std::optional<BaseRow>& base_row, Interpolation interp) {
  const std::size_t n = mech.agents();
  const std::size_t m = mech.grid().size();
  if (base_row) {
    if (base_row->size() != n) throw DomainError("base row must list every agent");
    for (const auto& r : *base_row) {
      if (r.size() != mech.slice_count()) {
        throw DomainError("base row must list every opponent profile");
      }
    }
  }
  std::vector<double> pay(mech.payments().begin(), mech.payments().end());
  for (std::size_t i = 0; i < n; ++i) {
    const auto bases = mech.slice_bases(i);
    for (std::size_t ord = 0; ord < bases.size(); ++ord) {
      const std::size_t base = bases[ord];
      const auto slice = allocation_slice(mech, i, base, interp);
      const auto cum = cumulative_g2(model, slice);
      const double p0 = base_row ? (*base_row)[i][ord] : mech.payment(base, i);
      const double anchor = p0 - model.g(slice.values[0], 0.0);
      for (std::size_t k = 0; k < m; ++k) {
        const std::size_t profile = base + k * mech.stride(i);
        pay[profile * n + i] = anchor + model.g(slice.values[k], slice.breakpoints[k]) - cum[k];
      }
      // Exact at the base point regardless of rounding in anchor.
      pay[base * n + i] = p0;
    }
  }
  return mech.with_payments(std::move(pay));
}

double envelope_residual(const PayoffModel& model, const MechanismTable& mech,
                         Interpolation interp) {
  const auto canonical = envelope_payments(model, mech, std::nullopt, interp);
  double worst = 0.0;
  const auto a = mech.payments();
  const auto b = canonical.payments();
  for (std::size_t k = 0; k < a.size(); ++k) worst = std::max(worst, std::abs(a[k] - b[k]));
  return worst;
}

DeviationLossFormula::DeviationLossFormula(const PayoffModel& model, const MechanismTable& mech,
                                           Interpolation interp, double gate)
    : model_(model), mech_(mech) {
  residual_ = envelope_residual(model, mech, interp);
  if (!(residual_ <= gate)) {
    std::ostringstream msg;
    msg << "deviation-loss identity needs envelope payments: residual " << residual_
        << " exceeds " << gate;
    throw ContractViolation(msg.str());
  }
  cumulative_.resize(mech.agents());
  for (std::size_t i = 0; i < mech.agents(); ++i) {
    for (std::size_t base : mech.slice_bases(i)) {
      cumulative_[i].push_back(cumulative_g2(model, allocation_slice(mech, i, base, interp)));
    }
  }
}

double DeviationLossFormula::loss(std::size_t agent, std::size_t base, std::size_t true_index,
                                  std::size_t report_index) const {
  if (true_index == report_index) return 0.0;
  const auto& cum = cumulative_[agent][mech_.slice_ordinal(agent, base)];
  const auto& grid = mech_.grid();
  const double x_report = mech_.allocation(base + report_index * mech_.stride(agent), agent);
  const double along = cum[true_index] - cum[report_index];
  const double flat =
      model_.integrate_g2_fixed(x_report, grid[report_index], grid[true_index]);
  return along - flat;
}

double deviation_loss_formula(const PayoffModel& model, const MechanismTable& mech,
                              std::size_t agent, std::span<const double> opponents,
                              double true_type, double report, Interpolation interp) {
  const std::size_t base = mech.base_of(agent, opponents);
  const std::size_t t = mech.grid().index_of(true_type);
  const std::size_t r = mech.grid().index_of(report);
  DeviationLossFormula formula(model, mech, interp);
  return formula.loss(agent, base, t, r);
}

}  // namespace sspkit
