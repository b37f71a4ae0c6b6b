#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "sspkit/mechanism.hpp"
#include "sspkit/payoff_model.hpp"

namespace sspkit {

/// How a grid slice X_i(., t^{-i}) is extended to the continuum of own types
/// for the integrals of the envelope formula.
///
/// LeftStep: X(s) = X(t_k) for s in [t_k, t_{k+1}). Envelope payments then
///   leave each type t_{k+1} exactly indifferent to reporting t_k.
/// Linear: X interpolated linearly between grid points. A strictly increasing
///   grid slice becomes a strictly increasing continuum slice.
enum class Interpolation { LeftStep, Linear };

std::string to_string(Interpolation interp);
Interpolation interpolation_from_string(const std::string& name);

/// Own-type slice of one agent's allocation at a fixed opponent profile.
struct AllocationSlice {
  std::size_t agent = 0;
  std::size_t base = 0;
  std::vector<double> breakpoints;
  std::vector<double> values;
  Interpolation interp = Interpolation::Linear;

  /// Continuum value X(s) for s in [0, 1].
  double at(double s) const;
};

AllocationSlice allocation_slice(const MechanismTable& mech, std::size_t agent, std::size_t base,
                                 Interpolation interp = Interpolation::Linear);

/// Signed int_a^b g2(X(s), s) ds along the slice; a and b must be grid points.
double integrate_g2_along(const PayoffModel& model, const AllocationSlice& slice, double a,
                          double b);

/// Running integrals I_k = int_0^{t_k} g2(X(s), s) ds for k = 0..m-1.
std::vector<double> cumulative_g2(const PayoffModel& model, const AllocationSlice& slice);

/// P_i(0, t^{-i}) for every agent and opponent profile, indexed
/// [agent][ordinal in slice_bases(agent)].
using BaseRow = std::vector<std::vector<double>>;

BaseRow base_row_of(const MechanismTable& mech);

/// Copy of `mech` whose payments satisfy, at every grid point,
///   P(t) = P(0) - g(X(0), 0) + g(X(t), t) - int_0^t g2(X(s), s) ds.
/// The base row defaults to the mechanism's own type-0 payments.
MechanismTable envelope_payments(const PayoffModel& model, const MechanismTable& mech,
                                 const std::optional<BaseRow>& base_row = std::nullopt,
                                 Interpolation interp = Interpolation::Linear);

/// sup |P - envelope_payments(P's own base row)| over all agents and profiles.
double envelope_residual(const PayoffModel& model, const MechanismTable& mech,
                         Interpolation interp = Interpolation::Linear);

inline constexpr double kEnvelopeGate = 1e-9;

/// Utility loss of true type t from reporting r, written as
///   int_r^t [g2(X(s), s) - g2(X(r), s)] ds,
/// which equals the direct utility difference only when the payments satisfy
/// the envelope formula. Construction checks that gate once.
class DeviationLossFormula {
 public:
  DeviationLossFormula(const PayoffModel& model, const MechanismTable& mech,
                       Interpolation interp = Interpolation::Linear, double gate = kEnvelopeGate);

  double residual() const { return residual_; }

  double loss(std::size_t agent, std::size_t base, std::size_t true_index,
              std::size_t report_index) const;

 private:
  const PayoffModel& model_;
  const MechanismTable& mech_;
  double residual_ = 0.0;
  // cumulative_[agent][ordinal][k]
  std::vector<std::vector<std::vector<double>>> cumulative_;
};

/// Value form of DeviationLossFormula::loss; throws ContractViolation when the
/// envelope residual exceeds the gate.
double deviation_loss_formula(const PayoffModel& model, const MechanismTable& mech,
                              std::size_t agent, std::span<const double> opponents,
                              double true_type, double report,
                              Interpolation interp = Interpolation::Linear);

}  // namespace sspkit
