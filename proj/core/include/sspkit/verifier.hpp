#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "sspkit/envelope.hpp"
#include "sspkit/mechanism.hpp"
#include "sspkit/payoff_model.hpp"

namespace sspkit {

/// One misreport: type `true_type` of `agent` reporting `report` against
/// `opponents`. loss = utility(truth) - utility(report).
struct Deviation {
  std::size_t agent = 0;
  std::size_t base = 0;
  std::vector<double> opponents;
  std::size_t true_index = 0;
  std::size_t report_index = 0;
  double true_type = 0.0;
  double report = 0.0;
  double loss = 0.0;
};

/// Every deviation of every agent, in (agent, base, true, report) order.
struct DeviationReport {
  std::vector<Deviation> entries;
  double min_loss = 0.0;
  Deviation argmin;
};

DeviationReport deviation_report(const PayoffModel& model, const MechanismTable& mech);

enum class Monotonicity { NonMonotone, Weak, Strict };
enum class MonotonicityMode { Weak, Strict };

std::string to_string(Monotonicity m);

inline constexpr double kDefaultTol = 1e-9;
inline constexpr double kDefaultStrictIncrement = 1e-12;

struct SliceMonotonicity {
  std::size_t agent = 0;
  std::size_t base = 0;
  Monotonicity cls = Monotonicity::Strict;
  double min_increment = 0.0;
  // Consecutive grid indices attaining min_increment.
  std::size_t lo = 0, hi = 0;
};

struct MonotonicityReport {
  MonotonicityMode mode = MonotonicityMode::Weak;
  double margin = 0.0;
  bool pass = true;
  Monotonicity worst = Monotonicity::Strict;
  std::vector<SliceMonotonicity> slices;
  /// Index into `slices` of the first slice failing `mode`, or slices.size().
  std::size_t first_failure = 0;
};

/// WEAK passes when every increment is >= -margin; STRICT when every increment
/// is > margin. Slices are classified with the default thresholds of the other
/// mode (0 for weak, 1e-12 for strict).
MonotonicityReport check_monotonicity(const MechanismTable& mech, MonotonicityMode mode,
                                      double margin);
MonotonicityReport check_monotonicity(const MechanismTable& mech, MonotonicityMode mode);

struct VerifyOptions {
  double tol = kDefaultTol;
  double strict_increment = kDefaultStrictIncrement;
  Interpolation interp = Interpolation::Linear;
  std::size_t max_witnesses = 32;
  unsigned threads = 1;
};

struct VerificationResult {
  bool weak_sp = false;
  bool strict_sp = false;
  double tol = kDefaultTol;
  double min_loss = 0.0;
  double strict_margin = 0.0;
  Monotonicity monotonicity = Monotonicity::Strict;
  double envelope_residual = 0.0;
  std::size_t deviations_checked = 0;
  Deviation argmin;
  // Losses below -tol (weak check) or at most tol (strict check), in scan order.
  std::vector<Deviation> witnesses;
};

VerificationResult check_weak_sp(const PayoffModel& model, const MechanismTable& mech,
                                 const VerifyOptions& opts = {});
VerificationResult check_strict_sp(const PayoffModel& model, const MechanismTable& mech,
                                   const VerifyOptions& opts = {});

struct Implication {
  std::string name;
  bool premise = false;
  bool holds = true;
};

struct CharacterizationReport {
  MonotonicityReport weak_monotonicity;
  MonotonicityReport strict_monotonicity;
  double envelope_residual = 0.0;
  VerificationResult weak;
  VerificationResult strict;
  std::vector<Implication> implications;
  // Strict-forward premise held and the strict verdict failed only because the
  // smallest loss is positive but below tol.
  bool resolution_limited = false;
  bool consistent = true;
};

/// Cross-checks brute-force verdicts against the monotonicity + envelope
/// characterization. `consistent == false` means the engine is wrong, never
/// that the mechanism is.
CharacterizationReport characterize(const PayoffModel& model, const MechanismTable& mech,
                                    const VerifyOptions& opts = {});

struct IRWitness {
  std::size_t agent = 0;
  std::vector<double> opponents;
  double type = 0.0;
  double utility = 0.0;
  double outside = 0.0;
};

struct IRReport {
  std::vector<double> outside;
  // Type-0 check g(X(0, t^{-i}), 0) - P(0, t^{-i}) >= w_i.
  bool reduction_pass = true;
  double reduction_min_slack = 0.0;
  // Interim check at every grid type.
  bool direct_pass = true;
  double direct_min_slack = 0.0;
  bool agree = true;
  std::vector<IRWitness> witnesses;
};

/// Individual rationality against type-independent outside options. Requires
/// a weakly strategy-proof mechanism (PreconditionError otherwise).
IRReport check_ir(const PayoffModel& model, const MechanismTable& mech,
                  const std::vector<double>& outside, const VerifyOptions& opts = {});

}  // namespace sspkit
