#pragma once

#include <cstddef>
#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace sspkit {

enum class PayoffFamily { Product, Power, Quadratic, Tabulated };

std::string to_string(PayoffFamily family);

/// Samples backing a tabulated payoff. `g2` is row-major over (x, t):
/// g2[ix * t.size() + it]. `g0` holds g(x, 0) at each x sample.
struct PayoffLattice {
  std::vector<double> x;
  std::vector<double> t;
  std::vector<double> g2;
  std::vector<double> g0;
};

/// Gross payoff g(x, t) of one agent together with its type derivative
/// g2 = dg/dt. Immutable and cheap to copy.
///
///   Product       g = x t
///   Power(a)      g = x^a t,        a in (0, 8]
///   Quadratic(c)  g = x t - c x^2,  c >= 0
///   Tabulated     g2 bilinear on a lattice, g(x, t) = g(x, 0) + int_0^t g2(x, s) ds
class PayoffModel {
 public:
  static PayoffModel product();
  static PayoffModel power(double exponent);
  static PayoffModel quadratic(double curvature);
  static PayoffModel tabulated(PayoffLattice lattice, std::optional<double> g2_bound = std::nullopt);

  PayoffFamily family() const { return family_; }
  double exponent() const { return param_; }
  double curvature() const { return param_; }
  const PayoffLattice* lattice() const { return lattice_.get(); }
  double g2_bound() const { return g2_bound_; }
  std::string describe() const;

  double g(double x, double t) const;
  double g2(double x, double t) const;

  /// True when g2(x, t) does not depend on t (all builtin families).
  bool g2_type_independent() const { return family_ != PayoffFamily::Tabulated; }

  /// Signed int_a^b g2(x, s) ds for a fixed outcome x.
  double integrate_g2_fixed(double x, double a, double b) const;

  /// Signed int_a^b g2(x(s), s) ds along the straight path x(a) = x0, x(b) = x1.
  double integrate_g2_linear(double x0, double x1, double a, double b) const;

 private:
  PayoffModel(PayoffFamily family, double param, double bound,
              std::shared_ptr<const PayoffLattice> lattice)
      : family_(family), param_(param), g2_bound_(bound), lattice_(std::move(lattice)) {}

  double tabulated_g2(double x, double t) const;
  double tabulated_g0(double x) const;

  PayoffFamily family_;
  double param_ = 0.0;
  double g2_bound_ = 1.0;
  std::shared_ptr<const PayoffLattice> lattice_;
};

/// Free-function forms with range checking; both throw DomainError outside [0,1]^2.
double eval_g(const PayoffModel& model, double x, double t);
double eval_g2(const PayoffModel& model, double x, double t);

struct RegularityReport {
  std::size_t resolution = 0;

  // Worst |g2 - finite difference of g| / (1 + |g2|), step 1e-5.
  double fd_max_error = 0.0;
  bool fd_pass = false;

  // min over t and x' > x of g2(x', t) - g2(x, t).
  double single_crossing_margin = 0.0;
  double margin_x = 0.0, margin_x_hi = 0.0, margin_t = 0.0;
  bool single_crossing = false;

  // Largest |g2(x', t) - g2(x, t)| over neighbouring lattice x; an empirical
  // modulus of continuity at step `modulus_step`.
  double g2_modulus = 0.0;
  double modulus_step = 0.0;

  double g2_max_abs = 0.0;
  bool bound_ok = false;

  bool pass() const { return fd_pass && single_crossing && bound_ok; }
};

inline constexpr double kFiniteDifferenceStep = 1e-5;
inline constexpr double kFiniteDifferenceTol = 1e-6;
inline constexpr double kSingleCrossingFloor = 1e-12;

RegularityReport check_regularity(const PayoffModel& model, std::size_t lattice_resolution = 21);

}  // namespace sspkit
