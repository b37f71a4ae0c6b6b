#include "sspkit/payoff_model.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "sspkit/errors.hpp"
#include "sspkit/quadrature.hpp"

namespace sspkit {

namespace {

void require_unit(double v, const char* name) {
  if (!(v >= 0.0 && v <= 1.0)) {
    std::ostringstream msg;
    msg << name << " = " << v << " lies outside [0, 1]";
    throw DomainError(msg.str());
  }
}

void validate_axis(const std::vector<double>& axis, const char* name) {
  if (axis.size() < 2) {
    throw ConstraintError(std::string("tabulated payoff: ") + name + " lattice needs at least 2 points");
  }
  if (axis.front() != 0.0 || axis.back() != 1.0) {
    throw ConstraintError(std::string("tabulated payoff: ") + name + " lattice must span [0, 1] exactly");
  }
  for (std::size_t k = 1; k < axis.size(); ++k) {
    if (!(axis[k] > axis[k - 1])) {
      throw ConstraintError(std::string("tabulated payoff: ") + name + " lattice must be strictly ascending");
    }
  }
}

// Cell index k with axis[k] <= v <= axis[k + 1].
std::size_t cell_of(const std::vector<double>& axis, double v) {
  auto it = std::upper_bound(axis.begin(), axis.end(), v);
  std::size_t k = it == axis.begin() ? 0 : static_cast<std::size_t>(it - axis.begin()) - 1;
  return std::min(k, axis.size() - 2);
}

double clamp_unit(double v) { return std::clamp(v, 0.0, 1.0); }

}  // namespace

std::string to_string(PayoffFamily family) {
  switch (family) {
    case PayoffFamily::Product: return "product";
    case PayoffFamily::Power: return "power";
    case PayoffFamily::Quadratic: return "quadratic";
    case PayoffFamily::Tabulated: return "tabulated";
  }
  return "unknown";
}

PayoffModel PayoffModel::product() { return PayoffModel(PayoffFamily::Product, 0.0, 1.0, nullptr); }

PayoffModel PayoffModel::power(double exponent) {
  if (!(exponent > 0.0 && exponent <= 8.0)) {
    std::ostringstream msg;
    msg << "power payoff exponent " << exponent << " outside (0, 8]";
    throw ConstraintError(msg.str());
  }
  return PayoffModel(PayoffFamily::Power, exponent, 1.0, nullptr);
}

PayoffModel PayoffModel::quadratic(double curvature) {
  if (!(curvature >= 0.0) || !std::isfinite(curvature)) {
    std::ostringstream msg;
    msg << "quadratic payoff curvature " << curvature << " must be finite and nonnegative";
    throw ConstraintError(msg.str());
  }
  return PayoffModel(PayoffFamily::Quadratic, curvature, 1.0, nullptr);
}

PayoffModel PayoffModel::tabulated(PayoffLattice lattice, std::optional<double> g2_bound) {
  validate_axis(lattice.x, "x");
  validate_axis(lattice.t, "t");
  if (lattice.g2.size() != lattice.x.size() * lattice.t.size()) {
    throw ConstraintError("tabulated payoff: g2 samples must have x.size() * t.size() entries");
  }
  if (lattice.g0.size() != lattice.x.size()) {
    throw ConstraintError("tabulated payoff: g0 samples must have x.size() entries");
  }
  double max_abs = 0.0;
  for (double v : lattice.g2) {
    if (!std::isfinite(v)) throw ConstraintError("tabulated payoff: non-finite g2 sample");
    max_abs = std::max(max_abs, std::abs(v));
  }
  for (double v : lattice.g0) {
    if (!std::isfinite(v)) throw ConstraintError("tabulated payoff: non-finite g0 sample");
  }
  // Bilinear interpolation attains its extremes at the samples.
  double bound = max_abs;
  if (g2_bound) {
    if (!(*g2_bound >= max_abs)) {
      std::ostringstream msg;
      msg << "tabulated payoff: declared g2_bound " << *g2_bound << " is below max |g2| sample "
          << max_abs;
      throw ConstraintError(msg.str());
    }
    bound = *g2_bound;
  }
  return PayoffModel(PayoffFamily::Tabulated, 0.0, bound,
                     std::make_shared<const PayoffLattice>(std::move(lattice)));
}

std::string PayoffModel::describe() const {
  std::ostringstream out;
  out << to_string(family_);
  if (family_ == PayoffFamily::Power) out << "(a=" << param_ << ")";
  if (family_ == PayoffFamily::Quadratic) out << "(c=" << param_ << ")";
  if (family_ == PayoffFamily::Tabulated) {
    out << "(" << lattice_->x.size() << "x" << lattice_->t.size() << ")";
  }
  return out.str();
}

double PayoffModel::tabulated_g2(double x, double t) const {
  const auto& lat = *lattice_;
  const std::size_t ix = cell_of(lat.x, x);
  const std::size_t it = cell_of(lat.t, t);
  const std::size_t nt = lat.t.size();
  const double u = (x - lat.x[ix]) / (lat.x[ix + 1] - lat.x[ix]);
  const double v = (t - lat.t[it]) / (lat.t[it + 1] - lat.t[it]);
  const double f00 = lat.g2[ix * nt + it];
  const double f01 = lat.g2[ix * nt + it + 1];
  const double f10 = lat.g2[(ix + 1) * nt + it];
  const double f11 = lat.g2[(ix + 1) * nt + it + 1];
  return (1 - u) * ((1 - v) * f00 + v * f01) + u * ((1 - v) * f10 + v * f11);
}

double PayoffModel::tabulated_g0(double x) const {
  const auto& lat = *lattice_;
  const std::size_t ix = cell_of(lat.x, x);
  const double u = (x - lat.x[ix]) / (lat.x[ix + 1] - lat.x[ix]);
  return (1 - u) * lat.g0[ix] + u * lat.g0[ix + 1];
}

double PayoffModel::g(double x, double t) const {
  require_unit(x, "x");
  require_unit(t, "t");
  switch (family_) {
    case PayoffFamily::Product: return x * t;
    case PayoffFamily::Power: return std::pow(x, param_) * t;
    case PayoffFamily::Quadratic: return x * t - param_ * x * x;
    case PayoffFamily::Tabulated: return tabulated_g0(x) + integrate_g2_fixed(x, 0.0, t);
  }
  return 0.0;
}

double PayoffModel::g2(double x, double t) const {
  require_unit(x, "x");
  require_unit(t, "t");
  switch (family_) {
    case PayoffFamily::Product:
    case PayoffFamily::Quadratic: return x;
    case PayoffFamily::Power: return std::pow(x, param_);
    case PayoffFamily::Tabulated: return tabulated_g2(x, t);
  }
  return 0.0;
}

double PayoffModel::integrate_g2_fixed(double x, double a, double b) const {
  if (a == b) return 0.0;
  if (family_ != PayoffFamily::Tabulated) return g2(x, a) * (b - a);
  if (a > b) return -integrate_g2_fixed(x, b, a);
  require_unit(x, "x");
  require_unit(a, "t");
  require_unit(b, "t");
  const auto& ts = lattice_->t;
  auto integrand = [&](double s) { return tabulated_g2(x, clamp_unit(s)); };
  double total = 0.0;
  double lo = a;
  for (double knot : ts) {
    if (knot <= lo) continue;
    if (knot >= b) break;
    total += adaptive_simpson(integrand, lo, knot);
    lo = knot;
  }
  total += adaptive_simpson(integrand, lo, b);
  return total;
}

double PayoffModel::integrate_g2_linear(double x0, double x1, double a, double b) const {
  if (a == b) return 0.0;
  if (a > b) return -integrate_g2_linear(x1, x0, b, a);
  require_unit(x0, "x");
  require_unit(x1, "x");
  const double width = b - a;
  switch (family_) {
    case PayoffFamily::Product:
    case PayoffFamily::Quadratic: return 0.5 * (x0 + x1) * width;
    case PayoffFamily::Power: {
      const double hi = std::max(x0, x1);
      const double d = x1 - x0;
      if (hi == 0.0) return 0.0;
      if (std::abs(d) > 1e-3 * hi) {
        const double e = param_ + 1.0;
        return width * (std::pow(x1, e) - std::pow(x0, e)) / (e * d);
      }
      // Nearly constant path: the closed form cancels badly, the integrand is smooth.
      auto integrand = [&](double s) {
        return std::pow(clamp_unit(x0 + d * (s - a) / width), param_);
      };
      return adaptive_simpson(integrand, a, b);
    }
    case PayoffFamily::Tabulated: break;
  }

  // Split where the path crosses a lattice line so that every piece is a
  // polynomial of degree <= 2 in s.
  const auto& lat = *lattice_;
  std::vector<double> knots;
  for (double tk : lat.t) {
    if (tk > a && tk < b) knots.push_back(tk);
  }
  const double lo_x = std::min(x0, x1), hi_x = std::max(x0, x1);
  if (x1 != x0) {
    for (double xk : lat.x) {
      if (xk > lo_x && xk < hi_x) knots.push_back(a + (xk - x0) / (x1 - x0) * width);
    }
  }
  std::sort(knots.begin(), knots.end());
  auto integrand = [&](double s) {
    return tabulated_g2(clamp_unit(x0 + (x1 - x0) * (s - a) / width), clamp_unit(s));
  };
  double total = 0.0;
  double lo = a;
  for (double knot : knots) {
    if (knot <= lo) continue;
    total += adaptive_simpson(integrand, lo, knot);
    lo = knot;
  }
  total += adaptive_simpson(integrand, lo, b);
  return total;
}

double eval_g(const PayoffModel& model, double x, double t) { return model.g(x, t); }

double eval_g2(const PayoffModel& model, double x, double t) { return model.g2(x, t); }

RegularityReport check_regularity(const PayoffModel& model, std::size_t lattice_resolution) {
  if (lattice_resolution < 3) {
    throw DomainError("check_regularity: lattice resolution must be at least 3");
  }
  RegularityReport report;
  report.resolution = lattice_resolution;
  const std::size_t r = lattice_resolution;
  std::vector<double> pts(r);
  for (std::size_t k = 0; k < r; ++k) pts[k] = static_cast<double>(k) / static_cast<double>(r - 1);
  pts.back() = 1.0;

  const double h = kFiniteDifferenceStep;
  for (double x : pts) {
    for (double t : pts) {
      const double d = model.g2(x, t);
      double fd;
      if (t - h >= 0.0 && t + h <= 1.0) {
        fd = (model.g(x, t + h) - model.g(x, t - h)) / (2 * h);
      } else if (t - h < 0.0) {
        fd = (-3 * model.g(x, t) + 4 * model.g(x, t + h) - model.g(x, t + 2 * h)) / (2 * h);
      } else {
        fd = (3 * model.g(x, t) - 4 * model.g(x, t - h) + model.g(x, t - 2 * h)) / (2 * h);
      }
      report.fd_max_error = std::max(report.fd_max_error, std::abs(d - fd) / (1.0 + std::abs(d)));
      report.g2_max_abs = std::max(report.g2_max_abs, std::abs(d));
    }
  }
  report.fd_pass = report.fd_max_error <= kFiniteDifferenceTol;

  report.single_crossing_margin = std::numeric_limits<double>::infinity();
  report.modulus_step = 1.0 / static_cast<double>(r - 1);
  std::vector<double> col(r);
  for (double t : pts) {
    for (std::size_t i = 0; i < r; ++i) col[i] = model.g2(pts[i], t);
    for (std::size_t i = 0; i < r; ++i) {
      if (i + 1 < r) report.g2_modulus = std::max(report.g2_modulus, std::abs(col[i + 1] - col[i]));
      for (std::size_t j = i + 1; j < r; ++j) {
        const double margin = col[j] - col[i];
        if (margin < report.single_crossing_margin) {
          report.single_crossing_margin = margin;
          report.margin_x = pts[i];
          report.margin_x_hi = pts[j];
          report.margin_t = t;
        }
      }
    }
  }
  report.single_crossing = report.single_crossing_margin > kSingleCrossingFloor;
  report.bound_ok = report.g2_max_abs <= model.g2_bound() + 1e-12;
  return report;
}

}  // namespace sspkit
