#include "sspkit/mechanism.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <sstream>

#include "sspkit/errors.hpp"

namespace sspkit {

TypeGrid::TypeGrid(std::vector<double> points) : points_(std::move(points)) {
  if (points_.size() < 2) throw DomainError("type grid needs at least 2 points");
  if (points_.front() != 0.0) throw DomainError("type grid must start at exactly 0");
  if (points_.back() != 1.0) throw DomainError("type grid must end at exactly 1");
  for (std::size_t k = 1; k < points_.size(); ++k) {
    if (!(points_[k] > points_[k - 1])) {
      std::ostringstream msg;
      msg << "type grid must be strictly ascending (point " << k << " = " << points_[k] << ")";
      throw DomainError(msg.str());
    }
  }
}

TypeGrid TypeGrid::uniform(std::size_t count) {
  if (count < 2) throw DomainError("type grid needs at least 2 points");
  std::vector<double> pts(count);
  for (std::size_t k = 0; k < count; ++k) {
    pts[k] = static_cast<double>(k) / static_cast<double>(count - 1);
  }
  pts.back() = 1.0;
  return TypeGrid(std::move(pts));
}

double TypeGrid::min_spacing() const {
  double h = std::numeric_limits<double>::infinity();
  for (std::size_t k = 1; k < points_.size(); ++k) h = std::min(h, points_[k] - points_[k - 1]);
  return h;
}

std::size_t TypeGrid::index_of(double t) const {
  auto it = std::lower_bound(points_.begin(), points_.end(), t - 1e-12);
  if (it != points_.end() && std::abs(*it - t) <= 1e-12) {
    return static_cast<std::size_t>(it - points_.begin());
  }
  std::ostringstream msg;
  msg << "type " << t << " is not a grid point";
  throw DomainError(msg.str());
}

std::string to_string(Feasibility feasibility) {
  switch (feasibility) {
    case Feasibility::Free: return "free";
    case Feasibility::SumLeOne: return "sum_le_1";
    case Feasibility::SumEqOne: return "sum_eq_1";
  }
  return "unknown";
}

Feasibility feasibility_from_string(const std::string& name) {
  if (name == "free") return Feasibility::Free;
  if (name == "sum_le_1") return Feasibility::SumLeOne;
  if (name == "sum_eq_1") return Feasibility::SumEqOne;
  throw DomainError("unknown feasibility regime '" + name + "'");
}

MechanismTable::MechanismTable(std::size_t agents, TypeGrid grid, std::vector<double> allocation,
                               std::vector<double> payments, Feasibility feasibility)
    : agents_(agents),
      grid_(std::move(grid)),
      allocation_(std::move(allocation)),
      payments_(std::move(payments)),
      feasibility_(feasibility) {
  if (agents_ == 0) throw DomainError("mechanism needs at least one agent");
  const std::size_t m = grid_.size();
  profile_count_ = 1;
  for (std::size_t i = 0; i < agents_; ++i) {
    if (profile_count_ > std::numeric_limits<std::size_t>::max() / m) {
      throw DomainError("product grid is too large");
    }
    profile_count_ *= m;
  }
  strides_.assign(agents_, 1);
  for (std::size_t i = agents_ - 1; i > 0; --i) strides_[i - 1] = strides_[i] * m;

  const std::size_t expected = profile_count_ * agents_;
  if (allocation_.size() != expected || payments_.size() != expected) {
    std::ostringstream msg;
    msg << "mechanism tables need " << expected << " entries (profiles x agents), got allocation "
        << allocation_.size() << " and payments " << payments_.size();
    throw DomainError(msg.str());
  }
  for (std::size_t k = 0; k < expected; ++k) {
    if (!(allocation_[k] >= 0.0 && allocation_[k] <= 1.0)) {
      std::ostringstream msg;
      msg << "allocation entry " << allocation_[k] << " (profile " << k / agents_ << ", agent "
          << k % agents_ << ") lies outside [0, 1]";
      throw DomainError(msg.str());
    }
    if (!std::isfinite(payments_[k])) {
      std::ostringstream msg;
      msg << "payment entry (profile " << k / agents_ << ", agent " << k % agents_
          << ") is not finite";
      throw DomainError(msg.str());
    }
  }
}

std::vector<std::size_t> MechanismTable::decode(std::size_t profile) const {
  std::vector<std::size_t> idx(agents_);
  for (std::size_t i = 0; i < agents_; ++i) idx[i] = type_index(profile, i);
  return idx;
}

std::size_t MechanismTable::encode(std::span<const std::size_t> indices) const {
  if (indices.size() != agents_) throw DomainError("profile arity does not match agent count");
  std::size_t flat = 0;
  for (std::size_t i = 0; i < agents_; ++i) {
    if (indices[i] >= grid_.size()) throw DomainError("profile index outside the grid");
    flat += indices[i] * strides_[i];
  }
  return flat;
}

std::vector<std::size_t> MechanismTable::slice_bases(std::size_t agent) const {
  std::vector<std::size_t> bases;
  bases.reserve(slice_count());
  for (std::size_t p = 0; p < profile_count_; ++p) {
    if (type_index(p, agent) == 0) bases.push_back(p);
  }
  return bases;
}

std::vector<double> MechanismTable::opponent_types(std::size_t agent, std::size_t base) const {
  std::vector<double> out;
  out.reserve(agents_ - 1);
  for (std::size_t j = 0; j < agents_; ++j) {
    if (j != agent) out.push_back(grid_[type_index(base, j)]);
  }
  return out;
}

std::size_t MechanismTable::base_of(std::size_t agent, std::span<const double> opponents) const {
  if (agent >= agents_) throw DomainError("agent index out of range");
  if (opponents.size() + 1 != agents_) {
    throw DomainError("opponent profile must list the other agents' types");
  }
  std::size_t base = 0;
  std::size_t k = 0;
  for (std::size_t j = 0; j < agents_; ++j) {
    if (j == agent) continue;
    base += grid_.index_of(opponents[k++]) * strides_[j];
  }
  return base;
}

MechanismTable MechanismTable::with_payments(std::vector<double> payments) const {
  return MechanismTable(agents_, grid_, allocation_, std::move(payments), feasibility_);
}

MechanismTable MechanismTable::with_allocation(std::vector<double> allocation) const {
  return MechanismTable(agents_, grid_, std::move(allocation), payments_, feasibility_);
}

MechanismTable MechanismTable::with_feasibility(Feasibility feasibility) const {
  return MechanismTable(agents_, grid_, allocation_, payments_, feasibility);
}

FeasibilityVerdict check_feasibility(const MechanismTable& mech) {
  FeasibilityVerdict verdict;
  if (mech.feasibility() == Feasibility::Free) return verdict;
  const std::size_t n = mech.agents();
  double worst = 0.0;
  for (std::size_t p = 0; p < mech.profile_count(); ++p) {
    double sum = 0.0;
    for (std::size_t i = 0; i < n; ++i) sum += mech.allocation(p, i);
    const double slack = 1.0 - sum;
    const bool bad = mech.feasibility() == Feasibility::SumLeOne ? slack < -kFeasibilityTol
                                                                 : std::abs(slack) > kFeasibilityTol;
    if (std::abs(slack) > std::abs(worst) &&
        (mech.feasibility() == Feasibility::SumEqOne || slack < 0.0)) {
      worst = slack;
    }
    if (bad) {
      FeasibilityViolation v;
      v.profile = p;
      for (std::size_t i = 0; i < n; ++i) v.types.push_back(mech.grid()[mech.type_index(p, i)]);
      v.slack = slack;
      verdict.violations.push_back(std::move(v));
    }
  }
  verdict.feasible = verdict.violations.empty();
  verdict.worst_slack = worst;
  return verdict;
}

double utility(const PayoffModel& model, const MechanismTable& mech, std::size_t agent,
               std::span<const double> opponents, double true_type, double report) {
  const std::size_t base = mech.base_of(agent, opponents);
  const std::size_t t = mech.grid().index_of(true_type);
  const std::size_t r = mech.grid().index_of(report);
  return utility_at(model, mech, agent, base, t, r);
}

namespace {

std::size_t profile_count_of(std::size_t agents, std::size_t m) {
  std::size_t count = 1;
  for (std::size_t i = 0; i < agents; ++i) count *= m;
  return count;
}

// Own-type index of `agent` at flat `profile`, agent 0 most significant.
std::size_t index_in(std::size_t profile, std::size_t agent, std::size_t agents, std::size_t m) {
  for (std::size_t j = agents - 1; j > agent; --j) profile /= m;
  return profile % m;
}

// Portable uniform draw on [0, 1) from the standardized 64-bit Mersenne Twister.
double unit_draw(std::mt19937_64& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

}  // namespace

MechanismTable make_second_price(std::size_t agents, const TypeGrid& grid) {
  if (agents < 2) throw DomainError("second-price auction needs at least 2 agents");
  const std::size_t m = grid.size();
  const std::size_t count = profile_count_of(agents, m);
  std::vector<double> alloc(count * agents, 0.0), pay(count * agents, 0.0);
  std::vector<double> types(agents);
  for (std::size_t p = 0; p < count; ++p) {
    for (std::size_t i = 0; i < agents; ++i) types[i] = grid[index_in(p, i, agents, m)];
    const double top = *std::max_element(types.begin(), types.end());
    const auto winners = static_cast<double>(std::count(types.begin(), types.end(), top));
    for (std::size_t i = 0; i < agents; ++i) {
      if (types[i] != top) continue;
      double opposing = 0.0;
      for (std::size_t j = 0; j < agents; ++j) {
        if (j != i) opposing = std::max(opposing, types[j]);
      }
      alloc[p * agents + i] = 1.0 / winners;
      pay[p * agents + i] = alloc[p * agents + i] * opposing;
    }
  }
  return MechanismTable(agents, grid, std::move(alloc), std::move(pay), Feasibility::SumEqOne);
}

MechanismTable make_constant(std::size_t agents, const TypeGrid& grid, double x, double p,
                             Feasibility feasibility) {
  if (!(x >= 0.0 && x <= 1.0)) throw ConstraintError("constant allocation must lie in [0, 1]");
  const double total = static_cast<double>(agents) * x;
  if (feasibility == Feasibility::SumLeOne && total > 1.0 + kFeasibilityTol) {
    std::ostringstream msg;
    msg << "constant allocation " << x << " for " << agents << " agents sums to " << total
        << " > 1";
    throw ConstraintError(msg.str());
  }
  if (feasibility == Feasibility::SumEqOne && std::abs(total - 1.0) > kFeasibilityTol) {
    std::ostringstream msg;
    msg << "constant allocation " << x << " for " << agents << " agents sums to " << total
        << " != 1";
    throw ConstraintError(msg.str());
  }
  if (agents == 0) throw DomainError("mechanism needs at least one agent");
  const std::size_t count = profile_count_of(agents, grid.size());
  return MechanismTable(agents, grid, std::vector<double>(count * agents, x),
                        std::vector<double>(count * agents, p), feasibility);
}

MechanismTable make_posted_price(const TypeGrid& grid, double price) {
  if (!(price >= 0.0 && price <= 1.0)) throw ConstraintError("posted price must lie in [0, 1]");
  std::vector<double> alloc(grid.size()), pay(grid.size());
  for (std::size_t k = 0; k < grid.size(); ++k) {
    alloc[k] = grid[k] >= price - 1e-12 ? 1.0 : 0.0;
    pay[k] = alloc[k] * price;
  }
  return MechanismTable(1, grid, std::move(alloc), std::move(pay), Feasibility::SumLeOne);
}

MechanismTable make_random_monotone(std::size_t agents, const TypeGrid& grid, std::uint64_t seed,
                                    bool strict) {
  if (agents == 0) throw DomainError("mechanism needs at least one agent");
  const std::size_t m = grid.size();
  const std::size_t count = profile_count_of(agents, m);
  const double cap = 1.0 / static_cast<double>(agents);
  std::mt19937_64 rng(seed);
  std::vector<double> alloc(count * agents, 0.0);
  std::vector<double> slice(m), weights(m - 1);

  const double steps = static_cast<double>(m - 1);
  double min_step = grid.min_spacing() / 10.0;
  if (min_step * steps > cap) min_step = 0.5 * cap / steps;

  for (std::size_t i = 0; i < agents; ++i) {
    std::size_t stride = 1;
    for (std::size_t j = agents - 1; j > i; --j) stride *= m;
    for (std::size_t p = 0; p < count; ++p) {
      if (index_in(p, i, agents, m) != 0) continue;
      if (strict) {
        const double room = cap - min_step * steps;
        const double start = 0.2 * room * unit_draw(rng);
        const double extra = (room - start) * unit_draw(rng);
        double wsum = 0.0;
        for (auto& w : weights) {
          w = unit_draw(rng) + 1e-3;
          wsum += w;
        }
        slice[0] = start;
        for (std::size_t k = 1; k < m; ++k) {
          slice[k] = slice[k - 1] + min_step + extra * weights[k - 1] / wsum;
        }
      } else {
        for (auto& v : slice) v = cap * unit_draw(rng);
        std::sort(slice.begin(), slice.end());
        for (std::size_t k = 1; k < m; ++k) {
          if (unit_draw(rng) < 0.3) slice[k] = slice[k - 1];
        }
      }
      for (std::size_t k = 0; k < m; ++k) {
        alloc[(p + k * stride) * agents + i] = std::min(slice[k], cap);
      }
    }
  }
  return MechanismTable(agents, grid, std::move(alloc), std::vector<double>(count * agents, 0.0),
                        Feasibility::SumLeOne);
}

}  // namespace sspkit
