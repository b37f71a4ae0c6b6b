#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "sspkit/payoff_model.hpp"

namespace sspkit {

/// Ascending type grid on [0, 1] shared by all agents. Starts at exactly 0
/// (the envelope base point) and ends at exactly 1.
class TypeGrid {
 public:
  explicit TypeGrid(std::vector<double> points);

  /// m equally spaced points 0, 1/(m-1), ..., 1.
  static TypeGrid uniform(std::size_t count);

  std::size_t size() const { return points_.size(); }
  double operator[](std::size_t k) const { return points_[k]; }
  std::span<const double> points() const { return points_; }
  double min_spacing() const;

  /// Index of the grid point equal to t (within 1e-12); DomainError otherwise.
  std::size_t index_of(double t) const;

  bool operator==(const TypeGrid& other) const { return points_ == other.points_; }

 private:
  std::vector<double> points_;
};

enum class Feasibility { Free, SumLeOne, SumEqOne };

std::string to_string(Feasibility feasibility);
Feasibility feasibility_from_string(const std::string& name);

inline constexpr double kFeasibilityTol = 1e-12;

/// A direct mechanism (X, P) sampled on the product grid. Profiles are stored
/// row-major with agent 0 as the most significant coordinate; each profile
/// holds one allocation and one payment per agent.
///
/// An opponent profile t^{-i} is identified by its `base`: the flat index of
/// the profile whose agent-i coordinate is 0. The profile (t_k, t^{-i}) is then
/// base + k * stride(i).
class MechanismTable {
 public:
  MechanismTable(std::size_t agents, TypeGrid grid, std::vector<double> allocation,
                 std::vector<double> payments, Feasibility feasibility);

  std::size_t agents() const { return agents_; }
  const TypeGrid& grid() const { return grid_; }
  Feasibility feasibility() const { return feasibility_; }
  std::size_t profile_count() const { return profile_count_; }

  double allocation(std::size_t profile, std::size_t agent) const {
    return allocation_[profile * agents_ + agent];
  }
  double payment(std::size_t profile, std::size_t agent) const {
    return payments_[profile * agents_ + agent];
  }
  std::span<const double> allocations() const { return allocation_; }
  std::span<const double> payments() const { return payments_; }

  std::size_t stride(std::size_t agent) const { return strides_[agent]; }
  std::size_t type_index(std::size_t profile, std::size_t agent) const {
    return (profile / strides_[agent]) % grid_.size();
  }
  std::vector<std::size_t> decode(std::size_t profile) const;
  std::size_t encode(std::span<const std::size_t> indices) const;

  /// Bases of every opponent profile of `agent`, in ascending flat order.
  std::vector<std::size_t> slice_bases(std::size_t agent) const;
  std::size_t slice_count() const { return profile_count_ / grid_.size(); }
  /// Position of `base` within slice_bases(agent).
  std::size_t slice_ordinal(std::size_t agent, std::size_t base) const {
    const std::size_t s = strides_[agent];
    return (base / (s * grid_.size())) * s + base % s;
  }

  /// Opponent type values (agent order, own coordinate skipped) of a base.
  std::vector<double> opponent_types(std::size_t agent, std::size_t base) const;
  /// Base for agent `agent` given opponent type values; DomainError when off-grid.
  std::size_t base_of(std::size_t agent, std::span<const double> opponents) const;

  MechanismTable with_payments(std::vector<double> payments) const;
  MechanismTable with_allocation(std::vector<double> allocation) const;
  MechanismTable with_feasibility(Feasibility feasibility) const;

  bool same_shape(const MechanismTable& other) const {
    return agents_ == other.agents_ && grid_ == other.grid_;
  }

 private:
  std::size_t agents_;
  TypeGrid grid_;
  std::vector<double> allocation_;
  std::vector<double> payments_;
  Feasibility feasibility_;
  std::size_t profile_count_ = 0;
  std::vector<std::size_t> strides_;
};

struct FeasibilityViolation {
  std::size_t profile = 0;
  std::vector<double> types;
  double slack = 0.0;  // 1 - sum_i X_i
};

struct FeasibilityVerdict {
  bool feasible = true;
  double worst_slack = 0.0;  // slack with the largest violation (0 under Free)
  std::vector<FeasibilityViolation> violations;
};

FeasibilityVerdict check_feasibility(const MechanismTable& mech);

/// g(X_i(r, t^{-i}), t) - P_i(r, t^{-i}). Types are grid values; `opponents`
/// lists the other agents' types in agent order.
double utility(const PayoffModel& model, const MechanismTable& mech, std::size_t agent,
               std::span<const double> opponents, double true_type, double report);

/// Index form of `utility` used by the verifier's inner loops.
inline double utility_at(const PayoffModel& model, const MechanismTable& mech, std::size_t agent,
                         std::size_t base, std::size_t true_index, std::size_t report_index) {
  const std::size_t profile = base + report_index * mech.stride(agent);
  return model.g(mech.allocation(profile, agent), mech.grid()[true_index]) -
         mech.payment(profile, agent);
}

/// Vickrey auction: the highest types split the good evenly and each winner
/// pays its share times the highest opposing type.
MechanismTable make_second_price(std::size_t agents, const TypeGrid& grid);

MechanismTable make_constant(std::size_t agents, const TypeGrid& grid, double x, double p,
                             Feasibility feasibility = Feasibility::SumLeOne);

/// Single agent facing a take-it-or-leave-it price: X = 1 if t >= price, P = X * price.
MechanismTable make_posted_price(const TypeGrid& grid, double price);

/// Random allocation whose own-type slices are weakly (or strictly) increasing,
/// scaled into [0, 1/n] per agent so that sum_i X_i <= 1. Strict slices rise by
/// at least min_spacing/10 per grid step (n <= 8). Payments are zero.
MechanismTable make_random_monotone(std::size_t agents, const TypeGrid& grid, std::uint64_t seed,
                                    bool strict);

}  // namespace sspkit
