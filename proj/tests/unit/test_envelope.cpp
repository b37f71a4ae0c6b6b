#include <cmath>
#include <vector>

#include <gtest/gtest.h>

#include "sspkit/envelope.hpp"
#include "sspkit/errors.hpp"
#include "sspkit/mechanism.hpp"

using namespace sspkit;

namespace {

// single agent with X(t) = t on a uniform grid
MechanismTable identity_allocation(std::size_t m) {
  auto grid = TypeGrid::uniform(m);
  std::vector<double> x(grid.points().begin(), grid.points().end());
  return MechanismTable(1, grid, x, std::vector<double>(m, 0.0), Feasibility::Free);
}

}  // namespace

TEST(Interpolation, Names) {
  EXPECT_EQ(interpolation_from_string("step"), Interpolation::LeftStep);
  EXPECT_EQ(interpolation_from_string("left_step"), Interpolation::LeftStep);
  EXPECT_EQ(interpolation_from_string("linear"), Interpolation::Linear);
  EXPECT_THROW(interpolation_from_string("cubic"), DomainError);
}

TEST(AllocationSlice, StepAndLinearValues) {
  auto mech = make_second_price(2, TypeGrid::uniform(3));
  std::vector<double> opp{0.5};
  auto base = mech.base_of(0, opp);
  auto lin = allocation_slice(mech, 0, base, Interpolation::Linear);
  auto step = allocation_slice(mech, 0, base, Interpolation::LeftStep);
  ASSERT_EQ(lin.values.size(), 3u);
  EXPECT_DOUBLE_EQ(lin.at(0.25), 0.25);
  EXPECT_DOUBLE_EQ(lin.at(0.75), 0.75);
  EXPECT_DOUBLE_EQ(step.at(0.25), 0.0);
  EXPECT_DOUBLE_EQ(step.at(0.75), 0.5);
  EXPECT_DOUBLE_EQ(step.at(1.0), 1.0);
  EXPECT_THROW(allocation_slice(mech, 0, base + 3), DomainError);
}

TEST(Envelope, ConstantAllocationGivesConstantPayments) {
  auto prod = PayoffModel::product();
  for (auto interp : {Interpolation::LeftStep, Interpolation::Linear}) {
    auto mech = make_constant(3, TypeGrid::uniform(5), 0.3, 0.2);
    auto env = envelope_payments(prod, mech, std::nullopt, interp);
    for (double p : env.payments()) EXPECT_NEAR(p, 0.2, 1e-12);
    EXPECT_LT(envelope_residual(prod, mech, interp), 1e-12);
  }
}

TEST(Envelope, SecondPriceStepValues) {
  // t2 = 0.5: X = (0, 0.5, 1). Step integrals 0 and 0.25 give P = (0, 0.25, 0.75).
  auto mech = make_second_price(2, TypeGrid::uniform(3));
  auto env = envelope_payments(PayoffModel::product(), mech, std::nullopt, Interpolation::LeftStep);
  const double want[] = {0.0, 0.25, 0.75};
  for (std::size_t k = 0; k < 3; ++k) {
    std::size_t p = env.encode(std::vector<std::size_t>{k, 1});
    EXPECT_NEAR(env.payment(p, 0), want[k], 1e-10);
  }
  EXPECT_NEAR(envelope_residual(PayoffModel::product(), mech, Interpolation::LeftStep), 0.25, 1e-12);
}

TEST(Envelope, SecondPriceLinearValues) {
  // linear slice X(s) = s: P(0.5) = 0.25 - 0.125, P(1) = 1 - 0.5
  auto mech = make_second_price(2, TypeGrid::uniform(3));
  auto env = envelope_payments(PayoffModel::product(), mech);
  const double want[] = {0.0, 0.125, 0.5};
  for (std::size_t k = 0; k < 3; ++k) {
    std::size_t p = env.encode(std::vector<std::size_t>{k, 1});
    EXPECT_NEAR(env.payment(p, 0), want[k], 1e-12);
  }
  EXPECT_NEAR(envelope_residual(PayoffModel::product(), mech), 0.125, 1e-12);
  EXPECT_LT(envelope_residual(PayoffModel::product(), env), 1e-12);
}

TEST(Envelope, PostedPriceIsStepCanonical) {
  auto mech = make_posted_price(TypeGrid::uniform(3), 0.5);
  EXPECT_LT(envelope_residual(PayoffModel::product(), mech, Interpolation::LeftStep), 1e-12);
}

TEST(Envelope, IdentityAllocationConvergence) {
  auto prod = PayoffModel::product();
  for (std::size_t m : {3u, 9u, 17u, 33u}) {
    auto mech = identity_allocation(m);
    auto lin = envelope_payments(prod, mech);
    EXPECT_NEAR(lin.payment(m - 1, 0), 0.5, 1e-12);
    auto step = envelope_payments(prod, mech, std::nullopt, Interpolation::LeftStep);
    // left Riemann sum of s over m-1 cells
    const double h = 1.0 / double(m - 1);
    double riemann = 0.0;
    for (std::size_t k = 0; k + 1 < m; ++k) riemann += h * (double(k) * h);
    EXPECT_NEAR(step.payment(m - 1, 0), 1.0 - riemann, 1e-12);
    EXPECT_LE(std::abs(step.payment(m - 1, 0) - 0.5), 0.5 * h + 1e-12);
  }
}

TEST(Envelope, BaseRowShiftsPayments) {
  auto mech = make_random_monotone(2, TypeGrid::uniform(5), 7, false);
  auto prod = PayoffModel::product();
  auto env = envelope_payments(prod, mech);
  auto row = base_row_of(env);
  for (auto& agent : row) {
    for (auto& v : agent) v += 0.1;
  }
  auto shifted = envelope_payments(prod, mech, row);
  for (std::size_t k = 0; k < env.payments().size(); ++k) {
    EXPECT_NEAR(shifted.payments()[k], env.payments()[k] + 0.1, 1e-12);
  }
  BaseRow short_row(1);
  EXPECT_THROW(envelope_payments(prod, mech, short_row), DomainError);
}

TEST(Envelope, CumulativeIntegral) {
  auto mech = identity_allocation(5);
  auto slice = allocation_slice(mech, 0, 0);
  auto cum = cumulative_g2(PayoffModel::power(2.0), slice);
  ASSERT_EQ(cum.size(), 5u);
  for (std::size_t k = 0; k < 5; ++k) {
    const double t = 0.25 * double(k);
    EXPECT_NEAR(cum[k], t * t * t / 3.0, 1e-12);
  }
  EXPECT_NEAR(integrate_g2_along(PayoffModel::power(2.0), slice, 1.0, 0.5), -(1.0 - 0.125) / 3.0,
              1e-12);
}

TEST(DeviationLoss, RefusesNonEnvelopePayments) {
  auto mech = make_second_price(2, TypeGrid::uniform(3));
  auto prod = PayoffModel::product();
  EXPECT_THROW(DeviationLossFormula(prod, mech), ContractViolation);
  std::vector<double> opp{0.5};
  EXPECT_THROW(deviation_loss_formula(prod, mech, 0, opp, 1.0, 0.0), ContractViolation);
}

TEST(DeviationLoss, SecondPriceHandValues) {
  auto prod = PayoffModel::product();
  auto mech = make_second_price(2, TypeGrid::uniform(3));
  std::vector<double> opp{0.5};
  auto step = envelope_payments(prod, mech, std::nullopt, Interpolation::LeftStep);
  EXPECT_NEAR(deviation_loss_formula(prod, step, 0, opp, 1.0, 0.0, Interpolation::LeftStep), 0.25,
              1e-12);
  auto lin = envelope_payments(prod, mech);
  EXPECT_NEAR(deviation_loss_formula(prod, lin, 0, opp, 1.0, 0.0), 0.5, 1e-12);
  // step envelope leaves t = 1 indifferent to reporting 0.5
  EXPECT_NEAR(deviation_loss_formula(prod, step, 0, opp, 1.0, 0.5, Interpolation::LeftStep), 0.0,
              1e-12);
}

TEST(DeviationLoss, AgreesWithDirectUtility) {
  for (const auto& model : {PayoffModel::product(), PayoffModel::power(1.7), PayoffModel::quadratic(0.4)}) {
    auto mech = envelope_payments(model, make_random_monotone(2, TypeGrid::uniform(6), 11, false));
    DeviationLossFormula f(model, mech);
    for (std::size_t i = 0; i < 2; ++i) {
      for (auto base : mech.slice_bases(i)) {
        for (std::size_t t = 0; t < 6; ++t) {
          for (std::size_t r = 0; r < 6; ++r) {
            const double direct = utility_at(model, mech, i, base, t, t) - utility_at(model, mech, i, base, t, r);
            EXPECT_NEAR(f.loss(i, base, t, r), direct, 1e-10);
          }
        }
      }
    }
  }
}
