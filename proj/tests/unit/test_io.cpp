#include <algorithm>
#include <sstream>
#include <string>

#include <gtest/gtest.h>

#include "sspkit/errors.hpp"
#include "sspkit/io.hpp"
#include "sspkit/mechanism.hpp"

using namespace sspkit;
using nlohmann::json;

namespace {

std::string where_of(const json& doc) {
  try {
    mechanism_from_json(doc);
  } catch (const InputError& e) {
    return e.where();
  }
  return "<no error>";
}

}  // namespace

TEST(Io, RoundTripBuiltinPayoff) {
  auto mech = make_random_monotone(2, TypeGrid::uniform(4), 17, true);
  auto model = PayoffModel::power(1.5);
  auto back = mechanism_from_json(json::parse(mechanism_to_json(model, mech).dump()));
  EXPECT_EQ(back.payoff.family(), PayoffFamily::Power);
  EXPECT_EQ(back.payoff.exponent(), 1.5);
  EXPECT_EQ(back.mech.agents(), 2u);
  EXPECT_TRUE(back.mech.grid() == mech.grid());
  EXPECT_EQ(back.mech.feasibility(), mech.feasibility());
  EXPECT_TRUE(std::equal(mech.allocations().begin(), mech.allocations().end(),
                         back.mech.allocations().begin()));
  EXPECT_TRUE(std::equal(mech.payments().begin(), mech.payments().end(), back.mech.payments().begin()));
}

TEST(Io, RoundTripTabulatedPayoff) {
  PayoffLattice lat{{0.0, 1.0}, {0.0, 1.0}, {0.0, 0.0, 1.0, 2.0}, {0.0, 0.5}};
  auto model = PayoffModel::tabulated(lat, 3.0);
  auto back = payoff_from_json(payoff_to_json(model));
  EXPECT_EQ(back.family(), PayoffFamily::Tabulated);
  EXPECT_EQ(back.g2_bound(), 3.0);
  EXPECT_NEAR(back.g(0.5, 0.5), model.g(0.5, 0.5), 1e-15);
}

TEST(Io, DefaultPayoffIsProduct) {
  auto doc = mechanism_to_json(PayoffModel::product(), make_posted_price(TypeGrid::uniform(3), 0.5));
  doc.erase("payoff");
  EXPECT_EQ(mechanism_from_json(doc).payoff.family(), PayoffFamily::Product);
}

TEST(Io, DiagnosticsNameTheField) {
  const auto good = mechanism_to_json(PayoffModel::product(), make_second_price(2, TypeGrid::uniform(3)));
  auto doc = good;
  doc.erase("payments");
  EXPECT_EQ(where_of(doc), "payments");

  doc = good;
  doc["allocation"][0][1] = json::array({0.5});
  EXPECT_EQ(where_of(doc), "allocation[0][1]");

  doc = good;
  doc["payments"][2][0][1] = "x";
  EXPECT_EQ(where_of(doc), "payments[2][0][1]");

  doc = good;
  doc["grid"] = json::array({0.0, 0.7, 0.5, 1.0});
  EXPECT_EQ(where_of(doc), "grid");

  doc = good;
  doc["payoff"]["family"] = "cubic";
  EXPECT_EQ(where_of(doc), "payoff.family");

  doc = good;
  doc["feasibility"] = "maybe";
  EXPECT_EQ(where_of(doc), "feasibility");

  doc = good;
  doc["agents"] = 0;
  EXPECT_EQ(where_of(doc), "agents");

  doc = good;
  doc["allocation"][1][1][0] = 1.5;
  EXPECT_EQ(where_of(doc), "allocation");

  EXPECT_THROW(parse_mechanism("{\"agents\": 2,"), InputError);
  EXPECT_THROW(load_mechanism("/nonexistent/mech.json"), InputError);
}

TEST(Io, CsvLayout) {
  auto mech = make_second_price(2, TypeGrid::uniform(3));
  std::ostringstream out;
  write_csv(out, mech);
  std::istringstream in(out.str());
  std::string line;
  std::getline(in, line);
  EXPECT_EQ(line, "t1,t2,X1,X2,P1,P2");
  int rows = 0;
  std::string last;
  while (std::getline(in, line)) {
    ++rows;
    last = line;
  }
  EXPECT_EQ(rows, 9);
  EXPECT_EQ(last, "1,1,0.5,0.5,0.5,0.5");
}

TEST(Io, DistributionFiles) {
  auto shared = distribution_from_json(json::parse("[0.2, 0.3, 0.5]"), 2, 3);
  ASSERT_EQ(shared.weights.size(), 2u);
  EXPECT_EQ(shared.weights[1][2], 0.5);
  auto per = distribution_from_json(json::parse("[[1, 0, 0], [0, 0, 1]]"), 2, 3);
  EXPECT_EQ(per.weights[0][0], 1.0);
  EXPECT_THROW(distribution_from_json(json::parse("[0.2, 0.3]"), 2, 3), InputError);
  EXPECT_THROW(distribution_from_json(json::parse("[0.2, 0.3, 0.6]"), 2, 3), InputError);
}

TEST(Io, ReportsSerialize) {
  auto sp = make_second_price(2, TypeGrid::uniform(3));
  auto prod = PayoffModel::product();
  auto r = to_json(check_strict_sp(prod, sp));
  EXPECT_FALSE(r.at("strict_sp").get<bool>());
  EXPECT_TRUE(r.at("witnesses").is_array());
  auto c = to_json(characterize(prod, sp));
  EXPECT_TRUE(c.at("consistent").get<bool>());
}
