#include <gtest/gtest.h>

#include <cmath>
#include <limits>

#include "passk/serialize.hpp"

using namespace passk;

TEST(Serialize, FormatDouble) {
  EXPECT_EQ(format_double(0.1), "0.1");
  EXPECT_EQ(format_double(std::numeric_limits<double>::quiet_NaN()), "nan");
  const double x = 0.1 + 0.2;
  EXPECT_EQ(std::stod(format_double(x)), x);
}

TEST(Serialize, BetaParamsRoundTrip) {
  BetaParams p;
  p.alpha = 1.2345678901234567;
  p.beta = 3.5;
  p.theta = 0.75;
  p.log_likelihood = -12.5;
  p.converged = true;
  auto text = to_json(p, {"fit --method beta-binomial", 3});
  EXPECT_NE(text.find("\"seed\": 3"), std::string::npos);
  EXPECT_NE(text.find("fit --method beta-binomial"), std::string::npos);
  auto back = beta_params_from_json(text);
  EXPECT_EQ(back.alpha, p.alpha);
  EXPECT_EQ(back.beta, p.beta);
  EXPECT_EQ(back.theta, p.theta);
  EXPECT_TRUE(back.converged);
}

TEST(Serialize, PowerLawRoundTrip) {
  PowerLawFit f;
  f.slope = 0.25;
  f.intercept = 0.1;
  f.k_min = 1;
  f.k_max = 50;
  auto back = power_law_fit_from_json(to_json(f, {"fit", 0}));
  EXPECT_EQ(back.slope, f.slope);
  EXPECT_EQ(back.intercept, f.intercept);
  EXPECT_THROW(beta_params_from_json("{}"), std::exception);
}

TEST(Serialize, GridCsvLayout) {
  EvalGrid grid;
  grid.budgets = {10};
  grid.ks = {100};
  grid.methods = {"loglog-regression"};
  grid.seed = 4;
  GridCell ok{10, 100, "loglog-regression", 0.5, 0.25, 0.0625, 77, ""};
  GridCell bad{10, 100, "loglog-regression", std::nan(""), 0.25, std::nan(""), 78, "fewer than two points"};
  grid.cells = {ok, bad};
  auto csv = to_csv(grid, {"evaluate --seed 4", 4});
  EXPECT_NE(csv.find("# seed: 4"), std::string::npos);
  EXPECT_NE(csv.find("budget,k,method,prediction,truth,squared_error,seed,error_note\n"), std::string::npos);
  EXPECT_NE(csv.find("10,100,loglog-regression,0.5,0.25,0.0625,77,\n"), std::string::npos);
  EXPECT_NE(csv.find("10,100,loglog-regression,,0.25,,78,"), std::string::npos);
}

TEST(Serialize, AllocationCsv) {
  AllocationPlan plan;
  plan.problem_ids = {"a", "b"};
  plan.budgets = {2.5, 7.5};
  plan.total = 10;
  auto csv = to_csv(plan, true, {"allocate", 0});
  EXPECT_NE(csv.find("problem_id,budget\n"), std::string::npos);
  EXPECT_NE(csv.find("a,2\n") != std::string::npos ? csv.find("a,2\n") : csv.find("a,3\n"), std::string::npos);
}
