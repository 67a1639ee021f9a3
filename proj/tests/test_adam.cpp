#include "swarmcl/adam.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <limits>

using namespace swarmcl;

TEST(Adam, ZeroGradientIsFixedPoint) {
  std::vector<double> theta{0.3, -1.2, 4.0};
  const auto before = theta;
  AdamState s = AdamState::fresh(theta.size());
  adam_step(theta, std::vector<double>(3, 0.0), s);
  EXPECT_EQ(theta, before);
  EXPECT_EQ(s.m, std::vector<double>(3, 0.0));
  EXPECT_EQ(s.v, std::vector<double>(3, 0.0));
  EXPECT_EQ(s.step, 1u);
}

TEST(Adam, FirstStepMatchesHandEvaluation) {
  // m1 = 0.1, v1 = 0.001; m̂ = 1, v̂ = 1; Δ = -lr * 1 / (sqrt(1) + ε).
  const double lr = 0.005, eps = 1e-8;
  const double m1 = (1 - 0.9) * 1.0, v1 = (1 - 0.999) * 1.0;
  const double m_hat = m1 / (1 - 0.9), v_hat = v1 / (1 - 0.999);
  const double expected = 2.0 - lr * m_hat / (std::sqrt(v_hat) + eps);

  std::vector<double> theta{2.0};
  AdamState s = AdamState::fresh(1);
  adam_step(theta, std::vector<double>{1.0}, s);
  EXPECT_DOUBLE_EQ(theta[0], expected);
  EXPECT_NEAR(theta[0] - 2.0, -0.005 / (1 + 1e-8), 1e-15);
  EXPECT_DOUBLE_EQ(s.m[0], 0.1);
  EXPECT_DOUBLE_EQ(s.v[0], 0.001);
}

TEST(Adam, QuadraticToyConverges) {
  std::vector<double> theta{1.0};
  AdamState s = AdamState::fresh(1);
  for (int i = 0; i < 1000; ++i) adam_step(theta, std::vector<double>{2.0 * theta[0]}, s);
  EXPECT_LT(std::abs(theta[0]), 0.05);
  EXPECT_EQ(s.step, 1000u);
}

TEST(Adam, NonFiniteGradientCarriesIndex) {
  std::vector<double> theta{1.0, 2.0, 3.0};
  AdamState s = AdamState::fresh(3);
  const std::vector<double> g{0.0, 1.0, std::numeric_limits<double>::quiet_NaN()};
  try {
    adam_step(theta, g, s);
    FAIL();
  } catch (const NonFiniteGradient& e) {
    EXPECT_EQ(e.index(), 2u);
  }
  EXPECT_EQ(theta, (std::vector<double>{1.0, 2.0, 3.0}));
  EXPECT_EQ(s.step, 0u);
}

TEST(Adam, LengthMismatchRejected) {
  std::vector<double> theta{1.0, 2.0};
  AdamState s = AdamState::fresh(2);
  EXPECT_THROW(adam_step(theta, std::vector<double>{1.0}, s), std::invalid_argument);
}
