#include "swarmcl/autodiff.hpp"

#include <gtest/gtest.h>

#include <random>

#include "fd.hpp"

namespace ad = swarmcl::ad;
using swarmcl::testing::central_difference;
using swarmcl::testing::max_relative_error;

namespace {

std::vector<double> random_values(std::size_t count, std::mt19937_64& gen, double lo = -1.0, double hi = 1.0) {
  std::uniform_real_distribution<double> dist(lo, hi);
  std::vector<double> v(count);
  for (double& x : v) x = dist(gen);
  return v;
}

// Builds a scalar from `inputs` with `op`, then compares the tape gradient
// of every input against central differences.
using Builder = std::function<ad::Tensor(const std::vector<ad::Tensor>&)>;

double gradient_check(const std::vector<ad::Shape>& shapes, const Builder& op, std::mt19937_64& gen,
                      double lo = -1.0, double hi = 1.0) {
  std::vector<std::vector<double>> values;
  for (const ad::Shape& s : shapes) values.push_back(random_values(ad::element_count(s), gen, lo, hi));

  // A fixed random weighting turns any output into a scalar.
  std::vector<double> weights;
  auto scalarize = [&](const ad::Tensor& out) {
    if (weights.size() != out.size()) {
      std::mt19937_64 wgen(99);
      weights = random_values(out.size(), wgen);
    }
    return ad::sum(ad::mul(out, ad::Tensor(out.shape(), weights)));
  };

  double worst = 0.0;
  for (std::size_t which = 0; which < shapes.size(); ++which) {
    ad::Tape tape;
    ad::TapeScope scope(tape);
    std::vector<ad::Tensor> inputs;
    for (std::size_t k = 0; k < shapes.size(); ++k) {
      ad::Tensor t(shapes[k], values[k]);
      inputs.push_back(k == which ? tape.variable(t) : t);
    }
    const ad::Tensor root = scalarize(op(inputs));
    const ad::Tensor g = ad::backward(tape, root).wrt(inputs[which]);
    const std::vector<double> analytic(g.data().begin(), g.data().end());

    const auto numeric = central_difference(
        [&](const std::vector<double>& x) {
          std::vector<ad::Tensor> plain;
          for (std::size_t k = 0; k < shapes.size(); ++k) {
            plain.emplace_back(shapes[k], k == which ? x : values[k]);
          }
          return scalarize(op(plain)).item();
        },
        values[which]);
    worst = std::max(worst, max_relative_error(analytic, numeric, 1e-6));
  }
  return worst;
}

}  // namespace

TEST(Tensor, RejectsSizeMismatchAndNonFinite) {
  EXPECT_THROW(ad::Tensor({2, 2}, {1, 2, 3}), ad::ShapeError);
  EXPECT_THROW(ad::Tensor::vector({1.0, std::nan("")}), ad::NonFiniteError);
  EXPECT_THROW(ad::Tensor::scalar(std::numeric_limits<double>::infinity()), ad::NonFiniteError);
}

TEST(Ops, MatmulIdentity) {
  const auto A = ad::Tensor::matrix(2, 2, {1, 2, 3, 4});
  const auto I = ad::Tensor::matrix(2, 2, {1, 0, 0, 1});
  const auto C = ad::matmul(A, I);
  EXPECT_EQ(C.shape(), (ad::Shape{2, 2}));
  EXPECT_EQ(std::vector<double>(C.data().begin(), C.data().end()), (std::vector<double>{1, 2, 3, 4}));
}

TEST(Ops, ReluDefinition) {
  const auto r = ad::relu(ad::Tensor::vector({-1, 0, 2}));
  EXPECT_EQ(std::vector<double>(r.data().begin(), r.data().end()), (std::vector<double>{0, 0, 2}));
}

TEST(Ops, SoftmaxSymmetric) {
  const auto s = ad::softmax(ad::Tensor::vector({0, 0}));
  EXPECT_DOUBLE_EQ(s[0], 0.5);
  EXPECT_DOUBLE_EQ(s[1], 0.5);
}

TEST(Ops, SoftmaxHugeNegativeScoreIsExactZero) {
  const auto s = ad::softmax(ad::Tensor::matrix(1, 3, {0.3, -1e9, 0.3}));
  EXPECT_EQ(s[1], 0.0);
  EXPECT_DOUBLE_EQ(s[0] + s[2], 1.0);
}

TEST(Ops, ShapeErrorsNameOpAndShapes) {
  const auto a = ad::Tensor::matrix(2, 3, std::vector<double>(6, 1.0));
  const auto b = ad::Tensor::matrix(2, 3, std::vector<double>(6, 1.0));
  try {
    ad::matmul(a, b);
    FAIL() << "matmul accepted [2x3] x [2x3]";
  } catch (const ad::ShapeError& e) {
    const std::string msg = e.what();
    EXPECT_NE(msg.find("matmul"), std::string::npos) << msg;
    EXPECT_NE(msg.find("[2x3] and [2x3]"), std::string::npos) << msg;
  }
  EXPECT_THROW(ad::add(a, ad::Tensor::vector({1, 2})), ad::ShapeError);
  EXPECT_THROW(ad::slice(a, 1, 2, 4), ad::ShapeError);
  EXPECT_THROW(ad::reshape(a, {4, 2}), ad::ShapeError);
}

TEST(Ops, NonFiniteResultRaises) {
  EXPECT_THROW(ad::sqrt(ad::Tensor::vector({-1.0})), ad::NonFiniteError);
  EXPECT_THROW(ad::scale(ad::Tensor::vector({1e300}), 1e300), ad::NonFiniteError);
}

TEST(Backward, SquareAtThree) {
  ad::Tape tape;
  ad::TapeScope scope(tape);
  const auto x = tape.variable(ad::Tensor::scalar(3.0));
  const auto f = ad::mul(x, x);
  EXPECT_DOUBLE_EQ(ad::backward(tape, f).wrt(x).item(), 6.0);
}

TEST(Backward, SumGivesOnes) {
  ad::Tape tape;
  ad::TapeScope scope(tape);
  const auto x = tape.variable(ad::Tensor::vector({1, -2, 3, 0.5, 7}));
  const auto g = ad::backward(tape, ad::sum(x)).wrt(x);
  for (double v : g.data()) EXPECT_EQ(v, 1.0);
}

TEST(Backward, UnusedLeafGetsZero) {
  ad::Tape tape;
  ad::TapeScope scope(tape);
  const auto x = tape.variable(ad::Tensor::vector({1, 2}));
  const auto y = tape.variable(ad::Tensor::vector({3, 4}));
  const auto g = ad::backward(tape, ad::sum(ad::square(x))).wrt(y);
  EXPECT_EQ(g.shape(), y.shape());
  for (double v : g.data()) EXPECT_EQ(v, 0.0);
}

TEST(Backward, RootMustBeScalarOnThisTape) {
  ad::Tape tape, other;
  ad::Tensor x, outside;
  {
    ad::TapeScope scope(tape);
    x = tape.variable(ad::Tensor::vector({1, 2}));
  }
  {
    ad::TapeScope scope(other);
    outside = ad::sum(other.variable(ad::Tensor::vector({1, 2})));
  }
  ad::TapeScope scope(tape);
  EXPECT_THROW(ad::backward(tape, ad::square(x)), std::invalid_argument);
  EXPECT_THROW(ad::backward(tape, outside), std::invalid_argument);
  EXPECT_THROW(ad::backward(tape, ad::Tensor::scalar(1.0)), std::invalid_argument);
}

TEST(Backward, NoRecordingWithoutActiveTape) {
  const auto y = ad::add(ad::Tensor::vector({1}), ad::Tensor::vector({2}));
  EXPECT_FALSE(y.tracked());
  EXPECT_EQ(ad::active_tape(), nullptr);
}

TEST(Tape, InputsPrecedeNodes) {
  ad::Tape tape;
  ad::TapeScope scope(tape);
  const auto x = tape.variable(ad::Tensor::matrix(2, 2, {1, 2, 3, 4}));
  const auto y = ad::tanh(ad::matmul(x, x));
  const auto z = ad::sum(ad::mul(y, ad::Tensor::matrix(2, 2, {1, 1, 1, 1})));
  EXPECT_LT(x.node(), y.node());
  EXPECT_LT(y.node(), z.node());
  EXPECT_EQ(z.node() + 1, tape.size());
}

TEST(Backward, Deterministic) {
  auto run = [] {
    ad::Tape tape;
    ad::TapeScope scope(tape);
    std::mt19937_64 gen(5);
    const auto w = tape.variable(ad::Tensor::matrix(3, 3, random_values(9, gen)));
    const auto x = ad::Tensor::matrix(4, 3, random_values(12, gen));
    const auto y = ad::sum(ad::square(ad::tanh(ad::matmul(x, w))));
    const auto g = ad::backward(tape, y).wrt(w);
    return std::vector<double>(g.data().begin(), g.data().end());
  };
  EXPECT_EQ(run(), run());
}

TEST(GradientCheck, TwoLayerTanhNetwork) {
  std::mt19937_64 gen(11);
  const std::size_t in = 4, hidden = 6, out = 3, batch = 5;
  const auto x = ad::Tensor::matrix(batch, in, random_values(batch * in, gen));
  const double err = gradient_check(
      {{in, hidden}, {hidden}, {hidden, out}, {out}},
      [&](const std::vector<ad::Tensor>& p) {
        const auto h = ad::tanh(ad::bias_add(ad::matmul(x, p[0]), p[1]));
        return ad::tanh(ad::bias_add(ad::matmul(h, p[2]), p[3]));
      },
      gen);
  EXPECT_LT(err, 1e-6);
}

struct OpCase {
  const char* name;
  std::vector<ad::Shape> shapes;
  Builder op;
  double lo = -1.0;
  double hi = 1.0;
};

class EveryOp : public ::testing::TestWithParam<OpCase> {};

TEST_P(EveryOp, MatchesCentralDifferences) {
  std::mt19937_64 gen(2024);
  const OpCase& c = GetParam();
  for (int trial = 0; trial < 5; ++trial) {
    EXPECT_LT(gradient_check(c.shapes, c.op, gen, c.lo, c.hi), 1e-5) << c.name << " trial " << trial;
  }
}

INSTANTIATE_TEST_SUITE_P(
    Ops, EveryOp,
    ::testing::Values(
        OpCase{"add", {{3, 2}, {3, 2}}, [](auto& in) { return ad::add(in[0], in[1]); }},
        OpCase{"sub", {{3, 2}, {3, 2}}, [](auto& in) { return ad::sub(in[0], in[1]); }},
        OpCase{"mul", {{3, 2}, {3, 2}}, [](auto& in) { return ad::mul(in[0], in[1]); }},
        OpCase{"matmul", {{3, 4}, {4, 2}}, [](auto& in) { return ad::matmul(in[0], in[1]); }},
        OpCase{"batched_matmul", {{2, 3, 4}, {2, 4, 2}}, [](auto& in) { return ad::batched_matmul(in[0], in[1]); }},
        OpCase{"concat_rows", {{2, 3}, {1, 3}}, [](auto& in) { return ad::concat({in[0], in[1]}, 0); }},
        OpCase{"concat_cols", {{2, 3}, {2, 1}}, [](auto& in) { return ad::concat({in[0], in[1]}, 1); }},
        OpCase{"slice", {{4, 3}}, [](auto& in) { return ad::slice(in[0], 1, 1, 3); }},
        OpCase{"reshape", {{4, 3}}, [](auto& in) { return ad::reshape(in[0], {2, 6}); }},
        OpCase{"bias_add", {{4, 3}, {3}}, [](auto& in) { return ad::bias_add(in[0], in[1]); }},
        OpCase{"sum", {{4, 3}}, [](auto& in) { return ad::sum(in[0]); }},
        OpCase{"mean", {{4, 3}}, [](auto& in) { return ad::mean(in[0]); }},
        OpCase{"tanh", {{4, 3}}, [](auto& in) { return ad::tanh(in[0]); }},
        // Kept away from the kink at 0.
        OpCase{"relu", {{4, 3}}, [](auto& in) { return ad::relu(in[0]); }, 0.1, 1.0},
        OpCase{"relu_negative", {{4, 3}}, [](auto& in) { return ad::relu(in[0]); }, -1.0, -0.1},
        OpCase{"softmax", {{3, 4}}, [](auto& in) { return ad::softmax(in[0]); }, -2.0, 2.0},
        OpCase{"square", {{4, 3}}, [](auto& in) { return ad::square(in[0]); }},
        OpCase{"sqrt", {{4, 3}}, [](auto& in) { return ad::sqrt(in[0]); }, 0.5, 2.0},
        OpCase{"scale", {{4, 3}}, [](auto& in) { return ad::scale(in[0], -2.5); }},
        OpCase{"reused_input", {{3, 3}}, [](auto& in) { return ad::matmul(in[0], ad::tanh(in[0])); }}),
    [](const ::testing::TestParamInfo<OpCase>& info) { return std::string(info.param.name); });
