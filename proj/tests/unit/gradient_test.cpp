#include <gtest/gtest.h>

#include <cmath>

#include "signhunt/errors.hpp"
#include "signhunt/gradient.hpp"
#include "support.hpp"

namespace signhunt {
namespace {

TEST(NumericGradient, SoftmaxOnlyModelMatchesClosedForm) {
  RngStream rng(1);
  const Model m(Shape{5, 1, 1}, {LayerSpec::simple(LayerKind::kSoftmax)}, {});
  const ImageTensor x = testing::random_image(Shape{5, 1, 1}, rng);
  QueryBudget budget;
  for (int y = 0; y < 5; ++y) {
    const auto g = numeric_gradient(m, x, y, 1e-4, budget);
    const auto p = softmax(std::vector<double>(x.data().begin(), x.data().end()));
    for (int j = 0; j < 5; ++j) EXPECT_NEAR(g[j], p[j] - (j == y ? 1.0 : 0.0), 1e-4);
  }
}

TEST(NumericGradient, ConstantModelHasZeroGradient) {
  const Model m = Model::with_layout(Shape{1, 3, 3}, {LayerSpec::simple(LayerKind::kFlatten),
                                                      LayerSpec::dense(9, 3),
                                                      LayerSpec::simple(LayerKind::kSoftmax)});
  QueryBudget budget;
  for (double g : numeric_gradient(m, ImageTensor(Shape{1, 3, 3}, 0.4F), 1, 1e-4, budget)) {
    EXPECT_NEAR(g, 0.0, 1e-6);
  }
}

TEST(NumericGradient, StepHalvingConsistency) {
  RngStream rng(2);
  const Model m = testing::random_mlp(Shape{1, 4, 4}, 10, 3, rng);
  const ImageTensor x = testing::random_image(Shape{1, 4, 4}, rng);
  QueryBudget budget;
  const auto a = numeric_gradient(m, x, 0, 1e-3, budget);
  const auto b = numeric_gradient(m, x, 0, 1e-4, budget);
  double scale = 0.0;
  for (double v : a) scale = std::max(scale, std::abs(v));
  for (std::size_t j = 0; j < a.size(); ++j) {
    EXPECT_LE(std::abs(a[j] - b[j]), 1e-3 * std::max(std::abs(a[j]), scale));
  }
}

TEST(NumericGradient, ChargesTwoQueriesPerElement) {
  const Model m(Shape{4, 1, 1}, {LayerSpec::simple(LayerKind::kSoftmax)}, {});
  QueryBudget budget(8);
  numeric_gradient(m, ImageTensor(Shape{4, 1, 1}, 0.5F), 0, 1e-4, budget);
  EXPECT_EQ(budget.used(), 8u);
  EXPECT_THROW(numeric_gradient(m, ImageTensor(Shape{4, 1, 1}, 0.5F), 0, 1e-4, budget),
               BudgetExceeded);
}

TEST(CrossEntropy, MatchesDefinition) {
  const Model m(Shape{3, 1, 1}, {LayerSpec::simple(LayerKind::kSoftmax)}, {});
  const ImageTensor x(Shape{3, 1, 1}, {0.1F, 0.7F, 0.2F});
  const auto p = softmax({0.1F, 0.7F, 0.2F});
  EXPECT_NEAR(cross_entropy(m, x, 1), -std::log(p[1]), 1e-12);
  EXPECT_THROW(cross_entropy(m, x, 3), ContractViolation);
}

}  // namespace
}  // namespace signhunt
