#include "signhunt/gradient.hpp"

#include <algorithm>
#include <cmath>

#include "signhunt/errors.hpp"

namespace signhunt {

double cross_entropy(const Model& model, const ImageTensor& image, int label) {
  const std::vector<double> z = model.logits(image);
  SIGNHUNT_REQUIRE(label >= 0 && static_cast<std::size_t>(label) < z.size(),
                   "cross_entropy: label out of range");
  const double peak = *std::max_element(z.begin(), z.end());
  double total = 0.0;
  for (double v : z) total += std::exp(v - peak);
  return peak + std::log(total) - z[static_cast<std::size_t>(label)];
}

std::vector<double> numeric_gradient(const Model& model, const ImageTensor& image, int label,
                                     double h, QueryBudget& budget) {
  SIGNHUNT_REQUIRE(h > 0.0, "numeric_gradient: step must be positive");
  budget.consume(2 * static_cast<std::uint64_t>(image.size()));
  std::vector<double> grad(image.size(), 0.0);
  ImageTensor probe = image;
  for (std::size_t j = 0; j < image.size(); ++j) {
    const float original = image[j];
    const float plus = static_cast<float>(static_cast<double>(original) + h);
    const float minus = static_cast<float>(static_cast<double>(original) - h);
    probe[j] = plus;
    const double up = cross_entropy(model, probe, label);
    probe[j] = minus;
    const double down = cross_entropy(model, probe, label);
    probe[j] = original;
    grad[j] = (up - down) / (static_cast<double>(plus) - static_cast<double>(minus));
  }
  return grad;
}

}  // namespace signhunt
