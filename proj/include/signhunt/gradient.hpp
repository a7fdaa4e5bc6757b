#pragma once

#include <vector>

#include "signhunt/model.hpp"
#include "signhunt/tensor.hpp"

namespace signhunt {

// Cross-entropy of the model's softmax output against `label`, computed from
// the logits with log-sum-exp in double precision.
double cross_entropy(const Model& model, const ImageTensor& image, int label);

// Central finite-difference gradient of cross_entropy(model, ., label) with
// respect to every input element. The probes are rounded to float like any
// other image, so each difference is divided by the actual distance between
// the two probes rather than by 2h. Charges 2 * image.size() queries.
std::vector<double> numeric_gradient(const Model& model, const ImageTensor& image, int label,
                                     double h, QueryBudget& budget);

inline constexpr double kDefaultFiniteDifferenceStep = 1e-4;

}  // namespace signhunt
