#pragma once

#include <vector>

#include "signhunt/dataset.hpp"
#include "signhunt/model.hpp"
#include "signhunt/rng.hpp"

namespace signhunt {

// dense -> relu -> ... -> dense -> softmax with the given hidden widths.
struct MlpArchitecture {
  std::vector<int> hidden_units;
};

struct TrainOptions {
  int epochs = 100;
  double learning_rate = 0.05;
};

struct TrainResult {
  Model model;
  double train_accuracy = 0.0;
  double final_loss = 0.0;
};

// Plain per-sample SGD on cross-entropy. Hidden layers get Glorot-uniform
// weights from `rng`; the output layer starts at zero, so an untrained model
// predicts class 0 everywhere. Sample order is reshuffled each epoch from
// `rng`, which makes the result a pure function of the seed.
// Throws TrainingFailed when the loss becomes non-finite.
TrainResult train_toy(const Dataset& data, const MlpArchitecture& arch, const TrainOptions& opts,
                      RngStream& rng);

double accuracy(const Model& model, const Dataset& data);

}  // namespace signhunt
