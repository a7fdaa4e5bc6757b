#pragma once

#include <atomic>
#include <functional>
#include <memory>
#include <vector>

#include "signhunt/dataset.hpp"
#include "signhunt/model.hpp"
#include "signhunt/rng.hpp"
#include "signhunt/tensor.hpp"
#include "signhunt/train.hpp"

namespace signhunt::testing {

// Two raw scores F0 = 0.5 - d/2, F1 = 0.5 + d/2 with d = sum_j s_j (I_j - 0.5).
// Around the grey image with label 0 the untargeted fitness of candidate c at
// step a is -a * <c, s>, so the hidden sign vector s is the unique optimum.
class SurrogateClassifier : public Classifier {
 public:
  explicit SurrogateClassifier(SignCandidate hidden) : hidden_(std::move(hidden)) {}
  PredictionVector predict(const ImageTensor& image) const override;
  std::optional<Shape> input_shape() const override { return hidden_.shape(); }
  const SignCandidate& hidden() const { return hidden_; }

 private:
  SignCandidate hidden_;
};

// Forwards to another classifier and counts calls, thread-safely.
class CountingClassifier : public Classifier {
 public:
  explicit CountingClassifier(const Classifier& inner) : inner_(inner) {}
  PredictionVector predict(const ImageTensor& image) const override {
    calls_.fetch_add(1, std::memory_order_relaxed);
    return inner_.predict(image);
  }
  std::optional<Shape> input_shape() const override { return inner_.input_shape(); }
  std::uint64_t calls() const { return calls_.load(); }

 private:
  const Classifier& inner_;
  mutable std::atomic<std::uint64_t> calls_{0};
};

// Always reports the same probabilities.
class ConstantClassifier : public Classifier {
 public:
  explicit ConstantClassifier(std::vector<float> scores) : scores_(std::move(scores)) {}
  PredictionVector predict(const ImageTensor&) const override { return {scores_}; }

 private:
  std::vector<float> scores_;
};

// Random weights in [-scale, scale] for every parameter of `layers`.
Model random_model(Shape input, std::vector<LayerSpec> layers, RngStream& rng, double scale = 1.0);
// flatten -> dense(in, classes) -> softmax with the given weight rows.
Model linear_model(Shape input, const std::vector<std::vector<float>>& rows,
                   const std::vector<float>& bias);
// Random dense MLP: flatten -> dense -> relu -> dense -> softmax.
Model random_mlp(Shape input, int hidden, int classes, RngStream& rng, double scale = 1.0);

ImageTensor random_image(Shape shape, RngStream& rng);

// The 3-class 8x8 pattern dataset and a one-hidden-layer (32 units) MLP
// trained on it; built once per process and shared.
struct ToySetup {
  Dataset data;
  std::shared_ptr<const Model> model;
  double train_accuracy = 0.0;
};
const ToySetup& toy_setup();

}  // namespace signhunt::testing
