#include "support.hpp"

#include <mutex>

namespace signhunt::testing {

PredictionVector SurrogateClassifier::predict(const ImageTensor& image) const {
  double d = 0.0;
  for (std::size_t j = 0; j < image.size(); ++j) {
    d += static_cast<double>(hidden_[j]) * (static_cast<double>(image[j]) - 0.5);
  }
  return {{static_cast<float>(0.5 - d / 2), static_cast<float>(0.5 + d / 2)},
          ScoreKind::kRawScores};
}

Model random_model(Shape input, std::vector<LayerSpec> layers, RngStream& rng, double scale) {
  Model m = Model::with_layout(input, std::move(layers));
  for (float& w : m.mutable_weights()) w = static_cast<float>((2.0 * rng.uniform() - 1.0) * scale);
  return m;
}

Model linear_model(Shape input, const std::vector<std::vector<float>>& rows,
                   const std::vector<float>& bias) {
  const int in = static_cast<int>(input.size());
  const int out = static_cast<int>(rows.size());
  Model m = Model::with_layout(input, {LayerSpec::simple(LayerKind::kFlatten),
                                       LayerSpec::dense(in, out),
                                       LayerSpec::simple(LayerKind::kSoftmax)});
  auto& w = m.mutable_weights();
  std::size_t k = 0;
  for (const auto& row : rows) {
    for (float v : row) w[k++] = v;
  }
  for (float b : bias) w[k++] = b;
  return m;
}

Model random_mlp(Shape input, int hidden, int classes, RngStream& rng, double scale) {
  const int in = static_cast<int>(input.size());
  return random_model(input,
                      {LayerSpec::simple(LayerKind::kFlatten), LayerSpec::dense(in, hidden),
                       LayerSpec::simple(LayerKind::kRelu), LayerSpec::dense(hidden, classes),
                       LayerSpec::simple(LayerKind::kSoftmax)},
                      rng, scale);
}

ImageTensor random_image(Shape shape, RngStream& rng) {
  ImageTensor img(shape);
  for (float& v : img.mutable_data()) v = static_cast<float>(rng.uniform());
  return img;
}

const ToySetup& toy_setup() {
  static std::once_flag once;
  static ToySetup setup;
  std::call_once(once, [] {
    RngStream data_rng(20240501);
    PatternOptions opts;
    opts.per_class = 40;
    setup.data = make_pattern_dataset(opts, data_rng);
    RngStream train_rng(7);
    TrainOptions train;
    train.epochs = 60;
    train.learning_rate = 0.05;
    TrainResult r = train_toy(setup.data, MlpArchitecture{{32}}, train, train_rng);
    setup.train_accuracy = r.train_accuracy;
    setup.model = std::make_shared<const Model>(std::move(r.model));
  });
  return setup;
}

}  // namespace signhunt::testing
