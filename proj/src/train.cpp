#include "signhunt/train.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "signhunt/errors.hpp"

namespace signhunt {

double accuracy(const Model& model, const Dataset& data) {
  if (data.empty()) return 0.0;
  std::size_t correct = 0;
  LocalClassifier clf(std::make_shared<Model>(model));
  for (std::size_t i = 0; i < data.size(); ++i) {
    if (top_label(clf.predict(data.images[i])) == data.labels[i]) ++correct;
  }
  return static_cast<double>(correct) / static_cast<double>(data.size());
}

TrainResult train_toy(const Dataset& data, const MlpArchitecture& arch, const TrainOptions& opts,
                      RngStream& rng) {
  SIGNHUNT_REQUIRE(!data.empty(), "train_toy: empty dataset");
  SIGNHUNT_REQUIRE(opts.epochs >= 0 && opts.learning_rate > 0.0, "train_toy: invalid options");
  const int n = data.num_classes;
  SIGNHUNT_REQUIRE(n >= 2, "train_toy: need at least two classes");
  for (int y : data.labels) SIGNHUNT_REQUIRE(y >= 0 && y < n, "train_toy: label out of range");

  const Shape input = data.images.front().shape();
  std::vector<LayerSpec> layers;
  int width = static_cast<int>(input.size());
  for (int h : arch.hidden_units) {
    SIGNHUNT_REQUIRE(h > 0, "train_toy: hidden width must be positive");
    layers.push_back(LayerSpec::dense(width, h));
    layers.push_back(LayerSpec::simple(LayerKind::kRelu));
    width = h;
  }
  layers.push_back(LayerSpec::dense(width, n));
  layers.push_back(LayerSpec::simple(LayerKind::kSoftmax));
  Model model = Model::with_layout(input, layers);

  // Dense layers in order, for the backward pass.
  std::vector<LayerSpec> dense;
  for (const LayerSpec& l : model.layers()) {
    if (l.kind == LayerKind::kDense) dense.push_back(l);
  }
  std::vector<float>& w = model.mutable_weights();
  for (std::size_t k = 0; k + 1 < dense.size(); ++k) {
    const LayerSpec& l = dense[k];
    const double bound = std::sqrt(6.0 / (l.in_dim + l.out_dim));
    for (std::size_t i = 0; i < l.weight_count(); ++i) {
      w[l.weight_offset + i] = static_cast<float>((2.0 * rng.uniform() - 1.0) * bound);
    }
  }

  std::vector<std::size_t> order(data.size());
  std::iota(order.begin(), order.end(), 0);
  // acts[k] = input to dense layer k (post-relu for k > 0).
  std::vector<std::vector<double>> acts(dense.size());
  std::vector<std::vector<double>> pre(dense.size());
  double epoch_loss = 0.0;

  for (int epoch = 0; epoch < opts.epochs; ++epoch) {
    for (std::size_t i = order.size(); i > 1; --i) {
      std::swap(order[i - 1], order[rng.below(i)]);
    }
    epoch_loss = 0.0;
    for (std::size_t idx : order) {
      const auto img = data.images[idx].data();
      acts[0].assign(img.begin(), img.end());
      for (std::size_t k = 0; k < dense.size(); ++k) {
        const LayerSpec& l = dense[k];
        pre[k].assign(static_cast<std::size_t>(l.out_dim), 0.0);
        for (int o = 0; o < l.out_dim; ++o) {
          double acc = w[l.bias_offset + static_cast<std::size_t>(o)];
          const std::size_t row = l.weight_offset + static_cast<std::size_t>(o) * l.in_dim;
          for (int j = 0; j < l.in_dim; ++j) acc += w[row + static_cast<std::size_t>(j)] * acts[k][j];
          pre[k][static_cast<std::size_t>(o)] = acc;
        }
        if (k + 1 < dense.size()) {
          acts[k + 1] = pre[k];
          for (double& v : acts[k + 1]) v = std::max(v, 0.0);
        }
      }
      std::vector<double> probs = softmax(pre.back());
      const int y = data.labels[idx];
      const double loss = -std::log(std::max(probs[static_cast<std::size_t>(y)], 1e-300));
      if (!std::isfinite(loss)) {
        throw TrainingFailed("train_toy: non-finite loss at epoch " + std::to_string(epoch));
      }
      epoch_loss += loss;

      // delta = dLoss/dpre for the current layer.
      std::vector<double> delta = std::move(probs);
      delta[static_cast<std::size_t>(y)] -= 1.0;
      for (std::size_t k = dense.size(); k-- > 0;) {
        const LayerSpec& l = dense[k];
        std::vector<double> back;
        if (k > 0) {
          back.assign(static_cast<std::size_t>(l.in_dim), 0.0);
          for (int o = 0; o < l.out_dim; ++o) {
            const std::size_t row = l.weight_offset + static_cast<std::size_t>(o) * l.in_dim;
            for (int j = 0; j < l.in_dim; ++j) back[j] += w[row + static_cast<std::size_t>(j)] * delta[o];
          }
          for (int j = 0; j < l.in_dim; ++j) {
            if (pre[k - 1][static_cast<std::size_t>(j)] <= 0.0) back[j] = 0.0;
          }
        }
        for (int o = 0; o < l.out_dim; ++o) {
          const double d = opts.learning_rate * delta[static_cast<std::size_t>(o)];
          const std::size_t row = l.weight_offset + static_cast<std::size_t>(o) * l.in_dim;
          for (int j = 0; j < l.in_dim; ++j) {
            w[row + static_cast<std::size_t>(j)] -= static_cast<float>(d * acts[k][j]);
          }
          w[l.bias_offset + static_cast<std::size_t>(o)] -= static_cast<float>(d);
        }
        delta = std::move(back);
      }
    }
    epoch_loss /= static_cast<double>(data.size());
    if (!std::isfinite(epoch_loss)) {
      throw TrainingFailed("train_toy: non-finite loss at epoch " + std::to_string(epoch));
    }
    if (!std::all_of(w.begin(), w.end(), [](float v) { return std::isfinite(v); })) {
      throw TrainingFailed("train_toy: weights diverged at epoch " + std::to_string(epoch));
    }
  }

  TrainResult result{std::move(model), 0.0, epoch_loss};
  result.train_accuracy = accuracy(result.model, data);
  return result;
}

}  // namespace signhunt
