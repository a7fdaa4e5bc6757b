#pragma once

#include <atomic>
#include <cstdint>
#include <filesystem>
#include <limits>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "signhunt/tensor.hpp"

namespace signhunt {

enum class LayerKind { kDense, kConv2d, kRelu, kMaxPool2x2, kFlatten, kSoftmax };

const char* layer_kind_name(LayerKind kind);
LayerKind parse_layer_kind(const std::string& name);

// One layer of a sequential network. Parameter offsets index into the model's
// flat float blob. Dense weights are out x in, row-major; conv weights are
// out_ch x in_ch x kernel_h x kernel_w.
struct LayerSpec {
  LayerKind kind = LayerKind::kRelu;
  int in_dim = 0;
  int out_dim = 0;
  int in_channels = 0;
  int out_channels = 0;
  int kernel_h = 0;
  int kernel_w = 0;
  int stride = 1;
  int padding = 0;
  std::size_t weight_offset = 0;
  std::size_t bias_offset = 0;

  std::size_t weight_count() const;
  std::size_t bias_count() const;

  static LayerSpec dense(int in_dim, int out_dim);
  static LayerSpec conv2d(int in_ch, int out_ch, int kh, int kw, int stride = 1, int padding = 0);
  static LayerSpec simple(LayerKind kind);
};

// Forward-only sequential network on (C,H,W) inputs. Activations are carried in
// double precision; the parameter blob is float32. The last layer must be
// softmax so that forward() returns probabilities.
class Model {
 public:
  Model(Shape input_shape, std::vector<LayerSpec> layers, std::vector<float> weights);

  // Builds a model with freshly assigned contiguous offsets and a zeroed blob.
  static Model with_layout(Shape input_shape, std::vector<LayerSpec> layers);

  const Shape& input_shape() const { return input_shape_; }
  const std::vector<LayerSpec>& layers() const { return layers_; }
  const std::vector<float>& weights() const { return weights_; }
  std::vector<float>& mutable_weights() { return weights_; }
  int num_classes() const { return num_classes_; }

  // Output of every layer except the trailing softmax.
  std::vector<double> logits(const ImageTensor& image) const;
  std::vector<double> forward(const ImageTensor& image) const;

 private:
  void validate();

  Shape input_shape_;
  std::vector<LayerSpec> layers_;
  std::vector<float> weights_;
  int num_classes_ = 0;
};

std::vector<double> softmax(const std::vector<double>& logits);

enum class ScoreKind { kProbabilities, kRawScores };

// Classifier output. Remote services report only a few labels; scores for
// labels they did not mention read as zero through score().
struct PredictionVector {
  std::vector<float> scores;
  ScoreKind kind = ScoreKind::kProbabilities;

  std::size_t size() const { return scores.size(); }
  double score(int label) const {
    return label >= 0 && static_cast<std::size_t>(label) < scores.size()
               ? static_cast<double>(scores[static_cast<std::size_t>(label)])
               : 0.0;
  }
};

// Index of the largest score; ties go to the lowest index.
int top_label(const PredictionVector& p);
// True iff label ranks within the k best under the order (-score, index).
bool in_top_k(const PredictionVector& p, int label, int k);

// Hard cap on classifier evaluations. Check-and-increment is one atomic step,
// so concurrent evaluators can never push used past limit.
class QueryBudget {
 public:
  static constexpr std::uint64_t kUnlimited = std::numeric_limits<std::uint64_t>::max();

  explicit QueryBudget(std::uint64_t limit = kUnlimited) : limit_(limit) {}
  QueryBudget(const QueryBudget&) = delete;
  QueryBudget& operator=(const QueryBudget&) = delete;

  std::uint64_t limit() const { return limit_; }
  std::uint64_t used() const { return used_.load(std::memory_order_acquire); }
  std::uint64_t remaining() const { return limit_ - used(); }
  bool exhausted() const { return used() >= limit_; }

  // Takes `count` units or throws BudgetExceeded leaving the counter untouched.
  void consume(std::uint64_t count = 1);

 private:
  std::uint64_t limit_;
  std::atomic<std::uint64_t> used_{0};
};

// Opaque evaluation surface. Implementations must be safe to call
// concurrently.
class Classifier {
 public:
  virtual ~Classifier() = default;
  virtual PredictionVector predict(const ImageTensor& image) const = 0;
  // Expected input shape, when the classifier knows it.
  virtual std::optional<Shape> input_shape() const { return std::nullopt; }
};

// Budgeted evaluation: charges one query, then asks the classifier.
PredictionVector classify(const Classifier& classifier, const ImageTensor& image,
                          QueryBudget& budget);

class LocalClassifier : public Classifier {
 public:
  explicit LocalClassifier(std::shared_ptr<const Model> model) : model_(std::move(model)) {}

  PredictionVector predict(const ImageTensor& image) const override;
  std::optional<Shape> input_shape() const override { return model_->input_shape(); }
  const Model& model() const { return *model_; }
  std::shared_ptr<const Model> shared_model() const { return model_; }

 private:
  std::shared_ptr<const Model> model_;
};

// SMF directory: manifest.json + weights.bin (little-endian float32). The
// manifest records the blob's SHA-256 and load() rejects any mismatch.
void save_model(const Model& model, const std::filesystem::path& dir);
Model load_model(const std::filesystem::path& dir);
std::string model_manifest_text(const Model& model);

}  // namespace signhunt
