#include "signhunt/model.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include <json.hpp>

#include "signhunt/errors.hpp"
#include "signhunt/image_io.hpp"

namespace signhunt {

namespace fs = std::filesystem;
using nlohmann::json;

const char* layer_kind_name(LayerKind kind) {
  switch (kind) {
    case LayerKind::kDense: return "dense";
    case LayerKind::kConv2d: return "conv2d";
    case LayerKind::kRelu: return "relu";
    case LayerKind::kMaxPool2x2: return "maxpool2x2";
    case LayerKind::kFlatten: return "flatten";
    case LayerKind::kSoftmax: return "softmax";
  }
  return "?";
}

LayerKind parse_layer_kind(const std::string& name) {
  for (LayerKind k : {LayerKind::kDense, LayerKind::kConv2d, LayerKind::kRelu,
                      LayerKind::kMaxPool2x2, LayerKind::kFlatten, LayerKind::kSoftmax}) {
    if (name == layer_kind_name(k)) return k;
  }
  throw FormatError("unknown layer kind '" + name + "'");
}

std::size_t LayerSpec::weight_count() const {
  switch (kind) {
    case LayerKind::kDense:
      return static_cast<std::size_t>(in_dim) * out_dim;
    case LayerKind::kConv2d:
      return static_cast<std::size_t>(out_channels) * in_channels * kernel_h * kernel_w;
    default:
      return 0;
  }
}

std::size_t LayerSpec::bias_count() const {
  switch (kind) {
    case LayerKind::kDense: return static_cast<std::size_t>(out_dim);
    case LayerKind::kConv2d: return static_cast<std::size_t>(out_channels);
    default: return 0;
  }
}

LayerSpec LayerSpec::dense(int in_dim, int out_dim) {
  LayerSpec s;
  s.kind = LayerKind::kDense;
  s.in_dim = in_dim;
  s.out_dim = out_dim;
  return s;
}

LayerSpec LayerSpec::conv2d(int in_ch, int out_ch, int kh, int kw, int stride, int padding) {
  LayerSpec s;
  s.kind = LayerKind::kConv2d;
  s.in_channels = in_ch;
  s.out_channels = out_ch;
  s.kernel_h = kh;
  s.kernel_w = kw;
  s.stride = stride;
  s.padding = padding;
  return s;
}

LayerSpec LayerSpec::simple(LayerKind kind) {
  LayerSpec s;
  s.kind = kind;
  return s;
}

namespace {

struct Activation {
  Shape shape;
  std::vector<double> values;
};

Shape conv_output_shape(const LayerSpec& l, const Shape& in) {
  const int oh = (in.height + 2 * l.padding - l.kernel_h) / l.stride + 1;
  const int ow = (in.width + 2 * l.padding - l.kernel_w) / l.stride + 1;
  return Shape{l.out_channels, oh, ow};
}

Activation apply_dense(const LayerSpec& l, const std::vector<float>& w, const Activation& in) {
  Activation out{Shape{l.out_dim, 1, 1}, std::vector<double>(static_cast<std::size_t>(l.out_dim))};
  const float* weights = w.data() + l.weight_offset;
  const float* bias = w.data() + l.bias_offset;
  for (int o = 0; o < l.out_dim; ++o) {
    double acc = static_cast<double>(bias[o]);
    const float* row = weights + static_cast<std::size_t>(o) * l.in_dim;
    for (int i = 0; i < l.in_dim; ++i) acc += static_cast<double>(row[i]) * in.values[i];
    out.values[static_cast<std::size_t>(o)] = acc;
  }
  return out;
}

Activation apply_conv(const LayerSpec& l, const std::vector<float>& w, const Activation& in) {
  const Shape os = conv_output_shape(l, in.shape);
  Activation out{os, std::vector<double>(os.size())};
  const float* weights = w.data() + l.weight_offset;
  const float* bias = w.data() + l.bias_offset;
  const int ih = in.shape.height;
  const int iw = in.shape.width;
  for (int oc = 0; oc < os.channels; ++oc) {
    for (int oy = 0; oy < os.height; ++oy) {
      for (int ox = 0; ox < os.width; ++ox) {
        double acc = static_cast<double>(bias[oc]);
        for (int ic = 0; ic < l.in_channels; ++ic) {
          for (int ky = 0; ky < l.kernel_h; ++ky) {
            const int y = oy * l.stride - l.padding + ky;
            if (y < 0 || y >= ih) continue;
            for (int kx = 0; kx < l.kernel_w; ++kx) {
              const int x = ox * l.stride - l.padding + kx;
              if (x < 0 || x >= iw) continue;
              const std::size_t widx =
                  ((static_cast<std::size_t>(oc) * l.in_channels + ic) * l.kernel_h + ky) *
                      l.kernel_w + kx;
              acc += static_cast<double>(weights[widx]) *
                     in.values[(static_cast<std::size_t>(ic) * ih + y) * iw + x];
            }
          }
        }
        out.values[(static_cast<std::size_t>(oc) * os.height + oy) * os.width + ox] = acc;
      }
    }
  }
  return out;
}

Activation apply_maxpool(const Activation& in) {
  const Shape os{in.shape.channels, in.shape.height / 2, in.shape.width / 2};
  Activation out{os, std::vector<double>(os.size())};
  for (int c = 0; c < os.channels; ++c) {
    for (int y = 0; y < os.height; ++y) {
      for (int x = 0; x < os.width; ++x) {
        double best = -INFINITY;
        for (int dy = 0; dy < 2; ++dy) {
          for (int dx = 0; dx < 2; ++dx) {
            best = std::max(best, in.values[(static_cast<std::size_t>(c) * in.shape.height +
                                             2 * y + dy) * in.shape.width + 2 * x + dx]);
          }
        }
        out.values[(static_cast<std::size_t>(c) * os.height + y) * os.width + x] = best;
      }
    }
  }
  return out;
}

}  // namespace

std::vector<double> softmax(const std::vector<double>& logits) {
  SIGNHUNT_REQUIRE(!logits.empty(), "softmax: empty input");
  const double peak = *std::max_element(logits.begin(), logits.end());
  std::vector<double> out(logits.size());
  double total = 0.0;
  for (std::size_t i = 0; i < logits.size(); ++i) {
    out[i] = std::exp(logits[i] - peak);
    total += out[i];
  }
  for (double& v : out) v /= total;
  return out;
}

Model::Model(Shape input_shape, std::vector<LayerSpec> layers, std::vector<float> weights)
    : input_shape_(input_shape), layers_(std::move(layers)), weights_(std::move(weights)) {
  validate();
}

Model Model::with_layout(Shape input_shape, std::vector<LayerSpec> layers) {
  std::size_t offset = 0;
  for (LayerSpec& l : layers) {
    l.weight_offset = offset;
    offset += l.weight_count();
    l.bias_offset = offset;
    offset += l.bias_count();
  }
  return Model(input_shape, std::move(layers), std::vector<float>(offset, 0.0F));
}

void Model::validate() {
  SIGNHUNT_REQUIRE(input_shape_.valid(), "model: invalid input shape " + input_shape_.str());
  SIGNHUNT_REQUIRE(!layers_.empty(), "model: no layers");
  SIGNHUNT_REQUIRE(layers_.back().kind == LayerKind::kSoftmax,
                   "model: last layer must be softmax");
  Shape shape = input_shape_;
  std::size_t params = 0;
  for (std::size_t i = 0; i < layers_.size(); ++i) {
    const LayerSpec& l = layers_[i];
    const std::string where = "model layer " + std::to_string(i) + " (" +
                              layer_kind_name(l.kind) + "): ";
    const std::size_t wc = l.weight_count();
    const std::size_t bc = l.bias_count();
    if (wc + bc > 0) {
      SIGNHUNT_REQUIRE(l.weight_offset + wc <= weights_.size() &&
                           l.bias_offset + bc <= weights_.size(),
                       where + "parameter offsets out of range");
    }
    params += wc + bc;
    switch (l.kind) {
      case LayerKind::kDense:
        SIGNHUNT_REQUIRE(l.in_dim > 0 && l.out_dim > 0, where + "non-positive dims");
        SIGNHUNT_REQUIRE(shape.size() == static_cast<std::size_t>(l.in_dim),
                         where + "expects " + std::to_string(l.in_dim) + " inputs, got " +
                             std::to_string(shape.size()));
        shape = Shape{l.out_dim, 1, 1};
        break;
      case LayerKind::kConv2d:
        SIGNHUNT_REQUIRE(l.in_channels == shape.channels, where + "channel mismatch");
        SIGNHUNT_REQUIRE(l.out_channels > 0 && l.kernel_h > 0 && l.kernel_w > 0 && l.stride > 0 &&
                             l.padding >= 0,
                         where + "invalid geometry");
        shape = conv_output_shape(l, shape);
        SIGNHUNT_REQUIRE(shape.valid(), where + "kernel larger than padded input");
        break;
      case LayerKind::kMaxPool2x2:
        shape = Shape{shape.channels, shape.height / 2, shape.width / 2};
        SIGNHUNT_REQUIRE(shape.valid(), where + "input smaller than 2x2");
        break;
      case LayerKind::kFlatten:
        shape = Shape{static_cast<int>(shape.size()), 1, 1};
        break;
      case LayerKind::kRelu:
        break;
      case LayerKind::kSoftmax:
        SIGNHUNT_REQUIRE(i + 1 == layers_.size(), where + "softmax must be the last layer");
        break;
    }
  }
  SIGNHUNT_REQUIRE(params == weights_.size(),
                   "model: weights blob has " + std::to_string(weights_.size()) +
                       " floats, layers declare " + std::to_string(params));
  num_classes_ = static_cast<int>(shape.size());
}

std::vector<double> Model::logits(const ImageTensor& image) const {
  SIGNHUNT_REQUIRE(image.shape() == input_shape_, "model input shape " + image.shape().str() +
                                                      " does not match " + input_shape_.str());
  Activation act{image.shape(), std::vector<double>(image.data().begin(), image.data().end())};
  for (const LayerSpec& l : layers_) {
    switch (l.kind) {
      case LayerKind::kDense: act = apply_dense(l, weights_, act); break;
      case LayerKind::kConv2d: act = apply_conv(l, weights_, act); break;
      case LayerKind::kMaxPool2x2: act = apply_maxpool(act); break;
      case LayerKind::kFlatten: act.shape = Shape{static_cast<int>(act.shape.size()), 1, 1}; break;
      case LayerKind::kRelu:
        for (double& v : act.values) v = std::max(v, 0.0);
        break;
      case LayerKind::kSoftmax: break;
    }
  }
  return act.values;
}

std::vector<double> Model::forward(const ImageTensor& image) const {
  return softmax(logits(image));
}

int top_label(const PredictionVector& p) {
  SIGNHUNT_REQUIRE(!p.scores.empty(), "top_label: empty prediction");
  int best = 0;
  for (std::size_t i = 1; i < p.scores.size(); ++i) {
    if (p.scores[i] > p.scores[static_cast<std::size_t>(best)]) best = static_cast<int>(i);
  }
  return best;
}

bool in_top_k(const PredictionVector& p, int label, int k) {
  const int n = static_cast<int>(p.scores.size());
  SIGNHUNT_REQUIRE(k >= 1 && k <= n, "in_top_k: k out of range");
  SIGNHUNT_REQUIRE(label >= 0 && label < n, "in_top_k: label out of range");
  // Rank = number of entries that sort strictly before `label`.
  const float s = p.scores[static_cast<std::size_t>(label)];
  int ahead = 0;
  for (int i = 0; i < n; ++i) {
    const float v = p.scores[static_cast<std::size_t>(i)];
    if (v > s || (v == s && i < label)) ++ahead;
  }
  return ahead < k;
}

void QueryBudget::consume(std::uint64_t count) {
  std::uint64_t current = used_.load(std::memory_order_acquire);
  do {
    if (count > limit_ - current) {
      throw BudgetExceeded("query budget exhausted (" + std::to_string(current) + "/" +
                           std::to_string(limit_) + " used)");
    }
  } while (!used_.compare_exchange_weak(current, current + count, std::memory_order_acq_rel));
}

PredictionVector classify(const Classifier& classifier, const ImageTensor& image,
                          QueryBudget& budget) {
  budget.consume(1);
  return classifier.predict(image);
}

PredictionVector LocalClassifier::predict(const ImageTensor& image) const {
  const std::vector<double> probs = model_->forward(image);
  PredictionVector out;
  out.kind = ScoreKind::kProbabilities;
  out.scores.assign(probs.begin(), probs.end());
  return out;
}

std::string model_manifest_text(const Model& model) {
  json layers = json::array();
  for (const LayerSpec& l : model.layers()) {
    json j = {{"kind", layer_kind_name(l.kind)}};
    if (l.kind == LayerKind::kDense) {
      j["in_dim"] = l.in_dim;
      j["out_dim"] = l.out_dim;
    } else if (l.kind == LayerKind::kConv2d) {
      j["in_channels"] = l.in_channels;
      j["out_channels"] = l.out_channels;
      j["kernel_h"] = l.kernel_h;
      j["kernel_w"] = l.kernel_w;
      j["stride"] = l.stride;
      j["padding"] = l.padding;
    }
    if (l.weight_count() + l.bias_count() > 0) {
      j["weight_offset"] = l.weight_offset;
      j["bias_offset"] = l.bias_offset;
    }
    layers.push_back(std::move(j));
  }
  const auto blob = pack_f32le(model.weights());
  const Shape& s = model.input_shape();
  json manifest = {{"format", "SMF"},
                   {"version", 1},
                   {"dtype", "f32le"},
                   {"input_shape", {s.channels, s.height, s.width}},
                   {"num_classes", model.num_classes()},
                   {"layers", std::move(layers)},
                   {"blob", "weights.bin"},
                   {"blob_sha256", sha256_hex(blob.data(), blob.size())}};
  return manifest.dump(2) + "\n";
}

void save_model(const Model& model, const fs::path& dir) {
  fs::create_directories(dir);
  const auto blob = pack_f32le(model.weights());
  write_file(dir / "weights.bin", blob.data(), blob.size());
  const std::string manifest = model_manifest_text(model);
  write_file(dir / "manifest.json", manifest.data(), manifest.size());
}

Model load_model(const fs::path& dir) {
  json manifest;
  try {
    if (!fs::is_regular_file(dir / "manifest.json")) {
      throw CorruptModel("SMF model " + dir.string() + " has no manifest.json");
    }
    const auto raw = read_file(dir / "manifest.json");
    manifest = json::parse(raw.begin(), raw.end());
  } catch (const json::exception& e) {
    throw CorruptModel("SMF manifest " + (dir / "manifest.json").string() + ": " + e.what());
  }
  try {
    if (manifest.value("format", "") != "SMF" || manifest.value("dtype", "") != "f32le") {
      throw CorruptModel("SMF manifest: expected format SMF with dtype f32le");
    }
    const auto blob = read_file(dir / manifest.at("blob").get<std::string>());
    const std::string digest = sha256_hex(blob.data(), blob.size());
    if (digest != manifest.at("blob_sha256").get<std::string>()) {
      throw CorruptModel("SMF weights blob checksum mismatch in " + dir.string());
    }
    const auto& dims = manifest.at("input_shape");
    Shape input{dims.at(0).get<int>(), dims.at(1).get<int>(), dims.at(2).get<int>()};
    std::vector<LayerSpec> layers;
    for (const auto& j : manifest.at("layers")) {
      LayerSpec l = LayerSpec::simple(parse_layer_kind(j.at("kind").get<std::string>()));
      if (l.kind == LayerKind::kDense) {
        l.in_dim = j.at("in_dim").get<int>();
        l.out_dim = j.at("out_dim").get<int>();
      } else if (l.kind == LayerKind::kConv2d) {
        l.in_channels = j.at("in_channels").get<int>();
        l.out_channels = j.at("out_channels").get<int>();
        l.kernel_h = j.at("kernel_h").get<int>();
        l.kernel_w = j.at("kernel_w").get<int>();
        l.stride = j.value("stride", 1);
        l.padding = j.value("padding", 0);
      }
      if (l.weight_count() + l.bias_count() > 0) {
        l.weight_offset = j.at("weight_offset").get<std::size_t>();
        l.bias_offset = j.at("bias_offset").get<std::size_t>();
      }
      layers.push_back(l);
    }
    Model model(input, std::move(layers), unpack_f32le(blob));
    if (manifest.contains("num_classes") &&
        manifest["num_classes"].get<int>() != model.num_classes()) {
      throw CorruptModel("SMF manifest: num_classes disagrees with layer dims");
    }
    return model;
  } catch (const json::exception& e) {
    throw CorruptModel("SMF manifest " + dir.string() + ": " + e.what());
  } catch (const ContractViolation& e) {
    throw CorruptModel(std::string("SMF model invalid: ") + e.what());
  } catch (const CorruptModel&) {
    throw;
  } catch (const FormatError& e) {
    throw CorruptModel(e.what());
  }
}

}  // namespace signhunt
