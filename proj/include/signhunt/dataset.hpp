#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "signhunt/rng.hpp"
#include "signhunt/tensor.hpp"

namespace signhunt {

struct Dataset {
  std::vector<std::string> ids;
  std::vector<ImageTensor> images;
  std::vector<int> labels;
  int num_classes = 0;

  std::size_t size() const { return images.size(); }
  bool empty() const { return images.empty(); }
  void add(std::string id, ImageTensor image, int label);
};

// Two Gaussian blobs in a (1,1,2) "image", one per class, centred at
// (0.25,0.25) and (0.75,0.75). Linearly separable for small spread.
Dataset make_blobs(int per_class, double spread, RngStream& rng);

// Synthetic striped-pattern images: class 0 horizontal stripes, class 1
// vertical stripes, class 2 a checkerboard, further classes diagonal stripes
// with increasing period. Pixels are low/high intensities plus Gaussian noise,
// clipped to [0,1].
struct PatternOptions {
  int num_classes = 3;
  int height = 8;
  int width = 8;
  int per_class = 40;
  double low = 0.3;
  double high = 0.7;
  double noise = 0.08;
};
Dataset make_pattern_dataset(const PatternOptions& options, RngStream& rng);

double gaussian(RngStream& rng);

// Loads either a PNG directory with labels.csv (filename,label) or a JSON
// index {"num_classes":n,"items":[{"id":..,"tensor":"x.tf32.json","label":k}]}.
// A directory is read as PNG+CSV when labels.csv exists, else via index.json.
Dataset load_dataset(const std::filesystem::path& path);
// Writes the TF32 + index.json layout.
void save_dataset(const Dataset& dataset, const std::filesystem::path& dir);

}  // namespace signhunt
