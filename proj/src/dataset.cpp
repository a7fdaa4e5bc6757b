#include "signhunt/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numbers>
#include <sstream>

#include <json.hpp>

#include "signhunt/errors.hpp"
#include "signhunt/image_io.hpp"

namespace signhunt {

namespace fs = std::filesystem;
using nlohmann::json;

void Dataset::add(std::string id, ImageTensor image, int label) {
  SIGNHUNT_REQUIRE(label >= 0, "dataset label must be non-negative");
  if (!images.empty()) {
    SIGNHUNT_REQUIRE(image.shape() == images.front().shape(), "dataset images differ in shape");
  }
  ids.push_back(std::move(id));
  images.push_back(std::move(image));
  labels.push_back(label);
  num_classes = std::max(num_classes, label + 1);
}

double gaussian(RngStream& rng) {
  // Box-Muller; 1 - u keeps the log argument in (0, 1].
  const double u1 = 1.0 - rng.uniform();
  const double u2 = rng.uniform();
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

Dataset make_blobs(int per_class, double spread, RngStream& rng) {
  Dataset ds;
  const double centres[2] = {0.25, 0.75};
  for (int i = 0; i < per_class; ++i) {
    for (int c = 0; c < 2; ++c) {
      std::vector<float> v(2);
      for (float& x : v) {
        x = static_cast<float>(std::clamp(centres[c] + spread * gaussian(rng), 0.0, 1.0));
      }
      ds.add("blob" + std::to_string(2 * i + c), ImageTensor(Shape{1, 1, 2}, std::move(v)), c);
    }
  }
  return ds;
}

namespace {

bool pattern_on(int cls, int y, int x) {
  switch (cls) {
    case 0: return (y / 2) % 2 == 0;
    case 1: return (x / 2) % 2 == 0;
    case 2: return ((x / 2) + (y / 2)) % 2 == 0;
    default: {
      const int period = 2 + (cls - 3);
      return ((x + y) / period) % 2 == 0;
    }
  }
}

}  // namespace

Dataset make_pattern_dataset(const PatternOptions& o, RngStream& rng) {
  SIGNHUNT_REQUIRE(o.num_classes >= 2 && o.per_class >= 0 && o.height > 0 && o.width > 0,
                   "make_pattern_dataset: invalid options");
  Dataset ds;
  ds.num_classes = o.num_classes;
  const Shape shape{1, o.height, o.width};
  int serial = 0;
  for (int i = 0; i < o.per_class; ++i) {
    for (int c = 0; c < o.num_classes; ++c) {
      ImageTensor img(shape);
      for (int y = 0; y < o.height; ++y) {
        for (int x = 0; x < o.width; ++x) {
          const double base = pattern_on(c, y, x) ? o.high : o.low;
          img[static_cast<std::size_t>(y) * o.width + x] =
              static_cast<float>(std::clamp(base + o.noise * gaussian(rng), 0.0, 1.0));
        }
      }
      char id[32];
      std::snprintf(id, sizeof(id), "item%04d", serial++);
      ds.add(id, std::move(img), c);
    }
  }
  return ds;
}

Dataset load_dataset(const fs::path& path) {
  Dataset ds;
  if (fs::is_directory(path) && fs::exists(path / "labels.csv")) {
    std::ifstream in(path / "labels.csv");
    std::string line;
    while (std::getline(in, line)) {
      if (!line.empty() && line.back() == '\r') line.pop_back();
      if (line.empty()) continue;
      const auto comma = line.find(',');
      if (comma == std::string::npos) throw FormatError("labels.csv: missing comma in '" + line + "'");
      const std::string file = line.substr(0, comma);
      const std::string label_text = line.substr(comma + 1);
      int label = 0;
      try {
        label = std::stoi(label_text);
      } catch (const std::exception&) {
        if (ds.empty() && file == "filename") continue;  // header row
        throw FormatError("labels.csv: bad label '" + label_text + "'");
      }
      ds.add(fs::path(file).stem().string(), load_png(path / file), label);
    }
    return ds;
  }
  const fs::path index = fs::is_directory(path) ? path / "index.json" : path;
  const auto raw = read_file(index);
  json j;
  try {
    j = json::parse(raw.begin(), raw.end());
  } catch (const json::exception& e) {
    throw FormatError("dataset index " + index.string() + ": " + e.what());
  }
  const fs::path root = index.parent_path();
  for (const auto& item : j.at("items")) {
    ds.add(item.at("id").get<std::string>(),
           load_image(root / item.at("tensor").get<std::string>()), item.at("label").get<int>());
  }
  if (j.contains("num_classes")) ds.num_classes = std::max(ds.num_classes, j["num_classes"].get<int>());
  return ds;
}

void save_dataset(const Dataset& dataset, const fs::path& dir) {
  fs::create_directories(dir / "tensors");
  json items = json::array();
  for (std::size_t i = 0; i < dataset.size(); ++i) {
    const std::string rel = "tensors/" + dataset.ids[i] + ".tf32.json";
    save_tf32(dataset.images[i], dir / rel);
    items.push_back({{"id", dataset.ids[i]}, {"tensor", rel}, {"label", dataset.labels[i]}});
  }
  json index = {{"num_classes", dataset.num_classes}, {"items", std::move(items)}};
  write_file_atomic(dir / "index.json", index.dump(2) + "\n");
}

}  // namespace signhunt
