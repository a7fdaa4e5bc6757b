#include "signhunt/tensor.hpp"

#include <algorithm>
#include <bit>
#include <cmath>

#include "signhunt/errors.hpp"

namespace signhunt {

std::string Shape::str() const {
  return "(" + std::to_string(channels) + "," + std::to_string(height) + "," +
         std::to_string(width) + ")";
}

ImageTensor::ImageTensor(Shape shape, float fill)
    : shape_(shape), data_(shape.size(), fill) {
  SIGNHUNT_REQUIRE(shape.valid(), "ImageTensor: non-positive dimension " + shape.str());
}

ImageTensor::ImageTensor(Shape shape, std::vector<float> data)
    : shape_(shape), data_(std::move(data)) {
  SIGNHUNT_REQUIRE(shape.valid(), "ImageTensor: non-positive dimension " + shape.str());
  SIGNHUNT_REQUIRE(data_.size() == shape.size(),
                   "ImageTensor: data length " + std::to_string(data_.size()) +
                       " does not match shape " + shape.str());
}

bool ImageTensor::in_unit_range() const {
  return std::all_of(data_.begin(), data_.end(),
                     [](float v) { return v >= 0.0F && v <= 1.0F; });
}

std::uint64_t ImageTensor::digest() const {
  std::uint64_t h = hash_combine(0x5157u, static_cast<std::uint64_t>(shape_.channels));
  h = hash_combine(h, static_cast<std::uint64_t>(shape_.height));
  h = hash_combine(h, static_cast<std::uint64_t>(shape_.width));
  for (float v : data_) h = hash_combine(h, std::bit_cast<std::uint32_t>(v));
  return h;
}

SignCandidate::SignCandidate(Shape shape, std::vector<float> data)
    : shape_(shape), data_(std::move(data)) {
  SIGNHUNT_REQUIRE(data_.size() == shape.size(), "SignCandidate: data length mismatch");
  SIGNHUNT_REQUIRE(sign_closed(), "SignCandidate: element outside {-1, +1}");
}

bool SignCandidate::sign_closed() const {
  return std::all_of(data_.begin(), data_.end(),
                     [](float v) { return v == 1.0F || v == -1.0F; });
}

double linf_distance(const ImageTensor& a, const ImageTensor& b) {
  SIGNHUNT_REQUIRE(a.shape() == b.shape(), "linf_distance: shape mismatch " +
                                               a.shape().str() + " vs " + b.shape().str());
  double best = 0.0;
  auto da = a.data();
  auto db = b.data();
  for (std::size_t i = 0; i < da.size(); ++i) {
    best = std::max(best, std::abs(static_cast<double>(da[i]) - static_cast<double>(db[i])));
  }
  return best;
}

ImageTensor clip_unit(ImageTensor x) {
  for (float& v : x.mutable_data()) v = std::clamp(v, 0.0F, 1.0F);
  return x;
}

ImageTensor perturb(const ImageTensor& base, const SignCandidate& signs, double step) {
  SIGNHUNT_REQUIRE(base.shape() == signs.shape(), "perturb: shape mismatch");
  SIGNHUNT_REQUIRE(step >= 0.0, "perturb: negative step");
  ImageTensor out(base.shape());
  auto src = base.data();
  auto dir = signs.data();
  auto dst = out.mutable_data();
  for (std::size_t i = 0; i < src.size(); ++i) {
    const double v = static_cast<double>(src[i]) + step * static_cast<double>(dir[i]);
    dst[i] = static_cast<float>(std::clamp(v, 0.0, 1.0));
  }
  return out;
}

ImageTensor project_linf(ImageTensor x, const ImageTensor& center, double radius) {
  SIGNHUNT_REQUIRE(x.shape() == center.shape(), "project_linf: shape mismatch");
  auto c = center.data();
  auto d = x.mutable_data();
  for (std::size_t i = 0; i < d.size(); ++i) {
    const double lo = static_cast<double>(c[i]) - radius;
    const double hi = static_cast<double>(c[i]) + radius;
    double v = std::clamp(static_cast<double>(d[i]), lo, hi);
    float f = static_cast<float>(v);
    // Rounding to float may land just outside the ball; step back inward.
    if (static_cast<double>(f) > hi) f = std::nextafter(f, -INFINITY);
    if (static_cast<double>(f) < lo) f = std::nextafter(f, INFINITY);
    d[i] = f;
  }
  return x;
}

SignCandidate random_sign_tensor(Shape shape, RngStream& rng) {
  SIGNHUNT_REQUIRE(shape.valid(), "random_sign_tensor: non-positive dimension");
  std::vector<float> data(shape.size());
  for (float& v : data) v = rng.coin() ? 1.0F : -1.0F;
  return SignCandidate(shape, std::move(data));
}

}  // namespace signhunt
