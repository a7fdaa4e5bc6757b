#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "signhunt/rng.hpp"

namespace signhunt {

struct Shape {
  int channels = 0;
  int height = 0;
  int width = 0;

  std::size_t size() const {
    return static_cast<std::size_t>(channels) * height * width;
  }
  bool valid() const { return channels > 0 && height > 0 && width > 0; }
  std::string str() const;

  friend bool operator==(const Shape&, const Shape&) = default;
};

// Float image of shape (C, H, W), row-major. Valid images live in [0, 1];
// the type itself does not enforce that so that intermediate values (for
// example finite-difference probes) can be represented.
class ImageTensor {
 public:
  ImageTensor() = default;
  explicit ImageTensor(Shape shape, float fill = 0.0F);
  ImageTensor(Shape shape, std::vector<float> data);

  const Shape& shape() const { return shape_; }
  std::size_t size() const { return data_.size(); }
  std::span<const float> data() const { return data_; }
  std::span<float> mutable_data() { return data_; }
  float operator[](std::size_t i) const { return data_[i]; }
  float& operator[](std::size_t i) { return data_[i]; }

  bool in_unit_range() const;
  // 64-bit digest of shape and bytes; used to key fitness caches.
  std::uint64_t digest() const;

  friend bool operator==(const ImageTensor&, const ImageTensor&) = default;

 private:
  Shape shape_;
  std::vector<float> data_;
};

// Tensor whose every element is exactly -1.0f or +1.0f. Construction
// verifies the sign domain, so any instance that exists is closed.
class SignCandidate {
 public:
  SignCandidate() = default;
  SignCandidate(Shape shape, std::vector<float> data);

  const Shape& shape() const { return shape_; }
  std::size_t size() const { return data_.size(); }
  std::span<const float> data() const { return data_; }
  float operator[](std::size_t i) const { return data_[i]; }

  // Re-checks the invariant; cheap enough to call from tests and hooks.
  bool sign_closed() const;

  friend bool operator==(const SignCandidate&, const SignCandidate&) = default;

 private:
  Shape shape_;
  std::vector<float> data_;
};

double linf_distance(const ImageTensor& a, const ImageTensor& b);
ImageTensor clip_unit(ImageTensor x);
// clip_unit(base + step * signs)
ImageTensor perturb(const ImageTensor& base, const SignCandidate& signs, double step);
// Elementwise clamp of x into [center - radius, center + radius].
ImageTensor project_linf(ImageTensor x, const ImageTensor& center, double radius);
SignCandidate random_sign_tensor(Shape shape, RngStream& rng);

}  // namespace signhunt
