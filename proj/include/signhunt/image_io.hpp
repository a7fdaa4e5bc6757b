#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "signhunt/tensor.hpp"

namespace signhunt {

// TF32: <stem>.tf32.json manifest {"dtype":"f32le","shape":[C,H,W],"data":"<file>"}
// next to a raw little-endian float32 file. The data path is relative to the
// manifest's directory.
void save_tf32(const ImageTensor& image, const std::filesystem::path& manifest_path);
ImageTensor load_tf32(const std::filesystem::path& manifest_path);

// 8-bit PNG, grayscale (C=1) or RGB (C=3). Pixel p maps to p / 255.
std::vector<std::uint8_t> encode_png(const ImageTensor& image);
ImageTensor decode_png(const std::vector<std::uint8_t>& bytes);
void save_png(const ImageTensor& image, const std::filesystem::path& path);
ImageTensor load_png(const std::filesystem::path& path);

// Dispatches on extension: .png or .tf32.json / .json.
ImageTensor load_image(const std::filesystem::path& path);

std::vector<std::uint8_t> read_file(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path, const void* data, std::size_t size);
// Writes to a sibling temporary then renames over the target.
void write_file_atomic(const std::filesystem::path& path, const std::string& contents);

std::string sha256_hex(const void* data, std::size_t size);
std::string base64_encode(const std::vector<std::uint8_t>& bytes);
std::vector<std::uint8_t> base64_decode(const std::string& text);

// Little-endian float32 packing, independent of host byte order.
std::vector<std::uint8_t> pack_f32le(std::span<const float> values);
std::vector<float> unpack_f32le(std::span<const std::uint8_t> bytes);

}  // namespace signhunt
