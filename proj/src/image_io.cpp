#include "signhunt/image_io.hpp"

#include <openssl/evp.h>
#include <openssl/sha.h>
#include <png.h>

#include <algorithm>
#include <bit>
#include <cmath>
#include <csetjmp>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <iomanip>
#include <sstream>

#include <json.hpp>

#include "signhunt/errors.hpp"

namespace signhunt {

namespace fs = std::filesystem;
using nlohmann::json;

std::vector<std::uint8_t> read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FormatError("cannot open " + path.string());
  return std::vector<std::uint8_t>(std::istreambuf_iterator<char>(in),
                                   std::istreambuf_iterator<char>());
}

void write_file(const fs::path& path, const void* data, std::size_t size) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw FormatError("cannot write " + path.string());
  out.write(static_cast<const char*>(data), static_cast<std::streamsize>(size));
  if (!out) throw FormatError("short write to " + path.string());
}

void write_file_atomic(const fs::path& path, const std::string& contents) {
  fs::path tmp = path;
  tmp += ".tmp";
  write_file(tmp, contents.data(), contents.size());
  fs::rename(tmp, path);
}

std::vector<std::uint8_t> pack_f32le(std::span<const float> values) {
  std::vector<std::uint8_t> out(values.size() * 4);
  for (std::size_t i = 0; i < values.size(); ++i) {
    const auto bits = std::bit_cast<std::uint32_t>(values[i]);
    out[4 * i + 0] = static_cast<std::uint8_t>(bits);
    out[4 * i + 1] = static_cast<std::uint8_t>(bits >> 8);
    out[4 * i + 2] = static_cast<std::uint8_t>(bits >> 16);
    out[4 * i + 3] = static_cast<std::uint8_t>(bits >> 24);
  }
  return out;
}

std::vector<float> unpack_f32le(std::span<const std::uint8_t> bytes) {
  if (bytes.size() % 4 != 0) throw FormatError("f32le payload length not a multiple of 4");
  std::vector<float> out(bytes.size() / 4);
  for (std::size_t i = 0; i < out.size(); ++i) {
    const std::uint32_t bits = static_cast<std::uint32_t>(bytes[4 * i]) |
                               (static_cast<std::uint32_t>(bytes[4 * i + 1]) << 8) |
                               (static_cast<std::uint32_t>(bytes[4 * i + 2]) << 16) |
                               (static_cast<std::uint32_t>(bytes[4 * i + 3]) << 24);
    out[i] = std::bit_cast<float>(bits);
  }
  return out;
}

void save_tf32(const ImageTensor& image, const fs::path& manifest_path) {
  std::string stem = manifest_path.filename().string();
  const std::string suffix = ".tf32.json";
  if (stem.size() > suffix.size() && stem.ends_with(suffix)) {
    stem.resize(stem.size() - suffix.size());
  } else {
    stem = manifest_path.stem().string();
  }
  const std::string data_name = stem + ".f32";
  const auto bytes = pack_f32le(image.data());
  write_file(manifest_path.parent_path() / data_name, bytes.data(), bytes.size());

  const Shape& s = image.shape();
  json manifest = {{"dtype", "f32le"},
                   {"shape", {s.channels, s.height, s.width}},
                   {"data", data_name}};
  const std::string text = manifest.dump() + "\n";
  write_file(manifest_path, text.data(), text.size());
}

ImageTensor load_tf32(const fs::path& manifest_path) {
  const auto raw = read_file(manifest_path);
  json manifest;
  try {
    manifest = json::parse(raw.begin(), raw.end());
  } catch (const json::exception& e) {
    throw FormatError("TF32 manifest " + manifest_path.string() + ": " + e.what());
  }
  if (manifest.value("dtype", "") != "f32le") {
    throw FormatError("TF32 manifest " + manifest_path.string() + ": dtype must be f32le");
  }
  const auto& dims = manifest.at("shape");
  if (!dims.is_array() || dims.size() != 3) {
    throw FormatError("TF32 manifest: shape must be [C,H,W]");
  }
  Shape shape{dims[0].get<int>(), dims[1].get<int>(), dims[2].get<int>()};
  if (!shape.valid()) throw FormatError("TF32 manifest: non-positive dimension");
  const auto bytes = read_file(manifest_path.parent_path() / manifest.at("data").get<std::string>());
  if (bytes.size() != shape.size() * 4) {
    throw FormatError("TF32 data length " + std::to_string(bytes.size()) +
                      " does not match shape " + shape.str());
  }
  return ImageTensor(shape, unpack_f32le(bytes));
}

namespace {

struct PngWriteBuffer {
  std::vector<std::uint8_t>* out;
};

void png_write_to_vector(png_structp png, png_bytep data, png_size_t length) {
  auto* buf = static_cast<PngWriteBuffer*>(png_get_io_ptr(png));
  buf->out->insert(buf->out->end(), data, data + length);
}

void png_flush_noop(png_structp) {}

struct PngReadBuffer {
  const std::vector<std::uint8_t>* in;
  std::size_t offset;
};

void png_read_from_vector(png_structp png, png_bytep data, png_size_t length) {
  auto* buf = static_cast<PngReadBuffer*>(png_get_io_ptr(png));
  if (buf->offset + length > buf->in->size()) png_error(png, "truncated PNG");
  std::memcpy(data, buf->in->data() + buf->offset, length);
  buf->offset += length;
}

struct PngErrorState {
  char message[256] = {0};
};

void png_error_store(png_structp png, png_const_charp msg) {
  auto* state = static_cast<PngErrorState*>(png_get_error_ptr(png));
  std::snprintf(state->message, sizeof(state->message), "%s", msg);
  png_longjmp(png, 1);
}

void png_warning_ignore(png_structp, png_const_charp) {}

}  // namespace

// libpng reports errors by longjmp; every C++ object is created before the
// setjmp point and only plain data is touched between it and the jump.
std::vector<std::uint8_t> encode_png(const ImageTensor& image) {
  const Shape& s = image.shape();
  if (s.channels != 1 && s.channels != 3) {
    throw FormatError("PNG export supports 1 or 3 channels, got " + std::to_string(s.channels));
  }
  std::vector<std::uint8_t> out;
  PngWriteBuffer buf{&out};
  PngErrorState err;
  const std::size_t plane = static_cast<std::size_t>(s.height) * s.width;
  std::vector<std::uint8_t> pixels(plane * s.channels);
  auto data = image.data();
  for (int y = 0; y < s.height; ++y) {
    for (int x = 0; x < s.width; ++x) {
      for (int c = 0; c < s.channels; ++c) {
        const float v = data[c * plane + static_cast<std::size_t>(y) * s.width + x];
        pixels[(static_cast<std::size_t>(y) * s.width + x) * s.channels + c] =
            static_cast<std::uint8_t>(std::lround(std::clamp(v, 0.0F, 1.0F) * 255.0F));
      }
    }
  }
  png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, &err, png_error_store,
                                            png_warning_ignore);
  if (png == nullptr) throw FormatError("PNG: cannot allocate writer");
  png_infop info = png_create_info_struct(png);
  if (setjmp(png_jmpbuf(png))) {
    png_destroy_write_struct(&png, &info);
    throw FormatError(std::string("PNG: ") + err.message);
  }
  png_set_write_fn(png, &buf, png_write_to_vector, png_flush_noop);
  png_set_IHDR(png, info, static_cast<png_uint_32>(s.width), static_cast<png_uint_32>(s.height), 8,
               s.channels == 1 ? PNG_COLOR_TYPE_GRAY : PNG_COLOR_TYPE_RGB, PNG_INTERLACE_NONE,
               PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
  png_write_info(png, info);
  for (int y = 0; y < s.height; ++y) {
    png_write_row(png, pixels.data() + static_cast<std::size_t>(y) * s.width * s.channels);
  }
  png_write_end(png, nullptr);
  png_destroy_write_struct(&png, &info);
  return out;
}

ImageTensor decode_png(const std::vector<std::uint8_t>& bytes) {
  if (bytes.size() < 8 || png_sig_cmp(bytes.data(), 0, 8) != 0) {
    throw FormatError("PNG: bad signature");
  }
  PngReadBuffer buf{&bytes, 0};
  PngErrorState err;
  std::vector<std::uint8_t> pixels;
  png_uint_32 width = 0;
  png_uint_32 height = 0;
  int channels = 0;
  png_structp png = png_create_read_struct(PNG_LIBPNG_VER_STRING, &err, png_error_store,
                                           png_warning_ignore);
  if (png == nullptr) throw FormatError("PNG: cannot allocate reader");
  png_infop info = png_create_info_struct(png);
  if (setjmp(png_jmpbuf(png))) {
    png_destroy_read_struct(&png, &info, nullptr);
    throw FormatError(std::string("PNG: ") + err.message);
  }
  png_set_read_fn(png, &buf, png_read_from_vector);
  png_read_info(png, info);
  png_set_strip_16(png);
  png_set_strip_alpha(png);
  png_set_packing(png);
  png_set_palette_to_rgb(png);
  png_set_expand_gray_1_2_4_to_8(png);
  png_read_update_info(png, info);
  width = png_get_image_width(png, info);
  height = png_get_image_height(png, info);
  channels = png_get_channels(png, info);
  if ((channels == 1 || channels == 3) && width > 0 && height > 0) {
    const std::size_t rowbytes = png_get_rowbytes(png, info);
    pixels.resize(rowbytes * height);
    for (png_uint_32 y = 0; y < height; ++y) png_read_row(png, pixels.data() + y * rowbytes, nullptr);
  }
  png_destroy_read_struct(&png, &info, nullptr);
  if (channels != 1 && channels != 3) {
    throw FormatError("PNG: unsupported channel count " + std::to_string(channels));
  }

  Shape shape{channels, static_cast<int>(height), static_cast<int>(width)};
  ImageTensor image(shape);
  auto data = image.mutable_data();
  const std::size_t plane = static_cast<std::size_t>(height) * width;
  for (std::size_t y = 0; y < height; ++y) {
    for (std::size_t x = 0; x < width; ++x) {
      for (int c = 0; c < channels; ++c) {
        data[c * plane + y * width + x] =
            static_cast<float>(pixels[(y * width + x) * channels + c]) / 255.0F;
      }
    }
  }
  return image;
}

void save_png(const ImageTensor& image, const fs::path& path) {
  const auto bytes = encode_png(image);
  write_file(path, bytes.data(), bytes.size());
}

ImageTensor load_png(const fs::path& path) { return decode_png(read_file(path)); }

ImageTensor load_image(const fs::path& path) {
  const std::string name = path.filename().string();
  if (name.ends_with(".png") || name.ends_with(".PNG")) return load_png(path);
  if (name.ends_with(".json")) return load_tf32(path);
  throw FormatError("unrecognized image format: " + path.string());
}

std::string sha256_hex(const void* data, std::size_t size) {
  unsigned char digest[SHA256_DIGEST_LENGTH];
  unsigned int len = 0;
  EVP_Digest(data, size, digest, &len, EVP_sha256(), nullptr);
  std::ostringstream os;
  for (unsigned int i = 0; i < len; ++i) {
    os << std::hex << std::setw(2) << std::setfill('0') << static_cast<int>(digest[i]);
  }
  return os.str();
}

std::string base64_encode(const std::vector<std::uint8_t>& bytes) {
  std::string out(4 * ((bytes.size() + 2) / 3), '\0');
  const int n = EVP_EncodeBlock(reinterpret_cast<unsigned char*>(out.data()), bytes.data(),
                                static_cast<int>(bytes.size()));
  out.resize(static_cast<std::size_t>(n));
  return out;
}

std::vector<std::uint8_t> base64_decode(const std::string& text) {
  if (text.size() % 4 != 0) throw FormatError("base64: length not a multiple of 4");
  std::vector<std::uint8_t> out(3 * text.size() / 4);
  const int n = EVP_DecodeBlock(out.data(), reinterpret_cast<const unsigned char*>(text.data()),
                                static_cast<int>(text.size()));
  if (n < 0) throw FormatError("base64: invalid input");
  std::size_t len = static_cast<std::size_t>(n);
  // EVP_DecodeBlock keeps the bytes produced by '=' padding.
  if (!text.empty() && text.back() == '=') --len;
  if (text.size() >= 2 && text[text.size() - 2] == '=') --len;
  out.resize(len);
  return out;
}

}  // namespace signhunt
