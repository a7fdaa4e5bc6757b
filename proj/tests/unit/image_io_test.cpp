#include <gtest/gtest.h>

#include <filesystem>

#include "signhunt/errors.hpp"
#include "signhunt/image_io.hpp"
#include "support.hpp"

namespace signhunt {
namespace {

namespace fs = std::filesystem;

fs::path temp_dir(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("signhunt_io_test_" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

TEST(Tf32, RoundTripIsExact) {
  RngStream rng(1);
  const fs::path dir = temp_dir("tf32");
  const ImageTensor x = testing::random_image(Shape{3, 4, 5}, rng);
  save_tf32(x, dir / "x.tf32.json");
  EXPECT_TRUE(fs::exists(dir / "x.f32"));
  EXPECT_EQ(load_tf32(dir / "x.tf32.json"), x);
  EXPECT_EQ(load_image(dir / "x.tf32.json"), x);
  fs::remove_all(dir);
}

TEST(Tf32, SizeMismatchIsFormatError) {
  const fs::path dir = temp_dir("tf32bad");
  save_tf32(ImageTensor(Shape{1, 2, 2}, 0.5F), dir / "x.tf32.json");
  write_file_atomic(dir / "x.f32", "abc");
  EXPECT_THROW(load_tf32(dir / "x.tf32.json"), FormatError);
  fs::remove_all(dir);
}

TEST(F32le, PacksLittleEndian) {
  const std::vector<float> v{1.0F};
  const auto bytes = pack_f32le(v);
  ASSERT_EQ(bytes.size(), 4u);
  EXPECT_EQ(bytes[0], 0x00);
  EXPECT_EQ(bytes[1], 0x00);
  EXPECT_EQ(bytes[2], 0x80);
  EXPECT_EQ(bytes[3], 0x3F);
  EXPECT_EQ(unpack_f32le(bytes), v);
}

TEST(Png, GreyRoundTripQuantisesToEighthBits) {
  ImageTensor x(Shape{1, 2, 3}, {0.0F, 1.0F, 0.5F, 0.2F, 0.8F, 0.999F});
  const ImageTensor y = decode_png(encode_png(x));
  ASSERT_EQ(y.shape(), x.shape());
  for (std::size_t j = 0; j < x.size(); ++j) EXPECT_NEAR(y[j], x[j], 0.5 / 255.0 + 1e-7);
  // Values that are already multiples of 1/255 survive exactly.
  EXPECT_EQ(decode_png(encode_png(y)), y);
}

TEST(Png, RgbRoundTrip) {
  RngStream rng(2);
  ImageTensor x(Shape{3, 4, 4});
  for (float& v : x.mutable_data()) v = static_cast<float>(rng.below(256)) / 255.0F;
  EXPECT_EQ(decode_png(encode_png(x)), x);
}

TEST(Png, GarbageIsFormatError) {
  EXPECT_THROW(decode_png({1, 2, 3, 4, 5}), FormatError);
}

TEST(Png, UnsupportedChannelCount) {
  EXPECT_THROW(encode_png(ImageTensor(Shape{2, 2, 2})), FormatError);
}

TEST(Sha256, KnownVector) {
  EXPECT_EQ(sha256_hex("abc", 3),
            "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
}

TEST(Base64, RoundTripAllLengths) {
  for (std::size_t n = 0; n < 20; ++n) {
    std::vector<std::uint8_t> bytes(n);
    for (std::size_t i = 0; i < n; ++i) bytes[i] = static_cast<std::uint8_t>(i * 37 + 11);
    EXPECT_EQ(base64_decode(base64_encode(bytes)), bytes);
  }
  EXPECT_EQ(base64_encode({'M', 'a'}), "TWE=");
}

TEST(WriteFileAtomic, ReplacesContents) {
  const fs::path dir = temp_dir("atomic");
  write_file_atomic(dir / "f.txt", "one");
  write_file_atomic(dir / "f.txt", "two");
  const auto bytes = read_file(dir / "f.txt");
  EXPECT_EQ(std::string(bytes.begin(), bytes.end()), "two");
  fs::remove_all(dir);
}

}  // namespace
}  // namespace signhunt
