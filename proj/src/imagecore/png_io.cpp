// Copyright 2026 The wmlab Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <png.h>

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>
#include <iterator>
#include <sstream>

#include "wmlab/error.hpp"
#include "wmlab/io.hpp"

namespace wmlab {
namespace {

constexpr std::uint8_t kSignature[8] = {137, 80, 78, 71, 13, 10, 26, 10};

// Checks the signature and IHDR ourselves: the simplified libpng reader
// silently widens low bit depths, and anything but 8 bits is refused here.
void CheckHeader(std::span<const std::uint8_t> bytes) {
  if (bytes.size() < 33 || std::memcmp(bytes.data(), kSignature, 8) != 0 ||
      std::memcmp(bytes.data() + 12, "IHDR", 4) != 0) {
    throw Error(ErrorCode::kMalformedFile, "not a PNG stream");
  }
  const int depth = bytes[24];
  if (depth != 8) {
    throw Error(ErrorCode::kUnsupportedFormat,
                "PNG bit depth " + std::to_string(depth) + " (only 8 supported)");
  }
}

struct Decoded {
  int width = 0;
  int height = 0;
  std::vector<std::uint8_t> pixels;
};

Decoded Decode(std::span<const std::uint8_t> bytes, png_uint_32 format, int channels) {
  CheckHeader(bytes);
  png_image image;
  std::memset(&image, 0, sizeof(image));
  image.version = PNG_IMAGE_VERSION;
  if (!png_image_begin_read_from_memory(&image, bytes.data(), bytes.size())) {
    throw Error(ErrorCode::kMalformedFile, image.message);
  }
  image.format = format;
  Decoded d;
  d.width = static_cast<int>(image.width);
  d.height = static_cast<int>(image.height);
  d.pixels.resize(static_cast<std::size_t>(d.width) * d.height * channels);
  if (!png_image_finish_read(&image, nullptr, d.pixels.data(), 0, nullptr)) {
    std::string msg = image.message;
    png_image_free(&image);
    throw Error(ErrorCode::kMalformedFile, msg);
  }
  return d;
}

std::vector<std::uint8_t> Encode(int w, int h, png_uint_32 format,
                                 const std::vector<std::uint8_t>& pixels) {
  png_image image;
  std::memset(&image, 0, sizeof(image));
  image.version = PNG_IMAGE_VERSION;
  image.width = static_cast<png_uint_32>(w);
  image.height = static_cast<png_uint_32>(h);
  image.format = format;
  png_alloc_size_t size = 0;
  if (!png_image_write_to_memory(&image, nullptr, &size, 0, pixels.data(), 0,
                                 nullptr)) {
    throw Error(ErrorCode::kIoError, image.message);
  }
  std::vector<std::uint8_t> out(size);
  if (!png_image_write_to_memory(&image, out.data(), &size, 0, pixels.data(), 0,
                                 nullptr)) {
    throw Error(ErrorCode::kIoError, image.message);
  }
  out.resize(size);
  return out;
}

}  // namespace

std::uint8_t QuantizeByte(double v) {
  const double c = std::clamp(v, 0.0, 1.0);
  return static_cast<std::uint8_t>(std::floor(c * 255.0 + 0.5));
}

ImageF DecodePng(std::span<const std::uint8_t> bytes) {
  Decoded d = Decode(bytes, PNG_FORMAT_RGBA, 4);
  ImageF img(d.width, d.height);
  auto dst = img.data();
  for (std::size_t i = 0; i < img.pixel_count(); ++i) {
    for (int c = 0; c < 3; ++c) dst[3 * i + c] = d.pixels[4 * i + c] / 255.0;
  }
  return img;
}

std::vector<std::uint8_t> EncodePng(const ImageF& img) {
  std::vector<std::uint8_t> px(img.data().size());
  for (std::size_t i = 0; i < px.size(); ++i) px[i] = QuantizeByte(img.data()[i]);
  return Encode(img.width(), img.height(), PNG_FORMAT_RGB, px);
}

BinaryMask DecodeMaskPng(std::span<const std::uint8_t> bytes) {
  Decoded d = Decode(bytes, PNG_FORMAT_GRAY, 1);
  BinaryMask m(d.width, d.height);
  for (std::size_t i = 0; i < m.size(); ++i) m.set(i, d.pixels[i] >= 128);
  return m;
}

std::vector<std::uint8_t> EncodeMaskPng(const BinaryMask& mask) {
  std::vector<std::uint8_t> px(mask.size());
  for (std::size_t i = 0; i < px.size(); ++i) px[i] = mask[i] ? 255 : 0;
  return Encode(mask.width(), mask.height(), PNG_FORMAT_GRAY, px);
}

std::vector<std::uint8_t> ReadFileBytes(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kIoError, "cannot open " + path);
  return std::vector<std::uint8_t>(std::istreambuf_iterator<char>(in), {});
}

void WriteFileBytes(const std::string& path, std::span<const std::uint8_t> bytes) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::kIoError, "cannot write " + path);
  out.write(reinterpret_cast<const char*>(bytes.data()),
            static_cast<std::streamsize>(bytes.size()));
  if (!out) throw Error(ErrorCode::kIoError, "short write to " + path);
}

std::string ReadTextFile(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kIoError, "cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void WriteTextFile(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw Error(ErrorCode::kIoError, "cannot write " + path);
  out << text;
  if (!out) throw Error(ErrorCode::kIoError, "short write to " + path);
}

ImageF ReadPng(const std::string& path) { return DecodePng(ReadFileBytes(path)); }
void WritePng(const std::string& path, const ImageF& img) {
  WriteFileBytes(path, EncodePng(img));
}
BinaryMask ReadMaskPng(const std::string& path) {
  return DecodeMaskPng(ReadFileBytes(path));
}
void WriteMaskPng(const std::string& path, const BinaryMask& mask) {
  WriteFileBytes(path, EncodeMaskPng(mask));
}

}  // namespace wmlab
