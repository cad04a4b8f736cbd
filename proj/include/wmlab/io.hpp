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

#ifndef WMLAB_IO_HPP_
#define WMLAB_IO_HPP_

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "wmlab/imagecore.hpp"

namespace wmlab {

/// 8-bit RGB/RGBA PNG -> ImageF with v/255 mapping; alpha is dropped.
ImageF DecodePng(std::span<const std::uint8_t> bytes);
/// Clamps to [0,1] and stores floor(v*255 + 0.5) as 8-bit RGB.
std::vector<std::uint8_t> EncodePng(const ImageF& img);

/// Masks are 8-bit grayscale: 255 = true, 0 = false; >= 128 reads true.
BinaryMask DecodeMaskPng(std::span<const std::uint8_t> bytes);
std::vector<std::uint8_t> EncodeMaskPng(const BinaryMask& mask);

std::uint8_t QuantizeByte(double v);

std::vector<std::uint8_t> ReadFileBytes(const std::string& path);
void WriteFileBytes(const std::string& path, std::span<const std::uint8_t> bytes);
std::string ReadTextFile(const std::string& path);
void WriteTextFile(const std::string& path, const std::string& text);

ImageF ReadPng(const std::string& path);
void WritePng(const std::string& path, const ImageF& img);
BinaryMask ReadMaskPng(const std::string& path);
void WriteMaskPng(const std::string& path, const BinaryMask& mask);

}  // namespace wmlab

#endif  // WMLAB_IO_HPP_
