// Copyright 2026 The BLADE Authors. All Rights Reserved.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//    http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef BLADE_IMAGE_IO_H_
#define BLADE_IMAGE_IO_H_

#include <filesystem>
#include <stdexcept>
#include <variant>

#include "blade/image.h"

namespace blade {

class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

using AnyImage = std::variant<ImageGray, ImageRGB>;

// 8-bit PGM (P5), PPM (P6) and PNG (gray or RGB; alpha is dropped),
// chosen by extension. Byte value v maps to float v.
AnyImage ReadImage(const std::filesystem::path& path);
ImageGray ReadGray(const std::filesystem::path& path);  // color -> luma
ImageRGB ReadRGB(const std::filesystem::path& path);    // gray -> 3 planes

// Clamps to [0, 255] and rounds half away from zero.
void WriteImage(const std::filesystem::path& path, const ImageGray& img);
void WriteImage(const std::filesystem::path& path, const ImageRGB& img);
void WriteImage(const std::filesystem::path& path, const AnyImage& img);

}  // namespace blade

#endif  // BLADE_IMAGE_IO_H_
