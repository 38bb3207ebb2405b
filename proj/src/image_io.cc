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

#include "blade/image_io.h"

#include <png.h>

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <string>
#include <vector>

namespace blade {
namespace {

namespace fs = std::filesystem;

enum class Format { kPnm, kPng };

Format FormatOf(const fs::path& path) {
  std::string ext = path.extension().string();
  std::transform(ext.begin(), ext.end(), ext.begin(),
                 [](unsigned char c) { return std::tolower(c); });
  if (ext == ".pgm" || ext == ".ppm" || ext == ".pnm") return Format::kPnm;
  if (ext == ".png") return Format::kPng;
  throw IoError(path.string() + ": unsupported image extension '" + ext +
                "' (expected .pgm, .ppm or .png)");
}

uint8_t ToByte(float v) {
  const float c = std::clamp(v, 0.0f, 255.0f);
  return static_cast<uint8_t>(std::lround(c));
}

// Interleaved bytes -> planes.
AnyImage FromInterleaved(const std::vector<uint8_t>& data, int w, int h,
                         int channels) {
  if (channels == 1) {
    std::vector<float> s(data.begin(), data.end());
    return ImageGray(w, h, std::move(s));
  }
  ImageRGB out(w, h);
  for (size_t i = 0; i < static_cast<size_t>(w) * h; ++i) {
    for (int c = 0; c < 3; ++c) {
      out[c].samples()[i] = data[i * channels + c];
    }
  }
  return out;
}

// Skips whitespace and '#' comments in a PNM header.
int ReadPnmInt(std::istream& in, const fs::path& path) {
  int c = in.peek();
  while (c != EOF) {
    if (std::isspace(c)) {
      in.get();
    } else if (c == '#') {
      std::string line;
      std::getline(in, line);
    } else {
      break;
    }
    c = in.peek();
  }
  int value = 0;
  if (!(in >> value)) throw IoError(path.string() + ": malformed PNM header");
  return value;
}

AnyImage ReadPnm(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError(path.string() + ": cannot open for reading");
  char magic[2] = {};
  in.read(magic, 2);
  int channels = 0;
  if (magic[0] == 'P' && magic[1] == '5') {
    channels = 1;
  } else if (magic[0] == 'P' && magic[1] == '6') {
    channels = 3;
  } else {
    throw IoError(path.string() + ": not a binary PGM/PPM (P5/P6)");
  }
  const int w = ReadPnmInt(in, path);
  const int h = ReadPnmInt(in, path);
  const int maxval = ReadPnmInt(in, path);
  if (w < 1 || h < 1) throw IoError(path.string() + ": bad dimensions");
  if (maxval < 1 || maxval > 255) {
    throw IoError(path.string() + ": only 8-bit PNM is supported");
  }
  in.get();  // single whitespace after maxval
  std::vector<uint8_t> data(static_cast<size_t>(w) * h * channels);
  in.read(reinterpret_cast<char*>(data.data()),
          static_cast<std::streamsize>(data.size()));
  if (in.gcount() != static_cast<std::streamsize>(data.size())) {
    throw IoError(path.string() + ": truncated pixel data");
  }
  return FromInterleaved(data, w, h, channels);
}

void WritePnm(const fs::path& path, const std::vector<uint8_t>& data, int w,
              int h, int channels) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError(path.string() + ": cannot open for writing");
  out << (channels == 1 ? "P5" : "P6") << "\n" << w << " " << h << "\n255\n";
  out.write(reinterpret_cast<const char*>(data.data()),
            static_cast<std::streamsize>(data.size()));
  if (!out) throw IoError(path.string() + ": write failed");
}

AnyImage ReadPng(const fs::path& path) {
  png_image image;
  std::memset(&image, 0, sizeof(image));
  image.version = PNG_IMAGE_VERSION;
  if (!png_image_begin_read_from_file(&image, path.c_str())) {
    throw IoError(path.string() + ": " + image.message);
  }
  const bool color = image.format & PNG_FORMAT_FLAG_COLOR;
  image.format = color ? PNG_FORMAT_RGB : PNG_FORMAT_GRAY;
  std::vector<uint8_t> data(PNG_IMAGE_SIZE(image));
  if (!png_image_finish_read(&image, nullptr, data.data(), 0, nullptr)) {
    std::string msg = image.message;
    png_image_free(&image);
    throw IoError(path.string() + ": " + msg);
  }
  return FromInterleaved(data, static_cast<int>(image.width),
                         static_cast<int>(image.height), color ? 3 : 1);
}

void WritePng(const fs::path& path, const std::vector<uint8_t>& data, int w,
              int h, int channels) {
  png_image image;
  std::memset(&image, 0, sizeof(image));
  image.version = PNG_IMAGE_VERSION;
  image.width = static_cast<png_uint_32>(w);
  image.height = static_cast<png_uint_32>(h);
  image.format = channels == 1 ? PNG_FORMAT_GRAY : PNG_FORMAT_RGB;
  if (!png_image_write_to_file(&image, path.c_str(), 0, data.data(), 0,
                               nullptr)) {
    throw IoError(path.string() + ": " + image.message);
  }
}

void WriteBytes(const fs::path& path, const std::vector<uint8_t>& data, int w,
                int h, int channels) {
  if (FormatOf(path) == Format::kPng) {
    WritePng(path, data, w, h, channels);
  } else {
    const std::string ext = path.extension().string();
    if (channels == 3 && ext == ".pgm") {
      throw IoError(path.string() + ": cannot store a color image as PGM");
    }
    if (channels == 1 && ext == ".ppm") {
      throw IoError(path.string() + ": cannot store a gray image as PPM");
    }
    WritePnm(path, data, w, h, channels);
  }
}

}  // namespace

AnyImage ReadImage(const fs::path& path) {
  if (!fs::exists(path)) throw IoError(path.string() + ": no such file");
  return FormatOf(path) == Format::kPng ? ReadPng(path) : ReadPnm(path);
}

ImageGray ReadGray(const fs::path& path) {
  AnyImage img = ReadImage(path);
  if (auto* gray = std::get_if<ImageGray>(&img)) return std::move(*gray);
  return Luma(std::get<ImageRGB>(img));
}

ImageRGB ReadRGB(const fs::path& path) {
  AnyImage img = ReadImage(path);
  if (auto* rgb = std::get_if<ImageRGB>(&img)) return std::move(*rgb);
  const auto& g = std::get<ImageGray>(img);
  return ImageRGB(g, g, g);
}

void WriteImage(const fs::path& path, const ImageGray& img) {
  std::vector<uint8_t> data(img.size());
  auto s = img.samples();
  for (size_t i = 0; i < data.size(); ++i) data[i] = ToByte(s[i]);
  WriteBytes(path, data, img.width(), img.height(), 1);
}

void WriteImage(const fs::path& path, const ImageRGB& img) {
  const size_t n = static_cast<size_t>(img.width()) * img.height();
  std::vector<uint8_t> data(n * 3);
  for (size_t i = 0; i < n; ++i) {
    for (int c = 0; c < 3; ++c) data[i * 3 + c] = ToByte(img[c].samples()[i]);
  }
  WriteBytes(path, data, img.width(), img.height(), 3);
}

void WriteImage(const fs::path& path, const AnyImage& img) {
  std::visit([&](const auto& im) { WriteImage(path, im); }, img);
}

}  // namespace blade
