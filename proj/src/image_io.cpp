// Copyright 2026 The LRC Video Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "lrc/image_io.hpp"

#include <png.h>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "lrc/error.hpp"

namespace lrc::io {
namespace fs = std::filesystem;
namespace {

std::string lower_ext(const std::string& path) {
  std::string ext = fs::path(path).extension().string();
  std::transform(ext.begin(), ext.end(), ext.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return ext;
}

std::uint8_t to_byte(float v) {
  const float c = std::clamp(v, 0.0f, 1.0f);
  return static_cast<std::uint8_t>(std::lround(c * 255.0f));
}

Image read_png(const std::string& path) {
  png_image img;
  std::memset(&img, 0, sizeof img);
  img.version = PNG_IMAGE_VERSION;
  if (!png_image_begin_read_from_file(&img, path.c_str()))
    throw InvalidInput("cannot read png " + path + ": " + img.message);
  const bool gray = (img.format & PNG_FORMAT_FLAG_COLOR) == 0;
  img.format = gray ? PNG_FORMAT_GRAY : PNG_FORMAT_RGB;
  std::vector<std::uint8_t> buf(PNG_IMAGE_SIZE(img));
  if (!png_image_finish_read(&img, nullptr, buf.data(), 0, nullptr)) {
    png_image_free(&img);
    throw InvalidInput("cannot decode png " + path + ": " + img.message);
  }
  Image out{static_cast<int>(img.height), static_cast<int>(img.width), gray ? 1 : 3, {}};
  out.data.resize(buf.size());
  for (std::size_t i = 0; i < buf.size(); ++i) out.data[i] = buf[i] / 255.0f;
  return out;
}

void write_png(const std::string& path, const Image& image) {
  png_image img;
  std::memset(&img, 0, sizeof img);
  img.version = PNG_IMAGE_VERSION;
  img.width = static_cast<png_uint_32>(image.width);
  img.height = static_cast<png_uint_32>(image.height);
  img.format = image.channels == 1 ? PNG_FORMAT_GRAY : PNG_FORMAT_RGB;
  std::vector<std::uint8_t> buf(image.data.size());
  std::transform(image.data.begin(), image.data.end(), buf.begin(), to_byte);
  if (!png_image_write_to_file(&img, path.c_str(), 0, buf.data(), 0, nullptr))
    throw InvalidInput("cannot write png " + path + ": " + img.message);
}

// Reads the next whitespace-delimited header token, skipping comments.
int pnm_token(std::istream& in) {
  std::string tok;
  while (in >> tok) {
    if (tok[0] == '#') {
      std::string rest;
      std::getline(in, rest);
      continue;
    }
    return std::stoi(tok);
  }
  throw InvalidInput("truncated pnm header");
}

Image read_pnm(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InvalidInput("cannot open " + path);
  std::string magic;
  in >> magic;
  if (magic != "P5" && magic != "P6") throw InvalidInput(path + ": not a binary PGM/PPM");
  Image out;
  out.channels = magic == "P5" ? 1 : 3;
  out.width = pnm_token(in);
  out.height = pnm_token(in);
  const int maxval = pnm_token(in);
  if (out.width <= 0 || out.height <= 0 || maxval != 255)
    throw InvalidInput(path + ": only 8-bit PNM with positive size is supported");
  in.get();
  std::vector<std::uint8_t> buf(static_cast<std::size_t>(out.width) * out.height * out.channels);
  in.read(reinterpret_cast<char*>(buf.data()), static_cast<std::streamsize>(buf.size()));
  if (in.gcount() != static_cast<std::streamsize>(buf.size()))
    throw InvalidInput(path + ": truncated pixel data");
  out.data.resize(buf.size());
  for (std::size_t i = 0; i < buf.size(); ++i) out.data[i] = buf[i] / 255.0f;
  return out;
}

void write_pnm(const std::string& path, const Image& image) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InvalidInput("cannot write " + path);
  out << (image.channels == 1 ? "P5" : "P6") << "\n"
      << image.width << " " << image.height << "\n255\n";
  std::vector<std::uint8_t> buf(image.data.size());
  std::transform(image.data.begin(), image.data.end(), buf.begin(), to_byte);
  out.write(reinterpret_cast<const char*>(buf.data()), static_cast<std::streamsize>(buf.size()));
}

}  // namespace

Image read_image(const std::string& path) {
  std::ifstream probe(path, std::ios::binary);
  if (!probe) throw InvalidInput("cannot open " + path);
  unsigned char sig[8] = {0};
  probe.read(reinterpret_cast<char*>(sig), sizeof sig);
  if (png_sig_cmp(sig, 0, 8) == 0) return read_png(path);
  return read_pnm(path);
}

void write_image(const std::string& path, const Image& image) {
  if (image.channels != 1 && image.channels != 3)
    throw InvalidInput("only 1- or 3-channel images can be written");
  if (image.data.size() != static_cast<std::size_t>(image.height) * image.width * image.channels)
    throw InvalidInput("image buffer does not match its dimensions");
  const std::string ext = lower_ext(path);
  if (ext == ".png") return write_png(path, image);
  if ((ext == ".pgm" && image.channels == 1) || (ext == ".ppm" && image.channels == 3))
    return write_pnm(path, image);
  throw InvalidInput("unsupported image extension for " + path);
}

std::vector<std::string> list_frames(const std::string& dir) {
  if (!fs::is_directory(dir)) throw ConfigError("not a directory: " + dir);
  std::vector<std::string> out;
  for (const auto& entry : fs::directory_iterator(dir)) {
    if (!entry.is_regular_file()) continue;
    const std::string ext = lower_ext(entry.path().string());
    if (ext == ".png" || ext == ".ppm" || ext == ".pgm") out.push_back(entry.path().string());
  }
  std::sort(out.begin(), out.end());
  return out;
}

std::vector<std::string> list_dirs(const std::string& dir) {
  if (!fs::is_directory(dir)) throw ConfigError("not a directory: " + dir);
  std::vector<std::string> out;
  for (const auto& entry : fs::directory_iterator(dir))
    if (entry.is_directory()) out.push_back(entry.path().string());
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace lrc::io
