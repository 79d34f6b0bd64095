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

#pragma once

#include <string>
#include <vector>

namespace lrc::io {

/// Interleaved HWC image with samples in [0, 1].
struct Image {
  int height = 0;
  int width = 0;
  int channels = 0;
  std::vector<float> data;
};

/// PNG (8-bit gray/RGB), binary PGM (P5) or PPM (P6), by content.
Image read_image(const std::string& path);
/// Format by extension: .png, .pgm (1 channel) or .ppm (3 channels).
/// Samples are clamped and rounded to 8 bits.
void write_image(const std::string& path, const Image& image);

/// Image files (*.png, *.ppm, *.pgm) in dir, sorted by name.
std::vector<std::string> list_frames(const std::string& dir);

/// Subdirectories of dir, sorted by name.
std::vector<std::string> list_dirs(const std::string& dir);

}  // namespace lrc::io
