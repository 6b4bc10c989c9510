#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "sgf/scalar_field.hpp"

namespace sgf {

// RGB frame with planar channels of reals in [0,1].
struct RgbFrame {
  int height = 0;
  int width = 0;
  std::array<std::vector<double>, 3> channels;  // r, g, b

  RgbFrame() = default;
  RgbFrame(int h, int w, double fill = 0.0);

  double& at(int ch, int r, int c) {
    return channels[ch][static_cast<size_t>(r) * width + c];
  }
  double at(int ch, int r, int c) const {
    return channels[ch][static_cast<size_t>(r) * width + c];
  }
  bool same_dims(const RgbFrame& o) const {
    return height == o.height && width == o.width;
  }

  ScalarField luminance() const;  // Rec.601 gray
  RgbFrame flipped_horizontal() const;
};

// 8-bit grayscale image, the on-disk form of every map.
struct GrayImage {
  int height = 0;
  int width = 0;
  std::vector<uint8_t> values;

  GrayImage() = default;
  GrayImage(int h, int w, uint8_t fill = 0);

  uint8_t& at(int r, int c) { return values[static_cast<size_t>(r) * width + c]; }
  uint8_t at(int r, int c) const { return values[static_cast<size_t>(r) * width + c]; }
};

// Binary PGM (P5) / PPM (P6), maxval 255.
GrayImage read_pgm(const std::filesystem::path& path);
void write_pgm(const std::filesystem::path& path, const GrayImage& img);
RgbFrame read_ppm(const std::filesystem::path& path);
void write_ppm(const std::filesystem::path& path, const RgbFrame& frame);

ScalarField field_from_gray(const GrayImage& img);  // bytes / 255.0

// frame_%06d.ppm, gt_%06d.pgm, ... helpers
std::string indexed_name(const std::string& prefix, int index, const std::string& ext);

}  // namespace sgf
