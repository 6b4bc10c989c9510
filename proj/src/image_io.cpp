#include "sgf/image.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <stdexcept>

namespace sgf {

RgbFrame::RgbFrame(int h, int w, double fill) : height(h), width(w) {
  if (h <= 0 || w <= 0) throw std::invalid_argument("RgbFrame: dims must be positive");
  for (auto& ch : channels) ch.assign(static_cast<size_t>(h) * w, fill);
}

ScalarField RgbFrame::luminance() const {
  ScalarField out(height, width);
  for (size_t i = 0; i < out.values.size(); ++i)
    out.values[i] = 0.299 * channels[0][i] + 0.587 * channels[1][i] + 0.114 * channels[2][i];
  return out;
}

RgbFrame RgbFrame::flipped_horizontal() const {
  RgbFrame out(height, width);
  for (int ch = 0; ch < 3; ++ch)
    for (int r = 0; r < height; ++r)
      for (int c = 0; c < width; ++c) out.at(ch, r, c) = at(ch, r, width - 1 - c);
  return out;
}

GrayImage::GrayImage(int h, int w, uint8_t fill) : height(h), width(w) {
  if (h <= 0 || w <= 0) throw std::invalid_argument("GrayImage: dims must be positive");
  values.assign(static_cast<size_t>(h) * w, fill);
}

namespace {

// Reads one whitespace-delimited token, skipping '#' comments.
std::string next_token(std::istream& in) {
  std::string tok;
  int c;
  while ((c = in.get()) != EOF) {
    if (c == '#') {
      while ((c = in.get()) != EOF && c != '\n') {
      }
      continue;
    }
    if (std::isspace(c)) {
      if (!tok.empty()) return tok;
      continue;
    }
    tok.push_back(static_cast<char>(c));
  }
  if (tok.empty()) throw std::runtime_error("pnm: unexpected end of header");
  return tok;
}

struct PnmHeader {
  std::string magic;
  int width, height, maxval;
};

PnmHeader read_header(std::istream& in, const std::string& expect_magic,
                      const std::filesystem::path& path) {
  PnmHeader h;
  h.magic = next_token(in);
  if (h.magic != expect_magic)
    throw std::runtime_error("pnm: " + path.string() + ": expected " + expect_magic +
                             ", got " + h.magic);
  h.width = std::stoi(next_token(in));
  h.height = std::stoi(next_token(in));
  h.maxval = std::stoi(next_token(in));
  if (h.width <= 0 || h.height <= 0)
    throw std::runtime_error("pnm: " + path.string() + ": bad dimensions");
  if (h.maxval != 255)
    throw std::runtime_error("pnm: " + path.string() + ": only maxval 255 supported");
  return h;
}

}  // namespace

GrayImage read_pgm(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  PnmHeader h = read_header(in, "P5", path);
  GrayImage img(h.height, h.width);
  in.read(reinterpret_cast<char*>(img.values.data()), static_cast<std::streamsize>(img.values.size()));
  if (in.gcount() != static_cast<std::streamsize>(img.values.size()))
    throw std::runtime_error("pnm: " + path.string() + ": truncated pixel data");
  return img;
}

void write_pgm(const std::filesystem::path& path, const GrayImage& img) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << "P5\n" << img.width << " " << img.height << "\n255\n";
  out.write(reinterpret_cast<const char*>(img.values.data()),
            static_cast<std::streamsize>(img.values.size()));
  if (!out) throw std::runtime_error("write failed: " + path.string());
}

RgbFrame read_ppm(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  PnmHeader h = read_header(in, "P6", path);
  std::vector<uint8_t> raw(static_cast<size_t>(h.width) * h.height * 3);
  in.read(reinterpret_cast<char*>(raw.data()), static_cast<std::streamsize>(raw.size()));
  if (in.gcount() != static_cast<std::streamsize>(raw.size()))
    throw std::runtime_error("pnm: " + path.string() + ": truncated pixel data");
  RgbFrame f(h.height, h.width);
  for (size_t i = 0; i < static_cast<size_t>(h.width) * h.height; ++i)
    for (int ch = 0; ch < 3; ++ch) f.channels[ch][i] = raw[i * 3 + ch] / 255.0;
  return f;
}

void write_ppm(const std::filesystem::path& path, const RgbFrame& frame) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << "P6\n" << frame.width << " " << frame.height << "\n255\n";
  std::vector<uint8_t> raw(static_cast<size_t>(frame.width) * frame.height * 3);
  for (size_t i = 0; i < static_cast<size_t>(frame.width) * frame.height; ++i)
    for (int ch = 0; ch < 3; ++ch) {
      double v = frame.channels[ch][i];
      v = v < 0.0 ? 0.0 : (v > 1.0 ? 1.0 : v);
      raw[i * 3 + ch] = static_cast<uint8_t>(std::floor(v * 255.0 + 0.5));
    }
  out.write(reinterpret_cast<const char*>(raw.data()), static_cast<std::streamsize>(raw.size()));
  if (!out) throw std::runtime_error("write failed: " + path.string());
}

ScalarField field_from_gray(const GrayImage& img) {
  ScalarField f(img.height, img.width);
  for (size_t i = 0; i < img.values.size(); ++i) f.values[i] = img.values[i] / 255.0;
  return f;
}

std::string indexed_name(const std::string& prefix, int index, const std::string& ext) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%s%06d.%s", prefix.c_str(), index, ext.c_str());
  return buf;
}

}  // namespace sgf
