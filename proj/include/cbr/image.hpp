#pragma once

#include <cstdint>
#include <filesystem>
#include <vector>

namespace cbr {

// Interleaved 8-bit RGB, row-major.
struct ImageU8 {
  int width = 0;
  int height = 0;
  std::vector<uint8_t> data;

  ImageU8() = default;
  ImageU8(int w, int h) : width(w), height(h), data(static_cast<size_t>(w) * h * 3, 0) {}

  uint8_t* pixel(int y, int x) { return data.data() + (static_cast<size_t>(y) * width + x) * 3; }
  const uint8_t* pixel(int y, int x) const {
    return data.data() + (static_cast<size_t>(y) * width + x) * 3;
  }

  bool operator==(const ImageU8&) const = default;
};

void write_png(const std::filesystem::path& path, const ImageU8& image);
ImageU8 read_png(const std::filesystem::path& path);

}  // namespace cbr
