#pragma once

#include <png.h>

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fmt/format.h>
#include <vector>

#include "mixpriv/error.hpp"
#include "mixpriv/image.hpp"

namespace mixpriv {

enum class AlphaPolicy { Reject, Strip };

// Reads an 8-bit grayscale or RGB PNG. Palette and sub-byte grayscale files are
// expanded by libpng; 16-bit files are refused.
inline Image load_image(const std::filesystem::path& path, AlphaPolicy alpha = AlphaPolicy::Reject) {
  png_image png{};
  png.version = PNG_IMAGE_VERSION;
  const std::string name = path.string();
  if (!png_image_begin_read_from_file(&png, name.c_str())) {
    throw DataError(fmt::format("{}: {}", name, png.message));
  }
  const bool linear = (png.format & PNG_FORMAT_FLAG_LINEAR) != 0;
  const bool color = (png.format & PNG_FORMAT_FLAG_COLOR) != 0;
  const bool has_alpha = (png.format & PNG_FORMAT_FLAG_ALPHA) != 0;
  if (linear) {
    png_image_free(&png);
    throw DataError(fmt::format("{}: unsupported bit depth (16-bit PNG)", name));
  }
  if (has_alpha && alpha == AlphaPolicy::Reject) {
    png_image_free(&png);
    throw DataError(fmt::format("{}: alpha channel not accepted", name));
  }
  const int channels = color ? 3 : 1;
  const int stored = channels + (has_alpha ? 1 : 0);
  png.format = color ? (has_alpha ? PNG_FORMAT_RGBA : PNG_FORMAT_RGB)
                     : (has_alpha ? PNG_FORMAT_GA : PNG_FORMAT_GRAY);

  std::vector<std::uint8_t> buffer(PNG_IMAGE_SIZE(png));
  if (!png_image_finish_read(&png, nullptr, buffer.data(), 0, nullptr)) {
    const std::string msg = png.message;
    png_image_free(&png);
    throw DataError(fmt::format("{}: {}", name, msg));
  }
  const int width = static_cast<int>(png.width);
  const int height = static_cast<int>(png.height);

  std::vector<double> data;
  data.reserve(static_cast<std::size_t>(width) * height * channels);
  for (std::size_t i = 0; i < buffer.size(); i += stored) {
    for (int c = 0; c < channels; ++c) data.push_back(buffer[i + c]);
  }
  return Image(width, height, channels, std::move(data));
}

// Writes an 8-bit PNG; intensities are rounded half-to-even and clamped.
inline void save_image(const Image& img, const std::filesystem::path& path) {
  if (img.empty()) throw std::invalid_argument("save_image: empty image");
  std::vector<std::uint8_t> buffer(img.sample_count());
  auto src = img.data();
  for (std::size_t i = 0; i < buffer.size(); ++i) {
    buffer[i] = static_cast<std::uint8_t>(std::clamp(std::nearbyint(src[i]), 0.0, 255.0));
  }
  png_image png{};
  png.version = PNG_IMAGE_VERSION;
  png.width = static_cast<png_uint_32>(img.width());
  png.height = static_cast<png_uint_32>(img.height());
  png.format = img.channels() == 3 ? PNG_FORMAT_RGB : PNG_FORMAT_GRAY;
  const std::string name = path.string();
  if (!png_image_write_to_file(&png, name.c_str(), 0, buffer.data(), 0, nullptr)) {
    const std::string msg = png.message;
    png_image_free(&png);
    throw DataError(fmt::format("{}: {}", name, msg));
  }
}

}  // namespace mixpriv
