#pragma once

#include "ktraj/types.hpp"

#include <filesystem>

namespace ktraj {

enum class ImageFormat
{
  Png8,
  Png16,
  Raw, // `KIMG` magic, u32 rows, u32 cols, float64 little-endian row-major
};

/// Loads a square grayscale image. PNG samples are normalized to [0, 1]
/// (divided by 255 or 65535); raw images are returned bit-exact.
RealImage load_gray_image(std::filesystem::path const &path);

/// PNG output quantizes with round-half-up after clamping to [0, 1].
void save_image(std::filesystem::path const &path, RealImage const &image, ImageFormat format);

/// Format from the extension: `.png` -> 8-bit PNG, anything else -> raw.
void save_image(std::filesystem::path const &path, RealImage const &image);

} // namespace ktraj
