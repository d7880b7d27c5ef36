#pragma once

#include "smsd/patch_pipeline.hpp"

#include <filesystem>

namespace smsd {

/// Loads an 8-bit PGM (P2/P5) or PNG. Colour pixels are converted with
/// round(0.299 R + 0.587 G + 0.114 B); alpha is ignored.
GrayImage read_image(const std::filesystem::path& path);

/// Writes PGM or PNG depending on the extension; values are rounded and
/// clamped to 0..255.
void write_image(const GrayImage& image, const std::filesystem::path& path);

std::uint8_t luma(std::uint8_t r, std::uint8_t g, std::uint8_t b);

}  // namespace smsd
