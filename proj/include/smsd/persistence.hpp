#pragma once

#include "smsd/core_model.hpp"

#include <filesystem>
#include <iosfwd>

namespace smsd {

// Binary layout (little-endian):
//   "SMSD" | u32 version = 1 | u64 rows | u64 cols | rows*cols f64, column-major
inline constexpr char kMatrixMagic[4] = {'S', 'M', 'S', 'D'};
inline constexpr std::uint32_t kMatrixFormatVersion = 1;

void write_matrix(std::ostream& out, const Matrix& m);
Matrix read_matrix(std::istream& in);

void save_matrix(const Matrix& m, const std::filesystem::path& path);
Matrix load_matrix(const std::filesystem::path& path);

/// Row-major CSV, 17 significant digits.
void export_csv(const Matrix& m, const std::filesystem::path& path);

}  // namespace smsd
