#include "smsd/persistence.hpp"

#include "smsd/error.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <cstring>
#include <fstream>
#include <iomanip>
#include <istream>
#include <ostream>

namespace smsd {

namespace {

static_assert(sizeof(double) == 8);

template <typename T>
void put_le(std::ostream& out, T value) {
  std::array<unsigned char, sizeof(T)> bytes{};
  std::memcpy(bytes.data(), &value, sizeof(T));
  if constexpr (std::endian::native == std::endian::big) {
    std::reverse(bytes.begin(), bytes.end());
  }
  out.write(reinterpret_cast<const char*>(bytes.data()), sizeof(T));
}

template <typename T>
T get_le(std::istream& in, std::uint64_t& offset, const char* field) {
  std::array<unsigned char, sizeof(T)> bytes{};
  in.read(reinterpret_cast<char*>(bytes.data()), sizeof(T));
  if (in.gcount() != static_cast<std::streamsize>(sizeof(T))) {
    throw FormatError(offset + static_cast<std::uint64_t>(in.gcount()),
                      std::string("truncated ") + field);
  }
  if constexpr (std::endian::native == std::endian::big) {
    std::reverse(bytes.begin(), bytes.end());
  }
  T value;
  std::memcpy(&value, bytes.data(), sizeof(T));
  offset += sizeof(T);
  return value;
}

}  // namespace

void write_matrix(std::ostream& out, const Matrix& m) {
  out.write(kMatrixMagic, 4);
  put_le<std::uint32_t>(out, kMatrixFormatVersion);
  put_le<std::uint64_t>(out, static_cast<std::uint64_t>(m.rows()));
  put_le<std::uint64_t>(out, static_cast<std::uint64_t>(m.cols()));
  if constexpr (std::endian::native == std::endian::little) {
    out.write(reinterpret_cast<const char*>(m.data()),
              static_cast<std::streamsize>(m.size() * sizeof(double)));
  } else {
    for (Index i = 0; i < m.size(); ++i) put_le<double>(out, m.data()[i]);
  }
  if (!out) throw IoError("failed writing matrix");
}

Matrix read_matrix(std::istream& in) {
  std::uint64_t offset = 0;
  char magic[4] = {};
  in.read(magic, 4);
  if (in.gcount() != 4) {
    throw FormatError(static_cast<std::uint64_t>(in.gcount()), "truncated magic");
  }
  if (std::memcmp(magic, kMatrixMagic, 4) != 0) throw FormatError(0, "bad magic");
  offset = 4;
  const auto version = get_le<std::uint32_t>(in, offset, "version");
  if (version != kMatrixFormatVersion) {
    throw FormatError(4, "unsupported version " + std::to_string(version));
  }
  const auto rows = get_le<std::uint64_t>(in, offset, "row count");
  const auto cols = get_le<std::uint64_t>(in, offset, "column count");
  constexpr std::uint64_t kMaxElements = std::uint64_t{1} << 40;
  if (rows != 0 && cols > kMaxElements / rows) {
    throw FormatError(8, "implausible matrix shape");
  }
  Matrix m(static_cast<Index>(rows), static_cast<Index>(cols));
  const std::uint64_t count = rows * cols;
  if constexpr (std::endian::native == std::endian::little) {
    const auto bytes = static_cast<std::streamsize>(count * sizeof(double));
    in.read(reinterpret_cast<char*>(m.data()), bytes);
    if (in.gcount() != bytes) {
      throw FormatError(offset + static_cast<std::uint64_t>(in.gcount()),
                        "truncated matrix data");
    }
  } else {
    for (std::uint64_t i = 0; i < count; ++i) {
      m.data()[i] = get_le<double>(in, offset, "matrix data");
    }
  }
  return m;
}

void save_matrix(const Matrix& m, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  write_matrix(out, m);
}

Matrix load_matrix(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  return read_matrix(in);
}

void export_csv(const Matrix& m, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  out << std::setprecision(17);
  for (Index i = 0; i < m.rows(); ++i) {
    for (Index j = 0; j < m.cols(); ++j) {
      if (j) out << ',';
      out << m(i, j);
    }
    out << '\n';
  }
}

}  // namespace smsd
