#include "smsd/image_io.hpp"

#include "smsd/error.hpp"

#include <png.h>

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <vector>

namespace smsd {

std::uint8_t luma(std::uint8_t r, std::uint8_t g, std::uint8_t b) {
  const double y = 0.299 * r + 0.587 * g + 0.114 * b;
  return static_cast<std::uint8_t>(std::clamp(std::lround(y), 0L, 255L));
}

namespace {

std::string lower_extension(const std::filesystem::path& path) {
  std::string ext = path.extension().string();
  std::transform(ext.begin(), ext.end(), ext.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return ext;
}

// Next whitespace-delimited token of a PNM header, skipping comments.
std::string pnm_token(std::istream& in) {
  std::string tok;
  int c;
  while ((c = in.get()) != EOF) {
    if (c == '#') {
      while ((c = in.get()) != EOF && c != '\n') {
      }
      continue;
    }
    if (std::isspace(c)) {
      if (!tok.empty()) break;
      continue;
    }
    tok.push_back(static_cast<char>(c));
  }
  return tok;
}

GrayImage read_pgm(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  const std::string magic = pnm_token(in);
  if (magic != "P5" && magic != "P2") throw FormatError(0, path.string() + " is not a PGM");
  Index width = 0, height = 0;
  int maxval = 0;
  try {
    width = std::stol(pnm_token(in));
    height = std::stol(pnm_token(in));
    maxval = std::stoi(pnm_token(in));
  } catch (const std::exception&) {
    throw FormatError(static_cast<std::uint64_t>(in.tellg()), "bad PGM header in " + path.string());
  }
  if (width <= 0 || height <= 0 || maxval <= 0 || maxval > 255) {
    throw FormatError(static_cast<std::uint64_t>(in.tellg()),
                      "unsupported PGM (only 8-bit) in " + path.string());
  }
  GrayImage img(height, width);
  if (magic == "P5") {
    std::vector<unsigned char> buf(static_cast<std::size_t>(width * height));
    const auto start = static_cast<std::uint64_t>(in.tellg());
    in.read(reinterpret_cast<char*>(buf.data()), static_cast<std::streamsize>(buf.size()));
    if (in.gcount() != static_cast<std::streamsize>(buf.size())) {
      throw FormatError(start + static_cast<std::uint64_t>(in.gcount()),
                        "truncated PGM data in " + path.string());
    }
    for (Index r = 0; r < height; ++r) {
      for (Index c = 0; c < width; ++c) img(r, c) = buf[static_cast<std::size_t>(r * width + c)];
    }
  } else {
    for (Index r = 0; r < height; ++r) {
      for (Index c = 0; c < width; ++c) {
        const std::string tok = pnm_token(in);
        if (tok.empty()) {
          throw FormatError(static_cast<std::uint64_t>(in.tellg()),
                            "truncated PGM data in " + path.string());
        }
        img(r, c) = std::stoi(tok);
      }
    }
  }
  return img;
}

GrayImage read_png(const std::filesystem::path& path) {
  png_image image{};
  image.version = PNG_IMAGE_VERSION;
  if (!png_image_begin_read_from_file(&image, path.string().c_str())) {
    throw FormatError(0, "cannot read PNG " + path.string() + ": " + image.message);
  }
  const bool color = (image.format & PNG_FORMAT_FLAG_COLOR) != 0;
  image.format = color ? PNG_FORMAT_RGBA : PNG_FORMAT_GA;
  const int channels = color ? 4 : 2;
  std::vector<png_byte> buf(PNG_IMAGE_SIZE(image));
  if (!png_image_finish_read(&image, nullptr, buf.data(), 0, nullptr)) {
    png_image_free(&image);
    throw FormatError(0, "cannot decode PNG " + path.string() + ": " + image.message);
  }
  const Index height = image.height;
  const Index width = image.width;
  GrayImage img(height, width);
  for (Index r = 0; r < height; ++r) {
    for (Index c = 0; c < width; ++c) {
      const png_byte* px = &buf[static_cast<std::size_t>((r * width + c) * channels)];
      img(r, c) = color ? luma(px[0], px[1], px[2]) : px[0];
    }
  }
  return img;
}

std::vector<unsigned char> to_bytes(const GrayImage& image) {
  std::vector<unsigned char> buf(static_cast<std::size_t>(image.size()));
  for (Index r = 0; r < image.rows(); ++r) {
    for (Index c = 0; c < image.cols(); ++c) {
      buf[static_cast<std::size_t>(r * image.cols() + c)] =
          static_cast<unsigned char>(std::clamp(std::lround(image(r, c)), 0L, 255L));
    }
  }
  return buf;
}

}  // namespace

GrayImage read_image(const std::filesystem::path& path) {
  const std::string ext = lower_extension(path);
  if (ext == ".png") return read_png(path);
  if (ext == ".pgm" || ext == ".pnm") return read_pgm(path);
  throw InvalidInput("unsupported image format: " + path.string());
}

void write_image(const GrayImage& image, const std::filesystem::path& path) {
  const auto bytes = to_bytes(image);
  const std::string ext = lower_extension(path);
  if (ext == ".png") {
    png_image out{};
    out.version = PNG_IMAGE_VERSION;
    out.width = static_cast<png_uint_32>(image.cols());
    out.height = static_cast<png_uint_32>(image.rows());
    out.format = PNG_FORMAT_GRAY;
    if (!png_image_write_to_file(&out, path.string().c_str(), 0, bytes.data(), 0, nullptr)) {
      throw IoError("cannot write PNG " + path.string() + ": " + out.message);
    }
    return;
  }
  if (ext != ".pgm" && ext != ".pnm") throw InvalidInput("unsupported image format: " + path.string());
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw IoError("cannot open " + path.string() + " for writing");
  f << "P5\n" << image.cols() << ' ' << image.rows() << "\n255\n";
  f.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
}

}  // namespace smsd
