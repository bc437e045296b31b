#include "ktraj/image_io.hpp"
#include "ktraj/error.hpp"

#include <fmt/format.h>
#include <png.h>

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <memory>

namespace ktraj {

static_assert(std::endian::native == std::endian::little, "raw image I/O assumes a little-endian host");

namespace {

constexpr char kMagic[4] = {'K', 'I', 'M', 'G'};

struct FileCloser
{
  void operator()(std::FILE *f) const { std::fclose(f); }
};
using FilePtr = std::unique_ptr<std::FILE, FileCloser>;

FilePtr open_file(std::filesystem::path const &path, char const *mode)
{
  FilePtr f(std::fopen(path.c_str(), mode));
  if (!f) {
    throw Error(fmt::format("cannot open {}", path.string()));
  }
  return f;
}

bool has_png_signature(std::filesystem::path const &path)
{
  std::ifstream is(path, std::ios::binary);
  unsigned char sig[8] = {};
  return is.read(reinterpret_cast<char *>(sig), 8) && png_sig_cmp(sig, 0, 8) == 0;
}

RealImage load_png(std::filesystem::path const &path)
{
  auto f = open_file(path, "rb");
  png_structp png = png_create_read_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
  png_infop info = png ? png_create_info_struct(png) : nullptr;
  if (!info) {
    png_destroy_read_struct(&png, nullptr, nullptr);
    throw Error("libpng: allocation failure");
  }
  RealImage img;
  if (setjmp(png_jmpbuf(png))) {
    png_destroy_read_struct(&png, &info, nullptr);
    throw Error(fmt::format("{}: malformed PNG", path.string()));
  }
  png_init_io(png, f.get());
  png_read_info(png, info);
  auto const width = png_get_image_width(png, info);
  auto const height = png_get_image_height(png, info);
  int const depth = png_get_bit_depth(png, info);
  int const color = png_get_color_type(png, info);
  if (color != PNG_COLOR_TYPE_GRAY) {
    png_destroy_read_struct(&png, &info, nullptr);
    throw Error(fmt::format("{}: only grayscale PNG is supported", path.string()));
  }
  if (depth != 8 && depth != 16) {
    png_destroy_read_struct(&png, &info, nullptr);
    throw Error(fmt::format("{}: unsupported bit depth {}", path.string(), depth));
  }
  if (width != height) {
    png_destroy_read_struct(&png, &info, nullptr);
    throw Error(fmt::format("{}: image is not square ({}x{})", path.string(), width, height));
  }
  auto const rowbytes = png_get_rowbytes(png, info);
  std::vector<unsigned char> buf(rowbytes * height);
  std::vector<png_bytep> rows(height);
  for (png_uint_32 r = 0; r < height; ++r) {
    rows[r] = buf.data() + r * rowbytes;
  }
  png_read_image(png, rows.data());
  png_read_end(png, nullptr);
  png_destroy_read_struct(&png, &info, nullptr);

  img.resize(height, width);
  for (png_uint_32 r = 0; r < height; ++r) {
    for (png_uint_32 c = 0; c < width; ++c) {
      if (depth == 8) {
        img(r, c) = rows[r][c] / 255.0;
      } else {
        unsigned const v = (unsigned(rows[r][2 * c]) << 8) | rows[r][2 * c + 1];
        img(r, c) = v / 65535.0;
      }
    }
  }
  return img;
}

void save_png(std::filesystem::path const &path, RealImage const &image, int depth)
{
  auto f = open_file(path, "wb");
  png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
  png_infop info = png ? png_create_info_struct(png) : nullptr;
  if (!info) {
    png_destroy_write_struct(&png, nullptr);
    throw Error("libpng: allocation failure");
  }
  auto const height = static_cast<png_uint_32>(image.rows());
  auto const width = static_cast<png_uint_32>(image.cols());
  int const bytes = depth / 8;
  double const maxv = depth == 8 ? 255.0 : 65535.0;
  std::vector<unsigned char> buf(std::size_t(width) * height * bytes);
  for (png_uint_32 r = 0; r < height; ++r) {
    for (png_uint_32 c = 0; c < width; ++c) {
      double const v = std::clamp(image(r, c), 0.0, 1.0);
      auto const q = static_cast<unsigned>(std::floor(v * maxv + 0.5));
      auto *p = buf.data() + (std::size_t(r) * width + c) * bytes;
      if (depth == 8) {
        p[0] = static_cast<unsigned char>(q);
      } else {
        p[0] = static_cast<unsigned char>(q >> 8);
        p[1] = static_cast<unsigned char>(q & 0xff);
      }
    }
  }
  if (setjmp(png_jmpbuf(png))) {
    png_destroy_write_struct(&png, &info);
    throw Error(fmt::format("{}: error writing PNG", path.string()));
  }
  png_init_io(png, f.get());
  png_set_IHDR(png, info, width, height, depth, PNG_COLOR_TYPE_GRAY, PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT,
               PNG_FILTER_TYPE_DEFAULT);
  png_write_info(png, info);
  for (png_uint_32 r = 0; r < height; ++r) {
    png_write_row(png, buf.data() + std::size_t(r) * width * bytes);
  }
  png_write_end(png, nullptr);
  png_destroy_write_struct(&png, &info);
}

RealImage load_raw(std::filesystem::path const &path)
{
  std::ifstream is(path, std::ios::binary);
  if (!is) {
    throw Error(fmt::format("cannot open {}", path.string()));
  }
  char magic[4] = {};
  std::uint32_t rows = 0, cols = 0;
  if (!is.read(magic, 4) || std::memcmp(magic, kMagic, 4) != 0) {
    throw Error(fmt::format("{}: bad magic, expected KIMG", path.string()));
  }
  if (!is.read(reinterpret_cast<char *>(&rows), 4) || !is.read(reinterpret_cast<char *>(&cols), 4)) {
    throw Error(fmt::format("{}: truncated header", path.string()));
  }
  if (rows != cols || rows == 0) {
    throw Error(fmt::format("{}: image is not square ({}x{})", path.string(), rows, cols));
  }
  if (rows > 65536) {
    throw Error(fmt::format("{}: implausible size {}", path.string(), rows));
  }
  Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor> data(rows, cols);
  if (!is.read(reinterpret_cast<char *>(data.data()), std::streamsize(data.size() * sizeof(double)))) {
    throw Error(fmt::format("{}: truncated payload", path.string()));
  }
  return data;
}

void save_raw(std::filesystem::path const &path, RealImage const &image)
{
  std::ofstream os(path, std::ios::binary);
  if (!os) {
    throw Error(fmt::format("cannot open {} for writing", path.string()));
  }
  auto const rows = static_cast<std::uint32_t>(image.rows());
  auto const cols = static_cast<std::uint32_t>(image.cols());
  Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor> const data = image;
  os.write(kMagic, 4);
  os.write(reinterpret_cast<char const *>(&rows), 4);
  os.write(reinterpret_cast<char const *>(&cols), 4);
  os.write(reinterpret_cast<char const *>(data.data()), std::streamsize(data.size() * sizeof(double)));
  if (!os) {
    throw Error(fmt::format("error writing {}", path.string()));
  }
}

} // namespace

RealImage load_gray_image(std::filesystem::path const &path)
{
  return has_png_signature(path) ? load_png(path) : load_raw(path);
}

void save_image(std::filesystem::path const &path, RealImage const &image, ImageFormat format)
{
  switch (format) {
  case ImageFormat::Png8:
    save_png(path, image, 8);
    break;
  case ImageFormat::Png16:
    save_png(path, image, 16);
    break;
  case ImageFormat::Raw:
    save_raw(path, image);
    break;
  }
}

void save_image(std::filesystem::path const &path, RealImage const &image)
{
  save_image(path, image, path.extension() == ".png" ? ImageFormat::Png8 : ImageFormat::Raw);
}

} // namespace ktraj
