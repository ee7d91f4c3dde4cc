#include <png.h>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <memory>

#include "nfbp/error.hpp"
#include "nfbp/metrics.hpp"
#include "text_io.hpp"

namespace nfbp {

namespace {

template <typename Image>
void write_grid_csv(const std::string& path, const Image& image) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorCode::IoError, "cannot open " + path + " for writing");
  for (std::size_t r = 0; r < image.rows; ++r) {
    for (std::size_t c = 0; c < image.cols; ++c) {
      if (c) out << ',';
      out << detail::fmt17(image.values[r * image.cols + c]);
    }
    out << '\n';
  }
}

void write_extent_sidecar(const std::string& path, const Image2D& image, double floor_db) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorCode::IoError, "cannot open " + path + " for writing");
  const Extent2D& e = image.extent;
  using detail::fmt17;
  out << "rows " << image.rows << '\n'
      << "cols " << image.cols << '\n'
      << "col_axis " << e.col_axis << '\n'
      << "row_axis " << e.row_axis << '\n'
      << "col_min_m " << fmt17(e.col_origin) << '\n'
      << "col_max_m " << fmt17(e.col_origin + e.col_spacing * (image.cols - 1)) << '\n'
      << "row_min_m " << fmt17(e.row_origin) << '\n'
      << "row_max_m " << fmt17(e.row_origin + e.row_spacing * (image.rows - 1)) << '\n'
      << "db_range " << fmt17(floor_db) << " 0\n"
      << "peak " << fmt17(image.max_value()) << '\n';
}

struct FileCloser {
  void operator()(std::FILE* f) const { std::fclose(f); }
};

}  // namespace

void write_image_csv(const std::string& path, const Image2D& image) {
  write_grid_csv(path, image);
}

void write_image_csv(const std::string& path, const DifferenceImage& image) {
  write_grid_csv(path, image);
}

void write_image_png(const std::string& path, const Image2D& image, double floor_db) {
  if (image.rows == 0 || image.cols == 0)
    throw Error(ErrorCode::DimMismatch, "cannot write an empty image");
  const double peak = image.max_value();

  // Row 0 of the PNG is the top of the picture: highest row coordinate first.
  std::vector<png_byte> pixels(image.rows * image.cols, 0);
  for (std::size_t r = 0; r < image.rows; ++r) {
    for (std::size_t c = 0; c < image.cols; ++c) {
      const double v = image.at(r, c);
      double level = 0.0;
      if (peak > 0.0 && v > 0.0) {
        const double db = std::max(floor_db, std::min(0.0, 20.0 * std::log10(v / peak)));
        level = (db - floor_db) / -floor_db;
      }
      pixels[(image.rows - 1 - r) * image.cols + c] =
          static_cast<png_byte>(std::lround(255.0 * level));
    }
  }

  std::unique_ptr<std::FILE, FileCloser> file(std::fopen(path.c_str(), "wb"));
  if (!file) throw Error(ErrorCode::IoError, "cannot open " + path + " for writing");
  png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
  png_infop info = png ? png_create_info_struct(png) : nullptr;
  if (!png || !info) {
    png_destroy_write_struct(&png, &info);
    throw Error(ErrorCode::IoError, "libpng initialisation failed");
  }
  if (setjmp(png_jmpbuf(png))) {
    png_destroy_write_struct(&png, &info);
    throw Error(ErrorCode::IoError, "libpng failed writing " + path);
  }
  png_init_io(png, file.get());
  png_set_IHDR(png, info, static_cast<png_uint_32>(image.cols),
               static_cast<png_uint_32>(image.rows), 8, PNG_COLOR_TYPE_GRAY,
               PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
  png_write_info(png, info);
  for (std::size_t r = 0; r < image.rows; ++r)
    png_write_row(png, pixels.data() + r * image.cols);
  png_write_end(png, nullptr);
  png_destroy_write_struct(&png, &info);

  write_extent_sidecar(path + ".txt", image, floor_db);
}

}  // namespace nfbp
