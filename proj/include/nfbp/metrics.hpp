#pragma once

#include <array>
#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

#include "nfbp/reconstruct.hpp"

namespace nfbp {

enum class ProjectionAxis { X, Y, Z };

std::string_view to_string(ProjectionAxis axis) noexcept;

// Physical placement of a 2-D image: pixel (row, col) sits at
// (col_origin + col*col_spacing, row_origin + row*row_spacing) along the
// axes named by col_axis and row_axis.
struct Extent2D {
  char col_axis = 'x';
  char row_axis = 'y';
  double col_origin = 0.0;
  double row_origin = 0.0;
  double col_spacing = 1.0;
  double row_spacing = 1.0;
};

// Non-negative magnitudes, row-major [rows][cols].
struct Image2D {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<double> values;
  Extent2D extent;

  double at(std::size_t r, std::size_t c) const { return values[r * cols + c]; }
  double max_value() const;
};

// Signed difference of two magnitude images.
struct DifferenceImage {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<double> values;
  Extent2D extent;

  Image2D positive_part() const;
  Image2D negative_part() const;  // magnitudes of the negative values
};

// Maximum of |voxel| along the collapsed axis. Z gives rows = y, cols = x;
// Y gives rows = z, cols = x; X gives rows = z, cols = y.
Image2D mip(const ImageVolume& volume, ProjectionAxis axis);

// a - b elementwise. Throws DimMismatch.
DifferenceImage diff_image(const Image2D& a, const Image2D& b);

// Shannon entropy (nats) of p_i = |s_i|^2 / sum_j |s_j|^2. Throws EmptyImage.
double entropy(const ImageVolume& volume);

// Reported instead of -inf when nothing lies outside the mask.
inline constexpr double kArtifactFloorDb = -300.0;

// 20 log10(max |s| outside mask / max |s| inside mask). Throws DimMismatch or
// EmptyMask.
double artifact_level(const ImageVolume& volume, const std::vector<bool>& mask);

// Marks voxels within `radius` (Euclidean, meters) of any target position.
std::vector<bool> target_mask(const ImageGrid& grid, const std::vector<Position3>& targets,
                              double radius);

// True when a voxel within `reach` voxels (per axis) of the voxel nearest to
// `target` is a local maximum of |s| over its 26-neighbourhood.
bool has_local_peak_near(const ImageVolume& volume, Position3 target, std::size_t reach = 1);

// Flat index of the voxel with the largest magnitude.
std::size_t argmax_voxel(const ImageVolume& volume);

// dB display mapping: 20 log10(v / max) clipped to [floor_db, 0].
inline constexpr double kDisplayFloorDb = -40.0;

void write_image_csv(const std::string& path, const Image2D& image);
void write_image_csv(const std::string& path, const DifferenceImage& image);
// 8-bit grayscale PNG with the dB mapping plus `<path>.txt` extent sidecar.
void write_image_png(const std::string& path, const Image2D& image,
                     double floor_db = kDisplayFloorDb);

}  // namespace nfbp
