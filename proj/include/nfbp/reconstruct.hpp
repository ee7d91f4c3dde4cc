#pragma once

#include <array>
#include <cstddef>
#include <iosfwd>
#include <string>
#include <vector>

#include "nfbp/focusing.hpp"
#include "nfbp/forward.hpp"
#include "nfbp/geometry.hpp"

namespace nfbp {

// Regular voxel grid; voxel (ix, iy, iz) sits at origin + (ix*dx, iy*dy, iz*dz).
struct ImageGrid {
  Position3 origin;
  std::array<double, 3> spacing{1.0, 1.0, 1.0};
  std::array<std::size_t, 3> dims{1, 1, 1};

  std::size_t size() const { return dims[0] * dims[1] * dims[2]; }
  Position3 voxel(std::size_t ix, std::size_t iy, std::size_t iz) const {
    return {origin.x + static_cast<double>(ix) * spacing[0],
            origin.y + static_cast<double>(iy) * spacing[1],
            origin.z + static_cast<double>(iz) * spacing[2]};
  }
  // Flat index in [z][y][x] order.
  std::size_t index(std::size_t ix, std::size_t iy, std::size_t iz) const {
    return (iz * dims[1] + iy) * dims[0] + ix;
  }
  Position3 voxel(std::size_t flat) const {
    const std::size_t ix = flat % dims[0];
    const std::size_t iy = (flat / dims[0]) % dims[1];
    const std::size_t iz = flat / (dims[0] * dims[1]);
    return voxel(ix, iy, iz);
  }
  double max_z() const {
    return origin.z + static_cast<double>(dims[2] - 1) * spacing[2];
  }

  // Grid of `dims` voxels whose midpoint is `center`.
  static ImageGrid centered(Position3 center, std::array<double, 3> spacing,
                            std::array<std::size_t, 3> dims);

  // Throws InvalidArgument for non-positive spacing or zero dims.
  void validate() const;
};

struct ImageVolume {
  ImageGrid grid;
  std::vector<cplx> voxels;  // [z][y][x]
  bool normalized = false;

  double max_magnitude() const;
};

struct BackprojectionOptions {
  unsigned workers = 0;  // 0 = one per hardware thread
};

// Single-frequency image
//   s(r') = sum_pairs w_R w_T T(r_R, r_T) F(r' - r_R, k) F(r' - r_T, k).
// Voxel-element pairs closer than the singularity guard contribute zero.
// Throws WrongBranch when a voxel is not strictly in front of the aperture.
ImageVolume backproject_single_freq(const MeasurementSet& ms, std::size_t freq_index,
                                    const ImageGrid& grid, FocusingOperatorKind kind,
                                    const BackprojectionOptions& options = {});

// Coherent sum of the single-frequency images in ascending frequency order,
// then max-normalized. An all-zero image is returned unnormalized
// (normalized == false) instead of dividing by zero.
ImageVolume backproject_multi_freq(const MeasurementSet& ms, const ImageGrid& grid,
                                   FocusingOperatorKind kind,
                                   const BackprojectionOptions& options = {});

// Divides by max |voxel|. Throws EmptyImage when every voxel is zero.
ImageVolume normalize(const ImageVolume& volume);

// Binary "NFIM" dump, little-endian: magic[4] "NFIM", u64 nx, ny, nz,
// f64 origin[3], f64 spacing[3], then interleaved (re, im) f64 in [z][y][x].
void write_volume(std::ostream& out, const ImageVolume& volume);
void write_volume(const std::string& path, const ImageVolume& volume);
ImageVolume read_volume(std::istream& in);
ImageVolume read_volume(const std::string& path);

}  // namespace nfbp
