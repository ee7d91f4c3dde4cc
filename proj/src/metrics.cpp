#include "nfbp/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "nfbp/error.hpp"

namespace nfbp {

std::string_view to_string(ProjectionAxis axis) noexcept {
  switch (axis) {
    case ProjectionAxis::X: return "x";
    case ProjectionAxis::Y: return "y";
    case ProjectionAxis::Z: return "z";
  }
  return "?";
}

double Image2D::max_value() const {
  double m = 0.0;
  for (double v : values) m = std::max(m, v);
  return m;
}

Image2D DifferenceImage::positive_part() const {
  Image2D out{rows, cols, values, extent};
  for (auto& v : out.values) v = std::max(v, 0.0);
  return out;
}

Image2D DifferenceImage::negative_part() const {
  Image2D out{rows, cols, values, extent};
  for (auto& v : out.values) v = std::max(-v, 0.0);
  return out;
}

Image2D mip(const ImageVolume& volume, ProjectionAxis axis) {
  const ImageGrid& g = volume.grid;
  if (volume.voxels.empty() || volume.voxels.size() != g.size())
    throw Error(ErrorCode::DimMismatch, "mip: volume is empty or inconsistent");
  const auto [nx, ny, nz] = g.dims;

  Image2D img;
  switch (axis) {
    case ProjectionAxis::Z:
      img.rows = ny;
      img.cols = nx;
      img.extent = {'x', 'y', g.origin.x, g.origin.y, g.spacing[0], g.spacing[1]};
      break;
    case ProjectionAxis::Y:
      img.rows = nz;
      img.cols = nx;
      img.extent = {'x', 'z', g.origin.x, g.origin.z, g.spacing[0], g.spacing[2]};
      break;
    case ProjectionAxis::X:
      img.rows = nz;
      img.cols = ny;
      img.extent = {'y', 'z', g.origin.y, g.origin.z, g.spacing[1], g.spacing[2]};
      break;
  }
  img.values.assign(img.rows * img.cols, 0.0);

  for (std::size_t iz = 0; iz < nz; ++iz)
    for (std::size_t iy = 0; iy < ny; ++iy)
      for (std::size_t ix = 0; ix < nx; ++ix) {
        const double m = std::abs(volume.voxels[g.index(ix, iy, iz)]);
        std::size_t pixel = 0;
        switch (axis) {
          case ProjectionAxis::Z: pixel = iy * nx + ix; break;
          case ProjectionAxis::Y: pixel = iz * nx + ix; break;
          case ProjectionAxis::X: pixel = iz * ny + iy; break;
        }
        img.values[pixel] = std::max(img.values[pixel], m);
      }
  return img;
}

DifferenceImage diff_image(const Image2D& a, const Image2D& b) {
  if (a.rows != b.rows || a.cols != b.cols || a.values.size() != b.values.size())
    throw Error(ErrorCode::DimMismatch, "diff_image: image dimensions differ");
  DifferenceImage d{a.rows, a.cols, std::vector<double>(a.values.size()), a.extent};
  for (std::size_t i = 0; i < a.values.size(); ++i) d.values[i] = a.values[i] - b.values[i];
  return d;
}

double entropy(const ImageVolume& volume) {
  const double peak = volume.max_magnitude();
  if (!(peak > 0.0)) throw Error(ErrorCode::EmptyImage, "entropy of an all-zero image");
  // Intensities relative to the peak keep the sums well scaled.
  double total = 0.0;
  for (const auto& v : volume.voxels) total += std::norm(v / peak);
  double e = 0.0;
  for (const auto& v : volume.voxels) {
    const double p = std::norm(v / peak) / total;
    if (p > 0.0) e -= p * std::log(p);
  }
  return std::max(e, 0.0);
}

double artifact_level(const ImageVolume& volume, const std::vector<bool>& mask) {
  if (mask.size() != volume.voxels.size())
    throw Error(ErrorCode::DimMismatch, "artifact_level: mask size differs from volume");
  double inside = 0.0;
  double outside = 0.0;
  bool any_inside = false;
  for (std::size_t i = 0; i < mask.size(); ++i) {
    const double m = std::abs(volume.voxels[i]);
    if (mask[i]) {
      any_inside = true;
      inside = std::max(inside, m);
    } else {
      outside = std::max(outside, m);
    }
  }
  if (!any_inside) throw Error(ErrorCode::EmptyMask, "artifact_level: mask selects no voxel");
  if (!(inside > 0.0))
    throw Error(ErrorCode::EmptyImage, "artifact_level: target region is all zero");
  if (!(outside > 0.0)) return kArtifactFloorDb;
  return std::max(kArtifactFloorDb, 20.0 * std::log10(outside / inside));
}

std::vector<bool> target_mask(const ImageGrid& grid, const std::vector<Position3>& targets,
                              double radius) {
  std::vector<bool> mask(grid.size(), false);
  for (std::size_t v = 0; v < grid.size(); ++v) {
    const Position3 p = grid.voxel(v);
    for (const auto& t : targets)
      if (distance(p, t) <= radius) {
        mask[v] = true;
        break;
      }
  }
  return mask;
}

std::size_t argmax_voxel(const ImageVolume& volume) {
  std::size_t best = 0;
  double best_mag = -1.0;
  for (std::size_t i = 0; i < volume.voxels.size(); ++i) {
    const double m = std::abs(volume.voxels[i]);
    if (m > best_mag) {
      best_mag = m;
      best = i;
    }
  }
  return best;
}

namespace {

long nearest_index(double coord, double origin, double spacing, std::size_t n) {
  const long i = std::lround((coord - origin) / spacing);
  return std::clamp<long>(i, 0, static_cast<long>(n) - 1);
}

bool is_local_max(const ImageVolume& v, long ix, long iy, long iz) {
  const auto& g = v.grid;
  const double centre = std::abs(v.voxels[g.index(ix, iy, iz)]);
  if (!(centre > 0.0)) return false;
  for (long dz = -1; dz <= 1; ++dz)
    for (long dy = -1; dy <= 1; ++dy)
      for (long dx = -1; dx <= 1; ++dx) {
        if (dx == 0 && dy == 0 && dz == 0) continue;
        const long x = ix + dx, y = iy + dy, z = iz + dz;
        if (x < 0 || y < 0 || z < 0 || x >= static_cast<long>(g.dims[0]) ||
            y >= static_cast<long>(g.dims[1]) || z >= static_cast<long>(g.dims[2]))
          continue;
        if (std::abs(v.voxels[g.index(x, y, z)]) > centre) return false;
      }
  return true;
}

}  // namespace

bool has_local_peak_near(const ImageVolume& volume, Position3 target, std::size_t reach) {
  const auto& g = volume.grid;
  const long cx = nearest_index(target.x, g.origin.x, g.spacing[0], g.dims[0]);
  const long cy = nearest_index(target.y, g.origin.y, g.spacing[1], g.dims[1]);
  const long cz = nearest_index(target.z, g.origin.z, g.spacing[2], g.dims[2]);
  const long r = static_cast<long>(reach);
  for (long z = cz - r; z <= cz + r; ++z)
    for (long y = cy - r; y <= cy + r; ++y)
      for (long x = cx - r; x <= cx + r; ++x) {
        if (x < 0 || y < 0 || z < 0 || x >= static_cast<long>(g.dims[0]) ||
            y >= static_cast<long>(g.dims[1]) || z >= static_cast<long>(g.dims[2]))
          continue;
        if (is_local_max(volume, x, y, z)) return true;
      }
  return false;
}

}  // namespace nfbp
