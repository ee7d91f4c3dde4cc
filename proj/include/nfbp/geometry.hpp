#pragma once

#include <complex>
#include <cstddef>
#include <iosfwd>
#include <numbers>
#include <string>
#include <vector>

namespace nfbp {

inline constexpr double kSpeedOfLight = 299'792'458.0;  // m/s
inline constexpr double kPi = std::numbers::pi;

using cplx = std::complex<double>;

// Free-space wave number k = 2*pi*f/c0 in rad/m.
struct WaveNumber {
  double value = 0.0;

  constexpr WaveNumber() = default;
  constexpr explicit WaveNumber(double rad_per_m) : value(rad_per_m) {}

  static WaveNumber from_frequency(double hz) {
    return WaveNumber{2.0 * kPi * hz / kSpeedOfLight};
  }
  static WaveNumber from_wavelength(double meters) {
    return WaveNumber{2.0 * kPi / meters};
  }
  double wavelength() const { return 2.0 * kPi / value; }
};

struct TransverseK {
  double kx = 0.0;
  double ky = 0.0;
};

enum class KzRegion { Visible, Evanescent };

struct KzBranch {
  cplx value;
  KzRegion region;
};

// k_z from the free-space dispersion relation. Visible: sqrt(k^2 - kt^2) >= 0;
// evanescent: -j*sqrt(kt^2 - k^2). The boundary kt = k is Visible with 0.
KzBranch kz(WaveNumber k, TransverseK kt);

struct Position3 {
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;

  friend constexpr Position3 operator+(Position3 a, Position3 b) {
    return {a.x + b.x, a.y + b.y, a.z + b.z};
  }
  friend constexpr Position3 operator-(Position3 a, Position3 b) {
    return {a.x - b.x, a.y - b.y, a.z - b.z};
  }
  friend constexpr bool operator==(Position3, Position3) = default;
};

double distance(Position3 a, Position3 b);

// Transmit and receive element positions on a planar aperture z = z_m, each
// with its quadrature (area) weight in m^2.
struct ArrayLayout {
  std::vector<Position3> tx_positions;
  std::vector<Position3> rx_positions;
  std::vector<double> tx_weights;
  std::vector<double> rx_weights;

  std::size_t tx_count() const { return tx_positions.size(); }
  std::size_t rx_count() const { return rx_positions.size(); }
  bool empty() const { return tx_positions.empty() && rx_positions.empty(); }

  // z of the aperture plane. Throws InvalidArgument for an empty layout.
  double aperture_z() const;

  // Throws InvalidArgument when list lengths disagree, a weight is not
  // strictly positive, a coordinate is not finite or the elements are not
  // coplanar within 1e-12 m.
  void validate() const;
};

// Fermat spiral with golden-angle increments; Tx and Rx share the n points.
// Each element carries the equal-area weight pi*r_max^2/n.
ArrayLayout spiral_layout(std::size_t n, double r_max, double z_m);

// Centered nx-by-ny grid with pitch (lx/nx, ly/ny); Tx and Rx share it.
ArrayLayout rect_layout(std::size_t nx, std::size_t ny, double lx, double ly,
                        double z_m);

// Grid of square sub-arrays (clusters) with Tx on the top and bottom edges
// and Rx on the left and right edges, `per_edge` elements per edge. Clusters
// of side `cluster_size` sit on a `pitch` grid centered on the origin. Each
// element gets an equal share of its cluster's area as weight.
ArrayLayout cluster_layout(std::size_t clusters_x, std::size_t clusters_y,
                           double cluster_size, double pitch, std::size_t per_edge,
                           double z_m);

// In-plane translation of every element. Throws NonPlanarShift if offset.z != 0.
ArrayLayout shift_layout(const ArrayLayout& layout, Position3 offset);

// Concatenates the element lists of two layouts (SAR-style combination).
ArrayLayout concat_layouts(const ArrayLayout& a, const ArrayLayout& b);

// CSV with header `role,x,y,z,weight`, 17 significant digits.
void write_layout_csv(std::ostream& out, const ArrayLayout& layout);
void write_layout_csv(const std::string& path, const ArrayLayout& layout);
ArrayLayout read_layout_csv(std::istream& in);
ArrayLayout read_layout_csv(const std::string& path);

}  // namespace nfbp
