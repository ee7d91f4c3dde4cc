#pragma once

// Near-field focusing operators for spatial-domain back-projection.
//
// F_n(R, k) is the spatial kernel belonging to the spectral filter
// H_n = k_z^n. For R_z < 0 (voxel in front of the aperture) it equals
//
//   F_n = 2*pi / (-j)^n * d^{n+1}/dR_z^{n+1} [ exp(+jkR) / R ],
//
// with closed forms for n = 0, 1, 2. PhaseOnly is the classical kernel
// exp(+jkR) that compensates the propagation phase but not the amplitude.
//
// Two independent oracles check the closed forms: a Richardson-extrapolated
// finite-difference derivative of exp(+jkR)/R, and a direct quadrature of
// the plane-wave spectral integral.

#include <array>
#include <cmath>
#include <optional>
#include <string_view>

#include "nfbp/geometry.hpp"

namespace nfbp {

// R = r' - r, from an aperture element r to a voxel r'.
struct Displacement {
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;

  static Displacement between(Position3 voxel, Position3 element) {
    return {voxel.x - element.x, voxel.y - element.y, voxel.z - element.z};
  }
  double norm() const { return std::sqrt(x * x + y * y + z * z); }
  double transverse_sq() const { return x * x + y * y; }
};

enum class FocusingOperatorKind { PhaseOnly, F0, F1, F2 };

inline constexpr std::array<FocusingOperatorKind, 4> kAllOperatorKinds = {
    FocusingOperatorKind::PhaseOnly, FocusingOperatorKind::F0,
    FocusingOperatorKind::F1, FocusingOperatorKind::F2};

std::string_view to_string(FocusingOperatorKind kind) noexcept;
// Accepts "PhaseOnly", "F0", "F1", "F2" (case-insensitive).
std::optional<FocusingOperatorKind> parse_operator_kind(std::string_view name);

// Singularity guard: max(1 um, lambda/100); 1 um when k = 0.
double min_distance(WaveNumber k);

// Closed forms. Throw ZeroDistance when |R| < min_distance(k) and WrongBranch
// when R.z >= 0.
cplx f0(const Displacement& r, WaveNumber k);
cplx f1(const Displacement& r, WaveNumber k);
cplx f2(const Displacement& r, WaveNumber k);
// exp(+jkR); only the distance guard applies.
cplx phase_only(const Displacement& r, WaveNumber k);

cplx evaluate(FocusingOperatorKind kind, const Displacement& r, WaveNumber k);

// Finite-difference oracle for F_n, 0 <= n <= 4. Central stencils of sixth
// order with step h = max(1e-5 m, 1e-4/k), Richardson-extrapolated over h and
// h/2. Throws StencilCrossesPlane when the stencil would reach R_z >= 0.
cplx fd_oracle(const Displacement& r, WaveNumber k, int order);

// Visible and evanescent parts of the spectral integral for F_n.
struct SpectralParts {
  cplx visible;
  cplx evanescent;
  cplx total() const { return visible + evanescent; }
};

// Direct quadrature of the spectral integral over |k_t| < kt_max, without the
// truncation check. kt_max == k yields the visible disc only.
SpectralParts spectral_parts(const Displacement& r, WaveNumber k, int order,
                             double kt_max);

// Spectral oracle for F_n, 0 <= n <= 4. Requires R.z < 0 and kt_max >= k.
// Throws TruncationInsufficient when the bound on the neglected evanescent
// tail exceeds 1e-8 of the visible-region magnitude.
cplx spectral_oracle(const Displacement& r, WaveNumber k, int order, double kt_max);

// As above with kt_max chosen by spectral_cutoff().
cplx spectral_oracle(const Displacement& r, WaveNumber k, int order);

// Smallest kt_max whose evanescent tail bound stays below `tolerance` times
// `reference` (an estimate of |F_n|).
double spectral_cutoff(const Displacement& r, WaveNumber k, int order,
                       double reference, double tolerance = 1e-9);

// Bound on the magnitude of the evanescent spectrum beyond kt_max.
double evanescent_tail_bound(const Displacement& r, WaveNumber k, int order,
                             double kt_max);

namespace detail {

// Unchecked closed forms for the reconstruction kernel; callers guarantee
// R.z < 0 and |R| > 0. `rn` is |R|.
inline cplx focusing_kernel(FocusingOperatorKind kind, double rt2, double rz,
                            double rn, double k) {
  const cplx phase(std::cos(k * rn), std::sin(k * rn));
  switch (kind) {
    case FocusingOperatorKind::PhaseOnly:
      return phase;
    case FocusingOperatorKind::F0: {
      const double inv = 1.0 / rn;
      const double inv2 = inv * inv;
      // 2*pi * (jk Rz/R^2 - Rz/R^3)
      const cplx a(-rz * inv2 * inv, k * rz * inv2);
      return 2.0 * kPi * a * phase;
    }
    case FocusingOperatorKind::F1: {
      const double inv = 1.0 / rn;
      const double inv2 = inv * inv;
      const double inv4 = inv2 * inv2;
      const double lateral = rt2 - 2.0 * rz * rz;
      // bracket = -k^2 Rz^2/R^3 + lateral*(jk/R^4 - 1/R^5); result 2*pi*j*bracket
      const double br_re = -k * k * rz * rz * inv2 * inv - lateral * inv4 * inv;
      const double br_im = lateral * k * inv4;
      return 2.0 * kPi * cplx(-br_im, br_re) * phase;
    }
    case FocusingOperatorKind::F2: {
      const double inv = 1.0 / rn;
      const double inv2 = inv * inv;
      const double inv4 = inv2 * inv2;
      const double inv5 = inv4 * inv;
      const double inv6 = inv4 * inv2;
      const double inv7 = inv6 * inv;
      const double rz2 = rz * rz;
      const double a = rt2 - rz2;
      const double b = 3.0 * rt2 - 2.0 * rz2;
      // j^3 k^3 Rz^3/R^4 = -j k^3 Rz^3/R^4
      // Rz * (3 j^2 k^2 a/R^5 + b*(-3jk/R^6 + 3/R^7))
      const double re = rz * (-3.0 * k * k * a * inv5 + 3.0 * b * inv7);
      const double im = -k * k * k * rz2 * rz * inv4 + rz * (-3.0 * k * b * inv6);
      return -2.0 * kPi * cplx(re, im) * phase;
    }
  }
  return {};
}

}  // namespace detail

}  // namespace nfbp
