#include "nfbp/focusing.hpp"

#include <algorithm>
#include <cctype>
#include <string>
#include <vector>

#include "nfbp/error.hpp"
#include "quadrature.hpp"

namespace nfbp {

std::string_view to_string(FocusingOperatorKind kind) noexcept {
  switch (kind) {
    case FocusingOperatorKind::PhaseOnly: return "PhaseOnly";
    case FocusingOperatorKind::F0: return "F0";
    case FocusingOperatorKind::F1: return "F1";
    case FocusingOperatorKind::F2: return "F2";
  }
  return "?";
}

std::optional<FocusingOperatorKind> parse_operator_kind(std::string_view name) {
  std::string lower(name);
  std::transform(lower.begin(), lower.end(), lower.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  if (lower == "phaseonly" || lower == "phase_only" || lower == "phase")
    return FocusingOperatorKind::PhaseOnly;
  if (lower == "f0") return FocusingOperatorKind::F0;
  if (lower == "f1") return FocusingOperatorKind::F1;
  if (lower == "f2") return FocusingOperatorKind::F2;
  return std::nullopt;
}

double min_distance(WaveNumber k) {
  if (!(k.value > 0.0)) return 1e-6;
  return std::max(1e-6, k.wavelength() / 100.0);
}

namespace {

void check_distance(const Displacement& r, WaveNumber k) {
  if (r.norm() < min_distance(k))
    throw Error(ErrorCode::ZeroDistance,
                "focusing operator evaluated closer than the singularity guard");
}

void check_branch(const Displacement& r) {
  if (!(r.z < 0.0))
    throw Error(ErrorCode::WrongBranch,
                "focusing operators are defined for R_z < 0 only");
}

cplx checked_kernel(FocusingOperatorKind kind, const Displacement& r, WaveNumber k) {
  check_distance(r, k);
  check_branch(r);
  return detail::focusing_kernel(kind, r.transverse_sq(), r.z, r.norm(), k.value);
}

}  // namespace

cplx f0(const Displacement& r, WaveNumber k) {
  return checked_kernel(FocusingOperatorKind::F0, r, k);
}

cplx f1(const Displacement& r, WaveNumber k) {
  return checked_kernel(FocusingOperatorKind::F1, r, k);
}

cplx f2(const Displacement& r, WaveNumber k) {
  return checked_kernel(FocusingOperatorKind::F2, r, k);
}

cplx phase_only(const Displacement& r, WaveNumber k) {
  check_distance(r, k);
  const double phase = k.value * r.norm();
  return {std::cos(phase), std::sin(phase)};
}

cplx evaluate(FocusingOperatorKind kind, const Displacement& r, WaveNumber k) {
  switch (kind) {
    case FocusingOperatorKind::PhaseOnly: return phase_only(r, k);
    case FocusingOperatorKind::F0: return f0(r, k);
    case FocusingOperatorKind::F1: return f1(r, k);
    case FocusingOperatorKind::F2: return f2(r, k);
  }
  throw Error(ErrorCode::InvalidArgument, "unknown focusing operator");
}

// ---------------------------------------------------------------------------
// Finite-difference oracle

namespace {

// Fornberg's recursion: weights of the m-th derivative at 0 on nodes i = -p..p
// (unit spacing).
std::vector<double> central_weights(int m, int p) {
  const int count = 2 * p + 1;
  std::vector<double> x(count);
  for (int i = 0; i < count; ++i) x[i] = i - p;

  // c[j][d]: weight of node j for derivative d.
  std::vector<std::vector<double>> c(count, std::vector<double>(m + 1, 0.0));
  double c1 = 1.0;
  double c4 = x[0];
  c[0][0] = 1.0;
  for (int i = 1; i < count; ++i) {
    const int mn = std::min(i, m);
    double c2 = 1.0;
    const double c5 = c4;
    c4 = x[i];
    for (int j = 0; j < i; ++j) {
      const double c3 = x[i] - x[j];
      c2 *= c3;
      if (j == i - 1) {
        for (int d = mn; d >= 1; --d)
          c[i][d] = c1 * (d * c[i - 1][d - 1] - c5 * c[i - 1][d]) / c2;
        c[i][0] = -c1 * c5 * c[i - 1][0] / c2;
      }
      for (int d = mn; d >= 1; --d)
        c[j][d] = (c4 * c[j][d] - d * c[j][d - 1]) / c3;
      c[j][0] = c4 * c[j][0] / c3;
    }
    c1 = c2;
  }
  std::vector<double> w(count);
  for (int i = 0; i < count; ++i) w[i] = c[i][m];
  return w;
}

// Half-width giving sixth-order accuracy for derivative order m.
int stencil_half_width(int m) { return m <= 2 ? 3 : (m <= 4 ? 4 : 5); }

}  // namespace

cplx fd_oracle(const Displacement& r, WaveNumber k, int order) {
  if (order < 0 || order > 4)
    throw Error(ErrorCode::InvalidArgument, "fd_oracle supports orders 0..4");
  const int m = order + 1;
  const int p = stencil_half_width(m);
  const double h = std::max(1e-5, 1e-4 / k.value);
  if (!(r.z + p * h < 0.0))
    throw Error(ErrorCode::StencilCrossesPlane,
                "finite-difference stencil would cross the aperture plane");

  const auto weights = central_weights(m, p);
  // g(z0 + s) = e^{jkR0} * e^{jk(R - R0)} / R. The common phase is factored out
  // and R - R0 = s(2 z0 + s)/(R + R0) is formed without cancellation, so the
  // phase roundoff no longer grows with kR.
  const double r0 = r.norm();
  auto green = [&](double s) {
    const double rn = std::sqrt(r0 * r0 + s * (2.0 * r.z + s));
    const double dr = s * (2.0 * r.z + s) / (rn + r0);
    return cplx(std::cos(k.value * dr), std::sin(k.value * dr)) / rn;
  };
  auto derivative = [&](double step) {
    cplx acc = 0.0;
    for (int i = -p; i <= p; ++i) acc += weights[i + p] * green(i * step);
    return acc / std::pow(step, m);
  };
  const cplx coarse = derivative(h);
  const cplx fine = derivative(0.5 * h);
  const cplx extrapolated = (64.0 * fine - coarse) / 63.0;

  // 1/(-j)^n = j^n
  static const cplx j_pow[] = {{1, 0}, {0, 1}, {-1, 0}, {0, -1}};
  const cplx common(std::cos(k.value * r0), std::sin(k.value * r0));
  return 2.0 * kPi * j_pow[order % 4] * common * extrapolated;
}

// ---------------------------------------------------------------------------
// Spectral oracle
//
// In polar coordinates (kappa, phi) of the transverse wave vector, with
// d = -R_z > 0, rho = |R_t| and the outgoing branch q = conj(k_z):
//
//   F_n = int_0^inf kappa dkappa q^n e^{+j q d} int_0^{2pi} e^{-j kappa rho cos phi} dphi
//
// The radial variable is q = sqrt(k^2 - kappa^2) on the visible disc and
// alpha = sqrt(kappa^2 - k^2) on the evanescent part, where kappa dkappa =
// q dq = alpha dalpha keeps the integrand free of the branch point.

namespace {

constexpr int kMinAngularNodes = 256;

// Trapezoidal mean of exp(-j x cos phi) over M nodes. The sine part cancels
// pairwise for even M, so only cosines are summed.
double angular_mean(double x, int nodes) {
  const int half = nodes / 2;
  double acc = std::cos(x) + std::cos(-x);  // phi = 0 and phi = pi
  for (int i = 1; i < half; ++i)
    acc += 2.0 * std::cos(x * std::cos(2.0 * kPi * i / nodes));
  return acc / nodes;
}

int angular_nodes(double x_max) {
  const double needed = x_max + 10.0 * std::cbrt(x_max) + 30.0;
  int m = std::max(kMinAngularNodes, static_cast<int>(std::ceil(needed)));
  return m + (m % 2);
}

cplx power_j(int n) {
  static const cplx table[] = {{1, 0}, {0, 1}, {-1, 0}, {0, -1}};
  return table[n % 4];
}

cplx visible_part(double d, double rho, double k, int order) {
  const int m = angular_nodes(k * rho);
  const double span = k * (d + rho);
  const int panels = std::max(4, static_cast<int>(std::ceil(span / 2.5)));
  const auto& rule = detail::gauss_legendre_16();
  const double width = k / panels;

  cplx acc = 0.0;
  for (int p = 0; p < panels; ++p) {
    const double mid = (p + 0.5) * width;
    cplx panel = 0.0;
    for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
      const double q = mid + 0.5 * width * rule.nodes[i];
      const double kappa = std::sqrt(std::max(0.0, k * k - q * q));
      const double radial = std::pow(q, order + 1);
      const cplx phase(std::cos(q * d), std::sin(q * d));
      panel += rule.weights[i] * radial * angular_mean(kappa * rho, m) * phase;
    }
    acc += 0.5 * width * panel;
  }
  return 2.0 * kPi * acc;
}

cplx evanescent_part(double d, double rho, double k, int order, double alpha_max) {
  if (!(alpha_max > 0.0)) return 0.0;
  const double kt_max = std::sqrt(k * k + alpha_max * alpha_max);
  const int m = angular_nodes(kt_max * rho);
  const double span = 0.5 * alpha_max * d + (kt_max - k) * rho / 2.5;
  const int panels = std::max(8, static_cast<int>(std::ceil(span)));
  const auto& rule = detail::gauss_legendre_16();
  const double width = alpha_max / panels;

  double acc = 0.0;
  for (int p = 0; p < panels; ++p) {
    const double mid = (p + 0.5) * width;
    double panel = 0.0;
    for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
      const double alpha = mid + 0.5 * width * rule.nodes[i];
      const double kappa = std::sqrt(k * k + alpha * alpha);
      panel += rule.weights[i] * std::pow(alpha, order + 1) * std::exp(-alpha * d) *
               angular_mean(kappa * rho, m);
    }
    acc += 0.5 * width * panel;
  }
  // q^n = (j alpha)^n
  return 2.0 * kPi * power_j(order) * acc;
}

// 2*pi * int_{alpha_max}^inf alpha^{n+1} e^{-alpha d} dalpha, closed form of
// the upper incomplete gamma function for integer order.
double tail_integral(double d, int order, double alpha_max) {
  const int s = order + 1;
  const double x = alpha_max * d;
  double term = 1.0;  // x^i / i!
  double sum = 1.0;
  for (int i = 1; i <= s; ++i) {
    term *= x / i;
    sum += term;
  }
  double factorial = 1.0;
  for (int i = 2; i <= s; ++i) factorial *= i;
  return 2.0 * kPi * factorial * std::exp(-x) * sum / std::pow(d, s + 1);
}

void check_spectral_args(const Displacement& r, WaveNumber k, int order) {
  if (order < 0 || order > 4)
    throw Error(ErrorCode::InvalidArgument, "spectral oracle supports orders 0..4");
  if (!(k.value > 0.0))
    throw Error(ErrorCode::InvalidArgument, "spectral oracle needs k > 0");
  check_branch(r);
}

}  // namespace

double evanescent_tail_bound(const Displacement& r, WaveNumber k, int order,
                             double kt_max) {
  const double alpha_max = std::sqrt(std::max(0.0, kt_max * kt_max - k.value * k.value));
  return tail_integral(-r.z, order, alpha_max);
}

double spectral_cutoff(const Displacement& r, WaveNumber k, int order,
                       double reference, double tolerance) {
  const double d = -r.z;
  const double target = tolerance * reference;
  double x = 1.0;
  while (tail_integral(d, order, x / d) > target && x < 1e4) x *= 1.25;
  const double alpha_max = x / d;
  return std::sqrt(k.value * k.value + alpha_max * alpha_max);
}

SpectralParts spectral_parts(const Displacement& r, WaveNumber k, int order,
                             double kt_max) {
  check_spectral_args(r, k, order);
  if (kt_max < k.value)
    throw Error(ErrorCode::InvalidArgument, "spectral oracle needs kt_max >= k");
  const double d = -r.z;
  const double rho = std::sqrt(r.transverse_sq());
  const double alpha_max = std::sqrt(kt_max * kt_max - k.value * k.value);
  return {visible_part(d, rho, k.value, order),
          evanescent_part(d, rho, k.value, order, alpha_max)};
}

cplx spectral_oracle(const Displacement& r, WaveNumber k, int order, double kt_max) {
  const SpectralParts parts = spectral_parts(r, k, order, kt_max);
  if (evanescent_tail_bound(r, k, order, kt_max) > 1e-8 * std::abs(parts.visible))
    throw Error(ErrorCode::TruncationInsufficient,
                "kt_max too small: evanescent tail exceeds 1e-8 of the visible part");
  return parts.total();
}

cplx spectral_oracle(const Displacement& r, WaveNumber k, int order) {
  check_spectral_args(r, k, order);
  const double d = -r.z;
  const double rho = std::sqrt(r.transverse_sq());
  const cplx visible = visible_part(d, rho, k.value, order);
  const double kt_max = spectral_cutoff(r, k, order, std::abs(visible), 1e-9);
  const double alpha_max = std::sqrt(kt_max * kt_max - k.value * k.value);
  return visible + evanescent_part(d, rho, k.value, order, alpha_max);
}

}  // namespace nfbp
