#pragma once

#include <array>
#include <cmath>
#include <numbers>

namespace nfbp::detail {

template <std::size_t N>
struct GaussRule {
  std::array<double, N> nodes{};
  std::array<double, N> weights{};
};

// Gauss-Legendre nodes and weights on [-1, 1] by Newton iteration on P_N.
template <std::size_t N>
GaussRule<N> make_gauss_legendre() {
  GaussRule<N> rule;
  const int n = static_cast<int>(N);
  for (int i = 0; i < n; ++i) {
    double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int iter = 0; iter < 100; ++iter) {
      double p0 = 1.0;
      double p1 = x;
      for (int j = 2; j <= n; ++j) {
        const double p2 = ((2.0 * j - 1.0) * x * p1 - (j - 1.0) * p0) / j;
        p0 = p1;
        p1 = p2;
      }
      dp = n * (x * p1 - p0) / (x * x - 1.0);
      const double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    rule.nodes[i] = x;
    rule.weights[i] = 2.0 / ((1.0 - x * x) * dp * dp);
  }
  return rule;
}

inline const GaussRule<16>& gauss_legendre_16() {
  static const GaussRule<16> rule = make_gauss_legendre<16>();
  return rule;
}

}  // namespace nfbp::detail
