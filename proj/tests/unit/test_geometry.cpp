#include <doctest.h>

#include <cmath>
#include <limits>
#include <random>
#include <sstream>

#include "nfbp/error.hpp"
#include "nfbp/geometry.hpp"

using namespace nfbp;

namespace {

double weight_sum(const std::vector<double>& w) {
  double s = 0.0;
  for (double v : w) s += v;
  return s;
}

}  // namespace

TEST_CASE("kz visible region") {
  const auto b = kz(WaveNumber{10.0}, {3.0, 4.0});
  CHECK(b.region == KzRegion::Visible);
  CHECK(b.value.real() == doctest::Approx(8.660254037844387).epsilon(1e-15));
  CHECK(b.value.imag() == 0.0);
}

TEST_CASE("kz evanescent region") {
  const auto b = kz(WaveNumber{5.0}, {4.0, 4.0});
  CHECK(b.region == KzRegion::Evanescent);
  CHECK(b.value.real() == 0.0);
  CHECK(b.value.imag() == doctest::Approx(-2.6457513110645906).epsilon(1e-15));
}

TEST_CASE("kz boundary is visible zero") {
  const auto b = kz(WaveNumber{10.0}, {6.0, 8.0});
  CHECK(b.region == KzRegion::Visible);
  CHECK(b.value == cplx(0.0, 0.0));
}

TEST_CASE("kz squared plus kt squared equals k squared") {
  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> kd(1.0, 2000.0), td(-3000.0, 3000.0);
  for (int i = 0; i < 1000; ++i) {
    const double k = kd(rng);
    const TransverseK kt{td(rng), td(rng)};
    const cplx z = kz(WaveNumber{k}, kt).value;
    const cplx lhs = z * z + kt.kx * kt.kx + kt.ky * kt.ky;
    CHECK(std::abs(lhs - k * k) <= 1e-12 * (k * k + kt.kx * kt.kx + kt.ky * kt.ky));
  }
}

TEST_CASE("kz is continuous across the boundary") {
  const double k = 100.0;
  for (double eps : {1e-2, 1e-4, 1e-6}) {
    const double inside = std::abs(kz(WaveNumber{k}, {k - eps, 0.0}).value);
    const double outside = std::abs(kz(WaveNumber{k}, {k + eps, 0.0}).value);
    CHECK(inside < 2.0 * std::sqrt(2.0 * k * eps));
    CHECK(outside < 2.0 * std::sqrt(2.0 * k * eps));
  }
}

TEST_CASE("wave number conversions") {
  const auto k = WaveNumber::from_frequency(40e9);
  CHECK(k.value == doctest::Approx(2.0 * kPi * 40e9 / 299792458.0).epsilon(1e-15));
  CHECK(k.wavelength() == doctest::Approx(299792458.0 / 40e9).epsilon(1e-15));
  CHECK(WaveNumber::from_wavelength(0.0075).value == doctest::Approx(2.0 * kPi / 0.0075));
}

TEST_CASE("spiral with one element") {
  const auto l = spiral_layout(1, 0.1, 0.1);
  REQUIRE(l.tx_count() == 1);
  REQUIRE(l.rx_count() == 1);
  const auto p = l.tx_positions[0];
  CHECK(std::hypot(p.x, p.y) == doctest::Approx(0.1 * std::sqrt(0.5)).epsilon(1e-15));
  CHECK(p.y == 0.0);
  CHECK(p.x > 0.0);
  CHECK(p.z == 0.1);
  CHECK(l.tx_weights[0] == doctest::Approx(kPi * 0.01).epsilon(1e-15));
}

TEST_CASE("spiral with 100 elements") {
  const auto l = spiral_layout(100, 0.1, 0.1);
  REQUIRE(l.tx_count() == 100);
  double min_pair = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < 100; ++i) {
    CHECK(std::hypot(l.tx_positions[i].x, l.tx_positions[i].y) <= 0.1);
    for (std::size_t j = i + 1; j < 100; ++j)
      min_pair = std::min(min_pair, distance(l.tx_positions[i], l.tx_positions[j]));
  }
  CHECK(min_pair > 0.0);
  CHECK(std::abs(weight_sum(l.tx_weights) - kPi * 0.01) <= 1e-12);
  CHECK(std::abs(weight_sum(l.rx_weights) - kPi * 0.01) <= 1e-12);
  CHECK(l.tx_positions == l.rx_positions);
}

TEST_CASE("spiral radial law and golden angle") {
  const std::size_t n = 50;
  const auto l = spiral_layout(n, 0.2, -0.3);
  const double gamma = kPi * (3.0 - std::sqrt(5.0));
  for (std::size_t m = 0; m < n; ++m) {
    const auto p = l.tx_positions[m];
    const double rho = 0.2 * std::sqrt((m + 0.5) / n);
    CHECK(p.x == doctest::Approx(rho * std::cos(m * gamma)).epsilon(1e-14));
    CHECK(p.y == doctest::Approx(rho * std::sin(m * gamma)).epsilon(1e-14).scale(0.2));
    CHECK(p.z == -0.3);
  }
}

TEST_CASE("rect 2x2") {
  const auto l = rect_layout(2, 2, 0.22, 0.22, 0.05);
  REQUIRE(l.tx_count() == 4);
  for (const auto& p : l.tx_positions) {
    CHECK(std::abs(p.x) == doctest::Approx(0.055).epsilon(1e-15));
    CHECK(std::abs(p.y) == doctest::Approx(0.055).epsilon(1e-15));
    CHECK(p.z == 0.05);
  }
  CHECK(l.tx_positions[0].x < 0.0);
  CHECK(l.tx_positions[1].x > 0.0);
}

TEST_CASE("rect 80x80 matches the dense aperture") {
  const auto l = rect_layout(80, 80, 0.22, 0.22, 0.0);
  REQUIRE(l.tx_count() == 6400);
  REQUIRE(l.rx_count() == 6400);
  CHECK(l.tx_positions[1].x - l.tx_positions[0].x == doctest::Approx(0.00275).epsilon(1e-12));
  CHECK(l.tx_positions[80].y - l.tx_positions[0].y == doctest::Approx(0.00275).epsilon(1e-12));
  CHECK(std::abs(weight_sum(l.tx_weights) - 0.22 * 0.22) <= 1e-10 * 0.22 * 0.22);
}

TEST_CASE("rect weights sum to the aperture area") {
  struct Case {
    std::size_t nx, ny;
    double lx, ly;
  };
  for (auto [nx, ny, lx, ly] : {Case{1, 1, 0.3, 0.1}, Case{7, 3, 0.11, 0.05},
                                Case{40, 40, 0.22, 0.22}}) {
    const auto l = rect_layout(nx, ny, lx, ly, 0.1);
    CHECK(std::abs(weight_sum(l.tx_weights) - lx * ly) <= 1e-10 * lx * ly);
    for (double w : l.tx_weights) CHECK(w > 0.0);
  }
}

TEST_CASE("cluster layout") {
  const auto l = cluster_layout(2, 1, 0.08, 0.1, 24, 0.2);
  CHECK(l.tx_count() == 2 * 2 * 24);
  CHECK(l.rx_count() == 2 * 2 * 24);
  CHECK(std::abs(weight_sum(l.tx_weights) - 2 * 0.08 * 0.08) <= 1e-14);
  CHECK(std::abs(weight_sum(l.rx_weights) - 2 * 0.08 * 0.08) <= 1e-14);
  for (const auto& p : l.tx_positions) CHECK(std::abs(std::abs(p.y) - 0.04) < 1e-15);
  for (const auto& p : l.rx_positions)
    CHECK(std::abs(std::abs(std::abs(p.x) - 0.05) - 0.04) < 1e-15);
  CHECK_NOTHROW(l.validate());
  CHECK_THROWS_AS(cluster_layout(1, 1, 0.1, 0.05, 4, 0.0), Error);
}

TEST_CASE("shift layout") {
  const auto base = spiral_layout(30, 0.1, 0.1);
  const auto same = shift_layout(base, {0.0, 0.0, 0.0});
  CHECK(same.tx_positions == base.tx_positions);
  CHECK(same.rx_positions == base.rx_positions);
  CHECK(same.tx_weights == base.tx_weights);

  const auto moved = shift_layout(base, {0.01, 0.0, 0.0});
  for (std::size_t i = 0; i < base.tx_count(); ++i) {
    CHECK(moved.tx_positions[i].x == base.tx_positions[i].x + 0.01);
    CHECK(moved.tx_positions[i].y == base.tx_positions[i].y);
    CHECK(moved.tx_positions[i].z == base.tx_positions[i].z);
  }
  CHECK(moved.tx_weights == base.tx_weights);

  try {
    shift_layout(base, {0.0, 0.0, 0.001});
    FAIL("expected NonPlanarShift");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::NonPlanarShift);
  }
}

TEST_CASE("opposite shifts cancel") {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> d(-0.05, 0.05);
  const auto base = spiral_layout(64, 0.1, 0.1);
  for (int i = 0; i < 20; ++i) {
    const Position3 o{d(rng), d(rng), 0.0};
    const auto back = shift_layout(shift_layout(base, o), {-o.x, -o.y, 0.0});
    for (std::size_t j = 0; j < base.tx_count(); ++j) {
      CHECK(std::abs(back.tx_positions[j].x - base.tx_positions[j].x) <= 1e-15);
      CHECK(std::abs(back.tx_positions[j].y - base.tx_positions[j].y) <= 1e-15);
    }
  }
}

TEST_CASE("two shifted 240-element copies give 480 elements") {
  const auto base = spiral_layout(240, 0.1, 0.1);
  const auto both = concat_layouts(shift_layout(base, {-0.02, 0.0, 0.0}),
                                   shift_layout(base, {0.02, 0.0, 0.0}));
  CHECK(both.tx_count() == 480);
  CHECK(both.rx_count() == 480);
  CHECK_NOTHROW(both.validate());
}

TEST_CASE("layout validation") {
  auto l = spiral_layout(4, 0.1, 0.1);
  l.tx_weights[2] = 0.0;
  CHECK_THROWS_AS(l.validate(), Error);
  l = spiral_layout(4, 0.1, 0.1);
  l.rx_positions[1].z += 1e-9;
  CHECK_THROWS_AS(l.validate(), Error);
  l = spiral_layout(4, 0.1, 0.1);
  l.rx_weights.pop_back();
  CHECK_THROWS_AS(l.validate(), Error);
  CHECK_THROWS_AS(spiral_layout(0, 0.1, 0.1), Error);
  CHECK_THROWS_AS(rect_layout(0, 2, 0.1, 0.1, 0.0), Error);
}

TEST_CASE("layout csv round trip") {
  const auto l = cluster_layout(1, 1, 0.08, 0.08, 5, 0.2);
  std::stringstream ss;
  write_layout_csv(ss, l);
  const std::string text = ss.str();
  CHECK(text.rfind("role,x,y,z,weight\n", 0) == 0);
  const auto back = read_layout_csv(ss);
  CHECK(back.tx_positions == l.tx_positions);
  CHECK(back.rx_positions == l.rx_positions);
  CHECK(back.tx_weights == l.tx_weights);
  CHECK(back.rx_weights == l.rx_weights);

  std::stringstream bad("role,x,y,z,weight\nant,0,0,0,1\n");
  CHECK_THROWS_AS(read_layout_csv(bad), Error);
  std::stringstream bad_num("role,x,y,z,weight\ntx,0,zero,0,1\n");
  CHECK_THROWS_AS(read_layout_csv(bad_num), Error);
}
