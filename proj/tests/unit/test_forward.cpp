#include <doctest.h>

#include <cmath>
#include <random>
#include <sstream>

#include "nfbp/error.hpp"
#include "nfbp/forward.hpp"

using namespace nfbp;

namespace {

const cplx J(0.0, 1.0);

ArrayLayout single_element(Position3 p) {
  ArrayLayout l;
  l.tx_positions = {p};
  l.rx_positions = {p};
  l.tx_weights = {1.0};
  l.rx_weights = {1.0};
  return l;
}

Scene random_scene(std::mt19937_64& rng, std::size_t n) {
  std::uniform_real_distribution<double> u(-0.05, 0.05);
  Scene s;
  for (std::size_t i = 0; i < n; ++i)
    s.scatterers.push_back({{u(rng), u(rng), u(rng)}, {u(rng) * 20.0, u(rng) * 20.0}});
  return s;
}

ErrorCode code_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("no exception");
  return ErrorCode::InvalidArgument;
}

}  // namespace

TEST_CASE("monostatic broadside sample") {
  for (double d : {0.05, 0.1, 0.37}) {
    const double f = 40e9;
    const double k = WaveNumber::from_frequency(f).value;
    const Scene scene{{{{0.0, 0.0, 0.0}, {1.0, 0.0}}}};
    const auto ms = synthesize(scene, single_element({0.0, 0.0, d}), {f});
    REQUIRE(ms.samples.size() == 1);
    const cplx expected = std::exp(-2.0 * J * k * d) / (d * d);
    CHECK(std::abs(ms.samples[0] - expected) <= 1e-14 * std::abs(expected));
    CHECK(std::abs(ms.samples[0]) == doctest::Approx(1.0 / (d * d)).epsilon(1e-15));
  }
}

TEST_CASE("opposite scatterers at equal path lengths cancel") {
  // Tx and Rx symmetric about x = 0, scatterers mirrored across the same line.
  ArrayLayout l;
  l.tx_positions = {{-0.02, 0.0, 0.1}};
  l.rx_positions = {{0.02, 0.0, 0.1}};
  l.tx_weights = {1.0};
  l.rx_weights = {1.0};
  const Scene scene{{{{0.0, 0.03, 0.0}, {1.0, 0.0}}, {{0.0, -0.03, 0.0}, {-1.0, 0.0}}}};
  const auto ms = synthesize(scene, l, {35e9, 40e9});
  for (const auto& s : ms.samples) CHECK(std::abs(s) < 1e-12);
}

TEST_CASE("two-ring scene") {
  const Scene s = two_ring_scene(0.0225, 0.0525, 0.0);
  REQUIRE(s.scatterers.size() == 14);
  for (std::size_t i = 0; i < 14; ++i) {
    const auto p = s.scatterers[i].position;
    const double radius = i < 7 ? 0.0225 : 0.0525;
    const double angle = 2.0 * kPi * static_cast<double>(i % 7) / 7.0 + (i < 7 ? 0.0 : kPi / 7.0);
    CHECK(p.x == doctest::Approx(radius * std::cos(angle)).epsilon(1e-14));
    CHECK(p.y == doctest::Approx(radius * std::sin(angle)).epsilon(1e-14).scale(radius));
    CHECK(p.z == 0.0);
    CHECK(s.scatterers[i].reflectivity == cplx(1.0, 0.0));
  }
}

TEST_CASE("fig1 inputs synthesize") {
  const auto ms = synthesize(two_ring_scene(0.0225, 0.0525, 0.0), spiral_layout(400, 0.1, 0.1),
                             {40e9});
  CHECK(ms.pairing == Pairing::FullMatrix);
  CHECK(ms.pair_count() == 160000);
  CHECK(ms.samples.size() == 160000);
  CHECK_NOTHROW(ms.validate());
  for (const auto& s : ms.samples) CHECK(std::isfinite(std::abs(s)));
}

TEST_CASE("linearity in the scene") {
  std::mt19937_64 rng(1);
  const Scene a = random_scene(rng, 5), b = random_scene(rng, 4);
  Scene both = a;
  both.scatterers.insert(both.scatterers.end(), b.scatterers.begin(), b.scatterers.end());
  const auto layout = spiral_layout(20, 0.08, 0.12);
  const std::vector<double> freqs{70e9, 75e9, 80e9};
  const auto ma = synthesize(a, layout, freqs), mb = synthesize(b, layout, freqs),
             mab = synthesize(both, layout, freqs);
  for (std::size_t i = 0; i < mab.samples.size(); ++i) {
    const cplx sum = ma.samples[i] + mb.samples[i];
    CHECK(std::abs(mab.samples[i] - sum) <= 1e-13 * std::max(std::abs(sum), std::abs(mab.samples[i])) + 1e-300);
  }
}

TEST_CASE("reciprocity") {
  std::mt19937_64 rng(2);
  const Scene scene = random_scene(rng, 6);
  const auto l = rect_layout(4, 3, 0.1, 0.08, 0.1);
  const auto ms = synthesize(scene, l, {40e9});
  for (std::size_t r = 0; r < l.rx_count(); ++r)
    for (std::size_t t = 0; t < l.tx_count(); ++t)
      CHECK(ms.samples[ms.index(0, r, t)] == ms.samples[ms.index(0, t, r)]);
}

TEST_CASE("phase slope versus frequency") {
  ArrayLayout l;
  l.tx_positions = {{0.01, -0.02, 0.15}};
  l.rx_positions = {{-0.03, 0.01, 0.15}};
  l.tx_weights = {1.0};
  l.rx_weights = {1.0};
  const Position3 p{0.005, 0.007, 0.0};
  const double path = distance(l.tx_positions[0], p) + distance(l.rx_positions[0], p);
  std::vector<double> freqs;
  for (int i = 0; i < 64; ++i) freqs.push_back(71e9 + i * 10e9 / 63.0);
  const auto ms = synthesize(Scene{{{p, {1.0, 0.0}}}}, l, freqs);
  const double expected = -2.0 * kPi * path / kSpeedOfLight;
  for (std::size_t i = 1; i < freqs.size(); ++i) {
    const double df = freqs[i] - freqs[i - 1];
    // Step small enough that the phase increment stays inside (-pi, pi].
    const double slope = std::arg(ms.samples[i] / ms.samples[i - 1]) / df;
    CHECK(std::abs(slope - expected) <= 1e-9 * std::abs(expected));
  }
}

TEST_CASE("scatterers must be in front of the aperture") {
  const auto l = spiral_layout(8, 0.05, 0.1);
  CHECK(code_of([&] { synthesize(Scene{{{{0.0, 0.0, 0.1}, {1.0, 0.0}}}}, l, {40e9}); }) ==
        ErrorCode::ScattererOnAperture);
  CHECK(code_of([&] { synthesize(Scene{{{{0.0, 0.0, 0.2}, {1.0, 0.0}}}}, l, {40e9}); }) ==
        ErrorCode::ScattererOnAperture);
  CHECK(code_of([&] { synthesize(Scene{}, l, {40e9}); }) == ErrorCode::InvalidArgument);
  // Within lambda/100 of an element.
  const auto p = l.tx_positions[0];
  CHECK(code_of([&] {
          synthesize(Scene{{{{p.x, p.y, p.z - 1e-6}, {1.0, 0.0}}}}, l, {40e9});
        }) == ErrorCode::ScattererOnAperture);
  CHECK(code_of([&] {
          synthesize(Scene{{{{0.0, 0.0, 0.0}, {1.0, 0.0}}}}, l, {40e9, 39e9});
        }) == ErrorCode::InvalidArgument);
}

TEST_CASE("paired list matches full matrix entries") {
  std::mt19937_64 rng(3);
  const Scene scene = random_scene(rng, 3);
  const auto l = spiral_layout(10, 0.06, 0.1);
  const auto full = synthesize(scene, l, {60e9, 61e9});
  const auto paired = synthesize(scene, l, {60e9, 61e9}, Pairing::PairedList);
  REQUIRE(paired.pair_count() == 10);
  for (std::size_t f = 0; f < 2; ++f)
    for (std::size_t i = 0; i < 10; ++i)
      CHECK(paired.samples[paired.index(f, i)] == full.samples[full.index(f, i, i)]);
  const auto expanded = to_paired_list(full);
  CHECK(expanded.pair_count() == 100);
  for (std::size_t f = 0; f < 2; ++f)
    for (std::size_t r = 0; r < 10; ++r)
      for (std::size_t t = 0; t < 10; ++t) {
        const std::size_t p = r * 10 + t;
        CHECK(expanded.samples[expanded.index(f, p)] == full.samples[full.index(f, r, t)]);
        CHECK(expanded.layout.tx_positions[p] == l.tx_positions[t]);
        CHECK(expanded.layout.rx_positions[p] == l.rx_positions[r]);
      }
}

TEST_CASE("synthesis is independent of the worker count") {
  std::mt19937_64 rng(4);
  const Scene scene = random_scene(rng, 7);
  const auto l = spiral_layout(30, 0.08, 0.1);
  const std::vector<double> freqs{71e9, 72e9, 73e9};
  const auto a = synthesize(scene, l, freqs, Pairing::FullMatrix, 1);
  const auto b = synthesize(scene, l, freqs, Pairing::FullMatrix, 3);
  const auto c = synthesize(scene, l, freqs, Pairing::FullMatrix, 8);
  CHECK(a.samples == b.samples);
  CHECK(a.samples == c.samples);
}

TEST_CASE("noise") {
  std::mt19937_64 rng(5);
  const auto ms = synthesize(random_scene(rng, 4), spiral_layout(110, 0.1, 0.1), {40e9});
  REQUIRE(ms.samples.size() >= 10000);

  const auto quiet = add_noise(ms, 300.0, 1);
  for (std::size_t i = 0; i < ms.samples.size(); ++i)
    CHECK(std::abs(quiet.samples[i] - ms.samples[i]) <= 1e-12 * std::abs(ms.samples[i]));

  CHECK(add_noise(ms, 10.0, 42).samples == add_noise(ms, 10.0, 42).samples);
  CHECK(add_noise(ms, 10.0, 42).samples != add_noise(ms, 10.0, 43).samples);

  const auto noisy = add_noise(ms, 20.0, 7);
  double signal = 0.0, noise = 0.0;
  for (std::size_t i = 0; i < ms.samples.size(); ++i) {
    signal += std::norm(ms.samples[i]);
    noise += std::norm(noisy.samples[i] - ms.samples[i]);
  }
  CHECK(std::abs(10.0 * std::log10(signal / noise) - 20.0) <= 0.5);
  CHECK_THROWS_AS(add_noise(ms, std::numeric_limits<double>::infinity(), 1), Error);
}

TEST_CASE("merge") {
  std::mt19937_64 rng(6);
  const Scene scene = random_scene(rng, 3);
  const auto base = spiral_layout(240, 0.1, 0.2);
  const std::vector<double> freqs{77e9};
  const auto a = synthesize(scene, shift_layout(base, {-0.02, 0.0, 0.0}), freqs);
  const auto b = synthesize(scene, shift_layout(base, {0.02, 0.0, 0.0}), freqs);

  const auto same = merge(a, MeasurementSet{});
  CHECK(same.samples == a.samples);
  CHECK(same.pairing == a.pairing);
  CHECK(merge(MeasurementSet{}, a).samples == a.samples);

  const auto m = merge(a, b);
  CHECK(m.pairing == Pairing::PairedList);
  CHECK(m.distinct_tx_count() == 480);
  CHECK(m.distinct_rx_count() == 480);
  CHECK(m.pair_count() == 2 * 240 * 240);
  CHECK_NOTHROW(m.validate());
  const auto pa = to_paired_list(a), pb = to_paired_list(b);
  for (std::size_t i = 0; i < pa.pair_count(); ++i) {
    CHECK(m.samples[i] == pa.samples[i]);
    CHECK(m.samples[pa.pair_count() + i] == pb.samples[i]);
  }

  const auto other_freq = synthesize(scene, base, {78e9});
  CHECK(code_of([&] { merge(a, other_freq); }) == ErrorCode::FrequencyMismatch);
  CHECK(code_of([&] { merge(a, to_paired_list(b)); }) == ErrorCode::PairingMismatch);
}

TEST_CASE("csv round trip") {
  std::mt19937_64 rng(7);
  const auto ms = synthesize(random_scene(rng, 2), rect_layout(3, 2, 0.05, 0.04, 0.1),
                             {40e9, 41e9});
  std::stringstream ss;
  write_measurements_csv(ss, ms);
  CHECK(ss.str().rfind("f_hz,tx_x,tx_y,tx_z,rx_x,rx_y,rx_z,re,im\n", 0) == 0);
  const auto back = read_measurements_csv(ss);
  CHECK(back.pairing == Pairing::FullMatrix);
  CHECK(back.frequencies == ms.frequencies);
  CHECK(back.samples == ms.samples);
  CHECK(back.layout.tx_positions == ms.layout.tx_positions);
  CHECK(back.layout.rx_positions == ms.layout.rx_positions);
  for (double w : back.layout.tx_weights) CHECK(w == 1.0);

  const auto merged = merge(ms, synthesize(random_scene(rng, 2),
                                           rect_layout(2, 2, 0.05, 0.04, 0.1), {40e9, 41e9}));
  std::stringstream ss2;
  write_measurements_csv(ss2, merged);
  const auto back2 = read_measurements_csv(ss2);
  CHECK(back2.pairing == Pairing::PairedList);
  CHECK(back2.samples == merged.samples);

  std::stringstream bad("f_hz,tx_x,tx_y,tx_z,rx_x,rx_y,rx_z,re,im\n1,2,3\n");
  CHECK_THROWS_AS(read_measurements_csv(bad), Error);
}

TEST_CASE("binary round trip") {
  std::mt19937_64 rng(8);
  const auto base = cluster_layout(1, 1, 0.08, 0.08, 6, 0.2);
  const std::vector<double> freqs{71e9, 76e9, 81e9};
  const Scene scene = random_scene(rng, 3);
  for (const auto& ms :
       {synthesize(scene, base, freqs),
        merge(synthesize(scene, shift_layout(base, {-0.01, 0.0, 0.0}), freqs),
              synthesize(scene, shift_layout(base, {0.01, 0.0, 0.0}), freqs))}) {
    std::stringstream ss;
    write_measurements_bin(ss, ms);
    const std::string bytes = ss.str();
    CHECK(bytes.substr(0, 4) == "NFBP");
    const auto back = read_measurements_bin(ss);
    CHECK(back.pairing == ms.pairing);
    CHECK(back.frequencies == ms.frequencies);
    CHECK(back.samples == ms.samples);
    CHECK(back.layout.tx_positions == ms.layout.tx_positions);
    CHECK(back.layout.rx_positions == ms.layout.rx_positions);
    CHECK(back.layout.tx_weights == ms.layout.tx_weights);
    CHECK(back.layout.rx_weights == ms.layout.rx_weights);
  }
  std::stringstream junk("NFBX0000");
  CHECK_THROWS_AS(read_measurements_bin(junk), Error);
  std::stringstream truncated(std::string("NFBP\x01\x00", 6));
  CHECK_THROWS_AS(read_measurements_bin(truncated), Error);
}
