#include "nfbp/forward.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <random>
#include <set>
#include <tuple>

#include "binary_io.hpp"
#include "nfbp/error.hpp"
#include "nfbp/focusing.hpp"
#include "nfbp/parallel.hpp"
#include "text_io.hpp"

namespace nfbp {

Scene two_ring_scene(double inner_radius, double outer_radius, double z,
                     std::size_t per_ring) {
  Scene scene;
  const double step = 2.0 * kPi / static_cast<double>(per_ring);
  for (std::size_t i = 0; i < per_ring; ++i) {
    const double a = step * static_cast<double>(i);
    scene.scatterers.push_back(
        {{inner_radius * std::cos(a), inner_radius * std::sin(a), z}, {1.0, 0.0}});
  }
  for (std::size_t i = 0; i < per_ring; ++i) {
    const double a = step * static_cast<double>(i) + 0.5 * step;
    scene.scatterers.push_back(
        {{outer_radius * std::cos(a), outer_radius * std::sin(a), z}, {1.0, 0.0}});
  }
  return scene;
}

namespace {

using PositionKey = std::tuple<double, double, double>;

std::size_t count_distinct(const std::vector<Position3>& positions) {
  std::set<PositionKey> seen;
  for (const auto& p : positions) seen.emplace(p.x, p.y, p.z);
  return seen.size();
}

}  // namespace

std::size_t MeasurementSet::pair_count() const {
  if (pairing == Pairing::FullMatrix) return layout.tx_count() * layout.rx_count();
  return layout.tx_count();
}

std::size_t MeasurementSet::distinct_tx_count() const {
  return count_distinct(layout.tx_positions);
}

std::size_t MeasurementSet::distinct_rx_count() const {
  return count_distinct(layout.rx_positions);
}

void MeasurementSet::validate() const {
  layout.validate();
  if (pairing == Pairing::PairedList && layout.tx_count() != layout.rx_count())
    throw Error(ErrorCode::InvalidArgument,
                "paired list needs equally many tx and rx entries");
  for (std::size_t i = 0; i < frequencies.size(); ++i) {
    if (!(frequencies[i] >= 0.0) || !std::isfinite(frequencies[i]))
      throw Error(ErrorCode::InvalidArgument, "frequencies must be finite and >= 0");
    if (i > 0 && !(frequencies[i] > frequencies[i - 1]))
      throw Error(ErrorCode::InvalidArgument, "frequencies must be strictly increasing");
  }
  if (samples.size() != frequencies.size() * pair_count())
    throw Error(ErrorCode::InvalidArgument,
                "sample count does not match frequencies x pairs");
}

MeasurementSet synthesize(const Scene& scene, const ArrayLayout& layout,
                          const std::vector<double>& frequencies, Pairing pairing,
                          unsigned workers) {
  if (scene.scatterers.empty())
    throw Error(ErrorCode::InvalidArgument, "synthesize: scene has no scatterers");
  layout.validate();
  if (layout.empty())
    throw Error(ErrorCode::InvalidArgument, "synthesize: layout has no elements");

  MeasurementSet ms;
  ms.layout = layout;
  ms.frequencies = frequencies;
  ms.pairing = pairing;
  if (pairing == Pairing::PairedList && layout.tx_count() != layout.rx_count())
    throw Error(ErrorCode::InvalidArgument,
                "paired list needs equally many tx and rx entries");
  ms.samples.assign(frequencies.size() * ms.pair_count(), cplx{});
  ms.validate();

  const double z_m = layout.aperture_z();
  for (const auto& s : scene.scatterers)
    if (!(s.position.z < z_m))
      throw Error(ErrorCode::ScattererOnAperture,
                  "scatterer must lie strictly in front of the aperture plane");

  const std::size_t n_sc = scene.scatterers.size();
  auto distances = [&](const std::vector<Position3>& elements) {
    std::vector<double> d(elements.size() * n_sc);
    for (std::size_t e = 0; e < elements.size(); ++e)
      for (std::size_t i = 0; i < n_sc; ++i)
        d[e * n_sc + i] = distance(elements[e], scene.scatterers[i].position);
    return d;
  };
  const auto d_tx = distances(layout.tx_positions);
  const auto d_rx = distances(layout.rx_positions);

  const double closest = std::min(*std::min_element(d_tx.begin(), d_tx.end()),
                                  *std::min_element(d_rx.begin(), d_rx.end()));
  for (double f : frequencies)
    if (closest < min_distance(WaveNumber::from_frequency(f)))
      throw Error(ErrorCode::ScattererOnAperture,
                  "scatterer within the singularity guard of an antenna element");

  // One-way propagators exp(-jkd)/d per (frequency, element, scatterer); each
  // sample is then sum_i a_i * (g_R * g_T).
  const std::size_t n_tx = layout.tx_count();
  const std::size_t n_rx = layout.rx_count();
  for (std::size_t f = 0; f < frequencies.size(); ++f) {
    const double k = WaveNumber::from_frequency(frequencies[f]).value;
    auto propagators = [&](const std::vector<double>& d) {
      std::vector<cplx> g(d.size());
      for (std::size_t i = 0; i < d.size(); ++i)
        g[i] = cplx(std::cos(k * d[i]), -std::sin(k * d[i])) / d[i];
      return g;
    };
    const auto g_tx = propagators(d_tx);
    const auto g_rx = propagators(d_rx);

    auto sample = [&](std::size_t rx, std::size_t tx) {
      cplx acc = 0.0;
      for (std::size_t i = 0; i < n_sc; ++i)
        acc += scene.scatterers[i].reflectivity * (g_rx[rx * n_sc + i] * g_tx[tx * n_sc + i]);
      return acc;
    };

    cplx* out = ms.samples.data() + f * ms.pair_count();
    if (pairing == Pairing::FullMatrix) {
      parallel_for(n_rx, workers, [&](std::size_t begin, std::size_t end) {
        for (std::size_t r = begin; r < end; ++r)
          for (std::size_t t = 0; t < n_tx; ++t) out[r * n_tx + t] = sample(r, t);
      });
    } else {
      parallel_for(n_tx, workers, [&](std::size_t begin, std::size_t end) {
        for (std::size_t p = begin; p < end; ++p) out[p] = sample(p, p);
      });
    }
  }
  return ms;
}

MeasurementSet add_noise(const MeasurementSet& ms, double snr_db, std::uint64_t seed) {
  if (!std::isfinite(snr_db))
    throw Error(ErrorCode::InvalidArgument, "add_noise: snr_db must be finite");
  MeasurementSet noisy = ms;
  if (ms.samples.empty()) return noisy;

  double power = 0.0;
  for (const auto& s : ms.samples) power += std::norm(s);
  power /= static_cast<double>(ms.samples.size());
  const double noise_power = power / std::pow(10.0, snr_db / 10.0);
  const double sigma = std::sqrt(0.5 * noise_power);

  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  for (auto& s : noisy.samples) {
    const double re = normal(rng);
    const double im = normal(rng);
    s += cplx(sigma * re, sigma * im);
  }
  return noisy;
}

MeasurementSet to_paired_list(const MeasurementSet& ms) {
  if (ms.pairing == Pairing::PairedList) return ms;
  MeasurementSet out;
  out.pairing = Pairing::PairedList;
  out.frequencies = ms.frequencies;
  const std::size_t n_tx = ms.layout.tx_count();
  const std::size_t n_rx = ms.layout.rx_count();
  for (std::size_t r = 0; r < n_rx; ++r) {
    for (std::size_t t = 0; t < n_tx; ++t) {
      out.layout.tx_positions.push_back(ms.layout.tx_positions[t]);
      out.layout.tx_weights.push_back(ms.layout.tx_weights[t]);
      out.layout.rx_positions.push_back(ms.layout.rx_positions[r]);
      out.layout.rx_weights.push_back(ms.layout.rx_weights[r]);
    }
  }
  // [freq][rx][tx] flattens to [freq][pair] with pair = rx * n_tx + tx.
  out.samples = ms.samples;
  return out;
}

MeasurementSet merge(const MeasurementSet& a, const MeasurementSet& b) {
  if (b.empty()) return a;
  if (a.empty()) return b;
  if (a.frequencies != b.frequencies)
    throw Error(ErrorCode::FrequencyMismatch, "merge: frequency lists differ");
  if (a.pairing != b.pairing)
    throw Error(ErrorCode::PairingMismatch, "merge: pairing modes differ");

  const MeasurementSet pa = to_paired_list(a);
  const MeasurementSet pb = to_paired_list(b);
  MeasurementSet out;
  out.pairing = Pairing::PairedList;
  out.frequencies = a.frequencies;
  out.layout = concat_layouts(pa.layout, pb.layout);

  const std::size_t na = pa.pair_count();
  const std::size_t nb = pb.pair_count();
  out.samples.reserve(out.frequencies.size() * (na + nb));
  for (std::size_t f = 0; f < out.frequencies.size(); ++f) {
    out.samples.insert(out.samples.end(), pa.samples.begin() + f * na,
                       pa.samples.begin() + (f + 1) * na);
    out.samples.insert(out.samples.end(), pb.samples.begin() + f * nb,
                       pb.samples.begin() + (f + 1) * nb);
  }
  return out;
}

// ---------------------------------------------------------------------------
// CSV

void write_measurements_csv(std::ostream& out, const MeasurementSet& ms) {
  out << "f_hz,tx_x,tx_y,tx_z,rx_x,rx_y,rx_z,re,im\n";
  auto row = [&](double f, Position3 tx, Position3 rx, cplx v) {
    using detail::fmt17;
    out << fmt17(f) << ',' << fmt17(tx.x) << ',' << fmt17(tx.y) << ','
        << fmt17(tx.z) << ',' << fmt17(rx.x) << ',' << fmt17(rx.y) << ','
        << fmt17(rx.z) << ',' << fmt17(v.real()) << ',' << fmt17(v.imag()) << '\n';
  };
  const auto& L = ms.layout;
  for (std::size_t f = 0; f < ms.frequencies.size(); ++f) {
    if (ms.pairing == Pairing::FullMatrix) {
      for (std::size_t r = 0; r < L.rx_count(); ++r)
        for (std::size_t t = 0; t < L.tx_count(); ++t)
          row(ms.frequencies[f], L.tx_positions[t], L.rx_positions[r],
              ms.samples[ms.index(f, r, t)]);
    } else {
      for (std::size_t p = 0; p < ms.pair_count(); ++p)
        row(ms.frequencies[f], L.tx_positions[p], L.rx_positions[p],
            ms.samples[ms.index(f, p)]);
    }
  }
}

void write_measurements_csv(const std::string& path, const MeasurementSet& ms) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorCode::IoError, "cannot open " + path + " for writing");
  write_measurements_csv(out, ms);
}

MeasurementSet read_measurements_csv(std::istream& in) {
  struct Row {
    double f;
    Position3 tx, rx;
    cplx v;
  };
  std::vector<Row> rows;
  std::string line;
  std::size_t line_no = 1;
  if (!std::getline(in, line) ||
      detail::trim(line) != "f_hz,tx_x,tx_y,tx_z,rx_x,rx_y,rx_z,re,im")
    throw Error(ErrorCode::ParseError,
                "measurement csv: expected header f_hz,tx_x,tx_y,tx_z,rx_x,rx_y,rx_z,re,im");
  while (std::getline(in, line)) {
    ++line_no;
    if (detail::trim(line).empty()) continue;
    const auto c = detail::split_csv(line);
    if (c.size() != 9)
      throw Error(ErrorCode::ParseError,
                  "measurement csv line " + std::to_string(line_no) + ": expected 9 fields");
    auto num = [&](std::size_t i) { return detail::parse_double(c[i], line_no); };
    rows.push_back({num(0), {num(1), num(2), num(3)}, {num(4), num(5), num(6)},
                    {num(7), num(8)}});
  }

  MeasurementSet ms;
  ms.pairing = Pairing::PairedList;
  if (rows.empty()) return ms;

  // Rows are grouped by frequency; every group repeats the first group's pairs.
  std::size_t pairs = 0;
  while (pairs < rows.size() && rows[pairs].f == rows.front().f) ++pairs;
  if (rows.size() % pairs != 0)
    throw Error(ErrorCode::ParseError,
                "measurement csv: frequency groups have different sizes");
  const std::size_t n_freq = rows.size() / pairs;
  for (std::size_t f = 0; f < n_freq; ++f) {
    ms.frequencies.push_back(rows[f * pairs].f);
    for (std::size_t p = 0; p < pairs; ++p) {
      const Row& r = rows[f * pairs + p];
      if (r.f != ms.frequencies.back() || r.tx != rows[p].tx || r.rx != rows[p].rx)
        throw Error(ErrorCode::ParseError,
                    "measurement csv: frequency groups must list the same pairs in the same order");
    }
  }

  // Distinct elements in order of first appearance.
  std::vector<Position3> tx, rx;
  for (std::size_t p = 0; p < pairs; ++p) {
    if (std::find(tx.begin(), tx.end(), rows[p].tx) == tx.end()) tx.push_back(rows[p].tx);
    if (std::find(rx.begin(), rx.end(), rows[p].rx) == rx.end()) rx.push_back(rows[p].rx);
  }
  bool full = tx.size() * rx.size() == pairs;
  for (std::size_t p = 0; full && p < pairs; ++p)
    full = rows[p].tx == tx[p % tx.size()] && rows[p].rx == rx[p / tx.size()];

  if (full) {
    ms.pairing = Pairing::FullMatrix;
    ms.layout.tx_positions = tx;
    ms.layout.rx_positions = rx;
  } else {
    for (std::size_t p = 0; p < pairs; ++p) {
      ms.layout.tx_positions.push_back(rows[p].tx);
      ms.layout.rx_positions.push_back(rows[p].rx);
    }
  }
  ms.layout.tx_weights.assign(ms.layout.tx_positions.size(), 1.0);
  ms.layout.rx_weights.assign(ms.layout.rx_positions.size(), 1.0);
  ms.samples.reserve(rows.size());
  for (const auto& r : rows) ms.samples.push_back(r.v);
  ms.validate();
  return ms;
}

MeasurementSet read_measurements_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::IoError, "cannot open " + path);
  return read_measurements_csv(in);
}

// ---------------------------------------------------------------------------
// Binary

namespace {
constexpr std::uint16_t kMeasurementVersion = 1;
}

void write_measurements_bin(std::ostream& out, const MeasurementSet& ms) {
  using detail::put_le;
  out.write("NFBP", 4);
  put_le<std::uint16_t>(out, kMeasurementVersion);
  put_le<std::uint8_t>(out, ms.pairing == Pairing::FullMatrix ? 0 : 1);
  put_le<std::uint8_t>(out, 0);
  put_le<std::uint64_t>(out, ms.frequencies.size());
  put_le<std::uint64_t>(out, ms.layout.tx_count());
  put_le<std::uint64_t>(out, ms.layout.rx_count());
  for (double f : ms.frequencies) put_le(out, f);
  auto table = [&](const std::vector<Position3>& pos, const std::vector<double>& w) {
    for (std::size_t i = 0; i < pos.size(); ++i) {
      put_le(out, pos[i].x);
      put_le(out, pos[i].y);
      put_le(out, pos[i].z);
      put_le(out, w[i]);
    }
  };
  table(ms.layout.tx_positions, ms.layout.tx_weights);
  table(ms.layout.rx_positions, ms.layout.rx_weights);
  for (const auto& s : ms.samples) {
    put_le(out, s.real());
    put_le(out, s.imag());
  }
}

void write_measurements_bin(const std::string& path, const MeasurementSet& ms) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::IoError, "cannot open " + path + " for writing");
  write_measurements_bin(out, ms);
}

MeasurementSet read_measurements_bin(std::istream& in) {
  using detail::get_le;
  detail::expect_magic(in, "NFBP");
  const auto version = get_le<std::uint16_t>(in);
  if (version != kMeasurementVersion)
    throw Error(ErrorCode::ParseError,
                "unsupported NFBP version " + std::to_string(version));
  const auto pairing = get_le<std::uint8_t>(in);
  (void)get_le<std::uint8_t>(in);
  if (pairing > 1) throw Error(ErrorCode::ParseError, "bad NFBP pairing flag");

  MeasurementSet ms;
  ms.pairing = pairing == 0 ? Pairing::FullMatrix : Pairing::PairedList;
  const auto n_freq = get_le<std::uint64_t>(in);
  const auto n_tx = get_le<std::uint64_t>(in);
  const auto n_rx = get_le<std::uint64_t>(in);
  constexpr std::uint64_t kLimit = std::uint64_t{1} << 32;
  if (n_freq > kLimit || n_tx > kLimit || n_rx > kLimit)
    throw Error(ErrorCode::ParseError, "NFBP header counts out of range");
  for (std::uint64_t i = 0; i < n_freq; ++i) ms.frequencies.push_back(get_le<double>(in));
  auto table = [&](std::uint64_t n, std::vector<Position3>& pos, std::vector<double>& w) {
    for (std::uint64_t i = 0; i < n; ++i) {
      Position3 p;
      p.x = get_le<double>(in);
      p.y = get_le<double>(in);
      p.z = get_le<double>(in);
      pos.push_back(p);
      w.push_back(get_le<double>(in));
    }
  };
  table(n_tx, ms.layout.tx_positions, ms.layout.tx_weights);
  table(n_rx, ms.layout.rx_positions, ms.layout.rx_weights);
  const std::size_t n_samples = ms.frequencies.size() * ms.pair_count();
  ms.samples.reserve(n_samples);
  for (std::size_t i = 0; i < n_samples; ++i) {
    const double re = get_le<double>(in);
    const double im = get_le<double>(in);
    ms.samples.emplace_back(re, im);
  }
  ms.validate();
  return ms;
}

MeasurementSet read_measurements_bin(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::IoError, "cannot open " + path);
  return read_measurements_bin(in);
}

MeasurementSet read_measurements(const std::string& path) {
  if (path.size() >= 4 && path.compare(path.size() - 4, 4, ".csv") == 0)
    return read_measurements_csv(path);
  return read_measurements_bin(path);
}

}  // namespace nfbp
