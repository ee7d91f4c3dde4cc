#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "nfbp/geometry.hpp"

namespace nfbp {

struct PointScatterer {
  Position3 position;
  cplx reflectivity{1.0, 0.0};
};

struct Scene {
  std::vector<PointScatterer> scatterers;
};

// Seven scatterers on each of two concentric circles in the plane z; the
// outer circle is rotated by pi/7 against the inner one.
Scene two_ring_scene(double inner_radius, double outer_radius, double z,
                     std::size_t per_ring = 7);

enum class Pairing {
  FullMatrix,  // every rx with every tx, samples [freq][rx][tx]
  PairedList,  // tx_positions[i] with rx_positions[i], samples [freq][pair]
};

// Complex scattering samples T(r_R, r_T, f).
struct MeasurementSet {
  ArrayLayout layout;
  std::vector<double> frequencies;  // Hz, strictly increasing
  std::vector<cplx> samples;
  Pairing pairing = Pairing::FullMatrix;

  std::size_t frequency_count() const { return frequencies.size(); }
  // Number of Tx/Rx combinations per frequency.
  std::size_t pair_count() const;
  bool empty() const { return pair_count() == 0; }

  std::size_t index(std::size_t f, std::size_t rx, std::size_t tx) const {
    return (f * layout.rx_count() + rx) * layout.tx_count() + tx;
  }
  std::size_t index(std::size_t f, std::size_t pair) const {
    return f * pair_count() + pair;
  }

  // Distinct element positions (SAR captures share positions across pairs).
  std::size_t distinct_tx_count() const;
  std::size_t distinct_rx_count() const;

  // Throws InvalidArgument on inconsistent dimensions or frequencies.
  void validate() const;
};

// First-order Born synthesis for isotropic point scatterers:
//   T = sum_i a_i exp(-jk(|r_T - r_i| + |r_R - r_i|)) / (|r_T - r_i| |r_R - r_i|)
// Throws ScattererOnAperture when a scatterer is not strictly in front of the
// aperture or lies within the singularity guard of an element.
MeasurementSet synthesize(const Scene& scene, const ArrayLayout& layout,
                          const std::vector<double>& frequencies,
                          Pairing pairing = Pairing::FullMatrix,
                          unsigned workers = 0);

// Circularly-symmetric complex Gaussian noise at the given SNR (dB) relative
// to the mean sample power. Deterministic for a fixed seed.
MeasurementSet add_noise(const MeasurementSet& ms, double snr_db, std::uint64_t seed);

// Concatenates two captures with identical frequency lists. FullMatrix inputs
// are expanded to PairedList blocks so no cross-capture pairs appear.
// Throws FrequencyMismatch or PairingMismatch.
MeasurementSet merge(const MeasurementSet& a, const MeasurementSet& b);

// Expands a FullMatrix set into the equivalent PairedList (storage order kept).
MeasurementSet to_paired_list(const MeasurementSet& ms);

// CSV: header f_hz,tx_x,tx_y,tx_z,rx_x,rx_y,rx_z,re,im; one row per sample.
// CSV carries no weights: reading assigns unit weights and recovers
// FullMatrix pairing when the rows form a complete rx-major grid.
void write_measurements_csv(std::ostream& out, const MeasurementSet& ms);
void write_measurements_csv(const std::string& path, const MeasurementSet& ms);
MeasurementSet read_measurements_csv(std::istream& in);
MeasurementSet read_measurements_csv(const std::string& path);

// Binary "NFBP" container, little-endian:
//   magic[4] "NFBP", u16 version (1), u8 pairing (0 full, 1 paired), u8 pad,
//   u64 n_freq, u64 n_tx, u64 n_rx,
//   f64 frequencies[n_freq],
//   tx table n_tx x (x, y, z, weight), rx table n_rx x (x, y, z, weight),
//   samples as interleaved (re, im) f64 in storage order.
void write_measurements_bin(std::ostream& out, const MeasurementSet& ms);
void write_measurements_bin(const std::string& path, const MeasurementSet& ms);
MeasurementSet read_measurements_bin(std::istream& in);
MeasurementSet read_measurements_bin(const std::string& path);

// Picks the reader from the file extension (.csv or anything else = binary).
MeasurementSet read_measurements(const std::string& path);

}  // namespace nfbp
