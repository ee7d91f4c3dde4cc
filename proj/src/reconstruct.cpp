#include "nfbp/reconstruct.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <tuple>

#include "binary_io.hpp"
#include "nfbp/error.hpp"
#include "nfbp/parallel.hpp"

namespace nfbp {

ImageGrid ImageGrid::centered(Position3 center, std::array<double, 3> spacing,
                              std::array<std::size_t, 3> dims) {
  ImageGrid grid;
  grid.spacing = spacing;
  grid.dims = dims;
  grid.origin = {center.x - 0.5 * static_cast<double>(dims[0] - 1) * spacing[0],
                 center.y - 0.5 * static_cast<double>(dims[1] - 1) * spacing[1],
                 center.z - 0.5 * static_cast<double>(dims[2] - 1) * spacing[2]};
  return grid;
}

void ImageGrid::validate() const {
  for (int a = 0; a < 3; ++a) {
    if (!(spacing[a] > 0.0) || !std::isfinite(spacing[a]))
      throw Error(ErrorCode::InvalidArgument, "image grid spacing must be positive");
    if (dims[a] == 0)
      throw Error(ErrorCode::InvalidArgument, "image grid dims must be >= 1");
  }
  if (!std::isfinite(origin.x) || !std::isfinite(origin.y) || !std::isfinite(origin.z))
    throw Error(ErrorCode::InvalidArgument, "image grid origin must be finite");
}

double ImageVolume::max_magnitude() const {
  double m = 0.0;
  for (const auto& v : voxels) m = std::max(m, std::abs(v));
  return m;
}

namespace {

// Element tables and per-frequency weighted data in the layout the voxel loop
// consumes. FullMatrix keeps the rx x tx matrix so each voxel needs
// n_tx + n_rx operator evaluations; PairedList deduplicates positions and keeps
// an index pair per sample.
struct Engine {
  Pairing pairing = Pairing::FullMatrix;
  std::vector<Position3> tx;
  std::vector<Position3> rx;
  bool shared_elements = false;  // rx table identical to tx table
  std::vector<std::size_t> pair_tx, pair_rx;

  // Weighted samples per frequency, split into real and imaginary parts.
  std::vector<std::vector<double>> data_re, data_im;
  std::vector<double> k;
  std::vector<double> r_min;
};

std::vector<std::size_t> dedupe(const std::vector<Position3>& positions,
                                std::vector<Position3>& table) {
  std::map<std::tuple<double, double, double>, std::size_t> lookup;
  std::vector<std::size_t> index;
  index.reserve(positions.size());
  for (const auto& p : positions) {
    const auto [it, inserted] = lookup.try_emplace({p.x, p.y, p.z}, table.size());
    if (inserted) table.push_back(p);
    index.push_back(it->second);
  }
  return index;
}

Engine prepare(const MeasurementSet& ms, const std::vector<std::size_t>& freq_indices) {
  ms.validate();
  Engine e;
  e.pairing = ms.pairing;
  const auto& L = ms.layout;
  if (ms.pairing == Pairing::FullMatrix) {
    e.tx = L.tx_positions;
    e.rx = L.rx_positions;
  } else {
    e.pair_tx = dedupe(L.tx_positions, e.tx);
    e.pair_rx = dedupe(L.rx_positions, e.rx);
  }
  e.shared_elements = e.tx == e.rx;

  const std::size_t pairs = ms.pair_count();
  for (std::size_t f : freq_indices) {
    const WaveNumber wk = WaveNumber::from_frequency(ms.frequencies[f]);
    e.k.push_back(wk.value);
    e.r_min.push_back(min_distance(wk));
    std::vector<double> re(pairs), im(pairs);
    for (std::size_t p = 0; p < pairs; ++p) {
      double w = 0.0;
      if (ms.pairing == Pairing::FullMatrix) {
        const std::size_t n_tx = L.tx_count();
        w = L.rx_weights[p / n_tx] * L.tx_weights[p % n_tx];
      } else {
        w = L.rx_weights[p] * L.tx_weights[p];
      }
      const cplx v = w * ms.samples[f * pairs + p];
      re[p] = v.real();
      im[p] = v.imag();
    }
    e.data_re.push_back(std::move(re));
    e.data_im.push_back(std::move(im));
  }
  return e;
}

void fill_operator(FocusingOperatorKind kind, Position3 voxel,
                   const std::vector<Position3>& elements, double k, double r_min,
                   std::vector<double>& g_re, std::vector<double>& g_im) {
  for (std::size_t i = 0; i < elements.size(); ++i) {
    const double dx = voxel.x - elements[i].x;
    const double dy = voxel.y - elements[i].y;
    const double dz = voxel.z - elements[i].z;
    const double rt2 = dx * dx + dy * dy;
    const double rn = std::sqrt(rt2 + dz * dz);
    if (rn < r_min) {
      g_re[i] = 0.0;
      g_im[i] = 0.0;
      continue;
    }
    const cplx g = detail::focusing_kernel(kind, rt2, dz, rn, k);
    g_re[i] = g.real();
    g_im[i] = g.imag();
  }
}

// sum_t M[t] * g[t] with four interleaved accumulators; the order is fixed.
inline void dot4(const double* m_re, const double* m_im, const double* g_re,
                 const double* g_im, std::size_t n, double& out_re, double& out_im) {
  double a_re[4] = {0, 0, 0, 0};
  double a_im[4] = {0, 0, 0, 0};
  std::size_t t = 0;
  for (; t + 4 <= n; t += 4) {
    for (int u = 0; u < 4; ++u) {
      a_re[u] += m_re[t + u] * g_re[t + u] - m_im[t + u] * g_im[t + u];
      a_im[u] += m_re[t + u] * g_im[t + u] + m_im[t + u] * g_re[t + u];
    }
  }
  for (; t < n; ++t) {
    a_re[0] += m_re[t] * g_re[t] - m_im[t] * g_im[t];
    a_im[0] += m_re[t] * g_im[t] + m_im[t] * g_re[t];
  }
  out_re = (a_re[0] + a_re[1]) + (a_re[2] + a_re[3]);
  out_im = (a_im[0] + a_im[1]) + (a_im[2] + a_im[3]);
}

void check_grid(const MeasurementSet& ms, const ImageGrid& grid) {
  grid.validate();
  if (ms.layout.empty()) return;
  if (!(grid.max_z() < ms.layout.aperture_z()))
    throw Error(ErrorCode::WrongBranch, "grid must satisfy R_z < 0");
}

ImageVolume run(const MeasurementSet& ms, const ImageGrid& grid,
                FocusingOperatorKind kind, const std::vector<std::size_t>& freq_indices,
                const BackprojectionOptions& options) {
  check_grid(ms, grid);
  const Engine e = prepare(ms, freq_indices);

  ImageVolume volume;
  volume.grid = grid;
  volume.voxels.assign(grid.size(), cplx{});
  if (ms.empty()) return volume;

  const std::size_t n_tx = e.tx.size();
  const std::size_t n_rx = e.rx.size();

  parallel_for(grid.size(), options.workers, [&](std::size_t begin, std::size_t end) {
    std::vector<double> gt_re(n_tx), gt_im(n_tx), gr_re(n_rx), gr_im(n_rx);
    for (std::size_t v = begin; v < end; ++v) {
      const Position3 voxel = grid.voxel(v);
      double s_re = 0.0;
      double s_im = 0.0;
      for (std::size_t f = 0; f < e.k.size(); ++f) {
        fill_operator(kind, voxel, e.tx, e.k[f], e.r_min[f], gt_re, gt_im);
        const std::vector<double>& rr = e.shared_elements ? gt_re : gr_re;
        const std::vector<double>& ri = e.shared_elements ? gt_im : gr_im;
        if (!e.shared_elements)
          fill_operator(kind, voxel, e.rx, e.k[f], e.r_min[f], gr_re, gr_im);

        const double* d_re = e.data_re[f].data();
        const double* d_im = e.data_im[f].data();
        double f_re = 0.0;
        double f_im = 0.0;
        if (e.pairing == Pairing::FullMatrix) {
          for (std::size_t r = 0; r < n_rx; ++r) {
            double row_re = 0.0;
            double row_im = 0.0;
            dot4(d_re + r * n_tx, d_im + r * n_tx, gt_re.data(), gt_im.data(), n_tx,
                 row_re, row_im);
            f_re += rr[r] * row_re - ri[r] * row_im;
            f_im += rr[r] * row_im + ri[r] * row_re;
          }
        } else {
          const std::size_t pairs = e.pair_tx.size();
          for (std::size_t p = 0; p < pairs; ++p) {
            const std::size_t t = e.pair_tx[p];
            const std::size_t r = e.pair_rx[p];
            // (d * g_T) * g_R
            const double a_re = d_re[p] * gt_re[t] - d_im[p] * gt_im[t];
            const double a_im = d_re[p] * gt_im[t] + d_im[p] * gt_re[t];
            f_re += a_re * rr[r] - a_im * ri[r];
            f_im += a_re * ri[r] + a_im * rr[r];
          }
        }
        s_re += f_re;
        s_im += f_im;
      }
      volume.voxels[v] = {s_re, s_im};
    }
  });
  return volume;
}

}  // namespace

ImageVolume backproject_single_freq(const MeasurementSet& ms, std::size_t freq_index,
                                    const ImageGrid& grid, FocusingOperatorKind kind,
                                    const BackprojectionOptions& options) {
  if (freq_index >= ms.frequencies.size())
    throw Error(ErrorCode::InvalidArgument, "frequency index out of range");
  return run(ms, grid, kind, {freq_index}, options);
}

ImageVolume backproject_multi_freq(const MeasurementSet& ms, const ImageGrid& grid,
                                   FocusingOperatorKind kind,
                                   const BackprojectionOptions& options) {
  if (ms.frequencies.empty())
    throw Error(ErrorCode::InvalidArgument, "backprojection needs at least one frequency");
  std::vector<std::size_t> all(ms.frequencies.size());
  for (std::size_t f = 0; f < all.size(); ++f) all[f] = f;
  ImageVolume volume = run(ms, grid, kind, all, options);
  if (volume.max_magnitude() > 0.0) return normalize(volume);
  return volume;
}

ImageVolume normalize(const ImageVolume& volume) {
  const double peak = volume.max_magnitude();
  if (!(peak > 0.0))
    throw Error(ErrorCode::EmptyImage, "cannot normalize an all-zero image");
  ImageVolume out = volume;
  for (auto& v : out.voxels) v /= peak;
  out.normalized = true;
  return out;
}

void write_volume(std::ostream& out, const ImageVolume& volume) {
  using detail::put_le;
  out.write("NFIM", 4);
  for (auto d : volume.grid.dims) put_le<std::uint64_t>(out, d);
  put_le(out, volume.grid.origin.x);
  put_le(out, volume.grid.origin.y);
  put_le(out, volume.grid.origin.z);
  for (double s : volume.grid.spacing) put_le(out, s);
  for (const auto& v : volume.voxels) {
    put_le(out, v.real());
    put_le(out, v.imag());
  }
}

void write_volume(const std::string& path, const ImageVolume& volume) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::IoError, "cannot open " + path + " for writing");
  write_volume(out, volume);
}

ImageVolume read_volume(std::istream& in) {
  using detail::get_le;
  detail::expect_magic(in, "NFIM");
  ImageVolume volume;
  for (auto& d : volume.grid.dims) {
    const auto n = get_le<std::uint64_t>(in);
    if (n == 0 || n > (std::uint64_t{1} << 24))
      throw Error(ErrorCode::ParseError, "NFIM dims out of range");
    d = n;
  }
  volume.grid.origin.x = get_le<double>(in);
  volume.grid.origin.y = get_le<double>(in);
  volume.grid.origin.z = get_le<double>(in);
  for (auto& s : volume.grid.spacing) s = get_le<double>(in);
  volume.grid.validate();
  const std::size_t n = volume.grid.size();
  volume.voxels.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double re = get_le<double>(in);
    const double im = get_le<double>(in);
    volume.voxels.emplace_back(re, im);
  }
  // The dump does not record normalization; infer it from the peak.
  const double peak = volume.max_magnitude();
  volume.normalized = std::abs(peak - 1.0) <= 1e-12;
  return volume;
}

ImageVolume read_volume(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::IoError, "cannot open " + path);
  return read_volume(in);
}

}  // namespace nfbp
