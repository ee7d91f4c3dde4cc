#include "nfbp/geometry.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include "nfbp/error.hpp"
#include "text_io.hpp"

namespace nfbp {

KzBranch kz(WaveNumber k, TransverseK kt) {
  const double k2 = k.value * k.value;
  const double kt2 = kt.kx * kt.kx + kt.ky * kt.ky;
  if (k2 >= kt2) return {cplx(std::sqrt(k2 - kt2), 0.0), KzRegion::Visible};
  return {cplx(0.0, -std::sqrt(kt2 - k2)), KzRegion::Evanescent};
}

double distance(Position3 a, Position3 b) {
  const Position3 d = a - b;
  return std::sqrt(d.x * d.x + d.y * d.y + d.z * d.z);
}

double ArrayLayout::aperture_z() const {
  if (!tx_positions.empty()) return tx_positions.front().z;
  if (!rx_positions.empty()) return rx_positions.front().z;
  throw Error(ErrorCode::InvalidArgument, "array layout has no elements");
}

void ArrayLayout::validate() const {
  if (tx_positions.size() != tx_weights.size() ||
      rx_positions.size() != rx_weights.size())
    throw Error(ErrorCode::InvalidArgument,
                "array layout: weight list length differs from position list");
  if (empty()) return;
  const double z_m = aperture_z();
  auto check = [z_m](const std::vector<Position3>& pos,
                     const std::vector<double>& w, const char* role) {
    for (std::size_t i = 0; i < pos.size(); ++i) {
      const Position3 p = pos[i];
      if (!std::isfinite(p.x) || !std::isfinite(p.y) || !std::isfinite(p.z))
        throw Error(ErrorCode::InvalidArgument,
                    std::string("array layout: non-finite ") + role + " position");
      if (std::abs(p.z - z_m) > 1e-12)
        throw Error(ErrorCode::InvalidArgument,
                    std::string("array layout: ") + role +
                        " element off the aperture plane");
      if (!(w[i] > 0.0) || !std::isfinite(w[i]))
        throw Error(ErrorCode::InvalidArgument,
                    std::string("array layout: ") + role +
                        " weight must be strictly positive");
    }
  };
  check(tx_positions, tx_weights, "tx");
  check(rx_positions, rx_weights, "rx");
}

ArrayLayout spiral_layout(std::size_t n, double r_max, double z_m) {
  if (n == 0 || !(r_max > 0.0))
    throw Error(ErrorCode::InvalidArgument, "spiral_layout: need n >= 1, r_max > 0");
  const double golden_angle = kPi * (3.0 - std::sqrt(5.0));
  const double weight = kPi * r_max * r_max / static_cast<double>(n);

  std::vector<Position3> points;
  points.reserve(n);
  for (std::size_t m = 0; m < n; ++m) {
    const double rho =
        r_max * std::sqrt((static_cast<double>(m) + 0.5) / static_cast<double>(n));
    const double phi = static_cast<double>(m) * golden_angle;
    points.push_back({rho * std::cos(phi), rho * std::sin(phi), z_m});
  }
  ArrayLayout layout;
  layout.tx_positions = points;
  layout.rx_positions = std::move(points);
  layout.tx_weights.assign(n, weight);
  layout.rx_weights.assign(n, weight);
  return layout;
}

ArrayLayout rect_layout(std::size_t nx, std::size_t ny, double lx, double ly,
                        double z_m) {
  if (nx == 0 || ny == 0 || !(lx > 0.0) || !(ly > 0.0))
    throw Error(ErrorCode::InvalidArgument,
                "rect_layout: need nx, ny >= 1 and positive extents");
  const double dx = lx / static_cast<double>(nx);
  const double dy = ly / static_cast<double>(ny);

  std::vector<Position3> points;
  points.reserve(nx * ny);
  for (std::size_t iy = 0; iy < ny; ++iy) {
    const double y = -0.5 * ly + (static_cast<double>(iy) + 0.5) * dy;
    for (std::size_t ix = 0; ix < nx; ++ix) {
      const double x = -0.5 * lx + (static_cast<double>(ix) + 0.5) * dx;
      points.push_back({x, y, z_m});
    }
  }
  ArrayLayout layout;
  layout.tx_positions = points;
  layout.rx_positions = std::move(points);
  layout.tx_weights.assign(nx * ny, dx * dy);
  layout.rx_weights.assign(nx * ny, dx * dy);
  return layout;
}

ArrayLayout cluster_layout(std::size_t clusters_x, std::size_t clusters_y,
                           double cluster_size, double pitch, std::size_t per_edge,
                           double z_m) {
  if (clusters_x == 0 || clusters_y == 0 || per_edge == 0 || !(cluster_size > 0.0) ||
      !(pitch >= cluster_size))
    throw Error(ErrorCode::InvalidArgument,
                "cluster_layout: need >= 1 cluster and element, pitch >= cluster_size > 0");
  const double half = 0.5 * cluster_size;
  const double step = cluster_size / static_cast<double>(per_edge);
  const double weight = cluster_size * cluster_size / (2.0 * static_cast<double>(per_edge));

  ArrayLayout layout;
  for (std::size_t cy = 0; cy < clusters_y; ++cy) {
    const double yc = (static_cast<double>(cy) - 0.5 * static_cast<double>(clusters_y - 1)) * pitch;
    for (std::size_t cx = 0; cx < clusters_x; ++cx) {
      const double xc =
          (static_cast<double>(cx) - 0.5 * static_cast<double>(clusters_x - 1)) * pitch;
      for (double edge : {-half, half}) {
        for (std::size_t i = 0; i < per_edge; ++i) {
          const double along = -half + (static_cast<double>(i) + 0.5) * step;
          layout.tx_positions.push_back({xc + along, yc + edge, z_m});
          layout.rx_positions.push_back({xc + edge, yc + along, z_m});
        }
      }
    }
  }
  layout.tx_weights.assign(layout.tx_positions.size(), weight);
  layout.rx_weights.assign(layout.rx_positions.size(), weight);
  return layout;
}

ArrayLayout shift_layout(const ArrayLayout& layout, Position3 offset) {
  if (offset.z != 0.0)
    throw Error(ErrorCode::NonPlanarShift,
                "shift_layout: offset must lie in the aperture plane (z = 0)");
  ArrayLayout shifted = layout;
  for (auto& p : shifted.tx_positions) p = p + offset;
  for (auto& p : shifted.rx_positions) p = p + offset;
  return shifted;
}

ArrayLayout concat_layouts(const ArrayLayout& a, const ArrayLayout& b) {
  ArrayLayout out = a;
  out.tx_positions.insert(out.tx_positions.end(), b.tx_positions.begin(),
                          b.tx_positions.end());
  out.rx_positions.insert(out.rx_positions.end(), b.rx_positions.begin(),
                          b.rx_positions.end());
  out.tx_weights.insert(out.tx_weights.end(), b.tx_weights.begin(),
                        b.tx_weights.end());
  out.rx_weights.insert(out.rx_weights.end(), b.rx_weights.begin(),
                        b.rx_weights.end());
  return out;
}

void write_layout_csv(std::ostream& out, const ArrayLayout& layout) {
  out << "role,x,y,z,weight\n";
  auto rows = [&out](const std::vector<Position3>& pos,
                     const std::vector<double>& w, const char* role) {
    for (std::size_t i = 0; i < pos.size(); ++i)
      out << role << ',' << detail::fmt17(pos[i].x) << ','
          << detail::fmt17(pos[i].y) << ',' << detail::fmt17(pos[i].z) << ','
          << detail::fmt17(w[i]) << '\n';
  };
  rows(layout.tx_positions, layout.tx_weights, "tx");
  rows(layout.rx_positions, layout.rx_weights, "rx");
}

void write_layout_csv(const std::string& path, const ArrayLayout& layout) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorCode::IoError, "cannot open " + path + " for writing");
  write_layout_csv(out, layout);
}

ArrayLayout read_layout_csv(std::istream& in) {
  ArrayLayout layout;
  std::string line;
  std::size_t line_no = 0;
  if (!std::getline(in, line) || detail::trim(line) != "role,x,y,z,weight")
    throw Error(ErrorCode::ParseError, "layout csv: expected header role,x,y,z,weight");
  ++line_no;
  while (std::getline(in, line)) {
    ++line_no;
    if (detail::trim(line).empty()) continue;
    const auto fields = detail::split_csv(line);
    if (fields.size() != 5)
      throw Error(ErrorCode::ParseError,
                  "layout csv line " + std::to_string(line_no) + ": expected 5 fields");
    const Position3 p{detail::parse_double(fields[1], line_no),
                      detail::parse_double(fields[2], line_no),
                      detail::parse_double(fields[3], line_no)};
    const double w = detail::parse_double(fields[4], line_no);
    if (fields[0] == "tx") {
      layout.tx_positions.push_back(p);
      layout.tx_weights.push_back(w);
    } else if (fields[0] == "rx") {
      layout.rx_positions.push_back(p);
      layout.rx_weights.push_back(w);
    } else {
      throw Error(ErrorCode::ParseError, "layout csv line " + std::to_string(line_no) +
                                             ": role must be tx or rx");
    }
  }
  layout.validate();
  return layout;
}

ArrayLayout read_layout_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::IoError, "cannot open " + path);
  return read_layout_csv(in);
}

}  // namespace nfbp
