#include <pybind11/complex.h>
#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "nfbp/error.hpp"
#include "nfbp/pipeline.hpp"

namespace py = pybind11;

namespace {

nfbp::Displacement displacement(const std::array<double, 3>& r) { return {r[0], r[1], r[2]}; }

py::array_t<std::complex<double>> volume_array(const nfbp::ImageVolume& v) {
  const auto& d = v.grid.dims;
  py::array_t<std::complex<double>> out({d[2], d[1], d[0]});
  std::copy(v.voxels.begin(), v.voxels.end(), out.mutable_data());
  return out;
}

py::array_t<double> image_array(const nfbp::Image2D& image) {
  py::array_t<double> out({image.rows, image.cols});
  std::copy(image.values.begin(), image.values.end(), out.mutable_data());
  return out;
}

nfbp::ProjectionAxis parse_axis(const std::string& axis) {
  if (axis == "x") return nfbp::ProjectionAxis::X;
  if (axis == "y") return nfbp::ProjectionAxis::Y;
  if (axis == "z") return nfbp::ProjectionAxis::Z;
  throw py::value_error("axis must be 'x', 'y' or 'z'");
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Near-field back-projection with amplitude-corrected focusing operators";

  py::register_exception<nfbp::Error>(m, "Error", PyExc_RuntimeError);

  m.def("wavenumber", [](double hz) { return nfbp::WaveNumber::from_frequency(hz).value; },
        py::arg("frequency_hz"));

  m.def("f0", [](std::array<double, 3> r, double k) {
    return nfbp::f0(displacement(r), nfbp::WaveNumber{k});
  }, py::arg("r"), py::arg("k"));
  m.def("f1", [](std::array<double, 3> r, double k) {
    return nfbp::f1(displacement(r), nfbp::WaveNumber{k});
  }, py::arg("r"), py::arg("k"));
  m.def("f2", [](std::array<double, 3> r, double k) {
    return nfbp::f2(displacement(r), nfbp::WaveNumber{k});
  }, py::arg("r"), py::arg("k"));
  m.def("phase_only", [](std::array<double, 3> r, double k) {
    return nfbp::phase_only(displacement(r), nfbp::WaveNumber{k});
  }, py::arg("r"), py::arg("k"));
  m.def("fd_oracle", [](std::array<double, 3> r, double k, int order) {
    return nfbp::fd_oracle(displacement(r), nfbp::WaveNumber{k}, order);
  }, py::arg("r"), py::arg("k"), py::arg("order"));
  m.def("spectral_oracle", [](std::array<double, 3> r, double k, int order) {
    return nfbp::spectral_oracle(displacement(r), nfbp::WaveNumber{k}, order);
  }, py::arg("r"), py::arg("k"), py::arg("order"));

  m.def("bundled_scenarios", &nfbp::bundled_scenario_names);

  m.def("validate", [](const std::string& scenario) {
    std::vector<std::pair<std::string, std::string>> out;
    for (const auto& d : nfbp::validate(nfbp::load_scenario(scenario)))
      out.emplace_back(d.path, d.message);
    return out;
  }, py::arg("scenario"), "Diagnostics as (field path, message) pairs; empty when valid.");

  m.def("run", [](const std::string& scenario, const std::string& out, unsigned workers) {
    nfbp::RunOptions options;
    options.output_dir = out;
    options.workers = workers;
    nfbp::RunResult result;
    {
      py::gil_scoped_release release;
      result = nfbp::run(nfbp::load_scenario(scenario), options);
    }
    return result.report;
  }, py::arg("scenario"), py::arg("out"), py::arg("workers") = 0,
     "Runs the full pipeline and returns report.json as text.");

  m.def("read_volume", [](const std::string& path) {
    return volume_array(nfbp::read_volume(path));
  }, py::arg("path"), "Complex voxels indexed [z, y, x].");

  m.def("mip", [](const std::string& path, const std::string& axis) {
    return image_array(nfbp::mip(nfbp::read_volume(path), parse_axis(axis)));
  }, py::arg("path"), py::arg("axis") = "z");
}
