#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <cstring>

#include "anistat/covariance.hpp"
#include "anistat/error.hpp"
#include "anistat/estimation.hpp"
#include "anistat/inference.hpp"
#include "anistat/sampling_distribution.hpp"
#include "anistat/synthesis.hpp"

namespace py = pybind11;
using namespace anistat;

namespace {

using Array = py::array_t<double, py::array::c_style | py::array::forcecast>;

CovarianceModel make_model(const std::string& family, double R, double theta, double xi1, double sigma2, double nu) {
  CovarianceModel m;
  m.family = parse_family(family);
  m.sigma2 = sigma2;
  m.aniso = {R, theta, xi1};
  m.nu = nu;
  m.validate();
  return m;
}

GridField to_field(const Array& a, double spacing) {
  if (a.ndim() != 2 || a.shape(0) != a.shape(1)) throw InvalidInput("field must be a square 2-D array");
  GridField f;
  f.spec = {static_cast<std::size_t>(a.shape(0)), spacing};
  f.values.assign(a.data(), a.data() + a.size());
  return f;
}

py::dict estimate_dict(const AnisotropyEstimate& e) {
  py::dict d;
  d["R_hat"] = e.R_hat;
  d["theta_hat"] = e.theta_hat;
  d["n_effective"] = e.n_effective;
  d["flags"] = e.flags;
  return d;
}

}  // namespace

PYBIND11_MODULE(_anistat, m) {
  m.doc() = "Anisotropy statistics of 2D Gaussian random fields";

  auto base = py::register_exception<Error>(m, "Error", PyExc_RuntimeError);
  py::register_exception<InvalidInput>(m, "InvalidInput", base.ptr());
  py::register_exception<DomainError>(m, "DomainError", base.ptr());
  py::register_exception<DegenerateSample>(m, "DegenerateSample", base.ptr());
  py::register_exception<InfeasibleSampleSize>(m, "InfeasibleSampleSize", base.ptr());
  py::register_exception<IoError>(m, "IoError", base.ptr());

  py::class_<SlopeTensor>(m, "SlopeTensor")
      .def_readonly("q11", &SlopeTensor::q11)
      .def_readonly("q22", &SlopeTensor::q22)
      .def_readonly("q12", &SlopeTensor::q12)
      .def_readonly("n", &SlopeTensor::n)
      .def("__repr__", [](const SlopeTensor& q) {
        return "SlopeTensor(q11=" + std::to_string(q.q11) + ", q22=" + std::to_string(q.q22) +
               ", q12=" + std::to_string(q.q12) + ")";
      });

  py::class_<CovarianceModel>(m, "CovarianceModel")
      .def(py::init(&make_model), py::arg("family") = "gaussian", py::arg("R") = 1.0, py::arg("theta") = 0.0,
           py::arg("xi1") = 1.0, py::arg("sigma2") = 1.0, py::arg("nu") = 2.0)
      .def_property_readonly("family", [](const CovarianceModel& c) { return family_name(c.family); })
      .def_property_readonly("R", [](const CovarianceModel& c) { return c.aniso.R; })
      .def_property_readonly("theta", [](const CovarianceModel& c) { return c.aniso.theta; })
      .def_property_readonly("xi1", [](const CovarianceModel& c) { return c.aniso.xi1; })
      .def_readonly("sigma2", &CovarianceModel::sigma2)
      .def_readonly("nu", &CovarianceModel::nu)
      .def("covariance", [](const CovarianceModel& c, double x, double y) { return covariance(c, {x, y}); })
      .def("slope_tensor", &theoretical_slope_tensor);

  m.def(
      "generate",
      [](const CovarianceModel& model, std::size_t side, double spacing, std::uint64_t seed) {
        const GridField f = generate(model, {side, spacing}, seed);
        Array out({side, side});
        std::memcpy(out.mutable_data(), f.values.data(), f.values.size() * sizeof(double));
        return out;
      },
      py::arg("model"), py::arg("side"), py::arg("spacing") = 1.0, py::arg("seed") = 0,
      "Field realization on a side x side lattice; rows index y.");

  m.def(
      "slope_tensor", [](const Array& a, double spacing) { return slope_tensor_estimate(to_field(a, spacing)); },
      py::arg("field"), py::arg("spacing") = 1.0);
  m.def(
      "estimate", [](const Array& a, double spacing) { return estimate_dict(estimate_from_grid(to_field(a, spacing))); },
      py::arg("field"), py::arg("spacing") = 1.0, "(R_hat, theta_hat) from one gridded field.");

  m.def("jpdf_nonparametric", &jpdf_nonparametric, py::arg("R_hat"), py::arg("theta_hat"), py::arg("R"),
        py::arg("theta"), py::arg("n"));
  m.def("jacobian_det", &jacobian_det, py::arg("R_hat"), py::arg("theta_hat"));
  m.def("chi2_inv_2dof", &chi2_inv_2dof, py::arg("p"));

  m.def(
      "isotropy_interval",
      [](std::size_t n, double p) {
        const IsotropyInterval iv = isotropy_interval(n, p);
        return py::make_tuple(iv.lower, iv.upper);
      },
      py::arg("n"), py::arg("p") = 0.95);
  m.def(
      "isotropy_test",
      [](double R_hat, std::size_t n, double p) {
        AnisotropyEstimate e;
        e.R_hat = R_hat;
        e.n_effective = n;
        return isotropy_test(e, p).reject_isotropy;
      },
      py::arg("R_hat"), py::arg("n"), py::arg("p") = 0.95, "True when isotropy is rejected.");

  py::class_<ConfidenceRegion>(m, "ConfidenceRegion")
      .def_readonly("p", &ConfidenceRegion::p)
      .def_readonly("n", &ConfidenceRegion::n)
      .def_readonly("truncated", &ConfidenceRegion::truncated)
      .def_property_readonly("contour",
                             [](const ConfidenceRegion& r) {
                               std::vector<std::pair<double, double>> v;
                               for (const auto& c : r.contour) v.emplace_back(c.R_hat, c.theta_hat);
                               return v;
                             })
      .def("contains", &ConfidenceRegion::contains, py::arg("R_hat"), py::arg("theta_hat"))
      .def("min_R_hat", &ConfidenceRegion::min_R_hat)
      .def("max_R_hat", &ConfidenceRegion::max_R_hat);

  m.def(
      "confidence_region",
      [](double R, double theta, std::size_t n, double p, std::size_t rays) {
        RegionRequest req;
        req.R = R;
        req.theta = theta;
        req.n = n;
        req.p = p;
        req.rays = rays;
        return confidence_region(req);
      },
      py::arg("R"), py::arg("theta"), py::arg("n"), py::arg("p") = 0.95, py::arg("rays") = 720,
      "Non-parametric region around the truth (R, theta); angles in radians.");
}
