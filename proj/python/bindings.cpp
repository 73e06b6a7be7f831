#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "laplace_bridge/bridge.hpp"
#include "laplace_bridge/errors.hpp"
#include "laplace_bridge/metrics.hpp"
#include "laplace_bridge/predictive.hpp"
#include "laplace_bridge/topk.hpp"

namespace py = pybind11;
using namespace lbridge;

namespace {

// A 1-D covariance argument is read as the diagonal, a 2-D one as the full matrix.
LogitGaussian gaussian_from(const Vector& mean, const py::array_t<double>& cov) {
  if (cov.ndim() == 1) {
    return LogitGaussian(mean, DiagonalCovariance{cov.cast<Vector>()});
  }
  if (cov.ndim() == 2) return LogitGaussian(mean, FullCovariance{cov.cast<Matrix>()});
  throw DimensionError("covariance must be 1-D (diagonal) or 2-D (full)");
}

std::vector<SimplexPoint> points_from(const Matrix& rows) {
  std::vector<SimplexPoint> out;
  out.reserve(static_cast<std::size_t>(rows.rows()));
  for (Index r = 0; r < rows.rows(); ++r) out.emplace_back(Vector(rows.row(r).transpose()), 1e-9);
  return out;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Laplace bridge between Dirichlet and logit-Gaussian distributions";

  auto base = py::register_exception<Error>(m, "Error", PyExc_RuntimeError);
  py::register_exception<DomainError>(m, "DomainError", PyExc_ValueError);
  py::register_exception<DimensionError>(m, "DimensionError", PyExc_ValueError);
  py::register_exception<IndexError>(m, "IndexError", PyExc_IndexError);
  py::register_exception<DecompositionError>(m, "DecompositionError", PyExc_ValueError);
  py::register_exception<EmptyInputError>(m, "EmptyInputError", PyExc_ValueError);
  (void)base;

  m.def(
      "forward",
      [](const Vector& alpha) {
        const BridgeGaussian g = forward(DirichletParams(alpha));
        return py::make_tuple(g.mean, g.cov_full);
      },
      py::arg("alpha"), "Dirichlet concentrations to (mean, covariance) of the logit Gaussian.");
  m.def(
      "inverse",
      [](const Vector& mean, const py::array_t<double>& cov) {
        return Vector(inverse(gaussian_from(mean, cov)).alpha());
      },
      py::arg("mean"), py::arg("cov"), "Logit Gaussian to Dirichlet concentrations.");
  m.def(
      "roundtrip_residual",
      [](const Vector& alpha) { return roundtrip_residual(DirichletParams(alpha)); },
      py::arg("alpha"));

  m.def(
      "dirichlet_mean",
      [](const Vector& alpha) { return Vector(dirichlet_mean(DirichletParams(alpha)).values()); },
      py::arg("alpha"));
  m.def(
      "dirichlet_mode",
      [](const Vector& alpha) { return Vector(dirichlet_mode(DirichletParams(alpha)).values()); },
      py::arg("alpha"));
  m.def(
      "sample_dirichlet",
      [](const Vector& alpha, std::size_t n, std::uint64_t seed) {
        return sample_dirichlet(DirichletParams(alpha), n, seed);
      },
      py::arg("alpha"), py::arg("n"), py::arg("seed") = 1234);

  m.def("reg_inc_beta", [](double x, double a, double b) { return reg_inc_beta(x, ShapePair(a, b)); },
        py::arg("x"), py::arg("a"), py::arg("b"));
  m.def("beta_quantile", [](double p, double a, double b) { return beta_quantile(p, ShapePair(a, b)); },
        py::arg("p"), py::arg("a"), py::arg("b"));

  m.def(
      "lb_predictive_mean",
      [](const Vector& mean, const py::array_t<double>& cov) {
        return Vector(lb_predictive_mean(gaussian_from(mean, cov)).values());
      },
      py::arg("mean"), py::arg("cov"));
  m.def(
      "mc_softmax_mean",
      [](const Vector& mean, const py::array_t<double>& cov, std::size_t n, std::uint64_t seed) {
        const LogitGaussian g = gaussian_from(mean, cov);
        py::gil_scoped_release release;
        return Vector(mc_softmax_mean(g, n, seed).values());
      },
      py::arg("mean"), py::arg("cov"), py::arg("n") = 1000, py::arg("seed") = 1234);
  m.def(
      "extended_mackay_mean",
      [](const Vector& mean, const Vector& variances) {
        return Vector(extended_mackay_mean(mean, variances).values());
      },
      py::arg("mean"), py::arg("variances"));
  m.def(
      "sodpp_mean",
      [](const Vector& mean, const py::array_t<double>& cov) {
        return sodpp_mean(gaussian_from(mean, cov)).values;
      },
      py::arg("mean"), py::arg("cov"));
  m.def("prop1_threshold", &prop1_threshold, py::arg("rest"));
  m.def("variance_derivative", &variance_derivative, py::arg("alpha_k"), py::arg("rest"));

  m.def(
      "topk",
      [](const Vector& alpha, double threshold, std::optional<std::size_t> k_max) {
        return uncertainty_aware_topk(DirichletParams(alpha), threshold, k_max).classes;
      },
      py::arg("alpha"), py::arg("threshold") = kDefaultThreshold, py::arg("k_max") = py::none(),
      "Class indices kept by uncertainty-aware top-k, largest concentration first.");

  m.def("auroc", &auroc, py::arg("in_dist"), py::arg("ood"));
  m.def("mmc", &mmc, py::arg("confidences"));
  m.def(
      "brier",
      [](const Matrix& p, const std::vector<Index>& labels) { return brier(points_from(p), labels); },
      py::arg("predictions"), py::arg("labels"));
  m.def(
      "accuracy",
      [](const Matrix& p, const std::vector<Index>& labels) {
        return accuracy(points_from(p), labels);
      },
      py::arg("predictions"), py::arg("labels"));
}
