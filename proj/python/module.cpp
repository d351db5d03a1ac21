#include <pybind11/complex.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "hyperzero/error.hpp"
#include "hyperzero/harness.hpp"
#include "hyperzero/pointproc.hpp"
#include "hyperzero/roots.hpp"
#include "hyperzero/series.hpp"

namespace py = pybind11;
using namespace hyperzero;

namespace {

std::vector<DiskPoint> points(std::vector<Complex> const& zs)
{
    std::vector<DiskPoint> out;
    out.reserve(zs.size());
    for (Complex z : zs) out.emplace_back(z);
    return out;
}

RunOptions options(unsigned threads, std::string const& experiment)
{
    RunOptions o = RunOptions::defaults();
    if (threads > 0) o.threads = threads;
    o.experiment = experiment;
    return o;
}

py::dict estimate_dict(CorrelationEstimate const& e)
{
    py::dict d;
    d["value"] = e.value;
    d["std_error"] = e.std_error;
    d["trials"] = e.trials;
    d["hits"] = e.hits;
    d["truncation_degree"] = e.params.truncation_degree;
    return d;
}

}  // namespace

PYBIND11_MODULE(_core, m)
{
    m.doc() = "Zeros of random power series on the unit disk";
    m.attr("__version__") = HYPERZERO_VERSION;

    py::register_exception<Error>(m, "Error", PyExc_RuntimeError);
    py::register_exception<PreconditionError>(m, "PreconditionError", PyExc_ValueError);
    py::register_exception<ConfigInvalid>(m, "ConfigInvalid", PyExc_ValueError);

    m.def("mobius", [](Complex u, Complex z) { return mobius(DiskPoint(u), DiskPoint(z)).value(); }, py::arg("u"),
          py::arg("z"));
    m.def("mobius_inverse", [](Complex u, Complex w) { return mobius_inverse(DiskPoint(u), DiskPoint(w)).value(); },
          py::arg("u"), py::arg("w"));
    m.def("delta", [](Complex u, Complex z) { return delta(DiskPoint(u), DiskPoint(z)); }, py::arg("u"),
          py::arg("z"));
    m.def("q_covariance", [](Complex a, Complex b) { return q_covariance(DiskPoint(a), DiskPoint(b)); });
    m.def("cross_covariance", [](Complex u1, Complex z1, Complex u2, Complex z2) {
        return cross_covariance(DiskPoint(u1), DiskPoint(z1), DiskPoint(u2), DiskPoint(z2));
    });
    m.def("bergman_kernel", [](Complex z, Complex w, double c) { return bergman_kernel(DiskPoint(z), DiskPoint(w), c); },
          py::arg("z"), py::arg("w"), py::arg("c") = 1.0);
    m.def("kernel_determinant",
          [](std::vector<Complex> const& zs, double c) { return kernel_determinant(points(zs), c); },
          py::arg("points"), py::arg("c") = 1.0);
    m.def("pseudo_hyperbolic_distance",
          [](Complex a, Complex b) { return pseudo_hyperbolic_distance(DiskPoint(a), DiskPoint(b)); });

    m.def("sample_coefficients",
          [](std::string const& law, std::size_t count, std::uint64_t seed, std::uint64_t stream, double p) {
              return sample_coefficients(CoefficientLaw::from_name(law, p), count, SeededStream{seed, stream});
          },
          py::arg("law"), py::arg("count"), py::arg("seed") = 0, py::arg("stream") = 0,
          py::arg("p") = CoefficientLaw::kDefaultSparsity);
    m.def("required_degree",
          [](double radius, double tol, double safety) { return required_degree({radius, tol, safety}); },
          py::arg("radius"), py::arg("tail_tolerance") = TruncationPolicy::kDefaultTailTolerance,
          py::arg("safety_factor") = TruncationPolicy::kDefaultSafetyFactor);
    m.def("alpha_power_sum", [](Complex u, Complex z, double p) { return alpha_power_sum(DiskPoint(u), DiskPoint(z), p); },
          py::arg("u"), py::arg("z"), py::arg("p"));

    m.def("polynomial_roots", [](std::vector<Complex> const& c) { return polynomial_roots(c); },
          py::arg("coefficients"));
    m.def("count_zeros_in_disk",
          [](std::vector<Complex> const& c, Complex center, double radius, Complex u, double certified) {
              auto const s = TruncatedSeries::from_coefficients(c, certified);
              return count_zeros_in_disk(s, DiskPoint(center), radius, DiskPoint(u));
          },
          py::arg("coefficients"), py::arg("center"), py::arg("radius"), py::arg("u") = Complex{},
          py::arg("certified_radius") = 0.99);

    m.def("joint_hit_probability",
          [](std::string const& law, Complex u, std::vector<Complex> const& centers, double eps, std::size_t trials,
             std::uint64_t seed, unsigned threads) {
              return estimate_dict(joint_hit_probability(CoefficientLaw::from_name(law), DiskPoint(u),
                                                         BallFamily(points(centers), eps), trials, seed,
                                                         options(threads, "python")));
          },
          py::arg("law"), py::arg("u"), py::arg("centers"), py::arg("epsilon"), py::arg("trials"),
          py::arg("seed") = 1, py::arg("threads") = 0);
    m.def("intensity_profile",
          [](std::string const& law, Complex u, double radius, std::size_t bins, std::size_t trials,
             std::uint64_t seed, unsigned threads) {
              auto const p = intensity_profile(CoefficientLaw::from_name(law), DiskPoint(u), radius, bins, trials, seed,
                                               options(threads, "python"));
              py::list rows;
              for (auto const& b : p.radial_bins) {
                  py::dict d;
                  d["r_lo"] = b.r_lo;
                  d["r_hi"] = b.r_hi;
                  d["density"] = b.expected_count_per_area;
                  d["std_error"] = b.std_error;
                  rows.append(d);
              }
              py::dict d;
              d["bins"] = rows;
              d["total_mean_count"] = p.total_mean_count;
              d["total_std_error"] = p.total_std_error;
              d["truncation_degree"] = p.truncation_degree;
              return d;
          },
          py::arg("law"), py::arg("u"), py::arg("radius"), py::arg("bins"), py::arg("trials"), py::arg("seed") = 1,
          py::arg("threads") = 0);

    // Full harness run: INI text in, JSON record text out.
    m.def("run_config", [](std::string const& text) { return to_json(run(parse_config(text))).dump(); },
          py::arg("config_text"));
}
