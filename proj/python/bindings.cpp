#include "kronchaos/bounds.hpp"
#include "kronchaos/cli.hpp"
#include "kronchaos/errors.hpp"
#include "kronchaos/montecarlo.hpp"
#include "kronchaos/report.hpp"
#include "kronchaos/suites.hpp"

#include <pybind11/eigen.h>
#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

namespace py = pybind11;
using namespace kronchaos;

namespace {

using Array = py::array_t<double, py::array::c_style | py::array::forcecast>;

TensorArray to_tensor(const Array& a, std::vector<int> labels)
{
    std::vector<std::size_t> shape(a.shape(), a.shape() + a.ndim());
    std::vector<double> data(a.data(), a.data() + a.size());
    if (labels.empty()) {
        return TensorArray(std::move(shape), std::move(data));
    }
    return TensorArray(make_axis_set(std::move(labels)), std::move(shape), std::move(data));
}

Array to_numpy(const TensorArray& B)
{
    Array out(std::vector<py::ssize_t>(B.shape().begin(), B.shape().end()));
    std::copy(B.data().begin(), B.data().end(), out.mutable_data());
    return out;
}

// Reports cross the boundary as JSON text; the Python side decodes them.
std::string dump(const Json& j)
{
    return j.dump();
}

NormOptions norm_options(int restarts, std::uint64_t seed)
{
    NormOptions o;
    o.restarts = restarts;
    o.seed = seed;
    return o;
}

MonteCarloOptions mc_options(std::size_t samples, std::uint64_t seed)
{
    MonteCarloOptions o;
    o.samples = samples;
    o.seed = seed;
    return o;
}

}  // namespace

PYBIND11_MODULE(_kronchaos, m)
{
    m.attr("__version__") = KRONCHAOS_VERSION;

    py::register_exception<Error>(m, "KronchaosError", PyExc_ValueError);

    m.def(
        "rearrange",
        [](const Matrix& A, const std::vector<std::size_t>& dims) { return to_numpy(rearrange_matrix(A, Dims(dims))); },
        py::arg("A"), py::arg("dims"));
    m.def(
        "symmetrize",
        [](const Matrix& A, const std::vector<std::size_t>& dims) {
            return to_matrix(symmetrize(rearrange_matrix(A, Dims(dims))));
        },
        py::arg("A"), py::arg("dims"));
    m.def(
        "check_symmetry",
        [](const Matrix& A, const std::vector<std::size_t>& dims) {
            return check_symmetry(rearrange_matrix(A, Dims(dims)));
        },
        py::arg("A"), py::arg("dims"));

    m.def(
        "partition_norm",
        [](const Array& B, const std::vector<std::vector<int>>& blocks, std::vector<int> labels, int restarts,
           std::uint64_t seed) {
            const auto T = to_tensor(B, std::move(labels));
            std::vector<AxisSet> bs;
            for (const auto& b : blocks) {
                bs.push_back(make_axis_set(b));
            }
            const auto e = tensor_norm(T, make_partition(T.labels(), bs), norm_options(restarts, seed));
            return dump(to_json(e));
        },
        py::arg("B"), py::arg("blocks"), py::arg("labels") = std::vector<int>{}, py::arg("restarts") = 32,
        py::arg("seed") = NormOptions{}.seed);

    m.def(
        "mp_main",
        [](const Matrix& A, const std::vector<std::size_t>& dims, double p, double L) {
            return mp_main(rearrange_matrix(A, Dims(dims)), p, L);
        },
        py::arg("A"), py::arg("dims"), py::arg("p"), py::arg("L") = 1.0);
    m.def(
        "mp_norm",
        [](const Matrix& A, const std::vector<std::size_t>& dims, double p, double L) {
            return mp_norm(A, Dims(dims), p, L);
        },
        py::arg("A"), py::arg("dims"), py::arg("p"), py::arg("L") = 1.0);
    m.def(
        "mp_decoupled", [](const Array& B, double p) { return mp_decoupled(to_tensor(B, {}), p); }, py::arg("B"),
        py::arg("p"));
    m.def(
        "tail_bound_ax",
        [](const Matrix& A, std::size_t n, std::size_t d, double t, double C) {
            return tail_bound_ax(A, n, d, t, C).value;
        },
        py::arg("A"), py::arg("n"), py::arg("d"), py::arg("t"), py::arg("C") = 1.0);
    m.def(
        "bound_report",
        [](const Matrix& A, const std::vector<std::size_t>& dims, const std::vector<double>& p_grid,
           const std::vector<double>& t_grid, double L, double C_tail) {
            return dump(to_json(make_bound_report(A, Dims(dims), p_grid, t_grid, L, C_tail)));
        },
        py::arg("A"), py::arg("dims"), py::arg("p_grid"), py::arg("t_grid") = std::vector<double>{},
        py::arg("L") = 1.0, py::arg("C_tail") = 1.0);

    m.def(
        "sample_factors",
        [](const std::vector<std::size_t>& dims, const std::string& dist, std::uint64_t seed, std::uint64_t sample) {
            return sample_factors(Dims(dims), DistributionSpec::parse(dist), seed, sample);
        },
        py::arg("dims"), py::arg("dist") = "gaussian", py::arg("seed") = 1, py::arg("sample") = 0);
    m.def("chaos_statistic", &chaos_statistic, py::arg("A"), py::arg("factors"));
    m.def("norm_statistic", &norm_statistic, py::arg("A"), py::arg("factors"));

    m.def(
        "run_identities", [](std::uint64_t seed, int instances) { return dump(to_json(run_identities(seed, instances))); },
        py::arg("seed") = 1, py::arg("instances") = 100);
    m.def(
        "verify_gaussian_decoupling",
        [](const Vector& a, const std::vector<double>& p_grid, std::size_t samples, std::uint64_t seed) {
            return dump(to_json(verify_gaussian_decoupling(a, p_grid, mc_options(samples, seed))));
        },
        py::arg("a"), py::arg("p_grid"), py::arg("samples") = 100000, py::arg("seed") = 1);
    m.def(
        "verify_decoupling",
        [](const Matrix& A, const std::vector<std::size_t>& dims, const std::string& dist,
           const std::vector<double>& p_grid, std::size_t samples, std::uint64_t seed) {
            return dump(to_json(
                verify_decoupling(A, Dims(dims), DistributionSpec::parse(dist), p_grid, mc_options(samples, seed))));
        },
        py::arg("A"), py::arg("dims"), py::arg("dist") = "gaussian", py::arg("p_grid") = std::vector<double>{2.0},
        py::arg("samples") = 100000, py::arg("seed") = 1);

    m.def(
        "run_cli",
        [](const std::vector<std::string>& args) {
            std::ostringstream out;
            std::ostringstream err;
            int code = 0;
            {
                py::gil_scoped_release release;
                code = run_cli(args, out, err);
            }
            return py::make_tuple(code, out.str(), err.str());
        },
        py::arg("args"));
}
