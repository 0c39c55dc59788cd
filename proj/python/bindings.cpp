// Python bindings. Networks and configs cross the boundary as JSON text;
// the package wrapper converts to and from dicts.

#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "current_lab/error.hpp"
#include "current_lab/exact.hpp"
#include "current_lab/gff.hpp"
#include "current_lab/harness.hpp"
#include "current_lab/io.hpp"
#include "current_lab/loopsoup.hpp"
#include "current_lab/samplers.hpp"
#include "current_lab/vrjp.hpp"

namespace py = pybind11;
using namespace current_lab;
using nlohmann::json;

namespace {

Network parse_network(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ValidationError(std::string("malformed JSON: ") + e.what());
    }
    return network_from_json(j);
}

py::dict table(const FiniteDistribution& d) {
    py::dict out;
    out["space"] = d.space().name();
    out["probabilities"] = d.probabilities();
    out["z"] = d.z();
    return out;
}

std::vector<int> as_ints(const Configuration& c) {
    return std::visit([](const auto& v) { return std::vector<int>(v.begin(), v.end()); }, c);
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Exact tables and samplers for random currents, FK, GFF, loop soups and the jump process";
    m.attr("version") = version;

    auto base = py::register_exception<LabError>(m, "LabError");
    py::register_exception<ValidationError>(m, "ValidationError", base.ptr());
    py::register_exception<ContractError>(m, "ContractError", base.ptr());
    py::register_exception<CapacityError>(m, "CapacityError", base.ptr());
    py::register_exception<InvariantError>(m, "InvariantError", base.ptr());
    py::register_exception<NumericalError>(m, "NumericalError", base.ptr());
    py::register_exception<UnsupportedError>(m, "UnsupportedError", base.ptr());
    py::register_exception<NotSuperpositionError>(m, "NotSuperpositionError", base.ptr());
    py::register_exception<DegenerateStateError>(m, "DegenerateStateError", base.ptr());
    py::register_exception<RunawayError>(m, "RunawayError", base.ptr());

    py::class_<Network>(m, "Network")
        .def(py::init(&parse_network), py::arg("json_text"))
        .def_property_readonly("vertex_count", &Network::vertex_count)
        .def_property_readonly("edge_count", &Network::edge_count)
        .def_property_readonly("beta", [](const Network& n) { return n.beta(); })
        .def("to_json", [](const Network& n) { return network_to_json(n).dump(); });

    m.def("exact_measure", [](const Network& n, const std::string& kind) {
        return table(exact_measure(n, parse_model_kind(kind)));
    }, py::arg("network"), py::arg("kind"));

    m.def("partition_functions", [](const Network& n) {
        const auto z = partition_functions(n);
        py::dict out;
        out["ising"] = z.ising;
        out["current"] = z.current;
        out["fk"] = z.fk;
        return out;
    });

    m.def("two_point", &two_point_exact, py::arg("network"), py::arg("x"), py::arg("y"));

    m.def("coupling_tv", [](const Network& n) {
        const auto sup = superpose_max(exact_measure(n, ModelKind::CurrentTrace), bernoulli_probabilities(n));
        return tv_distance(sup, exact_measure(n, ModelKind::FK));
    }, "Total variation between FK and the superposed current trace.");

    m.def("reconstruct_trace_law", [](const Network& n) {
        return table(reconstruct_trace_law(exact_measure(n, ModelKind::FK), bernoulli_probabilities(n)));
    });

    m.def("sign_assignment_count", [](const Network& n, const EdgeConfig& open) {
        return sign_assignment_count(n, open);
    });

    m.def("sample_configuration", [](const Network& n, const std::string& kind, std::uint64_t seed,
                                     std::uint64_t stream) {
        return as_ints(sample_configuration(n, parse_model_kind(kind), {seed, stream}));
    }, py::arg("network"), py::arg("kind"), py::arg("seed"), py::arg("stream") = 0);

    m.def("coupled_fk_sample", [](const Network& n, std::uint64_t seed, std::uint64_t stream) {
        const auto s = coupled_fk_sample(n, {seed, stream});
        py::dict out;
        out["current"] = s.current;
        out["bernoulli"] = std::vector<int>(s.bernoulli.begin(), s.bernoulli.end());
        out["superposed"] = std::vector<int>(s.superposed.begin(), s.superposed.end());
        return out;
    }, py::arg("network"), py::arg("seed"), py::arg("stream") = 0);

    m.def("green_matrix", &green_matrix);

    m.def("sample_field", [](const Network& n, std::uint64_t seed, std::uint64_t stream) {
        return sample_field(n, {seed, stream}).h;
    }, py::arg("network"), py::arg("seed"), py::arg("stream") = 0);

    m.def("sample_soup_fields", [](const Network& n, double alpha, std::size_t cutoff, std::uint64_t seed,
                                   std::uint64_t stream) {
        const auto f = fields(sample_soup(n, alpha, cutoff, {seed, stream}));
        py::dict out;
        out["occupation"] = f.occupation;
        out["crossings"] = f.crossings;
        return out;
    }, py::arg("network"), py::arg("alpha"), py::arg("cutoff"), py::arg("seed"), py::arg("stream") = 0);

    m.def("run_vrjp", [](const Network& n, const std::vector<std::size_t>& order, std::uint64_t seed,
                         std::uint64_t stream) {
        return run_vrjp(n, order, {seed, stream});
    }, py::arg("network"), py::arg("order"), py::arg("seed"), py::arg("stream") = 0);

    m.def("run_suite", [](const Network& n, const std::string& config_text) {
        const auto report = [&] {
            py::gil_scoped_release release;
            return run_suite(n, config_from_json(json::parse(config_text)));
        }();
        return report.to_json().dump();
    }, py::arg("network"), py::arg("config_json"));
}
