#include <pybind11/complex.h>
#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "pairsynth/decomp.hpp"
#include "pairsynth/graph.hpp"
#include "pairsynth/io.hpp"
#include "pairsynth/squeezed.hpp"
#include "pairsynth/synth.hpp"

namespace py = pybind11;
using namespace pairsynth;

namespace {

// Documents cross the boundary as JSON text; the Python wrapper decodes them.
GraphFile parse_graph(const std::string& text) { return graph_from_json(Json::parse(text)); }

std::string graph_text(const Fixture& f) {
  return graph_to_json(GraphFile{f.graph, f.encoding}).dump();
}

std::map<std::string, Complex> state_map(const DVState& s) {
  std::map<std::string, Complex> out;
  for (const auto& [ket, a] : s.amplitudes()) {
    std::string k;
    for (int v : ket) k += std::to_string(v);
    out[k] = a;
  }
  return out;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Photon-pair source circuit synthesis from colored graphs";

  static py::exception<OverConstrainedError> over(m, "OverConstrainedError", PyExc_ValueError);
  py::register_exception<EmptyStateError>(m, "EmptyStateError", PyExc_ValueError);
  py::register_exception<ParseError>(m, "ParseError", PyExc_ValueError);
  py::register_exception<DomainError>(m, "DomainError", PyExc_ValueError);
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const OverConstrainedError& e) {
      py::set_error(over, over_constraint_to_json(e.report()).dump().c_str());
    }
  });

  m.def("takagi", [](const CMatrix& a) {
    const TakagiResult t = takagi(PairMatrix::from_full(a));
    return py::make_tuple(t.unitary.matrix(), t.singulars);
  }, py::arg("a"), "Takagi factorization a = U diag(s) U^T; returns (U, s).");

  m.def("fixture_ghz_qutrit", [] { return graph_text(builtin_ghz_qutrit()); });
  m.def("fixture_ghz_qubit", [] { return graph_text(builtin_ghz_qubit()); });
  m.def("fixture_l_a4", [](Complex a1, Complex a2, Complex a3) {
    return graph_text(builtin_l_a4({a1, a2, a3}));
  });

  m.def("frequency_partition", [](const std::string& graph) {
    const GraphFile g = parse_graph(graph);
    const ModeSpace s = g.graph.mode_space();
    return partition_to_json(frequency_partition(s), s).dump();
  });

  m.def("matching_count", [](const std::string& graph) {
    return enumerate_perfect_matchings(parse_graph(graph).graph).size();
  });

  m.def("state_from_matchings", [](const std::string& graph) {
    const GraphFile g = parse_graph(graph);
    return state_map(state_from_matchings(g.graph, g.encoding));
  });

  m.def("simulate", [](const std::string& graph, std::optional<double> gain, bool contamination) {
    const GraphFile g = parse_graph(graph);
    PairMatrix beta = graph_to_adjacency(g.graph);
    if (gain) {
      if (!(*gain > 0.0)) throw DomainError("gain must be positive");
      beta = beta.scaled(std::sqrt(*gain) / beta.frobenius());
    }
    PostselectionOptions po;
    po.contamination = contamination;
    const PostselectedState ps = postselected_dv_state(beta, g.graph.mode_space(), g.encoding, po);
    py::dict out;
    out["state"] = state_map(ps.state);
    out["order"] = ps.order;
    out["contamination"] = ps.contamination;
    return out;
  }, py::arg("graph"), py::arg("gain") = py::none(), py::arg("contamination") = false);

  m.def("synthesize", [](const std::string& graph, std::optional<std::string> partition,
                         std::optional<double> gain, bool diagonal_sources, bool contamination) {
    const GraphFile g = parse_graph(graph);
    std::optional<Partition> p;
    if (partition) p = partition_from_json(Json::parse(*partition), g.graph.mode_space());
    SynthOptions o;
    o.target_gain = gain;
    o.diagonal_sources = diagonal_sources;
    o.contamination = contamination;
    return design_to_json(synthesize(g.graph, g.encoding, p, o)).dump();
  }, py::arg("graph"), py::arg("partition") = py::none(), py::arg("gain") = 0.01,
     py::arg("diagonal_sources") = false, py::arg("contamination") = false);

  m.def("verify", [](const std::string& design, const std::string& graph) {
    DeviceDesign d = design_from_json(Json::parse(design));
    const GraphFile g = parse_graph(graph);
    if (!(d.space == g.graph.mode_space())) throw ParseError("design modes do not match the graph");
    d.encoding = g.encoding;
    d.beta = graph_to_adjacency(g.graph).scaled(d.scale);
    const Diagnostics diag = verify_design(d, state_from_matchings(g.graph, g.encoding));
    py::dict out;
    out["fidelity"] = diag.fidelity;
    out["unitarity_residual"] = diag.unitarity_residual;
    out["reconstruction_residual"] = diag.reconstruction_residual;
    out["gain"] = diag.gain;
    return out;
  });
}
