#include "pairsynth/cli.hpp"

#include <cmath>
#include <functional>

#include <CLI11.hpp>

#include "pairsynth/io.hpp"
#include "pairsynth/squeezed.hpp"
#include "pairsynth/synth.hpp"

namespace pairsynth {

namespace {

Json state_to_json(const DVState& s) {
  Json amps = Json::array();
  for (const auto& [ket, a] : s.amplitudes()) {
    std::string k;
    for (int v : ket) k += std::to_string(v);
    amps.push_back({{"ket", k}, {"re", a.real()}, {"im", a.imag()}});
  }
  return amps;
}

Json fock_to_json(const FockTerm& t, const ModeSpace& space) {
  Json occ = Json::array();
  for (const auto& [m, n] : t.occupations) {
    const ModeLabel l = space.label(m);
    occ.push_back({{"mode", Json::array({l.external, l.internal})}, {"n", n}});
  }
  return Json{{"occupations", occ},
              {"photons", t.photons()},
              {"re", t.amplitude.real()},
              {"im", t.amplitude.imag()}};
}

PairMatrix scaled_adjacency(const ColoredGraph& g, std::optional<double> gain) {
  const PairMatrix beta = graph_to_adjacency(g);
  if (!gain) return beta;
  if (!(*gain > 0.0)) throw DomainError("gain must be positive");
  if (beta.frobenius() == 0.0) throw EmptyStateError("graph has no edges");
  return beta.scaled(std::sqrt(*gain) / beta.frobenius());
}

void warn_gain(const PairMatrix& beta, std::ostream& err) {
  if (auto w = low_gain_warning(beta)) err << "warning: " << *w << "\n";
}

// Maps library exceptions to exit codes.
int guarded(std::ostream& out, std::ostream& err, const std::function<int()>& body) {
  try {
    return body();
  } catch (const OverConstrainedError& e) {
    out << canonical_dump(over_constraint_to_json(e.report()));
    err << "error: " << e.what() << "\n";
    return kExitOverConstrained;
  } catch (const EmptyStateError& e) {
    err << "error: " << e.what() << "\n";
    return kExitEmpty;
  } catch (const ParseError& e) {
    err << "error: " << e.what() << "\n";
    return kExitInputError;
  } catch (const DomainError& e) {
    err << "error: " << e.what() << "\n";
    return kExitInputError;
  } catch (const UnsupportedError& e) {
    err << "error: " << e.what() << "\n";
    return kExitInputError;
  }
}

}  // namespace

int cmd_matchings(const std::string& graph_path, std::ostream& out,
                  std::ostream& err) {
  return guarded(out, err, [&] {
    const GraphFile gf = load_graph_file(graph_path);
    const auto matchings = enumerate_perfect_matchings(gf.graph);
    if (matchings.empty()) throw EmptyStateError("graph has no perfect matching");
    const DVState state = state_from_matchings(gf.graph, gf.encoding);
    Json list = Json::array();
    for (const auto& m : matchings) {
      Json edges = Json::array();
      for (std::size_t idx : m.edges) {
        const Edge& e = gf.graph.edges()[idx];
        edges.push_back({{"u", e.u}, {"color_u", e.color_u}, {"v", e.v},
                         {"color_v", e.color_v}});
      }
      list.push_back(std::move(edges));
    }
    out << canonical_dump(Json{{"count", matchings.size()},
                               {"matchings", list},
                               {"state", state_to_json(state)},
                               {"state_text", state.to_string()}});
    return int(kExitOk);
  });
}

int cmd_simulate(const SimulateArgs& args, std::ostream& out, std::ostream& err) {
  return guarded(out, err, [&] {
    const GraphFile gf = load_graph_file(args.graph_path);
    const ModeSpace space = gf.graph.mode_space();
    const PairMatrix beta = scaled_adjacency(gf.graph, args.gain);
    warn_gain(beta, err);
    const int lowest = static_cast<int>(space.num_externals() / 2);
    const int order = args.order.value_or(lowest);
    if (order < 0) throw DomainError("--order must be nonnegative");

    const auto kept =
        postselect_coincidence(to_fock(expand_squeezed_state(beta, order)), space);
    if (kept.empty()) {
      throw EmptyStateError("no term up to order " + std::to_string(order) +
                            " survives coincidence postselection");
    }
    Json terms = Json::array();
    for (const auto& t : kept) terms.push_back(fock_to_json(t, space));

    Json report{{"gain", beta.squared_norm()},
                {"order", order},
                {"postselected_terms", terms}};
    if (args.contamination && order < lowest) {
      throw DomainError("--contamination needs --order >= " + std::to_string(lowest));
    }
    PostselectionOptions po;
    po.contamination = args.contamination;
    const PostselectedState ps = postselected_dv_state(beta, space, gf.encoding, po);
    report["state"] = state_to_json(ps.state);
    report["state_text"] = ps.state.to_string();
    report["state_order"] = ps.order;
    report["contamination"] = ps.contamination ? Json(*ps.contamination) : Json(nullptr);
    out << canonical_dump(report);
    return int(kExitOk);
  });
}

int cmd_synth(const SynthArgs& args, std::ostream& out, std::ostream& err) {
  return guarded(out, err, [&] {
    const GraphFile gf = load_graph_file(args.graph_path);
    std::optional<Partition> partition;
    if (args.partition_path) {
      partition = load_partition_file(*args.partition_path, gf.graph.mode_space());
    }
    SynthOptions opts;
    opts.target_gain = args.gain;
    opts.diagonal_sources = args.diagonal_sources;
    opts.contamination = args.contamination;
    const DeviceDesign d = synthesize(gf.graph, gf.encoding, partition, opts);
    if (d.diagnostics.warning) err << "warning: " << *d.diagnostics.warning << "\n";
    write_json_file(args.output_path, design_to_json(d));
    Json blocks = Json::object();
    for (std::size_t g = 0; g < d.partition.num_groups(); ++g) {
      blocks[d.partition.name(g)] = d.partition.members(g).size();
    }
    out << canonical_dump(Json{{"status", "ok"},
                               {"output", args.output_path},
                               {"sources", d.sources.size()},
                               {"block_sizes", blocks},
                               {"diagnostics", design_to_json(d)["diagnostics"]}});
    return int(kExitOk);
  });
}

int cmd_verify(const std::string& design_path, const std::string& graph_path,
               std::ostream& out, std::ostream& err) {
  return guarded(out, err, [&] {
    DeviceDesign d = load_design_file(design_path);
    const GraphFile gf = load_graph_file(graph_path);
    if (!(d.space == gf.graph.mode_space())) {
      throw ParseError(design_path + ": modes do not match " + graph_path);
    }
    d.encoding = gf.encoding;
    d.beta = graph_to_adjacency(gf.graph).scaled(d.scale);
    const DVState target = state_from_matchings(gf.graph, gf.encoding);
    const Diagnostics diag = verify_design(d, target);
    const bool pass = diag.fidelity >= 1.0 - kVerifyFidelityTolerance &&
                      diag.unitarity_residual <= kVerifyResidualTolerance &&
                      diag.reconstruction_residual <= kVerifyResidualTolerance;
    out << canonical_dump(Json{{"fidelity", diag.fidelity},
                               {"unitarity_residual", diag.unitarity_residual},
                               {"reconstruction_residual", diag.reconstruction_residual},
                               {"gain", diag.gain},
                               {"pass", pass}});
    if (!pass) err << "verification failed\n";
    return int(pass ? kExitOk : kExitVerificationFailed);
  });
}

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Design and verify photon-pair source circuits from colored graphs",
               "pairsynth"};
  app.require_subcommand(1);

  std::string graph, design;
  auto* matchings = app.add_subcommand("matchings", "List perfect matchings and the induced state");
  matchings->add_option("graph", graph, "Graph file")->required();

  SimulateArgs sim;
  auto* simulate = app.add_subcommand("simulate", "Expand the squeezed state and postselect");
  simulate->add_option("graph", sim.graph_path, "Graph file")->required();
  simulate->add_option("--order", sim.order, "Highest number of pairs");
  simulate->add_flag("--contamination", sim.contamination, "Report the contamination ratio");
  simulate->add_option("--gain", sim.gain, "Rescale weights so |beta|^2 = gain");

  SynthArgs syn;
  bool unconstrained = false;
  double gain = 0.01;
  auto* synth = app.add_subcommand("synth", "Synthesize a source configuration and circuit");
  synth->add_option("graph", syn.graph_path, "Graph file")->required();
  auto* part = synth->add_option("--partition", syn.partition_path, "Partition file");
  auto* unc = synth->add_flag("--unconstrained", unconstrained, "Use an arbitrary unitary");
  part->excludes(unc);
  synth->add_option("--gain", gain, "Target |beta|^2")->capture_default_str();
  synth->add_flag("--diagonal-sources", syn.diagonal_sources,
                  "Require one source per pair of waveguides");
  synth->add_flag("--contamination", syn.contamination, "Report the contamination ratio");
  synth->add_option("-o,--output", syn.output_path, "Design file to write")->required();

  auto* verify = app.add_subcommand("verify", "Check a design against its graph");
  verify->add_option("design", design, "Design file")->required();
  verify->add_option("graph", graph, "Graph file")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitInputError;
  }

  if (matchings->parsed()) return cmd_matchings(graph, out, err);
  if (simulate->parsed()) return cmd_simulate(sim, out, err);
  if (synth->parsed()) {
    if (!syn.partition_path && !unconstrained) {
      err << "error: synth needs --partition FILE or --unconstrained\n";
      return kExitInputError;
    }
    syn.gain = gain;
    return cmd_synth(syn, out, err);
  }
  return cmd_verify(design, graph, out, err);
}

}  // namespace pairsynth
