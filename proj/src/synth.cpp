#include "pairsynth/synth.hpp"

#include <algorithm>
#include <cmath>

#include "pairsynth/squeezed.hpp"

namespace pairsynth {

namespace {

constexpr double kSourceCut = 1e-12;
constexpr double kReconstructionZeroTol = 1e-13;

Edge edge(const std::string& u, const std::string& cu, const std::string& v,
          const std::string& cv, Complex w) {
  return {u, cu, v, cv, w};
}

const std::vector<std::string> kPathVertices{"aS", "aI", "bS", "bI"};

Fixture make_fixture(std::string name, ColoredGraph g, Encoding enc) {
  Fixture f;
  f.name = std::move(name);
  f.partition = frequency_partition(g.mode_space());
  f.target = state_from_matchings(g, enc);
  f.graph = std::move(g);
  f.encoding = std::move(enc);
  return f;
}

Encoding color_encoding(const std::map<std::string, int>& qudits,
                        const std::vector<std::string>& colors) {
  std::map<std::string, int> logical;
  for (std::size_t c = 0; c < colors.size(); ++c) {
    logical[colors[c]] = static_cast<int>(c);
  }
  return Encoding(qudits, logical);
}

// Entries at or below kSourceCut * max|entry| become exact zeros.
PairMatrix chop(const PairMatrix& m) {
  std::vector<PairEntry> kept = m.upper_entries(kSourceCut);
  return PairMatrix::from_upper(m.dim(), kept);
}

}  // namespace

Partition frequency_partition(const ModeSpace& space) {
  std::vector<std::string> ranges;
  for (const auto& ext : space.externals()) {
    if (ext.size() < 2) {
      throw DomainError("external '" + ext +
                        "' is not named <path><range>, e.g. \"aS\"");
    }
    const std::string r = ext.substr(ext.size() - 1);
    if (std::find(ranges.begin(), ranges.end(), r) == ranges.end()) {
      ranges.push_back(r);
    }
  }
  std::vector<std::string> order;
  for (const auto& r : ranges) {
    for (const auto& c : space.internals()) order.push_back(r + c);
  }
  std::vector<std::string> group_of(space.size());
  for (std::size_t m = 0; m < space.size(); ++m) {
    const ModeLabel l = space.label(m);
    group_of[m] = l.external.substr(l.external.size() - 1) + l.internal;
  }
  return Partition(order, group_of);
}

Fixture builtin_ghz_qutrit() {
  const std::vector<std::string> colors{"0", "1", "2"};
  ColoredGraph g(kPathVertices, colors,
                 {edge("aS", "0", "aI", "0", 1.0), edge("bS", "0", "bI", "0", 1.0),
                  edge("aS", "1", "bI", "1", 1.0), edge("aI", "1", "bS", "1", 1.0),
                  edge("aS", "2", "bS", "2", 1.0), edge("aI", "2", "bI", "2", 1.0)});
  return make_fixture(
      "ghz_qutrit", std::move(g),
      color_encoding({{"aS", 0}, {"aI", 1}, {"bS", 2}, {"bI", 3}}, colors));
}

Fixture builtin_ghz_qubit() {
  const std::vector<std::string> colors{"0", "1"};
  ColoredGraph g(kPathVertices, colors,
                 {edge("aS", "0", "aI", "0", 1.0), edge("bS", "0", "bI", "0", 1.0),
                  edge("aI", "1", "bS", "1", 1.0), edge("bI", "1", "aS", "1", 1.0)});
  return make_fixture(
      "ghz_qubit", std::move(g),
      color_encoding({{"aS", 0}, {"aI", 1}, {"bS", 2}, {"bI", 3}}, colors));
}

Fixture builtin_l_a4(const std::array<Complex, 3>& alphas) {
  double norm2 = 0.0;
  double abs_sum = 0.0;
  for (const Complex& a : alphas) {
    if (!std::isfinite(a.real()) || !std::isfinite(a.imag())) {
      throw DomainError("non-finite amplitude");
    }
    norm2 += std::norm(a);
    abs_sum += std::abs(a);
  }
  if (std::abs(norm2 - 1.0) > 1e-9) {
    throw DomainError("amplitudes must satisfy sum |a|^2 = 1");
  }
  const auto [a1, a2, a3] = alphas;
  const double s = std::sqrt(abs_sum / 12.0);
  const Complex zero{};

  std::vector<Edge> edges;
  if (a1 != zero || a3 != zero) edges.push_back(edge("bI", "0", "bS", "0", s));
  if (a2 != zero) {
    edges.push_back(edge("aS", "0", "bI", "1", a2 / (4.0 * s)));
  }
  if (a1 != zero) edges.push_back(edge("aS", "0", "aI", "1", a1 / (4.0 * s)));
  if (a3 != zero) edges.push_back(edge("aI", "0", "aS", "1", a3 / (4.0 * s)));
  if (a2 != zero) edges.push_back(edge("aI", "0", "bS", "1", s));

  const std::vector<std::string> colors{"0", "1"};
  ColoredGraph g(kPathVertices, colors, std::move(edges));
  return make_fixture(
      "l_a4", std::move(g),
      color_encoding({{"aS", 0}, {"bI", 1}, {"bS", 2}, {"aI", 3}}, colors));
}

std::vector<Source> source_list(const PairMatrix& beta_bar, const ModeSpace& space) {
  if (beta_bar.dim() != space.size()) {
    throw DomainError("source matrix dimension does not match mode space");
  }
  std::vector<Source> out;
  for (const auto& e : beta_bar.upper_entries()) {
    out.push_back({e.row, e.col, space.label(e.row), space.label(e.col), e.value});
  }
  return out;
}

DeviceDesign synthesize(const ColoredGraph& graph, const Encoding& encoding,
                        const std::optional<Partition>& partition,
                        const SynthOptions& options) {
  const ModeSpace space = graph.mode_space();
  encoding.check_covers(space);
  const DVState target = state_from_matchings(graph, encoding);
  const PairMatrix raw = graph_to_adjacency(graph, space);
  if (options.target_gain && !(*options.target_gain > 0.0)) {
    throw DomainError("target gain must be positive");
  }

  // Solve at unit norm; the gain only scales betabar.
  const double norm = raw.frobenius();
  const PairMatrix unit = raw.scaled(1.0 / norm);
  const double amplitude = options.target_gain ? std::sqrt(*options.target_gain) : norm;

  BlockSolution sol;
  if (partition) {
    if (partition->dim() != space.size()) {
      throw DomainError("partition dimension does not match the graph's modes");
    }
    ConstrainedOptions co;
    co.diagonal_sources = options.diagonal_sources;
    co.tolerance = options.tolerance;
    SolveResult r = solve_block_constrained(unit, *partition, co);
    if (!r.ok()) throw OverConstrainedError(r.failure());
    sol = r.solution();
  } else {
    sol = solve_global(unit);
  }

  DeviceDesign d;
  d.space = space;
  d.encoding = encoding;
  d.partition = sol.partition;
  d.scale = amplitude / norm;
  d.beta = unit.scaled(amplitude);
  sol.beta_bar = chop(sol.beta_bar.scaled(amplitude));
  const CMatrix u = sol.assembled_unitary();
  sol.residual = relative_residual(
      d.beta.matrix(), u * sol.beta_bar.matrix() * u.transpose());
  d.solution = std::move(sol);
  d.sources = source_list(d.solution.beta_bar, space);
  d.diagnostics = verify_design(d, target, options.contamination);
  return d;
}

Diagnostics verify_design(const DeviceDesign& design, const DVState& target,
                          bool contamination) {
  Diagnostics diag;
  const CMatrix u = design.solution.assembled_unitary();
  const CMatrix rec = u * design.solution.beta_bar.matrix() * u.transpose();
  diag.unitarity_residual = unitarity_residual(u);
  diag.reconstruction_residual = relative_residual(design.beta.matrix(), rec);
  diag.gain = design.beta.squared_norm();
  diag.warning = low_gain_warning(design.beta);
  try {
    PostselectionOptions po;
    po.contamination = contamination;
    po.zero_tol = kReconstructionZeroTol;
    const PostselectedState ps = postselected_dv_state(
        PairMatrix::from_full(rec), design.space, design.encoding, po);
    diag.fidelity = fidelity(ps.state, target);
    diag.contamination = ps.contamination;
  } catch (const EmptyStateError&) {
    diag.fidelity = 0.0;
  } catch (const DomainError&) {
    diag.fidelity = 0.0;
  }
  return diag;
}

}  // namespace pairsynth
