#include "pairsynth/graph.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>
#include <sstream>
#include <tuple>

namespace pairsynth {

namespace {

using Endpoint = std::pair<std::size_t, std::size_t>;  // (vertex, color)
using EdgeKey = std::pair<Endpoint, Endpoint>;

EdgeKey edge_key(const ColoredGraph& g, const Edge& e) {
  Endpoint a{g.vertex_index(e.u), g.color_index(e.color_u)};
  Endpoint b{g.vertex_index(e.v), g.color_index(e.color_v)};
  if (b < a) std::swap(a, b);
  return {a, b};
}

// Edge indices sorted by canonical key.
std::vector<std::size_t> canonical_order(const ColoredGraph& g) {
  std::vector<std::size_t> order(g.edges().size());
  std::iota(order.begin(), order.end(), 0);
  std::vector<EdgeKey> keys;
  keys.reserve(order.size());
  for (const auto& e : g.edges()) keys.push_back(edge_key(g, e));
  std::sort(order.begin(), order.end(),
            [&](std::size_t a, std::size_t b) { return keys[a] < keys[b]; });
  return order;
}

}  // namespace

// ------------------------------------------------------------- ColoredGraph

ColoredGraph::ColoredGraph(std::vector<std::string> vertices,
                           std::vector<std::string> colors,
                           std::vector<Edge> edges)
    : vertices_(std::move(vertices)),
      colors_(std::move(colors)),
      edges_(std::move(edges)) {
  // ModeSpace validates label uniqueness for both lists.
  (void)ModeSpace(vertices_, colors_);
  std::set<EdgeKey> seen;
  for (const auto& e : edges_) {
    if (e.u == e.v) {
      throw DomainError("self-loop on vertex '" + e.u + "'");
    }
    if (!std::isfinite(e.weight.real()) || !std::isfinite(e.weight.imag())) {
      throw DomainError("non-finite edge weight");
    }
    if (e.weight == Complex{}) {
      throw DomainError("zero edge weight between '" + e.u + "' and '" + e.v +
                        "'");
    }
    if (!seen.insert(edge_key(*this, e)).second) {
      throw DomainError("duplicate edge between '" + e.u + "' and '" + e.v +
                        "'");
    }
  }
}

std::size_t ColoredGraph::vertex_index(const std::string& v) const {
  auto it = std::find(vertices_.begin(), vertices_.end(), v);
  if (it == vertices_.end()) {
    throw DomainError("unknown vertex '" + v + "'");
  }
  return static_cast<std::size_t>(it - vertices_.begin());
}

std::size_t ColoredGraph::color_index(const std::string& c) const {
  auto it = std::find(colors_.begin(), colors_.end(), c);
  if (it == colors_.end()) {
    throw DomainError("unknown color '" + c + "'");
  }
  return static_cast<std::size_t>(it - colors_.begin());
}

ColoredGraph ColoredGraph::scaled(Complex factor) const {
  std::vector<Edge> edges = edges_;
  for (auto& e : edges) e.weight *= factor;
  return ColoredGraph(vertices_, colors_, std::move(edges));
}

// ------------------------------------------------------------------ DVState

DVState::DVState(int dimension, int num_qudits)
    : dimension_(dimension), num_qudits_(num_qudits) {}

void DVState::add(const Ket& ket, Complex amplitude) {
  if (static_cast<int>(ket.size()) != num_qudits_) {
    throw DomainError("ket length does not match qudit count");
  }
  for (int v : ket) {
    if (v < 0 || v >= dimension_) {
      throw DomainError("ket value outside [0, d)");
    }
  }
  auto [it, inserted] = amps_.emplace(ket, amplitude);
  if (!inserted) it->second += amplitude;
  if (it->second == Complex{}) amps_.erase(it);
}

Complex DVState::amplitude(const Ket& ket) const {
  auto it = amps_.find(ket);
  return it == amps_.end() ? Complex{} : it->second;
}

double DVState::norm() const {
  double s = 0.0;
  for (const auto& [k, a] : amps_) s += std::norm(a);
  return std::sqrt(s);
}

DVState DVState::normalized() const {
  const double n = norm();
  if (n == 0.0) {
    throw DomainError("cannot normalize the zero state");
  }
  DVState out(dimension_, num_qudits_);
  for (const auto& [k, a] : amps_) out.amps_.emplace(k, a / n);
  return out;
}

DVState DVState::pruned(double rel_tol) const {
  double peak = 0.0;
  for (const auto& [k, a] : amps_) peak = std::max(peak, std::abs(a));
  DVState out(dimension_, num_qudits_);
  for (const auto& [k, a] : amps_) {
    if (std::abs(a) > rel_tol * peak) out.amps_.emplace(k, a);
  }
  return out;
}

std::string DVState::to_string(int precision) const {
  std::ostringstream os;
  os.precision(precision);
  bool first = true;
  for (const auto& [ket, a] : amps_) {
    if (!first) os << " + ";
    first = false;
    if (a.imag() == 0.0) {
      os << a.real();
    } else {
      os << "(" << a.real() << (a.imag() < 0 ? "-" : "+") << std::abs(a.imag())
         << "i)";
    }
    os << "|";
    for (int v : ket) os << v;
    os << ">";
  }
  if (first) os << "0";
  return os.str();
}

// ---------------------------------------------------------------- adjacency

PairMatrix graph_to_adjacency(const ColoredGraph& g, const ModeSpace& space) {
  std::vector<PairEntry> entries;
  std::set<std::pair<std::size_t, std::size_t>> used;
  for (const auto& e : g.edges()) {
    std::size_t a = space.index(e.u, e.color_u);
    std::size_t b = space.index(e.v, e.color_v);
    if (b < a) std::swap(a, b);
    if (!used.emplace(a, b).second) {
      throw DomainError("two edges map to the same matrix entry");
    }
    entries.push_back({a, b, e.weight});
  }
  return PairMatrix::from_upper(space.size(), entries);
}

ColoredGraph adjacency_to_graph(const PairMatrix& m, const ModeSpace& space) {
  if (m.dim() != space.size()) {
    throw DomainError("matrix dimension does not match mode space");
  }
  std::vector<Edge> edges;
  for (const auto& entry : m.upper_entries()) {
    if (space.external_of(entry.row) == space.external_of(entry.col)) {
      throw UnsupportedError(
          "entry links two modes of external '" +
          space.externals()[space.external_of(entry.row)] +
          "' (self-loop)");
    }
    const ModeLabel a = space.label(entry.row);
    const ModeLabel b = space.label(entry.col);
    edges.push_back({a.external, a.internal, b.external, b.internal, entry.value});
  }
  return ColoredGraph(space.externals(), space.internals(), std::move(edges));
}

// ---------------------------------------------------------------- matchings

namespace {

struct MatchingSearch {
  const ColoredGraph& g;
  std::vector<std::size_t> order;                   // canonical edge order
  std::vector<std::vector<std::size_t>> incident;   // vertex -> positions in order
  std::vector<std::pair<std::size_t, std::size_t>> ends;  // by original index
  std::vector<bool> covered;
  std::vector<std::size_t> chosen;
  std::vector<Matching> out;

  explicit MatchingSearch(const ColoredGraph& graph)
      : g(graph), order(canonical_order(graph)) {
    const std::size_t n = g.vertices().size();
    incident.assign(n, {});
    covered.assign(n, false);
    ends.resize(g.edges().size());
    for (std::size_t i = 0; i < g.edges().size(); ++i) {
      const auto& e = g.edges()[i];
      ends[i] = {g.vertex_index(e.u), g.vertex_index(e.v)};
    }
    for (std::size_t pos = 0; pos < order.size(); ++pos) {
      const auto [a, b] = ends[order[pos]];
      incident[a].push_back(pos);
      incident[b].push_back(pos);
    }
  }

  void run() {
    auto first_free = std::find(covered.begin(), covered.end(), false);
    if (first_free == covered.end()) {
      Matching m;
      for (std::size_t pos : chosen) m.edges.push_back(order[pos]);
      out.push_back(std::move(m));
      return;
    }
    const auto v = static_cast<std::size_t>(first_free - covered.begin());
    for (std::size_t pos : incident[v]) {
      const auto [a, b] = ends[order[pos]];
      const std::size_t other = a == v ? b : a;
      if (covered[other]) continue;
      covered[v] = covered[other] = true;
      chosen.push_back(pos);
      run();
      chosen.pop_back();
      covered[v] = covered[other] = false;
    }
  }
};

DVState accumulate_matchings(const ColoredGraph& g, const Encoding& enc,
                             bool with_pair_factor) {
  enc.check_covers(g.mode_space());
  const auto matchings = enumerate_perfect_matchings(g);
  if (matchings.empty()) {
    throw EmptyStateError("graph has no perfect matching");
  }
  DVState state(enc.dimension(), enc.num_qudits());
  for (const auto& m : matchings) {
    DVState::Ket ket(static_cast<std::size_t>(enc.num_qudits()), 0);
    Complex amp{1.0, 0.0};
    for (std::size_t idx : m.edges) {
      const Edge& e = g.edges()[idx];
      ket[static_cast<std::size_t>(enc.qudit(e.u))] = enc.logical(e.color_u);
      ket[static_cast<std::size_t>(enc.qudit(e.v))] = enc.logical(e.color_v);
      amp *= with_pair_factor ? 2.0 * e.weight : e.weight;
    }
    state.add(ket, amp);
  }
  if (state.empty()) {
    throw EmptyStateError("perfect-matching contributions cancel exactly");
  }
  return state;
}

}  // namespace

std::vector<Matching> enumerate_perfect_matchings(const ColoredGraph& g) {
  // A vertex-free graph is treated as having nothing to match.
  if (g.vertices().empty() || g.vertices().size() % 2 != 0) return {};
  MatchingSearch search(g);
  search.run();
  // The recursion already emits canonical order; sorting pins the contract.
  std::vector<std::pair<std::vector<std::size_t>, Matching>> keyed;
  std::vector<std::size_t> rank(g.edges().size());
  for (std::size_t pos = 0; pos < search.order.size(); ++pos) {
    rank[search.order[pos]] = pos;
  }
  for (auto& m : search.out) {
    std::vector<std::size_t> k;
    for (std::size_t e : m.edges) k.push_back(rank[e]);
    keyed.emplace_back(std::move(k), std::move(m));
  }
  std::sort(keyed.begin(), keyed.end(),
            [](const auto& a, const auto& b) { return a.first < b.first; });
  std::vector<Matching> out;
  out.reserve(keyed.size());
  for (auto& [k, m] : keyed) out.push_back(std::move(m));
  return out;
}

DVState matching_amplitudes(const ColoredGraph& g, const Encoding& enc) {
  return accumulate_matchings(g, enc, true);
}

DVState state_from_matchings(const ColoredGraph& g, const Encoding& enc) {
  return accumulate_matchings(g, enc, false).normalized();
}

}  // namespace pairsynth
