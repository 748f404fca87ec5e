#pragma once

// Colored weighted graphs, their adjacency (pair) matrices, perfect matchings
// and the discrete-variable state a set of matchings postselects.

#include <map>
#include <string>
#include <vector>

#include "pairsynth/core.hpp"

namespace pairsynth {

/// Edge joining (u, color_u) and (v, color_v). Monochromatic edges have
/// color_u == color_v.
struct Edge {
  std::string u;
  std::string color_u;
  std::string v;
  std::string color_v;
  Complex weight;

  friend bool operator==(const Edge&, const Edge&) = default;
};

class ColoredGraph {
 public:
  ColoredGraph() = default;
  /// Validates: known labels, no self-loops, nonzero finite weights, and no
  /// duplicate (u, color_u, v, color_v) key up to endpoint swap.
  ColoredGraph(std::vector<std::string> vertices,
               std::vector<std::string> colors, std::vector<Edge> edges);

  const std::vector<std::string>& vertices() const { return vertices_; }
  const std::vector<std::string>& colors() const { return colors_; }
  const std::vector<Edge>& edges() const { return edges_; }

  std::size_t vertex_index(const std::string& v) const;
  std::size_t color_index(const std::string& c) const;

  /// Externals = vertices, internals = colors, in declaration order.
  ModeSpace mode_space() const { return ModeSpace(vertices_, colors_); }

  /// Copy with every weight multiplied by `factor`.
  ColoredGraph scaled(Complex factor) const;

  friend bool operator==(const ColoredGraph&, const ColoredGraph&) = default;

 private:
  std::vector<std::string> vertices_;
  std::vector<std::string> colors_;
  std::vector<Edge> edges_;
};

/// Indices into ColoredGraph::edges(), ordered by canonical edge key.
struct Matching {
  std::vector<std::size_t> edges;

  friend bool operator==(const Matching&, const Matching&) = default;
  friend auto operator<=>(const Matching&, const Matching&) = default;
};

/// Superposition of qudit kets. Keys hold one logical value per qudit.
class DVState {
 public:
  using Ket = std::vector<int>;

  DVState() = default;
  DVState(int dimension, int num_qudits);

  int dimension() const { return dimension_; }
  int num_qudits() const { return num_qudits_; }
  const std::map<Ket, Complex>& amplitudes() const { return amps_; }
  bool empty() const { return amps_.empty(); }

  /// Coherently adds to a ket's amplitude; entries that become exactly zero
  /// are removed.
  void add(const Ket& ket, Complex amplitude);
  Complex amplitude(const Ket& ket) const;

  double norm() const;
  /// Returns a copy with unit norm. Throws DomainError on the zero state.
  DVState normalized() const;

  /// Drops kets with |amp| <= rel_tol * max|amp|.
  DVState pruned(double rel_tol) const;

  /// e.g. "0.57735|0000> + 0.57735|1111>"
  std::string to_string(int precision = 6) const;

 private:
  int dimension_ = 0;
  int num_qudits_ = 0;
  std::map<Ket, Complex> amps_;
};

/// Raised when a graph has no perfect matching (or all contributions cancel),
/// or when postselection leaves nothing.
class EmptyStateError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Raised for matrices that cannot be read as a loop-free graph.
class UnsupportedError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

PairMatrix graph_to_adjacency(const ColoredGraph& g, const ModeSpace& space);
inline PairMatrix graph_to_adjacency(const ColoredGraph& g) {
  return graph_to_adjacency(g, g.mode_space());
}

/// Inverse of graph_to_adjacency: one edge per nonzero upper-triangle entry,
/// oriented (lower flat index, higher flat index), in row-major order.
ColoredGraph adjacency_to_graph(const PairMatrix& m, const ModeSpace& space);

/// Exhaustive, duplicate-free, lexicographic in canonical edge order. Odd or
/// zero vertex counts give an empty list.
std::vector<Matching> enumerate_perfect_matchings(const ColoredGraph& g);

/// Unnormalized amplitudes: each matching contributes the product of 2*w
/// over its edges, which is the coefficient the lowest-order squeezed-state
/// term carries. Kets are keyed through `enc`.
DVState matching_amplitudes(const ColoredGraph& g, const Encoding& enc);

/// Normalized state induced by the perfect matchings.
DVState state_from_matchings(const ColoredGraph& g, const Encoding& enc);

}  // namespace pairsynth
