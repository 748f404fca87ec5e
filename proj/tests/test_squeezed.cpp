#include <doctest.h>

#include <numeric>
#include <random>

#include "oracles.hpp"
#include "pairsynth/graph.hpp"
#include "pairsynth/squeezed.hpp"
#include "pairsynth/synth.hpp"

using namespace pairsynth;

namespace {

using PairKey = std::vector<std::pair<std::size_t, std::size_t>>;

std::map<PairKey, Complex> by_pairs(const std::vector<OperatorTerm>& terms) {
  std::map<PairKey, Complex> out;
  for (const auto& t : terms) out[t.pairs] += t.coefficient;
  return out;
}

std::pair<std::size_t, std::size_t> pair_of(const ModeSpace& s, const char* u,
                                             const char* cu, const char* v,
                                             const char* cv) {
  return std::minmax(s.index(u, cu), s.index(v, cv));
}

}  // namespace

TEST_CASE("vacuum order") {
  const auto terms = expand_squeezed_state(PairMatrix::from_upper(2, {{0, 1, 0.1}}), 0);
  REQUIRE(terms.size() == 1);
  CHECK(terms[0].pairs.empty());
  CHECK(terms[0].coefficient == Complex(1.0, 0.0));
  CHECK_THROWS_AS(expand_squeezed_state(PairMatrix(2), -1), DomainError);
}

TEST_CASE("qubit GHZ expansion coefficients at unit weight") {
  const Fixture f = builtin_ghz_qubit();
  const ModeSpace s = f.graph.mode_space();
  const PairMatrix beta = graph_to_adjacency(f.graph);
  const auto e1 = pair_of(s, "aS", "0", "aI", "0");
  const auto e2 = pair_of(s, "aI", "1", "bS", "1");
  const auto e3 = pair_of(s, "bS", "0", "bI", "0");
  const auto e4 = pair_of(s, "bI", "1", "aS", "1");
  const std::vector<std::pair<std::size_t, std::size_t>> edges{e1, e2, e3, e4};

  const auto order1 = by_pairs(expand_order(beta, 1));
  CHECK(order1.size() == 4);
  for (const auto& e : edges) CHECK(order1.at({e}) == Complex(2.0, 0.0));

  const auto order2 = by_pairs(expand_order(beta, 2));
  CHECK(order2.size() == 10);
  for (std::size_t a = 0; a < 4; ++a) {
    CHECK(order2.at({edges[a], edges[a]}) == Complex(2.0, 0.0));
    for (std::size_t b = a + 1; b < 4; ++b) {
      PairKey k{edges[a], edges[b]};
      std::sort(k.begin(), k.end());
      CHECK(order2.at(k) == Complex(4.0, 0.0));
    }
  }

  const auto kept = postselect_coincidence(to_fock(expand_squeezed_state(beta, 2)), s);
  REQUIRE(kept.size() == 2);
  std::set<std::map<std::size_t, int>> expected{
      {{e1.first, 1}, {e1.second, 1}, {e3.first, 1}, {e3.second, 1}},
      {{e2.first, 1}, {e2.second, 1}, {e4.first, 1}, {e4.second, 1}}};
  std::set<std::map<std::size_t, int>> got;
  for (const auto& t : kept) {
    got.insert(t.occupations);
    CHECK(t.amplitude == Complex(4.0, 0.0));
  }
  CHECK(got == expected);
}

TEST_CASE("k = 1 coefficient is twice the pair amplitude") {
  std::mt19937_64 rng(31);
  const CMatrix a = oracle::random_symmetric(rng, 5);
  const PairMatrix beta = PairMatrix::from_full(a);
  for (const auto& t : expand_order(beta, 1)) {
    const auto [m, n] = t.pairs.front();
    const Complex want = m == n ? a(m, n) : 2.0 * a(m, n);
    CHECK(std::abs(t.coefficient - want) <= 1e-15 * std::abs(want));
  }
}

TEST_CASE("fock conversion") {
  CHECK(to_fock({}).empty());
  const Complex b(0.3, 0.2);
  const auto one = to_fock({{{{0, 1}}, 2.0 * b}});
  REQUIRE(one.size() == 1);
  CHECK(one[0].occupations == std::map<std::size_t, int>{{0, 1}, {1, 1}});
  CHECK(one[0].amplitude == 2.0 * b);

  // (a+_0 a+_1)^2 |0> = 2 |2, 2>: coefficient 2 b^2 becomes 4 b^2.
  const auto two = to_fock({{{{0, 1}, {0, 1}}, 2.0 * b * b}});
  REQUIRE(two.size() == 1);
  CHECK(two[0].occupations == std::map<std::size_t, int>{{0, 2}, {1, 2}});
  CHECK(std::abs(two[0].amplitude - 4.0 * b * b) < 1e-16);

  const auto cancel = to_fock({{{{0, 1}}, 1.0}, {{{0, 1}}, -1.0}});
  CHECK(cancel.empty());
}

TEST_CASE("expansion matches the power-series oracle") {
  std::mt19937_64 rng(32);
  for (int trial = 0; trial < 12; ++trial) {
    const Eigen::Index m = 2 + trial % 4;
    CMatrix a = 0.2 * oracle::random_symmetric(rng, m);
    if (trial % 3 == 0) a(0, 0) = 0.0;
    const int order = 3;
    const auto fock = to_fock(expand_squeezed_state(PairMatrix::from_full(a), order));
    const auto want = oracle::fock_by_power_series(a, order);
    std::map<std::vector<int>, Complex> got;
    for (const auto& t : fock) {
      std::vector<int> e(static_cast<std::size_t>(m), 0);
      for (const auto& [mode, n] : t.occupations) e[mode] = n;
      got[e] = t.amplitude;
    }
    CHECK(got.size() == want.size());
    for (const auto& [e, c] : want) {
      REQUIRE(got.count(e) == 1);
      CHECK(std::abs(got[e] - c) <= 1e-14 * std::max(1.0, std::abs(c)));
    }
  }
}

TEST_CASE("coincidence postselection") {
  const ModeSpace s({"a", "b"}, {"0", "1"});
  FockTerm both{{{s.index("a", "0"), 1}, {s.index("b", "1"), 1}}, 1.0};
  FockTerm one_side{{{s.index("a", "0"), 1}, {s.index("a", "1"), 1}}, 1.0};
  FockTerm doubled{{{s.index("a", "0"), 2}}, 1.0};
  const auto kept = postselect_coincidence({both, one_side, doubled}, s);
  REQUIRE(kept.size() == 1);
  CHECK(kept[0].occupations == both.occupations);

  // Order 1 never covers four externals.
  const Fixture f = builtin_ghz_qubit();
  CHECK(postselect_coincidence(to_fock(expand_order(graph_to_adjacency(f.graph), 1)),
                               f.graph.mode_space())
            .empty());
}

TEST_CASE("postselected fixture states") {
  for (const Fixture& f : {builtin_ghz_qutrit(), builtin_ghz_qubit()}) {
    const PairMatrix beta = graph_to_adjacency(f.graph.scaled(0.05));
    const auto ps = postselected_dv_state(beta, f.graph.mode_space(), f.encoding);
    CHECK(ps.order == 2);
    CHECK(fidelity(ps.state, f.target) >= 1.0 - 1e-12);
  }
  const Fixture q = builtin_ghz_qutrit();
  const auto ps = postselected_dv_state(graph_to_adjacency(q.graph),
                                        q.graph.mode_space(), q.encoding);
  for (int v = 0; v < 3; ++v) {
    CHECK(std::abs(ps.state.amplitude({v, v, v, v}) - 1.0 / std::sqrt(3.0)) < 1e-15);
  }

  // Equal weights on L_a4.
  const double a = 1.0 / std::sqrt(3.0);
  Fixture l = builtin_l_a4({a, a, a});
  std::vector<Edge> edges = l.graph.edges();
  for (auto& e : edges) e.weight = 0.1;
  const ColoredGraph flat(l.graph.vertices(), l.graph.colors(), edges);
  const auto pl = postselected_dv_state(graph_to_adjacency(flat), flat.mode_space(),
                                        l.encoding);
  CHECK(fidelity(pl.state, state_from_matchings(flat, l.encoding)) >= 1.0 - 1e-12);
  CHECK(pl.state.amplitudes().size() == 3);
}

TEST_CASE("postselection errors") {
  ColoredGraph odd({"a", "b", "c"}, {"0"}, {{"a", "0", "b", "0", 1.0}});
  CHECK_THROWS_AS(postselected_dv_state(graph_to_adjacency(odd), odd.mode_space(),
                                        Encoding::identity(odd.mode_space())),
                  DomainError);
  ColoredGraph sparse({"a", "b", "c", "d"}, {"0"}, {{"a", "0", "b", "0", 1.0}});
  CHECK_THROWS_AS(postselected_dv_state(graph_to_adjacency(sparse), sparse.mode_space(),
                                        Encoding::identity(sparse.mode_space())),
                  EmptyStateError);
}

TEST_CASE("contamination at gain 0.01") {
  // Expected ratios from a hand count of the order-3 terms that reach every
  // external: 16 c^2 with c^2 = gain / (2 * edges) for the qubit GHZ graph;
  // 0.02444... for the qutrit graph. Checked here against the library.
  PostselectionOptions po;
  po.contamination = true;
  const Fixture q2 = builtin_ghz_qubit();
  const PairMatrix b2 = graph_to_adjacency(q2.graph).scaled(std::sqrt(0.01 / 8.0));
  const auto r2 = postselected_dv_state(b2, q2.graph.mode_space(), q2.encoding, po);
  REQUIRE(r2.contamination);
  CHECK(*r2.contamination == doctest::Approx(0.02).epsilon(1e-12));

  const Fixture q3 = builtin_ghz_qutrit();
  const PairMatrix b3 = graph_to_adjacency(q3.graph).scaled(std::sqrt(0.01 / 12.0));
  const auto r3 = postselected_dv_state(b3, q3.graph.mode_space(), q3.encoding, po);
  REQUIRE(r3.contamination);
  CHECK(*r3.contamination == doctest::Approx(0.022 / 0.9).epsilon(1e-12));
}

TEST_CASE("contamination oracle from the power series") {
  // Order-(k+1) postselected weight over order-k weight, using the
  // independent expansion.
  for (const Fixture& f : {builtin_ghz_qubit(), builtin_ghz_qutrit()}) {
  const ModeSpace s = f.graph.mode_space();
  const PairMatrix b = graph_to_adjacency(f.graph).scaled(0.03);
  const auto series = oracle::fock_by_power_series(b.matrix(), 3);
  double w2 = 0.0, w3 = 0.0;
  for (const auto& [e, c] : series) {
    std::vector<int> per(s.num_externals(), 0);
    int total = 0;
    for (std::size_t m = 0; m < e.size(); ++m) {
      per[s.external_of(m)] += e[m];
      total += e[m];
    }
    if (std::any_of(per.begin(), per.end(), [](int n) { return n == 0; })) continue;
    if (total == 4) w2 += std::norm(c);
    if (total == 6) w3 += std::norm(c);
  }
  PostselectionOptions po;
  po.contamination = true;
  const auto r = postselected_dv_state(b, s, f.encoding, po);
  CHECK(*r.contamination == doctest::Approx(w3 / w2).epsilon(1e-12));
  CHECK(r.weight == doctest::Approx(w2).epsilon(1e-12));
  }
}

TEST_CASE("order-k coefficient mass is bounded") {
  std::mt19937_64 rng(33);
  for (int trial = 0; trial < 10; ++trial) {
    const CMatrix a = 0.3 * oracle::random_symmetric(rng, 4);
    const PairMatrix beta = PairMatrix::from_full(a);
    double fact = 1.0;
    for (int k = 1; k <= 3; ++k) {
      fact *= k;
      double mass = 0.0;
      for (const auto& t : expand_order(beta, k)) mass += std::norm(t.coefficient);
      CHECK(mass <= std::pow(beta.squared_norm(), k) / fact * std::pow(4.0, k) + 1e-15);
    }
  }
}

TEST_CASE("internal relabeling within one external") {
  // Swapping the two colors on vertex bI, together with its logical values,
  // leaves the postselected state unchanged up to the relabeled kets.
  const Fixture f = builtin_ghz_qubit();
  const ModeSpace s = f.graph.mode_space();
  const PairMatrix beta = graph_to_adjacency(f.graph).scaled(0.1);
  const auto base = postselected_dv_state(beta, s, f.encoding);

  std::vector<std::size_t> perm(s.size());
  std::iota(perm.begin(), perm.end(), 0);
  std::swap(perm[s.index("bI", "0")], perm[s.index("bI", "1")]);
  CMatrix p = CMatrix::Zero(static_cast<Eigen::Index>(s.size()),
                            static_cast<Eigen::Index>(s.size()));
  for (std::size_t m = 0; m < s.size(); ++m) {
    p(static_cast<Eigen::Index>(perm[m]), static_cast<Eigen::Index>(m)) = 1.0;
  }
  const PairMatrix moved = PairMatrix::from_full(p * beta.matrix() * p.transpose());
  const auto after = postselected_dv_state(moved, s, f.encoding);
  const int q = f.encoding.qudit("bI");
  DVState relabeled(after.state.dimension(), after.state.num_qudits());
  for (const auto& [ket, amp] : after.state.amplitudes()) {
    auto k = ket;
    k[static_cast<std::size_t>(q)] = 1 - k[static_cast<std::size_t>(q)];
    relabeled.add(k, amp);
  }
  CHECK(fidelity(relabeled, base.state) >= 1.0 - 1e-12);
}

TEST_CASE("fidelity") {
  DVState bell(2, 2), zero(2, 2), one(2, 2);
  bell.add({0, 0}, 1.0);
  bell.add({1, 1}, 1.0);
  zero.add({0, 0}, 1.0);
  one.add({1, 1}, Complex(0.0, 3.0));
  CHECK(fidelity(bell, bell) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(fidelity(bell, zero) == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(fidelity(zero, one) == 0.0);
  CHECK_THROWS_AS(fidelity(bell, DVState(3, 2)), DomainError);
}

TEST_CASE("low gain warning") {
  CHECK_FALSE(low_gain_warning(PairMatrix::from_upper(2, {{0, 1, 0.2}})));
  CHECK(low_gain_warning(PairMatrix::from_upper(2, {{0, 1, 0.3}})));
}
