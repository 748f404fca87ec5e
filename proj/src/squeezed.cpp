#include "pairsynth/squeezed.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace pairsynth {

namespace {

constexpr double kLowGainThreshold = 0.1;

struct WeightedPair {
  std::size_t a;
  std::size_t b;
  Complex weight;
};

std::vector<WeightedPair> pair_weights(const PairMatrix& beta, double zero_tol) {
  std::vector<WeightedPair> out;
  for (const auto& e : beta.upper_entries(zero_tol)) {
    const Complex w = e.row == e.col ? e.value : 2.0 * e.value;
    out.push_back({e.row, e.col, w});
  }
  return out;
}

// Multisets of size `remaining` drawn from pairs[start..] in nondecreasing
// index order; `run` is the multiplicity of the last pair chosen.
void enumerate_multisets(const std::vector<WeightedPair>& pairs,
                         std::size_t start, int remaining, int run,
                         std::size_t last, OperatorTerm& current,
                         std::vector<OperatorTerm>& out) {
  if (remaining == 0) {
    if (current.coefficient != Complex{}) out.push_back(current);
    return;
  }
  for (std::size_t p = start; p < pairs.size(); ++p) {
    const int mult = (p == last && !current.pairs.empty()) ? run + 1 : 1;
    const Complex saved = current.coefficient;
    current.coefficient *= pairs[p].weight / static_cast<double>(mult);
    current.pairs.emplace_back(pairs[p].a, pairs[p].b);
    enumerate_multisets(pairs, p, remaining - 1, mult, p, current, out);
    current.pairs.pop_back();
    current.coefficient = saved;
  }
}

double factorial(int n) {
  double f = 1.0;
  for (int i = 2; i <= n; ++i) f *= i;
  return f;
}

}  // namespace

int FockTerm::photons() const {
  int n = 0;
  for (const auto& [m, c] : occupations) n += c;
  return n;
}

std::vector<OperatorTerm> expand_order(const PairMatrix& beta, int order,
                                       double zero_tol) {
  if (order < 0) {
    throw DomainError("expansion order must be nonnegative");
  }
  const auto pairs = pair_weights(beta, zero_tol);
  std::vector<OperatorTerm> out;
  OperatorTerm current{{}, Complex{1.0, 0.0}};
  enumerate_multisets(pairs, 0, order, 0, 0, current, out);
  return out;
}

std::vector<OperatorTerm> expand_squeezed_state(const PairMatrix& beta,
                                                int max_pairs,
                                                double zero_tol) {
  if (max_pairs < 0) {
    throw DomainError("max_pairs must be nonnegative");
  }
  std::vector<OperatorTerm> out;
  for (int k = 0; k <= max_pairs; ++k) {
    auto terms = expand_order(beta, k, zero_tol);
    out.insert(out.end(), std::make_move_iterator(terms.begin()),
               std::make_move_iterator(terms.end()));
  }
  return out;
}

std::vector<FockTerm> to_fock(const std::vector<OperatorTerm>& terms) {
  std::map<std::map<std::size_t, int>, Complex> merged;
  for (const auto& t : terms) {
    std::map<std::size_t, int> occ;
    for (const auto& [a, b] : t.pairs) {
      ++occ[a];
      ++occ[b];
    }
    // One square root of the product keeps small cases exact.
    double fact_product = 1.0;
    for (const auto& [m, n] : occ) fact_product *= factorial(n);
    merged[occ] += t.coefficient * std::sqrt(fact_product);
  }
  std::vector<FockTerm> out;
  for (auto& [occ, amp] : merged) {
    if (amp != Complex{}) out.push_back({occ, amp});
  }
  return out;
}

std::vector<FockTerm> postselect_coincidence(const std::vector<FockTerm>& terms,
                                             const ModeSpace& space) {
  std::vector<FockTerm> out;
  for (const auto& t : terms) {
    std::vector<int> per_external(space.num_externals(), 0);
    for (const auto& [m, n] : t.occupations) {
      per_external[space.external_of(m)] += n;
    }
    if (std::all_of(per_external.begin(), per_external.end(),
                    [](int n) { return n >= 1; })) {
      out.push_back(t);
    }
  }
  return out;
}

PostselectedState postselected_dv_state(const PairMatrix& beta,
                                        const ModeSpace& space,
                                        const Encoding& enc,
                                        const PostselectionOptions& options) {
  if (beta.dim() != space.size()) {
    throw DomainError("pair matrix dimension does not match mode space");
  }
  const std::size_t n_ext = space.num_externals();
  if (n_ext == 0 || n_ext % 2 != 0) {
    throw DomainError("postselected state needs an even, nonzero number of "
                      "external labels");
  }
  enc.check_covers(space);
  const int k = static_cast<int>(n_ext / 2);

  const auto kept =
      postselect_coincidence(to_fock(expand_order(beta, k, options.zero_tol)), space);

  PostselectedState result;
  result.order = k;
  result.state = DVState(enc.dimension(), enc.num_qudits());
  double multi_weight = 0.0;
  for (const auto& t : kept) {
    std::vector<int> per_external(n_ext, 0);
    bool single = true;
    for (const auto& [m, n] : t.occupations) {
      per_external[space.external_of(m)] += n;
      single = single && n == 1;
    }
    single = single && std::all_of(per_external.begin(), per_external.end(),
                                   [](int n) { return n == 1; });
    if (!single) {
      multi_weight += std::norm(t.amplitude);
      continue;
    }
    DVState::Ket ket(static_cast<std::size_t>(enc.num_qudits()), 0);
    for (const auto& [m, n] : t.occupations) {
      const ModeLabel label = space.label(m);
      ket[static_cast<std::size_t>(enc.qudit(label.external))] =
          enc.logical(label.internal);
    }
    result.weight += std::norm(t.amplitude);
    result.state.add(ket, t.amplitude);
  }
  if (result.state.empty()) {
    throw EmptyStateError("no term survives coincidence postselection at order " +
                          std::to_string(k));
  }
  result.state = result.state.normalized();

  if (options.contamination) {
    double next = 0.0;
    for (const auto& t : postselect_coincidence(
             to_fock(expand_order(beta, k + 1, options.zero_tol)), space)) {
      next += std::norm(t.amplitude);
    }
    result.contamination = (multi_weight + next) / result.weight;
  }
  return result;
}

double fidelity(const DVState& a, const DVState& b) {
  if (a.dimension() != b.dimension() || a.num_qudits() != b.num_qudits()) {
    throw DomainError("fidelity of states with different shapes");
  }
  const DVState na = a.normalized();
  const DVState nb = b.normalized();
  Complex overlap{};
  for (const auto& [ket, amp] : na.amplitudes()) {
    overlap += std::conj(amp) * nb.amplitude(ket);
  }
  return std::min(1.0, std::norm(overlap));
}

std::optional<std::string> low_gain_warning(const PairMatrix& beta) {
  const double gain = beta.squared_norm();
  if (gain <= kLowGainThreshold) return std::nullopt;
  std::ostringstream os;
  os << "|beta|^2 = " << gain << " exceeds the low-gain threshold "
     << kLowGainThreshold << "; higher-order terms are not negligible";
  return os.str();
}

}  // namespace pairsynth
