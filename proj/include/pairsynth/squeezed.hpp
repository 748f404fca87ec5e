#pragma once

// Brute-force verification route: expand the weakly squeezed state
// exp(sum_{m,m'} beta_{mm'} a+_m a+_m') |vac> order by order, convert to Fock
// amplitudes, apply coincidence postselection and read off the qudit state.

#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "pairsynth/core.hpp"
#include "pairsynth/graph.hpp"

namespace pairsynth {

/// One operator monomial prod_p (a+_m a+_m')^{mu_p} with its coefficient.
/// `pairs` is a sorted multiset of unordered mode pairs (first <= second).
struct OperatorTerm {
  std::vector<std::pair<std::size_t, std::size_t>> pairs;
  Complex coefficient;

  std::size_t order() const { return pairs.size(); }
};

/// Fock configuration (nonzero occupations only) and its amplitude, which
/// includes the sqrt(n!) normalization of every mode.
struct FockTerm {
  std::map<std::size_t, int> occupations;
  Complex amplitude;

  int photons() const;
};

/// All terms of order 0..max_pairs. An off-diagonal pair carries weight
/// 2*beta_{mm'} (both orderings in the exponent), a diagonal one beta_{mm};
/// a multiset with multiplicities mu has coefficient prod W^mu / prod mu!.
/// Entries with |beta| <= zero_tol * max|beta| are skipped.
std::vector<OperatorTerm> expand_squeezed_state(const PairMatrix& beta,
                                                int max_pairs,
                                                double zero_tol = 0.0);

/// Terms of exactly `order` pair insertions.
std::vector<OperatorTerm> expand_order(const PairMatrix& beta, int order,
                                       double zero_tol = 0.0);

/// Merges operator terms into Fock amplitudes, ordered by occupation map.
/// Configurations whose amplitudes cancel to zero are dropped.
std::vector<FockTerm> to_fock(const std::vector<OperatorTerm>& terms);

/// Keeps terms with at least one photon in every external group.
std::vector<FockTerm> postselect_coincidence(const std::vector<FockTerm>& terms,
                                             const ModeSpace& space);

struct PostselectionOptions {
  /// Also expand one order further and report the contamination ratio.
  bool contamination = false;
  double zero_tol = 0.0;
};

struct PostselectedState {
  DVState state;
  /// Lowest contributing order (number of externals / 2).
  int order = 0;
  /// Unnormalized weight of the single-occupancy terms at `order`.
  double weight = 0.0;
  /// (multiply-occupied postselected weight at `order` + postselected weight
  /// at order + 1) / weight.
  std::optional<double> contamination;
};

/// Lowest-order postselected qudit state of the squeezed state `beta`.
/// Throws DomainError for an odd number of externals and EmptyStateError when
/// nothing survives.
PostselectedState postselected_dv_state(const PairMatrix& beta,
                                        const ModeSpace& space,
                                        const Encoding& enc,
                                        const PostselectionOptions& options = {});

/// |<a|b>|^2 of the normalized states.
double fidelity(const DVState& a, const DVState& b);

/// Message when |beta|^2 exceeds the low-gain threshold (0.1).
std::optional<std::string> low_gain_warning(const PairMatrix& beta);

}  // namespace pairsynth
