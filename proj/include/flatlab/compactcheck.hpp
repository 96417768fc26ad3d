#pragma once

#include <span>
#include <vector>

#include "flatlab/operators.hpp"

namespace flatlab {

struct OrderBoundCertificate {
  std::vector<std::size_t> selected;  // indices into the input sequence
  LpFunction limit;                   // y, the estimated cluster point
  LpFunction dominant;                // e = sum over selected |K|e_n| - y|
  std::vector<double> distances;      // ||K|e_n| - y|| per selected term
  std::vector<double> slack;          // min over atoms of (e + |y| - K|e_n|)
  double max_excess = 0.0;            // max over terms and atoms of K|e_n| - (e + |y|)
  bool holds = false;                 // max_excess <= 1e-12
};

/// Extracts from {K|e_n|} (first m terms) a subsequence with
/// ||K|e_n| - y|| < 2^-j s, where s = max ||K|e_n||| and j counts selected
/// terms, then certifies K|e_n| <= e + |y| pointwise. Candidate limits are 0,
/// each image, and the mean of the last quarter; the longest chain wins.
/// Throws NoClusterPoint when fewer than min_terms terms can be chained.
OrderBoundCertificate order_bound_witness(const LinearOperator& k,
                                          std::span<const LpFunction> e_seq, std::size_t m,
                                          std::size_t min_terms = 3);

struct DecayReport {
  std::vector<double> norms;            // ||A e_n||
  std::vector<double> dominating_norms; // ||K |e_n|||
  double head_max = 0.0;                // max over the first quarter
  double tail_max = 0.0;                // max over the last quarter
  double factor = 0.25;
  bool decays = false;                  // tail_max < factor * head_max
  bool domination_consistent = true;    // ||A e_n|| <= ||K|e_n||| for every n
};

/// Head/tail quarter comparison of a norm sequence.
DecayReport decay_profile(std::vector<double> norms, double factor = 0.25);

/// Norms of disjoint images A e_n for A dominated by a positive K.
/// Throws PreconditionError if K is not positive or does not dominate A,
/// NotDisjointImages if two images share an atom.
DecayReport disjoint_decay(const LinearOperator& a, const LinearOperator& k,
                           std::span<const LpFunction> e_seq, double factor = 0.25);

/// `terms` pairwise disjoint contiguous blocks inside atoms
/// [first, first + count), in groups of `group_size` equal-length blocks whose
/// length halves from one group to the next. Each block indicator is
/// normalised in L_p.
std::vector<LpFunction> dyadic_disjoint_indicators(const MeasureSpace& space, std::size_t first,
                                                   std::size_t count, std::size_t terms,
                                                   Exponent p, std::size_t group_size = 8);

/// Keeps k_ij only when i and j lie in the same block; the result is
/// dominated by |K| and maps functions on a block into that block.
LinearOperator block_compression(const LinearOperator& k, std::span<const MeasurableSet> blocks);

}  // namespace flatlab
