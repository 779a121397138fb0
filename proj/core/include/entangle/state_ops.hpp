// state_ops.hpp
// Linear-algebra primitives over pure states: normalization, tensor products,
// partial traces, subset entropies (base-2), Schmidt ranks and rank-1 factor
// extraction.

#pragma once

#include <vector>

#include "entangle/pure_state.hpp"

namespace entangle {

// Scales raw amplitudes to unit norm. Throws ZeroStateError when the input
// norm is below 1e-12.
PureState normalize(SystemShape shape, Eigen::VectorXcd amplitudes);

// |a> (x) |b>, with a's parties ahead of (more significant than) b's.
PureState tensor_product(const PureState& a, const PureState& b, const Limits& limits = {});

// Reduced density operator of the kept parties, tr_complement(|psi><psi|).
DensityMatrix partial_trace(const PureState& state, const PartySubset& keep);

// S(rho) = -sum_i lambda_i log2 lambda_i, in bits. Eigenvalues are clamped to
// [0,1]; anything below -1e-6 trips an InvariantError.
double von_neumann_entropy(const DensityMatrix& rho);

// Partial entropy S_I of a nontrivial subset. Evaluated on the smaller of
// I and its complement, which is valid for pure states (Schmidt symmetry)
// and keeps the eigensolve at sqrt(D) scale.
double subset_entropy(const PureState& state, const PartySubset& subset);

// Number of eigenvalues of rho_subset above rank_eps * lambda_max.
int subset_rank(const PureState& state, const PartySubset& subset, const Tolerances& tol = {});

// Rank decision plus how close the decision came to the threshold. The
// decision is ambiguous when some eigenvalue lies within a factor of 10 of
// rank_eps * lambda_max.
struct RankInfo {
    int rank = 1;
    double lambda_max = 1.0;
    // Eigenvalue-to-threshold ratio of the eigenvalue nearest the threshold
    // (log-distance); infinity when the spectrum stays far away.
    double nearest_ratio = 0.0;
    bool ambiguous = false;
};
RankInfo subset_rank_info(const PureState& state, const PartySubset& subset, const Tolerances& tol = {});

// Extracts the pure state of a subset whose reduced density operator has
// rank 1 (the unit eigenvector of the top eigenvalue, global phase
// arbitrary). Throws NotSeparableError when the rank exceeds 1.
PureState reduced_pure_state(const PureState& state, const PartySubset& keep, const Tolerances& tol = {});

// Relabels parties: party j of the result is party source_party[j] of the
// input. source_party must be a permutation of 0..n-1.
PureState permute_parties(const PureState& state, const std::vector<int>& source_party);

// <a|b>; shapes must match.
Complex inner_product(const PureState& a, const PureState& b);

// |<a|b>|, insensitive to global phase.
double fidelity(const PureState& a, const PureState& b);

// Entropies of every nontrivial subset, indexed by subset mask - 1
// (masks 1 .. 2^n-2). Computed slots are independent, so extra threads only
// change who fills which slot, never the values or the summation order.
std::vector<double> subset_entropy_table(const PureState& state, int threads = 1);

}  // namespace entangle
