// measures.hpp
// Entanglement quantification for multipartite pure states:
//   cef: combinatorial entropy of a fully entangled state, half the sum of
//        the partial entropies of every nontrivial party subset;
//   entanglement_combination: the finest partition of the parties into
//        blocks such that each block factors out as a pure state and no
//        block splits further;
//   ce:  combinatorial entropy of an arbitrary pure state, the sum of cef
//        over the extracted block states.

#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "entangle/state_ops.hpp"

namespace entangle {

// Ordered partition of the parties into fully entangled blocks. `blocks`
// holds discovery order (size-ascending, lexicographic within a size);
// canonical() is the order-insensitive form used for equality.
struct EntanglementCombination {
    std::vector<PartySubset> blocks;
    int num_parties = 0;

    int block_count() const { return static_cast<int>(blocks.size()); }
    bool is_separable() const { return block_count() == num_parties; }
    bool is_fully_entangled() const { return block_count() == 1; }

    // Blocks sorted by minimum party index (parties within a block are
    // already ascending by the bitmask representation).
    EntanglementCombination canonical() const;
};

bool canonically_equal(const EntanglementCombination& a, const EntanglementCombination& b);

// "[(A3),(A1,A2),(A4,A5,A6)]" with 1-based party labels, discovery order.
std::string to_string(const EntanglementCombination& ec);

// Half the sum of subset entropies over all 2^n - 2 nontrivial subsets
// (0 for a single party). Defined for any pure state; it quantifies
// entanglement when the state is fully entangled.
double cef(const PureState& state, const Limits& limits = {}, int threads = 1);

// True iff the subset factors out as a pure state (reduced rank 1).
bool is_block_separable(const PureState& state, const PartySubset& subset, const Tolerances& tol = {});

// Finds the entanglement combination by testing blocks of size m = 1, 2, ...
// against the current remaining state and peeling off each separable block.
// Testing sizes up to floor(n'/2) suffices: if a larger block factors out,
// so does its smaller complement. Peeling a product factor leaves the
// marginals of the remaining parties unchanged, so sizes already exhausted
// need not be revisited. Throws NumericalAmbiguityError when a rank decision
// falls within a factor of 10 of the threshold.
EntanglementCombination entanglement_combination(const PureState& state, const Tolerances& tol = {},
                                                 const Limits& limits = {});

struct CEReport {
    double ce = 0.0;
    EntanglementCombination ec;
    // Per block, in discovery order: (block, cef of the extracted block state).
    std::vector<std::pair<PartySubset, double>> block_cefs;
    // Present iff detail was requested: entropy of every nontrivial subset
    // inside each block, keyed by the subset mask in original party labels.
    std::optional<std::map<std::uint64_t, double>> subset_entropies;
    Tolerances tolerances;
    bool normalized_input = false;
};

// Full analysis: EC, per-block CEF of the extracted block states, and their
// sum. `detail` records every subset entropy the sum actually used.
CEReport ce(const PureState& state, const Tolerances& tol = {}, bool detail = false,
            const Limits& limits = {}, int threads = 1);

}  // namespace entangle
