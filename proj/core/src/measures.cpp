#include "entangle/measures.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace entangle {

namespace {

// Advances a lexicographic m-combination of indices 0..pool-1.
// Returns false once the last combination has been visited.
bool next_combination(std::vector<int>& idx, int pool) {
    const int m = static_cast<int>(idx.size());
    for (int i = m - 1; i >= 0; --i) {
        if (idx[static_cast<std::size_t>(i)] < pool - m + i) {
            ++idx[static_cast<std::size_t>(i)];
            for (int j = i + 1; j < m; ++j)
                idx[static_cast<std::size_t>(j)] = idx[static_cast<std::size_t>(j - 1)] + 1;
            return true;
        }
    }
    return false;
}

std::string ambiguity_message(const std::vector<int>& original_parties, const RankInfo& info) {
    std::ostringstream os;
    os << "separability of {";
    for (std::size_t i = 0; i < original_parties.size(); ++i)
        os << (i ? "," : "") << "A" << original_parties[i] + 1;
    os << "} is tolerance-sensitive: eigenvalue/threshold ratio " << info.nearest_ratio
       << " lies within a factor of 10 of the rank cutoff";
    return os.str();
}

}  // namespace

EntanglementCombination EntanglementCombination::canonical() const {
    EntanglementCombination out = *this;
    std::sort(out.blocks.begin(), out.blocks.end(),
              [](const PartySubset& a, const PartySubset& b) { return a.min_party() < b.min_party(); });
    return out;
}

bool canonically_equal(const EntanglementCombination& a, const EntanglementCombination& b) {
    if (a.num_parties != b.num_parties) return false;
    return a.canonical().blocks == b.canonical().blocks;
}

std::string to_string(const EntanglementCombination& ec) {
    std::ostringstream os;
    os << "[";
    for (std::size_t k = 0; k < ec.blocks.size(); ++k) {
        os << (k ? ",(" : "(");
        const std::vector<int> parties = ec.blocks[k].parties();
        for (std::size_t i = 0; i < parties.size(); ++i)
            os << (i ? "," : "") << "A" << parties[i] + 1;
        os << ")";
    }
    os << "]";
    return os.str();
}

double cef(const PureState& state, const Limits& limits, int threads) {
    const int n = state.num_parties();
    if (n == 1) return 0.0;
    if (n > limits.max_enum_parties)
        throw SizeLimitError("subset enumeration over " + std::to_string(n) +
                             " parties exceeds the configured cap");
    const std::vector<double> table = subset_entropy_table(state, threads);
    double sum = 0.0;
    for (double s : table) sum += s;
    return 0.5 * sum;
}

bool is_block_separable(const PureState& state, const PartySubset& subset, const Tolerances& tol) {
    if (!subset.is_nontrivial())
        throw TrivialSubsetError("separability needs a nonempty, proper subset");
    return subset_rank(state, subset, tol) == 1;
}

EntanglementCombination entanglement_combination(const PureState& state, const Tolerances& tol,
                                                 const Limits& limits) {
    tol.validate();
    const int n = state.num_parties();
    if (n > limits.max_enum_parties)
        throw SizeLimitError("subset enumeration over " + std::to_string(n) +
                             " parties exceeds the configured cap");

    EntanglementCombination ec;
    ec.num_parties = n;

    PureState working = state;
    std::vector<int> remaining(static_cast<std::size_t>(n));
    for (int k = 0; k < n; ++k) remaining[static_cast<std::size_t>(k)] = k;

    int m = 1;
    while (m <= static_cast<int>(remaining.size()) / 2) {
        const int pool = static_cast<int>(remaining.size());
        std::vector<int> idx(static_cast<std::size_t>(m));
        for (int i = 0; i < m; ++i) idx[static_cast<std::size_t>(i)] = i;

        bool found = false;
        do {
            std::uint64_t local_mask = 0;
            for (int i : idx) local_mask |= std::uint64_t{1} << i;
            const PartySubset candidate(local_mask, pool);

            const RankInfo info = subset_rank_info(working, candidate, tol);
            if (info.ambiguous) {
                std::vector<int> original;
                for (int i : idx) original.push_back(remaining[static_cast<std::size_t>(i)]);
                throw NumericalAmbiguityError(ambiguity_message(original, info));
            }
            if (info.rank == 1) {
                std::uint64_t block_mask = 0;
                for (int i : idx)
                    block_mask |= std::uint64_t{1} << remaining[static_cast<std::size_t>(i)];
                ec.blocks.emplace_back(block_mask, n);

                working = reduced_pure_state(working, candidate.complement(), tol);
                for (auto it = idx.rbegin(); it != idx.rend(); ++it)
                    remaining.erase(remaining.begin() + *it);
                found = true;
                break;
            }
        } while (next_combination(idx, pool));

        // Same m continues over the shrunken party set after a removal;
        // otherwise no block of this size exists and we move up one size.
        if (!found) ++m;
    }

    std::uint64_t final_mask = 0;
    for (int p : remaining) final_mask |= std::uint64_t{1} << p;
    ec.blocks.emplace_back(final_mask, n);
    return ec;
}

CEReport ce(const PureState& state, const Tolerances& tol, bool detail, const Limits& limits,
            int threads) {
    CEReport report;
    report.tolerances = tol;
    report.ec = entanglement_combination(state, tol, limits);
    if (detail) report.subset_entropies.emplace();

    double total = 0.0;
    for (const PartySubset& block : report.ec.blocks) {
        const PureState block_state =
            block.is_full() ? state : reduced_pure_state(state, block, tol);

        double block_cef = 0.0;
        const int b = block_state.num_parties();
        if (b > 1) {
            const std::vector<double> table = subset_entropy_table(block_state, threads);
            for (double s : table) block_cef += s;
            block_cef *= 0.5;
            if (detail) {
                const std::vector<int> parties = block.parties();
                for (std::uint64_t local = 1; local + 1 < (std::uint64_t{1} << b); ++local) {
                    std::uint64_t original = 0;
                    for (int i = 0; i < b; ++i)
                        if ((local >> i) & 1)
                            original |= std::uint64_t{1} << parties[static_cast<std::size_t>(i)];
                    (*report.subset_entropies)[original] = table[local - 1];
                }
            }
        }
        report.block_cefs.emplace_back(block, block_cef);
        total += block_cef;
    }
    report.ce = total;
    return report;
}

}  // namespace entangle
