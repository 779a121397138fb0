// types.hpp
// Core domain types: system shapes, party subsets, tolerances and size caps.

#pragma once

#include <bit>
#include <cstdint>
#include <initializer_list>
#include <vector>

#include "entangle/errors.hpp"

namespace entangle {

// Size caps that keep subset enumeration and dense storage desk-scale.
struct Limits {
    std::size_t max_total_dim = std::size_t{1} << 20;
    int max_enum_parties = 20;
};

// Numerical thresholds. rank_eps is relative to the largest eigenvalue, so
// rank decisions are scale-free under the trace-1 constraint.
struct Tolerances {
    double rank_eps = 1e-9;
    double norm_eps = 1e-8;

    void validate() const {
        if (!(rank_eps > 0.0 && rank_eps < 1e-2))
            throw std::invalid_argument("rank_eps must be in (0, 1e-2)");
        if (!(norm_eps > 0.0 && norm_eps < 1e-2))
            throw std::invalid_argument("norm_eps must be in (0, 1e-2)");
    }
};

// Per-party local dimensions of an n-party system. Party 0 is the most
// significant mixed-radix digit of a global amplitude index.
class SystemShape {
public:
    SystemShape() = default;

    explicit SystemShape(std::vector<int> dims, const Limits& limits = {})
        : dims_(std::move(dims)) {
        if (dims_.empty()) throw DimensionMismatchError("system needs at least one party");
        for (int d : dims_) {
            if (d < 2) throw DimensionMismatchError("every local dimension must be >= 2");
        }
        strides_.assign(dims_.size(), 1);
        total_ = 1;
        for (int k = static_cast<int>(dims_.size()) - 1; k >= 0; --k) {
            strides_[static_cast<std::size_t>(k)] = total_;
            if (total_ > limits.max_total_dim / static_cast<std::size_t>(dims_[static_cast<std::size_t>(k)]))
                throw SizeLimitError("total dimension exceeds the configured size cap");
            total_ *= static_cast<std::size_t>(dims_[static_cast<std::size_t>(k)]);
        }
        if (total_ > limits.max_total_dim)
            throw SizeLimitError("total dimension exceeds the configured size cap");
    }

    int num_parties() const { return static_cast<int>(dims_.size()); }
    int dim(int party) const { return dims_[static_cast<std::size_t>(party)]; }
    const std::vector<int>& dims() const { return dims_; }
    std::size_t total_dim() const { return total_; }
    // Index stride of a party's digit; party 0 has the largest stride.
    std::size_t stride(int party) const { return strides_[static_cast<std::size_t>(party)]; }
    // Digit of `party` within global index `x`.
    int digit(std::size_t x, int party) const {
        return static_cast<int>((x / stride(party)) % static_cast<std::size_t>(dim(party)));
    }

    bool operator==(const SystemShape& other) const { return dims_ == other.dims_; }

private:
    std::vector<int> dims_;
    std::vector<std::size_t> strides_;
    std::size_t total_ = 1;
};

// A subset of the parties {0, ..., n-1}, stored as a bitmask.
class PartySubset {
public:
    PartySubset() = default;

    PartySubset(std::uint64_t mask, int n) : mask_(mask), n_(n) {
        if (n < 1 || n > 63) throw DimensionMismatchError("party count out of range");
        if (mask >> n) throw DimensionMismatchError("subset mask has bits outside the party set");
    }

    static PartySubset empty_set(int n) { return PartySubset(0, n); }
    static PartySubset full_set(int n) { return PartySubset((std::uint64_t{1} << n) - 1, n); }

    static PartySubset of(std::initializer_list<int> parties, int n) {
        std::uint64_t m = 0;
        for (int p : parties) {
            if (p < 0 || p >= n) throw DimensionMismatchError("party index out of range");
            m |= std::uint64_t{1} << p;
        }
        return PartySubset(m, n);
    }

    static PartySubset from_parties(const std::vector<int>& parties, int n) {
        std::uint64_t m = 0;
        for (int p : parties) {
            if (p < 0 || p >= n) throw DimensionMismatchError("party index out of range");
            m |= std::uint64_t{1} << p;
        }
        return PartySubset(m, n);
    }

    std::uint64_t mask() const { return mask_; }
    int num_parties() const { return n_; }
    int count() const { return std::popcount(mask_); }
    bool contains(int party) const { return (mask_ >> party) & 1; }
    bool is_empty() const { return mask_ == 0; }
    bool is_full() const { return mask_ == (std::uint64_t{1} << n_) - 1; }
    bool is_nontrivial() const { return !is_empty() && !is_full(); }

    PartySubset complement() const {
        return PartySubset(~mask_ & ((std::uint64_t{1} << n_) - 1), n_);
    }

    // Member parties in ascending order.
    std::vector<int> parties() const {
        std::vector<int> out;
        out.reserve(static_cast<std::size_t>(count()));
        for (int k = 0; k < n_; ++k)
            if (contains(k)) out.push_back(k);
        return out;
    }

    int min_party() const { return mask_ == 0 ? -1 : std::countr_zero(mask_); }

    bool operator==(const PartySubset& other) const = default;

private:
    std::uint64_t mask_ = 0;
    int n_ = 1;
};

}  // namespace entangle
