// verify.hpp
// Randomized property harness: local-unitary invariance of CE, additivity
// under tensor products, and monotonicity of subset entropies / CE under
// local projective measurements. All randomness is derived from explicit
// seeds, so identical seeds reproduce identical results bit for bit.

#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "entangle/measures.hpp"

namespace entangle {

// One unitary per party, dimension d_k each.
struct LocalUnitarySet {
    std::vector<Eigen::MatrixXcd> unitaries;
};

struct MeasurementOutcome {
    int outcome = 0;
    double probability = 0.0;
    PureState post_state;
};

struct PropertyCheckResult {
    std::string property;
    int trials = 0;
    // Largest observed violation in bits; +infinity when a structural check
    // (equality of entanglement combinations) failed outright.
    double max_violation = 0.0;
    bool pass = false;
    std::uint64_t seed = 0;
};

// Checks share one declared tolerance.
inline constexpr double kPropertyTolerance = 1e-8;

// Haar-distributed pure state: i.i.d. standard complex Gaussian amplitudes,
// normalized. Deterministic per seed.
PureState random_pure_state(const SystemShape& shape, std::uint64_t seed);

// Approximately Haar-uniform unitary: QR of a complex Gaussian matrix with
// the R-diagonal phases absorbed.
Eigen::MatrixXcd random_local_unitary(int dim, std::uint64_t seed);

LocalUnitarySet random_local_unitary_set(const SystemShape& shape, std::uint64_t seed);

// Contracts each party index with its unitary; norm is preserved.
PureState apply_local_unitaries(const PureState& state, const LocalUnitarySet& us);

// Draws `trials` local-unitary sets and checks that CE, every subset entropy
// and the entanglement combination are unchanged.
PropertyCheckResult lu_invariance_check(const PureState& state, int trials, std::uint64_t seed,
                                        const Tolerances& tol = {});

// Checks ce(a (x) b) = ce(a) + ce(b) and that the combined partition is the
// union of the parts' partitions (b's parties shifted past a's).
PropertyCheckResult additivity_check(const PureState& a, const PureState& b,
                                     const Tolerances& tol = {});

// Rank-1 projective measurement of one party in the given orthonormal basis
// (columns are the basis vectors). The party is kept, collapsed onto the
// observed basis vector; outcomes with probability below 1e-12 are omitted.
std::vector<MeasurementOutcome> locc_measure(const PureState& state, int party,
                                             const Eigen::MatrixXcd& basis);

// The per-subset entropy inequality and CE monotonicity are reported
// separately: the former is a sharp statement, the latter a stronger claim
// whose failure would be a finding of its own.
struct LoccCheckResult {
    PropertyCheckResult lemma_subset_entropy;
    PropertyCheckResult ce_monotonicity;
};

// Per trial, applies `rounds` sequential projective measurements on random
// parties in random local bases, tracking the full outcome tree, and checks
//   S_I(psi) >= sum_i p_i S_I(phi_i)   for every nontrivial subset I, and
//   ce(psi)  >= sum_i p_i ce(phi_i).
LoccCheckResult locc_monotonicity_check(const PureState& state, int rounds, int trials,
                                        std::uint64_t seed, const Tolerances& tol = {});

// Suite variants drawing a fresh random state per trial.
PropertyCheckResult lu_invariance_suite(const SystemShape& shape, int trials, std::uint64_t seed,
                                        const Tolerances& tol = {});
PropertyCheckResult additivity_suite(const SystemShape& shape, int trials, std::uint64_t seed,
                                     const Tolerances& tol = {});
LoccCheckResult locc_suite(const SystemShape& shape, int rounds, int trials, std::uint64_t seed,
                           const Tolerances& tol = {});

}  // namespace entangle
