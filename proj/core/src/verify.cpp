#include "entangle/verify.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>

namespace entangle {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ull;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
    return x ^ (x >> 31);
}

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream) {
    return splitmix64(seed ^ splitmix64(stream + 0x632be59bd9b4e019ull));
}

// Deterministic Gaussian source: xoshiro-free, relies only on the
// standardized mt19937_64 output so results match across platforms.
class GaussianSource {
public:
    explicit GaussianSource(std::uint64_t seed) : engine_(seed) {}

    double uniform01() {  // [0, 1)
        return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
    }

    double gaussian() {  // Box-Muller
        if (have_spare_) {
            have_spare_ = false;
            return spare_;
        }
        const double u1 = 1.0 - uniform01();  // (0, 1]
        const double u2 = uniform01();
        const double r = std::sqrt(-2.0 * std::log(u1));
        const double theta = 2.0 * std::numbers::pi * u2;
        spare_ = r * std::sin(theta);
        have_spare_ = true;
        return r * std::cos(theta);
    }

    Complex complex_gaussian() {
        const double re = gaussian();
        const double im = gaussian();
        return {re, im};
    }

    std::uint64_t bits() { return engine_(); }

private:
    std::mt19937_64 engine_;
    bool have_spare_ = false;
    double spare_ = 0.0;
};

PropertyCheckResult make_result(std::string name, int trials, double max_violation,
                                std::uint64_t seed) {
    PropertyCheckResult r;
    r.property = std::move(name);
    r.trials = trials;
    r.max_violation = max_violation;
    r.pass = max_violation <= kPropertyTolerance;
    r.seed = seed;
    return r;
}

constexpr double kStructuralViolation = std::numeric_limits<double>::infinity();

}  // namespace

PureState random_pure_state(const SystemShape& shape, std::uint64_t seed) {
    GaussianSource rng(derive_seed(seed, 0x51a7e));
    Eigen::VectorXcd amps(static_cast<Eigen::Index>(shape.total_dim()));
    for (Eigen::Index i = 0; i < amps.size(); ++i) amps(i) = rng.complex_gaussian();
    return normalize(shape, std::move(amps));
}

Eigen::MatrixXcd random_local_unitary(int dim, std::uint64_t seed) {
    if (dim < 2) throw DimensionMismatchError("unitary dimension must be >= 2");
    GaussianSource rng(derive_seed(seed, 0x017a));
    Eigen::MatrixXcd g(dim, dim);
    for (Eigen::Index c = 0; c < dim; ++c)
        for (Eigen::Index r = 0; r < dim; ++r) g(r, c) = rng.complex_gaussian();

    Eigen::HouseholderQR<Eigen::MatrixXcd> qr(g);
    Eigen::MatrixXcd q = qr.householderQ() * Eigen::MatrixXcd::Identity(dim, dim);
    const Eigen::MatrixXcd r = qr.matrixQR().triangularView<Eigen::Upper>();
    // Fix the phase freedom so the distribution is Haar rather than
    // QR-implementation dependent.
    for (Eigen::Index c = 0; c < dim; ++c) {
        const Complex d = r(c, c);
        const double mag = std::abs(d);
        q.col(c) *= (mag > 0.0) ? d / mag : Complex(1.0, 0.0);
    }
    return q;
}

LocalUnitarySet random_local_unitary_set(const SystemShape& shape, std::uint64_t seed) {
    LocalUnitarySet us;
    us.unitaries.reserve(static_cast<std::size_t>(shape.num_parties()));
    for (int k = 0; k < shape.num_parties(); ++k)
        us.unitaries.push_back(random_local_unitary(shape.dim(k), derive_seed(seed, 0xa11c0 + static_cast<std::uint64_t>(k))));
    return us;
}

PureState apply_local_unitaries(const PureState& state, const LocalUnitarySet& us) {
    const SystemShape& shape = state.shape();
    const int n = shape.num_parties();
    if (static_cast<int>(us.unitaries.size()) != n)
        throw DimensionMismatchError("need exactly one unitary per party");
    for (int k = 0; k < n; ++k) {
        const auto& u = us.unitaries[static_cast<std::size_t>(k)];
        if (u.rows() != shape.dim(k) || u.cols() != shape.dim(k))
            throw DimensionMismatchError("unitary dimension does not match party " +
                                         std::to_string(k + 1));
    }

    Eigen::VectorXcd cur = state.amplitudes();
    const std::size_t total = shape.total_dim();
    for (int k = 0; k < n; ++k) {
        const auto& u = us.unitaries[static_cast<std::size_t>(k)];
        const std::size_t d = static_cast<std::size_t>(shape.dim(k));
        const std::size_t stride = shape.stride(k);
        const std::size_t block = d * stride;
        Eigen::VectorXcd x(static_cast<Eigen::Index>(d));
        for (std::size_t base = 0; base < total; base += block) {
            for (std::size_t lo = 0; lo < stride; ++lo) {
                for (std::size_t j = 0; j < d; ++j)
                    x(static_cast<Eigen::Index>(j)) = cur(static_cast<Eigen::Index>(base + j * stride + lo));
                const Eigen::VectorXcd y = u * x;
                for (std::size_t j = 0; j < d; ++j)
                    cur(static_cast<Eigen::Index>(base + j * stride + lo)) = y(static_cast<Eigen::Index>(j));
            }
        }
    }
    return PureState(shape, std::move(cur));
}

PropertyCheckResult lu_invariance_check(const PureState& state, int trials, std::uint64_t seed,
                                        const Tolerances& tol) {
    if (trials < 1) throw std::invalid_argument("trials must be >= 1");
    const CEReport base = ce(state, tol);
    const std::vector<double> base_table = subset_entropy_table(state);

    double worst = 0.0;
    for (int t = 0; t < trials; ++t) {
        const LocalUnitarySet us = random_local_unitary_set(state.shape(), derive_seed(seed, static_cast<std::uint64_t>(t)));
        const PureState rotated = apply_local_unitaries(state, us);
        const CEReport after = ce(rotated, tol);
        worst = std::max(worst, std::abs(after.ce - base.ce));
        const std::vector<double> table = subset_entropy_table(rotated);
        for (std::size_t i = 0; i < table.size(); ++i)
            worst = std::max(worst, std::abs(table[i] - base_table[i]));
        if (!canonically_equal(after.ec, base.ec)) worst = kStructuralViolation;
    }
    return make_result("lu_invariance", trials, worst, seed);
}

PropertyCheckResult additivity_check(const PureState& a, const PureState& b, const Tolerances& tol) {
    const PureState product = tensor_product(a, b);
    const CEReport ra = ce(a, tol);
    const CEReport rb = ce(b, tol);
    const CEReport rp = ce(product, tol);
    double worst = std::abs(rp.ce - ra.ce - rb.ce);

    EntanglementCombination expected;
    expected.num_parties = product.num_parties();
    expected.blocks = ra.ec.blocks;
    for (const PartySubset& blk : rb.ec.blocks)
        expected.blocks.emplace_back(blk.mask() << a.num_parties(), expected.num_parties);
    for (PartySubset& blk : expected.blocks)
        blk = PartySubset(blk.mask(), expected.num_parties);
    if (!canonically_equal(rp.ec, expected)) worst = kStructuralViolation;

    return make_result("additivity", 1, worst, 0);
}

std::vector<MeasurementOutcome> locc_measure(const PureState& state, int party,
                                             const Eigen::MatrixXcd& basis) {
    const SystemShape& shape = state.shape();
    if (party < 0 || party >= shape.num_parties())
        throw DimensionMismatchError("party index out of range");
    const std::size_t d = static_cast<std::size_t>(shape.dim(party));
    if (static_cast<std::size_t>(basis.rows()) != d || static_cast<std::size_t>(basis.cols()) != d)
        throw DimensionMismatchError("measurement basis dimension does not match the party");

    const std::size_t stride = shape.stride(party);
    const std::size_t block = d * stride;
    const std::size_t total = shape.total_dim();
    const std::size_t rest = total / d;

    std::vector<MeasurementOutcome> outcomes;
    Eigen::VectorXcd coeff(static_cast<Eigen::Index>(rest));
    for (std::size_t i = 0; i < d; ++i) {
        // <b_i| on the measured party, all other parties untouched
        std::size_t slot = 0;
        for (std::size_t base = 0; base < total; base += block) {
            for (std::size_t lo = 0; lo < stride; ++lo, ++slot) {
                Complex c(0.0, 0.0);
                for (std::size_t j = 0; j < d; ++j)
                    c += std::conj(basis(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(i))) *
                         state.amplitude(base + j * stride + lo);
                coeff(static_cast<Eigen::Index>(slot)) = c;
            }
        }
        const double p = coeff.squaredNorm();
        if (p < 1e-12) continue;

        Eigen::VectorXcd post = Eigen::VectorXcd::Zero(static_cast<Eigen::Index>(total));
        const double inv = 1.0 / std::sqrt(p);
        slot = 0;
        for (std::size_t base = 0; base < total; base += block) {
            for (std::size_t lo = 0; lo < stride; ++lo, ++slot) {
                const Complex c = coeff(static_cast<Eigen::Index>(slot)) * inv;
                for (std::size_t l = 0; l < d; ++l)
                    post(static_cast<Eigen::Index>(base + l * stride + lo)) =
                        basis(static_cast<Eigen::Index>(l), static_cast<Eigen::Index>(i)) * c;
            }
        }
        outcomes.push_back(MeasurementOutcome{static_cast<int>(i), p, PureState(shape, std::move(post))});
    }
    return outcomes;
}

LoccCheckResult locc_monotonicity_check(const PureState& state, int rounds, int trials,
                                        std::uint64_t seed, const Tolerances& tol) {
    if (rounds < 1) throw std::invalid_argument("rounds must be >= 1");
    if (trials < 1) throw std::invalid_argument("trials must be >= 1");

    const int n = state.num_parties();
    const std::vector<double> base_table = subset_entropy_table(state);
    const double base_ce = ce(state, tol).ce;

    double worst_entropy = -std::numeric_limits<double>::infinity();
    double worst_ce = -std::numeric_limits<double>::infinity();

    for (int t = 0; t < trials; ++t) {
        GaussianSource pick(derive_seed(seed, 0x10cc00 + static_cast<std::uint64_t>(t)));

        std::vector<std::pair<double, PureState>> branches;
        branches.emplace_back(1.0, state);
        for (int r = 0; r < rounds; ++r) {
            const int party = static_cast<int>(pick.bits() % static_cast<std::uint64_t>(n));
            const Eigen::MatrixXcd basis = random_local_unitary(
                state.shape().dim(party), derive_seed(seed, (static_cast<std::uint64_t>(t) << 8) + static_cast<std::uint64_t>(r) + 0xba515));
            std::vector<std::pair<double, PureState>> next;
            for (const auto& [p, phi] : branches)
                for (MeasurementOutcome& out : locc_measure(phi, party, basis))
                    next.emplace_back(p * out.probability, std::move(out.post_state));
            branches = std::move(next);
        }

        if (!base_table.empty()) {
            std::vector<double> expected(base_table.size(), 0.0);
            for (const auto& [p, phi] : branches) {
                const std::vector<double> table = subset_entropy_table(phi);
                for (std::size_t i = 0; i < table.size(); ++i) expected[i] += p * table[i];
            }
            for (std::size_t i = 0; i < expected.size(); ++i)
                worst_entropy = std::max(worst_entropy, expected[i] - base_table[i]);
        } else {
            worst_entropy = std::max(worst_entropy, 0.0);
        }

        double expected_ce = 0.0;
        for (const auto& [p, phi] : branches) expected_ce += p * ce(phi, tol).ce;
        worst_ce = std::max(worst_ce, expected_ce - base_ce);
    }

    return LoccCheckResult{make_result("locc_subset_entropy", trials, worst_entropy, seed),
                           make_result("locc_ce_monotonicity", trials, worst_ce, seed)};
}

PropertyCheckResult lu_invariance_suite(const SystemShape& shape, int trials, std::uint64_t seed,
                                        const Tolerances& tol) {
    if (trials < 1) throw std::invalid_argument("trials must be >= 1");
    double worst = 0.0;
    for (int t = 0; t < trials; ++t) {
        const PureState state = random_pure_state(shape, derive_seed(seed, 0x57a7e0 + static_cast<std::uint64_t>(t)));
        const PropertyCheckResult r =
            lu_invariance_check(state, 1, derive_seed(seed, 0x0ff5e7 + static_cast<std::uint64_t>(t)), tol);
        worst = std::max(worst, r.max_violation);
    }
    PropertyCheckResult out = make_result("lu_invariance", trials, worst, seed);
    return out;
}

PropertyCheckResult additivity_suite(const SystemShape& shape, int trials, std::uint64_t seed,
                                     const Tolerances& tol) {
    if (trials < 1) throw std::invalid_argument("trials must be >= 1");
    double worst = 0.0;
    for (int t = 0; t < trials; ++t) {
        const PureState a = random_pure_state(shape, derive_seed(seed, 0xaaaa00 + static_cast<std::uint64_t>(t)));
        const PureState b = random_pure_state(shape, derive_seed(seed, 0xbbbb00 + static_cast<std::uint64_t>(t)));
        worst = std::max(worst, additivity_check(a, b, tol).max_violation);
    }
    PropertyCheckResult out = make_result("additivity", trials, worst, seed);
    return out;
}

LoccCheckResult locc_suite(const SystemShape& shape, int rounds, int trials, std::uint64_t seed,
                           const Tolerances& tol) {
    if (trials < 1) throw std::invalid_argument("trials must be >= 1");
    double worst_entropy = -std::numeric_limits<double>::infinity();
    double worst_ce = -std::numeric_limits<double>::infinity();
    for (int t = 0; t < trials; ++t) {
        const PureState state = random_pure_state(shape, derive_seed(seed, 0x10cc57 + static_cast<std::uint64_t>(t)));
        const LoccCheckResult r = locc_monotonicity_check(
            state, rounds, 1, derive_seed(seed, 0x10cc58 + static_cast<std::uint64_t>(t)), tol);
        worst_entropy = std::max(worst_entropy, r.lemma_subset_entropy.max_violation);
        worst_ce = std::max(worst_ce, r.ce_monotonicity.max_violation);
    }
    return LoccCheckResult{make_result("locc_subset_entropy", trials, worst_entropy, seed),
                           make_result("locc_ce_monotonicity", trials, worst_ce, seed)};
}

}  // namespace entangle
