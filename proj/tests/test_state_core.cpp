#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "entangle/state_ops.hpp"
#include "entangle/verify.hpp"
#include "test_helpers.hpp"

using namespace entangle;
using namespace testutil;

TEST_CASE("normalize scales amplitudes to unit norm") {
    SystemShape single({2});
    Eigen::VectorXcd v(2);
    v << 2.0, 0.0;
    const PureState s = normalize(single, v);
    CHECK(std::abs(s.amplitude(0) - Complex(1.0, 0.0)) < 1e-15);
    CHECK(std::abs(s.amplitude(1)) < 1e-15);

    // already-normalized input stays put
    const PureState e = epr();
    Eigen::VectorXcd copy = e.amplitudes();
    const PureState renorm = normalize(e.shape(), copy);
    CHECK((renorm.amplitudes() - e.amplitudes()).norm() < 1e-12);

    // norm 2 vector of ones over two qubits
    Eigen::VectorXcd ones = Eigen::VectorXcd::Ones(4);
    const PureState q = normalize(SystemShape({2, 2}), ones);
    for (int i = 0; i < 4; ++i) CHECK(q.amplitude(static_cast<std::size_t>(i)).real() == doctest::Approx(0.5));
}

TEST_CASE("normalize rejects zero states") {
    Eigen::VectorXcd zero = Eigen::VectorXcd::Zero(4);
    CHECK_THROWS_AS(normalize(SystemShape({2, 2}), zero), ZeroStateError);
    zero(2) = 1e-13;
    CHECK_THROWS_AS(normalize(SystemShape({2, 2}), zero), ZeroStateError);
}

TEST_CASE("shape invariants") {
    CHECK_THROWS_AS(SystemShape(std::vector<int>{}), DimensionMismatchError);
    CHECK_THROWS_AS(SystemShape({2, 1}), DimensionMismatchError);
    CHECK_THROWS_AS(SystemShape(std::vector<int>(21, 2)), SizeLimitError);
    Limits tiny;
    tiny.max_total_dim = 8;
    CHECK_THROWS_AS(SystemShape({2, 2, 2, 2}, tiny), SizeLimitError);
    CHECK_NOTHROW(SystemShape({2, 2, 2}, tiny));
}

TEST_CASE("tensor product concatenates parties") {
    const PureState zero = basis_state({2}, 0);
    const PureState zz = tensor_product(zero, zero);
    CHECK(zz.shape().dims() == std::vector<int>{2, 2});
    CHECK(std::abs(zz.amplitude(0) - Complex(1.0, 0.0)) < 1e-15);

    const PureState ee = tensor_product(epr(), epr());
    CHECK(ee.num_parties() == 4);
    for (std::size_t idx : {std::size_t{0}, std::size_t{3}, std::size_t{12}, std::size_t{15}})
        CHECK(std::abs(ee.amplitude(idx) - Complex(0.5, 0.0)) < 1e-15);
    CHECK(std::abs(ee.amplitude(1)) < 1e-15);

    const PureState eg = tensor_product(epr(), ghz3());
    CHECK(eg.shape().dims() == std::vector<int>{2, 2, 2, 2, 2});

    Limits tiny;
    tiny.max_total_dim = 8;
    CHECK_THROWS_AS(tensor_product(epr(), epr(), tiny), SizeLimitError);
}

TEST_CASE("partial trace of canonical states") {
    const auto rho1 = partial_trace(epr(), PartySubset::of({0}, 2));
    CHECK(max_abs_diff(rho1.matrix(), 0.5 * Eigen::MatrixXcd::Identity(2, 2)) < 1e-15);

    const PureState s01 = basis_state({2, 2}, 1);  // |01>
    const auto rho2 = partial_trace(s01, PartySubset::of({0}, 2));
    Eigen::MatrixXcd proj0 = Eigen::MatrixXcd::Zero(2, 2);
    proj0(0, 0) = 1.0;
    CHECK(max_abs_diff(rho2.matrix(), proj0) < 1e-15);

    const auto rho3 = partial_trace(ghz3(), PartySubset::of({0, 1}, 3));
    Eigen::MatrixXcd expected = Eigen::MatrixXcd::Zero(4, 4);
    expected(0, 0) = 0.5;
    expected(3, 3) = 0.5;
    CHECK(max_abs_diff(rho3.matrix(), expected) < 1e-15);

    CHECK_THROWS_AS(partial_trace(epr(), PartySubset::empty_set(2)), EmptySubsetError);
}

TEST_CASE("partial trace matches the double-loop oracle on small systems") {
    std::vector<PureState> states = {epr(), ghz3(), w3(), tensor_product(epr(), epr()),
                                     basis_state({2, 2, 2}, 5)};
    for (int n = 2; n <= 4; ++n) {
        SystemShape shape(std::vector<int>(static_cast<std::size_t>(n), 2));
        for (std::uint64_t seed = 1; seed <= 5; ++seed)
            states.push_back(random_pure_state(shape, seed));
    }
    // a qudit case as well
    states.push_back(random_pure_state(SystemShape({3, 2, 4}), 99));

    for (const PureState& s : states) {
        const int n = s.num_parties();
        for (std::uint64_t mask = 1; mask < (std::uint64_t{1} << n); ++mask) {
            const PartySubset keep(mask, n);
            const auto rho = partial_trace(s, keep);
            CHECK(max_abs_diff(rho.matrix(), partial_trace_oracle(s, keep)) < 1e-12);
        }
    }
}

TEST_CASE("partial trace output satisfies density-matrix invariants") {
    for (std::uint64_t seed = 1; seed <= 10; ++seed) {
        const PureState s = random_pure_state(SystemShape({2, 3, 2}), seed);
        for (std::uint64_t mask = 1; mask < 8; ++mask) {
            const auto rho = partial_trace(s, PartySubset(mask, 3));
            CHECK(std::abs(rho.matrix().trace().real() - 1.0) < 1e-10);
            CHECK((rho.matrix() - rho.matrix().adjoint()).cwiseAbs().maxCoeff() < 1e-12);
            Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(rho.matrix(), Eigen::EigenvaluesOnly);
            CHECK(es.eigenvalues().minCoeff() > -1e-9);
        }
    }
}

TEST_CASE("von Neumann entropy closed forms") {
    const auto mixed = DensityMatrix(PartySubset::full_set(1), 0.5 * Eigen::MatrixXcd::Identity(2, 2));
    CHECK(von_neumann_entropy(mixed) == doctest::Approx(1.0).epsilon(1e-12));

    Eigen::MatrixXcd pure = Eigen::MatrixXcd::Zero(2, 2);
    pure(0, 0) = 1.0;
    CHECK(von_neumann_entropy(DensityMatrix(PartySubset::full_set(1), pure)) ==
          doctest::Approx(0.0).epsilon(1e-15));

    Eigen::MatrixXcd thirds = Eigen::MatrixXcd::Zero(2, 2);
    thirds(0, 0) = 1.0 / 3.0;
    thirds(1, 1) = 2.0 / 3.0;
    CHECK(von_neumann_entropy(DensityMatrix(PartySubset::full_set(1), thirds)) ==
          doctest::Approx(kEntropyOneThird).epsilon(1e-12));
}

TEST_CASE("density-matrix invariant violations are rejected") {
    Eigen::MatrixXcd bad = Eigen::MatrixXcd::Zero(2, 2);
    bad(0, 1) = 1.0;  // not Hermitian
    bad(0, 0) = 1.0;
    CHECK_THROWS_AS(DensityMatrix(PartySubset::full_set(1), bad), InvariantError);

    Eigen::MatrixXcd off_trace = Eigen::MatrixXcd::Identity(2, 2);
    CHECK_THROWS_AS(DensityMatrix(PartySubset::full_set(1), off_trace), InvariantError);

    Eigen::MatrixXcd negative = Eigen::MatrixXcd::Zero(2, 2);
    negative(0, 0) = 1.001;
    negative(1, 1) = -0.001;
    CHECK_THROWS_AS(von_neumann_entropy(DensityMatrix(PartySubset::full_set(1), negative)),
                    InvariantError);
}

TEST_CASE("subset entropy on canonical states") {
    const PureState ee = tensor_product(epr(), epr());
    CHECK(subset_entropy(ee, PartySubset::of({0, 2}, 4)) == doctest::Approx(2.0).epsilon(1e-12));

    for (int n = 2; n <= 6; ++n) {
        const PureState cat = cat_state(n);
        for (std::uint64_t mask = 1; mask + 1 < (std::uint64_t{1} << n); ++mask)
            CHECK(subset_entropy(cat, PartySubset(mask, n)) == doctest::Approx(1.0).epsilon(1e-10));
    }

    const PureState product = basis_state({2, 2, 2}, 0);
    CHECK(subset_entropy(product, PartySubset::of({1}, 3)) == doctest::Approx(0.0).epsilon(1e-12));

    CHECK_THROWS_AS(subset_entropy(epr(), PartySubset::empty_set(2)), TrivialSubsetError);
    CHECK_THROWS_AS(subset_entropy(epr(), PartySubset::full_set(2)), TrivialSubsetError);
}

TEST_CASE("complement symmetry and entropy bounds") {
    for (std::uint64_t seed = 1; seed <= 8; ++seed) {
        const PureState s = random_pure_state(SystemShape({2, 3, 2, 2}), seed);
        const int n = 4;
        for (std::uint64_t mask = 1; mask + 1 < (std::uint64_t{1} << n); ++mask) {
            const PartySubset subset(mask, n);
            // evaluate both sides through the raw route, not the shared one
            const double si = von_neumann_entropy(partial_trace(s, subset));
            const double sc = von_neumann_entropy(partial_trace(s, subset.complement()));
            CHECK(std::abs(si - sc) < 1e-10);

            std::size_t di = 1, dc = 1;
            for (int p : subset.parties()) di *= static_cast<std::size_t>(s.shape().dim(p));
            for (int p : subset.complement().parties()) dc *= static_cast<std::size_t>(s.shape().dim(p));
            const double bound = std::log2(static_cast<double>(std::min(di, dc)));
            const double value = subset_entropy(s, subset);
            CHECK(value >= -1e-12);
            CHECK(value <= bound + 1e-9);
        }
    }
}

TEST_CASE("subset rank") {
    CHECK(subset_rank(epr(), PartySubset::of({0}, 2)) == 2);

    const PureState six = make_state({2, 2, 2, 2, 2, 2},
                                     {{0b000000, 0.5}, {0b000111, 0.5}, {0b110000, 0.5}, {0b110111, 0.5}});
    CHECK(subset_rank(six, PartySubset::of({2}, 6)) == 1);
    CHECK(subset_rank(six, PartySubset::of({0, 1}, 6)) == 1);
    // cross-block pairs factor into two mixed marginals (rank 4); pairs
    // inside the three-party tail keep rank 2 -- either way they are
    // entangled with the rest, which is all the partition search relies on
    CHECK(subset_rank(six, PartySubset::of({0, 3}, 6)) == 4);
    CHECK(subset_rank(six, PartySubset::of({3, 4}, 6)) == 2);
    for (int a = 0; a < 6; ++a)
        for (int b = a + 1; b < 6; ++b)
            if (!(a == 0 && b == 1))
                CHECK(subset_rank(six, PartySubset::of({a, b}, 6)) > 1);

    CHECK_THROWS_AS(subset_rank(epr(), PartySubset::empty_set(2)), EmptySubsetError);
    CHECK(subset_rank(epr(), PartySubset::full_set(2)) == 1);
}

TEST_CASE("rank symmetry between a subset and its complement") {
    for (std::uint64_t seed = 1; seed <= 6; ++seed) {
        const PureState s = random_pure_state(SystemShape({2, 2, 3, 2}), seed);
        for (std::uint64_t mask = 1; mask + 1 < 16; ++mask) {
            const PartySubset subset(mask, 4);
            CHECK(subset_rank(s, subset) == subset_rank(s, subset.complement()));
        }
    }
}

TEST_CASE("rank info flags tolerance-sensitive spectra") {
    // eigenvalues {1-a, a} with a sitting right at the rank threshold scale
    const double a = 5e-9;
    const PureState borderline =
        make_state({2, 2}, {{0, std::sqrt(1.0 - a)}, {3, std::sqrt(a)}});
    const RankInfo info = subset_rank_info(borderline, PartySubset::of({0}, 2));
    CHECK(info.ambiguous);
    CHECK(info.rank == 2);

    const RankInfo clean = subset_rank_info(epr(), PartySubset::of({0}, 2));
    CHECK_FALSE(clean.ambiguous);
}

TEST_CASE("reduced pure state extraction") {
    const PureState eg = tensor_product(epr(), ghz3());
    const PureState block = reduced_pure_state(eg, PartySubset::of({0, 1}, 5));
    CHECK(fidelity(block, epr()) == doctest::Approx(1.0).epsilon(1e-12));

    const PureState s01 = basis_state({2, 2}, 1);
    const PureState second = reduced_pure_state(s01, PartySubset::of({1}, 2));
    CHECK(std::abs(second.amplitude(1)) == doctest::Approx(1.0).epsilon(1e-12));

    CHECK_THROWS_AS(reduced_pure_state(epr(), PartySubset::of({0}, 2)), NotSeparableError);
    CHECK_THROWS_AS(reduced_pure_state(epr(), PartySubset::empty_set(2)), EmptySubsetError);
}

TEST_CASE("extraction reconstructs the reduced density matrix") {
    const PureState six = make_state({2, 2, 2, 2, 2, 2},
                                     {{0b000000, 0.5}, {0b000111, 0.5}, {0b110000, 0.5}, {0b110111, 0.5}});
    const PartySubset last3 = PartySubset::of({3, 4, 5}, 6);
    const PureState tail = reduced_pure_state(six, last3);
    CHECK(fidelity(tail, ghz3()) == doctest::Approx(1.0).epsilon(1e-10));

    const Eigen::MatrixXcd rho = partial_trace(six, last3).matrix();
    const Eigen::MatrixXcd rebuilt = tail.amplitudes() * tail.amplitudes().adjoint();
    CHECK(max_abs_diff(rho, rebuilt) < 10.0 * 1e-9);
}

TEST_CASE("blocks reassemble the original state up to party order") {
    std::vector<PureState> states = {tensor_product(epr(), epr()), tensor_product(epr(), ghz3()),
                                     tensor_product(ghz3(), epr()),
                                     tensor_product(basis_state({2}, 1), epr())};
    for (const PureState& s : states) {
        const EntanglementCombination ec = entanglement_combination(s);
        REQUIRE(ec.block_count() > 1);
        std::vector<int> order;
        PureState rebuilt = reduced_pure_state(s, ec.blocks[0]);
        for (int p : ec.blocks[0].parties()) order.push_back(p);
        for (int k = 1; k < ec.block_count(); ++k) {
            rebuilt = tensor_product(rebuilt, reduced_pure_state(s, ec.blocks[static_cast<std::size_t>(k)]));
            for (int p : ec.blocks[static_cast<std::size_t>(k)].parties()) order.push_back(p);
        }
        // position of original party j inside the rebuilt ordering
        std::vector<int> source(order.size());
        for (std::size_t pos = 0; pos < order.size(); ++pos)
            source[static_cast<std::size_t>(order[pos])] = static_cast<int>(pos);
        const PureState restored = permute_parties(rebuilt, source);
        CHECK(fidelity(restored, s) >= 1.0 - 1e-9);
    }
}

TEST_CASE("permute parties relabels amplitudes") {
    const PureState s01 = basis_state({2, 2}, 1);  // |01>
    const PureState swapped = permute_parties(s01, {1, 0});
    CHECK(std::abs(swapped.amplitude(2)) == doctest::Approx(1.0));  // |10>

    const PureState qudit = basis_state({2, 3}, 2);  // digits (0,2)
    const PureState sw = permute_parties(qudit, {1, 0});
    CHECK(sw.shape().dims() == std::vector<int>{3, 2});
    CHECK(std::abs(sw.amplitude(4)) == doctest::Approx(1.0));  // digits (2,0)

    CHECK_THROWS_AS(permute_parties(s01, {0, 0}), DimensionMismatchError);
}

TEST_CASE("subset entropy table is thread-invariant") {
    const PureState s = random_pure_state(SystemShape({2, 2, 2, 2, 2}), 17);
    const std::vector<double> one = subset_entropy_table(s, 1);
    const std::vector<double> four = subset_entropy_table(s, 4);
    REQUIRE(one.size() == four.size());
    for (std::size_t i = 0; i < one.size(); ++i) CHECK(one[i] == four[i]);
}
