#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <numeric>

#include "entangle/measures.hpp"
#include "entangle/verify.hpp"
#include "test_helpers.hpp"

using namespace entangle;
using namespace testutil;

TEST_CASE("cef closed forms") {
    CHECK(cef(basis_state({2}, 0)) == doctest::Approx(0.0));
    CHECK(cef(epr()) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(cef(cat_state(4)) == doctest::Approx(7.0).epsilon(1e-12));
    CHECK(cef(w3()) == doctest::Approx(kCefW3).epsilon(1e-9));

    Limits tight;
    tight.max_enum_parties = 2;
    CHECK_THROWS_AS(cef(ghz3(), tight), SizeLimitError);
}

TEST_CASE("block separability") {
    CHECK_FALSE(is_block_separable(epr(), PartySubset::of({0}, 2)));
    const PureState zero_epr = tensor_product(basis_state({2}, 0), epr());
    CHECK(is_block_separable(zero_epr, PartySubset::of({0}, 3)));

    const PureState six = make_state({2, 2, 2, 2, 2, 2},
                                     {{0b000000, 0.5}, {0b000111, 0.5}, {0b110000, 0.5}, {0b110111, 0.5}});
    CHECK(is_block_separable(six, PartySubset::of({0, 1}, 6)));
    CHECK_THROWS_AS(is_block_separable(epr(), PartySubset::full_set(2)), TrivialSubsetError);
}

TEST_CASE("entanglement combination discovery order") {
    const PureState six = make_state({2, 2, 2, 2, 2, 2},
                                     {{0b000000, 0.5}, {0b000111, 0.5}, {0b110000, 0.5}, {0b110111, 0.5}});
    const EntanglementCombination ec = entanglement_combination(six);
    REQUIRE(ec.block_count() == 3);
    CHECK(ec.blocks[0] == PartySubset::of({2}, 6));
    CHECK(ec.blocks[1] == PartySubset::of({0, 1}, 6));
    CHECK(ec.blocks[2] == PartySubset::of({3, 4, 5}, 6));
    CHECK(to_string(ec) == "[(A3),(A1,A2),(A4,A5,A6)]");
}

TEST_CASE("entanglement combination edge partitions") {
    const EntanglementCombination separable = entanglement_combination(basis_state({2, 2, 2}, 0));
    CHECK(separable.is_separable());
    CHECK(to_string(separable) == "[(A1),(A2),(A3)]");

    const EntanglementCombination full = entanglement_combination(ghz3());
    CHECK(full.is_fully_entangled());

    const EntanglementCombination pairs = entanglement_combination(tensor_product(epr(), epr()));
    REQUIRE(pairs.block_count() == 2);
    CHECK(pairs.blocks[0] == PartySubset::of({0, 1}, 4));
    CHECK(pairs.blocks[1] == PartySubset::of({2, 3}, 4));

    const EntanglementCombination single = entanglement_combination(basis_state({2}, 1));
    REQUIRE(single.block_count() == 1);
    CHECK(single.blocks[0].is_full());
}

TEST_CASE("tolerance-sensitive separability raises NumericalAmbiguity") {
    const double a = 5e-9;
    const PureState borderline =
        make_state({2, 2}, {{0, std::sqrt(1.0 - a)}, {3, std::sqrt(a)}});
    CHECK_THROWS_AS(entanglement_combination(borderline), NumericalAmbiguityError);
    // a looser rank cutoff moves the eigenvalue out of the ambiguous band
    Tolerances loose;
    loose.rank_eps = 1e-4;
    CHECK_NOTHROW(entanglement_combination(borderline, loose));
}

TEST_CASE("ce of cat states follows the closed form") {
    for (int n = 2; n <= 8; ++n) {
        const CEReport report = ce(cat_state(n));
        CHECK(report.ce == doctest::Approx(std::pow(2.0, n - 1) - 1.0).epsilon(1e-10));
        CHECK(report.ec.is_fully_entangled());
    }
}

TEST_CASE("ce distinguishes partitions with equal values") {
    const CEReport psi = ce(tensor_product(epr(), ghz3()));
    const CEReport phi = ce(tensor_product(ghz3(), epr()));
    CHECK(psi.ce == doctest::Approx(4.0).epsilon(1e-12));
    CHECK(phi.ce == doctest::Approx(4.0).epsilon(1e-12));

    REQUIRE(psi.ec.block_count() == 2);
    CHECK(psi.ec.blocks[0] == PartySubset::of({0, 1}, 5));
    CHECK(psi.ec.blocks[1] == PartySubset::of({2, 3, 4}, 5));

    // discovery order finds the EPR tail first; canonical order sorts by
    // lowest party
    REQUIRE(phi.ec.block_count() == 2);
    CHECK(phi.ec.blocks[0] == PartySubset::of({3, 4}, 5));
    CHECK(phi.ec.blocks[1] == PartySubset::of({0, 1, 2}, 5));
    const EntanglementCombination canon = phi.ec.canonical();
    CHECK(canon.blocks[0] == PartySubset::of({0, 1, 2}, 5));
    CHECK(canon.blocks[1] == PartySubset::of({3, 4}, 5));
    CHECK_FALSE(canonically_equal(psi.ec, phi.ec));
}

TEST_CASE("ce fundamentals") {
    CHECK(ce(basis_state({2, 2}, 0)).ce == doctest::Approx(0.0));
    CHECK(ce(w3()).ce == doctest::Approx(kCefW3).epsilon(1e-9));

    // report internals stay consistent
    const CEReport report = ce(tensor_product(epr(), ghz3()));
    double sum = 0.0;
    for (const auto& [blk, v] : report.block_cefs) sum += v;
    CHECK(report.ce == doctest::Approx(sum).epsilon(1e-12));
}

TEST_CASE("ce equals cef for fully entangled states") {
    for (std::uint64_t seed = 1; seed <= 10; ++seed) {
        const PureState s = random_pure_state(SystemShape({2, 2, 2}), seed);
        const CEReport report = ce(s);
        REQUIRE(report.ec.is_fully_entangled());
        CHECK(std::abs(report.ce - cef(s)) < 1e-10);
    }
}

TEST_CASE("ce is zero exactly for fully separable states") {
    for (std::uint64_t seed = 1; seed <= 6; ++seed) {
        PureState product = random_pure_state(SystemShape({2}), seed);
        for (int extra = 0; extra < 2; ++extra)
            product = tensor_product(product, random_pure_state(SystemShape({2}), seed * 31 + static_cast<std::uint64_t>(extra)));
        const CEReport report = ce(product);
        CHECK(report.ce == doctest::Approx(0.0).epsilon(1e-10));
        CHECK(report.ec.is_separable());
    }
    // entangled states yield strictly positive ce
    CHECK(ce(epr()).ce > 0.5);
}

TEST_CASE("bipartite ce reduces to the partial entropy") {
    for (std::uint64_t seed = 1; seed <= 10; ++seed) {
        const PureState s = random_pure_state(SystemShape({2, 3}), seed);
        const double expected = subset_entropy(s, PartySubset::of({0}, 2));
        CHECK(std::abs(ce(s).ce - expected) < 1e-10);
    }
}

TEST_CASE("ce additivity on random product inputs") {
    for (std::uint64_t seed = 1; seed <= 10; ++seed) {
        const PureState a = random_pure_state(SystemShape({2, 2}), seed);
        const PureState b = random_pure_state(SystemShape({2, 2}), seed + 1000);
        const double lhs = ce(tensor_product(a, b)).ce;
        const double rhs = ce(a).ce + ce(b).ce;
        CHECK(std::abs(lhs - rhs) <= 1e-8);
    }
}

TEST_CASE("recomputing ec on an extracted block yields one full block") {
    const std::vector<PureState> states = {tensor_product(epr(), ghz3()),
                                           tensor_product(ghz3(), epr()),
                                           tensor_product(epr(), epr())};
    for (const PureState& s : states) {
        const EntanglementCombination ec = entanglement_combination(s);
        for (const PartySubset& block : ec.blocks) {
            if (block.count() < 2) continue;
            const PureState sub = reduced_pure_state(s, block);
            CHECK(entanglement_combination(sub).is_fully_entangled());
        }
    }
}

TEST_CASE("discovery order lists blocks by non-decreasing size") {
    // products of random factors over shuffled party layouts
    for (std::uint64_t seed = 1; seed <= 8; ++seed) {
        PureState s = tensor_product(random_pure_state(SystemShape({2, 2}), seed),
                                     random_pure_state(SystemShape({2}), seed + 100));
        s = tensor_product(s, random_pure_state(SystemShape({2, 2}), seed + 200));
        const std::vector<std::vector<int>> layouts = {
            {0, 1, 2, 3, 4}, {4, 2, 0, 3, 1}, {2, 3, 4, 0, 1}};
        for (const auto& layout : layouts) {
            const EntanglementCombination ec = entanglement_combination(permute_parties(s, layout));
            for (std::size_t k = 1; k < ec.blocks.size(); ++k)
                CHECK(ec.blocks[k - 1].count() <= ec.blocks[k].count());
            // same-size neighbours appear in lexicographic order of their
            // smallest party
            for (std::size_t k = 1; k < ec.blocks.size(); ++k)
                if (ec.blocks[k - 1].count() == ec.blocks[k].count())
                    CHECK(ec.blocks[k - 1].min_party() < ec.blocks[k].min_party());
        }
    }
}

TEST_CASE("ec matches the exhaustive-bipartition oracle on small systems") {
    std::vector<PureState> states = {epr(), ghz3(), w3(), tensor_product(epr(), epr()),
                                     tensor_product(basis_state({2}, 0), epr()),
                                     tensor_product(epr(), basis_state({2}, 1)),
                                     basis_state({2, 2, 2, 2}, 9), cat_state(4)};
    for (int n = 2; n <= 4; ++n)
        for (std::uint64_t seed = 1; seed <= 10; ++seed)
            states.push_back(random_pure_state(SystemShape(std::vector<int>(static_cast<std::size_t>(n), 2)), seed));

    for (const PureState& s : states) {
        const EntanglementCombination mine = entanglement_combination(s);
        const EntanglementCombination oracle = ec_oracle(s);
        CHECK(canonically_equal(mine, oracle));
    }
}

TEST_CASE("party relabeling permutes blocks and preserves ce") {
    const std::vector<std::vector<int>> perms = {{2, 0, 1, 3, 4}, {4, 3, 2, 1, 0}, {1, 0, 3, 2, 4}};
    const PureState s = tensor_product(epr(), ghz3());
    const CEReport base = ce(s);
    for (const auto& source : perms) {
        const PureState permuted = permute_parties(s, source);
        const CEReport after = ce(permuted);
        CHECK(std::abs(after.ce - base.ce) < 1e-10);

        // party j of `permuted` is party source[j] of `s`; map base blocks
        std::vector<int> new_label(source.size());
        for (std::size_t j = 0; j < source.size(); ++j)
            new_label[static_cast<std::size_t>(source[j])] = static_cast<int>(j);
        EntanglementCombination mapped;
        mapped.num_parties = base.ec.num_parties;
        for (const PartySubset& blk : base.ec.blocks) {
            std::uint64_t mask = 0;
            for (int p : blk.parties()) mask |= std::uint64_t{1} << new_label[static_cast<std::size_t>(p)];
            mapped.blocks.emplace_back(mask, mapped.num_parties);
        }
        CHECK(canonically_equal(after.ec, mapped));
    }
}

TEST_CASE("detail mode records exactly the entropies the sum used") {
    const CEReport report = ce(tensor_product(epr(), ghz3()), Tolerances{}, true);
    REQUIRE(report.subset_entropies.has_value());
    CHECK(report.subset_entropies->size() == 8);  // 2 for the pair block, 6 for the triple

    // every key must lie inside one block
    for (const auto& [mask, value] : *report.subset_entropies) {
        bool inside = false;
        for (const auto& [blk, v] : report.block_cefs)
            if ((mask & blk.mask()) == mask && mask != blk.mask()) inside = true;
        CHECK(inside);
        CHECK(value == doctest::Approx(1.0).epsilon(1e-10));
    }

    // the recorded entropies reproduce the block cefs
    for (const auto& [blk, v] : report.block_cefs) {
        if (blk.count() < 2) continue;
        double sum = 0.0;
        for (const auto& [mask, value] : *report.subset_entropies)
            if ((mask & blk.mask()) == mask && mask != blk.mask()) sum += value;
        CHECK(v == doctest::Approx(0.5 * sum).epsilon(1e-12));
    }

    CHECK_FALSE(ce(epr()).subset_entropies.has_value());
}
