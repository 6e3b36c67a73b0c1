#include <doctest.h>

#include <cmath>
#include <random>
#include <sstream>

#include "mobai/error.hpp"
#include "mobai/instance.hpp"
#include "oracles.hpp"

using namespace mobai;

TEST_CASE("best arms of the two-arm three-objective instance") {
    const Instance inst = oracle::near_tie_instance(1.0);
    CHECK(best_arms(inst, TieMode::strict) == BestArms{{0, 1, 1}});
}

TEST_CASE("lowest_index breaks exact ties toward arm 1") {
    const Instance inst({{0.0}, {0.0}}, TieMode::lowest_index);
    CHECK(best_arms(inst, TieMode::lowest_index) == BestArms{{0}});
    CHECK_THROWS_AS(best_arms(inst, TieMode::strict), DuplicateMaximum);
}

TEST_CASE("strict instances reject duplicate maxima at construction") {
    try {
        Instance({{1.0, 3.0}, {2.0, 3.0}});
        FAIL("expected DuplicateMaximum");
    } catch (const DuplicateMaximum& e) {
        CHECK(e.objective() == 1);
    }
}

TEST_CASE("direct argmax") {
    const Instance inst({{1.0, 0.0}, {2.0, 0.0}, {0.0, 3.0}});
    CHECK(best_arms(inst) == BestArms{{1, 2}});
}

TEST_CASE("gaps follow the sub-optimality definition") {
    const Instance inst = oracle::near_tie_instance(1.0);
    const GapMatrix g = gaps(inst);
    CHECK(g(1, 0) == 100.0);
    CHECK(g(0, 1) == 100.0);
    CHECK(g(0, 2) == 1.0);
    // Arm 2 is best on objective 3, so its own gap there is zero.
    CHECK(g(1, 2) == 0.0);
    CHECK(g(0, 0) == 0.0);
    CHECK(g(1, 1) == 0.0);

    const GapMatrix single = gaps(Instance({{3.0}, {1.0}, {0.0}}));
    CHECK(single(0, 0) == 0.0);
    CHECK(single(1, 0) == 2.0);
    CHECK(single(2, 0) == 3.0);
}

TEST_CASE("invalid shapes") {
    CHECK_THROWS_AS(Instance({{1.0}}), InvalidShape);
    CHECK_THROWS_AS(Instance({{1.0, std::nan("")}, {0.0, 1.0}}), InvalidShape);
    CHECK_THROWS_AS(gen_synthetic(3, 4, 1), InvalidShape);
}

TEST_CASE("synthetic instances") {
    const Instance a = gen_synthetic(20, 10, 123);
    const Instance b = gen_synthetic(20, 10, 123);
    CHECK(a.means().data() == b.means().data());
    CHECK_FALSE(gen_synthetic(20, 10, 124).means().data() == a.means().data());

    const BestArms best = best_arms(a);
    const GapMatrix g = gaps(a);
    for (std::size_t m = 0; m < 10; ++m) {
        CHECK(best[m] == m);
        for (std::size_t i = 0; i < 20; ++i) {
            if (i != m) CHECK(g(i, m) > 0.2);
        }
    }

    const Instance small = gen_synthetic(5, 2, 7);
    for (std::size_t i = 0; i < 5; ++i) {
        for (std::size_t m = 0; m < 2; ++m) {
            const double v = small.mean(i, m);
            if (i == m) {
                CHECK(v >= 1.2);
                CHECK(v <= 2.0);
            } else {
                CHECK(v >= 0.0);
                CHECK(v <= 1.0);
            }
        }
    }
}

TEST_CASE("property: synthetic best arm of objective m is arm m") {
    for (std::uint64_t seed = 0; seed < 200; ++seed) {
        const std::size_t k = 2 + seed % 9;
        const std::size_t m = 1 + seed % k;
        const Instance inst = gen_synthetic(k, m, seed);
        const BestArms best = best_arms(inst);
        for (std::size_t j = 0; j < m; ++j) REQUIRE(best[j] == j);
    }
}

TEST_CASE("property: gap round trip and column-shift invariance") {
    std::mt19937_64 rng(99);
    std::uniform_real_distribution<double> shift(-50.0, 50.0);
    for (int trial = 0; trial < 200; ++trial) {
        const Instance inst = oracle::random_instance(2 + trial % 5, 1 + trial % 3, rng);
        const BestArms best = best_arms(inst);
        const GapMatrix g = gaps(inst);
        for (std::size_t i = 0; i < inst.arms(); ++i) {
            for (std::size_t m = 0; m < inst.objectives(); ++m) {
                REQUIRE(g(i, m) >= 0.0);
                REQUIRE(std::abs(inst.mean(best[m], m) - g(i, m) - inst.mean(i, m)) <= 1e-12);
            }
        }
        Matrix shifted = inst.means();
        const std::size_t col = trial % inst.objectives();
        const double c = shift(rng);
        for (std::size_t i = 0; i < inst.arms(); ++i) shifted(i, col) += c;
        REQUIRE(best_arms(Instance(shifted, TieMode::lowest_index), TieMode::lowest_index) == best);
    }
}

TEST_CASE("instance CSV loading") {
    {
        std::istringstream in("2,1\n1.0\n2.0\n");
        const Instance inst = parse_instance_csv(in, 1.0);
        CHECK(inst.mean(0, 0) == 1.0);
        CHECK(inst.mean(1, 0) == 2.0);
    }
    {
        std::istringstream in("2,1\n1.0\n2.0\n");
        const Instance inst = parse_instance_csv(in, 10.0);
        CHECK(inst.mean(0, 0) == 10.0);
        CHECK(inst.mean(1, 0) == 20.0);
    }
    {
        std::istringstream in("2,2\n1.0,2.0,3.0\n2.0,1.0\n");
        CHECK_THROWS_AS(parse_instance_csv(in), ShapeMismatch);
    }
    {
        std::istringstream in("3,1\n1.0\n2.0\n");
        CHECK_THROWS_AS(parse_instance_csv(in), ShapeMismatch);
    }
    {
        std::istringstream in("2,1\n1.0\nabc\n");
        try {
            parse_instance_csv(in);
            FAIL("expected ParseError");
        } catch (const ParseError& e) {
            CHECK(e.line() == 3);
        }
    }
    {
        std::istringstream in("K,M\n1\n2\n");
        CHECK_THROWS_AS(parse_instance_csv(in), ParseError);
    }
}

TEST_CASE("CSV written by write_instance_csv reloads bit-identically") {
    const Instance inst = gen_synthetic(6, 3, 42);
    std::stringstream buf;
    write_instance_csv(buf, inst);
    const Instance back = parse_instance_csv(buf);
    CHECK(back.means().data() == inst.means().data());
}
