#include <doctest.h>

#include "grnmod/modularity.hpp"
#include "grnmod/random.hpp"
#include "oracles.hpp"

using namespace grnmod;

namespace {

Genome random_genome(int n, double density, Rng& rng)
{
    Genome g(n);
    for (int j = 0; j < n; ++j)
        for (int i = 0; i < n; ++i)
            if (rng.bernoulli(density))
                g.set(j, i, rng.bernoulli(0.5) ? 1 : -1);
    return g;
}

Partition random_partition(int n, Rng& rng)
{
    const int k = 1 + static_cast<int>(rng.below(4));
    std::vector<int> raw(n);
    for (auto& m : raw)
        m = static_cast<int>(rng.below(k));
    // Relabel by first appearance so ids are contiguous.
    std::vector<int> label(k, -1);
    int next = 0;
    for (auto& m : raw) {
        if (label[m] < 0)
            label[m] = next++;
        m = label[m];
    }
    return Partition(raw);
}

} // namespace

TEST_CASE("partition parsing")
{
    const Partition p = Partition::parse("0,0,1,1,2");
    CHECK(p.size() == 5);
    CHECK(p.module_count() == 3);
    CHECK(p.module_of(4) == 2);
    CHECK(p.members(1) == 0b01100);
    CHECK(p.str() == "0,0,1,1,2");
    CHECK_THROWS(Partition::parse("0,2"));
    CHECK_THROWS(Partition::parse("0,,1"));
    CHECK_THROWS(Partition::parse("0,a"));
    CHECK_THROWS(Partition(std::vector<int>{0, -1}));
}

TEST_CASE("partition from target changes")
{
    CHECK(derive_partition(std::vector{Pattern::parse("+-+-+-")}) == Partition::single(6));

    const std::vector<Pattern> two{Pattern::parse("+-+-+-+-+-"), Pattern::parse("+-+-++-+-+")};
    CHECK(derive_partition(two).str() == "0,0,0,0,0,1,1,1,1,1");

    // Three blocks of five flipped in Gray-code order over seven targets.
    std::vector<Pattern> seven;
    GeneMask state = 0b010101010101010;
    const GeneMask blocks[] = {0b11111, 0b11111 << 5, 0b11111 << 10};
    seven.emplace_back(15, state);
    for (int b : {0, 1, 0, 2, 0, 1}) {
        state ^= blocks[b];
        seven.emplace_back(15, state);
    }
    const Partition p = derive_partition(seven);
    CHECK(p.module_count() == 3);
    CHECK(p.str() == "0,0,0,0,0,1,1,1,1,1,2,2,2,2,2");
}

TEST_CASE("Q on hand-built graphs")
{
    const Partition halves = Partition::parse("0,0,1,1");
    Genome two_blocks(4);
    two_blocks.set(0, 1, 1);
    two_blocks.set(3, 2, -1);
    CHECK(*q_score(two_blocks, Partition::single(4)) == doctest::Approx(0.0));
    CHECK(*q_score(two_blocks, halves) == doctest::Approx(0.5));

    Genome across(4);
    across.set(0, 2, 1);
    across.set(0, 3, 1);
    across.set(1, 2, -1);
    across.set(3, 1, 1);
    CHECK(*q_score(across, halves) == doctest::Approx(-0.5));

    CHECK_FALSE(q_score(Genome(4), halves));

    // Reciprocal regulation is one undirected edge by default, two in multi mode.
    Genome mutual(4);
    mutual.set(0, 1, 1);
    mutual.set(1, 0, 1);
    mutual.set(2, 0, 1);
    CHECK(*q_score(mutual, halves) == doctest::Approx(*oracle::q(mutual, halves, false)));
    CHECK(*q_score(mutual, halves, EdgeCollapse::Multi) ==
          doctest::Approx(*oracle::q(mutual, halves, true)));
    CHECK(*q_score(mutual, halves) != doctest::Approx(*q_score(mutual, halves, EdgeCollapse::Multi)));

    // A lone self-loop: L = 1 inside its module, degree 2 = 2L.
    Genome loop(4);
    loop.set(2, 2, 1);
    CHECK(*q_score(loop, halves) == doctest::Approx(0.0));
    CHECK_THROWS(q_score(loop, Partition::parse("0,1")));
}

TEST_CASE("Q agrees with edge classification on random graphs")
{
    Rng rng(12);
    for (int k = 0; k < 1000; ++k) {
        const Genome g = random_genome(10, 0.05 + 0.4 * rng.uniform(), rng);
        const Partition p = random_partition(10, rng);
        for (auto collapse : {EdgeCollapse::Union, EdgeCollapse::Multi}) {
            const auto got = q_score(g, p, collapse);
            const auto want = oracle::q(g, p, collapse == EdgeCollapse::Multi);
            REQUIRE(got.has_value() == want.has_value());
            if (got)
                CHECK(std::abs(*got - *want) < 1e-12);
        }
    }
}

TEST_CASE("Q stays in its range")
{
    Rng rng(13);
    for (int k = 0; k < 10000; ++k) {
        const int n = 2 + static_cast<int>(rng.below(14));
        const Genome g = random_genome(n, rng.uniform(), rng);
        const auto q = q_score(g, random_partition(n, rng));
        if (q) {
            CHECK(*q >= -0.5 - 1e-12);
            CHECK(*q < 1.0);
        }
    }
}
