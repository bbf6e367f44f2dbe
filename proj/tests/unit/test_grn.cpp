#include <doctest.h>

#include <sstream>

#include "grnmod/grn.hpp"
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

Pattern random_pattern(int n, Rng& rng)
{
    return Pattern(n, static_cast<GeneMask>(rng.next()) & low_mask(n));
}

} // namespace

TEST_CASE("pattern parsing and printing")
{
    const Pattern p = Pattern::parse("+-+-+-+-+-");
    CHECK(p.size() == 10);
    CHECK(p.str() == "+-+-+-+-+-");
    CHECK(p.state(0) == 1);
    CHECK(p.state(1) == -1);
    CHECK(Pattern::from_states(p.states()) == p);
    CHECK(p.flipped().str() == "-+-+-+-+-+");
    CHECK_THROWS_AS(Pattern::parse("+-x"), std::invalid_argument);
    CHECK_THROWS_AS(Pattern::from_states({1, 0, -1}), std::invalid_argument);
    CHECK_THROWS_AS(Pattern(3, 0b1000), std::invalid_argument);
}

TEST_CASE("genome entries and text round trip")
{
    Genome g(4);
    g.set(0, 1, 1);
    g.set(2, 1, -1);
    g.set(3, 3, 1);
    CHECK(g.get(0, 1) == 1);
    CHECK(g.get(2, 1) == -1);
    CHECK(g.get(1, 0) == 0);
    CHECK(g.edge_count() == 3);
    CHECK(g.regulator_count(1) == 2);
    g.set(2, 1, 0);
    CHECK(g.edge_count() == 2);
    CHECK_THROWS(g.set(0, 4, 1));
    CHECK_THROWS(g.set(0, 1, 2));
    CHECK_THROWS_AS(Genome(1), std::invalid_argument);
    CHECK_THROWS_AS(Genome(33), std::invalid_argument);

    std::stringstream ss;
    write_genome(ss, g);
    CHECK(ss.str() == "n=4\n0 1 0 0\n0 0 0 0\n0 0 0 0\n0 0 0 1\n");
    CHECK(read_genome(ss) == g);
    CHECK(Genome::from_dense(4, g.dense()) == g);

    std::istringstream short_file("n=3\n0 0 0\n0 0 0\n");
    CHECK_THROWS_WITH_AS(read_genome(short_file), doctest::Contains("row 2"), std::runtime_error);
    std::istringstream bad_value("n=2\n0 2\n0 0\n");
    CHECK_THROWS(read_genome(bad_value));
}

TEST_CASE("step on hand-traced networks")
{
    // No regulators: every input is zero, which maps to inactive.
    CHECK(step(Genome(3), Pattern::parse("+++")) == Pattern::parse("---"));

    Rng rng(7);
    const Genome id = Genome::identity(6);
    for (int k = 0; k < 20; ++k) {
        const Pattern s = random_pattern(6, rng);
        CHECK(step(id, s) == s);
    }

    // Gene 1 activates gene 2; gene 2 represses gene 1.
    Genome g(2);
    g.set(0, 1, 1);
    g.set(1, 0, -1);
    CHECK(step(g, Pattern::parse("++")) == Pattern::parse("-+"));
}

TEST_CASE("step agrees with a dense reference update")
{
    Rng rng(11);
    for (int trial = 0; trial < 300; ++trial) {
        const int n = 2 + static_cast<int>(rng.below(15));
        const Genome g = random_genome(n, 0.3, rng);
        const Pattern s = random_pattern(n, rng);
        CHECK(step(g, s).states() == oracle::step(g.dense(), s.states()));
    }
}

TEST_CASE("attractor search")
{
    SUBCASE("identity holds its start")
    {
        const auto a = find_attractor(Genome::identity(5), Pattern::parse("+--+-"), 20);
        REQUIRE(a);
        CHECK(a->state == Pattern::parse("+--+-"));
        CHECK(a->steps == 0);
    }
    SUBCASE("mutual activation oscillates")
    {
        Genome g(2);
        g.set(0, 1, 1);
        g.set(1, 0, 1);
        CHECK(step(g, Pattern::parse("+-")) == Pattern::parse("-+"));
        CHECK(step(g, Pattern::parse("-+")) == Pattern::parse("+-"));
        CHECK_FALSE(find_attractor(g, Pattern::parse("+-"), 20));
    }
    SUBCASE("empty network settles to all inactive")
    {
        const auto a = find_attractor(Genome(4), Pattern::parse("+-++"), 20);
        REQUIRE(a);
        CHECK(a->state == Pattern::parse("----"));
        CHECK(a->steps <= 1);
    }
    SUBCASE("step limit is honoured")
    {
        // A shift register needs n-1 steps to drain a single active gene.
        Genome chain(5);
        for (int i = 0; i + 1 < 5; ++i)
            chain.set(i, i + 1, 1);
        const Pattern start = Pattern::parse("+----");
        CHECK_FALSE(find_attractor(chain, start, 1));
        const auto a = find_attractor(chain, start, 20);
        REQUIRE(a);
        CHECK(a->state == Pattern::parse("-----"));
        CHECK_THROWS_AS(find_attractor(chain, start, 0), std::invalid_argument);
    }
}

TEST_CASE("hamming distance is a metric")
{
    const Pattern a = Pattern::parse("+-+-+-+-+-");
    const Pattern b = Pattern::parse("+-+-++-+-+");
    CHECK(hamming(a, a) == 0);
    CHECK(hamming(a, a.flipped()) == 10);
    CHECK(hamming(a, b) == 5);

    Rng rng(3);
    for (int k = 0; k < 500; ++k) {
        const Pattern x = random_pattern(12, rng);
        const Pattern y = random_pattern(12, rng);
        const Pattern z = random_pattern(12, rng);
        CHECK(hamming(x, y) == hamming(y, x));
        CHECK(hamming(x, z) <= hamming(x, y) + hamming(y, z));
        CHECK((hamming(x, y) == 0) == (x == y));
    }
    CHECK_THROWS(hamming(a, Pattern::parse("+-")));
}

TEST_CASE("seed derivation is stable and label sensitive")
{
    CHECK(derive_seed(1, "init") == derive_seed(1, "init"));
    CHECK(derive_seed(1, "init") != derive_seed(1, "mutation"));
    CHECK(derive_seed(1, std::uint64_t{0}) != derive_seed(1, std::uint64_t{1}));
    CHECK(derive_seed(1, "a") != derive_seed(2, "a"));

    Rng a(42), b(42);
    for (int k = 0; k < 100; ++k)
        CHECK(a.next() == b.next());

    Rng r(5);
    std::vector<int> counts(7, 0);
    for (int k = 0; k < 70000; ++k) {
        const auto v = r.below(7);
        REQUIRE(v < 7);
        ++counts[v];
    }
    for (int c : counts)
        CHECK(std::abs(c - 10000) < 500);
    for (int k = 0; k < 1000; ++k) {
        const double u = r.uniform();
        CHECK(u >= 0.0);
        CHECK(u < 1.0);
    }
}
