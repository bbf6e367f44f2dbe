#include <doctest.h>

#include <algorithm>

#include "grnmod/analysis.hpp"

using namespace grnmod;

namespace {

Genome random_genome(int n, int edges, Rng& rng)
{
    Genome g(n);
    while (g.edge_count() < edges)
        g.set(static_cast<int>(rng.below(n)), static_cast<int>(rng.below(n)),
              rng.bernoulli(0.5) ? 1 : -1);
    return g;
}

Individual ind(double fitness, std::optional<double> q, int tag = 0)
{
    Genome g(3);
    if (tag > 0)
        g.set(tag % 3, (tag / 3) % 3, 1);
    return {g, fitness, q};
}

const Partition kHalves = Partition::parse("0,0,0,0,0,1,1,1,1,1");

} // namespace

TEST_CASE("dominance extraction recovers planted extremes")
{
    TrialRecord rec;
    rec.history = {
        {ind(0.9, 0.1, 1), ind(0.2, 0.6, 2)},
        // Inside the window from here on.
        {ind(0.7, 0.45, 3), ind(0.4, 0.45, 4), ind(0.8, 0.2, 5)},
        {ind(0.85, 0.3, 6), ind(0.85, -0.1, 7), ind(0.1, std::nullopt, 8)},
        {ind(0.3, 0.2, 1)},
    };
    const auto d = extract_dominance(rec, 1, 2);
    // Highest Q is 0.45 (twice); the fitter of the two wins.
    CHECK(d.fittest_of_most_modular.individual.fitness == 0.7);
    CHECK(d.fittest_of_most_modular.generation == 1);
    // Highest fitness is 0.85 (twice); the less modular wins.
    CHECK(*d.least_modular_of_fittest.individual.q == -0.1);
    CHECK(d.least_modular_of_fittest.generation == 2);

    const auto single = extract_dominance(TrialRecord{{}, 0, {}, {}, {{ind(0.5, 0.2, 4)}}, 0, 0}, 0, 0);
    CHECK(single.fittest_of_most_modular.individual.genome ==
          single.least_modular_of_fittest.individual.genome);

    CHECK_THROWS(extract_dominance(rec, 7, 9));
    CHECK_THROWS(DominanceTracker(5, 4));
}

TEST_CASE("trimming inter-module edges")
{
    Rng rng(1);
    Genome intra(10);
    intra.set(0, 1, 1);
    intra.set(7, 6, -1);
    CHECK(trim_inter_module(intra, kHalves) == intra);
    CHECK(inter_module_edges(intra, kHalves).empty());

    for (int k = 0; k < 50; ++k) {
        const Genome g = random_genome(10, 25, rng);
        const Genome t = trim_inter_module(g, kHalves);
        CHECK(inter_module_edges(t, kHalves).empty());
        CHECK(t.edge_count() + static_cast<int>(inter_module_edges(g, kHalves).size()) == g.edge_count());
        if (t.edge_count() > 0) {
            const auto q = q_score(t, kHalves);
            REQUIRE(q);
            CHECK(*q >= 0.0);
        }
    }

    Genome balanced(10);
    balanced.set(0, 1, 1);
    balanced.set(5, 6, 1);
    balanced.set(2, 8, -1);
    CHECK(*q_score(trim_inter_module(balanced, kHalves), kHalves) == doctest::Approx(0.5));
}

TEST_CASE("removal lattice")
{
    Rng rng(2);
    const std::vector<Pattern> targets{Pattern::parse("+-+-+-+-+-"), Pattern::parse("+-+-++-+-+")};
    const auto sets = frozen_sets(targets, 200, 0.15, rng);
    const FitnessEvaluator eval(10);

    SUBCASE("no inter-module edges gives a single point")
    {
        const auto lat = removal_paths(Genome::identity(10), kHalves, sets, eval, {}, rng);
        REQUIRE(lat.points.size() == 1);
        CHECK(lat.points[0].removed_count == 0);
        CHECK(lat.points[0].fitness == eval.multi(Genome::identity(10), sets));
    }
    SUBCASE("two edges enumerate four subsets")
    {
        Genome g = Genome::identity(10);
        g.set(0, 7, 1);
        g.set(9, 2, -1);
        const auto lat = removal_paths(g, kHalves, sets, eval, {}, rng);
        REQUIRE(lat.points.size() == 4);
        CHECK(lat.exhaustive);
        CHECK(lat.inter_edges == std::vector<std::pair<int, int>>{{0, 7}, {9, 2}});
        for (const auto& p : lat.points) {
            Genome h = g;
            for (std::size_t e = 0; e < 2; ++e)
                if (p.removed[e])
                    h.set(lat.inter_edges[e].first, lat.inter_edges[e].second, 0);
            CHECK(p.fitness == eval.multi(h, sets));
        }
        CHECK(lat.points.back().fitness == eval.multi(trim_inter_module(g, kHalves), sets));
    }
    SUBCASE("endpoints match direct and trimmed evaluation")
    {
        for (int k = 0; k < 10; ++k) {
            const Genome g = random_genome(10, 20, rng);
            RemovalOptions opts;
            opts.subset_cap = k % 2 ? 1 : (std::uint64_t{1} << 16);
            opts.sampled_orders = 5;
            const auto lat = removal_paths(g, kHalves, sets, eval, opts, rng);
            const double direct = eval.multi(g, sets);
            const double trimmed = eval.multi(trim_inter_module(g, kHalves), sets);
            const auto inter = static_cast<int>(lat.inter_edges.size());
            for (const auto& p : lat.points) {
                if (p.removed_count == 0)
                    CHECK(p.fitness == direct);
                if (p.removed_count == inter)
                    CHECK(p.fitness == trimmed);
            }
            if (!lat.exhaustive && inter > 0)
                CHECK(lat.points.size() == static_cast<std::size_t>(5 * (inter + 1)));
        }
    }
}

TEST_CASE("neighbor probe")
{
    Rng rng(3);
    const std::vector<Pattern> targets{Pattern::parse("++++")};
    const auto sets = frozen_sets(targets, 3000, 0.15, rng);
    const FitnessEvaluator eval(4);
    const Partition p = Partition::single(4);

    // Gene 2 represses gene 1: with both active gene 1's input is zero, so the
    // all-active target is not a fixed point. Deleting that entry restores it.
    Genome g = Genome::identity(4);
    g.set(1, 0, -1);
    const Genome fixed = Genome::identity(4);
    CHECK(exact_fitness_oracle(fixed, targets[0], 0.15) > exact_fitness_oracle(g, targets[0], 0.15));

    SUBCASE("zero mutation leaves every neighbor unchanged")
    {
        const auto probe = neighbor_probe(g, 20, 0.0, sets, eval, p, EdgeCollapse::Union, rng);
        CHECK(probe.samples.size() == 21);
        for (const auto& s : probe.samples)
            CHECK(s.fitness == probe.self_fitness);
        CHECK(probe.max_fitness == probe.self_fitness);
        CHECK(probe.max_q == probe.self_q);
    }
    SUBCASE("a fitter neighbor is found")
    {
        const auto probe = neighbor_probe(g, 499, 0.25, sets, eval, p, EdgeCollapse::Union, rng);
        CHECK(probe.samples.size() == 500);
        CHECK(probe.samples[0].id == 0);
        CHECK(probe.max_fitness > probe.self_fitness);
        CHECK(probe.max_fitness >= eval.multi(fixed, sets));
        double best = 0.0;
        for (const auto& s : probe.samples)
            best = std::max(best, s.fitness);
        CHECK(best == probe.max_fitness);
    }
}
