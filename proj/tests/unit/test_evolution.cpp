#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <map>

#include "grnmod/evolution.hpp"

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

int count_entries(const Genome& g, const Partition& p, bool intra)
{
    int c = 0;
    for (int j = 0; j < g.size(); ++j)
        for (int i = 0; i < g.size(); ++i)
            if (g.get(j, i) != 0 && (p.module_of(j) == p.module_of(i)) == intra)
                ++c;
    return c;
}

EvoConfig small_config()
{
    EvoConfig cfg;
    cfg.population_size = 20;
    cfg.max_generation = 12;
    cfg.perturbation_count = 15;
    cfg.static_perturbation_count = 15;
    cfg.schedule = TargetSchedule({{0, Pattern::parse("+-+-+-+-+-")}, {6, Pattern::parse("+-+-++-+-+")}});
    return cfg;
}

} // namespace

TEST_CASE("target schedule")
{
    const auto s = TargetSchedule::two_target_default();
    CHECK(s.gene_count() == 10);
    CHECK(s.active_count(0) == 1);
    CHECK(s.active_count(499) == 1);
    CHECK(s.active_count(500) == 2);
    CHECK(s.active_count(2000) == 2);
    CHECK(s.targets()[1].str() == "+-+-++-+-+");
    CHECK_THROWS(TargetSchedule({{1, Pattern::parse("++")}}));
    CHECK_THROWS(TargetSchedule({{0, Pattern::parse("++")}, {0, Pattern::parse("+-")}}));
    CHECK_THROWS(TargetSchedule({{0, Pattern::parse("++")}, {5, Pattern::parse("+-+")}}));
}

TEST_CASE("initial population")
{
    EvoConfig cfg;
    Rng rng(1);
    auto pop = init_population(cfg, 10, rng);
    CHECK(pop.size() == 100);
    for (const auto& ind : pop)
        CHECK(ind.genome.edge_count() == 20);

    cfg.edge_size = 0;
    for (const auto& ind : init_population(cfg, 10, rng))
        CHECK(ind.genome.edge_count() == 0);

    cfg.edge_size = 20;
    Rng a(5), b(5);
    const auto pa = init_population(cfg, 10, a);
    const auto pb = init_population(cfg, 10, b);
    for (std::size_t k = 0; k < pa.size(); ++k)
        CHECK(pa[k].genome == pb[k].genome);

    cfg.init_mode = InitMode::Founder;
    const auto founders = init_population(cfg, 10, rng);
    for (const auto& ind : founders)
        CHECK(ind.genome == founders.front().genome);

    cfg.edge_size = 101;
    CHECK_THROWS(init_population(cfg, 10, rng));
}

TEST_CASE("mutation loss probability")
{
    CHECK(loss_probability(2, 10) == doctest::Approx(0.5));
    CHECK(loss_probability(0, 10) == 0.0);
    CHECK(loss_probability(10, 10) == 1.0);

    Rng rng(2);
    // mu = 1 mutates every gene: empty columns must gain, full columns must lose.
    const Genome grown = mutate(Genome(6), 1.0, rng);
    for (int i = 0; i < 6; ++i)
        CHECK(grown.regulator_count(i) == 1);
    Genome full(6);
    for (int j = 0; j < 6; ++j)
        for (int i = 0; i < 6; ++i)
            full.set(j, i, 1);
    const Genome shrunk = mutate(full, 1.0, rng);
    for (int i = 0; i < 6; ++i)
        CHECK(shrunk.regulator_count(i) == 5);

    const Genome g = random_genome(10, 20, rng);
    CHECK(mutate(g, 0.0, rng) == g);
}

TEST_CASE("mutation keeps edge counts in the stationary band")
{
    // Each column is a birth-death chain; its stationary mean follows from
    // detailed balance pi(r+1) / pi(r) = (1 - p(r)) / p(r+1).
    const int n = 10;
    std::vector<double> pi(n + 1, 0.0);
    pi[0] = 1.0;
    for (int r = 0; r < n; ++r)
        pi[r + 1] = pi[r] * (1.0 - loss_probability(r, n)) / loss_probability(r + 1, n);
    double total = 0.0, mean = 0.0;
    for (int r = 0; r <= n; ++r) {
        total += pi[r];
        mean += r * pi[r];
    }
    mean /= total;

    Rng rng(8);
    Genome g(n);
    double sum = 0.0;
    int samples = 0;
    for (int t = 0; t < 20000; ++t) {
        g = mutate(g, 1.0, rng);
        if (t >= 1000) {
            sum += g.edge_count();
            ++samples;
        }
    }
    const double observed = sum / samples / n;
    CHECK(observed == doctest::Approx(mean).epsilon(0.03));
    CHECK(mean == doctest::Approx(2.0).epsilon(0.2));
}

TEST_CASE("horizontal crossover")
{
    Rng rng(3);
    const Genome a = random_genome(10, 30, rng);
    const Genome b = random_genome(10, 30, rng);

    const auto [c1, c2] = crossover_horizontal(a, b, 5);
    for (int j = 0; j < 10; ++j)
        for (int i = 0; i < 10; ++i) {
            CHECK(c1.get(j, i) == (j < 5 ? a : b).get(j, i));
            CHECK(c2.get(j, i) == (j < 5 ? b : a).get(j, i));
        }

    for (int row : {1, 9}) {
        const auto [s1, s2] = crossover_horizontal(a, a, row);
        CHECK(s1 == a);
        CHECK(s2 == a);
        const auto [x1, x2] = crossover_horizontal(a, b, row);
        const auto [y1, y2] = crossover_horizontal(b, a, row);
        CHECK(x1 == y2);
        CHECK(x2 == y1);
        CHECK(x1.edge_count() + x2.edge_count() == a.edge_count() + b.edge_count());
    }
    CHECK_THROWS(crossover_horizontal(a, b, 0));
    CHECK_THROWS(crossover_horizontal(a, b, 10));
}

TEST_CASE("diagonal crossover")
{
    const Partition p = Partition::parse("0,0,1,1");
    SUBCASE("hand-built block transfer")
    {
        Genome a(4); // intra-module entries only
        a.set(0, 1, 1);
        a.set(3, 2, -1);
        a.set(2, 2, 1);
        Genome b(4); // inter-module entries only
        b.set(0, 3, -1);
        b.set(2, 1, 1);
        const auto [c1, c2] = crossover_diagonal(a, b, p);
        CHECK(c1 == [&] {
            Genome expect = a;
            expect.set(0, 3, -1);
            expect.set(2, 1, 1);
            return expect;
        }());
        CHECK(c2 == Genome(4));
    }
    SUBCASE("block conservation on random parents")
    {
        Rng rng(4);
        const Partition p10 = Partition::parse("0,0,0,0,0,1,1,1,1,1");
        for (int k = 0; k < 50; ++k) {
            const Genome a = random_genome(10, 25, rng);
            const Genome b = random_genome(10, 25, rng);
            const auto [c1, c2] = crossover_diagonal(a, b, p10);
            CHECK(count_entries(c1, p10, true) == count_entries(a, p10, true));
            CHECK(count_entries(c1, p10, false) == count_entries(b, p10, false));
            CHECK(count_entries(c2, p10, true) == count_entries(b, p10, true));
            CHECK(count_entries(c2, p10, false) == count_entries(a, p10, false));
            const auto [s1, s2] = crossover_diagonal(a, a, p10);
            CHECK(s1 == a);
            CHECK(s2 == a);
        }
    }
}

TEST_CASE("selection")
{
    Rng rng(6);
    std::vector<Individual> one{{Genome(3), 0.4, std::nullopt}};
    CHECK(Selector(one, {SelectionType::Proportional, 2}).pick(rng) == 0);
    CHECK(Selector(one, {SelectionType::Tournament, 3}).pick(rng) == 0);

    SUBCASE("proportional frequencies")
    {
        std::vector<Individual> two{{Genome(3), 0.9, std::nullopt}, {Genome(3), 0.1, std::nullopt}};
        const Selector sel(two, {SelectionType::Proportional, 2});
        const int draws = 100000;
        int first = 0;
        for (int k = 0; k < draws; ++k)
            first += sel.pick(rng) == 0;
        CHECK(std::abs(first - 0.9 * draws) < 3 * std::sqrt(draws * 0.9 * 0.1));
    }
    SUBCASE("zero total fitness falls back to uniform")
    {
        std::vector<Individual> zeros(4, Individual{Genome(3), 0.0, std::nullopt});
        const Selector sel(zeros, {SelectionType::Proportional, 2});
        CHECK(sel.uniform_fallback());
        std::vector<int> counts(4, 0);
        for (int k = 0; k < 40000; ++k)
            ++counts[sel.pick(rng)];
        for (int c : counts)
            CHECK(std::abs(c - 10000) < 600);
    }
    SUBCASE("tournament of one is uniform")
    {
        std::vector<Individual> pop;
        for (int k = 0; k < 5; ++k)
            pop.push_back({Genome(3), 0.1 * (k + 1), std::nullopt});
        const Selector sel(pop, {SelectionType::Tournament, 1});
        std::vector<int> counts(5, 0);
        for (int k = 0; k < 50000; ++k)
            ++counts[sel.pick(rng)];
        for (int c : counts)
            CHECK(std::abs(c - 10000) < 600);
    }
    SUBCASE("tournament winners ignore positive rescaling")
    {
        std::vector<Individual> pop, scaled;
        Rng fit(1);
        for (int k = 0; k < 30; ++k) {
            const double f = fit.uniform();
            pop.push_back({Genome(3), f, std::nullopt});
            scaled.push_back({Genome(3), 7.5 * f, std::nullopt});
        }
        Rng r1(99), r2(99);
        const Selector s1(pop, {SelectionType::Tournament, 3});
        const Selector s2(scaled, {SelectionType::Tournament, 3});
        for (int k = 0; k < 2000; ++k)
            CHECK(s1.pick(r1) == s2.pick(r2));
    }
    SUBCASE("tournament ties are broken uniformly")
    {
        std::vector<Individual> tied(3, Individual{Genome(3), 0.5, std::nullopt});
        const Selector sel(tied, {SelectionType::Tournament, 3});
        std::vector<int> counts(3, 0);
        for (int k = 0; k < 30000; ++k)
            ++counts[sel.pick(rng)];
        for (int c : counts)
            CHECK(std::abs(c - 10000) < 500);
    }
}

TEST_CASE("breeding order")
{
    EvoConfig cfg = small_config();
    const Partition partition = cfg.effective_partition();
    Rng rng(10);
    std::vector<Individual> pop;
    for (int k = 0; k < 20; ++k)
        pop.push_back({random_genome(10, 20, rng), 0.01 * k, std::nullopt});

    SUBCASE("elites survive unmutated")
    {
        cfg.elite_size = 19;
        cfg.mutation_rate = 1.0;
        TrialStreams streams(1);
        const auto next = breed(pop, cfg, partition, streams);
        REQUIRE(next.size() == 20);
        for (int k = 0; k < 19; ++k)
            CHECK(next[k].genome == pop[19 - k].genome);
        // Only the single non-elite slot can be new.
        int fresh = 0;
        for (const auto& ind : next)
            fresh += std::none_of(pop.begin(), pop.end(),
                                  [&](const Individual& p) { return p.genome == ind.genome; });
        CHECK(fresh <= 1);
    }
    SUBCASE("selection-only dynamics resample the population")
    {
        cfg.mutation_rate = 0.0;
        cfg.crossover = CrossoverType::None;
        cfg.reproduction_rate = 1.0;
        TrialStreams streams(2);
        for (const auto& ind : breed(pop, cfg, partition, streams))
            CHECK(std::any_of(pop.begin(), pop.end(),
                              [&](const Individual& p) { return p.genome == ind.genome; }));
    }
    SUBCASE("elite size must leave a slot")
    {
        cfg.elite_size = 20;
        TrialStreams streams(3);
        CHECK_THROWS(breed(pop, cfg, partition, streams));
    }
}

TEST_CASE("trial runs")
{
    SUBCASE("generation zero only")
    {
        EvoConfig cfg = small_config();
        cfg.max_generation = 0;
        const auto rec = run_trial(cfg, 1);
        CHECK(rec.rows.size() == 1);
        CHECK(rec.rows[0].generation == 0);
        CHECK(rec.final_population.size() == 20);
    }
    SUBCASE("bit-identical reruns")
    {
        for (auto mode : {FitnessMode::Dynamic, FitnessMode::Static}) {
            for (auto cross : {CrossoverType::None, CrossoverType::Horizontal, CrossoverType::Diagonal}) {
                EvoConfig cfg = small_config();
                cfg.fitness_mode = mode;
                cfg.crossover = cross;
                const auto a = run_trial(cfg, 77);
                const auto b = run_trial(cfg, 77);
                REQUIRE(a.rows.size() == 13);
                for (std::size_t k = 0; k < a.rows.size(); ++k) {
                    CHECK(a.rows[k].best_fitness == b.rows[k].best_fitness);
                    CHECK(a.rows[k].mean_fitness == b.rows[k].mean_fitness);
                    CHECK(a.rows[k].mean_q == b.rows[k].mean_q);
                }
                for (std::size_t k = 0; k < a.final_population.size(); ++k)
                    CHECK(a.final_population[k].genome == b.final_population[k].genome);
                CHECK(run_trial(cfg, 78).final_population[0].genome !=
                      a.final_population[0].genome);
            }
        }
    }
    SUBCASE("second target activates on schedule")
    {
        EvoConfig cfg = small_config();
        const auto rec = run_trial(cfg, 3);
        for (const auto& row : rec.rows)
            CHECK(row.active_targets == (row.generation >= 6 ? 2 : 1));
    }
    SUBCASE("paired seeds share the initial population across treatments")
    {
        EvoConfig a = small_config();
        EvoConfig b = small_config();
        b.crossover = CrossoverType::None;
        b.elite_size = 3;
        std::vector<Genome> first_a, first_b;
        run_trial(a, 9, [&](int gen, std::span<const Individual> pop) {
            if (gen == 0)
                for (const auto& i : pop)
                    first_a.push_back(i.genome);
        });
        run_trial(b, 9, [&](int gen, std::span<const Individual> pop) {
            if (gen == 0)
                for (const auto& i : pop)
                    first_b.push_back(i.genome);
        });
        CHECK(first_a == first_b);
    }
    SUBCASE("summary row")
    {
        std::vector<Individual> pop{{Genome(3), 0.2, 0.1}, {Genome(3), 0.8, -0.2}, {Genome(3), 0.8, 0.3},
                                    {Genome(3), 0.5, std::nullopt}};
        const auto row = summarize_generation(4, 2, pop);
        CHECK(row.best_fitness == 0.8);
        CHECK(row.mean_fitness == doctest::Approx(0.575));
        CHECK(*row.best_q == 0.3);
        CHECK(*row.mean_q == doctest::Approx(0.2 / 3));
        CHECK(*row.fittest_q == -0.2);
    }
}
