import json
import math

import pytest

import grnmod


def test_identity_genome_holds_every_state():
    g = grnmod.Genome.identity(4)
    start = grnmod.Pattern.parse("+--+")
    assert grnmod.find_attractor(g, start) == start
    assert grnmod.hamming(start, grnmod.Pattern.parse("++++")) == 2


def test_oscillator_has_no_fixed_point():
    # Two genes repressing each other without self-regulation flip together.
    g = grnmod.Genome.from_dense(2, [0, -1, -1, 0])
    assert grnmod.find_attractor(g, grnmod.Pattern.parse("++")) is None


def test_exact_fitness_identity_matches_binomial_sum():
    n, rate = 6, 0.15
    expected_gamma = sum(
        math.comb(n, k) * rate**k * (1 - rate) ** (n - k) * (1 - k / n) ** 5 for k in range(n + 1)
    )
    got = grnmod.exact_fitness(grnmod.Genome.identity(n), grnmod.Pattern.parse("+-+-+-"), rate)
    assert got == pytest.approx(1 - math.exp(-3 * expected_gamma), abs=1e-12)
    assert got < grnmod.fitness_ceiling()


def test_sampled_fitness_is_seeded():
    g = grnmod.Genome.identity(5)
    t = grnmod.Pattern.parse("+-+-+")
    assert grnmod.fitness(g, t, samples=200, seed=4) == grnmod.fitness(g, t, samples=200, seed=4)


def test_q_score_two_separate_modules():
    g = grnmod.Genome(4)
    g.set(0, 1, 1)
    g.set(2, 3, -1)
    assert grnmod.q_score(g, grnmod.Partition.parse("0,0,1,1")) == pytest.approx(0.5)
    assert grnmod.q_score(g, grnmod.Partition.single(4)) == pytest.approx(0.0)
    assert grnmod.q_score(grnmod.Genome(4), grnmod.Partition.single(4)) is None


def test_default_partition_from_targets():
    targets = [grnmod.Pattern.parse("+-+-+-+-+-"), grnmod.Pattern.parse("+-+-++-+-+")]
    assert grnmod.derive_partition(targets).assignment() == [0] * 5 + [1] * 5


def test_config_round_trip_and_errors():
    cfg = grnmod.config({"population_size": 30, "crossover_type": "horizontal"})
    assert cfg["population_size"] == "30"
    assert cfg["crossover_type"] == "horizontal"
    with pytest.raises(ValueError):
        grnmod.config({"no_such_key": 1})


def test_short_trial_is_deterministic():
    overrides = {"population_size": 20, "max_generation": 15, "perturbation_count": 20}
    a = grnmod.run_trial(overrides, seed=9)
    b = grnmod.run_trial(overrides, seed=9)
    assert len(a["rows"]) == 16
    assert a["rows"] == b["rows"]
    assert all(f <= grnmod.fitness_ceiling() + 1e-12 for f in a["final_fitness"])


def test_wilcoxon_small_exact():
    r = grnmod.wilcoxon([1, 2, 3], [0, 0, 0], "a_greater_b")
    assert r["exact"] and r["p_value"] == pytest.approx(0.125)
    assert grnmod.wilcoxon([1, 2], [1, 2]) is None


def test_experiment_writes_results(tmp_path):
    spec = {
        "name": "smoke",
        "trials": 2,
        "base": {"population_size": 10, "max_generation": 5, "perturbation_count": 10},
        "treatments": [{"name": "a"}, {"name": "b", "overrides": {"crossover_type": "none"}}],
    }
    csv = grnmod.run_experiment(json.dumps(spec), str(tmp_path), 2)
    lines = csv.strip().splitlines()
    assert len(lines) == 5
    assert (tmp_path / "results.csv").read_text() == csv
    assert (tmp_path / "a" / "trial_000" / "trace.csv").exists()
