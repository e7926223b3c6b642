import numpy as np
from django.test import SimpleTestCase
from hypothesis import given, settings, strategies as st

from mechanism.exceptions import ConfigurationError

from .nsga2 import (
    EvolutionError,
    GAConfig,
    ParetoArchive,
    Sample,
    crowding_distance,
    dominates,
    evolve,
    non_dominated_sort,
    polynomial_mutation,
    simulated_binary_crossover,
)

TARGET = np.full(3, 0.5)


def brute_force_fronts(objectives):
    """Peel off non-dominated layers with an O(n^2 m) pairwise check"""
    values = np.asarray(objectives, dtype=float)
    remaining = list(range(len(values)))
    fronts = []
    while remaining:
        front = [i for i in remaining if not any(dominates(values[j], values[i]) for j in remaining if j != i)]
        fronts.append(front)
        remaining = [i for i in remaining if i not in front]
    return fronts


def sphere_and_distance(genome):
    return np.array([np.sum(genome ** 2), np.sum((genome - TARGET) ** 2)])


def hypervolume_2d(points, reference):
    points = sorted(tuple(p) for p in np.asarray(points) if np.all(np.asarray(p) < reference))
    volume, floor = 0.0, reference[1]
    for f1, f2 in points:
        if f2 < floor:
            volume += (reference[0] - f1) * (floor - f2)
            floor = f2
    return volume


def make_sample(trial, objectives):
    return Sample(trial, 1, np.zeros(2), tuple(objectives))


class NonDominatedSortTests(SimpleTestCase):
    def test_single_individual(self):
        self.assertEqual(non_dominated_sort([[3.0, 4.0]]), [[0]])

    def test_hand_computed_fronts(self):
        self.assertEqual(non_dominated_sort([[0, 1], [1, 0], [1, 1]]), [[0, 1], [2]])

    def test_matches_brute_force(self):
        rng = np.random.default_rng(5)
        values = rng.integers(0, 6, size=(200, 2)).astype(float)
        values[:, 1] += rng.uniform(0, 1, 200).round(1)
        self.assertEqual(non_dominated_sort(values), brute_force_fronts(values))

    @settings(max_examples=50, deadline=None)
    @given(st.lists(st.tuples(st.integers(0, 4), st.integers(0, 4), st.integers(0, 4)), min_size=1, max_size=30))
    def test_fronts_partition_and_layer(self, values):
        fronts = non_dominated_sort(values)
        self.assertEqual(sorted(i for front in fronts for i in front), list(range(len(values))))
        array = np.asarray(values, dtype=float)
        for k, front in enumerate(fronts):
            for i in front:
                self.assertFalse(any(dominates(array[j], array[i]) for j in front))
                if k:
                    self.assertTrue(any(dominates(array[j], array[i]) for j in fronts[k - 1]))


class CrowdingDistanceTests(SimpleTestCase):
    def test_small_fronts_are_boundary(self):
        self.assertTrue(np.all(np.isinf(crowding_distance([[0.0, 1.0]]))))
        self.assertTrue(np.all(np.isinf(crowding_distance([[0.0, 1.0], [1.0, 0.0]]))))

    def test_collinear_middle_point(self):
        distance = crowding_distance([[0.0, 2.0], [1.0, 1.0], [2.0, 0.0]])
        self.assertEqual(distance[1], 2.0)
        self.assertTrue(np.isinf(distance[0]) and np.isinf(distance[2]))

    def test_interior_duplicate_gets_zero(self):
        distance = crowding_distance([[0, 4], [2, 2], [2, 2], [2, 2], [4, 0]])
        np.testing.assert_array_equal(distance, [np.inf, 1.0, 0.0, 1.0, np.inf])

    def test_identical_front_gets_zero(self):
        np.testing.assert_array_equal(crowding_distance([[1.0, 1.0]] * 4), np.zeros(4))

    def test_permutation_permutes_distances(self):
        rng = np.random.default_rng(8)
        values = rng.uniform(size=(12, 2))
        order = rng.permutation(12)
        np.testing.assert_array_equal(crowding_distance(values[order]), crowding_distance(values)[order])


class ParetoArchiveTests(SimpleTestCase):
    def test_dominated_and_equal_samples_are_rejected(self):
        archive = ParetoArchive()
        self.assertTrue(archive.add(make_sample(0, (1.0, 1.0))))
        self.assertFalse(archive.add(make_sample(1, (1.0, 1.0))))
        self.assertFalse(archive.add(make_sample(2, (2.0, 1.0))))
        self.assertTrue(archive.add(make_sample(3, (0.0, 3.0))))
        self.assertTrue(archive.add(make_sample(4, (0.0, 0.5))))
        self.assertEqual([entry.trial for entry in archive], [4])


class OperatorTests(SimpleTestCase):
    @settings(max_examples=100, deadline=None)
    @given(st.integers(0, 2 ** 32 - 1))
    def test_offspring_stay_in_bounds(self, seed):
        rng = np.random.default_rng(seed)
        first, second = rng.uniform(-1, 1, 8), rng.uniform(-1, 1, 8)
        first[0], second[0] = 1.0, -1.0
        for child in simulated_binary_crossover(first, second, rng, 20.0, 1.0):
            mutated = polynomial_mutation(child, rng, 20.0, 1.0)
            self.assertTrue(np.all(np.abs(child) <= 1.0))
            self.assertTrue(np.all(np.abs(mutated) <= 1.0))

    def test_identical_parents_are_copied(self):
        rng = np.random.default_rng(1)
        parent = rng.uniform(-1, 1, 5)
        for child in simulated_binary_crossover(parent, parent.copy(), rng, 20.0, 1.0):
            np.testing.assert_array_equal(child, parent)


class GAConfigTests(SimpleTestCase):
    def test_rejects_invalid_values(self):
        for kwargs in ({'population_size': 5}, {'population_size': 2}, {'crossover_prob': 1.5},
                       {'mutation_eta': 0.0}, {'generations': 0}, {'workers': 0}):
            with self.assertRaises(ConfigurationError):
                GAConfig(**kwargs)

    def test_default_mutation_rate(self):
        self.assertEqual(GAConfig().mutation_rate(12), 1 / 12)


class EvolveTests(SimpleTestCase):
    def test_toy_problem_reaches_the_front(self):
        archive, samples = evolve(sphere_and_distance, 3, GAConfig(population_size=50, generations=40, rng_seed=11))
        self.assertEqual(len(samples), 2000)
        scale = float(np.sum(TARGET ** 2))
        reference = np.array([1.1 * scale, 1.1 * scale])
        t = np.linspace(0.0, 1.0, 100001)
        analytic = np.stack([t ** 2 * scale, (1 - t) ** 2 * scale], axis=1)
        achieved = hypervolume_2d([entry.objectives for entry in archive], reference)
        self.assertGreaterEqual(achieved, 0.95 * hypervolume_2d(analytic, reference))

    def test_archive_is_mutually_non_dominated_and_covers_samples(self):
        archive, samples = evolve(sphere_and_distance, 3, GAConfig(population_size=12, generations=6, rng_seed=2))
        entries = [np.asarray(entry.objectives) for entry in archive]
        for a in entries:
            self.assertFalse(any(dominates(b, a) for b in entries))
        for sample in samples:
            point = np.asarray(sample.objectives)
            self.assertTrue(any(dominates(e, point) or np.array_equal(e, point) for e in entries))

    def test_constant_objectives_give_one_entry(self):
        archive, samples = evolve(lambda genome: (1.0, 1.0), 4, GAConfig(population_size=8, generations=3))
        self.assertEqual(len(archive), 1)
        self.assertEqual(len(samples), 24)

    def test_same_seed_same_samples(self):
        ga = GAConfig(population_size=10, generations=5, rng_seed=99)
        _, first = evolve(sphere_and_distance, 3, ga)
        _, second = evolve(sphere_and_distance, 3, GAConfig(population_size=10, generations=5, rng_seed=99, workers=4))
        self.assertEqual([s.objectives for s in first], [s.objectives for s in second])
        for a, b in zip(first, second):
            np.testing.assert_array_equal(a.genome, b.genome)

    def test_genomes_stay_in_bounds_and_elitism_holds(self):
        best_per_generation = []

        def record(generation, population):
            best_per_generation.append(np.min([ind.objectives for ind in population], axis=0))

        _, samples = evolve(sphere_and_distance, 4, GAConfig(population_size=16, generations=10, rng_seed=3), record)
        self.assertTrue(all(np.all(np.abs(sample.genome) <= 1.0) for sample in samples))
        best = np.array(best_per_generation)
        self.assertTrue(np.all(np.diff(best, axis=0) <= 0.0))

    def test_failing_callback_aborts_with_trial(self):
        def problem(genome):
            if problem.calls == 5:
                raise ArithmeticError('boom')
            problem.calls += 1
            return sphere_and_distance(genome)

        problem.calls = 0
        with self.assertRaises(EvolutionError) as ctx:
            evolve(problem, 3, GAConfig(population_size=4, generations=3))
        self.assertEqual(ctx.exception.trial, 5)
        self.assertIsInstance(ctx.exception.__cause__, ArithmeticError)
