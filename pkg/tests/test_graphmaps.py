import math
import random

import numpy as np
import pytest

from lamtool import (GraphSelfMap, analyze_matrix, apply_power,
                     conjugacy_growth, is_train_track, orientability,
                     transition_matrix)
from lamtool.errors import DomainError, MalformedInputError, SizeCapExceeded
from lamtool.graphmaps import compose

from conftest import (brute_force_orientation, brute_force_train_track,
                      naive_iterate_image, naive_tighten, random_rose_map)

GOLDEN = (1 + math.sqrt(5)) / 2


class TestGraphSelfMap:
    def test_rejects_empty_image(self, rose2):
        with pytest.raises(MalformedInputError):
            GraphSelfMap(rose2, [0], [(), (0,)])

    def test_rejects_endpoint_mismatch(self, theta):
        al = theta.alphabet
        with pytest.raises(MalformedInputError):
            # e1 runs v0 -> v1 but e1 e2' returns to v0
            GraphSelfMap(theta, [0, 1], [al.parse("e1 e2'"), al.parse("e2"),
                                         al.parse("e3")])

    def test_inverse_images_are_inverse_paths(self, fib_map):
        al = fib_map.graph.alphabet
        a = al.index("a")
        image = fib_map.image(a)
        assert fib_map.image(a ^ 1) == tuple(c ^ 1 for c in reversed(image))


class TestApplyPower:
    def test_fibonacci_third_power(self, fib_map, rose2):
        got = apply_power(fib_map, rose2.path("a"), 3)
        assert got.text() == "a b a a b"

    def test_single_power_is_tightened_substitution(self, rose2):
        al = rose2.alphabet
        gsm = GraphSelfMap(rose2, [0], [al.parse("a b"), al.parse("b' a")])
        word = rose2.path("a b")
        direct = naive_tighten(tuple(c for y in word for c in gsm.image(y)))
        assert apply_power(gsm, word, 1).letters == direct

    def test_fibonacci_lengths(self, fib_map, rose2):
        lengths = [len(apply_power(fib_map, rose2.path("a"), k))
                   for k in range(5)]
        assert lengths == [1, 2, 3, 5, 8]

    def test_size_cap(self, fib_map, rose2):
        with pytest.raises(SizeCapExceeded):
            apply_power(fib_map, rose2.path("a"), 40, cap=1000)


class TestTrainTrack:
    def test_fibonacci_is_train_track(self, fib_map):
        result = is_train_track(fib_map)
        assert result.is_train_track
        assert result.legal_turns is not None
        assert brute_force_train_track(fib_map)

    def test_cancelling_map_detected_with_witness(self, rose2):
        al = rose2.alphabet
        # f(a) = ab, f(b) = b'a': f^2(a) = ab b'a cancels
        gsm = GraphSelfMap(rose2, [0], [al.parse("a b"), al.parse("b' a'")])
        result = is_train_track(gsm)
        assert not result.is_train_track
        assert result.offending_turn is not None
        assert not brute_force_train_track(gsm)

    def test_identity_like_map(self, rose2):
        al = rose2.alphabet
        gsm = GraphSelfMap(rose2, [0], [al.parse("a"), al.parse("b")])
        assert is_train_track(gsm).is_train_track

    def test_untight_map_is_refused_at_iterate_zero(self, rose2):
        al = rose2.alphabet
        gsm = GraphSelfMap(rose2, [0], [al.parse("a a' a"), al.parse("b")])
        result = is_train_track(gsm)
        assert not result.is_train_track
        assert result.offending_iterate == 0

    def test_agrees_with_brute_force_on_random_corpus(self):
        rng = random.Random(424242)
        agreements = 0
        for _ in range(120):
            gsm = random_rose_map(rng, rng.choice([2, 3]))
            assert is_train_track(gsm).is_train_track == \
                brute_force_train_track(gsm)
            agreements += 1
        assert agreements == 120


class TestTransitionMatrix:
    def test_fibonacci_matrix(self, fib_map):
        assert transition_matrix(fib_map).matrix.tolist() == [[1, 1], [1, 0]]

    def test_permutation_matrix(self, permutation_map):
        assert transition_matrix(permutation_map).matrix.tolist() == [[0, 1], [1, 0]]

    def test_counts_both_orientations(self, nonorientable_map):
        assert transition_matrix(nonorientable_map).matrix.tolist() == [[1, 1], [1, 0]]

    def test_columns_sum_to_image_lengths(self):
        rng = random.Random(606)
        for _ in range(30):
            gsm = random_rose_map(rng, rng.choice([2, 3]))
            mat = transition_matrix(gsm).matrix
            for j, img in enumerate(gsm.edge_images):
                assert mat[:, j].sum() == len(img)

    def test_composition_power_law(self):
        rng = random.Random(31337)
        for _ in range(50):
            gsm = random_rose_map(rng, rng.choice([2, 3]))
            mat = transition_matrix(gsm).matrix
            iterate = gsm
            for k in range(2, 5):
                iterate = compose(gsm, iterate)
                assert np.array_equal(transition_matrix(iterate).matrix,
                                      np.linalg.matrix_power(mat, k))


class TestAnalyzeMatrix:
    def test_golden_mean_matrix(self):
        analysis = analyze_matrix(np.array([[1, 1], [1, 0]]))
        assert analysis.irreducible and analysis.primitive
        assert analysis.primitivity_exponent == 2
        assert analysis.expanding
        assert abs(analysis.stretch_factor - GOLDEN) < 1e-9
        assert analysis.residual < 1e-9

    def test_permutation_matrix(self):
        analysis = analyze_matrix(np.array([[0, 1], [1, 0]]))
        assert analysis.irreducible and not analysis.primitive
        assert not analysis.expanding
        assert abs(analysis.stretch_factor - 1.0) < 1e-9

    def test_one_by_one(self):
        analysis = analyze_matrix(np.array([[2]]))
        assert analysis.irreducible and analysis.primitive
        assert analysis.primitivity_exponent == 1
        assert analysis.expanding
        assert abs(analysis.stretch_factor - 2.0) < 1e-12

    def test_zero_matrix_rejected(self):
        with pytest.raises(DomainError):
            analyze_matrix(np.zeros((2, 2), dtype=int))

    def test_primitive_implies_irreducible_on_random_matrices(self):
        rng = random.Random(8)
        for _ in range(200):
            m = rng.randint(1, 4)
            mat = np.array([[rng.randint(0, 2) for _ in range(m)]
                            for _ in range(m)])
            if not mat.any():
                continue
            analysis = analyze_matrix(mat)
            if analysis.primitive:
                assert analysis.irreducible

    def test_reducible_matrix(self):
        analysis = analyze_matrix(np.array([[2, 1], [0, 3]]))
        assert not analysis.irreducible and not analysis.primitive
        assert abs(analysis.stretch_factor - 3.0) < 1e-9


class TestOrientability:
    def test_fibonacci_orientable(self, fib_map):
        result = orientability(fib_map)
        al = fib_map.graph.alphabet
        assert result.orientable
        assert sorted(al.token(c) for c in result.positive_letters) == ["a", "b"]
        assert brute_force_orientation(fib_map) is not None

    def test_nonorientable_with_witness(self, nonorientable_map):
        result = orientability(nonorientable_map)
        assert not result.orientable
        assert brute_force_orientation(nonorientable_map) is None
        edge, source, power = result.witness
        image = naive_iterate_image(nonorientable_map, source, power)
        assert edge in image and (edge ^ 1) in image

    def test_positive_map_keeps_given_orientation(self, rose2):
        al = rose2.alphabet
        gsm = GraphSelfMap(rose2, [0], [al.parse("a b a"), al.parse("a b")])
        result = orientability(gsm)
        assert result.orientable
        assert result.positive_letters == frozenset(al.positive_letters())

    def test_agrees_with_exhaustive_search_on_random_corpus(self):
        rng = random.Random(515151)
        checked = 0
        for _ in range(120):
            gsm = random_rose_map(rng, rng.choice([2, 3]))
            oracle = brute_force_orientation(gsm)
            result = orientability(gsm)
            assert result.orientable == (oracle is not None)
            checked += 1
        assert checked == 120


class TestConjugacyGrowth:
    def test_fibonacci_rate(self, fib_map, rose2):
        growth = conjugacy_growth(fib_map, rose2.path("a"), 15)
        assert abs(growth.rate_estimate - GOLDEN) < 0.01
        lengths = [length for _, length in growth.lengths]
        assert lengths[:6] == [1, 2, 3, 5, 8, 13]

    def test_permutation_is_non_growing(self, permutation_map, rose2):
        growth = conjugacy_growth(permutation_map, rose2.path("a"), 8)
        assert all(length == 1 for _, length in growth.lengths)
        assert growth.rate_estimate == 1.0

    def test_rate_matches_stretch_factor(self, fib_map, rose2):
        growth = conjugacy_growth(fib_map, rose2.path("a"), 25)
        lam = analyze_matrix(transition_matrix(fib_map)).stretch_factor
        assert abs(growth.rate_estimate - lam) < 1e-3

    def test_cyclic_reduction_is_used(self, fib_map, rose2):
        # a b a' is conjugate to b, so lengths follow the orbit of b
        growth = conjugacy_growth(fib_map, rose2.path("a b a'"), 6)
        orbit = conjugacy_growth(fib_map, rose2.path("b"), 6)
        assert [l for _, l in growth.lengths] == [l for _, l in orbit.lengths]

    def test_non_loop_rejected(self, theta, silver_map):
        with pytest.raises(DomainError):
            conjugacy_growth(silver_map, theta.path("e1"), 4)
