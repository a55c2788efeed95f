# Copyright (c) 2022 Google LLC
#
# Permission is hereby granted, free of charge, to any person obtaining a copy of
# this software and associated documentation files (the "Software"), to deal in
# the Software without restriction, including without limitation the rights to
# use, copy, modify, merge, publish, distribute, sublicense, and/or sell copies of
# the Software, and to permit persons to whom the Software is furnished to do so,
# subject to the following conditions:
#
# The above copyright notice and this permission notice shall be included in all
# copies or substantial portions of the Software.
#
# THE SOFTWARE IS PROVIDED "AS IS", WITHOUT WARRANTY OF ANY KIND, EXPRESS OR
# IMPLIED, INCLUDING BUT NOT LIMITED TO THE WARRANTIES OF MERCHANTABILITY, FITNESS
# FOR A PARTICULAR PURPOSE AND NONINFRINGEMENT. IN NO EVENT SHALL THE AUTHORS OR
# COPYRIGHT HOLDERS BE LIABLE FOR ANY CLAIM, DAMAGES OR OTHER LIABILITY, WHETHER
# IN AN ACTION OF CONTRACT, TORT OR OTHERWISE, ARISING FROM, OUT OF OR IN
# CONNECTION WITH THE SOFTWARE OR THE USE OR OTHER DEALINGS IN THE SOFTWARE.

import random

import numpy as np
import pytest

from faultcover import (
    detection_sets,
    detection_value,
    greedy_msc,
    InfluenceMatrix,
    lazy_greedy_msc,
    max_coverage,
)

from .helpers import sample_nested_subsets


def test_detection_value(example_matrix):
    C = detection_sets(example_matrix)
    assert detection_value(C, [1, 3]) == 10
    assert detection_value(C, [0]) == 5
    assert detection_value(C, []) == 0
    with pytest.raises(IndexError):
        detection_value(C, [8])


def test_greedy_example(example_matrix):
    trace = greedy_msc(detection_sets(example_matrix))
    assert trace.selected == (3, 0)
    assert trace.gains == (9, 1)
    assert trace.values == (9, 10)
    assert trace.covered == (1 << 10) - 1
    assert trace.evaluation_count == 8 + 7


def test_lazy_greedy_example(example_matrix):
    C = detection_sets(example_matrix)
    trace = lazy_greedy_msc(C)
    assert trace.selected == (3, 0)
    assert trace.values == (9, 10)
    assert trace.evaluation_count <= greedy_msc(C).evaluation_count


def test_lazy_skips_evaluations_on_disjoint_sets():
    cells = np.zeros((12, 4), dtype=bool)
    for i in range(4):
        cells[3 * i : 3 * i + 3, i] = True
    M = InfluenceMatrix(
        events=tuple(str(j) for j in range(12)), sensors=tuple("abcd"), cells=cells
    )
    C = detection_sets(M)
    lazy = lazy_greedy_msc(C)
    greedy = greedy_msc(C)
    assert lazy.selected == greedy.selected == (0, 1, 2, 3)
    assert greedy.evaluation_count == 4 + 3 + 2 + 1
    assert lazy.evaluation_count == 4 + 3


def test_max_coverage(example_matrix):
    C = detection_sets(example_matrix)
    assert max_coverage(C, 1).selected == (3,)
    assert max_coverage(C, 1).values == (9,)
    assert max_coverage(C, 0).selected == ()
    assert max_coverage(C, 8) == greedy_msc(C)
    with pytest.raises(ValueError):
        max_coverage(C, -1)


def test_empty_and_undetectable():
    M = InfluenceMatrix(events=(), sensors=(), cells=np.zeros((0, 0), dtype=bool))
    assert greedy_msc(detection_sets(M)).selected == ()
    cells = np.array([[True, False], [False, False], [True, True]])
    M = InfluenceMatrix(events=("a", "b", "c"), sensors=("1", "2"), cells=cells)
    trace = greedy_msc(detection_sets(M))
    # Event b is never detected and must not stall the loop.
    assert trace.selected == (0,)
    assert trace.values == (2,)
    assert lazy_greedy_msc(detection_sets(M)).selected == (0,)


def test_all_zero(example_matrix):
    M = InfluenceMatrix(
        events=("a", "b"), sensors=("1", "2", "3"), cells=np.zeros((2, 3), dtype=bool)
    )
    C = detection_sets(M)
    greedy = greedy_msc(C)
    lazy = lazy_greedy_msc(C)
    assert greedy.selected == lazy.selected == ()
    assert greedy.evaluation_count == lazy.evaluation_count == 0
    assert lazy_greedy_msc(detection_sets(example_matrix), 0).evaluation_count == 0


def test_lazy_matches_greedy(random_matrix):
    for seed in range(100):
        rng = random.Random(seed)
        M = random_matrix(seed, rng.randint(1, 40), rng.randint(1, 20), rng.random())
        C = detection_sets(M)
        greedy = greedy_msc(C)
        lazy = lazy_greedy_msc(C)
        assert lazy.selected == greedy.selected
        assert lazy.gains == greedy.gains
        assert lazy.evaluation_count <= greedy.evaluation_count
        assert detection_value(C, greedy.selected) == detection_value(C, range(C.m))
        for budget in range(len(greedy.selected) + 1):
            assert max_coverage(C, budget).selected == greedy.selected[:budget]
            assert lazy_greedy_msc(C, budget).selected == greedy.selected[:budget]


def test_detection_is_submodular(random_matrix):
    rng = random.Random(0)
    for seed in range(20):
        M = random_matrix(seed, rng.randint(5, 30), rng.randint(3, 12), rng.random())
        C = detection_sets(M)
        for _ in range(50):
            A, B, i = sample_nested_subsets(rng, M.m)
            gain_a = detection_value(C, A + [i]) - detection_value(C, A)
            gain_b = detection_value(C, B + [i]) - detection_value(C, B)
            assert gain_a >= gain_b >= 0
