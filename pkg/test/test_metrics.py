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
from fractions import Fraction

import numpy as np
import pytest

from faultcover import (
    augmented_greedy,
    brute_identification_value,
    identification_value,
    InfluenceMatrix,
    localization_partition,
    score_curve,
    score_report,
    sensors_required,
)
from faultcover.metrics import save_scores

from .helpers import pairs


def _groups(partition):
    return sorted(partition.groups.values())


def test_partition_example(example_matrix):
    partition = localization_partition(example_matrix, [1, 3])
    assert _groups(partition) == [(0,), (1, 2, 5, 7), (3, 4, 6, 8, 9)]
    assert partition.groups[(True, False)] == (0,)
    assert partition.sizes() == [5, 4, 1]
    assert partition.worst() == 5
    assert partition.smallest() == 1
    assert partition.median_size() == 4.0


def test_partition_no_sensors(example_matrix):
    partition = localization_partition(example_matrix, [])
    assert _groups(partition) == [tuple(range(10))]


def test_partition_full_separation(example_matrix):
    partition = localization_partition(example_matrix, [0, 1, 2, 4])
    assert len(partition) == 10
    assert partition.sizes() == [1] * 10


def test_partition_exclude_undetected():
    cells = np.array([[True, False], [False, False], [False, False], [True, True]])
    M = InfluenceMatrix(events=tuple("abcd"), sensors=("1", "2"), cells=cells)
    assert len(localization_partition(M, [0, 1])) == 3
    partition = localization_partition(M, [0, 1], exclude_undetected=True)
    assert _groups(partition) == [(0,), (3,)]
    assert partition.excluded == (1, 2)


def test_score_report_example(example_matrix):
    report = score_report(example_matrix, [1, 3])
    assert report.I_D == 1
    assert report.I_L == Fraction(3, 10)
    assert report.I_W == 5
    assert report.I_I == Fraction(29, 45)
    assert report.I_I == Fraction(brute_identification_value(example_matrix, [1, 3]), 45)
    assert report.I_W_normalized == Fraction(1, 2)
    assert report.sensor_count == 2

    report = score_report(example_matrix, [0, 1, 2, 4])
    assert report.I_L == 1
    assert report.I_W == 1
    assert report.I_I == 1
    assert report.I_D == 1


def test_score_report_all_zero():
    M = InfluenceMatrix(
        events=tuple("abcd"), sensors=("1", "2", "3"), cells=np.zeros((4, 3), dtype=bool)
    )
    report = score_report(M, [0, 2])
    assert report.I_D == 0
    assert report.I_I == 0
    assert report.I_L == Fraction(1, 4)
    assert report.I_W == 4

    report = score_report(M, [0, 2], exclude_undetected=True)
    assert report.I_L == 0
    assert report.I_W == 0


def test_score_report_errors(example_matrix):
    empty = InfluenceMatrix(events=(), sensors=("1",), cells=np.zeros((0, 1), dtype=bool))
    with pytest.raises(ValueError):
        score_report(empty, [0])
    with pytest.raises(IndexError):
        score_report(example_matrix, [9])


def test_single_event():
    M = InfluenceMatrix(events=("a",), sensors=("1",), cells=np.ones((1, 1), bool))
    report = score_report(M, [0])
    assert report.I_D == 1
    assert report.I_I == 0
    assert report.I_L == 1


def test_curve_example(example_matrix):
    order = augmented_greedy(example_matrix).selected
    curve = score_curve(example_matrix, order)
    assert [r.sensor_count for r in curve] == [0, 1, 2, 3, 4]
    assert [r.I_D for r in curve] == [0, Fraction(1, 2), Fraction(7, 10), Fraction(9, 10), 1]
    assert [r.I_I * 45 for r in curve] == [0, 25, 37, 42, 45]
    assert curve[1].I_W == 5
    assert curve[-1].I_L == 1

    assert sensors_required(curve, "I_D", 1.0) == 4
    assert sensors_required(curve, "I_D", 0.7) == 2
    assert sensors_required(curve, "I_W", 5) == 1
    assert sensors_required(curve, "I_L", 1.0) == 4
    assert sensors_required(curve[:3], "I_L", 1.0) is None
    with pytest.raises(ValueError):
        sensors_required(curve, "I_X", 1.0)


def test_scores_csv(example_matrix):
    text = save_scores([score_report(example_matrix, [1, 3])])
    header, row = text.splitlines()
    assert header == "sensors,I_D,I_I,I_L,I_W,I_W_normalized,median_size,min_size"
    assert row.startswith("2,1.0,")
    assert ",0.3,5,0.5,4.0,1" in row


def test_monotone_refinement(random_matrix):
    for seed in range(30):
        rng = random.Random(seed)
        M = random_matrix(seed, rng.randint(1, 30), rng.randint(1, 10), rng.random())
        order = list(range(M.m))
        rng.shuffle(order)
        curve = score_curve(M, order)
        for before, after in zip(curve, curve[1:]):
            assert after.I_D >= before.I_D
            assert after.I_I >= before.I_I
            assert after.I_L >= before.I_L
            assert after.I_W <= before.I_W
        for size in range(M.m + 1):
            S = order[:size]
            partition = localization_partition(M, S)
            unsplit = sum(pairs(len(g)) for g in partition.groups.values())
            assert unsplit == pairs(M.n) - identification_value(M, S)
            assert sorted(j for g in partition.groups.values() for j in g) == list(
                range(M.n)
            )
