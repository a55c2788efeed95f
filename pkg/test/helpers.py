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

import itertools as it
import math
import random


ParamError = TypeError

FIXTURE_ROWS = [
    "11101000",
    "11110100",
    "11011001",
    "10111110",
    "10110110",
    "01111011",
    "00111111",
    "01011011",
    "00110111",
    "00011111",
]


def pairs(n):
    return n * (n - 1) // 2


def sample_nested_subsets(rng: random.Random, m: int):
    """A random pair `A <= B` of sensor subsets and a sensor outside `B`."""
    order = list(range(m))
    rng.shuffle(order)
    outside = order.pop()
    size_b = rng.randint(0, len(order))
    B = order[:size_b]
    A = [i for i in B if rng.random() < 0.5]
    return A, B, outside


def separates_all(rows, subset):
    signatures = {tuple(row[i] for i in subset) for row in rows}
    return len(signatures) == len(rows)


def subsets_of_size(m, size):
    return it.combinations(range(m), size)


def log_bound(x):
    return math.log(x) + 1
