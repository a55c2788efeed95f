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

"""Exhaustive solvers for small instances.

Subsets are enumerated by increasing size and lexicographically within a size, so
the first feasible subset is both a minimum and the canonical witness. These are
meant for cross-checking the greedy solvers, and fail loudly past
`faultcover.config.get_subset_search_limit()` sensors.
"""

import itertools as it
from typing import Iterable, Tuple

from typeguard import typechecked

from .config import get_subset_search_limit
from .errors import InstanceTooLargeError
from .influence import check_sensor_indices, DetectionSets, InfluenceMatrix
from .testcover import identification_value


def _check_size(m: int) -> None:
    limit = get_subset_search_limit()
    if m > limit:
        raise InstanceTooLargeError(
            f"exhaustive search over {m} sensors exceeds the limit of {limit}; "
            "raise it with faultcover.config.set_subset_search_limit"
        )


def _subsets(m: int):
    for size in range(m + 1):
        yield from it.combinations(range(m), size)


@typechecked
def exact_msc(C: DetectionSets) -> Tuple[int, ...]:
    """Smallest sensor subset detecting every event any sensor detects."""
    _check_size(C.m)
    target = C.union(range(C.m))
    for subset in _subsets(C.m):
        if C.union(subset) == target:
            return subset
    raise AssertionError("the full sensor set is always feasible")


@typechecked
def exact_mtc(M: InfluenceMatrix) -> Tuple[int, ...]:
    """Smallest sensor subset telling apart every pair the full sensor set does."""
    _check_size(M.m)
    target = identification_value(M, range(M.m))
    for subset in _subsets(M.m):
        if identification_value(M, subset) == target:
            return subset
    raise AssertionError("the full sensor set is always feasible")


@typechecked
def brute_identification_value(M: InfluenceMatrix, S: Iterable[int]) -> int:
    """`f_I` by direct comparison of every pair of restricted rows."""
    S = list(check_sensor_indices(S, M.m))
    rows = M.cells[:, S].tolist() if S else [[] for _ in range(M.n)]
    count = 0
    for u in range(M.n):
        for v in range(u + 1, M.n):
            if rows[u] != rows[v]:
                count += 1
    return count
