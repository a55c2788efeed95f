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

"""Identification as minimum test cover.

Two events can be told apart by a sensor when it detects exactly one of them. The
identification problem asks for the fewest sensors that tell apart every pair that the
full sensor set tells apart. Two greedy solvers are provided, producing identical
placements:

- `tlg_solve` materialises the pair universe (`n(n-1)/2` pair-wise events) as a set
    cover instance and runs lazy greedy on it.
- `augmented_greedy` never materialises the pair universe. Each candidate is scored as
    `x_i + y_i`: pairs it splits across the boundary of the already-covered events, plus
    still-unsplit pairs inside the covered events it now splits.
"""

import itertools as it
import logging
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import FrozenSet, Iterable, List, Optional, Sequence, Tuple

import numpy as np
from typeguard import typechecked

from .config import get_pairwise_cell_limit
from .coverage import _lazy_greedy
from .errors import InstanceTooLargeError
from .influence import _pack, check_sensor_indices, DetectionSets, InfluenceMatrix
from .placement import from_selection, PlacementResult


logger = logging.getLogger(__name__)

Pair = Tuple[int, int]


def beta(X: Iterable[int]) -> FrozenSet[Pair]:
    """All 2-element subsets of `X`, as sorted tuples."""
    return frozenset(it.combinations(sorted(set(X)), 2))


def alpha(Y: Iterable[int], G: Iterable[Pair]) -> FrozenSet[Pair]:
    """The pairs of `G` with exactly one element in `Y`."""
    Y = set(Y)
    return frozenset(pair for pair in G if (pair[0] in Y) != (pair[1] in Y))


@dataclass(frozen=True, eq=False)
class PairwiseInstance:
    """The set cover instance equivalent to a test cover instance.

    Pair `p` is `(first[p], second[p])` with `first[p] < second[p]`, pairs ordered
    lexicographically. `sets[v]` is a bitmask over pair indices: bit `p` is set iff
    sensor `v` detects exactly one event of pair `p`.
    """

    n: int
    first: np.ndarray
    second: np.ndarray
    sets: Tuple[int, ...]

    @property
    def size(self) -> int:
        return len(self.first)

    @property
    def pair_events(self) -> List[Pair]:
        return list(zip(self.first.tolist(), self.second.tolist()))

    def detection_sets(self) -> DetectionSets:
        return DetectionSets(sets=self.sets, n=self.size)


def _pairs(n: int) -> int:
    return n * (n - 1) // 2


def transform_mtc_to_msc(
    M: InfluenceMatrix, limit: Optional[int] = None
) -> PairwiseInstance:
    """Build the pair-wise set cover instance of `M`.

    **Arguments:**

    - `M`: the influence matrix.
    - `limit`: the largest allowed number of pairwise cells `m * n(n-1)/2`. Defaults to
        `faultcover.config.get_pairwise_cell_limit()`.

    **Raises:**

    `InstanceTooLargeError` if the instance exceeds `limit`; use `augmented_greedy`
    instead, which needs no pairwise instance.
    """
    if limit is None:
        limit = get_pairwise_cell_limit()
    size = _pairs(M.n)
    if M.m * size > limit:
        raise InstanceTooLargeError(
            f"the pairwise instance has {M.m} x {size} = {M.m * size} cells, over the "
            f"limit of {limit}. Use the augmented greedy solver, or raise the limit "
            "with faultcover.config.set_pairwise_cell_limit."
        )
    first, second = np.triu_indices(M.n, k=1)
    sets = tuple(
        _pack(M.cells[first, v] ^ M.cells[second, v]) for v in range(M.m)
    )
    return PairwiseInstance(n=M.n, first=first, second=second, sets=sets)


@typechecked
def identification_value(M: InfluenceMatrix, S: Iterable[int]) -> int:
    """`f_I`: the number of event pairs whose signatures restricted to `S` differ.

    Computed by grouping events on their restricted signatures,
    `C(n,2) - sum over groups of C(|group|,2)`, without enumerating pairs.
    """
    S = check_sensor_indices(S, M.m)
    if not S or M.n < 2:
        return 0
    _, counts = np.unique(M.cells[:, list(S)], axis=0, return_counts=True)
    return _pairs(M.n) - sum(_pairs(c) for c in counts.tolist())


@typechecked
def tlg_solve(
    M: InfluenceMatrix,
    max_sensors: Optional[int] = None,
    limit: Optional[int] = None,
) -> PlacementResult:
    """Transformed lazy greedy: lazy greedy set cover over the pairwise instance.

    `comparison_count` counts pairwise cells touched: `m * n(n-1)/2` to build the
    instance plus `n(n-1)/2` per lazy evaluation.
    """
    if max_sensors is not None and max_sensors < 0:
        raise ValueError(f"max_sensors must be non-negative, got {max_sensors}")
    instance = transform_mtc_to_msc(M, limit)
    trace = _lazy_greedy(instance.sets, max_sensors)
    comparisons = (M.m + trace.evaluation_count) * instance.size
    logger.info(
        "TLG selected %d sensors (%d evaluations over %d pairs)",
        len(trace.selected),
        trace.evaluation_count,
        instance.size,
    )
    return from_selection(
        "mtc",
        "tlg",
        M.sensors,
        trace.selected,
        trace.gains,
        universe=instance.size,
        evaluation_count=trace.evaluation_count,
        comparison_count=comparisons,
    )


@dataclass(frozen=True)
class AGIterationRecord:
    """State of one iteration of the augmented greedy solver.

    Per-sensor tuples are indexed by sensor; entries are `None` for sensors already in
    the cover. `X` and `Y` are event bitmasks. `pending` lists `|G_t|` for every
    selected sensor's bucket at the start of the iteration, in selection order.
    `pair_checks[i]` is the number of pending pairs inspected when scoring sensor `i`.
    """

    j: int
    n_j: int
    covered: int
    X: Tuple[Optional[int], ...]
    Y: Tuple[Optional[int], ...]
    k: Tuple[Optional[int], ...]
    x: Tuple[Optional[int], ...]
    y: Tuple[Optional[int], ...]
    w: Tuple[Optional[int], ...]
    pair_checks: Tuple[Optional[int], ...]
    pending: Tuple[int, ...]
    chosen: Optional[int]
    w_star: int

    @property
    def pending_total(self) -> int:
        return sum(self.pending)


@dataclass
class AGState:
    """Working state of the augmented greedy solver.

    `covered` marks the events detected by the cover so far. `buckets[t]` holds `G_t`,
    the pairs among the events first covered by the `t`-th selected sensor that no
    later sensor has split yet, as two arrays of endpoints with `first < second`.
    Every pending pair has both endpoints covered, and the buckets are disjoint.
    """

    covered: np.ndarray
    cover: List[int] = field(default_factory=list)
    buckets: List[Tuple[np.ndarray, np.ndarray]] = field(default_factory=list)
    j: int = 1

    @classmethod
    def initial(cls, n: int) -> "AGState":
        return cls(covered=np.zeros(n, dtype=bool))

    @property
    def n_j(self) -> int:
        return len(self.covered) - int(self.covered.sum())

    @property
    def pending(self) -> Tuple[int, ...]:
        return tuple(len(a) for a, _ in self.buckets)

    def pending_pairs(self) -> List[Pair]:
        return [
            (int(u), int(v)) for a, b in self.buckets for u, v in zip(a.tolist(), b.tolist())
        ]

    def select(self, sensor: int, column: np.ndarray) -> int:
        """Add `sensor` to the cover; returns the number of pairs inspected or created.

        Pending pairs the sensor splits are dropped (`G_t <- G_t - alpha(Y, G_t)`) and
        a new bucket `beta(X)` is opened over the events it newly covers.
        """
        work = 0
        for t, (a, b) in enumerate(self.buckets):
            work += len(a)
            keep = column[a] == column[b]
            self.buckets[t] = (a[keep], b[keep])
        new_events = np.flatnonzero(column & ~self.covered)
        upper, lower = np.triu_indices(len(new_events), k=1)
        self.buckets.append((new_events[upper], new_events[lower]))
        work += len(upper)
        self.covered = self.covered | column
        self.cover.append(sensor)
        self.j += 1
        return work


def _masked(values, candidates) -> Tuple[Optional[int], ...]:
    return tuple(int(v) if c else None for v, c in zip(values, candidates))


@typechecked
def augmented_greedy(
    M: InfluenceMatrix, max_sensors: Optional[int] = None
) -> PlacementResult:
    """Augmented greedy minimum test cover.

    Per iteration, for every candidate `i`: `X_i = C_i - C_cov`, `k = |X_i|`,
    `x_i = k(n_j - k)`, `Y_i = C_i & C_cov`, `y_i = sum_t |alpha(Y_i, G_t)|` and
    `w_i = x_i + y_i`. The candidate with the largest `w_i` (smallest index on ties) is
    selected while `w_i > 0`; then `G_t <- G_t - alpha(Y_i, G_t)` for the earlier
    buckets and a new bucket `beta(X_i)` is opened.

    **Arguments:**

    - `M`: the influence matrix.
    - `max_sensors`: optionally stop after this many sensors.

    **Returns:**

    A `PlacementResult` whose `iterations` holds an `AGIterationRecord` per iteration,
    including the final one in which no sensor has positive utility.
    `comparison_count` counts, per candidate, one unit for `x_i` plus the pending pairs
    with an endpoint in `Y_i`, and the pairs inspected or created by the updates.
    """
    if max_sensors is not None and max_sensors < 0:
        raise ValueError(f"max_sensors must be non-negative, got {max_sensors}")
    cells = M.cells
    n, m = M.n, M.m
    state = AGState.initial(n)
    candidates = np.ones(m, dtype=bool)
    columns = M.columns
    gains: List[int] = []
    records: List[AGIterationRecord] = []
    evaluations = 0
    comparisons = 0
    while max_sensors is None or len(state.cover) < max_sensors:
        covered = state.covered
        n_j = state.n_j
        k = cells[~covered].sum(axis=0, dtype=np.int64)
        x = k * (n_j - k)
        if state.buckets:
            first = np.concatenate([a for a, _ in state.buckets])
            second = np.concatenate([b for _, b in state.buckets])
            at_first = cells[first]
            at_second = cells[second]
            y = (at_first ^ at_second).sum(axis=0, dtype=np.int64)
            checks = (at_first | at_second).sum(axis=0, dtype=np.int64)
        else:
            y = np.zeros(m, dtype=np.int64)
            checks = np.zeros(m, dtype=np.int64)
        w = x + y
        n_candidates = int(candidates.sum())
        evaluations += n_candidates
        comparisons += int(checks[candidates].sum()) + n_candidates
        if n_candidates:
            scored = np.where(candidates, w, -1)
            chosen = int(np.argmax(scored))
            w_star = int(scored[chosen])
        else:
            chosen = None
            w_star = 0
        covered_bits = _pack(covered)
        records.append(
            AGIterationRecord(
                j=state.j,
                n_j=n_j,
                covered=covered_bits,
                X=_masked([c & ~covered_bits for c in columns], candidates),
                Y=_masked([c & covered_bits for c in columns], candidates),
                k=_masked(k, candidates),
                x=_masked(x, candidates),
                y=_masked(y, candidates),
                w=_masked(w, candidates),
                pair_checks=_masked(checks, candidates),
                pending=state.pending,
                chosen=chosen if w_star > 0 else None,
                w_star=w_star,
            )
        )
        if w_star <= 0:
            break
        logger.debug(
            "AG iteration %d: sensor %s with w=%d (x=%d, y=%d)",
            state.j,
            M.sensors[chosen],
            w_star,
            int(x[chosen]),
            int(y[chosen]),
        )
        comparisons += state.select(chosen, cells[:, chosen])
        candidates[chosen] = False
        gains.append(w_star)
    logger.info("AG selected %d sensors in %d iterations", len(state.cover), len(records))
    return from_selection(
        "mtc",
        "ag",
        M.sensors,
        state.cover,
        gains,
        universe=_pairs(n),
        evaluation_count=evaluations,
        comparison_count=comparisons,
        iterations=records,
    )


def pairwise_work_bound(sizes: Sequence[int]) -> Tuple[int, int]:
    """Both sides of `sum_i C(k_i, 2) <= (k/n) C(n, 2)`, for `n = sum_i k_i` and
    `k = max_i k_i`, multiplied through by `n` so they stay integers.

    Returns `(n * sum_i C(k_i, 2), k * C(n, 2))`.
    """
    sizes = [int(s) for s in sizes]
    if any(s < 0 for s in sizes):
        raise ValueError("sizes must be non-negative")
    n = sum(sizes)
    k = max(sizes, default=0)
    return n * sum(_pairs(s) for s in sizes), k * _pairs(n)


def bound_factor(sizes: Sequence[int]) -> Fraction:
    """How far below the bound a partition sits: `lhs / rhs`, or `0` if `rhs == 0`."""
    lhs, rhs = pairwise_work_bound(sizes)
    return Fraction(lhs, rhs) if rhs else Fraction(0)


def approximation_ratio_bound(n: int) -> float:
    """The `2 ln n + 1` guarantee of greedy test cover."""
    return 2 * math.log(n) + 1 if n > 0 else 1.0
