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

"""Detection as minimum set cover: the detection function, greedy, lazy greedy and the
budgeted maximum-coverage variant.

All solvers break ties by the smallest sensor index and stop as soon as no sensor adds
coverage, so events nobody detects never stall them.
"""

import heapq
import logging
from dataclasses import dataclass
from typing import Iterable, List, Optional, Tuple

from typeguard import typechecked

from .influence import check_sensor_indices, DetectionSets


logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class CoverTrace:
    selected: Tuple[int, ...]
    gains: Tuple[int, ...]
    values: Tuple[int, ...]
    evaluation_count: int
    covered: int = 0


@typechecked
def detection_value(C: DetectionSets, S: Iterable[int]) -> int:
    """`f_D`: the number of events detected by at least one sensor of `S`."""
    return C.union(check_sensor_indices(S, C.m)).bit_count()


def _trace(selected: List[int], gains: List[int], evaluations: int, covered: int):
    values = []
    total = 0
    for gain in gains:
        total += gain
        values.append(total)
    return CoverTrace(
        selected=tuple(selected),
        gains=tuple(gains),
        values=tuple(values),
        evaluation_count=evaluations,
        covered=covered,
    )


def _greedy(sets: Tuple[int, ...], budget: Optional[int]) -> CoverTrace:
    target = 0
    for s in sets:
        target |= s
    covered = 0
    chosen = set()
    selected = []
    gains = []
    evaluations = 0
    while covered != target and (budget is None or len(selected) < budget):
        best = -1
        best_gain = 0
        for i, s in enumerate(sets):
            if i in chosen:
                continue
            evaluations += 1
            gain = (s & ~covered).bit_count()
            if gain > best_gain:
                best, best_gain = i, gain
        if best_gain == 0:
            break
        chosen.add(best)
        selected.append(best)
        gains.append(best_gain)
        covered |= sets[best]
        logger.debug("Greedy step %d: sensor %d adds %d", len(selected), best, best_gain)
    return _trace(selected, gains, evaluations, covered)


def _lazy_greedy(sets: Tuple[int, ...], budget: Optional[int]) -> CoverTrace:
    target = 0
    for s in sets:
        target |= s
    covered = 0
    selected = []
    gains = []
    if target == 0 or budget == 0:
        return _trace(selected, gains, 0, covered)
    # (-gain bound, sensor index, step the bound was computed at). A bound from the
    # current step on top of the heap is the true maximum.
    heap = []
    evaluations = 0
    for i, s in enumerate(sets):
        evaluations += 1
        gain = s.bit_count()
        if gain > 0:
            heap.append((-gain, i, 0))
    heapq.heapify(heap)
    step = 0
    while heap and covered != target and (budget is None or len(selected) < budget):
        negative_gain, i, stamp = heapq.heappop(heap)
        if stamp == step:
            selected.append(i)
            gains.append(-negative_gain)
            covered |= sets[i]
            step += 1
            logger.debug("Lazy greedy step %d: sensor %d adds %d", step, i, -negative_gain)
        else:
            evaluations += 1
            gain = (sets[i] & ~covered).bit_count()
            if gain > 0:
                heapq.heappush(heap, (-gain, i, step))
    return _trace(selected, gains, evaluations, covered)


@typechecked
def greedy_msc(C: DetectionSets) -> CoverTrace:
    """Greedy minimum set cover.

    Each iteration evaluates every unselected sensor and picks the one detecting the
    most undetected events. Stops when every detectable event is covered.
    """
    return _greedy(C.sets, None)


@typechecked
def lazy_greedy_msc(C: DetectionSets, budget: Optional[int] = None) -> CoverTrace:
    """Lazy greedy minimum set cover.

    Same selection and utilities as `greedy_msc`, but a sensor's utility is only
    re-evaluated when its stale upper bound reaches the top of the queue.
    """
    if budget is not None and budget < 0:
        raise ValueError(f"budget must be non-negative, got {budget}")
    return _lazy_greedy(C.sets, budget)


@typechecked
def max_coverage(C: DetectionSets, budget: int) -> CoverTrace:
    """Budgeted maximum coverage: greedy selection truncated at `budget` sensors."""
    if budget < 0:
        raise ValueError(f"budget must be non-negative, got {budget}")
    return _greedy(C.sets, budget)
