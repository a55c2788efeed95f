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

"""Placement quality scores.

- `I_D`: fraction of events detected by at least one sensor.
- `I_I`: fraction of event pairs the sensors tell apart.
- `I_L`: number of distinct sensor output vectors, divided by the number of events.
- `I_W`: size of the largest group of events sharing one output vector.

Scores are exact `Fraction`s; `I_W` is an integer.
"""

import logging
from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

import numpy as np
import pandas as pd
from typeguard import typechecked
from typing_extensions import Literal

from .coverage import detection_value
from .influence import check_sensor_indices, detection_sets, InfluenceMatrix
from .testcover import identification_value


logger = logging.getLogger(__name__)

Score = Literal["I_D", "I_I", "I_L", "I_W"]

SCORE_COLUMNS = [
    "sensors",
    "I_D",
    "I_I",
    "I_L",
    "I_W",
    "I_W_normalized",
    "median_size",
    "min_size",
]


@dataclass(frozen=True)
class LocalizationPartition:
    """Events grouped by their output vector over a sensor subset.

    `groups` maps each output vector to the indices of the events producing it, in
    order of first occurrence. `excluded` holds the events left out because no
    sensor detects them, when the partition was built with `exclude_undetected`.
    """

    groups: Dict[Tuple[bool, ...], Tuple[int, ...]]
    n: int
    excluded: Tuple[int, ...] = ()

    def __len__(self):
        return len(self.groups)

    def sizes(self) -> List[int]:
        return sorted((len(g) for g in self.groups.values()), reverse=True)

    def worst(self) -> int:
        return max(self.sizes(), default=0)

    def smallest(self) -> int:
        return min(self.sizes(), default=0)

    def median_size(self) -> float:
        sizes = self.sizes()
        return float(np.median(sizes)) if sizes else 0.0


@typechecked
def localization_partition(
    M: InfluenceMatrix, S: Iterable[int], exclude_undetected: bool = False
) -> LocalizationPartition:
    """Group events on exact equality of their rows restricted to `S`.

    The all-zero vector is a group like any other unless `exclude_undetected` is set.
    """
    S = check_sensor_indices(S, M.m)
    restricted = M.cells[:, list(S)].reshape(M.n, len(S))
    groups: Dict[Tuple[bool, ...], List[int]] = {}
    excluded = []
    for j, row in enumerate(restricted.tolist()):
        signature = tuple(row)
        if exclude_undetected and not any(signature):
            excluded.append(j)
            continue
        groups.setdefault(signature, []).append(j)
    return LocalizationPartition(
        groups={k: tuple(v) for k, v in groups.items()},
        n=M.n,
        excluded=tuple(excluded),
    )


@dataclass(frozen=True)
class ScoreReport:
    I_D: Fraction
    I_I: Fraction
    I_L: Fraction
    I_W: int
    sensor_count: int
    n: int
    median_size: float = 0.0
    min_size: int = 0

    @property
    def I_W_normalized(self) -> Fraction:
        return Fraction(self.I_W, self.n)

    def as_row(self) -> dict:
        return {
            "sensors": self.sensor_count,
            "I_D": float(self.I_D),
            "I_I": float(self.I_I),
            "I_L": float(self.I_L),
            "I_W": self.I_W,
            "I_W_normalized": float(self.I_W_normalized),
            "median_size": self.median_size,
            "min_size": self.min_size,
        }


@typechecked
def score_report(
    M: InfluenceMatrix, S: Iterable[int], exclude_undetected: bool = False
) -> ScoreReport:
    """All four scores of the sensor subset `S`.

    `I_I` is `0` when there are fewer than two events.

    **Raises:**

    `ValueError` if `M` has no events.
    """
    if M.n == 0:
        raise ValueError("cannot score a placement over an empty event set")
    S = check_sensor_indices(S, M.m)
    partition = localization_partition(M, S, exclude_undetected)
    pairs = M.n * (M.n - 1) // 2
    return ScoreReport(
        I_D=Fraction(detection_value(detection_sets(M), S), M.n),
        I_I=Fraction(identification_value(M, S), pairs) if pairs else Fraction(0),
        I_L=Fraction(len(partition), M.n),
        I_W=partition.worst(),
        sensor_count=len(set(S)),
        n=M.n,
        median_size=partition.median_size(),
        min_size=partition.smallest(),
    )


def score_curve(
    M: InfluenceMatrix, order: Sequence[int], exclude_undetected: bool = False
) -> List[ScoreReport]:
    """Scores of every prefix of a placement, from no sensors to all of `order`."""
    order = check_sensor_indices(order, M.m)
    curve = [
        score_report(M, order[:size], exclude_undetected)
        for size in range(len(order) + 1)
    ]
    logger.info("Scored %d prefixes of a %d-sensor placement", len(curve), len(order))
    return curve


def sensors_required(
    curve: Sequence[ScoreReport], score: Score, target: float
) -> Optional[int]:
    """Fewest sensors along `curve` reaching `target`.

    `I_D`, `I_I` and `I_L` are reached from below (`>= target`); `I_W` from above
    (`<= target`). Returns `None` if the curve never gets there.
    """
    if score not in ("I_D", "I_I", "I_L", "I_W"):
        raise ValueError(f"unknown score {score!r}")
    for report in curve:
        value = getattr(report, score)
        if (value <= target) if score == "I_W" else (value >= target):
            return report.sensor_count
    return None


def scores_frame(reports: Sequence[ScoreReport]) -> pd.DataFrame:
    return pd.DataFrame([r.as_row() for r in reports], columns=SCORE_COLUMNS)


def save_scores(reports: Sequence[ScoreReport]) -> str:
    return scores_frame(reports).to_csv(index=False, lineterminator="\n")
