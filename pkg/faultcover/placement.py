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

import io
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, List, Optional, Sequence, Tuple

import pandas as pd
from typing_extensions import Literal

from .errors import MatrixFormatError


Problem = Literal["msc", "mtc"]
Algorithm = Literal["greedy", "lazy", "tlg", "ag", "exact"]

PLACEMENT_COLUMNS = ["step", "sensor", "gain", "objective", "score"]


@dataclass(frozen=True)
class PlacementResult:
    """An ordered sensor placement together with its per-step trajectory.

    **Arguments:**

    - `problem`: `"msc"` (detection) or `"mtc"` (identification).
    - `algorithm`: the solver that produced it.
    - `selected`: sensor indices in selection order.
    - `sensor_ids`: the matching sensor ids.
    - `gains`: marginal utility of each step.
    - `values`: cumulative objective (`f_D` or `f_I`) after each step.
    - `universe`: number of elements the objective counts (`n` or `n(n-1)/2`).
    - `evaluation_count`: marginal-utility evaluations performed.
    - `comparison_count`: element-level work, see the individual solvers.
    - `iterations`: per-iteration records, for solvers that keep them.
    """

    problem: Problem
    algorithm: str
    selected: Tuple[int, ...]
    sensor_ids: Tuple[str, ...]
    gains: Tuple[int, ...]
    values: Tuple[int, ...]
    universe: int
    evaluation_count: int = 0
    comparison_count: int = 0
    iterations: Tuple[Any, ...] = field(default=(), repr=False)

    @property
    def scores(self) -> Tuple[Fraction, ...]:
        """Normalised objective after each step (`I_D` or `I_I`)."""
        if self.universe == 0:
            return tuple(Fraction(0) for _ in self.values)
        return tuple(Fraction(v, self.universe) for v in self.values)

    @property
    def objective(self) -> int:
        return self.values[-1] if self.values else 0

    def __len__(self):
        return len(self.selected)


def cumulative(gains: Sequence[int]) -> Tuple[int, ...]:
    out = []
    total = 0
    for gain in gains:
        total += gain
        out.append(total)
    return tuple(out)


def save_placement(result: PlacementResult) -> str:
    rows = [
        {
            "step": step,
            "sensor": sensor,
            "gain": gain,
            "objective": value,
            "score": float(score),
        }
        for step, (sensor, gain, value, score) in enumerate(
            zip(result.sensor_ids, result.gains, result.values, result.scores), start=1
        )
    ]
    frame = pd.DataFrame(rows, columns=PLACEMENT_COLUMNS)
    return frame.to_csv(index=False, lineterminator="\n")


def load_placement(text: str) -> List[str]:
    """Sensor ids of a placement CSV, in step order."""
    try:
        frame = pd.read_csv(io.StringIO(text), dtype=str, keep_default_na=False)
    except pd.errors.EmptyDataError:
        raise MatrixFormatError("placement CSV is empty")
    if "sensor" not in frame.columns:
        raise MatrixFormatError("placement CSV has no 'sensor' column")
    if "step" in frame.columns:
        frame = frame.assign(_step=frame["step"].astype(int)).sort_values(
            "_step", kind="stable"
        )
    return [str(s) for s in frame["sensor"].tolist()]


def from_selection(
    problem: Problem,
    algorithm: str,
    sensor_ids: Sequence[str],
    selected: Sequence[int],
    gains: Sequence[int],
    universe: int,
    evaluation_count: int = 0,
    comparison_count: int = 0,
    iterations: Optional[Sequence[Any]] = None,
) -> PlacementResult:
    selected = tuple(int(i) for i in selected)
    gains = tuple(int(g) for g in gains)
    return PlacementResult(
        problem=problem,
        algorithm=algorithm,
        selected=selected,
        sensor_ids=tuple(sensor_ids[i] for i in selected),
        gains=gains,
        values=cumulative(gains),
        universe=universe,
        evaluation_count=evaluation_count,
        comparison_count=comparison_count,
        iterations=tuple(iterations or ()),
    )
