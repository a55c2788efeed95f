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

"""The Boolean influence matrix and the per-sensor detection sets derived from it.

Row `j` of the matrix is the fault signature of event `j`: the outputs of every
candidate sensor when that event occurs. Column `i` is the set of events sensor `i`
detects. Columns are additionally stored bit-packed as Python integers (bit `j` set
iff the sensor detects event `j`), which is the representation the cover solvers work
with.
"""

import functools as ft
import io
import logging
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import FrozenSet, List, Optional, Sequence, Tuple

import numpy as np
import pandas as pd
from jaxtyping import Bool, jaxtyped
from typeguard import typechecked

from .config import get_thread_count
from .errors import MatrixFormatError
from .network import event_distances, event_locations, EventPoint, Network, UNREACHABLE


logger = logging.getLogger(__name__)


def _check_unique(ids: Tuple[str, ...], kind: str) -> None:
    seen = set()
    for id_ in ids:
        if id_ in seen:
            raise MatrixFormatError(f"duplicate {kind} id {id_!r}")
        seen.add(id_)


def _pack(column: np.ndarray) -> int:
    return int.from_bytes(np.packbits(column, bitorder="little").tobytes(), "little")


def _unpack(bits: int, n: int) -> np.ndarray:
    raw = np.frombuffer(bits.to_bytes((n + 7) // 8, "little"), dtype=np.uint8)
    return np.unpackbits(raw, count=n, bitorder="little").astype(bool)


@dataclass(frozen=True, eq=False)
class InfluenceMatrix:
    """An `n x m` Boolean matrix of events (rows) by sensors (columns).

    **Arguments:**

    - `events`: the event ids, in row order. Duplicate-free.
    - `sensors`: the sensor ids, in column order. Duplicate-free.
    - `cells`: a Boolean array of shape `(len(events), len(sensors))`.

    The matrix is immutable; `cells` is stored as a read-only copy.
    """

    events: Tuple[str, ...]
    sensors: Tuple[str, ...]
    cells: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "events", tuple(self.events))
        object.__setattr__(self, "sensors", tuple(self.sensors))
        if not isinstance(self.cells, Bool[np.ndarray, "events sensors"]):
            raise TypeError(
                "cells must be a two-dimensional Boolean numpy array, got "
                f"{getattr(self.cells, 'dtype', type(self.cells))} with shape "
                f"{getattr(self.cells, 'shape', None)}"
            )
        if self.cells.shape != (len(self.events), len(self.sensors)):
            raise MatrixFormatError(
                f"cells have shape {self.cells.shape} but there are "
                f"{len(self.events)} events and {len(self.sensors)} sensors"
            )
        _check_unique(self.events, "event")
        _check_unique(self.sensors, "sensor")
        cells = np.array(self.cells, dtype=bool)
        cells.setflags(write=False)
        object.__setattr__(self, "cells", cells)

    def __eq__(self, other):
        if not isinstance(other, InfluenceMatrix):
            return NotImplemented
        return (
            self.events == other.events
            and self.sensors == other.sensors
            and np.array_equal(self.cells, other.cells)
        )

    __hash__ = None

    @property
    def n(self) -> int:
        return len(self.events)

    @property
    def m(self) -> int:
        return len(self.sensors)

    @ft.cached_property
    def columns(self) -> Tuple[int, ...]:
        return tuple(_pack(self.cells[:, i]) for i in range(self.m))

    def column(self, i: int) -> np.ndarray:
        return self.cells[:, i]

    def row(self, j: int) -> np.ndarray:
        return self.cells[j, :]

    def sensor_index(self, sensor_id: str) -> int:
        try:
            return self.sensors.index(sensor_id)
        except ValueError:
            raise MatrixFormatError(f"unknown sensor id {sensor_id!r}") from None

    def sensor_indices(self, sensor_ids: Sequence[str]) -> List[int]:
        return [self.sensor_index(s) for s in sensor_ids]

    def restrict(self, sensors: Sequence[int]) -> "InfluenceMatrix":
        """The submatrix made of the given sensor columns, in the given order."""
        sensors = check_sensor_indices(sensors, self.m)
        return InfluenceMatrix(
            events=self.events,
            sensors=tuple(self.sensors[i] for i in sensors),
            cells=self.cells[:, list(sensors)].reshape(self.n, len(sensors)),
        )


@jaxtyped(typechecker=typechecked)
def from_cells(
    events: Sequence[str], sensors: Sequence[str], cells: Bool[np.ndarray, "n m"]
) -> InfluenceMatrix:
    return InfluenceMatrix(events=tuple(events), sensors=tuple(sensors), cells=cells)


def check_sensor_indices(sensors: Sequence[int], m: int) -> Tuple[int, ...]:
    """Validate a collection of sensor indices against `m` columns."""
    out = []
    for i in sensors:
        i = int(i)
        if not 0 <= i < m:
            raise IndexError(f"sensor index {i} out of range for {m} sensors")
        out.append(i)
    return tuple(out)


@dataclass(frozen=True)
class DetectionSets:
    """The collection of per-sensor detection sets `C_i`.

    Each set is a bitmask over the event indices `0..n-1`.
    """

    sets: Tuple[int, ...]
    n: int

    def __post_init__(self):
        object.__setattr__(self, "sets", tuple(int(s) for s in self.sets))
        if self.n < 0:
            raise ValueError(f"universe size must be non-negative, got {self.n}")
        limit = 1 << self.n
        for i, s in enumerate(self.sets):
            if not 0 <= s < limit:
                raise ValueError(
                    f"detection set {i} contains events outside 0..{self.n - 1}"
                )

    @property
    def m(self) -> int:
        return len(self.sets)

    @property
    def universe(self) -> int:
        return (1 << self.n) - 1

    def size(self, i: int) -> int:
        return self.sets[i].bit_count()

    def members(self, i: int) -> FrozenSet[int]:
        bits = self.sets[i]
        return frozenset(j for j in range(self.n) if bits >> j & 1)

    def union(self, sensors: Sequence[int]) -> int:
        out = 0
        for i in check_sensor_indices(sensors, self.m):
            out |= self.sets[i]
        return out


def detection_sets(M: InfluenceMatrix) -> DetectionSets:
    """`C_i` = the set of events with a 1 in column `i`."""
    return DetectionSets(sets=M.columns, n=M.n)


def from_detection_sets(
    C: DetectionSets,
    events: Optional[Sequence[str]] = None,
    sensors: Optional[Sequence[str]] = None,
) -> InfluenceMatrix:
    """Inverse of `detection_sets`. Ids default to `"0", "1", ...`."""
    if events is None:
        events = [str(j) for j in range(C.n)]
    if sensors is None:
        sensors = [str(i) for i in range(C.m)]
    cells = np.zeros((C.n, C.m), dtype=bool)
    for i, bits in enumerate(C.sets):
        cells[:, i] = _unpack(bits, C.n)
    return InfluenceMatrix(events=tuple(events), sensors=tuple(sensors), cells=cells)


def build_influence_matrix(
    net: Network,
    sensor_nodes: Optional[Sequence[str]] = None,
    epsilon_m: float = 1000.0,
    events: Optional[List[EventPoint]] = None,
) -> InfluenceMatrix:
    """Influence matrix from the distance-threshold sensing model.

    A sensor at node `S_i` detects event `l_j` iff the shortest-path distance between
    them is at most `epsilon_m`. Unreachable events are never detected.

    **Arguments:**

    - `net`: the network.
    - `sensor_nodes`: candidate sensor locations; defaults to every node.
    - `epsilon_m`: detection radius in metres, strictly positive (may be infinite).
    - `events`: the failure events; defaults to `event_locations(net)`.

    **Returns:**

    An `InfluenceMatrix` with rows in event order and columns in `sensor_nodes` order.
    Events no sensor detects are kept as all-zero rows.
    """
    if isinstance(epsilon_m, bool) or not isinstance(epsilon_m, (int, float)):
        raise ValueError(f"epsilon must be a number, got {epsilon_m!r}")
    if math.isnan(epsilon_m) or epsilon_m <= 0:
        raise ValueError(f"epsilon must be strictly positive, got {epsilon_m}")
    if sensor_nodes is None:
        sensor_nodes = net.node_ids
    sensor_nodes = tuple(sensor_nodes)
    for node_id in sensor_nodes:
        net.node(node_id)
    if events is None:
        events = event_locations(net)

    def _column(node_id):
        distances = np.asarray(event_distances(net, events, node_id), dtype=float)
        return (distances <= epsilon_m) & (distances != UNREACHABLE)

    cells = np.zeros((len(events), len(sensor_nodes)), dtype=bool)
    if sensor_nodes and events:
        with ThreadPoolExecutor(max_workers=get_thread_count()) as pool:
            for i, column in enumerate(pool.map(_column, sensor_nodes)):
                cells[:, i] = column
    logger.info(
        "Built %dx%d influence matrix with epsilon=%g m (%d detections)",
        len(events),
        len(sensor_nodes),
        epsilon_m,
        int(cells.sum()),
    )
    return InfluenceMatrix(
        events=tuple(e.event_id for e in events), sensors=sensor_nodes, cells=cells
    )


def load_influence_matrix(text: str) -> InfluenceMatrix:
    """Parse an influence CSV.

    The first header cell is `event`, the remaining header cells are sensor ids. Every
    following row is an event id and then one `0`/`1` cell per sensor.
    """
    try:
        frame = pd.read_csv(
            io.StringIO(text),
            header=None,
            dtype=str,
            keep_default_na=False,
            na_filter=False,
        )
    except pd.errors.EmptyDataError:
        raise MatrixFormatError("influence CSV is empty; expected an 'event' header")
    except pd.errors.ParserError as e:
        raise MatrixFormatError(f"ragged influence CSV: {e}") from e
    header = [str(cell) for cell in frame.iloc[0].tolist()]
    if header[0] != "event":
        raise MatrixFormatError(
            f"first header cell must be 'event', got {header[0]!r}"
        )
    sensors = tuple(header[1:])
    body = frame.iloc[1:]
    events = []
    cells = np.zeros((len(body), len(sensors)), dtype=bool)
    for j, values in enumerate(body.itertuples(index=False, name=None)):
        event_id = values[0]
        events.append(event_id)
        for i, value in enumerate(values[1:]):
            if not isinstance(value, str) or value == "":
                raise MatrixFormatError(
                    f"ragged influence CSV: row for event {event_id!r} has fewer "
                    f"than {len(sensors)} cells"
                )
            if value not in ("0", "1"):
                raise MatrixFormatError(
                    f"cell for event {event_id!r}, sensor {sensors[i]!r} is {value!r}; "
                    "cells must be 0 or 1"
                )
            cells[j, i] = value == "1"
    return InfluenceMatrix(events=tuple(events), sensors=sensors, cells=cells)


def save_influence_matrix(M: InfluenceMatrix) -> str:
    """Write an influence CSV; `load_influence_matrix` reads it back bit-exactly."""
    frame = pd.DataFrame(M.cells.astype(np.int8), columns=list(M.sensors))
    frame.insert(0, "event", list(M.events), allow_duplicates=True)
    return frame.to_csv(index=False, lineterminator="\n")


def read_influence_matrix(path) -> InfluenceMatrix:
    with open(path, "r", encoding="utf-8") as f:
        return load_influence_matrix(f.read())
