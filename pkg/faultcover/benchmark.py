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

"""Seeded instance generation and the augmented-greedy versus transformed-lazy-greedy
work comparison.

Work is measured in counted comparisons, which are exact and machine independent;
wall-clock times are recorded alongside.
"""

import dataclasses
import json
import logging
import math
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from fractions import Fraction
from typing import List, Mapping, Optional, Sequence

import jax.random as jr
import networkx as nx
import numpy as np
import pandas as pd
from typing_extensions import Literal

from .config import get_thread_count
from .errors import InstanceTooLargeError
from .influence import build_influence_matrix, InfluenceMatrix
from .network import Link, Network, Node
from .testcover import augmented_greedy, tlg_solve


logger = logging.getLogger(__name__)

InstanceKind = Literal["grid-network", "random-geometric", "random-matrix"]
_KINDS = ("grid-network", "random-geometric", "random-matrix")

# Span of the random pipe lengths of generated grid networks.
GRID_LENGTH_RANGE_M = (50.0, 150.0)
GEOMETRIC_SCALE_M = 1000.0


@dataclass(frozen=True)
class InstanceSpec:
    """A seeded instance recipe.

    **Arguments:**

    - `kind`: `"grid-network"` (a near-square grid of `m` junctions, pipes of random
        length, one event per pipe), `"random-geometric"` (`m` junctions in a
        `GEOMETRIC_SCALE_M` square joined when closer than `density` times the side),
        or `"random-matrix"` (`n x m` cells, each 1 with probability `density`).
    - `n`: number of events; only used by `"random-matrix"`, the network kinds have
        one event per pipe.
    - `m`: number of candidate sensors.
    - `epsilon`: detection radius in metres, for the network kinds.
    - `density`: see `kind`.
    - `seed`: the random seed.
    """

    kind: InstanceKind
    m: int
    n: Optional[int] = None
    epsilon: float = 300.0
    density: float = 0.5
    seed: int = 0

    def __post_init__(self):
        if self.kind not in _KINDS:
            raise ValueError(f"unknown instance kind {self.kind!r}; expected one of {_KINDS}")
        if self.m < 1:
            raise ValueError(f"m must be at least 1, got {self.m}")
        if self.kind == "random-matrix":
            if self.n is None or self.n < 0:
                raise ValueError("random-matrix instances need a non-negative n")
            if not 0 <= self.density <= 1:
                raise ValueError(f"density must lie in [0, 1], got {self.density}")
        else:
            if math.isnan(self.epsilon) or self.epsilon <= 0:
                raise ValueError(f"epsilon must be strictly positive, got {self.epsilon}")
            if self.kind == "random-geometric" and not self.density > 0:
                raise ValueError(
                    f"random-geometric radius (density) must be positive, got {self.density}"
                )

    @property
    def instance_id(self) -> str:
        size = f"n{self.n}-m{self.m}" if self.kind == "random-matrix" else f"m{self.m}"
        return f"{self.kind}-{size}-s{self.seed}"


def grid_shape(m: int):
    rows = max(1, math.isqrt(m))
    return rows, math.ceil(m / rows)


def generate_network(spec: InstanceSpec) -> Network:
    """The network behind a `"grid-network"` or `"random-geometric"` spec."""
    if spec.kind == "grid-network":
        rows, cols = grid_shape(spec.m)
        graph = nx.grid_2d_graph(rows, cols)
        positions = {node: (float(node[1]), float(node[0])) for node in graph.nodes}
        names = {node: f"n{node[0]}_{node[1]}" for node in graph.nodes}
        edges = list(graph.edges)
        low, high = GRID_LENGTH_RANGE_M
        lengths = np.asarray(
            jr.uniform(jr.PRNGKey(spec.seed), (len(edges),), minval=low, maxval=high),
            dtype=np.float64,
        )
    elif spec.kind == "random-geometric":
        graph = nx.random_geometric_graph(spec.m, spec.density, seed=spec.seed)
        positions = {
            node: tuple(GEOMETRIC_SCALE_M * float(c) for c in graph.nodes[node]["pos"])
            for node in graph.nodes
        }
        names = {node: f"n{node}" for node in graph.nodes}
        edges = [(u, v) for u, v in graph.edges if positions[u] != positions[v]]
        lengths = [math.dist(positions[u], positions[v]) for u, v in edges]
    else:
        raise ValueError(f"{spec.kind!r} instances have no network")
    nodes = tuple(
        Node(id=names[node], x=positions[node][0], y=positions[node][1])
        for node in graph.nodes
    )
    links = tuple(
        Link(
            id=f"p{i}",
            from_node=names[u],
            to_node=names[v],
            length_m=float(length),
        )
        for i, ((u, v), length) in enumerate(zip(edges, lengths))
    )
    return Network(nodes=nodes, links=links)


def generate_instance(spec: InstanceSpec) -> InfluenceMatrix:
    """Deterministically build the influence matrix of a spec."""
    if spec.kind == "random-matrix":
        cells = np.asarray(
            jr.bernoulli(jr.PRNGKey(spec.seed), spec.density, (spec.n, spec.m)),
            dtype=bool,
        )
        return InfluenceMatrix(
            events=tuple(f"l{j + 1}" for j in range(spec.n)),
            sensors=tuple(str(i + 1) for i in range(spec.m)),
            cells=cells,
        )
    net = generate_network(spec)
    sensors = net.node_ids[: spec.m]
    return build_influence_matrix(net, sensor_nodes=sensors, epsilon_m=spec.epsilon)


def load_specs(text: str) -> List[InstanceSpec]:
    """Parse a JSON list of specs (or an object with an `instances` list).

    An entry with `repeat: r` expands into `r` specs with consecutive seeds.
    """
    try:
        document = json.loads(text)
    except json.JSONDecodeError as e:
        raise ValueError(f"benchmark spec is not valid JSON: {e}") from e
    if isinstance(document, Mapping):
        document = document.get("instances")
    if not isinstance(document, list):
        raise ValueError("benchmark spec must be a list of instances")
    specs = []
    fields = {f.name for f in dataclasses.fields(InstanceSpec)}
    for i, entry in enumerate(document):
        if not isinstance(entry, Mapping):
            raise ValueError(f"instances[{i}] must be an object")
        entry = dict(entry)
        repeat = int(entry.pop("repeat", 1))
        if repeat < 1:
            raise ValueError(f"instances[{i}] has repeat {repeat}; must be at least 1")
        unknown = set(entry) - fields
        if unknown:
            raise ValueError(f"instances[{i}] has unknown keys {sorted(unknown)}")
        try:
            base = InstanceSpec(**entry)
        except TypeError as e:
            raise ValueError(f"instances[{i}]: {e}") from e
        specs.extend(
            dataclasses.replace(base, seed=base.seed + r) for r in range(repeat)
        )
    return specs


@dataclass(frozen=True)
class BenchRecord:
    instance_id: str
    kind: str
    seed: int
    status: str
    n: int = 0
    m: int = 0
    k: int = 0
    n_over_k: float = 0.0
    ag_cover_size: int = 0
    tlg_cover_size: Optional[int] = None
    ag_evaluations: int = 0
    ag_comparisons: int = 0
    tlg_evaluations: Optional[int] = None
    tlg_pairwise_checks: Optional[int] = None
    comparison_ratio: Optional[float] = None
    pairwise_bound: float = 0.0
    bound_factor: float = 0.0
    covers_match: Optional[bool] = None
    ag_seconds: float = 0.0
    tlg_seconds: Optional[float] = None
    message: str = ""


def _bench_one(spec: InstanceSpec, pairwise_limit: Optional[int]) -> BenchRecord:
    base = dict(instance_id=spec.instance_id, kind=spec.kind, seed=spec.seed)
    try:
        M = generate_instance(spec)
        start = time.perf_counter()
        ag = augmented_greedy(M)
        ag_seconds = time.perf_counter() - start
        n, m = M.n, M.m
        k = int(M.cells.sum(axis=0).max()) if n and m else 0
        pairs = n * (n - 1) // 2
        # Per-evaluation bound on the pending pairs one candidate can touch.
        bound = Fraction(k * pairs, n) if n else Fraction(0)
        scale = len(ag.iterations) * m * bound
        record = dict(
            base,
            n=n,
            m=m,
            k=k,
            n_over_k=n / k if k else math.inf,
            ag_cover_size=len(ag.selected),
            ag_evaluations=ag.evaluation_count,
            ag_comparisons=ag.comparison_count,
            pairwise_bound=float(bound),
            bound_factor=float(ag.comparison_count / scale) if scale else 0.0,
            ag_seconds=ag_seconds,
        )
        try:
            start = time.perf_counter()
            tlg = tlg_solve(M, limit=pairwise_limit)
            tlg_seconds = time.perf_counter() - start
        except InstanceTooLargeError as e:
            logger.info("%s: pairwise instance too large, AG only", spec.instance_id)
            return BenchRecord(status="ag-only", message=str(e), **record)
        matched = ag.selected == tlg.selected and ag.gains == tlg.gains
        if not matched:
            logger.warning(
                "%s: AG cover %s differs from TLG cover %s",
                spec.instance_id,
                ag.sensor_ids,
                tlg.sensor_ids,
            )
        return BenchRecord(
            status="ok",
            tlg_cover_size=len(tlg.selected),
            tlg_evaluations=tlg.evaluation_count,
            tlg_pairwise_checks=tlg.comparison_count,
            comparison_ratio=(
                ag.comparison_count / tlg.comparison_count
                if tlg.comparison_count
                else None
            ),
            covers_match=matched,
            tlg_seconds=tlg_seconds,
            **record,
        )
    except (ValueError, RuntimeError, IndexError) as e:
        logger.error("%s failed: %s", spec.instance_id, e)
        return BenchRecord(status="error", message=str(e), **base)


def run_benchmark(
    specs: Sequence[InstanceSpec], pairwise_limit: Optional[int] = None
) -> List[BenchRecord]:
    """Solve every instance with both identification solvers and compare them.

    Instances run in parallel on `faultcover.config.get_thread_count()` threads.
    Records come back in `specs` order. An instance whose pairwise form exceeds
    `pairwise_limit` is solved by augmented greedy only and marked `"ag-only"`; an
    instance that fails is marked `"error"` and the run continues.
    """
    specs = list(specs)
    with ThreadPoolExecutor(max_workers=get_thread_count()) as pool:
        records = list(pool.map(lambda s: _bench_one(s, pairwise_limit), specs))
    mismatches = sum(r.covers_match is False for r in records)
    logger.info(
        "Benchmarked %d instances (%d cover mismatches)", len(records), mismatches
    )
    return records


def bench_frame(records: Sequence[BenchRecord], timings: bool = True) -> pd.DataFrame:
    """One row per record. Without `timings` the wall-clock columns are left out, so
    the table depends on the specs alone."""
    columns = [f.name for f in dataclasses.fields(BenchRecord)]
    if not timings:
        columns = [c for c in columns if not c.endswith("_seconds")]
    return pd.DataFrame([dataclasses.asdict(r) for r in records], columns=columns)


def save_bench(records: Sequence[BenchRecord], timings: bool = True) -> str:
    return bench_frame(records, timings).to_csv(index=False, lineterminator="\n")