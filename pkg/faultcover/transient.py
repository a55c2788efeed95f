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

"""Method-of-characteristics water hammer simulation for single pipes and pipes in
series, used to produce pressure traces and Boolean sensor outputs for a burst.

The grid has `N + 1` points joined by `N` segments. Segment `s` joins points `s` and
`s + 1` and carries the characteristic impedance `b_s = a / (gA)` and resistance
`r_s = c dx / (2 g D A^2)` of its pipe. Along the `C+` and `C-` characteristics,

    h_* = C_P - b q_*,  C_P = h_+ + q_+ (b - r |q_+|)
    h_* = C_M + b q_*,  C_M = h_- - q_- (b - r |q_-|)

where `+` is the point upstream and `-` the point downstream at the previous step.
Eliminating `q_*` gives the interior head update `h = (C_P + C_M) / 2` and flow
`q = (C_P - C_M) / (2b)`; at a junction of two different pipes the two impedances
weight the characteristics instead. Reservoirs fix the head at both ends.

A burst point loses `C_d A_d sqrt(2 g h)` of flow through an orifice. Substituting
`u = sqrt(h)` turns the head balance into a quadratic whose non-negative root is used.
The flows on either side of the burst are then read back off the two characteristics.

Runs in float64: `jax_enable_x64` is switched on when this module is imported.
"""

import functools as ft
import json
import logging
import math
from dataclasses import dataclass
from typing import Any, List, Mapping, NamedTuple, Sequence, Tuple

import jax
import jax.numpy as jnp
import numpy as np
import pandas as pd
from jaxtyping import Array, Bool, Float, jaxtyped
from typeguard import typechecked

from .errors import NetworkFormatError, SimulationError


jax.config.update("jax_enable_x64", True)

logger = logging.getLogger(__name__)

GRAVITY = 9.81
WATER_DENSITY = 1000.0

TRACE_COLUMNS = ["step", "grid_index", "head_m", "flow_m3s", "pressure_pa", "output"]


@dataclass(frozen=True)
class PipeParams:
    """A single pipe, discretised into `segments` equal reaches.

    The time step is fixed by the Courant condition `dt = dx / a`.
    """

    length_m: float
    diameter_m: float
    wave_speed_m_s: float
    friction: float = 0.0
    segments: int = 10

    def __post_init__(self):
        if not isinstance(self.segments, int) or self.segments < 2:
            raise ValueError(f"a pipe needs at least 2 segments, got {self.segments}")
        for name in ("length_m", "diameter_m", "wave_speed_m_s"):
            value = getattr(self, name)
            if not value > 0:
                raise ValueError(f"{name} must be strictly positive, got {value}")
        if not self.friction >= 0:
            raise ValueError(f"friction must be non-negative, got {self.friction}")

    @property
    def area_m2(self) -> float:
        return math.pi * self.diameter_m**2 / 4

    @property
    def dx(self) -> float:
        return self.length_m / self.segments

    @property
    def dt(self) -> float:
        return self.dx / self.wave_speed_m_s

    @property
    def b(self) -> float:
        return self.wave_speed_m_s / (GRAVITY * self.area_m2)

    @property
    def r(self) -> float:
        return self.friction * self.dx / (2 * GRAVITY * self.diameter_m * self.area_m2**2)


class Characteristics(NamedTuple):
    """Per-segment impedance `b` and resistance `r` of a grid, and its time step."""

    b: Float[Array, " segments"]
    r: Float[Array, " segments"]
    dt: float


class GridState(NamedTuple):
    """Heads and flows at every grid point after `t` steps.

    `q` is the flow leaving each point downstream and `q_in` the flow arriving from
    upstream. They only differ at a bursting point.
    """

    h: Float[Array, " points"]
    q: Float[Array, " points"]
    q_in: Float[Array, " points"]
    t: Any


def grid_characteristics(pipes: Sequence[PipeParams]) -> Characteristics:
    """Concatenate pipes in series into one grid.

    **Raises:**

    `SimulationError` if the pipes' time steps differ by more than one part in 1e9,
    as every pipe must advance with the same step.
    """
    if not pipes:
        raise ValueError("at least one pipe is required")
    dt = pipes[0].dt
    for i, pipe in enumerate(pipes[1:], start=1):
        if abs(pipe.dt - dt) > 1e-9 * dt:
            raise SimulationError(
                f"pipe {i} has time step {pipe.dt:.6g} s but pipe 0 has {dt:.6g} s; "
                "choose segment counts so that length / (segments * wave speed) "
                "agrees across pipes"
            )
    b = np.concatenate([np.full(p.segments, p.b) for p in pipes])
    r = np.concatenate([np.full(p.segments, p.r) for p in pipes])
    return Characteristics(b=jnp.asarray(b), r=jnp.asarray(r), dt=dt)


def steady_state(
    pipes: Sequence[PipeParams], upstream_head_m: float, downstream_head_m: float
) -> GridState:
    """Steady friction-only flow between two reservoirs.

    The flow `q` satisfies `H_up - H_down = q |q| * sum_s r_s`, and the head drops by
    `r_s q |q|` across every segment.
    """
    chars = grid_characteristics(pipes)
    r = np.asarray(chars.r)
    drop = upstream_head_m - downstream_head_m
    total = float(r.sum())
    if total == 0:
        if drop != 0:
            raise SimulationError(
                "frictionless pipes cannot carry steady flow between reservoirs at "
                f"different heads ({upstream_head_m} m and {downstream_head_m} m)"
            )
        flow = 0.0
    else:
        flow = math.copysign(math.sqrt(abs(drop) / total), drop)
    losses = np.concatenate([[0.0], np.cumsum(r * flow * abs(flow))])
    h = jnp.asarray(upstream_head_m - losses)
    q = jnp.full(h.shape, flow)
    return GridState(h=h, q=q, q_in=q, t=jnp.asarray(0))


@jaxtyped(typechecker=typechecked)
def characteristic_update(
    h: Float[Array, " points"],
    q: Float[Array, " points"],
    q_in: Float[Array, " points"],
    b: Float[Array, " segments"],
    r: Float[Array, " segments"],
) -> Tuple[
    Float[Array, " interior"],
    Float[Array, " interior"],
    Float[Array, " interior"],
    Float[Array, " interior"],
]:
    """`C_P`, `C_M` and the burst-free head and flow at every interior point."""
    q_up = q[:-2]
    q_down = q_in[2:]
    b_left, r_left = b[:-1], r[:-1]
    b_right, r_right = b[1:], r[1:]
    c_p = h[:-2] + q_up * (b_left - r_left * jnp.abs(q_up))
    c_m = h[2:] - q_down * (b_right - r_right * jnp.abs(q_down))
    total = b_left + b_right
    safe_total = jnp.where(total > 0, total, 1.0)
    head = jnp.where(
        b_left == b_right,
        0.5 * (c_p + c_m),
        (c_p * b_right + c_m * b_left) / safe_total,
    )
    # Without impedance the characteristics carry no flow information.
    flow = jnp.where(total > 0, (c_p - c_m) / safe_total, q[1:-1])
    return c_p, c_m, head, flow


def step_interior(prev: GridState, chars: Characteristics) -> GridState:
    """Advance the interior points by one step; the two end points are kept."""
    _, _, head, flow = characteristic_update(
        prev.h, prev.q, prev.q_in, chars.b, chars.r
    )
    h = prev.h.at[1:-1].set(head)
    q = prev.q.at[1:-1].set(flow)
    q_in = prev.q_in.at[1:-1].set(flow)
    return GridState(h=h, q=q, q_in=q_in, t=prev.t + 1)


def _burst_head(c_p, c_m, head, b_left, b_right, discharge_coefficient, area):
    # h + B Cd Ad sqrt(2g h) - h0 = 0 with B = b_l b_r / (b_l + b_r); for equal
    # impedances B = b/2 and h0 = (C_P + C_M) / 2.
    impedance = b_left * b_right / (b_left + b_right)
    beta = impedance * discharge_coefficient * area * math.sqrt(2 * GRAVITY)
    gamma = head
    u = 0.5 * (-beta + jnp.sqrt(jnp.maximum(beta**2 + 4 * gamma, 0.0)))
    bursting = area > 0
    burst_head = jnp.where(bursting, u**2, head)
    q_in = jnp.where(bursting, (c_p - burst_head) / b_left, jnp.nan)
    q_out = jnp.where(bursting, (burst_head - c_m) / b_right, jnp.nan)
    unphysical = bursting & (gamma < 0)
    return burst_head, q_in, q_out, unphysical


def _check_burst_index(index: int, points: int) -> None:
    if not 0 < index < points - 1:
        raise ValueError(
            f"burst grid index {index} must be an interior point in 1..{points - 2}"
        )


def apply_burst_boundary(
    prev: GridState,
    chars: Characteristics,
    grid_index: int,
    discharge_coefficient: float,
    orifice_area_m2: float,
) -> float:
    """Head at a bursting interior point after one step.

    With `orifice_area_m2 == 0` this is exactly the interior update.

    **Raises:**

    `SimulationError` if the incoming characteristics imply a negative head.
    """
    _check_burst_index(grid_index, prev.h.shape[0])
    if orifice_area_m2 < 0:
        raise ValueError(f"orifice area must be non-negative, got {orifice_area_m2}")
    c_p, c_m, head, _ = characteristic_update(
        prev.h, prev.q, prev.q_in, chars.b, chars.r
    )
    k = grid_index - 1
    burst_head, _, _, unphysical = _burst_head(
        c_p[k],
        c_m[k],
        head[k],
        chars.b[k],
        chars.b[k + 1],
        discharge_coefficient,
        orifice_area_m2,
    )
    if bool(unphysical):
        raise SimulationError(
            f"negative head {float(head[k]):.6g} m at burst point {grid_index}"
        )
    return float(burst_head)


def _step(
    chars: Characteristics,
    upstream_head_m: float,
    downstream_head_m: float,
    burst_index: int,
    discharge_coefficient: float,
    state: GridState,
    area,
):
    b, r = chars.b, chars.r
    c_p, c_m, head, flow = characteristic_update(state.h, state.q, state.q_in, b, r)
    k = burst_index - 1
    burst_head, q_in_burst, q_out_burst, unphysical = _burst_head(
        c_p[k], c_m[k], head[k], b[k], b[k + 1], discharge_coefficient, area
    )
    bursting = area > 0
    interior_h = head.at[k].set(burst_head)
    interior_q = flow.at[k].set(jnp.where(bursting, q_out_burst, flow[k]))
    interior_q_in = flow.at[k].set(jnp.where(bursting, q_in_burst, flow[k]))

    # Reservoirs: the head is fixed and the flow comes off the one characteristic
    # that reaches the boundary.
    q_first = state.q_in[1]
    c_m_first = state.h[1] - q_first * (b[0] - r[0] * jnp.abs(q_first))
    q_upstream = jnp.where(b[0] > 0, (upstream_head_m - c_m_first) / b[0], state.q[0])
    q_last = state.q[-2]
    c_p_last = state.h[-2] + q_last * (b[-1] - r[-1] * jnp.abs(q_last))
    q_downstream = jnp.where(
        b[-1] > 0, (c_p_last - downstream_head_m) / b[-1], state.q[-1]
    )

    upstream = jnp.asarray([upstream_head_m])
    downstream = jnp.asarray([downstream_head_m])
    h = jnp.concatenate([upstream, interior_h, downstream])
    q = jnp.concatenate([q_upstream[None], interior_q, q_downstream[None]])
    q_in = jnp.concatenate([q_upstream[None], interior_q_in, q_downstream[None]])
    new_state = GridState(h=h, q=q, q_in=q_in, t=state.t + 1)
    return new_state, (h, q, unphysical)


@dataclass(frozen=True)
class BurstSpec:
    """A burst at an interior grid point.

    `orifice_area_series[t]` is the orifice area used for the update from step `t` to
    `t + 1`; it is zero before the burst starts. Series shorter than the horizon are
    extended with their last value.
    """

    grid_index: int
    discharge_coefficient: float
    orifice_area_series: Tuple[float, ...]

    def __post_init__(self):
        object.__setattr__(
            self, "orifice_area_series", tuple(float(a) for a in self.orifice_area_series)
        )
        if any(not a >= 0 for a in self.orifice_area_series):
            raise ValueError("orifice areas must be non-negative")
        if not self.discharge_coefficient >= 0:
            raise ValueError(
                "discharge coefficient must be non-negative, got "
                f"{self.discharge_coefficient}"
            )

    @classmethod
    def sudden(
        cls,
        grid_index: int,
        discharge_coefficient: float,
        orifice_area_m2: float,
        onset_step: int,
        horizon_steps: int,
    ) -> "BurstSpec":
        """A burst that opens fully at `onset_step` and stays open."""
        if onset_step < 0:
            raise ValueError(f"onset step must be non-negative, got {onset_step}")
        series = [0.0 if t < onset_step else orifice_area_m2 for t in range(horizon_steps)]
        return cls(grid_index, discharge_coefficient, tuple(series))

    def areas(self, horizon_steps: int) -> np.ndarray:
        series = list(self.orifice_area_series[:horizon_steps])
        fill = series[-1] if series else 0.0
        series.extend([fill] * (horizon_steps - len(series)))
        return np.asarray(series, dtype=np.float64)


@dataclass(frozen=True)
class SensorSpec:
    grid_index: int
    elevation_m: float = 0.0


@dataclass(frozen=True)
class Scenario:
    pipes: Tuple[PipeParams, ...]
    upstream_head_m: float
    downstream_head_m: float
    burst: BurstSpec
    horizon_steps: int
    sensors: Tuple[SensorSpec, ...]
    threshold_pa: float

    def __post_init__(self):
        object.__setattr__(self, "pipes", tuple(self.pipes))
        object.__setattr__(self, "sensors", tuple(self.sensors))
        if self.horizon_steps < 0:
            raise ValueError(f"horizon must be non-negative, got {self.horizon_steps}")
        if not self.threshold_pa > 0:
            raise ValueError(f"threshold must be strictly positive, got {self.threshold_pa}")

    @property
    def points(self) -> int:
        return sum(p.segments for p in self.pipes) + 1


@dataclass(frozen=True, eq=False)
class SensorReading:
    """Pressure trace of one sensor and its thresholded output.

    `outputs[t]` is `|p_t - p_0| >= threshold`. `detected` is whether any step fired.
    """

    grid_index: int
    elevation_m: float
    pressure_pa: np.ndarray
    outputs: np.ndarray

    @property
    def detected(self) -> bool:
        return bool(self.outputs.any())

    @property
    def latched(self) -> np.ndarray:
        return np.logical_or.accumulate(self.outputs)


@dataclass(frozen=True, eq=False)
class SimulationResult:
    heads: np.ndarray
    flows: np.ndarray
    dt: float
    readings: Tuple[SensorReading, ...]


@jaxtyped(typechecker=typechecked)
def sensor_outputs(
    pressure: Float[Array, " steps"], threshold_pa: float
) -> Bool[Array, " steps"]:
    """Thresholded absolute deviation from the initial pressure."""
    return jnp.abs(pressure - pressure[0]) >= threshold_pa


def simulate(scenario: Scenario) -> SimulationResult:
    """Run a scenario from the steady state for `horizon_steps` steps.

    **Raises:**

    `SimulationError` if the state becomes non-finite or the burst head unphysical.
    """
    points = scenario.points
    _check_burst_index(scenario.burst.grid_index, points)
    for sensor in scenario.sensors:
        if not 0 <= sensor.grid_index < points:
            raise ValueError(
                f"sensor grid index {sensor.grid_index} out of range 0..{points - 1}"
            )
    chars = grid_characteristics(scenario.pipes)
    initial = steady_state(
        scenario.pipes, scenario.upstream_head_m, scenario.downstream_head_m
    )
    areas = jnp.asarray(scenario.burst.areas(scenario.horizon_steps))
    step = ft.partial(
        _step,
        chars,
        scenario.upstream_head_m,
        scenario.downstream_head_m,
        scenario.burst.grid_index,
        scenario.burst.discharge_coefficient,
    )
    _, (h_steps, q_steps, unphysical) = jax.lax.scan(step, initial, areas)
    heads = np.concatenate([np.asarray(initial.h)[None], np.asarray(h_steps)])
    flows = np.concatenate([np.asarray(initial.q)[None], np.asarray(q_steps)])
    unphysical = np.asarray(unphysical)
    if unphysical.any():
        first = int(np.argmax(unphysical))
        raise SimulationError(
            f"negative head at burst point {scenario.burst.grid_index} on step "
            f"{first + 1}; simulation halted"
        )
    if not (np.isfinite(heads).all() and np.isfinite(flows).all()):
        first = int(np.argmax(~np.isfinite(heads).all(axis=1)))
        raise SimulationError(f"simulation became non-finite at step {first}")
    readings = []
    for sensor in scenario.sensors:
        pressure = (
            (heads[:, sensor.grid_index] - sensor.elevation_m) * WATER_DENSITY * GRAVITY
        )
        outputs = sensor_outputs(jnp.asarray(pressure), float(scenario.threshold_pa))
        readings.append(
            SensorReading(
                grid_index=sensor.grid_index,
                elevation_m=sensor.elevation_m,
                pressure_pa=pressure,
                outputs=np.asarray(outputs),
            )
        )
    logger.info(
        "Simulated %d steps of %.4g s on %d grid points; %d of %d sensors fired",
        scenario.horizon_steps,
        chars.dt,
        points,
        sum(r.detected for r in readings),
        len(readings),
    )
    return SimulationResult(heads=heads, flows=flows, dt=chars.dt, readings=tuple(readings))


def _field(entry: Any, key: str, where: str) -> Any:
    if not isinstance(entry, Mapping):
        raise NetworkFormatError(f"{where} must be an object")
    if key not in entry:
        raise NetworkFormatError(f"{where} has no {key!r}")
    return entry[key]


def load_scenario(text: str) -> Scenario:
    """Parse a JSON scenario document.

    Keys: `pipes` (each with `length_m`, `diameter_m`, `wave_speed_m_s`, optional
    `friction` and `segments`), `upstream_head_m`, `downstream_head_m`, `burst` (with
    `grid_index`, `discharge_coefficient` and either `orifice_area_series` or
    `orifice_area_m2` plus `onset_step`), `horizon_steps`, `sensors` (each with
    `grid_index` and optional `elevation_m`) and `threshold_pa`.
    """
    try:
        document = json.loads(text)
    except json.JSONDecodeError as e:
        raise NetworkFormatError(f"scenario is not valid JSON: {e}") from e
    if not isinstance(document, Mapping):
        raise NetworkFormatError("scenario must be a JSON object")
    pipes = []
    for i, entry in enumerate(_field(document, "pipes", "scenario")):
        where = f"pipes[{i}]"
        pipes.append(
            PipeParams(
                length_m=float(_field(entry, "length_m", where)),
                diameter_m=float(_field(entry, "diameter_m", where)),
                wave_speed_m_s=float(_field(entry, "wave_speed_m_s", where)),
                friction=float(entry.get("friction", 0.0)),
                segments=int(entry.get("segments", 10)),
            )
        )
    horizon = int(_field(document, "horizon_steps", "scenario"))
    burst = _field(document, "burst", "scenario")
    if not isinstance(burst, Mapping):
        raise NetworkFormatError("burst must be an object")
    if "orifice_area_series" in burst:
        burst_spec = BurstSpec(
            grid_index=int(_field(burst, "grid_index", "burst")),
            discharge_coefficient=float(_field(burst, "discharge_coefficient", "burst")),
            orifice_area_series=tuple(burst["orifice_area_series"]),
        )
    else:
        burst_spec = BurstSpec.sudden(
            grid_index=int(_field(burst, "grid_index", "burst")),
            discharge_coefficient=float(_field(burst, "discharge_coefficient", "burst")),
            orifice_area_m2=float(_field(burst, "orifice_area_m2", "burst")),
            onset_step=int(burst.get("onset_step", 0)),
            horizon_steps=horizon,
        )
    sensors = [
        SensorSpec(
            grid_index=int(_field(entry, "grid_index", f"sensors[{i}]")),
            elevation_m=float(entry.get("elevation_m", 0.0)),
        )
        for i, entry in enumerate(_field(document, "sensors", "scenario"))
    ]
    return Scenario(
        pipes=tuple(pipes),
        upstream_head_m=float(_field(document, "upstream_head_m", "scenario")),
        downstream_head_m=float(_field(document, "downstream_head_m", "scenario")),
        burst=burst_spec,
        horizon_steps=horizon,
        sensors=tuple(sensors),
        threshold_pa=float(_field(document, "threshold_pa", "scenario")),
    )


def trace_frame(result: SimulationResult) -> pd.DataFrame:
    """Per-step rows for every sensor, then one `summary` row per sensor."""
    rows: List[dict] = []
    for reading in result.readings:
        latched = reading.latched
        for t in range(result.heads.shape[0]):
            rows.append(
                {
                    "step": str(t),
                    "grid_index": reading.grid_index,
                    "head_m": float(result.heads[t, reading.grid_index]),
                    "flow_m3s": float(result.flows[t, reading.grid_index]),
                    "pressure_pa": float(reading.pressure_pa[t]),
                    "output": int(latched[t]),
                }
            )
    for reading in result.readings:
        rows.append(
            {
                "step": "summary",
                "grid_index": reading.grid_index,
                "head_m": None,
                "flow_m3s": None,
                "pressure_pa": None,
                "output": int(reading.detected),
            }
        )
    return pd.DataFrame(rows, columns=TRACE_COLUMNS)


def save_trace(result: SimulationResult) -> str:
    return trace_frame(result).to_csv(index=False, lineterminator="\n")
