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

import json

import jax
import jax.numpy as jnp
import numpy as np
import pytest

from faultcover import NetworkFormatError, SimulationError
from faultcover.transient import (
    apply_burst_boundary,
    BurstSpec,
    characteristic_update,
    Characteristics,
    grid_characteristics,
    GridState,
    load_scenario,
    PipeParams,
    save_trace,
    Scenario,
    sensor_outputs,
    SensorSpec,
    simulate,
    steady_state,
    step_interior,
    trace_frame,
)

from .helpers import ParamError


PIPE = PipeParams(
    length_m=1000.0, diameter_m=0.3, wave_speed_m_s=1000.0, friction=0.02, segments=20
)


def _scenario(area=0.0, horizon=200, sensors=(11,), threshold=1000.0, pipes=(PIPE,)):
    return Scenario(
        pipes=pipes,
        upstream_head_m=100.0,
        downstream_head_m=95.0,
        burst=BurstSpec.sudden(10, 0.6, area, onset_step=0, horizon_steps=horizon),
        horizon_steps=horizon,
        sensors=tuple(SensorSpec(i) for i in sensors),
        threshold_pa=threshold,
    )


def test_pipe_params():
    assert PIPE.dx == 50.0
    assert PIPE.dt == 0.05
    assert PIPE.b == pytest.approx(1000.0 / (9.81 * np.pi * 0.3**2 / 4))
    assert PipeParams(1.0, 1.0, 1.0).r == 0.0
    with pytest.raises(ValueError):
        PipeParams(1000.0, 0.3, 1000.0, segments=1)
    with pytest.raises(ValueError):
        PipeParams(0.0, 0.3, 1000.0)
    with pytest.raises(ValueError):
        PipeParams(1000.0, 0.3, 1000.0, friction=-0.1)


def test_steady_state_is_a_fixed_point():
    initial = steady_state([PIPE], 100.0, 95.0)
    assert float(initial.h[0]) == 100.0
    assert float(initial.h[-1]) == pytest.approx(95.0, abs=1e-9)
    assert float(initial.q[0]) > 0

    result = simulate(_scenario(horizon=1000))
    assert result.heads.shape == (1001, 21)
    assert np.abs(result.heads - result.heads[0]).max() <= 1e-9
    assert np.abs(result.flows - result.flows[0]).max() <= 1e-10
    assert not result.readings[0].detected


def test_series_junction_keeps_the_steady_state():
    narrow = PipeParams(500.0, 0.2, 1000.0, friction=0.02, segments=10)
    assert narrow.dt == PIPE.dt
    result = simulate(_scenario(horizon=500, sensors=(20, 21), pipes=(PIPE, narrow)))
    assert np.abs(result.heads - result.heads[0]).max() <= 1e-8
    assert not any(r.detected for r in result.readings)


def test_time_step_mismatch():
    short = PipeParams(500.0, 0.3, 1000.0, segments=20)
    with pytest.raises(SimulationError):
        grid_characteristics([PIPE, short])
    with pytest.raises(ValueError):
        grid_characteristics([])


def test_frictionless_steady_state():
    pipe = PipeParams(1000.0, 0.3, 1000.0)
    state = steady_state([pipe], 50.0, 50.0)
    assert np.all(np.asarray(state.h) == 50.0)
    assert np.all(np.asarray(state.q) == 0.0)
    with pytest.raises(SimulationError):
        steady_state([pipe], 50.0, 40.0)


def test_still_water_stays_still():
    scenario = Scenario(
        pipes=(PIPE,),
        upstream_head_m=50.0,
        downstream_head_m=50.0,
        burst=BurstSpec.sudden(10, 0.6, 0.0, onset_step=0, horizon_steps=1000),
        horizon_steps=1000,
        sensors=(SensorSpec(5),),
        threshold_pa=1.0,
    )
    result = simulate(scenario)
    assert result.heads.shape == (1001, 21)
    assert np.abs(result.heads - 50.0).max() <= 1e-12
    assert np.abs(result.flows).max() <= 1e-12
    assert not result.readings[0].detected


def test_zero_impedance_profile_is_exact():
    # Dyadic values keep every update exact.
    points = 9
    chars = Characteristics(b=jnp.zeros(points - 1), r=jnp.full(points - 1, 0.5), dt=1.0)
    h = 100.0 - 0.5 * jnp.arange(points, dtype=jnp.float64)
    q = jnp.ones(points)
    state = GridState(h=h, q=q, q_in=q, t=jnp.asarray(0))
    step = jax.jit(step_interior)
    for _ in range(1000):
        state = step(state, chars)
    assert int(state.t) == 1000
    np.testing.assert_allclose(np.asarray(state.h), np.asarray(h), rtol=0, atol=1e-12)
    np.testing.assert_allclose(np.asarray(state.q), 1.0, rtol=0, atol=1e-12)


def test_no_orifice_is_the_interior_update():
    chars = grid_characteristics([PIPE])
    state = steady_state([PIPE], 100.0, 95.0)
    state = state._replace(h=state.h.at[9].add(2.0))
    interior = step_interior(state, chars)
    assert apply_burst_boundary(state, chars, 10, 0.6, 0.0) == float(interior.h[10])
    assert apply_burst_boundary(state, chars, 10, 0.6, 1e-3) < float(interior.h[10])


def test_larger_orifices_lose_more_head():
    chars = grid_characteristics([PIPE])
    state = steady_state([PIPE], 100.0, 95.0)
    heads = [
        apply_burst_boundary(state, chars, 10, 0.6, area)
        for area in np.linspace(0.0, 0.01, 10)
    ]
    assert all(a > b for a, b in zip(heads, heads[1:]))
    assert heads[-1] > 0


def test_burst_index_must_be_interior():
    chars = grid_characteristics([PIPE])
    state = steady_state([PIPE], 100.0, 95.0)
    for index in (0, 20, 21):
        with pytest.raises(ValueError):
            apply_burst_boundary(state, chars, index, 0.6, 1e-3)
    with pytest.raises(ValueError):
        apply_burst_boundary(state, chars, 10, 0.6, -1.0)


def test_negative_head_is_rejected():
    pipe = PipeParams(1000.0, 0.3, 1000.0)
    chars = grid_characteristics([pipe])
    state = steady_state([pipe], -10.0, -10.0)
    with pytest.raises(SimulationError):
        apply_burst_boundary(state, chars, 5, 0.6, 1e-3)
    scenario = Scenario(
        pipes=(pipe,),
        upstream_head_m=-10.0,
        downstream_head_m=-10.0,
        burst=BurstSpec.sudden(5, 0.6, 1e-3, onset_step=0, horizon_steps=10),
        horizon_steps=10,
        sensors=(SensorSpec(5),),
        threshold_pa=1.0,
    )
    with pytest.raises(SimulationError):
        simulate(scenario)


def test_mirror_symmetry():
    pipe = PipeParams(1000.0, 0.3, 1000.0, segments=20)
    scenario = Scenario(
        pipes=(pipe,),
        upstream_head_m=100.0,
        downstream_head_m=100.0,
        burst=BurstSpec.sudden(10, 0.6, 2e-3, onset_step=3, horizon_steps=300),
        horizon_steps=300,
        sensors=(SensorSpec(4), SensorSpec(16)),
        threshold_pa=500.0,
    )
    result = simulate(scenario)
    np.testing.assert_allclose(
        result.heads, result.heads[:, ::-1], rtol=1e-12, atol=1e-9
    )
    # The burst point stores its outgoing flow, whose mirror image is the incoming one.
    flows = np.delete(result.flows, 10, axis=1)
    mirrored = np.delete(result.flows[:, ::-1], 10, axis=1)
    np.testing.assert_allclose(flows, -mirrored, rtol=1e-12, atol=1e-9)
    left, right = result.readings
    np.testing.assert_array_equal(left.outputs, right.outputs)
    assert left.detected


def test_midpoint_burst_is_detected_quickly():
    result = simulate(_scenario(area=1e-3, horizon=200, sensors=(0, 11, 19)))
    upstream, near, far = result.readings
    # The reservoir holds its head.
    assert not upstream.detected
    assert near.detected
    assert int(np.argmax(near.outputs)) == 2
    assert far.detected
    assert int(np.argmax(far.outputs)) <= 10
    assert near.pressure_pa[2] < near.pressure_pa[0]
    assert np.all(near.latched[2:])


def test_huge_threshold_never_fires():
    result = simulate(_scenario(area=1e-3, threshold=1e12))
    assert not result.readings[0].outputs.any()


def test_sensor_outputs():
    pressure = jnp.array([1000.0, 1000.5, 1500.0, 400.0])
    assert sensor_outputs(pressure, 500.0).tolist() == [False, False, True, True]
    with pytest.raises(ParamError):
        sensor_outputs(jnp.ones((2, 2)), 1.0)


def test_characteristic_update_checks_shapes():
    b = jnp.ones(4)
    r = jnp.zeros(4)
    c_p, c_m, head, flow = characteristic_update(
        jnp.ones(5), jnp.zeros(5), jnp.zeros(5), b, r
    )
    assert head.shape == (3,)
    np.testing.assert_array_equal(np.asarray(c_p), np.asarray(c_m))
    with pytest.raises(ParamError):
        characteristic_update(jnp.ones(5), jnp.zeros(4), jnp.zeros(5), b, r)


def test_burst_series_padding():
    spec = BurstSpec(3, 0.6, (0.0, 0.5))
    assert spec.areas(4).tolist() == [0.0, 0.5, 0.5, 0.5]
    assert spec.areas(1).tolist() == [0.0]
    assert BurstSpec(3, 0.6, ()).areas(2).tolist() == [0.0, 0.0]
    assert BurstSpec.sudden(3, 0.6, 0.2, 2, 4).orifice_area_series == (0, 0, 0.2, 0.2)
    with pytest.raises(ValueError):
        BurstSpec(3, 0.6, (-1.0,))


def test_scenario_validation():
    with pytest.raises(ValueError):
        _scenario(threshold=0.0)
    with pytest.raises(ValueError):
        simulate(_scenario(sensors=(21,)))


SCENARIO = {
    "pipes": [
        {"length_m": 400.0, "diameter_m": 0.3, "wave_speed_m_s": 1000.0, "segments": 4}
    ],
    "upstream_head_m": 60.0,
    "downstream_head_m": 60.0,
    "burst": {"grid_index": 2, "discharge_coefficient": 0.6, "orifice_area_m2": 0.002, "onset_step": 1},
    "horizon_steps": 5,
    "sensors": [{"grid_index": 1}, {"grid_index": 3, "elevation_m": 2.0}],
    "threshold_pa": 100.0,
}


def test_load_scenario_and_trace():
    scenario = load_scenario(json.dumps(SCENARIO))
    assert scenario.points == 5
    assert scenario.burst.orifice_area_series == (0.0, 0.002, 0.002, 0.002, 0.002)
    assert scenario.sensors[1].elevation_m == 2.0

    result = simulate(scenario)
    frame = trace_frame(result)
    assert len(frame) == 2 * 6 + 2
    assert frame["step"].tolist()[-2:] == ["summary", "summary"]
    assert frame["output"].tolist()[-2:] == [1, 1]
    first = frame[frame["grid_index"] == 1]["output"].tolist()[:6]
    # The burst opens on the second update and reaches its neighbours one step later.
    assert first == [0, 0, 0, 1, 1, 1]
    text = save_trace(result)
    assert text.splitlines()[0] == "step,grid_index,head_m,flow_m3s,pressure_pa,output"
    assert text.endswith("\n")


@pytest.mark.parametrize(
    "mutate",
    [
        lambda d: d.pop("pipes"),
        lambda d: d.pop("threshold_pa"),
        lambda d: d["burst"].pop("grid_index"),
        lambda d: d.__setitem__("burst", 3),
        lambda d: d["sensors"].append("x"),
    ],
)
def test_load_scenario_rejects(mutate):
    document = json.loads(json.dumps(SCENARIO))
    mutate(document)
    with pytest.raises(NetworkFormatError):
        load_scenario(json.dumps(document))
    with pytest.raises(NetworkFormatError):
        load_scenario("{oops")
