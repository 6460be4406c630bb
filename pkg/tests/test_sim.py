import math

import pytest
from hypothesis import given, settings, strategies as st

from lbeval.dsl import parse_expression, parse_model_file
from lbeval.expr import DivergenceError, ModelDefinition
from lbeval.sim import (DuffingParams, InputTooShortError, Orbit,
                        cosine_forcing, integrate_duffing, orbit_from_csv,
                        orbit_to_csv, realize_input, simulate)
from lbeval.studies import shipped_models

from oracles import duffing_g_oracle

TS = math.pi / 60


def model(update, lags=0, init=None, **kw):
    init = init if init is not None else [0.5] * (lags + 1)
    return ModelDefinition("m", lags, tuple(init), parse_expression(update),
                           **kw)


def test_one_sine_step():
    orbit = simulate(model("1.2*3.141592653589793*sin(x[0])"), 1)
    assert orbit.samples == (0.5, (1.2 * math.pi) * math.sin(0.5))
    assert orbit[1] == pytest.approx(1.8073917, rel=1e-7)


def test_identity_map_is_constant():
    orbit = simulate(model("x[0]", lags=2, init=[0.25, 0.25, 0.25]), 20)
    assert set(orbit) == {0.25}
    assert len(orbit) == 21


def test_seeded_region_and_lag_binding():
    # x[1] is the sample before the newest, so this reproduces Fibonacci
    orbit = simulate(model("x[0] + x[1]", lags=1, init=[1.0, 1.0]), 6)
    assert orbit.samples == (1.0, 1.0, 2.0, 3.0, 5.0, 8.0, 13.0)


def test_input_binding_uses_current_step():
    m = model("u[0] + 10*u[1]", lags=1, init=[0.0, 0.0], max_input_lag=1,
              requires_input=True)
    u = realize_input("explicit", 4, sequence=[1, 2, 3, 4, 5])
    # sample n+1 = U_n + 10*U_{n-1}
    assert simulate(m, 4, u).samples == (0.0, 0.0, 12.0, 23.0, 34.0)


def test_duffing_model_against_brute_force():
    mf = shipped_models("duffing.nmx")
    u = cosine_forcing(10.0, TS, 100)
    orbit = simulate(mf["G"], 100, u)
    assert list(orbit) == duffing_g_oracle(100, u.samples)
    assert orbit.samples[:5] == (0.0,) * 5
    assert orbit[5] != 0.0
    short = simulate(mf["G"], 4, u)
    assert short.samples == (0.0,) * 5


def test_verbatim_duffing_brute_force():
    mf = shipped_models("duffing_verbatim.nmx")
    u = cosine_forcing(10.0, TS, 40)
    assert list(simulate(mf["G"], 40, u)) == duffing_g_oracle(
        40, u.samples, c_u0=0.000341)


def test_input_too_short():
    mf = shipped_models("duffing.nmx")
    with pytest.raises(InputTooShortError):
        simulate(mf["G"], 50, cosine_forcing(10.0, TS, 10))


def test_n_shorter_than_seed_rejected():
    with pytest.raises(ValueError):
        simulate(model("x[0]", lags=3), 2)


def test_divergence_reports_step():
    m = model("x[0]*x[0]+2", init=[2.0])
    # brute force: find the first overflow
    v, n = 2.0, 0
    while math.isfinite(v * v + 2):
        v, n = v * v + 2, n + 1
    with pytest.raises(DivergenceError) as info:
        simulate(m, 50)
    assert info.value.step_index == n


def test_realize_input():
    u = realize_input("cosine_forcing", 60, amplitude=10.0, period=TS)
    assert u.samples[0] == 10.0
    assert u.samples[30] == 10.0 * math.cos(30 * TS)
    assert u.samples[30] != 0.0 and abs(u.samples[30]) < 1e-14
    assert len(u) == 61
    assert len(realize_input("none", 10)) == 0


def test_sine_system_bounded():
    mf = shipped_models("sine.nmx")
    bound = math.nextafter(1.2 * math.pi, math.inf)
    assert all(abs(v) <= bound for v in simulate(mf["S"], 1000))


def test_simulation_is_deterministic():
    mf = shipped_models("sine.nmx")
    assert simulate(mf["H"], 300) == simulate(mf["H"], 300)


def test_extension_pseudo_orbits_separate():
    mf = shipped_models("sine.nmx")
    g, h = simulate(mf["G"], 100), simulate(mf["H"], 100)
    diff = [n for n in range(101) if g[n] != h[n]]
    assert diff and diff[0] <= 100
    assert g.samples[:diff[0]] == h.samples[:diff[0]]


def test_duffing_trivial_cases():
    assert integrate_duffing(DuffingParams(), 0).samples == (0.0,)
    assert set(integrate_duffing(DuffingParams(A=0.0), 50)) == {0.0}


def test_duffing_substep_refinement():
    coarse = integrate_duffing(DuffingParams(substeps=100), 65)
    fine = integrate_duffing(DuffingParams(substeps=1000), 65)
    rel = max(abs(a - b) / abs(b) for a, b in zip(coarse, fine) if b != 0)
    assert rel < 1e-8


def rk4_ratio(substeps):
    """Error reduction from halving h, over one forcing period (2*pi)."""
    ref = integrate_duffing(DuffingParams(substeps=256), 120)
    err = lambda s: max(abs(a - b) for a, b in zip(  # noqa: E731
        integrate_duffing(DuffingParams(substeps=s), 120), ref))
    return err(substeps) / err(2 * substeps)


@pytest.mark.parametrize("substeps", [1, 2, 4])
def test_rk4_fourth_order(substeps):
    assert 8 <= rk4_ratio(substeps) <= 32


def test_duffing_params_validation():
    with pytest.raises(ValueError):
        DuffingParams(Ts=0.0)
    with pytest.raises(ValueError):
        DuffingParams(substeps=0)


@settings(max_examples=50)
@given(st.lists(st.floats(allow_nan=False, allow_infinity=False), min_size=1,
                max_size=30))
def test_orbit_csv_round_trip(values):
    orbit = Orbit(tuple(values))
    text = orbit_to_csv(orbit)
    assert text.splitlines()[0] == "n,value"
    back = orbit_from_csv(text)
    assert [v.hex() for v in back] == [v.hex() for v in values]


def test_parse_file_then_simulate_matches_builtin():
    text = """
    model G { lags = 3; init = 0.5, 0.5, 0.5, 0.5;
              update = 2.6868*x[0] - 0.2462*x[0]^3; }
    """
    own = simulate(parse_model_file(text)["G"], 100)
    assert own == simulate(shipped_models("sine.nmx")["G"], 100)
