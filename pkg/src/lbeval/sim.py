"""Orbit generation: model iteration, forcing inputs and the Duffing ODE."""
from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .expr import (DivergenceError, EvaluationContext, ModelDefinition,
                   evaluate)


class InputTooShortError(ValueError):
    pass


@dataclass(frozen=True)
class Orbit:
    """Samples ``x_0 .. x_N`` of one trajectory."""
    samples: tuple[float, ...]
    model_name: str = ""
    input_name: str = ""

    @property
    def N(self) -> int:
        return len(self.samples) - 1

    def __len__(self):
        return len(self.samples)

    def __getitem__(self, k):
        return self.samples[k]

    def __iter__(self):
        return iter(self.samples)

    def to_array(self) -> np.ndarray:
        return np.array(self.samples, dtype=np.float64)


@dataclass(frozen=True)
class InputSignal:
    kind: str = "none"  # "none", "cosine_forcing" or "explicit"
    samples: tuple[float, ...] = ()
    amplitude: float | None = None
    period: float | None = None
    name: str = ""

    def __len__(self):
        return len(self.samples)


NO_INPUT = InputSignal()


def cosine_forcing(amplitude: float, period: float, N: int) -> InputSignal:
    """``U_n = amplitude * cos(n * period)`` for ``n = 0..N``.

    Each sample is computed directly from ``n``; no phase recurrence, so
    ``U_30`` with ``period = pi/60`` is ``6.1e-16``-ish, not zero.
    """
    return realize_input("cosine_forcing", N, amplitude=amplitude,
                         period=period)


def realize_input(kind: str, N: int, *, amplitude: float = 0.0,
                  period: float = 0.0,
                  sequence: Sequence[float] = ()) -> InputSignal:
    if N < 0:
        raise ValueError("N must be nonnegative")
    if kind == "none":
        return NO_INPUT
    if kind == "cosine_forcing":
        samples = tuple(amplitude * math.cos(n * period) for n in range(N + 1))
        return InputSignal(kind, samples, amplitude, period,
                           name=f"{amplitude!r}*cos(n*{period!r})")
    if kind == "explicit":
        samples = tuple(float(v) for v in sequence)
        if len(samples) < N + 1:
            raise InputTooShortError(
                f"explicit input has {len(samples)} samples, need {N + 1}")
        return InputSignal(kind, samples, name="explicit")
    raise ValueError(f"unknown input kind {kind!r}")


def simulate(model: ModelDefinition, N: int,
             input: InputSignal = NO_INPUT) -> Orbit:
    """Free-run ``model`` for samples ``0..N``.

    Samples ``0..k_y`` are the initial conditions.  For ``n >= k_y`` sample
    ``n+1`` is the update evaluated with ``x[p] = X_{n-p}`` and
    ``u[q] = U_{n-q}``.
    """
    k_y = model.max_output_lag
    k_u = model.max_input_lag
    if N < k_y:
        raise ValueError(f"N = {N} is shorter than the seeded region "
                         f"(lags = {k_y})")
    if model.requires_input and len(input) < N:
        raise InputTooShortError(
            f"model {model.name!r} needs inputs U_0..U_{N - 1}, "
            f"got {len(input)} samples")
    if model.requires_input and k_u > k_y:
        raise ValueError("input lag deeper than output lag is not supported: "
                         "the seeded region must cover every u[] reference")
    samples = list(model.initial_conditions)
    for v in samples:
        if not math.isfinite(v):
            raise DivergenceError("non-finite initial condition", 0)
    u = input.samples
    update = model.update
    for n in range(k_y, N):
        ctx = EvaluationContext(
            tuple(samples[n - k_y:n + 1]),
            tuple(u[n - k_u:n + 1]) if model.requires_input else (),
            n)
        samples.append(evaluate(update, ctx))
    return Orbit(tuple(samples), model.name, input.name)


@dataclass(frozen=True)
class DuffingParams:
    """``y'' + k y' + mu y^3 = A cos(t)``, sampled every ``Ts``."""
    k: float = 1.0
    mu: float = 0.25
    A: float = 10.0
    Ts: float = math.pi / 60
    substeps: int = 100

    def __post_init__(self):
        if not self.Ts > 0:
            raise ValueError("Ts must be positive")
        if self.substeps < 1:
            raise ValueError("substeps must be >= 1")


def _duffing_rhs(t, y, v, p: DuffingParams):
    return v, p.A * math.cos(t) - p.k * v - p.mu * y * y * y


def integrate_duffing(params: DuffingParams, N: int,
                      t_start: float = 0.0,
                      y0: float = 0.0, v0: float = 0.0) -> Orbit:
    """Classical RK4 from rest, returning ``y(n*Ts)`` for ``n = 0..N``.

    Time is recomputed from the sample and substep counters at every stage
    instead of being accumulated, so the sample instants do not drift.
    """
    if N < 0:
        raise ValueError("N must be nonnegative")
    h = params.Ts / params.substeps
    y, v = float(y0), float(v0)
    out = [y]
    for n in range(N):
        for j in range(params.substeps):
            t = t_start + n * params.Ts + j * h
            k1y, k1v = _duffing_rhs(t, y, v, params)
            k2y, k2v = _duffing_rhs(t + h / 2, y + h / 2 * k1y,
                                    v + h / 2 * k1v, params)
            k3y, k3v = _duffing_rhs(t + h / 2, y + h / 2 * k2y,
                                    v + h / 2 * k2v, params)
            k4y, k4v = _duffing_rhs(t + h, y + h * k3y, v + h * k3v, params)
            y = y + h / 6 * (k1y + 2 * k2y + 2 * k3y + k4y)
            v = v + h / 6 * (k1v + 2 * k2v + 2 * k3v + k4v)
            if not (math.isfinite(y) and math.isfinite(v)):
                raise DivergenceError(
                    f"Duffing state became non-finite at sample {n + 1}",
                    step_index=n + 1)
        out.append(y)
    return Orbit(tuple(out), "duffing-ode",
                 f"{params.A!r}*cos(t)")


def orbit_to_csv(orbit: Orbit) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["n", "value"])
    for n, v in enumerate(orbit.samples):
        w.writerow([n, repr(v)])
    return buf.getvalue()


def orbit_from_csv(text: str) -> Orbit:
    rows = list(csv.reader(io.StringIO(text)))
    if not rows or rows[0] != ["n", "value"]:
        raise ValueError("expected header 'n,value'")
    return Orbit(tuple(float(r[1]) for r in rows[1:]))
