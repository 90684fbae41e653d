"""Finite-volume updates and the delayed time loop.

Both schemes advance the delayed conservation law

    d/dt rho + d/dx ( rho f(rho) v((rho * omega)(t - tau, x)) ) = 0

one step at a time using the lagged speed field V_j = V^{n-h}_j.  With
lam = dt/dx and F(rho) = rho f(rho):

Lax-Friedrichs (viscosity alpha):

    rho'_j = rho_j + (lam alpha / 2) (rho_{j+1} - 2 rho_j + rho_{j-1})
                   - (lam / 2) (F(rho_{j+1}) V_{j+1} - F(rho_{j-1}) V_{j-1})

Hilliges-Weidlich:

    rho'_j = rho_j - lam (rho_j f(rho_{j+1}) V_{j+1} - rho_{j-1} f(rho_j) V_j)

Ghost cells follow the boundary rule also used by the convolution window:
free-flow replicates the first/last cell, periodic wraps.
"""

from __future__ import annotations

from typing import Callable

import numpy as np

from .delay_state import (
    FREE_FLOW,
    DelayedState,
    init_history,
    lagged_speeds,
    push_level,
)
from .discretization import Grid, KernelWeights
from .model_functions import Saturation, Velocity

LAX_FRIEDRICHS = "lf"
HILLIGES_WEIDLICH = "hw"

SCHEME_KINDS = (LAX_FRIEDRICHS, HILLIGES_WEIDLICH)


class StepError(RuntimeError):
    """Non-finite value produced by a scheme step."""


def extend3(values: np.ndarray, boundary: str) -> np.ndarray:
    """values with one ghost cell on each side (replicate or wrap)."""
    if boundary == FREE_FLOW:
        return np.concatenate([values[:1], values, values[-1:]])
    return np.concatenate([values[-1:], values, values[:1]])


def lf_step(
    rho: np.ndarray,
    v_lag: np.ndarray,
    lam: float,
    alpha: float,
    sat: Saturation,
    boundary: str,
) -> np.ndarray:
    """One Lax-Friedrichs update of the whole level."""
    r = extend3(rho, boundary)
    v = extend3(v_lag, boundary)
    with np.errstate(invalid="ignore", over="ignore"):
        flux = r * sat(r) * v
        out = rho + 0.5 * lam * (
            alpha * (r[2:] - 2.0 * rho + r[:-2]) - (flux[2:] - flux[:-2])
        )
    if not np.all(np.isfinite(out)):
        bad = int(np.argmin(np.isfinite(out)))
        raise StepError(f"non-finite density in cell {bad}")
    return out


def hw_step(
    rho: np.ndarray,
    v_lag: np.ndarray,
    lam: float,
    sat: Saturation,
    boundary: str,
) -> np.ndarray:
    """One Hilliges-Weidlich update of the whole level.

    The interface flux rho_j f(rho_{j+1}) V_{j+1} is non-negative whenever
    the level is, so no numerical viscosity is needed.
    """
    r = extend3(rho, boundary)
    v = extend3(v_lag, boundary)
    with np.errstate(invalid="ignore", over="ignore"):
        # flux[j] = flux through the right interface of (extended) cell j
        flux = r[:-1] * sat(r[1:]) * v[1:]
        out = rho - lam * (flux[1:] - flux[:-1])
    if not np.all(np.isfinite(out)):
        bad = int(np.argmin(np.isfinite(out)))
        raise StepError(f"non-finite density in cell {bad}")
    return out


def hw_interface_fluxes(
    rho: np.ndarray,
    v_lag: np.ndarray,
    sat: Saturation,
    boundary: str,
) -> np.ndarray:
    """The J + 1 interface fluxes rho_j f(rho_{j+1}) V_{j+1} of one HW step."""
    r = extend3(rho, boundary)
    v = extend3(v_lag, boundary)
    return r[:-1] * sat(r[1:]) * v[1:]


def step_count(t_final: float, dt: float) -> int:
    """Largest N with N dt <= t_final, tolerating float rounding in t/dt."""
    if t_final < 0:
        raise ValueError("final time must be non-negative")
    return int(np.floor(t_final / dt + 1e-9))


def run(
    grid: Grid,
    weights: KernelWeights,
    vel: Velocity,
    sat: Saturation,
    scheme: str,
    rho0: np.ndarray,
    t_final: float,
    boundary: str = FREE_FLOW,
    observer: Callable[[int, np.ndarray, np.ndarray], None] | None = None,
) -> np.ndarray:
    """Advance the projected datum to N_T dt with N_T dt <= t_final.

    The observer, if given, is called as observer(n, level, v_lag) once
    before the loop (n = 0) and after each step n = 1..N_T, where level
    is the density at step n and v_lag the lagged speed field V^{n-h}
    that the NEXT step will consume.  A stateful observer that remembers
    the previous call therefore holds exactly the (level, speeds) pair
    that produced the current level.
    """
    if scheme not in SCHEME_KINDS:
        raise ValueError(f"unknown scheme {scheme!r}")
    if scheme == LAX_FRIEDRICHS and grid.alpha is None:
        raise ValueError("Lax-Friedrichs needs the grid's viscosity alpha")
    rho = np.asarray(rho0, dtype=float).copy()
    if rho.size != grid.n_cells:
        raise ValueError("initial level length does not match the grid")
    state = init_history(rho, grid.delay_steps, boundary)
    n_steps = step_count(t_final, grid.dt)
    lam = grid.lam
    v_lag = lagged_speeds(state, weights, vel)
    if observer is not None:
        observer(0, rho, v_lag)
    for n in range(1, n_steps + 1):
        try:
            if scheme == LAX_FRIEDRICHS:
                rho = lf_step(rho, v_lag, lam, grid.alpha, sat, boundary)
            else:
                rho = hw_step(rho, v_lag, lam, sat, boundary)
        except StepError as exc:
            raise StepError(f"step {n}: {exc}") from exc
        push_level(state, rho)
        v_lag = lagged_speeds(state, weights, vel)
        if observer is not None:
            observer(n, rho, v_lag)
    return rho
