"""Marching schemes: hand-checked single steps, conservation, fixed points."""

import numpy as np
import pytest

from lagflow.delay_state import FREE_FLOW, PERIODIC, convolved_speeds
from lagflow.discretization import build_grid, discretize_kernel
from lagflow.initial_data import Constant
from lagflow.model_functions import Kernel, Saturation, Velocity
from lagflow.schemes import (
    StepError,
    extend3,
    hw_interface_fluxes,
    hw_step,
    lf_step,
    run,
    step_count,
)

_SAT_NONE = Saturation("none")


def test_extend3_free_flow_replicates_ends():
    out = extend3(np.array([1.0, 2.0, 3.0]), FREE_FLOW)
    assert out.tolist() == [1.0, 1.0, 2.0, 3.0, 3.0]


def test_extend3_periodic_wraps():
    out = extend3(np.array([1.0, 2.0, 3.0]), PERIODIC)
    assert out.tolist() == [3.0, 1.0, 2.0, 3.0, 1.0]


def test_lf_step_hand_computed():
    """One Lax-Friedrichs step on [0, 1/2, 0], one-cell kernel, v = 1 - rho.

    Speeds are [1, 1/2, 1], fluxes rho * v = [0, 1/4, 0]; with lam = 1/4
    and alpha = 2 the update gives [3/32, 1/4, 5/32].
    """
    rho = np.array([0.0, 0.5, 0.0])
    v = np.array([1.0, 0.5, 1.0])
    out = lf_step(rho, v, lam=0.25, alpha=2.0, sat=_SAT_NONE, boundary=PERIODIC)
    assert np.allclose(out, [0.09375, 0.25, 0.15625])
    assert float(np.sum(out)) == pytest.approx(0.5)


def test_hw_step_hand_computed():
    """Same data, lam = 1/2: interface fluxes rho_j v_{j+1} give
    [0, 1/4, 1/4]."""
    rho = np.array([0.0, 0.5, 0.0])
    v = np.array([1.0, 0.5, 1.0])
    out = hw_step(rho, v, lam=0.5, sat=_SAT_NONE, boundary=PERIODIC)
    assert np.allclose(out, [0.0, 0.25, 0.25])
    assert float(np.sum(out)) == pytest.approx(0.5)


def test_hw_interface_fluxes_are_nonnegative_for_nonnegative_data():
    rng = np.random.default_rng(3)
    sat = Saturation("linear", rho_max=1.0)
    for _ in range(20):
        rho = rng.uniform(0.0, 1.0, 12)
        v = rng.uniform(0.0, 1.0, 12)
        fluxes = hw_interface_fluxes(rho, v, sat, FREE_FLOW)
        assert fluxes.shape == (13,)
        assert np.all(fluxes >= 0.0)


def test_lf_step_detects_nonfinite():
    rho = np.array([0.0, np.inf, 0.0])
    v = np.ones(3)
    with pytest.raises(StepError):
        lf_step(rho, v, lam=0.25, alpha=2.0, sat=_SAT_NONE, boundary=FREE_FLOW)


def test_step_count_lands_on_horizon():
    assert step_count(0.5, 0.0025) == 200
    assert step_count(0.5, 0.5 / 5100) == 5100
    # floor with a one-part-in-1e9 slack: just below a whole count rounds up
    assert step_count(0.3, 0.1) == 3


@pytest.mark.parametrize("scheme", ["lf", "hw"])
@pytest.mark.parametrize("value", [0.0, 0.35, 1.0])
def test_constant_states_are_exact_fixed_points(scheme, value):
    """Flat profiles are preserved bit for bit over 1000 steps."""
    vel = Velocity("normalized_greenshields")
    sat = Saturation("linear", rho_max=1.0)
    grid = build_grid(0.0, 1.0, 0.02, 0.005, 0.03, 0.1, alpha=2.0)
    weights = discretize_kernel(Kernel("constant", length=0.1), grid)
    rho0 = np.full(grid.n_cells, value)
    final = run(
        grid, weights, vel, sat, scheme, rho0, t_final=1000 * grid.dt, boundary=FREE_FLOW
    )
    assert np.array_equal(final, rho0)


def test_run_invokes_observer_every_step():
    vel = Velocity("normalized_greenshields")
    grid = build_grid(0.0, 1.0, 0.1, 0.05, 0.1, 0.1)
    weights = discretize_kernel(Kernel("constant", length=0.1), grid)
    seen = []
    run(
        grid,
        weights,
        vel,
        _SAT_NONE,
        "hw",
        np.full(10, 0.5),
        t_final=0.25,
        observer=lambda n, level, v_lag: seen.append((n, level.shape, v_lag.shape)),
    )
    assert [n for n, _, _ in seen] == list(range(6))
    assert all(shape == (10,) for _, shape, _ in seen)


def test_run_requires_alpha_for_lf():
    vel = Velocity("normalized_greenshields")
    grid = build_grid(0.0, 1.0, 0.1, 0.05, 0.0, 0.1)  # alpha omitted
    weights = discretize_kernel(Kernel("constant", length=0.1), grid)
    with pytest.raises(ValueError):
        run(grid, weights, vel, _SAT_NONE, "lf", np.full(10, 0.5), t_final=0.1)


def test_run_zero_delay_equals_undelayed_convolution_loop():
    """h = 0 must reproduce a loop that reconvolves the current level."""
    vel = Velocity("normalized_greenshields")
    sat = Saturation("linear", rho_max=1.0)
    grid = build_grid(0.0, 1.0, 0.02, 0.005, 0.0, 0.1)
    weights = discretize_kernel(Kernel("linear_decreasing", length=0.1), grid)
    rng = np.random.default_rng(11)
    rho0 = rng.uniform(0.0, 1.0, grid.n_cells)

    rho = rho0.copy()
    for _ in range(40):
        v = convolved_speeds(rho, weights, vel, FREE_FLOW)
        rho = hw_step(rho, v, grid.lam, sat, FREE_FLOW)

    final = run(grid, weights, vel, sat, "hw", rho0, t_final=40 * grid.dt)
    assert np.array_equal(final, rho)


def test_run_constant_datum_all_snapshots_identical():
    vel = Velocity("greenshields", v_max=0.9, rho_max=1.7)
    sat = Saturation("linear", rho_max=1.7)
    grid = build_grid(0.0, 1.0, 0.02, 0.005, 0.02, 0.1, alpha=1.8)
    weights = discretize_kernel(Kernel("constant", length=0.1), grid)
    rho0 = np.full(grid.n_cells, 0.85)
    captured = []
    run(
        grid,
        weights,
        vel,
        sat,
        "lf",
        rho0,
        t_final=0.25,
        observer=lambda n, level, v: captured.append(level.copy()),
    )
    assert all(np.array_equal(level, rho0) for level in captured)
