"""Experiment runners: resolution, artifacts, determinism, study reports."""

import dataclasses
import math

import numpy as np
import pytest

from lagflow.model_functions import Kernel, Saturation, Velocity
from lagflow.runners import (
    compare_schemes,
    default_policy,
    grid_refine,
    resolve_scenario,
    restrict_to_coarse,
    run_scenario,
    saturation_study,
    simulate,
    stability_experiment,
    tau_sweep,
)
from lagflow.scenario import Scenario, ScenarioError


def _tiny(**overrides) -> Scenario:
    base = Scenario(
        x_min=0.0,
        x_max=1.0,
        dx=0.02,
        t_final=0.1,
        boundary="free_flow",
        velocity=Velocity("normalized_greenshields"),
        saturation=Saturation("linear", rho_max=1.0),
        kernel=Kernel("constant", length=0.1),
        tau=0.02,
        scheme="hw",
        safety=1.0,
        datum_kind="box",
        datum_params={"height": 0.75, "a": 0.3, "b": 0.6},
        snapshots=(0.05, 0.1),
        out_dir="out",
    )
    return dataclasses.replace(base, **overrides)


def test_resolve_fits_delay_and_keeps_cfl():
    r = resolve_scenario(_tiny())
    # hw time step: dx / (V (1 + R |f'|)) = 0.02 / 2 = 0.01, tau = 2 steps
    assert r.grid.dt == pytest.approx(0.01)
    assert r.grid.delay_steps == 2
    assert r.n_steps == 10
    assert r.grid.alpha is None
    assert r.constants is not None
    assert r.policy.positivity and r.policy.tv_ceiling


def test_resolve_lf_carries_alpha():
    r = resolve_scenario(_tiny(scheme="lf"))
    assert r.grid.alpha == pytest.approx(2.0)
    assert r.grid.dt == pytest.approx(0.005)
    assert r.policy.entropy_assert


def test_default_policy_gates_on_hypotheses():
    vel = Velocity("normalized_greenshields")
    sat_none = Saturation("none")
    sat = Saturation("linear", rho_max=1.0)
    cropped = Velocity("cropped")
    p = default_policy(vel, sat_none, "hw", "free_flow", thorough=True)
    assert not p.positivity and p.rho_ceiling is None and not p.tv_ceiling
    p = default_policy(vel, sat, "lf", "free_flow", thorough=True)
    assert p.entropy_assert and not p.entropy_watch
    p = default_policy(vel, sat, "lf", "free_flow", thorough=False)
    assert not p.entropy_assert and p.entropy_watch
    p = default_policy(cropped, sat, "lf", "periodic", thorough=True)
    assert p.conserve_mass and not p.tv_ceiling and not p.entropy_assert
    assert not p.entropy_watch


def test_simulate_captures_snapshots_at_requested_times():
    r = resolve_scenario(_tiny())
    sim = simulate(r, (0.0, 0.05, 0.1))
    assert [t for t, _, _ in sim.snapshots] == [0.0, 0.05, 0.1]
    assert [ta for _, ta, _ in sim.snapshots] == pytest.approx([0.0, 0.05, 0.1])
    assert np.array_equal(sim.snapshots[0][2], r.rho0)
    assert sim.final_time == pytest.approx(0.1)
    assert np.array_equal(sim.snapshots[-1][2], sim.final_level)


def test_run_scenario_writes_contracted_files(tmp_path):
    out = tmp_path / "case"
    run_scenario(_tiny(), out)
    names = {p.name for p in out.iterdir()}
    assert names == {
        "snapshot_t0.05.csv",
        "snapshot_t0.1.csv",
        "diagnostics.csv",
        "manifest.txt",
    }
    diag = (out / "diagnostics.csv").read_text().splitlines()
    assert diag[0] == "t,l1,linf,min,max,tv,tv_bound,entropy_residual_max"
    snap = (out / "snapshot_t0.1.csv").read_text().splitlines()
    assert snap[0] == "x,rho"
    assert len(snap) == 51
    manifest = (out / "manifest.txt").read_text()
    assert "dt = 0.01" in manifest
    assert "delay_steps = 2" in manifest
    assert "tv_rate" in manifest


def test_run_scenario_is_deterministic(tmp_path):
    a, b = tmp_path / "a", tmp_path / "b"
    run_scenario(_tiny(), a)
    run_scenario(_tiny(), b)
    for name in ("diagnostics.csv", "snapshot_t0.1.csv", "manifest.txt"):
        assert (a / name).read_bytes() == (b / name).read_bytes()


def test_restrict_to_coarse_averages_groups():
    fine = np.array([1.0, 3.0, 2.0, 4.0])
    assert restrict_to_coarse(fine, 2).tolist() == [2.0, 3.0]
    with pytest.raises(ValueError):
        restrict_to_coarse(fine, 3)


def test_compare_schemes_constant_datum_gives_zero_distances():
    s = _tiny(datum_kind="constant", datum_params={"value": 0.5})
    report = compare_schemes(s, ref_dx=0.01)
    assert report["l1_lf_vs_ref"] == pytest.approx(0.0, abs=1e-14)
    assert report["l1_hw_vs_ref"] == pytest.approx(0.0, abs=1e-14)
    assert report["refinement_factor"] == 2


def test_compare_schemes_rejects_non_divisor_reference():
    with pytest.raises(ScenarioError):
        compare_schemes(_tiny(), ref_dx=0.015)


def test_tau_sweep_inserts_zero_delay_reference(tmp_path):
    report = tau_sweep(_tiny(), [0.04, 0.02], tmp_path)
    assert report["taus"] == (0.0, 0.02, 0.04)
    assert report["distance_to_zero_delay"][0.0] == 0.0
    assert (tmp_path / "distances.csv").is_file()
    assert (tmp_path / "tv_tau0.02.csv").is_file()
    dist = report["distance_to_zero_delay"]
    assert dist[0.04] >= dist[0.02] >= 0.0


def test_grid_refine_constant_datum_all_differences_zero():
    s = _tiny(datum_kind="constant", datum_params={"value": 0.5})
    report = grid_refine(s, levels=3)
    assert report["successive_l1_differences"] == pytest.approx((0.0, 0.0), abs=1e-14)
    assert report["max_density_per_level"] == pytest.approx((0.5, 0.5, 0.5))
    with pytest.raises(ScenarioError):
        grid_refine(s, levels=1)


def test_stability_identical_runs_have_zero_distance():
    s = _tiny()
    report = stability_experiment(s, tau2=s.tau)
    assert report["datum_distance"] == 0.0
    for _t, measured, bound in report["rows"]:
        assert measured == 0.0
        assert bound >= 0.0


def test_stability_perturbed_datum_obeys_bound(tmp_path):
    s = _tiny()
    report = stability_experiment(
        s,
        tau2=s.tau,
        perturbation=("box", {"height": 0.74, "a": 0.3, "b": 0.6}),
        out_dir=tmp_path,
    )
    assert report["datum_distance"] == pytest.approx(0.01 * 0.3, rel=1e-9)
    for _t, measured, bound in report["rows"]:
        assert measured <= bound
    assert (tmp_path / "stability.csv").is_file()
    assert (tmp_path / "report.txt").is_file()


def test_stability_rejects_perturbation_outside_capacity():
    with pytest.raises(ScenarioError):
        stability_experiment(
            _tiny(), tau2=0.02, perturbation=("box", {"height": 1.4, "a": 0.3, "b": 0.6})
        )


def test_saturation_study_reports_three_variants(tmp_path):
    s = _tiny(datum_kind="osc_sin", datum_params={"shift": 0.4}, tau=0.04)
    report = saturation_study(s, tmp_path)
    assert set(report["variants"]) == {"none", "linear", "exponential"}
    assert not report["variants"]["linear"]["exceeds_ceiling"]
    assert not report["variants"]["exponential"]["exceeds_ceiling"]
    assert (tmp_path / "saturation.csv").is_file()
    assert (tmp_path / "final_none.csv").is_file()


def test_constant_datum_snapshots_are_all_identical(tmp_path):
    s = _tiny(datum_kind="constant", datum_params={"value": 0.5})
    out = run_scenario(s, tmp_path / "const")
    sim = out["result"]
    for _t, _ta, level in sim.snapshots:
        assert np.array_equal(level, out["resolved"].rho0)


def test_periodic_run_asserts_mass_conservation(tmp_path):
    s = _tiny(boundary="periodic")
    r = resolve_scenario(s)
    assert r.policy.conserve_mass
    sim = simulate(r)
    assert sim.collector.mass_drift_max <= 1e-12


def test_unsaturated_run_disables_ceiling_checks():
    s = _tiny(saturation=Saturation("none"), tau=0.0)
    r = resolve_scenario(s)
    assert not r.policy.positivity
    assert r.policy.rho_ceiling is None
    simulate(r)  # must not raise even though no ceiling is enforced
