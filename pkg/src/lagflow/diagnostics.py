"""Measured solution quantities and the theoretical bounds checked against them.

Measurements: L1/sup norms, total variation, L1 distances, discrete entropy
residuals.  Bounds: the TV growth estimate, the L1-in-time Lipschitz rate,
and the L1 stability estimate, all assembled from the model's derivative
bounds.  With

    G = 2 sup|v'| sup(omega) R (1 + R sup|f'|)
    H = R sup(omega) (6 sup|v''| J0 R + 2 sup|v'|)
    M = max{H, G}

the total variation of the numerical solution obeys

    TV(t) <= (2 e^{M (t - q tau)} - 1) (2 e^{M tau} - 1)^q TV(rho0),
    q = floor(t / tau),

with limit e^{2 M t} TV(rho0) as tau -> 0.  The time-Lipschitz rate is

    K = B * C(T, tau) * TV(rho0) + 2 R sup(omega) sup|v'| ||rho0||_1,

where C is the TV amplification factor at the horizon and B = alpha +
(1 + R sup|f'|) V for the Lax-Friedrichs scheme, B = V (1 + R sup|f'|)
for Hilliges-Weidlich.  Two solutions rho (delay tau1) and sigma (delay
tau2) satisfy

    ||rho(t) - sigma(t)||_1 <= e^{K1 t} (K3 ||rho0 - sigma0||_1
                                         + K2 |tau1 - tau2|),

with K1 = sup(omega) sup|v'| (1 + R sup|f'|) sup_t ||rho(t)||_BV
        + R (sup|v'| ||omega'||_1 + sup|v''| ||sigma0||_1 ||omega'||_inf J0),
K2 = K1 K T and K3 = 1 + K1 min{tau1, tau2}.

The amplification C and everything built on it grow like e^{M T} and
overflow double precision for sharp saturation (sup|f'| = 50 pushes M into
the thousands), so C and K are stored as logarithms; linear values are
exposed as properties and honestly become inf when too large, in which
case bound assertions pass vacuously.  CSV bound columns may therefore
contain inf, and nan marks a quantity that was not computed at that row.
"""

from __future__ import annotations

import math
from collections import deque
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .delay_state import FREE_FLOW
from .discretization import Grid, KernelWeights
from .model_functions import BoundSet, Saturation, Velocity
from .schemes import HILLIGES_WEIDLICH, LAX_FRIEDRICHS, extend3

#: Absolute tolerance for the discrete entropy inequality.
ENTROPY_TOL = 1e-10
#: Absolute slack for positivity / maximum-principle assertions.
LEVEL_TOL = 1e-12
#: Relative tolerance for mass conservation on periodic runs.
MASS_TOL = 1e-12
#: Absolute slack for the speed adjacent-difference bound.
SPEED_TOL = 1e-12


class InvariantViolation(RuntimeError):
    """A quantity left the region a proved estimate confines it to."""


class ConstantsUnavailable(ValueError):
    """Bound constants need sup|v''|, absent for non-smooth velocities."""


# ---------------------------------------------------------------------------
# measurements


def l1_norm(level: np.ndarray, dx: float) -> float:
    """dx * sum |rho_j|."""
    return dx * float(np.sum(np.abs(level)))


def sup_norm(level: np.ndarray) -> float:
    """max |rho_j|."""
    return float(np.max(np.abs(level)))


def l1_distance(a: np.ndarray, b: np.ndarray, dx: float) -> float:
    """dx * sum |a_j - b_j|."""
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    if a.shape != b.shape:
        raise ValueError("levels have different lengths")
    return dx * float(np.sum(np.abs(a - b)))


def total_variation(level: np.ndarray, boundary: str = FREE_FLOW) -> float:
    """Sum of |rho_{j+1} - rho_j| over edges.

    Free-flow counts interior edges only; periodic adds the wrap edge.
    """
    level = np.asarray(level, dtype=float)
    tv = float(np.sum(np.abs(np.diff(level))))
    if boundary != FREE_FLOW:
        tv += abs(float(level[0]) - float(level[-1]))
    return tv


# ---------------------------------------------------------------------------
# bound constants


def _log_two_exp_minus_one(x: float) -> float:
    """log(2 e^x - 1), stable for all x >= 0."""
    if x < 0:
        return math.log(2.0 * math.exp(x) - 1.0)
    return x + math.log(2.0 - math.exp(-x))


def log_tv_amplification(t: float, tau: float, rate: float) -> float:
    """log of (2 e^{rate (t - q tau)} - 1)(2 e^{rate tau} - 1)^q, q = floor(t/tau).

    The tau = 0 limit is 2 rate t.  The expression is continuous across
    the window seams t = q tau, so float jitter in the floor is harmless.
    """
    if t < 0 or tau < 0:
        raise ValueError("times must be non-negative")
    if tau == 0.0:
        return 2.0 * rate * t
    q = math.floor(t / tau)
    return _log_two_exp_minus_one(rate * (t - q * tau)) + q * _log_two_exp_minus_one(
        rate * tau
    )


def tv_bound(t: float, tau: float, rate: float, tv0: float) -> float:
    """Total-variation ceiling at time t; inf when the factor overflows."""
    if tv0 == 0.0:
        return 0.0
    log_b = log_tv_amplification(t, tau, rate) + math.log(tv0)
    return math.exp(log_b) if log_b < 709.0 else math.inf


@dataclass(frozen=True)
class BoundConstants:
    """Growth rates and amplification factors of one run's estimates.

    tv_rate_current / tv_rate_lagged are the TV growth rates G and H fed by
    the current and the lagged level; tv_rate is their maximum M.  The
    amplification C and the L1-in-time rate K live in log space (see the
    module docstring).
    """

    tv_rate_current: float
    tv_rate_lagged: float
    tv_rate: float
    log_tv_amplification_at_horizon: float
    log_l1_time_rate: float
    horizon: float
    tau: float
    tv0: float
    rho0_l1: float

    @property
    def tv_amplification(self) -> float:
        x = self.log_tv_amplification_at_horizon
        return math.exp(x) if x < 709.0 else math.inf

    @property
    def l1_time_rate(self) -> float:
        x = self.log_l1_time_rate
        if x == -math.inf:
            return 0.0
        return math.exp(x) if x < 709.0 else math.inf

    def tv_bound_at(self, t: float) -> float:
        return tv_bound(t, self.tau, self.tv_rate, self.tv0)


def bound_constants(
    bounds: BoundSet,
    alpha: float | None,
    horizon: float,
    tau: float,
    tv0: float,
    rho0_l1: float,
    scheme: str,
) -> BoundConstants:
    """Assemble the growth rates and log-space factors for one run."""
    if not bounds.smooth:
        raise ConstantsUnavailable(
            "bound constants need sup|v''|; the chosen velocity is not smooth"
        )
    r = bounds.rho_max
    g = 2.0 * bounds.v_prime * bounds.omega_sup * r * (1.0 + r * bounds.f_prime)
    h = r * bounds.omega_sup * (
        6.0 * bounds.v_dprime * bounds.omega_j0 * r + 2.0 * bounds.v_prime
    )
    m = max(g, h)
    log_c = log_tv_amplification(horizon, tau, m)
    if scheme == LAX_FRIEDRICHS:
        if alpha is None:
            raise ValueError("the Lax-Friedrichs rate needs alpha")
        bracket = alpha + (1.0 + r * bounds.f_prime) * bounds.v_max
    elif scheme == HILLIGES_WEIDLICH:
        bracket = bounds.v_max * (1.0 + r * bounds.f_prime)
    else:
        raise ValueError(f"unknown scheme {scheme!r}")
    # K = bracket * C * tv0 + 2 R sup(omega) sup|v'| ||rho0||_1, as a log-sum.
    terms = []
    if bracket * tv0 > 0.0:
        terms.append(math.log(bracket * tv0) + log_c)
    tail = 2.0 * r * bounds.omega_sup * bounds.v_prime * rho0_l1
    if tail > 0.0:
        terms.append(math.log(tail))
    if not terms:
        log_k = -math.inf
    elif len(terms) == 1:
        log_k = terms[0]
    else:
        log_k = float(np.logaddexp(terms[0], terms[1]))
    return BoundConstants(
        tv_rate_current=g,
        tv_rate_lagged=h,
        tv_rate=m,
        log_tv_amplification_at_horizon=log_c,
        log_l1_time_rate=log_k,
        horizon=horizon,
        tau=tau,
        tv0=tv0,
        rho0_l1=rho0_l1,
    )


# ---------------------------------------------------------------------------
# stability constants


@dataclass(frozen=True)
class StabilityConstants:
    """Ingredients of the two-solution L1 estimate.

    rate is K1; log_delay_weight holds log K2 = log(K1 K T); datum_weight
    is K3 = 1 + K1 min{tau1, tau2}.
    """

    rate: float
    log_delay_weight: float
    datum_weight: float
    tau1: float
    tau2: float

    @property
    def delay_weight(self) -> float:
        x = self.log_delay_weight
        if x == -math.inf:
            return 0.0
        return math.exp(x) if x < 709.0 else math.inf


def stability_constants(
    bounds: BoundSet,
    sup_bv: float,
    sigma0_l1: float,
    tau1: float,
    tau2: float,
    log_l1_time_rate: float,
    horizon: float,
) -> StabilityConstants:
    """K1, K2, K3 from the derivative bounds and one run's measured sup BV."""
    if not bounds.smooth:
        raise ConstantsUnavailable(
            "stability constants need sup|v''|; the chosen velocity is not smooth"
        )
    r = bounds.rho_max
    k1 = bounds.omega_sup * bounds.v_prime * (1.0 + r * bounds.f_prime) * sup_bv + r * (
        bounds.v_prime * bounds.omega_d1_l1
        + bounds.v_dprime * sigma0_l1 * bounds.omega_d1_sup * bounds.omega_j0
    )
    if k1 > 0.0 and horizon > 0.0:
        log_k2 = math.log(k1) + log_l1_time_rate + math.log(horizon)
    else:
        log_k2 = -math.inf
    k3 = 1.0 + k1 * min(tau1, tau2)
    return StabilityConstants(
        rate=k1,
        log_delay_weight=log_k2,
        datum_weight=k3,
        tau1=tau1,
        tau2=tau2,
    )


def stability_bound(consts: StabilityConstants, t: float, datum_distance: float) -> float:
    """e^{K1 t} (K3 d0 + K2 |tau1 - tau2|); inf when it overflows."""
    dtau = abs(consts.tau1 - consts.tau2)
    terms = []
    if datum_distance > 0.0:
        terms.append(math.log(consts.datum_weight * datum_distance))
    if dtau > 0.0 and consts.log_delay_weight > -math.inf:
        terms.append(consts.log_delay_weight + math.log(dtau))
    if not terms:
        return 0.0
    log_sum = terms[0] if len(terms) == 1 else float(np.logaddexp(terms[0], terms[1]))
    log_b = consts.rate * t + log_sum
    return math.exp(log_b) if log_b < 709.0 else math.inf


# ---------------------------------------------------------------------------
# discrete entropy residual


def default_kappas(rho_ceiling: float, level: np.ndarray | None = None) -> np.ndarray:
    """17 equispaced entropy constants in [0, R], plus the level's extrema.

    The residual is piecewise linear in kappa between sorted level values,
    so adding the data extrema pins the sample to the active range.
    """
    base = np.linspace(0.0, rho_ceiling, 17)
    if level is not None:
        base = np.concatenate([base, [float(np.min(level)), float(np.max(level))]])
    return np.unique(base)


def entropy_residual(
    rho: np.ndarray,
    rho_next: np.ndarray,
    v_lag: np.ndarray,
    lam: float,
    sat: Saturation,
    boundary: str,
    kappas: np.ndarray,
    scheme: str = LAX_FRIEDRICHS,
    alpha: float | None = None,
) -> float:
    """Largest discrete entropy production of one step; theory says <= 0.

    For each cell j and constant kappa the residual is

        |rho'_j - k| - |rho_j - k|
        + lam (Fk_{j+1/2}(rho_j, rho_j+1) - Fk_{j-1/2}(rho_j-1, rho_j))
        + correction_j,

    with the numerical entropy flux built from the scheme's interface flux
    G by the max/min composition

        Fk(u, w) = G(max(u,k), max(w,k)) - G(min(u,k), min(w,k)),

    G(u, w) = F(u) V_j / 2 + F(w) V_{j+1} / 2 - alpha (w - u) / 2 for the
    Lax-Friedrichs scheme with correction
    (lam/2) sgn(rho'_j - k) F(k) (V_{j+1} - V_{j-1}), and
    G(u, w) = u f(w) V_{j+1} for Hilliges-Weidlich with correction
    lam sgn(rho'_j - k) F(k) (V_{j+1} - V_j); F(rho) = rho f(rho).  The
    inequality is proved for Lax-Friedrichs; the Hilliges-Weidlich residual
    is reported for observation only.
    """
    rho = np.asarray(rho, dtype=float)
    rho_next = np.asarray(rho_next, dtype=float)
    kap = np.asarray(kappas, dtype=float)[:, None]
    r = extend3(rho, boundary)
    v = extend3(v_lag, boundary)
    u, w = r[:-1], r[1:]
    v_left, v_right = v[:-1], v[1:]
    u_hi, w_hi = np.maximum(u, kap), np.maximum(w, kap)
    u_lo, w_lo = np.minimum(u, kap), np.minimum(w, kap)
    if scheme == LAX_FRIEDRICHS:
        if alpha is None:
            raise ValueError("the Lax-Friedrichs entropy flux needs alpha")

        def g_edge(a, b):
            return 0.5 * (a * sat(a) * v_left + b * sat(b) * v_right) - 0.5 * alpha * (
                b - a
            )

        speed_gap = 0.5 * (v[2:] - v[:-2])
    elif scheme == HILLIGES_WEIDLICH:

        def g_edge(a, b):
            return a * sat(b) * v_right

        speed_gap = v[2:] - v[1:-1]
    else:
        raise ValueError(f"unknown scheme {scheme!r}")
    flux_k = g_edge(u_hi, w_hi) - g_edge(u_lo, w_lo)
    f_kap = kap * sat(kap)
    residual = (
        np.abs(rho_next - kap)
        - np.abs(rho - kap)
        + lam * (flux_k[:, 1:] - flux_k[:, :-1])
        + lam * np.sign(rho_next - kap) * f_kap * speed_gap
    )
    return float(np.max(residual))


# ---------------------------------------------------------------------------
# time-Lipschitz check


def lipschitz_in_time_check(
    snapshots: Sequence[tuple[float, np.ndarray]],
    l1_time_rate: float,
    dx: float,
    tol: float = ENTROPY_TOL,
) -> float:
    """Assert ||rho(t_b) - rho(t_a)||_1 <= K (t_b - t_a) for all pairs.

    Returns the worst margin distance - K dt (negative when comfortably
    inside the bound, -inf if every pair is at zero distance and K is
    infinite); raises InvariantViolation when any pair exceeds K dt + tol.
    """
    worst = -math.inf
    for i in range(len(snapshots)):
        t_a, lev_a = snapshots[i]
        for t_b, lev_b in snapshots[i + 1 :]:
            dist = l1_distance(lev_b, lev_a, dx)
            gap = abs(t_b - t_a)
            ceiling = 0.0 if gap == 0.0 else l1_time_rate * gap
            if dist > ceiling + tol:
                raise InvariantViolation(
                    f"L1 time-Lipschitz bound broken between t={t_a} and t={t_b}: "
                    f"distance {dist} exceeds {ceiling}"
                )
            margin = dist - ceiling
            if margin > worst:
                worst = margin
    return worst


# ---------------------------------------------------------------------------
# per-run collector


@dataclass(frozen=True)
class DiagnosticsRecord:
    """One diagnostics CSV row: level statistics at time t.

    entropy_residual_max is the largest residual of the step that produced
    this level (nan at t = 0 or when the residual was not computed).
    tv_ceiling is the theoretical ceiling for tv (inf when it overflows,
    nan when the constants are unavailable).
    """

    t: float
    l1: float
    linf: float
    minimum: float
    maximum: float
    tv: float
    tv_ceiling: float
    entropy_residual_max: float


@dataclass(frozen=True)
class CheckPolicy:
    """Which invariants a run asserts (all proved ones default on).

    rho_ceiling is R when the maximum principle applies (saturation present
    and datum inside [0, R]) and None otherwise; positivity similarly
    applies under its lemma's hypotheses.  entropy_assert enables the
    per-step Lax-Friedrichs entropy check; entropy_watch computes the
    residual at record rows without asserting (the Hilliges-Weidlich mode).
    conserve_mass asserts the periodic-run L1 drift.
    """

    positivity: bool = True
    rho_ceiling: float | None = None
    conserve_mass: bool = False
    tv_ceiling: bool = True
    entropy_assert: bool = False
    entropy_watch: bool = False


class DiagnosticsCollector:
    """Observer for schemes.run: asserts invariants, accumulates records.

    At every step it checks the speed adjacent-difference bound, positivity,
    the maximum principle, mass conservation, and the TV ceiling (as policy
    dictates), plus the entropy residual when asserting.  Records are kept
    at step 0, every ``stride`` steps, and the final step.  Running maxima
    (sup TV, sup BV norm, worst entropy residual, mass drift) and the
    space-time variation accumulators are exposed as attributes.
    """

    def __init__(
        self,
        grid: Grid,
        weights: KernelWeights,
        vel: Velocity,
        sat: Saturation,
        scheme: str,
        boundary: str,
        constants: BoundConstants | None,
        policy: CheckPolicy,
        stride: int,
        n_final: int,
        kappas: np.ndarray | None = None,
    ) -> None:
        if stride < 1:
            raise ValueError("stride must be at least 1")
        self.grid = grid
        self.weights = weights
        self.vel = vel
        self.sat = sat
        self.scheme = scheme
        self.boundary = boundary
        self.constants = constants
        self.policy = policy
        self.stride = stride
        self.n_final = n_final
        self.kappas = kappas
        self.records: list[DiagnosticsRecord] = []
        self.sup_tv = 0.0
        self.sup_bv = 0.0
        self.sup_density = -math.inf
        self.min_density = math.inf
        self.entropy_max = -math.inf
        self.mass_drift_max = 0.0
        self.space_time_tv_space = 0.0
        self.space_time_tv_time = 0.0
        self._mass0: float | None = None
        self._w_max = float(np.max(weights.w))
        self._lag_sup: deque = deque(maxlen=grid.delay_steps + 1)
        self._prev_level: np.ndarray | None = None
        self._prev_speeds: np.ndarray | None = None
        self._prev_tv = 0.0

    def _check_speeds(self, v_lag: np.ndarray, rho_sup_lagged: float, n: int) -> None:
        if v_lag.size < 2:
            return
        reach = max(self.vel.rho_max, rho_sup_lagged)
        ceiling = 2.0 * self.vel.d1_sup * self._w_max * reach * self.grid.dx
        gap = float(np.max(np.abs(np.diff(v_lag))))
        if gap > ceiling + SPEED_TOL:
            raise InvariantViolation(
                f"step {n}: speed increment {gap} exceeds bound {ceiling}"
            )

    def __call__(self, n: int, level: np.ndarray, v_lag: np.ndarray) -> None:
        t = n * self.grid.dt
        level_sup = sup_norm(level)
        if n == 0:
            self._lag_sup.extend([level_sup] * (self.grid.delay_steps + 1))
        else:
            self._lag_sup.append(level_sup)
        self._check_speeds(v_lag, self._lag_sup[0], n)

        lo = float(np.min(level))
        hi = float(np.max(level))
        self.sup_density = max(self.sup_density, hi)
        self.min_density = min(self.min_density, lo)
        if self.policy.positivity and lo < -LEVEL_TOL:
            raise InvariantViolation(f"step {n}: negative density {lo}")
        ceiling = self.policy.rho_ceiling
        if ceiling is not None and hi > ceiling + LEVEL_TOL:
            raise InvariantViolation(
                f"step {n}: density {hi} exceeds the ceiling {ceiling}"
            )

        mass = self.grid.dx * float(np.sum(level))
        if self._mass0 is None:
            self._mass0 = mass
        elif self.policy.conserve_mass:
            scale = max(abs(self._mass0), 1.0)
            drift = abs(mass - self._mass0) / scale
            self.mass_drift_max = max(self.mass_drift_max, drift)
            if drift > MASS_TOL:
                raise InvariantViolation(f"step {n}: relative mass drift {drift}")

        tv = total_variation(level, self.boundary)
        l1 = l1_norm(level, self.grid.dx)
        self.sup_tv = max(self.sup_tv, tv)
        self.sup_bv = max(self.sup_bv, tv + l1)

        if self.policy.tv_ceiling and self.constants is not None:
            bound = self.constants.tv_bound_at(t)
            if tv > bound * (1.0 + 1e-12) + 1e-12:
                raise InvariantViolation(
                    f"step {n}: total variation {tv} exceeds the ceiling {bound}"
                )

        is_row = n == 0 or n == self.n_final or n % self.stride == 0
        residual = math.nan
        if n > 0:
            self.space_time_tv_time += l1_distance(
                level, self._prev_level, self.grid.dx
            )
            self.space_time_tv_space += self.grid.dt * self._prev_tv
            want = self.policy.entropy_assert or (self.policy.entropy_watch and is_row)
            if want:
                kappas = self.kappas
                if kappas is None:
                    kappas = default_kappas(self.vel.rho_max, self._prev_level)
                residual = entropy_residual(
                    self._prev_level,
                    level,
                    self._prev_speeds,
                    self.grid.lam,
                    self.sat,
                    self.boundary,
                    kappas,
                    scheme=self.scheme,
                    alpha=self.grid.alpha,
                )
                self.entropy_max = max(self.entropy_max, residual)
                if self.policy.entropy_assert and residual > ENTROPY_TOL:
                    raise InvariantViolation(
                        f"step {n}: entropy residual {residual} above {ENTROPY_TOL}"
                    )

        if is_row:
            if self.constants is not None:
                tv_ceiling_val = self.constants.tv_bound_at(t)
            else:
                tv_ceiling_val = math.nan
            self.records.append(
                DiagnosticsRecord(
                    t=t,
                    l1=l1,
                    linf=level_sup,
                    minimum=lo,
                    maximum=hi,
                    tv=tv,
                    tv_ceiling=tv_ceiling_val,
                    entropy_residual_max=residual,
                )
            )

        self._prev_level = level
        self._prev_speeds = v_lag
        self._prev_tv = tv
