"""Built-in initial density profiles.

Each profile is a vectorized callable that also reports its jump/kink
locations (``breakpoints``, used to split quadrature cells during
projection) and its exact value range (``value_range``, used to validate
the datum against the density ceiling R before a run).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

RIEMANN_UP = "riemann_up"
RIEMANN_DOWN = "riemann_down"
RIEMANN_SMALL = "riemann_small"
BOX = "box"
OSC_SIN = "osc_sin"
OSC_COS = "osc_cos"
CONSTANT = "constant"

DATUM_KINDS = (
    RIEMANN_UP,
    RIEMANN_DOWN,
    RIEMANN_SMALL,
    BOX,
    OSC_SIN,
    OSC_COS,
    CONSTANT,
)

#: Support of the oscillatory sine profile; one full period of sin(8 pi x).
_SIN_SUPPORT = (11.0 / 40.0, 21.0 / 40.0)
#: Support of the oscillatory cosine profile; cos(8 pi (x - 2/5)) >= 0 here.
_COS_SUPPORT = (27.0 / 80.0, 37.0 / 80.0)
_COS_SHIFT = 2.0 / 5.0


@dataclass(frozen=True)
class Riemann:
    """Two-state profile with a single jump.

    ``interface_takes_right`` selects which side owns the point
    x = position: True evaluates the right state there, False the left
    state.  Cell averages are unaffected either way.
    """

    left: float
    right: float
    position: float
    interface_takes_right: bool = True

    def __call__(self, x: np.ndarray) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        if self.interface_takes_right:
            return np.where(x < self.position, self.left, self.right)
        return np.where(x <= self.position, self.left, self.right)

    def breakpoints(self) -> list[float]:
        return [self.position]

    def value_range(self) -> tuple[float, float]:
        lo = min(self.left, self.right)
        return lo, max(self.left, self.right)


@dataclass(frozen=True)
class Box:
    """height * indicator([a, b]) on a zero background."""

    height: float
    a: float
    b: float

    def __post_init__(self) -> None:
        if self.b <= self.a:
            raise ValueError("box needs a < b")

    def __call__(self, x: np.ndarray) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        inside = (x >= self.a) & (x <= self.b)
        return np.where(inside, self.height, 0.0)

    def breakpoints(self) -> list[float]:
        return [self.a, self.b]

    def value_range(self) -> tuple[float, float]:
        return min(0.0, self.height), max(0.0, self.height)


@dataclass(frozen=True)
class OscSin:
    """Sine-bump perturbation of the constant state 1/2.

    1/2 + [3/16 sin(8 pi (x - c)) - 1/16 sin(24 pi (x - c))] on
    [11/40, 21/40], extended by 1/2 outside.  The support spans one full
    period of the base harmonic, so the values cover [1/4, 3/4] for every
    shift c; the profile is continuous exactly when c = 2/5.
    """

    shift: float = 0.5

    def __call__(self, x: np.ndarray) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        theta = 8.0 * np.pi * (x - self.shift)
        bump = (3.0 / 16.0) * np.sin(theta) - (1.0 / 16.0) * np.sin(3.0 * theta)
        lo, hi = _SIN_SUPPORT
        inside = (x >= lo) & (x <= hi)
        return 0.5 + np.where(inside, bump, 0.0)

    def breakpoints(self) -> list[float]:
        return list(_SIN_SUPPORT)

    def value_range(self) -> tuple[float, float]:
        return 0.25, 0.75


@dataclass(frozen=True)
class OscCos:
    """Cosine-bump perturbation of a constant state.

    mean + [3/8 cos(8 pi (x - 2/5)) + 1/8 cos(24 pi (x - 2/5))] on
    [27/80, 37/80], extended by mean outside.  The base harmonic stays
    in the quarter-periods where its cosine is non-negative, so the bump
    lies in [0, 1/2] and the profile is continuous at the support edges.
    """

    mean: float = 0.25

    def __call__(self, x: np.ndarray) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        theta = 8.0 * np.pi * (x - _COS_SHIFT)
        bump = (3.0 / 8.0) * np.cos(theta) + (1.0 / 8.0) * np.cos(3.0 * theta)
        lo, hi = _COS_SUPPORT
        inside = (x >= lo) & (x <= hi)
        return self.mean + np.where(inside, bump, 0.0)

    def breakpoints(self) -> list[float]:
        return list(_COS_SUPPORT)

    def value_range(self) -> tuple[float, float]:
        return self.mean, self.mean + 0.5


@dataclass(frozen=True)
class Constant:
    """Spatially uniform profile."""

    value: float

    def __call__(self, x: np.ndarray) -> np.ndarray:
        return np.full_like(np.asarray(x, dtype=float), self.value)

    def breakpoints(self) -> list[float]:
        return []

    def value_range(self) -> tuple[float, float]:
        return self.value, self.value


def make_datum(kind: str, **params):
    """Construct a profile by kind name.

    riemann_up      left=0.3, right=1.5, position=0.5 (jump point on the right)
    riemann_down    left=1.5, right=0.3, position=0.5 (jump point on the left)
    riemann_small   left=0.25, right=0.5, position=0.2 (jump point on the left)
    box             height, a, b
    osc_sin         shift (default 0.5)
    osc_cos         mean (default 0.25)
    constant        value
    """
    if kind == RIEMANN_UP:
        merged = {"left": 0.3, "right": 1.5, "position": 0.5, **params}
        return Riemann(interface_takes_right=True, **merged)
    if kind == RIEMANN_DOWN:
        merged = {"left": 1.5, "right": 0.3, "position": 0.5, **params}
        return Riemann(interface_takes_right=False, **merged)
    if kind == RIEMANN_SMALL:
        merged = {"left": 0.25, "right": 0.5, "position": 0.2, **params}
        return Riemann(interface_takes_right=False, **merged)
    if kind == BOX:
        return Box(**params)
    if kind == OSC_SIN:
        return OscSin(**params)
    if kind == OSC_COS:
        return OscCos(**params)
    if kind == CONSTANT:
        return Constant(**params)
    raise ValueError(f"unknown initial-datum kind {kind!r}")
