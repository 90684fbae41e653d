"""Experiment configuration: flat key = value files with sections.

A scenario file fully describes one simulation::

    [domain]
    x_min = 0.0
    x_max = 1.0
    dx = 0.005
    t_final = 0.5
    boundary = free_flow          ; optional: free_flow (default) | periodic

    [model]
    velocity = greenshields       ; greenshields | normalized_greenshields | cropped
    v_max = 0.9                   ; greenshields only
    rho_max = 1.7                 ; greenshields only
    saturation = linear           ; none | linear | exponential
    eps = 0.02                    ; exponential only
    kernel = constant             ; constant | linear_decreasing
    kernel_length = 0.015
    tau = 0.01

    [scheme]
    kind = hw                     ; lf | hw
    safety = 1.0                  ; optional, in (0, 1]

    [datum]
    kind = riemann_up             ; see initial_data.make_datum
    ; kind-specific keys: left/right/position, height/a/b, shift, mean, value

    [output]                      ; optional section
    directory = out
    snapshots = 0.25, 0.5         ; times in [0, t_final]; default: t_final
    stride = 100                  ; diagnostics row spacing; default: automatic

Unknown sections or keys are rejected by name, as are missing required
keys, a kernel length that is not a whole number of cells, and datum
values outside [0, rho_max].
"""

from __future__ import annotations

import configparser
from dataclasses import dataclass, field
from pathlib import Path

from . import initial_data
from .delay_state import BOUNDARY_KINDS, FREE_FLOW
from .model_functions import (
    GREENSHIELDS,
    KERNEL_KINDS,
    SAT_EXPONENTIAL,
    SATURATION_KINDS,
    VELOCITY_KINDS,
    Kernel,
    Saturation,
    Velocity,
)
from .schemes import SCHEME_KINDS

_REL_TOL_CELLS = 1e-9


class ScenarioError(ValueError):
    """Invalid or inconsistent scenario configuration."""


_DATUM_KEYS: dict[str, tuple[tuple[str, ...], tuple[str, ...]]] = {
    # kind -> (required keys, optional keys)
    initial_data.RIEMANN_UP: ((), ("left", "right", "position")),
    initial_data.RIEMANN_DOWN: ((), ("left", "right", "position")),
    initial_data.RIEMANN_SMALL: ((), ("left", "right", "position")),
    initial_data.BOX: (("height", "a", "b"), ()),
    initial_data.OSC_SIN: ((), ("shift",)),
    initial_data.OSC_COS: ((), ("mean",)),
    initial_data.CONSTANT: (("value",), ()),
}


@dataclass(frozen=True)
class Scenario:
    """A fully validated experiment description."""

    x_min: float
    x_max: float
    dx: float
    t_final: float
    boundary: str
    velocity: Velocity
    saturation: Saturation
    kernel: Kernel
    tau: float
    scheme: str
    safety: float
    datum_kind: str
    datum_params: dict = field(default_factory=dict)
    snapshots: tuple = ()
    out_dir: str = "out"
    stride: int | None = None

    def make_datum(self):
        return initial_data.make_datum(self.datum_kind, **self.datum_params)


def _parse_float(section: str, key: str, raw: str) -> float:
    try:
        return float(raw)
    except ValueError as exc:
        raise ScenarioError(f"[{section}] {key}: not a number: {raw!r}") from exc


def _parse_int(section: str, key: str, raw: str) -> int:
    try:
        return int(raw)
    except ValueError as exc:
        raise ScenarioError(f"[{section}] {key}: not an integer: {raw!r}") from exc


def _take(
    sections: dict,
    name: str,
    required: tuple[str, ...],
    optional: tuple[str, ...],
) -> dict[str, str]:
    if name not in sections:
        if required:
            raise ScenarioError(f"missing section [{name}]")
        return {}
    body = sections[name]
    for key in body:
        if key not in required and key not in optional:
            raise ScenarioError(f"[{name}] unknown key {key!r}")
    for key in required:
        if key not in body:
            raise ScenarioError(f"[{name}] missing key {key!r}")
    return body


def scenario_from_sections(sections: dict) -> Scenario:
    """Validate a {section: {key: value-string}} mapping into a Scenario."""
    known = {"domain", "model", "scheme", "datum", "output"}
    for name in sections:
        if name not in known:
            raise ScenarioError(f"unknown section [{name}]")

    dom = _take(sections, "domain", ("x_min", "x_max", "dx", "t_final"), ("boundary",))
    x_min = _parse_float("domain", "x_min", dom["x_min"])
    x_max = _parse_float("domain", "x_max", dom["x_max"])
    dx = _parse_float("domain", "dx", dom["dx"])
    t_final = _parse_float("domain", "t_final", dom["t_final"])
    boundary = dom.get("boundary", FREE_FLOW)
    if x_max <= x_min:
        raise ScenarioError("[domain] x_max must exceed x_min")
    if dx <= 0:
        raise ScenarioError("[domain] dx must be positive")
    if t_final < 0:
        raise ScenarioError("[domain] t_final must be non-negative")
    if boundary not in BOUNDARY_KINDS:
        raise ScenarioError(f"[domain] boundary: unknown kind {boundary!r}")
    span = x_max - x_min
    cells = span / dx
    if abs(round(cells) - cells) > _REL_TOL_CELLS * max(1.0, cells):
        raise ScenarioError("[domain] dx must divide the domain length")

    mod = _take(
        sections,
        "model",
        ("velocity", "saturation", "kernel", "kernel_length", "tau"),
        ("v_max", "rho_max", "eps"),
    )
    vel_kind = mod["velocity"]
    if vel_kind not in VELOCITY_KINDS:
        raise ScenarioError(f"[model] velocity: unknown kind {vel_kind!r}")
    if vel_kind == GREENSHIELDS:
        if "v_max" not in mod or "rho_max" not in mod:
            raise ScenarioError("[model] greenshields needs v_max and rho_max")
        velocity = Velocity(
            vel_kind,
            v_max=_parse_float("model", "v_max", mod["v_max"]),
            rho_max=_parse_float("model", "rho_max", mod["rho_max"]),
        )
    else:
        if "v_max" in mod or "rho_max" in mod:
            raise ScenarioError(f"[model] {vel_kind} fixes v_max = rho_max = 1")
        velocity = Velocity(vel_kind)

    sat_kind = mod["saturation"]
    if sat_kind not in SATURATION_KINDS:
        raise ScenarioError(f"[model] saturation: unknown kind {sat_kind!r}")
    if sat_kind == SAT_EXPONENTIAL:
        if "eps" not in mod:
            raise ScenarioError("[model] exponential saturation needs eps")
        saturation = Saturation(
            sat_kind,
            rho_max=velocity.rho_max,
            eps=_parse_float("model", "eps", mod["eps"]),
        )
    else:
        if "eps" in mod:
            raise ScenarioError("[model] eps only applies to exponential saturation")
        saturation = Saturation(sat_kind, rho_max=velocity.rho_max)

    kern_kind = mod["kernel"]
    if kern_kind not in KERNEL_KINDS:
        raise ScenarioError(f"[model] kernel: unknown kind {kern_kind!r}")
    length = _parse_float("model", "kernel_length", mod["kernel_length"])
    if length <= 0:
        raise ScenarioError("[model] kernel_length must be positive")
    ratio = length / dx
    if abs(round(ratio) - ratio) > _REL_TOL_CELLS * max(1.0, ratio) or round(ratio) < 1:
        raise ScenarioError(
            "[model] kernel_length must be a whole positive number of cells"
        )
    kernel = Kernel(kern_kind, length=length)

    tau = _parse_float("model", "tau", mod["tau"])
    if tau < 0:
        raise ScenarioError("[model] tau must be non-negative")

    sch = _take(sections, "scheme", ("kind",), ("safety",))
    scheme = sch["kind"]
    if scheme not in SCHEME_KINDS:
        raise ScenarioError(f"[scheme] kind: unknown scheme {scheme!r}")
    safety = _parse_float("scheme", "safety", sch.get("safety", "1.0"))
    if not 0.0 < safety <= 1.0:
        raise ScenarioError("[scheme] safety must lie in (0, 1]")

    dat = sections.get("datum")
    if dat is None:
        raise ScenarioError("missing section [datum]")
    if "kind" not in dat:
        raise ScenarioError("[datum] missing key 'kind'")
    datum_kind = dat["kind"]
    if datum_kind not in _DATUM_KEYS:
        raise ScenarioError(f"[datum] kind: unknown datum {datum_kind!r}")
    required, optional = _DATUM_KEYS[datum_kind]
    for key in dat:
        if key != "kind" and key not in required and key not in optional:
            raise ScenarioError(f"[datum] unknown key {key!r} for {datum_kind}")
    for key in required:
        if key not in dat:
            raise ScenarioError(f"[datum] missing key {key!r} for {datum_kind}")
    datum_params = {
        key: _parse_float("datum", key, dat[key]) for key in dat if key != "kind"
    }
    try:
        datum = initial_data.make_datum(datum_kind, **datum_params)
    except ValueError as exc:
        raise ScenarioError(f"[datum] {exc}") from exc
    lo, hi = datum.value_range()
    if lo < 0.0 or hi > velocity.rho_max:
        raise ScenarioError(
            f"[datum] values span [{lo}, {hi}], outside [0, {velocity.rho_max}]"
        )

    out = _take(sections, "output", (), ("directory", "snapshots", "stride"))
    out_dir = out.get("directory", "out")
    if "snapshots" in out:
        snapshots = tuple(
            _parse_float("output", "snapshots", piece)
            for piece in out["snapshots"].replace(",", " ").split()
        )
    else:
        snapshots = (t_final,)
    for t in snapshots:
        if t < 0 or t > t_final:
            raise ScenarioError(f"[output] snapshots: time {t} outside [0, {t_final}]")
    stride = _parse_int("output", "stride", out["stride"]) if "stride" in out else None
    if stride is not None and stride < 1:
        raise ScenarioError("[output] stride must be at least 1")

    return Scenario(
        x_min=x_min,
        x_max=x_max,
        dx=dx,
        t_final=t_final,
        boundary=boundary,
        velocity=velocity,
        saturation=saturation,
        kernel=kernel,
        tau=tau,
        scheme=scheme,
        safety=safety,
        datum_kind=datum_kind,
        datum_params=datum_params,
        snapshots=snapshots,
        out_dir=out_dir,
        stride=stride,
    )


def load_scenario(path: str | Path) -> Scenario:
    """Parse and validate a scenario file."""
    path = Path(path)
    if not path.is_file():
        raise ScenarioError(f"no such scenario file: {path}")
    parser = configparser.ConfigParser(interpolation=None, inline_comment_prefixes=(";",))
    parser.optionxform = str
    try:
        with open(path, encoding="utf-8") as handle:
            parser.read_file(handle)
    except configparser.Error as exc:
        raise ScenarioError(f"{path}: {exc}") from exc
    sections = {name: dict(parser[name]) for name in parser.sections()}
    return scenario_from_sections(sections)


def render_config(sections: dict) -> str:
    """Serialize a {section: {key: value}} mapping to scenario-file text.

    Values are written with repr round-tripping for floats so that
    rendering and re-parsing reproduces the same Scenario.
    """
    lines = []
    for name, body in sections.items():
        lines.append(f"[{name}]")
        for key, value in body.items():
            if isinstance(value, float):
                value = repr(value)
            lines.append(f"{key} = {value}")
        lines.append("")
    return "\n".join(lines)
