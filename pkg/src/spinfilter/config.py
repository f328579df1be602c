"""Simulation configuration: flat key-value text with dotted section prefixes.

Example::

    # N = 3 population-law run
    model.kind = spin_j
    model.N = 3
    params.omega = 0.3
    params.eta = 0.3
    params.M = 1
    controller.kind = population
    controller.alpha = 5
    controller.beta = 2
    controller.nbar = 0
    initial.rho = basis:2
    initial.rho_hat = basis:1
    integrator.dt = 1e-3
    integrator.T = 20
    integrator.record_stride = 100
    seed = 42

Parsing validates everything and reports *all* violations at once.  Initial
states are specified as ``basis:n``, ``diag:p0,p1,...``, ``bloch:x,y,z`` or
``maximally_mixed`` and are checked against the density-matrix invariants
before any run.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace

import numpy as np

from .control import CONTROLLER_KINDS, Controller
from .dynamics import PhysicalParams
from .errors import ConfigError
from .metrics import METRIC_NAMES
from .operators import basis_projector, bloch_to_density, maximally_mixed

MODEL_KINDS = ("spin_half", "spin_j")
PROJECTION_KINDS = ("clip", "none")


@dataclass(frozen=True)
class StateSpec:
    """Declarative initial-state description, built to a matrix on demand."""

    kind: str  # basis | diag | bloch | maximally_mixed
    values: tuple = ()

    def build(self, N: int) -> np.ndarray:
        if self.kind == "basis":
            return basis_projector(N, int(self.values[0]))
        if self.kind == "diag":
            return np.diag(np.asarray(self.values, dtype=float)).astype(complex)
        if self.kind == "bloch":
            return bloch_to_density(np.asarray(self.values, dtype=float))
        if self.kind == "maximally_mixed":
            return maximally_mixed(N)
        raise ValueError(f"unknown state spec kind {self.kind!r}")

    def violations(self, N: int, label: str) -> list[str]:
        """All invariant violations of this spec for dimension N."""
        out = []
        if self.kind == "basis":
            n = int(self.values[0])
            if not 0 <= n < N:
                out.append(f"{label}: basis index {n} outside 0..{N - 1}")
        elif self.kind == "diag":
            vals = np.asarray(self.values, dtype=float)
            if vals.size != N:
                out.append(f"{label}: diag has {vals.size} entries, model dim is {N}")
            if np.any(vals < -1e-12):
                out.append(f"{label}: negative population {vals.min():.3g}")
            if abs(vals.sum() - 1.0) > 1e-9:
                out.append(f"{label}: populations sum to {vals.sum():.12g}, not 1")
        elif self.kind == "bloch":
            if N != 2:
                out.append(f"{label}: bloch states require a two-level model")
            v = np.asarray(self.values, dtype=float)
            if v.size != 3:
                out.append(f"{label}: bloch vector needs 3 components, got {v.size}")
            elif float(v @ v) > 1.0 + 1e-10:
                out.append(f"{label}: bloch vector norm {np.sqrt(v @ v):.6g} > 1")
        elif self.kind != "maximally_mixed":
            out.append(f"{label}: unknown state kind {self.kind!r}")
        return out

    def serialize(self) -> str:
        if self.kind == "maximally_mixed":
            return "maximally_mixed"
        return f"{self.kind}:{','.join(_fmt(v) for v in self.values)}"

    @staticmethod
    def parse(text: str) -> "StateSpec":
        text = text.strip()
        if text == "maximally_mixed":
            return StateSpec("maximally_mixed")
        if ":" not in text:
            raise ValueError(
                f"state spec {text!r} is not basis:n, diag:..., bloch:... "
                f"or maximally_mixed")
        kind, _, payload = text.partition(":")
        kind = kind.strip()
        parts = [p.strip() for p in payload.split(",") if p.strip() != ""]
        if kind == "basis":
            if len(parts) != 1:
                raise ValueError(f"basis spec needs one index, got {payload!r}")
            return StateSpec("basis", (int(parts[0]),))
        if kind in ("diag", "bloch"):
            return StateSpec(kind, tuple(float(p) for p in parts))
        raise ValueError(f"unknown state kind {kind!r}")


@dataclass(frozen=True)
class IntegratorConfig:
    """Fixed-step Euler-Maruyama settings."""

    dt: float = 1e-3
    T: float = 30.0
    projection: str = "clip"
    record_stride: int = 1

    def __post_init__(self):
        if not self.dt > 0:
            raise ValueError(f"dt must be > 0, got {self.dt}")
        if not self.T >= self.dt:
            raise ValueError(f"T must be >= dt, got T={self.T}, dt={self.dt}")
        if self.projection not in PROJECTION_KINDS:
            raise ValueError(f"projection must be one of {PROJECTION_KINDS}")
        if not (isinstance(self.record_stride, int) and self.record_stride >= 1):
            raise ValueError(f"record_stride must be an integer >= 1")
        if self.n_steps % self.record_stride != 0:
            raise ValueError(
                f"record_stride {self.record_stride} does not divide the "
                f"step count {self.n_steps}")

    @property
    def n_steps(self) -> int:
        return int(math.ceil(self.T / self.dt - 1e-9))


@dataclass(frozen=True)
class SimConfig:
    """Complete description of one simulation run."""

    model_kind: str = "spin_half"
    N: int = 2
    params: PhysicalParams = field(default_factory=PhysicalParams)
    controller: Controller = field(default_factory=Controller)
    initial_rho: StateSpec = field(default_factory=lambda: StateSpec("basis", (0,)))
    initial_rho_hat: StateSpec = field(default_factory=lambda: StateSpec("basis", (0,)))
    integrator: IntegratorConfig = field(default_factory=IntegratorConfig)
    seed: int = 0
    metrics: tuple = METRIC_NAMES

    def initial_states(self) -> tuple[np.ndarray, np.ndarray]:
        return (self.initial_rho.build(self.N),
                self.initial_rho_hat.build(self.N))

    def with_overrides(self, seed=None, dt=None, T=None) -> "SimConfig":
        """Copy with CLI-style overrides applied."""
        cfg = self
        if seed is not None:
            cfg = replace(cfg, seed=int(seed))
        if dt is not None or T is not None:
            integ = replace(cfg.integrator,
                            dt=float(dt) if dt is not None else cfg.integrator.dt,
                            T=float(T) if T is not None else cfg.integrator.T)
            cfg = replace(cfg, integrator=integ)
        return cfg


_KNOWN_KEYS = (
    "model.kind", "model.N",
    "params.omega", "params.eta", "params.M",
    "controller.kind", "controller.c", "controller.alpha", "controller.beta",
    "controller.nbar",
    "initial.rho", "initial.rho_hat",
    "integrator.dt", "integrator.T", "integrator.projection",
    "integrator.record_stride",
    "seed", "output.metrics",
)


def _fmt(v) -> str:
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    return f"{float(v):.17g}"


def parse_config(text: str) -> SimConfig:
    """Parse and validate configuration text.

    Raises
    ------
    ConfigError
        Listing every violation found (unknown keys, malformed values,
        failed state/parameter invariants), not just the first.
    """
    raw: dict[str, str] = {}
    violations: list[str] = []
    for lineno, line in enumerate(text.splitlines(), start=1):
        stripped = line.split("#", 1)[0].strip()
        if not stripped:
            continue
        if "=" not in stripped:
            violations.append(f"line {lineno}: expected 'key = value', got {stripped!r}")
            continue
        key, _, value = stripped.partition("=")
        key, value = key.strip(), value.strip()
        if key not in _KNOWN_KEYS:
            violations.append(f"line {lineno}: unknown key {key!r}")
            continue
        if key in raw:
            violations.append(f"line {lineno}: duplicate key {key!r}")
            continue
        raw[key] = value

    def take(key, convert, default, what):
        if key not in raw:
            return default
        try:
            return convert(raw[key])
        except (ValueError, TypeError) as exc:
            violations.append(f"{key}: invalid {what} {raw[key]!r} ({exc})")
            return default

    model_kind = take("model.kind", str, "spin_half", "model kind")
    if model_kind not in MODEL_KINDS:
        violations.append(f"model.kind: must be one of {MODEL_KINDS}, got {model_kind!r}")
        model_kind = "spin_half"
    N = take("model.N", int, 2 if model_kind == "spin_half" else 3, "integer")
    if model_kind == "spin_half" and N != 2:
        violations.append(f"model.N: spin_half is two-level, got N={N}")
        N = 2
    if N < 2:
        violations.append(f"model.N: must be >= 2, got {N}")
        N = 2

    omega = take("params.omega", float, 0.0, "number")
    eta = take("params.eta", float, 1.0, "number")
    M = take("params.M", float, 1.0, "number")
    try:
        params = PhysicalParams(omega=omega, eta=eta, M=M)
    except ValueError as exc:
        violations.append(f"params: {exc}")
        params = PhysicalParams()

    ckind = take("controller.kind", str, "off", "controller kind")
    ctrl_kwargs = dict(
        kind=ckind,
        c=take("controller.c", float, 0.0, "number"),
        alpha=take("controller.alpha", float, 1.0, "number"),
        beta=take("controller.beta", float, 1.0, "number"),
        nbar=take("controller.nbar", int, 0, "integer"),
    )
    try:
        controller = Controller(**ctrl_kwargs)
    except ValueError as exc:
        violations.append(f"controller: {exc}")
        controller = Controller()
    if controller.kind in ("population", "expectation") and controller.nbar >= N:
        violations.append(
            f"controller.nbar: {controller.nbar} outside 0..{N - 1}")

    rho_spec = take("initial.rho", StateSpec.parse, StateSpec("basis", (0,)),
                    "state spec")
    hat_spec = take("initial.rho_hat", StateSpec.parse, StateSpec("basis", (0,)),
                    "state spec")
    violations.extend(rho_spec.violations(N, "initial.rho"))
    violations.extend(hat_spec.violations(N, "initial.rho_hat"))

    default_T = 30.0 if model_kind == "spin_half" else 20.0
    dt = take("integrator.dt", float, 1e-3, "number")
    T = take("integrator.T", float, default_T, "number")
    projection = take("integrator.projection", str, "clip", "projection kind")
    stride = take("integrator.record_stride", int, 1, "integer")
    try:
        integrator = IntegratorConfig(dt=dt, T=T, projection=projection,
                                      record_stride=stride)
    except ValueError as exc:
        violations.append(f"integrator: {exc}")
        integrator = IntegratorConfig()

    seed = take("seed", int, 0, "integer")

    def parse_metrics(value: str) -> tuple:
        names = tuple(m.strip() for m in value.split(",") if m.strip())
        unknown = [m for m in names if m not in METRIC_NAMES]
        if unknown:
            raise ValueError(f"unknown metric(s) {unknown}")
        return names

    metrics = take("output.metrics", parse_metrics, METRIC_NAMES, "metric list")

    if violations:
        raise ConfigError(violations)
    return SimConfig(model_kind=model_kind, N=N, params=params,
                     controller=controller, initial_rho=rho_spec,
                     initial_rho_hat=hat_spec, integrator=integrator,
                     seed=seed, metrics=metrics)


def serialize_config(cfg: SimConfig) -> str:
    """Canonical text form; ``parse_config`` round-trips it exactly."""
    lines = [
        f"model.kind = {cfg.model_kind}",
        f"model.N = {cfg.N}",
        f"params.omega = {_fmt(cfg.params.omega)}",
        f"params.eta = {_fmt(cfg.params.eta)}",
        f"params.M = {_fmt(cfg.params.M)}",
        f"controller.kind = {cfg.controller.kind}",
        f"controller.c = {_fmt(cfg.controller.c)}",
        f"controller.alpha = {_fmt(cfg.controller.alpha)}",
        f"controller.beta = {_fmt(cfg.controller.beta)}",
        f"controller.nbar = {cfg.controller.nbar}",
        f"initial.rho = {cfg.initial_rho.serialize()}",
        f"initial.rho_hat = {cfg.initial_rho_hat.serialize()}",
        f"integrator.dt = {_fmt(cfg.integrator.dt)}",
        f"integrator.T = {_fmt(cfg.integrator.T)}",
        f"integrator.projection = {cfg.integrator.projection}",
        f"integrator.record_stride = {cfg.integrator.record_stride}",
        f"seed = {cfg.seed}",
        f"output.metrics = {','.join(cfg.metrics)}",
    ]
    return "\n".join(lines) + "\n"
