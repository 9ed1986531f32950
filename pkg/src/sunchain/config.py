"""JSON experiment configuration.

Example::

    {
      "chain": {"L": 4, "N": 3, "potential": {"kind": "hubbard", "U": 1.0}},
      "particles": {"M": 7},
      "couplings": {"distribution": "uniform", "low": 0.5, "high": 1.5,
                    "seed": 42, "draws": 5},
      "tolerances": {"degeneracy": 1e-8},
      "solver": {"crossover": 512, "max_restarts": 50},
      "outputs": {"dir": "out", "format": "both"}
    }

``particles`` holds either ``M`` (an integer or a list of integers) or an
explicit ``sectors`` list.  ``couplings`` holds either fixed ``t``, ``J``, ``K``
(a scalar or one value per bond) or a seeded ``distribution``.
"""

from __future__ import annotations

import dataclasses
import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any

import numpy as np

from . import fock
from .hamiltonian import (
    ChainConfig,
    ConfigError,
    HubbardPotential,
    SiteDiagonalPotential,
)
from .spectra import SolverOptions, Tolerances

FORMATS = ("json", "csv", "both")


def _require(d: dict, key: str, where: str):
    if not isinstance(d, dict):
        raise ConfigError(f"{where}: expected an object")
    if key not in d:
        raise ConfigError(f"{where}.{key}: missing")
    return d[key]


def _int(value, where: str, low: int | None = None) -> int:
    if isinstance(value, bool) or not isinstance(value, int):
        raise ConfigError(f"{where}: expected an integer, got {value!r}")
    if low is not None and value < low:
        raise ConfigError(f"{where}: must be >= {low}, got {value}")
    return value


def _float(value, where: str) -> float:
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ConfigError(f"{where}: expected a number, got {value!r}")
    return float(value)


def _potential(entry: dict | None, L: int):
    if entry is None:
        return HubbardPotential(0.0)
    kind = _require(entry, "kind", "chain.potential")
    if kind == "hubbard":
        return HubbardPotential(_float(entry.get("U", 0.0), "chain.potential.U"))
    if kind == "site-diagonal":
        table = _require(entry, "table", "chain.potential")
        if not isinstance(table, list) or len(table) != L:
            raise ConfigError(f"chain.potential.table: expected {L} numbers")
        return SiteDiagonalPotential([_float(v, "chain.potential.table") for v in table])
    raise ConfigError(f"chain.potential.kind: unknown kind {kind!r} (custom potentials are library-only)")


def _bond_values(value, L: int, where: str) -> tuple[float, ...]:
    if isinstance(value, list):
        vals = tuple(_float(v, where) for v in value)
    else:
        vals = (_float(value, where),) * (L - 1)
    if len(vals) != L - 1:
        raise ConfigError(f"{where}: expected {L - 1} bond values, got {len(vals)}")
    if any(v < 0 for v in vals):
        raise ConfigError(f"{where}: couplings must be positive, got {list(vals)}")
    return vals


@dataclass
class Distribution:
    low: float
    high: float
    seed: int
    draws: int


@dataclass
class ExperimentConfig:
    L: int
    N: int
    potential: Any
    M: list[int] = field(default_factory=list)
    sectors: list[tuple[int, ...]] = field(default_factory=list)
    fixed: dict[str, tuple[float, ...]] | None = None
    distribution: Distribution | None = None
    tolerances: Tolerances = field(default_factory=Tolerances)
    solver: SolverOptions = field(default_factory=SolverOptions)
    out_dir: str = "out"
    format: str = "both"

    @property
    def seed(self) -> int | None:
        return self.distribution.seed if self.distribution else None

    @property
    def is_free(self) -> bool:
        """True when only hopping survives (J = K = V = 0)."""
        pot = self.potential
        zero_pot = isinstance(pot, HubbardPotential) and pot.U == 0.0
        zero_pot = zero_pot or (isinstance(pot, SiteDiagonalPotential) and not any(pot.table))
        if not zero_pot:
            return False
        if self.fixed is None:
            return False
        return not any(self.fixed["J"]) and not any(self.fixed["K"])

    def chains(self) -> list[ChainConfig]:
        """One chain per coupling draw; all randomness comes from one seeded generator."""
        if self.fixed is not None:
            return [ChainConfig(self.L, self.N, self.fixed["t"], self.fixed["J"], self.fixed["K"], self.potential)]
        d = self.distribution
        rng = np.random.default_rng(d.seed)
        out = []
        for _ in range(d.draws):
            t, J, K = (tuple(float(v) for v in rng.uniform(d.low, d.high, self.L - 1)) for _ in range(3))
            out.append(ChainConfig(self.L, self.N, t, J, K, self.potential))
        return out

    def to_dict(self) -> dict:
        out: dict[str, Any] = {
            "chain": {"L": self.L, "N": self.N, "potential": self.potential.to_dict()},
            "particles": {"M": self.M} if self.M else {"sectors": [list(s) for s in self.sectors]},
        }
        if self.fixed is not None:
            out["couplings"] = {k: list(v) for k, v in self.fixed.items()}
        else:
            out["couplings"] = {"distribution": "uniform", **dataclasses.asdict(self.distribution)}
        out["tolerances"] = dataclasses.asdict(self.tolerances)
        out["solver"] = dataclasses.asdict(self.solver)
        return out


def parse_config(raw: dict, overrides: dict | None = None) -> ExperimentConfig:
    overrides = {k: v for k, v in (overrides or {}).items() if v is not None}
    chain = _require(raw, "chain", "config")
    L = _int(overrides.get("L", _require(chain, "L", "chain")), "chain.L", 1)
    N = _int(overrides.get("N", _require(chain, "N", "chain")), "chain.N", 1)
    try:
        fock.check_caps(L, N)
    except fock.ChainSizeError as exc:
        raise ConfigError(f"chain: {exc}") from exc
    potential = _potential(chain.get("potential"), L)

    particles = _require(raw, "particles", "config")
    M_list: list[int] = []
    sectors: list[tuple[int, ...]] = []
    if "M" in overrides:
        particles = {"M": overrides["M"]}
    if "M" in particles and "sectors" in particles:
        raise ConfigError("particles: give either M or sectors, not both")
    if "M" in particles:
        values = particles["M"] if isinstance(particles["M"], list) else [particles["M"]]
        for m in values:
            m = _int(m, "particles.M", 1)
            if m > N * L:
                raise ConfigError(f"particles.M: M={m} exceeds N*L={N * L}")
            M_list.append(m)
        if not M_list:
            raise ConfigError("particles.M: empty list")
    elif "sectors" in particles:
        if not isinstance(particles["sectors"], list) or not particles["sectors"]:
            raise ConfigError("particles.sectors: expected a non-empty list of weights")
        for s in particles["sectors"]:
            if not isinstance(s, list):
                raise ConfigError(f"particles.sectors: expected a list, got {s!r}")
            try:
                sectors.append(fock.check_sector(L, [_int(v, "particles.sectors", 0) for v in s], N))
            except fock.SectorError as exc:
                raise ConfigError(f"particles.sectors: {exc}") from exc
    else:
        raise ConfigError("particles: need M or sectors")

    couplings = _require(raw, "couplings", "config")
    fixed = dist = None
    has_fixed = any(k in couplings for k in ("t", "J", "K"))
    if has_fixed and "distribution" in couplings:
        raise ConfigError("couplings: give either fixed t/J/K or a distribution, not both")
    if has_fixed:
        fixed = {k: _bond_values(_require(couplings, k, "couplings"), L, f"couplings.{k}") for k in ("t", "J", "K")}
    elif "distribution" in couplings:
        if couplings["distribution"] != "uniform":
            raise ConfigError(f"couplings.distribution: only 'uniform' is supported")
        seed = overrides.get("seed", couplings.get("seed"))
        if seed is None:
            raise ConfigError("couplings.seed: mandatory with a distribution")
        low = _float(couplings.get("low", 0.5), "couplings.low")
        high = _float(couplings.get("high", 1.5), "couplings.high")
        if not 0 < low <= high:
            raise ConfigError("couplings.low/high: need 0 < low <= high")
        dist = Distribution(low, high, _int(seed, "couplings.seed", 0), _int(couplings.get("draws", 1), "couplings.draws", 1))
    else:
        raise ConfigError("couplings: need fixed t/J/K or a distribution")

    tol_raw = raw.get("tolerances", {})
    try:
        tolerances = Tolerances(**{k: _float(v, f"tolerances.{k}") for k, v in tol_raw.items()})
    except TypeError as exc:
        raise ConfigError(f"tolerances: {exc}") from exc
    solver_raw = raw.get("solver", {})
    try:
        solver = SolverOptions(**{k: _int(v, f"solver.{k}", 1) for k, v in solver_raw.items()})
    except TypeError as exc:
        raise ConfigError(f"solver: {exc}") from exc

    outputs = raw.get("outputs", {})
    out_dir = overrides.get("out_dir", outputs.get("dir", "out"))
    fmt = overrides.get("format", outputs.get("format", "both"))
    if fmt not in FORMATS:
        raise ConfigError(f"outputs.format: expected one of {FORMATS}, got {fmt!r}")
    return ExperimentConfig(L, N, potential, M_list, sectors, fixed, dist, tolerances, solver, str(out_dir), fmt)


def load_config(path, overrides: dict | None = None) -> ExperimentConfig:
    text = Path(path).read_text()
    try:
        raw = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path}: invalid JSON at line {exc.lineno}, column {exc.colno}: {exc.msg}") from exc
    return parse_config(raw, overrides)
