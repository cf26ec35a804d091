"""Seeded generators for coupled chaotic species-interaction maps.

Each variable follows a logistic-type map with competitive coupling::

    x_i[t] = x_i[t-1] * (a_i - a_i x_i[t-1] - sum_j b[j, i] x_j[t-1]) * eta_i + eps_i

with ``b[cause, effect]`` equal to 0.35 on every edge of the preset's
ground-truth graph and 0 elsewhere.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from importlib import resources
from typing import Iterable, Sequence

import numpy as np

from .embedding import Dataset, TimeSeries
from .errors import DegenerateInputError, GenerationError, ParameterError
from .graph import CausalGraph
from .stats import correlation

COUPLING = 0.35
ALPHA_RANGE = (3.70, 3.80)
BURN_IN = 1000
MAX_ATTEMPTS = 100
INIT_RANGE = (0.05, 0.95)
MIN_DISTINCT_FRACTION = 0.5


@dataclass(frozen=True)
class NoiseConfig:
    """Additive Gaussian noise ``eps_std`` and multiplicative factor ``eta``.

    ``eta`` is a constant per-variable factor (default 1, i.e. off).
    """

    eps_std: float = 0.0
    eta: float = 1.0

    def __post_init__(self):
        if not np.isfinite(self.eps_std) or self.eps_std < 0:
            raise ParameterError(f"eps_std must be finite and >= 0, got {self.eps_std}")
        if not np.isfinite(self.eta) or self.eta <= 0:
            raise ParameterError(f"eta must be finite and > 0, got {self.eta}")

    @classmethod
    def gaussian(cls, std: float = 0.01) -> "NoiseConfig":
        return cls(eps_std=std)


NO_NOISE = NoiseConfig()


@dataclass(frozen=True)
class SystemPreset:
    name: str
    alpha: np.ndarray
    beta: np.ndarray
    names: tuple[str, ...] = ()
    description: str = ""

    def __post_init__(self):
        alpha = np.asarray(self.alpha, dtype=np.float64).reshape(-1)
        beta = np.asarray(self.beta, dtype=np.float64)
        K = alpha.size
        if beta.shape != (K, K):
            raise ParameterError(f"coupling matrix shape {beta.shape} does not match {K} variables")
        if np.any(np.diag(beta) != 0):
            raise ParameterError("coupling matrix must have a zero diagonal")
        names = tuple(self.names) or default_names(K)
        if len(names) != K:
            raise ParameterError(f"{len(names)} names for {K} variables")
        alpha.setflags(write=False)
        beta.setflags(write=False)
        object.__setattr__(self, "alpha", alpha)
        object.__setattr__(self, "beta", beta)
        object.__setattr__(self, "names", names)

    @property
    def K(self) -> int:
        return self.alpha.size

    @property
    def edges(self) -> list[tuple[int, int]]:
        return [(int(i), int(j)) for i, j in zip(*np.nonzero(self.beta))]

    @property
    def truth(self) -> CausalGraph:
        return CausalGraph.from_adjacency((self.beta != 0).astype(int), self.names)


def default_names(K: int) -> tuple[str, ...]:
    if K == 3:
        return ("x", "y", "z")
    if K == 4:
        return ("w", "x", "y", "z")
    return tuple(f"v{i}" for i in range(K))


def coupling_matrix(K: int, edges: Iterable[Sequence[int]], strength: float = COUPLING) -> np.ndarray:
    beta = np.zeros((K, K))
    for i, j in edges:
        if i == j:
            raise ParameterError(f"self-coupling on node {i}")
        if not (0 <= i < K and 0 <= j < K):
            raise ParameterError(f"edge ({i}, {j}) outside {K} nodes")
        beta[i, j] = strength
    return beta


def step(state: np.ndarray, alpha: np.ndarray, beta: np.ndarray) -> np.ndarray:
    """One noise-free update of every variable."""
    return state * (alpha - alpha * state - beta.T @ state)


def sample_coeffs(K: int, structure: Iterable[Sequence[int]], seed: int, name: str | None = None) -> SystemPreset:
    """Preset with autonomous rates drawn uniformly from [3.70, 3.80)."""
    if K < 5:
        raise ParameterError("3- and 4-variable systems use fixed growth rates; K must be >= 5")
    rng = np.random.default_rng(seed)
    alpha = rng.uniform(*ALPHA_RANGE, size=K)
    return SystemPreset(name or f"{K}V_custom", alpha, coupling_matrix(K, structure))


def _iterate(alpha, beta, length, noise: NoiseConfig, rng) -> np.ndarray | None:
    K = alpha.size
    state = rng.uniform(*INIT_RANGE, size=K)
    out = np.empty((length, K))
    for t in range(BURN_IN + length):
        state = step(state, alpha, beta) * noise.eta
        if noise.eps_std > 0:
            state = state + rng.normal(0.0, noise.eps_std, size=K)
        if not np.all((state > 0) & (state < 1)):
            return None
        if t >= BURN_IN:
            out[t - BURN_IN] = state
    return out


def _collapsed(traj: np.ndarray) -> bool:
    """True when some variable has settled on a short periodic orbit."""
    n = traj.shape[0]
    if n < 50:
        return False
    tail = traj[-min(n, 500):]
    for col in tail.T:
        if np.unique(np.round(col, 9)).size < MIN_DISTINCT_FRACTION * col.size:
            return True
    return False


def generate(preset: SystemPreset, length: int, noise: NoiseConfig = NO_NOISE, seed: int = 0) -> Dataset:
    """Simulate ``length`` post-burn-in samples of ``preset``.

    Initial conditions are redrawn, with successive sub-seeds, whenever a
    state leaves (0, 1) or the trajectory collapses onto a periodic orbit.
    """
    if length < 1:
        raise ParameterError(f"length must be >= 1, got {length}")
    for attempt in range(MAX_ATTEMPTS):
        rng = np.random.default_rng([int(seed), attempt])
        traj = _iterate(preset.alpha, preset.beta, length, noise, rng)
        if traj is not None and not _collapsed(traj):
            return Dataset.from_array(traj, preset.names)
    raise GenerationError(f"preset {preset.name!r}: no bounded chaotic trajectory after {MAX_ATTEMPTS} attempts")


def _load_registry() -> dict[str, SystemPreset]:
    raw = json.loads(resources.files("mxmap").joinpath("presets.json").read_text())
    out = {}
    for name, spec in raw["presets"].items():
        K = len(spec["alpha"])
        out[name] = SystemPreset(
            name,
            np.array(spec["alpha"]),
            coupling_matrix(K, spec["edges"]),
            tuple(spec.get("names") or default_names(K)),
            spec.get("description", ""),
        )
    return out


_REGISTRY: dict[str, SystemPreset] | None = None


def presets() -> dict[str, SystemPreset]:
    global _REGISTRY
    if _REGISTRY is None:
        _REGISTRY = _load_registry()
    return dict(_REGISTRY)


def chain_preset(K: int, seed: int = 0) -> SystemPreset:
    """``v0 -> v1 -> ... -> v{K-1}``; 3- and 4-node chains reuse the fixed presets."""
    if K < 2:
        raise ParameterError(f"a chain needs at least 2 nodes, got {K}")
    if K in (3, 4):
        return presets()[f"{K}V_chain"]
    if K == 2:
        return SystemPreset("2V_chain", np.array([3.70, 3.78]), coupling_matrix(2, [(0, 1)]), ("x", "y"))
    return sample_coeffs(K, [(i, i + 1) for i in range(K - 1)], seed, name=f"{K}V_chain")


def get_preset(name: str) -> SystemPreset:
    """Look up a registered preset; ``NV_chain`` names like ``6V_chain`` are built on demand."""
    registry = presets()
    if name in registry:
        return registry[name]
    if name.endswith("V_chain") and name[:-7].isdigit():
        return chain_preset(int(name[:-7]))
    raise ParameterError(f"unknown preset {name!r}; available: {', '.join(sorted(registry))}, NV_chain")


def mirage_subsequences(dataset: Dataset, window: int, n: int, seed: int = 0) -> list[dict]:
    """Pairwise Pearson correlations inside ``n`` randomly placed windows.

    Each entry holds the window ``start`` and a ``correlations`` map keyed by
    ``(name_a, name_b)``; undefined correlations are reported as ``None``.
    """
    T = dataset.T
    if not 2 <= window <= T:
        raise ParameterError(f"window must be in [2, {T}], got {window}")
    if n < 1:
        raise ParameterError(f"n must be >= 1, got {n}")
    rng = np.random.default_rng(seed)
    starts = rng.integers(0, T - window + 1, size=n)
    names = dataset.names
    out = []
    for start in starts:
        corr = {}
        for a in range(len(names)):
            for b in range(a + 1, len(names)):
                xa = dataset[a].values[start:start + window]
                xb = dataset[b].values[start:start + window]
                try:
                    corr[(names[a], names[b])] = correlation(xa, xb)
                except DegenerateInputError:
                    corr[(names[a], names[b])] = None
        out.append({"start": int(start), "correlations": corr})
    return out
