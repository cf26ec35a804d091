"""Partial cross mapping: separating direct from mediated causal links.

For an alleged cause ``x1``, effect ``x2`` and conditions ``C`` the test
compares two reconstructions of ``x1`` made from the effect's shadow
manifold:

* apparent: ``x1`` cross-mapped directly from the delay embedding of ``x2``;
* conditioned: ``x1`` is cross-mapped through the condition set and the
  effect in turn, so only information routed via the conditions survives.

``rho_all = |corr(x1, apparent)|`` and ``rho_direct = |parcorr(x1, apparent |
conditioned)|``. Their ratio ``gamma`` is small when everything the effect
knows about the cause passes through the conditions.
"""
from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .crossmap import neighbor_table, project
from .embedding import EmbedParams, Embedding, TimeSeries, build_delay_embedding, build_multivariate_embedding
from .errors import ParameterError
from .stats import correlation, partial_correlation

DEFAULT_GAMMA_STAR = 0.45

REEMBED = "reembed"
COORDINATES = "coordinates"
COMPOSE = "compose"
CONDITIONING_MODES = (COMPOSE, REEMBED, COORDINATES)


class Link(str, enum.Enum):
    DIRECT = "Direct"
    INDIRECT = "Indirect"
    NONE = "None"

    def __str__(self):
        return self.value


@dataclass(frozen=True)
class PCMResult:
    rho_all: float
    rho_direct: float
    gamma: float

    @classmethod
    def from_scores(cls, rho_all: float, rho_direct: float) -> "PCMResult":
        rho_all, rho_direct = abs(rho_all), abs(rho_direct)
        gamma = rho_direct / rho_all if rho_all > 0 else 0.0
        return cls(rho_all, rho_direct, gamma)


@dataclass(frozen=True)
class PCMConfig:
    """Embedding parameters plus the ratio threshold and optional legacy ``H``.

    ``conditioning`` chooses how the conditioned reconstruction is built:

    * ``"compose"`` (default): ``x1`` is cross-mapped from the stacked
      condition embedding, and that estimate is cross-mapped again from the
      effect's embedding;
    * ``"reembed"``: each condition is cross-mapped from the effect, the
      reconstructions are delay-embedded and ``x1`` is cross-mapped from them;
    * ``"coordinates"``: every coordinate of the stacked condition embedding
      is reconstructed with the effect's neighbor weights and used directly.
    """

    embed: EmbedParams = EmbedParams()
    gamma_star: float = DEFAULT_GAMMA_STAR
    H: float | None = None
    conditioning: str = COMPOSE
    exclusion: int = 0

    def __post_init__(self):
        if not 0 < self.gamma_star < 1:
            raise ParameterError(f"gamma_star must lie in (0, 1), got {self.gamma_star}")
        if self.H is not None and not 0 <= self.H < 1:
            raise ParameterError(f"H must lie in [0, 1), got {self.H}")
        if self.conditioning not in CONDITIONING_MODES:
            raise ParameterError(f"unknown conditioning mode {self.conditioning!r}")


def _values(s) -> np.ndarray:
    return s.values if isinstance(s, TimeSeries) else np.asarray(s, dtype=np.float64).reshape(-1)


def _scores(x: np.ndarray, apparent: np.ndarray, apparent_offset: int,
            conditioned: np.ndarray, conditioned_offset: int) -> PCMResult:
    start = max(apparent_offset, conditioned_offset)
    stop = min(apparent_offset + apparent.size, conditioned_offset + conditioned.size, x.size)
    if stop - start < 3:
        raise ParameterError("too few overlapping time points to correlate reconstructions")
    a = x[start:stop]
    b = apparent[start - apparent_offset: stop - apparent_offset]
    c = conditioned[start - conditioned_offset: stop - conditioned_offset]
    return PCMResult.from_scores(correlation(a, b), partial_correlation(a, b, c))


def _prepare(x1, x2, conds, params: EmbedParams):
    x = _values(x1)
    eff = _values(x2)
    cs = [_values(c) for c in conds]
    lengths = {x.size, eff.size, *(c.size for c in cs)}
    if len(lengths) != 1:
        raise ParameterError(f"series lengths differ: {sorted(lengths)}")
    need = 2 * params.offset + params.knn + 1
    if x.size < need:
        raise ParameterError(
            f"series of length {x.size} too short for tau={params.tau}, dim={params.dim}, "
            f"k={params.knn}; need at least {need} samples"
        )
    return x, eff, cs


def multi_pcm(x1, x2, conds: Sequence, cfg: PCMConfig) -> PCMResult:
    """Partial cross mapping of ``x1 => x2`` given the condition set ``conds``."""
    conds = list(conds)
    if not conds:
        raise ParameterError("condition set is empty")
    p = cfg.embed
    k = p.knn
    x, eff, cs = _prepare(x1, x2, conds, p)

    m_eff = build_delay_embedding(eff, p)
    nb_eff = neighbor_table(m_eff, k, cfg.exclusion)
    apparent = project(nb_eff, x)
    off = m_eff.offset

    if cfg.conditioning == COMPOSE:
        m_cond = build_multivariate_embedding(cs, p)
        via_cond = project(neighbor_table(m_cond, k, cfg.exclusion), x)
        conditioned = project(nb_eff, via_cond, target_offset=m_cond.offset)
        return _scores(x, apparent, off, conditioned, off)
    if cfg.conditioning == REEMBED:
        recon = [project(nb_eff, c) for c in cs]
        source = build_multivariate_embedding(recon, p, base_offset=off)
    else:
        m_cond = build_multivariate_embedding(cs, p)
        cloud = project(nb_eff, m_cond.points, target_offset=m_cond.offset)
        source = Embedding(cloud, off, m_cond.source_names, p)
    nb_cond = neighbor_table(source, k, cfg.exclusion)
    conditioned = project(nb_cond, x)
    return _scores(x, apparent, off, conditioned, source.offset)


def pcm_univariate(x, y, z, cfg: PCMConfig) -> PCMResult:
    """Partial cross mapping of ``x => z`` conditioned on the single mediator ``y``.

    In ``"compose"`` mode ``x`` is cross-mapped from the embedding of ``y``
    and the result cross-mapped from ``z``. Otherwise ``y`` is cross-mapped
    from ``z``, the reconstruction is delay-embedded with the same
    ``(tau, dim)``, and ``x`` is cross-mapped from it (``"coordinates"``
    skips the re-embedding and uses the reconstructed points).
    """
    p = cfg.embed
    k = p.knn
    xv, zv, (yv,) = _prepare(x, z, [y], p)
    m_z = build_delay_embedding(zv, p)
    nb_z = neighbor_table(m_z, k, cfg.exclusion)
    x_from_z = project(nb_z, xv)
    if cfg.conditioning == COMPOSE:
        m_y = build_delay_embedding(yv, p)
        x_from_y = project(neighbor_table(m_y, k, cfg.exclusion), xv)
        x_via_y = project(nb_z, x_from_y, target_offset=m_y.offset)
        return _scores(xv, x_from_z, m_z.offset, x_via_y, m_z.offset)
    if cfg.conditioning == COORDINATES:
        m_y = build_delay_embedding(yv, p)
        cloud = project(nb_z, m_y.points, target_offset=m_y.offset)
        src = Embedding(cloud, m_z.offset, m_y.source_names, p)
        x_via_y = project(neighbor_table(src, k, cfg.exclusion), xv)
        return _scores(xv, x_from_z, m_z.offset, x_via_y, m_z.offset)
    y_from_z = project(nb_z, yv)
    m_y = build_delay_embedding(y_from_z, p, base_offset=m_z.offset)
    x_via_y = project(neighbor_table(m_y, k, cfg.exclusion), xv)
    return _scores(xv, x_from_z, m_z.offset, x_via_y, m_y.offset)


def classify_link(result: PCMResult, gamma_star: float) -> Link:
    """Direct iff ``gamma >= gamma_star``."""
    return Link.DIRECT if result.gamma >= gamma_star else Link.INDIRECT


def classify_link_threshold(result: PCMResult, H: float) -> Link:
    """Legacy rule on raw scores against the empirical threshold ``H``."""
    if result.rho_all < H:
        return Link.NONE
    if result.rho_direct >= H:
        return Link.DIRECT
    return Link.INDIRECT
