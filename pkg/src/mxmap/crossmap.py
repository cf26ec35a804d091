"""Nearest-neighbor simplex projection and bivariate convergent cross mapping.

Neighbor search is exact. Distances are Euclidean, ties are broken by the
lower row index, and the query row itself is never its own neighbor. A
KD-tree narrows the candidate set for large embeddings. Every selected
distance is recomputed with the same arithmetic as the brute-force
reference, and rows whose selection could depend on rounding fall back to
the brute-force path. Both routes therefore return identical neighbor sets.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np
from scipy.spatial import cKDTree

from .embedding import EmbedParams, Embedding, TimeSeries, build_delay_embedding
from .errors import DegenerateInputError, ParameterError
from .stats import correlation

_BRUTE_FORCE_MAX_ROWS = 600
_CHUNK = 256


@dataclass(frozen=True)
class NeighborSet:
    query_row: int
    neighbor_rows: np.ndarray
    distances: np.ndarray


@dataclass(frozen=True)
class NeighborTable:
    """Neighbor rows and distances for every row of an embedding, shape ``(n, k)``."""

    rows: np.ndarray
    distances: np.ndarray
    offset: int

    @property
    def k(self) -> int:
        return self.rows.shape[1]

    def __len__(self):
        return self.rows.shape[0]

    def weights(self) -> np.ndarray:
        """Simplex weights ``exp(-d / d_min)`` normalized per row.

        A row whose nearest distance is zero puts uniform weight on its
        zero-distance neighbors.
        """
        d = self.distances
        dmin = d[:, :1]
        with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
            w = np.exp(-d / dmin)
        zero = dmin[:, 0] == 0
        if zero.any():
            w[zero] = (d[zero] == 0).astype(np.float64)
        return w / w.sum(axis=1, keepdims=True)


@dataclass(frozen=True)
class CCMResult:
    beta_forward: float
    beta_backward: float
    library_length: int


@dataclass(frozen=True)
class ConvergenceCurve:
    lengths: np.ndarray
    scores: np.ndarray


def _row_distances(points: np.ndarray, query: np.ndarray) -> np.ndarray:
    diff = points[None, :, :] - query[:, None, :]
    return np.sqrt(np.einsum("qnd,qnd->qn", diff, diff))


def _check_k(n_rows: int, k: int, exclusion: int):
    if k < 1:
        raise ParameterError(f"k must be positive, got {k}")
    if exclusion < 0:
        raise ParameterError(f"exclusion radius must be >= 0, got {exclusion}")
    usable = n_rows - 1 - 2 * exclusion
    if k > usable:
        raise ParameterError(
            f"k={k} neighbors requested but only {max(usable, 0)} rows are usable "
            f"out of {n_rows} (exclusion radius {exclusion})"
        )


def _mask_excluded(d: np.ndarray, start: int, exclusion: int):
    n = d.shape[1]
    for q in range(d.shape[0]):
        r = start + q
        d[q, max(r - exclusion, 0): min(r + exclusion + 1, n)] = np.inf


def _select(d: np.ndarray, k: int) -> tuple[np.ndarray, np.ndarray]:
    # stable argsort on distances gives lower-index-first among ties
    order = np.argsort(d, axis=1, kind="stable")[:, :k]
    return order, np.take_along_axis(d, order, axis=1)


def knn_table_brute(points: np.ndarray, k: int, exclusion: int = 0) -> tuple[np.ndarray, np.ndarray]:
    """Reference exhaustive search over all rows."""
    points = np.asarray(points, dtype=np.float64)
    n = points.shape[0]
    _check_k(n, k, exclusion)
    rows = np.empty((n, k), dtype=np.int64)
    dists = np.empty((n, k))
    for start in range(0, n, _CHUNK):
        stop = min(start + _CHUNK, n)
        d = _row_distances(points, points[start:stop])
        _mask_excluded(d, start, exclusion)
        rows[start:stop], dists[start:stop] = _select(d, k)
    return rows, dists


def knn_table_tree(points: np.ndarray, k: int, exclusion: int = 0) -> tuple[np.ndarray, np.ndarray]:
    """KD-tree candidate search, verified row by row against exact distances."""
    points = np.asarray(points, dtype=np.float64)
    n = points.shape[0]
    _check_k(n, k, exclusion)
    margin = 4
    m = min(n, k + 2 * exclusion + 1 + margin)
    tree = cKDTree(points)
    _, cand = tree.query(points, k=m)
    cand = np.asarray(cand, dtype=np.int64).reshape(n, m)

    diff = points[cand] - points[:, None, :]
    d = np.sqrt(np.einsum("qmd,qmd->qm", diff, diff))
    self_idx = np.arange(n)[:, None]
    d[np.abs(cand - self_idx) <= exclusion] = np.inf

    # lexicographic (distance, row) order within the candidate list
    order = np.lexsort((cand, d), axis=1)
    cand = np.take_along_axis(cand, order, axis=1)
    d = np.take_along_axis(d, order, axis=1)
    rows, dists = cand[:, :k], d[:, :k]

    # Rows outside the candidate list are at least as far as the farthest
    # candidate (up to rounding); accept only when the k-th distance is
    # clearly below that bound.
    finite = np.where(np.isfinite(d), d, -np.inf)
    bound = finite.max(axis=1)
    kth = dists[:, -1]
    safe = (m == n) | (kth < bound * (1 - 1e-9) - 1e-300)
    safe &= np.isfinite(kth)
    redo = np.flatnonzero(~safe)
    for start in range(0, redo.size, _CHUNK):
        qs = redo[start:start + _CHUNK]
        dd = _row_distances(points, points[qs])
        for i, q in enumerate(qs):
            dd[i, max(q - exclusion, 0): min(q + exclusion + 1, n)] = np.inf
        rows[qs], dists[qs] = _select(dd, k)
    return rows, dists


def neighbor_table(emb: Embedding | np.ndarray, k: int, exclusion: int = 0, offset: int | None = None) -> NeighborTable:
    """k nearest neighbors of every row of ``emb``."""
    if isinstance(emb, Embedding):
        points, off = emb.points, emb.offset
    else:
        points, off = np.asarray(emb, dtype=np.float64), 0
    if offset is not None:
        off = offset
    if points.shape[0] <= _BRUTE_FORCE_MAX_ROWS:
        rows, dists = knn_table_brute(points, k, exclusion)
    else:
        rows, dists = knn_table_tree(points, k, exclusion)
    return NeighborTable(rows, dists, off)


def knn_neighbors(emb: Embedding, query_row: int, k: int, exclusion: int = 0) -> NeighborSet:
    """The ``k`` rows nearest to ``query_row``, excluding the row itself."""
    points = emb.points
    n = points.shape[0]
    _check_k(n, k, exclusion)
    if not 0 <= query_row < n:
        raise ParameterError(f"query row {query_row} outside [0, {n})")
    d = _row_distances(points, points[query_row:query_row + 1])
    _mask_excluded(d, query_row, exclusion)
    rows, dists = _select(d, k)
    return NeighborSet(query_row, rows[0], dists[0])


def project(table: NeighborTable, target: np.ndarray, target_offset: int = 0) -> np.ndarray:
    """Weighted average of ``target`` at the neighbor times of every row.

    ``target`` may be 1-D (a series) or 2-D (one row per time, e.g. the
    points of another embedding); ``target_offset`` is the absolute time of
    its first entry.
    """
    target = np.asarray(target, dtype=np.float64)
    idx = table.rows + (table.offset - target_offset)
    if idx.min() < 0 or idx.max() >= target.shape[0]:
        raise ParameterError("target does not cover the library's time range")
    w = table.weights()
    if target.ndim == 1:
        return np.einsum("nk,nk->n", w, target[idx])
    return np.einsum("nk,nkd->nd", w, target[idx])


def _series_values(s) -> np.ndarray:
    return s.values if isinstance(s, TimeSeries) else np.asarray(s, dtype=np.float64).reshape(-1)


def simplex_reconstruct(source_emb: Embedding, target_series, k: int, exclusion: int = 0) -> np.ndarray:
    """Cross-map estimate of ``target_series`` over times ``[offset, end)`` of ``source_emb``."""
    table = neighbor_table(source_emb, k, exclusion)
    return project(table, _series_values(target_series))


def _check_length(T: int, params: EmbedParams):
    need = params.offset + params.knn + 1
    if T < need:
        raise ParameterError(
            f"series of length {T} too short for tau={params.tau}, dim={params.dim}, "
            f"k={params.knn}; need at least {need} samples"
        )


def ccm_score(cause, effect, params: EmbedParams, exclusion: int = 0) -> float:
    """Skill of recovering ``cause`` from the delay embedding of ``effect``.

    A high score supports ``cause => effect``.
    """
    x, y = _series_values(cause), _series_values(effect)
    if x.size != y.size:
        raise ParameterError(f"series lengths differ: {x.size} vs {y.size}")
    _check_length(x.size, params)
    emb = build_delay_embedding(y, params)
    x_hat = simplex_reconstruct(emb, x, params.knn, exclusion)
    return correlation(x[emb.offset:], x_hat)


def ccm_pair(xi, xj, params: EmbedParams, exclusion: int = 0) -> CCMResult:
    forward = ccm_score(xi, xj, params, exclusion)
    backward = ccm_score(xj, xi, params, exclusion)
    return CCMResult(forward, backward, len(_series_values(xi)))


def convergence_curve(cause, effect, params: EmbedParams, lengths: Sequence[int], exclusion: int = 0) -> ConvergenceCurve:
    """CCM scores on growing prefixes of the two series."""
    x, y = _series_values(cause), _series_values(effect)
    lengths = np.asarray(list(lengths), dtype=np.int64)
    if lengths.size == 0:
        raise ParameterError("no library lengths given")
    if np.any(np.diff(lengths) <= 0):
        raise ParameterError("library lengths must be strictly increasing")
    if lengths[-1] > x.size:
        raise ParameterError(f"library length {lengths[-1]} exceeds series length {x.size}")
    for L in lengths:
        _check_length(int(L), params)
    scores = np.array([ccm_score(x[:L], y[:L], params, exclusion) for L in lengths])
    return ConvergenceCurve(lengths, scores)


__all__ = [
    "CCMResult",
    "ConvergenceCurve",
    "DegenerateInputError",
    "NeighborSet",
    "NeighborTable",
    "ccm_pair",
    "ccm_score",
    "convergence_curve",
    "knn_neighbors",
    "knn_table_brute",
    "knn_table_tree",
    "neighbor_table",
    "project",
    "simplex_reconstruct",
]
