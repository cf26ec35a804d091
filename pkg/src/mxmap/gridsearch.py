"""Lag/dimension grid search for partial cross mapping and ratio-threshold sweeps."""
from __future__ import annotations

import csv
import logging
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from .embedding import Dataset, EmbedParams
from .errors import MXMapError, ParameterError
from .graph import CausalGraph
from .pcm import DEFAULT_GAMMA_STAR, COMPOSE, Link, PCMConfig, PCMResult, classify_link, multi_pcm

log = logging.getLogger(__name__)

SURFACES = ("rho_all", "rho_direct", "ratio", "label")


@dataclass
class GridResult:
    tau_range: list[int]
    dim_range: list[int]
    rho_all_surface: np.ndarray
    rho_direct_surface: np.ndarray
    ratio_surface: np.ndarray
    threshold: float
    errors: dict[tuple[int, int], str] = field(default_factory=dict)

    @property
    def label_surface(self) -> np.ndarray:
        """Object array of :class:`Link` values; ``None`` where the cell failed."""
        out = np.empty(self.ratio_surface.shape, dtype=object)
        for idx, r in np.ndenumerate(self.ratio_surface):
            out[idx] = None if np.isnan(r) else (Link.DIRECT if r >= self.threshold else Link.INDIRECT)
        return out

    def label(self, tau: int, dim: int) -> Link | None:
        return self.label_surface[self.tau_range.index(tau), self.dim_range.index(dim)]

    def count(self, expected: Link, taus: Iterable[int] | None = None, dims: Iterable[int] | None = None) -> tuple[int, int]:
        """``(correct, total)`` over the sub-grid."""
        taus = list(self.tau_range if taus is None else taus)
        dims = list(self.dim_range if dims is None else dims)
        labels = [self.label(t, e) for t in taus for e in dims]
        return sum(lab == expected for lab in labels), len(labels)

    def write_csv(self, directory: str | Path, case: str) -> list[Path]:
        """One ``<case>_<surface>.csv`` matrix per surface; rows are lags, columns dimensions."""
        directory = Path(directory)
        directory.mkdir(parents=True, exist_ok=True)
        surfaces = {
            "rho_all": self.rho_all_surface,
            "rho_direct": self.rho_direct_surface,
            "ratio": self.ratio_surface,
            "label": self.label_surface,
        }
        paths = []
        for name, mat in surfaces.items():
            path = directory / f"{case}_{name}.csv"
            with open(path, "w", newline="") as fh:
                w = csv.writer(fh)
                w.writerow(["tau\\dim"] + self.dim_range)
                for tau, row in zip(self.tau_range, mat):
                    w.writerow([tau] + ["" if v is None or (isinstance(v, float) and np.isnan(v)) else str(v) for v in row])
            paths.append(path)
        return paths


def _resolve(data: Dataset, var) -> int:
    return data.index(var) if isinstance(var, str) else int(var)


def pcm_grid(data: Dataset, cause, effect, conds: Sequence, tau_range: Sequence[int] = range(1, 9),
             dim_range: Sequence[int] = range(1, 9), threshold: float = DEFAULT_GAMMA_STAR,
             k: int | None = None, conditioning: str = COMPOSE) -> GridResult:
    """Run multivariate PCM at every ``(tau, dim)`` on the full series.

    Cells that fail (too short, degenerate) are recorded as NaN plus an
    entry in ``errors``.
    """
    i, j = _resolve(data, cause), _resolve(data, effect)
    cs = [_resolve(data, c) for c in conds]
    taus, dims = list(tau_range), list(dim_range)
    shape = (len(taus), len(dims))
    rho_all = np.full(shape, np.nan)
    rho_direct = np.full(shape, np.nan)
    ratio = np.full(shape, np.nan)
    errors = {}
    cache: dict[tuple, PCMResult] = {}
    for a, tau in enumerate(taus):
        for b, dim in enumerate(dims):
            key = (tau, dim, i, j, tuple(cs))
            try:
                if key not in cache:
                    cfg = PCMConfig(EmbedParams(tau, dim, k), threshold, conditioning=conditioning)
                    cache[key] = multi_pcm(data[i], data[j], [data[c] for c in cs], cfg)
                res = cache[key]
            except MXMapError as exc:
                errors[(tau, dim)] = str(exc)
                log.info("grid cell tau=%d dim=%d failed: %s", tau, dim, exc)
                continue
            rho_all[a, b], rho_direct[a, b], ratio[a, b] = res.rho_all, res.rho_direct, res.gamma
    return GridResult(taus, dims, rho_all, rho_direct, ratio, threshold, errors)


@dataclass(frozen=True)
class SweepCase:
    """One labelled partial-cross-mapping test; ``scenario`` is Direct, Indirect or Both."""

    data: Dataset
    cause: int
    effect: int
    conds: tuple[int, ...]
    expected: Link
    scenario: str
    name: str = ""


def default_thresholds() -> list[float]:
    return [round(0.05 * i, 2) for i in range(1, 20)]


def case_results(cases: Sequence[SweepCase], params: EmbedParams = EmbedParams(1, 7),
                 conditioning: str = COMPOSE) -> list[PCMResult]:
    """Partial-cross-mapping scores of every case."""
    cfg = PCMConfig(params, conditioning=conditioning)
    return [multi_pcm(c.data[c.cause], c.data[c.effect], [c.data[x] for x in c.conds], cfg) for c in cases]


def case_ratios(cases: Sequence[SweepCase], params: EmbedParams = EmbedParams(1, 7),
                conditioning: str = COMPOSE) -> list[float]:
    return [r.gamma for r in case_results(cases, params, conditioning)]


def threshold_sweep(cases: Sequence[SweepCase], thresholds: Sequence[float] | None = None,
                    params: EmbedParams = EmbedParams(1, 7), conditioning: str = COMPOSE,
                    ratios: Sequence[float] | None = None, results: Sequence[PCMResult] | None = None,
                    min_rho_all: float = 0.0) -> dict[float, dict[str, int]]:
    """Mislabelled-case counts per threshold and scenario.

    ``ratios`` (plain ``gamma`` values) or ``results`` may carry precomputed
    scores aligned with ``cases``. Cases whose apparent cross-map skill
    ``rho_all`` is below ``min_rho_all`` are left out, mirroring pruning,
    which only ever tests links that the pairwise stage detected; the filter
    needs ``results`` rather than bare ratios.
    """
    thresholds = default_thresholds() if thresholds is None else list(thresholds)
    if ratios is not None and results is not None:
        raise ParameterError("pass either ratios or results, not both")
    if ratios is not None:
        if min_rho_all > 0:
            raise ParameterError("min_rho_all needs full results, not bare ratios")
        results = [PCMResult(1.0, g, g) for g in ratios]
    elif results is None:
        results = case_results(cases, params, conditioning)
    if len(results) != len(cases):
        raise ParameterError("one score per case required")
    kept = [(c, r) for c, r in zip(cases, results) if r.rho_all >= min_rho_all]
    scenarios = sorted({c.scenario for c, _ in kept})
    out = {}
    for th in thresholds:
        counts = {s: 0 for s in scenarios}
        for c, r in kept:
            if classify_link(r, th) != c.expected:
                counts[c.scenario] += 1
        out[th] = counts
    return out


def admissible_thresholds(sweep: dict[float, dict[str, int]], tolerance: int = 2) -> dict[str, list[float]]:
    """Thresholds meeting the mistake tolerance, per scenario and (key ``"all"``) jointly."""
    scenarios = sorted({s for counts in sweep.values() for s in counts})
    per = {s: [th for th, counts in sweep.items() if counts[s] <= tolerance] for s in scenarios}
    per["all"] = [th for th, counts in sweep.items() if all(v <= tolerance for v in counts.values())]
    return per


def cases_from_graph(data: Dataset, truth: CausalGraph, system: str = "") -> list[SweepCase]:
    """Labelled cases implied by a ground-truth graph.

    * Direct: an edge with no mediating path;
    * Both: an edge that also has a mediating path;
    * Indirect: no edge but a directed path.

    The condition set is the union of intermediate nodes over every mediating
    path, as in pruning; for Direct cases, which have none, it is every
    other variable.
    """
    cases = []
    K = truth.K
    for i in range(K):
        for j in range(K):
            if i == j:
                continue
            others = tuple(c for c in range(K) if c not in (i, j))
            if not others:
                continue
            conds = tuple(sorted(truth.intermediate_nodes(i, j))) or others
            label = f"{system}:{truth.names[i]}->{truth.names[j]}"
            if truth.has_edge(i, j):
                scenario = "Both" if truth.has_indirect_path(i, j) else "Direct"
                cases.append(SweepCase(data, i, j, conds, Link.DIRECT, scenario, label))
            elif truth.simple_paths(i, j, skip_direct=False):
                cases.append(SweepCase(data, i, j, conds, Link.INDIRECT, "Indirect", label))
    return cases
