"""Two-phase causal discovery: pairwise CCM, then partial-cross-mapping pruning."""
from __future__ import annotations

import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from itertools import combinations

from .crossmap import CCMResult, ccm_pair
from .embedding import Dataset, EmbedParams
from .errors import MXMapError, ParameterError
from .graph import CausalGraph
from .pcm import DEFAULT_GAMMA_STAR, COMPOSE, PCMConfig, PCMResult, multi_pcm

log = logging.getLogger(__name__)

TABLE2_GAMMA_STAR = 0.6
GATES = ("either", "both")


@dataclass(frozen=True)
class MXMapConfig:
    embed: EmbedParams = EmbedParams()
    ccm_threshold: float = 0.5
    gamma_star: float = DEFAULT_GAMMA_STAR
    tie_epsilon: float = 0.0
    gate: str = "either"
    conditioning: str = COMPOSE
    exclusion: int = 0
    threads: int = 1

    def __post_init__(self):
        if not 0 <= self.ccm_threshold <= 1:
            raise ParameterError(f"ccm_threshold must lie in [0, 1], got {self.ccm_threshold}")
        if not 0 < self.gamma_star < 1:
            raise ParameterError(f"gamma_star must lie in (0, 1), got {self.gamma_star}")
        if self.tie_epsilon < 0:
            raise ParameterError(f"tie_epsilon must be >= 0, got {self.tie_epsilon}")
        if self.gate not in GATES:
            raise ParameterError(f"gate must be one of {GATES}, got {self.gate!r}")
        if self.threads < 1:
            raise ParameterError(f"threads must be >= 1, got {self.threads}")

    @property
    def pcm(self) -> PCMConfig:
        return PCMConfig(self.embed, self.gamma_star, conditioning=self.conditioning, exclusion=self.exclusion)

    @classmethod
    def table2(cls, **overrides) -> "MXMapConfig":
        """k=10, gamma*=0.6, tau=2, dim=6."""
        base = dict(embed=EmbedParams(tau=2, dim=6, k=10), gamma_star=TABLE2_GAMMA_STAR)
        base.update(overrides)
        return cls(**base)

    @classmethod
    def simulated(cls, **overrides) -> "MXMapConfig":
        """tau=1, dim=3, default k, gamma*=0.45."""
        base = dict(embed=EmbedParams(tau=1, dim=3), gamma_star=DEFAULT_GAMMA_STAR)
        base.update(overrides)
        return cls(**base)


@dataclass
class PruneRecord:
    cause: int
    effect: int
    conds: tuple[int, ...]
    result: PCMResult | None
    removed: bool
    error: str | None = None


@dataclass
class DiscoveryReport:
    phase1_graph: CausalGraph
    final_graph: CausalGraph
    pair_scores: dict[tuple[int, int], CCMResult] = field(default_factory=dict)
    pair_errors: dict[tuple[int, int], str] = field(default_factory=dict)
    prune_log: list[PruneRecord] = field(default_factory=list)

    def to_dict(self) -> dict:
        names = self.final_graph.names
        return {
            "names": names,
            "phase1_adjacency": self.phase1_graph.adjacency.tolist(),
            "final_adjacency": self.final_graph.adjacency.tolist(),
            "pair_scores": [
                {"i": names[i], "j": names[j], "beta_forward": r.beta_forward,
                 "beta_backward": r.beta_backward, "library_length": r.library_length}
                for (i, j), r in sorted(self.pair_scores.items())
            ],
            "pair_errors": [{"i": names[i], "j": names[j], "error": e} for (i, j), e in sorted(self.pair_errors.items())],
            "prune_log": [
                {"cause": names[r.cause], "effect": names[r.effect], "conds": [names[c] for c in r.conds],
                 "rho_all": None if r.result is None else r.result.rho_all,
                 "rho_direct": None if r.result is None else r.result.rho_direct,
                 "gamma": None if r.result is None else r.result.gamma,
                 "removed": r.removed, "error": r.error}
                for r in self.prune_log
            ],
        }


def _map(fn, items, threads: int):
    if threads == 1:
        return [fn(it) for it in items]
    with ThreadPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(fn, items))


def orient(result: CCMResult, threshold: float, tie_epsilon: float = 0.0, gate: str = "either") -> tuple[bool, bool]:
    """Edges ``(i -> j, j -> i)`` implied by one pair's cross-map scores.

    The stronger direction wins. With ``gate="either"`` a pair is linked
    unless both scores fall below ``threshold``; ``gate="both"`` requires
    both scores to reach it. Scores within ``tie_epsilon`` of each other,
    both at or above ``threshold``, give a bidirectional link.
    """
    fwd, bwd = abs(result.beta_forward), abs(result.beta_backward)
    if tie_epsilon > 0 and abs(fwd - bwd) <= tie_epsilon and min(fwd, bwd) >= threshold:
        return True, True
    passed = max(fwd, bwd) >= threshold if gate == "either" else min(fwd, bwd) >= threshold
    if not passed:
        return False, False
    return fwd > bwd, bwd > fwd


def phase1(data: Dataset, cfg: MXMapConfig) -> tuple[CausalGraph, dict, dict]:
    """Pairwise CCM graph plus per-pair scores and per-pair failures."""
    pairs = list(combinations(range(len(data)), 2))

    def run(pair):
        i, j = pair
        try:
            return ccm_pair(data[i], data[j], cfg.embed, cfg.exclusion), None
        except MXMapError as exc:
            return None, str(exc)

    g = CausalGraph(data.names)
    scores, errors = {}, {}
    for (i, j), (res, err) in zip(pairs, _map(run, pairs, cfg.threads)):
        if res is None:
            log.warning("pair (%s, %s) skipped: %s", data.names[i], data.names[j], err)
            errors[(i, j)] = err
            continue
        scores[(i, j)] = res
        forward, backward = orient(res, cfg.ccm_threshold, cfg.tie_epsilon, cfg.gate)
        if forward:
            g.add_edge(i, j)
        if backward:
            g.add_edge(j, i)
    return g, scores, errors


def phase2(data: Dataset, g: CausalGraph, cfg: MXMapConfig) -> tuple[CausalGraph, list[PruneRecord]]:
    """Remove edges whose information flows only through mediating paths.

    Condition sets come from the input graph; removals are applied to a copy,
    so the outcome does not depend on the order edges are visited.
    """
    if g.names != data.names:
        raise ParameterError("graph and dataset variables differ")
    snapshot = g.copy()
    tests = [(i, j, tuple(sorted(snapshot.intermediate_nodes(i, j))))
             for i, j in snapshot.edges if snapshot.has_indirect_path(i, j)]
    pcm_cfg = cfg.pcm

    def run(test):
        i, j, conds = test
        try:
            res = multi_pcm(data[i], data[j], [data[c] for c in conds], pcm_cfg)
            return PruneRecord(i, j, conds, res, res.gamma < cfg.gamma_star)
        except MXMapError as exc:
            log.warning("edge %s -> %s kept, test failed: %s", data.names[i], data.names[j], exc)
            return PruneRecord(i, j, conds, None, False, str(exc))

    records = _map(run, tests, cfg.threads)
    out = snapshot.copy()
    for r in records:
        if r.removed:
            out.remove_edge(r.cause, r.effect)
    return out, records


def discover(data: Dataset, cfg: MXMapConfig = MXMapConfig()) -> DiscoveryReport:
    if len(data) < 2:
        raise ParameterError("discovery needs at least two variables")
    g1, scores, errors = phase1(data, cfg)
    final, records = phase2(data, g1, cfg)
    return DiscoveryReport(g1, final, scores, errors, records)
