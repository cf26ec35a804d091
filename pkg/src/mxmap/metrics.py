"""Precision, recall, F1 and structural Hamming distance between adjacency matrices."""
from __future__ import annotations

import json
from dataclasses import asdict, dataclass

import numpy as np

from .errors import DataError
from .graph import CausalGraph


@dataclass(frozen=True)
class MetricsReport:
    precision: float
    recall: float
    f1: float
    shd: int

    def to_json(self) -> str:
        return json.dumps(asdict(self))

    def to_table(self) -> str:
        header = f"{'precision':>10} {'recall':>10} {'f1':>10} {'shd':>5}"
        row = f"{self.precision:>10.4f} {self.recall:>10.4f} {self.f1:>10.4f} {self.shd:>5d}"
        return header + "\n" + row + "\n"


def _matrix(g) -> np.ndarray:
    if isinstance(g, CausalGraph):
        return g.adjacency
    return np.asarray(g, dtype=int)


def evaluate(truth, pred) -> MetricsReport:
    """Entrywise comparison; ``truth`` and ``pred`` are graphs or 0/1 matrices."""
    if isinstance(truth, CausalGraph) and isinstance(pred, CausalGraph) and truth.names != pred.names:
        raise DataError(f"node sets differ: {truth.names} vs {pred.names}")
    a, a_hat = _matrix(truth), _matrix(pred)
    if a.shape != a_hat.shape:
        raise DataError(f"adjacency shapes differ: {a.shape} vs {a_hat.shape}")
    tp = int(np.sum((a_hat == 1) & (a == 1)))
    n_pred = int(np.sum(a_hat == 1))
    n_true = int(np.sum(a == 1))
    precision = tp / n_pred if n_pred else 0.0
    recall = tp / n_true if n_true else 0.0
    f1 = 2 * precision * recall / (precision + recall) if precision + recall > 0 else 0.0
    shd = int(np.sum(a_hat != a))
    return MetricsReport(precision, recall, f1, shd)
