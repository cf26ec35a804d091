"""Directed causal graphs that allow cycles.

Adjacency convention: ``adjacency[cause, effect] == 1``.
"""
from __future__ import annotations

import csv
import io
import json
from typing import Iterable, Sequence

import numpy as np

from .errors import DataError, ParameterError, PathLimitError

DEFAULT_PATH_CAP = 10_000


class CausalGraph:
    """Binary adjacency matrix kept in sync with a children map."""

    def __init__(self, names: Sequence[str]):
        names = [str(n) for n in names]
        if len(set(names)) != len(names):
            raise DataError(f"duplicate node names in {names}")
        self.names = names
        self._adj = np.zeros((len(names), len(names)), dtype=np.int8)

    @classmethod
    def from_adjacency(cls, adjacency, names: Sequence[str] | None = None) -> "CausalGraph":
        adj = np.asarray(adjacency)
        if adj.ndim != 2 or adj.shape[0] != adj.shape[1]:
            raise DataError(f"adjacency must be square, got shape {adj.shape}")
        if not np.all(np.isin(adj, (0, 1))):
            raise DataError("adjacency entries must be 0 or 1")
        if np.any(np.diag(adj)):
            raise DataError("self-loops are not allowed")
        g = cls(names if names is not None else [str(i) for i in range(adj.shape[0])])
        if len(g.names) != adj.shape[0]:
            raise DataError(f"{len(g.names)} names for a {adj.shape[0]}-node adjacency")
        g._adj[:] = adj
        return g

    @classmethod
    def from_edges(cls, names: Sequence[str], edges: Iterable[tuple[int, int]]) -> "CausalGraph":
        g = cls(names)
        for i, j in edges:
            g.add_edge(i, j)
        return g

    @property
    def K(self) -> int:
        return len(self.names)

    @property
    def adjacency(self) -> np.ndarray:
        out = self._adj.astype(int)
        out.setflags(write=False)
        return out

    @property
    def children(self) -> dict[int, list[int]]:
        return {i: [int(j) for j in np.flatnonzero(self._adj[i])] for i in range(self.K)}

    @property
    def edges(self) -> list[tuple[int, int]]:
        return [(int(i), int(j)) for i, j in zip(*np.nonzero(self._adj))]

    def n_edges(self) -> int:
        return int(self._adj.sum())

    def copy(self) -> "CausalGraph":
        return CausalGraph.from_adjacency(self._adj, self.names)

    def _check(self, i: int, j: int):
        if not (0 <= i < self.K and 0 <= j < self.K):
            raise ParameterError(f"edge ({i}, {j}) outside {self.K} nodes")
        if i == j:
            raise ParameterError(f"self-loop on node {i} rejected")

    def add_edge(self, i: int, j: int) -> "CausalGraph":
        self._check(i, j)
        self._adj[i, j] = 1
        return self

    def remove_edge(self, i: int, j: int) -> "CausalGraph":
        self._check(i, j)
        self._adj[i, j] = 0
        return self

    def has_edge(self, i: int, j: int) -> bool:
        return bool(self._adj[i, j])

    def __eq__(self, other):
        if not isinstance(other, CausalGraph):
            return NotImplemented
        return self.names == other.names and np.array_equal(self._adj, other._adj)

    def __repr__(self):
        edges = ", ".join(f"{self.names[i]}->{self.names[j]}" for i, j in self.edges)
        return f"CausalGraph([{edges}])"

    # path queries

    def simple_paths(self, i: int, j: int, cap: int = DEFAULT_PATH_CAP, skip_direct: bool = True) -> list[list[int]]:
        """All simple directed paths ``i -> ... -> j``.

        With ``skip_direct`` the single-edge path ``[i, j]`` is left out.
        Raises :class:`PathLimitError` once more than ``cap`` paths are found.
        """
        children = self.children
        paths: list[list[int]] = []
        stack = [(i, [i])]
        while stack:
            node, path = stack.pop()
            for c in reversed(children[node]):
                if c == j:
                    if skip_direct and node == i:
                        continue
                    paths.append(path + [j])
                    if len(paths) > cap:
                        raise PathLimitError(f"more than {cap} simple paths from {i} to {j}")
                elif c not in path:
                    stack.append((c, path + [c]))
        return paths

    def intermediate_nodes(self, i: int, j: int, cap: int = DEFAULT_PATH_CAP) -> set[int]:
        """Interior nodes of every simple path from ``i`` to ``j`` that avoids the direct edge."""
        nodes: set[int] = set()
        for path in self.simple_paths(i, j, cap):
            nodes.update(path[1:-1])
        return nodes

    def has_indirect_path(self, i: int, j: int) -> bool:
        """Whether some simple path ``i -> ... -> j`` of two or more edges exists."""
        if i == j:
            return False
        # a node that reaches j without passing through i, entered from a child of i
        children = self.children
        for start in children[i]:
            if start == j:
                continue
            seen = {i, start}
            stack = [start]
            while stack:
                node = stack.pop()
                for c in children[node]:
                    if c == j:
                        return True
                    if c not in seen:
                        seen.add(c)
                        stack.append(c)
        return False

    # serialization

    def to_json(self) -> str:
        return json.dumps({"names": self.names, "adjacency": self.adjacency.tolist()})

    @classmethod
    def from_json(cls, text: str) -> "CausalGraph":
        try:
            obj = json.loads(text)
            return cls.from_adjacency(np.array(obj["adjacency"], dtype=int).reshape(len(obj["names"]), -1), obj["names"])
        except (KeyError, TypeError, ValueError) as exc:
            if isinstance(exc, DataError):
                raise
            raise DataError(f"invalid graph JSON: {exc}") from exc

    def to_csv(self) -> str:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(self.names)
        for row in self.adjacency:
            writer.writerow(int(v) for v in row)
        return buf.getvalue()

    @classmethod
    def from_csv(cls, text: str) -> "CausalGraph":
        rows = [r for r in csv.reader(io.StringIO(text)) if r]
        if not rows:
            raise DataError("empty adjacency CSV")
        names, body = rows[0], rows[1:]
        if len(body) != len(names):
            raise DataError(f"adjacency CSV has {len(body)} rows for {len(names)} names")
        try:
            adj = np.array([[int(v) for v in r] for r in body])
        except ValueError as exc:
            raise DataError(f"non-integer adjacency entry: {exc}") from exc
        if adj.shape != (len(names), len(names)):
            raise DataError(f"adjacency CSV is not {len(names)}x{len(names)}")
        return cls.from_adjacency(adj, names)

    def to_dot(self) -> str:
        lines = ["digraph causal {"]
        for n in self.names:
            lines.append(f'  "{n}";')
        for i, j in self.edges:
            lines.append(f'  "{self.names[i]}" -> "{self.names[j]}";')
        lines.append("}")
        return "\n".join(lines) + "\n"

    def export(self, fmt: str) -> str:
        if fmt == "json":
            return self.to_json()
        if fmt in ("csv", "matrix-csv"):
            return self.to_csv()
        if fmt == "dot":
            return self.to_dot()
        raise ParameterError(f"unknown graph format {fmt!r}")

    @classmethod
    def load(cls, text: str, fmt: str | None = None) -> "CausalGraph":
        if fmt is None:
            fmt = "json" if text.lstrip().startswith("{") else "csv"
        if fmt == "json":
            return cls.from_json(text)
        if fmt in ("csv", "matrix-csv"):
            return cls.from_csv(text)
        raise ParameterError(f"cannot import graph format {fmt!r}")
