"""Delay-coordinate embeddings of scalar and multivariate time series.

Row ``r`` of every embedding corresponds to the absolute time index
``t = offset + r`` of the dataset it was built from, so neighbor indices can
be translated between embeddings of the same dataset without adjustment.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

from .errors import DataError, ParameterError


@dataclass(frozen=True)
class TimeSeries:
    """A named, finite, equally sampled real-valued series."""

    name: str
    values: np.ndarray

    def __post_init__(self):
        values = np.asarray(self.values, dtype=np.float64).reshape(-1)
        if values.size < 1:
            raise DataError(f"series {self.name!r} is empty")
        if not np.all(np.isfinite(values)):
            raise DataError(f"series {self.name!r} contains non-finite values")
        values.setflags(write=False)
        object.__setattr__(self, "values", values)

    def __len__(self):
        return self.values.size

    def truncate(self, length: int) -> "TimeSeries":
        return TimeSeries(self.name, self.values[:length])


@dataclass(frozen=True)
class Dataset:
    """Equal-length series observed from one dynamical system."""

    variables: tuple[TimeSeries, ...]

    def __post_init__(self):
        variables = tuple(self.variables)
        if not variables:
            raise DataError("dataset has no variables")
        lengths = {len(v) for v in variables}
        if len(lengths) != 1:
            raise DataError(f"series lengths differ: {sorted(lengths)}")
        names = [v.name for v in variables]
        if len(set(names)) != len(names):
            raise DataError(f"duplicate variable names in {names}")
        object.__setattr__(self, "variables", variables)

    @classmethod
    def from_array(cls, values, names: Sequence[str] | None = None) -> "Dataset":
        """Build from a ``(T, K)`` array; names default to ``x0 .. x{K-1}``."""
        arr = np.asarray(values, dtype=np.float64)
        if arr.ndim == 1:
            arr = arr[:, None]
        if arr.ndim != 2:
            raise DataError(f"expected a 2-D array, got shape {arr.shape}")
        if names is None:
            names = [f"x{i}" for i in range(arr.shape[1])]
        if len(names) != arr.shape[1]:
            raise DataError(f"{len(names)} names for {arr.shape[1]} columns")
        return cls(tuple(TimeSeries(n, arr[:, i]) for i, n in enumerate(names)))

    @property
    def T(self) -> int:
        return len(self.variables[0])

    @property
    def names(self) -> list[str]:
        return [v.name for v in self.variables]

    def __len__(self):
        return len(self.variables)

    def __getitem__(self, key) -> TimeSeries:
        if isinstance(key, str):
            return self.variables[self.index(key)]
        return self.variables[key]

    def index(self, name: str) -> int:
        try:
            return self.names.index(name)
        except ValueError:
            raise DataError(f"no variable named {name!r}") from None

    def to_array(self) -> np.ndarray:
        return np.column_stack([v.values for v in self.variables])

    def truncate(self, length: int) -> "Dataset":
        return Dataset(tuple(v.truncate(length) for v in self.variables))

    def window(self, start: int, length: int) -> "Dataset":
        if start < 0 or start + length > self.T:
            raise ParameterError(f"window [{start}, {start + length}) outside [0, {self.T})")
        return Dataset(tuple(TimeSeries(v.name, v.values[start:start + length]) for v in self.variables))

    def zscore(self) -> "Dataset":
        """Per-variable standardization; constant series are only centered."""
        out = []
        for v in self.variables:
            sd = v.values.std()
            centered = v.values - v.values.mean()
            out.append(TimeSeries(v.name, centered / sd if sd > 0 else centered))
        return Dataset(tuple(out))


@dataclass(frozen=True)
class EmbedParams:
    """Lag ``tau``, embedding dimension ``dim`` and neighbor count ``k``.

    ``k=None`` selects the simplex default ``dim + 1``.
    """

    tau: int = 1
    dim: int = 3
    k: int | None = None

    def __post_init__(self):
        for name in ("tau", "dim"):
            value = getattr(self, name)
            if isinstance(value, bool) or not isinstance(value, (int, np.integer)) or value < 1:
                raise ParameterError(f"{name} must be a positive integer, got {value!r}")
        if self.k is not None and (isinstance(self.k, bool) or not isinstance(self.k, (int, np.integer)) or self.k < 1):
            raise ParameterError(f"k must be a positive integer, got {self.k!r}")

    @property
    def knn(self) -> int:
        return self.dim + 1 if self.k is None else int(self.k)

    @property
    def offset(self) -> int:
        """First time index with a complete delay vector."""
        return (self.dim - 1) * self.tau

    def min_length(self) -> int:
        return self.offset + 1


@dataclass(frozen=True)
class Embedding:
    points: np.ndarray
    offset: int
    source_names: tuple[str, ...]
    params: EmbedParams = field(default_factory=EmbedParams)

    def __post_init__(self):
        pts = np.asarray(self.points, dtype=np.float64)
        if pts.ndim != 2:
            raise DataError(f"embedding points must be 2-D, got shape {pts.shape}")
        pts.setflags(write=False)
        object.__setattr__(self, "points", pts)

    def __len__(self):
        return self.points.shape[0]

    @property
    def n_rows(self) -> int:
        return self.points.shape[0]

    @property
    def times(self) -> np.ndarray:
        return np.arange(self.offset, self.offset + self.n_rows)

    @property
    def end(self) -> int:
        """One past the last absolute time index covered."""
        return self.offset + self.n_rows


def _values(series) -> tuple[str, np.ndarray]:
    if isinstance(series, TimeSeries):
        return series.name, series.values
    arr = np.asarray(series, dtype=np.float64).reshape(-1)
    return "", arr


def delay_matrix(values: np.ndarray, tau: int, dim: int) -> np.ndarray:
    """Rows ``[x_t, x_{t-tau}, ..., x_{t-(dim-1)tau}]`` for ``t >= (dim-1)*tau``."""
    values = np.asarray(values, dtype=np.float64).reshape(-1)
    offset = (dim - 1) * tau
    n_rows = values.size - offset
    if n_rows < 1:
        raise ParameterError(
            f"series of length {values.size} too short for tau={tau}, dim={dim}; "
            f"need at least {offset + 1} samples"
        )
    cols = [values[offset - j * tau: offset - j * tau + n_rows] for j in range(dim)]
    return np.column_stack(cols)


def build_delay_embedding(series, params: EmbedParams, base_offset: int = 0) -> Embedding:
    """Univariate delay embedding of ``series``.

    ``base_offset`` is the absolute time of ``series[0]``; it is non-zero only
    when embedding a reconstruction that itself starts late.
    """
    name, values = _values(series)
    points = delay_matrix(values, params.tau, params.dim)
    return Embedding(points, base_offset + params.offset, (name,), params)


def build_multivariate_embedding(series_set: Iterable, params: EmbedParams, base_offset: int = 0) -> Embedding:
    """Stack univariate embeddings sharing one ``(tau, dim)`` side by side."""
    items = [_values(s) for s in series_set]
    if not items:
        raise ParameterError("cannot embed an empty collection of series")
    lengths = {v.size for _, v in items}
    if len(lengths) != 1:
        raise DataError(f"series lengths differ: {sorted(lengths)}")
    blocks = [delay_matrix(v, params.tau, params.dim) for _, v in items]
    return Embedding(
        np.hstack(blocks),
        base_offset + params.offset,
        tuple(n for n, _ in items),
        params,
    )
