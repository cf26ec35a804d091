"""Pearson and first-order partial correlation."""
from __future__ import annotations

import numpy as np

from .errors import DegenerateInputError, ParameterError, SingularConditioningError

_SINGULAR_TOL = 1e-12


def _pair(a, b) -> tuple[np.ndarray, np.ndarray]:
    a = np.asarray(a, dtype=np.float64).reshape(-1)
    b = np.asarray(b, dtype=np.float64).reshape(-1)
    if a.size != b.size:
        raise ParameterError(f"lengths differ: {a.size} vs {b.size}")
    if a.size < 2:
        raise ParameterError("correlation needs at least 2 samples")
    return a, b


def correlation(a, b) -> float:
    """Pearson product-moment correlation, clipped to [-1, 1]."""
    a, b = _pair(a, b)
    da = a - a.mean()
    db = b - b.mean()
    saa = da @ da
    sbb = db @ db
    if saa == 0 or sbb == 0:
        raise DegenerateInputError("correlation undefined for a zero-variance series")
    r = (da @ db) / np.sqrt(saa * sbb)
    return float(min(1.0, max(-1.0, r)))


def partial_correlation(a, b, c) -> float:
    """Correlation of ``a`` and ``b`` with the linear effect of ``c`` removed."""
    a, b = _pair(a, b)
    _, c = _pair(a, c)
    r_ab = correlation(a, b)
    r_ac = correlation(a, c)
    r_bc = correlation(b, c)
    denom = (1.0 - r_ac * r_ac) * (1.0 - r_bc * r_bc)
    if denom <= _SINGULAR_TOL:
        raise SingularConditioningError(
            f"conditioning series is (almost) collinear with an operand "
            f"(r_ac={r_ac:.6g}, r_bc={r_bc:.6g})"
        )
    r = (r_ab - r_ac * r_bc) / np.sqrt(denom)
    return float(min(1.0, max(-1.0, r)))
