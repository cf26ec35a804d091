import json

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from mxmap import CausalGraph, DataError, evaluate


def oracle(a, b):
    """Per-entry loop over the two adjacency matrices."""
    tp = npred = ntrue = shd = 0
    for i in range(len(a)):
        for j in range(len(a)):
            tp += a[i][j] == 1 and b[i][j] == 1
            npred += b[i][j] == 1
            ntrue += a[i][j] == 1
            shd += a[i][j] != b[i][j]
    p = tp / npred if npred else 0.0
    r = tp / ntrue if ntrue else 0.0
    f = 2 * p * r / (p + r) if p + r else 0.0
    return p, r, f, shd


chain = CausalGraph.from_edges("xyz", [(0, 1), (1, 2)])


def test_identity():
    rep = evaluate(chain, chain)
    assert (rep.precision, rep.recall, rep.f1, rep.shd) == (1.0, 1.0, 1.0, 0)


def test_empty_prediction():
    rep = evaluate(chain, CausalGraph("xyz"))
    assert (rep.precision, rep.recall, rep.f1, rep.shd) == (0.0, 0.0, 0.0, 2)


def test_extra_shortcut_edge():
    pred = CausalGraph.from_edges("xyz", [(0, 1), (1, 2), (0, 2)])
    rep = evaluate(chain, pred)
    assert rep.precision == pytest.approx(2 / 3)
    assert rep.recall == 1.0
    assert rep.f1 == pytest.approx(0.8)
    assert rep.shd == 1


def test_reversed_edge_costs_two():
    pred = CausalGraph.from_edges("xyz", [(1, 0), (1, 2)])
    assert evaluate(chain, pred).shd == 2


def test_mismatch_errors():
    with pytest.raises(DataError):
        evaluate(chain, CausalGraph("xyw"))
    with pytest.raises(DataError):
        evaluate(np.zeros((3, 3)), np.zeros((2, 2)))


def test_report_serialization():
    rep = evaluate(chain, chain)
    assert json.loads(rep.to_json()) == {"precision": 1.0, "recall": 1.0, "f1": 1.0, "shd": 0}
    lines = rep.to_table().splitlines()
    assert lines[0].split() == ["precision", "recall", "f1", "shd"]


mats = st.integers(1, 8).flatmap(
    lambda K: st.tuples(*[st.lists(st.lists(st.integers(0, 1), min_size=K, max_size=K), min_size=K, max_size=K)] * 3)
)


@settings(max_examples=200, deadline=None)
@given(mats)
def test_entrywise_oracle_symmetry_triangle(m):
    a, b, c = (np.array(x) for x in m)
    rep = evaluate(a, b)
    p, r, f, shd = oracle(a, b)
    assert (rep.precision, rep.recall, rep.f1, rep.shd) == (p, r, f, shd)
    assert evaluate(b, a).shd == rep.shd
    assert evaluate(a, c).shd <= rep.shd + evaluate(b, c).shd
