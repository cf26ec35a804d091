import numpy as np
import pytest

from mxmap import (
    EmbedParams,
    Link,
    ParameterError,
    PCMConfig,
    PCMResult,
    SweepCase,
    admissible_thresholds,
    cases_from_graph,
    generate,
    get_preset,
    multi_pcm,
    pcm_grid,
    threshold_sweep,
)
from mxmap.gridsearch import default_thresholds


def test_one_cell_grid_equals_single_call(chain3):
    g = pcm_grid(chain3, "x", "z", ["y"], [2], [4])
    r = multi_pcm(chain3["x"], chain3["z"], [chain3["y"]], PCMConfig(EmbedParams(2, 4)))
    assert (g.rho_all_surface[0, 0], g.rho_direct_surface[0, 0], g.ratio_surface[0, 0]) == (r.rho_all, r.rho_direct, r.gamma)
    assert g.label(2, 4) is (Link.DIRECT if r.gamma >= 0.45 else Link.INDIRECT)


def test_failed_cells_are_recorded(chain3):
    short = chain3.truncate(30)
    g = pcm_grid(short, 0, 2, [1], [1, 8], [3, 8])
    assert np.isnan(g.ratio_surface[1, 1])
    assert (8, 8) in g.errors
    assert not np.isnan(g.ratio_surface[0, 0])
    assert g.label_surface[1, 1] is None


def test_labels_follow_ratio_and_threshold(chain3):
    g = pcm_grid(chain3, "x", "z", ["y"], [1, 2], [2, 3, 4])
    for (a, b), r in np.ndenumerate(g.ratio_surface):
        assert g.label_surface[a, b] is (Link.DIRECT if r >= g.threshold else Link.INDIRECT)
    correct, total = g.count(Link.INDIRECT)
    assert total == 6 and 0 <= correct <= 6


def test_csv_export(tmp_path, chain3):
    g = pcm_grid(chain3, "x", "z", ["y"], [1, 2], [3, 4])
    paths = g.write_csv(tmp_path, "xz")
    assert sorted(p.name for p in paths) == ["xz_label.csv", "xz_ratio.csv", "xz_rho_all.csv", "xz_rho_direct.csv"]
    rows = (tmp_path / "xz_ratio.csv").read_text().splitlines()
    assert rows[0] == "tau\\dim,3,4"
    assert float(rows[1].split(",")[1]) == g.ratio_surface[0, 0]


def test_sweep_trivial_cases(chain3):
    case = SweepCase(chain3, 0, 2, (1,), Link.DIRECT, "Direct")
    sweep = threshold_sweep([case], [0.1, 0.9], ratios=[0.5])
    assert sweep == {0.1: {"Direct": 0}, 0.9: {"Direct": 1}}
    assert threshold_sweep([], [0.2, 0.4], ratios=[]) == {0.2: {}, 0.4: {}}
    with pytest.raises(ParameterError):
        threshold_sweep([case], ratios=[0.1, 0.2])


def test_sweep_monotone_in_threshold(chain3):
    cases = [SweepCase(chain3, 0, 2, (1,), lab, lab.value) for lab in (Link.DIRECT, Link.INDIRECT)] * 3
    ratios = [0.1, 0.3, 0.5, 0.7, 0.9, 0.2]
    sweep = threshold_sweep(cases, default_thresholds(), ratios=ratios)
    d = [sweep[t]["Direct"] for t in sorted(sweep)]
    i = [sweep[t]["Indirect"] for t in sorted(sweep)]
    assert d == sorted(d) and i == sorted(i, reverse=True)


def test_min_rho_all_filter(chain3):
    cases = [SweepCase(chain3, 0, 2, (1,), Link.DIRECT, "Direct")] * 2
    results = [PCMResult(0.9, 0.1, 0.1 / 0.9), PCMResult(0.2, 0.2, 1.0)]
    assert threshold_sweep(cases, [0.5], results=results) == {0.5: {"Direct": 1}}
    assert threshold_sweep(cases, [0.5], results=results, min_rho_all=0.5) == {0.5: {"Direct": 1}}
    assert threshold_sweep(cases, [0.05], results=results, min_rho_all=0.5) == {0.05: {"Direct": 0}}
    with pytest.raises(ParameterError):
        threshold_sweep(cases, [0.5], ratios=[0.1, 1.0], min_rho_all=0.5)


def test_admissible():
    sweep = {0.1: {"A": 0, "B": 3}, 0.2: {"A": 2, "B": 1}, 0.3: {"A": 4, "B": 0}}
    adm = admissible_thresholds(sweep)
    assert adm == {"A": [0.1, 0.2], "B": [0.2, 0.3], "all": [0.2]}


def test_cases_from_graph():
    pre = get_preset("4V_noCycle")
    data = generate(pre, 100, seed=0)
    cases = {(c.cause, c.effect): c for c in cases_from_graph(data, pre.truth, "s")}
    assert cases[(0, 1)].scenario == "Direct" and cases[(0, 1)].conds == (2, 3)
    assert cases[(0, 3)].scenario == "Both" and cases[(0, 3)].conds == (1, 2)
    assert cases[(0, 2)].scenario == "Indirect" and cases[(0, 2)].expected is Link.INDIRECT
    assert cases[(0, 2)].conds == (1,)
    assert (3, 0) not in cases
    assert cases[(0, 3)].name == "s:w->z"
