import json
import subprocess
import sys

import numpy as np
import pytest

from mxmap import CausalGraph
from mxmap.cli import atomic_write, loglog_slope, main, read_dataset


def run(argv, capsys):
    code = main(argv)
    out, err = capsys.readouterr()
    return code, out, err


def test_gen_shape_and_determinism(tmp_path, capsys):
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    assert run(["gen", "3V_chain", "--length", "3500", "-o", str(a)], capsys)[0] == 0
    assert run(["gen", "3V_chain", "--length", "3500", "-o", str(b)], capsys)[0] == 0
    assert a.read_bytes() == b.read_bytes()
    lines = a.read_text().splitlines()
    assert lines[0] == "x,y,z" and len(lines) == 3501
    d = read_dataset(a)
    assert d.T == 3500 and len(d) == 3


def test_gen_full_precision_round_trip(tmp_path, capsys):
    from mxmap import generate, get_preset

    p = tmp_path / "d.csv"
    run(["gen", "4V_chain", "--length", "50", "--seed", "3", "--noise-std", "0.01", "-o", str(p)], capsys)
    want = generate(get_preset("4V_chain"), 50, __import__("mxmap").NoiseConfig(0.01), 3).to_array()
    np.testing.assert_array_equal(read_dataset(p).to_array(), want)


def test_unknown_preset_lists_presets(capsys):
    code, _, err = run(["gen", "bogus"], capsys)
    assert code == 2
    assert "3V_chain" in err and "7V_cycle" in err


def test_presets_command(capsys):
    code, out, _ = run(["presets"], capsys)
    assert code == 0 and "4V_cycle" in out


def test_discover_table2_profile_on_chain(tmp_path, capsys):
    data, truth, pred = tmp_path / "d.csv", tmp_path / "t.json", tmp_path / "p.json"
    run(["gen", "4V_chain", "--seed", "1", "-o", str(data), "--truth", str(truth)], capsys)
    code, _, _ = run(["discover", str(data), "--profile", "table2", "-o", str(pred), "--report", str(tmp_path / "r.json")], capsys)
    assert code == 0
    assert CausalGraph.from_json(pred.read_text()) == CausalGraph.from_json(truth.read_text())
    report = json.loads((tmp_path / "r.json").read_text())
    assert report["names"] == ["w", "x", "y", "z"]
    code, out, _ = run(["eval", str(truth), str(pred), "--json"], capsys)
    assert json.loads(out)["shd"] == 0


def test_discover_explicit_flags_override_profile(tmp_path, capsys):
    data = tmp_path / "d.csv"
    run(["gen", "3V_chain", "--length", "400", "-o", str(data)], capsys)
    code, out, _ = run(["discover", str(data), "--profile", "table2", "--dim", "3", "--knn", "4",
                        "--gamma-star", "0.45", "--format", "dot"], capsys)
    assert code == 0 and out.startswith("digraph")


def test_discover_two_columns(tmp_path, capsys):
    from mxmap import generate, get_preset
    from mxmap.cli import dataset_to_csv

    d = generate(get_preset("3V_chain"), 800, seed=0)
    p = tmp_path / "two.csv"
    p.write_text("\n".join(line.rsplit(",", 1)[0] for line in dataset_to_csv(d).splitlines()) + "\n")
    code, out, _ = run(["discover", str(p), "--format", "csv"], capsys)
    assert code == 0
    assert CausalGraph.from_csv(out).edges == [(0, 1)]


@pytest.mark.parametrize("body, line", [("1,2\n3,x\n", 3), ("1,2\n3\n", 3), ("1,2\n3,4\n5,nan\n", 4)])
def test_malformed_csv_names_first_bad_line(tmp_path, capsys, body, line):
    p = tmp_path / "bad.csv"
    p.write_text("a,b\n" + body)
    code, _, err = run(["discover", str(p)], capsys)
    assert code == 3
    assert f"line {line}" in err


def test_missing_file_is_data_error(tmp_path, capsys):
    assert run(["discover", str(tmp_path / "none.csv")], capsys)[0] == 3


def test_usage_errors(tmp_path, capsys):
    with pytest.raises(SystemExit) as exc:
        main(["discover"])
    assert exc.value.code == 2
    data = tmp_path / "d.csv"
    run(["gen", "3V_chain", "--length", "100", "-o", str(data)], capsys)
    assert run(["discover", str(data), "--tau", "0"], capsys)[0] == 2
    assert run(["discover", str(data), "--gamma-star", "1.5"], capsys)[0] == 2


def test_degenerate_data_exit_code(tmp_path, capsys):
    p = tmp_path / "flat.csv"
    p.write_text("a,b,c\n" + "".join(f"{i % 7 / 7},0.5,{(i * 3) % 11 / 11}\n" for i in range(60)))
    # every pair involving the flat column fails; discovery itself still succeeds
    code, _, err = run(["discover", str(p)], capsys)
    assert code == 0 and "skipped" in err
    # a generator that cannot stay bounded is a numerical failure
    from mxmap.cli import exit_code
    from mxmap import DegenerateInputError, GenerationError

    assert exit_code(DegenerateInputError("x")) == 4
    assert exit_code(GenerationError("x")) == 4


def test_eval_name_mismatch(tmp_path, capsys):
    a, b = tmp_path / "a.json", tmp_path / "b.csv"
    a.write_text(CausalGraph.from_edges("xyz", [(0, 1)]).to_json())
    b.write_text(CausalGraph.from_edges("xyw", [(0, 1)]).to_csv())
    assert run(["eval", str(a), str(b)], capsys)[0] == 3


def test_eval_hand_counted_matrices(tmp_path, capsys):
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    a.write_text("x,y,z\n0,1,0\n0,0,1\n0,0,0\n")
    b.write_text("x,y,z\n0,1,1\n0,0,1\n0,0,0\n")
    code, out, _ = run(["eval", str(a), str(b), "--json"], capsys)
    rep = json.loads(out)
    assert code == 0
    assert rep["shd"] == 1 and rep["recall"] == 1.0
    assert rep["precision"] == pytest.approx(2 / 3) and rep["f1"] == pytest.approx(0.8)


def test_grid_command_writes_surfaces(tmp_path, capsys):
    data = tmp_path / "d.csv"
    run(["gen", "3V_chain", "--length", "600", "-o", str(data)], capsys)
    code, out, _ = run(["grid", str(data), "--cause", "x", "--effect", "z", "--tau-max", "2", "--dim-max", "3",
                        "--outdir", str(tmp_path / "g"), "--case", "xz"], capsys)
    assert code == 0
    assert (tmp_path / "g" / "xz_label.csv").exists()
    assert out.splitlines()[0].split() == ["tau\\dim", "1", "2", "3"]


def test_sweep_command(capsys):
    code, out, _ = run(["sweep", "--presets", "3V_chain", "--length", "800", "--json"], capsys)
    assert code == 0
    res = json.loads(out)
    assert "0.45" in res["mistakes"] and "all" in res["admissible"]


def test_mirage_command(capsys):
    code, out, _ = run(["mirage", "--length", "1000", "--n", "5"], capsys)
    res = json.loads(out)
    assert code == 0 and len(res["windows"]) == 5 and "w-x" in res["summary"]


def test_bench_runtime_single_k(capsys):
    code, out, _ = run(["bench-runtime", "--max-k", "3", "--length", "300", "--repeat", "1"], capsys)
    assert code == 0
    assert out.strip().splitlines()[-1] == "slope undefined"
    assert run(["bench-runtime", "--max-k", "2"], capsys)[0] == 2


def test_loglog_slope():
    ks = np.array([3, 4, 5, 6])
    assert loglog_slope(ks, 0.01 * ks ** 2.0) == pytest.approx(2.0)
    assert loglog_slope([3], [1.0]) is None


def test_atomic_write_replaces_and_cleans_up(tmp_path):
    p = tmp_path / "sub" / "f.txt"
    atomic_write(p, "one")
    atomic_write(p, "two")
    assert p.read_text() == "two"
    assert [q.name for q in p.parent.iterdir()] == ["f.txt"]


def test_console_entry_point(tmp_path):
    out = subprocess.run([sys.executable, "-m", "mxmap.cli", "presets"], capture_output=True, text=True)
    assert out.returncode == 0 and "3V_chain" in out.stdout
