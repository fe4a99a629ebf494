import logging
import os
import subprocess
import sys

import pytest

from catopt.cli import run
from catopt.interval import box_is_empty
from catopt.trace import emit_trace_json, emit_trace_text, load_trace_json

HERE = os.path.dirname(os.path.abspath(__file__))
GOLDEN = os.path.join(HERE, "golden")
SCENARIOS = os.path.join(os.path.dirname(HERE), "scenarios")
S1 = os.path.join(SCENARIOS, "scenario1.prob")
S2 = os.path.join(SCENARIOS, "scenario2.prob")
BRANCHING = ["--branch-override", "y1", "--upper-bound", "assigned", "--explore", "depth"]


def golden(name):
    with open(os.path.join(GOLDEN, name), encoding="utf-8") as fh:
        return fh.read()


def test_first_scenario_output(capsys):
    assert run(["--problem", S1]) == 0
    out = capsys.readouterr().out.splitlines()
    assert out == ["optimal f*=27 at x=10 y1=3 y2=2 (item 2)", "nodes: 1"]


def test_second_scenario_output(capsys):
    assert run(["--problem", S2]) == 0
    assert capsys.readouterr().out.splitlines()[0] == "optimal f*=1 at x=3 y1=1 y2=-1 (item 6)"


@pytest.mark.parametrize("name,args", [
    ("scenario1.txt", [S1]),
    ("scenario1_branching.txt", [S1] + BRANCHING),
    ("scenario2.txt", [S2]),
])
def test_text_traces_match_golden_files(tmp_path, name, args):
    out = tmp_path / "trace.txt"
    assert run(["--problem", args[0], *args[1:], "--trace", "text", "--trace-file", str(out)]) == 0
    assert out.read_text() == golden(name)


def test_json_trace_matches_golden_and_text(tmp_path):
    out = tmp_path / "trace.json"
    assert run(["--problem", S2, "--trace", "json", "--trace-file", str(out)]) == 0
    text = out.read_text()
    assert text == golden("scenario2.json")
    events = load_trace_json(text)
    assert emit_trace_text(events) == golden("scenario2.txt")
    assert emit_trace_json(events) == text


def test_trace_to_stdout(capsys):
    assert run(["--problem", S2, "--trace", "text"]) == 0
    out = capsys.readouterr().out
    assert out.startswith(golden("scenario2.txt"))


def test_runs_are_deterministic(tmp_path):
    paths = []
    for k in range(2):
        p = tmp_path / f"t{k}.json"
        run(["--problem", S1, *BRANCHING, "--trace", "json", "--trace-file", str(p)])
        paths.append(p.read_bytes())
    assert paths[0] == paths[1]


def test_contraction_rows_shrink():
    for name in ("scenario2.json",):
        for ev in load_trace_json(golden(name)):
            if ev.is_contraction and not box_is_empty(ev.after):
                assert all(b.lo <= a.lo and a.hi <= b.hi for a, b in zip(ev.after, ev.before))


# -- exit codes -------------------------------------------------------------

@pytest.mark.parametrize("argv", [
    [],
    ["--problem", S1, "--explore", "sideways"],
    ["--problem", S1, "--epsilon", "abc"],
    ["--problem", S1, "--epsilon", "0"],
    ["--problem", S1, "--trace-file", "x.txt"],
    ["--problem", S1, "--max-nodes", "0"],
    ["--problem", S1, "--branch-override", "z"],
    ["--problem", S1, "--bogus"],
])
def test_usage_errors(argv, capsys):
    assert run(argv) == 64
    err = capsys.readouterr().err
    assert err.startswith("catopt: usage error")
    assert len(err.strip().splitlines()) == 1


def _write(tmp_path, name, text):
    p = tmp_path / name
    p.write_text(text)
    return str(p)


PROBLEM = """vars
  x 0 16
  @y1 0 20
  @y2 -10 10
minimize
  {objective}
subject_to
  c1: 2*y1 = x - y2^2
catalog
  c2: {catalog} (y1, y2)
"""


@pytest.mark.parametrize("objective,catalog,needle", [
    ("y1^", "cat.csv", "offset"),
    ("y1^3 + z", "cat.csv", "undeclared"),
    ("y1^3", "missing.csv", "cannot read"),
    ("y1^3", "bad.csv", "non-numeric"),
])
def test_input_errors(tmp_path, capsys, objective, catalog, needle):
    _write(tmp_path, "cat.csv", "item,y1,y2\n1,4,-8\n2,3,2\n")
    _write(tmp_path, "bad.csv", "item,y1,y2\n1,4,oops\n")
    prob = _write(tmp_path, "p.prob", PROBLEM.format(objective=objective, catalog=catalog))
    assert run(["--problem", prob]) == 65
    err = capsys.readouterr().err
    assert needle in err and len(err.strip().splitlines()) == 1


def test_missing_problem_file(capsys):
    assert run(["--problem", "/nonexistent/p.prob"]) == 65
    assert "cannot read" in capsys.readouterr().err


def test_infeasible_exit_code(tmp_path, capsys):
    _write(tmp_path, "cat.csv", "item,y1,y2\n1,4,-8\n2,3,2\n")
    text = PROBLEM.format(objective="y1^3", catalog="cat.csv")
    prob = _write(tmp_path, "p.prob", text.replace("c1: 2*y1 = x - y2^2", "c1: 2*y1 = x - y2^2\n  x + y1 >= 40"))
    assert run(["--problem", prob]) == 1
    assert capsys.readouterr().out.splitlines()[0] == "infeasible"


def test_limit_exit_code(capsys):
    assert run(["--problem", S1, *BRANCHING, "--max-nodes", "1"]) == 2
    assert capsys.readouterr().out.startswith("limit")


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "catopt", "--problem", S2],
                          capture_output=True, text=True, check=False)
    assert proc.returncode == 0
    assert proc.stdout.startswith("optimal f*=1 at x=3 y1=1 y2=-1 (item 6)")


# -- plots ------------------------------------------------------------------

def test_plots_one_svg_per_phase(tmp_path):
    out = tmp_path / "plots"
    assert run(["--problem", S1, *BRANCHING, "--plot", str(out)]) == 0
    files = sorted(os.listdir(out))
    # HC4, CLUTCH, HC4, BRANCH at the root; CLUTCH per child; HC4 of each child; OBJ-CUT
    assert len(files) == 9
    assert all(f.endswith(".svg") for f in files)
    clutch = (out / files[1]).read_text()
    assert clutch.lstrip().startswith("<?xml") and "<svg" in clutch
    # the empty result of the [5,7] child is annotated
    assert any("discarded" in (out / f).read_text() for f in files if "HC4" in f)


def test_plot_with_three_properties_warns(tmp_path, caplog):
    _write(tmp_path, "c3.csv", "a,b,c\n1,2,3\n2,3,4\n")
    prob = _write(tmp_path, "p.prob", "vars\n @a 0 5\n @b 0 5\n @c 0 5\nminimize\n a + b + c\ncatalog\n c3.csv (a, b, c)\n")
    with caplog.at_level(logging.WARNING, logger="catopt"):
        assert run(["--problem", prob, "--plot", str(tmp_path / "plots")]) == 0
    assert any("plots need exactly 2" in r.getMessage() for r in caplog.records)
    assert not (tmp_path / "plots").exists()
