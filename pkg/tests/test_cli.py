import json
import subprocess
import sys

import pytest

from arbor import __version__
from arbor.cli import EXPERIMENTS, main


def write(path, data):
    path.write_text(json.dumps(data))
    return str(path)


def run(capsys, *argv):
    code = main([str(a) for a in argv])
    out = capsys.readouterr()
    return code, (json.loads(out.out) if out.out else None), out.err


@pytest.fixture
def files(tmp_path):
    """A double star with leaf swaps at both centers, a path and a shift along it."""
    star = {"vertex_count": 6, "edges": [[0, 1], [0, 2], [0, 3], [1, 4], [1, 5]]}
    group = {"domain_size": 6, "generators": [[0, 1, 3, 2, 4, 5], [0, 1, 2, 3, 5, 4]]}
    path = {"vertex_count": 5, "edges": [[0, 1], [1, 2], [2, 3], [3, 4]]}
    shift = {"host_ref": "path.json", "domain_radius": 2, "map": [[0, 1], [1, 2], [2, 3], [3, 4]]}
    return {
        "tree": write(tmp_path / "star.json", star),
        "group": write(tmp_path / "group.json", group),
        "path": write(tmp_path / "path.json", path),
        "shift": write(tmp_path / "shift.json", shift),
        "dir": tmp_path,
    }


def test_every_experiment_is_a_subcommand():
    assert len(EXPERIMENTS) == 16
    with pytest.raises(SystemExit):
        main(["--version"])


def test_classify_a_shift(capsys, files):
    code, report, _ = run(capsys, "classify", "--aut", files["shift"])
    assert code == 0 and report["status"] == "pass"
    assert report["result"]["kind"] == "translation"
    assert report["version"] == __version__ and report["descriptor"]["experiment"] == "classify"


def test_property_e_and_simon(capsys, files):
    code, report, _ = run(capsys, "property-e", "--tree", files["tree"], "--group", files["group"], "--edge", 0, 1)
    assert code == 0 and report["result"]["holds"]
    code, report, _ = run(
        capsys, "simon", "--tree", files["tree"], "--group", files["group"], "--x", 2, "--y", 4, "--z", 0
    )
    assert code == 1 and report["status"] == "fail" and report["result"]["admissible"] is False


def test_bad_inputs_exit_with_two(capsys, files, tmp_path):
    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    assert run(capsys, "blocktree", "--graph", bad)[0] == 2
    missing = write(tmp_path / "missing.json", {"vertex_count": 3})
    code, _, err = run(capsys, "blocktree", "--graph", missing)
    assert code == 2 and "edges" in err
    notperm = write(tmp_path / "np.json", {"domain_size": 6, "generators": [[0, 0, 1, 2, 3, 4]]})
    assert run(capsys, "quotient", "--tree", files["tree"], "--group", notperm)[0] == 2
    assert run(capsys, "property-e", "--tree", files["tree"], "--group", files["group"])[0] == 2
    assert run(capsys, "simon", "--tree", files["tree"], "--group", files["group"], "--x", 2, "--y", 3, "--z", 1)[0] == 2


def test_cap_overflow_is_inconclusive(capsys, files):
    code, report, _ = run(capsys, "quotient", "--tree", files["tree"], "--group", files["group"], "--cap", 1)
    assert code == 1 and report["status"] == "inconclusive" and "CapExceeded" in report["error"]
    assert report["caps"]["group_order"] == 1


def test_descriptor_paths_are_relative_and_flags_win(capsys, files):
    desc = {"experiment": "property_e", "tree_file": "star.json", "group_file": "group.json", "edge": [2, 0]}
    path = write(files["dir"] / "desc.json", desc)
    code, report, _ = run(capsys, "run", path)
    assert code == 0 and report["experiment"] == "property-e"
    assert report["descriptor"]["edge"] == [2, 0]
    code, report, _ = run(capsys, "property-e", "--descriptor", path, "--edge", 0, 1)
    assert code == 0 and report["descriptor"]["edge"] == [0, 1]


def test_descriptor_errors(capsys, files):
    assert run(capsys, "run", write(files["dir"] / "d1.json", {"experiment": "nope"}))[0] == 2
    assert run(capsys, "run", write(files["dir"] / "d2.json", {"experiment": "classify", "bogus": 1}))[0] == 2
    d3 = write(files["dir"] / "d3.json", {"experiment": "classify"})
    assert run(capsys, "simon", "--descriptor", d3)[0] == 2


def test_out_and_dot_files(capsys, files, tmp_path):
    out = tmp_path / "report.json"
    code = main(["blocktree", "--graph", files["tree"], "--out", str(out), "--dot", str(tmp_path / "dots")])
    assert code == 0 and capsys.readouterr().out == ""
    assert json.loads(out.read_text())["status"] == "pass"
    assert "status: pass" in out.with_suffix(".txt").read_text()
    assert sorted(p.name for p in (tmp_path / "dots").iterdir()) == ["blocktree.dot", "graph.dot"]


def test_threaded_primitivity_output_is_identical(capsys, files):
    argv = ["primitivity", "--tree", files["tree"], "--group", files["group"], "--v1", 2, 3, 4, 5]
    one = run(capsys, *argv)
    four = run(capsys, *argv, "--threads", 4)
    assert one[0] == four[0] == 0
    one[1]["descriptor"].pop("threads")
    four[1]["descriptor"].pop("threads")
    assert one[1] == four[1]
    assert one[1]["result"]["found"] == [2, 3, 0]


@pytest.mark.parametrize(
    "argv,status",
    [
        (["colored6", "--depth", "3"], "pass"),
        (["axis-chain", "--example", "caterpillar"], "pass"),
        (["axis-chain", "--example", "regular"], "inconclusive"),
        (["jw-counts", "--example", "triangles"], "pass"),
        (["orbital-search", "--example", "triangles"], "pass"),
        (["commutator", "--radius", "8"], "pass"),
        (["property-h", "--example", "colored", "--policy", "witness"], "pass"),
        (["translation", "--example", "two-translations", "--edge", "0", "1"], "pass"),
    ],
)
def test_examples(capsys, argv, status):
    code, report, _ = run(capsys, *argv)
    assert report["status"] == status and code == (0 if status == "pass" else 1)


def test_module_and_console_entry_points():
    out = subprocess.run([sys.executable, "-m", "arbor", "--version"], capture_output=True, text=True)
    assert out.returncode == 0 and __version__ in out.stdout
