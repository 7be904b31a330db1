import json
import subprocess
import sys

import pytest

from knaster.cli import _run
from knaster.lingraph import Morphism, compose


def run(*argv):
    code, out, err = _run(list(argv))
    return code, out, err


def result(*argv):
    code, out, err = run(*argv)
    assert code == 0, err
    doc = json.loads(out)
    assert doc["verb"] == argv[0] and doc["command"] == list(argv)
    return doc["result"]


def test_amalgamate_example():
    r = result("amalgamate", "--f", "0,1,0", "--f-cod", "2", "--g", "0,1", "--g-cod", "2")
    f, g = Morphism.from_dict(r["f"]), Morphism.from_dict(r["g"])
    fp, gp = Morphism.from_dict(r["f_prime"]), Morphism.from_dict(r["g_prime"])
    assert compose(f, fp) == compose(g, gp)
    assert list(compose(f, fp).values) == r["common"]
    assert {"alpha", "beta", "segments"} <= set(r["plan"])


def test_ramsey_number_example():
    assert result("ramsey-number", "-k", "1", "-m", "4", "-d", "3")["R"] == 10


def test_domain_error_exit_one():
    code, out, err = run("validate", "--values", "0,1,0", "--cod", "3")
    assert code == 1 and out == ""
    assert err.startswith("NotSurjective")


@pytest.mark.parametrize(
    "argv",
    [
        ["bogus"],
        [],
        ["validate", "--values", "0,x", "--cod", "2"],
        ["validate", "--cod", "2"],
        ["generic-verify", "/nonexistent/tower.json"],
        ["enumerate", "--dom", "3", "--cod", "2", "--jobs", "0"],
    ],
)
def test_usage_errors_exit_two(argv):
    code, out, _ = run(*argv)
    assert code == 2 and out == ""


def test_byte_identical_reruns():
    argv = ["generic-build", "--category", "Kstar", "--budget", "4", "--seed", "11"]
    assert run(*argv)[1] == run(*argv)[1]
    argv = ["mono-search", "--A", "2", "--B", "3", "-d", "2", "--samples", "4", "--seed", "3"]
    one = run(*argv)[1]
    assert one == run(*argv)[1]
    # parallel runs give the same results; only the recorded argv differs
    par = json.loads(run(*argv, "--jobs", "2")[1])
    assert par["result"] == json.loads(one)["result"]


def test_validate_and_compose():
    r = result("validate", "--values", "0,1,0,1", "--cod", "2")
    assert r["degree"] == 3
    r = result("compose", "--f", "0,1,0", "--f-cod", "2", "--g", "0,1,2,2", "--g-cod", "3")
    assert r["composite"]["values"] == [0, 1, 0, 0]
    assert r["degree"] == r["degree_product"] == 2


def test_enumerate():
    r = result("enumerate", "--dom", "5", "--cod", "2", "--count-only")
    assert r["count"] == 2**4 - 1
    r = result("enumerate", "--dom", "3", "--cod", "2")
    assert r["morphisms"] == [[0, 0, 1], [0, 1, 0], [0, 1, 1]]


def test_check_replays(tmp_path):
    for argv in (
        ["amalgamate", "--f", "0,1,0,1", "--f-cod", "2", "--g", "0,1,1,0", "--g-cod", "2"],
        ["generic-build", "--category", "K", "--budget", "4", "--seed", "2"],
        ["mono-search", "--A", "2", "--B", "3", "-d", "2", "--seed", "5"],
        ["chain-tower", "--degrees", "2", "--levels", "2"],
    ):
        path = tmp_path / f"{argv[0]}.json"
        path.write_text(run(*argv)[1])
        code, out, err = run("--check", str(path))
        assert code == 0, err
        doc = json.loads(out)
        assert doc["ok"] is True and doc["replayed"] is True and doc["failures"] == []


def test_check_rejects_tampering(tmp_path):
    argv = ["amalgamate", "--f", "0,1,0", "--f-cod", "2", "--g", "0,1", "--g-cod", "2"]
    doc = json.loads(run(*argv)[1])
    doc["result"]["g_prime"]["values"] = [0, 1, 1, 1]
    path = tmp_path / "bad.json"
    path.write_text(json.dumps(doc))
    code, _, _ = run("--check", str(path))
    assert code == 1


def test_tower_resume(tmp_path):
    path = tmp_path / "tower.json"
    path.write_text(run("generic-build", "--budget", "3", "--seed", "1")[1])
    r = result("generic-verify", str(path))
    assert r["ok"] is True and all(r["checks"].values())
    r = result("realize-degree", "--tower", "@" + str(path), "-p", "3", "-q", "2")
    assert r["degree"] == [3, 2]
    # a tower emitted by one verb can be fed to the next
    path.write_text(json.dumps({"result": r}))
    objs = r["tower"]["objects"]
    top, n = str(len(objs)), str(objs[-1]["n"] - 1)
    r = result("separate", "--tower", str(path), "--level", top, "-x", "0", "-y", n)
    assert len(r["tower"]["objects"]) >= len(objs)
    code, _, err = run("separate", "--tower", str(path), "--level", "1", "-x", "0", "-y", "1")
    assert code == 1 and err.startswith("NotSeparated")


def test_at_path_values(tmp_path):
    path = tmp_path / "f.txt"
    path.write_text("0,1,0\n")
    assert result("validate", "--values", "@" + str(path), "--cod", "2")["degree"] == 2


def test_ramsey_cap_env(monkeypatch):
    monkeypatch.setenv("KNASTER_RAMSEY_CAP", "8")
    r = result("ramsey-number", "-k", "2", "-m", "4", "-d", "2")
    assert r["R"] == {"unknown": True, "cap": 8}
    r = result("ramsey-number", "-k", "2", "-m", "3", "-d", "2", "--cap", "6")
    assert r["R"] == 6


def test_ramsey_witness_vacuous():
    r = result("ramsey-witness", "--A", "2:2", "--B", "3:1", "-d", "2")
    assert r["C"]["vacuous"] is True


def test_pl_verbs():
    assert result("commute", "-c", "2", "-d", "3")["commute"] is True
    r = result("lift", "--values", "0,1,0", "--cod", "2")
    assert r["lift"] == result("tent", "-d", "2")
    r = result("discretize", "--degrees", "2", "--levels", "2")
    assert [m["degree"] for m in r["maps"]] == [2]


def test_degree_verbs():
    assert result("degree-color", "--values", "0,1,0,1,0", "--cod", "2", "-n", "3")["color"] == 2
    r = result("infinite-degree", "-n", "3", "--C", "31", "--samples", "5")
    assert r["all_full"] is True


def test_console_script():
    proc = subprocess.run(
        [sys.executable, "-m", "knaster.cli", "tent", "-d", "3"], capture_output=True, text=True, check=False
    )
    assert proc.returncode == 0
    assert json.loads(proc.stdout)["result"]["degree"] == 3
