import json

import pytest

from cfiwsc.cli import main, parse_twist, replay
from cfiwsc.cfi import complete_graph
from cfiwsc.structures import load


@pytest.fixture
def work(tmp_path, monkeypatch):
    monkeypatch.chdir(tmp_path)
    return tmp_path


def run(*argv):
    return main([str(a) for a in argv])


def report(path):
    return json.loads(path.read_text())


def test_parse_twist_forms():
    k4 = complete_graph(4)
    assert parse_twist(k4, "all-zero") == (0,) * 6
    assert parse_twist(k4, "odd") == (1, 0, 0, 0, 0, 0)
    assert parse_twist(k4, "010000") == (0, 1, 0, 0, 0, 0)
    assert parse_twist(k4, "0x3") == (1, 1, 0, 0, 0, 0)
    assert parse_twist(k4, "0-1,2-3") == (1, 0, 0, 0, 0, 1)


def test_bad_twist_is_usage_error(work):
    assert run("cfi", "gen", "--base", "K4", "--twist", "2-9", "--out", "x.json") == 2
    assert run("cfi", "gen", "--base", "K4", "--twist", "0x100", "--out", "x.json") == 2


def test_missing_file_and_bad_args(work):
    assert run("eq", "ck", "--a", "no.json", "--b", "no.json", "--k", "2") == 2
    assert run("cfi", "frobnicate") == 2


def test_cfi_gen_and_ck(work):
    assert run("cfi", "gen", "--base", "C3", "--out", "a.json") == 0
    assert run("cfi", "gen", "--base", "C3", "--twist", "odd", "--out", "b.json") == 0
    assert load(work / "a.json").n == 18
    assert run("eq", "ck", "--a", "a.json", "--b", "b.json", "--k", "2", "--out", "r.json") == 0
    assert report(work / "r.json")["equivalent"] is True
    assert run("eq", "ck", "--a", "a.json", "--b", "b.json", "--k", "3") == 1
    assert run("eq", "game", "--a", "a.json", "--b", "b.json", "--k", "2") == 3
    assert run("eq", "game", "--a", "a.json", "--b", "b.json", "--k", "2",
               "--budget-positions", "200000") == 0


def test_budget_exit_code(work):
    assert run("cfi", "gen", "--base", "K4", "--out", "k.json") == 0
    assert run("eq", "ck", "--a", "k.json", "--b", "k.json", "--k", "3", "--budget-bytes", "10") == 3
    assert run("eq", "game", "--a", "k.json", "--b", "k.json", "--k", "3") == 3


def test_recover_and_export(work):
    run("cfi", "gen", "--base", "K4", "--out", "k.json")
    assert run("cfi", "recover", "--in", "k.json", "--out", "base.json") == 0
    assert load(work / "base.json").n == 4
    assert run("export", "dimacs", "--in", "k.json", "--out", "k.dimacs") == 0
    assert (work / "k.dimacs").read_text().startswith("p edge 40 60")
    assert run("cfi", "gen", "--base", "K4", "--format", "dreadnaut", "--out", "k.dre") == 0
    assert "f=[" in (work / "k.dre").read_text()


def test_multipede_and_glue(work):
    assert run("multipede", "sample", "--n", "12", "--epsilon", "0.8", "--seed", "7", "--out", "b.json") == 0
    assert run("multipede", "check", "--in", "b.json", "--odd", "--out", "r.json") == 0
    assert report(work / "r.json")["odd"] is True
    assert run("cfi", "gen", "--base", "K4", "--variant", "single-pair", "--out", "c.json") == 0
    assert run("glue", "build", "--multipede", "b.json", "--cfi", "c.json",
               "--segments", "0,1,2,3,4,5", "--out", "g.json") == 0
    assert load(work / "g.json").n == 40
    assert run("glue", "extract", "--in", "g.json", "--out", "e.json") == 0
    assert load(work / "e.json").n == 28
    assert run("export", "dimacs", "--in", "g.json") == 2


def test_wsc_commands(work):
    (work / "p4.json").write_text(json.dumps({"n": 4, "relations": {"E": {"arity": 2, "tuples": [[0, 1], [1, 0], [1, 2], [2, 1], [2, 3], [3, 2]]}}}))
    assert run("wsc", "threshold", "--in", "p4.json") == 1
    run("cfi", "gen", "--base", "K4", "--out", "k.json")
    assert run("wsc", "canonize", "--in", "k.json", "--oracle", "cfi", "--out", "canon.json") == 0
    assert load(work / "canon.json").indiv == tuple(range(40))


def test_pipeline_command(work):
    (work / "spec.json").write_text(json.dumps({"steps": [{"op": "cfi-parity-suite", "params": {"base": "C3"}}]}))
    assert run("pipeline", "--spec", "spec.json", "--out", "rep.json") == 0
    assert report(work / "rep.json")["pass"] is True


@pytest.mark.parametrize("argv", [
    ["cfi", "gen", "--base", "prism", "--twist", "odd"],
    ["multipede", "sample", "--n", "14", "--epsilon", "0.7", "--seed", "3", "--odd-meager", "2"],
    ["join", "cfi-omega", "--base", "C3", "--g", "1"],
])
def test_manifest_replay(work, argv):
    assert run(*argv, "--out", "inst.json") == 0
    manifest = work / "inst.json.manifest.json"
    assert manifest.exists()
    ok, want, got = replay(manifest)
    assert ok and want == got
    assert run("verify-manifest", "--in", "inst.json") == 0


def test_tampered_output_fails_verification(work):
    run("cfi", "gen", "--base", "C3", "--out", "a.json")
    m = json.loads((work / "a.json.manifest.json").read_text())
    m["output_sha256"] = "0" * 64
    (work / "a.json.manifest.json").write_text(json.dumps(m))
    assert run("verify-manifest", "--in", "a.json") == 1
