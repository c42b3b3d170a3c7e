import json

import pytest
from click.testing import CliRunner

from thcover.cli import main
from thcover.thermo import Potential, normalize


@pytest.fixture(scope="module")
def bern_file(tmp_path_factory):
    path = tmp_path_factory.mktemp("pots") / "bern.pot"
    Potential.bernoulli(0.25).write(path)
    return str(path)


@pytest.fixture(scope="module")
def markov_file(tmp_path_factory):
    path = tmp_path_factory.mktemp("pots") / "markov.pot"
    normalize(Potential.from_entries({"00": 0.0, "01": -2.0, "10": -1.0, "11": 0.0})).write(path)
    return str(path)


@pytest.fixture(scope="module")
def sft_file(tmp_path_factory):
    path = tmp_path_factory.mktemp("sfts") / "golden.sft"
    path.write_text("forbid = 11\n")
    return str(path)


def invoke(*args):
    return CliRunner().invoke(main, [str(a) for a in args], catch_exceptions=False)


def test_spectrum_outputs_and_pinned_keys(bern_file, tmp_path):
    out = tmp_path / "sp"
    r = invoke("--potential", bern_file, "--out", out, "spectrum",
               "--q-points", 65, "--kappa", 0.5, "--kappa", 2.0)
    assert r.exit_code == 0
    header = (out / "spectrum.csv").read_text().splitlines()[0]
    assert header == "q,P,t,E"
    summary = json.loads((out / "spectrum_summary.json").read_text())
    for key in ("e_minus", "e_max", "e_plus", "h_mu", "degenerate", "kappa_F", "predictions"):
        assert key in summary
    assert summary["e_plus"] == pytest.approx(2.0)
    assert len(summary["predictions"]) == 2
    manifest = json.loads((out / "manifest.json").read_text())
    assert manifest["kind"] == "spectrum"
    assert "potential_text" in manifest["config"]


def test_byte_determinism_same_seed(bern_file, tmp_path):
    outs = []
    for name in ("a", "b"):
        out = tmp_path / name
        invoke("--potential", bern_file, "--seed", 31, "--out", out, "hit",
               "--length", 1 << 14, "--n-max", 10)
        outs.append((out / "hit.csv").read_bytes())
    assert outs[0] == outs[1]


def test_decay_thread_independence(markov_file, tmp_path):
    bodies = []
    for threads in (1, 4, 8):
        out = tmp_path / f"t{threads}"
        r = invoke("--potential", markov_file, "--seed", 5, "--threads", threads,
                   "--out", out, "decay", "--kind", "late-hit",
                   "--n-grid", "5:8", "--gamma", "0.25", "-R", 24)
        assert r.exit_code == 0
        bodies.append((out / "decay.csv").read_bytes())
    assert bodies[0] == bodies[1] == bodies[2]


def test_manifest_roundtrip(bern_file, tmp_path):
    out1 = tmp_path / "first"
    invoke("--potential", bern_file, "--seed", 9, "--out", out1, "cover",
           "--kappa", 2.0, "--length", 1 << 14, "--n-grid", "6:9")
    out2 = tmp_path / "second"
    r = invoke("--config", out1 / "manifest.json", "--out", out2, "cover")
    assert r.exit_code == 0
    assert (out1 / "cover.csv").read_bytes() == (out2 / "cover.csv").read_bytes()


def test_exit_code_2_on_missing_potential(tmp_path):
    r = CliRunner().invoke(main, ["--potential", "/no/such/file", "spectrum"])
    assert r.exit_code == 2
    assert "/no/such/file" in r.output


def test_exit_code_2_on_bad_potential(tmp_path):
    bad = tmp_path / "bad.pot"
    bad.write_text("memory = 2\ntable[00] = 1.0\n")
    r = CliRunner().invoke(main, ["--potential", str(bad), "spectrum"])
    assert r.exit_code == 2


def test_exit_code_2_on_violated_hypothesis(markov_file, tmp_path):
    r = CliRunner().invoke(main, [
        "--potential", markov_file, "--out", str(tmp_path / "x"), "decay",
        "--kind", "multi-early-hit", "--n-grid", "6:8",
        "-a", "0.5", "-b", "0.9", "-c", "0.1", "--gamma", "0.1",
    ])
    assert r.exit_code == 2
    assert "gamma" in r.output


def test_selftest_passes():
    r = CliRunner().invoke(main, ["selftest"])
    assert r.exit_code == 0
    assert "all checks passed" in r.output


def test_sft_command(markov_file, sft_file, tmp_path):
    out = tmp_path / "sft"
    r = invoke("--potential", markov_file, "--out", out, "sft",
               "--sft", sft_file, "--q-points", 33, "--kappa", 1.0)
    assert r.exit_code == 0
    summary = json.loads((out / "sft_summary.json").read_text())
    assert summary["P_A"] <= 0
    assert summary["forbidden"] == ["11"]
    header = (out / "sft.csv").read_text().splitlines()[0]
    assert header == "q,P_A,t_A,E_A"


def test_census_command(bern_file, tmp_path):
    out = tmp_path / "cen"
    r = invoke("--potential", bern_file, "--seed", 3, "--out", out, "census",
               "-n", 8, "--window-count", 1 << 14)
    assert r.exit_code == 0
    lines = (out / "census.csv").read_text().splitlines()
    assert lines[0] == "beta_bin,count,log2_count_over_n,predicted"
    total = json.loads((out / "census_summary.json").read_text())["total_distinct"]
    assert sum(int(float(l.split(",")[1])) for l in lines[1:]) == total


def test_tree_command(bern_file, tmp_path):
    out = tmp_path / "tree"
    r = invoke("--potential", bern_file, "--seed", 4, "--out", out, "tree",
               "--ladder", "12,26", "-c", "0.55", "--epsilon", "0.12")
    assert r.exit_code == 0
    data = json.loads((out / "tree.json").read_text())
    assert data["cantor_dimension_lower_bound"] is not None
    assert len(data["cantor_levels"]) == len(data["cantor_counts"])


def test_circle_command(bern_file, tmp_path):
    out = tmp_path / "circ"
    r = invoke("--potential", bern_file, "--seed", 6, "--out", out, "circle",
               "--kappa", 0.8, "--depth", 8, "--n-start", 4, "--n-stop", 2048)
    assert r.exit_code == 0
    data = json.loads((out / "circle.json").read_text())
    assert data["covered_cells"] + data["uncovered_cells"] == 256


def test_config_file_with_flag_override(bern_file, tmp_path):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"n_max": 6, "length": 1 << 12}))
    out = tmp_path / "o"
    r = invoke("--potential", bern_file, "--config", cfg, "--out", out, "--seed", 1,
               "hit", "--n-max", 8)
    assert r.exit_code == 0
    rows = (out / "hit.csv").read_text().splitlines()
    assert len(rows) == 1 + 8  # explicit flag beats the config file
