"""Command-line workflows: traces on disk, certification, sweeps, exit codes.

Everything runs in-process through cli.main so the tests see real exit
codes without subprocess overhead.  Grid densities are kept low; these
tests exercise plumbing, not numerical accuracy.
"""

from __future__ import annotations

import filecmp
import json

import pytest

from wellsolver import cli


def run(argv, capsys):
    """Invoke the CLI and return (exit_code, stdout, stderr).

    Reports and trace bodies go to stdout; status lines go to stderr.
    """
    rc = cli.main(argv)
    captured = capsys.readouterr()
    return rc, captured.out, captured.err


# solve + trace files


def test_solve_writes_versioned_trace(tmp_path, capsys):
    path = tmp_path / "t.csv"
    rc, _out, err = run(
        ["solve", "sym_quartic", "--g", "2", "--grid-density", "150",
         "--out", str(path)],
        capsys,
    )
    assert rc == cli.EXIT_OK
    assert "converged" in err
    lines = path.read_text().splitlines()
    assert lines[0].startswith("# trace-v1 config=")
    digest = lines[0].split("config=")[1]
    assert len(digest) == 64 and all(c in "0123456789abcdef" for c in digest)
    header = next(l for l in lines if not l.startswith("#"))
    assert header == "n,shift,energy,f_origin,f_mid,f_step_max,charge_residual"
    first = next(l for l in lines if l.startswith("0,"))
    # seed row: zero shift, energy at E0, unit f probes
    assert first.split(",")[:4] == ["0", "0", "2", "1"]


def test_rerun_is_byte_identical(tmp_path):
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    argv = ["solve", "sym_quartic", "--g", "2", "--grid-density", "150"]
    assert cli.main(argv + ["--out", str(a)]) == cli.EXIT_OK
    assert cli.main(argv + ["--out", str(b)]) == cli.EXIT_OK
    assert filecmp.cmp(a, b, shallow=False)


@pytest.mark.parametrize("fmt", ["csv", "json"])
def test_solve_certify_round_trip(tmp_path, fmt):
    path = tmp_path / f"t.{fmt}"
    rc = cli.main(
        ["solve", "sym_quartic", "--g", "2", "--grid-density", "150",
         "--format", fmt, "--out", str(path)]
    )
    assert rc == cli.EXIT_OK
    assert cli.main(["certify", str(path)]) == cli.EXIT_OK


def test_json_trace_document_shape(tmp_path):
    path = tmp_path / "t.json"
    cli.main(["solve", "harmonic", "--g", "1", "--grid-density", "100",
              "--format", "json", "--out", str(path)])
    doc = json.loads(path.read_text())
    assert doc["version"] == cli.TRACE_VERSION
    assert doc["case"] == "A"
    assert doc["converged"] is True
    assert doc["E_limit"] == pytest.approx(0.5, abs=1e-12)
    row_keys = {"n", "shift", "energy", "f_origin", "f_mid", "f_step_max",
                "charge_residual"}
    assert set(doc["rows"][0]) == row_keys
    # the fixed point of the reference problem: nothing moves
    assert all(r["shift"] == 0.0 for r in doc["rows"])
    assert all(r["energy"] == 0.5 for r in doc["rows"])


def test_csv_and_json_agree(tmp_path):
    base = ["solve", "sym_quartic", "--g", "2", "--grid-density", "150"]
    pc, pj = tmp_path / "t.csv", tmp_path / "t.json"
    cli.main(base + ["--out", str(pc)])
    cli.main(base + ["--format", "json", "--out", str(pj)])
    dc = cli.read_trace(pc.read_text())
    dj = cli.read_trace(pj.read_text())
    assert dc["config_hash"] == dj["config_hash"]
    assert dc["E_limit"] == pytest.approx(dj["E_limit"], abs=0.0)
    sc = [r["shift"] for r in dc["rows"]]
    sj = [r["shift"] for r in dj["rows"]]
    assert sc == sj


# certify failure modes


def test_corrupt_trace_fails_certification(tmp_path):
    path = tmp_path / "t.csv"
    cli.main(["solve", "sym_quartic", "--g", "2", "--grid-density", "150",
              "--out", str(path)])
    lines = path.read_text().splitlines()
    hdr = next(i for i, l in enumerate(lines) if l.startswith("n,"))
    r2 = lines[hdr + 2].split(",")
    r3 = lines[hdr + 3].split(",")
    r2[1], r3[1] = r3[1], r2[1]
    lines[hdr + 2], lines[hdr + 3] = ",".join(r2), ",".join(r3)
    bad = tmp_path / "bad.csv"
    bad.write_text("\n".join(lines) + "\n")
    assert cli.main(["certify", str(bad)]) == cli.EXIT_VERDICT


def test_certify_report_is_json(tmp_path, capsys):
    path = tmp_path / "t.csv"
    cli.main(["solve", "sym_quartic", "--g", "2", "--grid-density", "150",
              "--out", str(path)])
    capsys.readouterr()
    rc, out, _err = run(["certify", str(path)], capsys)
    assert rc == cli.EXIT_OK
    report = json.loads(out)
    assert report["ok"] is True
    assert report["version"] == "certify-v1"
    assert report["worst_margin"] > 0.0
    kinds = {v["kind"] for v in report["energy_verdicts"]}
    assert kinds == {"shift_ascending"}


def test_malformed_trace_is_config_error(tmp_path):
    path = tmp_path / "junk.csv"
    path.write_text("not a trace\n")
    assert cli.main(["certify", str(path)]) == cli.EXIT_CONFIG


# exit codes


def test_tilt_out_of_range_rejected(capsys):
    rc, _out, err = run(["solve", "asym_quartic", "--g", "5", "--lam", "1.5"],
                        capsys)
    assert rc == cli.EXIT_CONFIG
    assert "tilt" in err


def test_two_level_has_no_iteration(capsys):
    rc, _out, err = run(
        ["solve", "two_level", "--e-inf", "5", "--lam", "0.3",
         "--mu-sq", "0.8"],
        capsys,
    )
    assert rc == cli.EXIT_CONFIG
    assert "twolevel" in err


def test_unknown_verb_is_config_error():
    assert cli.main(["frobnicate"]) == cli.EXIT_CONFIG


def test_help_exits_zero():
    assert cli.main(["--help"]) == 0


def test_iteration_cap_exit_code(tmp_path):
    rc = cli.main(
        ["solve", "sym_quartic", "--g", "2", "--grid-density", "150",
         "--max-iter", "2", "--tol-e", "1e-12"]
    )
    assert rc == cli.EXIT_MAX_ITER


# reporting verbs


def test_oracle_verb_prints_estimate(capsys):
    rc, out, _err = run(
        ["oracle", "sym_quartic", "--g", "2", "--grid-density", "150",
         "--levels", "2"],
        capsys,
    )
    assert rc == cli.EXIT_OK
    value = float(out.splitlines()[0].split("=")[-1].strip()
                  if "=" in out.splitlines()[0]
                  else out.splitlines()[0].split()[-1])
    assert value == pytest.approx(1.40095727, abs=1e-5)


def test_squarewell_verb_compares_routes(capsys):
    rc, out, _err = run(
        ["squarewell", "--w", "3", "--mu", "0.7071067811865476",
         "--alpha", "1", "--beta", "2", "--grid-density", "200"],
        capsys,
    )
    assert rc == cli.EXIT_OK
    for route in ("transcendental", "engine", "oracle", "two-level",
                  "overlap ratio"):
        assert route in out
    assert "double_peak" in out
    # every comparison column stays tight except the two-level reduction
    diffs = []
    for line in out.splitlines():
        parts = line.split()
        if parts and parts[0] in {"engine", "oracle"}:
            diffs.append(abs(float(parts[-1])))
    assert diffs and max(diffs) < 1e-6


def test_twolevel_verb_reports_shift(capsys):
    rc, out, _err = run(
        ["twolevel", "--e-inf", "5", "--lam", "0.3", "--mu-sq", "0.8"],
        capsys,
    )
    assert rc == cli.EXIT_OK
    fields = {}
    for line in out.splitlines():
        if "=" in line:
            key, _, val = line.rpartition("=")
            try:
                fields[key.strip()] = float(val)
            except ValueError:
                pass
    e = fields["ground energy  E"]
    shift = fields["shift below E_inf"]
    assert e == pytest.approx(5.0 - shift, abs=1e-12)
    assert 0.0 < shift < 0.3 + 0.8 / 2


# sweep


def sweep_doc(**over):
    doc = {
        "version": cli.SWEEP_VERSION,
        "base": {
            "problem": "sym_quartic",
            "params": {"g": 2.0},
            "case": "A",
            "grid": {"density": 150.0},
        },
        "sweep": {"params.g": [1.0, 2.0]},
    }
    doc.update(over)
    return doc


def test_sweep_writes_manifest_and_points(tmp_path, monkeypatch, capsys):
    monkeypatch.setenv("HIERARCHY_SOLVER_THREADS", "1")
    cfg = tmp_path / "sweep.json"
    cfg.write_text(json.dumps(sweep_doc()))
    outdir = tmp_path / "out"
    rc, _out, err = run(["sweep", "--config", str(cfg), "--outdir", str(outdir)],
                        capsys)
    assert rc == cli.EXIT_OK
    assert "2 converged, 0 failed" in err
    manifest = json.loads((outdir / "manifest.json").read_text())
    assert manifest["version"] == cli.SWEEP_VERSION
    assert manifest["n_points"] == 2
    hashes = set()
    for point in manifest["points"]:
        assert point["converged"] is True
        assert point["status"] == "tolerance"
        hashes.add(point["config_hash"])
        trace_path = outdir / point["path"]
        assert trace_path.exists()
        doc = cli.read_trace(trace_path.read_text())
        assert doc["config_hash"] == point["config_hash"]
        assert doc["E_limit"] == pytest.approx(point["E_limit"], abs=0.0)
    assert len(hashes) == 2
    es = [p["E_limit"] for p in manifest["points"]]
    assert es[0] < es[1]  # ground energy grows with coupling


def test_sweep_empty_axis(tmp_path, monkeypatch):
    monkeypatch.setenv("HIERARCHY_SOLVER_THREADS", "1")
    cfg = tmp_path / "sweep.json"
    cfg.write_text(json.dumps(sweep_doc(sweep={"params.g": []})))
    outdir = tmp_path / "out"
    assert cli.main(["sweep", "--config", str(cfg),
                     "--outdir", str(outdir)]) == cli.EXIT_OK
    manifest = json.loads((outdir / "manifest.json").read_text())
    assert manifest["n_points"] == 0
    assert manifest["points"] == []


def test_sweep_partial_failure(tmp_path, monkeypatch, capsys):
    monkeypatch.setenv("HIERARCHY_SOLVER_THREADS", "1")
    doc = sweep_doc(
        base={
            "problem": "asym_quartic",
            "params": {"g": 5.0, "lam": 0.2},
            "case": "A",
            "grid": {"density": 150.0},
        },
        sweep={"params.lam": [0.1, 1.5]},
    )
    cfg = tmp_path / "sweep.json"
    cfg.write_text(json.dumps(doc))
    outdir = tmp_path / "out"
    rc, _out, err = run(["sweep", "--config", str(cfg), "--outdir", str(outdir)],
                        capsys)
    assert rc == cli.EXIT_VERDICT
    assert "1 failed" in err
    manifest = json.loads((outdir / "manifest.json").read_text())
    statuses = [p["status"] for p in manifest["points"]]
    assert statuses.count("error") == 1
    failed = next(p for p in manifest["points"] if p["status"] == "error")
    assert "tilt" in failed["error"]


def test_sweep_missing_config_file(tmp_path):
    rc = cli.main(["sweep", "--config", str(tmp_path / "nope.json"),
                   "--outdir", str(tmp_path / "out")])
    assert rc == cli.EXIT_CONFIG


# config hashing


def test_config_hash_ignores_param_order():
    a = cli.ExperimentConfig("asym_quartic", {"g": 5.0, "lam": 0.2})
    b = cli.ExperimentConfig("asym_quartic", {"lam": 0.2, "g": 5.0})
    assert cli.config_hash(a) == cli.config_hash(b)
    assert len(cli.config_hash(a)) == 64


def test_config_hash_separates_cases():
    a = cli.ExperimentConfig("sym_quartic", {"g": 2.0}, case="A")
    b = cli.ExperimentConfig("sym_quartic", {"g": 2.0}, case="B")
    assert cli.config_hash(a) != cli.config_hash(b)


def test_validate_config_rejects_unknown_problem():
    cfg = cli.ExperimentConfig("cubic", {"g": 1.0})
    with pytest.raises(cli.ConfigError):
        cli.validate_config(cfg)
