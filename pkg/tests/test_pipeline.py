"""Config validation, orchestration determinism, caching, and emission.

The fixture job is C2 acting on the projective line over GF(2) with a small
degree window, so a full analyze run takes well under a second and the
byte-identity comparisons can afford to run it several times.
"""

import json
import os

import pytest

from sympow.cli import main
from sympow.pipeline import (CHECKS, ConfigError, canonical_json,
                             config_from_dict, job_key, load_config, run,
                             run_single)

BASE = {
    "field": {"p": 2, "e": 1},
    "generators": ["2 2\n1 1\n0 1\n"],
    "n_max": 16,
    "seed": 7,
    "checks": ["decompose", "description", "growth", "ramification"],
}


def write_config(tmp_path, name="job.json", **overrides):
    raw = {**BASE, **overrides}
    for key in [k for k, v in raw.items() if v is None]:
        del raw[key]
    path = tmp_path / name
    path.write_text(json.dumps(raw))
    return str(path)


def test_load_config_minimal(tmp_path):
    cfg = load_config(write_config(tmp_path))
    assert cfg.p == 2 and cfg.e == 1
    assert cfg.n_max == 16 and cfg.seed == 7
    assert cfg.checks == ("decompose", "description", "growth", "ramification")
    assert cfg.output_format == "json" and cfg.jobs == 1


@pytest.mark.parametrize("overrides,fragment", [
    ({"seed": None}, "seed required"),
    ({"generators": ["2 3\n1 1 0\n0 1 1\n"]}, "generator 0 is not square"),
    ({"generators": ["2 2\n1 1\n0 1\n", "3 3\n1 0 0\n0 1 0\n0 0 1\n"]}, "expected 2"),
    ({"n_max": 3}, "n_max"),
    ({"checks": ["decompose", "frobnicate"]}, "unknown checks"),
    ({"output": {"format": "yaml"}}, "output format"),
    ({"generators": []}, "generators"),
    ({"m_candidates": [2, 0]}, "m_candidates"),
])
def test_config_validation_errors(tmp_path, overrides, fragment):
    path = write_config(tmp_path, **overrides)
    with pytest.raises(ConfigError, match=fragment):
        load_config(path)


def test_parse_error_reports_line(tmp_path):
    path = tmp_path / "broken.json"
    path.write_text('{\n  "field": {"p": 2},\n  oops\n}')
    with pytest.raises(ConfigError, match="line 3"):
        load_config(str(path))


def test_missing_file_is_config_error():
    with pytest.raises(ConfigError):
        load_config("/nonexistent/job.json")


def test_analyze_deterministic_and_cache_sound(tmp_path):
    cfg_path = write_config(tmp_path, cache_dir=str(tmp_path / "cache"))
    outs = [str(tmp_path / f"r{i}.json") for i in range(3)]
    assert main(["analyze", "--config", cfg_path, "--output", outs[0]]) == 0
    # warm cache
    assert main(["analyze", "--config", cfg_path, "--output", outs[1]]) == 0
    import shutil
    shutil.rmtree(tmp_path / "cache")
    # cold again
    assert main(["analyze", "--config", cfg_path, "--output", outs[2]]) == 0
    blobs = [open(o, "rb").read() for o in outs]
    assert blobs[0] == blobs[1] == blobs[2]
    report = json.loads(blobs[0])
    assert report["errors"] == {}
    assert report["checks"]["description"]["found"]
    assert "volatile" not in report


def test_parallel_jobs_match_sequential(tmp_path):
    cfg_path = write_config(tmp_path)
    a, b = str(tmp_path / "seq.json"), str(tmp_path / "par.json")
    assert main(["analyze", "--config", cfg_path, "--output", a]) == 0
    assert main(["analyze", "--config", cfg_path, "--output", b, "--jobs", "2"]) == 0
    assert open(a, "rb").read() == open(b, "rb").read()


def test_seed_override_changes_echo_not_content(tmp_path):
    cfg_path = write_config(tmp_path)
    a, b = str(tmp_path / "s7.json"), str(tmp_path / "s8.json")
    main(["analyze", "--config", cfg_path, "--output", a])
    main(["analyze", "--config", cfg_path, "--output", b, "--seed", "8"])
    ra, rb = json.load(open(a)), json.load(open(b))
    assert ra["echo"]["seed"] == 7 and rb["echo"]["seed"] == 8
    # the decomposition itself is canonical, whatever the seed
    assert ra["checks"]["decompose"]["vectors"] == rb["checks"]["decompose"]["vectors"]


def test_csv_emission_row_counts(tmp_path):
    cfg_path = write_config(tmp_path)
    outdir = tmp_path / "tables"
    rc = main(["analyze", "--config", cfg_path, "--output", str(outdir),
               "--format", "csv"])
    assert rc == 0
    dec = (outdir / "decompositions.csv").read_text().splitlines()
    assert dec[0] == "n,id,mult"
    jpath = str(tmp_path / "ref.json")
    main(["analyze", "--config", cfg_path, "--output", jpath])
    vectors = json.load(open(jpath))["checks"]["decompose"]["vectors"]
    assert len(dec) - 1 == sum(len(v) for v in vectors.values())
    growth = (outdir / "growth.csv").read_text().splitlines()
    assert growth[0] == "residue,degree,coeffs" and len(growth) == 2
    chars = (outdir / "characters.csv").read_text().splitlines()
    assert chars[0] == "n,class_rep,coord,value"


def test_capacity_overflow_degrades_gracefully(tmp_path, monkeypatch):
    monkeypatch.setattr("sympow.groups.SYM_DIM_CAP", 20)
    cfg_path = write_config(
        tmp_path,
        generators=["3 3\n1 0 0\n0 1 0\n0 0 1\n"],
        n_max=10,
        checks=["decompose", "growth", "ramification"],
    )
    out = str(tmp_path / "partial.json")
    assert main(["analyze", "--config", cfg_path, "--output", out]) == 2
    report = json.load(open(out))
    assert any(k.startswith("decompose_n") for k in report["errors"])
    ns = sorted(int(n) for n in report["checks"]["decompose"]["vectors"])
    assert ns == [0, 1, 2, 3, 4]  # C(n+2,2) > 20 first at n = 5
    # independent checks are untouched by the overflow
    assert report["checks"]["growth"]["ok"]
    assert report["checks"]["ramification"]["dimB"] == "empty"


def test_check_subcommand_surfaces_errors(tmp_path):
    cfg_path = write_config(
        tmp_path,
        field={"p": 2, "e": 2},
        generators=["2 2\n01 00\n00 01\n"],
    )
    out = str(tmp_path / "scalar.json")
    rc = main(["check", "--config", cfg_path, "--name", "ramification",
               "--output", out])
    assert rc == 2
    report = json.load(open(out))
    assert "scalar" in report["errors"]["ramification"]


def test_decompose_subcommand_prints_vector(tmp_path, capsys):
    cfg_path = write_config(tmp_path)
    assert main(["decompose", "--config", cfg_path, "--n", "6"]) == 0
    payload = json.loads(capsys.readouterr().out)
    assert payload["n"] == 6
    total = sum(payload["vec"][k] * payload["class_dims"][k] for k in payload["vec"])
    assert total == 7


def test_run_single_matches_full_sweep(tmp_path):
    cfg = config_from_dict({**BASE, "cache_dir": str(tmp_path / "cache")})
    report = run(cfg)
    # warm registry: single-degree ids agree with the sweep's numbering
    single = run_single(cfg, 5)
    assert single["vec"] == report["checks"]["decompose"]["vectors"][5]
    # cold registry: ids are job-local but the class content is the same
    cold = run_single(config_from_dict(BASE), 5)
    assert sorted(cold["class_dims"][m] for m in cold["vec"] for _ in range(cold["vec"][m])) == [2, 2, 2]


def test_echo_materializes_defaults():
    cfg = config_from_dict({**BASE, "checks": ["decompose"]})
    report = run(cfg)
    assert report["echo"]["m_candidates"] == [1, 2, 4]
    assert report["echo"]["seed"] == 7
    assert "jobs" not in report["echo"]


def test_job_key_ignores_whitespace_and_seed():
    cfg_a = config_from_dict(BASE)
    cfg_b = config_from_dict({**BASE, "seed": 99,
                              "generators": ["2 2\n 1  1\n 0  1\n"]})
    assert job_key(cfg_a) == job_key(cfg_b)


def test_canonical_json_drops_volatile():
    cfg = config_from_dict({**BASE, "checks": ["growth"]})
    report = run(cfg)
    assert "volatile" in report and "elapsed_s" in report["volatile"]
    assert '"volatile"' not in canonical_json(report)
