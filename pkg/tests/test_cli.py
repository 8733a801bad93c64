import copy
import json
import subprocess
import sys
from pathlib import Path

import numpy as np
import pytest
from hypothesis import HealthCheck, given, settings
from hypothesis import strategies as st

from looptoda import cli
from looptoda.errors import ConfigError

CONFIGS = Path(__file__).resolve().parent.parent / "configs"

HIROTA = {
    "mode": "hirota",
    "model": {"n": 3},
    "solitons": [{"rho": 1, "zeta_re": 1.0, "zeta_im": 0.0, "delta_re": 0.0, "delta_im": 0.5}],
    "grid": {"nz": 5, "np": 4},
}
DRESS = {
    "mode": "dress",
    "model": {"n": 3},
    "dressing": {
        "mu": [[0.9, 0.3], [1.3, -0.5]],
        "nu": [[-0.7, 0.6], [0.4, -1.1]],
        "c": [[[1, 0], [0.3, -0.2], [-0.1, 0.4]], [[0.2, 0.1], [1, 0.5], [0.4, 0]]],
        "d": [[[0.5, 0.1], [-0.3, 0.6], [1, 0]], [[0, 1], [0.7, -0.2], [0.2, 0.3]]],
    },
    "grid": {"zm_min": -0.5, "zm_max": 0.5, "zp_min": -0.5, "zp_max": 0.5, "nz": 4, "np": 4},
}
SPECIALIZE = json.loads((CONFIGS / "specialize_n4_r3.json").read_text())
SPECIALIZE["grid"] |= {"nz": 7, "np": 7}
SPECIALIZE.pop("output")


def run_cli(tmp_path, doc, *extra, name="cfg.json"):
    cfg = tmp_path / name
    cfg.write_text(json.dumps(doc))
    return cli.main(["--config", str(cfg), "--quiet", *extra])


def test_hirota_grid_csv(tmp_path):
    out = tmp_path / "g.csv"
    assert run_cli(tmp_path, HIROTA, "--output", str(out)) == 0
    lines = out.read_text().splitlines()
    assert lines[0] == "zm,zp,alpha,re,im,aux_re,aux_im,pole"
    assert len(lines) == 1 + 5 * 4 * 3
    first = [row.split(",") for row in lines[1:4]]
    assert [r[2] for r in first] == ["1", "2", "3"]
    assert first[0][:2] == ["-1.0", "-1.0"]
    assert lines[4].split(",")[:2] == ["-1.0", repr(float(np.linspace(-1, 1, 4)[1]))]
    assert all(row.endswith(",0") for row in lines[1:])


def test_two_by_two_grid_row_count(tmp_path):
    doc = copy.deepcopy(HIROTA) | {"grid": {"nz": 2, "np": 2}}
    out = tmp_path / "g.json"
    doc["output"] = {"format": "json"}
    assert run_cli(tmp_path, doc, "--output", str(out)) == 0
    rows = json.loads(out.read_text())
    assert len(rows) == 4 * 3
    assert list(rows[0]) == ["zm", "zp", "alpha", "re", "im", "aux_re", "aux_im", "pole"]


def test_pole_cells(tmp_path):
    # tau_0 = 1 - exp(2 (zm + zp)) vanishes on the anti-diagonal of a symmetric grid
    doc = {"mode": "hirota", "model": {"n": 2},
           "solitons": [{"rho": 1, "zeta_re": 1.0}], "grid": {"nz": 3, "np": 3}}
    out = tmp_path / "p.csv"
    assert run_cli(tmp_path, doc, "--output", str(out)) == 0
    rows = [r.split(",") for r in out.read_text().splitlines()[1:]]
    poles = [r for r in rows if r[-1] == "1"]
    assert poles and all(r[3] == "" and r[4] == "" for r in poles)
    doc["output"] = {"format": "json"}
    out = tmp_path / "p.json"
    assert run_cli(tmp_path, doc, "--output", str(out)) == 0
    rows = json.loads(out.read_text())
    assert any(r["pole"] == 1 and r["re"] is None and r["im"] is None for r in rows)


def test_deterministic_output(tmp_path):
    for doc, mode in ((HIROTA, None), (DRESS, None), (SPECIALIZE, None), (HIROTA, "identities")):
        blobs = []
        for k in range(2):
            out = tmp_path / f"o{k}"
            extra = ["--output", str(out)] + (["--mode", mode] if mode else [])
            assert run_cli(tmp_path, doc | {"seed": 7}, *extra) == 0
            blobs.append(out.read_bytes())
        assert blobs[0] == blobs[1]


def test_report_modes(tmp_path):
    out = tmp_path / "r.json"
    assert run_cli(tmp_path, SPECIALIZE, "--mode", "compare", "--output", str(out)) == 0
    rep = json.loads(out.read_text())
    assert rep["ok"] and rep["specialize"]["det_t_vs_tau"]["value"] < 1e-10
    assert run_cli(tmp_path, DRESS, "--mode", "verify", "--output", str(out)) == 0
    rep = json.loads(out.read_text())
    assert set(rep) == {"toda_dressing", "zero_curvature", "ok"}
    assert set(rep["zero_curvature"]["coarse"]) == {"max_abs", "mean_abs", "worst_zm",
                                                     "worst_zp", "skipped_cells", "h"}
    assert run_cli(tmp_path, HIROTA, "--mode", "verify", "--output", str(out)) == 0
    assert {"toda_hirota", "bilinear", "affine", "recursion_k1", "recursion_k2"} <= set(
        json.loads(out.read_text()))


def test_identities_mode(tmp_path):
    out = tmp_path / "i.json"
    doc = {"mode": "identities", "model": {"n": 3}, "seed": 42}
    assert run_cli(tmp_path, doc, "--output", str(out)) == 0
    rep = json.loads(out.read_text())
    assert {k for k in rep if k != "ok"} == {"d_inverse", "d_residue_sum", "d_mixed_product",
                                             "eta_product", "partial_fraction"}
    assert all(v["instances"] == 100 and v["ok"] for k, v in rep.items() if k != "ok")


def test_missed_tolerance_exit_code(tmp_path, monkeypatch):
    monkeypatch.setitem(cli.TOL, "det_t_vs_tau", 0.0)
    out = tmp_path / "s.csv"
    assert run_cli(tmp_path, SPECIALIZE | {"grid": {"nz": 3, "np": 3}}, "--output", str(out)) == 1


def test_subprocess_entry_point(tmp_path):
    cfg = tmp_path / "c.json"
    cfg.write_text(json.dumps(HIROTA))
    out = tmp_path / "o.csv"
    res = subprocess.run([sys.executable, "-m", "looptoda", "--config", str(cfg), "--output", str(out)],
                         capture_output=True, text=True)
    assert res.returncode == 0 and out.exists()
    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    res = subprocess.run([sys.executable, "-m", "looptoda", "--config", str(bad)],
                         capture_output=True, text=True)
    assert res.returncode == 2 and "config error" in res.stderr


INVALID = [
    ({"model": {"n": 1}}, "n must be"),
    ({"model": {"n": 3, "m_re": 0.0}}, "mass"),
    ({"solitons": [{"rho": 3, "zeta_re": 1.0}]}, "rho"),
    ({"solitons": [{"rho": 1, "zeta_re": 0.0}]}, "zeta"),
    ({"solitons": [{"rho": 1, "zeta_re": 1.0},
                   {"rho": 1, "zeta_re": -0.5, "zeta_im": 0.8660254037844386}]}, "resonant"),
    ({"grid": {"h": 0.5}}, "h must"),
    ({"grid": {"nz": 1}}, "steps"),
    ({"grid": {"zm_min": 1.0, "zm_max": 0.0}}, "max > min"),
    ({"mode": "bogus"}, "mode"),
    ({"extra": 1}, "unknown keys"),
    ({"output": {"format": "xml"}}, "format"),
    ({"seed": -1}, "seed"),
]


@pytest.mark.parametrize("patch,msg", INVALID)
def test_invalid_configs_rejected(patch, msg):
    doc = copy.deepcopy(HIROTA) | patch
    with pytest.raises(ConfigError, match=msg):
        cli.parse_config(doc)


def test_dressing_invariants_named():
    doc = copy.deepcopy(DRESS)
    doc["dressing"]["nu"][1] = doc["dressing"]["mu"][0]
    with pytest.raises(ConfigError, match="separation"):
        cli.parse_config(doc)
    doc = copy.deepcopy(DRESS)
    doc["dressing"]["mu"][0] = [0.0, 0.0]
    with pytest.raises(ConfigError, match="nonzero"):
        cli.parse_config(doc)
    doc = copy.deepcopy(SPECIALIZE)
    doc["dressing"]["selection"][0]["K"] = doc["dressing"]["selection"][0]["J"]
    with pytest.raises(ConfigError, match="J = K"):
        cli.parse_config(doc)
    with pytest.raises(ConfigError, match="needs"):
        cli.parse_config({"mode": "specialize", "model": {"n": 3}})


def _mutations():
    leaf = st.one_of(st.none(), st.booleans(), st.integers(-5, 5),
                     st.floats(allow_nan=True, allow_infinity=True), st.text(max_size=3),
                     st.lists(st.integers(-2, 2), max_size=3))
    paths = st.sampled_from([
        ("model", "n"), ("model", "m_re"), ("solitons", 0, "rho"), ("solitons", 0, "zeta_re"),
        ("solitons", 0, "delta_im"), ("grid", "h"), ("grid", "nz"), ("grid", "zm_max"),
        ("dressing", "mu", 0), ("dressing", "nu"), ("dressing", "c", 1), ("dressing", "d", 0, 2),
        ("mode",), ("seed",), ("output", "format"),
    ])
    return st.tuples(paths, leaf)


def _apply(doc, path, value):
    node = doc
    for key in path[:-1]:
        node = node[key]
    node[path[-1]] = value


@settings(max_examples=150, deadline=None, suppress_health_check=[HealthCheck.function_scoped_fixture])
@given(mut=_mutations())
def test_fuzzed_configs_never_reach_numerics(mut, monkeypatch, tmp_path):
    path, value = mut
    base = copy.deepcopy(DRESS if path[0] == "dressing" else HIROTA)
    try:
        _apply(base, path, value)
    except (KeyError, IndexError, TypeError):
        return

    def boom(cfg):
        raise AssertionError("numerical code reached")

    try:
        cfg = cli.parse_config(base)
    except ConfigError:
        monkeypatch.setattr(cli, "_RUNNERS", {m: boom for m in cli.MODES})
        assert run_cli(tmp_path, base) == 2
        return
    # the mutation kept the document valid: values are within every invariant
    assert cfg.model.n >= 2
    assert cfg.grid.h > 0
