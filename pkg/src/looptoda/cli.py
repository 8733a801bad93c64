"""
Command-line front end.

A run is described by one JSON document::

    {"mode": "hirota",
     "model": {"n": 3, "m_re": 1.0, "m_im": 0.0},
     "solitons": [{"rho": 1, "zeta_re": 1.0, "zeta_im": 0.0,
                   "delta_re": 0.0, "delta_im": 0.0}],
     "dressing": {"mu": [[re, im], ...], "nu": [...],
                  "c": [[[re, im], ...], ...], "d": [...]},
     "grid": {"zm_min": -1, "zm_max": 1, "zp_min": -1, "zp_max": 1,
              "nz": 21, "np": 21, "h": 1e-3},
     "seed": 42,
     "output": {"format": "csv", "path": "out.csv"}}

Complex numbers are ``[re, im]`` pairs (a bare real number is accepted too).
Instead of ``c``/``d`` tables the dressing section may carry a soliton
``selection``: a list of ``{"I", "J", "K", "dJ", "dK"}`` objects.

Grid modes (hirota, dress, specialize) write one row per grid node and
``alpha = 1..n``; report modes (compare, verify, identities) write JSON.
Exit status: 0 when every tolerance is met, 1 on a numerical failure or a
missed tolerance, 2 on an invalid configuration.
"""

from __future__ import annotations

import argparse
import io
import json
import math
import sys
from dataclasses import dataclass, field
from typing import Any

import numpy as np

from . import dressing, hirota, numkit, verify
from .dressing import DressingData, SolitonSelection, Specialization
from .errors import ConfigError, NumericalFailure, TodaError
from .hirota import SolitonParams
from .model import ModelParams
from .verify import GridSpec

__all__ = ["RunConfig", "load_config", "parse_config", "run", "emit_grid", "main",
           "MODES", "CSV_HEADER"]

MODES = ("hirota", "dress", "specialize", "compare", "verify", "identities")
CSV_HEADER = "zm,zp,alpha,re,im,aux_re,aux_im,pole"
ROW_KEYS = CSV_HEADER.split(",")

RATIO_BAND = (3.2, 4.8)
ROUNDOFF_FLOOR = 1e-10
TOL = {
    "det_t_vs_tau": 1e-10,
    "ratio_spread": 1e-9,
    "ratio_vs_prefactor": 1e-9,
    "residues": 1e-6,
    "telescoping": 1e-12,
    "quasi_periodicity": 1e-11,
    "psi_vs_det": 1e-9,
    "psi_inverse": 1e-9,
    "periodicity": 1e-10,
    "gamma_product": 1e-10,
    "recursion_bracket": 1e-9,
}

_TOP_KEYS = {"mode", "model", "solitons", "dressing", "grid", "seed", "output"}
_SOLITON_KEYS = {"rho", "zeta_re", "zeta_im", "delta_re", "delta_im"}
_GRID_KEYS = {"zm_min", "zm_max", "zp_min", "zp_max", "nz", "np", "h"}


@dataclass
class RunConfig:
    mode: str
    model: ModelParams
    grid: GridSpec
    solitons: SolitonParams | None = None
    dressing: DressingData | None = None
    specialization: Specialization | None = None
    seed: int = 0
    fmt: str = "csv"
    path: str | None = None
    raw: dict = field(default_factory=dict, repr=False)


# ---------------------------------------------------------------------------
# config parsing


def _real(x, where) -> float:
    if isinstance(x, bool) or not isinstance(x, (int, float)):
        raise ConfigError(f"{where}: expected a number, got {x!r}")
    x = float(x)
    if not math.isfinite(x):
        raise ConfigError(f"{where}: must be finite")
    return x


def _int(x, where) -> int:
    if (isinstance(x, bool) or not isinstance(x, (int, float))
            or (isinstance(x, float) and not x.is_integer())):
        raise ConfigError(f"{where}: expected an integer, got {x!r}")
    return int(x)


def _cplx(x, where) -> complex:
    if isinstance(x, (list, tuple)):
        if len(x) != 2:
            raise ConfigError(f"{where}: complex numbers are [re, im] pairs")
        return complex(_real(x[0], where), _real(x[1], where))
    return complex(_real(x, where), 0.0)


def _cvec(x, where) -> list:
    if not isinstance(x, list):
        raise ConfigError(f"{where}: expected a list")
    return [_cplx(v, f"{where}[{i}]") for i, v in enumerate(x)]


def _section(doc, key, required=False):
    val = doc.get(key)
    if val is None:
        if required:
            raise ConfigError(f"missing section '{key}'")
        return None
    return val


def _check_keys(obj, allowed, where):
    if not isinstance(obj, dict):
        raise ConfigError(f"{where}: expected an object")
    extra = set(obj) - set(allowed)
    if extra:
        raise ConfigError(f"{where}: unknown keys {sorted(extra)}")


def _model(doc) -> ModelParams:
    sec = _section(doc, "model", required=True)
    _check_keys(sec, {"n", "m_re", "m_im"}, "model")
    if "n" not in sec:
        raise ConfigError("model: 'n' is required")
    n = _int(sec["n"], "model.n")
    m = complex(_real(sec.get("m_re", 1.0), "model.m_re"), _real(sec.get("m_im", 0.0), "model.m_im"))
    try:
        return ModelParams(n, m)
    except TodaError as e:
        raise ConfigError(f"model: {e}") from None


def _solitons(doc, model) -> SolitonParams | None:
    sec = _section(doc, "solitons")
    if sec is None:
        return None
    if not isinstance(sec, list):
        raise ConfigError("solitons: expected a list")
    rho, zeta, delta = [], [], []
    for i, s in enumerate(sec):
        where = f"solitons[{i}]"
        _check_keys(s, _SOLITON_KEYS, where)
        if "rho" not in s:
            raise ConfigError(f"{where}: 'rho' is required")
        rho.append(_int(s["rho"], f"{where}.rho"))
        zeta.append(complex(_real(s.get("zeta_re", 0.0), f"{where}.zeta_re"),
                            _real(s.get("zeta_im", 0.0), f"{where}.zeta_im")))
        delta.append(complex(_real(s.get("delta_re", 0.0), f"{where}.delta_re"),
                             _real(s.get("delta_im", 0.0), f"{where}.delta_im")))
    try:
        return SolitonParams(model, tuple(rho), tuple(zeta), tuple(delta))
    except TodaError as e:
        raise ConfigError(f"solitons: {e}") from None


def _table(x, where):
    if not isinstance(x, list):
        raise ConfigError(f"{where}: expected a list of rows")
    return [_cvec(row, f"{where}[{i}]") for i, row in enumerate(x)]


def _dressing(doc, model):
    sec = _section(doc, "dressing")
    if sec is None:
        return None, None
    if not isinstance(sec, dict):
        raise ConfigError("dressing: expected an object")
    for key in ("mu", "nu"):
        if key not in sec:
            raise ConfigError(f"dressing: '{key}' is required")
    mu = _cvec(sec["mu"], "dressing.mu")
    nu = _cvec(sec["nu"], "dressing.nu")
    try:
        if "selection" in sec:
            _check_keys(sec, {"mu", "nu", "selection"}, "dressing")
            if not isinstance(sec["selection"], list):
                raise ConfigError("dressing.selection: expected a list")
            cols = {k: [] for k in ("I", "J", "K", "dJ", "dK")}
            for i, s in enumerate(sec["selection"]):
                where = f"dressing.selection[{i}]"
                _check_keys(s, set(cols), where)
                missing = set(cols) - set(s)
                if missing:
                    raise ConfigError(f"{where}: missing {sorted(missing)}")
                for k in ("I", "J", "K"):
                    cols[k].append(_int(s[k], f"{where}.{k}"))
                for k in ("dJ", "dK"):
                    cols[k].append(_cplx(s[k], f"{where}.{k}"))
            sel = SolitonSelection(**{k: tuple(v) for k, v in cols.items()})
            spec = dressing.specialize_solitons(model, mu, nu, sel)
            return spec.data, spec
        _check_keys(sec, {"mu", "nu", "c", "d"}, "dressing")
        for key in ("c", "d"):
            if key not in sec:
                raise ConfigError(f"dressing: '{key}' is required without a selection")
        c = _table(sec["c"], "dressing.c")
        d = _table(sec["d"], "dressing.d")
        r, n = len(mu), model.n
        for name, t in (("c", c), ("d", d)):
            if len(t) != r or any(len(row) != n for row in t):
                raise ConfigError(f"dressing.{name}: expected {r} rows of {n} entries")
        if r == 0:
            raise ConfigError("dressing: at least one pole pair is required")
        return DressingData(model, mu, nu, np.array(c).reshape(r, n), np.array(d).reshape(r, n)), None
    except ConfigError:
        raise
    except TodaError as e:
        raise ConfigError(f"dressing: {e}") from None


def _grid(doc) -> GridSpec:
    sec = _section(doc, "grid") or {}
    _check_keys(sec, _GRID_KEYS, "grid")
    kw = {}
    for k in ("zm_min", "zm_max", "zp_min", "zp_max", "h"):
        if k in sec:
            kw[k] = _real(sec[k], f"grid.{k}")
    for k in ("nz", "np"):
        if k in sec:
            kw[k] = _int(sec[k], f"grid.{k}")
    try:
        return GridSpec(**kw)
    except TodaError as e:
        raise ConfigError(f"grid: {e}") from None


def parse_config(doc: Any, mode: str | None = None, path: str | None = None) -> RunConfig:
    """Validate a decoded config document; every failure is a :class:`ConfigError`."""
    if not isinstance(doc, dict):
        raise ConfigError("config must be a JSON object")
    _check_keys(doc, _TOP_KEYS, "config")
    mode = mode or doc.get("mode")
    if mode not in MODES:
        raise ConfigError(f"mode must be one of {', '.join(MODES)}, got {mode!r}")
    model = _model(doc)
    sol = _solitons(doc, model)
    data, spec = _dressing(doc, model)
    grid = _grid(doc)
    seed = _int(doc.get("seed", 0), "seed")
    if seed < 0:
        raise ConfigError("seed must be non-negative")
    out = doc.get("output") or {}
    _check_keys(out, {"format", "path"}, "output")
    fmt = out.get("format", "csv")
    if fmt not in ("csv", "json"):
        raise ConfigError(f"output.format must be csv or json, got {fmt!r}")
    out_path = path or out.get("path")
    if out_path is not None and not isinstance(out_path, str):
        raise ConfigError("output.path must be a string")

    if mode == "hirota" and sol is None:
        raise ConfigError("mode hirota needs a 'solitons' section")
    if mode == "dress" and data is None:
        raise ConfigError("mode dress needs a 'dressing' section")
    if mode == "specialize" and spec is None:
        raise ConfigError("mode specialize needs a dressing 'selection'")
    if mode in ("compare", "verify") and sol is None and data is None:
        raise ConfigError(f"mode {mode} needs a 'solitons' or 'dressing' section")
    return RunConfig(mode, model, grid, sol, data, spec, seed, fmt, out_path, doc)


def load_config(path: str, mode: str | None = None, output: str | None = None) -> RunConfig:
    try:
        with open(path, encoding="utf-8") as fh:
            doc = json.load(fh)
    except OSError as e:
        raise ConfigError(f"cannot read config: {e}") from None
    except json.JSONDecodeError as e:
        raise ConfigError(f"config is not valid JSON: {e}") from None
    return parse_config(doc, mode, output)


# ---------------------------------------------------------------------------
# grid emission


def _grid_rows(grid: GridSpec, n: int, values, aux):
    """``values``/``aux``: arrays of shape (n, nz, np), NaN at poles."""
    ZM, ZP = grid.points()
    rows = []
    for i in range(ZM.shape[0]):
        for j in range(ZM.shape[1]):
            for a in range(n):
                v, w = complex(values[a, i, j]), complex(aux[a, i, j])
                pole = not (math.isfinite(v.real) and math.isfinite(v.imag))
                aux_ok = math.isfinite(w.real) and math.isfinite(w.imag)
                rows.append({
                    "zm": float(ZM[i, j]), "zp": float(ZP[i, j]), "alpha": a + 1,
                    "re": None if pole else v.real, "im": None if pole else v.imag,
                    "aux_re": w.real if aux_ok else None, "aux_im": w.imag if aux_ok else None,
                    "pole": int(pole),
                })
    return rows


def emit_grid(rows, fmt: str, stream) -> None:
    """Write grid rows as CSV (fixed header) or as a JSON array of row objects."""
    if fmt == "csv":
        stream.write(CSV_HEADER + "\n")
        for row in rows:
            stream.write(",".join("" if row[k] is None else repr(row[k]) for k in ROW_KEYS) + "\n")
    elif fmt == "json":
        json.dump([{k: row[k] for k in ROW_KEYS} for row in rows], stream)
        stream.write("\n")
    else:
        raise ConfigError(f"unknown format {fmt!r}")


def _stack(fun, n, ZM, ZP):
    return np.array([np.asarray(fun(a, ZM, ZP), dtype=complex) for a in range(1, n + 1)])


# ---------------------------------------------------------------------------
# modes


def _check(value, tol) -> dict:
    value = float(value)
    return {"value": value, "tol": tol, "ok": bool(value <= tol)}


def _rel_dev(a, b) -> float:
    a, b = np.asarray(a), np.asarray(b)
    ok = np.isfinite(a) & np.isfinite(b)
    if not ok.any():
        return math.nan
    return float((np.abs(a - b)[ok] / np.maximum(np.abs(b)[ok], 1e-300)).max())


def _residue_summary(data: DressingData, grid: GridSpec) -> dict:
    zm = 0.5 * (grid.zm_min + grid.zm_max)
    zp = 0.5 * (grid.zp_min + grid.zp_max)
    res = dressing.residue_residuals(data, zm, zp)
    return _check(max(res.values()), TOL["residues"]) | {"point": [zm, zp], "detail": res}


def _mode_hirota(cfg: RunConfig):
    n = cfg.model.n
    ZM, ZP = cfg.grid.points()
    g = _stack(hirota.gamma_field(cfg.solitons), n, ZM, ZP)
    t = _stack(lambda a, x, y: hirota.tau(cfg.solitons, a, x, y), n, ZM, ZP)
    return _grid_rows(cfg.grid, n, g, t), {}


def _mode_dress(cfg: RunConfig):
    n = cfg.model.n
    ZM, ZP = cfg.grid.points()
    data = cfg.dressing
    g = _stack(dressing.gamma_field(data), n, ZM, ZP)
    dets = _stack(lambda a, x, y: numkit.det(dressing.r_tilde(data, a + 1, x, y)), n, ZM, ZP)
    return _grid_rows(cfg.grid, n, g, dets), {"residues": _residue_summary(data, cfg.grid)}


def _specialize_checks(spec: Specialization, grid: GridSpec) -> dict:
    n = spec.data.n
    ZM, ZP = grid.points()
    gd = _stack(dressing.gamma_field(spec.data), n, ZM, ZP)
    gh = _stack(hirota.gamma_field(spec.params), n, ZM, ZP)
    with np.errstate(invalid="ignore", divide="ignore"):
        ratio = gd / gh
    fin = ratio[np.isfinite(ratio)]
    spread = float(np.abs(fin - fin.mean()).max() / abs(fin.mean())) if fin.size else math.nan
    pref_dev = float(np.abs(fin - spec.prefactor).max() / abs(spec.prefactor)) if fin.size else math.nan
    det_dev = 0.0
    for a in range(n):
        det_dev = max(det_dev, _rel_dev(spec.det_t(a + 1, ZM, ZP), hirota.tau(spec.params, a, ZM, ZP)))
    return {
        "det_t_vs_tau": _check(det_dev, TOL["det_t_vs_tau"]),
        "ratio_spread": _check(spread, TOL["ratio_spread"]),
        "ratio_vs_prefactor": _check(pref_dev, TOL["ratio_vs_prefactor"]),
        "ratio_mean": [complex(fin.mean()).real, complex(fin.mean()).imag] if fin.size else None,
        "prefactor": [spec.prefactor.real, spec.prefactor.imag],
        "_fields": (gd, gh),
    }


def _mode_specialize(cfg: RunConfig):
    checks = _specialize_checks(cfg.specialization, cfg.grid)
    gd, gh = checks.pop("_fields")
    return _grid_rows(cfg.grid, cfg.model.n, gd, gh), checks


def _hirota_structure(params: SolitonParams, grid: GridSpec) -> dict:
    n = params.model.n
    ZM, ZP = grid.points()
    per = prod_err = 0.0
    prod = np.ones(ZM.shape, dtype=complex)
    for a in range(1, n + 1):
        g = hirota.gamma_hirota(params, a, ZM, ZP, strict=False)
        per = max(per, _rel_dev(hirota.gamma_hirota(params, a + n, ZM, ZP, strict=False), g))
        prod = prod * g
    fin = np.isfinite(prod)
    prod_err = float(np.abs(prod[fin] - 1).max()) if fin.any() else math.nan
    return {"periodicity": _check(per, TOL["periodicity"]),
            "gamma_product": _check(prod_err, TOL["gamma_product"])}


def _dressing_structure(data: DressingData, grid: GridSpec) -> dict:
    n = data.n
    ZM, ZP = grid.points()
    u, y = dressing.uy_vectors(data, ZM, ZP)
    ut, yt = dressing.tilde_vectors(data, u, y)
    tele = quasi = 0.0
    outer = yt[..., :, None, :] * ut[..., None, :, :]
    for a in range(1, n + 1):
        ra = dressing.r_tilde(data, a, ZM, ZP)
        rb = dressing.r_tilde(data, a + 1, ZM, ZP)
        tele = max(tele, float(np.abs(rb - (ra - outer[..., a - 1])).max() / np.abs(ra).max()))
        # R~_{a+n} against the periodic R_a conjugated by N^-(a+n), M^(a+n)
        rq = dressing.r_tilde(data, a + n, ZM, ZP)
        ref = (data.nu[:, None] ** -(a + n)) * dressing.r_matrix(data, a, ZM, ZP) \
            * (data.mu[None, :] ** (a + n))
        quasi = max(quasi, float(np.abs(rq - ref).max() / np.abs(ref).max()))
    gd = _stack(dressing.gamma_field(data), n, ZM, ZP)
    psi_dev = inv_dev = 0.0
    with np.errstate(invalid="ignore"):
        try:
            gp = np.moveaxis(dressing.gamma_from_psi_infinity(data, ZM, ZP), -1, 0)
            psi_dev = _rel_dev(gp, gd)
            pq = dressing.pq_matrices(data, 0.0, 0.0)
            lam = 0.37 + 1.21j
            prod = dressing.psi_inv_eval(data, lam, 0.0, 0.0, pq) @ dressing.psi_eval(data, lam, 0.0, 0.0, pq)
            inv_dev = float(np.abs(prod - np.eye(n)).max())
        except ArithmeticError as e:
            raise NumericalFailure(f"dressing reconstruction failed: {e}") from None
    return {
        "telescoping": _check(tele, TOL["telescoping"]),
        "quasi_periodicity": _check(quasi, TOL["quasi_periodicity"]),
        "psi_vs_det": _check(psi_dev, TOL["psi_vs_det"]),
        "psi_inverse": _check(inv_dev, TOL["psi_inverse"]),
        "residues": _residue_summary(data, grid),
    }


def _mode_compare(cfg: RunConfig):
    report = {}
    if cfg.solitons is not None:
        report["hirota"] = _hirota_structure(cfg.solitons, cfg.grid)
    if cfg.dressing is not None:
        report["dressing"] = _dressing_structure(cfg.dressing, cfg.grid)
    if cfg.specialization is not None:
        checks = _specialize_checks(cfg.specialization, cfg.grid)
        checks.pop("_fields")
        report["specialize"] = checks
        report["hirota_from_selection"] = _hirota_structure(cfg.specialization.params, cfg.grid)
    return None, report


def _conv_entry(conv: verify.Convergence) -> dict:
    d = conv.to_dict()
    d["ok"] = bool(RATIO_BAND[0] <= conv.ratio <= RATIO_BAND[1]
                   or conv.coarse.max_abs <= ROUNDOFF_FLOOR)
    return d


LAMBDA_SAMPLES = tuple(complex(np.exp(2j * np.pi * (k + 0.125) / 4)) for k in range(4))


def _mode_verify(cfg: RunConfig):
    grid, model = cfg.grid, cfg.model
    report = {}
    try:
        if cfg.solitons is not None:
            p = cfg.solitons
            report["toda_hirota"] = _conv_entry(verify.convergence(
                lambda g: verify.toda_residual(hirota.gamma_field(p), model, g), grid))
            report["bilinear"] = _conv_entry(verify.convergence(
                lambda g: verify.bilinear_residual(p, g), grid))
            report["affine"] = _conv_entry(verify.convergence(
                lambda g: verify.affine_residual(p, g), grid))
            if p.r:
                report["recursion_k1"] = _conv_entry(verify.convergence(
                    lambda g: verify.hirota_recursion_check(p, 1, g), grid))
                k2 = verify.hirota_recursion_check(p, 2, grid)
                report["recursion_k2"] = k2.to_dict() | {
                    "ok": bool(k2.max_abs <= TOL["recursion_bracket"])}
        if cfg.dressing is not None:
            data = cfg.dressing
            report["toda_dressing"] = _conv_entry(verify.convergence(
                lambda g: verify.toda_residual(dressing.gamma_field(data), model, g), grid))
            report["zero_curvature"] = _conv_entry(verify.convergence(
                lambda g: verify.zero_curvature_residual(data, LAMBDA_SAMPLES, g), grid))
    except (ArithmeticError, verify.EmptyGrid) as e:
        raise NumericalFailure(f"residual evaluation failed: {e}") from None
    return None, report


def _mode_identities(cfg: RunConfig):
    return None, verify.identity_suite(cfg.seed)


_RUNNERS = {
    "hirota": _mode_hirota, "dress": _mode_dress, "specialize": _mode_specialize,
    "compare": _mode_compare, "verify": _mode_verify, "identities": _mode_identities,
}


def _all_ok(obj) -> bool:
    if isinstance(obj, dict):
        if obj.get("ok") is False:
            return False
        return all(_all_ok(v) for k, v in obj.items() if k != "ok")
    return True


def _jsonable(obj):
    if isinstance(obj, dict):
        return {k: _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, float) and not math.isfinite(obj):
        return None
    return obj


def run(cfg: RunConfig, out=None) -> tuple[int, dict]:
    """
    Execute ``cfg``. Grid rows go to ``cfg.path`` (or ``out``); report modes
    write their JSON report there instead. Returns ``(exit_code, summary)``.
    """
    rows, summary = _RUNNERS[cfg.mode](cfg)
    ok = _all_ok(summary)
    buf = io.StringIO()
    if rows is not None:
        emit_grid(rows, cfg.fmt, buf)
    else:
        json.dump(_jsonable(summary | {"ok": ok}), buf, indent=2, sort_keys=True)
        buf.write("\n")
    text = buf.getvalue()
    if cfg.path is not None:
        with open(cfg.path, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    elif out is not None:
        out.write(text)
    return (0 if ok else 1), _jsonable(summary | {"ok": ok})


def main(argv=None) -> int:
    ap = argparse.ArgumentParser(
        prog="looptoda",
        description="Multi-soliton solutions of the abelian loop-group Toda equations.")
    ap.add_argument("--config", required=True, help="JSON run configuration")
    ap.add_argument("--output", help="output file (overrides output.path)")
    ap.add_argument("--mode", choices=MODES, help="run mode (overrides the config)")
    ap.add_argument("--quiet", action="store_true", help="suppress the summary on stdout")
    args = ap.parse_args(argv)
    try:
        cfg = load_config(args.config, args.mode, args.output)
    except ConfigError as e:
        print(f"config error: {e}", file=sys.stderr)
        return 2
    try:
        to_stdout = cfg.path is None
        code, summary = run(cfg, sys.stdout if to_stdout else None)
    except NumericalFailure as e:
        print(f"numerical failure: {e}", file=sys.stderr)
        return 1
    except TodaError as e:
        print(f"numerical failure: {type(e).__name__}: {e}", file=sys.stderr)
        return 1
    if not args.quiet and not to_stdout:
        status = "ok" if code == 0 else "tolerance not met"
        print(f"{cfg.mode}: {status}")
        if cfg.mode in ("dress", "specialize"):
            print(json.dumps(summary, sort_keys=True))
    return code


if __name__ == "__main__":
    sys.exit(main())
