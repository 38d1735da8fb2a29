"""Command line runner: ``kpzlab <subcommand> --config run.json [--seed N] [--out DIR] [--workers K]``.

Configs are JSON objects validated against a per-subcommand schema before
anything is computed; unknown keys are rejected. Outputs land in
``{out}/{run_id}/`` where ``out`` is ``--out``, else ``$KPZLAB_OUT``, else the
config's ``output_dir``, else ``runs``.

Exit codes: 0 ok, 1 failed verification, 2 invalid config, 3 domain or
light-cone error, 4 numerical accuracy error.
"""

from __future__ import annotations

import argparse
import copy
import json
import math
import os
import sys
from typing import Optional

import jsonschema
import numpy as np

from . import experiments as E
from . import models as M
from . import pasep as ps
from . import refdist as rd
from . import theory
from .environment import Constant, Exponential, Geometric
from .errors import AccuracyError, ConfigError, DomainError, FitError, KPZLabError

ENV_OUT = "KPZLAB_OUT"
EXPERIMENTS = ("decorr", "off-char", "exponent", "dist", "projection", "pasep", "polymer", "classify", "shape")

_num = {"type": "number"}
_pos = {"type": "number", "exclusiveMinimum": 0}
_pos_int = {"type": "integer", "minimum": 1}
_grid = {"type": "array", "items": _pos, "minItems": 1}
_pair = {"type": "array", "items": _num, "minItems": 2, "maxItems": 2}

_model = {
    "type": "object",
    "properties": {
        "kind": {"enum": ["corner_growth", "two_sided"]},
        "pi": _pos,
        "eta": _pos,
    },
    "required": ["kind"],
    "additionalProperties": False,
}
_bulk = {
    "type": "object",
    "properties": {"kind": {"enum": ["exponential", "geometric", "constant"]}, "rate": _pos, "p": _pos,
                   "value": {"type": "number", "minimum": 0}},
    "required": ["kind"],
    "additionalProperties": False,
}
_initial = {
    "type": "object",
    "properties": {"kind": {"enum": ["step", "step_bernoulli", "empty"]}, "rho_plus": _num},
    "required": ["kind"],
    "additionalProperties": False,
}
_common = {
    "schema_version": {"const": 1},
    "seed": {"type": "integer", "minimum": 0},
    "workers": _pos_int,
    "output_dir": {"type": "string"},
    "run_id": {"type": "string", "pattern": "^[A-Za-z0-9_.-]+$"},
}


def _schema(props: dict, required: list) -> dict:
    p = dict(_common)
    p.update(props)
    return {"type": "object", "properties": p, "required": ["schema_version", *required],
            "additionalProperties": False}


_decorr_props = {"model": _model, "kappa": _pos, "p": _pair, "u": _pair, "nu": _pos, "t_grid": _grid,
                 "m_grid": _grid, "samples": _pos_int, "allow_no_decorrelation": {"type": "boolean"}}

SCHEMAS = {
    "decorr": _schema(_decorr_props, ["model", "nu", "t_grid", "samples"]),
    "off-char": _schema(_decorr_props, ["model", "nu", "t_grid", "samples", "u"]),
    "exponent": _schema({"model": _model, "kappa": _pos, "p": _pair, "t_grid": _grid, "samples": _pos_int},
                        ["model", "t_grid", "samples"]),
    "dist": _schema({"model": _model, "kappa": _pos, "p": _pair, "t": _pos, "samples": _pos_int,
                     "reference": {"enum": ["GUE", "GOEsq", "Gaussian"]},
                     "standardize": {"enum": ["theory", "empirical"]}},
                    ["model", "t", "samples", "reference"]),
    "projection": _schema({"t_grid": _grid, "nu": _num, "tau": _num, "thetas": {"type": "array", "items": _num},
                           "samples": _pos_int, "control_shift": {"type": "number", "minimum": 0},
                           "target": {"enum": ["level", "slice"]}},
                          ["t_grid", "nu", "thetas", "samples"]),
    "pasep": _schema({"p": _pos, "initial": _initial, "v": _num, "u": _num, "nu": _pos, "t_grid": _grid,
                      "m_grid": _grid, "samples": _pos_int},
                     ["p", "initial", "nu", "t_grid", "samples"]),
    "polymer": _schema({"beta": _pos, "bulk": _bulk, "p": _pair, "u": _pair, "nu": _pos, "t_grid": _grid,
                        "m_grid": _grid, "samples": _pos_int},
                       ["beta", "p", "u", "nu", "t_grid", "samples"]),
    "classify": _schema({"pi": _pos, "eta": _pos, "kappa": _pos}, ["pi", "eta", "kappa"]),
    "shape": _schema({"v_grid": {"type": "array", "items": _num, "minItems": 1}, "t": _pos,
                      "samples": {"type": "integer", "minimum": 0}}, ["v_grid"]),
}


def validate(experiment: str, config: dict) -> None:
    if experiment not in SCHEMAS:
        raise ConfigError(f"unknown experiment {experiment!r}")
    try:
        jsonschema.validate(config, SCHEMAS[experiment])
    except jsonschema.ValidationError as exc:
        where = "/".join(str(p) for p in exc.absolute_path) or "<root>"
        raise ConfigError(f"config error at {where}: {exc.message}") from None


# --- config -> objects ---------------------------------------------------------------------


def _model_and_info(cfg: dict):
    m = cfg["model"]
    if m["kind"] == "corner_growth":
        if "pi" in m or "eta" in m:
            raise ConfigError("model/pi and model/eta belong to the two_sided model")
        model = M.corner_growth()
        p = cfg.get("p", (1.0, 1.0))
        info = theory.bulk_info(p).normalized()
    else:
        if "pi" not in m or "eta" not in m:
            raise ConfigError("config error at model: two_sided needs 'pi' and 'eta'")
        model = M.two_sided(m["pi"], m["eta"])
        info = theory.classify_two_sided(m["pi"], m["eta"], cfg.get("kappa", 1.0)).normalized()
    return model, info


def _bulk(spec: Optional[dict]):
    if spec is None:
        return Exponential()
    if spec["kind"] == "exponential":
        return Exponential(spec.get("rate", 1.0))
    if spec["kind"] == "geometric":
        return Geometric(spec.get("p", 0.5))
    return Constant(spec.get("value", 0.0))


def _initial(spec: dict):
    if spec["kind"] == "step":
        return ps.Step()
    if spec["kind"] == "empty":
        return ps.Occupied(())
    if "rho_plus" not in spec:
        raise ConfigError("config error at initial: step_bernoulli needs 'rho_plus'")
    return ps.StepBernoulli(spec["rho_plus"])


def _fmt(x) -> str:
    return f"{x:.6g}" if isinstance(x, float) else str(x)


def _print_table(rows: list, cols: list, out=None) -> None:
    if not rows:
        return
    out = out or sys.stdout
    cells = [[_fmt(r[c]) for c in cols] for r in rows]
    widths = [max(len(c), *(len(row[k]) for row in cells)) for k, c in enumerate(cols)]
    print("  ".join(c.rjust(w) for c, w in zip(cols, widths)), file=out)
    for row in cells:
        print("  ".join(v.rjust(w) for v, w in zip(row, widths)), file=out)


# --- experiments -------------------------------------------------------------------------------


def _run(experiment: str, cfg: dict, seed: int, workers: int, header: dict):
    """Returns (tables: name -> csv text, summary dict, printable rows, columns)."""
    if experiment in ("decorr", "off-char"):
        model, info = _model_and_info(cfg)
        u = tuple(cfg["u"]) if "u" in cfg else None
        dc = E.DecorrConfig(model, info, cfg["nu"], tuple(cfg["t_grid"]), tuple(cfg.get("m_grid", [1.0])),
                            cfg["samples"], seed, u=u, allow_no_decorrelation=cfg.get("allow_no_decorrelation", False),
                            workers=workers)
        rep = E.run_decorrelation(dc) if experiment == "decorr" else E.run_off_characteristic_control(dc)
        rows = [dict(r, corr=next(c["corr"] for c in rep.correlation if c["t"] == r["t"])) for r in rep.table]
        return E.report_tables(rep, header), E.report_summary(rep), rows, ["t", "M", "prob", "se", "corr"]
    if experiment == "exponent":
        model, info = _model_and_info(cfg)
        fit = E.run_exponent_fit(model, info.p, cfg["t_grid"], cfg["samples"], seed, workers)
        rows = [{"t": t, "std": s} for t, s in zip(fit.t_grid, fit.std)]
        summary = {"slope": fit.slope, "stderr": fit.stderr, "intercept": fit.intercept,
                   "residuals": fit.residuals, "case": info.case.value}
        print(f"fitted exponent {fit.slope:.4f} +- {fit.stderr:.4f}")
        return {"std": E.rows_to_csv(rows, header)}, summary, rows, ["t", "std"]
    if experiment == "dist":
        model, info = _model_and_info(cfg)
        ref = {"GUE": rd.GUE, "GOEsq": rd.GOEsq, "Gaussian": rd.Gaussian}[cfg["reference"]]()
        res = E.run_distribution_test(model, info, cfg["t"], cfg["samples"], ref, seed,
                                      cfg.get("standardize", "theory"), workers)
        rows = [{"level": a, "sample": b, "reference": c} for a, b, c in res.quantiles]
        summary = {"ks": res.ks, "site": res.site, "t": res.t, "flags": res.flags, "reference": ref.name}
        tables = {"sample": E.columns_to_csv({"chi": res.sample}, header), "quantiles": E.rows_to_csv(rows, header)}
        print(f"KS distance vs {ref.name}: {res.ks:.5f}")
        return tables, summary, rows, ["level", "sample", "reference"]
    if experiment == "projection":
        rep = E.run_projection_experiment(M.corner_growth(), cfg["t_grid"], cfg["nu"], cfg["thetas"], cfg["samples"],
                                          cfg.get("tau", 0.5), seed, cfg.get("control_shift", 0.0), workers,
                                          cfg.get("target", "level"))
        rows = [{"t": r["t"], "theta": r["theta"], "tau_tilde": r["tau_tilde"], "corr": r["corr"]} for r in rep.rows]
        tables = {"corr": E.rows_to_csv(rows, header)}
        if rep.control:
            tables["control"] = E.rows_to_csv([{"t": c["t"], "corr": c["corr"]} for c in rep.control], header)
        return tables, {"rows": rep.rows, "control": rep.control}, rows, ["t", "theta", "tau_tilde", "corr"]
    if experiment == "pasep":
        pc = E.PasepDecorrConfig(cfg["p"], _initial(cfg["initial"]), cfg.get("v", 0.0), cfg.get("u", 0.0), cfg["nu"],
                                 tuple(cfg["t_grid"]), tuple(cfg.get("m_grid", [1.0])), cfg["samples"], seed, workers)
        rep = E.run_pasep_decorrelation(pc)
        rows = [dict(r, corr=next(c["corr"] for c in rep.correlation if c["t"] == r["t"])) for r in rep.table]
        return E.report_tables(rep, header), E.report_summary(rep), rows, ["t", "M", "prob", "se", "corr"]
    if experiment == "polymer":
        rep = E.run_polymer_decorrelation(cfg["beta"], _bulk(cfg.get("bulk")), cfg["p"], cfg["u"], cfg["nu"],
                                          cfg["t_grid"], cfg["samples"], seed, cfg.get("m_grid", [1.0]), workers)
        rows = [dict(r, x_min=next(c["min"] for c in rep.compensator if c["t"] == r["t"])) for r in rep.table]
        return E.report_tables(rep, header), E.report_summary(rep), rows, ["t", "M", "prob", "se", "x_min"]
    if experiment == "classify":
        info = theory.classify_two_sided(cfg["pi"], cfg["eta"], cfg["kappa"])
        row = {"case": info.case.value, "u": f"({_fmt(info.u[0])}, {_fmt(info.u[1])})", "ell_HL": info.ell_hl,
               "gamma_HL": info.gamma_hl, "limit_law": info.dist.value,
               "slow_decorrelation": info.slow_decorrelation}
        return {"classify": E.rows_to_csv([row], header)}, {"info": info}, [row], list(row)
    if experiment == "shape":
        t = cfg.get("t", 1000.0)
        n = cfg.get("samples", 0)
        rows = []
        for v in cfg["v_grid"]:
            row = {"v": float(v), "h_bar": theory.corner_limit_shape(v)}
            if n:
                x = int(round(v * t))
                hs = [M.height_from_passage(M.corner_growth(E.rng.sample_seed(seed, k)).field, t, (x, x)).values[0]
                      for k in range(n)]
                row["simulated"] = float(np.mean(hs)) / t
            rows.append(row)
        return {"shape": E.rows_to_csv(rows, header)}, {"rows": rows, "t": t}, rows, list(rows[0])
    raise ConfigError(f"unknown experiment {experiment!r}")


def run_experiment(experiment: str, config: dict, seed: Optional[int] = None, out: Optional[str] = None,
                   workers: Optional[int] = None, quiet: bool = False) -> list:
    """Validate, run and write one experiment; returns the written paths."""
    validate(experiment, config)
    cfg = copy.deepcopy(config)
    if seed is not None:
        cfg["seed"] = int(seed)
    seed = int(cfg.get("seed", 0))
    workers = int(workers if workers is not None else cfg.get("workers", 1))
    base = out or os.environ.get(ENV_OUT) or cfg.get("output_dir") or "runs"
    hashed = {k: v for k, v in cfg.items() if k not in ("workers", "output_dir")}
    chash = E.config_hash({"experiment": experiment, **hashed})
    run_id = cfg.get("run_id") or f"{experiment}-{chash}"
    header = {"config_hash": chash, "seed": seed, "experiment": experiment}
    tables, summary, rows, cols = _run(experiment, cfg, seed, workers, header)
    summary = dict(summary, config={"experiment": experiment, **hashed})
    paths = E.write_outputs(os.path.join(base, run_id), experiment, header, tables, summary)
    if not quiet:
        _print_table(rows, cols)
        print(f"wrote {len(paths)} files to {os.path.join(base, run_id)}")
    return paths


def verify(suite: str, workers: int = 1) -> int:
    from .acceptance import SUITES
    if suite not in SUITES:
        raise ConfigError(f"unknown suite {suite!r}; choose from {sorted(SUITES)}")
    failed = 0
    for job in SUITES[suite](workers):
        res = job()
        print(res.line(), flush=True)
        failed += not res.passed
    print(f"{'all criteria passed' if not failed else f'{failed} criteria failed'}")
    return 1 if failed else 0


def _parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="kpzlab", description="KPZ slow-decorrelation experiments")
    sub = ap.add_subparsers(dest="command", required=True)
    for name in EXPERIMENTS:
        sp = sub.add_parser(name)
        sp.add_argument("--config", required=True, help="JSON config file")
        sp.add_argument("--seed", type=int)
        sp.add_argument("--out", help="output directory (overrides $%s)" % ENV_OUT)
        sp.add_argument("--workers", type=int)
    vp = sub.add_parser("verify")
    vp.add_argument("--suite", default="fast")
    vp.add_argument("--workers", type=int, default=1)
    return ap


def main(argv=None) -> int:
    ap = _parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as exc:  # argparse uses 2 for usage errors already
        return int(exc.code or 0)
    try:
        if args.command == "verify":
            return verify(args.suite, args.workers)
        try:
            with open(args.config) as fh:
                config = json.load(fh)
        except OSError as exc:
            raise ConfigError(f"cannot read config: {exc}") from None
        except json.JSONDecodeError as exc:
            raise ConfigError(f"config is not valid JSON: {exc}") from None
        if args.workers is not None and args.workers < 1:
            raise ConfigError("--workers must be >= 1")
        run_experiment(args.command, config, args.seed, args.out, args.workers)
        return 0
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (DomainError, FitError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3
    except AccuracyError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 4
    except KPZLabError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
