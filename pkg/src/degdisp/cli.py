"""Batch entry point: ``dd <command> --config <path> [--out <dir>] [--threads <k>]``.

Commands: evolve, verify, strichartz, solve, sweep. The config is an INI
file (configparser) with the sections and keys listed in ``SCHEMA``;
anything else is rejected. Every run writes ``report.json`` (schema
"dd-report/1", embedding a hash of the canonical config) and ``table.csv``
into the output directory.

Exit codes: 0 all verdicts PASS (or REPORTED, or a non-verifying command
completed), 2 at least one FAIL, 3 no FAIL but something INCONCLUSIVE,
1 runtime error, 64 usage or parameter error.
"""

from __future__ import annotations

import argparse
import configparser
import csv
import hashlib
import json
import math
import sys
from pathlib import Path

import numpy as np

from . import __version__
from .estimates import (
    EstimateReport,
    _json_safe,
    _pmap,
    default_threads,
    verify_comparison,
    verify_identity_scaling,
    verify_lemma_T1,
    verify_radial,
    verify_smoothing,
    verify_universal,
    verify_weighted_family,
)
from .families import get_family
from .grid import WaveField, make_grid
from .profiles import builtin_profile
from .propagator import flow, trajectory_summary, trajectory_to_csv
from .semilinear import (
    SemilinearProblem,
    data_continuity_experiment,
    local_time_estimate,
    picard_solve,
    split_step_reference,
)
from .strichartz import AdmissiblePair, endpoint_smoke, verify_dual, verify_homogeneous, verify_inhomogeneous
from .symbols import builtin_symbol, power_weight, unit_weight

SCHEMA_VERSION = "dd-report/1"
COMMANDS = ("evolve", "verify", "strichartz", "solve", "sweep")
EXIT_PASS, EXIT_ERROR, EXIT_FAIL, EXIT_INCONCLUSIVE, EXIT_USAGE = 0, 1, 2, 3, 64

_PROFILE_KEYS = {"kind": str, "alpha": float, "t0": float, "t1": float, "s_half": float, "local": bool}
_SYMBOL_KEYS = {"kind": str, "m": float, "c": float}

SCHEMA: dict[str, dict[str, type]] = {
    "run": {"command": str, "seed": int, "tol": float, "identity_tol": float, "ladder": bool},
    "grid": {"n": int, "N": int, "R": float},
    "profile": _PROFILE_KEYS,
    "profile2": _PROFILE_KEYS,
    "symbol": _SYMBOL_KEYS,
    "symbol2": _SYMBOL_KEYS,
    "estimate": {
        "id": str, "family": str, "J": int, "p": float, "q": float, "beta": float, "alpha": float,
        "m": float, "eps": float, "s_exp": float, "T": float, "sup_norm": bool, "x1": list,
        "lambdas": list, "reference": bool, "axis": int, "sigma_beta": float, "tau_beta": float,
    },
    "evolve": {"family": str, "member": int, "t_end": float, "steps": int},
    "problem": {
        "p": float, "mu": float, "mu_imag": float, "T": float, "J": int, "data": str, "norm": float,
        "width": float, "center": float, "k": float, "tol": float, "max_iter": int, "dealias": bool,
        "oracle": bool, "deltas": list, "auto_T": bool,
    },
    "sweep": {"parameter": str, "values": list},
}

VERIFY_IDS = ("lemma_T1_i", "lemma_T1_ii", "lemma_T1_iii", "corTC2_i", "Thm2_i", "GSE_i", "sug", "sugb",
              "ky", "sugf", "w", "identity_scaling", "rad_sym1", "conj")
STRICHARTZ_IDS = ("wh2", "lwh2", "wh2.1", "wh3", "lwh3", "dwh2", "dwh3", "lwi2", "lwi3", "wi2.1", "wi3.1",
                  "wi2", "wi3", "wh2_endpoint")


class UsageError(Exception):
    """Malformed command line or config."""


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


# ----------------------------------------------------------------- config

class Config:
    """Typed, validated view of an INI config."""

    def __init__(self, raw: configparser.ConfigParser):
        self.raw = raw
        self.data: dict[str, dict] = {}
        for sec in raw.sections():
            if sec not in SCHEMA:
                raise UsageError(f"unknown section [{sec}]; allowed: {', '.join(SCHEMA)}")
            keys = SCHEMA[sec]
            out = {}
            for key, text in raw.items(sec):
                if key not in keys:
                    raise UsageError(f"unknown key {key!r} in [{sec}]; allowed: {', '.join(keys)}")
                out[key] = _convert(text, keys[key], f"{sec}.{key}")
            self.data[sec] = out

    def get(self, sec: str, key: str, default=None):
        return self.data.get(sec, {}).get(key, default)

    def has(self, sec: str) -> bool:
        return sec in self.data

    def canonical(self) -> dict:
        return {sec: {k: self.raw.get(sec, k) for k in sorted(self.raw.options(sec))} for sec in sorted(self.raw.sections())}

    def hash(self) -> str:
        text = json.dumps(self.canonical(), sort_keys=True, separators=(",", ":"))
        return hashlib.sha256(text.encode()).hexdigest()

    @property
    def seed(self) -> int:
        return int(self.get("run", "seed", 0))


def _convert(text: str, kind: type, name: str):
    text = text.strip()
    try:
        if kind is bool:
            low = text.lower()
            if low in ("1", "true", "yes", "on"):
                return True
            if low in ("0", "false", "no", "off"):
                return False
            raise ValueError(text)
        if kind is list:
            items = [s.strip() for s in text.split(",") if s.strip()]
            return items
        return kind(text)
    except ValueError:
        raise UsageError(f"cannot read {name} = {text!r} as {kind.__name__}") from None


def _new_parser() -> configparser.ConfigParser:
    raw = configparser.ConfigParser(interpolation=None, inline_comment_prefixes=(";", "#"))
    raw.optionxform = str  # keys such as N and J are case sensitive
    return raw


def load_config(path) -> Config:
    raw = _new_parser()
    try:
        with open(path) as fh:
            raw.read_file(fh)
    except OSError as exc:
        raise UsageError(f"cannot read config {path}: {exc}") from None
    except configparser.Error as exc:
        raise UsageError(f"malformed config {path}: {exc}") from None
    return Config(raw)


def config_from_string(text: str) -> Config:
    raw = _new_parser()
    try:
        raw.read_string(text)
    except configparser.Error as exc:
        raise UsageError(f"malformed config: {exc}") from None
    return Config(raw)


# --------------------------------------------------------------- builders

def _grid(cfg: Config):
    if not cfg.has("grid"):
        raise UsageError("config has no [grid] section (keys n, N, R)")
    missing = [k for k in ("n", "N", "R") if cfg.get("grid", k) is None]
    if missing:
        raise UsageError(f"[grid] is missing {', '.join(missing)}")
    return make_grid(cfg.get("grid", "n"), cfg.get("grid", "N"), cfg.get("grid", "R"))


def _profile(cfg: Config, sec: str = "profile", required: bool = True):
    if not cfg.has(sec):
        if required:
            raise UsageError(f"config has no [{sec}] section")
        return None
    kind = cfg.get(sec, "kind")
    if kind is None:
        raise UsageError(f"[{sec}] needs kind")
    return builtin_profile(kind, cfg.get(sec, "alpha", 1.0))


def _window(cfg: Config, sec: str = "profile"):
    t0, t1 = cfg.get(sec, "t0"), cfg.get(sec, "t1")
    if (t0 is None) != (t1 is None):
        raise UsageError(f"[{sec}] needs both t0 and t1")
    return None if t0 is None else (t0, t1)


def _symbol(cfg: Config, sec: str = "symbol", default: str | None = None, m: float = 2.0):
    kind = cfg.get(sec, "kind", default)
    if kind is None:
        return None
    return builtin_symbol(kind, cfg.get(sec, "m", m), c=cfg.get(sec, "c", 1.0))


def _common(cfg: Config, threads: int) -> dict:
    kw = {"seed": cfg.seed, "threads": threads}
    if cfg.get("run", "ladder") is not None:
        kw["ladder"] = cfg.get("run", "ladder")
    return kw


def _put(kw: dict, key: str, value) -> None:
    if value is not None:
        kw[key] = value


def _floats(items) -> tuple | None:
    return None if items is None else tuple(float(v) for v in items)


def _verify(cfg: Config, threads: int) -> EstimateReport:
    rid = cfg.get("estimate", "id")
    if rid not in VERIFY_IDS:
        raise UsageError(f"[estimate] id must be one of {', '.join(VERIFY_IDS)} for verify, got {rid!r}")
    grid = _grid(cfg)
    kw = _common(cfg, threads)
    _put(kw, "family", cfg.get("estimate", "family"))
    _put(kw, "J", cfg.get("estimate", "J"))
    e = lambda k: cfg.get("estimate", k)  # noqa: E731
    if rid.startswith("lemma_T1_"):
        _put(kw, "tol", cfg.get("run", "tol"))
        _put(kw, "identity_tol", cfg.get("run", "identity_tol"))
        _put(kw, "s_half", cfg.get("profile", "s_half"))
        return verify_lemma_T1(rid[len("lemma_T1_"):], _profile(cfg), symbol=_symbol(cfg), p=e("p") or 2.0,
                               grid=grid, t_window=_window(cfg), **kw)
    if rid in ("corTC2_i", "rad_sym1"):
        a = _symbol(cfg, "symbol", "radial_power", 2.0)
        at = _symbol(cfg, "symbol2", "radial_power", 4.0)
        sb = e("sigma_beta") if e("sigma_beta") is not None else (a.order - 1) / 2
        tb = e("tau_beta") if e("tau_beta") is not None else (at.order - 1) / 2
        _put(kw, "tol", cfg.get("run", "tol"))
        _put(kw, "s_half_b", cfg.get("profile", "s_half"))
        _put(kw, "s_half_f", cfg.get("profile2", "s_half"))
        pb = _profile(cfg)
        pf = _profile(cfg, "profile2", required=False) or builtin_profile("identity")
        if rid == "corTC2_i":
            _put(kw, "x1_values", _floats(e("x1")))
            return verify_comparison(power_weight(sb), a, power_weight(tb), at, unit_weight(), pb, pf, grid=grid,
                                     t_window_b=_window(cfg), t_window_f=_window(cfg, "profile2"), **kw)
        return verify_radial(power_weight(sb), power_weight(tb), a, at, unit_weight(), pb, pf, grid=grid,
                             t_window_b=_window(cfg), t_window_f=_window(cfg, "profile2"), **kw)
    if rid in ("Thm2_i", "GSE_i"):
        _put(kw, "s_half", cfg.get("profile", "s_half"))
        _put(kw, "reference", e("reference"))
        _put(kw, "axis", e("axis"))
        return verify_smoothing(rid[:-2], n=grid.n, m=e("m") or 2.0, profile=_profile(cfg, required=False),
                                grid=grid, t_window=_window(cfg), **kw)
    if rid in ("sug", "sugb", "ky", "sugf", "w"):
        _put(kw, "s_half", cfg.get("profile", "s_half"))
        return verify_weighted_family(rid, n=grid.n, beta=e("beta"), alpha=e("alpha"), m=e("m") or 2.0, eps=e("eps"),
                                      profile=_profile(cfg, required=False), grid=grid, t_window=_window(cfg), **kw)
    if rid == "identity_scaling":
        _put(kw, "s_half", cfg.get("profile", "s_half"))
        _put(kw, "identity_tol", cfg.get("run", "identity_tol"))
        _put(kw, "lambdas", _floats(e("lambdas")))
        if e("beta") is None:
            raise UsageError("identity_scaling needs [estimate] beta")
        return verify_identity_scaling(e("m") or 4.0, e("beta"), _profile(cfg, required=False),
                                       _profile(cfg, "profile2", required=False), n=grid.n, grid=grid, **kw)
    # conj
    _put(kw, "s_half", cfg.get("profile", "s_half"))
    _put(kw, "local", cfg.get("profile", "local"))
    return verify_universal(_symbol(cfg, default="radial_power"), e("s_exp") or 1.0,
                            _profile(cfg, required=False), grid=grid, t_window=_window(cfg), **kw)


def _strichartz(cfg: Config, threads: int) -> EstimateReport:
    rid = cfg.get("estimate", "id")
    if rid not in STRICHARTZ_IDS:
        raise UsageError(f"[estimate] id must be one of {', '.join(STRICHARTZ_IDS)} for strichartz, got {rid!r}")
    grid = _grid(cfg)
    e = lambda k: cfg.get("estimate", k)  # noqa: E731
    profile = _profile(cfg, required=False)
    if rid == "wh2_endpoint":
        kw = {"seed": cfg.seed}
        _put(kw, "s_half", cfg.get("profile", "s_half"))
        _put(kw, "J", e("J"))
        return endpoint_smoke(profile, grid=grid, **kw)
    if e("q") is None or e("p") is None:
        raise UsageError("strichartz runs need [estimate] q and p")
    pair = AdmissiblePair(e("q"), e("p"), grid.n)
    kw = _common(cfg, threads)
    _put(kw, "J", e("J"))
    _put(kw, "s_half", cfg.get("profile", "s_half"))
    tw = _window(cfg)
    if rid.startswith("dwh"):
        return verify_dual(pair, profile, grid=grid, t_window=tw, local=bool(cfg.get("profile", "local", False)), **kw)
    if "wi" in rid:
        local = rid.startswith("lwi") or rid.endswith(".1")
        _put(kw, "T", e("T"))
        _put(kw, "sup_norm", e("sup_norm"))
        _put(kw, "reference", e("reference"))
        return verify_inhomogeneous(pair, profile=profile, local=local, grid=grid, t_window=tw, **kw)
    _put(kw, "family", e("family"))
    _put(kw, "lambdas", _floats(e("lambdas")))
    local = rid.startswith("l") or bool(cfg.get("profile", "local", False))
    return verify_homogeneous(pair, profile, grid=grid, t_window=tw, local=local, **kw)


def _initial_data(cfg: Config, grid) -> WaveField:
    p = lambda k, d: cfg.get("problem", k, d)  # noqa: E731
    kind = p("data", "gaussian")
    if kind != "gaussian":
        raise UsageError(f"[problem] data must be gaussian, got {kind!r}")
    r2 = sum((x - p("center", 0.0)) ** 2 for x in grid.coords)
    vals = np.exp(-r2 / p("width", 1.0) ** 2) * np.exp(1j * p("k", 0.0) * grid.coords[0]) * np.ones(grid.shape)
    f = WaveField(grid, vals)
    return f * (p("norm", 0.1) / f.norm())


def _solve(cfg: Config, threads: int, out: Path) -> tuple[dict, list[list[str]], int]:
    if not cfg.has("problem"):
        raise UsageError("solve needs a [problem] section")
    grid = _grid(cfg)
    p = lambda k, d=None: cfg.get("problem", k, d)  # noqa: E731
    if p("p") is None:
        raise UsageError("[problem] needs p")
    profile = _profile(cfg, required=False) or builtin_profile("identity")
    mu = complex(p("mu", 1.0), p("mu_imag", 0.0))
    u0 = _initial_data(cfg, grid)
    T = p("T", 0.5)
    est = local_time_estimate(u0.norm(), grid.n, mu, p("p"), profile, T_max=T)
    if p("auto_T", False):
        T = est
    prob = SemilinearProblem(grid.n, p("p"), mu, profile, u0, T, p("J", 512), bool(p("dealias", False)))
    traj, diag = picard_solve(prob, p("tol", 1e-12), p("max_iter", 50))
    trajectory_to_csv(traj, out / "solution.csv")
    report = {"id": "TNL1", "problem": prob.to_dict(), "diagnostics": diag.to_dict(), "local_time_estimate": est,
              "summary": trajectory_summary(traj)}
    rows = [["iteration", "distance", "factor"]]
    for i, d in enumerate(diag.distances):
        rows.append([str(i + 1), f"{d:.16e}", f"{diag.factors[i - 1]:.16e}" if i > 0 else ""])
    status = EXIT_PASS if (not diag.factors or diag.factors[-1] < 1.0) else EXIT_FAIL
    if p("oracle", False):
        ref = split_step_reference(prob)
        axes = tuple(range(1, grid.n + 1))
        err = float(np.max(np.sqrt(np.sum(np.abs(traj.values - ref.values) ** 2, axis=axes) * grid.cell_volume)))
        report["oracle_error"] = err
    if p("deltas") is not None:
        v0 = WaveField(grid, np.roll(u0.values, grid.N // 16, axis=0) * np.exp(1j * grid.coords[0]))
        report["continuity"] = data_continuity_experiment(prob, v0, [float(d) for d in p("deltas")], threads=threads)
    return report, rows, status


def _evolve(cfg: Config, out: Path) -> tuple[dict, list[list[str]], int]:
    grid = _grid(cfg)
    profile = _profile(cfg)
    symbol = _symbol(cfg, default="laplacian")
    fam = get_family(cfg.get("evolve", "family", "standard"), grid.n, cfg.seed)
    idx = cfg.get("evolve", "member", 0)
    if not 0 <= idx < len(fam):
        raise UsageError(f"[evolve] member must be in [0, {len(fam) - 1}]")
    steps = cfg.get("evolve", "steps", 10)
    if steps < 1:
        raise UsageError("[evolve] steps must be >= 1")
    times = np.linspace(0.0, cfg.get("evolve", "t_end", 1.0), steps + 1)
    traj = flow(fam[idx].field(grid), profile, symbol, times)
    trajectory_to_csv(traj, out / "trajectory.csv")
    summ = trajectory_summary(traj)
    rows = [["t", "l2_norm"]] + [[f"{t:.16e}", f"{v:.16e}"] for t, v in zip(times, traj.norms())]
    return {"id": "evolve", "member": fam[idx].name, "summary": summ}, rows, EXIT_PASS


# ------------------------------------------------------------------ runs

def _status(verdicts) -> int:
    verdicts = list(verdicts)
    if "FAIL" in verdicts:
        return EXIT_FAIL
    if all(v in ("PASS", "REPORTED") for v in verdicts):
        return EXIT_PASS
    return EXIT_INCONCLUSIVE


def execute(command: str, cfg: Config, out: Path, threads: int) -> tuple[dict, list[list[str]], int]:
    """Run one command; returns (report body, csv rows, exit status)."""
    if command == "verify":
        rep = _verify(cfg, threads)
    elif command == "strichartz":
        rep = _strichartz(cfg, threads)
    elif command == "solve":
        return _solve(cfg, threads, out)
    elif command == "evolve":
        return _evolve(cfg, out)
    else:
        raise UsageError(f"unknown command {command!r}")
    rows = [["id", "member", "ratio", "bound", "verdict"]] + rep.csv_rows()
    return rep.to_dict(), rows, _status([rep.verdict])


def sweep(cfg: Config, out: Path, threads: int) -> tuple[dict, list[list[str]], int]:
    """One run per value of the swept ``section.key``; rows in the order of the values."""
    name = cfg.get("sweep", "parameter")
    values = cfg.get("sweep", "values") or []
    if not name or "." not in name:
        raise UsageError("[sweep] parameter must be written section.key")
    if not values:
        raise UsageError("[sweep] values is empty")
    sec, key = name.split(".", 1)
    if sec not in SCHEMA or key not in SCHEMA[sec] or sec == "sweep":
        raise UsageError(f"cannot sweep {name}")
    base = cfg.get("run", "command")
    if base not in ("verify", "strichartz", "solve"):
        raise UsageError("[run] command must be verify, strichartz or solve for a sweep")

    def point(value: str):
        raw = _new_parser()
        raw.read_dict({s: dict(cfg.raw.items(s)) for s in cfg.raw.sections() if s != "sweep"})
        if not raw.has_section(sec):
            raw.add_section(sec)
        raw.set(sec, key, value)
        sub = Config(raw)
        sub_out = out / f"{sec}.{key}={value}"
        sub_out.mkdir(parents=True, exist_ok=True)
        body, rows, status = execute(base, sub, sub_out, 1)
        _write(sub_out, base, sub, body, rows, status)
        return body, status

    results = _pmap(point, values, threads)
    rows = [["parameter", "value", "id", "observed", "verdict"]]
    for value, (body, status) in zip(values, results):
        observed = body.get("observed", body.get("diagnostics", {}).get("residual", math.nan))
        rows.append([name, value, str(body.get("id")), f"{float(observed):.16e}",
                     str(body.get("verdict", "COMPLETED" if status == EXIT_PASS else "FAILED"))])
    statuses = [s for _, s in results]
    status = EXIT_FAIL if EXIT_FAIL in statuses else (EXIT_INCONCLUSIVE if EXIT_INCONCLUSIVE in statuses else EXIT_PASS)
    return {"id": "sweep", "parameter": name, "values": values, "points": [b for b, _ in results]}, rows, status


def _write(out: Path, command: str, cfg: Config, body: dict, rows: list[list[str]], status: int) -> None:
    doc = {
        "schema": SCHEMA_VERSION,
        "version": __version__,
        "command": command,
        "config_hash": cfg.hash(),
        "config": cfg.canonical(),
        "exit_code": status,
        "report": _json_safe(body),
    }
    with open(out / "report.json", "w") as fh:
        json.dump(doc, fh, indent=2, sort_keys=True, allow_nan=True)
        fh.write("\n")
    with open(out / "table.csv", "w", newline="") as fh:
        csv.writer(fh, lineterminator="\n").writerows(rows)


def run(command: str, config_path, out="dd-out", threads: int | None = None) -> int:
    """Programmatic equivalent of the command line; returns the exit code."""
    try:
        cfg = load_config(config_path)
        given = cfg.get("run", "command")
        if command != "sweep" and given is not None and given != command:
            raise UsageError(f"command {command!r} conflicts with [run] command = {given!r}")
        if command == "sweep" and not cfg.has("sweep"):
            raise UsageError("sweep needs a [sweep] section")
        out = Path(out)
        out.mkdir(parents=True, exist_ok=True)
        threads = threads or default_threads()
        if command == "sweep":
            body, rows, status = sweep(cfg, out, threads)
        else:
            body, rows, status = execute(command, cfg, out, threads)
        _write(out, command, cfg, body, rows, status)
    except UsageError as exc:
        print(f"dd: usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except ValueError as exc:
        # parameter validation (ranges, admissibility, domains) surfaces as ValueError
        print(f"dd: invalid parameters: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except Exception as exc:  # noqa: BLE001
        print(f"dd: error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_ERROR
    names = {0: "PASS", 2: "FAIL", 3: "INCONCLUSIVE"}
    print(f"dd {command}: {names.get(status, status)} -> {out / 'report.json'}")
    return status


def main(argv=None) -> int:
    parser = _Parser(prog="dd", description="Checks and solvers for time-degenerate dispersive flows.")
    parser.add_argument("command", choices=COMMANDS)
    parser.add_argument("--config", required=True, help="INI config file")
    parser.add_argument("--out", default="dd-out", help="output directory (default dd-out)")
    parser.add_argument("--threads", type=int, default=None,
                        help="worker threads (default: DD_THREADS or the CPU count)")
    try:
        args = parser.parse_args(argv)
    except UsageError as exc:
        print(f"dd: usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    if args.threads is not None and args.threads < 1:
        print("dd: usage error: --threads must be >= 1", file=sys.stderr)
        return EXIT_USAGE
    return run(args.command, args.config, args.out, args.threads)


if __name__ == "__main__":
    raise SystemExit(main())
