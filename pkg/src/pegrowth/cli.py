"""Batch experiment runner.

Every subcommand reads a JSON config (schema "1"), executes one analysis,
and writes a summary JSON plus CSV artifacts into the output directory.
Outputs are byte-identical for identical (config, seed), independent of the
worker count.

Exit codes: 0 success, 2 config error, 3 numerical diagnostic,
4 property violation detected.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import sys
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path

import numpy as np

from . import __version__, control, lie, projective, rates, spinchk
from .matcore import matrix_from_json, matrix_to_json
from .signals import PESignal, SignalClass, validate_pe

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_NUMERICAL = 3
EXIT_VIOLATION = 4

SUBCOMMANDS = ("lie-check", "acc-cert", "rates", "duality", "invariant-set",
               "spin-audit", "duality-grid")


class ConfigError(ValueError):
    pass


def _load_config(path: str):
    try:
        raw = Path(path).read_bytes()
    except OSError as exc:
        raise ConfigError(f"cannot read config: {exc}") from exc
    try:
        cfg = json.loads(raw)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config is not valid JSON: {exc}") from exc
    if not isinstance(cfg, dict):
        raise ConfigError("config must be a JSON object")
    if str(cfg.get("schema", "1")) != "1":
        raise ConfigError(f"unsupported config schema {cfg.get('schema')!r}")
    return cfg, hashlib.sha256(raw).hexdigest()


def _require(cfg, key):
    if key not in cfg:
        raise ConfigError(f"config is missing {key!r}")
    return cfg[key]


def _pair(cfg):
    obj = _require(cfg, "pair")
    try:
        pair = control.MatrixPair(matrix_from_json(obj["A"]), matrix_from_json(obj["B"]))
    except (KeyError, TypeError, ValueError) as exc:
        raise ConfigError(f"bad pair: {exc}") from exc
    return pair


def _gain(cfg, pair):
    obj = _require(cfg, "K")
    try:
        k = matrix_from_json(obj)
    except ValueError as exc:
        raise ConfigError(f"bad gain: {exc}") from exc
    if k.shape != (pair.m, pair.d):
        raise ConfigError(f"K must be {pair.m} x {pair.d}, got {k.shape}")
    return k


def _signal_class(cfg):
    try:
        return SignalClass(float(_require(cfg, "T")), float(_require(cfg, "mu")))
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc


def _budget(cfg, seed):
    fam = cfg.get("family", {})
    try:
        return rates.SearchBudget(
            n_periods=int(fam.get("n_periods", 4)),
            max_switches=int(fam.get("max_switches", 6)),
            time_grid=int(fam.get("time_grid", 16)),
            size=int(fam.get("size", 32)),
            include_constants=bool(fam.get("include_constants", True)),
            seed=seed)
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"bad family spec: {exc}") from exc


def _family(cfg, cls, seed, signal_file=None):
    sigs = []
    if signal_file is not None:
        try:
            payload = json.loads(Path(signal_file).read_text())
            sigs = [PESignal.from_json(o) for o in payload["signals"]]
        except (OSError, KeyError, ValueError, json.JSONDecodeError) as exc:
            raise ConfigError(f"bad signal file: {exc}") from exc
    elif "signals" in cfg:
        try:
            sigs = [PESignal.from_json(o) for o in cfg["signals"]]
        except ValueError as exc:
            raise ConfigError(f"bad signals entry: {exc}") from exc
    if sigs:
        bad = [i for i, s in enumerate(sigs)
               if s.period is None or not validate_pe(s, cls).valid]
        if bad:
            raise ConfigError(f"signals {bad} are not periodic PE signals for this class")
        return sigs
    return rates.bang_bang_family(cls, _budget(cfg, seed))


def _write_json(path: Path, obj) -> None:
    path.write_text(json.dumps(obj, sort_keys=True, indent=2) + "\n")


def _write_csv(path: Path, header, rows) -> None:
    def fmt(x):
        if isinstance(x, float):
            return format(x, ".17g")
        return str(x)

    lines = [",".join(header)]
    lines.extend(",".join(fmt(x) for x in row) for row in rows)
    path.write_text("\n".join(lines) + "\n")


def _summary_base(cfg_hash, seed):
    return {"version": __version__, "config_sha256": cfg_hash, "seed": seed}


def _parallel_map(fn, items, jobs):
    if jobs <= 1:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(max_workers=jobs) as pool:
        return list(pool.map(fn, items))


# -- subcommand bodies -------------------------------------------------------


def _run_lie_check(cfg, cfg_hash, seed, out, jobs):
    pair = _pair(cfg)
    k = _gain(cfg, pair)
    shift = float(cfg.get("lambda", 0.0))
    audit = lie.inclusion_chain_audit(pair.A, pair.B, k, shift=shift, seed=seed)
    summary = _summary_base(cfg_hash, seed)
    summary["certificates"] = {
        "larc_shifted": audit.larc_shifted.to_json(),
        "larc0": audit.larc0.to_json(),
        "plarc": audit.plarc.to_json(),
    }
    summary["chain"] = {"lambda": shift, "violations": list(audit.violations)}
    _write_json(out / "summary.json", summary)
    return EXIT_VIOLATION if audit.violations else EXIT_OK


def _run_acc_cert(cfg, cfg_hash, seed, out, jobs):
    pair = _pair(cfg)
    if pair.m != 1:
        raise ConfigError("acc-cert is single-input only")
    k = _gain(cfg, pair)
    try:
        cert = control.accessibility_certificate(
            pair.A, pair.B, k, trace_divisor=float(cfg.get("trace_divisor", 1.0)))
    except control.NotControllableError as exc:
        raise RuntimeError(str(exc)) from exc
    summary = _summary_base(cfg_hash, seed)
    summary["certificate"] = cert.to_json()
    _write_json(out / "summary.json", summary)
    return EXIT_OK


def _rates_rows(A, B, K, family, jobs):
    def one(item):
        idx, s = item
        m = rates.monodromy(A, B, K, s)
        return (idx, s.period, m.top_rate, m.bottom_rate, "")

    return _parallel_map(one, list(enumerate(family)), jobs)


def _run_rates(cfg, cfg_hash, seed, out, jobs, signal_file=None):
    pair = _pair(cfg)
    k = _gain(cfg, pair)
    cls = _signal_class(cfg)
    family = _family(cfg, cls, seed, signal_file)
    rows = _rates_rows(pair.A, pair.B, k, family, jobs)
    _write_csv(out / "rates.csv",
               ("signal_id", "period", "top_rate", "bottom_rate", "residual"), rows)
    rc = rates.rc_estimate(pair.A, pair.B, k, cls, family)
    rd = rates.rd_estimate(pair.A, pair.B, k, cls, family)
    delta = rates.delta_quantities(pair.A, pair.B, k, cls, family)
    summary = _summary_base(cfg_hash, seed)
    summary.update({
        "T": cls.T, "mu": cls.mu, "n_signals": len(family),
        "rc": rc.to_json(), "rd": rd.to_json(),
        "delta": delta.delta_hat.to_json(),
        "delta_star": delta.delta_star_hat.to_json(),
        "delta_mirror_identity": delta.mirror_identity_exact,
    })
    _write_json(out / "summary.json", summary)
    return EXIT_OK


def _run_duality(cfg, cfg_hash, seed, out, jobs, signal_file=None):
    pair = _pair(cfg)
    k = _gain(cfg, pair)
    cls = _signal_class(cfg)
    family = _family(cfg, cls, seed, signal_file)
    tol = float(cfg.get("tolerance", 1e-8))
    report = rates.duality_check(pair.A, pair.B, k, cls, family, tol=tol)
    rows = [(i, per, "", "", res) for i, per, res in report.per_signal]
    _write_csv(out / "duality.csv",
               ("signal_id", "period", "top_rate", "bottom_rate", "residual"), rows)
    summary = _summary_base(cfg_hash, seed)
    summary.update({
        "max_residual": report.max_residual,
        "tolerance": tol,
        "rc": report.rc.to_json(),
        "rd_mirror": report.rd_mirror.to_json(),
        "estimates_equal": report.estimates_equal,
        "ok": report.ok,
    })
    _write_json(out / "summary.json", summary)
    return EXIT_OK if report.ok else EXIT_VIOLATION


def _run_invariant_set(cfg, cfg_hash, seed, out, jobs):
    pair = _pair(cfg)
    k = _gain(cfg, pair)
    if pair.d != 2:
        raise ConfigError("invariant-set needs d = 2")
    cls = _signal_class(cfg)
    lo, hi = cfg.get("control_range", (cls.floor, 1.0))
    resolution = int(cfg.get("resolution", 4096))
    result = projective.invariant_control_set_d2(
        pair.A, pair.B, k, (float(lo), float(hi)), resolution=resolution, seed=seed)
    summary = _summary_base(cfg_hash, seed)
    summary["applicable"] = result.applicable
    summary["resolution"] = result.resolution
    summary["n_sinks"] = result.n_sinks
    if result.applicable:
        summary["arcs"] = result.arcs.to_json()["arcs"]
        theta = np.arange(resolution) * (np.pi / resolution)
        inside = result.arcs.contains(theta)
        rows = [(float(t), int(b)) for t, b in zip(theta, inside)]
        _write_csv(out / "indicator.csv", ("theta", "inside"), rows)
    _write_json(out / "summary.json", summary)
    if not result.applicable:
        return EXIT_NUMERICAL
    return EXIT_OK


def _run_spin_audit(cfg, cfg_hash, seed, out, jobs, n_seeds=None):
    n = int(n_seeds if n_seeds is not None else cfg.get("seeds", 200))
    if n <= 0:
        raise ConfigError("seeds must be positive")

    def one(i):
        m = spinchk.random_spin91(seed + i)
        g = spinchk.lorentz_form()
        from .matcore import opnorm
        membership = opnorm(m.T @ g + g @ m) / (1.0 + opnorm(m))
        ev = np.linalg.eigvals(m)
        from .matcore import multiset_residual
        symmetry = multiset_residual(ev, -ev)
        decomp = spinchk.charpoly_even_decomp(m)
        return (seed + i, membership, symmetry, decomp.odd_residual)

    rows = _parallel_map(one, range(n), jobs)
    _write_csv(out / "spin.csv",
               ("seed", "membership_residual", "symmetry_residual", "odd_residual"),
               rows)
    summary = _summary_base(cfg_hash, seed)
    summary.update({
        "draws": n,
        "max_membership_residual": max(r[1] for r in rows),
        "max_symmetry_residual": max(r[2] for r in rows),
        "max_odd_residual": max(r[3] for r in rows),
    })
    _write_json(out / "summary.json", summary)
    return EXIT_OK


def _run_duality_grid(cfg, cfg_hash, seed, out, jobs, signal_file=None):
    pair = _pair(cfg)
    cls = _signal_class(cfg)
    family = _family(cfg, cls, seed, signal_file)
    mirrored = rates.mirror_family(family)
    grid_spec = cfg.get("K_grid", {"count": 100, "scale": 1.0})
    if "K" in cfg and "K_grid" not in cfg:
        gains = [_gain(cfg, pair)]
    else:
        try:
            count = int(grid_spec.get("count", 100))
            scale = float(grid_spec.get("scale", 1.0))
        except (TypeError, ValueError, AttributeError) as exc:
            raise ConfigError(f"bad K_grid: {exc}") from exc
        rng = np.random.default_rng(seed)
        gains = [scale * rng.standard_normal((pair.m, pair.d)) for _ in range(count)]

    def one(item):
        idx, k = item
        rc = rates.rc_estimate(pair.A, pair.B, k, cls, family).value
        rd = rates.rd_estimate(-pair.A, -pair.B, k, cls, mirrored).value
        return (idx, rc, rd, int(rc == rd))

    rows = _parallel_map(one, list(enumerate(gains)), jobs)
    _write_csv(out / "grid.csv", ("k_index", "rc", "rd_mirror", "equal"), rows)
    sup_rc = max(r[1] for r in rows)
    sup_rd = max(r[2] for r in rows)
    all_equal = all(r[3] for r in rows)
    summary = _summary_base(cfg_hash, seed)
    summary.update({
        "n_gains": len(gains),
        "sup_rc": sup_rc,
        "sup_rd_mirror": sup_rd,
        "per_gain_equal": all_equal,
        "sup_equal": bool(sup_rc == sup_rd),
    })
    _write_json(out / "summary.json", summary)
    return EXIT_OK if all_equal and sup_rc == sup_rd else EXIT_VIOLATION


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="pegrowth",
        description="Growth-rate and rank-certificate experiments for "
                    "persistently excited linear systems")
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="subcommand", required=True)
    for name in SUBCOMMANDS:
        p = sub.add_parser(name)
        p.add_argument("--config", required=True, help="JSON config file")
        p.add_argument("--seed", type=int, default=None,
                       help="overrides the config seed")
        p.add_argument("--out", default=".", help="output directory")
        p.add_argument("--jobs", type=int, default=1)
        if name in ("rates", "duality", "duality-grid"):
            p.add_argument("--signal-file", default=None,
                           help="JSON file with an explicit signal family")
        if name == "spin-audit":
            p.add_argument("--seeds", type=int, default=None,
                           help="number of seeded draws")
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg, cfg_hash = _load_config(args.config)
        seed = args.seed if args.seed is not None else int(cfg.get("seed", 0))
        out = Path(args.out)
        out.mkdir(parents=True, exist_ok=True)
        jobs = max(1, args.jobs)
        if args.subcommand == "lie-check":
            return _run_lie_check(cfg, cfg_hash, seed, out, jobs)
        if args.subcommand == "acc-cert":
            return _run_acc_cert(cfg, cfg_hash, seed, out, jobs)
        if args.subcommand == "rates":
            return _run_rates(cfg, cfg_hash, seed, out, jobs, args.signal_file)
        if args.subcommand == "duality":
            return _run_duality(cfg, cfg_hash, seed, out, jobs, args.signal_file)
        if args.subcommand == "invariant-set":
            return _run_invariant_set(cfg, cfg_hash, seed, out, jobs)
        if args.subcommand == "spin-audit":
            return _run_spin_audit(cfg, cfg_hash, seed, out, jobs, args.seeds)
        if args.subcommand == "duality-grid":
            return _run_duality_grid(cfg, cfg_hash, seed, out, jobs,
                                     getattr(args, "signal_file", None))
        raise ConfigError(f"unknown subcommand {args.subcommand}")
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (lie.LieClosureError, control.NotControllableError,
            projective.SteeringError, ArithmeticError, RuntimeError) as exc:
        print(f"numerical diagnostic: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL


if __name__ == "__main__":
    raise SystemExit(main())
