"""Deterministic experiment runner.

    opnormlab gap --nmax 6 --d 1 --format csv
    opnormlab interp --dims 2,2 --pairs 2 --seed 0 --restarts 32
    opnormlab diamond --map transpose --dim 3
    opnormlab theorem1 --input element.json
    opnormlab cocycle --algebra truncpoly --degree 5
    opnormlab sdp-selftest
    opnormlab all --seed 7

Every command produces a JSON report (see ``docs/report.schema.json``).
Flags override values from ``--config FILE``; both override built-in
defaults.  Exit status: 0 if no check failed, 1 on a failed check or an
internal numerical error, 2 on bad usage.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import os
import sys
import tempfile
import time
import zlib

import numpy as np

from . import __version__
from . import cocycle as cc
from . import counterexample, sdp, superop, tensornorm
from .linalg import ConvergenceError, SizeError, dimension_cap

SCHEMA_VERSION = 1

DEFAULTS = {
    "gap": {"nmax": 6, "d": 1},
    "interp": {"dims": "2,2", "pairs": 2, "restarts": 32, "count": 1},
    "diamond": {"map": "transpose", "dim": 2},
    "theorem1": {"input": None},
    "cocycle": {"algebra": "truncpoly", "degree": 5},
    "sdp-selftest": {"count": 100},
    "all": {},
}
CSV_COLUMNS = {
    "gap": ["n", "h_upper", "min_flipped", "ratio"],
    "interp": ["index", "s2", "lower1", "lowerInf", "verdict"],
}


class UsageError(Exception):
    pass


def child_seed(root, command):
    """Per-command stream, stable under adding or removing commands."""
    return np.random.SeedSequence([int(root), zlib.crc32(command.encode())])


def child_rng(root, command):
    return np.random.default_rng(child_seed(root, command))


class Tally:
    def __init__(self):
        self.passed = self.failed = self.inconclusive = 0

    def add(self, outcome):
        if outcome is True or outcome == "pass":
            self.passed += 1
        elif outcome == "inconclusive":
            self.inconclusive += 1
        else:
            self.failed += 1

    def as_dict(self):
        return {"passed": self.passed, "failed": self.failed, "inconclusive": self.inconclusive}


def _jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, (complex, np.complexfloating)):
        return [float(obj.real), float(obj.imag)]
    if isinstance(obj, np.ndarray):
        return _jsonable(obj.tolist())
    if isinstance(obj, np.bool_):
        return bool(obj)
    if isinstance(obj, np.integer):
        return int(obj)
    if isinstance(obj, np.floating):
        return float(obj)
    return obj


def _check_cap(size):
    cap = dimension_cap()
    if size > cap:
        raise UsageError(f"requested size {size} exceeds the dimension cap {cap} (OPNORMLAB_CAP)")


# ---------------------------------------------------------------------------
# commands
# ---------------------------------------------------------------------------


def run_gap(cfg, tally):
    nmax, d = int(cfg["nmax"]), int(cfg["d"])
    if nmax < 2 or d < 1:
        raise UsageError("gap needs --nmax >= 2 and --d >= 1")
    _check_cap((nmax * d) ** 2)
    rows = counterexample.gap_experiment(nmax, d)
    for r in rows:
        tally.add(abs(r["h_upper"] - 1.0) <= 1e-12)
        tally.add(abs(r["min_flipped"] - math.sqrt(r["n"])) <= 1e-9)
        cert = r["certificate"]
        tally.add(cert["consistent"] and cert["lower"] >= math.sqrt(r["n"]) - 1e-9)
    return {"rows": rows}


def run_interp(cfg, tally, rng):
    try:
        n, m = (int(v) for v in str(cfg["dims"]).split(","))
    except ValueError as exc:
        raise UsageError("--dims must look like n,m") from exc
    k, restarts, count = int(cfg["pairs"]), int(cfg["restarts"]), int(cfg["count"])
    if min(n, m, k, restarts, count) < 1:
        raise UsageError("interp parameters must be positive")
    _check_cap((n * m) ** 2)
    rows = []
    for i in range(count):
        phi = superop.random_superoperator((n, m), k, rng)
        rep = superop.interpolation_check(phi, restarts=restarts, rng=rng)
        tally.add("pass" if rep.verdict == "holds" else rep.verdict)
        row = {"index": i}
        row.update(rep.to_dict())
        rows.append(row)
    return {"rows": rows}


def run_diamond(cfg, tally):
    d = int(cfg["dim"])
    if d < 1:
        raise UsageError("--dim must be positive")
    _check_cap(2 * d * d)
    kind = cfg["map"]
    if kind == "transpose":
        phi, expected = superop.transpose_map(d), float(d)
    elif kind == "identity":
        phi, expected = superop.identity_map(d), 1.0
    else:
        raise UsageError(f"unknown map {kind!r}")
    res = superop.diamond(phi)
    start = [superop.maximally_entangled(d)]
    lower = superop.diamond_lower(phi, restarts=4, starts=start).value
    tally.add(abs(res.value - expected) <= 1e-5)
    tally.add(res.value >= lower - 1e-6)
    return {"d": d, "map": kind, "value": res.value, "gap": res.gap, "seesaw_lower": lower}


def run_theorem1(cfg, tally, rng):
    path = cfg.get("input")
    if path:
        with open(path) as fh:
            u = tensornorm.TensorElement.from_dict(json.load(fh))
    else:
        u = tensornorm.random_element((3, 3), (3, 3), 3, rng)
    cert = tensornorm.theorem1_certificate(u)
    tally.add(cert.consistent)
    out = cert.to_dict()
    out["haagerup_upper"] = tensornorm.haagerup_upper(tensornorm.opposite(u.padded(), "second"))
    return out


def run_cocycle(cfg, tally, rng):
    if cfg["algebra"] != "truncpoly":
        raise UsageError(f"unknown algebra {cfg['algebra']!r}")
    N = int(cfg["degree"])
    if N < 2:
        raise UsageError("--degree must be at least 2")
    _check_cap(N * N)
    _, _, DA = cc.truncated_poly(N, "w")
    _, _, DB = cc.truncated_poly(N, "z")
    F = cc.wedge_cocycle(DA, DB)
    is_cocycle = cc.cocycle_check(F)
    antisym = cc.antisymmetry_check(F)
    witness = cc.nonvanishing_witness(DA, DB, F, rng=rng)
    pol = cc.polarization_check(F.algebra, samples=200, rng=rng)
    spans = cc.power_span_check(F.algebra, rng=rng)
    sym = all(cc.coboundary_symmetry_check(F.algebra, F.module,
                                           cc.random_cochain1(F.algebra, F.module, rng))
              for _ in range(5))
    for ok in (is_cocycle, antisym, witness is not None and witness["residual"] <= 1e-10,
               pol["passed"], spans["passed"], sym):
        tally.add(bool(ok))
    return {"degree": N, "cocycle": is_cocycle, "antisymmetric": antisym, "witness": witness,
            "polarization": pol["passed"], "polarization_residuals": pol,
            "spans": spans, "coboundaries_symmetric": sym}


def run_selftest(cfg, tally, rng):
    records = sdp.selftest(rng, n_random=int(cfg["count"]))
    for r in records:
        tally.add(r["passed"])
    return {"instances": records}


def _dispatch(command, cfg, tally, seed):
    rng = child_rng(seed, command)
    if command == "gap":
        return run_gap(cfg, tally)
    if command == "interp":
        return run_interp(cfg, tally, rng)
    if command == "diamond":
        return run_diamond(cfg, tally)
    if command == "theorem1":
        return run_theorem1(cfg, tally, rng)
    if command == "cocycle":
        return run_cocycle(cfg, tally, rng)
    if command == "sdp-selftest":
        return run_selftest(cfg, tally, rng)
    if command == "all":
        out = {}
        for sub in ("gap", "interp", "diamond", "theorem1", "cocycle", "sdp-selftest"):
            out[sub] = _dispatch(sub, dict(DEFAULTS[sub]), tally, seed)
        return out
    raise UsageError(f"unknown command {command!r}")


def run(command, config=None, seed=0):
    """Execute ``command`` and return the report dict (nothing is written)."""
    cfg = dict(DEFAULTS[command])
    cfg.update(config or {})
    tally = Tally()
    t0 = time.perf_counter()
    error = None
    try:
        result = _dispatch(command, cfg, tally, seed)
    except (ConvergenceError, RuntimeError, np.linalg.LinAlgError, SizeError) as exc:
        result, error = {}, f"{type(exc).__name__}: {exc}"
        tally.add(False)
    report = {
        "schema_version": SCHEMA_VERSION,
        "command": command,
        "config": _jsonable({"seed": seed, "cap": dimension_cap(), **cfg}),
        "result": _jsonable(result),
        "wall_time_ms": (time.perf_counter() - t0) * 1e3,
        "version": __version__,
        "checks": tally.as_dict(),
    }
    if error:
        report["error"] = error
    return report


# ---------------------------------------------------------------------------
# output
# ---------------------------------------------------------------------------


def write_atomic(path, text):
    directory = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=".opnormlab-")
    try:
        with os.fdopen(fd, "w") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def to_csv(command, report):
    cols = CSV_COLUMNS[command]
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(cols)
    for row in report["result"].get("rows", []):
        writer.writerow([repr(row[c]) if isinstance(row[c], float) else row[c] for c in cols])
    return buf.getvalue()


def build_parser():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=None)
    common.add_argument("--out", default=None, help="output file (default: stdout)")
    common.add_argument("--format", choices=("json", "csv"), default=None)
    common.add_argument("--config", default=None, help="JSON file with default flag values")

    parser = argparse.ArgumentParser(prog="opnormlab", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("gap", parents=[common])
    p.add_argument("--nmax", type=int)
    p.add_argument("--d", type=int)

    p = sub.add_parser("interp", parents=[common])
    p.add_argument("--dims")
    p.add_argument("--pairs", type=int)
    p.add_argument("--restarts", type=int)
    p.add_argument("--count", type=int)

    p = sub.add_parser("diamond", parents=[common])
    p.add_argument("--map", choices=("transpose", "identity"))
    p.add_argument("--dim", type=int)

    p = sub.add_parser("theorem1", parents=[common])
    p.add_argument("--input")

    p = sub.add_parser("cocycle", parents=[common])
    p.add_argument("--algebra", choices=("truncpoly",))
    p.add_argument("--degree", type=int)

    p = sub.add_parser("sdp-selftest", parents=[common])
    p.add_argument("--count", type=int)

    sub.add_parser("all", parents=[common])
    return parser


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    command = args.command
    file_cfg = {}
    if args.config:
        try:
            with open(args.config) as fh:
                file_cfg = json.load(fh)
        except (OSError, ValueError) as exc:
            parser.error(f"cannot read config: {exc}")
    flags = {k: v for k, v in vars(args).items()
             if v is not None and k not in ("command", "config")}
    merged = {**file_cfg, **flags}
    seed = int(merged.pop("seed", 0))
    if seed < 0:
        parser.error("--seed must be non-negative")
    out = merged.pop("out", None)
    fmt = merged.pop("format", "json")
    unknown = set(merged) - set(DEFAULTS[command])
    if unknown:
        parser.error(f"unknown option(s) for {command}: {sorted(unknown)}")
    if fmt == "csv" and command not in CSV_COLUMNS:
        parser.error(f"--format csv is not available for {command}")

    try:
        report = run(command, merged, seed)
    except UsageError as exc:
        parser.error(str(exc))

    text = json.dumps(report, indent=2, sort_keys=True) + "\n"
    if fmt == "csv":
        body = to_csv(command, report)
        if out:
            write_atomic(out, body)
            write_atomic(out + ".report.json", text)
        else:
            sys.stdout.write(body)
            sys.stderr.write(text)
    elif out:
        write_atomic(out, text)
    else:
        sys.stdout.write(text)
    return 0 if report["checks"]["failed"] == 0 and "error" not in report else 1


if __name__ == "__main__":
    sys.exit(main())
