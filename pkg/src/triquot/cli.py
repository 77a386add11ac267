"""Command-line driver: parameter derivation, sweeps, reports, and caching.

Commands
    params     derive (h, r0, d', n, N, vdim) for a range of inputs
    vi         evaluate one subset sum for explicit (n, r, g, d, N)
    verlinde   Verlinde numbers over a range
    segre      Segre numbers over a range
    verify     full triangle reports with all consistency checks
    sweep      triangle corners only (fast mode), same record shape
    fit        exact level-polynomial fit with degree certification
    calibrate  select the convention and persist it for later commands

Ranges are inclusive `a..b` or single values.  Exit codes: 0 all pass,
1 mathematical mismatch, 2 invalid parameters or configuration.

Results for (command, input, convention, backend) are cached content-addressed
under the cache directory; cached records hold final integers and verdicts
only, so reports are byte-stable for a fixed job regardless of worker count
or cache state.  Wall-clock timings are emitted only with --timings, because
they would break that stability.
"""

from __future__ import annotations

import argparse
import csv
import hashlib
import io
import json
import logging
import os
import sys
from time import perf_counter

from .quotvi import CalibrationError, DegreeMatchError, VIConvention, VIInstance, calibrate, vi_sum
from .triangle import (
    DNormalizationPolicy,
    ModuliInput,
    derive_params,
    fit_level_polynomial,
    verify_triangle,
)

log = logging.getLogger("triquot.cli")

SCHEMA_VERSION = 1
CSV_FIELDS = ("g", "r", "d", "d_norm", "ell", "n", "N",
              "verlinde", "quot", "segre", "independent", "verdict")


def parse_range(text: str) -> list[int]:
    """Inclusive `a..b` range or a single integer."""
    if ".." in text:
        lo_s, hi_s = text.split("..", 1)
        lo, hi = int(lo_s), int(hi_s)
        if hi < lo:
            raise ValueError(f"empty range: {text}")
        return list(range(lo, hi + 1))
    return [int(text)]


# ---------------------------------------------------------------------------
# Cache and convention persistence


def default_cache_dir() -> str:
    env = os.environ.get("TRIQUOT_CACHE")
    if env:
        return env
    return os.path.join(os.path.expanduser("~"), ".cache", "triquot")


def _atomic_write(path: str, payload: str) -> None:
    os.makedirs(os.path.dirname(path), exist_ok=True)
    tmp = path + ".tmp"
    with open(tmp, "w") as fh:
        fh.write(payload)
    os.replace(tmp, path)


def save_convention(cache_dir: str, conv: VIConvention) -> str:
    path = os.path.join(cache_dir, "convention.json")
    _atomic_write(path, json.dumps(
        {"schemaVersion": SCHEMA_VERSION, "convention": conv.as_dict()},
        indent=2) + "\n")
    return path


def load_convention(cache_dir: str) -> VIConvention | None:
    path = os.path.join(cache_dir, "convention.json")
    try:
        with open(path) as fh:
            data = json.load(fh)
        return VIConvention.from_dict(data["convention"])
    except FileNotFoundError:
        return None
    except (json.JSONDecodeError, KeyError, TypeError, ValueError) as exc:
        log.warning("ignoring corrupt convention file %s: %s", path, exc)
        return None


def cache_key(command: str, fingerprint: dict, conv: VIConvention, backend: str) -> str:
    blob = json.dumps(
        {"schema": SCHEMA_VERSION, "command": command, "input": fingerprint,
         "convention": conv.as_dict(), "backend": backend},
        sort_keys=True)
    return hashlib.sha256(blob.encode()).hexdigest()


def cache_lookup(cache_dir: str, key: str) -> dict | None:
    path = os.path.join(cache_dir, "records", key + ".json")
    try:
        with open(path) as fh:
            return json.load(fh)
    except FileNotFoundError:
        return None
    except (json.JSONDecodeError, ValueError) as exc:
        log.warning("ignoring corrupt cache entry %s: %s", path, exc)
        return None


def cache_store(cache_dir: str, key: str, record: dict) -> None:
    path = os.path.join(cache_dir, "records", key + ".json")
    _atomic_write(path, json.dumps(record, indent=2) + "\n")


# ---------------------------------------------------------------------------
# Emission


def _emit_json(report: dict, out: str | None) -> None:
    payload = json.dumps(report, indent=2) + "\n"
    if out:
        _atomic_write(os.path.abspath(out), payload)
    else:
        sys.stdout.write(payload)


def _emit_csv(report: dict, out: str | None) -> None:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(CSV_FIELDS)
    for rec in report["records"]:
        if "error" in rec:
            mi = rec["input"]
            writer.writerow([mi["g"], mi["r"], mi["d"], "", mi["ell"],
                             "", "", "", "", "", "", "fail"])
            continue
        mi, p = rec["input"], rec["params"]
        writer.writerow([
            mi["g"], mi["r"], mi["d"], mi["d"] % mi["r"], mi["ell"],
            p["n"], p["N"],
            rec["verlindeValue"], rec["quotValue"], rec["segreValue"],
            str(rec["segreIndependent"]).lower(),
            "pass" if rec["passed"] else "fail",
        ])
    payload = buf.getvalue()
    if out:
        _atomic_write(os.path.abspath(out), payload)
    else:
        sys.stdout.write(payload)


def _report(command: str, job: dict, records: list, timings: dict | None) -> dict:
    passed = sum(1 for r in records if r.get("passed") and "error" not in r)
    verdict = "pass" if passed == len(records) else "fail"
    return {
        "schemaVersion": SCHEMA_VERSION,
        "job": dict(command=command, **job),
        "records": records,
        "aggregate": {"verdict": verdict, "passed": passed, "total": len(records)},
        "timings": timings,
    }


# ---------------------------------------------------------------------------
# Commands


def _inputs(args) -> list[ModuliInput]:
    out = []
    for g in parse_range(args.g):
        for r in parse_range(args.r):
            for d in parse_range(args.d):
                for ell in parse_range(args.ell):
                    out.append(ModuliInput(g, r, d, ell))
    if not out:
        raise ValueError("empty input range")
    return out


def _require_convention(args) -> VIConvention:
    conv = load_convention(args.cache_dir)
    if conv is None:
        raise ConfigError(
            f"no calibrated convention in {args.cache_dir}; run `triquot calibrate` first"
        )
    return conv


class ConfigError(Exception):
    pass


def _cmd_params(args) -> int:
    policy = DNormalizationPolicy(d_prime=args.d_prime)
    records = []
    for mi in _inputs(args):
        p = derive_params(mi, policy)
        records.append({
            "input": {"g": mi.g, "r": mi.r, "d": mi.d, "ell": mi.ell},
            "params": {"h": p.h, "r0": p.r0, "d0": p.d0, "dPrime": p.d_prime,
                       "d0Prime": p.d0_prime, "n": p.n, "N": p.N, "vdim": p.vdim},
            "passed": True,
        })
        print(f"g={mi.g} r={mi.r} d={mi.d} ell={mi.ell}: h={p.h} r0={p.r0} "
              f"d'={p.d_prime} n={p.n} N={p.N} vdim={p.vdim}")
    if args.out:
        _emit_json(_report("params", _job_echo(args), records, None), args.out)
    return 0


def _cmd_vi(args) -> int:
    conv = _require_convention(args)
    inst = VIInstance(n=args.n, r=args.r_val, g=args.g_val, d=args.d_val, N=args.N)
    value = vi_sum(inst, conv, args.backend, args.workers)
    print(f"n={inst.n} r={inst.r} g={inst.g} d={inst.d} N={inst.N}: {value}")
    if args.out:
        records = [{"instance": {"n": inst.n, "r": inst.r, "g": inst.g,
                                 "d": inst.d, "N": inst.N},
                    "value": value, "passed": True}]
        _emit_json(_report("vi", _job_echo(args, conv), records, None), args.out)
    return 0


def _triangle_records(args, conv: VIConvention, full: bool, command: str) -> tuple[list, int, int]:
    records = []
    hits = misses = 0
    for mi in _inputs(args):
        fp = {"g": mi.g, "r": mi.r, "d": mi.d, "ell": mi.ell, "full": full}
        key = cache_key(command, fp, conv, args.backend)
        rec = None if args.no_cache else cache_lookup(args.cache_dir, key)
        if rec is not None:
            hits += 1
        else:
            misses += 1
            try:
                rep = verify_triangle(mi, conv, args.backend, args.workers, full=full)
                rec = rep.as_dict()
                del rec["timings"]
            except (CalibrationError, ArithmeticError) as exc:
                rec = {"input": {"g": mi.g, "r": mi.r, "d": mi.d, "ell": mi.ell},
                       "error": str(exc), "passed": False}
            if not args.no_cache:
                cache_store(args.cache_dir, key, rec)
        records.append(rec)
        if "error" in rec:
            print(f"g={mi.g} r={mi.r} d={mi.d} ell={mi.ell}: error: {rec['error']}")
        else:
            print(f"g={mi.g} r={mi.r} d={mi.d} ell={mi.ell}: "
                  f"verlinde={rec['verlindeValue']} quot={rec['quotValue']} "
                  f"segre={rec['segreValue']} "
                  f"verdict={'pass' if rec['passed'] else 'fail'}")
    return records, hits, misses


def _cmd_triangle(args, full: bool, command: str) -> int:
    t0 = perf_counter()
    conv = _require_convention(args)
    records, hits, misses = _triangle_records(args, conv, full, command)
    timings = {"wall": perf_counter() - t0} if args.timings else None
    report = _report(command, _job_echo(args, conv), records, timings)
    if args.format == "csv":
        _emit_csv(report, args.out)
    else:
        _emit_json(report, args.out)
    if hits:
        print(f"cache: {hits} hits, {misses} misses", file=sys.stderr)
    agg = report["aggregate"]
    print(f"aggregate: {agg['verdict']} ({agg['passed']}/{agg['total']})",
          file=sys.stderr)
    return 0 if agg["verdict"] == "pass" else 1


def _value_records(args, command: str) -> int:
    conv = _require_convention(args)
    records = []
    failed = False
    for mi in _inputs(args):
        fp = {"g": mi.g, "r": mi.r, "d": mi.d, "ell": mi.ell}
        key = cache_key(command, fp, conv, args.backend)
        rec = None if args.no_cache else cache_lookup(args.cache_dir, key)
        if rec is None:
            try:
                if command == "segre":
                    from .triangle import segre_number
                    value, independent = segre_number(mi, conv, args.backend, args.workers)
                    rec = {"input": fp, "value": value,
                           "independent": independent, "passed": value >= 0}
                else:
                    from .triangle import verlinde_number
                    value = verlinde_number(mi, conv, args.backend, args.workers)
                    rec = {"input": fp, "value": value, "passed": value >= 0}
            except (CalibrationError, ArithmeticError) as exc:
                rec = {"input": fp, "error": str(exc), "passed": False}
            if not args.no_cache:
                cache_store(args.cache_dir, key, rec)
        records.append(rec)
        if "error" in rec:
            failed = True
            print(f"g={mi.g} r={mi.r} d={mi.d} ell={mi.ell}: error: {rec['error']}")
        else:
            extra = f" independent={rec['independent']}" if "independent" in rec else ""
            print(f"g={mi.g} r={mi.r} d={mi.d} ell={mi.ell}: {rec['value']}{extra}")
    if args.out:
        _emit_json(_report(command, _job_echo(args, conv), records, None), args.out)
    return 1 if failed else 0


def _cmd_fit(args) -> int:
    conv = _require_convention(args)
    ells = parse_range(args.ell)
    try:
        fit = fit_level_polynomial(args.g_val, args.r_val, args.d_val, ells,
                                   conv, args.backend, args.workers)
    except ArithmeticError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    coeffs = [str(c) for c in fit.coefficients]
    print(f"degree={fit.degree} volume-term={fit.volume_term}")
    print("coefficients (ascending): " + ", ".join(coeffs))
    if args.out:
        records = [{
            "g": args.g_val, "r": args.r_val, "d": args.d_val,
            "levels": list(fit.levels), "values": list(fit.values),
            "degree": fit.degree, "coefficients": coeffs,
            "volumeTerm": str(fit.volume_term), "passed": True,
        }]
        _emit_json(_report("fit", _job_echo(args, conv), records, None), args.out)
    return 0


def _cmd_calibrate(args) -> int:
    space = None
    conv = calibrate(space, backend=args.backend)
    path = save_convention(args.cache_dir, conv)
    print(f"calibrated: {json.dumps(conv.as_dict())}")
    print(f"written to {path}", file=sys.stderr)
    return 0


def _job_echo(args, conv: VIConvention | None = None) -> dict:
    echo = {}
    for key in ("g", "r", "d", "ell", "n", "N", "backend", "format"):
        val = getattr(args, key, None)
        if val is not None:
            echo[key] = val
    if conv is not None:
        echo["convention"] = conv.as_dict()
    return echo


# ---------------------------------------------------------------------------
# Parser


def _add_common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--backend", choices=("exact", "float"), default="exact",
                   help="arithmetic backend (exact is the arbiter)")
    p.add_argument("--workers", type=int, default=None,
                   help="worker processes (default: TRIQUOT_WORKERS or all cores)")
    p.add_argument("--cache-dir", default=default_cache_dir(),
                   help="cache and convention directory")
    p.add_argument("--no-cache", action="store_true",
                   help="skip the result cache")
    p.add_argument("--out", default=None, help="write a report file")
    p.add_argument("--timings", action="store_true",
                   help="include wall-clock timings in the report "
                        "(breaks byte-stability)")
    p.add_argument("-v", "--verbose", action="store_true")


def _add_ranges(p: argparse.ArgumentParser) -> None:
    p.add_argument("--g", required=True, help="genus, value or a..b")
    p.add_argument("--r", required=True, help="rank, value or a..b")
    p.add_argument("--d", required=True, help="degree, value or a..b")
    p.add_argument("--ell", required=True, help="level, value or a..b")


def _build_parser() -> argparse.ArgumentParser:
    top = argparse.ArgumentParser(
        prog="triquot",
        description="Exact verification of the Verlinde / Quot / Segre triangle.")
    sub = top.add_subparsers(dest="command", required=True)

    p = sub.add_parser("params", help="derive Quot-side parameters")
    _add_ranges(p)
    p.add_argument("--d-prime", type=int, default=None,
                   help="explicit normalized degree (must match d mod r)")
    _add_common(p)

    p = sub.add_parser("vi", help="evaluate one subset sum")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--r", dest="r_val", type=int, required=True)
    p.add_argument("--g", dest="g_val", type=int, required=True)
    p.add_argument("--d", dest="d_val", type=int, required=True)
    p.add_argument("--N", type=int, required=True)
    _add_common(p)

    for name, help_text in (("verlinde", "Verlinde numbers over a range"),
                            ("segre", "Segre numbers over a range")):
        p = sub.add_parser(name, help=help_text)
        _add_ranges(p)
        _add_common(p)

    for name, help_text in (("verify", "full triangle reports"),
                            ("sweep", "triangle corners only, fast mode")):
        p = sub.add_parser(name, help=help_text)
        _add_ranges(p)
        p.add_argument("--format", choices=("json", "csv"), default="json")
        _add_common(p)

    p = sub.add_parser("fit", help="exact level-polynomial fit")
    p.add_argument("--g", dest="g_val", type=int, required=True)
    p.add_argument("--r", dest="r_val", type=int, required=True)
    p.add_argument("--d", dest="d_val", type=int, required=True)
    p.add_argument("--ell", required=True, help="consecutive level range a..b")
    _add_common(p)

    p = sub.add_parser("calibrate", help="select and persist the convention")
    _add_common(p)

    return top


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    logging.basicConfig(
        level=logging.INFO if getattr(args, "verbose", False) else logging.WARNING,
        format="%(levelname)s %(name)s: %(message)s")
    try:
        if args.command == "params":
            return _cmd_params(args)
        if args.command == "vi":
            return _cmd_vi(args)
        if args.command == "verlinde":
            return _value_records(args, "verlinde")
        if args.command == "segre":
            return _value_records(args, "segre")
        if args.command == "verify":
            return _cmd_triangle(args, full=True, command="verify")
        if args.command == "sweep":
            return _cmd_triangle(args, full=False, command="sweep")
        if args.command == "fit":
            return _cmd_fit(args)
        if args.command == "calibrate":
            return _cmd_calibrate(args)
        raise ConfigError(f"unknown command {args.command}")
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except CalibrationError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except (ValueError, DegreeMatchError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
