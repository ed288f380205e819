"""Command line front end: ``ifs-harmonic <subcommand> --lambda ...``.

Each subcommand writes a CSV table and a JSON summary.  With
``--output PREFIX`` both go to ``PREFIX.csv`` / ``PREFIX.json``; otherwise
the one selected by ``--format`` is printed.

Exit codes: 0 when every claim check passes, 2 when one fails, 1 on a usage
or domain error.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import math
import os
import sys
import time
import warnings
from fractions import Fraction

import numpy as np

from . import cycles, fourier, ifs, measure, pathspace
from .errors import IFSError
from .transfer import bernoulli_weight

SCHEMA = 1
DEFAULT_SEED = 0xDEC0DE
THREADS_ENV = "IFS_HARMONIC_THREADS"

EXIT_OK, EXIT_USAGE, EXIT_VIOLATION = 0, 1, 2


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise IFSError(message)


def _fmt(v):
    if isinstance(v, (float, np.floating)):
        return format(float(v), ".17g")
    if isinstance(v, (list, tuple)):
        return " ".join(str(x) for x in v)
    return str(v)


def _jsonable(v):
    if isinstance(v, dict):
        return {str(k): _jsonable(x) for k, x in v.items()}
    if isinstance(v, (list, tuple)):
        return [_jsonable(x) for x in v]
    if isinstance(v, np.ndarray):
        return [_jsonable(x) for x in v.tolist()]
    if isinstance(v, (np.floating,)):
        return float(v)
    if isinstance(v, (np.integer,)):
        return int(v)
    if isinstance(v, (np.bool_,)):
        return bool(v)
    if isinstance(v, Fraction):
        return str(v)
    if isinstance(v, float) and not math.isfinite(v):
        return str(v)
    return v


def verdict(claim: str, passed: bool, value=None, tolerance=None) -> dict:
    return {"claim": claim, "pass": bool(passed), "value": value, "tolerance": tolerance}


# -- subcommands ---------------------------------------------------------------
# each returns (header, rows, summary, verdicts)

def cmd_attractor(a):
    system = ifs.make_system(a.system, a.lam)
    desc = ifs.attractor_describe(system)
    cells = desc.cover(a.depth)
    rows = [(float(lo), float(hi)) for lo, hi in cells]
    checks = []
    if desc.kind == "cantor":
        gaps = cells[1:, 0] - cells[:-1, 1]
        checks.append(verdict("depth cells pairwise disjoint", bool(np.all(gaps > 0)), float(gaps.min()) if len(gaps) else None))
    else:
        gaps = cells[1:, 0] - np.maximum.accumulate(cells[:-1, 1])
        checks.append(verdict("cells cover the hull without gaps", bool(np.all(gaps <= 1e-12)), float(gaps.max()) if len(gaps) else None, 1e-12))
    summary = {"kind": desc.kind, "interval": [str(e) for e in desc.endpoints], "interval_float": list(system.hull_float()),
               "hausdorff_dim": desc.hausdorff_dim, "cells": len(rows)}
    return ("lo", "hi"), rows, summary, checks


def cmd_cycles(a):
    rep = cycles.verify_no_long_wcycles(a.lam, a.max_period, tol=a.tol)
    in_d = cycles.exceptional_set_check(a.lam)
    cyc = cycles.dual_cycles(a.lam, a.max_period)
    weight = bernoulli_weight(a.lam)
    rows = []
    for c in cyc:
        cert = cycles.certify_w_cycle(c, weight, a.tol)
        rows.append((" ".join(map(str, c.word)), c.minimal_period, " ".join(str(x) for x in c.points),
                     cert.is_w_cycle, cert.mode))
    expected_one = 2 if in_d.in_d else 1
    checks = [verdict("no W-cycles of period > 1", rep.ok, len(rep.violations)),
              verdict("number of W-1-cycles", len(rep.w_one_cycles) == expected_one, len(rep.w_one_cycles), expected_one)]
    if rep.exact_float_agree is not None:
        checks.append(verdict("exact and float certificates agree", rep.exact_float_agree))
    summary = rep.as_dict()
    summary["in_D"] = in_d.in_d
    summary["n"] = in_d.n
    return ("word", "period", "points", "w_cycle", "mode"), rows, summary, checks


def cmd_fourier(a):
    fp = fourier.fourier_product(a.lam, a.tail_eps)
    t = np.linspace(a.tmin, a.tmax, a.samples)
    v, e = fourier.nu_hat(fp, t)
    rows = list(zip(t.tolist(), v.tolist(), e.tolist()))
    scal = max(fourier.scaling_identity_residual(fp, x) for x in t)
    checks = [verdict("|nu_hat| <= 1", bool(np.all(np.abs(v) <= 1 + 1e-15)), float(np.abs(v).max())),
              verdict("nu_hat(t) = cos(2 pi t) nu_hat(lam t)", scal <= 1e-10, scal, 1e-10)]
    if fp.lam.value == 0.5:
        dev = float(np.max(np.abs(v - np.sinc(4 * t))))
        checks.append(verdict("matches sin(4 pi t)/(4 pi t)", dev <= 1e-8, dev, 1e-8))
    summary = {"n_terms_at_tmax": fp.terms_for(max(abs(a.tmin), abs(a.tmax))), "tail_eps": a.tail_eps,
               "max_err_bound": float(e.max())}
    return ("t", "nu_hat", "err_bound"), rows, summary, checks


def cmd_identity(a):
    xs = fourier.identity_grid(a.lam, a.grid)
    rows, mono, top = [], True, -np.inf
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        for x in xs:
            s = fourier.functional_identity_partial(a.lam, x, a.depth)
            mono &= bool(np.all(np.diff(s.partial_sums) >= 0))
            top = max(top, float(s.partial_sums.max()))
            rows.append((float(x), s.value, s.tail))
    low = min(r[1] for r in rows)
    outside = cycles.exceptional_set_check(a.lam).in_d
    checks = [verdict("partial sums nondecreasing", mono),
              verdict("partial sums <= 1 + 1e-9", top <= 1 + 1e-9, top, 1e-9),
              verdict("identity sum >= 0.999", low >= 0.999, low, 0.999)]
    summary = {"depth": a.depth, "min_value": low, "outside_theorem_hypothesis": outside}
    return ("x", "partial_sum", "tail"), rows, summary, checks


def cmd_harmonic(a):
    xs = fourier.identity_grid(a.lam, a.grid)
    rows = []
    in_d = cycles.exceptional_set_check(a.lam).in_d
    for x in xs:
        e0, e1 = pathspace.harmonic_pair(pathspace.path_query(a.lam, x, a.depth))
        v1 = e1.value if e1 is not None else 0.0
        rows.append((float(x), e0.value, v1, e0.value + v1))
    low = min(r[3] for r in rows)
    checks = [verdict(("h0 + h1" if in_d else "h0") + " >= 0.999 on the grid", low >= 0.999, low, 0.999)]
    if in_d:
        top_h0 = rows[-1][1]
        checks.append(verdict("h0 < 0.5 at the upper fixed point", top_h0 < 0.5, top_h0, 0.5))
    summary = {"depth": a.depth, "in_D": in_d, "min_total": low}
    return ("x", "h0", "h1", "h0_plus_h1"), rows, summary, checks


def cmd_wiener(a):
    res = fourier.wiener_cesaro(a.lam, a.T, a.nmax)
    rows = list(zip(res.n.tolist(), res.L.tolist(), res.s.tolist()))
    checks = [verdict("s(lam^-n T) nonincreasing", res.nonincreasing())]
    summary = {"final": float(res.s[-1]), "panels": res.panels}
    if a.lam.value == 0.5 and a.nmax >= 10:
        slope = res.log2_slope(4, 10)
        summary["log2_slope_4_10"] = slope
        checks.append(verdict("log2 slope over n=4..10 is -1", abs(slope + 1) <= 0.15, slope, 0.15))
    return ("n", "L", "s"), rows, summary, checks


def cmd_measure(a):
    system = ifs.make_system(a.system, a.lam)
    probs = a.probs or [1.0 / system.n_maps] * system.n_maps
    rep = measure.chaos_game(system, probs, a.samples, a.burn_in, a.seed, a.bins)
    scan = measure.atom_scan(rep, min_samples=1)
    edges = rep.edges
    rows = [(float(edges[i]), float(edges[i + 1]), int(c)) for i, c in enumerate(rep.histogram)]
    checks = [verdict("self-similarity residual < 0.02", rep.self_similarity_residual < 0.02, rep.self_similarity_residual, 0.02),
              verdict("every symbolic cell is hit", rep.support_coverage == 1.0, rep.support_coverage),
              verdict("no atom suspected", not scan.atom_suspect, [float(m) for m in scan.max_mass])]
    summary = {"samples": a.samples, "bins": a.bins, "max_bin_mass": rep.max_bin_mass,
               "self_similarity_residual": rep.self_similarity_residual, "support_coverage": rep.support_coverage,
               "atom_scan": {"bins": scan.bins, "max_mass": scan.max_mass, "atom_suspect": scan.atom_suspect}}
    return ("bin_lo", "bin_hi", "count"), rows, summary, checks


def cmd_paths(a):
    q = pathspace.path_query(a.lam, a.x, 1, a.seed)
    paths = pathspace.sample_paths(q, a.length, a.n_paths)
    rows = []
    for k, p in enumerate(paths):
        for j, (letter, y, pr) in enumerate(zip(p.letters, p.points, p.step_probs)):
            rows.append((k, j + 1, letter, float(y), float(pr)))
    freq = np.mean([p.letters[0] == 0 for p in paths])
    p0 = pathspace.cylinder_prob(q, (0,))
    sigma = math.sqrt(max(p0 * (1 - p0), 1e-300) / a.n_paths)
    dev = abs(freq - p0)
    checks = [verdict("first-letter frequency within 3 sigma of W(tau_0 x)", dev <= 3 * sigma or dev == 0, float(dev), 3 * sigma)]
    summary = {"n_paths": a.n_paths, "length": a.length, "freq_letter0": float(freq), "p_letter0": p0,
               "notes": sorted({n for p in paths for n in p.notes})}
    return ("path", "step", "letter", "point", "prob"), rows, summary, checks


COMMANDS = {
    "attractor": cmd_attractor,
    "cycles": cmd_cycles,
    "fourier": cmd_fourier,
    "identity": cmd_identity,
    "harmonic": cmd_harmonic,
    "wiener": cmd_wiener,
    "measure": cmd_measure,
    "paths": cmd_paths,
}


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="ifs-harmonic", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def add(name, help_):
        p = sub.add_parser(name, help=help_)
        p.add_argument("--lambda", dest="lam_text", required=True, help='ratio, "a/b" (exact) or a decimal')
        p.add_argument("--format", choices=("csv", "json"), default="json")
        p.add_argument("--output", help="write PREFIX.csv and PREFIX.json")
        p.add_argument("--seed", type=lambda s: int(s, 0), default=DEFAULT_SEED)
        p.add_argument("--no-wall-time", action="store_true", help="omit wall_time_s for byte-stable JSON")
        return p

    p = add("attractor", "depth-n cover and attractor type")
    p.add_argument("--system", choices=sorted(ifs.SYSTEMS), default="B01")
    p.add_argument("--depth", type=int, default=5)

    p = add("cycles", "cycles up to a period and their W-certificates")
    p.add_argument("--max-period", type=int, default=8)
    p.add_argument("--tol", type=float, default=cycles.FLOAT_CYCLE_TOL)

    p = add("fourier", "truncated cosine product on a t grid")
    p.add_argument("--tmin", type=float, default=0.0)
    p.add_argument("--tmax", type=float, default=5.0)
    p.add_argument("--samples", type=int, default=1000)
    p.add_argument("--tail-eps", type=float, default=fourier.DEFAULT_TAIL_EPS)

    for name, help_ in (("identity", "partial sums of the identity series on X_L"),
                        ("harmonic", "h0 and h1 on X_L")):
        p = add(name, help_)
        p.add_argument("--depth", type=int, default=18)
        p.add_argument("--grid", type=int, default=51)

    p = add("wiener", "Cesaro averages of |nu_hat|^2")
    p.add_argument("--T", type=float, default=1.0)
    p.add_argument("--nmax", type=int, default=10)

    p = add("measure", "chaos game and invariance checks")
    p.add_argument("--system", choices=sorted(ifs.SYSTEMS), default="B")
    p.add_argument("--samples", type=int, default=1_000_000)
    p.add_argument("--bins", type=int, default=64)
    p.add_argument("--burn-in", type=int, default=1000)
    p.add_argument("--probs", type=float, nargs="+")

    p = add("paths", "sampled paths of P_x")
    p.add_argument("--x", type=float, required=True)
    p.add_argument("--length", type=int, default=10)
    p.add_argument("--n-paths", type=int, default=1000)
    return parser


def _csv_text(header, rows) -> str:
    buf = io.StringIO()
    wr = csv.writer(buf, lineterminator="\n")
    wr.writerow(header)
    for r in rows:
        wr.writerow([_fmt(v) for v in r])
    return buf.getvalue()


def _apply_threads():
    n = os.environ.get(THREADS_ENV)
    if n:
        import numba
        numba.set_num_threads(int(n))


def main(argv=None) -> int:
    t0 = time.perf_counter()
    try:
        parser = build_parser()
        a = parser.parse_args(argv)
        a.lam = ifs.ScalarParam.parse(a.lam_text)
        _apply_threads()
        header, rows, summary, checks = COMMANDS[a.command](a)
    except (IFSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    echo = {k: v for k, v in vars(a).items() if k not in ("lam", "no_wall_time")}
    doc = {"schema": SCHEMA, "command": a.command, "input": echo, "summary": summary, "verdicts": checks,
           "ok": all(c["pass"] for c in checks)}
    if not a.no_wall_time:
        doc["wall_time_s"] = time.perf_counter() - t0
    text_json = json.dumps(_jsonable(doc), indent=2, sort_keys=False) + "\n"
    text_csv = _csv_text(header, rows)
    if a.output:
        with open(a.output + ".csv", "w", newline="") as fh:
            fh.write(text_csv)
        with open(a.output + ".json", "w") as fh:
            fh.write(text_json)
    else:
        sys.stdout.write(text_csv if a.format == "csv" else text_json)
    return EXIT_OK if doc["ok"] else EXIT_VIOLATION


if __name__ == "__main__":
    sys.exit(main())
