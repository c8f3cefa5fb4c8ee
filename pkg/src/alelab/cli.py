"""Command line front end.

    alelab simulate --config run.json --out runs/a
    alelab verify --suite all
    alelab ensemble --config run.json --runs 100 --out runs/ens

Exit codes: 0 success, 1 a verification suite failed, 2 bad config or
usage, 3 numerical abort.
"""
from __future__ import annotations

import argparse
from concurrent.futures import ProcessPoolExecutor
import csv
import json
import logging
import math
import os
from pathlib import Path
import sys

import numpy as np

from .cluster import boundary_trace, ideal_cluster
from .driver import StatsReport, ensemble_normality, extract_driver, statistics
from .errors import ConfigError, NumericalAbort, StatisticsError
from .params import SimParams
from .simulation import RunRecord, RunResult, run_rng, simulate
from .svg import polyline_svg

log = logging.getLogger("alelab")

EXIT_OK, EXIT_FAIL, EXIT_USAGE, EXIT_ABORT = 0, 1, 2, 3


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def load_config(path) -> SimParams:
    try:
        with open(path) as fh:
            raw = json.load(fh)
    except FileNotFoundError:
        raise ConfigError(f"config file not found: {path}") from None
    except json.JSONDecodeError as e:
        raise ConfigError(f"config is not valid JSON: {e}") from None
    return SimParams.from_dict(raw)


def worker_count() -> int:
    env = os.environ.get("ALE_THREADS")
    if env:
        try:
            k = int(env)
        except ValueError:
            raise ConfigError(f"ALE_THREADS must be an integer, got {env!r}") from None
        if k < 1:
            raise ConfigError("ALE_THREADS must be at least 1")
        return k
    return os.cpu_count() or 1


# ---------------------------------------------------------------------------
# output files
# ---------------------------------------------------------------------------

def _record_line(rec: RunRecord) -> str:
    d = rec.to_json()
    d.pop("wall_time")
    return json.dumps(d)


def write_run(out: Path, result: RunResult, stats: StatsReport | None, svg: bool = True):
    """run.jsonl, timing.csv, driver.csv, stats.json and boundary.svg."""
    out.mkdir(parents=True, exist_ok=True)
    with open(out / "params.json", "w") as fh:
        json.dump(result.params.to_dict(), fh, indent=2)
    with open(out / "run.jsonl", "w") as fh:
        for rec in result.records:
            fh.write(_record_line(rec) + "\n")
    with open(out / "timing.csv", "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["n", "wall_time"])
        for rec in result.records:
            w.writerow([rec.n, f"{rec.wall_time:.6g}"])
    state = result.state
    if stats is not None:
        path = extract_driver(state, stats.T if state.n else 0.0)
        with open(out / "driver.csv", "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["t", "xi"])
            for t, x in zip(path.times, path.steps):
                w.writerow([repr(float(t)), repr(float(x))])
            if len(path):
                w.writerow([repr(float(path.T)), repr(path.endpoint)])
        with open(out / "stats.json", "w") as fh:
            json.dump(stats.to_json(), fh, indent=2)
    if svg:
        (out / "boundary.svg").write_text(polyline_svg([boundary_trace(state)], title="cluster boundary"))


def read_records(path) -> list:
    with open(path) as fh:
        return [RunRecord.from_json(json.loads(line)) for line in fh if line.strip()]


def run_statistics(result: RunResult) -> StatsReport:
    st = result.state
    T = result.params.total_time if st.n else 0.0
    T = min(T, st.total_capacity)
    path = extract_driver(st, T)
    return statistics(path, st, result.moments)


# ---------------------------------------------------------------------------
# commands
# ---------------------------------------------------------------------------

def cmd_simulate(args) -> int:
    P = load_config(args.config)
    P.warn_phase()
    out = Path(args.out)
    N = P.n_particles
    step = max(1, N // 10)

    def progress(k, total):
        if k % step == 0 or k == total:
            log.info("particle %d / %d", k, total)

    try:
        res = simulate(P, run_rng(P.seed), progress=progress)
    except NumericalAbort as e:
        part = getattr(e, "partial", None)
        if part is not None:
            write_run(out, part, None, svg=False)
        last = getattr(e, "last_good", None)
        print(f"numerical abort: {e} (last good record: particle {last})", file=sys.stderr)
        return EXIT_ABORT
    stats = run_statistics(res)
    write_run(out, res, stats)
    log.info("wrote %s", out)
    return EXIT_OK


def cmd_verify(args) -> int:
    from . import lemma_oracle as lo

    P = None
    if args.config:
        P = load_config(args.config)
    reports = lo.run_suite(args.suite, P, n=args.n)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    with open(out / "oracle_reports.json", "w") as fh:
        json.dump([r.to_json() for r in reports], fh, indent=2)
    for r in reports:
        print(r.line())
    return EXIT_OK if all(r.passed for r in reports) else EXIT_FAIL


def _synthetic_run(P: SimParams, i: int) -> RunResult:
    """Simple random walk on the two poles: the sampler is bypassed."""
    rng = run_rng(P.seed, i)
    N = P.n_particles
    signs = np.where(rng.random(max(N - 1, 0)) < 0.5, 1, -1)
    st = ideal_cluster(P, signs) if N else ideal_cluster(P, [])
    return RunResult(P, st, [])


def ensemble_member(payload):
    """One ensemble run; writes its own directory and returns its summary."""
    pdict, i, out, synthetic = payload
    P = SimParams.from_dict(pdict)
    sub = Path(out) / "runs" / f"run_{i:04d}"
    try:
        res = _synthetic_run(P, i) if synthetic else simulate(P, run_rng(P.seed, i))
    except NumericalAbort as e:
        return dict(run=i, error=str(e), last_good=getattr(e, "last_good", None))
    stats = run_statistics(res)
    if not synthetic:
        write_run(sub, res, stats, svg=False)
    signs = res.state.top_signs[1:stats.n_steps]
    return dict(run=i, stats=stats.to_json(), n_plus=int(np.sum(signs > 0)), n_signs=int(signs.size))


def pooled_summary(members: list, N: int) -> dict:
    ok = [m for m in members if "stats" in m]
    reps = [StatsReport.from_json(m["stats"]) for m in ok]
    n_plus = sum(m["n_plus"] for m in ok)
    n_signs = sum(m["n_signs"] for m in ok)
    frac = n_plus / n_signs if n_signs else float("nan")
    band = 4.0 / math.sqrt(4.0 * n_signs) if n_signs else float("nan")
    qv = [r.qv_ratio for r in reps if r.qv_ratio is not None]
    stopped = [r for r in reps if r.tau_D is not None and r.tau_D <= N]
    summary = dict(
        runs=len(members), completed=len(ok),
        tau_D_frequency=len(stopped) / len(reps) if reps else None,
        frac_plus=frac, frac_plus_band=[0.5 - band, 0.5 + band],
        frac_plus_within_band=bool(abs(frac - 0.5) <= band) if n_signs else None,
        qv_ratio=qv, qv_ratio_in_range=float(np.mean([0.9 <= q <= 1.1 for q in qv])) if qv else None,
        m1_small_fraction=float(np.mean([r.m1_small for r in reps])) if reps else None,
    )
    try:
        ks, p = ensemble_normality(reps)
        summary.update(ks_statistic=ks, ks_pvalue=p)
    except StatisticsError as e:
        summary.update(ks_statistic=None, ks_pvalue=None, ks_note=str(e))
    return summary


def cmd_ensemble(args) -> int:
    P = load_config(args.config)
    if args.runs < 1:
        raise ConfigError("--runs must be at least 1")
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    workers = args.workers or worker_count()
    payloads = [(P.to_dict(), i, str(out), args.synthetic_ssrw) for i in range(args.runs)]
    members = []
    if workers == 1:
        for k, pl in enumerate(payloads):
            members.append(ensemble_member(pl))
            log.info("run %d / %d done", k + 1, args.runs)
    else:
        with ProcessPoolExecutor(max_workers=workers) as ex:
            for k, m in enumerate(ex.map(ensemble_member, payloads)):
                members.append(m)
                log.info("run %d / %d done", k + 1, args.runs)
    summary = pooled_summary(members, P.n_particles)
    doc = dict(params=P.to_dict(), synthetic=args.synthetic_ssrw, pooled=summary, members=members)
    with open(out / "ensemble_stats.json", "w") as fh:
        json.dump(doc, fh, indent=2)
    failed = [m for m in members if "error" in m]
    if failed:
        print(f"{len(failed)} run(s) aborted, first: {failed[0]['error']}", file=sys.stderr)
        return EXIT_ABORT
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    from .lemma_oracle import SUITES

    p = _Parser(prog="alelab", description="Aggregate Loewner evolution simulator")
    p.add_argument("-q", "--quiet", action="store_true")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    s = sub.add_parser("simulate", help="grow one cluster")
    s.add_argument("--config", required=True)
    s.add_argument("--out", required=True)
    s.set_defaults(func=cmd_simulate)

    v = sub.add_parser("verify", help="run numerical checks of the estimates")
    v.add_argument("--suite", required=True, choices=SUITES)
    v.add_argument("--out", default=".")
    v.add_argument("--config", help="parameters (c, nu, sigma) for the checks")
    v.add_argument("--n", type=int, default=6, help="length of the ideal test paths")
    v.set_defaults(func=cmd_verify)

    e = sub.add_parser("ensemble", help="independent runs and pooled statistics")
    e.add_argument("--config", required=True)
    e.add_argument("--runs", type=int, required=True)
    e.add_argument("--out", required=True)
    e.add_argument("--workers", type=int, default=None)
    e.add_argument("--synthetic-ssrw", action="store_true",
                   help="replace the sampler by fair +-beta steps")
    e.set_defaults(func=cmd_ensemble)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.WARNING if args.quiet else logging.INFO,
                        format="%(message)s", stream=sys.stderr)
    try:
        return args.func(args)
    except ConfigError as e:
        print(f"config error: {e}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
