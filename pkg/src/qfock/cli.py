"""Command-line entry point: ``qfock {verify,spectrum,bound,sweep,bench}``.

Every command prints one JSON report on stdout. With ``--out csv`` the
tabular part is also written to ``<dir>/<command>.csv``.
Exit status: 0 all checks pass, 1 some check fails, 2 usage error.
"""

from __future__ import annotations

import argparse
import csv
import json
import sys
import time
from contextlib import contextmanager
from pathlib import Path

import numpy as np

from . import gram, operators, spectral, symgroup
from .basis import Config, block_dimension, enumerate_words, multiset_classes

SCHEMA_VERSION = "1.0"
EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2
# largest dense level matrix allowed without --force (entries)
MAX_DENSE_ENTRIES = 2**24

SWEEP_COLUMNS = ("q", "min_alpha", "last_alpha", "threshold", "margin", "lower_bound", "trend", "verdict")
BENCH_COLUMNS = ("mode", "n", "alpha", "peak_dim", "entries")
BOUND_COLUMNS = ("terms", "root", "margin_below", "margin_above")


class Report:
    def __init__(self, command: str, config: dict):
        self.command = command
        self.config = config
        self.checks: list[dict] = []
        self.timing: dict[str, float] = {}
        self.columns: tuple[str, ...] = ()
        self.rows: list[dict] = []

    def check(self, name: str, value: float, threshold, passed: bool | None = None):
        if passed is None:
            passed = value <= threshold
        self.checks.append({"name": name, "value": float(value),
                            "threshold": None if threshold is None else float(threshold),
                            "pass": bool(passed)})

    @contextmanager
    def phase(self, name: str):
        start = time.perf_counter()
        yield
        self.timing[name] = self.timing.get(name, 0.0) + time.perf_counter() - start

    @property
    def ok(self) -> bool:
        return all(c["pass"] for c in self.checks)

    def as_dict(self) -> dict:
        out = {
            "schema_version": SCHEMA_VERSION,
            "command": self.command,
            "config": self.config,
            "checks": self.checks,
            "timing": self.timing,
        }
        if self.columns:
            out["table"] = {"columns": list(self.columns), "rows": self.rows}
        return out


def _scaled(tol: float, *mats) -> float:
    return tol * max([1.0] + [float(np.abs(m).max()) for m in mats])


def run_verify(cfg: Config) -> Report:
    d, q, n_max, tol = cfg.d, cfg.q, cfg.n_max, cfg.tol
    rep = Report("verify", _config_dict(cfg))
    with rep.phase("gram"):
        grams = gram.gram_tower(d, n_max, q)
        n_inv = min(n_max, 5)
        worst = max(float(np.abs(grams[n] - gram.gram_by_inversions(d, n, q)).max()) for n in range(n_inv + 1))
        rep.check("gram_recursion_vs_inversions", worst, _scaled(tol, *grams[: n_inv + 1]))
        n_ent = min(n_max, 4)
        worst = 0.0
        for n in range(n_ent + 1):
            words = enumerate_words(d, n)
            brute = np.array([[gram.q_inner(u, w, q) for w in words] for u in words])
            worst = max(worst, float(np.abs(brute - grams[n]).max()))
        rep.check("gram_vs_q_inner", worst, _scaled(tol, *grams[: n_ent + 1]))
        ratio = min(float(np.linalg.eigvalsh(g)[0] / np.linalg.eigvalsh(g)[-1]) for g in grams)
        rep.check("gram_positive_definite_min_ratio", ratio, tol, ratio > tol)
    with rep.phase("symgroup"):
        if n_max >= 2:
            worst = max(symgroup.factorization_residual(d, n, q) for n in range(2, min(n_max, 6) + 1))
            rep.check("factorization_residual", worst, _scaled(tol, np.array([1 / (1 - abs(q))])))
    with rep.phase("operators"):
        tower = operators.build_tower(d, n_max, q)
        rep.check("unitarity", operators.unitarity_defect(d, n_max, q), _scaled(tol, *tower.grams))
        rf = operators.r_family(d, n_max, q)
        it = operators.r_family_by_iteration(d, n_max, q)
        worst = max(float(np.abs(rf[n] - it[n]).max()) for n in range(n_max + 1))
        rep.check("r_routes", worst, _scaled(tol, *rf.matrices))
        squares = [r @ r for r in rf.matrices]
        if n_max >= 2:
            rep.check("fixed_point_residual", max(operators.fixed_point_residuals(rf)), _scaled(tol, *squares))
            rep.check("qcr_defect", operators.qcr_defect(d, n_max, q), _scaled(tol, *squares))
            rep.check("commutant_defect", operators.commutant_defect(d, n_max, q), _scaled(tol, *rf.matrices))
        rep.check("intertwining_defect", operators.intertwining_defect(d, n_max, q), _scaled(tol, *tower.m_sqrts))
        lower, upper = spectral.lemma41_bounds(q)
        sig = min(float(np.linalg.svd(rf[n], compute_uv=False)[-1]) for n in range(1, n_max + 1))
        rep.check("r_zero_on_vacuum", float(abs(rf[0][0, 0])), tol)
        rep.check("r_min_singular_value", sig, np.sqrt(lower) * (1 - tol), sig >= np.sqrt(lower) * (1 - tol))
        violation = max(max(lower - a, a - upper, 0.0) for a in tower.alphas[1:])
        rep.check("alpha_within_bounds", violation, _scaled(tol, np.array([upper])))
    return rep


def run_spectrum(cfg: Config, blocks: bool) -> Report:
    rep = Report("spectrum", _config_dict(cfg))
    with rep.phase("spectrum"):
        rows = spectral.spectrum_table(cfg.d, cfg.n_max, cfg.q, blocks)
    rep.columns, rep.rows = spectral.SPECTRUM_COLUMNS, rows
    rep.check("alpha_1_is_one", abs(rows[0]["alpha"] - 1.0), cfg.tol)
    violation = max(max(r["lower_bound"] - r["alpha"], r["alpha"] - r["upper_bound"], 0.0) for r in rows)
    rep.check("alpha_within_bounds", violation, _scaled(cfg.tol, np.array([rows[0]["upper_bound"]])))
    return rep


def run_bound(terms: int, tol: float) -> Report:
    rep = Report("bound", {"d": None, "q": None, "n_max": None, "tol": tol, "terms": terms})
    with rep.phase("bisection"):
        root = spectral.condition_root(terms, tol)
    below = spectral.condition_17_margin(max(root - 10 * tol, 0.0), terms)
    above = spectral.condition_17_margin(root + 10 * tol, terms)
    rep.columns = BOUND_COLUMNS
    rep.rows = [{"terms": terms, "root": root, "margin_below": below, "margin_above": above}]
    rep.check("condition_root", root, None, 0.0 < root < 1.0)
    rep.check("sign_change_at_root", below * above, 0.0, below > 0 > above)
    return rep


def run_sweep(d: int, q_min: float, q_max: float, steps: int, n_max: int, tol: float, blocks: bool) -> Report:
    rep = Report("sweep", {"d": d, "q": [q_min, q_max], "n_max": n_max, "tol": tol, "steps": steps})
    grid = [q_min] if steps == 1 else list(np.linspace(q_min, q_max, steps))
    rep.columns = SWEEP_COLUMNS
    violation, chain_ok = 0.0, True
    with rep.phase("sweep"):
        for q in grid:
            r = spectral.prop52_report(d, n_max, float(q), blocks)
            rep.rows.append(r.summary())
            violation = max(violation, max(max(r.lower_bound - a, a - r.upper_bound, 0.0) for a in r.alphas))
            if spectral.condition_17_margin(float(q), 20) > 0 and r.verdict != spectral.Verdict.HOLDS:
                chain_ok = False
    rep.check("alpha_within_bounds", violation, _scaled(tol, np.array([1 / (1 - max(abs(q_min), abs(q_max)))])))
    rep.check("sufficient_condition_implies_holds", float(not chain_ok), 0.0, chain_ok)
    return rep


def run_bench(d: int, n_max: int, q: float, modes: list[str], repeat: int, tol: float) -> Report:
    rep = Report("bench", {"d": d, "q": q, "n_max": n_max, "tol": tol, "repeat": repeat, "modes": modes})
    rep.columns = BENCH_COLUMNS
    results = {}
    for mode in modes:
        for _ in range(repeat):
            gram.clear_block_caches()
            with rep.phase(mode):
                if mode == "blocks":
                    values = spectral.alphas(d, n_max, q, blocks=True)
                else:
                    values = spectral.dense_alphas(d, n_max, q)
        rep.timing[mode] /= repeat
        results[mode] = values
        for n, a in enumerate(values, start=1):
            if mode == "blocks":
                dims = [block_dimension(c) for c in multiset_classes(d, n)]
                peak, entries = max(dims), sum(x * x for x in dims)
            else:
                peak, entries = d**n, d ** (2 * n)
            rep.rows.append({"mode": mode, "n": n, "alpha": a, "peak_dim": peak, "entries": entries})
    if len(results) == 2:
        gap = max(abs(a - b) for a, b in zip(results["dense"], results["blocks"]))
        rep.check("alpha_blocks_vs_dense", gap, tol)
    dims = [block_dimension(c) for c in multiset_classes(d, n_max)]
    ratio = sum(x * x for x in dims) / d ** (2 * n_max)
    rep.check("block_entries_over_dense", ratio, 1.0, ratio < 1.0)
    return rep


def _config_dict(cfg: Config) -> dict:
    return {"d": cfg.d, "q": cfg.q, "n_max": cfg.n_max, "tol": cfg.tol}


def write_csv(rep: Report, directory: Path) -> Path:
    directory.mkdir(parents=True, exist_ok=True)
    path = directory / f"{rep.command}.csv"
    with open(path, "w", newline="") as fh:
        writer = csv.DictWriter(fh, fieldnames=list(rep.columns))
        writer.writeheader()
        for row in rep.rows:
            writer.writerow({k: "" if row[k] is None else row[k] for k in rep.columns})
    return path


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="qfock", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, with_q=True):
        p.add_argument("--d", type=int, default=2)
        if with_q:
            p.add_argument("--q", type=float, required=True)
        p.add_argument("--nmax", type=int, default=6)
        p.add_argument("--tol", type=float, default=1e-10)
        p.add_argument("--out", choices=("json", "csv"), default="json")
        p.add_argument("--dir", type=Path, default=Path("."))
        p.add_argument("--force", action="store_true", help="allow large dense levels")

    common(sub.add_parser("verify", help="run the identity suite"))
    p = sub.add_parser("spectrum", help="per-level smallest eigenvalues and bounds")
    common(p)
    p.add_argument("--blocks", choices=("on", "off"), default="off")

    p = sub.add_parser("bound", help="root of the truncated sufficient condition")
    p.add_argument("--terms", type=int, default=4)
    p.add_argument("--tol", type=float, default=1e-12)
    p.add_argument("--out", choices=("json", "csv"), default="json")
    p.add_argument("--dir", type=Path, default=Path("."))

    p = sub.add_parser("sweep", help="convergence report over a q grid")
    common(p, with_q=False)
    p.add_argument("--q-min", type=float, required=True)
    p.add_argument("--q-max", type=float, required=True)
    p.add_argument("--steps", type=int, default=9)
    p.add_argument("--blocks", choices=("on", "off"), default="on")

    p = sub.add_parser("bench", help="multiset blocks versus dense levels")
    common(p, with_q=False)
    p.add_argument("--q", type=float, default=0.44)
    p.add_argument("--blocks", choices=("on", "off", "both"), default="both")
    p.add_argument("--repeat", type=int, default=1)
    return parser


def _guard(parser, d: int, n_max: int, force: bool, dense: bool = True):
    if force:
        return
    if dense:
        entries = d ** (2 * n_max)
    else:
        entries = max(block_dimension(c) for c in multiset_classes(d, n_max)) ** 2
    if entries > MAX_DENSE_ENTRIES:
        parser.error(f"level {n_max} at d={d} needs {entries} matrix entries; pass --force to run anyway")


def _validate(parser, args):
    """Check flags before any computation; every failure is a usage error."""
    try:
        if args.command in ("verify", "spectrum"):
            cfg = Config(args.d, args.q, args.nmax, args.tol)
            _guard(parser, cfg.d, cfg.n_max, args.force)
            return cfg
        if args.command == "bound":
            if args.terms < 2 or not args.tol > 0:
                parser.error("--terms must be >= 2 and --tol positive")
            return None
        if args.command == "sweep":
            for q in (args.q_min, args.q_max):
                Config(args.d, q, args.nmax, args.tol)
            if args.steps < 1 or args.nmax < 2 or args.q_min > args.q_max:
                parser.error("need --steps >= 1, --nmax >= 2 and --q-min <= --q-max")
            _guard(parser, args.d, args.nmax, args.force)
            return None
        Config(args.d, args.q, args.nmax, args.tol)
        if args.repeat < 1:
            parser.error("--repeat must be >= 1")
        _guard(parser, args.d, args.nmax, args.force, dense=args.blocks != "on")
        return None
    except ValueError as exc:
        parser.error(str(exc))


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    cfg = _validate(parser, args)
    if args.command == "verify":
        rep = run_verify(cfg)
    elif args.command == "spectrum":
        rep = run_spectrum(cfg, args.blocks == "on")
    elif args.command == "bound":
        rep = run_bound(args.terms, args.tol)
    elif args.command == "sweep":
        rep = run_sweep(args.d, args.q_min, args.q_max, args.steps, args.nmax, args.tol, args.blocks == "on")
    else:
        modes = {"on": ["blocks"], "off": ["dense"], "both": ["dense", "blocks"]}[args.blocks]
        rep = run_bench(args.d, args.nmax, args.q, modes, args.repeat, args.tol)
    payload = rep.as_dict()
    if args.out == "csv" and rep.columns:
        payload["csv"] = str(write_csv(rep, args.dir))
    json.dump(payload, sys.stdout, indent=2, default=_jsonable)
    sys.stdout.write("\n")
    return EXIT_OK if rep.ok else EXIT_FAIL


def _jsonable(x):
    if isinstance(x, np.generic):
        return x.item()
    raise TypeError(f"cannot serialize {type(x)}")


if __name__ == "__main__":
    sys.exit(main())
