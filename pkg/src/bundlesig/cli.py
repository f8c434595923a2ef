"""``bundlesig`` command line: randomized sweeps and single evaluations.

Exit codes: 0 success, 2 a checked property was violated, 1 bad
configuration or input.  Every sample is generated from ``(seed, index)``
alone, so records are reproducible and parallel runs give identical reports.
"""
from __future__ import annotations

import argparse
import csv
import hashlib
import io
import json
import sys
import time
from concurrent.futures import ProcessPoolExecutor
from fractions import Fraction
from functools import partial
from pathlib import Path

from . import __version__
from .branched import (coboundary, degree_report, default_corpus_dir, fundamental_cycle_of_cover,
                       load_corpus, pullback, transfer, validate_unfolded)
from .circle import Q, Rotation, _fmt, classical_euler_cocycle, compose
from .errors import BundleSigError, RelatorViolation
from .meyer import SpMatrix, meyer_cocycle, signature_from_monodromy
from .sampling import (random_rational, random_sp, random_sp_representation,
                       random_wreath, random_wreath_representation, sample_rng, _random_moebius)
from .surface import (evaluate_euler_bar, evaluate_euler_relator_lift, milnor_wood_check,
                      representation_from_json)
from .wreath import WreathElement, cocycle, wreath_multiply
from .fuchsian import fuchsian_pair

BASEPOINTS = (Fraction(0), Fraction(1, 3), Fraction(1, 2))

CSV_COLUMNS = {
    "cocycle-check": ["index", "n", "raw_ab", "shifted_ab", "identity", "seed"],
    "milnor-wood": ["n", "h", "e", "bound", "slack", "method", "basepoint", "seed"],
    "meyer": ["g", "h", "sigma", "chiE", "v3", "v2", "mod4", "cert", "seed"],
    "transfer": ["name", "degree", "valid", "checks", "seed"],
    "euler-eval": ["n", "h", "e", "bound", "slack", "method", "basepoint", "seed"],
}


class ConfigError(Exception):
    pass


def _int_list(text: str) -> list:
    try:
        return [int(x) for x in text.split(",") if x.strip()]
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}") from exc


# ---------------------------------------------------------------- cocycle-check

def _corrupted_multiply(a: WreathElement, b: WreathElement) -> WreathElement:
    # fault injection: rotate the first factor of every product by a quarter turn
    ab = wreath_multiply(a, b)
    maps = (compose(ab.maps[0], Rotation(Q(1, 4))),) + ab.maps[1:]
    return WreathElement(ab.sigma, maps)


def cocycle_sample(cfg: dict, index: int) -> dict:
    rng = sample_rng(cfg["seed"], index)
    ns = cfg["n"]
    n = ns[index % len(ns)]
    only_id = cfg["identity_only"]
    a, b, c = (random_wreath(rng, n, only_id) for _ in range(3))
    multiply = _corrupted_multiply if cfg["inject_fault"] else wreath_multiply
    problems = []
    rec = {"index": index, "seed": cfg["seed"], "n": n}
    try:
        x0 = random_rational(rng, 8) if cfg["random_basepoint"] else Q(0)
        ab = cocycle(a, b, x0, multiply)
        defect = ab.defect
        if any(t not in (0, 1) for t in defect):
            problems.append(f"kernel defect {defect} has entries outside {{0, 1}}")
        if not 0 <= ab.raw <= n:
            problems.append(f"raw value {ab.raw} outside [0, {n}]")
        if not -n // 2 <= ab.shifted <= n // 2:
            problems.append(f"shifted value {ab.shifted} outside [-{n // 2}, {n // 2}]")
        lhs = ab.raw + cocycle(multiply(a, b), c, x0, multiply).raw
        rhs = cocycle(a, multiply(b, c), x0, multiply).raw + cocycle(b, c, x0, multiply).raw
        if lhs != rhs:
            problems.append(f"cocycle identity fails: {lhs} != {rhs}")
        f, g, h = a.maps[0], b.maps[0], c.maps[0]
        cl = (classical_euler_cocycle(f, g, x0) + classical_euler_cocycle(compose(f, g), h, x0)
              - classical_euler_cocycle(f, compose(g, h), x0) - classical_euler_cocycle(g, h, x0))
        if cl != 0:
            problems.append("classical Euler cocycle identity fails")
        rec.update(raw_ab=ab.raw, shifted_ab=ab.shifted, identity=lhs == rhs,
                   basepoint=_fmt(x0), defect=list(defect))
    except BundleSigError as exc:
        problems.append(f"{type(exc).__name__}: {exc}")
    if problems:
        rec["violation"] = {"problems": problems,
                            "a": a.to_json(), "b": b.to_json(), "c": c.to_json()}
    return rec


def cocycle_aggregate(records: list) -> dict:
    by_n: dict = {}
    for r in records:
        if "raw_ab" in r:
            by_n.setdefault(r["n"], set()).add(r["raw_ab"])
    return {"raw_values": {str(n): sorted(v) for n, v in sorted(by_n.items())}}


# ---------------------------------------------------------------- milnor-wood

def _random_conjugator(rng, n: int, numeric: bool) -> WreathElement:
    if numeric:
        perm = random_wreath(rng, n).sigma
        return WreathElement(perm, tuple(_random_moebius(rng) for _ in range(n)))
    return random_wreath(rng, n)


def milnor_wood_sample(cfg: dict, index: int) -> dict:
    rng = sample_rng(cfg["seed"], index)
    ns, hs = cfg["n"], cfg["genus"]
    n = ns[index % len(ns)]
    h = hs[(index // len(ns)) % len(hs)]
    numeric = rng.random() < cfg["numeric_fraction"]
    rep = random_wreath_representation(rng, h, n, numeric)
    rec = {"index": index, "seed": cfg["seed"], "n": n, "h": h, "label": rep.label,
           "method": "relator-lift", "basepoint": "0"}
    problems = []
    try:
        res = evaluate_euler_relator_lift(rep)
        verdict = milnor_wood_check(res)
        rec.update(e=res.value, bound=res.bound, slack=verdict.slack,
                   residual=rep.residual())
        if not verdict.passed:
            problems.append(f"|e| = {abs(res.value)} exceeds n(2h-2) = {res.bound}")
        bar = evaluate_euler_bar(rep).value
        # the shifted cocycle exists only for an even number of factors
        shifted = evaluate_euler_bar(rep, shifted=True).value if n % 2 == 0 else bar
        if not bar == shifted == res.value:
            problems.append(f"bar {bar} / shifted bar {shifted} / relator lift {res.value} disagree")
        for x0 in BASEPOINTS[1:]:
            other = evaluate_euler_relator_lift(rep, x0).value
            if other != res.value:
                problems.append(f"basepoint {x0} gives {other}")
        perturb = {k: [rng.randint(-3, 3) for _ in range(n)] for k in rep.images}
        if evaluate_euler_relator_lift(rep, 0, perturb).value != res.value:
            problems.append("lift perturbation changes e")
        conj = rep.conjugate(_random_conjugator(rng, n, numeric))
        if evaluate_euler_relator_lift(conj).value != res.value:
            problems.append("conjugation changes e")
        if h == 1 and res.value != 0:
            problems.append("torus base with nonzero e")
    except BundleSigError as exc:
        problems.append(f"{type(exc).__name__}: {exc}")
    if problems:
        rec["violation"] = {"problems": problems, "representation": rep.to_json()}
    return rec


def milnor_wood_extremal(cfg: dict) -> dict | None:
    if 2 not in cfg["n"] or 2 not in cfg["genus"]:
        return None
    res = evaluate_euler_relator_lift(fuchsian_pair(2))
    v = milnor_wood_check(res)
    return {"configuration": "fuchsian x fuchsian, genus 2, n = 2", "e": res.value,
            "bound": res.bound, "slack": v.slack, "saturated": v.slack == 0}


def milnor_wood_aggregate(records: list) -> dict:
    es = [r["e"] for r in records if "e" in r]
    slack_hist: dict = {}
    for r in records:
        if "slack" in r:
            slack_hist[str(r["slack"])] = slack_hist.get(str(r["slack"]), 0) + 1
    return {"min_e": min(es, default=None), "max_e": max(es, default=None),
            "slack_histogram": dict(sorted(slack_hist.items(), key=lambda kv: int(kv[0])))}


# ---------------------------------------------------------------- meyer

def meyer_sample(cfg: dict, index: int) -> dict:
    rng = sample_rng(cfg["seed"], index)
    gs, hs = cfg["g"], cfg["genus"]
    g = gs[index % len(gs)]
    h = hs[(index // len(gs)) % len(hs)]
    rep = random_sp_representation(rng, g, h, cfg["kind"])
    rec = {"index": index, "seed": cfg["seed"], "label": rep.label}
    problems = []
    try:
        report = signature_from_monodromy(rep)
        rec.update(report.to_json())
        if report.certified:
            if not (report.verdict_3 and report.verdict_2):
                problems.append(f"certified bundle violates the bound: sigma={report.sigma}, "
                                f"chi={report.chi}")
            if h == 1 and report.sigma != 0:
                problems.append("certified bundle over a torus with nonzero signature")
        if cfg["triples"]:
            a, b, c = (random_sp(rng, g) for _ in range(3))
            for m in (a, b, c):
                if not m.is_symplectic():
                    problems.append("constructed matrix is not symplectic")
            lhs = meyer_cocycle(a, b) + meyer_cocycle(a * b, c)
            rhs = meyer_cocycle(a, b * c) + meyer_cocycle(b, c)
            if lhs != rhs:
                problems.append(f"Meyer cocycle identity fails: {lhs} != {rhs}")
            one = SpMatrix.identity(g)
            if meyer_cocycle(one, a) or meyer_cocycle(a, one):
                problems.append("Meyer cocycle is not normalized")
            if abs(meyer_cocycle(a, b)) > 2 * g:
                problems.append("Meyer cocycle exceeds 2g")
            rec["identity"] = lhs == rhs
    except BundleSigError as exc:
        problems.append(f"{type(exc).__name__}: {exc}")
    if problems:
        rec["violation"] = {"problems": problems, "representation": rep.to_json()}
    return rec


def meyer_aggregate(records: list) -> dict:
    sig = [r["sigma"] for r in records if "sigma" in r]
    cert = [r for r in records if r.get("cert") == "certified-bundle"]
    return {"min_sigma": min(sig, default=None), "max_sigma": max(sig, default=None),
            "certified": len(cert), "sp_only": len(sig) - len(cert),
            "mod4_failures_soft": sum(1 for r in cert if not r["mod4"]),
            "sp_only_bound_failures": sum(1 for r in records
                                          if r.get("cert") == "sp-only" and not r["v3"])}


# ---------------------------------------------------------------- transfer

def transfer_entry(cfg: dict, index: int, entry) -> dict:
    rng = sample_rng(cfg["seed"], index)
    rec = {"index": index, "seed": cfg["seed"], "name": entry.name}
    problems = []
    try:
        report = validate_unfolded(entry.map, entry.branch)
        rec.update(valid=report.valid, degree=report.degree, diagnostics=report.diagnostics,
                   proxy=report.proxy)
        if not report.valid:
            problems.append("covering did not validate")
        elif entry.expected_degree is not None and report.degree != entry.expected_degree:
            problems.append(f"degree {report.degree}, file says {entry.expected_degree}")
        checks = 0
        if report.valid:
            cov = report.covering
            if not degree_report(cov).summation_holds():
                problems.append("local degrees do not sum to the degree")
            for k in range(cov.target.dim + 1):
                for _ in range(cfg["cochains"]):
                    c = {t: Q(rng.randint(-20, 20), rng.randint(1, 9))
                         for t in cov.target.simplices_of_dim(k)}
                    back = transfer(cov, pullback(cov, c, k), k)
                    want = {t: cov.degree * v for t, v in c.items() if v != 0}
                    if back != want:
                        problems.append(f"transfer of pullback is not deg * id in degree {k}")
                    cs = {s: Q(rng.randint(-20, 20)) for s in cov.source.simplices_of_dim(k)}
                    if transfer(cov, coboundary(cov.source, cs, k), k + 1) != \
                            coboundary(cov.target, transfer(cov, cs, k), k):
                        problems.append(f"transfer does not commute with coboundary in degree {k}")
                    checks += 1
            fundamental_cycle_of_cover(cov)
        rec["checks"] = checks
    except BundleSigError as exc:
        problems.append(f"{type(exc).__name__}: {exc}")
    if problems:
        rec["violation"] = {"problems": sorted(set(problems)), "path": entry.path}
    return rec


# ---------------------------------------------------------------- plumbing

SAMPLERS = {"cocycle-check": cocycle_sample, "milnor-wood": milnor_wood_sample,
            "meyer": meyer_sample}
AGGREGATORS = {"cocycle-check": cocycle_aggregate, "milnor-wood": milnor_wood_aggregate,
               "meyer": meyer_aggregate}


def run_samples(command: str, cfg: dict, samples: int, jobs: int = 1) -> list:
    worker = partial(SAMPLERS[command], cfg)
    if jobs <= 1:
        return [worker(i) for i in range(samples)]
    with ProcessPoolExecutor(max_workers=jobs) as pool:
        return list(pool.map(worker, range(samples), chunksize=max(1, samples // (4 * jobs))))


def report_hash(report: dict) -> str:
    body = {k: v for k, v in report.items() if k not in ("timings", "hash")}
    return hashlib.sha256(json.dumps(body, sort_keys=True).encode()).hexdigest()


def build_report(command: str, cfg: dict, records: list, aggregate: dict, elapsed: float) -> dict:
    violations = [{"index": r["index"], **r["violation"]} for r in records if "violation" in r]
    clean = [{k: v for k, v in r.items() if k != "violation"} for r in records]
    report = {"command": command, "version": __version__, "config": cfg, "records": clean,
              "aggregate": aggregate, "violations": violations,
              "timings": {"wall_seconds": round(elapsed, 3)}}
    report["hash"] = report_hash(report)
    return report


def render(report: dict, fmt: str) -> str:
    if fmt == "json":
        return json.dumps(report, indent=2, sort_keys=True) + "\n"
    cols = CSV_COLUMNS[report["command"]]
    buf = io.StringIO()
    w = csv.DictWriter(buf, fieldnames=cols, extrasaction="ignore", lineterminator="\n")
    w.writeheader()
    for r in report["records"]:
        w.writerow(r)
    return buf.getvalue()


def emit(report: dict, args) -> int:
    text = render(report, args.format)
    if args.out:
        Path(args.out).write_text(text)
    else:
        sys.stdout.write(text)
    nviol = len(report["violations"])
    print(f"{report['command']}: {len(report['records'])} records, {nviol} violations, "
          f"hash {report['hash'][:16]}", file=sys.stderr)
    return 2 if nviol else 0


def _base_config(args) -> dict:
    if args.samples < 0:
        raise ConfigError("--samples must be non-negative")
    if args.jobs < 1:
        raise ConfigError("--jobs must be at least 1")
    return {"seed": args.seed, "samples": args.samples}


def cmd_cocycle_check(args) -> int:
    cfg = _base_config(args)
    if not args.n or any(n < 1 or n % 2 for n in args.n):
        raise ConfigError("every n must be a positive even integer")
    cfg.update(n=args.n, identity_only=args.identity_only, inject_fault=args.inject_fault,
               random_basepoint=args.random_basepoint)
    t = time.perf_counter()
    records = run_samples("cocycle-check", cfg, args.samples, args.jobs)
    report = build_report("cocycle-check", cfg, records, cocycle_aggregate(records),
                          time.perf_counter() - t)
    return emit(report, args)


def cmd_milnor_wood(args) -> int:
    cfg = _base_config(args)
    if not args.n or any(n < 1 for n in args.n):
        raise ConfigError("n must be positive")
    if not args.genus or any(h < 1 for h in args.genus):
        raise ConfigError("genus h >= 1 required")
    if not 0 <= args.numeric_fraction <= 1:
        raise ConfigError("--numeric-fraction must lie in [0, 1]")
    cfg.update(n=args.n, genus=args.genus, numeric_fraction=args.numeric_fraction)
    t = time.perf_counter()
    records = run_samples("milnor-wood", cfg, args.samples, args.jobs)
    # a bound failure aborts the sweep: keep records up to and including the first one
    for k, r in enumerate(records):
        if "violation" in r and r.get("slack", 0) < 0:
            records = records[:k + 1]
            break
    agg = milnor_wood_aggregate(records)
    agg["extremal"] = milnor_wood_extremal(cfg)
    report = build_report("milnor-wood", cfg, records, agg, time.perf_counter() - t)
    return emit(report, args)


def cmd_meyer(args) -> int:
    cfg = _base_config(args)
    if not args.g or any(g < 1 for g in args.g):
        raise ConfigError("fiber genus g >= 1 required")
    if not args.genus or any(h < 1 for h in args.genus):
        raise ConfigError("genus h >= 1 required")
    cfg.update(g=args.g, genus=args.genus, kind=args.kind, triples=not args.no_triples)
    t = time.perf_counter()
    records = run_samples("meyer", cfg, args.samples, args.jobs)
    report = build_report("meyer", cfg, records, meyer_aggregate(records), time.perf_counter() - t)
    return emit(report, args)


def cmd_transfer(args) -> int:
    cfg = _base_config(args)
    path = Path(args.corpus) if args.corpus else default_corpus_dir()
    try:
        entries = load_corpus(path)
    except (OSError, ValueError) as exc:
        raise ConfigError(f"cannot read corpus {path}: {exc}") from exc
    if not entries:
        raise ConfigError(f"corpus {path} contains no .cover files")
    cfg.update(corpus=path.name, cochains=args.cochains)
    t = time.perf_counter()
    records = [transfer_entry(cfg, i, e) for i, e in enumerate(entries)]
    agg = {"entries": len(records), "valid": sum(1 for r in records if r.get("valid"))}
    report = build_report("transfer", cfg, records, agg, time.perf_counter() - t)
    return emit(report, args)


def cmd_euler_eval(args) -> int:
    cfg = _base_config(args)
    try:
        data = json.loads(Path(args.representation).read_text())
        rep = representation_from_json(data)
        rep.check()
    except (OSError, ValueError, KeyError, TypeError) as exc:
        raise ConfigError(f"cannot load representation: {exc}") from exc
    cfg["representation"] = Path(args.representation).name
    t = time.perf_counter()
    rec = {"index": 0, "seed": args.seed, "h": rep.genus}
    if rep.target == "sp":
        report = signature_from_monodromy(rep)
        rec.update(report.to_json())
        if report.certified and not (report.verdict_3 and report.verdict_2):
            rec["violation"] = {"problems": ["certified bundle violates the bound"]}
    else:
        res = evaluate_euler_relator_lift(rep, Fraction(args.basepoint))
        bar = evaluate_euler_bar(rep, x0=Fraction(args.basepoint)).value
        verdict = milnor_wood_check(res)
        rec.update(verdict.to_json(), bar=bar, residual=rep.residual())
        rec["verdict"] = "PASS" if verdict.passed else "FAIL"
        problems = []
        if not verdict.passed:
            problems.append("Milnor-Wood bound violated")
        if bar != res.value:
            problems.append(f"bar pairing {bar} disagrees with relator lift {res.value}")
        if problems:
            rec["violation"] = {"problems": problems}
    report = build_report("euler-eval", cfg, [rec], {}, time.perf_counter() - t)
    return emit(report, args)


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=0, help="master seed (default 0)")
    common.add_argument("--samples", type=int, default=1000, help="number of samples")
    common.add_argument("--jobs", type=int, default=1, help="worker processes")
    common.add_argument("--out", help="write the report here instead of stdout")
    common.add_argument("--format", choices=("json", "csv"), default="json")

    p = argparse.ArgumentParser(prog="bundlesig", description=__doc__.split("\n")[0])
    p.add_argument("--version", action="version", version=__version__)
    sub = p.add_subparsers(dest="command", required=True)

    c = sub.add_parser("cocycle-check", parents=[common],
                       help="value range and 2-cocycle identity of the wreath cocycle")
    c.add_argument("--n", type=_int_list, default=[2, 4, 6], help="even factor counts, e.g. 2,4,6")
    c.add_argument("--identity-only", action="store_true", help="sample only identity elements")
    c.add_argument("--random-basepoint", action="store_true")
    c.add_argument("--inject-fault", action="store_true", help=argparse.SUPPRESS)
    c.set_defaults(func=cmd_cocycle_check)

    m = sub.add_parser("milnor-wood", parents=[common],
                       help="Euler numbers of random representations against the bound")
    m.add_argument("--n", type=_int_list, default=[2, 4])
    m.add_argument("--genus", type=_int_list, default=[1, 2, 3], help="base genera h")
    m.add_argument("--numeric-fraction", type=float, default=0.25,
                   help="share of floating-point (Moebius) samples")
    m.set_defaults(func=cmd_milnor_wood)

    s = sub.add_parser("meyer", parents=[common],
                       help="signatures from symplectic monodromy via the Meyer cocycle")
    s.add_argument("--g", type=_int_list, default=[1, 2, 3], help="fiber genera")
    s.add_argument("--genus", type=_int_list, default=[1, 2], help="base genera h")
    s.add_argument("--kind", choices=("trivial", "disjoint", "free", "pairs", "sp-only"),
                   help="restrict to one monodromy family")
    s.add_argument("--no-triples", action="store_true", help="skip the cocycle-identity sub-suite")
    s.set_defaults(func=cmd_meyer)

    t = sub.add_parser("transfer", parents=[common], help="validate the covering corpus and "
                       "check the transfer identity")
    t.add_argument("--corpus", help="directory of .cover files (default: $BUNDLESIG_CORPUS or "
                   "the bundled corpus)")
    t.add_argument("--cochains", type=int, default=30, help="random cochains per degree")
    t.set_defaults(func=cmd_transfer)

    e = sub.add_parser("euler-eval", parents=[common], help="evaluate one representation file")
    e.add_argument("representation", help="representation JSON file")
    e.add_argument("--basepoint", default="0", help="rational basepoint, e.g. 1/3")
    e.set_defaults(func=cmd_euler_eval)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"bundlesig: configuration error: {exc}", file=sys.stderr)
        return 1
    except RelatorViolation as exc:
        print(f"bundlesig: invalid representation: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
