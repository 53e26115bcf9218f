"""Command-line front end.

Every solver command prints one RunReport (JSON by default).  Exit codes:
0 on success, 1 when a decision answers in the negative (the report is still
printed), 2 on bad input.
"""

from __future__ import annotations

import argparse
import csv
import json
import math
import random
import sys
import time
from dataclasses import asdict, dataclass, field
from fractions import Fraction
from typing import Sequence

from . import oracle_ref
from .augment import hybrid_exact_union
from .graphic import vertex_partition
from .instances import FAMILIES, random_instance
from .io import InputError, integral, load_instance
from .matroid import Graph, GraphicMatroid, UniformMatroid
from .pack_cover import (
    decide_covering,
    decide_packing,
    exact_covering,
    exact_covering_number,
    exact_packing,
    exact_strength,
)
from .push_relabel import PushRelabel, _rank_of, apx_union, exact_union
from .reinforce import reinforce, reinforce_greedy
from .rounding import (
    RoundingConfig,
    apx_union_value_real,
    decide_covering_real,
    decide_membership,
    decide_strength,
    majority,
    search_covering_number,
    search_strength,
)

NEGATIVE = {"Infeasible", "AtMost", "Outside"}


@dataclass
class RunReport:
    problem: str
    params: dict
    value: float | int | None
    answer: str | None = None
    primal: list[list[int]] | None = None
    dual: dict | None = None
    stats: dict = field(default_factory=dict)
    extra: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        d = asdict(self)
        if d["primal"] is None:
            del d["primal"]
        return d

    @classmethod
    def from_dict(cls, d: dict) -> "RunReport":
        return cls(**{"primal": None, **d})

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True)

    @classmethod
    def from_json(cls, text: str) -> "RunReport":
        return cls.from_dict(json.loads(text))

    def to_text(self) -> str:
        lines = [f"problem: {self.problem}"]
        if self.answer is not None:
            lines.append(f"answer: {self.answer}")
        lines.append(f"value: {self.value}")
        for key, val in self.params.items():
            lines.append(f"param.{key}: {val}")
        if self.primal is not None:
            for i, b in enumerate(self.primal):
                lines.append(f"base {i}: {' '.join(map(str, b))}")
        if self.dual is not None:
            for key, val in self.dual.items():
                lines.append(f"dual.{key}: {val}")
        for key, val in {**self.stats, **self.extra}.items():
            lines.append(f"{key}: {val}")
        return "\n".join(lines)


# helpers

def _num(v):
    if isinstance(v, Fraction):
        return v.numerator if v.denominator == 1 else float(v)
    if isinstance(v, float) and v.is_integer():
        return int(v)
    return v


def _stats(st: PushRelabel | None = None, *, queries: int | None = None, augmentations: int = 0) -> dict:
    s = {"oracle_queries": 0, "exchanges": 0, "relabels_to_h": 0, "augmentations": augmentations}
    if st is not None:
        s["oracle_queries"] = st.oracle.total
        s["exchanges"] = st.stats.exchanges
        s["relabels_to_h"] = st.stats.relabels_to_h
    if queries is not None:
        s["oracle_queries"] = queries
    return s


def _dual(matroid, S, threshold, value, **more) -> dict:
    d = {"set": sorted(S), "threshold": threshold, "value": _num(value), **more}
    if isinstance(matroid, Graph):
        d["partition"] = vertex_partition(matroid, S)
    return d


def _cfg(args) -> RoundingConfig:
    return RoundingConfig(args.eps, args.c0, args.seed)


def _mode(args, caps) -> str:
    mode = args.mode or ("apx" if args.eps_given else "exact")
    if mode != "real" and integral(caps) is None:
        return "real"
    return mode


def _int_k(k: float) -> int:
    if not float(k).is_integer() or k < 0:
        raise InputError(f"--k must be a nonnegative integer in integer modes, got {k}")
    return int(k)


def _params(args, mode, **more) -> dict:
    p = {"mode": mode, "seed": args.seed}
    for key in ("k", "eps", "height"):
        if key == "eps" and mode in ("exact", "hybrid") and not getattr(args, "eps_given", True):
            continue
        if getattr(args, key, None) is not None:
            p[key] = _num(getattr(args, key))
    p.update(more)
    return p


def _decided(cfg, trials, decide):
    if trials > 1:
        return majority(decide, cfg, trials)
    return decide(cfg.rng())


# commands

def cmd_union(args, inst) -> RunReport:
    mode = _mode(args, inst.caps)
    m = inst.matroid
    if mode == "real":
        cfg = _cfg(args)
        est = apx_union_value_real(m, inst.caps, args.k, args.eps, cfg, cfg.rng())
        return RunReport("union", _params(args, mode, k_prime=est.rounded.k_prime), _num(est.value),
                         dual=_dual(m, est.dual_set, None, est.dual_value), stats=_stats())
    u = integral(inst.caps)
    k = _int_k(args.k)
    if mode == "hybrid":
        res = hybrid_exact_union(m, u, k)
        return RunReport("union", _params(args, mode), res.value,
                         primal=[sorted(s) for s in res.packing.sets],
                         stats=_stats(queries=res.queries, augmentations=res.augmentations))
    if mode == "exact":
        res = exact_union(m, u, k, height=args.height)
    else:
        res = apx_union(m, u, k, args.eps, height=args.height)
    d = res.dual
    params = _params(args, mode, H=res.state.H if res.state else 0)
    return RunReport("union", params, res.value, primal=res.bases,
                     dual=_dual(m, d.S, d.threshold, d.value), stats=_stats(res.state))


def _decision_report(problem, args, mode, m, dec, ok_word, bad_word, lhs, rhs) -> RunReport:
    ok = dec.packed if hasattr(dec, "packed") else dec.covered
    st = dec.state
    params = _params(args, mode, H=dec.height)
    if ok:
        return RunReport(problem, params, None, ok_word, primal=dec.bases, stats=_stats(st))
    return RunReport(problem, params, None, bad_word,
                     dual=_dual(m, dec.certificate, dec.threshold, lhs, rank=dec.rank_S, bound=_num(rhs)),
                     stats=_stats(st))


def _real_decision(problem, args, inst, fn, ok_word, bad_word) -> RunReport:
    cfg = _cfg(args)
    m = inst.matroid
    dec = _decided(cfg, args.trials, lambda rng: fn(m, inst.caps, args.k, args.eps, cfg, rng))
    params = _params(args, "real", k_prime=dec.rounded.k_prime, trials=args.trials)
    if dec.yes:
        return RunReport(problem, params, None, ok_word, stats=_stats())
    return RunReport(problem, params, None, bad_word,
                     dual=_dual(m, dec.certificate, None, None, rank=dec.rank_S), stats=_stats())


def cmd_pack(args, inst) -> RunReport:
    mode = _mode(args, inst.caps)
    if mode == "real":
        return _real_decision("pack", args, inst, decide_strength, "AtLeast", "AtMost")
    m, u, k = inst.matroid, integral(inst.caps), _int_k(args.k)
    dec = exact_packing(m, u, k) if mode == "exact" else decide_packing(m, u, k, args.eps, height=args.height)
    r = _rank_of(m)
    lhs = rhs = None
    if dec.certificate is not None:
        inside = set(dec.certificate)
        lhs = sum(c for e, c in enumerate(u) if e not in inside)
        rhs = dec.scale * (r - dec.rank_S)
    return _decision_report("pack", args, mode, m, dec, "Packed", "Infeasible", lhs, rhs)


def cmd_cover(args, inst) -> RunReport:
    mode = _mode(args, inst.caps)
    if mode == "real":
        return _real_decision("cover", args, inst, decide_covering_real, "Covered", "Infeasible")
    m, u, k = inst.matroid, integral(inst.caps), _int_k(args.k)
    dec = exact_covering(m, u, k) if mode == "exact" else decide_covering(m, u, k, args.eps, height=args.height)
    lhs = rhs = None
    if dec.certificate is not None:
        lhs = sum(u[e] for e in dec.certificate)
        rhs = dec.scale * dec.rank_S
    return _decision_report("cover", args, mode, m, dec, "Covered", "Infeasible", lhs, rhs)


def _search_report(problem, args, inst, fn) -> RunReport:
    cfg = _cfg(args)
    out = fn(inst.matroid, inst.caps, args.eps, cfg, cfg.rng())
    params = _params(args, "real", k_prime=cfg.bases_count(inst.n))
    return RunReport(problem, params, out.estimate, stats=_stats(),
                     extra={"bracket": [out.lo, out.hi], "probes": out.probes, "stages": out.stages})


def cmd_strength(args, inst) -> RunReport:
    mode = _mode(args, inst.caps)
    if mode == "exact":
        res = exact_strength(inst.matroid, integral(inst.caps))
        inside = set(res.S)
        comp = sum(c for e, c in enumerate(inst.caps) if e not in inside)
        return RunReport("strength", _params(args, mode), _num(res.value),
                         dual=_dual(inst.matroid, res.S, None, res.value, rank=res.rank_S, capacity=comp),
                         stats=_stats(), extra={"exact": str(res.value), "decisions": res.tests})
    return _search_report("strength", args, inst, search_strength)


def cmd_arboricity(args, inst) -> RunReport:
    mode = _mode(args, inst.caps)
    if mode == "exact":
        res = exact_covering_number(inst.matroid, integral(inst.caps))
        return RunReport("arboricity", _params(args, mode), math.ceil(res.value),
                         dual=_dual(inst.matroid, res.S, None, res.value, rank=res.rank_S),
                         stats=_stats(), extra={"fractional": str(res.value), "decisions": res.tests})
    return _search_report("arboricity", args, inst, search_covering_number)


def cmd_membership(args, inst) -> RunReport:
    mode = args.mode or ("apx" if args.eps_given else "exact")
    m, x = inst.matroid, inst.caps
    if mode == "exact":
        fr = [Fraction(str(v)) for v in x]
        den = math.lcm(*(f.denominator for f in fr)) if fr else 1
        scaled = [int(f * den) for f in fr]
        try:
            res = exact_covering_number(m, scaled)
            inside = res.value <= den
        except ValueError:
            res, inside = None, False
        dual = None
        if not inside and res is not None:
            dual = _dual(m, res.S, None, res.value / den, rank=res.rank_S)
        return RunReport("membership", _params(args, mode), None, "Inside" if inside else "Outside",
                         dual=dual, stats=_stats())
    cfg = _cfg(args)
    dec = _decided(cfg, args.trials, lambda rng: decide_membership(m, x, args.eps, cfg, rng))
    params = _params(args, "real", k_prime=dec.rounded.k_prime, trials=args.trials)
    if dec.yes:
        return RunReport("membership", params, None, "Inside", stats=_stats())
    return RunReport("membership", params, None, "Outside",
                     dual=_dual(m, dec.certificate, None, None, rank=dec.rank_S), stats=_stats())


def cmd_reinforce(args, inst) -> RunReport:
    u = integral(inst.caps)
    if u is None:
        raise InputError("reinforce needs integral capacities")
    k = _int_k(args.k)
    if k < 1:
        raise InputError("reinforce needs --k >= 1")
    solve = reinforce_greedy if args.method == "greedy" else reinforce
    res = solve(inst.matroid, u, inst.costs, k)
    return RunReport("reinforce", _params(args, "exact", method=args.method), _num(res.cost), primal=res.bases,
                     stats=_stats(queries=res.queries), extra={"z": res.z, "base0": res.base0})


# verify and bench

def _verify_one(inst) -> list[str]:
    m, u, k = inst.matroid, inst.u, inst.k
    problems = []
    opt = oracle_ref.dual_enum_union(m, u, k)
    res = exact_union(m, u, k)
    if res.value != opt:
        problems.append(f"exact_union {res.value} != {opt}")
    if res.dual.value != opt:
        problems.append(f"dual cut {res.dual.value} != {opt}")
    hyb = hybrid_exact_union(m, u, k)
    if hyb.value != opt:
        problems.append(f"hybrid {hyb.value} != {opt}")
    if isinstance(m, Graph):
        gen = PushRelabel(GraphicMatroid(m), u, k, res.state.H).run()
        if gen.value() != res.value:
            problems.append(f"generic {gen.value()} != graphic {res.value}")
    for eps in (0.5, 0.2):
        a = apx_union(m, u, k, eps)
        if a.value * (1 + eps) < opt or a.dual.value > (1 + eps) * opt:
            problems.append(f"apx_union eps={eps} outside bounds")
        dp = decide_packing(m, u, k, eps)
        if dp.packed and not oracle_ref.pack_feasible_enum(m, u, k):
            problems.append(f"decide_packing eps={eps} packed an infeasible instance")
        if not dp.packed and oracle_ref.pack_feasible_enum(m, [math.floor(c / (1 + eps)) for c in u], k):
            problems.append(f"decide_packing eps={eps} rejected a slack instance")
        dc = decide_covering(m, u, k, eps)
        if dc.covered and not oracle_ref.cover_feasible_enum(m, u, k):
            problems.append(f"decide_covering eps={eps} covered an infeasible instance")
        if not dc.covered and oracle_ref.cover_feasible_enum(m, u, (1 - eps) * k):
            problems.append(f"decide_covering eps={eps} rejected a slack instance")
    return problems


def cmd_verify(args) -> int:
    rng = random.Random(args.seed)
    ok = 0
    for run in range(args.runs):
        inst = random_instance(rng, args.family, n_max=args.n)
        try:
            problems = _verify_one(inst)
        except Exception as err:  # a crash counts as a failed run
            problems = [f"{type(err).__name__}: {err}"]
        if problems:
            print(f"run {run} ({inst.family}, n={inst.n}, k={inst.k}): " + "; ".join(problems), file=sys.stderr)
        else:
            ok += 1
    print(f"{ok}/{args.runs} OK")
    return 0 if ok == args.runs else 1


def cmd_bench(args) -> int:
    w = csv.writer(sys.stdout, lineterminator="\n")
    w.writerow(["instance", "n", "r", "k", "eps", "queries", "value", "wall_ms"])
    for n in args.n:
        for k in args.k:
            for run in range(args.runs):
                m = UniformMatroid(n, n // 2)
                u = [1] * n
                t0 = time.perf_counter()
                if args.eps is None:
                    res = exact_union(m, u, k)
                else:
                    res = apx_union(m, u, k, args.eps)
                ms = (time.perf_counter() - t0) * 1000
                w.writerow([f"uniform-{n}-{n // 2}#{run}", n, n // 2, k,
                            "" if args.eps is None else args.eps, res.queries, res.value, f"{ms:.1f}"])
    return 0


# entry point

COMMANDS = {
    "union": cmd_union,
    "pack": cmd_pack,
    "cover": cmd_cover,
    "strength": cmd_strength,
    "arboricity": cmd_arboricity,
    "membership": cmd_membership,
    "reinforce": cmd_reinforce,
}


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="matroid-pr", description="Matroid union, base packing and covering solvers.")
    sub = p.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        s = sub.add_parser(name)
        s.add_argument("file")
        s.add_argument("--k", type=float, default=1.0)
        s.add_argument("--eps", type=float, default=None)
        s.add_argument("--mode", choices=["exact", "apx", "hybrid", "real"], default=None)
        s.add_argument("--seed", type=int, default=0)
        s.add_argument("--c0", type=float, default=9.0)
        s.add_argument("--trials", type=int, default=1)
        s.add_argument("--height", type=int, default=None)
        s.add_argument("--format", choices=["json", "text"], default="json")
        s.add_argument("--expand-capacities", action="store_true")
        if name == "reinforce":
            s.add_argument("--method", choices=["one-run", "greedy"], default="one-run")
    v = sub.add_parser("verify")
    v.add_argument("--family", choices=[*FAMILIES, "random"], default="random")
    v.add_argument("--n", type=int, default=10)
    v.add_argument("--runs", type=int, default=100)
    v.add_argument("--seed", type=int, default=0)
    b = sub.add_parser("bench")
    b.add_argument("--n", type=int, nargs="+", default=[32, 64, 128])
    b.add_argument("--k", type=int, nargs="+", default=[2, 8])
    b.add_argument("--eps", type=float, default=None)
    b.add_argument("--runs", type=int, default=1)
    return p


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    if args.command == "verify":
        return cmd_verify(args)
    if args.command == "bench":
        return cmd_bench(args)
    args.eps_given = args.eps is not None
    if args.eps is None:
        args.eps = 0.2
    try:
        if not 0 < args.eps < 1:
            raise InputError("--eps must lie in (0, 1)")
        if args.trials < 1:
            raise InputError("--trials must be at least 1")
        inst = load_instance(args.file, expand_capacities=args.expand_capacities)
        t0 = time.perf_counter()
        report = COMMANDS[args.command](args, inst)
        report.stats["wall_ms"] = round((time.perf_counter() - t0) * 1000, 3)
    except InputError as err:
        print(f"error: {err}", file=sys.stderr)
        return 2
    except ValueError as err:
        print(f"error: {err}", file=sys.stderr)
        return 2
    print(report.to_json() if args.format == "json" else report.to_text())
    return 1 if report.answer in NEGATIVE else 0


if __name__ == "__main__":
    sys.exit(main())
