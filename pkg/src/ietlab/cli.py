"""``ietlab`` command line: one subcommand per pipeline, outputs under ``runs/<hash>/``.

Exit codes: 0 success, 2 configuration error, 3 numerical failure. Errors are
also written to stderr as one JSON object.
"""
from __future__ import annotations

import argparse
import json
import sys
from fractions import Fraction

import numpy as np

from . import scalar
from .combinatorics import (find_good_word, is_rotation_class, is_type_w, rauzy_class,
                            surface_data)
from .errors import CertificateFailure, ConfigError, IETLabError, NumericError
from .experiments.correlations import cesaro_decay
from .experiments.dichotomy import DichotomyConfig, dichotomy_run
from .experiments.fitting import compare_models
from .experiments.rotation import lower_bound_construct, rotation_representation
from .fixtures import FIXTURES, get_fixture
from .iet import make_iet
from .io import RunConfig, RunWriter
from .observables import bump, constant, cosine, indicator, tent
from .permutation import Permutation
from .renormalize import (RauzyPath, lyapunov_estimate, path_matrix, random_kinds, rauzy_step,
                          zorich_step)
from .twisted import empirical_spectral_mass, fejer_kernel, fejer_kernel_quad, mainbound, pi_n, veech_frequency


class UsageError(ConfigError):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        raise UsageError(message)


# -- argument helpers --------------------------------------------------------------

def parse_perm(text: str) -> Permutation:
    return Permutation.parse(text)


def parse_observable(text: str):
    """``bump:a,b``, ``tent:a,b``, ``indicator:a,b``, ``const:c`` or ``cos:k``."""
    kind, _, args = text.partition(":")
    vals = [a for a in args.split(",") if a]
    try:
        if kind in ("bump", "tent", "indicator") and len(vals) == 2:
            return {"bump": bump, "tent": tent, "indicator": indicator}[kind](*map(Fraction, vals))
        if kind == "const" and len(vals) <= 1:
            return constant(Fraction(vals[0]) if vals else 1)
        if kind == "cos" and len(vals) == 1:
            return cosine(int(vals[0]))
    except (ValueError, ZeroDivisionError) as exc:
        raise ConfigError(f"bad observable {text!r}: {exc}") from None
    raise ConfigError(f"bad observable {text!r}")


def load_iet(args):
    if getattr(args, "fixture", None):
        return get_fixture(args.fixture)
    if not getattr(args, "perm", None) or not getattr(args, "lengths", None):
        raise ConfigError("give --fixture, or a permutation together with --lengths")
    return make_iet(args.perm, [Fraction(x) for x in args.lengths.split(",")])


def _writer(args, command, params, fixtures=()):
    cfg = RunConfig(command, params, getattr(args, "seed", 0), scalar.DEFAULT_BITS, list(fixtures))
    return RunWriter(cfg, args.out)


# -- subcommands -------------------------------------------------------------------

def cmd_classify(args):
    p = parse_perm(args.perm)
    irreducible = p.is_irreducible()
    out = {"permutation": str(p), "irreducible": irreducible, "rotation": p.is_rotation()}
    if irreducible:
        sd = surface_data(p)
        out.update(rotation_class=is_rotation_class(p), type_w=is_type_w(p), genus=sd.genus,
                   kappa=sd.kappa, class_size=len(rauzy_class(p)))
    w = _writer(args, "classify", {"perm": args.perm})
    w.write_json("classify.json", out)
    w.finish()
    return out


def cmd_induce(args):
    iet = load_iet(args)
    rows, blocks = [], []
    cur, kinds = iet, []
    if args.zorich:
        for b in range(args.steps):
            cur, steps = zorich_step(cur, renormalize=False)
            blocks.append(len(steps))
            for s in steps:
                kinds.append(s)
                rows.append((len(kinds), b + 1, s.kind, s.winner, s.loser, str(s.end)))
    else:
        for i in range(args.steps):
            cur, s = rauzy_step(cur, renormalize=False)
            kinds.append(s)
            rows.append((i + 1, "", s.kind, s.winner, s.loser, str(s.end)))
    B = path_matrix(RauzyPath(iet.perm, tuple(kinds)))
    params = {"perm": str(iet.perm), "lengths": [str(x) for x in iet.lengths]
              if iet.is_exact else [scalar.to_float(x) for x in iet.lengths],
              "steps": args.steps, "zorich": args.zorich}
    w = _writer(args, "induce", params, [args.fixture] if args.fixture else [])
    w.write_csv("steps.csv", ["step", "block", "kind", "winner", "loser", "permutation"], rows)
    w.write_json("path.json", {"matrix": B.tolist(), "blocks": blocks, "final_lengths": list(cur.lengths),
                               "final_permutation": str(cur.perm)})
    w.finish()
    return {"steps": len(rows), "blocks": blocks}


def cmd_lyapunov(args):
    p = parse_perm(args.perm)
    est = lyapunov_estimate(p, seed=args.seed, n_steps=args.steps, n_samples=args.samples)
    out = {"theta1": est.theta1, "theta2": est.theta2, "stderr1": est.stderr1, "stderr2": est.stderr2,
           "ratio": est.ratio, "per_log_norm": list(est.per_log_norm), "flagged": est.flagged}
    w = _writer(args, "lyapunov", {"perm": args.perm, "steps": args.steps, "samples": args.samples})
    w.write_json("lyapunov.json", out)
    w.finish()
    return out


def cmd_good_word(args):
    p = parse_perm(args.perm)
    gw = find_good_word(p, budget=args.budget, max_len=args.max_len)
    out = {"word": gw.word, "substitution": str(gw.substitution),
           "good_return_words": ["".join(map(str, v)) for v in gw.good_words],
           "lattice_index": gw.lattice_index, "candidates_tried": gw.candidates_tried}
    w = _writer(args, "good-word", {"perm": args.perm, "budget": args.budget, "max_len": args.max_len})
    w.write_json("good_word.json", out)
    w.finish()
    return out


def cmd_twisted(args):
    p = parse_perm(args.perm)
    gw = find_good_word(p)
    core = gw.substitution
    seq = [(core, core, core) if k % 2 else (core, core) for k in range(args.levels)]
    flat = [z for f in seq for z in f]
    s = tuple(Fraction(1) for _ in range(p.d))
    rows, violations = [], 0
    for om in np.linspace(0.0, 1.0, args.grid, endpoint=False) + 0.5 / args.grid:
        P = pi_n(flat, s, om)
        bound = mainbound(seq, core, s, om, args.levels, gr=gw.good_words)
        phi = float(np.abs(P).max())
        bad = phi > bound.value * (1 + 1e-9)
        violations += bad
        rows.append((float(om), phi, bound.value, bad))
    w = _writer(args, "twisted", {"perm": args.perm, "levels": args.levels, "grid": args.grid})
    w.write_csv("twisted.csv", ["omega", "max_abs_phi", "mainbound", "violation"], rows)
    w.write_json("summary.json", {"word": gw.word, "violations": violations, "grid": args.grid})
    w.finish()
    return {"violations": violations}


def cmd_spectral(args):
    iet = load_iet(args)
    f = parse_observable(args.observable)
    rows = []
    for r in args.r:
        est = empirical_spectral_mass(iet, f, args.omega, r, n_points=args.points, seed=args.seed)
        rows.append((args.omega, r, est.N, est.estimate, est.certified_upper, est.alpha, est.C1))
    kern = [(R, xi, fejer_kernel(R, xi), fejer_kernel_quad(R, xi)) for R, xi in ((3.0, 0.2), (10.0, 0.05))]
    w = _writer(args, "spectral", {"omega": args.omega, "r": args.r, "observable": args.observable,
                                   "points": args.points}, [args.fixture] if args.fixture else [])
    w.write_csv("spectral.csv", ["omega", "r", "N", "estimate", "certified_upper", "alpha", "C1"], rows)
    w.write_csv("fejer.csv", ["R", "xi", "closed_form", "quadrature"], kern)
    w.finish()
    return {"rows": len(rows)}


def cmd_correlate(args):
    iet = load_iet(args)
    f, g = parse_observable(args.f), parse_observable(args.g)
    grid = [2 ** k for k in range(args.kmin, args.kmax + 1)]
    series = cesaro_decay(iet, f, g, grid, mode=args.mode, iet_id=args.fixture or "")
    fits = compare_models(series.N, [float(c) for c in series.C])
    w = _writer(args, "correlate", {"f": args.f, "g": args.g, "kmin": args.kmin, "kmax": args.kmax,
                                    "mode": args.mode}, [args.fixture] if args.fixture else [])
    w.write_csv("series.csv", ["N", "C_N", "Q_N", "mean_abs"], series.rows())
    w.write_json("fits.json", {"preferred": fits["preferred"],
                               "fits": {m: vars(x) for m, x in fits["fits"].items()}})
    w.finish()
    return {"preferred": fits["preferred"]}


def cmd_dichotomy(args):
    cfg = DichotomyConfig(k_min=args.kmin, k_max=args.kmax, seed=args.seed, depth=args.depth,
                          rotation_fixture=args.rotation_fixture, other_fixture=args.other_fixture)
    report = dichotomy_run(cfg)
    w = _writer(args, "dichotomy", report["config"], [cfg.rotation_fixture, cfg.other_fixture])
    for key, arm in report["arms"].items():
        w.write_csv(f"series_{key}.csv", ["N", "C_N", "Q_N", "mean_abs"],
                    zip(arm["N"], arm["C"], arm["Q"], arm["mean_abs"]))
    w.write_json("report.json", report)
    w.finish()
    return {"ordering": report["ordering"], "model_direction": report["model_direction"]}


def cmd_lower_bound(args):
    iet = get_fixture(args.fixture)
    rep = rotation_representation(iet)
    cert = lower_bound_construct(rep, args.N, eps=args.eps, c0=args.c0)
    out = {"N": cert.N, "eps": cert.eps, "C": cert.C, "A": cert.A, "c0": cert.c0, "s": cert.s,
           "J": cert.J, "J_prime": cert.J_prime, "J_second": cert.J_second, "S": cert.S,
           "H_measure": cert.H_measure, "f_l1": cert.f_l1, "g_l1": cert.g_l1, "f_lip": cert.f_lip,
           "g_lip": cert.g_lip, "Q": cert.Q, "ratio": cert.ratio, "disjoint": cert.disjoint,
           "checks": cert.checks, "ok": cert.ok,
           "representation": {"a": rep.a, "theta": rep.theta, "roof": rep.roof, "path": rep.path}}
    w = _writer(args, "lower-bound", {"fixture": args.fixture, "N": args.N, "eps": args.eps,
                                      "c0": args.c0}, [args.fixture])
    w.write_json("certificate.json", out)
    w.finish()
    if not cert.ok:
        failed = ", ".join(k for k, v in cert.checks.items() if not v)
        raise CertificateFailure(f"certificate checks failed: {failed}")
    return {"ok": cert.ok}


def cmd_veech_freq(args):
    p = parse_perm(args.perm)
    kinds = random_kinds(args.seed, args.n)
    eps = Fraction(args.eps)
    rows = []
    for t in args.t:
        v = veech_frequency(p, kinds, Fraction(t), eps, args.n)
        rows.append((Fraction(t), v.n, v.count, v.fraction, v.fraction > eps))
    w = _writer(args, "veech-freq", {"perm": args.perm, "n": args.n, "t": args.t, "eps": args.eps})
    w.write_csv("veech.csv", ["t", "n", "count", "fraction", "exceeds_eps"], rows)
    w.finish()
    return {"rows": len(rows)}


# -- parser ------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    ap = _Parser(prog="ietlab", description="Interval exchange renormalization and correlation experiments.")
    ap.add_argument("--out", default="runs", help="root directory for run outputs")
    sub = ap.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def iet_args(p):
        p.add_argument("perm", nargs="?", help='permutation, e.g. "A B C D / D C B A"')
        p.add_argument("--lengths", help="comma-separated lengths in alphabet order (p/q allowed)")
        p.add_argument("--fixture", choices=sorted(FIXTURES))

    p = sub.add_parser("classify", help="irreducibility, rotation class, type W, genus")
    p.add_argument("perm")
    p.set_defaults(fn=cmd_classify)

    p = sub.add_parser("induce", help="Rauzy or Zorich trajectory and path matrix")
    iet_args(p)
    p.add_argument("--steps", type=int, default=20)
    p.add_argument("--zorich", action="store_true", help="count Zorich blocks instead of Rauzy steps")
    p.set_defaults(fn=cmd_induce)

    p = sub.add_parser("lyapunov", help="Lyapunov exponents of the Zorich cocycle")
    p.add_argument("perm")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--steps", type=int, default=20000)
    p.add_argument("--samples", type=int, default=4)
    p.set_defaults(fn=cmd_lyapunov)

    p = sub.add_parser("good-word", help="simple positive loop with generating good return words")
    p.add_argument("perm")
    p.add_argument("--budget", type=int, default=50000)
    p.add_argument("--max-len", type=int, default=40)
    p.set_defaults(fn=cmd_good_word)

    p = sub.add_parser("twisted", help="twisted products against the contraction bound on an omega grid")
    p.add_argument("perm")
    p.add_argument("--levels", type=int, default=2)
    p.add_argument("--grid", type=int, default=200)
    p.set_defaults(fn=cmd_twisted)

    p = sub.add_parser("spectral", help="spectral mass estimates and Fejer bounds")
    iet_args(p)
    p.add_argument("--observable", default="const:1")
    p.add_argument("--omega", type=float, default=0.0)
    p.add_argument("--r", type=float, nargs="+", default=[0.01])
    p.add_argument("--points", type=int, default=64)
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(fn=cmd_spectral)

    p = sub.add_parser("correlate", help="Cesaro correlation series")
    iet_args(p)
    p.add_argument("--f", default="bump:1/2,3/5")
    p.add_argument("--g", default="bump:1/10,1/5")
    p.add_argument("--kmin", type=int, default=4)
    p.add_argument("--kmax", type=int, default=10)
    p.add_argument("--mode", choices=["float", "exact"], default="float")
    p.set_defaults(fn=cmd_correlate)

    p = sub.add_parser("dichotomy", help="rotation class against non-rotation class decay")
    p.add_argument("--kmin", type=int, default=8)
    p.add_argument("--kmax", type=int, default=16)
    p.add_argument("--seed", type=int, default=7)
    p.add_argument("--depth", type=int, default=160)
    p.add_argument("--rotation-fixture", default="d3-reversal")
    p.add_argument("--other-fixture", default="d4-symmetric")
    p.set_defaults(fn=cmd_dichotomy)

    p = sub.add_parser("lower-bound", help="lower-bound certificate for a rotation-class fixture")
    p.add_argument("--fixture", default="three-reversal-golden", choices=sorted(FIXTURES))
    p.add_argument("--N", type=int, default=4096)
    p.add_argument("--eps", type=float, default=0.1)
    p.add_argument("--c0", type=float, default=None)
    p.set_defaults(fn=cmd_lower_bound)

    p = sub.add_parser("veech-freq", help="frequency of steps with ||A_i t h|| > eps")
    p.add_argument("perm")
    p.add_argument("--seed", type=int, default=7)
    p.add_argument("--n", type=int, default=1000)
    p.add_argument("--t", nargs="+", default=["1/3", "2/5", "1/7"])
    p.add_argument("--eps", default="1/20")
    p.set_defaults(fn=cmd_veech_freq)
    return ap


def _fail(exc: Exception, code: int) -> int:
    sys.stderr.write(json.dumps({"error": type(exc).__name__, "message": str(exc), "exit_code": code}) + "\n")
    return code


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        result = args.fn(args)
    except UsageError as exc:
        return _fail(exc, 2)
    except NumericError as exc:
        return _fail(exc, 3)
    except (ConfigError, ValueError) as exc:
        return _fail(exc, 2)
    except ArithmeticError as exc:
        return _fail(exc, 3)
    except IETLabError as exc:
        return _fail(exc, 3)
    print(json.dumps(result, default=str))
    return 0


if __name__ == "__main__":
    sys.exit(main())
