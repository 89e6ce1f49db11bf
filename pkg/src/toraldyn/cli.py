"""Command-line interface: ``toraldyn <subcommand> [options]``.

Every report is JSON with reals as decimal strings and carries the tool version,
the configuration and the precision used.  Exit codes: 0 success, 1 input or
precision error, 2 failed verification.
"""

from __future__ import annotations

import argparse
import json
import os
import random
import sys
from fractions import Fraction

import mpmath

from . import __version__
from .equidistribution import (
    birkhoff_report,
    correlation_matrix,
    loglinear_slope,
    straighten,
)
from .errors import GuaranteeViolated, ToralDynError
from .exact_linalg import char_poly, is_irreducible, is_totally_irreducible
from .io import jsonable, load_matrix, parse_rational, parse_vector, render_text
from .relation_analyzer import full_verdict, verify_example_53
from .schmidt_game import GameConfig, make_bob, play_game, verify_nondense, BOBS
from .spectral import decompose, stable_split


class VerificationFailed(Exception):
    """Raised by a subcommand to request exit status 2 after writing its report."""

    def __init__(self, report):
        self.report = report


def _threads() -> int:
    raw = os.environ.get("TORALDYN_THREADS", "0")
    try:
        return max(0, int(raw))
    except ValueError:
        raise ToralDynError(f"TORALDYN_THREADS must be an integer, got {raw!r}") from None


def _unit(d: int) -> list[Fraction]:
    return [Fraction(int(i == 0)) for i in range(d)]


# ---------------------------------------------------------------------------
# subcommands


def cmd_analyze(args) -> dict:
    m = load_matrix(args.matrix)
    m.inverse()  # NotUnimodular for non-automorphisms
    sd = decompose(m, args.precision_bits)
    split = stable_split(sd)
    ti = is_totally_irreducible(m, args.power_bound)
    cp = char_poly(m)
    with sd.workprec():
        blocks = [
            {
                "index": b.index,
                "kind": b.kind,
                "eigenvalue": b.eigenvalue,
                "radius": b.radius,
                "modulus": b.modulus,
                "dim": b.dim,
                "basis": [list(v) for v in b.basis],
            }
            for b in sd.blocks
        ]
        return {
            "matrix": m.tolist(),
            "det": m.det(),
            "char_poly": str(cp),
            "irreducibility": is_irreducible(cp).to_dict(),
            "total_irreducibility": ti.to_dict(),
            "blocks": blocks,
            "split": {"plus": list(split.plus), "zero": list(split.zero), "minus": list(split.minus),
                      "dims": list(split.dims)},
            "central_certified": sorted(sd.central_certified),
            "norm_scale": sd.scale,
            "condition_number": sd.condition_number,
        }


def cmd_game(args) -> dict:
    m = load_matrix(args.matrix)
    d = m.dim
    sd = decompose(m, args.precision_bits)
    point = parse_vector(args.point, d) if args.point else [Fraction(0)] * d
    direction = parse_vector(args.direction, d) if args.direction else _unit(d)
    cfg = GameConfig(m, sd, point, direction, parse_rational(args.radius), parse_rational(args.beta))
    tr = play_game(cfg, make_bob(args.bob), args.rounds, args.seed)
    problems = tr.check_invariants()
    rounds = []
    with sd.workprec():
        for r in tr.rounds:
            rounds.append({
                "index": r.index,
                "phase": r.phase,
                "B_prev": {"center": r.B_prev.center, "radius": r.B_prev.radius},
                "A": {"center": r.A.center, "radius": r.A.radius},
                "B": {"center": r.B.center, "radius": r.B.radius},
                "k": r.k,
                "chosen_third": r.chosen_third,
                "dist0": r.dist0_value,
                "diameter": r.diameter,
            })
        report = {
            "lambda": tr.lam,
            "guarantee": 1 / (6 * tr.lam),
            "k_I": tr.k_I,
            "preprocessing_rounds": tr.preprocessing_rounds,
            "rounds": rounds,
            "k_sequence": tr.k_sequence,
            "k_sequence_gaps": tr.k_sequence_gaps,
            "k_gap_bound": tr.gap_bound(),
            "final_param": tr.final_param,
            "final_point": list(tr.final_point),
            "final_radius": tr.final_radius,
            "invariant_violations": problems,
        }
    if args.verify_horizon:
        sd2 = decompose(m, 2 * args.precision_bits)
        dist, step = verify_nondense(tr.final_point, m, sd2, args.verify_horizon)
        report["nondense"] = {"horizon": args.verify_horizon, "min_distance": dist, "argmin_step": step,
                              "precision_bits": 2 * args.precision_bits}
    if problems:
        raise VerificationFailed(report)
    return report


def cmd_equidist(args) -> dict:
    m = load_matrix(args.matrix)
    if args.point == "random":
        rng = random.Random(args.seed)
        point = [Fraction(rng.getrandbits(200), 2**200) for _ in range(m.dim)]
    else:
        point = parse_vector(args.point, m.dim)
    rep = birkhoff_report(m, point, args.steps, args.freq_cutoff)
    return {
        "point": point,
        "N": rep.N,
        "freq_cutoff": rep.cutoff,
        "max_deviation": rep.max_deviation,
        "threshold": rep.threshold,
        "verdict": rep.empirical_verdict,
        "character_averages": [{"m": list(k), "average": v} for k, v in sorted(rep.character_averages.items())],
    }


def cmd_straighten(args) -> dict:
    m = load_matrix(args.matrix)
    sd = decompose(m, args.precision_bits)
    w = parse_vector(args.direction, m.dim) if args.direction else None
    sys_ = straighten(m, sd, w)
    with sd.workprec():
        res = sys_.invariant_residuals()
        out = {
            "k_S": [{"block": b.index, "kind": b.kind, "value": k} for b, k in zip(sd.blocks, sys_.k_S)],
            "k_S_matrix": sys_.k_S_matrix.tolist(),
            "S_pos": sys_.S_pos.tolist(),
            "residuals": res,
        }
        if w is not None:
            out.update({"lambda": sys_.lam, "eta": sys_.eta, "w_lambda": list(sys_.w_lambda),
                        "direction": list(sys_.direction)})
        return out


def cmd_correlate(args) -> dict:
    m = load_matrix(args.matrix)
    sd = decompose(m, args.precision_bits)
    w = parse_vector(args.direction, m.dim) if args.direction else _unit(m.dim)
    x = parse_vector(args.point, m.dim) if args.point else [Fraction(0)] * m.dim
    sys_ = straighten(m, sd, w)
    res = correlation_matrix(sys_, x, args.test_fn, args.nmax, args.quad)
    gaps = list(range(2, min(12, args.nmax - 1) + 1))
    report = {
        "test_fn": args.test_fn,
        "n_values": list(res.n_values),
        "points": res.points,
        "richardson_disagreement": res.disagreement,
        "matrix": res.matrix,
    }
    if len(gaps) >= 2:
        mx = res.max_by_gap(gaps)
        with sd.workprec():
            report["decay_fit"] = {
                "gaps": gaps,
                "max_abs_by_gap": mx,
                "slope": loglinear_slope(gaps, mx),
                "reference_slope": -mpmath.log(sys_.lam) / 2,
            }
    return report


def cmd_relate(args) -> dict:
    s, t = load_matrix(args.matrix_s), load_matrix(args.matrix_t)
    v = full_verdict(s, t, args.precision_bits)
    with mpmath.workprec(2 * args.precision_bits):
        return {
            "S_totally_irreducible": v.S_total.to_dict(),
            "T_totally_irreducible": v.T_total.to_dict(),
            "commute": v.commute,
            "weak_stable": {
                "relation": v.weak_stable.relation,
                "principal_angles": list(v.weak_stable.angles),
                "dims": [v.weak_stable.dim_S, v.weak_stable.dim_T],
                "S_not_in_T": v.weak_stable.s_not_in_t,
                "T_not_in_S": v.weak_stable.t_not_in_s,
            },
            "common_eigenvectors": [{"vectors": [list(x) for x in c.vectors], "nu_S": c.nu_S, "nu_T": c.nu_T}
                                    for c in v.common_eigvecs],
            "gcd_criterion": None if v.gcd is None else {"d": v.gcd.d, "dim_ws": v.gcd.dim_ws, "gcd": v.gcd.gcd,
                                                         "conclusion": v.gcd.conclusion},
            "invariant_subspaces": [
                {
                    "dimension": w.dimension,
                    "field_minpoly": str(w.field.minpoly),
                    "generator": w.field.root,
                    "basis": [[w.field.format(x) for x in vec] for vec in w.basis],
                }
                for w in v.witnesses
            ],
            "theorem_route": v.theorem_route,
            "notes": v.notes,
        }


def cmd_example53(args) -> dict:
    checks = verify_example_53(args.precision_bits)
    report = {"checks": [{"name": c.name, "passed": c.passed, "detail": c.detail} for c in checks],
              "all_passed": all(c.passed for c in checks)}
    if args.verify and not report["all_passed"]:
        raise VerificationFailed(report)
    return report


# ---------------------------------------------------------------------------
# parser and driver


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--precision-bits", type=int, default=128, help="working precision in bits (>= 64)")
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--format", choices=("json", "text"), default="json")
    common.add_argument("--out", help="write the report here instead of stdout")

    parser = argparse.ArgumentParser(prog="toraldyn", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"toraldyn {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("analyze", parents=[common], help="spectrum, splitting and irreducibility of a matrix")
    p.add_argument("--matrix", required=True)
    p.add_argument("--power-bound", type=int, default=None)
    p.set_defaults(func=cmd_analyze)

    p = sub.add_parser("game", parents=[common], help="play the Schmidt game on a segment")
    p.add_argument("--matrix", required=True)
    p.add_argument("--beta", default="1/2")
    p.add_argument("--rounds", type=int, default=40)
    p.add_argument("--bob", choices=sorted(BOBS), default="random")
    p.add_argument("--point", help="base point x, e.g. '1/7,2/9' (default 0)")
    p.add_argument("--direction", help="direction w (default first unit vector)")
    p.add_argument("--radius", default="1/10", help="initial radius in the segment parameter")
    p.add_argument("--verify-horizon", type=int, default=0, help="also run verify_nondense over this horizon")
    p.set_defaults(func=cmd_game)

    p = sub.add_parser("equidist", parents=[common], help="Birkhoff averages of characters along an orbit")
    p.add_argument("--matrix", required=True)
    p.add_argument("--point", default="random", help="rational vector or 'random' (seeded, 200 bits)")
    p.add_argument("--steps", type=int, default=10**5)
    p.add_argument("--freq-cutoff", type=int, default=3)
    p.set_defaults(func=cmd_equidist)

    p = sub.add_parser("straighten", parents=[common], help="k_S, S_pos and the dominating data")
    p.add_argument("--matrix", required=True)
    p.add_argument("--direction")
    p.set_defaults(func=cmd_straighten)

    p = sub.add_parser("correlate", parents=[common], help="correlations of the f_n functions")
    p.add_argument("--matrix", required=True)
    p.add_argument("--direction")
    p.add_argument("--point")
    p.add_argument("--test-fn", default="cos:1,0")
    p.add_argument("--nmax", type=int, default=24)
    p.add_argument("--quad", type=int, default=4096)
    p.set_defaults(func=cmd_correlate)

    p = sub.add_parser("relate", parents=[common], help="relationship between two automorphisms")
    p.add_argument("--matrix-s", required=True)
    p.add_argument("--matrix-t", required=True)
    p.set_defaults(func=cmd_relate)

    p = sub.add_parser("example53", parents=[common], help="rebuild and check the 4x4 non-commuting example")
    p.add_argument("--verify", action="store_true", help="exit 2 if any check fails")
    p.set_defaults(func=cmd_example53)
    return parser


def _config(args) -> dict:
    skip = {"func", "out"}
    return {k: v for k, v in sorted(vars(args).items()) if k not in skip}


def _emit(args, result) -> None:
    report = {
        "tool": "toraldyn",
        "version": __version__,
        "command": args.command,
        "precision_bits": args.precision_bits,
        "threads": _threads(),
        "config": _config(args),
        "result": result,
    }
    with mpmath.workprec(2 * args.precision_bits):
        safe = jsonable(report)
    text = json.dumps(safe, indent=2) + "\n" if args.format == "json" else render_text(safe) + "\n"
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.precision_bits < 64:
        print("error: --precision-bits must be at least 64", file=sys.stderr)
        return 1
    try:
        _threads()
        result = args.func(args)
    except VerificationFailed as exc:
        _emit(args, exc.report)
        print("error: verification failed", file=sys.stderr)
        return 2
    except GuaranteeViolated as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (ToralDynError, ValueError) as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 1
    _emit(args, result)
    return 0


if __name__ == "__main__":
    sys.exit(main())
