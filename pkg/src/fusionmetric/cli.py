"""Command-line entry point.

Exit status: 0 all checks pass, 1 a check failed, 2 usage or validation
error, 3 computation error. Check summaries go to stderr; the report goes
to ``--output`` or, if none is given, to stdout.
"""

from __future__ import annotations

import argparse
import json
import re
import sys
from pathlib import Path

from . import __version__
from .exceptions import (
    ConvergenceError,
    FusionAxiomError,
    MaterializationError,
    ModelValidationError,
    NotGeneratedError,
    UnknownLabelError,
)
from .fusion_ring import FusionRing, verify_axioms, verify_truncated
from .gns import TruncatedRep, haagerup_check
from .length import LengthFunction, verify_length_axioms, word_length
from .metric import MKProblem, berezin_defect_check, diameter_estimate, mk_distance
from .reports import Report, dumps, rows_to_csv
from .rings import PRESETS, build_ring
from .states import counit_state, foelner_weights

EXIT_OK, EXIT_FAIL, EXIT_USAGE, EXIT_COMPUTE = 0, 1, 2, 3

try:
    import tomllib
except ModuleNotFoundError:  # Python < 3.11
    import tomli as tomllib


class UsageError(Exception):
    pass


# -- resolution helpers -------------------------------------------------------

def default_generators(ring: FusionRing) -> list:
    """Preset generating sets: u1 for the SU(2)/SO(3) families, the letters and
    their inverses for free groups, and otherwise the nontrivial labels of
    maximal dimension closed under conjugation (finite rings only)."""
    name = ring.name_
    if name in ("su2", "so3", "o2plus", "s4plus"):
        return [1]
    if name.startswith("free"):
        k = int(name[4:])
        return [(s,) for i in range(1, k + 1) for s in (i, -i)]
    if name.startswith("zk"):
        k = int(name[2:])
        return [tuple((s if j == i else 0) for j in range(k)) for i in range(k) for s in (1, -1)]
    if not ring.is_finite:
        raise UsageError(f"ring {name} needs --generators or --length")
    nontrivial = [a for a in ring.basis if a != ring.unit]
    if not nontrivial:
        raise UsageError("trivial ring has no generators")
    dmax = max(ring.dim(a) for a in nontrivial)
    gens = [a for a in nontrivial if ring.dim(a) == dmax]
    return ring.sorted(set(gens) | {ring.conj(a) for a in gens})


def resolve_length(ring: FusionRing, args) -> LengthFunction:
    if getattr(args, "length", None):
        return LengthFunction.from_dict(ring, json.loads(Path(args.length).read_text()))
    if getattr(args, "generators", None):
        names = [s for s in re.split(r"[,\s]+", args.generators) if s]
        return word_length(ring, names)
    return word_length(ring, default_generators(ring))


def parse_range(text: str) -> list[int]:
    """``"1..6"``, ``"1,3,5"`` or ``"4"``."""
    out = []
    for part in str(text).split(","):
        part = part.strip()
        m = re.fullmatch(r"(\d+)\.\.(\d+)", part)
        if m:
            lo, hi = int(m.group(1)), int(m.group(2))
            if hi < lo:
                raise UsageError(f"empty range {part!r}")
            out.extend(range(lo, hi + 1))
        elif part.isdigit():
            out.append(int(part))
        else:
            raise UsageError(f"cannot parse range {text!r}")
    return out


def _positive(kind):
    def check(text):
        v = kind(text)
        if v <= 0:
            raise argparse.ArgumentTypeError(f"must be positive, got {text}")
        return v
    return check


# -- tasks --------------------------------------------------------------------

def task_verify(args, ring, length) -> Report:
    rep = Report(f"verify {ring.name_}")
    if ring.window is not None:
        window = ring.window
        rep.checks.extend(verify_truncated(ring).checks)
    else:
        window = ring.basis if ring.is_finite else length.ball(args.radius)
        rep.checks.extend(verify_axioms(ring, window).checks)
    lrep = verify_length_axioms(length, args.radius)
    rep.checks.extend(lrep.checks)
    rep.data.update(window=len(window), radius=args.radius, sphere_sizes=lrep.data["sphere_sizes"])
    return rep


def task_haagerup(args, ring, length) -> Report:
    rep = TruncatedRep(ring, length, args.window)
    return haagerup_check(rep, args.C, args.window, n_random=args.samples, seed=args.seed)


def task_metric(args, ring, length, sink) -> Report:
    rep = Report(f"metric {ring.name_} R={args.radius}")
    eps = counit_state(ring)
    ns = parse_range(args.foelner)
    for n in ns:
        _, chi = foelner_weights(ring, length, n)
        res = mk_distance(MKProblem(eps, chi, length, args.radius), method=args.method)
        rep.rows.append({"n": n, "d_R": res.value})
        sink(rep)                                   # flush partial table
        rep.add(f"d_R(counit, foelner{n})", res.status == "optimal", **res.to_dict())
    rep.data.update(radius=args.radius, norm_variant="compression to ball(R)",
                    foelner_sets="length balls")
    return rep


def task_diameter(args, ring, length) -> Report:
    rep = Report(f"diameter {ring.name_} R={args.radius}")
    diameter_estimate(TruncatedRep(ring, length, args.radius), samples=args.samples,
                      seed=args.seed, report=rep)
    return rep


def task_berezin(args, ring, length) -> Report:
    import numpy as np

    trep = TruncatedRep(ring, length, args.radius)
    eps = counit_state(ring)
    rep = Report(f"berezin {ring.name_} R={args.radius}")
    support = length.ball(args.support)
    rng = np.random.default_rng(args.seed)
    for n in parse_range(args.foelner):
        _, chi = foelner_weights(ring, length, n)
        d = mk_distance(MKProblem(eps, chi, length, args.radius)).value
        worst, ok = -np.inf, True
        for _ in range(args.samples):
            c = rng.standard_normal(len(support)) + 1j * rng.standard_normal(len(support))
            x = ring.element(dict(zip(support, c)))
            chk = berezin_defect_check(trep, chi, x, distance=d)["defect bound"]
            ok &= chk.passed
            worst = max(worst, chk.detail["lhs_lower"] - chk.detail["rhs"])
        rep.rows.append({"n": n, "d_R": d, "worst_excess": worst})
        rep.add(f"berezin bound n={n}", ok, distance=d, samples=args.samples, worst_excess=worst)
    return rep


def task_classical(args) -> Report:
    from .classical.model import bundled_model, cross_validate_central, default_length, identity_report

    rep = Report("classical models")
    for name in [g for g in re.split(r"[,\s]+", args.groups) if g]:
        model = bundled_model(name)
        sub = identity_report(model, samples=args.samples, seed=args.seed)
        for c in sub.checks:
            rep.add(f"{name}: {c.name}", c.passed, **c.detail)
        if any(r.dim > 1 for r in model.irreps):
            cv = cross_validate_central(model, default_length(model), samples=100, seed=args.seed)
            for c in cv.checks:
                rep.add(f"{name}: {c.name}", c.passed, **c.detail)
    return rep


def task_export(args, ring, length):
    """Returns (text, report) for the requested artifact."""
    what = args.what
    if what == "ring":
        window = None if ring.is_finite else length.ball(args.radius)
        return ring.to_json(window), None
    if what == "length":
        return dumps(length.to_dict(None if length.is_word_length else args.radius)), None
    if what == "state":
        n = parse_range(args.foelner)[0]
        _, chi = foelner_weights(ring, length, n)
        window = length.ball(2 * n)
        return dumps(chi.to_dict(window)), None
    if what == "metric":
        rep = task_metric(args, ring, length, lambda r: None)
        if args.format == "dat":
            lines = ["# n d_R"] + [f"{r['n']} {r['d_R']!r}" for r in rep.rows]
            return "\n".join(lines) + "\n", rep
        return rows_to_csv(rep.rows, ["n", "d_R"]), rep
    raise UsageError(f"unknown export target {what!r}")


# -- parser -------------------------------------------------------------------

def build_parser() -> tuple[argparse.ArgumentParser, dict]:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="TOML file whose keys mirror the long flags")
    common.add_argument("--output", "-o", help="write the report here instead of stdout")
    common.add_argument("--format", choices=("json", "csv", "dat"), default="json")
    common.add_argument("--tol", type=_positive(float), default=1e-9)
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--quiet", "-q", action="store_true", help="suppress check summaries")

    ringopts = argparse.ArgumentParser(add_help=False)
    ringopts.add_argument("--ring", default="su2",
                          help=f"preset ({', '.join(PRESETS)}), z<n>, free:<k>, zk:<k>, "
                               "group:<name>, rep:<name> or file:<path>")
    ringopts.add_argument("--generators", help="generating set, e.g. 'u1' or 'a,A,b,B'")
    ringopts.add_argument("--length", help="length JSON file ({generators} or {explicit})")

    parser = argparse.ArgumentParser(prog="fusionmetric", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="task", required=True)
    subs = {}

    p = subs["verify"] = sub.add_parser("verify", parents=[common, ringopts],
                                        help="fusion axioms and length axioms on a ball")
    p.add_argument("--radius", type=_positive(int), default=10)

    p = subs["haagerup"] = sub.add_parser("haagerup", parents=[common, ringopts],
                                          help="block-norm bound ||P_m a P_n|| <= C ||a||_2")
    p.add_argument("--C", type=_positive(float), default=1.0)
    p.add_argument("--window", type=_positive(int), default=20)
    p.add_argument("--samples", type=int, default=1000)

    p = subs["metric"] = sub.add_parser("metric", parents=[common, ringopts],
                                        help="d_R(counit, foelner_n) table")
    p.add_argument("--radius", type=_positive(int), default=8)
    p.add_argument("--foelner", default="1..6")
    p.add_argument("--method", choices=("sdp", "supergradient"), default="sdp")

    p = subs["diameter"] = sub.add_parser("diameter", parents=[common, ringopts],
                                          help="d_R(counit, haar) with a spot check")
    p.add_argument("--radius", type=_positive(int), default=10)
    p.add_argument("--samples", type=int, default=100)

    p = subs["berezin"] = sub.add_parser("berezin", parents=[common, ringopts],
                                         help="Berezin defect bound on random elements")
    p.add_argument("--radius", type=_positive(int), default=20)
    p.add_argument("--foelner", default="1..6")
    p.add_argument("--samples", type=int, default=50)
    p.add_argument("--support", type=int, default=4, help="radius of the random elements' support")

    p = subs["classical"] = sub.add_parser("classical", parents=[common],
                                           help="identity suite for bundled finite groups")
    p.add_argument("--groups", default="z2,z3,s3,d4,q8")
    p.add_argument("--samples", type=int, default=200)

    p = subs["export"] = sub.add_parser("export", parents=[common, ringopts],
                                        help="write ring, length, state or metric files")
    p.add_argument("what", choices=("ring", "length", "state", "metric"))
    p.add_argument("--radius", type=_positive(int), default=8)
    p.add_argument("--foelner", default="1..6")
    p.add_argument("--method", choices=("sdp", "supergradient"), default="sdp")
    return parser, subs


def _apply_config(parser, subs, argv):
    pre, _ = parser.parse_known_args(argv)
    path = getattr(pre, "config", None)
    if not path:
        return pre
    with open(path, "rb") as fh:
        cfg = tomllib.load(fh)
    values = {k: v for k, v in cfg.items() if not isinstance(v, dict)}
    values.update(cfg.get(pre.task, {}))
    sp = subs[pre.task]
    known = {a.dest for a in sp._actions}
    unknown = sorted(k.replace("-", "_") for k in values if k.replace("-", "_") not in known)
    if unknown:
        raise UsageError(f"unknown config keys for {pre.task}: {unknown}")
    sp.set_defaults(**{k.replace("-", "_"): v for k, v in values.items()})
    return parser.parse_args(argv)


def _emit(args, text: str):
    if args.output:
        path = Path(args.output)
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(text)
    else:
        sys.stdout.write(text)


def _render(args, rep: Report) -> str:
    if args.format == "csv":
        return rep.to_csv()
    if args.format == "dat":
        cols = list(rep.rows[0]) if rep.rows else []
        return "\n".join(["# " + " ".join(cols)] + [" ".join(repr(r[c]) for c in cols) for r in rep.rows]) + "\n"
    return rep.to_json()


def run(argv=None) -> int:
    parser, subs = build_parser()
    try:
        args = _apply_config(parser, subs, argv)
    except (UsageError, OSError, tomllib.TOMLDecodeError) as exc:
        print(f"fusionmetric: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    partial: dict = {}

    def sink(rep):
        partial["report"] = rep

    try:
        if args.task == "classical":
            rep = task_classical(args)
        else:
            ring = build_ring(args.ring)
            length = resolve_length(ring, args)
            if args.task == "export":
                text, rep = task_export(args, ring, length)
                _emit(args, text)
                if rep is not None and not args.quiet:
                    for line in rep.summary_lines():
                        print(line, file=sys.stderr)
                return EXIT_OK if rep is None or rep.passed else EXIT_FAIL
            rep = {
                "verify": lambda: task_verify(args, ring, length),
                "haagerup": lambda: task_haagerup(args, ring, length),
                "metric": lambda: task_metric(args, ring, length, sink),
                "diameter": lambda: task_diameter(args, ring, length),
                "berezin": lambda: task_berezin(args, ring, length),
            }[args.task]()
    except (UsageError, ValueError, KeyError, UnknownLabelError, FusionAxiomError,
            ModelValidationError, OSError) as exc:
        print(f"fusionmetric: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (ConvergenceError, MaterializationError, NotGeneratedError, ArithmeticError) as exc:
        if "report" in partial:
            _emit(args, _render(args, partial["report"]))
        print(f"fusionmetric: computation error: {exc}", file=sys.stderr)
        return EXIT_COMPUTE
    _emit(args, _render(args, rep))
    if not args.quiet:
        for line in rep.summary_lines():
            print(line, file=sys.stderr)
    return EXIT_OK if rep.passed else EXIT_FAIL


def main(argv=None):
    sys.exit(run(argv))


if __name__ == "__main__":
    main()
