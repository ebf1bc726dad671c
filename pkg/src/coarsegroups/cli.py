"""Command-line front end: ``coarsegroups <verb> [options]``.

Reports go to stdout as JSON (sorted keys, ``schema_version`` embedded);
diagnostics go to stderr. Exit codes: 0 success, 2 bad literal, 3 domain
error, 4 theorem violation or audit finding.
"""

from __future__ import annotations

import argparse
import json
import random
import sys
from fractions import Fraction

from . import faults
from .cardinals import INFINITE, to_json
from .errors import DomainError, LiteralError, TheoremViolation

SCHEMA_VERSION = 1
DEFAULT_SEED = 20240917


def _jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, (set, frozenset)):
        return sorted((_jsonable(v) for v in obj), key=repr)
    if isinstance(obj, Fraction):
        return str(obj)
    if obj is None or isinstance(obj, (bool, int, float, str)):
        return obj
    if hasattr(obj, "item"):  # numpy scalar
        return obj.item()
    return to_json(obj) if not hasattr(obj, "as_dict") else _jsonable(obj.as_dict())


def _matrix(text: str) -> list:
    try:
        rows = json.loads(text)
    except json.JSONDecodeError:
        raise LiteralError(f"bad matrix {text!r}") from None
    if not isinstance(rows, list) or not all(isinstance(r, list) for r in rows):
        raise LiteralError(f"matrix must be a list of rows: {text!r}")
    return rows


def _radii(text: str) -> tuple:
    try:
        return tuple(int(r) for r in text.split(","))
    except ValueError:
        raise LiteralError(f"bad radii {text!r}") from None


# ---------------------------------------------------------------------------
# Verbs


def cmd_analyze_group(a):
    from .fgab import FgAbGroup, invariants

    G = FgAbGroup.parse(a.group)
    return {"group": str(G), "free_rank": G.free_rank, "torsion": list(G.torsion),
            "invariants": invariants(G).as_dict()}


def cmd_check_hom(a):
    from .coarse import _split_top, parse_ideal
    from .fgab import FgAbGroup, Hom
    from .morph import analyze_hom

    G, H = FgAbGroup.parse(a.source), FgAbGroup.parse(a.target)
    rows = _matrix(a.matrix)
    f = Hom.from_rows(G, H, rows) if H.dim else Hom.zero(G, H)
    parts = _split_top(a.ideals)
    if len(parts) != 2:
        raise LiteralError("--ideals needs two ideal literals separated by a comma")
    rep = analyze_hom(f, parse_ideal(parts[0], G), parse_ideal(parts[1], H))
    out = rep.as_dict()
    out["hom"] = str(f)
    out.update({k: out["flags"][k] for k in out["flags"]})
    return out


def cmd_classify(a):
    from .fgab import FgAbGroup
    from .morph import classify_fg

    G, H = (FgAbGroup.parse(t) for t in a.groups)
    return classify_fg(G, H).as_dict()


def cmd_qh_defect(a):
    from .quasihom import defect, parse_qhmap

    f = parse_qhmap(a.map, a.target_ideal)
    return defect(f, _radii(a.radii), seed=a.seed).as_dict()


def cmd_qh_section(a):
    from .quasihom import parse_qhmap, section_as_coarse_inverse

    f = parse_qhmap(a.map)
    return section_as_coarse_inverse(f, _radii(a.radii), seed=a.seed).as_dict()


def cmd_span_compose(a):
    from .cgcat import compose_spans, parse_span, rationalize

    s1, s2 = parse_span(a.first, not a.raw), parse_span(a.second, not a.raw)
    s = compose_spans(s1, s2)
    return {"composite": s.as_dict(), "rational": rationalize(s).tolist()}


def cmd_span_equal(a):
    from .cgcat import parse_span, spans_equivalent

    s1, s2 = parse_span(a.first, not a.raw), parse_span(a.second, not a.raw)
    return spans_equivalent(s1, s2, search_bound=a.bound).as_dict()


def cmd_ore(a):
    from .cgcat import ore_square
    from .fgab import FgAbGroup, Hom

    X, Y, Z = (FgAbGroup.parse(t) for t in (a.w_source, a.f_source, a.target))
    w = Hom.from_rows(X, Z, _matrix(a.w))
    f = Hom.from_rows(Y, Z, _matrix(a.f))
    return ore_square(w, f).as_dict()


def cmd_asdim_witness(a):
    from .geom import (Separation, check_cover, check_periodic_cover, make_periodic_witness)

    S = Separation.box(a.s) if a.S is None else Separation.of(json.loads(a.S))
    pc = make_periodic_witness(a.dim, S)
    out = {"periodic": pc.as_dict(), "periodic_check": check_periodic_cover(pc).as_dict()}
    if a.window is not None:
        w = pc.explicit(a.window)
        out["window"] = w.as_dict()
        out["window_check"] = check_cover(w).as_dict()
    return out


def cmd_smallset(a):
    from .geom import dlt_vs_small, parse_periodic_set, smallness_certificate

    A = parse_periodic_set(a.set)
    out = smallness_certificate(A)
    out["set"] = str(A)
    out["dlt_vs_small"] = dlt_vs_small(A).as_dict()
    return out


def cmd_audit(a):
    return run_audit(a.seed, a.samples)


# ---------------------------------------------------------------------------
# Audit: every module's randomized invariants under one seed


def _audit_coarse(rng, n):
    from .coarse import GroupIdeal, audit_ideal_axioms, parse_ideal
    from .randomgen import random_group

    checked = 0
    findings = []
    for i in range(n):
        G = random_group(rng, 2, 12)
        kind = rng.choice(["finitary", "bounded", "discrete", "linear(Tor)", "linear(2G)"])
        I = parse_ideal(kind, G) if kind != "finitary" else GroupIdeal.finitary(G)
        rep = audit_ideal_axioms(I, samples=20, seed=rng.randrange(2**32))
        checked += rep.checked
        if not rep.passed:
            findings.append({"ideal": str(I), "counterexample": rep.counterexample})
    return {"checked": checked}, findings


def _audit_morph(rng, n):
    from .coarse import GroupIdeal
    from .fgab import kernel_subgroup, image_subgroup, subgroup_index
    from .morph import analyze_hom, classify_fg, consistency_classif2
    from .randomgen import random_group, random_hom

    findings = []
    for i in range(n):
        G, H = random_group(rng, 3, 12), random_group(rng, 3, 12)
        f = random_hom(rng, G, H)
        rep = analyze_hom(f, GroupIdeal.finitary(G), GroupIdeal.finitary(H))
        expected = kernel_subgroup(f).is_finite and subgroup_index(image_subgroup(f)) != INFINITE
        if rep.flags["coarse_equivalence"] != expected:
            findings.append({"hom": str(f), "flags": rep.as_dict()["flags"]})
        c = classify_fg(G, H)
        if c.equivalent != (G.free_rank == H.free_rank):
            findings.append({"classify": [str(G), str(H)]})
        consistency_classif2(f, rng.choice(["r0", "ell"]))
    return {"homs": n, "classified_pairs": n}, findings


def _audit_quasihom(rng, n):
    from .quasihom import AffineFloor, compose_qh, perturb_and_check

    radii = (60, 120)
    held = 0
    for i in range(n):
        q = rng.randint(1, 6)
        f = AffineFloor(Fraction(rng.randint(-9, 9), q), Fraction(rng.randint(0, q - 1), q))
        g = AffineFloor(f.slopes, f.offset + rng.randint(-3, 3))
        v = perturb_and_check(f, g, radii, seed=rng.randrange(2**32))
        held += v.assertion == "HOLDS"
        outer = AffineFloor(Fraction(rng.randint(-5, 5), rng.randint(1, 4)))
        c = compose_qh(outer, f, radii, seed=rng.randrange(2**32))
        held += c.assertion == "HOLDS"
    return {"pairs": 2 * n, "assertions_held": held}, []


def _audit_cgcat(rng, n):
    from .cgcat import check_homotopical_axioms, compose_spans, hom_span, rationalize
    from .fgab import FgAbGroup
    from .randomgen import random_ce_hom, random_hom

    findings = []
    for i in range(n):
        r = rng.randint(1, 3)
        X, Y, Z = (FgAbGroup(r, rng.choice([(), (2,), (6,)])) for _ in range(3))
        f = random_hom(rng, X, Y, 3) if rng.random() < 0.5 else random_ce_hom(rng, X, Y)
        g = random_hom(rng, Y, Z, 3)
        lhs = rationalize(compose_spans(hom_span(f), hom_span(g)))
        rhs = rationalize(g) @ rationalize(f)
        if lhs.tolist() != rhs.tolist():
            findings.append({"functoriality": [str(f), str(g)], "lhs": lhs.tolist(), "rhs": rhs.tolist()})
    ax = check_homotopical_axioms(samples=n, seed=rng.randrange(2**32))
    findings.extend(ax["violations"])
    return {"functoriality": n, "cancellability": ax["cancellability"],
            "two_out_of_six": ax["two_out_of_six"]}, findings


def _audit_bigrank(rng, n):
    from .bigrank import analyze_structured, classif1_check, functoriality_audit, random_endo, BIG

    for _ in range(n):
        analyze_structured(random_endo(rng))
    classif1_check(BIG)
    fa = functoriality_audit(samples=n, seed=rng.randrange(2**32))
    return {"analyses": n, "functoriality": fa["checked"]}, fa["violations"]


def _audit_geom(rng, n):
    from .geom import PeriodicSet, Separation, check_periodic_cover, dlt_vs_small, make_periodic_witness

    findings = []
    for s in sorted(rng.sample(range(0, 101), 5)):
        for d in (1, 2):
            chk = check_periodic_cover(make_periodic_witness(d, Separation.box(s)))
            if not chk.ok:
                findings.append({"d": d, "s": s, "violation": chk.violation})
    for _ in range(n):
        m = rng.randint(1, 6)
        A = PeriodicSet.make(m, [r for r in range(m) if rng.random() < 0.4],
                             [rng.randint(-20, 20) for _ in range(rng.randint(0, 3))])
        if not dlt_vs_small(A).equal_here:
            findings.append({"set": str(A)})
    return {"witnesses": 10, "periodic_sets": n}, findings


_MODULES = (
    ("coarse", _audit_coarse),
    ("morph", _audit_morph),
    ("quasihom", _audit_quasihom),
    ("cgcat", _audit_cgcat),
    ("bigrank", _audit_bigrank),
    ("geom", _audit_geom),
)


def run_audit(seed: int, samples: int = 40) -> dict:
    summary, findings = {}, []
    for name, fn in _MODULES:
        rng = random.Random(f"{seed}:{name}")
        try:
            counts, found = fn(rng, samples)
        except TheoremViolation as e:
            counts, found = {}, [{"theorem_violation": str(e)}]
        summary[name] = {**counts, "findings": len(found)}
        findings.extend({"module": name, **f} for f in found)
    return {"seed": seed, "samples": samples, "modules": summary, "findings": findings,
            "passed": not findings}


# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=argparse.SUPPRESS, help="64-bit seed for every random choice")
    common.add_argument("--format", choices=("json", "text"), default=argparse.SUPPRESS)
    common.add_argument("--inject-fault", action="append", default=argparse.SUPPRESS, help=argparse.SUPPRESS)

    p = argparse.ArgumentParser(prog="coarsegroups", description=__doc__.splitlines()[0], parents=[common])
    sub = p.add_subparsers(dest="verb", required=True)

    def verb(name, fn, help):
        sp = sub.add_parser(name, help=help, parents=[common])
        sp.set_defaults(func=fn)
        return sp

    sp = verb("analyze-group", cmd_analyze_group, "normal form and invariants of a group")
    sp.add_argument("--group", required=True, help='e.g. "Z^2 + Z/4"')

    sp = verb("check-hom", cmd_check_hom, "large-scale flags of a homomorphism")
    sp.add_argument("--source", required=True)
    sp.add_argument("--target", required=True)
    sp.add_argument("--matrix", required=True, help="target-dim x source-dim integer matrix")
    sp.add_argument("--ideals", default="finitary,finitary", help="source,target ideal literals")

    sp = verb("classify", cmd_classify, "coarse equivalence of two groups (finitary ideals)")
    sp.add_argument("--groups", nargs=2, required=True, metavar="GROUP")

    sp = verb("qh-defect", cmd_qh_defect, "defect of a map on growing windows")
    sp.add_argument("--map", required=True)
    sp.add_argument("--radii", default="250,500,1000,2000")
    sp.add_argument("--target-ideal", default=None)

    sp = verb("qh-section", cmd_qh_section, "least-norm section as a coarse inverse")
    sp.add_argument("--map", required=True)
    sp.add_argument("--radii", default="250,500,1000")

    for name, fn, help in (("span-compose", cmd_span_compose, "compose two spans"),
                           ("span-equal", cmd_span_equal, "equivalence of two spans")):
        sp = verb(name, fn, help)
        sp.add_argument("--first", required=True)
        sp.add_argument("--second", required=True)
        sp.add_argument("--raw", action="store_true", help="keep torsion in the apex")
        if name == "span-equal":
            sp.add_argument("--bound", type=int, default=8, help="witness search bound")

    sp = verb("ore", cmd_ore, "complete a cospan w, f to a commuting square")
    sp.add_argument("--w-source", required=True)
    sp.add_argument("--f-source", required=True)
    sp.add_argument("--target", required=True)
    sp.add_argument("--w", required=True)
    sp.add_argument("--f", required=True)

    sp = verb("asdim-witness", cmd_asdim_witness, "cover witness for asdim Z^d <= d")
    sp.add_argument("--dim", type=int, required=True)
    sp.add_argument("--s", type=int, default=1, help="S = [-s, s]^d")
    sp.add_argument("--S", default=None, help="explicit symmetric S as a JSON list of points")
    sp.add_argument("--window", type=int, default=None, help="also check explicitly on [-W, W]^d")

    sp = verb("smallset", cmd_smallset, "large/small decision for an eventually periodic set")
    sp.add_argument("--set", required=True)

    sp = verb("audit", cmd_audit, "randomized invariants of every module")
    sp.add_argument("--samples", type=int, default=40)
    return p


def _text(obj, prefix="") -> list[str]:
    if isinstance(obj, dict):
        lines = []
        for k in sorted(obj):
            lines += _text(obj[k], f"{prefix}{k}.")
        return lines
    return [f"{prefix[:-1]}: {json.dumps(obj, sort_keys=True)}"]


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return 2 if e.code else 0
    args.seed = getattr(args, "seed", DEFAULT_SEED)
    fmt = getattr(args, "format", "json")
    faults.clear()
    try:
        for name in getattr(args, "inject_fault", []):
            if name not in faults.KNOWN:
                raise LiteralError(f"unknown fault {name!r}")
            faults.enable(name)
        result = _jsonable(args.func(args))
        code = 4 if args.verb == "audit" and not result["passed"] else 0
    except LiteralError as e:
        print(f"error: {e}", file=sys.stderr)
        return 2
    except TheoremViolation as e:
        print(f"theorem violation: {e}", file=sys.stderr)
        result, code = {"theorem_violation": str(e)}, 4
    except DomainError as e:
        print(f"error: {e}", file=sys.stderr)
        return 3
    finally:
        faults.clear()
    out = {"schema_version": SCHEMA_VERSION, "verb": args.verb, "seed": args.seed, "result": result}
    if fmt == "json":
        sys.stdout.write(json.dumps(out, sort_keys=True, indent=2) + "\n")
    else:
        sys.stdout.write("\n".join(_text(out)) + "\n")
    if code == 4:
        print("audit findings or theorem violation; see result", file=sys.stderr)
    return code


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
