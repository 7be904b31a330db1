"""Command-line front end.

Every verb prints one JSON document on stdout (keys sorted, so equal inputs
give byte-identical output).  Exit status is 0 on success, 1 on a domain error
(the error class name goes to stderr) and 2 on a usage error.

Each document records the argv that produced it under ``"command"``;
``knaster --check FILE`` re-verifies the certificate in FILE and replays the
command, comparing the output byte for byte.
"""

from __future__ import annotations

import argparse
import json
import os
import random
import sys
from concurrent.futures import ProcessPoolExecutor
from fractions import Fraction
from pathlib import Path

from . import amalgam, fraisse, lingraph, plmaps, ramsey
from .errors import CertificateError, KnasterError

RAMSEY_CAP_ENV = "KNASTER_RAMSEY_CAP"


class UsageError(Exception):
    pass


# --- argument parsing helpers ------------------------------------------------------


def _read_arg(text: str) -> str:
    if text.startswith("@"):
        return Path(text[1:]).read_text().strip()
    return text


def values_arg(text: str) -> tuple[int, ...]:
    """``0,1,0``, a JSON list, or ``@path`` holding either."""
    raw = _read_arg(text)
    try:
        if raw.startswith("["):
            return tuple(int(v) for v in json.loads(raw))
        return tuple(int(v) for v in raw.split(",") if v.strip())
    except (ValueError, TypeError) as exc:
        raise argparse.ArgumentTypeError(f"bad value string {text!r}") from exc


def ints_arg(text: str) -> tuple[int, ...]:
    return values_arg(text)


def rational_arg(text: str) -> Fraction:
    try:
        return Fraction(text)
    except (ValueError, ZeroDivisionError) as exc:
        raise argparse.ArgumentTypeError(f"bad rational {text!r}") from exc


def object_arg(text: str) -> fraisse.AnnotatedObject:
    """``n`` or ``n:weight`` with a rational weight."""
    n, _, w = text.partition(":")
    try:
        return fraisse.AnnotatedObject(int(n), Fraction(w) if w else Fraction(1))
    except (ValueError, ZeroDivisionError, KnasterError) as exc:
        raise argparse.ArgumentTypeError(f"bad object {text!r}") from exc


def json_arg(text: str):
    raw = _read_arg(text) if text.startswith("@") else Path(text).read_text()
    return json.loads(raw)


def _morphism(values, cod) -> lingraph.Morphism:
    return lingraph.validate(len(values), cod, values)


def _ramsey_cap(args) -> int:
    if args.cap is not None:
        return args.cap
    env = os.environ.get(RAMSEY_CAP_ENV)
    if env:
        try:
            return int(env)
        except ValueError as exc:
            raise UsageError(f"{RAMSEY_CAP_ENV} must be an integer") from exc
    return ramsey.DEFAULT_CAP


def _frac(x) -> list[int]:
    return [int(x.numerator), int(x.denominator)]


def _result(value):
    if isinstance(value, (ramsey.Unknown, ramsey.Vacuous, fraisse.AnnotatedObject)):
        return value.to_dict()
    return value


# --- verbs ---------------------------------------------------------------------------


def cmd_validate(args):
    f = _morphism(args.values, args.cod)
    return {
        "morphism": f.to_dict(),
        "degree": f.degree,
        "turning_indices": list(f.fold.turning_indices),
    }


def cmd_compose(args):
    f, g = _morphism(args.f, args.f_cod), _morphism(args.g, args.g_cod)
    h = lingraph.compose(f, g)
    return {"composite": h.to_dict(), "degree": h.degree, "degree_product": f.degree * g.degree}


def cmd_enumerate(args):
    count = lingraph.count_epi(args.dom, args.cod, args.degree)
    out = {"dom": args.dom, "cod": args.cod, "degree": args.degree, "count": count}
    if not args.count_only:
        out["morphisms"] = [list(f.values) for f in lingraph.iter_epi(args.dom, args.cod, args.degree)]
    return out


def cmd_amalgamate(args):
    f, g = _morphism(args.f, args.f_cod), _morphism(args.g, args.g_cod)
    fp, gp, plan = amalgam.amalgamate(f, g)
    return {
        "f": f.to_dict(),
        "g": g.to_dict(),
        "f_prime": fp.to_dict(),
        "g_prime": gp.to_dict(),
        "common": list(lingraph.compose(f, fp).values),
        "plan": plan.to_dict(),
    }


def cmd_joint_project(args):
    c, pa, pb = amalgam.joint_project(args.a, args.b)
    return {"C": c, "to_A": pa.to_dict(), "to_B": pb.to_dict()}


def _tower_doc(text: str) -> dict:
    # a bare tower, or any emitted document carrying one
    doc = json_arg(text)
    if "objects" not in doc:
        doc = doc.get("result", {}).get("tower", doc)
    if "objects" not in doc:
        raise UsageError(f"{text} holds no tower")
    return doc


def _load_tower(args) -> fraisse.GenericSequence:
    if getattr(args, "tower", None):
        return fraisse.GenericSequence.from_dict(_tower_doc(args.tower))
    return fraisse.build_generic(args.category, args.budget, args.seed, args.max_size)


def cmd_generic_build(args):
    seq = fraisse.build_generic(args.category, args.budget, args.seed, args.max_size, strict=args.strict)
    return {"tower": seq.to_dict(), "sizes": [o.n for o in seq.objects]}


def cmd_generic_verify(args):
    seq = fraisse.GenericSequence.from_dict(_tower_doc(args.tower), check=False)
    report = seq.verify()
    out = {"checks": report, "ok": all(report.values()), "levels": len(seq)}
    if not out["ok"]:
        raise CertificateError(", ".join(k for k, v in report.items() if not v))
    return out


def cmd_separate(args):
    seq = _load_tower(args)
    before = len(seq)
    fraisse.separation_extension(seq, args.level, args.x, args.y)
    top = len(seq)
    return {
        "level": args.level,
        "x": args.x,
        "y": args.y,
        "answer_level": seq.certificates[-1].answer_level,
        "extended": top > before,
        "fiber_distance": fraisse.fiber_distance(seq, args.level, args.x, args.y, seq.certificates[-1].answer_level),
        "tower": seq.to_dict(),
    }


def cmd_realize_degree(args):
    seq = _load_tower(args)
    a = fraisse.realize_degree(seq, args.p, args.q, args.max_levels)
    deg = fraisse.approx_degree(a, seq)
    return {"approx": a.to_dict(), "degree": _frac(deg), "tower": seq.to_dict()}


def cmd_ramsey_number(args):
    return {"k": args.k, "m": args.m, "d": args.d, "R": _result(ramsey.ramsey_number(args.k, args.m, args.d, _ramsey_cap(args)))}


def cmd_ramsey_witness(args):
    w = ramsey.witness(args.A, args.B, args.d, _ramsey_cap(args))
    return {"A": args.A.to_dict(), "B": args.B.to_dict(), "d": args.d, "C": _result(w)}


def _mono_one(task):
    A, B, C, d, seed, coloring = task
    domain = ramsey.epi_star(C, A)
    c = ramsey.Coloring.from_dict(coloring) if coloring else ramsey.Coloring.random(domain, d, random.Random(seed))
    g = ramsey.find_monochromatic(C, B, A, c)
    colors = {c(lingraph.compose(h, g)) for h in ramsey.epi_star(B, A)}
    return {
        "seed": None if coloring else seed,
        "coloring_hash": c.digest(),
        "g": g.to_dict(),
        "color": colors.pop() if colors else None,
    }


def cmd_mono_search(args):
    C = args.C
    if C is None:
        C = ramsey.witness(args.A, args.B, args.d, _ramsey_cap(args))
        if not isinstance(C, fraisse.AnnotatedObject):
            return {"A": args.A.to_dict(), "B": args.B.to_dict(), "d": args.d, "C": _result(C), "witnesses": []}
    coloring = json_arg(args.coloring) if args.coloring else None
    if coloring is not None:
        tasks = [(args.A, args.B, C, args.d, None, coloring)]
    else:
        tasks = [(args.A, args.B, C, args.d, args.seed + i, None) for i in range(args.samples)]
    if args.jobs > 1 and len(tasks) > 1:
        with ProcessPoolExecutor(max_workers=args.jobs) as pool:
            found = list(pool.map(_mono_one, tasks, chunksize=max(1, len(tasks) // (4 * args.jobs))))
    else:
        found = [_mono_one(t) for t in tasks]
    return {"A": args.A.to_dict(), "B": args.B.to_dict(), "C": C.to_dict(), "d": args.d, "witnesses": found}


def cmd_degree_color(args):
    f = _morphism(args.values, args.cod)
    return {"degree": f.degree, "rho": ramsey.rho(f.degree), "n": args.n, "color": ramsey.degree_coloring(f, args.n)}


def cmd_infinite_degree(args):
    return ramsey.infinite_degree_check(args.n, args.C, args.samples, args.seed)


def cmd_tent(args):
    return plmaps.tent(args.d).to_dict()


def cmd_lift(args):
    f = _morphism(args.values, args.cod)
    return {"morphism": f.to_dict(), "lift": plmaps.lift(f).to_dict()}


def cmd_commute(args):
    cd = plmaps.pl_compose(plmaps.tent(args.c), plmaps.tent(args.d))
    dc = plmaps.pl_compose(plmaps.tent(args.d), plmaps.tent(args.c))
    return {
        "c": args.c,
        "d": args.d,
        "commute": cd == dc,
        "equals_tent_cd": cd == plmaps.tent(args.c * args.d),
        "composite": cd.to_dict(),
    }


def _tower(args) -> plmaps.ChainTower:
    if args.levels < 1:
        raise UsageError("--levels must be at least 1")
    degrees = args.degrees
    if len(degrees) == 1 and args.levels > 2:
        degrees = degrees * (args.levels - 1)
    return plmaps.chain_tower(degrees, args.levels, args.p0, args.overlap, args.margin)


def cmd_chain_tower(args):
    tower = _tower(args)
    out = {"summary": tower.summary()}
    if not args.no_report:
        report = plmaps.tower_report(tower)
        out["checks"] = report
        out["ok"] = all(report.values())
    if args.full:
        out["chains"] = [c.to_dict() for c in tower.chains]
    return out


def cmd_discretize(args):
    tower = _tower(args)
    maps = []
    for n, T in enumerate(tower.maps):
        g = plmaps.discretize(T, tower.chains[n + 1], tower.chains[n])
        maps.append({"level": n, "tent_degree": T.degree, "morphism": g.to_dict(), "degree": g.degree})
    return {"summary": tower.summary(), "maps": maps}


# --- certificate replay ---------------------------------------------------------------


def _verify_document(doc: dict) -> list[str]:
    """Semantic checks on an emitted document; returns the failures."""
    verb = doc.get("verb")
    res = doc.get("result", {})
    bad = []
    if verb == "amalgamate":
        f, g = lingraph.Morphism.from_dict(res["f"]), lingraph.Morphism.from_dict(res["g"])
        fp, gp = lingraph.Morphism.from_dict(res["f_prime"]), lingraph.Morphism.from_dict(res["g_prime"])
        if lingraph.compose(f, fp) != lingraph.compose(g, gp):
            bad.append("f o f' != g o g'")
    elif verb in ("generic-build", "separate", "realize-degree"):
        seq = fraisse.GenericSequence.from_dict(res["tower"], check=False)
        bad += [k for k, ok in seq.verify().items() if not ok]
        if verb == "separate" and res["fiber_distance"] <= 2:
            bad.append("fibers not separated")
        if verb == "realize-degree":
            a = fraisse.AutomorphismApprox(res["approx"]["i_1"], lingraph.Morphism.from_dict(res["approx"]["g_1"]))
            if _frac(fraisse.approx_degree(a, seq)) != res["degree"]:
                bad.append("degree")
    elif verb == "mono-search":
        A = fraisse.AnnotatedObject.from_dict(res["A"])
        B = fraisse.AnnotatedObject.from_dict(res["B"])
        for w in res["witnesses"]:
            g = lingraph.Morphism.from_dict(w["g"])
            if w["seed"] is not None:
                C = fraisse.AnnotatedObject.from_dict(res["C"])
                c = ramsey.Coloring.random(ramsey.epi_star(C, A), res["d"], random.Random(w["seed"]))
                if c.digest() != w["coloring_hash"]:
                    bad.append(f"coloring hash for seed {w['seed']}")
                    continue
                colors = {c(lingraph.compose(h, g)) for h in ramsey.epi_star(B, A)}
                if colors and colors != {w["color"]}:
                    bad.append(f"witness for seed {w['seed']} is not monochromatic")
    elif verb == "chain-tower" and "ok" in res and not res["ok"]:
        bad.append("tower checks")
    return bad


def check_file(path: str) -> int:
    doc = json.loads(Path(path).read_text())
    bad = _verify_document(doc)
    argv = doc.get("command")
    replay_ok = None
    if argv:
        code, out, _ = _run(argv)
        replay_ok = code == 0 and out == Path(path).read_text()
        if not replay_ok:
            bad.append("replay output differs")
    _emit({"check": path, "verb": doc.get("verb"), "ok": not bad, "failures": bad, "replayed": replay_ok})
    if bad:
        print("CertificateError", file=sys.stderr)
        return 1
    return 0


# --- parser --------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=0, help="seed for randomized searches (default 0)")
    common.add_argument("--jobs", type=int, default=1, help="worker processes (default 1)")

    p = argparse.ArgumentParser(prog="knaster", description="Pointed linear graphs, amalgamation, Ramsey and PL-map tools.")
    p.add_argument("--check", metavar="FILE", help="re-verify and replay an emitted document")
    sub = p.add_subparsers(dest="verb", metavar="VERB")

    def verb(name, fn, help_text):
        sp = sub.add_parser(name, parents=[common], help=help_text)
        sp.set_defaults(fn=fn)
        return sp

    sp = verb("validate", cmd_validate, "validate a value string")
    sp.add_argument("--values", type=values_arg, required=True)
    sp.add_argument("--cod", type=int, required=True)

    for name, fn, text in (("compose", cmd_compose, "composite f o g"), ("amalgamate", cmd_amalgamate, "amalgamate f and g")):
        sp = verb(name, fn, text)
        sp.add_argument("--f", type=values_arg, required=True)
        sp.add_argument("--f-cod", type=int, required=True)
        sp.add_argument("--g", type=values_arg, required=True)
        sp.add_argument("--g-cod", type=int, required=True)

    sp = verb("enumerate", cmd_enumerate, "list Epi(dom, cod)")
    sp.add_argument("--dom", type=int, required=True)
    sp.add_argument("--cod", type=int, required=True)
    sp.add_argument("--degree", type=int)
    sp.add_argument("--count-only", action="store_true")

    sp = verb("joint-project", cmd_joint_project, "common object projecting onto A and B")
    sp.add_argument("-a", type=int, required=True)
    sp.add_argument("-b", type=int, required=True)

    def tower_args(sp, resumable=True):
        sp.add_argument("--category", choices=fraisse.CATEGORIES, default="K")
        sp.add_argument("--budget", type=int, default=4)
        sp.add_argument("--max-size", type=int)
        if resumable:
            sp.add_argument("--tower", help="resume from a serialized tower (path or @path)")

    sp = verb("generic-build", cmd_generic_build, "grow a generic tower")
    tower_args(sp, resumable=False)
    sp.add_argument("--strict", action="store_true", help="fail if requests remain unanswered")

    sp = verb("generic-verify", cmd_generic_verify, "re-check a serialized tower")
    sp.add_argument("tower")

    sp = verb("separate", cmd_separate, "separate the fibers of two vertices")
    tower_args(sp)
    sp.add_argument("--level", type=int, default=1)
    sp.add_argument("-x", type=int, required=True)
    sp.add_argument("-y", type=int, required=True)

    sp = verb("realize-degree", cmd_realize_degree, "stage data of an automorphism of degree p/q")
    tower_args(sp)
    sp.add_argument("-p", type=int, required=True)
    sp.add_argument("-q", type=int, required=True)
    sp.add_argument("--max-levels", type=int)

    sp = verb("ramsey-number", cmd_ramsey_number, "R(k, m; d) by exhaustive search")
    sp.add_argument("-k", type=int, required=True)
    sp.add_argument("-m", type=int, required=True)
    sp.add_argument("-d", type=int, required=True)
    sp.add_argument("--cap", type=int, help=f"largest n tried (default ${RAMSEY_CAP_ENV} or {ramsey.DEFAULT_CAP})")

    sp = verb("ramsey-witness", cmd_ramsey_witness, "witness object C for A, B, d")
    sp.add_argument("--A", type=object_arg, required=True, help="n or n:weight")
    sp.add_argument("--B", type=object_arg, required=True)
    sp.add_argument("-d", type=int, required=True)
    sp.add_argument("--cap", type=int)

    sp = verb("mono-search", cmd_mono_search, "monochromatic g for seeded or given colorings")
    sp.add_argument("--A", type=object_arg, required=True)
    sp.add_argument("--B", type=object_arg, required=True)
    sp.add_argument("--C", type=object_arg, help="defaults to the Ramsey witness")
    sp.add_argument("-d", type=int, required=True)
    sp.add_argument("--coloring", help="coloring document (path or @path)")
    sp.add_argument("--samples", type=int, default=1, help="random colorings, seeds seed..seed+samples-1")
    sp.add_argument("--cap", type=int)

    sp = verb("degree-color", cmd_degree_color, "rho(deg f) mod n")
    sp.add_argument("--values", type=values_arg, required=True)
    sp.add_argument("--cod", type=int, required=True)
    sp.add_argument("-n", type=int, required=True)

    sp = verb("infinite-degree", cmd_infinite_degree, "all n colors on Epi(B, A) o f")
    sp.add_argument("-n", type=int, required=True)
    sp.add_argument("--C", type=int, required=True)
    sp.add_argument("--samples", type=int, default=50)

    sp = verb("tent", cmd_tent, "breakpoints of the degree-d tent map")
    sp.add_argument("-d", type=int, required=True)

    sp = verb("lift", cmd_lift, "PL lift of a morphism")
    sp.add_argument("--values", type=values_arg, required=True)
    sp.add_argument("--cod", type=int, required=True)

    sp = verb("commute", cmd_commute, "do tent(c) and tent(d) commute")
    sp.add_argument("-c", type=int, required=True)
    sp.add_argument("-d", type=int, required=True)

    for name, fn, text in (
        ("chain-tower", cmd_chain_tower, "build and validate a chain tower"),
        ("discretize", cmd_discretize, "bonding morphisms of a chain tower"),
    ):
        sp = verb(name, fn, text)
        sp.add_argument("--degrees", type=ints_arg, required=True, help="tent degrees, one per bond")
        sp.add_argument("--levels", type=int, required=True)
        sp.add_argument("--p0", type=int, default=2)
        sp.add_argument("--overlap", type=rational_arg, default=Fraction(1, 5))
        sp.add_argument("--margin", type=rational_arg, default=Fraction(1))
        if name == "chain-tower":
            sp.add_argument("--no-report", action="store_true")
            sp.add_argument("--full", action="store_true", help="also emit every link")
    return p


def _emit(obj) -> str:
    text = json.dumps(obj, sort_keys=True) + "\n"
    sys.stdout.write(text)
    return text


def _run(argv: list[str]) -> tuple[int, str, str]:
    """Run a verb and capture (code, stdout, stderr) without touching the real streams."""
    import contextlib
    import io

    out, err = io.StringIO(), io.StringIO()
    with contextlib.redirect_stdout(out), contextlib.redirect_stderr(err):
        try:
            code = main(argv)
        except SystemExit as exc:
            code = exc.code if isinstance(exc.code, int) else 2
    return code, out.getvalue(), err.getvalue()


def main(argv: list[str] | None = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.check:
        if args.verb:
            parser.error("--check takes no verb")
        try:
            return check_file(args.check)
        except (OSError, ValueError, KeyError) as exc:
            print(f"usage error: {exc}", file=sys.stderr)
            return 2
        except KnasterError as exc:
            print(f"{type(exc).__name__}: {exc}", file=sys.stderr)
            return 1
    if not args.verb:
        parser.print_usage(sys.stderr)
        return 2
    if args.jobs < 1:
        parser.error("--jobs must be positive")
    try:
        result = args.fn(args)
    except KnasterError as exc:
        print(f"{type(exc).__name__}: {exc}", file=sys.stderr)
        return 1
    except (UsageError, OSError, json.JSONDecodeError) as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return 2
    _emit({"verb": args.verb, "command": argv, "result": result})
    return 0


if __name__ == "__main__":
    sys.exit(main())
