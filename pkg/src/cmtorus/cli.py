"""Command-line interface.

Exit codes: 0 success, 2 parse or usage error, 3 out of scope,
4 disagreement or failed verification, 5 non-CM field, 6 search exhausted.
"""

from __future__ import annotations

import argparse
import sys
import time
from collections import Counter
from typing import Sequence

from .errors import CmToriError, EvenVariables, NotQuadratic, PreconditionUnmet, SearchExhausted
from .families import DEFAULT_BOUND, FamilySpec, certify, generate_family
from .fields import parse_field
from .globaldec import decide_A, decide_A_circ
from .groups import FiniteAbelianGroup
from .local import (
    LocalExtensionDescriptor,
    classify_R,
    classify_R_circ,
    decide_R_circ,
    decide_R_oracle,
    sweep_descriptors,
)
from .shimura import LevelType, ShimuraLevelDescriptor, decide_T
from .verdict import Status

EXIT_OK = 0
EXIT_PARSE = 2
EXIT_SCOPE = 3
EXIT_DISAGREE = 4
EXIT_NOT_CM = 5
EXIT_EXHAUSTED = 6


class ParseError(Exception):
    pass


def _ints(text: str) -> list[int]:
    try:
        return [int(x) for x in text.split(",") if x.strip()]
    except ValueError as exc:
        raise ParseError(f"expected comma-separated integers, got {text!r}") from exc


def _elements(text: str) -> list[list[int]]:
    return [_ints(part) for part in text.split(";") if part.strip()]


def parse_local(args) -> LocalExtensionDescriptor:
    try:
        G = FiniteAbelianGroup(_ints(args.group))
    except ValueError as exc:
        raise ParseError(str(exc)) from exc
    k = G.rank

    def check(vs):
        for v in vs:
            if len(v) != k:
                raise ParseError(f"element {v} does not have {k} coordinates")
        return vs

    hp_text = args.hplus.strip().lower()
    h_plus = None if hp_text in ("split", "none") else G.subgroup(check(_elements(args.hplus)))
    inertia_text = args.inertia.strip().lower()
    if inertia_text in ("trivial", "0", ""):
        inertia = G.trivial()
    elif inertia_text == "full" or inertia_text.endswith("-full"):
        if inertia_text != "full" and int(inertia_text.split("-")[0]) != G.order:
            raise ParseError(f"{args.inertia} does not match a group of order {G.order}")
        inertia = G.whole()
    else:
        inertia = G.subgroup(check(_elements(args.inertia)))
    sigma = check([_ints(args.sigma)])[0]
    try:
        return LocalExtensionDescriptor(G, h_plus, inertia, tuple(sigma), args.r, args.p)
    except CmToriError as exc:
        raise ParseError(str(exc)) from exc


def _status_exit(status: Status) -> int:
    return EXIT_SCOPE if status is Status.OUT_OF_SCOPE else EXIT_OK


def cmd_decide_local(args) -> int:
    desc = parse_local(args)
    print(f"descriptor: {desc.describe()}")
    oracle_fn, classify_fn = (decide_R_oracle, classify_R) if args.question == "R" else (decide_R_circ, classify_R_circ)
    verdicts = []
    if args.mode in ("oracle", "both"):
        verdicts.append(("oracle", oracle_fn(desc)))
    if args.mode in ("classify", "both"):
        try:
            verdicts.append(("classifier", classify_fn(desc)))
        except PreconditionUnmet as exc:
            print(f"classifier: not applicable ({exc})")
        except CmToriError as exc:
            print(f"classifier: out of scope ({exc})")
            if args.mode == "classify":
                return EXIT_SCOPE
    for name, v in verdicts:
        if len(verdicts) > 1:
            print(f"route: {name}")
        print(v.record())
    if len({v.status for _, v in verdicts}) > 1:
        print("agreement: no")
        return EXIT_DISAGREE
    if len(verdicts) > 1:
        print("agreement: yes")
    if not verdicts:
        return EXIT_SCOPE
    return _status_exit(verdicts[0][1].status)


def _field(text: str):
    try:
        return parse_field(text)
    except (ValueError, CmToriError) as exc:
        raise ParseError(str(exc)) from exc


def cmd_decide_global(args) -> int:
    L = _field(args.field)
    print(f"field: {L.text()}")
    v = decide_A(L, args.p) if args.question == "A" else decide_A_circ(L, args.p)
    print(v.record())
    return _status_exit(v.status)


def cmd_decide_shimura(args) -> int:
    L = _field(args.field)
    if args.n < 1 or args.n % 2 == 0:
        print(f"error: n must be odd, got {args.n}", file=sys.stderr)
        return EXIT_PARSE
    desc = ShimuraLevelDescriptor(L, args.p, args.n, LevelType.parse(args.level))
    print(f"field: {L.text()}")
    v = decide_T(desc)
    print(v.record())
    return _status_exit(v.status.status)


def cmd_generate(args) -> int:
    try:
        spec = FamilySpec(args.p, args.degree, args.variant, args.count, args.bound)
    except CmToriError as exc:
        raise ParseError(str(exc)) from exc
    code = EXIT_OK
    try:
        members = generate_family(spec)
    except SearchExhausted as exc:
        print(f"search exhausted: {exc}", file=sys.stderr)
        members = exc.partial
        code = EXIT_EXHAUSTED
    lines = [m.line() for m in members]
    if args.out:
        with open(args.out, "w", encoding="utf-8", newline="\n") as fh:
            fh.writelines(line + "\n" for line in lines)
        print(f"wrote {len(lines)} fields to {args.out}")
    else:
        for line in lines:
            print(line)
    return code


def cmd_sweep(args) -> int:
    if args.p == "odd":
        runs = [("cyclic", 3)]
    elif args.p == "2":
        runs = [("cyclic", 2), ("two_adic", 2)]
    else:
        raise ParseError("--p must be 2 or odd")
    total = disagreements = 0
    patterns: Counter = Counter()
    start = time.perf_counter()
    for shape, char in runs:
        for desc in sweep_descriptors(args.max_order, shape, char, args.r):
            total += 1
            a, b = decide_R_oracle(desc), classify_R(desc)
            if a.status is not b.status:
                disagreements += 1
                print(f"disagreement: {desc.describe()} oracle={a.status} classifier={b.status}")
            if b.negative:
                patterns[b.witness["pattern"]] += 1
    print(f"descriptors: {total}")
    print(f"negative: {sum(patterns.values())}")
    for name in sorted(patterns):
        print(f"pattern {name}: {patterns[name]}")
    print(f"disagreements: {disagreements}")
    print(f"seconds: {time.perf_counter() - start:.1f}")
    return EXIT_DISAGREE if disagreements else EXIT_OK


def _parse_member_line(line: str):
    parts = [x.strip() for x in line.split("|")]
    if len(parts) != 3:
        raise ParseError(f"malformed family line: {line!r}")
    L = _field(parts[0])
    kv = dict(tok.split("=", 1) for tok in parts[1].split() if "=" in tok)
    try:
        return L, int(kv["p"]), int(kv["ell0"]), parts[2]
    except (KeyError, ValueError) as exc:
        raise ParseError(f"missing p or ell0 in {line!r}") from exc


def cmd_verify(args) -> int:
    try:
        with open(args.inp, encoding="utf-8") as fh:
            lines = [ln.rstrip("\n") for ln in fh if ln.strip()]
    except OSError as exc:
        raise ParseError(str(exc)) from exc
    failures = 0
    for line in lines:
        L, p, ell0, stored = _parse_member_line(line)
        try:
            rep = certify(L, p, ell0)
            ok = rep.holds and rep.text() == stored
        except CmToriError:
            ok = False
        if not ok:
            failures += 1
        print(f"{L.text()} ell0={ell0}: {'ok' if ok else 'FAILED'}")
    print(f"verified {len(lines) - failures} of {len(lines)}")
    return EXIT_DISAGREE if failures else EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="cmtorus", description=__doc__.splitlines()[0])
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("decide-local", help="decide (R) or (R-circ) for a local descriptor")
    p.add_argument("--group", required=True, help="invariant factors d1,d2,... with d1 | d2 | ...")
    p.add_argument("--hplus", required=True, help="generator of Gal(F/F+) as g1,g2,...; or 'split'")
    p.add_argument("--inertia", required=True, help="generators g;g;...; or 'full', 'N-full', 'trivial'")
    p.add_argument("--sigma", required=True, help="Frobenius lift g1,g2,...")
    p.add_argument("--p", type=int, required=True, help="residue characteristic")
    p.add_argument("--r", type=int, default=1, help="number of factors")
    p.add_argument("--question", choices=["R", "Rcirc"], default="R")
    mode = p.add_mutually_exclusive_group()
    mode.add_argument("--oracle", dest="mode", action="store_const", const="oracle")
    mode.add_argument("--classify", dest="mode", action="store_const", const="classify")
    mode.add_argument("--both", dest="mode", action="store_const", const="both")
    p.set_defaults(mode="oracle", func=cmd_decide_local)

    p = sub.add_parser("decide-global", help="decide (A) or (A-circ) for an abelian CM field")
    p.add_argument("--field", required=True, help="'m=<int> H=[g1,...]' or 'm=<int>;H=g1,...'")
    p.add_argument("--p", type=int, required=True)
    p.add_argument("--question", choices=["A", "Acirc"], default="A")
    p.set_defaults(func=cmd_decide_global)

    p = sub.add_parser("decide-shimura", help="decide transitivity for a unitary Shimura level")
    p.add_argument("--field", required=True)
    p.add_argument("--p", type=int, required=True)
    p.add_argument("--level", required=True, help="bt or parahoric")
    p.add_argument("--n", type=int, default=1, help="odd rank of the hermitian space")
    p.set_defaults(func=cmd_decide_shimura)

    p = sub.add_parser("generate", help="search for certified counterexample fields")
    p.add_argument("--p", type=int, required=True)
    p.add_argument("--degree", type=int, required=True)
    p.add_argument("--variant", required=True, help="odd-main, odd-unramified, two-adic-unramified, two-adic-ramified")
    p.add_argument("--count", type=int, default=1)
    p.add_argument("--bound", type=int, default=DEFAULT_BOUND)
    p.add_argument("--out")
    p.set_defaults(func=cmd_generate)

    p = sub.add_parser("sweep", help="compare classifier and oracle for (R) on all small descriptors")
    p.add_argument("--max-order", type=int, default=64)
    p.add_argument("--p", default="odd", help="2 or odd")
    p.add_argument("--r", type=int, default=1)
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("verify", help="re-check stored family certificates")
    p.add_argument("--in", dest="inp", required=True)
    p.set_defaults(func=cmd_verify)
    return ap


def main(argv: Sequence[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except ParseError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    except EvenVariables as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    except NotQuadratic as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_NOT_CM


if __name__ == "__main__":
    sys.exit(main())
