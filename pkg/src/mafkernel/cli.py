"""Command-line front end: ``mafkernel kernelize|solve|verify|generate``.

Exit codes: 0 success (kernel produced, or decision yes, or forest valid),
1 certified no / invalid forest, 2 input error.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import logging
import sys
import time
from importlib import resources
from pathlib import Path

from .generate import random_instance, tight_family_A, tight_family_B
from .newick import NewickError, format_document, parse_document
from .reductions import _kernelize, compute_r, kernelize
from .solver import SolverLimitError, forest_violation, maf_cutset
from .tree import Partition, TreeError, TreeSet

log = logging.getLogger("mafkernel")

EXIT_OK = 0
EXIT_NO = 1
EXIT_INPUT = 2


class InputError(Exception):
    pass


def load_schema() -> dict:
    """The RunReport JSON schema shipped with the package."""
    text = resources.files("mafkernel").joinpath("schemas/run_report.schema.json").read_text("utf-8")
    return json.loads(text)


def _rooted_flag(args) -> bool | None:
    if args.rooted and args.unrooted:
        raise InputError("--rooted and --unrooted are mutually exclusive")
    if args.rooted:
        return True
    if args.unrooted:
        return False
    return None


def _read_input(path: str, rooted: bool | None) -> tuple[TreeSet, str]:
    try:
        data = Path(path).read_bytes()
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc.strerror}") from None
    digest = "sha256:" + hashlib.sha256(data).hexdigest()
    try:
        text = data.decode("utf-8")
    except UnicodeDecodeError:
        raise InputError(f"{path} is not UTF-8 text") from None
    try:
        trees = parse_document(text, rooted)
    except NewickError as exc:
        raise InputError(f"{path}: {exc}") from None
    if len(trees) < 2:
        raise InputError(f"{path}: need at least two trees, found {len(trees)}")
    return TreeSet(tuple(trees)), digest


def _dump(obj: dict) -> str:
    return json.dumps(obj, indent=2, sort_keys=True) + "\n"


def _emit(text: str, path: str | None) -> None:
    if path:
        Path(path).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)


def _elapsed(t0: float) -> float:
    return round((time.perf_counter() - t0) * 1000.0, 3)


# -- subcommands ---------------------------------------------------------------


def cmd_kernelize(args) -> int:
    t0 = time.perf_counter()
    ts, digest = _read_input(args.input, _rooted_flag(args))
    if args.k < 1:
        raise InputError("--k must be at least 1")
    if args.r_override is not None:
        if not args.unsafe:
            raise InputError("--r-override requires --unsafe")
        if args.r_override < 1:
            raise InputError("--r-override must be positive")
        log.warning("unsafe truncation length r=%d; the result may change the answer", args.r_override)
        kernel, rep = _kernelize(ts, args.k, args.r_override)
    else:
        kernel, rep = kernelize(ts, args.k)
    decision = {"yes": "yes", "no": "no", "kernel": "unknown"}[rep.verdict]
    if args.r_override is not None and decision == "no":
        # the bound only certifies answers for the safe truncation length
        decision = "unknown"
    report = {
        "command": "kernelize",
        "input_digest": digest,
        "t": ts.t,
        "n": ts.n,
        "rooted": ts.rooted,
        "k": args.k,
        "r": compute_r(ts.t, args.k),
        "bound": rep.bound,
        "n_after": rep.n_after,
        "rule_counts": {
            "subtree": rep.subtree_applications,
            "chain": rep.chain_applications,
            "taxa_removed_subtree": rep.taxa_removed_by_rule[0],
            "taxa_removed_chain": rep.taxa_removed_by_rule[1],
        },
        "decision": decision,
        "wall_time_ms": _elapsed(t0),
    }
    if args.r_override is not None:
        report["unsafe_r_override"] = args.r_override
    _emit(format_document(kernel.trees), args.out)
    if args.report:
        _emit(_dump(report), args.report)
    elif args.out:
        _emit(_dump(report), None)
    return EXIT_NO if decision == "no" else EXIT_OK


def cmd_solve(args) -> int:
    t0 = time.perf_counter()
    ts, digest = _read_input(args.input, _rooted_flag(args))
    kmax = ts.n if args.kmax is None else args.kmax
    if kmax < 1:
        raise InputError("--kmax must be at least 1")
    try:
        result = maf_cutset(ts, kmax, max_candidates=args.max_candidates)
    except SolverLimitError as exc:
        raise InputError(str(exc)) from None
    report = {
        "command": "solve",
        "input_digest": digest,
        "t": ts.t,
        "n": ts.n,
        "rooted": ts.rooted,
        "k": kmax,
        "r": None,
        "bound": None,
        "n_after": None,
        "rule_counts": None,
        "decision": "no" if result is None else "yes",
        "wall_time_ms": 0.0,
    }
    if result is not None:
        report["maf_size"] = result.maf_size
        report["witness"] = result.blocks()
    report["wall_time_ms"] = _elapsed(t0)
    text = _dump(report)
    if args.report:
        _emit(text, args.report)
    _emit(text, None)
    return EXIT_OK if result is not None else EXIT_NO


def read_forest(path: str) -> list[list[str]]:
    """Blocks from a JSON array of label arrays, or one block per line.

    In the line format labels are separated by commas and/or whitespace;
    blank lines and ``#`` lines are ignored.
    """
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc.strerror}") from None
    if text.lstrip().startswith("["):
        try:
            data = json.loads(text)
        except json.JSONDecodeError as exc:
            raise InputError(f"{path}: line {exc.lineno}, column {exc.colno}: {exc.msg}") from None
        if not isinstance(data, list) or not all(
            isinstance(b, list) and all(isinstance(x, str) for x in b) for b in data
        ):
            raise InputError(f"{path}: expected an array of arrays of labels")
        return data
    blocks = []
    for raw in text.splitlines():
        line = raw.strip()
        if line and not line.startswith("#"):
            blocks.append(line.replace(",", " ").split())
    return blocks


def cmd_verify(args) -> int:
    ts, _ = _read_input(args.input, _rooted_flag(args))
    blocks = read_forest(args.forest)
    seen: set[str] = set()
    for b in blocks:
        if not b:
            raise InputError("empty block in forest")
        for x in b:
            if x in seen:
                raise InputError(f"taxon {x!r} appears in more than one block")
            seen.add(x)
    if seen != set(ts.taxa):
        missing = sorted(ts.taxa - seen)
        extra = sorted(seen - ts.taxa)
        raise InputError(f"forest does not partition the taxa (missing {missing}, unknown {extra})")
    violation = forest_violation(ts, Partition.of(blocks))
    if violation is None:
        print("valid")
        return EXIT_OK
    kind, detail = violation
    print(f"invalid: {kind}: {detail}")
    return EXIT_NO


def cmd_generate(args) -> int:
    family = args.family
    if family == "A":
        if args.t is None:
            raise InputError("--family A needs --t")
        ts = tight_family_A(args.t, rooted=args.rooted).trees
    elif family == "B":
        if args.k is None:
            raise InputError("--family B needs --k")
        ts = tight_family_B(args.k, rooted=args.rooted).trees
    else:
        if args.n is None:
            raise InputError("--family random needs --n")
        ts = random_instance(args.n, 2 if args.t is None else args.t, args.rooted, args.seed)
    _emit(format_document(ts.trees), args.out)
    return EXIT_OK


# -- parser ----------------------------------------------------------------------


def _add_rootedness(p: argparse.ArgumentParser) -> None:
    p.add_argument("--rooted", action="store_true", help="trees are rooted")
    p.add_argument("--unrooted", action="store_true", help="trees are unrooted")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="mafkernel", description="Maximum agreement forest kernelization")
    parser.add_argument("-v", "--verbose", action="store_true", help="log reduction steps to stderr")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("kernelize", help="apply subtree and chain reductions to exhaustion")
    p.add_argument("input", help="Newick file, one tree per line")
    p.add_argument("--k", type=int, required=True, help="target agreement forest size")
    _add_rootedness(p)
    p.add_argument("--out", help="write the kernel here (default: stdout)")
    p.add_argument("--report", help="write the JSON run report here")
    p.add_argument("--unsafe", action="store_true", help=argparse.SUPPRESS)
    p.add_argument("--r-override", type=int, default=None, help=argparse.SUPPRESS)
    p.set_defaults(func=cmd_kernelize)

    p = sub.add_parser("solve", help="exact agreement forest search with witness")
    p.add_argument("input")
    p.add_argument("--kmax", type=int, default=None, help="largest forest size to look for (default: n)")
    p.add_argument("--max-candidates", type=int, default=10**7, help="refuse searches larger than this")
    _add_rootedness(p)
    p.add_argument("--report", help="also write the JSON run report here")
    p.set_defaults(func=cmd_solve)

    p = sub.add_parser("verify", help="check that a partition is an agreement forest")
    p.add_argument("input")
    p.add_argument("forest", help="JSON array of blocks, or one block per line")
    _add_rootedness(p)
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("generate", help="write a generated instance")
    p.add_argument("--family", choices=["A", "B", "random"], required=True)
    p.add_argument("--t", type=int, default=None, help="number of trees (A, random)")
    p.add_argument("--k", type=int, default=None, help="forest size parameter (B)")
    p.add_argument("--n", type=int, default=None, help="number of taxa (random)")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--rooted", action="store_true")
    p.add_argument("--out", help="output file (default: stdout)")
    p.set_defaults(func=cmd_generate)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING, format="%(levelname)s %(message)s")
    try:
        return args.func(args)
    except (InputError, TreeError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
