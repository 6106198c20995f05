"""Command line interface: ``almostflat {analyze,snf,abelianize,form,corpus-run}``.

Data goes to stdout, diagnostics to stderr. Exit status is 0 on success,
1 on parse/validation/analysis errors and 2 when a result contradicts the
``expected`` fragment of a descriptor.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from . import __version__
from .classify import analyze
from .corpus import (
    GroupEntry,
    check_expected,
    parse_document,
    run_corpus,
    shipped_corpus_dir,
    DocumentError,
)
from .crystal import DEFAULT_MAX_ORDER
from .errors import AlmostFlatError
from .forms import SymForm, classify, is_even, signature
from .grouppres import abelian_invariants, parse_presentation, relation_matrix
from .linalg import parse_matrix, smith_normal_form

EXIT_OK, EXIT_ERROR, EXIT_MISMATCH = 0, 1, 2


def _dump(obj) -> str:
    return json.dumps(obj, indent=2, sort_keys=False, ensure_ascii=False)


def _table(headers, rows) -> str:
    rows = [[str(c) for c in r] for r in rows]
    widths = [max([len(h)] + [len(r[i]) for r in rows]) for i, h in enumerate(headers)]
    line = lambda cells: " | ".join(c.ljust(w) for c, w in zip(cells, widths)).rstrip()
    out = [line(headers), "-+-".join("-" * w for w in widths)]
    out.extend(line(r) for r in rows)
    return "\n".join(out)


def _err(message):
    print(f"almostflat: {message}", file=sys.stderr)


def _form_text(form_json) -> str:
    kind = form_json["type"]
    if kind == "zero":
        return "0"
    if kind == "hyperbolic":
        return f"{form_json['n']}H"
    return f"other(rank={form_json['rank']}, sig={form_json['signature']}, {form_json['parity']})"


def _read_text(path) -> str:
    try:
        return Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise AlmostFlatError(f"{path}: cannot read file: {exc.strerror or exc}") from exc
    except UnicodeDecodeError as exc:
        raise AlmostFlatError(f"{path}: not valid UTF-8 at byte {exc.start}") from exc


def cmd_analyze(args) -> int:
    path = Path(args.path)
    text = _read_text(path)
    try:
        obj = json.loads(text)
    except json.JSONDecodeError as exc:
        raise DocumentError(path, exc.msg, exc.lineno, exc.colno) from exc
    docs = obj if isinstance(obj, list) else [obj]
    results, status = [], EXIT_OK
    for i, doc in enumerate(docs):
        where = path if len(docs) == 1 else f"{path}[{i}]"
        entry = parse_document(doc, where, args.max_group_order, frozenset({path.resolve()}))
        if isinstance(entry, GroupEntry):
            result = entry.summary(args.max_group_order)
        else:
            report = analyze(entry.descriptor, args.strict_spin, args.max_group_order)
            result = report.to_json()
            for w in report.warnings:
                _err(f"{where}: warning: {w}")
        for problem in check_expected(entry.expected, result):
            _err(f"{where}: expectation mismatch: {problem}")
            status = EXIT_MISMATCH
        results.append(result)

    if args.format == "json":
        print(_dump(results[0] if not isinstance(obj, list) else results))
    else:
        rows = []
        for r in results:
            if r.get("kind") == "group":
                rows.append([r["label"], r["b1"], "-", "-", r.get("h1", "-"), ",".join(r["routes"])])
            else:
                rows.append([r["label"], r["b1"], r["b2"], r["chi"], _form_text(r["form"]), r["route"]])
        print(_table(["label", "b1", "b2", "chi", "form", "route"], rows))
    return status


def cmd_snf(args) -> int:
    a = parse_matrix(_read_text(args.path))
    snf = smith_normal_form(a)
    if args.format == "json":
        print(_dump({"d": list(snf.d), "u": snf.u.to_rows(), "v": snf.v.to_rows(),
                     "shape": list(snf.original_shape)}))
    else:
        print("d: " + " ".join(str(x) for x in snf.d))
        print("u:")
        print(snf.u)
        print("v:")
        print(snf.v)
    return EXIT_OK


def cmd_abelianize(args) -> int:
    text = args.presentation
    if text.startswith("@"):
        text = _read_text(text[1:])
    p = parse_presentation(text)
    inv = abelian_invariants(p)
    if args.format == "json":
        out = inv.to_json()
        out["b1"] = inv.free_rank
        out["relation_matrix"] = relation_matrix(p).to_rows()
        print(_dump(out))
    else:
        print(inv)
    return EXIT_OK


def cmd_form(args) -> int:
    q = parse_matrix(_read_text(args.path))
    try:
        f = SymForm(q)
    except AlmostFlatError as exc:
        raise AlmostFlatError(f"{args.path}: {exc}") from exc
    if args.op == "classify":
        cls = classify(f)
        value, text = cls.to_json(), str(cls)
    elif args.op == "signature":
        value = signature(f)
        text = str(value)
    else:
        value = is_even(f)
        text = "true" if value else "false"
    if args.format == "json":
        print(_dump({"op": args.op, "result": value}))
    else:
        print(text)
    return EXIT_OK


def cmd_corpus_run(args) -> int:
    directory = Path(args.dir) if args.dir else shipped_corpus_dir()
    if not directory.is_dir():
        raise AlmostFlatError(f"{directory}: not a directory")
    rows = run_corpus(directory, args.parallel, args.strict_spin, args.max_group_order)
    if not rows:
        _err(f"warning: no *.json corpus entries in {directory}")
    counts = {s: sum(r["status"] == s for r in rows) for s in ("PASS", "FAIL", "ERROR")}
    for r in rows:
        for m in r.get("mismatches", []):
            _err(f"{r['file']}: {m}")
        if "error" in r:
            _err(r["error"])
    if args.format == "json":
        print(_dump({"entries": rows,
                     "summary": {"total": len(rows), "pass": counts["PASS"],
                                 "fail": counts["FAIL"], "error": counts["ERROR"]}}))
    else:
        table = []
        for r in rows:
            res = r.get("result", {})
            if r.get("kind") == "group":
                form = res.get("h1", "-")
                b2 = "-"
            else:
                form = _form_text(res["form"]) if "form" in res else "-"
                b2 = res.get("b2", "-")
            table.append([r["label"], res.get("b1", "-"), b2, form, r["status"]])
        print(_table(["label", "b1", "b2", "form", "status"], table))
        print(f"{len(rows)} entries: {counts['PASS']} pass, {counts['FAIL']} fail, {counts['ERROR']} error")
    if counts["ERROR"]:
        return EXIT_ERROR
    if counts["FAIL"]:
        return EXIT_MISMATCH
    return EXIT_OK


def _positive(value):
    n = int(value)
    if n < 1:
        raise argparse.ArgumentTypeError("must be a positive integer")
    return n


def _global_flags(parser, suppress):
    default = (lambda v: argparse.SUPPRESS) if suppress else (lambda v: v)
    parser.add_argument("--format", choices=["text", "json"], default=default("text"),
                        help="output format (default text)")
    parser.add_argument("--parallel", type=_positive, default=default(1), metavar="N",
                        help="worker processes for corpus-run (default 1)")
    parser.add_argument("--strict-spin", dest="strict_spin", action="store_true",
                        default=default(True),
                        help="non-spin descriptors with b1 != 1 are errors (default)")
    parser.add_argument("--no-strict-spin", dest="strict_spin", action="store_false",
                        default=default(True), help="downgrade the spin check to a warning")
    parser.add_argument("--max-group-order", type=_positive, default=default(DEFAULT_MAX_ORDER),
                        metavar="N", help=f"point group closure bound (default {DEFAULT_MAX_ORDER})")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="almostflat",
        description="Betti numbers and intersection forms of flat and almost-flat 4-manifolds.",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    _global_flags(parser, suppress=False)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("analyze", help="analyze a descriptor file")
    p.add_argument("path")
    p.set_defaults(func=cmd_analyze)

    p = sub.add_parser("snf", help="Smith normal form of a matrix file")
    p.add_argument("path")
    p.set_defaults(func=cmd_snf)

    p = sub.add_parser("abelianize", help="abelian invariants of a presentation")
    p.add_argument("presentation", help="presentation text, or @FILE")
    p.set_defaults(func=cmd_abelianize)

    p = sub.add_parser("form", help="invariants of a symmetric form matrix file")
    p.add_argument("path")
    p.add_argument("op", choices=["classify", "signature", "even"])
    p.set_defaults(func=cmd_form)

    p = sub.add_parser("corpus-run", help="verify every descriptor in a directory")
    p.add_argument("dir", nargs="?", help="corpus directory (default: shipped corpus)")
    p.set_defaults(func=cmd_corpus_run)

    for name, sp in sub.choices.items():
        _global_flags(sp, suppress=True)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except AlmostFlatError as exc:
        _err(str(exc))
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
