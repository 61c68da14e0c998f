"""Command-line interface.

Exit codes: 0 success, 1 a comparison or verification failed, 2 an operator
word was undefined, 3 the configuration was invalid.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import os
import sys
from concurrent.futures import ThreadPoolExecutor
from typing import Callable, Dict, List, Optional, Sequence

from . import graph
from .bosonic import ShellBoundExceeded, theorem_main_character
from .operators import (
    INITIAL,
    Undefined,
    apply_word,
    parse_word,
    simple,
    to_character,
    word_on_vinf,
)
from .paths import InvalidConfig, oracle_vector
from .series import (
    SeriesError,
    TruncatedSeries,
    TruncationPolicy,
    format_series,
    substitute_z,
    QZSeries,
)
from .transfer import (
    CharacterVector,
    StabilizationFailure,
    fixed_point_character,
    limit_character,
    states,
)
from .verify import run_suite, SUITES

EXIT_OK, EXIT_FAIL, EXIT_UNDEFINED, EXIT_CONFIG = 0, 1, 2, 3
THREADS_ENV = "SL2BOSONIC_THREADS"

METHODS: Dict[str, Callable[[int, TruncationPolicy], CharacterVector]] = {
    "recursion": limit_character,
    "fixed-point": fixed_point_character,
    "oracle": oracle_vector,
    "bosonic-closed": lambda k, p: theorem_main_character(k, p, route="closed"),
    "bosonic-operator": lambda k, p: theorem_main_character(k, p, route="operator"),
}


class ConfigError(Exception):
    """Invalid command-line configuration (exit code 3)."""


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_CONFIG, f"{self.prog}: error: {message}\n")


# ---------------------------------------------------------------------------
# configuration
# ---------------------------------------------------------------------------

def _policy(args) -> TruncationPolicy:
    if args.qmax < 0:
        raise ConfigError("--qmax must be non-negative")
    if args.z2max is not None and args.z2max < 0:
        raise ConfigError("--z2max must be non-negative")
    return TruncationPolicy(args.qmax, args.z1min, args.z2max)


def _threads(args) -> int:
    n = args.threads
    env = os.environ.get(THREADS_ENV)
    if env:
        try:
            n = int(env)
        except ValueError as exc:
            raise ConfigError(f"{THREADS_ENV} must be an integer") from exc
    if n < 1:
        raise ConfigError("thread count must be positive")
    return n


def _state(args):
    if args.k < 1:
        raise ConfigError("--k must be positive")
    if (args.i is None) != (args.l is None):
        raise ConfigError("give both --i and --l or neither")
    if args.i is None:
        return None
    if not (0 <= args.i <= args.l <= args.k):
        raise ConfigError(f"need 0 <= i <= l <= k, got i={args.i}, l={args.l}, k={args.k}")
    return (args.i, args.l)


def _method(name: str):
    if name not in METHODS:
        raise ConfigError(f"unknown method {name!r}; choose from {', '.join(METHODS)}")
    return METHODS[name]


def compute(method: str, k: int, policy: TruncationPolicy) -> CharacterVector:
    fn = _method(method)
    if method == "fixed-point" and policy.z2max is None:
        raise ConfigError("the fixed-point method needs --z2max")
    return fn(k, policy)


# ---------------------------------------------------------------------------
# output
# ---------------------------------------------------------------------------

def _term_rows(f: TruncatedSeries):
    for (a, b, c), v in sorted(f.terms.items()):
        yield {"q": a, "z1": b, "z2": c, "coeff": str(v)}


def character_payload(chi: CharacterVector, method: str, state=None) -> List[dict]:
    out = []
    for s, f in chi.items():
        if state is not None and (s.i, s.l) != state:
            continue
        out.append({"k": chi.k, "i": s.i, "l": s.l, "qmax": chi.policy.qmax,
                    "method": method, "terms": list(_term_rows(f))})
    return out


def render_character(payload: List[dict], fmt: str) -> str:
    if fmt == "json":
        body = payload[0] if len(payload) == 1 else payload
        return json.dumps(body, indent=2) + "\n"
    if fmt == "csv":
        buf = io.StringIO()
        single = len(payload) == 1
        fields = ["q", "z1", "z2", "coeff"] if single else ["i", "l", "q", "z1", "z2", "coeff"]
        w = csv.DictWriter(buf, fieldnames=fields, lineterminator="\n")
        w.writeheader()
        for comp in payload:
            for row in comp["terms"]:
                w.writerow(row if single else {"i": comp["i"], "l": comp["l"], **row})
        return buf.getvalue()
    lines = []
    for comp in payload:
        f_terms = {(t["q"], t["z1"], t["z2"]): int(t["coeff"]) for t in comp["terms"]}
        text = format_series(TruncatedSeries(f_terms, TruncationPolicy(comp["qmax"])), limit=10 ** 6)
        lines.append(f"chi_({comp['i']},{comp['l']}) = {text}")
    return "\n".join(lines) + "\n"


def render_qz(k: int, l: int, f: QZSeries, method: str, fmt: str) -> str:
    rows = [{"q": a, "z": b, "coeff": str(v)} for (a, b), v in f.items()]
    if fmt == "json":
        return json.dumps({"k": k, "l": l, "qmax": f.qmax, "method": method, "terms": rows},
                          indent=2) + "\n"
    if fmt == "csv":
        buf = io.StringIO()
        w = csv.DictWriter(buf, fieldnames=["q", "z", "coeff"], lineterminator="\n")
        w.writeheader()
        w.writerows(rows)
        return buf.getvalue()
    parts = [f"{r['coeff']}*q^{r['q']}*z^{r['z']}" for r in rows]
    return f"chi_{l}(q,z) = " + (" + ".join(parts) or "0") + "\n"


def _emit(text: str, out: Optional[str]) -> None:
    if out and out != "-":
        with open(out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


# ---------------------------------------------------------------------------
# subcommands
# ---------------------------------------------------------------------------

def cmd_character(args) -> int:
    state = _state(args)
    chi = compute(args.method, args.k, _policy(args))
    _emit(render_character(character_payload(chi, args.method, state), args.format), args.out)
    return EXIT_OK


def cmd_full_character(args) -> int:
    if args.k < 1:
        raise ConfigError("--k must be positive")
    if args.l is None or not (0 <= args.l <= args.k):
        raise ConfigError("--l is required and must satisfy 0 <= l <= k")
    chi = compute(args.method, args.k, _policy(args))
    total = QZSeries({}, args.qmax)
    for i in range(args.l + 1):
        total = total + substitute_z(chi[(i, args.l)])
    _emit(render_qz(args.k, args.l, total, args.method, args.format), args.out)
    return EXIT_OK


def compare_methods(methods: Sequence[str], k: int, policy: TruncationPolicy,
                    threads: int = 1) -> dict:
    """Per-component equality of every method against the first one."""
    for m in methods:
        _method(m)
    if "fixed-point" in methods and policy.z2max is None:
        raise ConfigError("the fixed-point method needs --z2max")
    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            results = list(pool.map(lambda m: compute(m, k, policy), methods))
    else:
        results = [compute(m, k, policy) for m in methods]
    ref = results[0]
    report = {"k": k, "qmax": policy.qmax, "reference": methods[0], "comparisons": []}
    for name, chi in zip(methods[1:], results[1:]):
        for s in states(k):
            a, b = ref[s], chi[s]
            entry = {"method": name, "i": s.i, "l": s.l, "equal": a == b}
            if a != b:
                keys = sorted(set(a.terms) | set(b.terms))
                key = next(x for x in keys if a.terms.get(x, 0) != b.terms.get(x, 0))
                entry["first_difference"] = {"q": key[0], "z1": key[1], "z2": key[2],
                                             methods[0]: str(a.terms.get(key, 0)),
                                             name: str(b.terms.get(key, 0))}
            report["comparisons"].append(entry)
    report["all_equal"] = all(c["equal"] for c in report["comparisons"])
    return report


def render_compare(report: dict, fmt: str) -> str:
    if fmt == "json":
        return json.dumps(report, indent=2) + "\n"
    if fmt == "csv":
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["method", "i", "l", "equal", "q", "z1", "z2", "reference_coeff", "coeff"])
        for c in report["comparisons"]:
            d = c.get("first_difference")
            tail = ([d["q"], d["z1"], d["z2"], d[report["reference"]], d[c["method"]]]
                    if d else ["", "", "", "", ""])
            w.writerow([c["method"], c["i"], c["l"], str(c["equal"]).lower()] + tail)
        return buf.getvalue()
    lines = []
    for c in report["comparisons"]:
        line = f"{report['reference']} vs {c['method']} ({c['i']},{c['l']}): "
        if c["equal"]:
            line += "equal"
        else:
            d = c["first_difference"]
            line += (f"differ at q^{d['q']} z1^{d['z1']} z2^{d['z2']}: "
                     f"{d[report['reference']]} vs {d[c['method']]}")
        lines.append(line)
    lines.append("all equal" if report["all_equal"] else "MISMATCH")
    return "\n".join(lines) + "\n"


def cmd_compare(args) -> int:
    if args.k < 1:
        raise ConfigError("--k must be positive")
    methods = [m.strip() for m in args.methods.split(",") if m.strip()]
    if len(methods) < 2:
        raise ConfigError("--methods needs at least two methods")
    report = compare_methods(methods, args.k, _policy(args), _threads(args))
    _emit(render_compare(report, args.format), args.out)
    return EXIT_OK if report["all_equal"] else EXIT_FAIL


def cmd_verify(args) -> int:
    if args.suite != "all" and args.suite not in SUITES:
        raise ConfigError(f"unknown suite {args.suite!r}")
    report = run_suite(args.suite, args.qmax, _threads(args))
    if args.format == "json":
        text = json.dumps({"suite": args.suite, "ok": report.ok, "cases": [
            {"suite": c.suite, "identity": c.identity, "params": c.params, "ok": c.ok,
             "detail": c.detail} for c in report.cases]}, indent=2) + "\n"
    else:
        shown = report.cases if args.verbose else report.failures()
        text = "".join(c.line() + "\n" for c in shown) + report.summary() + "\n"
    _emit(text, args.out)
    return EXIT_OK if report.ok else EXIT_FAIL


def cmd_word(args) -> int:
    if args.k < 1:
        raise ConfigError("--k must be positive")
    policy = _policy(args)
    try:
        w = parse_word(args.apply)
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc
    lines = []
    if args.trace:
        try:
            path = graph.trace_path(w)
            lines.append("path: " + " -> ".join("(" + "".join(map(str, v)) + ")" for v in path))
        except ValueError as exc:
            lines.append(f"path: not traced ({exc})")
    if args.on == "vinf":
        chi = word_on_vinf(w, args.k, policy)
    else:
        vs = apply_word(w, simple(INITIAL))
        if args.trace:
            lines.extend(f"term: {t}" for t in vs.terms)
            lines.extend(f"route: {r}" for r in vs.routes)
        chi = to_character(vs, args.k, policy)
    text = render_character(character_payload(chi, f"word {args.apply} on {args.on}"), args.format)
    if lines:
        sys.stderr.write("\n".join(lines) + "\n")
    _emit(text, args.out)
    return EXIT_OK


def cmd_graph(args) -> int:
    _emit(graph.export_dot(), args.dot)
    return EXIT_OK


# ---------------------------------------------------------------------------
# parser
# ---------------------------------------------------------------------------

def _common(p: argparse.ArgumentParser, method: bool = True) -> None:
    p.add_argument("--k", type=int, default=1, help="level (default 1)")
    p.add_argument("--qmax", type=int, default=8, help="largest q-degree kept (default 8)")
    p.add_argument("--z1min", type=int, default=None, help="smallest z1-degree kept")
    p.add_argument("--z2max", type=int, default=None, help="largest z2-degree kept")
    p.add_argument("--format", choices=("json", "csv", "table"), default="json")
    p.add_argument("--out", default=None, help="output file (default stdout)")
    p.add_argument("--threads", type=int, default=1,
                   help=f"worker threads; {THREADS_ENV} overrides")
    if method:
        p.add_argument("--method", default="recursion", help=", ".join(METHODS))


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="sl2bosonic", description="Characters of coinvariants at level k.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("character", help="compute chi_(i,l) by one method")
    _common(p)
    p.add_argument("--i", type=int)
    p.add_argument("--l", type=int)
    p.set_defaults(func=cmd_character)

    p = sub.add_parser("full-character", help="chi_l(q, z) = sum_i chi_(i,l)(q, z, 1/z)")
    _common(p)
    p.add_argument("--l", type=int)
    p.set_defaults(func=cmd_full_character)

    p = sub.add_parser("compare", help="compare methods component by component")
    _common(p, method=False)
    p.add_argument("--methods", default="recursion,oracle,bosonic-closed")
    p.set_defaults(func=cmd_compare, format="table")

    p = sub.add_parser("verify", help="run identity suites")
    p.add_argument("--suite", default="all", help="|".join(list(SUITES) + ["all"]))
    p.add_argument("--qmax", type=int, default=None, help="override the suite's q-degree")
    p.add_argument("--format", choices=("json", "table"), default="table")
    p.add_argument("--out", default=None)
    p.add_argument("--threads", type=int, default=1)
    p.add_argument("--verbose", action="store_true", help="list passing cases too")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("word", help="apply an operator word")
    _common(p, method=False)
    p.add_argument("--apply", required=True, help='word such as "C B C A E" or "D (B+D+E) L^2"')
    p.add_argument("--on", choices=("vinf", "init"), default="vinf",
                   help="act on v_inf (default) or on [1,0,z2]")
    p.add_argument("--trace", action="store_true", help="print the graph path and terms to stderr")
    p.set_defaults(func=cmd_word)

    p = sub.add_parser("graph", help="export the summation graph")
    p.add_argument("--dot", default="-", help="output file for DOT text (default stdout)")
    p.set_defaults(func=cmd_graph)
    return parser


def run_command(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if getattr(args, "qmax", None) is not None and args.qmax < 0:
        sys.stderr.write("error: --qmax must be non-negative\n")
        return EXIT_CONFIG
    try:
        return args.func(args)
    except ConfigError as exc:
        sys.stderr.write(f"error: {exc}\n")
        return EXIT_CONFIG
    except (InvalidConfig, ValueError) as exc:
        sys.stderr.write(f"error: {exc}\n")
        return EXIT_CONFIG
    except Undefined as exc:
        sys.stderr.write(f"undefined: {exc}\n")
        return EXIT_UNDEFINED
    except (StabilizationFailure, ShellBoundExceeded, SeriesError) as exc:
        sys.stderr.write(f"failed: {exc}\n")
        return EXIT_FAIL


def main() -> None:
    sys.exit(run_command())


if __name__ == "__main__":
    main()
