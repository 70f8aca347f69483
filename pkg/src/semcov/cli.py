"""Command-line front end and benchmark harness.

Subcommands: cov, det, adj, treks, ident, ideal, gen chain, gen er,
bench chain, bench er. All of them read the shared graph file format
(JSON with fields n, directed, bidirected) and honor --format text or
--format structured; bench emits line-delimited records, everything
else a single object.

Exit codes: 0 success, 2 input that cannot be parsed (graph files,
list-valued flags), 3 precondition violations (treks on a cyclic graph,
generator attempt cap, bad degrees).
"""

from __future__ import annotations

import argparse
import hashlib
import json
import math
import multiprocessing
import sys
import time
from typing import Optional, TextIO

from .covariance import (
    CovarianceResult,
    covariance_matrix,
    inverse_numerator,
    naive_inverse,
    trek_rule,
)
from .graph import (
    GenerationError,
    GraphError,
    GraphFormatError,
    MixedGraph,
    gen_cycle_chain,
    gen_erdos_renyi,
    parse_graph,
    serialize_graph,
)
from .ideal import degree_scan
from .ident import identifiability_report

DEFAULT_TIME_LIMIT = 600.0


class CliError(Exception):
    """Bad command-line values that argparse cannot catch itself."""

    def __init__(self, message: str, exit_code: int = 2):
        super().__init__(message)
        self.exit_code = exit_code


# -- small plumbing ---------------------------------------------------------


def _read_graph(path: str) -> MixedGraph:
    if path == "-":
        text = sys.stdin.read()
    else:
        try:
            with open(path, "r", encoding="utf-8") as fh:
                text = fh.read()
        except OSError as exc:
            raise CliError(f"cannot read {path}: {exc.strerror}")
    return parse_graph(text)


def _int_list(spec: str, what: str) -> list[int]:
    """Parse '1,2,5' or '1..8' (inclusive) or a mix of both."""
    out: list[int] = []
    for part in spec.split(","):
        part = part.strip()
        if not part:
            continue
        try:
            if ".." in part:
                lo, hi = part.split("..", 1)
                lo_i, hi_i = int(lo), int(hi)
                if hi_i < lo_i:
                    raise ValueError
                out.extend(range(lo_i, hi_i + 1))
            else:
                out.append(int(part))
        except ValueError:
            raise CliError(f"bad {what} value {part!r}") from None
    if not out:
        raise CliError(f"empty {what} list")
    return out


def _float_list(spec: str, what: str) -> list[float]:
    out: list[float] = []
    for part in spec.split(","):
        part = part.strip()
        if not part:
            continue
        try:
            out.append(float(part))
        except ValueError:
            raise CliError(f"bad {what} value {part!r}") from None
    if not out:
        raise CliError(f"empty {what} list")
    return out


def _emit(text: str, out: TextIO) -> None:
    out.write(text)
    if not text.endswith("\n"):
        out.write("\n")


def _cov_digest(result: CovarianceResult) -> str:
    h = hashlib.sha256()
    h.update(str(result.det).encode())
    for i in range(1, result.n + 1):
        for j in range(i, result.n + 1):
            h.update(b"|")
            h.update(str(result.numerator(i, j)).encode())
    return h.hexdigest()


# -- covariance-family commands ---------------------------------------------


def _cov_text(result: CovarianceResult) -> str:
    lines = [f"det: {result.det}"]
    for i in range(1, result.n + 1):
        for j in range(i, result.n + 1):
            lines.append(f"num[{i}][{j}]: {result.numerator(i, j)}")
    return "\n".join(lines)


def cmd_cov(args: argparse.Namespace, out: TextIO) -> int:
    g = _read_graph(args.graph)
    result = covariance_matrix(g, method=args.method)
    if args.format == "structured":
        _emit(json.dumps(result.to_dict()), out)
    else:
        _emit(_cov_text(result), out)
    return 0


def cmd_det(args: argparse.Namespace, out: TextIO) -> int:
    g = _read_graph(args.graph)
    result = covariance_matrix(g, method=args.method)
    if args.format == "structured":
        _emit(json.dumps({"det": str(result.det)}), out)
    else:
        _emit(str(result.det), out)
    return 0


def cmd_adj(args: argparse.Namespace, out: TextIO) -> int:
    g = _read_graph(args.graph)
    num = naive_inverse(g)[1] if args.method == "naive" else inverse_numerator(g)
    matrix = [[str(num.entry(i, j)) for j in range(1, g.n + 1)]
              for i in range(1, g.n + 1)]
    if args.format == "structured":
        _emit(json.dumps({"entries": matrix}), out)
    else:
        lines = []
        for i in range(g.n):
            for j in range(g.n):
                lines.append(f"N[{i + 1}][{j + 1}]: {matrix[i][j]}")
        _emit("\n".join(lines), out)
    return 0


def cmd_treks(args: argparse.Namespace, out: TextIO) -> int:
    g = _read_graph(args.graph)
    result = trek_rule(g)
    if args.format == "structured":
        _emit(json.dumps(result.to_dict()), out)
    else:
        _emit(_cov_text(result), out)
    return 0


# -- ident and ideal --------------------------------------------------------


def cmd_ident(args: argparse.Namespace, out: TextIO) -> int:
    g = _read_graph(args.graph)
    report = identifiability_report(g, trials=args.trials, seed=args.seed)
    if args.format == "structured":
        _emit(json.dumps(report.to_dict()), out)
    else:
        lines = [
            f"params: {report.params}",
            f"rank: {report.rank}",
            f"verdict: {report.verdict}",
            f"simple: {'yes' if report.simple else 'no'}",
        ]
        if report.special_point is not None:
            lines.append(
                f"specialPoint: {'pass' if report.special_point else 'fail'}"
            )
        _emit("\n".join(lines), out)
    return 0


def cmd_ideal(args: argparse.Namespace, out: TextIO) -> int:
    g = _read_graph(args.graph)
    if args.degree < 1:
        raise CliError("--degree must be at least 1", exit_code=3)
    entries = degree_scan(g, args.degree, seed=args.seed)
    if args.format == "structured":
        _emit(json.dumps({"scan": [e.to_dict() for e in entries]}), out)
    else:
        lines = []
        for e in entries:
            lines.append(
                f"degree {e.degree}: {e.initial_columns} candidates, "
                f"{e.weak_pruned} after weak prune, "
                f"{e.full_pruned} after full prune, "
                f"kernel dimension {e.kernel_dim}"
            )
            for rel in e.relations:
                lines.append(f"  relation: {rel}")
        _emit("\n".join(lines), out)
    return 0


# -- generators -------------------------------------------------------------


def cmd_gen_chain(args: argparse.Namespace, out: TextIO) -> int:
    g = gen_cycle_chain(args.cycles, args.cycle_length)
    _emit(serialize_graph(g), out)
    return 0


def cmd_gen_er(args: argparse.Namespace, out: TextIO) -> int:
    g = gen_erdos_renyi(
        args.vertices,
        args.p_directed,
        args.p_bidirected,
        args.cycles,
        seed=args.seed,
        max_attempts=args.max_attempts,
    )
    _emit(serialize_graph(g), out)
    return 0


# -- benchmark harness ------------------------------------------------------


def _bench_worker(g: MixedGraph, method: str, conn) -> None:
    t0 = time.perf_counter()
    result = covariance_matrix(g, method=method)
    elapsed = time.perf_counter() - t0
    det_terms = sum(1 for _ in result.det.terms())
    max_num = max(
        sum(1 for _ in result.numerator(i, j).terms())
        for i in range(1, g.n + 1)
        for j in range(i, g.n + 1)
    )
    conn.send((elapsed, det_terms, max_num, _cov_digest(result)))
    conn.close()


def _run_timed(g: MixedGraph, method: str, limit: float) -> dict:
    """One timed covariance computation in a fresh process.

    Only the computation itself is timed; term counting and hashing
    happen in the child after the clock stops. A non-positive limit
    short-circuits to a timeout record without running anything.
    """
    if limit <= 0:
        return {"status": "timeout", "wallTimeSeconds": max(limit, 0.0)}
    ctx = multiprocessing.get_context("fork")
    recv, send = ctx.Pipe(duplex=False)
    proc = ctx.Process(target=_bench_worker, args=(g, method, send))
    proc.start()
    send.close()
    payload = None
    if recv.poll(limit):
        payload = recv.recv()
    proc.join(timeout=max(limit / 10.0, 1.0))
    if payload is None:
        proc.terminate()
        proc.join()
        recv.close()
        return {"status": "timeout", "wallTimeSeconds": limit}
    recv.close()
    if proc.is_alive():
        proc.terminate()
        proc.join()
    elapsed, det_terms, max_num, digest = payload
    return {
        "status": "ok",
        "wallTimeSeconds": elapsed,
        "termCounts": {"det": det_terms, "maxNumerator": max_num},
        "digest": digest,
    }


def _bench_graphs_chain(args: argparse.Namespace) -> list[tuple[dict, MixedGraph]]:
    lengths = _int_list(args.cycle_length, "cycle length")
    counts = _int_list(args.cycles, "cycle count")
    pairs = []
    for length in sorted(set(lengths)):
        for count in sorted(set(counts)):
            desc = {"generator": "chain", "cycles": count,
                    "cycleLength": length}
            pairs.append((desc, gen_cycle_chain(count, length)))
    return pairs


def _bench_graphs_er(args: argparse.Namespace) -> list[tuple[dict, MixedGraph]]:
    pbs = _float_list(args.p_bidirected, "bidirected probability")
    cycles = _int_list(args.cycles, "cycle count")
    pairs = []
    for pb in sorted(set(pbs)):
        for c in sorted(set(cycles)):
            desc = {
                "generator": "er",
                "vertices": args.vertices,
                "pDirected": args.p_directed,
                "pBidirected": pb,
                "cycles": c,
                "seed": args.seed,
            }
            g = gen_erdos_renyi(
                args.vertices, args.p_directed, pb, c,
                seed=args.seed, max_attempts=args.max_attempts,
            )
            pairs.append((desc, g))
    return pairs


def _fit_exponential(points: list[tuple[int, float]]) -> Optional[dict]:
    """Least-squares fit of time = a * b**d through (d, time) pairs."""
    usable = [(d, t) for d, t in points if t > 0]
    if len(usable) < 2:
        return None
    xs = [float(d) for d, _ in usable]
    ys = [math.log(t) for _, t in usable]
    k = len(xs)
    mx = sum(xs) / k
    my = sum(ys) / k
    sxx = sum((x - mx) ** 2 for x in xs)
    if sxx == 0:
        return None
    slope = sum((x - mx) * (y - my) for x, y in zip(xs, ys)) / sxx
    intercept = my - slope * mx
    return {"a": math.exp(intercept), "b": math.exp(slope),
            "points": k}


def _bench_summary(suite: str, records: list[dict]) -> dict:
    by_graph: dict[str, dict[str, dict]] = {}
    for rec in records:
        key = json.dumps(rec["graph"], sort_keys=True)
        by_graph.setdefault(key, {})[rec["method"]] = rec
    wins = {"oneconn": 0, "naive": 0, "tie": 0, "incomparable": 0}
    mismatches = 0
    for pair in by_graph.values():
        one, nai = pair.get("oneconn"), pair.get("naive")
        if one is None or nai is None:
            continue
        ok_one = one["status"] == "ok"
        ok_nai = nai["status"] == "ok"
        if ok_one and ok_nai:
            if one["digest"] != nai["digest"]:
                mismatches += 1
            dt = one["wallTimeSeconds"] - nai["wallTimeSeconds"]
            if dt < 0:
                wins["oneconn"] += 1
            elif dt > 0:
                wins["naive"] += 1
            else:
                wins["tie"] += 1
        elif ok_one:
            wins["oneconn"] += 1
        elif ok_nai:
            wins["naive"] += 1
        else:
            wins["incomparable"] += 1
    summary = {
        "type": "summary",
        "suite": suite,
        "graphs": len(by_graph),
        "records": len(records),
        "wins": wins,
        "digestMismatches": mismatches,
    }
    if suite == "chain":
        fits = []
        groups: dict[tuple[int, str], list[tuple[int, float]]] = {}
        for rec in records:
            if rec["status"] != "ok":
                continue
            key = (rec["graph"]["cycleLength"], rec["method"])
            groups.setdefault(key, []).append(
                (rec["graph"]["cycles"], rec["wallTimeSeconds"])
            )
        for (length, method), pts in sorted(groups.items()):
            fit = _fit_exponential(pts)
            if fit is not None:
                fits.append({"cycleLength": length, "method": method, **fit})
        summary["fits"] = fits
    return summary


def _record_text(rec: dict) -> str:
    desc = rec["graph"]
    if desc["generator"] == "chain":
        head = f"chain d={desc['cycles']} len={desc['cycleLength']}"
    else:
        head = (f"er n={desc['vertices']} pB={desc['pBidirected']} "
                f"c={desc['cycles']}")
    if rec["status"] == "ok":
        tc = rec["termCounts"]
        return (f"{head} {rec['method']}: {rec['wallTimeSeconds']:.3f}s ok "
                f"(det {tc['det']} terms, max numerator {tc['maxNumerator']})")
    return f"{head} {rec['method']}: timeout after {rec['wallTimeSeconds']:g}s"


def _summary_text(summary: dict) -> str:
    wins = summary["wins"]
    lines = [
        f"{summary['suite']} suite: {summary['graphs']} graphs, "
        f"{summary['records']} records",
        f"wins: oneconn {wins['oneconn']}, naive {wins['naive']}, "
        f"tie {wins['tie']}, incomparable {wins['incomparable']}",
        f"digest mismatches: {summary['digestMismatches']}",
    ]
    for fit in summary.get("fits", []):
        lines.append(
            f"fit len={fit['cycleLength']} {fit['method']}: "
            f"time ~ {fit['a']:.3g} * {fit['b']:.3g}^d "
            f"({fit['points']} points)"
        )
    return "\n".join(lines)


def _run_bench(args: argparse.Namespace, out: TextIO,
               pairs: list[tuple[dict, MixedGraph]], suite: str) -> int:
    records = []
    for desc, g in pairs:
        for method in ("oneconn", "naive"):
            rec = {"type": "record", "graph": desc, "method": method}
            rec.update(_run_timed(g, method, args.time_limit))
            records.append(rec)
            if args.format == "structured":
                _emit(json.dumps(rec), out)
            else:
                _emit(_record_text(rec), out)
            out.flush()
    summary = _bench_summary(suite, records)
    if args.format == "structured":
        _emit(json.dumps(summary), out)
    else:
        _emit(_summary_text(summary), out)
    return 0


def cmd_bench_chain(args: argparse.Namespace, out: TextIO) -> int:
    return _run_bench(args, out, _bench_graphs_chain(args), "chain")


def cmd_bench_er(args: argparse.Namespace, out: TextIO) -> int:
    return _run_bench(args, out, _bench_graphs_er(args), "er")


# -- argument parsing -------------------------------------------------------


def _build_parser() -> argparse.ArgumentParser:
    shared = argparse.ArgumentParser(add_help=False)
    shared.add_argument("--output", metavar="PATH",
                        help="write results to PATH instead of stdout")
    shared.add_argument("--format", choices=("text", "structured"),
                        default="text")
    shared.add_argument("--seed", type=int, default=0, metavar="N")
    shared.add_argument("--time-limit", type=float,
                        default=DEFAULT_TIME_LIMIT, metavar="SECS")
    shared.add_argument("--method", choices=("oneconn", "naive"),
                        default="oneconn")
    shared.add_argument("--degree", type=int, default=1, metavar="D")
    shared.add_argument("--trials", type=int, default=3, metavar="K")

    parser = argparse.ArgumentParser(
        prog="semcov",
        description="Exact covariance matrices, identifiability tests and "
                    "vanishing-ideal search for linear structural equation "
                    "models on mixed graphs.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    for name, fn, doc in (
        ("cov", cmd_cov, "full covariance matrix of a graph"),
        ("det", cmd_det, "shared denominator determinant"),
        ("adj", cmd_adj, "inverse numerator matrix"),
        ("treks", cmd_treks, "trek-rule covariance (acyclic only)"),
    ):
        p = sub.add_parser(name, parents=[shared], help=doc)
        p.add_argument("graph", help="graph file, or - for stdin")
        p.set_defaults(fn=fn)

    p = sub.add_parser("ident", parents=[shared],
                       help="generic identifiability report")
    p.add_argument("graph", help="graph file, or - for stdin")
    p.set_defaults(fn=cmd_ident)

    p = sub.add_parser("ideal", parents=[shared],
                       help="vanishing-ideal degree scan up to --degree")
    p.add_argument("graph", help="graph file, or - for stdin")
    p.set_defaults(fn=cmd_ideal)

    gen = sub.add_parser("gen", help="graph generators")
    gen_sub = gen.add_subparsers(dest="generator", required=True)

    p = gen_sub.add_parser("chain", parents=[shared],
                           help="chain of directed cycles")
    p.add_argument("--cycles", type=int, required=True, metavar="D")
    p.add_argument("--cycle-length", type=int, required=True, metavar="LEN")
    p.set_defaults(fn=cmd_gen_chain)

    p = gen_sub.add_parser("er", parents=[shared],
                           help="random mixed graph with a fixed cycle count")
    p.add_argument("--vertices", type=int, required=True, metavar="N")
    p.add_argument("--p-directed", type=float, required=True, metavar="P")
    p.add_argument("--p-bidirected", type=float, required=True, metavar="P")
    p.add_argument("--cycles", type=int, required=True, metavar="C")
    p.add_argument("--max-attempts", type=int, default=1000, metavar="N")
    p.set_defaults(fn=cmd_gen_er)

    bench = sub.add_parser("bench", help="timed method comparisons")
    bench_sub = bench.add_subparsers(dest="suite", required=True)

    p = bench_sub.add_parser("chain", parents=[shared],
                             help="cycle-chain suite")
    p.add_argument("--cycles", required=True, metavar="LIST",
                   help="cycle counts, e.g. 1..8 or 1,2,3")
    p.add_argument("--cycle-length", required=True, metavar="LIST",
                   help="cycle lengths, e.g. 2,6")
    p.set_defaults(fn=cmd_bench_chain)

    p = bench_sub.add_parser("er", parents=[shared],
                             help="random-graph suite")
    p.add_argument("--vertices", type=int, required=True, metavar="N")
    p.add_argument("--p-directed", type=float, required=True, metavar="P")
    p.add_argument("--p-bidirected", required=True, metavar="LIST",
                   help="bidirected probabilities, e.g. 0,0.01,0.02")
    p.add_argument("--cycles", required=True, metavar="LIST",
                   help="cycle counts, e.g. 0..10")
    p.add_argument("--max-attempts", type=int, default=1000, metavar="N")
    p.set_defaults(fn=cmd_bench_er)

    return parser


def main(argv: Optional[list[str]] = None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    out: TextIO = sys.stdout
    opened = None
    if args.output:
        try:
            opened = open(args.output, "w", encoding="utf-8")
        except OSError as exc:
            print(f"semcov: cannot write {args.output}: {exc.strerror}",
                  file=sys.stderr)
            return 2
        out = opened
    try:
        return args.fn(args, out)
    except GraphFormatError as exc:
        print(f"semcov: {exc}", file=sys.stderr)
        return 2
    except CliError as exc:
        print(f"semcov: {exc}", file=sys.stderr)
        return exc.exit_code
    except (GraphError, GenerationError) as exc:
        print(f"semcov: {exc}", file=sys.stderr)
        return 3
    finally:
        if opened is not None:
            opened.close()


if __name__ == "__main__":
    sys.exit(main())
