"""Command-line interface.

Exit codes: 0 success, 1 parse or internal error, 2 complete overlaps found,
3 separation depth inconclusive, 64 usage error.
"""

from __future__ import annotations

import argparse
import csv
import sys
from fractions import Fraction

from .classify import FractalClass, dimension, equivalent
from .codemap import (
    EigData,
    build_gd_map,
    build_upper_map,
    build_zero_rank_map,
    cylinder_map_to_dict,
    top_block,
    verify_cylinder_map,
)
from .coins import MultisetSpec, coin_solve, frobenius_number, partition_multiset
from .documents import (
    dumps,
    eigen_doc,
    load_system,
    parse_matrix_doc,
    parse_partition_doc,
    read_json,
)
from .errors import FractalError, ParseError
from .ifs import point_cloud
from .lattice import as_fraction, format_fraction
from .matrix import condense_and_rank, integer_characteristic, irreducible, pf_eigenvalue, period_decomposition
from .overlap import build_state_graph, detect_complete_overlaps, state_graph_to_dot
from .pipeline import (
    EXIT_ERROR,
    EXIT_OK,
    EXIT_OVERLAPS,
    EXIT_USAGE,
    analyze,
)
from .structure import DEFAULT_K_MAX, gd_to_dot


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise SystemExit(EXIT_USAGE)


def _emit(text: str, out):
    out.write(text)


def _write(path: str, text: str):
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(text)


def cmd_analyze(args, out) -> int:
    system = load_system(args.path)
    report = analyze(system, args.k_max, args.depth)
    if args.dot and report.gd is not None:
        _write(args.dot, gd_to_dot(report.gd))
    if args.json:
        _emit(dumps(report.to_dict(timings=args.timings)), out)
    else:
        text = report.to_text()
        if args.timings:
            text += "".join(f"time {k}: {v:.4f}s\n" for k, v in report.timings.items())
        _emit(text, out)
    return report.exit_code


def cmd_overlap(args, out) -> int:
    system = load_system(args.path)
    verdict = detect_complete_overlaps(system)
    if args.dot:
        _write(args.dot, state_graph_to_dot(build_state_graph(system)))
    if args.json:
        body = {"overlaps": verdict.overlaps}
        if verdict.overlaps:
            body["witness"] = [list(w) for w in verdict.witness]
        _emit(dumps(body), out)
    else:
        _emit(f"{verdict}\n", out)
    return EXIT_OVERLAPS if verdict.overlaps else EXIT_OK


def matrix_summary(a) -> dict:
    cond = condense_and_rank(a)
    cert = integer_characteristic(a)
    body = {
        "size": len(a),
        "blocks": [[v + 1 for v in b] for b in cond.blocks],
        "ranks": list(cond.rank),
        "perron_frobenius": round(pf_eigenvalue(a), 10),
        "irreducible": irreducible(a),
    }
    if cert:
        body["characteristic"] = {"m": cert.m, "v": list(cert.v)}
    else:
        body["characteristic"] = None
        body["tested"] = list(cert.tested)
    if body["irreducible"]:
        dec = period_decomposition(a)
        body["period"] = dec.period
        body["cyclic_classes"] = [[v + 1 for v in c] for c in dec.classes]
        body["positive_power"] = dec.u
    return body


def cmd_matrix(args, out) -> int:
    a = parse_matrix_doc(read_json(args.path))
    body = matrix_summary(a)
    if args.json:
        _emit(dumps(body), out)
        return EXIT_OK
    lines = [f"blocks: {body['blocks']}  ranks: {body['ranks']}",
             f"Perron-Frobenius eigenvalue: {body['perron_frobenius']:.7f}"]
    if body["characteristic"]:
        lines.append(f"integer characteristic: m={body['characteristic']['m']} v={body['characteristic']['v']}")
    else:
        lines.append(f"no integer characteristic (tested m in {body['tested']})")
    if body["irreducible"]:
        lines.append(f"period: {body['period']}  cyclic classes: {body['cyclic_classes']}")
    _emit("\n".join(lines) + "\n", out)
    return EXIT_OK


def _parse_class(r_text, m_text) -> FractalClass:
    try:
        return FractalClass(as_fraction(r_text), int(m_text))
    except (TypeError, ValueError, ZeroDivisionError) as exc:
        raise UsageError(f"bad class ({r_text}, {m_text}): {exc}") from None


def cmd_classify(args, out) -> int:
    items = args.items
    if len(items) == 4:
        c1, c2 = _parse_class(*items[:2]), _parse_class(*items[2:])
    elif len(items) == 2:
        classes = []
        for path in items:
            report = analyze(load_system(path), args.k_max, 0, states=False)
            if report.exit_code != EXIT_OK:
                _emit(f"{path}: no class ({report.overlap}"
                      f"{'' if report.kstar is None else ', separation depth ' + str(report.kstar)})\n", out)
                return report.exit_code
            classes.append(report.fractal_class)
        c1, c2 = classes
    else:
        raise UsageError("classify takes 'r1 m1 r2 m2' or two system files")
    wit = equivalent(c1, c2)
    if args.json:
        body = {"first": {"r": format_fraction(c1.r), "m": c1.m, "dimension": dimension(c1)},
                "second": {"r": format_fraction(c2.r), "m": c2.m, "dimension": dimension(c2)},
                "equivalent": wit.equivalent}
        if wit.equivalent:
            body["k"] = [wit.k1, wit.k2]
        _emit(dumps(body), out)
    elif wit.equivalent:
        _emit(f"{c1} ~ {c2}: equivalent, k=({wit.k1},{wit.k2})\n", out)
    else:
        _emit(f"{c1} ~ {c2}: not equivalent (dimensions {dimension(c1):.6f}, {dimension(c2):.6f})\n", out)
    return EXIT_OK


def cmd_frobenius(args, out) -> int:
    try:
        coins = [int(x) for x in args.coins]
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    phi = frobenius_number(coins)
    if args.solve is None:
        _emit(f"{phi}\n", out)
    else:
        x = coin_solve(coins, args.solve)
        _emit(f"{phi}\n{' '.join(map(str, x))}\n", out)
    return EXIT_OK


def cmd_partition(args, out) -> int:
    coins, counts, b, c = parse_partition_doc(read_json(args.path))
    part = partition_multiset(MultisetSpec(counts, b, c), coins)
    body = {
        "groups": [[{"coin": j + 1, "item": t + 1} for j, t in g] for g in part.groups],
        "sums": list(part.sums(coins)),
    }
    if args.json:
        _emit(dumps(body), out)
    else:
        lines = []
        for t, g in enumerate(part.groups, 1):
            tally = [0] * len(coins)
            for j, _ in g:
                tally[j] += 1
            lines.append(f"group {t}: sum {body['sums'][t - 1]}, counts {tally}")
        _emit("\n".join(lines) + "\n", out)
    return EXIT_OK


def _codemap_for(args):
    doc = read_json(args.path)
    if isinstance(doc, dict) and "maps" in doc:
        from .documents import parse_ifs

        system = parse_ifs(doc).to_system()
        report = analyze(system, args.k_max, 0, states=False)
        if report.exit_code != EXIT_OK:
            return None, report.exit_code
        gd = report.gd
        eig = EigData(gd.adjacency, report.certificate.m, report.certificate.v)
        kind = "stacked" if args.kind == "auto" else args.kind
    else:
        a = parse_matrix_doc(doc)
        given = eigen_doc(doc)
        if given is None:
            cert = integer_characteristic(a)
            if not cert:
                raise ParseError("matrix has no integer characteristic")
            given = (cert.m, cert.v)
        eig = EigData(a, *given)
        kind = args.kind
        if kind == "auto":
            if irreducible(a):
                kind = "zero-rank"
            else:
                try:
                    top_block(a)
                    kind = "upper"
                except FractalError:
                    kind = "stacked"
    build = {"upper": build_upper_map, "zero-rank": build_zero_rank_map, "stacked": build_gd_map}[kind]
    return build(eig, args.depth), EXIT_OK


def cmd_codemap(args, out) -> int:
    cmap, code = _codemap_for(args)
    if cmap is None:
        _emit("no structure to map\n", out)
        return code
    rep = verify_cylinder_map(cmap, args.depth, args.mode)
    body = cylinder_map_to_dict(cmap, args.depth)
    body["verification"] = {"depth": rep.depth, "mode": rep.mode, "nodes": rep.nodes,
                            "violations": rep.violations, "samples": rep.describe()}
    if args.json:
        _emit(dumps(body), out)
    else:
        lines = [f"{cmap.kind} map, alphabet {cmap.base}, {cmap.power} graph step(s) per code step"]
        for v, steps in enumerate(body["steps"]):
            if steps is None:
                continue
            parts = [f"[{v + 1},{q}]->{s['target']}:{s['offset']}*({s['lo']}..{s['hi']}){'*' if s['leaf'] else ''}"
                     for q, s in enumerate(steps, 1)]
            lines.append(f"vertex {v + 1} (size {cmap.sizes[v]}): " + " ".join(parts))
        lines.append(f"verified to depth {rep.depth} ({rep.mode}): {rep.nodes} nodes, {rep.violations} violations")
        lines.extend("  " + d for d in rep.describe())
        _emit("\n".join(lines) + "\n", out)
    return EXIT_OK if rep.ok else EXIT_ERROR


def cmd_points(args, out) -> int:
    system = load_system(args.path)
    pts = point_cloud(system, args.depth)
    lat = system.lattice
    use_ambient = lat.ambient_basis is not None
    dim = len(lat.ambient_basis[0]) if use_ambient else lat.rank
    fh = open(args.output, "w", newline="", encoding="utf-8") if args.output else out
    try:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["word"] + [f"x{k}" for k in range(dim)] + [f"x{k}_float" for k in range(dim)])
        for word, x in pts:
            coords = lat.to_ambient(x) if use_ambient else tuple(Fraction(c) for c in x)
            writer.writerow([".".join(map(str, word))] + [format_fraction(c) for c in coords]
                            + [repr(float(c)) for c in coords])
    finally:
        if args.output:
            fh.close()
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="bilipfrac", description="Bilipschitz classification of self-similar sets.")
    sub = parser.add_subparsers(dest="command", parser_class=_Parser)
    sub.required = True

    p = sub.add_parser("analyze", help="full pipeline on a system file")
    p.add_argument("path")
    p.add_argument("--k-max", type=int, default=DEFAULT_K_MAX)
    p.add_argument("--depth", type=int, default=0, help="also build and verify the cylinder map to this depth")
    fmt = p.add_mutually_exclusive_group()
    fmt.add_argument("--json", action="store_true")
    fmt.add_argument("--text", dest="json", action="store_false")
    p.add_argument("--dot", metavar="OUT", help="write the type graph in DOT format")
    p.add_argument("--timings", action="store_true", help="include stage timings")
    p.set_defaults(func=cmd_analyze)

    p = sub.add_parser("overlap", help="complete-overlap check")
    p.add_argument("path")
    p.add_argument("--json", action="store_true")
    p.add_argument("--dot", metavar="OUT", help="write the difference-state graph in DOT format")
    p.set_defaults(func=cmd_overlap)

    p = sub.add_parser("matrix", help="condensation, Perron-Frobenius value, integer characteristic")
    p.add_argument("path")
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_matrix)

    p = sub.add_parser("classify", help="compare two classes (r1 m1 r2 m2) or two system files")
    p.add_argument("items", nargs="+")
    p.add_argument("--k-max", type=int, default=DEFAULT_K_MAX)
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_classify)

    p = sub.add_parser("frobenius", help="Frobenius number of coprime coins")
    p.add_argument("coins", nargs="+")
    p.add_argument("--solve", type=int, help="also print the least representation of this value")
    p.set_defaults(func=cmd_frobenius)

    p = sub.add_parser("partition", help="split a coin multiset into equal-sum groups")
    p.add_argument("path")
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_partition)

    p = sub.add_parser("codemap", help="build and verify a cylinder map")
    p.add_argument("path", help="system file or matrix file (optionally with m and v)")
    p.add_argument("--depth", type=int, default=2)
    p.add_argument("--kind", choices=["auto", "upper", "zero-rank", "stacked"], default="auto")
    p.add_argument("--mode", choices=["auto", "exhaustive", "memo"], default="auto")
    p.add_argument("--k-max", type=int, default=DEFAULT_K_MAX)
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_codemap)

    p = sub.add_parser("points", help="CSV of S_w(0) over all words of a given length")
    p.add_argument("path")
    p.add_argument("--depth", type=int, default=3)
    p.add_argument("-o", "--output")
    p.set_defaults(func=cmd_points)
    return parser


def main(argv=None, out=None) -> int:
    out = sys.stdout if out is None else out
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code) if exc.code is not None else EXIT_OK
    try:
        return args.func(args, out)
    except UsageError as exc:
        print(f"bilipfrac: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (FractalError, ValueError) as exc:
        print(f"bilipfrac: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
