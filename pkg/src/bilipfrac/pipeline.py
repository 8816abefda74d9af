"""End-to-end analysis: overlaps, separation depth, types, characteristic, class."""

from __future__ import annotations

import time
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional

from sympy import integer_nthroot

from .classify import FractalClass, dimension, equivalent, reduce_class
from .codemap import EigData, build_gd_map, verify_cylinder_map
from .errors import CapExceeded, FractalError
from .ifs import IfsSystem
from .lattice import format_fraction
from .matrix import integer_characteristic
from .overlap import OverlapVerdict, build_state_graph, detect_complete_overlaps
from .structure import (
    DEFAULT_K_MAX,
    GdSystem,
    KStarResult,
    extract_structure,
    find_kstar,
    gd_to_dict,
    verify_characteristic,
)

EXIT_OK = 0
EXIT_ERROR = 1
EXIT_OVERLAPS = 2
EXIT_INCONCLUSIVE = 3
EXIT_USAGE = 64


@dataclass
class StateSummary:
    bound_sq: Fraction
    points: int
    originals: list   # distinct original gaps, ambient or lattice coordinates
    boundary: list

    @property
    def bound(self) -> Optional[Fraction]:
        """``M`` itself when its square is a square of a rational."""
        num, ok1 = integer_nthroot(self.bound_sq.numerator, 2)
        den, ok2 = integer_nthroot(self.bound_sq.denominator, 2)
        return Fraction(int(num), int(den)) if ok1 and ok2 else None

    def to_dict(self) -> dict:
        return {
            "bound": None if self.bound is None else format_fraction(self.bound),
            "bound_squared": format_fraction(self.bound_sq),
            "points": self.points,
            "originals": [[format_fraction(x) for x in p] for p in self.originals],
            "boundary": [[format_fraction(x) for x in p] for p in self.boundary],
        }


@dataclass
class AnalysisReport:
    overlap: OverlapVerdict
    states: Optional[StateSummary] = None
    kstar: Optional[KStarResult] = None
    gd: Optional[GdSystem] = None
    certificate: object = None
    char_ok: Optional[bool] = None
    raw_class: Optional[FractalClass] = None
    fractal_class: Optional[FractalClass] = None
    codemap: Optional[dict] = None
    timings: dict = field(default_factory=dict)
    note: Optional[str] = None

    @property
    def exit_code(self) -> int:
        if self.overlap.overlaps:
            return EXIT_OVERLAPS
        if self.kstar is None or not self.kstar.found:
            return EXIT_INCONCLUSIVE
        if self.fractal_class is None:
            return EXIT_ERROR
        return EXIT_OK

    @property
    def dimension(self) -> Optional[float]:
        return None if self.fractal_class is None else dimension(self.fractal_class)

    def to_dict(self, timings: bool = False) -> dict:
        out = {"overlap": _verdict_dict(self.overlap)}
        if self.states is not None:
            out["state_graph"] = self.states.to_dict()
        if self.kstar is not None:
            out["kstar"] = {"found": self.kstar.found, "value": self.kstar.kstar, "k_max": self.kstar.k_max}
        if self.gd is not None:
            out["classes"] = self.gd.p
            out["class_sizes"] = list(self.gd.sizes())
            out["adjacency"] = [list(r) for r in self.gd.adjacency]
            out["characteristic_identity"] = self.char_ok
        if self.certificate is not None:
            if self.certificate:
                out["characteristic"] = {"m": self.certificate.m, "v": list(self.certificate.v)}
            else:
                out["characteristic"] = {"refuted": list(self.certificate.tested)}
        if self.fractal_class is not None:
            out["class"] = _class_dict(self.fractal_class)
            out["class_before_reduction"] = _class_dict(self.raw_class)
            out["dimension"] = round(self.dimension, 12)
            out["equivalent_to"] = f"Sigma_{self.fractal_class.m}^({format_fraction(self.fractal_class.r)})"
        if self.codemap is not None:
            out["codemap"] = self.codemap
        if self.note:
            out["note"] = self.note
        if timings:
            out["timings"] = {k: round(v, 6) for k, v in self.timings.items()}
        return out

    def to_text(self) -> str:
        lines = [f"overlaps: {self.overlap}"]
        if self.states is not None:
            s = self.states
            m = f"M = {format_fraction(s.bound)}" if s.bound is not None else f"M^2 = {format_fraction(s.bound_sq)}"
            lines.append(f"state bound {m}, points in ball: {s.points}")
            lines.append("original gaps: " + ", ".join("(" + ", ".join(format_fraction(x) for x in p) + ")"
                                                      for p in s.originals))
        if self.kstar is not None:
            lines.append(f"separation depth: {self.kstar}")
        if self.gd is not None:
            lines.append(f"type classes: {self.gd.p}  sizes: {list(self.gd.sizes())}")
            lines.append("adjacency:")
            lines.extend("  " + " ".join(f"{x:3d}" for x in row) for row in self.gd.adjacency)
            lines.append(f"characteristic identity holds: {self.char_ok}")
        if self.certificate is not None:
            if self.certificate:
                lines.append(f"integer characteristic: m={self.certificate.m} v={list(self.certificate.v)}")
            else:
                lines.append(f"no integer characteristic (tested {list(self.certificate.tested)})")
        if self.fractal_class is not None:
            c = self.fractal_class
            lines.append(f"class: {c}  dimension: {self.dimension:.6f}")
            lines.append(f"bilipschitz equivalent to Sigma_{c.m}^({format_fraction(c.r)})")
        if self.codemap is not None:
            cm = self.codemap
            lines.append(f"cylinder map: alphabet {cm['alphabet']}, depth {cm['depth']}, "
                         f"{cm['nodes']} nodes, {cm['violations']} violations ({cm['mode']})")
        if self.note:
            lines.append(self.note)
        return "\n".join(lines) + "\n"


def _verdict_dict(v: OverlapVerdict) -> dict:
    if not v.overlaps:
        return {"overlaps": False}
    return {"overlaps": True, "witness": [list(v.witness[0]), list(v.witness[1])]}


def _class_dict(c: FractalClass) -> dict:
    return {"r": format_fraction(c.r), "m": c.m}


def state_summary(sys: IfsSystem) -> Optional[StateSummary]:
    """Ball size, original gaps and boundary points of the difference-state graph."""
    try:
        graph = build_state_graph(sys)
    except CapExceeded:
        return None

    def coords(x):
        if sys.lattice.ambient_basis is not None:
            return sys.lattice.to_ambient(x)
        return tuple(Fraction(c) for c in x)

    originals = sorted({coords(graph.vertices[k][0]) for k in graph.originals})
    boundary = sorted({coords(graph.vertices[k][0]) for k in graph.boundary})
    return StateSummary(graph.m_bound_sq, len(graph.points), originals, boundary)


def class_of(n: int, kstar: int, m_char: int) -> tuple:
    """Class ``(1/n^k*, m')`` and its representative with ratio ``1/n`` when one exists."""
    raw = FractalClass(Fraction(1, n ** kstar), m_char)
    root, exact = integer_nthroot(m_char, kstar)
    if exact and root >= 2:
        rep = FractalClass(Fraction(1, n), int(root))
        assert equivalent(raw, rep).equivalent
    else:
        rep = reduce_class(raw)
    return raw, rep


def analyze(sys: IfsSystem, k_max: int = DEFAULT_K_MAX, depth: int = 0, states: bool = True) -> AnalysisReport:
    """Run every stage; stop early on overlaps or an inconclusive separation depth.

    ``depth > 0`` also builds the stacked cylinder map and verifies it to that depth.
    """
    clock = time.perf_counter
    t0 = clock()
    report = AnalysisReport(detect_complete_overlaps(sys))
    report.timings["overlap"] = clock() - t0
    if states:
        report.states = state_summary(sys)
    if report.overlap.overlaps:
        return report
    t0 = clock()
    report.kstar = find_kstar(sys, k_max)
    report.timings["kstar"] = clock() - t0
    if not report.kstar.found:
        report.note = "total disconnectedness not established"
        return report
    t0 = clock()
    gd = extract_structure(sys, report.kstar.kstar)
    report.gd = gd
    report.char_ok = bool(verify_characteristic(gd))
    report.timings["structure"] = clock() - t0
    t0 = clock()
    cert = integer_characteristic(gd.adjacency)
    report.certificate = cert
    report.timings["characteristic"] = clock() - t0
    if not cert:
        report.note = "adjacency matrix has no integer characteristic"
        return report
    report.raw_class, report.fractal_class = class_of(sys.n, gd.kstar, cert.m)
    if depth > 0:
        t0 = clock()
        try:
            cmap = build_gd_map(EigData(gd.adjacency, cert.m, cert.v), depth)
            rep = verify_cylinder_map(cmap, depth)
            report.codemap = {"alphabet": cmap.base, "power": cmap.power, "depth": depth,
                              "nodes": rep.nodes, "violations": rep.violations, "mode": rep.mode}
        except FractalError as exc:
            report.codemap = {"alphabet": None, "power": None, "depth": depth, "nodes": 0,
                              "violations": None, "mode": f"not built: {exc}"}
        report.timings["codemap"] = clock() - t0
    return report


def structure_dict(report: AnalysisReport) -> Optional[dict]:
    return None if report.gd is None else gd_to_dict(report.gd)
