"""JSON documents: systems, matrices and partition requests.

Rationals are written as ``"p/q"`` strings so files round-trip exactly.
Group elements of a map are given as words in the generators (indices
into ``group_generators``) and resolved against the closed group, so a
document can never smuggle in a matrix that was not validated.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Optional

from .errors import FractalError, ParseError
from .ifs import IfsSystem
from .lattice import LatticeModel, as_fraction, format_fraction, group_closure

SCHEMA_VERSION = 1


def _rational(value, where):
    try:
        return as_fraction(value)
    except (TypeError, ValueError, ZeroDivisionError) as exc:
        raise ParseError(f"{where}: {exc}") from None


def _integer(value, where) -> int:
    if isinstance(value, bool) or not isinstance(value, int):
        raise ParseError(f"{where}: expected an integer, got {value!r}")
    return value


def _require(doc, key, where="document"):
    if not isinstance(doc, dict):
        raise ParseError(f"{where}: expected an object")
    if key not in doc:
        raise ParseError(f"{where}: missing field {key!r}")
    return doc[key]


@dataclass(frozen=True)
class IfsDocument:
    ambient_dim: int
    lattice_mode: str        # "ambient" or "gram"
    lattice_data: tuple      # basis columns or Gram rows, as Fractions
    generators: tuple        # integer matrices in lattice coordinates
    n: int
    maps: tuple              # ((generator word), (b coords))

    def to_system(self) -> IfsSystem:
        try:
            if self.lattice_mode == "ambient":
                lat = LatticeModel.from_ambient(self.lattice_data)
            else:
                lat = LatticeModel(self.lattice_data)
            group = group_closure(lat, self.generators)
            maps = []
            for word, b in self.maps:
                h = 0
                for letter in word:
                    if not 0 <= letter < len(self.generators):
                        raise ParseError(f"generator index {letter} out of range")
                    h = group.compose(h, group.handle(self.generators[letter]))
                maps.append((h, b))
            return IfsSystem(lat, group, self.n, tuple(maps))
        except ParseError:
            raise
        except FractalError as exc:
            raise ParseError(str(exc)) from exc
        except ValueError as exc:
            raise ParseError(str(exc)) from exc

    def to_dict(self) -> dict:
        key = "basis" if self.lattice_mode == "ambient" else "gram"
        return {
            "schema_version": SCHEMA_VERSION,
            "ambient_dim": self.ambient_dim,
            "lattice": {"mode": self.lattice_mode, key: [[format_fraction(x) for x in row] for row in self.lattice_data]},
            "group_generators": [[list(row) for row in g] for g in self.generators],
            "n": self.n,
            "maps": [{"g": list(word), "b": list(b)} for word, b in self.maps],
        }


def parse_ifs(doc: dict) -> IfsDocument:
    version = _require(doc, "schema_version")
    if version != SCHEMA_VERSION:
        raise ParseError(f"unsupported schema_version {version!r}")
    ambient_dim = _integer(_require(doc, "ambient_dim"), "ambient_dim")
    lat = _require(doc, "lattice")
    mode = _require(lat, "mode", "lattice")
    if mode == "ambient":
        raw = _require(lat, "basis", "lattice")
    elif mode == "gram":
        raw = _require(lat, "gram", "lattice")
    else:
        raise ParseError(f"lattice mode must be 'ambient' or 'gram', got {mode!r}")
    if not isinstance(raw, list) or not raw or not all(isinstance(r, list) for r in raw):
        raise ParseError("lattice data must be a non-empty list of lists")
    data = tuple(tuple(_rational(x, "lattice") for x in row) for row in raw)
    rank = len(data)
    if mode == "ambient" and any(len(col) != ambient_dim for col in data):
        raise ParseError("basis columns must have ambient_dim entries")
    if mode == "gram" and ambient_dim < rank:
        raise ParseError("ambient_dim is smaller than the lattice rank")
    gens = []
    for k, g in enumerate(doc.get("group_generators", [])):
        if not isinstance(g, list) or len(g) != rank or any(not isinstance(r, list) or len(r) != rank for r in g):
            raise ParseError(f"generator {k} must be a {rank}x{rank} integer matrix")
        gens.append(tuple(tuple(_integer(x, f"generator {k}") for x in row) for row in g))
    n = _integer(_require(doc, "n"), "n")
    maps = []
    for k, entry in enumerate(_require(doc, "maps")):
        word = entry.get("g", []) if isinstance(entry, dict) else None
        if word is None or not isinstance(word, list):
            raise ParseError(f"map {k}: 'g' must be a list of generator indices")
        b = _require(entry, "b", f"map {k}")
        if not isinstance(b, list) or len(b) != rank:
            raise ParseError(f"map {k}: 'b' needs {rank} lattice coordinates")
        maps.append((tuple(_integer(x, f"map {k} g") for x in word), tuple(_integer(x, f"map {k} b") for x in b)))
    return IfsDocument(ambient_dim, mode, data, tuple(gens), n, tuple(maps))


def document_from_system(sys: IfsSystem) -> IfsDocument:
    """Document for a system, naming each map's isometry by its shortest word."""
    lat = sys.lattice
    if lat.ambient_basis is not None:
        mode, data, dim = "ambient", lat.ambient_basis, len(lat.ambient_basis[0])
    else:
        mode, data, dim = "gram", lat.gram, lat.rank
    group = sys.group
    maps = tuple((group.words[g], b) for g, b in sys.maps)
    return IfsDocument(dim, mode, data, group.generators, sys.n, maps)


def dumps(obj) -> str:
    """Canonical JSON: sorted keys, two-space indent, trailing newline."""
    return json.dumps(obj, indent=2, sort_keys=True) + "\n"


def serialize_system(sys: IfsSystem) -> str:
    return dumps(document_from_system(sys).to_dict())


def loads_json(text: str, where: str = "input"):
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"{where}: invalid JSON ({exc})") from None


def read_json(path: str):
    try:
        with open(path, encoding="utf-8") as fh:
            return loads_json(fh.read(), path)
    except OSError as exc:
        raise ParseError(f"cannot read {path}: {exc.strerror}") from None


def load_system(path: str) -> IfsSystem:
    return parse_ifs(read_json(path)).to_system()


# --------------------------------------------------------------------------
# matrices and partition requests


def parse_matrix_doc(doc) -> tuple:
    """``{"matrix": [[...]]}`` or a bare list of rows, non-negative integers."""
    rows = doc.get("matrix") if isinstance(doc, dict) else doc
    if not isinstance(rows, list) or not rows:
        raise ParseError("matrix must be a non-empty list of rows")
    p = len(rows)
    out = []
    for i, row in enumerate(rows):
        if not isinstance(row, list) or len(row) != p:
            raise ParseError(f"row {i + 1} must have {p} entries")
        vals = tuple(_integer(x, f"row {i + 1}") for x in row)
        if any(x < 0 for x in vals):
            raise ParseError(f"row {i + 1} has a negative entry")
        out.append(vals)
    return tuple(out)


def parse_partition_doc(doc) -> tuple:
    """``{"coins": [...], "counts": [...], "b": int, "c": int}``."""
    coins = tuple(_integer(x, "coins") for x in _require(doc, "coins"))
    counts = tuple(_integer(x, "counts") for x in _require(doc, "counts"))
    if len(coins) != len(counts):
        raise ParseError("coins and counts differ in length")
    b = _integer(_require(doc, "b"), "b")
    c = _integer(_require(doc, "c"), "c")
    return coins, counts, b, c


def eigen_doc(doc) -> Optional[tuple]:
    """Optional ``"m"`` and ``"v"`` fields of a matrix document."""
    if isinstance(doc, dict) and "m" in doc and "v" in doc:
        return _integer(doc["m"], "m"), tuple(_integer(x, "v") for x in doc["v"])
    return None
