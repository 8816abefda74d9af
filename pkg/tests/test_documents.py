import json
from pathlib import Path

import pytest
from hypothesis import given, strategies as st

from bilipfrac import fixtures
from bilipfrac.documents import (
    document_from_system,
    dumps,
    load_system,
    parse_ifs,
    parse_matrix_doc,
    parse_partition_doc,
    serialize_system,
)
from bilipfrac.errors import ParseError
from bilipfrac.ifs import compose_word

DATA = Path(__file__).resolve().parent.parent / "data"

FIXTURES = {
    "seven_eight": "seven_eight",
    "digits_135": "digits_135",
    "digits_145": "digits_145",
    "flipped_145": "flipped_145",
    "cantor": "cantor",
    "unit_interval": "unit_interval",
    "overlapping_interval": "overlapping_interval",
    "overlapping_dust": "overlapping_dust",
    "triangle": "triangle_system",
}


@pytest.mark.parametrize("stem", sorted(FIXTURES))
def test_data_files_match_fixtures(stem):
    text = (DATA / f"{stem}.json").read_text()
    sys = getattr(fixtures, FIXTURES[stem])()
    assert serialize_system(sys) == text
    loaded = load_system(str(DATA / f"{stem}.json"))
    assert loaded.maps == sys.maps and loaded.n == sys.n
    assert serialize_system(loaded) == text


def test_round_trip_is_byte_identical_modulo_key_order():
    doc = json.loads((DATA / "flipped_145.json").read_text())
    shuffled = json.dumps({k: doc[k] for k in reversed(list(doc))})
    again = serialize_system(parse_ifs(json.loads(shuffled)).to_system())
    assert again == dumps(doc)


def test_group_word_resolution():
    sys = load_system(str(DATA / "flipped_145.json"))
    assert len(sys.group) == 2
    assert compose_word(sys, (2,)).iso == 1


@given(st.lists(st.integers(-3, 3), min_size=2, max_size=4), st.integers(2, 6))
def test_random_line_systems_round_trip(coords, n):
    sys = fixtures.integer_line_system(n, 7, coords)
    text = serialize_system(sys)
    assert serialize_system(parse_ifs(json.loads(text)).to_system()) == text


def _base():
    return json.loads((DATA / "cantor.json").read_text())


@pytest.mark.parametrize("mutate, message", [
    (lambda d: d.pop("n"), "missing field 'n'"),
    (lambda d: d.update(schema_version=2), "unsupported schema_version"),
    (lambda d: d["lattice"].update(mode="weird"), "lattice mode"),
    (lambda d: d["maps"][0].update(b=[0, 1]), "lattice coordinates"),
    (lambda d: d["maps"][0].update(g=[0]), "out of range"),
    (lambda d: d.update(group_generators=[[[2]]]), "preserve"),
    (lambda d: d["lattice"].update(basis=[["x"]]), "lattice"),
    (lambda d: d.update(n=1), "n must be at least 2"),
    (lambda d: d["maps"][0].update(b=[0.5]), "expected an integer"),
])
def test_parse_errors(mutate, message):
    doc = _base()
    mutate(doc)
    with pytest.raises(ParseError, match=message):
        parse_ifs(doc).to_system()


def test_gram_mode_document():
    sys = fixtures.triangle_system()
    doc = document_from_system(sys)
    assert doc.lattice_mode == "gram"
    assert parse_ifs(doc.to_dict()).to_system().lattice.gram == sys.lattice.gram


def test_matrix_and_partition_documents():
    assert parse_matrix_doc({"matrix": [[1, 2], [3, 2]]}) == ((1, 2), (3, 2))
    assert parse_matrix_doc([[2]]) == ((2,),)
    with pytest.raises(ParseError):
        parse_matrix_doc({"matrix": [[1, -1], [0, 1]]})
    with pytest.raises(ParseError):
        parse_matrix_doc({"matrix": [[1, 2]]})
    coins, counts, b, c = parse_partition_doc(json.loads((DATA / "partition_2_5.json").read_text()))
    assert coins == (2, 5) and b == 200 and c == 2
    with pytest.raises(ParseError):
        parse_partition_doc({"coins": [2], "counts": [1, 2], "b": 1, "c": 1})


def test_invalid_json_file(tmp_path):
    p = tmp_path / "bad.json"
    p.write_text("{not json")
    with pytest.raises(ParseError, match="invalid JSON"):
        load_system(str(p))
    with pytest.raises(ParseError, match="cannot read"):
        load_system(str(tmp_path / "missing.json"))
