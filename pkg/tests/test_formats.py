import json
from pathlib import Path

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from hapdisc.certificates import CheckReport, LowerBoundCert, check_transfer, detlb_certificate
from hapdisc.core import Coloring, DiscrepancyReport, SetSystem, SignMatrix, eval_discrepancy
from hapdisc.exact import disc_exact, find_large_det_subset, herdisc_exact
from hapdisc.formats import (
    FormatError,
    InvariantError,
    deserialize,
    from_csv,
    read_document,
    round_bound,
    serialize,
    to_csv,
)
from hapdisc.generators import gen_characters, gen_embedding, gen_hap, gen_subcubes, gen_sylvester
from hapdisc.heuristics import beck_fiala, random_coloring

GOLDEN = sorted((Path(__file__).parent / "golden").glob("*.json"))


@pytest.mark.parametrize("path", GOLDEN, ids=[p.name for p in GOLDEN])
def test_golden_round_trip(path):
    data = path.read_bytes()
    obj, meta = read_document(data)
    assert serialize(obj, meta) == data


def test_golden_subcubes_file():
    obj = deserialize((Path(__file__).parent / "golden" / "subcubes_d2.json").read_bytes())
    assert isinstance(obj, SetSystem) and obj.m == 9 and obj == gen_subcubes(2)


def test_documented_fields():
    w = json.loads(serialize(gen_embedding(2)))
    assert w["primes"] == ["2", "3", "5", "7"] and w["n"] == "21"
    c = serialize(detlb_certificate(gen_sylvester(2), kmax=4))
    assert b'"det":"16"' in c and b'"k":4' in c and b'"bound":1.0' in c
    doc = json.loads(serialize(gen_hap(4, "prefix")))
    assert list(doc)[:2] == ["kind", "version"] and doc["version"] == "1"
    assert doc["sets"][1] == {"name": "1:2", "members": [0, 1]}
    assert serialize(gen_subcubes(2)).endswith(b"\n")


def test_big_embedding_values_are_strings():
    doc = json.loads(serialize(gen_embedding(12)))
    assert int(doc["n"]) == gen_embedding(12).n > 2**53
    assert all(isinstance(e["b"], str) for e in doc["b_of_u"])


def test_round_bound_never_rounds_up():
    assert round_bound(1.0) == 1.0
    assert round_bound(0.7071067811865476) == 0.707106781186
    assert round_bound(2 / 3) <= 2 / 3
    for x in np.random.default_rng(0).uniform(0, 100, size=500):
        assert round_bound(float(x)) <= x


def _samples():
    g = gen_characters(3, 1)
    yield gen_subcubes(3)
    yield gen_hap(30, "multiples")
    yield SetSystem((), ())
    yield g
    yield gen_sylvester(3)
    yield SignMatrix(np.zeros((2, 0), dtype=int))
    yield random_coloring(17, 4)
    yield gen_embedding(3)
    yield gen_embedding(7)
    yield detlb_certificate(g)
    yield LowerBoundCert(3, (0, 1, 2), (2, 3, 4), -(10**40), 1.5)
    yield check_transfer(2, 1)
    yield CheckReport("x", False, "went wrong", 5, {"a": 1, "b": "z", "c": 0.5, "big": 10**30})
    yield eval_discrepancy(g, Coloring.ones(8))
    yield DiscrepancyReport(0, None)
    yield disc_exact(g)
    yield herdisc_exact(g)
    yield beck_fiala(gen_hap(20, "multiples"))
    yield find_large_det_subset(gen_characters(3, 1))


@pytest.mark.parametrize("obj", list(_samples()), ids=lambda o: type(o).__name__)
def test_round_trip(obj):
    data = serialize(obj, {"command": "t", "seed": 3})
    back, meta = read_document(data)
    assert meta == {"command": "t", "seed": 3}
    assert serialize(back, meta) == data
    assert serialize(deserialize(serialize(obj))) == serialize(obj)


@settings(max_examples=60, deadline=None)
@given(st.integers(1, 6), st.integers(0, 9), st.data())
def test_matrix_round_trip_random(r, c, data):
    rows = data.draw(st.lists(st.lists(st.sampled_from((-1, 0, 1)), min_size=c, max_size=c), min_size=r, max_size=r))
    m = SignMatrix(np.array(rows, dtype=int).reshape(r, c))
    assert deserialize(serialize(m)) == m


def _doc(obj):
    return json.loads(serialize(obj))


def test_invariant_violations():
    col = _doc(Coloring([1, -1, 1]))
    col["values"][1] = 0
    with pytest.raises(InvariantError, match="±1|-1"):
        deserialize(json.dumps(col))
    mat = _doc(gen_characters(2, 1))
    mat["entries"][1] = mat["entries"][1][:3]
    with pytest.raises(InvariantError):
        deserialize(json.dumps(mat))
    sys_ = _doc(gen_subcubes(2))
    sys_["sets"][2]["members"] = [1, 0]
    with pytest.raises(InvariantError, match="sorted"):
        deserialize(json.dumps(sys_))
    ver = _doc(gen_subcubes(1))
    ver["version"] = "2"
    with pytest.raises(FormatError):
        deserialize(json.dumps(ver))
    with pytest.raises(FormatError):
        deserialize(json.dumps({"kind": "mystery", "version": "1"}))


def test_parse_errors_carry_position():
    data = serialize(gen_subcubes(2))
    with pytest.raises(FormatError, match=r"parse error at line 1, column \d+"):
        deserialize(data[: len(data) // 2])
    with pytest.raises(FormatError):
        deserialize(b"")


def test_csv_is_loss_free():
    rep = eval_discrepancy(gen_subcubes(2), Coloring([1, -1, -1, 1]))
    back = from_csv(to_csv(rep))
    assert back == {"value": rep.value, "argmax_row": rep.argmax_row}
    empty = from_csv(to_csv(DiscrepancyReport(0, None)))
    assert empty["argmax_row"] is None
    chk = check_transfer(2, 1)
    back = from_csv(to_csv(chk))
    assert (back["name"], back["passed"], back["detail"], back["trials"]) == (chk.name, True, "", chk.trials)
    assert back["metrics.herdisc_characters"] == 2
    bad = CheckReport("c", False, 'has "quotes", commas\nand newline', 2, {"r": 0.25})
    back = from_csv(to_csv(bad))
    assert back["detail"] == bad.detail and back["passed"] is False and back["metrics.r"] == 0.25
    with pytest.raises(TypeError):
        to_csv(gen_subcubes(1))
