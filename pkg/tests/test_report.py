import math

import pytest
from hypothesis import given, settings, strategies as st

from genham.report import Check, ResidualReport

finite = st.floats(allow_nan=False, allow_infinity=False, width=64)


@pytest.mark.parametrize(
    "value, tolerance, relation, expected",
    [(1.0, 2.0, "le", True), (3.0, 2.0, "le", False), (3.0, 2.0, "ge", True), (1.0, 2.0, "ge", False),
     (math.nan, 1.0, "le", False), (math.inf, 1.0, "ge", False)],
)
def test_check_relation(value, tolerance, relation, expected):
    assert Check("c", value, tolerance, relation=relation).passed is expected


def test_unknown_relation():
    with pytest.raises(ValueError):
        Check("c", 1.0, 1.0, relation="eq").passed


def test_empty_report_is_undecided():
    assert ResidualReport("s").passed is None


def test_extend_and_lookup():
    inner = ResidualReport("inner")
    inner.add("a", 1.0, 2.0)
    inner.note("offset", 1 + 2j)
    outer = ResidualReport("outer")
    outer.extend(inner, prefix="x_")
    assert outer.check("x_a").value == 1.0
    assert outer.notes["x_offset"] == {"re": 1.0, "im": 2.0}
    with pytest.raises(KeyError):
        outer.check("a")


def test_scale_tolerances():
    rep = ResidualReport("s")
    rep.add("le", 1.0, 2.0)
    rep.add("ge", 1.0, 2.0, relation="ge")
    rep.scale_tolerances(4.0)
    assert rep.check("le").tolerance == 8.0
    assert rep.check("ge").tolerance == 0.5


@settings(max_examples=50, deadline=None)
@given(st.lists(st.tuples(st.text(st.characters(blacklist_categories=("Cc", "Cs", "Zl", "Zp", "Zs")), min_size=1, max_size=12).filter(str.isprintable), finite, finite, st.sampled_from(["le", "ge"])), max_size=8))
def test_json_roundtrip(rows):
    rep = ResidualReport("roundtrip")
    for name, value, tol, rel in rows:
        rep.add(name, value, tol, anchor="a", relation=rel)
    rep.note("n", [1, 2])
    back = ResidualReport.from_json(rep.to_json())
    assert back.to_json() == rep.to_json()
    assert back.to_csv() == rep.to_csv()


@pytest.mark.parametrize("name", ["", "a\x00b", "line\nbreak"])
def test_unprintable_names_rejected(name):
    with pytest.raises(ValueError):
        ResidualReport("s").add(name, 1.0, 1.0)


def test_schema_version_checked():
    data = ResidualReport("s").to_dict()
    data["schema_version"] = 99
    with pytest.raises(ValueError):
        ResidualReport.from_dict(data)


def test_csv_layout():
    rep = ResidualReport("s")
    rep.add("a", 0.5, 1.0)
    assert rep.to_csv() == "check,value,tolerance,pass\na,0.5,1.0,true\n"
    assert rep.summary_lines() == ["[PASS] a: 5.000e-01 <= 1.000e+00"]
