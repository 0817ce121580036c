import json

import pytest

from bmcontact import catalog
from bmcontact import exterior as E
from bmcontact.contact import is_contact


def test_listing():
    names = catalog.list_entries()
    assert names == sorted(names)
    for want in ("s2xs1", "extended_phase_space_n1", "singular_reeb_n1", "mobius_ball_regular",
                 "torus3_b2", "klein_prequotient", "r4_slice_M1", "r4_slice_M2", "s3",
                 "darboux_1a_n1", "darboux_1b_n1", "darboux_2_n1", "appendixB_2q1_model"):
        assert want in names


def test_unknown_entry():
    with pytest.raises(catalog.UnknownEntryError):
        catalog.get("no_such_entry")


@pytest.mark.parametrize("name", catalog.list_entries())
def test_entry_verifies(name):
    rep = catalog.verify(name)
    failed = [r["expectation"] for r in rep.results if not r["passed"]]
    assert not failed, failed
    json.dumps(catalog.get(name).to_dict())


def test_product_is_sum_of_forms():
    ent = catalog.get("product_singular_reeb_r2")
    ch = ent.chart
    left = E.parse_form("B + x1*D(y1)", ch)
    right = E.parse_form("p*D(q)", ch)
    assert (ent.form - (left + right)).is_zero()
    assert is_contact(left + right).contact


def test_entry_documents_parse_back():
    ent = catalog.get("s2xs1")
    d = ent.to_dict()
    from bmcontact.chart import Chart
    ch = Chart.from_dict(d["chart"])
    assert (E.parse_form(d["form"], ch) - ent.form).is_zero()


def test_s2xs1_expectations_are_listed():
    names = [e.name for e in catalog.get("s2xs1").expectations]
    assert any("Theta = D(phi)^D(theta)" in n for n in names)
    assert any("zero clusters" in n for n in names)
