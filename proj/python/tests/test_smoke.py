import cmath

import pytest

import plgz


def test_classify_c4():
    d = {"type": "C", "n": 4, "colors": ["w"] * 4,
         "bonds": [[1, 2, 1], [2, 3, 1], [3, 4, 2, 3]], "arrows": [], "circled": 4}
    prof = plgz.classify(d)
    assert prof["rank"] == 4
    assert prof["type"] == "II"
    assert prof["one_type"] == "(A,1)"


def test_table_diagram_round_trip():
    d = plgz.table_diagram(6, 3)
    assert plgz.classify(d)["rank"] == 3


def test_forms_and_weil_index():
    inv = plgz.form_invariants(3, ["1", "1", "pi", "pi"])  # -1 is not a square at 3
    assert inv["witt_index"] == 0
    assert not inv["isotropic"]
    assert abs(plgz.weil_gamma(3, ["1", "eps"]) - 1) < 1e-12
    assert abs(abs(plgz.weil_gamma(5, ["pi"])) - 1) < 1e-12


def test_rho_reflection():
    for t in range(4):
        s = 0.3 + 0.7j
        at_pi = cmath.exp(0.4j)
        r = plgz.tate_rho(5, t, at_pi, s) * plgz.tate_rho(5, -t, 1 / at_pi, 1 - s)
        # the product is the value of the character at -1
        assert abs(abs(r) - 1) < 1e-9 and abs(r.imag) < 1e-9
        if t == 0:
            assert abs(r - 1) < 1e-9


def test_suites():
    for suite in ("table", "tate", "rank_one"):
        assert plgz.verify(suite, 3, 2)["pass"]


def test_bad_input():
    with pytest.raises(ValueError):
        plgz.form_invariants(3, ["zz"])
    with pytest.raises(ValueError):
        plgz.verify("nothing")


def test_census_partition():
    c = plgz.census(3, 2, True, 2)
    assert sum(row["count"] for row in c["counts"]) + c["tail"] == c["total"]
