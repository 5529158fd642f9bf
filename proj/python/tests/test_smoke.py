import math
import pathlib
from fractions import Fraction

import pytest

import matdens


def test_density_and_canonical_form():
    assert matdens.density("0 0;0 1", [[0, 0, 1], [0, 1, 1]]) == Fraction(1, 3)
    assert matdens.count_pattern("0 1", "0 1 1") == 2
    assert matdens.canonical_form("0 1;2 0") == [[0, 1], [1, 2]]
    assert matdens.density_isomorphic("0 0;0 1", "1 0;0 0")


def test_search_and_ferrers():
    value, witness = matdens.f_exact("0 0;0 1", 3)
    assert value == Fraction(5, 9)
    assert matdens.density("0 0;0 1", witness) == value
    assert matdens.ferrers_optimum(3)[0] == Fraction(5, 9)
    assert matdens.f_exact("0 0;1 1", 4)[0] == Fraction(2, 3)


def test_hasse():
    d = matdens.hasse_diagram(2, 4)
    assert len(d["nodes"]) == 7
    assert d["dot"].startswith("digraph")


def test_limit():
    value, err = matdens.functional_F_gstar()
    assert abs(value - 1 / (2 * math.e**2)) < 1e-6
    assert err < 1e-6
    assert abs(matdens.kenyon_canonical() - value) < 1e-6
    assert matdens.sample_matrix(2) == [[0, 1], [1, 1]]
    assert matdens.is_monotone(matdens.sample_matrix(30))
    assert matdens.functional_F_step([0, 1], [0.5]) == 0


def test_minimizer():
    assert matdens.theorem2_matrix(2) == [[0, 0], [1, 2]]
    assert matdens.minimizer_bound(2) == Fraction(1, 4)
    assert matdens.max_word_density("010", 3) == (Fraction(1), "010")


def test_flags_and_sdp():
    assert matdens.flag_count("0 1", 2, 3) == 96
    assert matdens.double_counting_check("0 0;0 1", 3, 4, "0 1 1 0 1;1 0 0 1 1;0 0 1 1 1;1 1 0 0 0;0 1 0 1 0")
    p = matdens.assemble_sdp()
    assert p.m == 4096
    assert p.block_sizes == [96, 96, 96, 96, -4097]
    assert p.variable_count == 22721
    assert matdens.parse_sdpa(p.to_sdpa()).to_sdpa() == p.to_sdpa()
    zero = matdens.zero_multiplier_bound(p)
    assert zero["f_upper"] == Fraction(1, 2)
    ident = matdens.verify_identity_certificate(p, 1000)
    assert ident["trCM"] == 10**6
    assert ident["f_upper"] == (18 - 1 + ident["epsilon"]) / 18


def test_stored_certificate():
    cert = pathlib.Path(__file__).resolve().parents[2] / "data" / "emptyset.cert"
    if not cert.exists():
        pytest.skip("stored certificate not shipped")
    rep = matdens.verify_certificate_file(matdens.assemble_sdp(), str(cert))
    assert rep["trCM"] == 13109511938436
    assert rep["f_upper"] <= Fraction(2720, 10000)
    assert rep["f_upper"] > 2 / math.e**2


def test_errors():
    with pytest.raises(ValueError):
        matdens.density("0 0 0;0 0 0;0 0 0", "0 1")
    with pytest.raises(matdens.BudgetExceeded):
        matdens.f_exact("0 0;0 1", 7, budget=1000)
    with pytest.raises(ValueError):
        matdens.parse_sdpa("garbage")
