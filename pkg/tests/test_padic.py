import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from padiclie.errors import NotInvertibleError, PrecisionError, StructureMismatchError
from padiclie.padic import (
    PadicInt,
    PadicMatrix,
    ZpRing,
    hermite_normal_form,
    smith_normal_form,
)


def test_arithmetic_examples():
    assert (PadicInt(5, 4, 3) * PadicInt(5, 4, 2)).residue == 6
    assert (PadicInt(2, 3, 7) + PadicInt(2, 3, 1)).residue == 0
    assert (PadicInt(3, 2, 4) - PadicInt(3, 2, 7)).residue == 6


def test_arithmetic_mismatch_raises():
    with pytest.raises(StructureMismatchError):
        PadicInt(5, 4, 1) + PadicInt(5, 5, 1)
    with pytest.raises(StructureMismatchError):
        PadicInt(5, 4, 1) * PadicInt(3, 4, 1)


def test_valuation_examples():
    assert PadicInt(2, 10, 12).valuation() == 2
    assert PadicInt(5, 10, 1).valuation() == 0
    assert PadicInt(3, 6, 0).valuation() == 6  # zero sentinel


def test_unit_inverse_examples():
    assert PadicInt(5, 2, 2).unit_inverse().residue == 13
    assert PadicInt(2, 3, 3).unit_inverse().residue == 3
    with pytest.raises(NotInvertibleError):
        PadicInt(3, 1, 0).unit_inverse()


def test_nonprime_rejected():
    with pytest.raises(ValueError):
        PadicInt(6, 3, 1)


@given(st.sampled_from([2, 3, 5]), st.integers(0, 10**6), st.integers(0, 10**6))
def test_product_valuation(p, a, b):
    prec = 8
    x, y = PadicInt(p, prec, a), PadicInt(p, prec, b)
    assert (x * y).valuation() == min(x.valuation() + y.valuation(), prec)


@given(st.sampled_from([2, 3, 5]), st.integers(0, 10**9))
def test_unit_inverse_roundtrip(p, a):
    prec = 9
    x = PadicInt(p, prec, a)
    if x.valuation() == 0:
        assert (x * x.unit_inverse()).residue == 1


def test_hnf_examples():
    m = PadicMatrix.from_rows(2, 12, [[2, 1], [0, 1]])
    h, t = hermite_normal_form(m)
    assert h.row_list() == [[2, 0], [0, 1]]
    assert (t * m).entries == h.entries

    ident = PadicMatrix.identity(7, 8, 3)
    h, t = hermite_normal_form(ident)
    assert h.entries == ident.entries
    assert t.entries == ident.entries

    m = PadicMatrix.from_rows(3, 12, [[3, 0], [0, 3], [1, 1]])
    h, t = hermite_normal_form(m)
    assert h.row_list() == [[1, 1], [0, 3], [0, 0]]
    assert (t * m).entries == h.entries


def test_hnf_idempotent_and_row_space():
    rng = random.Random(7)
    for p in (2, 3, 5):
        for _ in range(20):
            rows = [[rng.randrange(0, p**6) for _ in range(3)] for _ in range(4)]
            m = PadicMatrix.from_rows(p, 10, rows)
            h, t = hermite_normal_form(m)
            h2, _ = hermite_normal_form(h)
            assert h2.entries == h.entries
            # row spaces agree: stacking either way changes nothing
            both = PadicMatrix.from_rows(p, 10, h.row_list() + m.row_list())
            hb, _ = hermite_normal_form(both)
            assert hb.row_list()[: h.rows] == h.row_list()
            assert all(all(x == 0 for x in r) for r in hb.row_list()[h.rows:])


def test_snf_examples():
    vals, _, _ = smith_normal_form(PadicMatrix.from_rows(2, 12, [[2, 0], [0, 1]]))
    assert vals == (0, 1)
    vals, _, _ = smith_normal_form(PadicMatrix.from_rows(2, 12, [[1, 1], [1, 5]]))
    assert vals == (0, 2)
    m = PadicMatrix.from_rows(5, 12, [[5, 0], [0, 25]])
    vals, left, right = smith_normal_form(m)
    assert vals == (1, 2)
    diag = (left * m) * right
    assert diag.row_list() == [[5, 0], [0, 25]]


def test_snf_rank_deficiency_raises():
    with pytest.raises(PrecisionError):
        smith_normal_form(PadicMatrix.from_rows(2, 8, [[2, 2], [2, 2]]))


def _random_unimodular(rng, p, prec, k):
    """Product of elementary row operations; invertible over Z_p."""
    mod = p**prec
    rows = [[int(i == j) for j in range(k)] for i in range(k)]
    for _ in range(3 * k):
        i, j = rng.randrange(k), rng.randrange(k)
        if i == j:
            continue
        c = rng.randrange(0, p**3)
        for col in range(k):
            rows[i][col] = (rows[i][col] + c * rows[j][col]) % mod
    i, j = rng.randrange(k), rng.randrange(k)
    rows[i], rows[j] = rows[j], rows[i]
    return rows


def test_snf_invariance_under_unimodular():
    rng = random.Random(11)
    for trial in range(60):
        p = rng.choice([2, 3, 5])
        k = rng.randrange(2, 5)
        rows = [[rng.randrange(0, p**5) for _ in range(k)] for _ in range(k)]
        m = PadicMatrix.from_rows(p, 12, rows)
        try:
            vals, _, _ = smith_normal_form(m)
        except PrecisionError:
            continue
        u = _random_unimodular(rng, p, 12, k)
        v = _random_unimodular(rng, p, 12, k)
        um = PadicMatrix.from_rows(p, 12, u) * m * PadicMatrix.from_rows(p, 12, v)
        vals2, _, _ = smith_normal_form(um)
        assert vals2 == vals


def test_snf_divisor_product_matches_determinant():
    rng = random.Random(13)
    for _ in range(40):
        p = rng.choice([2, 3, 5])
        k = rng.randrange(1, 4)
        rows = [[rng.randrange(0, p**5) for _ in range(k)] for _ in range(k)]
        m = PadicMatrix.from_rows(p, 12, rows)
        dv = m.det_valuation()
        if dv >= 8:
            continue
        vals, _, _ = smith_normal_form(m)
        assert sum(vals) == dv


def test_matrix_shape_validation():
    with pytest.raises(StructureMismatchError):
        PadicMatrix(2, 4, 2, 2, (1, 2, 3))
    with pytest.raises(StructureMismatchError):
        PadicMatrix.from_rows(2, 4, [[1, 2], [3]])


def test_ring_split_and_div():
    ring = ZpRing(3, 6)
    q, r = ring.split(3**2 * 5 + 2, 2)
    assert r == 2 and q == 5
    assert ring.div_uni(27, 3) == 1
    with pytest.raises(PrecisionError):
        ring.div_uni(3, 2)
