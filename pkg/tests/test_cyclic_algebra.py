import random

import pytest

from padiclie.cyclic_algebra import (
    build_order,
    build_sl1_lattice,
    commutator_lattice_sl1,
    derived_lattice,
    expected_commutator_lattice,
)
from padiclie.errors import HypothesisViolatedError
from padiclie.lattices import Lattice, lattice_equal, lattice_index

PREC = 12


def _sqrt2_order():
    return build_order(5, 1, 1, 2, PREC, unramified_poly=[-2, 0, 1])


def test_twisted_product_relations():
    order = _sqrt2_order()
    ext, k = order.ext, order.k
    xi = ext.gen()  # sqrt(2), trace zero
    big_pi = order.monomial(ext.one, 1)
    # P * alpha = theta(alpha) * P
    lhs = order.mul(big_pi, order.monomial(xi, 0))
    rhs = order.monomial(ext.theta(xi), 1)
    assert order.is_zero_nominal(order.sub(lhs, rhs))
    # P^2 = pi
    sq = order.mul(big_pi, big_pi)
    assert order.is_zero_nominal(order.sub(sq, order.monomial(ext.embed(k.pi()), 0)))
    # (alpha P)(beta P) = alpha theta(beta) pi
    a, b = xi, ext.add(ext.one, xi)
    lhs = order.mul(order.monomial(a, 1), order.monomial(b, 1))
    rhs = order.monomial(ext.scalar(k.pi(), ext.mul(a, ext.theta(b))), 0)
    assert order.is_zero_nominal(order.sub(lhs, rhs))


def test_bracket_examples():
    order = _sqrt2_order()
    ext, k = order.ext, order.k
    xi = ext.gen()
    big_pi = order.monomial(ext.one, 1)
    # [P, P] = 0
    assert order.is_zero_nominal(order.bracket(big_pi, big_pi))
    # [xi, P] = (xi - theta(xi)) P = 2 xi P
    br = order.bracket(order.monomial(xi, 0), big_pi)
    want = order.monomial(ext.scalar(k.from_int(2), xi), 1)
    assert order.is_zero_nominal(order.sub(br, want))
    # [P, xi P] = (theta(xi) - xi) pi = -2 pi xi
    br = order.bracket(big_pi, order.monomial(xi, 1))
    want = order.monomial(ext.scalar(k.mul(k.from_int(-2), k.pi()), xi), 0)
    assert order.is_zero_nominal(order.sub(br, want))


def test_reduced_trace_examples():
    order = _sqrt2_order()
    ext, k = order.ext, order.k
    for j in range(1, order.n):
        assert order.reduced_trace(order.monomial(ext.one, j)) == k.zero
    assert order.reduced_trace(order.one) == k.from_int(order.n)
    # t(3 + sqrt2 + 2P) = T(3 + sqrt2) = 6
    x = order.add(
        order.monomial(ext.add(ext.embed(k.from_int(3)), ext.gen()), 0),
        order.monomial(ext.scalar(k.from_int(2), ext.one), 1),
    )
    assert order.reduced_trace(x) == k.from_int(6)


def test_trace_is_symmetric_and_kills_brackets():
    rng = random.Random(17)
    order = build_order(3, 1, 1, 2, PREC)
    ext, k = order.ext, order.k

    def rnd():
        return tuple(
            tuple(k.from_int(rng.randrange(0, 27)) for _ in range(order.n))
            for _ in range(order.n)
        )

    pm = k.p**k.prec
    for _ in range(10):
        a, b = rnd(), rnd()
        tab = order.reduced_trace(order.mul(a, b))
        tba = order.reduced_trace(order.mul(b, a))
        assert k.eq_nominal(tab, tba)
        tbr = order.reduced_trace(order.bracket(a, b))
        assert all(c % pm == 0 for c in tbr)


def test_asso_on_random_triples():
    rng = random.Random(23)
    order = build_order(2, 1, 1, 3, PREC)
    k = order.k

    def rnd():
        return tuple(
            tuple(k.from_int(rng.randrange(0, 8)) for _ in range(order.n))
            for _ in range(order.n)
        )

    for _ in range(8):
        a, b, c = rnd(), rnd(), rnd()
        left = order.mul(order.mul(a, b), c)
        right = order.mul(a, order.mul(b, c))
        assert order.is_zero_nominal(order.sub(left, right))


def test_rank_formula():
    assert build_sl1_lattice(build_order(3, 1, 1, 1, PREC)).rank == 0
    assert build_sl1_lattice(build_order(5, 1, 1, 2, PREC)).rank == 3
    assert build_sl1_lattice(build_order(2, 1, 1, 3, PREC)).rank == 8
    assert build_sl1_lattice(build_order(2, 1, 2, 2, PREC)).rank == 6


def test_basis_membership_and_grading():
    sl1 = build_sl1_lattice(build_order(2, 1, 1, 3, PREC))
    order = sl1.order
    pm = order.k.p**order.k.prec
    for i in range(sl1.rank):
        b = sl1.basis_element(i)
        tr = order.reduced_trace(b)
        assert all(c % pm == 0 for c in tr)
    # tensor antisymmetry
    for i in range(sl1.rank):
        for j in range(sl1.rank):
            assert all(
                (a + b) % pm == 0
                for a, b in zip(sl1.tensor[i][j], sl1.tensor[j][i])
            )


def test_commutator_lattice_shapes():
    # d = 1 instances plus the ramified inert square
    for p, e, f, n in [(5, 1, 1, 2), (3, 1, 1, 2), (2, 1, 1, 3), (3, 1, 1, 4),
                       (2, 2, 1, 3)]:
        sl1 = build_sl1_lattice(build_order(p, e, f, n, PREC))
        derived = commutator_lattice_sl1(sl1)
        assert lattice_equal(derived, expected_commutator_lattice(sl1))
        assert lattice_index(sl1.ambient(), derived) == f * (n - 1)


def test_commutator_refuses_2_2():
    sl1 = build_sl1_lattice(build_order(2, 1, 1, 2, PREC))
    with pytest.raises(HypothesisViolatedError):
        commutator_lattice_sl1(sl1)
    # the unasserted span still exists and is full rank
    assert derived_lattice(sl1).rank == 3


def test_coords_roundtrip_and_tensor_consistency():
    rng = random.Random(5)
    sl1 = build_sl1_lattice(build_order(5, 1, 1, 2, PREC))
    mod = 5**PREC
    for _ in range(10):
        u = [rng.randrange(0, 5**3) for _ in range(sl1.rank)]
        v = [rng.randrange(0, 5**3) for _ in range(sl1.rank)]
        via_tensor = sl1.bracket_coords(u, v)
        direct = sl1.to_coords(sl1.order.bracket(sl1.from_coords(u), sl1.from_coords(v)))
        assert [a % mod for a in via_tensor] == [a % mod for a in direct]
