import json

import pytest
from hypothesis import given
from hypothesis import strategies as st

from padiclie.errors import (
    DegenerateError,
    NonCanonicalInputError,
    NotSubmoduleError,
)
from padiclie.lattices import (
    Lattice,
    MaxSubmoduleParam,
    canonical_param,
    enumerate_maximal_submodules,
    lattice_coordinates,
    lattice_equal,
    lattice_from_generators,
    lattice_from_json,
    lattice_index,
    lattice_membership,
    lattice_to_json,
    param_equivalent,
    relative_invariant_exponents,
    submodule_from_param,
)


def test_from_generators_examples():
    l = lattice_from_generators(2, 12, [[2, 1], [0, 1], [4, 0]])
    assert l.basis.row_list() == [[2, 0], [0, 1]]
    std = lattice_from_generators(5, 12, [[1, 0], [0, 1]])
    assert lattice_equal(std, Lattice.standard(5, 12, 2))
    scaled = lattice_from_generators(5, 12, [[1, 0], [0, 1]], scale=1)
    assert scaled.scale == 1
    assert lattice_membership(scaled, [1, 0], vscale=1)


def test_degenerate_generators_rejected():
    with pytest.raises(DegenerateError):
        lattice_from_generators(2, 12, [[2, 4], [1, 2]])


def test_index_examples():
    z2 = Lattice.standard(2, 12, 2)
    assert lattice_index(z2, lattice_from_generators(2, 12, [[2, 0], [0, 2]])) == 2
    assert lattice_index(z2, z2) == 0
    assert lattice_index(z2, lattice_from_generators(2, 12, [[1, 1], [0, 2]])) == 1
    with pytest.raises(NotSubmoduleError):
        lattice_index(lattice_from_generators(2, 12, [[2, 0], [0, 2]]), z2)


def test_membership_examples():
    m = lattice_from_generators(2, 12, [[2, 0], [0, 1]])
    assert lattice_membership(m, [2, 0])
    assert not lattice_membership(m, [1, 0])
    assert lattice_membership(m, [0, 0])


def test_relative_exponents_examples():
    z = Lattice.standard(5, 12, 2)
    m = lattice_from_generators(5, 12, [[1, 0], [0, 5]])
    assert relative_invariant_exponents(z, m) == (0, 1)
    scaled = lattice_from_generators(5, 12, [[1, 0], [0, 5**3]], scale=1)
    assert relative_invariant_exponents(z, scaled) == (-1, 2)
    z2 = Lattice.standard(2, 12, 2)
    m2 = lattice_from_generators(2, 12, [[1, 1], [1, 3]])
    assert relative_invariant_exponents(z2, m2) == (0, 1)


@given(st.sampled_from([2, 3, 5]), st.integers(-3, 3))
def test_relative_exponents_of_scaled_self(p, s):
    l = lattice_from_generators(p, 12, [[1, 2], [0, 1]])
    assert relative_invariant_exponents(l, l) == (0, 0)
    assert relative_invariant_exponents(l, l.scaled(s)) == (s, s)


def test_exponent_sum_matches_determinant():
    import random

    rng = random.Random(5)
    for _ in range(30):
        p = rng.choice([2, 3, 5])
        k = rng.randrange(1, 4)
        rows = [[rng.randrange(0, p**5) for _ in range(k)] for _ in range(k)]
        try:
            m = lattice_from_generators(p, 12, rows, scale=rng.randrange(-1, 2))
        except DegenerateError:
            continue
        l = Lattice.standard(p, 12, k)
        exps = relative_invariant_exponents(l, m)
        assert sum(exps) == m.det_valuation() - k * m.scale


def test_enumeration_counts_and_distinctness():
    for p, rank, want in [(2, 2, 3), (5, 3, 31), (2, 8, 255)]:
        l = Lattice.standard(p, 10, rank)
        subs = list(enumerate_maximal_submodules(l))
        assert len(subs) == want
        seen = {(s.basis.entries, s.scale) for _, s in subs}
        assert len(seen) == want
        for _, s in list(subs)[:16]:
            assert lattice_index(l, s) == 1


def test_enumeration_rank2_p2_bases():
    l = Lattice.standard(2, 10, 2)
    bases = sorted(tuple(map(tuple, s.basis.row_list())) for _, s in
                   enumerate_maximal_submodules(l))
    assert bases == sorted([
        ((2, 0), (0, 1)),
        ((1, 0), (0, 2)),
        ((1, 1), (0, 2)),
    ])


def test_submodule_from_param_example():
    # rank 2, p = 3, mu = 0, b_1 = 2: span of 3*x0 and x1 + 2*x0
    l = Lattice.standard(3, 10, 2)
    param = MaxSubmoduleParam(0, (2,))
    sub = submodule_from_param(l, param)
    direct = lattice_from_generators(3, 10, [[3, 0], [2, 1]])
    assert lattice_equal(sub, direct)


def test_param_equivalence_examples():
    # same pivot: b-values matter mod p only
    assert param_equivalent(MaxSubmoduleParam(0, (2,)),
                            MaxSubmoduleParam(0, (5,)), 3)
    # distinct pivots at p = 2: b1 = 1 vs c0 = 1 name the same plane
    a = MaxSubmoduleParam(0, (1,))
    b = MaxSubmoduleParam(1, (1,))
    assert param_equivalent(a, b, 2)
    l = Lattice.standard(2, 10, 2)
    assert lattice_equal(submodule_from_param(l, a), submodule_from_param(l, b))


def test_param_equivalence_matches_lattice_equality():
    # cross-check over every pair of parameters at small size
    from itertools import product

    p, rank = 3, 2
    l = Lattice.standard(p, 10, rank)
    params = []
    for mu in range(rank):
        for b in product(range(p), repeat=rank - 1):
            params.append(MaxSubmoduleParam(mu, b))
    for a in params:
        for b in params:
            same = lattice_equal(submodule_from_param(l, a),
                                 submodule_from_param(l, b))
            assert same == param_equivalent(a, b, p), (a, b)


def test_canonical_param_roundtrip():
    p = 5
    l = Lattice.standard(p, 10, 3)
    for param, sub in enumerate_maximal_submodules(l):
        assert canonical_param(param, p) == param
        twisted = MaxSubmoduleParam(param.mu, tuple((x + p) % (p * p) for x in param.b))
        assert param_equivalent(param, canonical_param(twisted, p), p)


def test_coordinates_roundtrip():
    l = lattice_from_generators(3, 12, [[3, 1], [0, 1]])
    # canonical basis is {(3, 0), (0, 1)}
    assert l.basis.row_list() == [[3, 0], [0, 1]]
    assert lattice_coordinates(l, [3, 0]) == [1, 0]
    assert lattice_coordinates(l, [3, 2]) == [1, 2]
    with pytest.raises(NotSubmoduleError):
        lattice_coordinates(l, [1, 0])


def test_json_roundtrip_and_rejection():
    l = lattice_from_generators(2, 12, [[2, 1], [0, 1]])
    obj = lattice_to_json(l)
    back = lattice_from_json(json.loads(json.dumps(obj)))
    assert lattice_equal(l, back)
    # non-canonical basis is rejected without the opt-in flag
    bad = dict(obj)
    bad["basis"] = [["2", "1"], ["0", "1"]]
    with pytest.raises(NonCanonicalInputError):
        lattice_from_json(bad)
    fixed = lattice_from_json(bad, normalize=True)
    assert lattice_equal(l, fixed)
    # content must live in the scale field
    unstripped = dict(obj)
    unstripped["basis"] = [["4", "0"], ["0", "2"]]
    with pytest.raises(NonCanonicalInputError):
        lattice_from_json(unstripped)
