import pytest

from padiclie.errors import CapExceededError, HypothesisViolatedError
from padiclie.finite_cyclic import (
    Echelon,
    build_ext,
    bracket_span_check,
    fp_irreducible,
    hilbert90_additive_check,
    nonfixed_witness,
    residue_lemmas_certificate,
    scaled_subspace_sum_full,
    skew_image_check,
    skew_image_check_dual,
    special_residue_basis,
    trace_form_nondegenerate,
    trace_zero_space,
)

GRID = [(p, f, n) for (p, f) in [(2, 1), (3, 1), (2, 2), (5, 1)] for n in (2, 3, 4)]


def test_build_examples():
    e = build_ext(2, 1, 2)
    assert e.order == 4 and e.q == 2
    assert build_ext(3, 1, 3).order == 27
    assert build_ext(2, 2, 2).order == 16
    with pytest.raises(ValueError):
        build_ext(4, 1, 2)


def test_standard_polynomials():
    assert fp_irreducible(2, 2) == [1, 1, 1]
    assert fp_irreducible(2, 3) == [1, 1, 0, 1]


def test_frobenius_generates_and_trace_surjective():
    for p, f, n in GRID:
        e = build_ext(p, f, n)
        gen = e.decode(e.q)  # the adjoined root
        img = gen
        fixed_early = False
        for j in range(1, n):
            img = e.frobenius(img)
            if j < n and img == gen and j != n:
                fixed_early = fixed_early or (j < n)
        assert e.theta_pow(gen, n) == gen
        traces = {e.trace(x) for x in e.elements()}
        assert len(traces) == e.q  # surjective onto the base


def test_trace_zero_dimension_and_f4_example():
    e = build_ext(2, 1, 2)
    f0 = trace_zero_space(e)
    assert len(f0.basis) == 1
    # in F4/F2 the trace kernel is {0, 1}
    assert f0.basis[0] == e.one
    assert len(trace_zero_space(build_ext(3, 1, 2)).basis) == 1
    assert trace_zero_space(build_ext(5, 1, 1)).basis == ()


def test_hilbert90_grid():
    for p, f, n in GRID:
        assert hilbert90_additive_check(build_ext(p, f, n))
    assert hilbert90_additive_check(build_ext(3, 1, 1))  # n = 1 edge


def test_skew_image_all_units():
    for p, f, n in GRID:
        e = build_ext(p, f, n)
        for a in range(1, e.order):
            assert skew_image_check(e, a), (p, f, n, a)
            assert skew_image_check_dual(e, a), (p, f, n, a)
    with pytest.raises(HypothesisViolatedError):
        skew_image_check(build_ext(2, 1, 2), 0)


def test_bracket_span_admissible_k():
    for p, f, n in GRID:
        e = build_ext(p, f, n)
        for k in range(n):
            if (k + 1) % n == 0:
                with pytest.raises(HypothesisViolatedError):
                    bracket_span_check(e, k)
            else:
                assert bracket_span_check(e, k), (p, f, n, k)


def test_nonfixed_witness():
    e9 = build_ext(3, 1, 2)
    w = nonfixed_witness(e9, 1)
    assert e9.frobenius(w) != w and e9.trace(w) == e9.base.zero
    e64 = build_ext(2, 2, 3)
    assert nonfixed_witness(e64, 1) is not None
    with pytest.raises(HypothesisViolatedError):
        nonfixed_witness(build_ext(2, 1, 2), 1)
    with pytest.raises(HypothesisViolatedError):
        nonfixed_witness(e9, 0)


def test_special_basis_examples():
    # F4/F2: characteristic divides the degree, so the second element is 1
    e4 = build_ext(2, 1, 2)
    taus = special_residue_basis(e4)
    assert taus[1] == e4.one
    assert e4.trace(taus[0]) != e4.base.zero
    # F9/F3: t0 = 1 and t1 spans the trace kernel
    e9 = build_ext(3, 1, 2)
    taus = special_residue_basis(e9)
    assert taus[0] == e9.one
    assert e9.trace(taus[1]) == e9.base.zero
    # F27/F3: characteristic divides the degree; t1 = 1 and t2 outside F3
    e27 = build_ext(3, 1, 3)
    taus = special_residue_basis(e27)
    assert taus[1] == e27.one
    assert not e27.in_base(taus[2])


def test_special_basis_whole_grid():
    for p, f, n in GRID:
        special_residue_basis(build_ext(p, f, n))  # raises on any violation


def test_trace_form_nondegenerate_grid():
    for p, f, n in GRID:
        assert trace_form_nondegenerate(build_ext(p, f, n))


def test_hyperplane_scaling_property():
    # xi0*V + xi1*V = F for independent xi0, xi1 and V of codimension 1
    for p, f, n in GRID:
        if (p, n) == (2, 2):
            continue
        e = build_ext(p, f, n)
        v = trace_zero_space(e).basis
        taus = special_residue_basis(e)
        assert scaled_subspace_sum_full(e, e.one, taus[n - 1], v)


def test_grid_cap():
    big = build_ext(5, 1, 5)  # 3125 elements
    with pytest.raises(CapExceededError):
        big.tables()


def test_echelon_span():
    e = build_ext(3, 1, 2)
    span = Echelon(e.base, 2)
    assert span.insert(e.one)
    assert not span.insert(e.one)
    assert span.dim == 1


def test_certificate_grid():
    for p, f, n in GRID:
        cert = residue_lemmas_certificate(p, f, n)
        assert cert.status == "verified", (p, f, n, cert.witnesses[:3])
        assert cert.checked > 0
