import random

import pytest

from padiclie import dvr
from padiclie.errors import NotInvertibleError, PrecisionError
from padiclie.finite_cyclic import Echelon
from padiclie.lattices import (
    Lattice,
    enumerate_maximal_submodules,
    lattice_equal,
    lattice_from_generators,
    lattice_index,
    relative_invariant_exponents,
    shape_multiset,
)
from padiclie.local_fields import (
    OkRing,
    build_local_field,
    build_unramified_ext,
    dvr_lemmas_certificate,
    ok_lattice_from_generators,
    ok_lattice_index,
    pi_power_exponent_shape,
    pi_power_invariant_exponents,
    pi_power_zp_lattice,
    required_prec_for_exponents,
    standard_ok_zp_lattice,
    trace_and_zero_module,
)

PREC = 12


def test_build_examples():
    k = build_local_field(5, 1, 1, PREC)
    assert k.val(k.from_int(5)) == 1
    assert k.pi() == k.from_int(5)

    k221 = build_local_field(2, 2, 1, PREC)
    assert k221.val(k221.from_int(2)) == 2
    pi = k221.pi()
    assert k221.val(pi) == 1
    assert k221.mul(pi, pi) == k221.from_int(2)

    k212 = build_local_field(2, 1, 2, PREC)
    assert k212.kk.order == 4
    assert k212.val(k212.from_int(2)) == 1


def test_unit_inverse_and_division():
    for p, e, f in [(5, 1, 1), (2, 2, 1), (2, 1, 2), (3, 2, 2)]:
        k = build_local_field(p, e, f, PREC)
        u = k.from_int(p + 1)
        inv = k.unit_inverse(u)
        assert k.mul(u, inv) == k.one
        with pytest.raises(NotInvertibleError):
            k.unit_inverse(k.from_int(p))
        x = k.mul(k.pi_pow(3), k.from_int(7))
        y = k.div_pi(k.div_pi(x))
        assert k.val(y) == 1
        assert k.eq_nominal(k.mul(y, k.pi_pow(2)), x)


def test_custom_eisenstein():
    # x^2 - 2*3 is Eisenstein at 3 with a different constant term
    k = build_local_field(3, 2, 1, PREC, eisenstein=[-6, 0, 1])
    assert k.val(k.from_int(3)) == 2
    pi = k.pi()
    assert k.eq_nominal(k.mul(pi, pi), k.from_int(6))
    q = k.div_pi(k.from_int(6))
    assert k.eq_nominal(q, pi)


def test_frobenius_quadratic_over_q2():
    # s^2 + s + 1 over Z_2: the two roots sum to -1, so theta(s) = -1 - s
    k = build_local_field(2, 1, 1, PREC)
    ext = build_unramified_ext(k, 2)
    z = ext.frobenius_root()
    assert z == ext.sub(ext.neg(ext.one), ext.gen())
    # T(a + b s) = 2a - b
    a = ext.add(ext.embed(k.from_int(3)), ext.gen())
    assert ext.trace(a) == k.from_int(5)
    tau0_candidates = [t for t in trace_and_zero_module(ext)[2].elements]
    assert len(tau0_candidates) == 2


def test_frobenius_sqrt2_over_q5():
    k = build_local_field(5, 1, 1, PREC)
    ext = build_unramified_ext(k, 2, unramified_poly=[-2, 0, 1])
    z = ext.frobenius_root()
    assert z == ext.neg(ext.gen())  # the other square root of 2
    # T(a + b*sqrt2) = 2a
    a = ext.add(ext.embed(k.from_int(3)), ext.gen())
    assert ext.trace(a) == k.from_int(6)
    _, zero_mod, tau = trace_and_zero_module(ext)
    assert len(zero_mod) == 1
    assert tau.elements[0] == ext.one


def test_trivial_extension():
    k = build_local_field(5, 1, 1, PREC)
    ext = build_unramified_ext(k, 1)
    assert ext.trace(ext.one) == k.one
    _, zero_mod, tau = trace_and_zero_module(ext)
    assert zero_mod == () and len(tau.elements) == 1


def test_theta_order_and_trace_invariance():
    for p, e, f, n in [(2, 1, 1, 3), (3, 1, 1, 4), (2, 1, 2, 2), (3, 2, 1, 2)]:
        k = build_local_field(p, e, f, PREC)
        ext = build_unramified_ext(k, n)
        _, _, tau = trace_and_zero_module(ext)
        for t in tau.elements:
            img = ext.theta(t)
            assert k.eq_nominal(ext.trace(img), ext.trace(t))
        gen = ext.gen()
        assert ext.is_zero_nominal(ext.sub(ext.theta(gen, n), gen))


def test_tau_basis_divisible_degree():
    # p | n: the residue of tau_1 is 1 and tau_{n-1} leaves kappa_K
    k = build_local_field(2, 1, 1, PREC)
    ext = build_unramified_ext(k, 4)
    _, _, tau = trace_and_zero_module(ext)
    assert ext.pr(tau.elements[1]) == ext.kf.one
    assert not ext.kf.in_base(ext.pr(tau.elements[3]))


def test_residue_image_of_zero_module():
    # the trace-zero module surjects onto the residue trace kernel
    for p, e, f, n in [(2, 1, 1, 3), (5, 1, 1, 2), (2, 1, 2, 2)]:
        k = build_local_field(p, e, f, PREC)
        ext = build_unramified_ext(k, n)
        _, zero_mod, _ = trace_and_zero_module(ext)
        span = Echelon(k.kk, n)
        for w in zero_mod:
            span.insert(ext.pr(w))
        assert span.dim == n - 1


def _fp_rank(rows, p):
    rows = [list(r) for r in rows]
    rank = 0
    cols = len(rows[0]) if rows else 0
    for c in range(cols):
        piv = next((i for i in range(rank, len(rows)) if rows[i][c] % p), None)
        if piv is None:
            continue
        rows[rank], rows[piv] = rows[piv], rows[rank]
        inv = pow(rows[rank][c], -1, p)
        rows[rank] = [(x * inv) % p for x in rows[rank]]
        for i in range(len(rows)):
            if i != rank and rows[i][c] % p:
                coef = rows[i][c]
                rows[i] = [(x - coef * y) % p for x, y in zip(rows[i], rows[rank])]
        rank += 1
    return rank


def test_distinguished_product_basis_property():
    # alpha_i * beta_j is a Z_p-basis whenever the alphas reduce to a
    # residue basis and v(beta_j) = j
    rng = random.Random(3)
    for p, e, f in [(2, 2, 1), (3, 2, 1), (2, 2, 2), (2, 3, 1)]:
        k = build_local_field(p, e, f, PREC)
        for _ in range(5):
            alphas = []
            while len(alphas) < f:
                cand = tuple(rng.randrange(0, p**3) for _ in range(k.d))
                res = list(k.residue(cand))
                probe = [list(k.residue(a)) for a in alphas] + [res]
                if _fp_rank(probe, p) == len(probe):
                    alphas.append(cand)
            betas = []
            for j in range(e):
                unit = k.from_int(1 + p * rng.randrange(0, p**2))
                betas.append(k.mul(unit, k.pi_pow(j)))
            rows = [k.mul(a, b) for a in alphas for b in betas]
            lat = lattice_from_generators(p, PREC, [list(r) for r in rows])
            assert lattice_equal(lat, Lattice.standard(p, PREC, k.d))


def test_full_residue_image_forces_whole_ring():
    # an O_K-submodule of O_F with full residue image is all of O_F
    rng = random.Random(9)
    for p, e, f, n in [(2, 1, 1, 3), (3, 1, 1, 2), (2, 2, 1, 2)]:
        k = build_local_field(p, e, f, PREC)
        ext = build_unramified_ext(k, n)
        ring = OkRing(k)
        trials = 0
        while trials < 5:
            gens = []
            for _ in range(n + 1):
                gens.append([
                    k.from_int(rng.randrange(0, p**3)) for _ in range(n)
                ])
            span = Echelon(k.kk, n)
            for g in gens:
                span.insert(tuple(k.residue(c) for c in g))
            if span.dim < n:
                continue
            trials += 1
            lat = ok_lattice_from_generators(k, gens)
            std = ok_lattice_from_generators(k, dvr.identity_rows(ring, n))
            assert lat.scale == std.scale and lat.basis == std.basis


def test_pi_power_exponents_examples():
    k21 = build_local_field(2, 2, 1, 14)
    assert pi_power_invariant_exponents(k21, 3) == (1, 2)
    assert pi_power_invariant_exponents(k21, 0) == (0, 0)
    k12 = build_local_field(2, 1, 2, 14)
    assert pi_power_invariant_exponents(k12, 1) == (1, 1)


def test_pi_power_exponents_grid():
    for p in (2, 3):
        for e in (1, 2, 3):
            for f in (1, 2, 3):
                k = build_local_field(p, e, f, required_prec_for_exponents(e, 8, PREC))
                for s in range(-4, 9):
                    assert pi_power_invariant_exponents(k, s) == \
                        pi_power_exponent_shape(k, s), (p, e, f, s)


def test_dichotomy_example_2_2_1():
    k = build_local_field(2, 2, 1, PREC)
    std = standard_ok_zp_lattice(k)
    pi_lat = pi_power_zp_lattice(k, 1)
    # the uniformizer lattice itself: exponents (0, 0)
    assert relative_invariant_exponents(pi_lat, pi_lat) == (0, 0)
    # span{1, 2*pi}: in the (1, pi) coordinates this is rows (1,0), (0,2);
    # it misses pi, and its exponents against pi*O_K are (-1, 1)
    b = lattice_from_generators(2, PREC, [[1, 0], [0, 2]])
    assert relative_invariant_exponents(b, pi_lat) == (-1, 1)
    assert lattice_index(std, b) == 1


def test_dichotomy_exhaustive():
    for p, e, f in [(2, 2, 1), (2, 1, 2), (3, 2, 1), (3, 1, 2)]:
        k = build_local_field(p, e, f, PREC)
        std = standard_ok_zp_lattice(k)
        pi_lat = pi_power_zp_lattice(k, 1)
        branch1 = shape_multiset({0: k.d - f + 1, 1: f - 1})
        branch2 = shape_multiset({-1: 1, 0: k.d - f - 1, 1: f}) if e >= 2 else None
        n_eq = 0
        for _, b in enumerate_maximal_submodules(std):
            contains = dvr.lattice_contains(
                b.ring(), b.basis_rows(), b.scale,
                pi_lat.basis_rows(), pi_lat.scale)
            got = relative_invariant_exponents(b, pi_lat)
            assert got == (branch1 if contains else branch2), (p, e, f, got)
            if lattice_equal(b, pi_lat):
                n_eq += 1
        assert n_eq == (1 if f == 1 else 0)


def test_ok_lattice_index():
    k = build_local_field(3, 2, 1, PREC)
    ring = OkRing(k)
    std = ok_lattice_from_generators(k, dvr.identity_rows(ring, 2))
    pi_rows = [[k.pi(), k.zero], [k.zero, k.pi()]]
    sub = ok_lattice_from_generators(k, pi_rows)
    assert ok_lattice_index(std, sub) == 2


def test_dvr_certificates():
    for tup in [(2, 2, 1), (2, 1, 2), (3, 2, 1), (3, 1, 2)]:
        cert = dvr_lemmas_certificate(*tup)
        assert cert.status == "verified", (tup, cert.witnesses[:3])
