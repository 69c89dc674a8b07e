"""Maximal orders of cyclic division algebras and their trace-zero lattices.

An order element is a coefficient tuple (alpha_j) over O_F, representing
sum alpha_j P^j where P is the distinguished uniformizing element with
P^n = pi and P a = theta(a) P.  The trace-zero elements form a Z_p-Lie
lattice of rank d(n^2 - 1), realized here on the flat coordinate basis
eps * tau_i P^j with eps running over the distinguished Z_p-basis of O_K.
"""

from __future__ import annotations

from dataclasses import dataclass

from .errors import HypothesisViolatedError
from .lattices import Lattice, lattice_from_generators, lattice_index
from .local_fields import (
    LocalField,
    TauBasis,
    UnramifiedExt,
    build_local_field,
    build_unramified_ext,
    trace_and_zero_module,
)


class CyclicOrder:
    """The maximal order sum O_F P^j with P^n = pi, P a = theta(a) P."""

    def __init__(self, ext: UnramifiedExt):
        self.ext = ext
        self.k = ext.k
        self.n = ext.n
        self.zero = (ext.zero,) * self.n
        one = [ext.zero] * self.n
        one[0] = ext.one
        self.one = tuple(one)

    def monomial(self, alpha, j: int):
        """alpha * P^j for alpha in O_F."""
        out = [self.ext.zero] * self.n
        out[j % self.n] = alpha
        return tuple(out)

    def add(self, a, b):
        return tuple(self.ext.add(x, y) for x, y in zip(a, b))

    def sub(self, a, b):
        return tuple(self.ext.sub(x, y) for x, y in zip(a, b))

    def neg(self, a):
        return tuple(self.ext.neg(x) for x in a)

    def mul(self, a, b):
        """Twisted product: P^j alpha = theta^j(alpha) P^j and P^n = pi."""
        ext, n = self.ext, self.n
        out = [ext.zero] * n
        pi_of = ext.embed(self.k.pi())
        for j, aj in enumerate(a):
            if aj == ext.zero:
                continue
            for l, bl in enumerate(b):
                if bl == ext.zero:
                    continue
                term = ext.mul(aj, ext.theta(bl, j))
                tgt = j + l
                if tgt >= n:
                    term = ext.mul(term, pi_of)
                    tgt -= n
                out[tgt] = ext.add(out[tgt], term)
        return tuple(out)

    def bracket(self, a, b):
        return self.sub(self.mul(a, b), self.mul(b, a))

    def reduced_trace(self, a):
        """Trace of the degree-zero coefficient; an O_K element."""
        return self.ext.trace(a[0])

    def is_zero_nominal(self, a) -> bool:
        return all(self.ext.is_zero_nominal(x) for x in a)


def build_order(p: int, e: int, f: int, n: int, prec: int = 12,
                eisenstein=None, h0=None, unramified_poly=None) -> CyclicOrder:
    k = build_local_field(p, e, f, prec, eisenstein=eisenstein, h0=h0)
    ext = build_unramified_ext(k, n, unramified_poly=unramified_poly)
    return CyclicOrder(ext)


@dataclass(frozen=True)
class SL1Basis:
    """Flat Z_p coordinates for the trace-zero lattice of a cyclic order.

    The index set lam lists the pairs (i, j) with 0 <= i, j < n and
    (i, j) != (0, 0), ordered by (j, i); the O_K-basis element at eta is
    tau_{eta_0} P^{eta_1} and each O_K coordinate is flattened over the
    distinguished Z_p-basis of O_K, giving rank d(n^2 - 1).
    """

    order: CyclicOrder
    tau: TauBasis
    lam: tuple  # ordered index pairs
    rank: int
    tensor: tuple  # tensor[a][b] = coordinates of the bracket of basis a, b
    tau_inv: tuple  # inverse of the tau coordinate matrix over O_K

    @property
    def p(self) -> int:
        return self.order.k.p

    @property
    def prec(self) -> int:
        return self.order.k.prec

    def ambient(self) -> Lattice:
        return Lattice.standard(self.p, self.prec, self.rank)

    def basis_element(self, idx: int):
        k, d = self.order.k, self.order.k.d
        eta = self.lam[idx // d]
        eps_idx = idx % d
        eps = [0] * d
        eps[eps_idx] = 1
        alpha = self.order.ext.scalar(tuple(eps), self.tau.elements[eta[0]])
        return self.order.monomial(alpha, eta[1])

    def x_eta(self, eta):
        return self.order.monomial(self.tau.elements[eta[0]], eta[1])

    def tau_coords(self, alpha):
        """O_K coordinates of an O_F element over the tau basis."""
        k, n = self.order.k, self.order.n
        out = [k.zero] * n
        for i, c in enumerate(alpha):
            if c == k.zero:
                continue
            row = self.tau_inv[i]
            for j in range(n):
                if row[j] != k.zero:
                    out[j] = k.add(out[j], k.mul(c, row[j]))
        return out

    def ok_coords(self, x):
        """O_K coordinates of a trace-zero element over the x_eta basis."""
        k, n = self.order.k, self.order.n
        pm = k.p**k.prec
        out = []
        cs = [self.tau_coords(x[j]) for j in range(n)]
        if any(c % pm for c in cs[0][0]):
            raise ValueError("element has nonzero reduced trace at precision")
        for eta in self.lam:
            out.append(cs[eta[1]][eta[0]])
        return out

    def to_coords(self, x):
        """Flat Z_p coordinates of a trace-zero element."""
        flat = []
        for c in self.ok_coords(x):
            flat.extend(c)
        return flat

    def from_coords(self, vec):
        k, d = self.order.k, self.order.k.d
        out = self.order.zero
        for idx, c in enumerate(vec):
            if c:
                eta = self.lam[idx // d]
                eps = [0] * d
                eps[idx % d] = c
                alpha = self.order.ext.scalar(tuple(eps), self.tau.elements[eta[0]])
                out = self.order.add(out, self.order.monomial(alpha, eta[1]))
        return out

    def ad_rows(self, i: int):
        return self.tensor[i]

    def bracket_coords(self, u, v):
        """Bracket of two coordinate vectors through the structure tensor."""
        r = self.rank
        mod = self.p**self.prec
        out = [0] * r
        for i, ui in enumerate(u):
            if ui == 0:
                continue
            row = self.tensor[i]
            for j, vj in enumerate(v):
                if vj == 0:
                    continue
                cij = row[j]
                c = ui * vj
                for t in range(r):
                    if cij[t]:
                        out[t] = (out[t] + c * cij[t]) % mod
        return out


def _invert_unit_matrix(k: LocalField, rows):
    """Inverse of a square O_K matrix with unit determinant."""
    n = len(rows)
    work = [list(r) + [k.one if i == j else k.zero for j in range(n)]
            for i, r in enumerate(rows)]
    for col in range(n):
        piv = next(i for i in range(col, n) if k.val(work[i][col]) == 0)
        work[col], work[piv] = work[piv], work[col]
        inv = k.unit_inverse(work[col][col])
        work[col] = [k.mul(inv, x) for x in work[col]]
        for i in range(n):
            if i != col and work[i][col] != k.zero:
                c = work[i][col]
                work[i] = [k.sub(x, k.mul(c, y)) for x, y in zip(work[i], work[col])]
    return tuple(tuple(row[n:]) for row in work)


def build_sl1_lattice(order: CyclicOrder, tau: TauBasis | None = None,
                      validate: bool = True) -> SL1Basis:
    """Coordinates and structure constants of the trace-zero lattice.

    Verifies along the way (unless ``validate`` is off): every basis element
    has reduced trace zero, the tensor is antisymmetric, brackets of
    monomials match their closed form, and the Jacobi identity holds at
    precision.
    """
    ext, k, n = order.ext, order.k, order.n
    if tau is None:
        _, _, tau = trace_and_zero_module(ext)
    lam = tuple(sorted(
        ((i, j) for j in range(n) for i in range(n) if (i, j) != (0, 0)),
        key=lambda e: (e[1], e[0]),
    ))
    rank = k.d * (n * n - 1)
    if n == 1:
        return SL1Basis(order, tau, lam, 0, (), ())
    tau_rows = [list(t) for t in tau.elements]
    tau_inv = _invert_unit_matrix(k, tau_rows)
    sl1 = SL1Basis(order, tau, lam, rank, (), tau_inv)
    pm = k.p**k.prec
    basis = [sl1.basis_element(i) for i in range(rank)]
    for b in basis:
        tr = order.reduced_trace(b)
        if any(c % pm for c in tr):
            raise AssertionError("basis element has nonzero reduced trace")
    tensor = [[None] * rank for _ in range(rank)]
    zero_vec = tuple([0] * rank)
    for i in range(rank):
        tensor[i][i] = zero_vec
        for j in range(i + 1, rank):
            w = order.bracket(basis[i], basis[j])
            vec = tuple(c % pm for c in sl1.to_coords(w))
            tensor[i][j] = vec
            tensor[j][i] = tuple((-c) % pm for c in vec)
    tensor = tuple(tuple(row) for row in tensor)
    sl1 = SL1Basis(order, tau, lam, rank, tensor, tau_inv)
    if validate:
        _verify_monomial_brackets(sl1)
        _verify_jacobi(sl1)
    return sl1


def _verify_monomial_brackets(sl1: SL1Basis) -> None:
    """Brackets of monomials match (a theta^j(b) - b theta^k(a)) P^(j+k)."""
    order, ext = sl1.order, sl1.order.ext
    for (i1, j1) in sl1.lam:
        a = sl1.tau.elements[i1]
        for (i2, j2) in sl1.lam:
            b = sl1.tau.elements[i2]
            got = order.bracket(sl1.x_eta((i1, j1)), sl1.x_eta((i2, j2)))
            coeff = ext.sub(
                ext.mul(a, ext.theta(b, j1)), ext.mul(b, ext.theta(a, j2))
            )
            tgt = j1 + j2
            if tgt >= order.n:
                coeff = ext.mul(coeff, ext.embed(order.k.pi()))
                tgt -= order.n
            if not order.is_zero_nominal(order.sub(got, order.monomial(coeff, tgt))):
                raise AssertionError("monomial bracket deviates from closed form")


def _verify_jacobi(sl1: SL1Basis) -> None:
    r = sl1.rank
    mod = sl1.p**sl1.prec
    for i in range(r):
        ad_i = sl1.tensor[i]
        for j in range(i + 1, r):
            ad_j = sl1.tensor[j]
            cij = ad_i[j]
            for k in range(j + 1, r):
                acc = [0] * r
                w = ad_j[k]
                for m, wm in enumerate(w):
                    if wm:
                        row = ad_i[m]
                        for t in range(r):
                            if row[t]:
                                acc[t] += wm * row[t]
                w = ad_i[k]
                for m, wm in enumerate(w):
                    if wm:
                        row = ad_j[m]
                        for t in range(r):
                            if row[t]:
                                acc[t] -= wm * row[t]
                for m, wm in enumerate(cij):
                    if wm:
                        row = sl1.tensor[m][k]
                        for t in range(r):
                            if row[t]:
                                acc[t] -= wm * row[t]
                if any(a % mod for a in acc):
                    raise AssertionError(f"Jacobi fails on basis triple {(i, j, k)}")


def expected_commutator_lattice(sl1: SL1Basis) -> Lattice:
    """pi * (grade-zero part) plus all higher graded pieces, as a Z_p-lattice."""
    order, k = sl1.order, sl1.order.k
    gens = []
    pi_of = order.ext.embed(k.pi())
    for idx in range(sl1.rank):
        b = sl1.basis_element(idx)
        eta = sl1.lam[idx // k.d]
        if eta[1] == 0:
            b = tuple(order.ext.mul(pi_of, x) for x in b)
        gens.append(sl1.to_coords(b))
    return lattice_from_generators(sl1.p, sl1.prec, gens)


def derived_lattice(sl1: SL1Basis) -> Lattice:
    """Z_p-span of all pairwise brackets of the flat basis; full rank."""
    gens = []
    r = sl1.rank
    for i in range(r):
        for j in range(i + 1, r):
            gens.append(list(sl1.tensor[i][j]))
    return lattice_from_generators(sl1.p, sl1.prec, gens)


def commutator_lattice_sl1(sl1: SL1Basis) -> Lattice:
    """Z_p-span of all pairwise brackets of the flat basis.

    Asserts the graded closed form and the index p^(f(n-1)); refuses the
    excluded pair (p, n) = (2, 2).
    """
    p, n = sl1.p, sl1.order.n
    if (p, n) == (2, 2):
        raise HypothesisViolatedError("(p, n) = (2, 2) is excluded")
    derived = derived_lattice(sl1)
    expected = expected_commutator_lattice(sl1)
    if derived.basis.entries != expected.basis.entries or derived.scale != expected.scale:
        raise AssertionError("commutator lattice deviates from its graded form")
    idx = lattice_index(sl1.ambient(), derived)
    if idx != sl1.order.k.f * (n - 1):
        raise AssertionError("commutator index deviates from p^(f(n-1))")
    return derived
