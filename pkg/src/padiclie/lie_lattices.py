"""Z_p-Lie lattices: commutators, s-invariants, and verification drivers.

A LieLattice fixes the coordinate system: the ambient standard lattice
Z_p^rank is the lattice itself, and the structure tensor gives brackets of
the standard basis vectors.  Sublattices are ordinary lattices in that
coordinate space; scaled copies p^m L are handled symbolically through the
scale field, so scaling costs no precision.
"""

from __future__ import annotations

import os
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

from . import dvr
from .certificates import (
    Certificate,
    FAILED,
    HYPOTHESIS_VIOLATED,
    PRECISION_INSUFFICIENT,
    VERIFIED,
)
from .cyclic_algebra import (
    SL1Basis,
    build_order,
    build_sl1_lattice,
    commutator_lattice_sl1,
    derived_lattice,
)
from .errors import (
    CapExceededError,
    HypothesisViolatedError,
    NotSubmoduleError,
    PrecisionError,
    StructureMismatchError,
)
from .lattices import (
    Lattice,
    lattice_coordinates,
    lattice_from_generators,
    lattice_equal,
    lattice_index,
    lattice_membership,
    lattice_sum,
    enumerate_maximal_submodules,
    relative_invariant_exponents,
    s_multiset,
    shape_multiset,
)
from .local_fields import OkRing, ok_lattice_from_generators, ok_lattice_equal, \
    ok_lattice_sum, ok_relative_exponents, OkLattice
from .padic import PadicMatrix, ZpRing, _int_det


@dataclass(frozen=True)
class LieLattice:
    """Standard lattice Z_p^rank with structure constants on its basis."""

    p: int
    prec: int
    rank: int
    tensor: tuple  # tensor[i][j] = coordinate vector of [b_i, b_j]

    def ambient(self) -> Lattice:
        return Lattice.standard(self.p, self.prec, self.rank)

    def bracket_vec(self, u, v):
        mod = self.p**self.prec
        out = [0] * self.rank
        for i, ui in enumerate(u):
            if ui == 0:
                continue
            row = self.tensor[i]
            for j, vj in enumerate(v):
                if vj == 0:
                    continue
                cij = row[j]
                c = ui * vj
                for t in range(self.rank):
                    if cij[t]:
                        out[t] = (out[t] + c * cij[t]) % mod
        return out

    def ad_matrix(self, i: int):
        return [list(row) for row in self.tensor[i]]

    def is_abelian(self) -> bool:
        return all(all(c == 0 for c in cij) for row in self.tensor for cij in row)


def lie_from_structure(p: int, prec: int, tensor, validate: bool = True) -> LieLattice:
    mod = p**prec
    rank = len(tensor)
    tens = tuple(
        tuple(tuple(c % mod for c in cell) for cell in row) for row in tensor
    )
    lie = LieLattice(p, prec, rank, tens)
    if validate:
        validate_structure(lie)
    return lie


def validate_structure(lie: LieLattice) -> None:
    """Antisymmetry and the Jacobi identity at precision; names offenders."""
    r, mod = lie.rank, lie.p**lie.prec
    for i in range(r):
        for j in range(r):
            cij, cji = lie.tensor[i][j], lie.tensor[j][i]
            if any((a + b) % mod for a, b in zip(cij, cji)):
                raise StructureMismatchError(
                    f"structure constants are not antisymmetric at ({i}, {j})"
                )
    for i in range(r):
        for j in range(i + 1, r):
            for k in range(j + 1, r):
                acc = lie.bracket_vec([int(t == i) for t in range(r)],
                                      lie.tensor[j][k])
                sub = lie.bracket_vec([int(t == j) for t in range(r)],
                                      lie.tensor[i][k])
                thr = lie.bracket_vec(list(lie.tensor[i][j]),
                                      [int(t == k) for t in range(r)])
                if any((a - b - c) % mod for a, b, c in zip(acc, sub, thr)):
                    raise StructureMismatchError(
                        f"Jacobi identity fails on basis triple ({i}, {j}, {k})"
                    )


def lie_from_sl1(sl1: SL1Basis) -> LieLattice:
    return LieLattice(sl1.p, sl1.prec, sl1.rank, sl1.tensor)


def build_model_lattice(kind: str, p: int, prec: int, d: int, s: int = 0) -> LieLattice:
    """The abelian lattice of rank d, or the metabelian one where the first
    basis vector acts on the rest by the scalar p^s."""
    if d < 1:
        raise ValueError("rank must be at least 1")
    zero = tuple([0] * d)
    if kind == "abelian":
        tensor = tuple(tuple(zero for _ in range(d)) for _ in range(d))
        return LieLattice(p, prec, d, tensor)
    if kind == "metabelian":
        if d < 2 or s < 0:
            raise ValueError("metabelian model needs d >= 2 and s >= 0")
        mod = p**prec
        tensor = [[list(zero) for _ in range(d)] for _ in range(d)]
        for i in range(1, d):
            tensor[0][i][i] = pow(p, s, mod)
            tensor[i][0][i] = (-pow(p, s, mod)) % mod
        return lie_from_structure(p, prec, tensor)
    raise ValueError(f"unknown model kind {kind!r}")


# --- spans (possibly rank-deficient sublattices) ---------------------------


@dataclass(frozen=True)
class Span:
    """Canonical span of vectors; rank may be below the ambient dimension."""

    p: int
    prec: int
    ambient: int
    scale: int
    rows: tuple

    @property
    def rank(self) -> int:
        return len(self.rows)

    def as_lattice(self) -> Lattice:
        if self.rank != self.ambient:
            raise NotSubmoduleError("span is not full rank at precision")
        return Lattice(
            self.p, self.prec, self.ambient, self.scale,
            PadicMatrix.from_rows(self.p, self.prec, [list(r) for r in self.rows]),
        )


def span_from_generators(p: int, prec: int, gens, scale: int, ambient: int) -> Span:
    ring = ZpRing(p, prec)
    if not gens:
        return Span(p, prec, ambient, 0, ())
    h, _, pivots = dvr.hermite(ring, [list(g) for g in gens])
    rows = h[: len(pivots)]
    if not rows:
        return Span(p, prec, ambient, 0, ())
    content = min(
        min((ring.val(x) for x in row if x != 0), default=ring.nominal) for row in rows
    )
    if content > 0:
        rows = [[ring.div_uni(x, content) for x in row] for row in rows]
        scale -= content
    return Span(p, prec, ambient, scale, tuple(tuple(r) for r in rows))


def span_of_lattice(l: Lattice) -> Span:
    return Span(l.p, l.prec, l.rank, l.scale, tuple(tuple(r) for r in l.basis_rows()))


def span_contains(s: Span, rows, rscale: int) -> bool:
    if not s.rows:
        ring = ZpRing(s.p, s.prec)
        return all(all(ring.canon_nominal(x) == 0 for x in row) for row in rows)
    return dvr.lattice_contains(
        ZpRing(s.p, s.prec), [list(r) for r in s.rows], s.scale, rows, rscale
    )


# --- commutators and s-invariants -------------------------------------------


def commutator_sublattice(lie: LieLattice, m: Lattice) -> Span:
    """Canonical span of all pairwise brackets of a basis of M.

    M must sit inside the ambient lattice (after scale adjustment); the
    result carries twice M's scale and may have lower rank.
    """
    amb = lie.ambient()
    if not dvr.lattice_contains(
        ZpRing(lie.p, lie.prec), amb.basis_rows(), amb.scale,
        m.basis_rows(), m.scale,
    ):
        raise NotSubmoduleError("sublattice is not inside the ambient lattice")
    rows = m.basis_rows()
    gens = []
    for i in range(m.rank):
        for j in range(i + 1, m.rank):
            w = lie.bracket_vec(rows[i], rows[j])
            if any(w):
                gens.append(w)
    return span_from_generators(lie.p, lie.prec, gens, 2 * m.scale, lie.rank)


def s_invariants(lie: LieLattice, m: Lattice):
    """Invariant exponents of [M, M] relative to M.

    Requires the commutator to span the full ambient space; otherwise the
    standing perfectness hypothesis is violated.
    """
    comm = commutator_sublattice(lie, m)
    if comm.rank != lie.rank:
        raise HypothesisViolatedError("perfectness hypothesis violated")
    return relative_invariant_exponents(m, comm.as_lattice())


def conjugate_lie(lie: LieLattice, u_rows) -> LieLattice:
    """Structure constants after the change of basis b'_i = sum u[i][k] b_k."""
    ring = ZpRing(lie.p, lie.prec)
    h, uinv, pivots = dvr.hermite(ring, [list(r) for r in u_rows], transform=True)
    if len(pivots) != lie.rank or any(v != 0 for _, _, v in pivots):
        raise StructureMismatchError("change of basis is not invertible over Z_p")
    # hermite(u) is the identity for unimodular u, so the transform is u^(-1)
    mod = lie.p**lie.prec
    tensor = []
    for i in range(lie.rank):
        row_out = []
        for j in range(lie.rank):
            w = lie.bracket_vec(u_rows[i], u_rows[j])
            new = [0] * lie.rank
            for k, wk in enumerate(w):
                if wk:
                    for tcol in range(lie.rank):
                        if uinv[k][tcol]:
                            new[tcol] = (new[tcol] + wk * uinv[k][tcol]) % mod
            row_out.append(tuple(new))
        tensor.append(tuple(row_out))
    return LieLattice(lie.p, lie.prec, lie.rank, tuple(tensor))


def sl1_killing_valuation(p: int, e: int, f: int, n: int, prec: int):
    """Gram determinant valuation of the trace-zero lattice's Killing form.

    Retries at raised working precision when the determinant valuation
    reaches the current cap; returns None only if it never resolves.
    """
    work = prec
    for _ in range(3):
        sl1 = build_sl1_lattice(build_order(p, e, f, n, work), validate=False)
        v = killing_form_valuation(lie_from_sl1(sl1))
        if v is not None:
            return v
        work = 2 * work + 8
    return None


def killing_form_valuation(lie: LieLattice):
    """Valuation of the Gram determinant of (x, y) -> tr(ad x ad y).

    Returns None when the form is degenerate at precision.
    """
    r = lie.rank
    if r == 0:
        return None
    ads = [lie.ad_matrix(i) for i in range(r)]
    gram = []
    for i in range(r):
        row = []
        for j in range(r):
            tr = 0
            for a in range(r):
                for b in range(r):
                    tr += ads[i][a][b] * ads[j][b][a]
            row.append(tr)
        gram.append(row)
    det = _int_det(gram)
    mod = lie.p**lie.prec
    det %= mod
    if det == 0:
        return None
    v = 0
    while det % lie.p == 0:
        det //= lie.p
        v += 1
    return v if v < lie.prec else None


# --- virtual endomorphisms ---------------------------------------------------


@dataclass(frozen=True)
class VirtualEndomorphism:
    """Algebra homomorphism from an index-p^k subalgebra into the lattice.

    ``rows`` are the images of the domain's basis points, as ambient
    coordinate vectors scaled by p^(-iscale).
    """

    lie: LieLattice
    domain: Lattice
    rows: tuple
    iscale: int
    index_exp: int

    def apply(self, vec, vscale: int = 0):
        coeffs = lattice_coordinates(self.domain, vec, vscale)
        mod = self.lie.p**self.lie.prec
        out = [0] * self.lie.rank
        for c, row in zip(coeffs, self.rows):
            if c:
                for t, x in enumerate(row):
                    if x:
                        out[t] = (out[t] + c * x) % mod
        return out, self.iscale

    def injective_at_precision(self) -> bool:
        ring = ZpRing(self.lie.p, self.lie.prec)
        vals, _, _, complete = dvr.smith(ring, [list(r) for r in self.rows])
        return complete

    def kernel_vector(self):
        """Domain coefficients of a kernel element, or None."""
        ring = ZpRing(self.lie.p, self.lie.prec)
        h, t, pivots = dvr.hermite(ring, [list(r) for r in self.rows], transform=True)
        if len(pivots) == len(self.rows):
            return None
        return list(t[len(pivots)])


def _point_rows(l: Lattice):
    """Integral coordinate vectors of the basis points of a sublattice of Z_p^r."""
    ring = ZpRing(l.p, l.prec)
    if l.scale > 0:
        raise NotSubmoduleError("lattice is not integral")
    shift = l.p ** (-l.scale)
    return [[(shift * x) % ring.mod for x in row] for row in l.basis_rows()]


def _scaled_vec_equal(p: int, prec: int, v1, s1: int, v2, s2: int) -> bool:
    mod = p**prec
    if s1 < s2:
        v1, s1, v2, s2 = v2, s2, v1, s1
    shift = p ** (s1 - s2)
    return all((a - shift * b) % mod == 0 for a, b in zip(v1, v2))


def virtual_endomorphism(lie: LieLattice, domain: Lattice, rows, iscale: int = 0) -> VirtualEndomorphism:
    """Validated virtual endomorphism: checks the domain is a subalgebra of
    finite index and that the map respects brackets on basis pairs."""
    amb = lie.ambient()
    k = lattice_index(amb, domain)
    comm = commutator_sublattice(lie, domain)
    if not span_contains(span_of_lattice(domain), [list(r) for r in comm.rows],
                         comm.scale):
        raise StructureMismatchError("domain is not closed under the bracket")
    phi = VirtualEndomorphism(lie, domain, tuple(tuple(r) for r in rows), iscale, k)
    pts = _point_rows(domain)
    for i in range(domain.rank):
        for j in range(i + 1, domain.rank):
            w = lie.bracket_vec(pts[i], pts[j])
            img_w, s_w = phi.apply(w)
            lhs = lie.bracket_vec(phi.rows[i], phi.rows[j])
            if not _scaled_vec_equal(lie.p, lie.prec, lhs, 2 * iscale, img_w, s_w):
                raise StructureMismatchError(
                    f"map is not a bracket homomorphism on basis pair ({i}, {j})"
                )
    return phi


@dataclass
class ChainResult:
    kind: str  # simple-to-depth | invariant-ideal | not-injective
    steps: int
    final_index_exp: int | None = None
    witness: Lattice | None = None
    kernel: list | None = None


def invariant_ideal_chain(lie: LieLattice, phi: VirtualEndomorphism,
                          depth: int) -> ChainResult:
    """Semi-decision for simplicity of a virtual endomorphism.

    Starting from the domain, repeatedly shrink to the largest sublattice
    closed under bracketing with the ambient lattice and under the map (the
    two-level iteration in terms of ideal closures stabilizes at the same
    greatest fixed point).  A stable nonzero lattice is a verified
    invariant-ideal witness; once the chain's index exceeds p^depth the
    verdict is simple-to-depth.  A non-injective map over just-infinite
    evidence short-circuits to not-injective.
    """
    p, prec, r = lie.p, lie.prec, lie.rank
    if not phi.injective_at_precision():
        full_comm = commutator_sublattice(lie, lie.ambient())
        evidence = killing_form_valuation(lie) is not None and full_comm.rank == r
        if evidence:
            return ChainResult("not-injective", 0, kernel=phi.kernel_vector())
    # the chain may legitimately reach indices near p^depth, so run its
    # lattice arithmetic with a thin guard band
    ring = ZpRing(p, prec, guard=2)
    amb_rows = dvr.identity_rows(ring, r)
    cur_rows = _full_rank_rows(ring, _point_rows(phi.domain))
    max_steps = prec * max(r, 1)
    for step in range(1, max_steps + 1):
        idx = dvr.lattice_index_exp(ring, amb_rows, 0, cur_rows, 0)
        if idx > depth:
            return ChainResult("simple-to-depth", step - 1, final_index_exp=idx)
        blocks = r + 1
        big_rows = []
        for row in cur_rows:
            img, s_img = phi.apply(row)
            if s_img > 0:
                img = _exact_scale_down(p, img, s_img, ring.mod)
            elif s_img < 0:
                shift = p ** (-s_img)
                img = [(x * shift) % ring.mod for x in img]
            cat = []
            for t in range(r):
                cat.extend(lie.bracket_vec(row, amb_rows[t]))
            cat.extend(img)
            big_rows.append(cat)
        stack = [list(row) for row in big_rows]
        nblock = len(cur_rows)
        for b in range(blocks):
            for jrow in cur_rows:
                full = [0] * (blocks * r)
                full[b * r : (b + 1) * r] = jrow
                stack.append(full)
        h, t, pivots = dvr.hermite(ring, stack, transform=True)
        kern = [t[i][:nblock] for i in range(len(pivots), len(stack))]
        gens = []
        for coeffs in kern:
            vec = [0] * r
            for c, jrow in zip(coeffs, cur_rows):
                if c:
                    for tt, x in enumerate(jrow):
                        if x:
                            vec[tt] = (vec[tt] + c * x) % ring.mod
            if any(ring.canon_nominal(x) for x in vec):
                gens.append(vec)
        if not gens:
            # the chain collapsed to zero: no nonzero invariant ideal exists
            return ChainResult("simple-to-depth", step, final_index_exp=None)
        new_rows = _full_rank_rows(ring, gens)
        if dvr.mat_equal_nominal(ring, new_rows, cur_rows):
            witness = lattice_from_generators(p, prec, new_rows, 0)
            _verify_invariant_ideal(lie, phi, witness)
            return ChainResult("invariant-ideal", step, witness=witness)
        cur_rows = new_rows
    raise PrecisionError("invariant-ideal chain exceeded its iteration cap")


def _full_rank_rows(ring, rows):
    """Canonical basis rows without content stripping; full rank required."""
    h, _, pivots = dvr.hermite(ring, rows)
    if len(pivots) != len(rows[0]):
        raise PrecisionError("chain lattice lost rank at precision")
    return h[: len(pivots)]


def _exact_scale_down(p: int, vec, s: int, mod: int):
    q = p**s
    out = []
    for x in vec:
        if x % q:
            raise PrecisionError("image point is not integral at precision")
        out.append((x // q) % mod)
    return out


def _verify_invariant_ideal(lie: LieLattice, phi: VirtualEndomorphism,
                            ideal: Lattice) -> None:
    dspan = span_of_lattice(phi.domain)
    ispan = span_of_lattice(ideal)
    pts = _point_rows(ideal)
    mod = lie.p ** (2 * lie.prec)
    if not span_contains(dspan, pts, 0):
        raise AssertionError("witness is not inside the domain")
    for row in pts:
        img, s_img = phi.apply(row)
        if s_img > 0:
            vec = _exact_scale_down(lie.p, img, s_img, mod)
        else:
            vec = [x * lie.p ** (-s_img) for x in img]
        if not span_contains(ispan, [vec], 0):
            raise AssertionError("witness is not stable under the map")
    for row in pts:
        for t in range(lie.rank):
            w = lie.bracket_vec(row, [int(x == t) for x in range(lie.rank)])
            if not span_contains(ispan, [w], 0):
                raise AssertionError("witness is not an ideal")


def index_stability_spotcheck(lie: LieLattice, phi: VirtualEndomorphism) -> bool:
    """Empirically: the image lattice has the same index as the domain."""
    if not phi.injective_at_precision():
        raise StructureMismatchError("map is not injective at precision")
    img = lattice_from_generators(lie.p, lie.prec, [list(r) for r in phi.rows],
                                  phi.iscale)
    amb = lie.ambient()
    return lattice_index(amb, img) == lattice_index(amb, phi.domain)


# --- n = 2 standard bases -----------------------------------------------------


@dataclass(frozen=True)
class StandardBasis:
    """Basis (e0, e1, e2) with [e_i, e_{i+1}] = u_{i+2} pi^{s_{i+2}} e_{i+2},
    all u_i units and -u_1 u_2 a non-square mod pi."""

    sl1: SL1Basis
    units: tuple  # (u0, u1, u2) as O_K elements
    exponents: tuple = (1, 0, 0)

    def basis_indices(self):
        lam = self.sl1.lam
        return tuple(lam.index(e) for e in ((1, 0), (0, 1), (1, 1)))


def standard_basis_n2(sl1: SL1Basis) -> StandardBasis:
    """Standard basis of the trace-zero lattice for n = 2, p odd.

    e0 = xi, e1 = P, e2 = xi P with xi the trace-zero unit of the tau
    basis; the units are read off the brackets and all invariants are
    verified, including the residue non-square test on -u1*u2.
    """
    order = sl1.order
    n, p = order.n, sl1.p
    if n != 2 or p == 2:
        raise HypothesisViolatedError("standard bases need n = 2 and p odd")
    ext, k = order.ext, order.k
    e = [sl1.x_eta((1, 0)), sl1.x_eta((0, 1)), sl1.x_eta((1, 1))]
    # u_i is read off [e_{i+1}, e_{i+2}] = u_i pi^{s_i} e_i
    targets = [((1, 0), 1), ((0, 1), 0), ((1, 1), 0)]
    units = [None, None, None]
    for i in range(3):
        br = order.bracket(e[(i + 1) % 3], e[(i + 2) % 3])
        eta, s_exp = targets[i]
        coeff = br[eta[1]]
        for j in range(n):
            if j != eta[1] and not ext.is_zero_nominal(br[j]):
                raise AssertionError("bracket leaves its graded component")
        cvec = sl1.tau_coords(coeff)
        pm = k.p**k.prec
        for t in range(n):
            if t != eta[0] and any(c % pm for c in cvec[t]):
                raise AssertionError("bracket coefficient leaves its tau ray")
        u = cvec[eta[0]]
        ring = OkRing(k)
        u = ring.div_uni(u, s_exp)
        if k.val(u) != 0:
            raise AssertionError("structure unit is not a unit")
        units[i] = u
    u0, u1, u2 = units
    minus_u1u2 = k.neg(k.mul(u1, u2))
    if _is_residue_square(k, minus_u1u2):
        raise AssertionError("-u1*u2 is a square mod pi")
    return StandardBasis(sl1, (u0, u1, u2))


def _is_residue_square(k, gamma) -> bool:
    r = k.residue(gamma)
    kk = k.kk
    return any(kk.mul(x, x) == r for x in (kk.element(i) for i in range(kk.order)))


# --- the O_K-side of the trace-zero lattice ----------------------------------


def ok_structure_tensor(sl1: SL1Basis):
    """Structure constants over O_K on the x_eta basis."""
    r = len(sl1.lam)
    order = sl1.order
    xs = [sl1.x_eta(e) for e in sl1.lam]
    tensor = [[None] * r for _ in range(r)]
    for i in range(r):
        for j in range(r):
            if i == j:
                tensor[i][j] = [order.k.zero] * r
            elif j > i:
                tensor[i][j] = sl1.ok_coords(order.bracket(xs[i], xs[j]))
            else:
                tensor[i][j] = [order.k.neg(c) for c in tensor[j][i]]
    return tensor


def ok_bracket_vec(sl1: SL1Basis, tensor, u, v):
    k = sl1.order.k
    r = len(u)
    out = [k.zero] * r
    for i, ui in enumerate(u):
        if ui == k.zero:
            continue
        for j, vj in enumerate(v):
            if vj == k.zero:
                continue
            c = k.mul(ui, vj)
            cell = tensor[i][j]
            for t in range(r):
                if cell[t] != k.zero:
                    out[t] = k.add(out[t], k.mul(c, cell[t]))
    return out


def ok_rows_to_zp_rows(sl1: SL1Basis, ok_rows):
    """Z_p generators of the O_K-span of coordinate rows over the x basis."""
    k = sl1.order.k
    gens = []
    for row in ok_rows:
        for idx in range(k.d):
            eps = [0] * k.d
            eps[idx] = 1
            scaled = [k.mul(tuple(eps), c) for c in row]
            flat = []
            for c in scaled:
                flat.extend(c)
            gens.append(flat)
    return gens


def ok_commutator_rows(sl1: SL1Basis, tensor, ok_rows):
    k = sl1.order.k
    out = []
    for i in range(len(ok_rows)):
        for j in range(i + 1, len(ok_rows)):
            w = ok_bracket_vec(sl1, tensor, ok_rows[i], ok_rows[j])
            if any(x != k.zero for x in w):
                out.append(w)
    return out


def enumerate_max_ok_submodules(sl1: SL1Basis):
    """Maximal proper O_K-submodules of the trace-zero lattice, canonically."""
    k = sl1.order.k
    ring = OkRing(k)
    r = len(sl1.lam)
    ident = dvr.identity_rows(ring, r)
    for mu, b, rows, scale in dvr.enumerate_index_one_sublattices(ring, ident, 0):
        yield (mu, b), rows, scale


# --- exhaustive theorem drivers ----------------------------------------------


def _worker_cap() -> int:
    try:
        return max(1, int(os.environ.get("VERIFY_THREADS", "1")))
    except ValueError:
        return 1


def _hypothesis_cert(theorem: str, params: dict, prec: int, note: str) -> Certificate:
    return Certificate(theorem, params, 0, HYPOTHESIS_VIOLATED,
                       [{"note": note}], prec)


def _cap_cert(theorem: str, params: dict, prec: int, needed: int, cap: int) -> Certificate:
    return Certificate(theorem, params, 0, PRECISION_INSUFFICIENT,
                       [{"error": "enumeration cap exceeded",
                         "required": needed, "cap": cap}], prec)


def commutator_rigidity_certificate(p: int, e: int, f: int, n: int,
                                    prec: int = 12, cap: int = 10**6) -> Certificate:
    """Every maximal proper Z_p-submodule N satisfies [N, N] = [L, L].

    Hypotheses: f >= 2, or both n >= 3 and (p, n) != (3, 3).  When n >= 3
    and (p, n) != (3, 3) the maximal O_K-submodules are checked as well.
    """
    start = time.monotonic()
    params = {"p": p, "e": e, "f": f, "n": n, "m": 0}
    if not (f >= 2 or (n >= 3 and (p, n) != (3, 3))):
        return _hypothesis_cert("theorem-a", params, prec,
                                "needs f >= 2, or n >= 3 with (p, n) != (3, 3)")
    sl1 = build_sl1_lattice(build_order(p, e, f, n, prec))
    total = (p**sl1.rank - 1) // (p - 1)
    if total > cap:
        return _cap_cert("theorem-a", params, prec, total, cap)
    lie = lie_from_sl1(sl1)
    derived = derived_lattice(sl1)
    checked = 0
    witnesses = []

    def check(pair):
        param, sub = pair
        comm = commutator_sublattice(lie, sub)
        ok = comm.rank == lie.rank and lattice_equal(comm.as_lattice(), derived)
        return param, ok

    items = enumerate_maximal_submodules(lie.ambient())
    workers = _worker_cap()
    if workers > 1:
        # VERIFY_THREADS caps the pool; ordered map keeps reports deterministic
        with ThreadPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(check, items))
    else:
        results = map(check, items)
    for param, ok in results:
        checked += 1
        if not ok:
            witnesses.append({"mu": param.mu, "b": list(param.b)})
    notes = []
    if n >= 3 and (p, n) != (3, 3):
        ok_checked, ok_witnesses = _ok_rigidity_run(sl1, derived, cap)
        witnesses.extend(ok_witnesses)
        if not ok_witnesses:
            notes.append({
                "note": f"coefficient-ring level verified on {ok_checked} "
                        "maximal submodules"
            })
    elapsed = int((time.monotonic() - start) * 1000)
    status = VERIFIED if not witnesses else FAILED
    return Certificate("theorem-a", params, checked, status,
                       witnesses if witnesses else notes, prec, elapsed)


def _ok_rigidity_run(sl1: SL1Basis, derived: Lattice, cap: int):
    q = sl1.order.k.kk.order
    r = len(sl1.lam)
    total = (q**r - 1) // (q - 1)
    if total > cap:
        raise CapExceededError(f"O_K enumeration of {total} submodules exceeds cap")
    tensor = ok_structure_tensor(sl1)
    checked = 0
    witnesses = []
    for (mu, b), rows, scale in enumerate_max_ok_submodules(sl1):
        comm_rows = ok_commutator_rows(sl1, tensor, rows)
        gens = ok_rows_to_zp_rows(sl1, comm_rows)
        comm = lattice_from_generators(sl1.p, sl1.prec, gens, 2 * scale)
        checked += 1
        if not lattice_equal(comm, derived):
            witnesses.append({"ok-mu": mu, "note": "O_K-level failure"})
    return checked, witnesses


def ok_commutator_rigidity_certificate(p: int, e: int, f: int, n: int,
                                       prec: int = 12, cap: int = 10**6) -> Certificate:
    """O_K-level rigidity: [M, M] = [L, L] for maximal O_K-submodules M."""
    start = time.monotonic()
    params = {"p": p, "e": e, "f": f, "n": n, "m": 0}
    if not (n >= 3 and (p, n) != (3, 3)):
        return _hypothesis_cert("theorem-a-ok", params, prec,
                                "needs n >= 3 with (p, n) != (3, 3)")
    sl1 = build_sl1_lattice(build_order(p, e, f, n, prec))
    derived = derived_lattice(sl1)
    try:
        checked, witnesses = _ok_rigidity_run(sl1, derived, cap)
    except CapExceededError:
        q = p**f
        return _cap_cert("theorem-a-ok", params, prec,
                         (q ** len(sl1.lam) - 1) // (q - 1), cap)
    elapsed = int((time.monotonic() - start) * 1000)
    status = VERIFIED if not witnesses else FAILED
    return Certificate("theorem-a-ok", params, checked, status, witnesses, prec, elapsed)


def sl1_commutator_certificate(p: int, e: int, f: int, n: int, prec: int = 12) -> Certificate:
    """The commutator of the trace-zero lattice matches its graded closed form."""
    start = time.monotonic()
    params = {"p": p, "e": e, "f": f, "n": n, "m": 0}
    if (p, n) == (2, 2):
        return _hypothesis_cert("lll", params, prec, "(p, n) = (2, 2) is excluded")
    sl1 = build_sl1_lattice(build_order(p, e, f, n, prec))
    checked = 0
    witnesses = []
    try:
        derived = commutator_lattice_sl1(sl1)
        checked += 2  # graded shape and index
        idx = lattice_index(sl1.ambient(), derived)
        if idx != f * (n - 1):
            witnesses.append({"index": idx})
    except AssertionError as exc:
        witnesses.append({"error": str(exc)})
        checked += 1
    elapsed = int((time.monotonic() - start) * 1000)
    status = VERIFIED if not witnesses else FAILED
    return Certificate("lll", params, checked, status, witnesses, prec, elapsed)


def _n2_expected_shapes(d: int, f: int):
    return {
        "non-ok-closed": shape_multiset({0: 3 * d - f + 1, 1: f - 1}),
        "non-ok-open": shape_multiset({-1: 1, 0: 3 * d - f - 1, 1: f}),
        "derived": shape_multiset({0: 3 * d - 2, 1: 2}),
        "ok-other": shape_multiset({-1: 1, 1: 1, 2: 1}) if d == 1
        else shape_multiset({-1: 1, 0: 3 * d - 4, 1: 3}),
    }


def n2_sinvariant_certificate(p: int, e: int, f: int, prec: int = 12,
                              cap: int = 10**6) -> Certificate:
    """Classify all maximal submodules of the n = 2 trace-zero lattice.

    Each maximal Z_p-submodule's s-invariants must match its class (not an
    O_K-submodule with closed/open commutator; the derived lattice itself;
    another O_K-submodule), the commutator conclusions per class must hold,
    every maximal O_K-submodule must match its own table, and the class
    shapes must be pairwise distinct.
    """
    start = time.monotonic()
    params = {"p": p, "e": e, "f": f, "n": 2, "m": 0}
    if p == 2:
        return _hypothesis_cert("n2-tables", params, prec, "needs p odd")
    d = e * f
    sl1 = build_sl1_lattice(build_order(p, e, f, 2, prec))
    standard_basis_n2(sl1)
    lie = lie_from_sl1(sl1)
    derived = commutator_lattice_sl1(sl1)
    total = (p**sl1.rank - 1) // (p - 1)
    if total > cap:
        return _cap_cert("n2-tables", params, prec, total, cap)
    shapes = _n2_expected_shapes(d, f)
    k = sl1.order.k
    eps_mats = []
    for idx in range(k.d):
        basis = [0] * k.d
        basis[idx] = 1
        mat = k.mul_rows_zp(tuple(basis))
        big = [[0] * sl1.rank for _ in range(sl1.rank)]
        for blk in range(len(sl1.lam)):
            for a in range(k.d):
                for bcol in range(k.d):
                    big[blk * k.d + a][blk * k.d + bcol] = mat[a][bcol]
        eps_mats.append(big)
    checked = 0
    witnesses = []
    class_counts = {key: 0 for key in shapes}

    def record(ok: bool, **kw):
        nonlocal checked
        checked += 1
        if not ok:
            witnesses.append(kw)

    ring = ZpRing(p, prec)
    for param, sub in enumerate_maximal_submodules(lie.ambient()):
        is_ok_module = all(
            dvr.lattice_contains(
                ring, sub.basis_rows(), sub.scale,
                dvr.mat_mul(ring, sub.basis_rows(), mat), sub.scale,
            )
            for mat in eps_mats
        )
        comm = commutator_sublattice(lie, sub)
        s_val = relative_invariant_exponents(sub, comm.as_lattice())
        if not is_ok_module:
            record(lattice_equal(comm.as_lattice(), derived),
                   check="non-ok-commutator", mu=param.mu)
            closed = span_contains(span_of_lattice(sub), [list(r) for r in comm.rows],
                                   comm.scale)
            key = "non-ok-closed" if closed else "non-ok-open"
        elif lattice_equal(sub, derived):
            key = "derived"
        else:
            record(f == 1, check="ok-submodule-forces-f1", mu=param.mu)
            key = "ok-other"
        class_counts[key] += 1
        record(s_val == shapes[key], check="s-invariants", klass=key,
               mu=param.mu, b=list(param.b), got=list(s_val),
               want=list(shapes[key]))
    present = [shapes[key] for key, cnt in class_counts.items() if cnt]
    record(len(set(present)) == len(present), check="class-shapes-distinct")

    # O_K-level tables
    tensor = ok_structure_tensor(sl1)
    pi = k.pi()
    m0_rows = [
        [pi if t == 0 else k.zero for t in range(3)],
        [k.one if t == 1 else k.zero for t in range(3)],
        [k.one if t == 2 else k.zero for t in range(3)],
    ]
    m0_ok = ok_lattice_from_generators(k, m0_rows)
    ok_std = ok_lattice_from_generators(
        k, dvr.identity_rows(OkRing(k), 3)
    )
    for (mu, b), rows, scale in enumerate_max_ok_submodules(sl1):
        m_ok = OkLattice(k, 3, scale, tuple(tuple(r) for r in rows))
        comm_rows = ok_commutator_rows(sl1, tensor, rows)
        comm_ok = ok_lattice_from_generators(k, comm_rows, 2 * scale)
        s_ok = ok_relative_exponents(m_ok, comm_ok)
        if ok_lattice_equal(m_ok, m0_ok):
            record(s_ok == (0, 1, 1), check="ok-derived-shape", got=list(s_ok))
        else:
            record(s_ok == (-1, 1, 2), check="ok-other-shape", mu=mu, got=list(s_ok))
            total_l = ok_lattice_sum(m_ok, comm_ok)
            record(ok_lattice_equal(total_l, ok_std), check="ok-sum-full", mu=mu)
    elapsed = int((time.monotonic() - start) * 1000)
    status = VERIFIED if not witnesses else FAILED
    return Certificate("n2-tables", params, checked, status, witnesses, prec, elapsed)


def self_similarity_obstruction_certificate(p: int, e: int, f: int, n: int,
                                            m: int = 0, prec: int = 12,
                                            cap: int = 10**6) -> Certificate:
    """No simple virtual endomorphism of index p exists on p^m * sl_1.

    Routes: for f >= 2, or n >= 3 with (p, n) != (3, 3), the commutator
    rigidity of index-p submodules applies; for n = 2, p odd, the
    s-invariant trichotomy does.  Either way the checks run at m = 0 and
    extend to every m through [p^m M, p^m M] = p^(2m) [M, M], which keeps
    indices and s-invariants aligned; the certificate notes the reduction.
    """
    start = time.monotonic()
    params = {"p": p, "e": e, "f": f, "n": n, "m": m}
    if n < 2:
        return _hypothesis_cert("theorem-b", params, prec,
                                "n = 1 gives the zero lattice; nothing to certify")
    if not (f >= 2 or (p, n) not in {(2, 2), (3, 3)}):
        return _hypothesis_cert("theorem-b", params, prec,
                                "needs f >= 2 or (p, n) outside {(2,2), (3,3)}")
    if f >= 2 or (n >= 3 and (p, n) != (3, 3)):
        inner = commutator_rigidity_certificate(p, e, f, n, prec, cap)
        route = "commutator-rigidity"
    else:
        inner = n2_sinvariant_certificate(p, e, f, prec, cap)
        route = "s-invariant-tables"
    sl1 = build_sl1_lattice(build_order(p, e, f, n, prec))
    lie = lie_from_sl1(sl1)
    checked = inner.checked
    extra = []
    checked += 1
    if sl1_killing_valuation(p, e, f, n, prec) is None:
        extra.append({"check": "killing-form", "error": "degenerate at precision"})
    checked += 1
    idx = lattice_index(lie.ambient(), derived_lattice(sl1))
    if (p, n) != (2, 2) and idx != f * (n - 1):
        extra.append({"check": "commutator-index", "got": idx})
    elapsed = int((time.monotonic() - start) * 1000)
    if inner.status != VERIFIED:
        return Certificate("theorem-b", params, checked, inner.status,
                           list(inner.witnesses) + extra, prec, elapsed)
    if extra:
        return Certificate("theorem-b", params, checked, FAILED, extra, prec, elapsed)
    notes = [{"note": f"route: {route}"}]
    if m > 0:
        notes.append({
            "note": "checks ran at m = 0; scaling compatibility "
                    "[p^m M, p^m M] = p^(2m) [M, M] transports them to every m"
        })
    return Certificate("theorem-b", params, checked, VERIFIED, notes, prec, elapsed)


def simplicity_certificate(prec: int = 12, depth: int = 8) -> Certificate:
    """Built-in semi-decision cases with independently re-verified verdicts."""
    start = time.monotonic()
    params = {"p": 0, "e": 0, "f": 0, "n": 0, "m": 0, "depth": depth}
    checked = 0
    witnesses = []

    def expect(kind: str, lie, phi, tag: str):
        nonlocal checked
        checked += 1
        res = invariant_ideal_chain(lie, phi, depth)
        if res.kind != kind:
            witnesses.append({"case": tag, "got": res.kind, "want": kind})
        return res

    p = 3
    ab = build_model_lattice("abelian", p, prec, 1)
    dom = lattice_from_generators(p, prec, [[p]])
    shift = virtual_endomorphism(ab, dom, [[1]], 0)
    expect("simple-to-depth", ab, shift, "abelian-shift")
    incl = virtual_endomorphism(ab, dom, [[p]], 0)
    res = expect("invariant-ideal", ab, incl, "abelian-inclusion")
    if res.witness is not None:
        checked += 1
        if lattice_index(ab.ambient(), res.witness) != 1:
            witnesses.append({"case": "abelian-inclusion", "error": "unexpected witness"})
    meta = build_model_lattice("metabelian", p, prec, 2, 1)
    dom2 = lattice_from_generators(p, prec, [[1, 0], [0, p]])
    phi2 = virtual_endomorphism(meta, dom2, [[1, 0], [0, 1]], 0)
    expect("simple-to-depth", meta, phi2, "metabelian-candidate")
    elapsed = int((time.monotonic() - start) * 1000)
    status = VERIFIED if not witnesses else FAILED
    return Certificate("simplicity", params, checked, status, witnesses, prec, elapsed)
