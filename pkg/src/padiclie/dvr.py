"""Matrix normal forms and lattice primitives over a discrete valuation ring.

Everything here is generic over a small duck-typed ring interface; the two
instantiations are residues mod p^prec (``ZpRing`` in :mod:`padiclie.padic`)
and integer rings of p-adic fields at precision (adapter in
:mod:`padiclie.local_fields`).  The interface a ring object must provide:

    nominal : int    uniformizer-adic precision at which results are decided
    guard   : int    safety margin below ``nominal``
    zero, one        elements
    add, sub, mul, neg
    val(a)           valuation, capped at the representation depth
    unit_inverse(a)  inverse of a unit
    uni_pow(k)       k-th power of the uniformizer, k >= 0
    div_uni(a, k)    exact division by the k-th uniformizer power
    split(a, k)      (q, r) with a = q*u^k + r, r the canonical residue mod u^k
    canon(a)         canonical representative at full working depth
    canon_nominal(a) canonical representative mod u^nominal
    residue_lifts()  canonical lifts of the residue field, deterministic order
    to_residue(a)    canonical lift of a mod the uniformizer
    widen(extra)     a ring deep enough to certify ``nominal + extra`` digits

Rings store elements strictly deeper than ``nominal`` so that row reduction,
which consumes one uniformizer digit per pivot valuation, still certifies
every reported digit.  Reductions add up their pivot valuations and raise
:class:`PrecisionError` once the total eats into the guard band.
"""

from __future__ import annotations

from itertools import product
from typing import Iterable, Sequence

from .errors import DegenerateError, NotSubmoduleError, PrecisionError

Rows = list  # list[list[element]]


def identity_rows(ring, k: int) -> Rows:
    return [[ring.one if i == j else ring.zero for j in range(k)] for i in range(k)]


def zero_rows(ring, r: int, c: int) -> Rows:
    return [[ring.zero] * c for _ in range(r)]


def mat_mul(ring, a: Rows, b: Rows) -> Rows:
    if not a:
        return []
    inner = len(b)
    out = []
    for row in a:
        acc = [ring.zero] * (len(b[0]) if inner else 0)
        for i in range(inner):
            x = row[i]
            if x == ring.zero:
                continue
            brow = b[i]
            for j, y in enumerate(brow):
                if y != ring.zero:
                    acc[j] = ring.add(acc[j], ring.mul(x, y))
        out.append(acc)
    return out


def mat_equal_nominal(ring, a: Rows, b: Rows) -> bool:
    if len(a) != len(b):
        return False
    for ra, rb in zip(a, b):
        if len(ra) != len(rb):
            return False
        for x, y in zip(ra, rb):
            if ring.canon_nominal(x) != ring.canon_nominal(y):
                return False
    return True


def _guard_total(ring, pivots) -> None:
    # canonical forms are independent of the lift exactly when every
    # elementary divisor stays below the precision (Nakayama); the guard
    # band keeps decisions away from the boundary
    worst = max((v for _, _, v in pivots), default=0)
    if worst > ring.nominal - ring.guard:
        raise PrecisionError(
            "insufficient precision: divisor valuation %d at precision %d"
            % (worst, ring.nominal)
        )


def hermite(ring, rows: Sequence[Sequence], transform: bool = False):
    """Row Hermite form at precision.

    Returns ``(h, t, pivots)`` where ``h`` is canonical (pivot entries are
    exact uniformizer powers, entries above a pivot are reduced mod the
    pivot, rows that vanish at nominal precision are zeroed and sorted to
    the bottom), ``t`` is an invertible transform with ``t * rows == h`` at
    nominal precision (or ``None``), and ``pivots`` is a list of
    ``(row, col, valuation)``.
    """
    m = [[ring.canon(x) for x in row] for row in rows]
    nr = len(m)
    nc = len(m[0]) if nr else 0
    t = identity_rows(ring, nr) if transform else None
    pivots = []
    r = 0
    for c in range(nc):
        if r == nr:
            break
        best, bv = -1, ring.nominal
        for i in range(r, nr):
            v = ring.val(m[i][c])
            if v < bv:
                best, bv = i, v
        if best < 0:
            continue
        if best != r:
            m[r], m[best] = m[best], m[r]
            if t is not None:
                t[r], t[best] = t[best], t[r]
        w = ring.unit_inverse(ring.div_uni(m[r][c], bv))
        m[r] = [ring.mul(w, x) for x in m[r]]
        m[r][c] = ring.uni_pow(bv)
        if t is not None:
            t[r] = [ring.mul(w, x) for x in t[r]]
        for i in range(r + 1, nr):
            x = m[i][c]
            if x == ring.zero:
                continue
            q = ring.div_uni(x, bv)
            m[i] = [ring.sub(y, ring.mul(q, z)) for y, z in zip(m[i], m[r])]
            m[i][c] = ring.zero
            if t is not None:
                t[i] = [ring.sub(y, ring.mul(q, z)) for y, z in zip(t[i], t[r])]
        pivots.append((r, c, bv))
        r += 1
    # reduce entries above each pivot to the canonical residue mod the pivot
    for pr, c, v in pivots:
        for i in range(pr):
            q, rem = ring.split(m[i][c], v)
            if q != ring.zero:
                m[i] = [ring.sub(y, ring.mul(q, z)) for y, z in zip(m[i], m[pr])]
                if t is not None:
                    t[i] = [ring.sub(y, ring.mul(q, z)) for y, z in zip(t[i], t[pr])]
            m[i][c] = rem
    _guard_total(ring, pivots)
    h = [[ring.canon_nominal(x) for x in row] for row in m]
    for i in range(len(pivots), nr):
        h[i] = [ring.zero] * nc
    if t is not None:
        t = [[ring.canon_nominal(x) for x in row] for row in t]
    return h, t, pivots


def smith(ring, rows: Sequence[Sequence], transforms: bool = False):
    """Two-sided Smith reduction at precision.

    Returns ``(vals, left, right, complete)``: ``vals`` are the elementary
    divisor valuations in ascending order, ``left * rows * right`` is
    diagonal with entries ``u^vals[i]`` at nominal precision, and
    ``complete`` is False when the trailing block vanished at nominal
    precision before ``min(shape)`` divisors were found.
    """
    m = [[ring.canon(x) for x in row] for row in rows]
    nr = len(m)
    nc = len(m[0]) if nr else 0
    left = identity_rows(ring, nr) if transforms else None
    right = identity_rows(ring, nc) if transforms else None
    vals = []
    for tpos in range(min(nr, nc)):
        bi = bj = -1
        bv = ring.nominal
        for i in range(tpos, nr):
            for j in range(tpos, nc):
                v = ring.val(m[i][j])
                if v < bv:
                    bi, bj, bv = i, j, v
        if bi < 0:
            break
        if bi != tpos:
            m[tpos], m[bi] = m[bi], m[tpos]
            if left is not None:
                left[tpos], left[bi] = left[bi], left[tpos]
        if bj != tpos:
            for row in m:
                row[tpos], row[bj] = row[bj], row[tpos]
            if right is not None:
                for row in right:
                    row[tpos], row[bj] = row[bj], row[tpos]
        w = ring.unit_inverse(ring.div_uni(m[tpos][tpos], bv))
        m[tpos] = [ring.mul(w, x) for x in m[tpos]]
        m[tpos][tpos] = ring.uni_pow(bv)
        if left is not None:
            left[tpos] = [ring.mul(w, x) for x in left[tpos]]
        for i in range(tpos + 1, nr):
            x = m[i][tpos]
            if x == ring.zero:
                continue
            q = ring.div_uni(x, bv)
            m[i] = [ring.sub(y, ring.mul(q, z)) for y, z in zip(m[i], m[tpos])]
            m[i][tpos] = ring.zero
            if left is not None:
                left[i] = [ring.sub(y, ring.mul(q, z)) for y, z in zip(left[i], left[tpos])]
        for j in range(tpos + 1, nc):
            x = m[tpos][j]
            if x == ring.zero:
                continue
            q = ring.div_uni(x, bv)
            for row in m:
                row[j] = ring.sub(row[j], ring.mul(q, row[tpos]))
            m[tpos][j] = ring.zero
            if right is not None:
                for row in right:
                    row[j] = ring.sub(row[j], ring.mul(q, row[tpos]))
        vals.append(bv)
    _guard_total(ring, [(0, 0, v) for v in vals])
    complete = len(vals) == min(nr, nc)
    if left is not None:
        left = [[ring.canon_nominal(x) for x in row] for row in left]
        right = [[ring.canon_nominal(x) for x in row] for row in right]
    return vals, left, right, complete


# --- lattice primitives -------------------------------------------------
#
# A full lattice in the ambient column space is stored as (basis, scale):
# the point set is u^(-scale) * rowspan(basis), with basis a square
# canonical Hermite form of unit content (any common uniformizer power is
# folded into the scale).  With that convention two lattices are equal iff
# their (basis, scale) pairs coincide literally.


def canonical_lattice(ring, gens: Sequence[Sequence], scale: int):
    """Canonical (basis, scale) for the lattice u^(-scale) * rowspan(gens)."""
    nc = len(gens[0]) if gens else 0
    if nc == 0:
        return [], scale
    h, _, pivots = hermite(ring, gens)
    if len(pivots) < nc:
        raise DegenerateError("insufficient precision or degenerate generators")
    rows = h[:nc]
    content = min(
        min((ring.val(x) for x in row if x != ring.zero), default=ring.nominal)
        for row in rows
    )
    if content > 0:
        rows = [[ring.div_uni(x, content) for x in row] for row in rows]
        scale -= content
    return rows, scale


def det_valuation(ring, basis: Rows) -> int:
    """Sum of diagonal pivot valuations of a canonical square basis."""
    return sum(ring.val(basis[i][i]) for i in range(len(basis)))


def lattice_contains(ring, basis: Rows, bscale: int, rows: Sequence[Sequence], rscale: int) -> bool:
    """Do all of u^(-rscale)*rows lie in u^(-bscale)*rowspan(basis)?"""
    t = bscale - rscale
    if t >= 0:
        shift = ring.uni_pow(t)
        targets = [[ring.mul(shift, x) for x in row] for row in rows]
        base = [list(row) for row in basis]
    else:
        shift = ring.uni_pow(-t)
        targets = [list(row) for row in rows]
        base = [[ring.mul(shift, x) for x in row] for row in basis]
    stacked, _, _ = hermite(ring, base + targets)
    return mat_equal_nominal(ring, stacked[: len(base)], base) and all(
        all(x == ring.zero for x in row) for row in stacked[len(base):]
    )


def lattice_equal(ring, a_basis, a_scale, b_basis, b_scale) -> bool:
    return a_scale == b_scale and mat_equal_nominal(ring, a_basis, b_basis)


def lattice_index_exp(ring, l_basis, l_scale, m_basis, m_scale) -> int:
    """Exponent k with [L : M] = (residue size)^k; requires M <= L."""
    if not lattice_contains(ring, l_basis, l_scale, m_basis, m_scale):
        raise NotSubmoduleError("not a submodule")
    rank = len(l_basis)
    return (det_valuation(ring, m_basis) - rank * m_scale) - (
        det_valuation(ring, l_basis) - rank * l_scale
    )


def lattice_sum(ring, a_basis, a_scale, b_basis, b_scale):
    s = max(a_scale, b_scale)
    pa = ring.uni_pow(s - a_scale)
    pb = ring.uni_pow(s - b_scale)
    gens = [[ring.mul(pa, x) for x in row] for row in a_basis]
    gens += [[ring.mul(pb, x) for x in row] for row in b_basis]
    return canonical_lattice(ring, gens, s)


def triangular_solve_scaled(ring, basis: Rows, rows: Sequence[Sequence]):
    """Solve Y = (u^D * rows) * basis^(-1) exactly, D the basis det valuation.

    ``basis`` must be a canonical square Hermite form, so it is upper
    triangular with exact uniformizer-power diagonal.  The returned integer
    matrix Y satisfies rows = u^(-D) * Y * basis over the fraction field.
    """
    n = len(basis)
    dval = det_valuation(ring, basis)
    shift = ring.uni_pow(dval)
    out = []
    for row in rows:
        u = [ring.mul(shift, x) for x in row]
        y = [ring.zero] * n
        for c in range(n):
            acc = u[c]
            for j in range(c):
                acc = ring.sub(acc, ring.mul(y[j], basis[j][c]))
            kv = ring.val(basis[c][c])
            if ring.val(acc) < kv:
                raise PrecisionError("insufficient precision in triangular solve")
            y[c] = ring.div_uni(acc, kv)
        out.append(y)
    return out, dval


def lattice_rel_exponents(ring, l_basis, l_scale, m_basis, m_scale):
    """Invariant exponents of M relative to L, as a sorted tuple.

    Both lattices must be full in the same ambient space; entries may be
    negative.  Computed from the Smith form of the change-of-basis matrix.
    """
    dval = det_valuation(ring, l_basis)
    wring = ring.widen(dval + 8)
    y, _ = triangular_solve_scaled(wring, l_basis, m_basis)
    vals, _, _, complete = smith(wring, y)
    if not complete:
        raise PrecisionError("insufficient precision for relative exponents")
    shift = l_scale - m_scale - dval
    return tuple(sorted(v + shift for v in vals))


def lattice_coordinates(ring, basis: Rows, row: Sequence, shift_exp: int = 0):
    """Coefficients c with c * basis = u^(shift_exp) * row; integral or error.

    ``shift_exp`` may be negative when the point carries a deeper scale than
    the lattice.  Raises NotSubmoduleError when the point is not in the span
    at precision.
    """
    n = len(basis)
    dval = det_valuation(ring, basis)
    wring = ring.widen(dval + 8)
    lift = max(shift_exp, 0)
    drop = lift - shift_exp
    pw = wring.uni_pow(lift)
    u = [wring.mul(pw, x) for x in row]
    base = basis
    if drop:
        pd = wring.uni_pow(drop)
        base = [[wring.mul(pd, x) for x in brow] for brow in basis]
    y = [wring.zero] * n
    for c in range(n):
        acc = u[c]
        for j in range(c):
            acc = wring.sub(acc, wring.mul(y[j], base[j][c]))
        kv = wring.val(base[c][c])
        if wring.val(acc) < kv:
            raise NotSubmoduleError("point is not in the lattice at precision")
        y[c] = wring.div_uni(acc, kv)
    return [wring.canon_nominal(v) for v in y]


def enumerate_index_one_sublattices(ring, basis: Rows, scale: int):
    """All maximal proper submodules of the given lattice, canonically.

    Yields ``(mu, b, sub_basis, sub_scale)`` where ``mu`` is the pivot
    basis index and ``b`` the tuple of residue lifts attached to the
    indices below ``mu`` (indices above carry zero).  Hyperplanes of the
    residue quotient are enumerated with trailing-one normalization, mu
    descending and b ascending, which makes the order reproducible.
    """
    rank = len(basis)
    lifts = ring.residue_lifts()
    for mu in range(rank - 1, -1, -1):
        for small in product(lifts, repeat=mu):
            b = [ring.zero] * rank
            for i, x in enumerate(small):
                b[i] = x
            gens = []
            for lam in range(rank):
                if lam == mu:
                    gens.append([ring.mul(ring.uni_pow(1), x) for x in basis[mu]])
                else:
                    gens.append(
                        [
                            ring.add(x, ring.mul(b[lam], y))
                            for x, y in zip(basis[lam], basis[mu])
                        ]
                    )
            sub_basis, sub_scale = canonical_lattice(ring, gens, scale)
            yield mu, tuple(b[:mu]) + tuple(b[mu + 1:]), sub_basis, sub_scale


def count_index_one_sublattices(residue_size: int, rank: int) -> int:
    return (residue_size**rank - 1) // (residue_size - 1) if rank else 0
