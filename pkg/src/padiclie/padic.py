"""Truncated p-adic integers and matrices with canonical normal forms.

A scalar is a residue mod p^prec together with (p, prec); all ring
operations are exact below the precision cap.  Matrices share one (p, prec)
across entries.  Hermite and Smith forms are canonical: re-running a form on
its own output is the identity.
"""

from __future__ import annotations

from dataclasses import dataclass

from . import dvr
from .errors import NotInvertibleError, PrecisionError, StructureMismatchError

DEFAULT_PREC = 12
PRECISION_MARGIN = 4


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    d = 2
    while d * d <= n:
        if n % d == 0:
            return False
        d += 1
    return True


class ZpRing:
    """Z_p at working precision, elements stored as ints mod p^(2*prec).

    The doubled representation depth keeps every digit below ``nominal``
    exact through row reductions whose pivot valuations total at most
    ``nominal - guard``.
    """

    def __init__(self, p: int, prec: int, guard: int = PRECISION_MARGIN):
        self.p = p
        self.nominal = prec
        self.guard = guard
        self.depth = 2 * prec + guard
        self.mod = p**self.depth
        self.nominal_mod = p**prec
        self.zero = 0
        self.one = 1

    def add(self, a, b):
        return (a + b) % self.mod

    def sub(self, a, b):
        return (a - b) % self.mod

    def mul(self, a, b):
        return (a * b) % self.mod

    def neg(self, a):
        return (-a) % self.mod

    def val(self, a):
        a %= self.mod
        if a == 0:
            return self.depth
        v = 0
        while a % self.p == 0:
            a //= self.p
            v += 1
        return v

    def unit_inverse(self, a):
        if a % self.p == 0:
            raise NotInvertibleError("not invertible at this precision")
        return pow(a, -1, self.mod)

    def uni_pow(self, k):
        return self.p**k

    def div_uni(self, a, k):
        a %= self.mod
        q, r = divmod(a, self.p**k)
        if r:
            raise PrecisionError("inexact division by uniformizer power")
        return q

    def split(self, a, k):
        pk = self.p**k
        a %= self.mod
        r = a % pk
        return (a - r) // pk, r

    def canon(self, a):
        return a % self.mod

    def canon_nominal(self, a):
        return a % self.nominal_mod

    def residue_lifts(self):
        return list(range(self.p))

    def to_residue(self, a):
        return a % self.p

    def widen(self, extra):
        return ZpRing(self.p, self.nominal + extra, self.guard)


@dataclass(frozen=True)
class PadicInt:
    """Residue mod p^prec with tracked precision."""

    p: int
    prec: int
    residue: int

    def __post_init__(self):
        if not is_prime(self.p):
            raise ValueError(f"{self.p} is not prime")
        if self.prec < 1:
            raise ValueError("precision must be positive")
        object.__setattr__(self, "residue", self.residue % self.p**self.prec)

    def _match(self, other: "PadicInt") -> None:
        if not isinstance(other, PadicInt):
            raise StructureMismatchError("expected a PadicInt")
        if (self.p, self.prec) != (other.p, other.prec):
            raise StructureMismatchError(
                f"mismatched (p, prec): {(self.p, self.prec)} vs {(other.p, other.prec)}"
            )

    def __add__(self, other):
        self._match(other)
        return PadicInt(self.p, self.prec, self.residue + other.residue)

    def __sub__(self, other):
        self._match(other)
        return PadicInt(self.p, self.prec, self.residue - other.residue)

    def __mul__(self, other):
        self._match(other)
        return PadicInt(self.p, self.prec, self.residue * other.residue)

    def __neg__(self):
        return PadicInt(self.p, self.prec, -self.residue)

    def is_zero(self) -> bool:
        return self.residue == 0

    def valuation(self) -> int:
        """Largest v <= prec with p^v dividing the residue; prec for zero."""
        if self.residue == 0:
            return self.prec
        r, v = self.residue, 0
        while r % self.p == 0:
            r //= self.p
            v += 1
        return v

    def unit_inverse(self) -> "PadicInt":
        if self.valuation() != 0:
            raise NotInvertibleError("not invertible at this precision")
        return PadicInt(self.p, self.prec, pow(self.residue, -1, self.p**self.prec))

    def __int__(self):
        return self.residue


@dataclass(frozen=True)
class PadicMatrix:
    """Row-major matrix of residues sharing one (p, prec)."""

    p: int
    prec: int
    rows: int
    cols: int
    entries: tuple

    def __post_init__(self):
        if len(self.entries) != self.rows * self.cols:
            raise StructureMismatchError("entry count does not match shape")
        mod = self.p**self.prec
        object.__setattr__(self, "entries", tuple(e % mod for e in self.entries))

    @classmethod
    def from_rows(cls, p: int, prec: int, rows) -> "PadicMatrix":
        rows = [list(r) for r in rows]
        nc = len(rows[0]) if rows else 0
        if any(len(r) != nc for r in rows):
            raise StructureMismatchError("ragged rows")
        return cls(p, prec, len(rows), nc, tuple(x for r in rows for x in r))

    @classmethod
    def identity(cls, p: int, prec: int, k: int) -> "PadicMatrix":
        return cls.from_rows(p, prec, [[int(i == j) for j in range(k)] for i in range(k)])

    def row_list(self):
        c = self.cols
        return [list(self.entries[i * c : (i + 1) * c]) for i in range(self.rows)]

    def entry(self, i: int, j: int) -> int:
        return self.entries[i * self.cols + j]

    def at(self, i: int, j: int) -> PadicInt:
        return PadicInt(self.p, self.prec, self.entry(i, j))

    def _match(self, other: "PadicMatrix") -> None:
        if (self.p, self.prec) != (other.p, other.prec):
            raise StructureMismatchError("mismatched (p, prec)")

    def __add__(self, other):
        self._match(other)
        if (self.rows, self.cols) != (other.rows, other.cols):
            raise StructureMismatchError("shape mismatch")
        return PadicMatrix(
            self.p, self.prec, self.rows, self.cols,
            tuple(a + b for a, b in zip(self.entries, other.entries)),
        )

    def __sub__(self, other):
        self._match(other)
        if (self.rows, self.cols) != (other.rows, other.cols):
            raise StructureMismatchError("shape mismatch")
        return PadicMatrix(
            self.p, self.prec, self.rows, self.cols,
            tuple(a - b for a, b in zip(self.entries, other.entries)),
        )

    def __mul__(self, other):
        self._match(other)
        if self.cols != other.rows:
            raise StructureMismatchError("shape mismatch")
        a, b = self.row_list(), other.row_list()
        out = [
            [sum(a[i][k] * b[k][j] for k in range(self.cols)) for j in range(other.cols)]
            for i in range(self.rows)
        ]
        return PadicMatrix.from_rows(self.p, self.prec, out)

    def scaled(self, c: int) -> "PadicMatrix":
        return PadicMatrix(
            self.p, self.prec, self.rows, self.cols, tuple(c * e for e in self.entries)
        )

    def det_valuation(self) -> int:
        """Valuation of the determinant of the canonical lift, capped at prec."""
        if self.rows != self.cols:
            raise StructureMismatchError("determinant of a non-square matrix")
        d = _int_det(self.row_list())
        if d == 0:
            return self.prec
        v = 0
        while d % self.p == 0 and v < self.prec:
            d //= self.p
            v += 1
        return v


def _int_det(rows) -> int:
    """Exact integer determinant by fraction-free Gaussian elimination."""
    n = len(rows)
    if n == 0:
        return 1
    m = [list(r) for r in rows]
    sign = 1
    prev = 1
    for k in range(n - 1):
        if m[k][k] == 0:
            for i in range(k + 1, n):
                if m[i][k] != 0:
                    m[k], m[i] = m[i], m[k]
                    sign = -sign
                    break
            else:
                return 0
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                m[i][j] = (m[i][j] * m[k][k] - m[i][k] * m[k][j]) // prev
        prev = m[k][k]
    return sign * m[n - 1][n - 1]


def hermite_normal_form(m: PadicMatrix):
    """Canonical row Hermite form with its invertible transform.

    Pivot entries are exact powers of p, entries above each pivot are
    reduced mod the pivot, and rows that vanish at precision sit at the
    bottom.  ``transform * m == hnf`` at precision.
    """
    ring = ZpRing(m.p, m.prec)
    h, t, _ = dvr.hermite(ring, m.row_list(), transform=True)
    return (
        PadicMatrix.from_rows(m.p, m.prec, h),
        PadicMatrix.from_rows(m.p, m.prec, t),
    )


def smith_normal_form(m: PadicMatrix):
    """Elementary divisor valuations (ascending) with left/right transforms.

    Requires full rank at precision; raises PrecisionError otherwise.
    """
    ring = ZpRing(m.p, m.prec)
    vals, left, right, complete = dvr.smith(ring, m.row_list(), transforms=True)
    if not complete:
        raise PrecisionError("insufficient precision: rank deficient at precision")
    return (
        tuple(vals),
        PadicMatrix.from_rows(m.p, m.prec, left),
        PadicMatrix.from_rows(m.p, m.prec, right),
    )
