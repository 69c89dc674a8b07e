"""Full Z_p-lattices in a fixed coordinate space.

A lattice is stored as p^(-scale) * rowspan(basis) with basis a square
canonical Hermite form of unit content; the scale field lets lattices leave
Z_p^rank (needed for negative invariant exponents) while all arithmetic
stays on residues.  Two lattices are equal iff their canonical pairs
coincide.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from itertools import product

from . import dvr
from .errors import NonCanonicalInputError, NotSubmoduleError, PrecisionError
from .padic import PadicInt, PadicMatrix, ZpRing

SInvariants = tuple  # multiset of integers stored sorted ascending


def s_multiset(values) -> SInvariants:
    return tuple(sorted(values))


def shape_multiset(parts) -> SInvariants:
    """Build (value^multiplicity, ...) from {value: multiplicity}.

    Raises ValueError on a negative multiplicity, which signals that a
    closed-form shape is being applied outside its hypotheses.
    """
    out = []
    for value, mult in parts.items():
        if mult < 0:
            raise ValueError(f"negative multiplicity {mult} for exponent {value}")
        out.extend([value] * mult)
    return s_multiset(out)


@dataclass(frozen=True)
class MaxSubmoduleParam:
    """Canonical (mu, b) naming one maximal proper submodule.

    ``b`` holds the residues attached to the basis indices other than
    ``mu`` in increasing index order; entries above ``mu`` are zero in the
    canonical representative (trailing-one normalization of the hyperplane
    functional).
    """

    mu: int
    b: tuple

    def b_at(self, lam: int) -> int:
        if lam == self.mu:
            raise IndexError("b is indexed by the non-pivot indices")
        return self.b[lam if lam < self.mu else lam - 1]


@dataclass(frozen=True)
class Lattice:
    p: int
    prec: int
    rank: int
    scale: int
    basis: PadicMatrix

    def ring(self) -> ZpRing:
        return ZpRing(self.p, self.prec)

    @classmethod
    def standard(cls, p: int, prec: int, rank: int) -> "Lattice":
        return cls(p, prec, rank, 0, PadicMatrix.identity(p, prec, rank))

    def basis_rows(self):
        return self.basis.row_list()

    def det_valuation(self) -> int:
        return dvr.det_valuation(self.ring(), self.basis_rows())

    def scaled(self, m: int) -> "Lattice":
        """p^m * self, handled symbolically through the scale field."""
        return Lattice(self.p, self.prec, self.rank, self.scale - m, self.basis)


def lattice_from_generators(p: int, prec: int, gens, scale: int = 0) -> Lattice:
    """Canonical lattice with point set p^(-scale) * rowspan(gens)."""
    ring = ZpRing(p, prec)
    rows = [list(r) for r in gens]
    basis, scale = dvr.canonical_lattice(ring, rows, scale)
    nc = len(rows[0]) if rows else 0
    return Lattice(p, prec, nc, scale, PadicMatrix.from_rows(p, prec, basis))


def lattice_index(l: Lattice, m: Lattice) -> int:
    """Exponent k with [L : M] = p^k; raises NotSubmoduleError if M is not in L."""
    _check_ambient(l, m)
    return dvr.lattice_index_exp(
        l.ring(), l.basis_rows(), l.scale, m.basis_rows(), m.scale
    )


def lattice_membership(l: Lattice, v, vscale: int = 0) -> bool:
    """Is p^(-vscale) * v a point of L at precision?"""
    vec = [int(x) for x in v]
    if len(vec) != l.rank:
        return False
    if all(x % l.p**l.prec == 0 for x in vec):
        return True
    return dvr.lattice_contains(l.ring(), l.basis_rows(), l.scale, [vec], vscale)


def lattice_equal(a: Lattice, b: Lattice) -> bool:
    _check_ambient(a, b)
    return a.scale == b.scale and a.basis.entries == b.basis.entries


def lattice_sum(a: Lattice, b: Lattice) -> Lattice:
    _check_ambient(a, b)
    basis, scale = dvr.lattice_sum(
        a.ring(), a.basis_rows(), a.scale, b.basis_rows(), b.scale
    )
    return Lattice(a.p, a.prec, a.rank, scale, PadicMatrix.from_rows(a.p, a.prec, basis))


def relative_invariant_exponents(l: Lattice, m: Lattice) -> SInvariants:
    """The multiset (s_i) with some basis (e_i) of L making (p^(s_i) e_i) a basis of M."""
    _check_ambient(l, m)
    return dvr.lattice_rel_exponents(
        l.ring(), l.basis_rows(), l.scale, m.basis_rows(), m.scale
    )


def lattice_coordinates(l: Lattice, v, vscale: int = 0):
    """Coefficients of p^(-vscale)*v over L's scaled basis; error if not in L."""
    return dvr.lattice_coordinates(
        l.ring(), l.basis_rows(), [int(x) for x in v], l.scale - vscale
    )


def enumerate_maximal_submodules(l: Lattice, cap: int | None = None):
    """Stream of (param, sublattice), each of index p, in deterministic order.

    Exactly (p^rank - 1)/(p - 1) pairwise distinct submodules are produced;
    ``cap`` bounds that count up front.
    """
    total = dvr.count_index_one_sublattices(l.p, l.rank)
    if cap is not None and total > cap:
        from .errors import CapExceededError

        raise CapExceededError(f"enumeration of {total} submodules exceeds cap {cap}")
    for mu, b, basis, scale in dvr.enumerate_index_one_sublattices(
        l.ring(), l.basis_rows(), l.scale
    ):
        param = MaxSubmoduleParam(mu, tuple(int(x) for x in b))
        yield param, Lattice(l.p, l.prec, l.rank, scale, PadicMatrix.from_rows(l.p, l.prec, basis))


def submodule_from_param(l: Lattice, param: MaxSubmoduleParam) -> Lattice:
    """Span of y_mu = p*x_mu and y_lam = x_lam + b_lam*x_mu over L's basis rows."""
    rows = l.basis_rows()
    gens = []
    for lam in range(l.rank):
        if lam == param.mu:
            gens.append([l.p * x for x in rows[param.mu]])
        else:
            blam = param.b_at(lam)
            gens.append([x + blam * y for x, y in zip(rows[lam], rows[param.mu])])
    return lattice_from_generators(l.p, l.prec, gens, l.scale)


def param_equivalent(a: MaxSubmoduleParam, b: MaxSubmoduleParam, p: int) -> bool:
    """Do the two parameters define the same maximal submodule?

    For equal pivots the b-sequences must agree mod p; for distinct pivots
    mu != nu one needs b_nu a unit mod p, c_mu = b_nu^(-1), and
    c_lam = -b_nu^(-1) * b_lam for the remaining indices.
    """
    rank = len(a.b) + 1
    if len(b.b) + 1 != rank:
        return False
    if a.mu == b.mu:
        return all((x - y) % p == 0 for x, y in zip(a.b, b.b))
    mu, nu = a.mu, b.mu
    bnu = a.b_at(nu) % p
    if bnu == 0:
        return False
    inv = pow(bnu, -1, p)
    if (b.b_at(mu) - inv) % p != 0:
        return False
    for lam in range(rank):
        if lam in (mu, nu):
            continue
        if (b.b_at(lam) + inv * a.b_at(lam)) % p != 0:
            return False
    return True


def canonical_param(param: MaxSubmoduleParam, p: int) -> MaxSubmoduleParam:
    """Canonical representative: hyperplane functional with trailing one."""
    rank = len(param.b) + 1
    # functional: phi_mu = 1, phi_lam = -b_lam mod p
    phi = [0] * rank
    phi[param.mu] = 1
    for lam in range(rank):
        if lam != param.mu:
            phi[lam] = (-param.b_at(lam)) % p
    mu = max(i for i, x in enumerate(phi) if x % p != 0)
    inv = pow(phi[mu] % p, -1, p)
    b = tuple((-phi[lam] * inv) % p for lam in range(rank) if lam != mu)
    return MaxSubmoduleParam(mu, b)


def _check_ambient(a: Lattice, b: Lattice) -> None:
    if (a.p, a.prec, a.rank) != (b.p, b.prec, b.rank):
        from .errors import StructureMismatchError

        raise StructureMismatchError("lattices live in different ambient spaces")


# --- JSON file format ----------------------------------------------------


def lattice_to_json(l: Lattice) -> dict:
    rows = l.basis_rows()
    return {
        "p": l.p,
        "prec": l.prec,
        "rank": l.rank,
        "scale": l.scale,
        "basis": [[str(x) for x in row] for row in rows],
    }


def lattice_from_json(obj: dict, normalize: bool = False) -> Lattice:
    """Parse the lattice file format, rejecting non-canonical bases.

    With ``normalize`` the basis is canonicalized instead of rejected.
    """
    p = int(obj["p"])
    prec = int(obj["prec"])
    rank = int(obj["rank"])
    scale = int(obj["scale"])
    rows = [[int(x) for x in row] for row in obj["basis"]]
    if len(rows) != rank or any(len(r) != rank for r in rows):
        raise NonCanonicalInputError("basis shape does not match rank")
    cand = lattice_from_generators(p, prec, rows, scale)
    given = Lattice(p, prec, rank, scale, PadicMatrix.from_rows(p, prec, rows))
    if given.basis.entries != cand.basis.entries or given.scale != cand.scale:
        if not normalize:
            raise NonCanonicalInputError(
                "basis is not in canonical Hermite form (pass --normalize to accept)"
            )
        return cand
    return given


def write_lattice_file(l: Lattice, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(lattice_to_json(l), fh, sort_keys=True, indent=2)
        fh.write("\n")


def read_lattice_file(path, normalize: bool = False) -> Lattice:
    with open(path, encoding="utf-8") as fh:
        return lattice_from_json(json.load(fh), normalize=normalize)
