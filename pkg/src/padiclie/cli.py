"""Verifier command line: build towers, dispatch drivers, emit reports.

Exit codes: 0 verified, 1 failed, 2 hypothesis violated, 3 precision or cap
exhausted, 64 usage error.  Reports are canonical JSON, byte-identical for
identical configurations.
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import dataclass, field

from .certificates import (
    Certificate,
    FAILED,
    PRECISION_INSUFFICIENT,
    canonical_report,
    emit_report,
)
from .errors import (
    CapExceededError,
    HypothesisViolatedError,
    NonCanonicalInputError,
    PrecisionError,
    StructureMismatchError,
)
from .finite_cyclic import residue_lemmas_certificate
from .lattices import Lattice, lattice_from_json
from .lie_lattices import (
    LieLattice,
    lie_from_structure,
    n2_sinvariant_certificate,
    self_similarity_obstruction_certificate,
    simplicity_certificate,
    sl1_commutator_certificate,
    commutator_rigidity_certificate,
)
from .local_fields import dvr_lemmas_certificate

USAGE_EXIT = 64

SUBCOMMANDS = (
    "theorem-a",
    "theorem-b",
    "n2-tables",
    "dvr-lemmas",
    "finite-cyclic",
    "lll",
    "simplicity",
)

FINITE_CYCLIC_GRID = [(2, 1), (3, 1), (2, 2), (5, 1)]  # residue sizes 2..5


@dataclass
class RunConfig:
    subcommand: str
    p: int = 0
    e: int = 1
    f: int = 1
    n: int = 0
    m: int = 0
    s: int = 0
    d: int = 0
    prec: int = 12
    cap: int = 10**6
    out: str | None = None
    normalize: bool = False
    depth: int = 8
    smin: int = -4
    smax: int = 8
    grid: bool = False
    lattice_file: str | None = None
    errors: list = field(default_factory=list)

    def validate(self):
        if self.subcommand not in SUBCOMMANDS:
            self.errors.append(f"unknown subcommand {self.subcommand!r}")
        if self.prec < 6:
            self.errors.append("prec must be at least 6")
        if self.cap < 1:
            self.errors.append("cap must be positive")
        needs_p = self.subcommand in (
            "theorem-a", "theorem-b", "n2-tables", "dvr-lemmas", "lll"
        ) or (self.subcommand == "finite-cyclic" and not self.grid)
        if needs_p and self.p < 2:
            self.errors.append("p is required and must be a prime >= 2")
        if self.subcommand in ("theorem-a", "theorem-b", "lll") and self.n < 1:
            self.errors.append("n is required and must be positive")
        if self.subcommand == "finite-cyclic" and not self.grid and self.n < 1:
            self.errors.append("n is required and must be positive")
        for name in ("e", "f"):
            if getattr(self, name) < 1:
                self.errors.append(f"{name} must be positive")
        if self.m < 0 or self.depth < 1:
            self.errors.append("m must be nonnegative and depth positive")
        return not self.errors


def parse_lattice_file(path: str, normalize: bool = False):
    """Lattice or Lie-lattice from the JSON file format, validated.

    Bases must be canonical unless ``normalize`` is passed; structure
    constants, when present, are checked for antisymmetry and the Jacobi
    identity and rejected naming the offending triple.
    """
    with open(path, encoding="utf-8") as fh:
        obj = json.load(fh)
    lattice = lattice_from_json(obj, normalize=normalize)
    if "structure" not in obj:
        return lattice
    tensor = [
        [[int(c) for c in cell] for cell in row] for row in obj["structure"]
    ]
    if lattice.scale != 0 or any(
        lattice.basis.entry(i, j) != int(i == j)
        for i in range(lattice.rank)
        for j in range(lattice.rank)
    ):
        raise NonCanonicalInputError(
            "structure constants require the standard basis at scale 0"
        )
    return lie_from_structure(lattice.p, lattice.prec, tensor)


def _grid_finite_cyclic(prec: int) -> Certificate:
    checked = 0
    witnesses = []
    elapsed = 0
    for p, f in FINITE_CYCLIC_GRID:
        for n in (2, 3, 4):
            cert = residue_lemmas_certificate(p, f, n, prec)
            checked += cert.checked
            elapsed += cert.elapsed_ms
            for w in cert.witnesses:
                witnesses.append({"p": p, "f": f, "n": n, **w})
    status = "verified" if not witnesses else FAILED
    return Certificate(
        "finite-cyclic",
        {"p": 0, "e": 0, "f": 0, "n": 0, "m": 0, "grid": 1},
        checked,
        status,
        witnesses,
        prec,
        elapsed,
    )


def run(config: RunConfig) -> int:
    """Execute the configured driver, write its report, return the exit code."""
    if not config.validate():
        for err in config.errors:
            print(f"error: {err}", file=sys.stderr)
        return USAGE_EXIT
    try:
        if config.lattice_file is not None:
            parse_lattice_file(config.lattice_file, config.normalize)
        if config.subcommand == "theorem-a":
            cert = commutator_rigidity_certificate(
                config.p, config.e, config.f, config.n, config.prec, config.cap
            )
        elif config.subcommand == "theorem-b":
            cert = self_similarity_obstruction_certificate(
                config.p, config.e, config.f, config.n, config.m,
                config.prec, config.cap,
            )
        elif config.subcommand == "n2-tables":
            cert = n2_sinvariant_certificate(
                config.p, config.e, config.f, config.prec, config.cap
            )
        elif config.subcommand == "dvr-lemmas":
            cert = dvr_lemmas_certificate(
                config.p, config.e, config.f, config.prec,
                config.smin, config.smax,
            )
        elif config.subcommand == "finite-cyclic":
            if config.grid:
                cert = _grid_finite_cyclic(config.prec)
            else:
                cert = residue_lemmas_certificate(
                    config.p, config.f, config.n, config.prec
                )
        elif config.subcommand == "lll":
            cert = sl1_commutator_certificate(
                config.p, config.e, config.f, config.n, config.prec
            )
        else:  # simplicity
            cert = simplicity_certificate(config.prec, config.depth)
    except (NonCanonicalInputError, StructureMismatchError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return USAGE_EXIT
    except (PrecisionError, CapExceededError) as exc:
        cert = Certificate(
            config.subcommand,
            {"p": config.p, "e": config.e, "f": config.f,
             "n": config.n, "m": config.m},
            0,
            PRECISION_INSUFFICIENT,
            [{"error": str(exc)}],
            config.prec,
        )
    except HypothesisViolatedError as exc:
        cert = Certificate(
            config.subcommand,
            {"p": config.p, "e": config.e, "f": config.f,
             "n": config.n, "m": config.m},
            0,
            "hypothesis-violated",
            [{"note": str(exc)}],
            config.prec,
        )
    out = config.out or f"certificate-{config.subcommand}.json"
    emit_report(cert, out)
    sys.stdout.write(canonical_report(cert))
    print(
        f"{cert.theorem}: {cert.status} ({cert.checked} checks, "
        f"{cert.elapsed_ms} ms) -> {out}",
        file=sys.stderr,
    )
    return cert.exit_code()


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"error: {message}", file=sys.stderr)
        raise SystemExit(USAGE_EXIT)


def build_parser() -> _Parser:
    parser = _Parser(prog="verify", description=__doc__)
    sub = parser.add_subparsers(dest="subcommand", required=True)
    for name in SUBCOMMANDS:
        sp = sub.add_parser(name)
        sp.add_argument("--p", type=int, default=0)
        sp.add_argument("--e", type=int, default=1)
        sp.add_argument("--f", type=int, default=1)
        sp.add_argument("--n", type=int, default=0)
        sp.add_argument("--m", type=int, default=0)
        sp.add_argument("--s", type=int, default=0)
        sp.add_argument("--d", type=int, default=0)
        sp.add_argument("--prec", type=int, default=12)
        sp.add_argument("--cap", type=int, default=10**6)
        sp.add_argument("--out", type=str, default=None)
        sp.add_argument("--normalize", action="store_true")
        sp.add_argument("--depth", type=int, default=8)
        sp.add_argument("--smin", type=int, default=-4)
        sp.add_argument("--smax", type=int, default=8)
        sp.add_argument("--grid", action="store_true")
        sp.add_argument("--lattice-file", type=str, default=None)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        ns = parser.parse_args(argv)
    except SystemExit as exc:
        return exc.code if exc.code is not None else USAGE_EXIT
    config = RunConfig(
        subcommand=ns.subcommand, p=ns.p, e=ns.e, f=ns.f, n=ns.n, m=ns.m,
        s=ns.s, d=ns.d, prec=ns.prec, cap=ns.cap, out=ns.out,
        normalize=ns.normalize, depth=ns.depth, smin=ns.smin, smax=ns.smax,
        grid=ns.grid, lattice_file=ns.lattice_file,
    )
    return run(config)


if __name__ == "__main__":
    raise SystemExit(main())
