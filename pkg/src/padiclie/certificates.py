"""Machine-readable verdict records and their canonical serialization."""

from __future__ import annotations

import json
from dataclasses import dataclass, field

VERIFIED = "verified"
FAILED = "failed"
HYPOTHESIS_VIOLATED = "hypothesis-violated"
PRECISION_INSUFFICIENT = "precision-insufficient"

STATUSES = (VERIFIED, FAILED, HYPOTHESIS_VIOLATED, PRECISION_INSUFFICIENT)


@dataclass
class Certificate:
    """Verdict of one verification driver.

    ``witnesses`` carries failure parameters, invariant-ideal bases, or
    explanatory notes; a failed certificate always carries at least one
    witness.
    """

    theorem: str
    params: dict
    checked: int
    status: str
    witnesses: list = field(default_factory=list)
    prec: int = 12
    elapsed_ms: int = 0

    def __post_init__(self):
        if self.status not in STATUSES:
            raise ValueError(f"unknown status {self.status!r}")
        if self.status == FAILED and not self.witnesses:
            raise ValueError("failed certificate requires a witness")

    def exit_code(self) -> int:
        return {
            VERIFIED: 0,
            FAILED: 1,
            HYPOTHESIS_VIOLATED: 2,
            PRECISION_INSUFFICIENT: 3,
        }[self.status]

    def to_json_obj(self) -> dict:
        return {
            "theorem": self.theorem,
            "params": self.params,
            "checked": self.checked,
            "status": self.status,
            "witnesses": self.witnesses,
            "prec": self.prec,
            "elapsed_ms": self.elapsed_ms,
        }


def _stringify_ints(obj):
    """Integers become decimal strings so reports are canonical bytes."""
    if isinstance(obj, bool):
        return obj
    if isinstance(obj, int):
        return str(obj)
    if isinstance(obj, dict):
        return {k: _stringify_ints(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_stringify_ints(v) for v in obj]
    return obj


def canonical_report(cert: Certificate) -> str:
    """Canonical JSON text: sorted keys, decimal-string integers.

    ``elapsed_ms`` is pinned to zero in the canonical form so that identical
    configurations produce byte-identical reports; wall time is reported on
    the console instead.
    """
    obj = cert.to_json_obj()
    obj["elapsed_ms"] = 0
    return json.dumps(_stringify_ints(obj), sort_keys=True, indent=2) + "\n"


def emit_report(cert: Certificate, path) -> str:
    text = canonical_report(cert)
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(text)
    return str(path)
