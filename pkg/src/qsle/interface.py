"""Serialization of pure-vector tables and the verification-report format.

A saved table is a directory with one canonical JSON file per link pattern
and manifest.json listing N, pattern, term count, file name and sha256 for
each. Loading recomputes every hash and refuses mismatches.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any

from .linkpatterns import enumerate_patterns, format_pattern, parse_pattern
from .purevectors import PureVectorTable
from .uqsl2 import TensorVector

TABLE_FORMAT = "qsle-pure-vectors/1"
REPORT_SCHEMA = "qsle-report/1"
MANIFEST_FILE = "manifest.json"

# every report entry must name one of these anchors
ANCHORS = frozenset(
    {
        "q-number identities",
        "tensor product action",
        "pure vector projection system",
        "tying recursion",
        "dual basis of pure vectors",
        "invariant subspace dimension",
        "symmetric vector cascade",
        "boundary visit system",
        "boundary visit uniqueness",
        "closed-form partition functions",
        "second-order PDE system",
        "Mobius covariance",
        "pair-merging asymptotics",
        "Girsanov martingale",
        "sampling order independence",
        "table serialization",
    }
)


class ManifestError(ValueError):
    """Manifest missing, malformed, or not matching the stored content."""


def _canonical(obj) -> bytes:
    return json.dumps(obj, sort_keys=True, separators=(",", ":")).encode()


def pattern_filename(N: int, text: str) -> str:
    return f"N{N}_{text or 'empty'}.json"


def serialize_table(table: PureVectorTable, directory) -> Path:
    """Write one file per pattern plus manifest.json; returns the manifest path."""
    d = Path(directory)
    d.mkdir(parents=True, exist_ok=True)
    entries = []
    for N in range(table.max_N + 1):
        for alpha in enumerate_patterns(N):
            text = format_pattern(alpha)
            v = table[alpha]
            payload = _canonical(v.to_json())
            name = pattern_filename(N, text)
            (d / name).write_bytes(payload)
            entries.append(
                {
                    "N": N,
                    "pattern": text,
                    "terms": len(v.terms),
                    "file": name,
                    "sha256": hashlib.sha256(payload).hexdigest(),
                }
            )
    manifest = {"format": TABLE_FORMAT, "max_N": table.max_N, "entries": entries}
    path = d / MANIFEST_FILE
    path.write_bytes(_canonical(manifest))
    return path


def load_table(directory) -> PureVectorTable:
    d = Path(directory)
    try:
        manifest = json.loads((d / MANIFEST_FILE).read_text())
        if manifest.get("format") != TABLE_FORMAT:
            raise ManifestError(f"unknown table format {manifest.get('format')!r}")
        max_N = int(manifest["max_N"])
        listed = manifest["entries"]
    except (OSError, KeyError, TypeError, json.JSONDecodeError) as exc:
        raise ManifestError(f"cannot read manifest in {d}: {exc}") from exc
    entries = {}
    for e in listed:
        payload = (d / e["file"]).read_bytes()
        got = hashlib.sha256(payload).hexdigest()
        if got != e["sha256"]:
            raise ManifestError(f"hash mismatch for {e['file']}: manifest {e['sha256']}, content {got}")
        try:
            v = TensorVector.from_json(json.loads(payload))
            alpha = parse_pattern(e["pattern"])
        except (ValueError, KeyError, TypeError) as exc:
            raise ManifestError(f"cannot parse {e['file']}: {exc}") from exc
        if alpha.N != e["N"] or v.dims != (2,) * (2 * alpha.N):
            raise ManifestError(f"{e['file']} does not match its manifest entry")
        entries[alpha] = v
    for N in range(max_N + 1):
        for alpha in enumerate_patterns(N):
            if alpha not in entries:
                raise ManifestError(f"table is missing {format_pattern(alpha) or 'the empty pattern'}")
    return PureVectorTable(entries, max_N)


# reports


@dataclass
class Assertion:
    id: str
    anchor: str
    passed: bool
    residual: Any = None

    def to_json(self) -> dict:
        return {
            "id": self.id,
            "anchor": self.anchor,
            "status": "pass" if self.passed else "fail",
            "residual": self.residual,
        }


@dataclass
class VerificationReport:
    suite: str
    assertions: list[Assertion] = field(default_factory=list)
    meta: dict = field(default_factory=dict)

    def add(self, id: str, anchor: str, passed: bool, residual: Any = None) -> bool:
        if anchor not in ANCHORS:
            raise ValueError(f"anchor {anchor!r} is not registered")
        if any(a.id == id for a in self.assertions):
            raise ValueError(f"duplicate assertion id {id!r}")
        self.assertions.append(Assertion(id, anchor, bool(passed), residual))
        return bool(passed)

    @property
    def passed(self) -> bool:
        return all(a.passed for a in self.assertions)

    @property
    def n_failed(self) -> int:
        return sum(not a.passed for a in self.assertions)

    def to_json(self) -> dict:
        return {
            "schema": REPORT_SCHEMA,
            "suite": self.suite,
            "passed": self.passed,
            "meta": self.meta,
            "assertions": [a.to_json() for a in self.assertions],
        }

    def dumps(self) -> str:
        return json.dumps(self.to_json(), sort_keys=True, indent=1)

    def write(self, directory) -> Path:
        d = Path(directory)
        d.mkdir(parents=True, exist_ok=True)
        path = d / f"{self.suite}_report.json"
        path.write_text(self.dumps())
        return path


def validate_report(obj: dict) -> list[str]:
    """Problems with a report JSON object (empty when it is well formed)."""
    problems = []
    if obj.get("schema") != REPORT_SCHEMA:
        problems.append(f"schema {obj.get('schema')!r}")
    seen = set()
    for a in obj.get("assertions", []):
        if a.get("anchor") not in ANCHORS:
            problems.append(f"unregistered anchor {a.get('anchor')!r} in {a.get('id')!r}")
        if a.get("id") in seen:
            problems.append(f"duplicate id {a.get('id')!r}")
        seen.add(a.get("id"))
        if a.get("status") not in ("pass", "fail"):
            problems.append(f"bad status in {a.get('id')!r}")
    return problems
