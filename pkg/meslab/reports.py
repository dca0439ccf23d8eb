"""Verification reports and the JSON / CSV / text writers."""

import json
import logging
import os
import sys
from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional

import pandas as pd

from meslab.config import TOOL_VERSION

logger = logging.getLogger(__name__)

MAX_LISTED_VIOLATIONS = 50


@dataclass
class VerificationReport:
    """Outcome of one exhaustive check. Violations are recorded, never raised."""
    name: str
    d: int
    checks: int = 0
    violation_count: int = 0
    violations: List[str] = field(default_factory=list)
    details: Dict[str, Any] = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return self.violation_count == 0

    def check(self, condition: bool, message) -> bool:
        """Count one check; record message (str or callable) when it fails."""
        self.checks += 1
        if not condition:
            self.violation_count += 1
            if len(self.violations) < MAX_LISTED_VIOLATIONS:
                self.violations.append(message() if callable(message) else message)
        return condition

    def merge(self, other: "VerificationReport") -> None:
        self.checks += other.checks
        self.violation_count += other.violation_count
        room = MAX_LISTED_VIOLATIONS - len(self.violations)
        if room > 0:
            self.violations.extend(f"[{other.name}] {v}" for v in other.violations[:room])

    def to_dict(self) -> Dict[str, Any]:
        doc = {
            'name': self.name,
            'd': self.d,
            'passed': self.passed,
            'checks': self.checks,
            'violation_count': self.violation_count,
            'violations': list(self.violations),
        }
        if self.details:
            doc['details'] = self.details
        return doc


def provenance(command: str, d: int, seed: Optional[int] = None) -> Dict[str, Any]:
    return {'tool_version': TOOL_VERSION, 'command': command, 'd': d, 'seed': seed}


def flatten(doc: Any, prefix: str = "") -> List[Dict[str, Any]]:
    """Flatten nested JSON-like data to key/value rows."""
    rows: List[Dict[str, Any]] = []
    if isinstance(doc, dict):
        for key in sorted(doc):
            rows.extend(flatten(doc[key], f"{prefix}.{key}" if prefix else str(key)))
    elif isinstance(doc, list):
        for i, item in enumerate(doc):
            rows.extend(flatten(item, f"{prefix}[{i}]"))
    else:
        rows.append({'key': prefix, 'value': doc})
    return rows


def to_json(doc: Dict[str, Any]) -> str:
    return json.dumps(doc, indent=2, sort_keys=True, ensure_ascii=False) + "\n"


def to_csv(rows: List[Dict[str, Any]]) -> str:
    df = pd.DataFrame(rows)
    return df.to_csv(index=False, lineterminator="\n")


def to_text(doc: Dict[str, Any]) -> str:
    lines = []
    for row in flatten(doc):
        lines.append(f"{row['key']}: {row['value']}")
    return "\n".join(lines) + "\n"


def render(doc: Dict[str, Any], fmt: str, rows: Optional[List[Dict[str, Any]]] = None,
           text: Optional[str] = None) -> str:
    """Serialize one report document. CSV uses rows when given, else the flattened doc."""
    if fmt == "json":
        return to_json(doc)
    if fmt == "csv":
        return to_csv(rows if rows is not None else flatten(doc))
    if fmt == "text":
        return text if text is not None else to_text(doc)
    raise ValueError(f"unknown format {fmt!r}")


def emit(content: str, path: Optional[str] = None) -> None:
    """Write content to path, or stdout when path is None."""
    if path is None:
        sys.stdout.write(content)
        sys.stdout.flush()
        return
    directory = os.path.dirname(path)
    if directory:
        os.makedirs(directory, exist_ok=True)
    with open(path, 'w', encoding='utf-8', newline='') as f:
        f.write(content)
    logger.info(f"Report saved to {path}")
