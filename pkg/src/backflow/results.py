"""Tabular sweep results and their CSV/JSON serialization.

Floats are serialized with 17 significant digits so that a round trip
through text is lossless and identical configs produce byte-identical
files.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field


def fmt(value: float) -> str:
    """Serialize a float with 17 significant digits."""
    return f"{value:.17g}"


@dataclass(frozen=True)
class SweepRow:
    parameter: float
    value: float
    converged: bool
    extras: dict = field(default_factory=dict)


@dataclass(frozen=True)
class SweepResult:
    """An ordered table of (parameter, value, diagnostics) rows."""

    rows: tuple
    columns: tuple  # header names: parameter column, value column, extras...
    metadata: dict = field(default_factory=dict)

    def __post_init__(self):
        params = [r.parameter for r in self.rows]
        if any(b <= a for a, b in zip(params, params[1:])):
            raise ValueError("sweep parameters must be strictly increasing")
        if not all(r.converged for r in self.rows):
            raise ValueError("all reported rows must have converged")

    def parameters(self):
        return [r.parameter for r in self.rows]

    def values(self):
        return [r.value for r in self.rows]

    def _cells(self, row: SweepRow):
        cells = [fmt(row.parameter), fmt(row.value)]
        for name in self.columns[2:]:
            if name == "converged":
                cells.append("true" if row.converged else "false")
            else:
                extra = row.extras[name]
                cells.append(fmt(extra) if isinstance(extra, float) else str(extra))
        return cells

    def to_csv(self) -> str:
        lines = [",".join(self.columns)]
        for row in self.rows:
            lines.append(",".join(self._cells(row)))
        return "\n".join(lines) + "\n"

    def to_json(self, paper_refs=()) -> str:
        payload = {
            "columns": list(self.columns),
            "rows": [self._cells(row) for row in self.rows],
            "metadata": {k: str(v) for k, v in sorted(self.metadata.items())},
        }
        if paper_refs:
            payload["paper_refs"] = list(paper_refs)
        return json.dumps(payload, indent=2) + "\n"
