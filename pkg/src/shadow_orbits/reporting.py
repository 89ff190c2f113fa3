"""Canonical report serialization.

JSON is emitted with sorted keys and fixed separators so identical
configurations give byte-identical files; integers beyond 2^53 are encoded
as decimal strings to survive double-precision JSON readers.
"""

from __future__ import annotations

import json

SAFE_INT = 2**53


def _transform(obj):
    if isinstance(obj, bool) or obj is None:
        return obj
    if isinstance(obj, int):
        return str(obj) if abs(obj) > SAFE_INT else obj
    if isinstance(obj, float):
        raise TypeError("reports must not contain floats")
    if isinstance(obj, dict):
        return {str(k): _transform(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_transform(v) for v in obj]
    return obj


def canonical_json(payload: dict) -> str:
    return json.dumps(_transform(payload), sort_keys=True, separators=(",", ":"), ensure_ascii=True)


def report_to_csv(report: dict) -> str:
    """Flat CSV view of a report: histograms, table rows and truncations each
    get their natural columns; everything else flattens to key,value rows."""
    lines: list[str] = []
    if "rows" in report:
        lines.append("S,d,z,delta,target,value,poly,oracle,match")
        for row in report["rows"]:
            for target, cell in sorted(row.get("transitions", {}).items()):
                lines.append(
                    f"{row['S']},{row['d']},{row['z']['value']},{row['delta']},"
                    f"{target},{cell['value']},{cell.get('poly', '')},"
                    f"{'' if cell.get('oracle') is None else cell['oracle']},{cell.get('match', '')}"
                )
    if "rank_histogram" in report:
        lines.append("rank,count")
        for rank, count in sorted(report["rank_histogram"].items(), key=lambda kv: int(kv[0])):
            lines.append(f"{rank},{count}")
    if "truncation" in report:
        lines.append("k,value,provenance")
        for row in report["truncation"]:
            lines.append(f"{row['k']},{row['value']},{'|'.join(row['provenance'])}")
    if not lines:
        lines.append("key,value")
        for k in sorted(report):
            v = report[k]
            if isinstance(v, (str, int, bool)) or v is None:
                lines.append(f"{k},{v}")
    return "\n".join(lines) + "\n"
