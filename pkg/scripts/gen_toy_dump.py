"""Regenerate the bundled toy graph dump.

Deterministic circulant layout: node i points to i+1, i+3, i+7 (mod N)
with rotating specific relations, and even nodes add an i+11 edge under
the deliberately generic R00 relation that the example filter config
blocklists. Positive jumps keep any walk of <= 7 hops cycle-free, and
every title has the same length so no title is a substring of another
(the harness's mention statistics rely on that).

Usage: python3 scripts/gen_toy_dump.py [output_path]
"""

import json
import sys
from pathlib import Path

N = 200
NOUNS = ["Amber", "Cedar", "Delta", "Ember", "Flint",
         "Grove", "Heron", "Ivory", "Karst", "Lumen"]
ANSWER_TYPES = ["person", "organization", "location", "date", "number", "other"]
RELATIONS = [
    ("R01", "located in"),
    ("R02", "member of"),
    ("R03", "part of"),
    ("R04", "created by"),
    ("R05", "successor of"),
    ("R06", "operated by"),
    ("R07", "adjacent to"),
    ("R08", "supplies"),
    ("R09", "reports to"),
    ("R10", "derived from"),
    ("R11", "allied with"),
    ("R12", "custodian of"),
]
GENERIC = ("R00", "related to")
JUMPS = (1, 3, 7)


def title_of(i: int) -> str:
    return f"{NOUNS[i % len(NOUNS)]} Hub {i:03d}"


def entity_record(i: int) -> dict:
    if i % 7 == 3:
        description = ""
    else:
        description = f"waystation {i:03d} on ring {i % 8} of the survey network"
    if i % 3 == 0:
        attributes = [
            {"property_label": "sector", "value": f"S{i % 12:02d}"},
            {"property_label": "grade", "value": chr(65 + i % 5)},
        ]
    elif i % 3 == 1:
        attributes = [{"property_label": "sector", "value": f"S{i % 12:02d}"}]
    else:
        attributes = []
    return {
        "kind": "entity",
        "id": f"N{i:03d}",
        "title": title_of(i),
        "description": description,
        "answer_type": ANSWER_TYPES[i % len(ANSWER_TYPES)],
        "attributes": attributes,
    }


def edge_records(i: int):
    for jump in JUMPS:
        rel_id, rel_label = RELATIONS[(i * 3 + jump) % len(RELATIONS)]
        yield {
            "kind": "edge",
            "source": f"N{i:03d}",
            "relation_id": rel_id,
            "relation_label": rel_label,
            "target": f"N{(i + jump) % N:03d}",
        }
    if i % 2 == 0:
        yield {
            "kind": "edge",
            "source": f"N{i:03d}",
            "relation_id": GENERIC[0],
            "relation_label": GENERIC[1],
            "target": f"N{(i + 11) % N:03d}",
        }


def main() -> int:
    default = Path(__file__).resolve().parents[1] / "src" / "kgquest" / "data" / "toy_graph.jsonl"
    out = Path(sys.argv[1]) if len(sys.argv) > 1 else default
    lines = []
    for i in range(N):
        lines.append(json.dumps(entity_record(i), ensure_ascii=False))
    for i in range(N):
        for rec in edge_records(i):
            lines.append(json.dumps(rec, ensure_ascii=False))
    out.write_text("\n".join(lines) + "\n", encoding="utf-8")
    print(f"wrote {len(lines)} records to {out}")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
