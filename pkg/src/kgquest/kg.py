"""Knowledge-graph loading, in-memory structure, and relation filtering.

The on-disk format is JSONL with one record per line. Entity records:

    {"kind": "entity", "id": ..., "title": ..., "description": ...,
     "answer_type": ..., "attributes": [{"property_label": ..., "value": ...}]}

Edge records:

    {"kind": "edge", "source": ..., "relation_id": ...,
     "relation_label": ..., "target": ...}

Edges referencing unknown entities are dropped and counted rather than
rejected, so partial dumps still load.
"""

import json
import logging
from dataclasses import dataclass, field
from pathlib import Path

logger = logging.getLogger(__name__)

ANSWER_TYPES = frozenset(
    {"person", "organization", "location", "date", "number", "other"}
)


class GraphFormatError(ValueError):
    """Raised for malformed dump records; message carries the line number."""


@dataclass(frozen=True)
class Entity:
    id: str
    title: str
    description: str
    answer_type: str
    attributes: tuple = ()  # tuple of (property_label, value) pairs


@dataclass(frozen=True)
class Edge:
    source: str
    relation_id: str
    relation_label: str
    target: str

    @property
    def relation_key(self) -> str:
        """Key used by relation filters: the id when present, else the label."""
        return self.relation_id if self.relation_id else self.relation_label


@dataclass(frozen=True)
class RelationFilter:
    """Blocklist/allowlist over relation keys plus a candidate cap.

    An empty-set allowlist would silently reject every edge, so it is a
    construction error; pass None to disable allowlisting.
    """

    blocklist: frozenset = frozenset()
    allowlist: frozenset | None = None
    candidate_cap: int = 10

    def __post_init__(self):
        object.__setattr__(self, "blocklist", frozenset(self.blocklist))
        if self.allowlist is not None:
            object.__setattr__(self, "allowlist", frozenset(self.allowlist))
            if not self.allowlist:
                raise ValueError(
                    "empty allowlist rejects every edge; use None to disable"
                )
            overlap = self.blocklist & self.allowlist
            if overlap:
                raise ValueError(
                    f"relations cannot be both blocked and allowed: {sorted(overlap)}"
                )
        if self.candidate_cap < 1:
            raise ValueError("candidate_cap must be >= 1")

    def passes(self, edge: Edge) -> bool:
        key = edge.relation_key
        if key in self.blocklist:
            return False
        if self.allowlist is not None and key not in self.allowlist:
            return False
        return True

    @classmethod
    def from_dict(cls, cfg: dict) -> "RelationFilter":
        allow = cfg.get("allowlist")
        return cls(
            blocklist=frozenset(cfg.get("blocklist", ())),
            allowlist=None if allow is None else frozenset(allow),
            candidate_cap=cfg.get("candidate_cap", 10),
        )

    @classmethod
    def from_json_file(cls, path) -> "RelationFilter":
        with open(path, encoding="utf-8") as fh:
            return cls.from_dict(json.load(fh))


@dataclass
class KnowledgeGraph:
    """Immutable adjacency view over a loaded dump.

    Outgoing edges keep dump order; candidate_edges relies on that for
    deterministic truncation.
    """

    entities: dict
    _outgoing: dict
    dangling_dropped: int = 0
    source_path: str = ""
    _empty: tuple = field(default=(), repr=False)

    def __contains__(self, entity_id: str) -> bool:
        return entity_id in self.entities

    def entity(self, entity_id: str) -> Entity:
        try:
            return self.entities[entity_id]
        except KeyError:
            raise KeyError(f"unknown entity id: {entity_id!r}") from None

    def outgoing(self, entity_id: str) -> tuple:
        if entity_id not in self.entities:
            raise KeyError(f"unknown entity id: {entity_id!r}")
        return self._outgoing.get(entity_id, self._empty)

    def entity_ids(self):
        return list(self.entities.keys())

    @property
    def entity_count(self) -> int:
        return len(self.entities)

    @property
    def edge_count(self) -> int:
        return sum(len(v) for v in self._outgoing.values())


def _parse_attributes(raw, line_no: int) -> tuple:
    if raw is None:
        return ()
    if not isinstance(raw, list):
        raise GraphFormatError(f"line {line_no}: attributes must be a list")
    out = []
    for item in raw:
        if not isinstance(item, dict) or "property_label" not in item or "value" not in item:
            raise GraphFormatError(
                f"line {line_no}: attribute needs property_label and value"
            )
        out.append((str(item["property_label"]), str(item["value"])))
    return tuple(out)


def _parse_entity(rec: dict, line_no: int) -> Entity:
    for key in ("id", "title"):
        if not rec.get(key):
            raise GraphFormatError(f"line {line_no}: entity record missing {key!r}")
    answer_type = rec.get("answer_type", "other")
    if answer_type not in ANSWER_TYPES:
        raise GraphFormatError(
            f"line {line_no}: unknown answer_type {answer_type!r}"
        )
    return Entity(
        id=str(rec["id"]),
        title=str(rec["title"]),
        description=str(rec.get("description", "")),
        answer_type=answer_type,
        attributes=_parse_attributes(rec.get("attributes"), line_no),
    )


def _parse_edge(rec: dict, line_no: int) -> Edge:
    for key in ("source", "target", "relation_label"):
        if not rec.get(key):
            raise GraphFormatError(f"line {line_no}: edge record missing {key!r}")
    return Edge(
        source=str(rec["source"]),
        relation_id=str(rec.get("relation_id", "")),
        relation_label=str(rec["relation_label"]),
        target=str(rec["target"]),
    )


def load_graph(path, max_entities: int | None = None,
               max_edges: int | None = None) -> KnowledgeGraph:
    """Load a JSONL dump into an adjacency structure.

    Caps, when given, keep the first N records of each kind in file
    order. Edges whose endpoints did not load are dropped and counted on
    the returned graph.
    """
    path = Path(path)
    entities: dict = {}
    edges: list = []
    with open(path, encoding="utf-8") as fh:
        for line_no, line in enumerate(fh, start=1):
            line = line.strip()
            if not line:
                continue
            try:
                rec = json.loads(line)
            except json.JSONDecodeError as exc:
                raise GraphFormatError(f"line {line_no}: invalid JSON: {exc}") from exc
            if not isinstance(rec, dict):
                raise GraphFormatError(f"line {line_no}: record must be an object")
            kind = rec.get("kind")
            if kind == "entity":
                if max_entities is not None and len(entities) >= max_entities:
                    continue
                ent = _parse_entity(rec, line_no)
                if ent.id in entities:
                    raise GraphFormatError(f"line {line_no}: duplicate entity id {ent.id!r}")
                entities[ent.id] = ent
            elif kind == "edge":
                if max_edges is not None and len(edges) >= max_edges:
                    continue
                edges.append(_parse_edge(rec, line_no))
            else:
                raise GraphFormatError(f"line {line_no}: unknown record kind {kind!r}")
    if not entities:
        raise GraphFormatError(f"{path}: dump contains no entities")

    outgoing: dict = {}
    dangling = 0
    for edge in edges:
        if edge.source in entities and edge.target in entities:
            outgoing.setdefault(edge.source, []).append(edge)
        else:
            dangling += 1
    if dangling:
        logger.debug("dropped %d dangling edges from %s", dangling, path)
    return KnowledgeGraph(
        entities=entities,
        _outgoing={k: tuple(v) for k, v in outgoing.items()},
        dangling_dropped=dangling,
        source_path=str(path),
    )


def candidate_edges(graph: KnowledgeGraph, entity_id: str,
                    flt: RelationFilter) -> tuple:
    """Filtered outgoing edges, truncated to the first candidate_cap in dump order."""
    kept = [e for e in graph.outgoing(entity_id) if flt.passes(e)]
    return tuple(kept[: flt.candidate_cap])
