"""Total parser for tagged rollout transcripts.

Solver transcripts interleave <think>, <search>, <information>, and end
with one <answer> span; proposer transcripts end with one <question>
span. Parsing never fails: malformed input degrades to best-effort spans
plus reason codes, with validity captured in Trajectory.valid. Text
outside tags is preserved as filler spans and ignored for validity, so
the span list always reconstructs the raw input byte for byte.
"""

import re
from dataclasses import dataclass

TAG_KINDS = ("think", "search", "information", "answer", "question")
_TAG_RE = re.compile(r"</?(think|search|information|answer|question)>")

_ROLE_KINDS = {
    "solver": frozenset({"think", "search", "information", "answer"}),
    "proposer": frozenset({"think", "search", "question"}),
}
_TERMINAL_KIND = {"solver": "answer", "proposer": "question"}

FILLER = "filler"


@dataclass(frozen=True)
class Span:
    kind: str  # one of TAG_KINDS or "filler"
    content: str
    closed: bool = True  # False only for a best-effort unclosed tail span


@dataclass(frozen=True)
class Trajectory:
    raw: str
    role: str
    spans: tuple
    think_text: str
    final_answer: str | None
    final_question: str | None
    valid: bool
    reasons: tuple


def serialize_spans(spans) -> str:
    """Inverse of parsing: render spans back to transcript text."""
    parts = []
    for span in spans:
        if span.kind == FILLER:
            parts.append(span.content)
        elif span.closed:
            parts.append(f"<{span.kind}>{span.content}</{span.kind}>")
        else:
            parts.append(f"<{span.kind}>{span.content}")
    return "".join(parts)


def _scan_spans(raw: str):
    """Single pass over tag tokens; returns (spans, structural reason codes)."""
    spans = []
    reasons = []
    open_kind = None
    content_start = 0
    pos = 0
    for m in _TAG_RE.finditer(raw):
        name = m.group(1)
        is_close = raw[m.start() + 1] == "/"
        if open_kind is None:
            if is_close:
                if "stray_closing_tag" not in reasons:
                    reasons.append("stray_closing_tag")
                # tag text stays in the surrounding filler
                continue
            if m.start() > pos:
                spans.append(Span(FILLER, raw[pos : m.start()]))
            open_kind = name
            content_start = m.end()
        else:
            if is_close and name == open_kind:
                spans.append(Span(open_kind, raw[content_start : m.start()]))
                open_kind = None
                pos = m.end()
            else:
                # opening tag, or mismatched closer, inside an open span:
                # kept as literal content, invalidates the transcript
                if "nesting" not in reasons:
                    reasons.append("nesting")
    if open_kind is not None:
        spans.append(Span(open_kind, raw[content_start:], closed=False))
        reasons.append("unclosed_tag")
    elif pos < len(raw):
        spans.append(Span(FILLER, raw[pos:]))
    return spans, reasons


def parse_trajectory(raw: str, role: str = "solver") -> Trajectory:
    """Parse a transcript; total over arbitrary input strings."""
    if role not in _ROLE_KINDS:
        raise ValueError(f"unknown role {role!r}")
    spans, reasons = _scan_spans(raw)
    tagged = [s for s in spans if s.kind != FILLER]

    allowed = _ROLE_KINDS[role]
    if any(s.kind not in allowed for s in tagged):
        reasons.append("foreign_tag")

    terminal = _TERMINAL_KIND[role]
    terminal_spans = [s for s in tagged if s.kind == terminal]
    terminal_text = None
    if not terminal_spans:
        reasons.append(f"missing_{terminal}")
    elif len(terminal_spans) > 1:
        reasons.append(f"multiple_{terminal}s")
    else:
        text = terminal_spans[0].content.strip()
        if not text:
            reasons.append(f"empty_{terminal}")
        elif tagged[-1].kind != terminal:
            reasons.append(f"{terminal}_not_terminal")
        else:
            terminal_text = text

    think_text = "\n".join(s.content for s in spans if s.kind == "think")
    valid = not reasons
    return Trajectory(
        raw=raw,
        role=role,
        spans=tuple(spans),
        think_text=think_text,
        final_answer=terminal_text if role == "solver" else None,
        final_question=terminal_text if role == "proposer" else None,
        valid=valid,
        reasons=tuple(reasons),
    )
