"""Next-edge selection during path expansion.

Three interchangeable selectors share one request/decision contract: a
seeded heuristic (offline default), a remote text endpoint wrapped in
bounded retries, and a transcript replayer. The remote transport is just
"send text, receive text"; any chat or completion framing belongs to the
transport adapter, not here.
"""

import hashlib
import json
import logging
import os
import threading
from dataclasses import dataclass
from pathlib import Path

import httpx
import jinja2

logger = logging.getLogger(__name__)

DEFAULT_TEMPLATE_PATH = Path(__file__).resolve().parent / "data" / "selector_prompt.txt"

ENDPOINT_ENV = "SELECTOR_ENDPOINT"
API_KEY_ENV = "SELECTOR_API_KEY"


class SelectorError(RuntimeError):
    """Base class for selection failures."""


class SelectorExhausted(SelectorError):
    """Raised when the retry budget runs out without a usable decision."""

    def __init__(self, message: str, attempts: int):
        super().__init__(message)
        self.attempts = attempts


@dataclass(frozen=True)
class NodeView:
    title: str
    description: str = ""
    attributes: tuple = ()


@dataclass(frozen=True)
class CandidateView:
    relation_label: str
    target_title: str
    target_description: str = ""


@dataclass(frozen=True)
class SelectorRequest:
    path_history: str
    current_node: NodeView
    candidates: tuple  # 1-indexed when presented; answer 0 means stop


@dataclass(frozen=True)
class SelectorDecision:
    think: str
    answer: int  # 0 = stop, 1..N = pick that candidate


def request_digest(request: SelectorRequest) -> str:
    """Stable content hash used to key transcript records."""
    payload = {
        "path_history": request.path_history,
        "current": request.current_node.title,
        "candidates": [
            [c.relation_label, c.target_title] for c in request.candidates
        ],
    }
    blob = json.dumps(payload, sort_keys=True, ensure_ascii=False)
    return hashlib.sha256(blob.encode("utf-8")).hexdigest()


# ---------------------------------------------------------------------------
# prompt rendering

_template_cache: dict = {}


def render_prompt(request: SelectorRequest, template_path=None) -> str:
    """Render the selector prompt for one request."""
    path = Path(template_path) if template_path else DEFAULT_TEMPLATE_PATH
    key = str(path)
    template = _template_cache.get(key)
    if template is None:
        env = jinja2.Environment(
            undefined=jinja2.StrictUndefined, keep_trailing_newline=True
        )
        template = env.from_string(path.read_text(encoding="utf-8"))
        _template_cache[key] = template
    return template.render(
        path_history=request.path_history,
        current_node=request.current_node,
        candidates=request.candidates,
    )


# ---------------------------------------------------------------------------
# heuristic selector

@dataclass(frozen=True)
class HeuristicSelectorConfig:
    p_stop: float = 0.05
    described_weight: float = 2.0  # candidates with a target description
    bare_weight: float = 1.0

    def __post_init__(self):
        if not 0.0 <= self.p_stop < 1.0:
            raise ValueError("p_stop must lie in [0, 1)")
        if self.described_weight <= 0 or self.bare_weight <= 0:
            raise ValueError("weights must be positive")


def heuristic_select(request: SelectorRequest, rng,
                     config: HeuristicSelectorConfig | None = None) -> SelectorDecision:
    """Seeded weighted draw; favors candidates whose target is described."""
    config = config or HeuristicSelectorConfig()
    n = len(request.candidates)
    if n == 0:
        return SelectorDecision(think="no candidates offered", answer=0)
    if config.p_stop > 0.0 and rng.random() < config.p_stop:
        return SelectorDecision(think="stopping here", answer=0)
    weights = [
        config.described_weight if c.target_description else config.bare_weight
        for c in request.candidates
    ]
    pick = rng.choices(range(1, n + 1), weights=weights, k=1)[0]
    return SelectorDecision(think=f"weighted draw over {n} candidates", answer=pick)


class HeuristicSelector:
    """Callable wrapper owning its RNG stream."""

    def __init__(self, rng, config: HeuristicSelectorConfig | None = None):
        self.rng = rng
        self.config = config or HeuristicSelectorConfig()

    def __call__(self, request: SelectorRequest) -> SelectorDecision:
        return heuristic_select(request, self.rng, self.config)


# ---------------------------------------------------------------------------
# remote selector

@dataclass(frozen=True)
class RemoteSelectorConfig:
    endpoint: str = ""
    api_key: str = ""
    max_retries: int = 5
    timeout: float = 30.0
    max_in_flight: int = 10

    @classmethod
    def from_env(cls, **overrides) -> "RemoteSelectorConfig":
        values = {
            "endpoint": os.environ.get(ENDPOINT_ENV, ""),
            "api_key": os.environ.get(API_KEY_ENV, ""),
        }
        values.update(overrides)
        return cls(**values)

    def __post_init__(self):
        if self.max_retries < 0:
            raise ValueError("max_retries must be >= 0")
        if self.max_in_flight < 1:
            raise ValueError("max_in_flight must be >= 1")


def extract_decision(text: str, n_candidates: int) -> SelectorDecision | None:
    """Pull the first balanced, well-shaped JSON verdict out of free text.

    Returns None when no parseable object exists or the first parseable
    object fails the shape/range check (callers retry; answers are never
    clamped into range).
    """
    decoder = json.JSONDecoder()
    start = text.find("{")
    while start != -1:
        try:
            obj, _ = decoder.raw_decode(text, start)
        except ValueError:
            start = text.find("{", start + 1)
            continue
        if (
            isinstance(obj, dict)
            and isinstance(obj.get("think"), str)
            and isinstance(obj.get("answer"), int)
            and not isinstance(obj.get("answer"), bool)
            and 0 <= obj["answer"] <= n_candidates
        ):
            return SelectorDecision(think=obj["think"], answer=obj["answer"])
        return None
    return None


def make_http_transport(config: RemoteSelectorConfig):
    """Plain text-in/text-out POST against the configured endpoint."""
    if not config.endpoint:
        raise ValueError(f"no endpoint configured (set {ENDPOINT_ENV})")
    headers = {}
    if config.api_key:
        headers["Authorization"] = f"Bearer {config.api_key}"
    client = httpx.Client(timeout=config.timeout, headers=headers)

    def call(prompt: str) -> str:
        response = client.post(config.endpoint, json={"prompt": prompt})
        response.raise_for_status()
        try:
            payload = response.json()
        except ValueError:
            return response.text
        if isinstance(payload, dict) and isinstance(payload.get("text"), str):
            return payload["text"]
        return response.text

    return call


class TranscriptLog:
    """Append-only JSONL record of request/decision pairs."""

    def __init__(self, path):
        self.path = Path(path)
        self._lock = threading.Lock()

    def record(self, request: SelectorRequest, decision: SelectorDecision):
        line = json.dumps(
            {
                "digest": request_digest(request),
                "think": decision.think,
                "answer": decision.answer,
            },
            ensure_ascii=False,
        )
        with self._lock:
            with open(self.path, "a", encoding="utf-8") as fh:
                fh.write(line + "\n")


class RemoteSelector:
    """Retry-bounded selector over a text transport.

    Each select() makes at most max_retries + 1 transport calls; transport
    errors and unusable responses both consume attempts. Concurrent
    callers share a max_in_flight semaphore.
    """

    def __init__(self, transport=None, config: RemoteSelectorConfig | None = None,
                 template_path=None, transcript: TranscriptLog | None = None):
        self.config = config or RemoteSelectorConfig.from_env()
        self.transport = transport or make_http_transport(self.config)
        self.template_path = template_path
        self.transcript = transcript
        self.calls = 0
        self.retries = 0
        self._metrics_lock = threading.Lock()
        self._gate = threading.BoundedSemaphore(self.config.max_in_flight)

    def __call__(self, request: SelectorRequest) -> SelectorDecision:
        return self.select(request)

    def select(self, request: SelectorRequest) -> SelectorDecision:
        prompt = render_prompt(request, self.template_path)
        attempts = self.config.max_retries + 1
        for attempt in range(attempts):
            with self._metrics_lock:
                self.calls += 1
                if attempt:
                    self.retries += 1
            try:
                with self._gate:
                    text = self.transport(prompt)
            except Exception as exc:
                logger.debug("selector transport error (attempt %d): %s", attempt + 1, exc)
                continue
            decision = extract_decision(text, len(request.candidates))
            if decision is not None:
                if self.transcript is not None:
                    self.transcript.record(request, decision)
                return decision
            logger.debug("unusable selector response (attempt %d)", attempt + 1)
        raise SelectorExhausted(
            f"no usable decision after {attempts} attempts", attempts=attempts
        )


class ReplaySelector:
    """Replays a transcript log in record order, verifying request digests."""

    def __init__(self, path):
        self.records = []
        with open(path, encoding="utf-8") as fh:
            for line in fh:
                line = line.strip()
                if line:
                    self.records.append(json.loads(line))
        self._pos = 0

    def __call__(self, request: SelectorRequest) -> SelectorDecision:
        if self._pos >= len(self.records):
            raise SelectorError("transcript exhausted")
        rec = self.records[self._pos]
        if rec["digest"] != request_digest(request):
            raise SelectorError(
                f"transcript mismatch at record {self._pos}: request diverged"
            )
        self._pos += 1
        return SelectorDecision(think=rec.get("think", ""), answer=int(rec["answer"]))
