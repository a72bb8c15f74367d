"""Command-line surface.

Every subcommand writes its primary outputs plus a manifest.json into
--output-dir. Exit codes partition failure modes: 0 success, 2 bad
configuration, 3 I/O problems, 4 extraction accepted zero seeds, 5 some
but not all score groups failed.

Same inputs and --seed give byte-identical primary outputs; only the
manifest timings differ between runs.
"""

import concurrent.futures
import hashlib
import json
import sys
import time
from pathlib import Path

import click

from . import __version__
from .extraction import (
    ExtractionConfig,
    PathRejected,
    extract_subgraph,
    serialize_subgraph,
    to_canonical_json,
    to_jsonl_line,
)
from .harness import SolverPolicyConfig, derive_rng, simulate_run, write_metrics_csv
from .kg import GraphFormatError, RelationFilter, load_graph
from .pipeline import FilterConfig, compute_stats, order_curriculum, rule_filter
from .reward import RewardConfig, score_group
from .selector import (
    CandidateView,
    HeuristicSelector,
    HeuristicSelectorConfig,
    NodeView,
    RemoteSelector,
    RemoteSelectorConfig,
    ReplaySelector,
    SelectorError,
    SelectorExhausted,
    SelectorRequest,
    TranscriptLog,
)

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_IO = 3
EXIT_NO_OUTPUT = 4
EXIT_PARTIAL = 5

DATA_DIR = Path(__file__).resolve().parent / "data"
TOY_GRAPH = DATA_DIR / "toy_graph.jsonl"
SCHEMA_PATH = DATA_DIR / "subgraph.schema.json"


class CliError(Exception):
    def __init__(self, code: int, message: str):
        super().__init__(message)
        self.code = code


def _sha256_file(path: Path) -> str:
    h = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(1 << 16), b""):
            h.update(chunk)
    return h.hexdigest()


def _load_config_file(path):
    if not path:
        return {}
    try:
        with open(path, encoding="utf-8") as fh:
            cfg = json.load(fh)
    except OSError as exc:
        raise CliError(EXIT_IO, f"cannot read config file: {exc}")
    except json.JSONDecodeError as exc:
        raise CliError(EXIT_CONFIG, f"config file is not valid JSON: {exc}")
    if not isinstance(cfg, dict):
        raise CliError(EXIT_CONFIG, "config file must hold a JSON object")
    return cfg


def _merge(cli_value, config: dict, key: str, default):
    """CLI flag wins, then config file, then the built-in default."""
    if cli_value is not None:
        return cli_value
    if key in config:
        return config[key]
    return default


def _write_manifest(out_dir: Path, command: str, seed, settings: dict,
                    inputs: dict, outputs: list, started: float):
    manifest = {
        "tool": "kgquest",
        "version": __version__,
        "command": command,
        "seed": seed,
        "settings": settings,
        "inputs": {
            name: _sha256_file(Path(p)) for name, p in inputs.items() if Path(p).exists()
        },
        "outputs": {Path(p).name: _sha256_file(Path(p)) for p in outputs},
        "timings": {"started_unix": started, "elapsed_s": time.time() - started},
    }
    with open(out_dir / "manifest.json", "w", encoding="utf-8") as fh:
        json.dump(manifest, fh, indent=2, sort_keys=True)
        fh.write("\n")


def _prepare_out_dir(output_dir) -> Path:
    out = Path(output_dir)
    try:
        out.mkdir(parents=True, exist_ok=True)
    except OSError as exc:
        raise CliError(EXIT_IO, f"cannot create output dir: {exc}")
    return out


def _load_graph_checked(path):
    try:
        return load_graph(path)
    except OSError as exc:
        raise CliError(EXIT_IO, f"cannot read dump: {exc}")
    except GraphFormatError as exc:
        raise CliError(EXIT_IO, f"corrupt dump: {exc}")


def _run(ctx_main):
    try:
        return ctx_main()
    except CliError as exc:
        click.echo(f"error: {exc}", err=True)
        sys.exit(exc.code)
    except ValueError as exc:
        click.echo(f"config error: {exc}", err=True)
        sys.exit(EXIT_CONFIG)


@click.group()
@click.version_option(version=__version__, prog_name="kgquest")
def main():
    """Knowledge-graph question construction and group reward scoring."""


# ---------------------------------------------------------------------------
# extract

def _make_selector(kind, p_stop, rng, transcript_path, replay_path, endpoint, retries):
    if kind == "heuristic":
        return HeuristicSelector(rng, HeuristicSelectorConfig(p_stop=p_stop))
    if kind == "replay":
        if not replay_path:
            raise CliError(EXIT_CONFIG, "--replay-transcript required for replay selector")
        try:
            return ReplaySelector(replay_path)
        except OSError as exc:
            raise CliError(EXIT_IO, f"cannot read transcript: {exc}")
    config = RemoteSelectorConfig.from_env(
        **({"endpoint": endpoint} if endpoint else {}),
        max_retries=retries,
    )
    if not config.endpoint:
        raise CliError(EXIT_CONFIG, "remote selector needs --endpoint or SELECTOR_ENDPOINT")
    transcript = TranscriptLog(transcript_path) if transcript_path else None
    return RemoteSelector(config=config, transcript=transcript)


@main.command()
@click.option("--dump", type=click.Path(), default=None, help="Graph dump JSONL (default: bundled toy graph).")
@click.option("--count", type=int, default=None, help="Number of seed entities to try (default 20).")
@click.option("--seed-ids", default=None, help="Comma-separated entity ids to use as seeds instead of sampling.")
@click.option("--k-min", type=int, default=None)
@click.option("--k-max", type=int, default=None)
@click.option("--distractor-min", type=int, default=None)
@click.option("--distractor-max", type=int, default=None)
@click.option("--retries", type=int, default=None, help="Selector retry budget per hop (default 5).")
@click.option("--selector", "selector_kind", type=click.Choice(["heuristic", "remote", "replay"]), default=None)
@click.option("--p-stop", type=float, default=None, help="Heuristic stop probability (default 0.05).")
@click.option("--endpoint", default=None, help="Remote selector endpoint (or SELECTOR_ENDPOINT).")
@click.option("--transcript", "transcript_path", type=click.Path(), default=None, help="Record remote decisions to this JSONL.")
@click.option("--replay-transcript", "replay_path", type=click.Path(), default=None)
@click.option("--filter-config", type=click.Path(), default=None, help="Relation filter JSON (default: bundled example).")
@click.option("--validate/--no-validate", "do_validate", default=True, help="Validate emitted docs against the bundled schema.")
@click.option("--output-dir", type=click.Path(), default=None)
@click.option("--seed", type=int, default=None)
@click.option("--jobs", type=int, default=None)
@click.option("--config", "config_path", type=click.Path(), default=None)
def extract(dump, count, seed_ids, k_min, k_max, distractor_min, distractor_max,
            retries, selector_kind, p_stop, endpoint, transcript_path, replay_path,
            filter_config, do_validate, output_dir, seed, jobs, config_path):
    """Extract question subgraphs from a graph dump."""

    def body():
        cfg = _load_config_file(config_path)
        dump_path = Path(_merge(dump, cfg, "dump", TOY_GRAPH))
        n_seeds = _merge(count, cfg, "count", 20)
        the_seed = _merge(seed, cfg, "seed", 0)
        n_jobs = _merge(jobs, cfg, "jobs", 1)
        kind = _merge(selector_kind, cfg, "selector", "heuristic")
        stop_p = _merge(p_stop, cfg, "p_stop", 0.05)
        retry_budget = _merge(retries, cfg, "retries", 5)
        out_dir = _prepare_out_dir(_merge(output_dir, cfg, "output_dir", "kgquest-out"))
        ex_config = ExtractionConfig(
            k_min=_merge(k_min, cfg, "k_min", 3),
            k_max=_merge(k_max, cfg, "k_max", 7),
            distractor_min=_merge(distractor_min, cfg, "distractor_min", 1),
            distractor_max=_merge(distractor_max, cfg, "distractor_max", 3),
            retries=retry_budget,
        )
        if n_jobs < 1:
            raise CliError(EXIT_CONFIG, "--jobs must be >= 1")
        flt_path = _merge(filter_config, cfg, "filter_config", DATA_DIR / "filter_config.json")
        try:
            flt = RelationFilter.from_json_file(flt_path)
        except OSError as exc:
            raise CliError(EXIT_IO, f"cannot read filter config: {exc}")
        except (ValueError, KeyError) as exc:
            raise CliError(EXIT_CONFIG, f"bad filter config: {exc}")
        graph = _load_graph_checked(dump_path)

        ids_option = _merge(seed_ids, cfg, "seed_ids", None)
        if ids_option:
            seeds = [s.strip() for s in str(ids_option).split(",") if s.strip()]
            unknown = [s for s in seeds if s not in graph]
            if unknown:
                raise CliError(EXIT_CONFIG, f"unknown seed ids: {unknown}")
        else:
            picker = derive_rng(the_seed, "seed-pick")
            seeds = picker.sample(graph.entity_ids(), min(n_seeds, graph.entity_count))

        validator = None
        if do_validate:
            import jsonschema

            with open(SCHEMA_PATH, encoding="utf-8") as fh:
                validator = jsonschema.Draft202012Validator(json.load(fh))

        started = time.time()

        def work(seed_id):
            rng = derive_rng(the_seed, "extract", seed_id)
            selector = _make_selector(
                kind, stop_p, derive_rng(the_seed, "select", seed_id),
                transcript_path, replay_path, endpoint, retry_budget,
            )
            try:
                sub = extract_subgraph(graph, seed_id, selector, flt, ex_config, rng)
                return seed_id, serialize_subgraph(graph, sub), None
            except PathRejected as exc:
                return seed_id, None, {"seed": seed_id, "reason": exc.reason, "k": exc.k}
            except SelectorExhausted as exc:
                return seed_id, None, {
                    "seed": seed_id,
                    "reason": "selector_exhausted",
                    "k": 0,
                    "attempts": exc.attempts,
                }

        if n_jobs == 1:
            results = [work(s) for s in seeds]
        else:
            with concurrent.futures.ThreadPoolExecutor(max_workers=n_jobs) as pool:
                results = list(pool.map(work, seeds))

        accepted = []
        rejected = []
        for _seed_id, doc, reject in results:  # results follow seed order
            if doc is not None:
                if validator is not None:
                    validator.validate(doc)
                accepted.append(doc)
            else:
                rejected.append(reject)

        out_subgraphs = out_dir / "subgraphs.jsonl"
        with open(out_subgraphs, "w", encoding="utf-8") as fh:
            for doc in accepted:
                fh.write(to_jsonl_line(doc) + "\n")
        out_rejected = out_dir / "rejected.jsonl"
        with open(out_rejected, "w", encoding="utf-8") as fh:
            for rec in rejected:
                fh.write(json.dumps(rec, ensure_ascii=False, sort_keys=True) + "\n")

        _write_manifest(
            out_dir, "extract", the_seed,
            {
                "dump": str(dump_path),
                "k_min": ex_config.k_min,
                "k_max": ex_config.k_max,
                "distractor_min": ex_config.distractor_min,
                "distractor_max": ex_config.distractor_max,
                "retries": ex_config.retries,
                "selector": kind,
                "p_stop": stop_p,
                "jobs": n_jobs,
                "seeds": seeds,
            },
            {"dump": dump_path, "filter_config": flt_path},
            [out_subgraphs, out_rejected],
            started,
        )
        click.echo(f"accepted {len(accepted)}, rejected {len(rejected)} -> {out_dir}")
        if not accepted:
            sys.exit(EXIT_NO_OUTPUT)

    _run(body)


# ---------------------------------------------------------------------------
# score

def _resolve_group_line(rec, base_dir: Path):
    if not isinstance(rec, dict):
        raise ValueError("group line must be a JSON object")
    if "subgraph_ref" in rec:
        ref = Path(rec["subgraph_ref"])
        if not ref.is_absolute():
            ref = base_dir / ref
        with open(ref, encoding="utf-8") as fh:
            doc = json.load(fh)
        nodes = [n["title"] for n in doc["path"]["nodes"]]
        waypoints = nodes[:-1]
        answer = doc["correct_answer"]
    else:
        waypoints = rec["waypoints"]
        answer = rec.get("correct_answer")
    trajectories = rec["trajectories"]
    correctness = rec.get("correctness")
    return waypoints, answer, trajectories, correctness


@main.command()
@click.option("--input", "input_path", type=click.Path(), required=True, help="Groups JSONL.")
@click.option("--output-dir", type=click.Path(), default=None)
@click.option("--alpha", type=float, default=None)
@click.option("--epsilon", type=float, default=None)
@click.option("--match-mode", type=click.Choice(["exact_substring", "case_insensitive"]), default=None)
@click.option("--nfc/--no-nfc", "nfc", default=None, help="NFC-normalize before matching.")
@click.option("--seed", type=int, default=None)
@click.option("--config", "config_path", type=click.Path(), default=None)
def score(input_path, output_dir, alpha, epsilon, match_mode, nfc, seed, config_path):
    """Score rollout groups: coverage, shaped rewards, advantages."""

    def body():
        cfg = _load_config_file(config_path)
        the_seed = _merge(seed, cfg, "seed", 0)
        out_dir = _prepare_out_dir(_merge(output_dir, cfg, "output_dir", "kgquest-out"))
        reward_config = RewardConfig(
            alpha=_merge(alpha, cfg, "alpha", 0.3),
            epsilon=_merge(epsilon, cfg, "epsilon", 1e-6),
            match_mode=_merge(match_mode, cfg, "match_mode", "exact_substring"),
            normalize_nfc=bool(_merge(nfc, cfg, "nfc", False)),
        )
        in_path = Path(input_path)
        try:
            lines = in_path.read_text(encoding="utf-8").splitlines()
        except OSError as exc:
            raise CliError(EXIT_IO, f"cannot read input: {exc}")

        started = time.time()
        out_path = out_dir / "scores.jsonl"
        failures = 0
        wrote = 0
        with open(out_path, "w", encoding="utf-8") as fh:
            for line_no, line in enumerate(lines, start=1):
                if not line.strip():
                    continue
                try:
                    rec = json.loads(line)
                    waypoints, answer, trajectories, correctness = _resolve_group_line(
                        rec, in_path.parent
                    )
                    result = score_group(
                        waypoints,
                        trajectories,
                        correct_answer=answer,
                        correctness=correctness,
                        config=reward_config,
                    )
                except Exception as exc:
                    failures += 1
                    click.echo(f"line {line_no}: {exc}", err=True)
                    continue
                row = {
                    "line": line_no,
                    "coverage": list(result.coverages),
                    "coverage_norm": list(result.coverage_norms),
                    "matched": [list(m) for m in result.matched],
                    "correct": list(result.correct),
                    "valid": list(result.valid),
                    "reward": list(result.rewards),
                    "advantage": list(result.advantages),
                    "mu": result.mu,
                    "sigma": result.sigma,
                    "proposer_reward": result.proposer_reward,
                }
                fh.write(json.dumps(row, ensure_ascii=False, sort_keys=True) + "\n")
                wrote += 1

        _write_manifest(
            out_dir, "score", the_seed,
            {
                "alpha": reward_config.alpha,
                "epsilon": reward_config.epsilon,
                "match_mode": reward_config.match_mode,
                "nfc": reward_config.normalize_nfc,
            },
            {"input": in_path}, [out_path], started,
        )
        click.echo(f"scored {wrote} groups ({failures} failed) -> {out_path}")
        if failures and wrote:
            sys.exit(EXIT_PARTIAL)
        if failures and not wrote:
            sys.exit(EXIT_IO)

    _run(body)


# ---------------------------------------------------------------------------
# filter

@main.command(name="filter")
@click.option("--input", "input_path", type=click.Path(), required=True,
              help="JSONL of {question, waypoints, correct_answer}.")
@click.option("--keep-seed-exempt/--no-seed-exempt", "exempt_seed", default=True)
@click.option("--output-dir", type=click.Path(), default=None)
@click.option("--seed", type=int, default=None)
@click.option("--config", "config_path", type=click.Path(), default=None)
def filter_cmd(input_path, exempt_seed, output_dir, seed, config_path):
    """Apply leak/shape rules to generated questions."""

    def body():
        cfg = _load_config_file(config_path)
        the_seed = _merge(seed, cfg, "seed", 0)
        out_dir = _prepare_out_dir(_merge(output_dir, cfg, "output_dir", "kgquest-out"))
        fconfig = FilterConfig(exempt_seed=exempt_seed)
        in_path = Path(input_path)
        try:
            lines = in_path.read_text(encoding="utf-8").splitlines()
        except OSError as exc:
            raise CliError(EXIT_IO, f"cannot read input: {exc}")

        started = time.time()
        out_accepted = out_dir / "accepted.jsonl"
        out_rejected = out_dir / "rejected.jsonl"
        kept = dropped = 0
        with open(out_accepted, "w", encoding="utf-8") as acc, \
                open(out_rejected, "w", encoding="utf-8") as rej:
            for line_no, line in enumerate(lines, start=1):
                if not line.strip():
                    continue
                try:
                    rec = json.loads(line)
                    verdict = rule_filter(
                        rec.get("question"),
                        rec.get("waypoints", ()),
                        rec.get("correct_answer", ""),
                        fconfig,
                    )
                except Exception as exc:
                    raise CliError(EXIT_IO, f"line {line_no}: {exc}")
                if verdict.passed:
                    acc.write(json.dumps(rec, ensure_ascii=False, sort_keys=True) + "\n")
                    kept += 1
                else:
                    rec_out = dict(rec)
                    rec_out["reasons"] = list(verdict.reasons)
                    rej.write(json.dumps(rec_out, ensure_ascii=False, sort_keys=True) + "\n")
                    dropped += 1

        _write_manifest(
            out_dir, "filter", the_seed, {"exempt_seed": exempt_seed},
            {"input": in_path}, [out_accepted, out_rejected], started,
        )
        click.echo(f"kept {kept}, rejected {dropped} -> {out_dir}")

    _run(body)


# ---------------------------------------------------------------------------
# stats

def _read_docs(input_path) -> list:
    in_path = Path(input_path)
    try:
        lines = in_path.read_text(encoding="utf-8").splitlines()
    except OSError as exc:
        raise CliError(EXIT_IO, f"cannot read input: {exc}")
    docs = []
    for line_no, line in enumerate(lines, start=1):
        if not line.strip():
            continue
        try:
            docs.append(json.loads(line))
        except json.JSONDecodeError as exc:
            raise CliError(EXIT_IO, f"line {line_no}: invalid JSON: {exc}")
    return docs


@main.command()
@click.option("--input", "input_path", type=click.Path(), required=True, help="Subgraph JSONL.")
@click.option("--output-dir", type=click.Path(), default=None)
@click.option("--seed", type=int, default=None)
@click.option("--config", "config_path", type=click.Path(), default=None)
def stats(input_path, output_dir, seed, config_path):
    """Corpus statistics with plot-ready CSV histograms."""

    def body():
        cfg = _load_config_file(config_path)
        the_seed = _merge(seed, cfg, "seed", 0)
        out_dir = _prepare_out_dir(_merge(output_dir, cfg, "output_dir", "kgquest-out"))
        docs = _read_docs(input_path)
        if not docs:
            raise CliError(EXIT_IO, "input holds no documents")
        started = time.time()
        result = compute_stats(docs)

        out_json = out_dir / "stats.json"
        with open(out_json, "w", encoding="utf-8") as fh:
            json.dump(result.to_dict(), fh, indent=2, sort_keys=True)
            fh.write("\n")

        def write_csv(name, header, rows):
            path = out_dir / name
            with open(path, "w", encoding="utf-8", newline="") as fh:
                fh.write(",".join(header) + "\n")
                for row in rows:
                    fh.write(",".join(str(v) for v in row) + "\n")
            return path

        n = result.count
        out_hist = write_csv(
            "path_length_hist.csv",
            ("length", "count", "fraction"),
            [(k, v, repr(v / n)) for k, v in sorted(result.path_length_hist.items())],
        )
        out_types = write_csv(
            "answer_type_dist.csv",
            ("answer_type", "fraction"),
            [(k, repr(v)) for k, v in sorted(result.answer_type_dist.items())],
        )
        out_rel = write_csv(
            "relation_freq.csv",
            ("relation", "count"),
            sorted(result.relation_freq.items(), key=lambda kv: (-kv[1], kv[0])),
        )

        _write_manifest(
            out_dir, "stats", the_seed, {}, {"input": Path(input_path)},
            [out_json, out_hist, out_types, out_rel], started,
        )
        click.echo(
            f"{n} docs, mean length {result.mean_path_length:.3f} -> {out_dir}"
        )

    _run(body)


# ---------------------------------------------------------------------------
# curriculum

@main.command()
@click.option("--input", "input_path", type=click.Path(), required=True, help="Subgraph JSONL.")
@click.option("--output-dir", type=click.Path(), default=None)
@click.option("--seed", type=int, default=None)
@click.option("--config", "config_path", type=click.Path(), default=None)
def curriculum(input_path, output_dir, seed, config_path):
    """Reorder a subgraph corpus hardest-first for training."""

    def body():
        cfg = _load_config_file(config_path)
        the_seed = _merge(seed, cfg, "seed", 0)
        out_dir = _prepare_out_dir(_merge(output_dir, cfg, "output_dir", "kgquest-out"))
        docs = _read_docs(input_path)
        started = time.time()
        ordered = order_curriculum(docs)
        out_path = out_dir / "curriculum.jsonl"
        with open(out_path, "w", encoding="utf-8") as fh:
            for doc in ordered:
                fh.write(to_jsonl_line(doc) + "\n")
        _write_manifest(
            out_dir, "curriculum", the_seed, {}, {"input": Path(input_path)},
            [out_path], started,
        )
        click.echo(f"ordered {len(ordered)} docs -> {out_path}")

    _run(body)


# ---------------------------------------------------------------------------
# simulate

@main.command()
@click.option("--input", "input_path", type=click.Path(), required=True, help="Subgraph JSONL pool.")
@click.option("--steps", type=int, default=None)
@click.option("--group-size", type=int, default=None)
@click.option("--p-mention", type=float, default=None)
@click.option("--p-correct", type=float, default=None)
@click.option("--coupling", type=click.Choice(["independent", "logistic"]), default=None)
@click.option("--slope", type=float, default=None)
@click.option("--intercept", type=float, default=None)
@click.option("--slope-final", type=float, default=None)
@click.option("--alpha", type=float, default=None)
@click.option("--epsilon", type=float, default=None)
@click.option("--output-dir", type=click.Path(), default=None)
@click.option("--seed", type=int, default=None)
@click.option("--config", "config_path", type=click.Path(), default=None)
def simulate(input_path, steps, group_size, p_mention, p_correct, coupling, slope,
             intercept, slope_final, alpha, epsilon, output_dir, seed, config_path):
    """Synthetic solver run over a pool; emits metrics.csv."""

    def body():
        cfg = _load_config_file(config_path)
        the_seed = _merge(seed, cfg, "seed", 0)
        out_dir = _prepare_out_dir(_merge(output_dir, cfg, "output_dir", "kgquest-out"))
        policy = SolverPolicyConfig(
            p_mention=_merge(p_mention, cfg, "p_mention", 0.5),
            p_correct=_merge(p_correct, cfg, "p_correct", 0.0),
            coupling=_merge(coupling, cfg, "coupling", "independent"),
            slope=_merge(slope, cfg, "slope", 0.0),
            intercept=_merge(intercept, cfg, "intercept", 0.0),
            slope_final=_merge(slope_final, cfg, "slope_final", None),
        )
        reward_config = RewardConfig(
            alpha=_merge(alpha, cfg, "alpha", 0.3),
            epsilon=_merge(epsilon, cfg, "epsilon", 1e-6),
        )
        n_steps = _merge(steps, cfg, "steps", 100)
        g_size = _merge(group_size, cfg, "group_size", 5)
        docs = _read_docs(input_path)
        if not docs:
            raise CliError(EXIT_IO, "input holds no documents")
        started = time.time()
        rows = simulate_run(docs, policy, g_size, n_steps, the_seed, reward_config)
        out_path = out_dir / "metrics.csv"
        write_metrics_csv(rows, out_path)
        _write_manifest(
            out_dir, "simulate", the_seed,
            {
                "steps": n_steps,
                "group_size": g_size,
                "p_mention": policy.p_mention,
                "p_correct": policy.p_correct,
                "coupling": policy.coupling,
                "slope": policy.slope,
                "intercept": policy.intercept,
                "slope_final": policy.slope_final,
                "alpha": reward_config.alpha,
            },
            {"input": Path(input_path)}, [out_path], started,
        )
        final = rows[-1]
        click.echo(
            f"{n_steps} steps; final pooled spearman "
            f"{final.spearman_coverage_correctness:.4f} -> {out_path}"
        )

    _run(body)


# ---------------------------------------------------------------------------
# selector-probe

@main.command(name="selector-probe")
@click.option("--endpoint", default=None, help="Remote endpoint (or SELECTOR_ENDPOINT).")
@click.option("--retries", type=int, default=None)
@click.option("--timeout", type=float, default=None)
def selector_probe(endpoint, retries, timeout):
    """Send one fixed request to the remote selector and print the verdict."""

    def body():
        config = RemoteSelectorConfig.from_env(
            **({"endpoint": endpoint} if endpoint else {}),
            max_retries=retries if retries is not None else 1,
            timeout=timeout if timeout is not None else 10.0,
        )
        if not config.endpoint:
            raise CliError(EXIT_CONFIG, "needs --endpoint or SELECTOR_ENDPOINT")
        request = SelectorRequest(
            path_history="Probe Origin",
            current_node=NodeView(title="Probe Origin", description="connectivity probe"),
            candidates=(
                CandidateView("probe relation", "Probe Target", "probe description"),
            ),
        )
        selector = RemoteSelector(config=config)
        try:
            decision = selector.select(request)
        except (SelectorExhausted, SelectorError) as exc:
            raise CliError(EXIT_IO, f"probe failed: {exc}")
        click.echo(json.dumps({"think": decision.think, "answer": decision.answer}))

    _run(body)


if __name__ == "__main__":
    main()
