"""Command-line surface for the analysis pipeline.

Subcommands: encode, metrics, export-curve, correlate, predict, rank,
gen-zipf. JSON reports carry a metadata block (tool version, seed, log
base, truncation bound); text outputs carry the same block on a single
leading "#" comment line so re-runs with --no-timestamp are
byte-identical. The TOKSCOPE_SEED environment variable overrides
--seed.
"""

from __future__ import annotations

import argparse
import csv
import json
import os
import sys
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from datetime import datetime, timezone
from pathlib import Path

import numpy as np

from . import __version__
from . import bpe as bpe_mod
from .corpus_io import (
    TokenSequence,
    load_bundled_fixture,
    load_corpus,
    load_downstream_fixture,
    load_token_stream,
)
from .predictor import (
    MODEL_KINDS,
    leave_one_language_out,
    leave_one_tokenizer_out,
)
from .ranking import evaluate_ranking, fit_bradley_terry, ground_truth_ranking, ranking_from_ratings
from .stats import kendall, spearman
from .zipf_metrics import (
    DEFAULT_TRUNCATION_BOUND,
    METRIC_NAMES,
    MetricVector,
    count_frequencies,
    metadata_block,
    metric_vector,
    metric_vector_from_dict,
    metric_vector_to_dict,
    ranked_counts,
)

SEED_ENV_VAR = "TOKSCOPE_SEED"


@dataclass
class RunConfig:
    command: str
    corpus: Path | None = None
    corpus_format: str = "plaintext-lines"
    tokens: Path | None = None
    vocab: Path | None = None
    merges: Path | None = None
    tokenizer_name: str | None = None
    language: str | None = None
    fixture: Path | None = None
    metrics_dir: Path | None = None
    csv_path: Path | None = None
    x_col: str | None = None
    y_col: str | None = None
    method: str = "spearman"
    features: tuple[str, ...] = METRIC_NAMES
    model: str = "logistic"
    scale: str = "2.7B"
    heldout_language: str | None = None
    cv_folds: int = 5
    seed: int = 0
    truncation_bound: float = DEFAULT_TRUNCATION_BOUND
    n_tokens: int = 1_000_000
    n_types: int = 403
    exponent: float = 1.0
    threads: int = 1
    timestamp: bool = True
    out: Path | None = None


def generate_zipf_stream(
    n_tokens: int, n_types: int, exponent: float, seed: int = 0
) -> TokenSequence:
    """A stream whose rank-r type occurs exactly round(n_tokens / r^exponent) times.

    Counts are constructed, not sampled, then shuffled with the seed, so
    fitted slopes are analytic up to integer rounding.
    """
    if n_types < 3:
        raise ValueError("n_types must be at least 3")
    if exponent < 0:
        raise ValueError("exponent must be non-negative")
    ranks = np.arange(1, n_types + 1, dtype=np.float64)
    counts = np.rint(n_tokens / ranks**exponent).astype(np.int64)
    if counts.min() <= 0:
        raise ValueError(
            "parameters yield a zero count at the tail; "
            "increase n_tokens or reduce n_types/exponent"
        )
    stream = np.repeat(np.arange(n_types, dtype=np.int64), counts)
    np.random.default_rng(seed).shuffle(stream)
    return TokenSequence(tokens=stream, source_tokenizer=f"zipf-{exponent}")


def _metadata(config: RunConfig) -> dict:
    meta = {"tool": "tokscope", "version": __version__, "seed": config.seed}
    meta.update(metadata_block(config.truncation_bound))
    if config.timestamp:
        meta["timestamp"] = datetime.now(timezone.utc).isoformat()
    return meta


def _write_json(path: Path, payload: dict) -> None:
    with path.open("w", encoding="utf-8") as fh:
        json.dump(payload, fh, indent=2, sort_keys=True)
        fh.write("\n")


def _comment_line(config: RunConfig) -> str:
    return "# " + json.dumps(_metadata(config), sort_keys=True)


def _require(config: RunConfig, *names: str) -> None:
    missing = [n for n in names if getattr(config, n) is None]
    if missing:
        flags = ", ".join("--" + n.replace("_", "-") for n in missing)
        raise ValueError(f"{config.command}: missing required flags: {flags}")


def _load_tokenizer_inputs(config: RunConfig) -> TokenSequence:
    """A token stream, either given directly or produced by encoding a corpus."""
    if config.tokens is not None:
        if config.vocab is not None or config.corpus is not None:
            raise ValueError("--tokens conflicts with --vocab/--merges/--corpus")
        return load_token_stream(config.tokens, name=config.tokenizer_name)
    _require(config, "vocab", "merges", "corpus")
    tokenizer = bpe_mod.load_bpe(config.vocab, config.merges)
    docs = load_corpus(config.corpus, config.corpus_format)
    name = config.tokenizer_name or Path(config.vocab).stem
    sequences = _encode_documents(tokenizer, [d.text for d in docs], config.threads)
    tokens = (
        np.concatenate([s.tokens for s in sequences])
        if sequences
        else np.zeros(0, dtype=np.int64)
    )
    return TokenSequence(tokens=tokens, source_tokenizer=name)


def _encode_documents(tokenizer, texts, threads: int) -> list[TokenSequence]:
    if threads <= 1 or len(texts) < 2:
        return [bpe_mod.encode(tokenizer, t) for t in texts]
    # Thread results come back in submission order, so the merged stream
    # does not depend on scheduling.
    with ThreadPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(lambda t: bpe_mod.encode(tokenizer, t), texts))


def _cmd_encode(config: RunConfig) -> int:
    _require(config, "vocab", "merges", "corpus", "out")
    tokenizer = bpe_mod.load_bpe(config.vocab, config.merges)
    docs = load_corpus(config.corpus, config.corpus_format)
    sequences = _encode_documents(tokenizer, [d.text for d in docs], config.threads)
    with Path(config.out).open("w", encoding="utf-8") as fh:
        fh.write(_comment_line(config) + "\n")
        for seq in sequences:
            fh.write(" ".join(str(t) for t in seq.tokens.tolist()) + "\n")
    return 0


def _cmd_metrics(config: RunConfig) -> int:
    _require(config, "out")
    seq = _load_tokenizer_inputs(config)
    mv = metric_vector(seq, config.truncation_bound)
    payload = metric_vector_to_dict(
        mv,
        truncation_bound=config.truncation_bound,
        tokenizer=seq.source_tokenizer or config.tokenizer_name or "unknown",
        language=config.language or "unknown",
    )
    payload["metadata"] = _metadata(config)
    _write_json(Path(config.out), payload)
    return 0


def _cmd_export_curve(config: RunConfig) -> int:
    _require(config, "tokens", "out")
    seq = load_token_stream(config.tokens)
    counts = ranked_counts(count_frequencies(seq))
    with Path(config.out).open("w", encoding="utf-8", newline="") as fh:
        fh.write(_comment_line(config) + "\n")
        writer = csv.writer(fh)
        writer.writerow(["rank", "count", "log_rank", "log_count"])
        for rank, count in enumerate(counts.tolist(), start=1):
            writer.writerow(
                [rank, count, repr(float(np.log(rank))), repr(float(np.log(count)))]
            )
    return 0


def _cmd_correlate(config: RunConfig) -> int:
    _require(config, "csv_path", "x_col", "y_col", "out")
    xs, ys = [], []
    with Path(config.csv_path).open(encoding="utf-8", newline="") as fh:
        rows = (line for line in fh if not line.startswith("#"))
        reader = csv.DictReader(rows)
        for lineno, row in enumerate(reader, start=2):
            for col, dest in ((config.x_col, xs), (config.y_col, ys)):
                if col not in row or row[col] is None:
                    raise ValueError(f"{config.csv_path} line {lineno}: no column {col!r}")
                try:
                    dest.append(float(row[col]))
                except ValueError:
                    raise ValueError(
                        f"{config.csv_path} line {lineno}: "
                        f"non-numeric value {row[col]!r} in column {col!r}"
                    ) from None
    if config.method == "spearman":
        result = spearman(xs, ys)
    elif config.method == "kendall":
        result = kendall(xs, ys)
    else:
        raise ValueError(f"unknown correlation method {config.method!r}")
    payload = {
        "command": "correlate",
        "method": config.method,
        "coefficient": result.coefficient,
        "p_value": result.p_value,
        "n": result.n,
        "metadata": _metadata(config),
    }
    _write_json(Path(config.out), payload)
    return 0


def _load_fixture(config: RunConfig):
    if config.fixture is None:
        return load_bundled_fixture()
    return load_downstream_fixture(config.fixture)


def load_metric_dir(path) -> dict[tuple[str, str], MetricVector]:
    """Read every *.json metric record under a directory.

    Each file must carry tokenizer and language fields alongside the
    metric values; the map is keyed by (tokenizer, language).
    """
    path = Path(path)
    if not path.is_dir():
        raise ValueError(f"{path} is not a directory")
    metrics = {}
    for child in sorted(path.glob("*.json")):
        with child.open(encoding="utf-8") as fh:
            try:
                data = json.load(fh)
            except json.JSONDecodeError as e:
                raise ValueError(f"{child}: malformed JSON: {e.msg}") from e
        if "tokenizer" not in data or "language" not in data:
            raise ValueError(f"{child}: record lacks tokenizer/language fields")
        key = (str(data["tokenizer"]), str(data["language"]))
        if key in metrics:
            raise ValueError(f"{child}: duplicate metrics for {key}")
        metrics[key] = metric_vector_from_dict(data)
    if not metrics:
        raise ValueError(f"{path}: no *.json metric files found")
    return metrics


def _cmd_predict(config: RunConfig) -> int:
    _require(config, "metrics_dir", "out")
    if config.model not in MODEL_KINDS:
        raise ValueError(f"unknown model kind {config.model!r}")
    fixture = _load_fixture(config)
    metrics = load_metric_dir(config.metrics_dir)
    report = leave_one_tokenizer_out(
        metrics,
        fixture,
        scale=config.scale,
        feature_set=config.features,
        model_kind=config.model,
        cv_folds=config.cv_folds,
        seed=config.seed,
    )
    payload = {
        "command": "predict",
        "model": report.model_kind,
        "scale": config.scale,
        "feature_set": list(report.feature_set),
        "per_heldout": report.per_heldout,
        "mean_f1": report.mean_f1,
        "metadata": _metadata(config),
    }
    _write_json(Path(config.out), payload)
    return 0


def _cmd_rank(config: RunConfig) -> int:
    _require(config, "metrics_dir", "heldout_language", "out")
    fixture = _load_fixture(config)
    metrics = load_metric_dir(config.metrics_dir)
    if config.heldout_language not in fixture.languages():
        raise ValueError(
            f"language {config.heldout_language!r} is not in the fixture "
            f"(has {fixture.languages()})"
        )
    matrices = leave_one_language_out(
        metrics, fixture, scale=config.scale, cv_folds=config.cv_folds, seed=config.seed
    )
    probs = matrices[config.heldout_language]
    ratings = fit_bradley_terry(probs.matrix, probs.names)
    predicted = ranking_from_ratings(ratings)
    truth = ground_truth_ranking(fixture, config.heldout_language, config.scale)
    two_sided = evaluate_ranking(predicted, truth, alternative="two-sided")
    one_sided = evaluate_ranking(predicted, truth, alternative="greater")
    pair_probs = {
        f"{probs.names[i]}|{probs.names[j]}": float(probs.matrix[i, j])
        for i in range(len(probs.names))
        for j in range(len(probs.names))
        if i != j
    }
    payload = {
        "command": "rank",
        "heldout_language": config.heldout_language,
        "scale": config.scale,
        "predicted": list(predicted.ordered),
        "strengths": {n: ratings.values[n] for n in probs.names},
        "truth": list(truth.ordered),
        "kendall_tau": two_sided.coefficient,
        "p_value_one_sided": one_sided.p_value,
        "p_value_two_sided": two_sided.p_value,
        "probabilities": pair_probs,
        "metadata": _metadata(config),
    }
    _write_json(Path(config.out), payload)
    return 0


def _cmd_gen_zipf(config: RunConfig) -> int:
    _require(config, "out")
    seq = generate_zipf_stream(
        config.n_tokens, config.n_types, config.exponent, config.seed
    )
    with Path(config.out).open("w", encoding="utf-8") as fh:
        fh.write(_comment_line(config) + "\n")
        fh.write(" ".join(str(t) for t in seq.tokens.tolist()))
        fh.write("\n")
    return 0


_COMMANDS = {
    "encode": _cmd_encode,
    "metrics": _cmd_metrics,
    "export-curve": _cmd_export_curve,
    "correlate": _cmd_correlate,
    "predict": _cmd_predict,
    "rank": _cmd_rank,
    "gen-zipf": _cmd_gen_zipf,
}


def run(config: RunConfig) -> int:
    if config.command not in _COMMANDS:
        print(f"tokscope: unknown command {config.command!r}", file=sys.stderr)
        return 2
    try:
        return _COMMANDS[config.command](config)
    except (ValueError, KeyError, OSError, RuntimeError) as e:
        message = e.args[0] if e.args else e
        print(f"tokscope: error: {message}", file=sys.stderr)
        return 1


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="tokscope",
        description="Intrinsic tokenizer statistics and downstream-quality prediction.",
    )
    parser.add_argument("--version", action="version", version=f"tokscope {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--seed", type=int, default=0)
        p.add_argument("--out", type=Path, required=False)
        p.add_argument(
            "--no-timestamp",
            dest="timestamp",
            action="store_false",
            help="omit the timestamp so reruns are byte-identical",
        )

    p = sub.add_parser("encode", help="encode a corpus with a BPE tokenizer")
    p.add_argument("--vocab", type=Path)
    p.add_argument("--merges", type=Path)
    p.add_argument("--corpus", type=Path)
    p.add_argument("--format", dest="corpus_format", default="plaintext-lines",
                   choices=["plaintext-lines", "jsonl"])
    p.add_argument("--tokenizer-name")
    p.add_argument("--threads", type=int, default=1)
    common(p)

    p = sub.add_parser("metrics", help="compute the metric vector of a token stream")
    p.add_argument("--tokens", type=Path)
    p.add_argument("--vocab", type=Path)
    p.add_argument("--merges", type=Path)
    p.add_argument("--corpus", type=Path)
    p.add_argument("--format", dest="corpus_format", default="plaintext-lines",
                   choices=["plaintext-lines", "jsonl"])
    p.add_argument("--tokenizer-name")
    p.add_argument("--language")
    p.add_argument("--truncation-bound", type=float, default=DEFAULT_TRUNCATION_BOUND)
    p.add_argument("--threads", type=int, default=1)
    common(p)

    p = sub.add_parser("export-curve", help="dump the full rank-frequency curve as CSV")
    p.add_argument("--tokens", type=Path)
    common(p)

    p = sub.add_parser("correlate", help="rank correlation between two CSV columns")
    p.add_argument("--csv", dest="csv_path", type=Path)
    p.add_argument("--x-col")
    p.add_argument("--y-col")
    p.add_argument("--method", default="spearman", choices=["spearman", "kendall"])
    common(p)

    p = sub.add_parser("predict", help="leave-one-tokenizer-out F1 evaluation")
    p.add_argument("--fixture", type=Path)
    p.add_argument("--metrics-dir", type=Path)
    p.add_argument("--features", nargs="+", default=list(METRIC_NAMES),
                   choices=list(METRIC_NAMES))
    p.add_argument("--model", default="logistic", choices=list(MODEL_KINDS))
    p.add_argument("--scale", default="2.7B")
    p.add_argument("--cv-folds", type=int, default=5)
    common(p)

    p = sub.add_parser("rank", help="Bradley-Terry ranking for a held-out language")
    p.add_argument("--fixture", type=Path)
    p.add_argument("--metrics-dir", type=Path)
    p.add_argument("--scale", default="2.7B")
    p.add_argument("--heldout-language")
    p.add_argument("--cv-folds", type=int, default=5)
    common(p)

    p = sub.add_parser("gen-zipf", help="generate an exact Zipf-count token stream")
    p.add_argument("--n-tokens", type=int, default=1_000_000)
    p.add_argument("--n-types", type=int, default=403)
    p.add_argument("--exponent", type=float, default=1.0)
    common(p)

    return parser


def config_from_args(args: argparse.Namespace) -> RunConfig:
    fields_ = {f for f in RunConfig.__dataclass_fields__}
    payload = {k: v for k, v in vars(args).items() if k in fields_ and v is not None}
    if "features" in payload:
        payload["features"] = tuple(payload["features"])
    config = RunConfig(**payload)
    if SEED_ENV_VAR in os.environ:
        try:
            config.seed = int(os.environ[SEED_ENV_VAR])
        except ValueError:
            raise ValueError(
                f"{SEED_ENV_VAR} must be an integer, got {os.environ[SEED_ENV_VAR]!r}"
            ) from None
    return config


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        config = config_from_args(args)
    except ValueError as e:
        print(f"tokscope: error: {e}", file=sys.stderr)
        return 2
    return run(config)


if __name__ == "__main__":
    sys.exit(main())
