"""End-to-end walkthrough on a synthetic world where quality is knowable.

Five fake tokenizers encode four fake languages. Each (tokenizer, language)
token stream is drawn with an exact power-law count profile whose exponent
encodes the tokenizer's built-in quality, and the downstream score table is
constructed so that better exponents earn lower (better) MetricX. The script
then drives the command-line interface exactly as a user would:

    gen streams -> tokscope metrics -> tokscope predict -> tokscope rank

and prints the held-out F1 scores and the recovered ranking next to the
planted ground truth.

Run:  python scripts/demo_pipeline.py --workdir demo_run
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from tokscope.cli import generate_zipf_stream, main as cli_main
from tokscope.corpus_io import (
    DIRECTIONS,
    DownstreamFixture,
    ScoreEntry,
    save_downstream_fixture,
    save_token_stream,
)
from tokscope.predictor import MODEL_KINDS

TOKENIZERS = ("alef", "bet", "gimel", "dalet", "he")
EXPONENTS = (1.10, 1.05, 1.00, 0.95, 0.90)
LANGUAGES = ("aa", "bb", "cc", "dd")
SCALE = "1B"


def run_cli(args: list[str]) -> None:
    code = cli_main(args)
    if code != 0:
        raise SystemExit(f"command failed ({code}): tokscope {' '.join(args)}")


def build_streams(workdir: Path, seed: int) -> None:
    """One exact-count power-law stream per (tokenizer, language)."""
    for li, lang in enumerate(LANGUAGES):
        lang_dir = workdir / "streams" / lang
        lang_dir.mkdir(parents=True, exist_ok=True)
        for ti, tok in enumerate(TOKENIZERS):
            stream = generate_zipf_stream(
                n_tokens=8_000 + 2_000 * li,
                n_types=380 + 10 * li,
                exponent=EXPONENTS[ti] + 0.01 * li,
                seed=seed + 17 * li + ti,
            )
            save_token_stream(stream, lang_dir / f"{tok}.tokens")


def compute_metrics(workdir: Path) -> Path:
    metrics_dir = workdir / "metrics"
    metrics_dir.mkdir(parents=True, exist_ok=True)
    for lang in LANGUAGES:
        for tok in TOKENIZERS:
            run_cli(
                [
                    "metrics",
                    "--tokens",
                    str(workdir / "streams" / lang / f"{tok}.tokens"),
                    "--language",
                    lang,
                    "--out",
                    str(metrics_dir / f"{tok}_{lang}.json"),
                ]
            )
    return metrics_dir


def build_fixture(workdir: Path) -> Path:
    """Scores where a higher planted exponent means better (lower) MetricX.

    The per-language offset moves whole columns without ever reordering
    tokenizers, so the planted quality order is the ground truth everywhere.
    """
    entries = {}
    for li, lang in enumerate(LANGUAGES):
        for ti, tok in enumerate(TOKENIZERS):
            metricx = 12.0 - 4.0 * EXPONENTS[ti] + 0.3 * li
            chrf = 40.0 + 10.0 * EXPONENTS[ti] - 0.5 * li
            for di, direction in enumerate(DIRECTIONS):
                entry = ScoreEntry(
                    tokenizer=tok,
                    scale=SCALE,
                    language=lang,
                    direction=direction,
                    metricx=metricx + 0.02 * di,
                    chrf=chrf - 0.1 * di,
                )
                entries[entry.key] = entry
    fixture_path = workdir / "scores.csv"
    save_downstream_fixture(DownstreamFixture(entries=entries), fixture_path)
    return fixture_path


def show_predict(report_path: Path) -> None:
    payload = json.loads(report_path.read_text(encoding="utf-8"))
    print(f"\npairwise prediction ({payload['model']}, scale {payload['scale']})")
    for tok, score in payload["per_heldout"].items():
        print(f"  held-out {tok:<6} F1 = {score:.3f}")
    print(f"  mean F1 = {payload['mean_f1']:.3f}")


def show_rank(report_path: Path) -> None:
    payload = json.loads(report_path.read_text(encoding="utf-8"))
    print(f"\nranking for held-out language {payload['heldout_language']!r}")
    print(f"  predicted: {' > '.join(payload['predicted'])}")
    print(f"  truth:     {' > '.join(payload['truth'])}")
    print(
        f"  kendall tau = {payload['kendall_tau']:.4f}"
        f"  (one-sided p = {payload['p_value_one_sided']:.4f})"
    )


def parse_args(argv=None) -> argparse.Namespace:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--workdir", type=Path, default=Path("demo_run"))
    parser.add_argument("--model", default="logistic", choices=list(MODEL_KINDS))
    parser.add_argument("--heldout-language", default=LANGUAGES[0], choices=LANGUAGES)
    parser.add_argument("--seed", type=int, default=0)
    return parser.parse_args(argv)


def main(argv=None) -> int:
    args = parse_args(argv)
    workdir = args.workdir
    workdir.mkdir(parents=True, exist_ok=True)

    print(f"planted quality order: {' > '.join(TOKENIZERS)}")
    print(f"building {len(TOKENIZERS) * len(LANGUAGES)} token streams under {workdir}")
    build_streams(workdir, args.seed)
    metrics_dir = compute_metrics(workdir)
    fixture_path = build_fixture(workdir)

    predict_out = workdir / "predict.json"
    run_cli(
        [
            "predict",
            "--fixture",
            str(fixture_path),
            "--metrics-dir",
            str(metrics_dir),
            "--scale",
            SCALE,
            "--model",
            args.model,
            "--seed",
            str(args.seed),
            "--out",
            str(predict_out),
        ]
    )
    show_predict(predict_out)

    rank_out = workdir / "rank.json"
    run_cli(
        [
            "rank",
            "--fixture",
            str(fixture_path),
            "--metrics-dir",
            str(metrics_dir),
            "--scale",
            SCALE,
            "--heldout-language",
            args.heldout_language,
            "--seed",
            str(args.seed),
            "--out",
            str(rank_out),
        ]
    )
    show_rank(rank_out)
    return 0


if __name__ == "__main__":
    sys.exit(main())
