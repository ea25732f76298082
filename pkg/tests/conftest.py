"""Shared fixtures: a small BPE trainer and synthetic evaluation worlds."""

from __future__ import annotations

import json
from collections import Counter

import numpy as np
import pytest

from tokscope import (
    DownstreamFixture,
    MetricVector,
    ScoreEntry,
    byte_to_unicode,
    load_bpe,
    pretokenize,
)

# Mixed-script sample used to train the round-trip tokenizer: ASCII
# prose, accents, Cyrillic, CJK, digits, punctuation, and emoji, so the
# learned merges cover single bytes through multi-byte sequences.
TRAINING_TEXT = """\
The quick brown fox jumps over the lazy dog. The dog was not amused.
Tokenizers split text into pieces; pieces map to integer ids.
She said she'd seen it before, and she'll see it again, won't she?
Numbers like 12345 and 2.71828 appear among words.
Ein schöner Tag beginnt früh am Morgen, sagte der Bäcker.
Přílišně žluťoučký kůň úpěl ďábelské ódy, řekla učitelka.
Съешь же ещё этих мягких французских булок, да выпей чаю.
Быстрая коричневая лиса прыгает через ленивую собаку.
我能吞下玻璃而不伤身体。今天的天气很好。
日本語のテキストも含まれています。東京は大都市です。
Emoji too: 🙂 🚀 🎉 and some punctuation!!! (really?) [brackets] {braces}
tabs\tand  double  spaces   survive the round trip.
"""


def apply_merge(symbols: tuple[str, ...], pair: tuple[str, str]) -> tuple[str, ...]:
    """Fuse every occurrence of pair, scanning left to right."""
    merged = pair[0] + pair[1]
    out = []
    i = 0
    while i < len(symbols):
        if i + 1 < len(symbols) and symbols[i] == pair[0] and symbols[i + 1] == pair[1]:
            out.append(merged)
            i += 2
        else:
            out.append(symbols[i])
            i += 1
    return tuple(out)


def train_bpe(texts, n_merges: int):
    """Learn merges by greedy pair-frequency counting over pre-tokens.

    Returns (vocab, merges) in the interchange format: vocab maps token
    string to id with the 256 byte symbols first, merges is a list of
    (left, right) pairs in priority order.
    """
    enc = byte_to_unicode()
    pieces: Counter[tuple[str, ...]] = Counter()
    for text in texts:
        for piece in pretokenize(text):
            pieces[tuple(enc[b] for b in piece.encode("utf-8"))] += 1
    vocab = {enc[b]: b for b in range(256)}
    merges: list[tuple[str, str]] = []
    for _ in range(n_merges):
        pair_counts: Counter[tuple[str, str]] = Counter()
        for syms, count in pieces.items():
            for pair in zip(syms, syms[1:]):
                pair_counts[pair] += count
        if not pair_counts:
            break
        best = min(pair_counts.items(), key=lambda kv: (-kv[1], kv[0]))[0]
        merges.append(best)
        vocab[best[0] + best[1]] = len(vocab)
        pieces = Counter(
            {apply_merge(syms, best): count for syms, count in pieces.items()}
        )
    return vocab, merges


def write_bpe_files(vocab, merges, directory):
    vocab_path = directory / "vocab.json"
    merges_path = directory / "merges.txt"
    vocab_path.write_text(
        json.dumps(vocab, ensure_ascii=False, indent=0), encoding="utf-8"
    )
    merges_path.write_text(
        "#version: 0.2\n" + "".join(f"{a} {b}\n" for a, b in merges),
        encoding="utf-8",
    )
    return vocab_path, merges_path


@pytest.fixture(scope="session")
def trained_bpe(tmp_path_factory):
    """A tokenizer trained on the mixed-script sample, plus its files."""
    directory = tmp_path_factory.mktemp("bpe")
    vocab, merges = train_bpe([TRAINING_TEXT], n_merges=400)
    vocab["<|endoftext|>"] = len(vocab)
    vocab_path, merges_path = write_bpe_files(vocab, merges, directory)
    return load_bpe(vocab_path, merges_path), vocab_path, merges_path


SYNTH_TOKENIZERS = ("alpha", "bravo", "carol", "delta", "echo", "foxtrot")
SYNTH_LANGUAGES = ("aa", "bb", "cc", "dd")
SYNTH_SCALE = "1B"


def make_synthetic_fixture() -> DownstreamFixture:
    """Downstream scores where quality strictly follows tokenizer order.

    Tokenizer k has mean MetricX 10 + k on every language (small
    direction-dependent offsets cancel in the mean), so alpha is best
    and foxtrot worst everywhere.
    """
    entries = {}
    for k, tok in enumerate(SYNTH_TOKENIZERS):
        for li, lang in enumerate(SYNTH_LANGUAGES):
            for di, direction in enumerate(("en-xx", "xx-en")):
                offset = 0.25 if di == 0 else -0.25
                entry = ScoreEntry(
                    tokenizer=tok,
                    scale=SYNTH_SCALE,
                    language=lang,
                    direction=direction,
                    metricx=10.0 + k + offset + 0.01 * li,
                    chrf=50.0 - k,
                )
                entries[entry.key] = entry
    return DownstreamFixture(entries=entries)


def make_synthetic_metrics(determining: str = "compression") -> dict:
    """Metric vectors whose `determining` feature perfectly tracks quality.

    The informative feature for tokenizer k on language li is
    (10 + k) * (100 + li), so every within-language pairwise difference
    is (k_i - k_j) * (100 + li): its sign matches the downstream label
    and its magnitude is at least 100, far above the shift that
    orientation sampling can put on the feature mean. The remaining
    features are language-level constants shared by every tokenizer, so
    pairwise differences are exactly zero there and carry no signal
    (real or spurious) about quality.
    """
    rng = np.random.default_rng(20_240_815)
    metrics = {}
    for li, lang in enumerate(SYNTH_LANGUAGES):
        shared = rng.normal(size=3)
        lang_values = {
            "compression": int(rng.integers(1000, 2000)),
            "cardinality": int(rng.integers(100, 500)),
            "auc": float(shared[0]),
            "slope": float(-1.0 + 0.1 * shared[1]),
            "power_law": float(abs(shared[2])) * 0.01,
        }
        for k, tok in enumerate(SYNTH_TOKENIZERS):
            informative = float((10 + k) * (100 + li))
            values = dict(lang_values)
            if determining in ("compression", "cardinality"):
                values[determining] = int(informative)
            else:
                values[determining] = informative
            metrics[(tok, lang)] = MetricVector(**values)
    return metrics


def write_metrics_dir(metrics: dict, directory) -> None:
    from tokscope.zipf_metrics import metric_vector_to_dict

    directory.mkdir(parents=True, exist_ok=True)
    for (tok, lang), mv in metrics.items():
        payload = metric_vector_to_dict(mv, tokenizer=tok, language=lang)
        path = directory / f"{tok}_{lang}.json"
        path.write_text(json.dumps(payload, indent=2, sort_keys=True), encoding="utf-8")
