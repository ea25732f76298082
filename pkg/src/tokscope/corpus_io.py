"""Corpus, token-stream, and downstream-score ingestion.

All loaded values are plain frozen dataclasses, immutable after
construction. Token streams are decimal ASCII integers so files stay
inspectable; lines starting with "#" are treated as comments.
"""

from __future__ import annotations

import csv
import json
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path

import numpy as np

SCALES = ("350M", "2.7B")
LANGUAGES = ("cs", "de", "ru", "zh")
DIRECTIONS = ("en-xx", "xx-en")

FIXTURE_COLUMNS = ("tokenizer", "scale", "language", "direction", "metricx", "chrf")

# MT scores bundled with the package (six public tokenizers, two model
# scales, four language pairs, both translation directions).
BUNDLED_SCORES = "wmt21_mt_scores.csv"


@dataclass(frozen=True)
class Document:
    id: str
    text: str


@dataclass(frozen=True)
class TokenSequence:
    """An ordered stream of non-negative token ids."""

    tokens: np.ndarray
    source_tokenizer: str = ""

    def __post_init__(self):
        arr = np.asarray(self.tokens, dtype=np.int64)
        if arr.ndim != 1:
            raise ValueError("tokens must be a 1-D sequence")
        if len(arr) and arr.min() < 0:
            raise ValueError("token ids must be non-negative")
        object.__setattr__(self, "tokens", arr)

    def __len__(self) -> int:
        return len(self.tokens)


@dataclass(frozen=True)
class ScoreEntry:
    tokenizer: str
    scale: str
    language: str
    direction: str
    metricx: float
    chrf: float

    @property
    def key(self) -> tuple[str, str, str, str]:
        return (self.tokenizer, self.scale, self.language, self.direction)


@dataclass(frozen=True)
class DownstreamFixture:
    """Downstream MT scores keyed by (tokenizer, scale, language, direction).

    MetricX is lower-is-better; chrF is higher-is-better. Consumers that
    define "wins" do so on MetricX.
    """

    entries: dict[tuple[str, str, str, str], ScoreEntry] = field(default_factory=dict)

    def get(self, tokenizer: str, scale: str, language: str, direction: str) -> ScoreEntry:
        key = (tokenizer, scale, language, direction)
        if key not in self.entries:
            raise KeyError(f"no score for {key}")
        return self.entries[key]

    def mean_metricx(self, tokenizer: str, scale: str, language: str) -> float:
        """MetricX averaged over both translation directions."""
        return 0.5 * sum(
            self.get(tokenizer, scale, language, d).metricx for d in DIRECTIONS
        )

    def tokenizers(self) -> list[str]:
        return sorted({k[0] for k in self.entries})

    def languages(self) -> list[str]:
        return sorted({k[2] for k in self.entries})

    def scales(self) -> list[str]:
        return sorted({k[1] for k in self.entries})


def load_corpus(path, format: str = "plaintext-lines") -> list[Document]:
    """Load documents from a plaintext-lines or jsonl file.

    Empty lines (and jsonl records with empty text) are skipped: they
    contribute no tokens and would distort per-document statistics.
    """
    path = Path(path)
    try:
        raw = path.read_text(encoding="utf-8")
    except UnicodeDecodeError as e:
        raise ValueError(f"{path}: invalid UTF-8: {e}") from e

    docs: list[Document] = []
    seen_ids: set[str] = set()
    if format == "plaintext-lines":
        for lineno, line in enumerate(raw.splitlines(), start=1):
            if line:
                docs.append(Document(id=str(lineno), text=line))
    elif format == "jsonl":
        for lineno, line in enumerate(raw.splitlines(), start=1):
            if not line.strip():
                continue
            try:
                record = json.loads(line)
            except json.JSONDecodeError as e:
                raise ValueError(f"{path} line {lineno}: malformed JSON: {e.msg}") from e
            if not isinstance(record, dict) or "text" not in record:
                raise ValueError(f'{path} line {lineno}: record lacks a "text" field')
            text = record["text"]
            if not isinstance(text, str):
                raise ValueError(f'{path} line {lineno}: "text" must be a string')
            if not text:
                continue
            doc_id = str(record.get("id", lineno))
            if doc_id in seen_ids:
                raise ValueError(f"{path} line {lineno}: duplicate document id {doc_id!r}")
            seen_ids.add(doc_id)
            docs.append(Document(id=doc_id, text=text))
    else:
        raise ValueError(f"unknown corpus format {format!r}")
    return docs


def load_token_stream(path, name: str | None = None) -> TokenSequence:
    """Read whitespace-separated non-negative integers as a TokenSequence."""
    path = Path(path)
    body = "\n".join(
        line for line in path.read_text(encoding="utf-8").splitlines()
        if not line.lstrip().startswith("#")
    )
    tokens = []
    for offset, entry in enumerate(body.split(), start=1):
        try:
            value = int(entry)
        except ValueError:
            raise ValueError(f"{path}: entry {offset}: not an integer: {entry!r}") from None
        if value < 0:
            raise ValueError(f"{path}: entry {offset}: negative token id {value}")
        tokens.append(value)
    return TokenSequence(
        tokens=np.asarray(tokens, dtype=np.int64),
        source_tokenizer=name if name is not None else path.stem,
    )


def save_token_stream(seq: TokenSequence, path, header: str | None = None) -> None:
    path = Path(path)
    with path.open("w", encoding="utf-8") as fh:
        if header is not None:
            fh.write(f"# {header}\n")
        fh.write(" ".join(str(t) for t in seq.tokens.tolist()))
        fh.write("\n")


def load_downstream_fixture(path) -> DownstreamFixture:
    """Load a downstream-score CSV (header: tokenizer,scale,language,direction,metricx,chrf)."""
    path = Path(path)
    with path.open(encoding="utf-8", newline="") as fh:
        return _parse_fixture(fh, str(path))


def load_bundled_fixture() -> DownstreamFixture:
    """The MT-score table shipped with the package."""
    ref = resources.files("tokscope").joinpath("data", BUNDLED_SCORES)
    with ref.open(encoding="utf-8", newline="") as fh:
        return _parse_fixture(fh, BUNDLED_SCORES)


def _parse_fixture(fh, source: str) -> DownstreamFixture:
    rows = (line for line in fh if not line.startswith("#"))
    reader = csv.DictReader(rows)
    missing = set(FIXTURE_COLUMNS) - set(reader.fieldnames or [])
    if missing:
        raise ValueError(f"{source}: missing columns: {sorted(missing)}")
    entries: dict[tuple[str, str, str, str], ScoreEntry] = {}
    for lineno, row in enumerate(reader, start=2):
        try:
            entry = ScoreEntry(
                tokenizer=row["tokenizer"],
                scale=row["scale"],
                language=row["language"],
                direction=row["direction"],
                metricx=float(row["metricx"]),
                chrf=float(row["chrf"]),
            )
        except (TypeError, ValueError) as e:
            raise ValueError(f"{source} line {lineno}: bad row: {e}") from None
        if entry.direction not in DIRECTIONS:
            raise ValueError(
                f"{source} line {lineno}: direction must be one of {DIRECTIONS}, "
                f"got {entry.direction!r}"
            )
        if entry.metricx < 0 or entry.chrf < 0:
            raise ValueError(f"{source} line {lineno}: scores must be non-negative")
        if entry.key in entries:
            raise ValueError(f"{source} line {lineno}: duplicate key {entry.key}")
        entries[entry.key] = entry
    return DownstreamFixture(entries=entries)


def save_downstream_fixture(fixture: DownstreamFixture, path) -> None:
    path = Path(path)
    with path.open("w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(FIXTURE_COLUMNS)
        for entry in sorted(fixture.entries.values(), key=lambda e: e.key):
            writer.writerow(
                [entry.tokenizer, entry.scale, entry.language, entry.direction,
                 repr(entry.metricx), repr(entry.chrf)]
            )
