"""Ingestion and aggregation of paired reference/model evaluation data.

The on-disk format is JSONL, one object per line:

    {"example_id": str, "context": str, "output_text": str,
     "origin": "reference"|"model", "log_p_model": number,
     "log_base": "e"|"2"|"10" (optional, default "e"),
     "ratings": [number, ...], "token_count": int (optional)}

Log-probabilities are stored internally in natural log; the optional
``log_base`` field declares the base of the incoming value and is
converted on load.  Ratings are kept raw (one entry per rater) so that
downstream stability analysis can resample raters.
"""

from __future__ import annotations

import io
import json
import math
from collections import Counter
from dataclasses import dataclass
from pathlib import Path
from typing import IO, Iterable, Union

ORIGINS = ("reference", "model")

_LN_BASE = {"e": 1.0, "2": math.log(2.0), "10": math.log(10.0)}


class DatasetError(ValueError):
    """Raised when an input stream violates the dataset schema or invariants."""


@dataclass(frozen=True)
class RatingRecord:
    """A single rater's 0-5 typicality judgment of one example."""

    example_id: str
    rater_id: str
    score: float
    submitted_at: str

    def __post_init__(self):
        if not 0.0 <= self.score <= 5.0:
            raise DatasetError(f"score {self.score} outside [0, 5]")


@dataclass(frozen=True)
class EvaluatedExample:
    """One (context, output) pair with origin, model log-probability and ratings."""

    example_id: str
    context: str
    output_text: str
    origin: str
    log_p_model: float  # natural log; may be positive for unnormalized scorers
    ratings: tuple[float, ...]
    token_count: int

    def __post_init__(self):
        if self.origin not in ORIGINS:
            raise DatasetError(f"origin must be one of {ORIGINS}, got {self.origin!r}")
        if self.token_count < 1:
            raise DatasetError(f"token_count must be >= 1, got {self.token_count}")
        if not math.isfinite(self.log_p_model):
            raise DatasetError(f"log_p_model must be finite, got {self.log_p_model}")
        for r in self.ratings:
            if not 0.0 <= r <= 5.0:
                raise DatasetError(f"rating {r} outside [0, 5] for {self.example_id!r}")


@dataclass(frozen=True)
class EvalDataset:
    """A validated collection of paired reference/model examples."""

    examples: tuple[EvaluatedExample, ...]
    n_contexts: int

    def references(self) -> list[EvaluatedExample]:
        return [e for e in self.examples if e.origin == "reference"]

    def models(self) -> list[EvaluatedExample]:
        return [e for e in self.examples if e.origin == "model"]


def hj(example: EvaluatedExample) -> float:
    """Mean of the replicate human ratings (the aggregated human judgment)."""
    if not example.ratings:
        raise DatasetError(f"example {example.example_id!r} has no ratings")
    return sum(example.ratings) / len(example.ratings)


def tokenize_count(text: str) -> int:
    """Number of whitespace-delimited tokens; placeholders like <UNK> count as one."""
    tokens = text.split()
    if not tokens:
        raise DatasetError("cannot count tokens of empty text")
    return len(tokens)


def _coerce_stream(source) -> Iterable[str]:
    if isinstance(source, (str, Path)):
        return Path(source).read_text(encoding="utf-8").splitlines()
    if isinstance(source, bytes):
        return source.decode("utf-8").splitlines()
    if isinstance(source, io.TextIOBase):
        return source.read().splitlines()
    # binary file-like
    data = source.read()
    if isinstance(data, bytes):
        data = data.decode("utf-8")
    return data.splitlines()


def _parse_record(obj: dict, lineno: int) -> EvaluatedExample:
    try:
        example_id = str(obj["example_id"])
        context = str(obj.get("context", ""))
        output_text = str(obj["output_text"])
        origin = obj["origin"]
        log_p = float(obj["log_p_model"])
        ratings = tuple(float(r) for r in obj["ratings"])
    except KeyError as exc:
        raise DatasetError(f"line {lineno}: missing field {exc.args[0]!r}") from None
    except (TypeError, ValueError) as exc:
        raise DatasetError(f"line {lineno}: {exc}") from None

    base = obj.get("log_base", "e")
    if base not in _LN_BASE:
        raise DatasetError(f"line {lineno}: unknown log_base {base!r}")
    log_p *= _LN_BASE[base]

    if not ratings:
        raise DatasetError(f"line {lineno}: empty ratings list")

    if "token_count" in obj and obj["token_count"] is not None:
        token_count = int(obj["token_count"])
    else:
        try:
            token_count = tokenize_count(output_text)
        except DatasetError:
            raise DatasetError(f"line {lineno}: empty output_text") from None

    try:
        return EvaluatedExample(
            example_id=example_id,
            context=context,
            output_text=output_text,
            origin=origin,
            log_p_model=log_p,
            ratings=ratings,
            token_count=token_count,
        )
    except DatasetError as exc:
        raise DatasetError(f"line {lineno}: {exc}") from None


def build_dataset(examples: Iterable[EvaluatedExample]) -> EvalDataset:
    """Validate pairing invariants and assemble an EvalDataset.

    Reference-origin and model-origin examples must carry the same multiset
    of contexts (one reference and one model output per context row).
    """
    examples = tuple(examples)
    ids = Counter(e.example_id for e in examples)
    dups = [i for i, c in ids.items() if c > 1]
    if dups:
        raise DatasetError(f"duplicate example_id(s): {dups[:5]}")

    ref_ctx = Counter(e.context for e in examples if e.origin == "reference")
    mod_ctx = Counter(e.context for e in examples if e.origin == "model")
    if ref_ctx != mod_ctx:
        diff = (ref_ctx - mod_ctx) + (mod_ctx - ref_ctx)
        sample = next(iter(diff))
        raise DatasetError(
            "unpaired contexts: reference and model rows do not match "
            f"(e.g. context {sample!r}: {ref_ctx[sample]} reference vs {mod_ctx[sample]} model)"
        )
    n_contexts = sum(ref_ctx.values())
    if n_contexts == 0:
        raise DatasetError("dataset contains no examples")
    return EvalDataset(examples=examples, n_contexts=n_contexts)


def load_dataset(source: Union[str, Path, bytes, IO], format: str = "jsonl") -> EvalDataset:
    """Parse and validate a JSONL stream of evaluated examples."""
    if format != "jsonl":
        raise DatasetError(f"unsupported format {format!r}")
    parsed = []
    for lineno, line in enumerate(_coerce_stream(source), start=1):
        if not line.strip():
            continue
        try:
            obj = json.loads(line)
        except json.JSONDecodeError as exc:
            raise DatasetError(f"line {lineno}: invalid JSON ({exc.msg})") from None
        if not isinstance(obj, dict):
            raise DatasetError(f"line {lineno}: expected a JSON object")
        parsed.append(_parse_record(obj, lineno))
    return build_dataset(parsed)


def serialize_dataset(dataset: EvalDataset) -> str:
    """Inverse of load_dataset: JSONL text (natural-log convention, token counts explicit)."""
    lines = []
    for e in dataset.examples:
        lines.append(
            json.dumps(
                {
                    "example_id": e.example_id,
                    "context": e.context,
                    "output_text": e.output_text,
                    "origin": e.origin,
                    "log_p_model": e.log_p_model,
                    "ratings": list(e.ratings),
                    "token_count": e.token_count,
                },
                ensure_ascii=False,
            )
        )
    return "\n".join(lines) + "\n"
