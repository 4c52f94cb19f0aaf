"""Shared fixtures: small paired datasets and JSONL builders."""

import json

import numpy as np
import pytest

from huse.dataset import EvaluatedExample, build_dataset


def make_example(
    example_id,
    origin,
    context="ctx",
    ratings=(3.0, 4.0),
    log_p_model=-10.0,
    token_count=5,
    output_text="a b c d e",
):
    return EvaluatedExample(
        example_id=example_id,
        context=context,
        output_text=output_text,
        origin=origin,
        log_p_model=log_p_model,
        ratings=tuple(float(r) for r in ratings),
        token_count=token_count,
    )


def paired_dataset(n_contexts=10, seed=0, n_raters=5):
    """Random but valid dataset with one reference and one model row per context."""
    rng = np.random.default_rng(seed)
    examples = []
    for i in range(n_contexts):
        for origin in ("reference", "model"):
            examples.append(
                make_example(
                    f"{origin[:3]}-{i}",
                    origin,
                    context=f"c{i}",
                    ratings=np.clip(rng.normal(3.0 if origin == "reference" else 2.0, 1.0, n_raters), 0, 5),
                    log_p_model=float(rng.normal(-20, 5)),
                    token_count=int(rng.integers(3, 12)),
                )
            )
    return build_dataset(examples)


def record_dict(example_id, origin, context="ctx", **overrides):
    obj = {
        "example_id": example_id,
        "context": context,
        "output_text": "a b c d e",
        "origin": origin,
        "log_p_model": -10.0,
        "ratings": [3, 4],
    }
    obj.update(overrides)
    return obj


def jsonl(records):
    return "\n".join(json.dumps(r) for r in records) + "\n"


@pytest.fixture
def tiny_jsonl():
    return jsonl(
        [
            record_dict("r1", "reference", "c1"),
            record_dict("m1", "model", "c1"),
            record_dict("r2", "reference", "c2"),
            record_dict("m2", "model", "c2"),
        ]
    )
