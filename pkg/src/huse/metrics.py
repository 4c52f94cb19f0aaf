"""HUSE score, quality/diversity decomposition, stability and surface export."""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .classifier import KnnConfig, batch_confidence, knn_confidence, loo_votes, _error_from_votes
from .dataset import EvalDataset, EvaluatedExample, build_dataset
from .features import featurize, fit_scaling


@dataclass(frozen=True)
class HuseReport:
    huse: float
    huse_q: float
    huse_d: float
    n_contexts: int
    k: int
    degenerate: bool
    per_example: tuple[dict, ...]

    def to_dict(self, include_per_example: bool = True) -> dict:
        out = {
            "huse": self.huse,
            "huse_q": self.huse_q,
            "huse_d": self.huse_d,
            "n_contexts": self.n_contexts,
            "k": self.k,
            "degenerate": self.degenerate,
        }
        if include_per_example:
            out["per_example"] = list(self.per_example)
        return out

    def to_json(self, include_per_example: bool = True) -> str:
        return json.dumps(self.to_dict(include_per_example), indent=2)


@dataclass(frozen=True)
class StabilityReport:
    n_examples_used: int
    n_raters_used: int
    n_bootstrap: int
    seed: int
    replicates: tuple[float, ...]
    mean: float
    p5: float
    p95: float

    def band_width(self) -> float:
        return self.p95 - self.p5

    def to_dict(self) -> dict:
        return {
            "n_examples_used": self.n_examples_used,
            "n_raters_used": self.n_raters_used,
            "n_bootstrap": self.n_bootstrap,
            "seed": self.seed,
            "replicates": list(self.replicates),
            "mean": self.mean,
            "p5": self.p5,
            "p95": self.p95,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2)


def compute_huse(
    dataset: EvalDataset,
    config: KnnConfig = KnnConfig(),
    denominator: str = "tokens",
    with_diagnostics: bool = True,
) -> HuseReport:
    """Twice the leave-one-out error under the 2-D feature map, with the
    human-judgment-only score and the diversity remainder.

    huse_d is stored as exactly 1 + huse - huse_q.  Scores are reported raw
    (they may exceed 1 for degenerate finite-sample discriminators); the
    degeneracy flag is set when huse > 1 or huse_q > huse.
    """
    x_full, labels, ids = featurize(dataset, "huse", denominator)
    x_full = fit_scaling(x_full).apply(x_full)
    votes = loo_votes(x_full, labels, config.k)
    err_full = _error_from_votes(votes, labels, config)

    x_hj, labels_hj, _ = featurize(dataset, "hj")
    x_hj = fit_scaling(x_hj).apply(x_hj)
    err_hj = _error_from_votes(loo_votes(x_hj, labels_hj, config.k), labels_hj, config)

    huse = 2.0 * err_full
    huse_q = 2.0 * err_hj
    huse_d = 1.0 + huse - huse_q

    per_example: tuple[dict, ...] = ()
    if with_diagnostics:
        rows = []
        for i, example in enumerate(dataset.examples):
            confidence = votes[i] / config.k
            is_ref = labels[i] == 1
            if votes[i] * 2 == config.k:
                outcome = "tie"
            elif (votes[i] * 2 > config.k) == is_ref:
                outcome = True
            else:
                outcome = False
            rows.append(
                {
                    "example_id": ids[i],
                    "origin": example.origin,
                    "scaled_features": [float(v) for v in x_full[i]],
                    "confidence": float(confidence),
                    "correctly_classified": outcome,
                }
            )
        per_example = tuple(rows)

    return HuseReport(
        huse=huse,
        huse_q=huse_q,
        huse_d=huse_d,
        n_contexts=dataset.n_contexts,
        k=config.k,
        degenerate=bool(huse > 1.0 or huse_q > huse),
        per_example=per_example,
    )


def _context_pairs(dataset: EvalDataset) -> list[tuple[EvaluatedExample, EvaluatedExample]]:
    """Group examples into (reference, model) pairs sharing a context.

    Duplicate contexts (e.g. the empty context of unconditional tasks) are
    paired in order of appearance.
    """
    refs: dict[str, list[EvaluatedExample]] = {}
    mods: dict[str, list[EvaluatedExample]] = {}
    order: list[str] = []
    for e in dataset.examples:
        bucket = refs if e.origin == "reference" else mods
        if e.context not in refs and e.context not in mods:
            order.append(e.context)
        bucket.setdefault(e.context, []).append(e)
    pairs = []
    for ctx in order:
        pairs.extend(zip(refs[ctx], mods[ctx]))
    return pairs


def _subsample_ratings(example: EvaluatedExample, n_raters: int, rng: np.random.Generator) -> EvaluatedExample:
    idx = rng.choice(len(example.ratings), size=n_raters, replace=False)
    ratings = tuple(example.ratings[j] for j in sorted(idx))
    return EvaluatedExample(
        example_id=example.example_id,
        context=example.context,
        output_text=example.output_text,
        origin=example.origin,
        log_p_model=example.log_p_model,
        ratings=ratings,
        token_count=example.token_count,
    )


def stability(
    dataset: EvalDataset,
    n_examples: int,
    n_raters: int,
    n_bootstrap: int,
    seed: int = 0,
    config: KnnConfig = KnnConfig(),
    denominator: str = "tokens",
) -> StabilityReport:
    """Bootstrap HUSE under context and per-example rater subsampling.

    Each replicate draws n_examples context pairs without replacement and,
    independently per example, n_raters ratings without replacement, then
    recomputes HUSE.  Replicate r uses the derived seed (seed + r), so the
    result is independent of evaluation order.
    """
    pairs = _context_pairs(dataset)
    if n_examples > len(pairs):
        raise ValueError(f"n_examples={n_examples} exceeds available contexts ({len(pairs)})")
    min_raters = min(len(e.ratings) for e in dataset.examples)
    if n_raters > min_raters:
        raise ValueError(f"n_raters={n_raters} exceeds minimum ratings per example ({min_raters})")
    if n_bootstrap < 1:
        raise ValueError("n_bootstrap must be >= 1")

    replicates = []
    for r in range(n_bootstrap):
        rng = np.random.default_rng(seed + r)
        chosen = rng.choice(len(pairs), size=n_examples, replace=False)
        examples = []
        for idx in sorted(chosen):
            ref, mod = pairs[idx]
            examples.append(_subsample_ratings(ref, n_raters, rng))
            examples.append(_subsample_ratings(mod, n_raters, rng))
        sub = build_dataset(examples)
        report = compute_huse(sub, config, denominator, with_diagnostics=False)
        replicates.append(report.huse)

    values = np.array(replicates)
    return StabilityReport(
        n_examples_used=n_examples,
        n_raters_used=n_raters,
        n_bootstrap=n_bootstrap,
        seed=seed,
        replicates=tuple(float(v) for v in values),
        mean=float(values.mean()),
        p5=float(np.percentile(values, 5)),
        p95=float(np.percentile(values, 95)),
    )


@dataclass(frozen=True)
class SurfaceRow:
    feature1: float
    feature2: float
    confidence: float
    kind: str  # "grid", "reference" or "model"
    raw1: float
    raw2: float


@dataclass(frozen=True)
class Surface:
    rows: tuple[SurfaceRow, ...]
    grid_resolution: int

    def to_tsv(self) -> str:
        lines = ["feature1\tfeature2\tconfidence\tkind\traw1\traw2"]
        for r in self.rows:
            lines.append(
                f"{r.feature1:.10g}\t{r.feature2:.10g}\t{r.confidence:.10g}\t{r.kind}\t{r.raw1:.10g}\t{r.raw2:.10g}"
            )
        return "\n".join(lines) + "\n"


def export_surface(
    dataset: EvalDataset,
    config: KnnConfig = KnnConfig(),
    grid_resolution: int = 50,
    denominator: str = "tokens",
) -> Surface:
    """Classifier confidence on a lattice over the scaled 2-D feature space.

    The lattice spans the bounding box of the scaled points padded by 5%.
    Data points are appended as rows tagged with their origin, carrying
    their leave-one-out confidence.  raw1/raw2 undo the unit-variance
    scaling for axis labeling.
    """
    if grid_resolution < 2:
        raise ValueError("grid_resolution must be >= 2")
    raw, labels, _ = featurize(dataset, "huse", denominator)
    profile = fit_scaling(raw)
    scaled = profile.apply(raw)

    lo = scaled.min(axis=0)
    hi = scaled.max(axis=0)
    pad = 0.05 * np.where(hi > lo, hi - lo, 1.0)
    axes = [np.linspace(lo[d] - pad[d], hi[d] + pad[d], grid_resolution) for d in range(2)]
    g1, g2 = np.meshgrid(axes[0], axes[1], indexing="ij")
    queries = np.column_stack([g1.ravel(), g2.ravel()])
    conf = batch_confidence(scaled, labels, queries, config)

    rows = [
        SurfaceRow(
            feature1=float(q[0]),
            feature2=float(q[1]),
            confidence=float(c),
            kind="grid",
            raw1=float(q[0] / profile.factors[0]),
            raw2=float(q[1] / profile.factors[1]),
        )
        for q, c in zip(queries, conf)
    ]
    for i, example in enumerate(dataset.examples):
        rows.append(
            SurfaceRow(
                feature1=float(scaled[i, 0]),
                feature2=float(scaled[i, 1]),
                confidence=knn_confidence(scaled, labels, scaled[i], exclude=i, config=config),
                kind=example.origin,
                raw1=float(raw[i, 0]),
                raw2=float(raw[i, 1]),
            )
        )
    return Surface(rows=tuple(rows), grid_resolution=grid_resolution)
