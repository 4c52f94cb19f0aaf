"""Exact finite-support ground truth for validating the estimator.

A DiscretePair fully specifies reference and model conditionals over a
shared finite support, so total variation, the optimal discriminator score
and the score of any quantized feature map can be computed by enumeration.
Also provides temperature annealing, a simulated-rater sampler producing
EvalDataset values, and checks for the information-theoretic approximation
bound and the invertible-map invariance.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Callable, Hashable, Sequence, Union

import numpy as np

from .dataset import EvalDataset, EvaluatedExample, build_dataset

_NORM_TOL = 1e-12
# floor for log of zero probabilities when emitting sampled datasets
_LOG_FLOOR = math.log(1e-300)


@dataclass(frozen=True)
class DiscreteDistribution:
    support: tuple[str, ...]
    probs: tuple[float, ...]

    def __post_init__(self):
        if len(self.support) != len(self.probs):
            raise ValueError("support and probs must align")
        if len(set(self.support)) != len(self.support):
            raise ValueError("support ids must be unique")
        if any(p < 0 for p in self.probs):
            raise ValueError("probabilities must be non-negative")
        if abs(sum(self.probs) - 1.0) > _NORM_TOL:
            raise ValueError(f"probabilities sum to {sum(self.probs)}, not 1")


@dataclass(frozen=True)
class ContextSpec:
    context_id: str
    prior: float
    p_human: DiscreteDistribution
    p_model: DiscreteDistribution

    def __post_init__(self):
        if self.p_human.support != self.p_model.support:
            raise ValueError("p_human and p_model must share a support")
        if self.prior < 0:
            raise ValueError("prior must be non-negative")


@dataclass(frozen=True)
class DiscretePair:
    """A fully known (reference, model) pair of conditionals over finite supports."""

    contexts: tuple[ContextSpec, ...]

    def __post_init__(self):
        total = sum(c.prior for c in self.contexts)
        if abs(total - 1.0) > _NORM_TOL:
            raise ValueError(f"context priors sum to {total}, not 1")
        ids = [c.context_id for c in self.contexts]
        if len(set(ids)) != len(ids):
            raise ValueError("context ids must be unique")

    def to_json(self) -> str:
        return json.dumps(
            {
                "contexts": [
                    {
                        "context_id": c.context_id,
                        "prior": c.prior,
                        "support": list(c.p_human.support),
                        "p_human": list(c.p_human.probs),
                        "p_model": list(c.p_model.probs),
                    }
                    for c in self.contexts
                ]
            }
        )

    @staticmethod
    def from_json(text: Union[str, bytes]) -> "DiscretePair":
        obj = json.loads(text)
        contexts = []
        for i, c in enumerate(obj["contexts"]):
            support = tuple(str(s) for s in c["support"])
            contexts.append(
                ContextSpec(
                    context_id=str(c.get("context_id", f"ctx{i}")),
                    prior=float(c["prior"]),
                    p_human=DiscreteDistribution(support, tuple(float(p) for p in c["p_human"])),
                    p_model=DiscreteDistribution(support, tuple(float(p) for p in c["p_model"])),
                )
            )
        return DiscretePair(contexts=tuple(contexts))


def single_context_pair(p_human: Sequence[float], p_model: Sequence[float]) -> DiscretePair:
    """Convenience constructor for a one-context pair over an anonymous support."""
    support = tuple(f"y{i}" for i in range(len(p_human)))
    return DiscretePair(
        contexts=(
            ContextSpec(
                context_id="ctx0",
                prior=1.0,
                p_human=DiscreteDistribution(support, tuple(float(p) for p in p_human)),
                p_model=DiscreteDistribution(support, tuple(float(p) for p in p_model)),
            ),
        )
    )


def exact_tv(pair: DiscretePair) -> float:
    """Prior-averaged total variation: sum_x p(x) * 1/2 * sum_y |p_m - p_h|."""
    # fsum keeps the enumeration exact to the last bit
    return math.fsum(
        c.prior * 0.5 * abs(m - h)
        for c in pair.contexts
        for h, m in zip(c.p_human.probs, c.p_model.probs)
    )


def exact_optimal_error_rate(pair: DiscretePair) -> float:
    """Twice the Bayes error of the optimal discriminator: 1 - exact_tv."""
    return 1.0 - exact_tv(pair)


def anneal(dist: DiscreteDistribution, t: float) -> DiscreteDistribution:
    """Reweight probabilities proportionally to p^(1/t); zero mass stays zero."""
    if t <= 0:
        raise ValueError(f"temperature must be positive, got {t}")
    if t == 1.0:
        return dist
    raised = [p ** (1.0 / t) if p > 0 else 0.0 for p in dist.probs]
    norm = sum(raised)
    return DiscreteDistribution(dist.support, tuple(p / norm for p in raised))


def anneal_pair(pair: DiscretePair, t: float) -> DiscretePair:
    """Anneal every model conditional of the pair."""
    return DiscretePair(
        contexts=tuple(
            ContextSpec(c.context_id, c.prior, c.p_human, anneal(c.p_model, t))
            for c in pair.contexts
        )
    )


# --- quantized feature maps -------------------------------------------------

Quantizer = Callable[[float, float], Hashable]


def identity_quantizer(p_human: float, p_model: float) -> Hashable:
    return (p_human, p_model)


def constant_quantizer(p_human: float, p_model: float) -> Hashable:
    return 0


def sign_quantizer(p_human: float, p_model: float) -> Hashable:
    """Sign of (p_human - p_model); the Bayes rule needs nothing more."""
    diff = p_human - p_model
    return 0 if diff == 0 else (1 if diff > 0 else -1)


def grid_quantizer(step: float, offset: float = 0.0) -> Quantizer:
    def cell(p_human: float, p_model: float) -> Hashable:
        return (math.floor((p_human - offset) / step), math.floor((p_model - offset) / step))

    return cell


def random_grid_quantizer(rng: np.random.Generator) -> Quantizer:
    step = float(rng.uniform(0.02, 0.5))
    offset = float(rng.uniform(0.0, step))
    return grid_quantizer(step, offset)


def _atoms(pair: DiscretePair):
    """Yield (p_h, p_m, mass_h, mass_m) per (context, outcome) with any mass."""
    for c in pair.contexts:
        for h, m in zip(c.p_human.probs, c.p_model.probs):
            if h == 0.0 and m == 0.0:
                continue
            yield h, m, c.prior * 0.5 * h, c.prior * 0.5 * m


def exact_feature_error(pair: DiscretePair, quantizer: Quantizer) -> float:
    """Exact score of the optimal discriminator restricted to quantized features.

    Per cell the optimal prediction keeps the larger aggregated posterior
    mass, so the Bayes error is the sum of per-cell minima; the score is
    twice that.
    """
    cells: dict[Hashable, tuple[list[float], list[float]]] = {}
    for h, m, mass_h, mass_m in _atoms(pair):
        key = quantizer(h, m)
        acc = cells.setdefault(key, ([], []))
        acc[0].append(mass_h)
        acc[1].append(mass_m)
    # fsum per cell and across cells keeps the enumeration exact to the
    # last bit (the constant quantizer yields exactly 1.0)
    bayes_error = math.fsum(min(math.fsum(a), math.fsum(b)) for a, b in cells.values())
    return 2.0 * bayes_error


@dataclass(frozen=True)
class BoundCheck:
    l_star: float
    l_phi: float
    mutual_info_bits: float
    upper_bound: float
    holds: bool

    def to_dict(self) -> dict:
        return {
            "l_star": self.l_star,
            "l_phi": self.l_phi,
            "mutual_info_bits": self.mutual_info_bits,
            "upper_bound": self.upper_bound,
            "holds": self.holds,
        }


def check_approximation_bound(pair: DiscretePair, quantizer: Quantizer, tol: float = 1e-9) -> BoundCheck:
    """Verify L* <= L(phi) <= L* + 2(1 - 2^-I) by exhaustive enumeration.

    I is the conditional mutual information (in bits) between the optimal
    prediction and the exact probability pair given the quantized cell,
    computed over the enumerable joint distribution.  The optimal prediction
    is 1 when p_human > p_model, 0 otherwise (ties predict 0).
    """
    l_star = exact_optimal_error_rate(pair)
    l_phi = exact_feature_error(pair, quantizer)

    # joint over (z_opt, exact pair value, cell) under P(x, y) = prior*(h+m)/2
    joint: dict[tuple, float] = {}
    for h, m, mass_h, mass_m in _atoms(pair):
        z_opt = 1 if h > m else 0
        key = (z_opt, (h, m), quantizer(h, m))
        joint[key] = joint.get(key, 0.0) + mass_h + mass_m

    p_cell: dict[Hashable, float] = {}
    p_z_cell: dict[tuple, float] = {}
    p_v_cell: dict[tuple, float] = {}
    for (z, v, cell), p in joint.items():
        p_cell[cell] = p_cell.get(cell, 0.0) + p
        p_z_cell[(z, cell)] = p_z_cell.get((z, cell), 0.0) + p
        p_v_cell[(v, cell)] = p_v_cell.get((v, cell), 0.0) + p

    info = 0.0
    for (z, v, cell), p in joint.items():
        if p <= 0:
            continue
        info += p * math.log2(p * p_cell[cell] / (p_z_cell[(z, cell)] * p_v_cell[(v, cell)]))
    info = max(info, 0.0)  # clear float underflow

    upper = l_star + 2.0 * (1.0 - 2.0 ** (-info))
    holds = (l_star - tol) <= l_phi <= (upper + tol)
    return BoundCheck(l_star=l_star, l_phi=l_phi, mutual_info_bits=info, upper_bound=upper, holds=holds)


def check_invertible_invariance(
    pair: DiscretePair, mapping: Callable[[float, float], Hashable]
) -> bool:
    """Exact score under an injectively mapped feature equals the optimal score.

    Raises ValueError when the map collides on the realized probability
    pairs (precondition failure).
    """
    realized: dict[Hashable, tuple[float, float]] = {}
    for h, m, _, _ in _atoms(pair):
        image = mapping(h, m)
        prev = realized.get(image)
        if prev is not None and prev != (h, m):
            raise ValueError(f"map is not injective on realized values: {prev} and {(h, m)} -> {image}")
        realized[image] = (h, m)
    # an injective map induces the same cell partition as the exact pair
    # values, so the two enumerations agree bit for bit
    mapped_error = exact_feature_error(pair, lambda h, m: mapping(h, m))
    return mapped_error == exact_feature_error(pair, identity_quantizer)


# --- sampling ---------------------------------------------------------------


@dataclass(frozen=True)
class RaterModel:
    """Simulated rater: clamp(slope * ln p_human + intercept + noise, 0, 5).

    The defaults are calibration knobs producing ratings that track the true
    log reference probability, mirroring how replicate typicality judgments
    behave in practice.
    """

    slope: float = 0.3
    intercept: float = 4.5
    noise: float = 0.75
    n_raters: int = 20

    def __post_init__(self):
        if self.n_raters < 1:
            raise ValueError("n_raters must be >= 1")
        if self.noise < 0:
            raise ValueError("noise must be >= 0")


def _draw_rows(pair: DiscretePair, n_rows: int, rng: np.random.Generator):
    """Per row: (context index, reference outcome index, model outcome index)."""
    priors = np.array([c.prior for c in pair.contexts])
    ctx_idx = rng.choice(len(pair.contexts), size=n_rows, p=priors)
    rows = []
    for i in range(n_rows):
        c = pair.contexts[ctx_idx[i]]
        y_ref = int(rng.choice(len(c.p_human.support), p=np.array(c.p_human.probs)))
        y_mod = int(rng.choice(len(c.p_model.support), p=np.array(c.p_model.probs)))
        rows.append((int(ctx_idx[i]), y_ref, y_mod))
    return rows


def _safe_log(p: float) -> float:
    return math.log(p) if p > 0 else _LOG_FLOOR


def sample_opt_features(pair: DiscretePair, n_rows: int, seed: int) -> tuple[np.ndarray, np.ndarray]:
    """Draw n_rows (reference, model) pairs and return exact probability features.

    Rows interleave reference (label 1) and model (label 0) points in draw
    order; each point carries (p_human(y|x), p_model(y|x)).
    """
    rng = np.random.default_rng(seed)
    feats = np.empty((2 * n_rows, 2), dtype=np.float64)
    labels = np.empty(2 * n_rows, dtype=np.int64)
    for i, (ci, y_ref, y_mod) in enumerate(_draw_rows(pair, n_rows, rng)):
        c = pair.contexts[ci]
        feats[2 * i] = (c.p_human.probs[y_ref], c.p_model.probs[y_ref])
        labels[2 * i] = 1
        feats[2 * i + 1] = (c.p_human.probs[y_mod], c.p_model.probs[y_mod])
        labels[2 * i + 1] = 0
    return feats, labels


def sample_eval_dataset(
    pair: DiscretePair, n_rows: int, rater_model: RaterModel = RaterModel(), seed: int = 0
) -> EvalDataset:
    """Sample a paired evaluation dataset with simulated replicate ratings.

    Each row draws one reference and one model outcome for a common context;
    log_p_model comes from the pair exactly (floored for zero mass), every
    rating is clamp(slope * ln p_human(y|x) + intercept + N(0, noise), 0, 5),
    and token_count is 1 for the synthetic one-token outputs.
    """
    rng = np.random.default_rng(seed)
    examples = []
    for i, (ci, y_ref, y_mod) in enumerate(_draw_rows(pair, n_rows, rng)):
        c = pair.contexts[ci]
        row_ctx = f"{c.context_id}#{i}"
        for y_idx, origin in ((y_ref, "reference"), (y_mod, "model")):
            mean = rater_model.slope * _safe_log(c.p_human.probs[y_idx]) + rater_model.intercept
            raw = mean + rng.normal(0.0, rater_model.noise, size=rater_model.n_raters)
            ratings = tuple(float(r) for r in np.clip(raw, 0.0, 5.0))
            examples.append(
                EvaluatedExample(
                    example_id=f"{origin[:3]}-{i}",
                    context=row_ctx,
                    output_text=c.p_human.support[y_idx],
                    origin=origin,
                    log_p_model=_safe_log(c.p_model.probs[y_idx]),
                    ratings=ratings,
                    token_count=1,
                )
            )
    return build_dataset(examples)


# Random distributions are dyadic rationals (integer counts over 2^20).  With
# this resolution every derived mass (prior * 0.5 * prob) and every pairwise
# difference is exactly representable, so the total-variation identity and the
# invertible-map equalities hold bit for bit in plain float arithmetic.
_DYADIC_RESOLUTION = 1 << 20


def _random_dyadic(rng: np.random.Generator, size: int) -> tuple[float, ...]:
    # Dirichlet(1) shape, then quantized onto the dyadic grid.
    counts = rng.multinomial(_DYADIC_RESOLUTION, rng.dirichlet(np.ones(size)))
    return tuple(int(c) / _DYADIC_RESOLUTION for c in counts)


def random_pair(
    seed: Union[int, np.random.Generator],
    n_contexts: int = 1,
    min_support: int = 2,
    max_support: int = 10,
) -> DiscretePair:
    """Seeded random pair: Dirichlet(1)-shaped dyadic conditionals over supports of size 2-10."""
    rng = seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)
    priors = _random_dyadic(rng, n_contexts)
    contexts = []
    for i in range(n_contexts):
        size = int(rng.integers(min_support, max_support + 1))
        support = tuple(f"y{j}" for j in range(size))
        contexts.append(
            ContextSpec(
                context_id=f"ctx{i}",
                prior=priors[i],
                p_human=DiscreteDistribution(support, _random_dyadic(rng, size)),
                p_model=DiscreteDistribution(support, _random_dyadic(rng, size)),
            )
        )
    return DiscretePair(contexts=tuple(contexts))


def tv_anneal_curve(pair: DiscretePair, temperatures: Sequence[float]) -> list[tuple[float, float]]:
    """(temperature, exact TV) points for the model annealed at each temperature."""
    return [(float(t), exact_tv(anneal_pair(pair, t))) for t in temperatures]
