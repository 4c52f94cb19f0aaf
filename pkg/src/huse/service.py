"""HTTP service for collecting replicate typicality ratings.

Raters pull batches of unrated examples, submit integer 0-5 scores, and the
accumulated ratings export in the dataset ingestion schema.  Persistence is
an append-only JSONL log replayed on startup; origin labels and model
log-probabilities stay server-side and never appear in task payloads.
"""

from __future__ import annotations

import json
import os
import threading
from dataclasses import dataclass, field
from datetime import datetime, timezone
from pathlib import Path
from typing import Optional, Union

INSTRUCTIONS_VERSION = "v1"

INSTRUCTIONS = (
    "Rate how typical each sentence is as a response to its context, from 0 to 5. "
    "0 means invalid (grammatically or factually incorrect) and 5 means very typical. "
    "Treat <UNK> placeholders as rare, but appropriate words for the context."
)


class UnknownExampleError(KeyError):
    pass


class DuplicateRatingError(ValueError):
    pass


class InvalidScoreError(ValueError):
    pass


@dataclass(frozen=True)
class PoolExample:
    """One rateable example; origin and log_p_model are never sent to raters."""

    example_id: str
    context: str
    output_text: str
    origin: str
    log_p_model: float


@dataclass(frozen=True)
class AnnotationTask:
    example_id: str
    context: str
    output_text: str
    instructions_version: str = INSTRUCTIONS_VERSION

    def to_dict(self) -> dict:
        return {
            "example_id": self.example_id,
            "context": self.context,
            "output_text": self.output_text,
            "instructions_version": self.instructions_version,
        }


@dataclass(frozen=True)
class TaskBatch:
    batch_id: str
    rater_id: str
    tasks: tuple[AnnotationTask, ...]

    def to_dict(self) -> dict:
        return {
            "batch_id": self.batch_id,
            "rater_id": self.rater_id,
            "tasks": [t.to_dict() for t in self.tasks],
        }


def load_pool(path: Union[str, Path]) -> list[PoolExample]:
    pool = []
    for lineno, line in enumerate(Path(path).read_text(encoding="utf-8").splitlines(), start=1):
        if not line.strip():
            continue
        obj = json.loads(line)
        pool.append(
            PoolExample(
                example_id=str(obj["example_id"]),
                context=str(obj.get("context", "")),
                output_text=str(obj["output_text"]),
                origin=str(obj["origin"]),
                log_p_model=float(obj["log_p_model"]),
            )
        )
    ids = [p.example_id for p in pool]
    if len(set(ids)) != len(ids):
        raise ValueError("duplicate example_id in pool")
    return pool


class RatingStore:
    """In-memory index over an append-only rating log.

    All writes are serialized through a single lock and fsynced before the
    acknowledgment, so an acknowledged rating survives a process restart.
    """

    def __init__(
        self,
        pool: list[PoolExample],
        log_path: Union[str, Path],
        replicate_target: int = 20,
        batch_size: int = 25,
    ):
        self._pool = {p.example_id: p for p in pool}
        self._order = [p.example_id for p in pool]
        self._log_path = Path(log_path)
        self._target = replicate_target
        self._batch_size = batch_size
        self._lock = threading.Lock()
        # example_id -> list of (rater_id, score) in acknowledgment order
        self._ratings: dict[str, list[tuple[str, int]]] = {eid: [] for eid in self._order}
        self._seen: set[tuple[str, str]] = set()
        self._issued: dict[str, set[str]] = {}
        self._batch_counter = 0
        self._replay()
        self._log_file = open(self._log_path, "a", encoding="utf-8")

    def _replay(self):
        if not self._log_path.exists():
            return
        for line in self._log_path.read_text(encoding="utf-8").splitlines():
            if not line.strip():
                continue
            obj = json.loads(line)
            eid, rid, score = obj["example_id"], obj["rater_id"], int(obj["score"])
            if eid in self._ratings and (eid, rid) not in self._seen:
                self._ratings[eid].append((rid, score))
                self._seen.add((eid, rid))

    def next_batch(self, rater_id: str) -> Optional[TaskBatch]:
        """Up to batch_size examples this rater has not seen, fewest-rated first."""
        with self._lock:
            issued = self._issued.setdefault(rater_id, set())
            candidates = [
                eid
                for eid in self._order
                if (eid, rater_id) not in self._seen and eid not in issued
            ]
            if not candidates:
                return None
            # stable sort keeps pool order among equally-rated examples
            candidates.sort(key=lambda eid: len(self._ratings[eid]))
            chosen = candidates[: self._batch_size]
            issued.update(chosen)
            self._batch_counter += 1
            batch_id = f"batch-{self._batch_counter}"
            tasks = tuple(
                AnnotationTask(
                    example_id=eid,
                    context=self._pool[eid].context,
                    output_text=self._pool[eid].output_text,
                )
                for eid in chosen
            )
            return TaskBatch(batch_id=batch_id, rater_id=rater_id, tasks=tasks)

    def submit(self, rater_id: str, example_id: str, score) -> dict:
        """Durably record one rating; raises on unknown/duplicate/invalid input."""
        if example_id not in self._pool:
            raise UnknownExampleError(example_id)
        if not isinstance(score, int) or isinstance(score, bool) or not 0 <= score <= 5:
            raise InvalidScoreError(f"score must be an integer in [0, 5], got {score!r}")
        with self._lock:
            if (example_id, rater_id) in self._seen:
                raise DuplicateRatingError(f"rater {rater_id!r} already rated {example_id!r}")
            record = {
                "example_id": example_id,
                "rater_id": rater_id,
                "score": score,
                "submitted_at": datetime.now(timezone.utc).isoformat(),
            }
            self._log_file.write(json.dumps(record, ensure_ascii=False) + "\n")
            self._log_file.flush()
            os.fsync(self._log_file.fileno())
            self._ratings[example_id].append((rater_id, score))
            self._seen.add((example_id, rater_id))
            return {"status": "recorded", "example_id": example_id, "count": len(self._ratings[example_id])}

    def export_jsonl(self) -> str:
        """Accumulated ratings in the dataset ingestion schema (read-only, idempotent)."""
        with self._lock:
            lines = []
            for eid in self._order:
                p = self._pool[eid]
                scores = [s for _, s in self._ratings[eid]]
                lines.append(
                    json.dumps(
                        {
                            "example_id": p.example_id,
                            "context": p.context,
                            "output_text": p.output_text,
                            "origin": p.origin,
                            "log_p_model": p.log_p_model,
                            "ratings": scores,
                            "ready": len(scores) >= self._target,
                        },
                        ensure_ascii=False,
                    )
                )
            return "\n".join(lines) + "\n"

    def progress(self) -> dict:
        with self._lock:
            counts = {eid: len(self._ratings[eid]) for eid in self._order}
            return {
                "examples_total": len(self._order),
                "fully_rated": sum(1 for c in counts.values() if c >= self._target),
                "ratings_total": sum(counts.values()),
                "replicate_target": self._target,
                "per_example": counts,
            }

    def close(self):
        self._log_file.close()


try:
    from pydantic import BaseModel as _BaseModel
except ImportError:  # pragma: no cover - pydantic ships with fastapi
    _BaseModel = object


class RatingIn(_BaseModel):
    # module scope so FastAPI can resolve the stringified annotation
    rater_id: str
    example_id: str
    score: int


def create_app(store: RatingStore, static_dir: Optional[Union[str, Path]] = None):
    """FastAPI application exposing the annotation API (and optionally the UI)."""
    from fastapi import FastAPI, HTTPException
    from fastapi.responses import PlainTextResponse

    app = FastAPI(title="typicality rating service")

    @app.get("/api/tasks/next")
    def next_tasks(rater_id: str):
        batch = store.next_batch(rater_id)
        if batch is None:
            return {"batch": None, "done": True}
        return {"batch": batch.to_dict(), "done": False}

    @app.post("/api/ratings")
    def post_rating(body: RatingIn):
        try:
            return store.submit(body.rater_id, body.example_id, body.score)
        except UnknownExampleError:
            raise HTTPException(status_code=404, detail=f"unknown example {body.example_id!r}")
        except DuplicateRatingError as exc:
            raise HTTPException(status_code=409, detail=str(exc))
        except InvalidScoreError as exc:
            raise HTTPException(status_code=422, detail=str(exc))

    @app.get("/api/export", response_class=PlainTextResponse)
    def export():
        return store.export_jsonl()

    @app.get("/api/progress")
    def progress():
        return store.progress()

    @app.get("/api/instructions")
    def instructions():
        return {"version": INSTRUCTIONS_VERSION, "text": INSTRUCTIONS}

    if static_dir is not None and Path(static_dir).is_dir():
        from fastapi.staticfiles import StaticFiles

        app.mount("/", StaticFiles(directory=str(static_dir), html=True), name="ui")

    return app
