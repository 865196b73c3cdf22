"""Task queue and persistence for the human-annotation workflow.

Tasks are pre-aligned sentence pairs; annotators label the non-match pairs
with a penalty level, category and free-text reason.  Persistence is one
append-only JSONL event log; the in-memory index is rebuilt by replaying it
at startup.  All mutations are serialized through a single lock.
"""

from __future__ import annotations

import json
import threading
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Sequence

from ..align import levenshtein_align, merge_pass
from ..ingest import CorpusRecord, TrainingPair, training_pairs_to_jsonl
from ..rubric import LEVEL_CATEGORIES, PenaltyLevel, PenaltyWeights, score_sentence
from ..textnorm import LanguagePack, tokenize

__all__ = ["AnnotationStore", "ValidationFailure", "StaleTask", "TaskPairView"]


class ValidationFailure(ValueError):
    """Bad labels: wrong indexes, inconsistent category, incomplete set."""


class StaleTask(RuntimeError):
    """Task not assigned to the caller, or already submitted."""


@dataclass(frozen=True)
class TaskPairView:
    index: int
    ref_words: tuple[str, ...]
    hyp_words: tuple[str, ...]
    op: str
    k: int
    locked: bool  # match pairs come pre-labeled as identical


@dataclass
class _TaskState:
    id: str
    lang: str
    ref_text: str
    hyp_text: str
    n_ref: int
    pairs: list[TaskPairView]
    status: str = "pending"  # pending / in-progress / done
    annotator: str | None = None
    labels: list[dict] = field(default_factory=list)
    human_score: float | None = None

    def labelable_indexes(self) -> set[int]:
        return {p.index for p in self.pairs if not p.locked}


def _task_json(task: _TaskState) -> dict:
    return {
        "id": task.id,
        "lang": task.lang,
        "ref_text": task.ref_text,
        "hyp_text": task.hyp_text,
        "n_ref": task.n_ref,
        "status": task.status,
        "annotator": task.annotator,
        "pairs": [asdict(p) for p in task.pairs],
        "labels": task.labels,
        "human_score": task.human_score,
    }


class AnnotationStore:
    def __init__(self, directory: str | Path, weights: PenaltyWeights = PenaltyWeights()):
        self.dir = Path(directory)
        self.dir.mkdir(parents=True, exist_ok=True)
        self.log_path = self.dir / "events.jsonl"
        self.weights = weights
        self._lock = threading.Lock()
        self._tasks: dict[str, _TaskState] = {}
        self._order: list[str] = []
        if self.log_path.is_file():
            self._replay()

    # -- persistence ------------------------------------------------------

    def _append(self, event: dict) -> None:
        with open(self.log_path, "a", encoding="utf-8") as fh:
            fh.write(json.dumps(event, ensure_ascii=False) + "\n")
            fh.flush()

    def _replay(self) -> None:
        with open(self.log_path, encoding="utf-8") as fh:
            for line in fh:
                if line.strip():
                    self._apply(json.loads(line))

    def _apply(self, event: dict) -> None:
        kind = event["event"]
        if kind == "task":
            t = event["task"]
            state = _TaskState(
                id=t["id"],
                lang=t["lang"],
                ref_text=t["ref_text"],
                hyp_text=t["hyp_text"],
                n_ref=t["n_ref"],
                pairs=[
                    TaskPairView(
                        index=p["index"],
                        ref_words=tuple(p["ref_words"]),
                        hyp_words=tuple(p["hyp_words"]),
                        op=p["op"],
                        k=p["k"],
                        locked=p["locked"],
                    )
                    for p in t["pairs"]
                ],
            )
            self._tasks[state.id] = state
            self._order.append(state.id)
        elif kind == "assign":
            task = self._tasks[event["task_id"]]
            task.status = "in-progress"
            task.annotator = event["annotator"]
        elif kind == "submit":
            task = self._tasks[event["task_id"]]
            task.status = "done"
            task.annotator = event["annotator"]
            task.labels = event["labels"]
            task.human_score = event["human_score"]

    # -- task construction --------------------------------------------------

    def build_tasks(self, records: Sequence[CorpusRecord], pack: LanguagePack) -> int:
        """Align each corpus record into a task; existing ids are kept as-is."""
        added = 0
        with self._lock:
            for rec in records:
                if rec.id in self._tasks:
                    continue
                ref = tokenize(rec.ref_text, pack, rec.id)
                hyp = tokenize(rec.hyp_text, pack, rec.id)
                merged = merge_pass(levenshtein_align(ref, hyp), pack)
                pairs = [
                    TaskPairView(
                        index=i,
                        ref_words=p.ref_words,
                        hyp_words=p.hyp_words,
                        op=p.op.value,
                        k=p.k,
                        locked=not p.is_mismatch,
                    )
                    for i, p in enumerate(merged.pairs)
                ]
                state = _TaskState(
                    id=rec.id,
                    lang=rec.lang or pack.lang,
                    ref_text=rec.ref_text,
                    hyp_text=rec.hyp_text,
                    n_ref=ref.n,
                    pairs=pairs,
                )
                self._apply({"event": "task", "task": _task_json(state)})
                self._append({"event": "task", "task": _task_json(state)})
                added += 1
        return added

    # -- queue ---------------------------------------------------------------

    def next_task(self, annotator: str) -> dict | None:
        """Oldest pending task, assigned atomically; idempotent per annotator."""
        if not annotator:
            raise ValidationFailure("annotator id must be non-empty")
        with self._lock:
            for tid in self._order:
                task = self._tasks[tid]
                if task.status == "in-progress" and task.annotator == annotator:
                    return _task_json(task)
            for tid in self._order:
                task = self._tasks[tid]
                if task.status == "pending":
                    event = {"event": "assign", "task_id": tid, "annotator": annotator}
                    self._apply(event)
                    self._append(event)
                    return _task_json(task)
        return None

    def get(self, task_id: str) -> dict | None:
        with self._lock:
            task = self._tasks.get(task_id)
            return _task_json(task) if task else None

    # -- labels ----------------------------------------------------------------

    def submit(self, task_id: str, annotator: str, labels: Sequence[dict]) -> dict:
        """Validate and persist labels; returns the stored evaluation."""
        with self._lock:
            task = self._tasks.get(task_id)
            if task is None:
                raise ValidationFailure(f"unknown task {task_id!r}")
            if task.status == "done":
                raise StaleTask(f"task {task_id!r} was already submitted")
            if task.status != "in-progress" or task.annotator != annotator:
                raise StaleTask(f"task {task_id!r} is not assigned to {annotator!r}")

            labelable = task.labelable_indexes()
            seen: dict[int, dict] = {}
            for label in labels:
                idx = label.get("pair_index")
                if idx not in labelable:
                    raise ValidationFailure(f"pair index {idx!r} is not labelable")
                level = label.get("level")
                if level not in (0, 1, 2, 3):
                    raise ValidationFailure(f"pair {idx}: level must be 0..3")
                category = label.get("category", "other")
                if category not in LEVEL_CATEGORIES[PenaltyLevel(level)]:
                    raise ValidationFailure(
                        f"pair {idx}: category {category!r} inconsistent with level {level}"
                    )
                seen[idx] = {
                    "pair_index": idx,
                    "level": level,
                    "category": category,
                    "reason": str(label.get("reason", "")),
                }
            missing = sorted(labelable - set(seen))
            if missing:
                raise ValidationFailure(f"unlabeled pair indexes: {missing}")

            levels = [PenaltyLevel(l["level"]) for l in seen.values()]
            breakdown = score_sentence(task.n_ref, levels, self.weights)
            event = {
                "event": "submit",
                "task_id": task_id,
                "annotator": annotator,
                "labels": [seen[i] for i in sorted(seen)],
                "human_score": breakdown.laser,
                "total_penalty": breakdown.total_penalty,
            }
            self._apply(event)
            self._append(event)
            return {
                "id": task_id,
                "n_ref": task.n_ref,
                "human_score": breakdown.laser,
                "total_penalty": breakdown.total_penalty,
            }

    # -- exports -------------------------------------------------------------

    def _done(self) -> list[_TaskState]:
        return [self._tasks[tid] for tid in self._order if self._tasks[tid].status == "done"]

    @staticmethod
    def _item_text(task: _TaskState, label: dict) -> str:
        pair = task.pairs[label["pair_index"]]
        ref = " ".join(pair.ref_words) or "--"
        hyp = " ".join(pair.hyp_words) or "--"
        reason = (label.get("reason") or label.get("category", "")).replace(",", ";")
        return f"{ref} vs {hyp} ({reason})"

    def export_annotations(self, fmt: str, seed: int = 0) -> str:
        """Annotation TSV (three lists + three counts) or training-pair JSONL."""
        with self._lock:
            done = self._done()
            if not done:
                raise ValidationFailure("no completed tasks to export")
            if fmt == "appendixB":
                lines = [
                    "id\tno_penalty_errors\tmajor_errors\tminor_errors"
                    "\tno_penalty_count\tmajor_count\tminor_count"
                ]
                for task in done:
                    by_level: dict[int, list[str]] = {1: [], 2: [], 3: []}
                    for label in task.labels:
                        if label["level"] in by_level:
                            by_level[label["level"]].append(self._item_text(task, label))
                    lines.append(
                        "\t".join(
                            [
                                task.id,
                                ", ".join(by_level[1]),
                                ", ".join(by_level[3]),
                                ", ".join(by_level[2]),
                                str(len(by_level[1])),
                                str(len(by_level[3])),
                                str(len(by_level[2])),
                            ]
                        )
                    )
                return "\n".join(lines) + "\n"
            if fmt == "pairs":
                import random

                rng = random.Random(seed)
                pairs: list[TrainingPair] = []
                for task in done:
                    by_index = {label["pair_index"]: label for label in task.labels}
                    for pair in task.pairs:
                        if pair.locked:
                            label_value, category = 0, "other"
                        else:
                            label = by_index[pair.index]
                            label_value, category = label["level"], label["category"]
                        roll = rng.random()
                        split = "test" if roll < 0.1 else ("val" if roll < 0.2 else "train")
                        pairs.append(
                            TrainingPair(
                                ref_words=pair.ref_words,
                                hyp_words=pair.hyp_words,
                                label=label_value,
                                category=category,
                                sentence_id=task.id,
                                split=split,
                            )
                        )
                return training_pairs_to_jsonl(pairs)
            raise ValidationFailure(f"unknown export format {fmt!r}")

    def progress(self) -> dict:
        with self._lock:
            counts = {"pending": 0, "in-progress": 0, "done": 0}
            for task in self._tasks.values():
                counts[task.status] += 1
            return {**counts, "total": len(self._tasks)}
