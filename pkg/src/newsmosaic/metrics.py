"""Evaluation arithmetic over rater labels for detected events and galleries."""
from __future__ import annotations

import json
from dataclasses import dataclass
from importlib import resources
from pathlib import Path

BUNDLED_LABELS = "eval_labels.jsonl"


class UndefinedMetricError(ZeroDivisionError):
    def __init__(self, metric: str):
        super().__init__(f"metric {metric!r} is undefined for these labels")
        self.metric = metric


@dataclass(frozen=True)
class EvalLabel:
    """One rater verdict row.

    A row with a ``gallery_id`` rates a single gallery; a row without one but
    with a verdict rates the whole event; a bare row merely registers the
    event and whether it belongs to the monitored domain.
    """

    event_id: str
    domain_related: bool
    gallery_relevant: bool | None = None
    gallery_id: str | None = None


@dataclass(frozen=True)
class MetricsReport:
    recall: float
    absolute_precision: float
    relative_precision: float


def load_labels(path: Path | str) -> list[EvalLabel]:
    """Read labels from a JSON-lines file."""
    labels = []
    with open(path, encoding="utf-8") as fh:
        for raw in fh:
            line = raw.strip()
            if not line:
                continue
            record = json.loads(line)
            labels.append(
                EvalLabel(
                    event_id=record["event_id"],
                    domain_related=record["domain_related"],
                    gallery_relevant=record.get("gallery_relevant"),
                    gallery_id=record.get("gallery_id"),
                )
            )
    return labels


def bundled_labels() -> list[EvalLabel]:
    """The label set shipped with the package (a 48-hour case-study tally)."""
    source = resources.files("newsmosaic.data").joinpath(BUNDLED_LABELS)
    with resources.as_file(source) as path:
        return load_labels(path)


def compute_metrics(labels: list[EvalLabel]) -> MetricsReport:
    """Recall and the two precision figures from a flat label list.

    recall            illustrated domain events over all domain events
    absolute          relevant gallery ratings over all gallery ratings
    relative          relevant event verdicts over illustrated events
    """
    if not labels:
        raise ValueError("labels must be non-empty")

    domain_by_event: dict[str, bool] = {}
    illustrated: set[str] = set()
    gallery_rated = 0
    gallery_relevant = 0
    event_verdicts: dict[str, bool] = {}

    for label in labels:
        known = domain_by_event.setdefault(label.event_id, label.domain_related)
        if known != label.domain_related:
            raise ValueError(f"conflicting domain flags for event {label.event_id}")
        if label.gallery_relevant is None:
            continue
        illustrated.add(label.event_id)
        if label.gallery_id is not None:
            gallery_rated += 1
            gallery_relevant += int(label.gallery_relevant)
        else:
            if label.event_id in event_verdicts:
                raise ValueError(f"duplicate event verdict for {label.event_id}")
            event_verdicts[label.event_id] = label.gallery_relevant

    domain_events = [e for e, related in domain_by_event.items() if related]
    if not domain_events:
        raise UndefinedMetricError("recall")
    if gallery_rated == 0:
        raise UndefinedMetricError("absolutePrecision")
    if not illustrated:
        raise UndefinedMetricError("relativePrecision")

    recall = sum(1 for e in domain_events if e in illustrated) / len(domain_events)
    absolute = gallery_relevant / gallery_rated
    relative = sum(event_verdicts.values()) / len(illustrated)
    return MetricsReport(recall, absolute, relative)
