"""Strict word-level scoring: tokenization, multiset word matching,
micro-averaged aggregation and Table-style comparison reports.

Matching is bag-of-words: tp = sum over words of min(generated count,
expected count); extra generated words are false positives, missing
expected words are false negatives. Degenerate denominators score 0.
"""

from __future__ import annotations

import json
import string
from collections import Counter
from dataclasses import dataclass

from .errors import AlignmentError, EmptyEvaluation

ATTRIBUTES = ("wind", "sea_state", "weather", "visibility")


@dataclass(frozen=True)
class WordScore:
    tp: int = 0
    fp: int = 0
    fn: int = 0

    def __post_init__(self):
        if min(self.tp, self.fp, self.fn) < 0:
            raise ValueError("word counts must be non-negative")

    @property
    def precision(self) -> float:
        return self.tp / (self.tp + self.fp) if self.tp + self.fp else 0.0

    @property
    def recall(self) -> float:
        return self.tp / (self.tp + self.fn) if self.tp + self.fn else 0.0

    @property
    def f1(self) -> float:
        p, r = self.precision, self.recall
        return 2 * p * r / (p + r) if p + r else 0.0

    def __add__(self, other: "WordScore") -> "WordScore":
        return WordScore(self.tp + other.tp, self.fp + other.fp,
                         self.fn + other.fn)


def tokenize(text: str) -> list[str]:
    """Lowercase whitespace tokens with edge punctuation stripped; numerals
    and hyphenated compounds survive as single tokens."""
    out = []
    for raw in text.lower().split():
        token = raw.strip(string.punctuation)
        if token:
            out.append(token)
    return out


def word_score(generated: str, expected: str) -> WordScore:
    """Multiset word overlap between a generated and an expected text."""
    gen = Counter(tokenize(generated))
    exp = Counter(tokenize(expected))
    tp = sum((gen & exp).values())
    return WordScore(tp=tp, fp=gen.total() - tp, fn=exp.total() - tp)


def micro_average(scores: list[WordScore]) -> WordScore:
    """Pool tp/fp/fn counts; P/R/F1 derive from the pooled totals."""
    if not scores:
        raise EmptyEvaluation("no scores to aggregate")
    total = WordScore()
    for s in scores:
        total = total + s
    return total


@dataclass
class EvalReport:
    systems: list[str]
    rows: dict                       # (attribute, system) -> WordScore
    aggregate: dict                  # system -> pooled WordScore
    excluded_count: int

    def average_f1(self, system: str) -> float:
        """Mean of the per-attribute F1 scores (the headline table row)."""
        per_attr = [self.rows[(a, system)].f1 for a in ATTRIBUTES
                    if (a, system) in self.rows]
        return sum(per_attr) / len(per_attr) if per_attr else 0.0


def _key_of(record: dict) -> tuple:
    k = record["key"]
    return (k["area"], k["attribute"], k["issue_time"])


def evaluate_systems(fragments: list[dict], outputs: dict[str, list[dict]]
                     ) -> EvalReport:
    """Score one or more systems against segmented expected fragments.

    fragments: records {key: {area, attribute, issue_time}, text, excluded?}.
    outputs: per-system generated records with matching keys. Multi-area
    (excluded) fragments are skipped and counted; any key present on one
    side only raises AlignmentError.
    """
    expected = {}
    excluded_count = 0
    for rec in fragments:
        if rec.get("excluded"):
            excluded_count += 1
            continue
        expected[_key_of(rec)] = rec["text"]

    rows: dict = {}
    aggregate: dict = {}
    for system, records in outputs.items():
        got = {_key_of(r): r["text"] for r in records}
        orphans = sorted(set(expected) ^ set(got))
        if orphans:
            raise AlignmentError(orphans,
                                 f"system {system!r}: {len(orphans)} unaligned keys")
        per_attr: dict[str, list[WordScore]] = {a: [] for a in ATTRIBUTES}
        for key, exp_text in expected.items():
            attribute = key[1]
            per_attr.setdefault(attribute, []).append(
                word_score(got[key], exp_text))
        all_scores = []
        for attribute, scores in per_attr.items():
            if scores:
                rows[(attribute, system)] = micro_average(scores)
                all_scores.extend(scores)
        aggregate[system] = micro_average(all_scores) if all_scores else WordScore()
    return EvalReport(systems=list(outputs), rows=rows, aggregate=aggregate,
                      excluded_count=excluded_count)


# --- report rendering --------------------------------------------------------

def _pct(x: float) -> str:
    return f"{100 * x:.1f}%"


def render_report_text(report: EvalReport) -> str:
    """Aligned comparison table: attribute x metric x systems, an Average F1
    row, and a Difference column when exactly two systems are compared."""
    systems = report.systems
    diff = len(systems) == 2
    header = ["Attribute", "Word Metric", *systems]
    if diff:
        header.append("Difference")
    lines = []

    def metric_cells(getter):
        vals = [getter(s) for s in systems]
        cells = [_pct(v) for v in vals]
        if diff:
            cells.append(f"{100 * (vals[0] - vals[1]):+.1f}%")
        return cells

    table = [header]
    for attribute in ATTRIBUTES:
        if not any((attribute, s) in report.rows for s in systems):
            continue
        for metric, getter in (("Precision", lambda s: report.rows[(attribute, s)].precision),
                               ("Recall", lambda s: report.rows[(attribute, s)].recall),
                               ("F1", lambda s: report.rows[(attribute, s)].f1)):
            label = attribute.replace("_", " ").title()
            table.append([label if metric == "Precision" else "", metric,
                          *metric_cells(getter)])
    table.append(["Average", "F1", *metric_cells(report.average_f1)])

    widths = [max(len(row[i]) for row in table) for i in range(len(header))]
    for row in table:
        lines.append("  ".join(cell.ljust(w) for cell, w in zip(row, widths)).rstrip())
    lines.append("")
    lines.append(f"excluded multi-area fragments: {report.excluded_count}")
    return "\n".join(lines) + "\n"


def report_to_dict(report: EvalReport) -> dict:
    rows = []
    for (attribute, system), score in report.rows.items():
        rows.append({"attribute": attribute, "system": system,
                     "tp": score.tp, "fp": score.fp, "fn": score.fn,
                     "precision": score.precision, "recall": score.recall,
                     "f1": score.f1})
    return {
        "systems": report.systems,
        "rows": rows,
        "aggregate": {s: {"tp": a.tp, "fp": a.fp, "fn": a.fn,
                          "precision": a.precision, "recall": a.recall,
                          "f1": a.f1}
                      for s, a in report.aggregate.items()},
        "average_f1": {s: report.average_f1(s) for s in report.systems},
        "excluded_count": report.excluded_count,
    }


def report_to_json(report: EvalReport) -> str:
    return json.dumps(report_to_dict(report), indent=2)
