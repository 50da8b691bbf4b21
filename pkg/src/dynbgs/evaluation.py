"""CDnet-style scoring: precision, FPR and FNR.

Ground-truth labels: 0 static, 50 hard shadow (scored as negative),
85 outside ROI and 170 unknown (both skipped), 255 motion.
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass
from statistics import mean
from typing import Dict, Iterable, List, Optional

import numpy as np

CSV_COLUMNS = ("sequence", "category", "tp", "fp", "tn", "fn", "precision", "fpr", "fnr")


@dataclass
class Confusion:
    tp: int = 0
    fp: int = 0
    tn: int = 0
    fn: int = 0

    @property
    def total(self) -> int:
        return self.tp + self.fp + self.tn + self.fn

    def __add__(self, other: "Confusion") -> "Confusion":
        return Confusion(self.tp + other.tp, self.fp + other.fp,
                         self.tn + other.tn, self.fn + other.fn)


def accumulate(conf: Confusion, result, gt, roi=None, in_temporal_window: bool = True) -> Confusion:
    if not in_temporal_window:
        return conf
    result = np.asarray(result)
    gt = np.asarray(gt)
    if result.shape != gt.shape or (roi is not None and np.shape(roi) != gt.shape):
        raise ValueError("result, ground truth and ROI must share geometry")
    valid = (gt != 85) & (gt != 170)
    if roi is not None:
        valid &= np.asarray(roi) != 0
    pred = result == 255
    truth = gt == 255
    conf.tp += int(np.count_nonzero(valid & pred & truth))
    conf.fp += int(np.count_nonzero(valid & pred & ~truth))
    conf.tn += int(np.count_nonzero(valid & ~pred & ~truth))
    conf.fn += int(np.count_nonzero(valid & ~pred & truth))
    return conf


def _ratio(num: int, den: int) -> Optional[float]:
    return num / den if den else None


@dataclass
class MetricsRow:
    sequence: str
    category: str
    confusion: Confusion
    precision: Optional[float]
    fpr: Optional[float]
    fnr: Optional[float]

    @property
    def recall(self) -> Optional[float]:
        return None if self.fnr is None else 1.0 - self.fnr


def metrics(conf: Confusion, sequence: str = "", category: str = "") -> MetricsRow:
    return MetricsRow(
        sequence=sequence,
        category=category,
        confusion=conf,
        precision=_ratio(conf.tp, conf.tp + conf.fp),
        fpr=_ratio(conf.fp, conf.fp + conf.tn),
        fnr=_ratio(conf.fn, conf.tp + conf.fn),
    )


@dataclass
class Aggregate:
    categories: Dict[str, Dict[str, Optional[float]]]
    overall: Dict[str, Optional[float]]


def _mean_defined(values: Iterable[Optional[float]]) -> Optional[float]:
    defined = [v for v in values if v is not None and not math.isnan(v)]
    return mean(defined) if defined else None


def aggregate(rows: List[MetricsRow]) -> Aggregate:
    """Mean per category, then the mean of the category means."""
    if not rows:
        raise ValueError("cannot aggregate an empty list of rows")
    by_cat: Dict[str, List[MetricsRow]] = {}
    for row in rows:
        by_cat.setdefault(row.category, []).append(row)
    cats = {
        name: {k: _mean_defined(getattr(r, k) for r in members) for k in ("precision", "fpr", "fnr")}
        for name, members in by_cat.items()
    }
    overall = {k: _mean_defined(c[k] for c in cats.values()) for k in ("precision", "fpr", "fnr")}
    return Aggregate(categories=cats, overall=overall)


def _fmt(v: Optional[float]) -> str:
    return "" if v is None else f"{v:.6f}"


def to_csv(rows: List[MetricsRow]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(CSV_COLUMNS)
    for r in rows:
        c = r.confusion
        writer.writerow([r.sequence, r.category, c.tp, c.fp, c.tn, c.fn,
                         _fmt(r.precision), _fmt(r.fpr), _fmt(r.fnr)])
    return buf.getvalue()


def format_table(rows: List[MetricsRow], agg: Optional[Aggregate] = None) -> str:
    def cell(v):
        return "    -   " if v is None else f"{v:8.4f}"

    lines = [f"{'sequence':<24} {'category':<20} {'precision':>9} {'FPR':>8} {'FNR':>8}"]
    for r in rows:
        lines.append(f"{r.sequence:<24} {r.category:<20} {cell(r.precision):>9} {cell(r.fpr)} {cell(r.fnr)}")
    if agg is not None and (len(rows) > 1):
        lines.append("")
        for name, m in agg.categories.items():
            lines.append(f"{'[category]':<24} {name:<20} {cell(m['precision']):>9} {cell(m['fpr'])} {cell(m['fnr'])}")
        o = agg.overall
        lines.append(f"{'[overall]':<24} {'':<20} {cell(o['precision']):>9} {cell(o['fpr'])} {cell(o['fnr'])}")
    return "\n".join(lines)
