"""Write-distribution statistics and report emission.

Raw per-entry write counters become: a five-bin histogram of each entry's
write count relative to the hottest entry (r = 100*c/max, bins r <= 25,
25 < r <= 50, 50 < r <= 75, 75 < r <= 90, r > 90), the average-to-max
ratio, the hotspot lifetime improvement max_baseline/max_aware - 1, and a
ratio-space geometric mean for aggregating improvements across structures.

Bin placement compares 100*c against edge*max in exact integer arithmetic,
so a count at exactly 25% or 90% of the maximum lands deterministically on
the closed side of its boundary regardless of magnitudes.
"""

from __future__ import annotations

import csv
import json
import math
from dataclasses import dataclass
from typing import Iterable, Sequence, Union

from .em_models import UNBOUNDED, Unbounded, mtf_improvement

BIN_LABELS = ("0_25", "25_50", "50_75", "75_90", "90_100")
_BIN_UPPER = (25, 50, 75, 90)

Improvement = Union[float, Unbounded]


@dataclass(frozen=True)
class WriteHistogram:
    bins: tuple[int, int, int, int, int]
    max_writes: int
    avg_writes: float
    num_entries: int


@dataclass(frozen=True)
class StructureReport:
    structure: str
    num_entries: int
    histogram_baseline: WriteHistogram
    histogram_aware: WriteHistogram
    avg_to_max_baseline: float
    avg_to_max_aware: float
    mtf_improvement: Improvement
    counts_baseline: tuple[int, ...] | None = None
    counts_aware: tuple[int, ...] | None = None


def histogram(counts: Sequence[int]) -> WriteHistogram:
    counts = list(counts)
    if not counts:
        raise ValueError("counts must be non-empty")
    if any(c < 0 for c in counts):
        raise ValueError("counts must be non-negative")
    m = max(counts)
    bins = [0, 0, 0, 0, 0]
    if m == 0:
        bins[0] = len(counts)
    else:
        for c in counts:
            scaled = 100 * c
            for b, upper in enumerate(_BIN_UPPER):
                if scaled <= upper * m:
                    bins[b] += 1
                    break
            else:
                bins[4] += 1
    return WriteHistogram(bins=tuple(bins), max_writes=m,
                          avg_writes=sum(counts) / len(counts),
                          num_entries=len(counts))


def avg_to_max(counts: Sequence[int]) -> float:
    counts = list(counts)
    if not counts:
        raise ValueError("counts must be non-empty")
    m = max(counts)
    if m <= 0:
        raise ValueError("avg/max ratio undefined when the maximum is 0")
    return sum(counts) / len(counts) / m


def _ratio_or_zero(hist: WriteHistogram) -> float:
    if hist.max_writes == 0:
        return 0.0
    return hist.avg_writes / hist.max_writes


def improvement_from_maxima(max_baseline: int, max_aware: int) -> Improvement:
    """Hotspot lifetime improvement, with degenerate maxima handled:
    an idle aware structure against a busy baseline is unbounded, two idle
    structures are a wash (0), an idle baseline against a busy aware
    structure is total regression (-1)."""
    if max_baseline > 0 and max_aware > 0:
        return mtf_improvement(max_baseline, max_aware)
    if max_baseline > 0:
        return UNBOUNDED
    if max_aware > 0:
        return -1.0
    return 0.0


def improvement_report(baseline_counts: Sequence[int],
                       aware_counts: Sequence[int],
                       structure: str,
                       include_counts: bool = False) -> StructureReport:
    baseline_counts = tuple(baseline_counts)
    aware_counts = tuple(aware_counts)
    if len(baseline_counts) != len(aware_counts):
        raise ValueError(
            f"{structure}: baseline has {len(baseline_counts)} entries, "
            f"aware has {len(aware_counts)}; the runs must cover one structure")
    hb = histogram(baseline_counts)
    ha = histogram(aware_counts)
    return StructureReport(
        structure=structure,
        num_entries=hb.num_entries,
        histogram_baseline=hb,
        histogram_aware=ha,
        avg_to_max_baseline=_ratio_or_zero(hb),
        avg_to_max_aware=_ratio_or_zero(ha),
        mtf_improvement=improvement_from_maxima(hb.max_writes, ha.max_writes),
        counts_baseline=baseline_counts if include_counts else None,
        counts_aware=aware_counts if include_counts else None,
    )


def geo_mean(improvements: Iterable[Improvement]) -> Improvement:
    vals = list(improvements)
    if not vals:
        raise ValueError("need at least one improvement")
    if any(v is UNBOUNDED for v in vals):
        return UNBOUNDED
    if any(v <= -1.0 for v in vals):
        raise ValueError("improvements must be > -1")
    return math.exp(sum(math.log1p(v) for v in vals) / len(vals)) - 1.0


# --- report emission ----------------------------------------------------------

CSV_COLUMNS = (
    "structure", "num_entries", "max_baseline", "max_aware",
    "avg_to_max_baseline", "avg_to_max_aware",
    *(f"bin_baseline_{lbl}" for lbl in BIN_LABELS),
    *(f"bin_aware_{lbl}" for lbl in BIN_LABELS),
    "mtf_improvement", "mtf_improvement_display",
)


def _improvement_cell(value: Improvement) -> str:
    return "unbounded" if value is UNBOUNDED else repr(value)


def _improvement_display(value: Improvement) -> str:
    return "unbounded" if value is UNBOUNDED else f"{value * 100:.2f}%"


def report_rows(reports: Iterable[StructureReport]):
    for r in reports:
        yield [
            r.structure,
            str(r.num_entries),
            str(r.histogram_baseline.max_writes),
            str(r.histogram_aware.max_writes),
            repr(r.avg_to_max_baseline),
            repr(r.avg_to_max_aware),
            *(str(b) for b in r.histogram_baseline.bins),
            *(str(b) for b in r.histogram_aware.bins),
            _improvement_cell(r.mtf_improvement),
            _improvement_display(r.mtf_improvement),
        ]


def write_reports_csv(reports: Iterable[StructureReport], path) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(CSV_COLUMNS)
        writer.writerows(report_rows(reports))


def reports_to_doc(reports: Iterable[StructureReport],
                   summary: dict | None = None) -> dict:
    """JSON mirror of the CSV schema, plus raw counts where captured."""
    out = []
    for r in reports:
        entry = {
            "structure": r.structure,
            "num_entries": r.num_entries,
            "max_baseline": r.histogram_baseline.max_writes,
            "max_aware": r.histogram_aware.max_writes,
            "avg_to_max_baseline": r.avg_to_max_baseline,
            "avg_to_max_aware": r.avg_to_max_aware,
            "bins_baseline": list(r.histogram_baseline.bins),
            "bins_aware": list(r.histogram_aware.bins),
            "mtf_improvement": ("unbounded" if r.mtf_improvement is UNBOUNDED
                                else r.mtf_improvement),
        }
        if r.counts_baseline is not None:
            entry["counts_baseline"] = list(r.counts_baseline)
            entry["counts_aware"] = list(r.counts_aware)
        out.append(entry)
    doc = {"reports": out}
    if summary is not None:
        doc["summary"] = summary
    return doc


def write_reports_json(reports: Iterable[StructureReport], path,
                       summary: dict | None = None) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        json.dump(reports_to_doc(reports, summary), fh, indent=2)
        fh.write("\n")
