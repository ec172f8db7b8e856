"""
Comparison table of batch runs against the optimal-mode baseline.
"""

import math
from typing import Sequence

from errors import MissingBaseline
from models import BatchReport, Mode, ReportRow

REPORT_HEADER = ["mode", "qps", "flops", "costs", "d_qps_pct", "d_flops_pct", "d_costs_pct"]


def delta_pct(value: float, baseline: float) -> float:
    """100·(value − baseline)/baseline; 0 for two zeros, ±inf against a zero baseline."""
    if baseline == 0:
        return 0.0 if value == 0 else math.copysign(math.inf, value)
    return 100.0 * (value - baseline) / baseline


def report_rows(reports: Sequence[BatchReport]) -> list[ReportRow]:
    """One row per run, baseline first; the first optimal-mode run is the baseline."""
    baseline = next((r for r in reports if r.mode is Mode.optimal), None)
    if baseline is None:
        raise MissingBaseline("no optimal-mode run among the supplied runs")
    ordered = [baseline] + [r for r in reports if r is not baseline]
    return [
        ReportRow(
            mode=r.label,
            qps=r.qps,
            flops=r.flops,
            costs=r.costs,
            d_qps_pct=delta_pct(r.qps, baseline.qps),
            d_flops_pct=delta_pct(r.flops, baseline.flops),
            d_costs_pct=delta_pct(r.costs, baseline.costs),
        )
        for r in ordered
    ]


def csv_rows(rows: Sequence[ReportRow]) -> list[list[str]]:
    return [
        [
            row.mode,
            str(row.qps),
            str(row.flops),
            f"{row.costs:.6f}",
            f"{row.d_qps_pct:.2f}",
            f"{row.d_flops_pct:.2f}",
            f"{row.d_costs_pct:.2f}",
        ]
        for row in rows
    ]


def format_table(rows: Sequence[ReportRow]) -> str:
    """Fixed-width text rendering of the CSV content."""
    cells = [REPORT_HEADER] + csv_rows(rows)
    widths = [max(len(line[i]) for line in cells) for i in range(len(REPORT_HEADER))]
    lines = []
    for line in cells:
        first = line[0].ljust(widths[0])
        rest = [value.rjust(width) for value, width in zip(line[1:], widths[1:])]
        lines.append("  ".join([first] + rest))
    return "\n".join(lines)
