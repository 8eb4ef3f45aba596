from __future__ import annotations

import sys
from typing import Any, Iterable, Sequence

from .formats import ComparisonRecord, ModelRecord, ReportFile
from .status import ROW_KEYS, CognitiveStatus, ConditionalStatusTable, StatusDistribution, argmax_status, row_label

STATUS_LABELS = {
    CognitiveStatus.IN_FOCUS: "InFocus",
    CognitiveStatus.ACTIVATED: "Activated",
    CognitiveStatus.FAMILIAR: "Familiar",
}


def _summary_lines(summary: dict[str, Any]) -> list[str]:
    keys_order = ["prior", "mode", "alpha", "fsm_decay", "seed", "models", "score_tied_gold", "exact_mcnemar"]
    lines: list[str] = []
    for k in keys_order:
        if k in summary:
            lines.append(f"{k}: {_fmt_value(summary.get(k))}")
    for k, v in summary.items():
        if k not in keys_order:
            lines.append(f"{k}: {_fmt_value(v)}")
    return lines or ["No summary."]


def _fmt_value(v: Any) -> str:
    if isinstance(v, dict):
        return ", ".join(f"{k}={_fmt_value(x)}" for k, x in v.items())
    if isinstance(v, (list, tuple)):
        return ",".join(str(x) for x in v)
    if isinstance(v, float):
        return f"{v:.4g}"
    return str(v)


def _fmt_acc(acc: float | None) -> str:
    return "-" if acc is None else f"{acc:.2f}"


def accuracy_lines(models: Sequence[ModelRecord]) -> list[str]:
    lines = ["=== Accuracy ==="]
    header = f"{'Model':<8} {'Acc %':>7} {'Correct':>8} {'Scored':>7} {'Excl':>6}"
    lines.append(header)
    lines.append("-" * len(header))
    for m in models:
        lines.append(f"{m.name:<8} {_fmt_acc(m.accuracy):>7} {m.correct:>8} {m.scored:>7} {m.excluded:>6}")
    return lines


def contingency_lines(comparisons: Sequence[ComparisonRecord]) -> list[str]:
    lines = ["=== Paired outcomes ==="]
    if not comparisons:
        lines.append("No model pairs.")
        return lines
    header = f"{'Pair':<12} {'n_ss':>6} {'n_sf':>6} {'n_fs':>6} {'n_ff':>6}"
    lines.append(header)
    lines.append("-" * len(header))
    for c in comparisons:
        pair = f"{c.model_1}/{c.model_2}"
        lines.append(f"{pair:<12} {c.n_ss:>6} {c.n_sf:>6} {c.n_fs:>6} {c.n_ff:>6}")
    return lines


def grid_lines(c: ComparisonRecord) -> list[str]:
    """One pair as a 2x2 grid: rows are the first model, columns the second."""
    a, b = c.model_1, c.model_2
    w = max(len(a), len(b)) + 9
    lines = [f"--- {a} vs {b} ---"]
    lines.append(f"{'':<{w}} {b + ' ok':>{w}} {b + ' miss':>{w}}")
    lines.append(f"{a + ' ok':<{w}} {c.n_ss:>{w}} {c.n_sf:>{w}}")
    lines.append(f"{a + ' miss':<{w}} {c.n_fs:>{w}} {c.n_ff:>{w}}")
    return lines


def mcnemar_lines(comparisons: Sequence[ComparisonRecord]) -> list[str]:
    lines = ["=== McNemar ==="]
    if not comparisons:
        lines.append("No model pairs.")
        return lines
    header = f"{'Pair':<12} {'chi2':>9} {'p':>9}"
    lines.append(header)
    lines.append("-" * len(header))
    for c in comparisons:
        pair = f"{c.model_1}/{c.model_2}"
        note = ""
        if c.no_discordant:
            note = "  (no discordant pairs)"
        elif c.exact:
            note = "  (exact)"
        lines.append(f"{pair:<12} {c.chi2:>9.3f} {c.p_display:>9}{note}")
    return lines


def comparison_lines(comparisons: Sequence[ComparisonRecord]) -> list[str]:
    lines = contingency_lines(comparisons)
    for c in comparisons:
        lines.append("")
        lines.extend(grid_lines(c))
    lines.append("")
    lines.extend(mcnemar_lines(comparisons))
    return lines


def evaluation_lines(report: ReportFile) -> list[str]:
    g = report.gold
    lines: list[str] = ["=== Run Summary ==="]
    lines.extend(_summary_lines(report.config))
    lines.append(
        f"gold: {g.labelled}/{g.cells} cells labelled, {g.tied_cells} tied, "
        f"{g.dropped_failed_checks} failed checks dropped, {g.q1_outside_q2} q1 outside q2"
    )
    lines.append("")
    lines.extend(accuracy_lines(report.models))
    lines.append("")
    lines.extend(comparison_lines(report.comparisons))
    return lines


def table_lines(t: ConditionalStatusTable) -> list[str]:
    """Trained rows with their sums, so a broken normalization is visible at a glance."""
    lines = ["=== Conditional status table ==="]
    header = f"{'Row':<6} {'p(I)':>8} {'p(A)':>8} {'p(F)':>8} {'Sum':>10} {'n':>6}"
    lines.append(header)
    lines.append("-" * len(header))
    sums = t.row_sums()
    for i, key in enumerate(ROW_KEYS):
        p_i, p_a, p_f = (float(x) for x in t.probabilities[i])
        n = "-" if t.counts is None else str(int(t.counts[i].sum()))
        flag = "  fallback" if key in t.fallback_rows else ""
        lines.append(f"{row_label(key):<6} {p_i:>8.4f} {p_a:>8.4f} {p_f:>8.4f} {float(sums[i]):>10.8f} {n:>6}{flag}")
    return lines


def belief_line(t: int, belief: StatusDistribution) -> str:
    p_i, p_a, p_f = belief.as_tuple()
    return f"t={t:<3} I={p_i:.4f} A={p_a:.4f} F={p_f:.4f}  {STATUS_LABELS[argmax_status(belief)]}"


def belief_lines(beliefs: Iterable[tuple[int, StatusDistribution]]) -> list[str]:
    return [belief_line(t, b) for t, b in beliefs]


def print_lines(lines: Iterable[str]) -> None:
    for line in lines:
        print(line)


def print_text(text: str) -> None:
    sys.stdout.write(text)
