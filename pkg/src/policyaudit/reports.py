"""Table rendering: turn analysis results into CSV and Markdown strings.

Everything here is pure formatting. Numbers arrive already computed; this
module only decides how they print. All percent formatting goes through
one rounding rule (half up at the displayed precision, via decimal) so the
same value always renders to the same bytes, which is what makes the
golden-file tests meaningful.
"""

from __future__ import annotations

import csv
import io
from decimal import Decimal, ROUND_HALF_UP
from typing import Mapping, Optional, Sequence

from .codebook import OBLIGATION_CODES
from .stats import GROUP_ORDER
from .corpus import WINDOW_LABELS

WAVES = (WINDOW_LABELS[0], WINDOW_LABELS[1])
REPORT_LANGUAGES = ("de", "en", "fr", "it")


# -- scalar formatting -------------------------------------------------------

def fmt_pct(value: Optional[float], decimals: int = 1) -> str:
    """Half-up rounding at the displayed precision; None renders as NA."""
    if value is None:
        return "NA"
    quantum = Decimal(1).scaleb(-decimals)
    return str(Decimal(repr(float(value))).quantize(quantum, rounding=ROUND_HALF_UP))


def fmt_signed(value: Optional[float], decimals: int = 1, suffix: str = "") -> str:
    """Signed display; the sign comes from the unrounded value, so a small
    negative change prints as -0.0 rather than silently flipping to +0.0."""
    if value is None:
        return "NA"
    sign = "-" if value < 0 else "+"
    return sign + fmt_pct(abs(value), decimals) + suffix


def fmt_count(value: Optional[int]) -> str:
    return "NA" if value is None else str(int(value))


def fmt_number(value: Optional[float], decimals: int = 1) -> str:
    """Counts print bare; fractional medians keep one decimal."""
    if value is None:
        return "NA"
    if float(value).is_integer():
        return str(int(value))
    return fmt_pct(value, decimals)


# -- generic renderers ---------------------------------------------------------

def render_csv(header: Sequence[str], rows: Sequence[Sequence[str]]) -> str:
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(list(header))
    for row in rows:
        writer.writerow(list(row))
    return buffer.getvalue()


def render_markdown(header: Sequence[str], rows: Sequence[Sequence[str]]) -> str:
    lines = [
        "| " + " | ".join(header) + " |",
        "| " + " | ".join("---" for _ in header) + " |",
    ]
    for row in rows:
        lines.append("| " + " | ".join(row) + " |")
    return "\n".join(lines) + "\n"


# -- corpus summary ---------------------------------------------------------------

def summary_table(
    rows, languages: Sequence[str] = REPORT_LANGUAGES
) -> tuple[list[str], list[list[str]]]:
    """One column per (group, window) selection, metric per row."""
    header = ["metric"] + [f"{r.group} {r.window}" for r in rows]
    langs = list(languages)
    if any(r.language_shares.get("unknown", 0.0) > 0.0 for r in rows):
        langs.append("unknown")
    body = [
        ["websites"] + [fmt_count(r.websites) for r in rows],
        ["% with policy"] + [fmt_pct(r.pct_policy, 2) for r in rows],
    ]
    for lang in langs:
        body.append(
            [f"% {lang}"]
            + [fmt_pct(r.language_shares.get(lang, 0.0), 2) for r in rows]
        )
    return header, body


def word_count_table(
    medians: Mapping,
    groups: Sequence[str] = GROUP_ORDER,
    waves: Sequence[str] = WAVES,
) -> tuple[list[str], list[list[str]]]:
    """medians: (group, window) -> median word count (None when empty)."""
    wave_a, wave_b = waves
    header = ["group", f"median {wave_a}", f"median {wave_b}", "delta_words", "delta_%"]
    body = []
    for group in groups:
        m_a, m_b = medians.get((group, wave_a)), medians.get((group, wave_b))
        if m_a is None or m_b is None or m_a == 0:
            delta_w, delta_pct = None, None
        else:
            delta_w = m_b - m_a
            delta_pct = 100.0 * (m_b - m_a) / m_a
        body.append(
            [
                group,
                fmt_number(m_a),
                fmt_number(m_b),
                fmt_signed(delta_w) if delta_w is not None else "NA",
                fmt_signed(delta_pct) if delta_pct is not None else "NA",
            ]
        )
    return header, body


def mentions_table(
    counts: Mapping,
    laws: Sequence[str] = ("GDPR", "FADP"),
    groups: Sequence[str] = GROUP_ORDER,
    waves: Sequence[str] = WAVES,
) -> tuple[list[str], list[list[str]]]:
    """counts: (law, group, window) -> (mentioning policies, policies)."""
    wave_a, wave_b = waves
    header = ["law", "group", f"% {wave_a}", f"% {wave_b}", "delta_pp"]
    body = []
    for law in laws:
        for group in groups:
            k_a, n_a = counts.get((law, group, wave_a), (0, 0))
            k_b, n_b = counts.get((law, group, wave_b), (0, 0))
            pct_a = 100.0 * k_a / n_a if n_a else None
            pct_b = 100.0 * k_b / n_b if n_b else None
            delta = pct_b - pct_a if pct_a is not None and pct_b is not None else None
            body.append(
                [law, group, fmt_pct(pct_a, 2), fmt_pct(pct_b, 2), fmt_signed(delta, 2)]
            )
    return header, body


# -- compliance flow ----------------------------------------------------------------

def obligation_flow_table(
    table,
    groups: Sequence[str] = GROUP_ORDER,
    waves: Sequence[str] = WAVES,
) -> tuple[list[str], list[list[str]]]:
    """Per group: both waves plus the starred percentage-point change.

    Stars mark contrasts that survived FDR correction and exceed the
    minimum detectable effect; they are read off the test results, never
    recomputed here.
    """
    wave_a, wave_b = waves
    header = ["obligation"]
    for group in groups:
        header += [f"{group} {wave_a} %", f"{group} {wave_b} %", f"{group} delta_pp"]
    body = []
    for obligation in OBLIGATION_CODES:
        cells = [obligation]
        for group in groups:
            row = table.rows.get((group, obligation))
            if row is None or row.n_a == 0 or row.n_b == 0:
                cells += ["NA", "NA", "NA"]
                continue
            star = "*" if row.test is not None and row.test.significant else ""
            cells += [
                fmt_pct(row.pct_a),
                fmt_pct(row.pct_b),
                fmt_signed(row.delta_pp, suffix=star),
            ]
        body.append(cells)

    average = ["average"]
    totals = ["policies"]
    for group in groups:
        rows = [
            table.rows[(group, ob)]
            for ob in OBLIGATION_CODES
            if (group, ob) in table.rows
        ]
        live = [r for r in rows if r.n_a > 0 and r.n_b > 0]
        if live:
            mean_a = sum(r.pct_a for r in live) / len(live)
            mean_b = sum(r.pct_b for r in live) / len(live)
            average += [fmt_pct(mean_a), fmt_pct(mean_b), fmt_signed(mean_b - mean_a)]
        else:
            average += ["NA", "NA", "NA"]
        group_totals = table.totals.get(group, {})
        totals += [
            fmt_count(group_totals.get(wave_a, 0)),
            fmt_count(group_totals.get(wave_b, 0)),
            "",
        ]
    body.append(average)
    body.append(totals)
    return header, body


def stratified_table(blocks) -> tuple[list[str], list[list[str]]]:
    """Obligation compliance across independent stratifications, side by side.

    blocks: sequence of (title, cells, totals, strata, with_delta) where
    cells[stratum][obligation] = (successes, n). A two-stratum block with
    with_delta=True gets a percentage-point change column (second minus
    first).
    """
    header = ["obligation"]
    for title, _cells, _totals, strata, with_delta in blocks:
        header += [f"{title} {stratum} %" for stratum in strata]
        if with_delta:
            header.append(f"{title} delta_pp")

    def pct(cells, stratum, obligation) -> Optional[float]:
        pair = cells.get(stratum, {}).get(obligation)
        if pair is None or pair[1] == 0:
            return None
        return 100.0 * pair[0] / pair[1]

    body = []
    for obligation in OBLIGATION_CODES:
        row = [obligation]
        for _title, cells, _totals, strata, with_delta in blocks:
            values = [pct(cells, stratum, obligation) for stratum in strata]
            row += [fmt_pct(v) for v in values]
            if with_delta:
                if None in values:
                    row.append("NA")
                else:
                    row.append(fmt_signed(values[1] - values[0]))
        body.append(row)

    average = ["average"]
    totals_row = ["policies"]
    for _title, cells, totals, strata, with_delta in blocks:
        means = []
        for stratum in strata:
            values = [pct(cells, stratum, ob) for ob in OBLIGATION_CODES]
            live = [v for v in values if v is not None]
            means.append(sum(live) / len(live) if live else None)
            totals_row.append(fmt_count(totals.get(stratum, 0)))
        average += [fmt_pct(m) for m in means]
        if with_delta:
            if None in means:
                average.append("NA")
            else:
                average.append(fmt_signed(means[1] - means[0]))
            totals_row.append("")
    body.append(average)
    body.append(totals_row)
    return header, body


# -- generators ------------------------------------------------------------------

def prevalence_rows(table) -> tuple[list[str], list[list[str]]]:
    columns = [(g, w) for g in table.groups for w in table.waves]
    header = (
        ["generator", "country"]
        + [f"{g} {w}" for g, w in columns]
        + ["total"]
    )
    body = []
    for generator_id, display, country, counts, total in table.rows:
        body.append(
            [display, country]
            + [fmt_count(counts.get(col, 0)) for col in columns]
            + [fmt_count(total)]
        )
    with_any = [table.with_generator.get(col, 0) for col in columns]
    body.append(
        [">=1 generator", ""] + [fmt_count(v) for v in with_any] + [fmt_count(sum(with_any))]
    )
    policy_counts = [table.policy_totals.get(col, 0) for col in columns]
    shares = [
        fmt_pct(100.0 * v / n) if n else "NA" for v, n in zip(with_any, policy_counts)
    ]
    overall_n = sum(policy_counts)
    overall = fmt_pct(100.0 * sum(with_any) / overall_n) if overall_n else "NA"
    body.append(["% of policies", ""] + shares + [overall])
    return header, body


def use_compliance_rows(table) -> tuple[list[str], list[list[str]]]:
    header = ["obligation", "without %", "with %", "delta_pp"]
    body = []
    sums = {"no": [], "yes": []}
    for obligation in OBLIGATION_CODES:
        cell = table.cells[obligation]
        pcts = {}
        for key in ("no", "yes"):
            successes, n = cell[key]
            pcts[key] = 100.0 * successes / n if n else None
            if pcts[key] is not None:
                sums[key].append(pcts[key])
        delta = (
            pcts["yes"] - pcts["no"]
            if pcts["no"] is not None and pcts["yes"] is not None
            else None
        )
        body.append(
            [obligation, fmt_pct(pcts["no"]), fmt_pct(pcts["yes"]), fmt_signed(delta)]
        )
    mean_no = sum(sums["no"]) / len(sums["no"]) if sums["no"] else None
    mean_yes = sum(sums["yes"]) / len(sums["yes"]) if sums["yes"] else None
    delta = mean_yes - mean_no if mean_no is not None and mean_yes is not None else None
    body.append(["average", fmt_pct(mean_no), fmt_pct(mean_yes), fmt_signed(delta)])
    body.append(
        [
            "policies",
            fmt_count(table.totals.get("no", 0)),
            fmt_count(table.totals.get("yes", 0)),
            "",
        ]
    )
    return header, body


def generator_compliance_rows(rows) -> tuple[list[str], list[list[str]]]:
    header = (
        ["generator", "country"]
        + [f"{ob} %" for ob in OBLIGATION_CODES]
        + ["average %", "policies", "market_share %"]
    )
    body = []
    for row in rows:
        body.append(
            [row.display_name, row.country]
            + [fmt_pct(row.obligation_pct.get(ob)) for ob in OBLIGATION_CODES]
            + [
                fmt_pct(row.average_pct),
                fmt_count(row.policies),
                fmt_pct(row.market_share_pct),
            ]
        )
    return header, body


def candidate_rows(candidates) -> tuple[list[str], list[list[str]]]:
    header = ["name", "frequency", "examples"]
    body = [
        [c.raw_string, fmt_count(c.frequency), "; ".join(c.example_doc_ids)]
        for c in candidates
    ]
    return header, body


# -- evaluation -------------------------------------------------------------------

def metric_report_rows(report) -> tuple[list[str], list[list[str]]]:
    header = ["dimension", "language", "precision", "recall", "f1", "support"]
    body = []
    for (dimension, language), cell in sorted(report.cells.items()):
        body.append(
            [
                dimension,
                language,
                fmt_pct(100.0 * cell.precision if cell.precision is not None else None),
                fmt_pct(100.0 * cell.recall if cell.recall is not None else None),
                fmt_pct(100.0 * cell.f1 if cell.f1 is not None else None),
                fmt_count(cell.support_pos),
            ]
        )
    return header, body


def delta_f1_rows(deltas: Mapping) -> tuple[list[str], list[list[str]]]:
    header = ["dimension", "language", "delta_f1_pp", "support"]
    body = []
    for (dimension, language), info in sorted(deltas.items()):
        delta = info["delta"]
        body.append(
            [
                dimension,
                language,
                fmt_signed(100.0 * delta) if delta is not None else "NA",
                fmt_count(info["support"]),
            ]
        )
    return header, body


def agreement_rows(alphas: Mapping) -> tuple[list[str], list[list[str]]]:
    """alphas: dimension -> float alpha or None (degenerate slice)."""
    header = ["dimension", "alpha"]
    body = []
    for dimension, alpha in alphas.items():
        body.append(
            [dimension, "NA" if alpha is None else fmt_pct(alpha, 4)]
        )
    return header, body
