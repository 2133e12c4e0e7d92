"""Two-proportion z-tests, BH-FDR, Cohen's h, and minimum detectable effect.

Self-contained numerics: the normal CDF comes from ``math.erfc`` and the
quantile from a rational approximation polished with one Newton step, both
accurate to well below 1e-10, so no statistical library is needed. The
compliance table applies the full battery per (group, obligation) with the
FDR family being the seven obligations of one group contrast, and flags a
contrast significant only when q < alpha and the effect clears the MDE.
"""

from __future__ import annotations

import dataclasses
import math
from dataclasses import dataclass
from typing import Iterable, Mapping, Optional, Sequence

from .codebook import AnnotationRecord, OBLIGATION_CODES
from .errors import DataError

DEFAULT_ALPHA = 0.05
DEFAULT_POWER = 0.8

GROUP_ORDER = ("CH", "CH_EU", "EU")
WAVE_A = "AUG2023"
WAVE_B = "OCT2023"


# -- normal distribution ----------------------------------------------------

def normal_cdf(x: float) -> float:
    """Standard normal CDF via erfc; |error| < 1e-14."""
    return 0.5 * math.erfc(-x / math.sqrt(2.0))


def _normal_pdf(x: float) -> float:
    return math.exp(-0.5 * x * x) / math.sqrt(2.0 * math.pi)


# Rational approximation for the normal quantile (central region and tails),
# then one Newton correction against the erfc-based CDF. The raw
# approximation is good to ~1e-9; the correction takes it below 1e-13.
_Q_A = (
    -3.969683028665376e+01,
    2.209460984245205e+02,
    -2.759285104469687e+02,
    1.383577518672690e+02,
    -3.066479806614716e+01,
    2.506628277459239e+00,
)
_Q_B = (
    -5.447609879822406e+01,
    1.615858368580409e+02,
    -1.556989798598866e+02,
    6.680131188771972e+01,
    -1.328068155288572e+01,
)
_Q_C = (
    -7.784894002430293e-03,
    -3.223964580411365e-01,
    -2.400758277161838e+00,
    -2.549732539343734e+00,
    4.374664141464968e+00,
    2.938163982698783e+00,
)
_Q_D = (
    7.784695709041462e-03,
    3.224671290700398e-01,
    2.445134137142996e+00,
    3.754408661907416e+00,
)


def normal_quantile(p: float) -> float:
    """Inverse of ``normal_cdf``; |error| < 1e-10 on (0, 1)."""
    if not 0.0 < p < 1.0:
        raise ValueError("quantile defined on open interval (0, 1)")
    p_low, p_high = 0.02425, 1 - 0.02425
    if p < p_low:
        q = math.sqrt(-2.0 * math.log(p))
        x = (
            ((((_Q_C[0] * q + _Q_C[1]) * q + _Q_C[2]) * q + _Q_C[3]) * q + _Q_C[4])
            * q
            + _Q_C[5]
        ) / ((((_Q_D[0] * q + _Q_D[1]) * q + _Q_D[2]) * q + _Q_D[3]) * q + 1.0)
    elif p <= p_high:
        q = p - 0.5
        r = q * q
        x = (
            (((((_Q_A[0] * r + _Q_A[1]) * r + _Q_A[2]) * r + _Q_A[3]) * r + _Q_A[4])
             * r + _Q_A[5])
            * q
        ) / (
            ((((_Q_B[0] * r + _Q_B[1]) * r + _Q_B[2]) * r + _Q_B[3]) * r + _Q_B[4])
            * r
            + 1.0
        )
    else:
        q = math.sqrt(-2.0 * math.log(1.0 - p))
        x = -(
            ((((_Q_C[0] * q + _Q_C[1]) * q + _Q_C[2]) * q + _Q_C[3]) * q + _Q_C[4])
            * q
            + _Q_C[5]
        ) / ((((_Q_D[0] * q + _Q_D[1]) * q + _Q_D[2]) * q + _Q_D[3]) * q + 1.0)
    # Newton correction (Halley form) using the high-precision CDF.
    for _ in range(2):
        err = normal_cdf(x) - p
        pdf = _normal_pdf(x)
        if pdf == 0.0:
            break
        u = err / pdf
        x -= u / (1.0 + x * u / 2.0)
    return x


# -- core tests ---------------------------------------------------------------

@dataclass(frozen=True)
class ProportionSample:
    successes: int
    n: int

    def __post_init__(self):
        if self.n < 1:
            raise ValueError("sample size must be positive")
        if not 0 <= self.successes <= self.n:
            raise ValueError("successes must lie in [0, n]")

    @property
    def proportion(self) -> float:
        return self.successes / self.n


@dataclass(frozen=True)
class ZTestResult:
    z: float
    p_value: float
    degenerate: bool = False


def two_prop_z(a: ProportionSample, b: ProportionSample) -> ZTestResult:
    """Pooled two-proportion z-test, two-sided.

    A pooled proportion of exactly 0 or 1 leaves z undefined; by convention
    the result is flagged degenerate with p = 1.
    """
    pooled = (a.successes + b.successes) / (a.n + b.n)
    if pooled in (0.0, 1.0):
        return ZTestResult(z=math.nan, p_value=1.0, degenerate=True)
    se = math.sqrt(pooled * (1.0 - pooled) * (1.0 / a.n + 1.0 / b.n))
    z = (a.proportion - b.proportion) / se
    p_value = math.erfc(abs(z) / math.sqrt(2.0))
    return ZTestResult(z=z, p_value=p_value)


def bh_fdr(
    p_values: Sequence[float], alpha: float = DEFAULT_ALPHA
) -> tuple[list[bool], list[float]]:
    """Benjamini-Hochberg step-up: reject flags and q-values in input order."""
    m = len(p_values)
    if m == 0:
        return [], []
    for p in p_values:
        if not 0.0 <= p <= 1.0:
            raise ValueError(f"p-value {p} outside [0, 1]")
    order = sorted(range(m), key=lambda i: p_values[i])
    q_sorted = [0.0] * m
    running = 1.0
    for rank in range(m, 0, -1):
        idx = order[rank - 1]
        running = min(running, p_values[idx] * m / rank)
        q_sorted[rank - 1] = running
    cutoff = 0
    for rank in range(1, m + 1):
        if p_values[order[rank - 1]] <= rank * alpha / m:
            cutoff = rank
    reject = [False] * m
    q_values = [1.0] * m
    for rank_minus_1, idx in enumerate(order):
        q_values[idx] = q_sorted[rank_minus_1]
        reject[idx] = rank_minus_1 < cutoff
    return reject, q_values


def cohens_h(p1: float, p2: float) -> float:
    """Effect size for proportion differences: |2 asin sqrt(p1) - 2 asin sqrt(p2)|."""
    for p in (p1, p2):
        if not 0.0 <= p <= 1.0:
            raise ValueError(f"proportion {p} outside [0, 1]")
    return abs(2.0 * math.asin(math.sqrt(p1)) - 2.0 * math.asin(math.sqrt(p2)))


def mde(
    n1: int,
    n2: int,
    alpha: float = DEFAULT_ALPHA,
    power: float = DEFAULT_POWER,
    baseline: float = 0.5,
) -> tuple[float, float]:
    """Minimum detectable effect at the given power.

    Returns (mde_h, mde_pp): the smallest Cohen's h detectable with these
    sample sizes, and its percentage-point equivalent moving upward from the
    baseline proportion (inverse arcsine transform, clamped to [0, 1]).
    """
    if n1 < 2 or n2 < 2:
        raise ValueError("need n1, n2 >= 2")
    if not 0.0 < baseline < 1.0:
        raise ValueError("baseline must be strictly inside (0, 1)")
    z_alpha = normal_quantile(1.0 - alpha / 2.0)
    z_power = normal_quantile(power)
    mde_h = (z_alpha + z_power) * math.sqrt(1.0 / n1 + 1.0 / n2)
    phi = 2.0 * math.asin(math.sqrt(baseline)) + mde_h
    target = math.sin(min(max(phi / 2.0, 0.0), math.pi / 2.0)) ** 2
    return mde_h, min(max(target, 0.0), 1.0) - baseline


# -- compliance table ---------------------------------------------------------

@dataclass(frozen=True)
class TestResult:
    p1: float
    p2: float
    z: float
    p_value: float
    q_value: float
    h: float
    mde_h: float
    mde_pp: float
    significant: bool
    degenerate: bool = False


@dataclass
class ObligationRow:
    group: str
    obligation: str
    n_a: int
    n_b: int
    successes_a: int
    successes_b: int
    flag: str = ""
    test: Optional[TestResult] = None

    @property
    def pct_a(self) -> float:
        return 100.0 * self.successes_a / self.n_a if self.n_a else 0.0

    @property
    def pct_b(self) -> float:
        return 100.0 * self.successes_b / self.n_b if self.n_b else 0.0

    @property
    def delta_pp(self) -> float:
        return self.pct_b - self.pct_a


@dataclass
class ObligationTable:
    rows: dict
    totals: dict
    alpha: float
    power: float


def compliance_counts(
    records: Iterable[AnnotationRecord],
    doc_group: Mapping[str, str],
    doc_wave: Mapping[str, str],
) -> dict:
    """(group, wave) -> {n, per-obligation success counts}; ispol=true only."""
    cells: dict = {}
    for record in records:
        if not record.ispol:
            continue
        group = doc_group.get(record.doc_id)
        wave = doc_wave.get(record.doc_id)
        if group is None or wave is None:
            continue
        cell = cells.setdefault(
            (group, wave), {"n": 0, **{ob: 0 for ob in OBLIGATION_CODES}}
        )
        cell["n"] += 1
        for obligation in OBLIGATION_CODES:
            if getattr(record, obligation):
                cell[obligation] += 1
    return cells


def build_obligation_table(
    counts: Mapping,
    groups: Sequence[str] = GROUP_ORDER,
    alpha: float = DEFAULT_ALPHA,
    power: float = DEFAULT_POWER,
    wave_a: str = WAVE_A,
    wave_b: str = WAVE_B,
) -> ObligationTable:
    """Assemble the per-group obligation table from (group, wave) counts.

    FDR correction is applied within each group across its seven obligation
    tests; a contrast counts as significant only when q < alpha and
    h >= mde_h. Groups missing a wave get flagged rows and no tests.
    """
    rows: dict = {}
    totals: dict = {}
    for group in groups:
        cell_a = counts.get((group, wave_a))
        cell_b = counts.get((group, wave_b))
        n_a = cell_a["n"] if cell_a else 0
        n_b = cell_b["n"] if cell_b else 0
        totals[group] = {wave_a: n_a, wave_b: n_b}
        group_rows = []
        for obligation in OBLIGATION_CODES:
            row = ObligationRow(
                group=group,
                obligation=obligation,
                n_a=n_a,
                n_b=n_b,
                successes_a=cell_a[obligation] if cell_a else 0,
                successes_b=cell_b[obligation] if cell_b else 0,
            )
            if n_a == 0 or n_b == 0:
                row.flag = "empty-wave"
            group_rows.append(row)
            rows[(group, obligation)] = row
        testable = [r for r in group_rows if not r.flag]
        if not testable:
            continue
        z_results = [
            two_prop_z(
                ProportionSample(r.successes_a, r.n_a),
                ProportionSample(r.successes_b, r.n_b),
            )
            for r in testable
        ]
        _, q_values = bh_fdr([zr.p_value for zr in z_results], alpha=alpha)
        for row, zr, q in zip(testable, z_results, q_values):
            p1 = row.successes_a / row.n_a
            p2 = row.successes_b / row.n_b
            h = cohens_h(p1, p2)
            mde_h, mde_pp = mde(row.n_a, row.n_b, alpha, power, baseline=max(min(p1, 1 - 1e-9), 1e-9))
            significant = (q < alpha) and (h >= mde_h)
            row.test = TestResult(
                p1=p1,
                p2=p2,
                z=zr.z,
                p_value=zr.p_value,
                q_value=q,
                h=h,
                mde_h=mde_h,
                mde_pp=mde_pp,
                significant=significant,
                degenerate=zr.degenerate,
            )
            if zr.degenerate:
                row.flag = "degenerate"
    return ObligationTable(rows=rows, totals=totals, alpha=alpha, power=power)


def compliance_table(
    records: Iterable[AnnotationRecord],
    doc_group: Mapping[str, str],
    doc_wave: Mapping[str, str],
    groups: Sequence[str] = GROUP_ORDER,
    alpha: float = DEFAULT_ALPHA,
    power: float = DEFAULT_POWER,
) -> ObligationTable:
    """Full battery over normalized annotations joined to cohort and wave."""
    counts = compliance_counts(records, doc_group, doc_wave)
    return build_obligation_table(
        counts, groups=groups, alpha=alpha, power=power
    )


def compliance_by_stratum(
    records: Iterable[AnnotationRecord],
    stratum_of: Mapping[str, str],
) -> tuple[dict, dict]:
    """Obligation success counts split by an arbitrary per-document label.

    Returns (cells, totals): cells[stratum][obligation] = (successes, n),
    totals[stratum] = policy count. Only ispol=true records participate;
    documents without a stratum label are skipped.
    """
    raw: dict = {}
    totals: dict = {}
    for record in records:
        if not record.ispol:
            continue
        stratum = stratum_of.get(record.doc_id)
        if stratum is None:
            continue
        cell = raw.setdefault(stratum, {ob: 0 for ob in OBLIGATION_CODES})
        totals[stratum] = totals.get(stratum, 0) + 1
        for obligation in OBLIGATION_CODES:
            if getattr(record, obligation):
                cell[obligation] += 1
    cells = {
        stratum: {
            ob: (raw[stratum][ob], totals[stratum]) for ob in OBLIGATION_CODES
        }
        for stratum in raw
    }
    return cells, totals


def obligation_table_to_dict(table: ObligationTable) -> dict:
    """JSON-safe dump of the full battery, test numbers included."""
    rows = []
    for (group, obligation), row in sorted(table.rows.items()):
        entry = {
            "group": group,
            "obligation": obligation,
            "n_a": row.n_a,
            "n_b": row.n_b,
            "successes_a": row.successes_a,
            "successes_b": row.successes_b,
            "flag": row.flag,
            "test": None,
        }
        if row.test is not None:
            entry["test"] = dataclasses.asdict(row.test)
        rows.append(entry)
    return {
        "rows": rows,
        "totals": {g: dict(t) for g, t in table.totals.items()},
        "alpha": table.alpha,
        "power": table.power,
    }


def obligation_table_from_dict(payload: dict) -> ObligationTable:
    rows = {}
    for entry in payload["rows"]:
        row = ObligationRow(
            group=entry["group"],
            obligation=entry["obligation"],
            n_a=entry["n_a"],
            n_b=entry["n_b"],
            successes_a=entry["successes_a"],
            successes_b=entry["successes_b"],
            flag=entry.get("flag", ""),
        )
        if entry.get("test"):
            row.test = TestResult(**entry["test"])
        rows[(row.group, row.obligation)] = row
    return ObligationTable(
        rows=rows,
        totals={g: dict(t) for g, t in payload["totals"].items()},
        alpha=payload["alpha"],
        power=payload["power"],
    )
