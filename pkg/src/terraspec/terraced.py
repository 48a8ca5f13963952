"""Finite sections of the terraced operator and the boundedness criterion.

The operator acts on a weighted null-sequence space c0(r) into c0(s); its
matrix has row n constantly equal to a_n up to the diagonal.  Boundedness
and compactness are governed by the weighted criterion sequence

    c_n = s_n * a_n * sum_{k<=n} 1/r_k,

bounded iff {c_n} is bounded, compact iff c_n -> 0, with operator norm
sup_n c_n.  Classification is done on the growth classes when available
and falls back to dyadic sampling with an explicit inconclusive outcome.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np
from scipy.special import logsumexp

from . import asymptotics
from .asymptotics import CONSTANT_ONE, INDEX, Limit, Verdict, limit_class, mul
from .errors import TerraspecError
from .numerics import TriState, classify_limit_trend, dyadic_probes
from .sequences import SequenceSpec, verify_weight

#: largest n for which every criterion value is kept as a sample
DENSE_SAMPLE_LIMIT = 1000


@dataclass(frozen=True)
class FiniteSection:
    """N x N lower-triangular complex matrix with optional weight context.

    ``kind`` is "terraced" for row-constant sections, "resolvent"
    for explicit inverse sections, "general" otherwise.  Entries above the
    diagonal are exactly zero.
    """

    n: int
    entries: np.ndarray  # complex128, shape (n, n), read-only
    kind: str = "general"
    weights: tuple[SequenceSpec, SequenceSpec] | None = None

    def __post_init__(self):
        if self.entries.shape != (self.n, self.n):
            raise TerraspecError("dimension-mismatch", f"entries shape {self.entries.shape} != ({self.n}, {self.n})")


def _freeze(mat: np.ndarray) -> np.ndarray:
    mat.setflags(write=False)
    return mat


def build_section(a: SequenceSpec, n: int) -> FiniteSection:
    """Leading n x n section: entry (i, k) = a_i for k <= i, else 0."""
    if n < 1:
        raise TerraspecError("index-out-of-range", f"section dimension must be >= 1, got {n}")
    vals = a.values(n)
    mat = np.tril(np.repeat(vals[:, None], n, axis=1)).astype(complex)
    return FiniteSection(n, _freeze(mat), "terraced")


def apply(sec: FiniteSection, x) -> np.ndarray:
    """y_i = sum_{k<=i} entries(i,k) * x_k."""
    x = np.asarray(x, dtype=complex)
    if x.shape != (sec.n,):
        raise TerraspecError("dimension-mismatch", f"vector length {x.shape} != {sec.n}")
    return sec.entries @ x


def conjugate_section(sec: FiniteSection, r: SequenceSpec, s: SequenceSpec) -> FiniteSection:
    """Weight conjugation D_s A D_r^{-1}: entry (i,k) -> s_i * entry / r_k."""
    rv = r.values(sec.n)
    sv = s.values(sec.n)
    if np.any(rv <= 0.0) or np.any(sv <= 0.0):
        raise TerraspecError("weight-not-positive", "conjugation weights must be strictly positive")
    mat = (sv[:, None] * sec.entries) / rv[None, :]
    return FiniteSection(sec.n, _freeze(mat), "general", (r, s))


def _criterion_scan(a: SequenceSpec, r: SequenceSpec, s: SequenceSpec, n_max: int):
    """One pass over n = 1..n_max.

    Returns (samples, probe_values, sup_estimate, truncated).  The running
    sum of 1/r_k is Kahan-compensated and switches to log-space
    accumulation once it would leave the double range (geometric weights
    make 1/r_k grow geometrically).
    """
    rv = r.values(n_max)
    sv = s.values(n_max)
    probes = set(dyadic_probes(1, n_max))
    sample_ns: list[int] = []
    sample_cs: list[float] = []
    probe_vals: dict[int, float] = {}
    sup = 0.0
    truncated = False

    total = 0.0
    comp = 0.0
    log_mode = False
    log_total = -math.inf
    for n in range(1, n_max + 1):
        if not log_mode:
            rn = rv[n - 1]
            term = 1.0 / rn if rn > 0.0 else math.inf
            if not math.isfinite(term) or total + term > 1e300:
                log_mode = True
                log_total = math.log(total) if total > 0.0 else -math.inf
            else:
                y = term - comp
                t = total + y
                comp = (t - total) - y
                total = t
        if not log_mode:
            c = sv[n - 1] * a.scaled(n, total)
        else:
            log_total = np.logaddexp(log_total, -r.log_value(n))
            log_c = log_total + s.log_value(n) + a.log_value(n)
            if log_c > 709.0:
                truncated = True
                break
            c = math.exp(log_c)
        if c > sup:
            sup = c
        if n <= min(n_max, DENSE_SAMPLE_LIMIT) or n in probes:
            sample_ns.append(n)
            sample_cs.append(c)
        if n in probes:
            probe_vals[n] = c
    samples = list(zip(sample_ns, sample_cs))
    return samples, probe_vals, sup, truncated


def criterion_sequence(
    a: SequenceSpec, r: SequenceSpec, s: SequenceSpec, n_max: int
) -> list[tuple[int, float]]:
    """Samples (n, c_n): every n up to 10^3, dyadic n beyond."""
    if n_max < 1:
        raise TerraspecError("index-out-of-range", f"n_max must be >= 1, got {n_max}")
    samples, _, _, _ = _criterion_scan(a, r, s, n_max)
    return samples


@dataclass(frozen=True)
class BoundednessReport:
    criterion_samples: tuple[tuple[int, float], ...]
    sup_estimate: float
    bounded: TriState
    compact: TriState
    norm: float | None
    method: str  # "analytic" | "numeric"
    truncated: bool = False


def _analytic_criterion_class(a, r, s):
    """Growth class of c_n, or None when the inputs do not determine it."""
    if a.asym is None or r.asym is None or s.asym is None:
        return None
    sum_cls = asymptotics.partial_sum(asymptotics.reciprocal(r.asym))
    if sum_cls.verdict is Verdict.UNDECIDED_BOUNDARY:
        return None
    growth = sum_cls.growth if sum_cls.verdict is Verdict.DIVERGENT else CONSTANT_ONE
    return mul(mul(a.asym, s.asym), growth)


def classify_boundedness(
    a: SequenceSpec, r: SequenceSpec, s: SequenceSpec, n_max: int = 10000
) -> BoundednessReport:
    """Decide bounded / compact from the criterion sequence.

    The analytic route composes the growth classes of a, s and the partial
    sums of 1/r and reads off the limit; sampling is only a fallback and
    may return inconclusive.  The reported norm is the supremum of the
    scanned c_n, present only when bounded.
    """
    samples, probe_vals, sup, truncated = _criterion_scan(a, r, s, n_max)

    c_cls = _analytic_criterion_class(a, r, s)
    if c_cls is not None:
        lim = limit_class(c_cls)
        method = "analytic"
    elif truncated:
        lim = Limit.INFINITE
        method = "numeric"
    else:
        ns = sorted(probe_vals)
        lim = classify_limit_trend([probe_vals[n] for n in ns])
        method = "numeric"

    if lim is Limit.INFINITE:
        bounded, compact = TriState.NO, TriState.NO
    elif lim is Limit.ZERO:
        bounded, compact = TriState.YES, TriState.YES
    elif lim is Limit.FINITE_NONZERO:
        bounded, compact = TriState.YES, TriState.NO
    else:
        bounded, compact = TriState.INCONCLUSIVE, TriState.INCONCLUSIVE
    norm = sup if bounded is TriState.YES else None
    return BoundednessReport(tuple(samples), sup, bounded, compact, norm, method, truncated)


def operator_norm_bounds(
    a: SequenceSpec, s: SequenceSpec, n_max: int = 8192
) -> tuple[float, float]:
    """(sup |a_n|, sup n * |a_n|): norm bracket valid for decreasing weights."""
    flags = verify_weight(s, min(n_max, 4096))
    if not flags.decreasing:
        raise TerraspecError("weight-not-decreasing", "norm bracket needs a decreasing weight")
    if a.asym is not None and limit_class(a.asym) is Limit.INFINITE:
        lower = math.inf
    else:
        lower = float(np.max(a.values(n_max)))
    if a.asym is not None and limit_class(mul(a.asym, INDEX)) is Limit.INFINITE:
        upper = math.inf
    else:
        upper = max(a.scaled(n, float(n)) for n in range(1, min(n_max, DENSE_SAMPLE_LIMIT) + 1))
        for n in dyadic_probes(1, n_max):
            upper = max(upper, a.scaled(n, float(n)))
    return lower, upper


@dataclass(frozen=True)
class MatrixTestReport:
    verdict: str  # "pass" | "fail" | "inconclusive"
    row_samples: tuple[tuple[int, float], ...]
    column_samples: dict[int, tuple[tuple[int, float], ...]]
    sup_estimate: float


def matrix_bounded_test(
    entry_fn: Callable[[int, int], complex],
    r: SequenceSpec,
    s: SequenceSpec,
    n_max: int = 4096,
) -> MatrixTestReport:
    """Direct two-condition matrix test for a general entry function.

    Probes the weighted row sums sigma_n = s_n * sum_k |entry(n,k)| / r_k
    and the column decay s_n * entry(n,k) at dyadic n.  Pass needs the row
    sums to stabilize (or vanish) and every probed column to decay; row
    growth is a fail; anything the trend heuristic cannot call is
    inconclusive.
    """
    probes = dyadic_probes(8, n_max) if n_max >= 8 else dyadic_probes(1, n_max)
    log_rv = np.array([r.log_value(k) for k in range(1, n_max + 1)])
    sv = s.values(n_max)
    col_ks = [k for k in (1, 2, 4, 8, 16) if k <= n_max]
    rows: list[tuple[int, float]] = []
    cols: dict[int, list[tuple[int, float]]] = {k: [] for k in col_ks}
    for n in probes:
        ent = np.abs(np.array([entry_fn(n, k) for k in range(1, n + 1)]))
        # row sum in log space: |entries|/r_k spans the full double range
        # for geometric weights
        with np.errstate(divide="ignore", over="ignore"):
            log_terms = np.log(ent) - log_rv[:n]
            sigma = float(np.exp(s.log_value(n) + logsumexp(log_terms)))
        rows.append((n, sigma))
        for k in col_ks:
            if k <= n:
                cols[k].append((n, float(sv[n - 1] * ent[k - 1])))

    row_trend = classify_limit_trend([v for _, v in rows])
    col_ok = True
    col_unknown = False
    for k in col_ks:
        vals = [v for _, v in cols[k]]
        if not vals:
            continue
        trend = classify_limit_trend(vals)
        if vals[-1] <= 1e-8 or trend is Limit.ZERO:
            continue
        if trend is None:
            col_unknown = True
        else:
            col_ok = False

    if row_trend is Limit.INFINITE or not col_ok:
        verdict = "fail"
    elif row_trend is None or col_unknown:
        verdict = "inconclusive"
    else:
        verdict = "pass"
    sup = max(v for _, v in rows)
    return MatrixTestReport(verdict, tuple(rows), {k: tuple(v) for k, v in cols.items()}, sup)
