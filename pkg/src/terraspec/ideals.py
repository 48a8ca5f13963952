"""s-number sequences, the averaged quasi-norm, and ideal preconditions.

An operator belongs to the weighted-average class when

    a_i * (s_1(phi) + ... + s_i(phi)) * r_i  ->  0,

and the class carries the quasi-norm

    Q(phi) = sup_i | a_i * sum_{j<=i} s_j(phi) | * r_i,

which dominates the operator norm once sup_i a_i r_i = 1 and satisfies a
triangle inequality with constant 2.  s-numbers are realized as singular
values of the weight-conjugated finite section: that proxy satisfies the
s-number axioms in the Hilbert setting and is computable; sup-norm
approximation numbers differ by constants, so ``source`` stays explicit
and user-supplied values can be substituted.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np

from .asymptotics import AsymptoticClass, Limit, Verdict, limit_class, mul, partial_sum
from .errors import TerraspecError
from .numerics import TriState, classify_limit_trend, dyadic_probes, exact_prefix_sums
from .sequences import SequenceSpec
from .terraced import FiniteSection, conjugate_section

DENSE_CAP = 512

#: absolute slack for the finite-trial inequality checks
AXIOM_TOL = 1e-9


@dataclass(frozen=True)
class SNumberSequence:
    """Non-increasing, non-negative s-number data s_1 >= s_2 >= ... >= 0."""

    values: tuple[float, ...]
    source: str  # "svd_of_section" | "synthetic" | "user"
    asym: AsymptoticClass | None = None

    def __post_init__(self):
        v = self.values
        if any(x < 0.0 for x in v) or any(v[i] < v[i + 1] for i in range(len(v) - 1)):
            raise TerraspecError("snumbers-not-monotone", "values must be non-increasing and >= 0")

    def scale(self, c: float) -> "SNumberSequence":
        if c < 0.0:
            raise TerraspecError("snumbers-not-monotone", "scale factor must be >= 0")
        return SNumberSequence(tuple(c * x for x in self.values), self.source, None)


def snumbers_from_section(sec: FiniteSection, r: SequenceSpec, s: SequenceSpec) -> SNumberSequence:
    """Singular values of the weight-conjugated section, largest first."""
    if sec.n > DENSE_CAP:
        raise TerraspecError("section-too-large", f"dense SVD capped at {DENSE_CAP}, got {sec.n}")
    conj = conjugate_section(sec, r, s)
    sv = np.linalg.svd(conj.entries, compute_uv=False)
    return SNumberSequence(tuple(float(x) for x in sv), "svd_of_section")


def _weighted_averages(snum: SNumberSequence, a: SequenceSpec, r: SequenceSpec) -> np.ndarray:
    """t_i = |a_i * prefix_i| * r_i over the available indices."""
    prefix = exact_prefix_sums(snum.values)
    n = len(prefix)
    scaled = np.abs(a.scaled_values(prefix))
    return scaled * r.values(n)


def stype_membership(snum: SNumberSequence, a: SequenceSpec, r: SequenceSpec) -> TriState:
    """Does a_i * (s_1 + ... + s_i) * r_i tend to 0.

    Analytic when the s-sequence carries a growth class (partial sums by
    class algebra); a finite-rank sequence reduces to lim a_i r_i = 0;
    otherwise a dyadic drift probe over the available prefix.
    """
    if snum.asym is not None and a.asym is not None and r.asym is not None:
        sum_cls = partial_sum(snum.asym)
        if sum_cls.verdict is not Verdict.UNDECIDED_BOUNDARY:
            growth = sum_cls.growth if sum_cls.verdict is Verdict.DIVERGENT else AsymptoticClass(1.0, 1.0)
            lim = limit_class(mul(mul(a.asym, growth), r.asym))
            return TriState.YES if lim is Limit.ZERO else TriState.NO
    v = snum.values
    if a.asym is not None and r.asym is not None and v and (len(v) == 1 or v[-1] <= 1e-14 * max(v[0], 1e-300)):
        # effectively finite rank: prefix sums are eventually constant
        lim = limit_class(mul(a.asym, r.asym))
        return TriState.YES if lim is Limit.ZERO else TriState.NO
    if not v:
        return TriState.YES
    t = _weighted_averages(snum, a, r)
    probes = np.array(dyadic_probes(1, len(t))) - 1
    trend = classify_limit_trend(t[probes])
    if trend is Limit.ZERO:
        return TriState.YES
    if trend in (Limit.FINITE_NONZERO, Limit.INFINITE):
        return TriState.NO
    return TriState.INCONCLUSIVE


@dataclass(frozen=True)
class QuasiNormResult:
    value: float
    argmax_index: int  # 1-based
    truncation_N: int
    tail_status: str  # "analytic_zero" | "negligible" | "dominant_possible"


def quasi_norm(snum: SNumberSequence, a: SequenceSpec, r: SequenceSpec) -> QuasiNormResult:
    """Q over the available prefix; a lower bound for the true supremum.

    ``tail_status`` records whether the prefix provably contains the sup:
    analytic_zero when the class limit vanishes and the samples decrease
    past the argmax, negligible when the trailing sample sits well below
    the max, dominant_possible otherwise.
    """
    if not snum.values:
        raise TerraspecError("snumbers-empty", "need at least one s-number")
    t = _weighted_averages(snum, a, r)
    k = int(np.argmax(t))
    value = float(t[k])
    n = len(t)
    decreasing_past = bool(np.all(np.diff(t[k:]) <= 0.0)) and k < n - 1
    status = "dominant_possible"
    if decreasing_past:
        member = stype_membership(snum, a, r)
        if member is TriState.YES:
            status = "analytic_zero"
        elif value > 0.0 and t[-1] <= 0.1 * value:
            status = "negligible"
    return QuasiNormResult(value, k + 1, n, status)


@dataclass(frozen=True)
class IdealFlags:
    ideal_ok: TriState        # lim a_n r_n = 0
    closed_ok: TriState       # lim n a_n r_n = 0
    qnorm_normalized: TriState  # sup_i a_i r_i = 1 (within 1e-9)


def _limit_flag(cls_a, cls_b, samples) -> TriState:
    if cls_a is not None and cls_b is not None:
        lim = limit_class(mul(cls_a, cls_b))
        return TriState.YES if lim is Limit.ZERO else TriState.NO
    trend = classify_limit_trend(samples)
    if trend is Limit.ZERO:
        return TriState.YES
    if trend in (Limit.FINITE_NONZERO, Limit.INFINITE):
        return TriState.NO
    return TriState.INCONCLUSIVE


def ideal_preconditions(a: SequenceSpec, r: SequenceSpec, n_max: int = 4096) -> IdealFlags:
    """The two ideal conditions plus the quasi-norm normalization."""
    probes = dyadic_probes(4, n_max)
    rv = r.values(n_max)
    prod_samples = [a.scaled(n, rv[n - 1]) for n in probes]
    nprod_samples = [a.scaled(n, n * rv[n - 1]) for n in probes]
    ideal_ok = _limit_flag(a.asym, r.asym, prod_samples)
    n_class = AsymptoticClass(1.0, 1.0, 1.0, 0.0)
    closed_ok = _limit_flag(
        mul(a.asym, n_class) if a.asym is not None else None, r.asym, nprod_samples
    )
    if a.asym is not None and r.asym is not None and limit_class(mul(a.asym, r.asym)) is Limit.INFINITE:
        normalized = TriState.NO
    else:
        sup = max(a.scaled(n, rv[n - 1]) for n in range(1, n_max + 1))
        normalized = TriState.YES if abs(sup - 1.0) <= 1e-9 else TriState.NO
    return IdealFlags(ideal_ok, closed_ok, normalized)


@dataclass(frozen=True)
class AxiomReport:
    trials: int
    dim: int
    seed: int
    normalized: TriState
    violations: dict[str, int]

    @property
    def total_violations(self) -> int:
        return sum(self.violations.values())


def check_quasinorm_axioms(
    trials: int,
    dim: int,
    a: SequenceSpec,
    r: SequenceSpec,
    seed: int = 0,
) -> AxiomReport:
    """Trial-based verification of the quasi-norm and s-number inequalities.

    Per trial, entries are uniform in [-1, 1] from a per-trial generator
    seeded (seed, trial), so serial and parallel runs agree.  Checked with
    slack 1e-9: the triangle inequality with constant 2, the operator-norm
    lower bound, the s-number Lipschitz bound, the composition bound, the
    rank cutoff, and the additive two-index inequality.
    """
    flags = ideal_preconditions(a, r)
    if flags.qnorm_normalized is not TriState.YES:
        warnings.warn("quasi-norm is only an operator-norm bound when sup a_i r_i = 1", stacklevel=2)
    counts = {
        "quasi_triangle": 0,
        "lower_bound": 0,
        "lipschitz": 0,
        "composition": 0,
        "rank": 0,
        "additive": 0,
    }

    def q_of(mat: np.ndarray) -> float:
        sv = np.linalg.svd(mat, compute_uv=False)
        snum = SNumberSequence(tuple(float(x) for x in sv), "synthetic")
        return quasi_norm(snum, a, r).value

    for trial in range(trials):
        rng = np.random.default_rng((seed, trial))
        phi = rng.uniform(-1.0, 1.0, (dim, dim))
        psi = rng.uniform(-1.0, 1.0, (dim, dim))
        zeta = rng.uniform(-1.0, 1.0, (dim, dim))
        eta = rng.uniform(-1.0, 1.0, (dim, dim))

        s_phi = np.linalg.svd(phi, compute_uv=False)
        s_psi = np.linalg.svd(psi, compute_uv=False)
        q_phi = q_of(phi)
        q_psi = q_of(psi)

        if q_of(phi + psi) > 2.0 * (q_phi + q_psi) + AXIOM_TOL:
            counts["quasi_triangle"] += 1
        if s_phi[0] > q_phi + AXIOM_TOL:
            counts["lower_bound"] += 1
        diff_norm = np.linalg.norm(phi - psi, 2)
        if np.any(np.abs(s_phi - s_psi) > diff_norm + AXIOM_TOL):
            counts["lipschitz"] += 1
        zeta_norm = np.linalg.norm(zeta, 2)
        eta_norm = np.linalg.norm(eta, 2)
        if q_of(zeta @ phi @ eta) > zeta_norm * q_phi * eta_norm + AXIOM_TOL:
            counts["composition"] += 1

        k = int(rng.integers(1, dim))
        low_rank = rng.uniform(-1.0, 1.0, (dim, k)) @ rng.uniform(-1.0, 1.0, (k, dim))
        s_low = np.linalg.svd(low_rank, compute_uv=False)
        if np.any(s_low[k:] > 1e-10 * s_low[0]):
            counts["rank"] += 1

        s_sum = np.linalg.svd(phi + psi, compute_uv=False)
        m_idx = int(rng.integers(1, dim + 1))
        n_idx = int(rng.integers(1, dim + 2 - m_idx))
        if s_sum[m_idx + n_idx - 2] > s_phi[m_idx - 1] + s_psi[n_idx - 1] + AXIOM_TOL:
            counts["additive"] += 1

    return AxiomReport(trials, dim, seed, flags.qnorm_normalized, counts)


@dataclass(frozen=True)
class InclusionReport:
    checked: int
    t_members: int
    violations: tuple[int, ...]  # indices of samples breaking the inclusion
    inconclusive: int


def inclusion_check(
    r: SequenceSpec,
    t: SequenceSpec,
    samples: list[SNumberSequence],
    a: SequenceSpec,
    n_max: int = 4096,
) -> InclusionReport:
    """r_n <= t_n makes every t-class member an r-class member."""
    rv = r.values(n_max)
    tv = t.values(n_max)
    if np.any(rv > tv):
        bad = int(np.argmax(rv > tv)) + 1
        raise TerraspecError("weights-not-ordered", f"r_{bad} > t_{bad}")
    t_members = 0
    violations = []
    inconclusive = 0
    for i, snum in enumerate(samples):
        with_t = stype_membership(snum, a, t)
        if with_t is not TriState.YES:
            continue
        t_members += 1
        with_r = stype_membership(snum, a, r)
        if with_r is TriState.NO:
            violations.append(i)
        elif with_r is TriState.INCONCLUSIVE:
            inconclusive += 1
    return InclusionReport(len(samples), t_members, tuple(violations), inconclusive)


def chi_space_membership(v, a: SequenceSpec, r: SequenceSpec, n_max: int = 4096) -> TriState:
    """Does the image sequence a_i * (v_1 + ... + v_i) * r_i tend to 0.

    ``v`` is either a finite vector (prefix sums constant past its end) or
    a SequenceSpec decided by class algebra / probing.
    """
    if isinstance(v, SequenceSpec):
        if v.asym is not None and a.asym is not None and r.asym is not None:
            sum_cls = partial_sum(v.asym)
            if sum_cls.verdict is not Verdict.UNDECIDED_BOUNDARY:
                growth = sum_cls.growth if sum_cls.verdict is Verdict.DIVERGENT else AsymptoticClass(1.0, 1.0)
                lim = limit_class(mul(mul(a.asym, growth), r.asym))
                return TriState.YES if lim is Limit.ZERO else TriState.NO
        probes = dyadic_probes(4, n_max)
        prefix = exact_prefix_sums(v.values(n_max))
        rv = r.values(n_max)
        samples = [abs(a.scaled(n, prefix[n - 1])) * rv[n - 1] for n in probes]
        trend = classify_limit_trend(samples)
    else:
        vec = np.asarray(v, dtype=complex)
        total = complex(math.fsum(vec.real), math.fsum(vec.imag))
        if total == 0:
            return TriState.YES
        return _limit_flag(
            a.asym,
            r.asym,
            [abs(a.scaled(n, abs(total))) * r.value(n) for n in dyadic_probes(4, n_max)],
        )
    if trend is Limit.ZERO:
        return TriState.YES
    if trend in (Limit.FINITE_NONZERO, Limit.INFINITE):
        return TriState.NO
    return TriState.INCONCLUSIVE
