"""Entry sequences {a_n} and weight vectors: families, evaluation, chi.

A :class:`SequenceSpec` is an immutable description of a strictly positive
sequence.  Built-in families carry their growth class, which lets the
classification routines decide limits exactly; tables and custom callables
fall back to numeric probing.

``chi`` is the finite nonzero limit of n * a_n; the spectral theory
assumes it exists, so :func:`estimate_chi` detects (and refuses) sequences
where the probes drift instead of settling.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Callable, Sequence

import numpy as np

from .asymptotics import AsymptoticClass, INDEX, Limit, limit_class, mul
from .errors import TerraspecError

FAMILIES = (
    "cesaro_scaled",
    "p_cesaro",
    "log_reciprocal",
    "power_weight",
    "geometric",
    "constant",
    "table",
    "custom",
)

# JSON / keyword parameter names, in positional order, per family.
_PARAM_NAMES = {
    "cesaro_scaled": ("chi",),
    "p_cesaro": ("p",),
    "log_reciprocal": (),
    "power_weight": ("beta",),
    "geometric": ("ratio",),
    "constant": ("value",),
}


@dataclass(frozen=True)
class SequenceSpec:
    """Evaluable positive sequence with an optional growth class."""

    family: str
    params: tuple[float, ...] = ()
    table: tuple[float, ...] | None = None
    fn: Callable[[int], float] | None = None  # compared/hashed by identity
    asym: AsymptoticClass | None = None

    def value(self, n: int) -> float:
        """a_n for 1-based n (scalar path)."""
        return self.scaled(n, 1.0)

    def scaled(self, n: int, factor: float) -> float:
        """a_n * factor with the division done last.

        For quotient families (chi/n, 1/n**p, ...) this keeps identities
        like (chi/n) * n == chi exact in floating point.
        """
        if n < 1:
            raise TerraspecError("index-out-of-range", f"n must be >= 1, got {n}")
        fam = self.family
        if fam == "cesaro_scaled":
            return self.params[0] * factor / n
        if fam == "p_cesaro":
            return factor / float(n) ** self.params[0]
        if fam == "log_reciprocal":
            return factor / math.log(n + 1.0)
        if fam == "power_weight":
            return factor / float(n) ** self.params[0]
        if fam == "geometric":
            return self.params[0] ** n * factor
        if fam == "constant":
            return self.params[0] * factor
        if fam == "table":
            if n > len(self.table):
                raise TerraspecError(
                    "index-out-of-range", f"table has {len(self.table)} entries, asked for n={n}"
                )
            return self.table[n - 1] * factor
        return self.fn(n) * factor

    def log_value(self, n: int) -> float:
        """log a_n, computed without forming a_n (safe under under/overflow)."""
        if n < 1:
            raise TerraspecError("index-out-of-range", f"n must be >= 1, got {n}")
        fam = self.family
        if fam == "cesaro_scaled":
            return math.log(self.params[0]) - math.log(n)
        if fam in ("p_cesaro", "power_weight"):
            return -self.params[0] * math.log(n)
        if fam == "log_reciprocal":
            return -math.log(math.log(n + 1.0))
        if fam == "geometric":
            return n * math.log(self.params[0])
        if fam == "constant":
            return math.log(self.params[0])
        return math.log(self.value(n))

    def values(self, n_max: int) -> np.ndarray:
        """Array of a_1..a_{n_max}; cached, shared by scans and sections."""
        return _values_cached(self, n_max)

    def scaled_values(self, factors: np.ndarray) -> np.ndarray:
        """Elementwise a_n * factors[n-1] for n = 1..len(factors), division last."""
        factors = np.asarray(factors, dtype=float)
        n = np.arange(1, len(factors) + 1, dtype=float)
        fam = self.family
        if fam == "cesaro_scaled":
            return self.params[0] * factors / n
        if fam in ("p_cesaro", "power_weight"):
            return factors / n ** self.params[0]
        if fam == "log_reciprocal":
            return factors / np.log(n + 1.0)
        return self.values(len(factors)) * factors


@lru_cache(maxsize=128)
def _values_cached(spec: SequenceSpec, n_max: int) -> np.ndarray:
    n = np.arange(1, n_max + 1, dtype=float)
    fam = spec.family
    if fam == "cesaro_scaled":
        out = spec.params[0] / n
    elif fam in ("p_cesaro", "power_weight"):
        out = 1.0 / n ** spec.params[0]
    elif fam == "log_reciprocal":
        out = 1.0 / np.log(n + 1.0)
    elif fam == "geometric":
        # growing ratios overflow to inf at large n; that is the honest value
        with np.errstate(over="ignore"):
            out = spec.params[0] ** n
    elif fam == "constant":
        out = np.full(n_max, spec.params[0])
    elif fam == "table":
        if n_max > len(spec.table):
            raise TerraspecError(
                "index-out-of-range", f"table has {len(spec.table)} entries, asked for n={n_max}"
            )
        out = np.array(spec.table[:n_max], dtype=float)
    else:
        out = np.array([spec.fn(k) for k in range(1, n_max + 1)], dtype=float)
    out.setflags(write=False)
    return out


def make_family(
    family: str,
    *params: float,
    values: Sequence[float] | None = None,
    fn: Callable[[int], float] | None = None,
    asym: AsymptoticClass | None = None,
) -> SequenceSpec:
    """Build a SequenceSpec, auto-attaching the growth class of built-ins."""
    if family not in FAMILIES:
        raise TerraspecError("invalid-family-param", f"unknown family {family!r}")
    if family == "table":
        if values is None:
            values = params
        tab = tuple(float(v) for v in values)
        if not tab:
            raise TerraspecError("invalid-family-param", "table needs at least one value")
        if any(not (v > 0.0) for v in tab):
            raise TerraspecError("invalid-family-param", "table values must be strictly positive")
        return SequenceSpec("table", (), tab, None, asym)
    if family == "custom":
        if fn is None:
            raise TerraspecError("invalid-family-param", "custom family needs fn")
        return SequenceSpec("custom", (), None, fn, asym)
    names = _PARAM_NAMES[family]
    if len(params) != len(names):
        raise TerraspecError(
            "invalid-family-param", f"{family} takes {len(names)} parameter(s), got {len(params)}"
        )
    pars = tuple(float(p) for p in params)
    if family in ("cesaro_scaled", "geometric", "constant") and pars[0] <= 0.0:
        raise TerraspecError("invalid-family-param", f"{family} parameter must be positive, got {pars[0]}")
    if asym is None:
        asym = _builtin_class(family, pars)
    return SequenceSpec(family, pars, None, None, asym)


def _builtin_class(family: str, pars: tuple[float, ...]) -> AsymptoticClass:
    if family == "cesaro_scaled":
        return AsymptoticClass(pars[0], 1.0, -1.0, 0.0)
    if family == "p_cesaro":
        return AsymptoticClass(1.0, 1.0, -pars[0], 0.0)
    if family == "log_reciprocal":
        return AsymptoticClass(1.0, 1.0, 0.0, -1.0)
    if family == "power_weight":
        return AsymptoticClass(1.0, 1.0, -pars[0], 0.0)
    if family == "geometric":
        return AsymptoticClass(1.0, pars[0], 0.0, 0.0)
    return AsymptoticClass(pars[0], 1.0, 0.0, 0.0)  # constant


# Thin constructors; tests and scripts read better with these.
def cesaro_scaled(chi: float = 1.0) -> SequenceSpec:
    return make_family("cesaro_scaled", chi)


def p_cesaro(p: float) -> SequenceSpec:
    return make_family("p_cesaro", p)


def log_reciprocal() -> SequenceSpec:
    return make_family("log_reciprocal")


def power_weight(beta: float) -> SequenceSpec:
    return make_family("power_weight", beta)


def geometric(ratio: float) -> SequenceSpec:
    return make_family("geometric", ratio)


def constant(value: float = 1.0) -> SequenceSpec:
    return make_family("constant", value)


def table(values: Sequence[float]) -> SequenceSpec:
    return make_family("table", values=values)


def custom(fn: Callable[[int], float], asym: AsymptoticClass | None = None) -> SequenceSpec:
    return make_family("custom", fn=fn, asym=asym)


def max_index(spec: SequenceSpec) -> int | None:
    """Largest evaluable n (table length), or None when unlimited."""
    return len(spec.table) if spec.family == "table" else None


def from_json(obj: dict) -> SequenceSpec:
    """Build a spec from the {"family": ..., "params": {...}} sub-schema."""
    if not isinstance(obj, dict) or "family" not in obj:
        raise TerraspecError("invalid-family-param", f"bad sequence object: {obj!r}")
    family = obj["family"]
    params = obj.get("params", {}) or {}
    if family == "table":
        return make_family("table", values=params.get("values", ()))
    if family == "custom":
        raise TerraspecError("invalid-family-param", "custom sequences are not expressible in JSON")
    if family not in _PARAM_NAMES:
        raise TerraspecError("invalid-family-param", f"unknown family {family!r}")
    try:
        pos = tuple(float(params[name]) for name in _PARAM_NAMES[family])
    except KeyError as missing:
        raise TerraspecError("invalid-family-param", f"{family} needs parameter {missing}") from None
    return make_family(family, *pos)


def to_json(spec: SequenceSpec) -> dict:
    if spec.family == "table":
        return {"family": "table", "params": {"values": list(spec.table)}}
    if spec.family == "custom":
        raise TerraspecError("invalid-family-param", "custom sequences are not expressible in JSON")
    names = _PARAM_NAMES[spec.family]
    return {"family": spec.family, "params": dict(zip(names, spec.params))}


@dataclass(frozen=True)
class ChiEstimate:
    """chi = lim n * a_n with the residual seen over the probe window."""

    chi: float
    method: str  # "analytic" | "numeric"
    residual: float


def estimate_chi(a: SequenceSpec, window: tuple[int, int] = (16, 65536)) -> ChiEstimate:
    """Estimate chi, refusing sequences whose probes drift or vanish.

    Analytic when the attached class is C/n (chi = C, residual merely
    informational).  Otherwise dyadic probes of n * a_n across the window;
    monotone drift beyond 10% between consecutive probes raises
    ``chi-not-convergent`` and an estimate below 1e-9 raises ``chi-zero``.
    """
    n_lo, n_hi = window
    if not (1 <= n_lo < n_hi):
        raise TerraspecError("index-out-of-range", f"bad window {window}")
    from .numerics import dyadic_probes

    if a.asym is not None:
        na_class = mul(a.asym, INDEX)
        lim = limit_class(na_class)
        if lim is Limit.INFINITE:
            raise TerraspecError("chi-not-convergent", "n * a_n grows without bound (by class)")
        if lim is Limit.ZERO:
            raise TerraspecError("chi-zero", "n * a_n tends to zero (by class)")
        chi = na_class.constant
        probes = dyadic_probes(n_lo, n_hi)
        residual = max(abs(a.scaled(n, float(n)) - chi) for n in probes)
        return ChiEstimate(chi, "analytic", residual)

    probes = dyadic_probes(n_lo, n_hi)
    t = [a.scaled(n, float(n)) for n in probes]
    if len(t) >= 2:
        diffs = np.diff(t)
        rel = np.abs(diffs) / np.abs(t[:-1])
        monotone = np.all(diffs > 0) or np.all(diffs < 0)
        if monotone and np.all(rel > 0.10):
            raise TerraspecError(
                "chi-not-convergent", f"n * a_n drifts monotonically over probes {probes}"
            )
    chi = t[-1]
    if chi < 1e-9:  # sequences are positive by contract, so this also rejects junk
        raise TerraspecError("chi-zero", f"n * a_n probe {chi!r} is below 1e-9")
    residual = max(abs(v - chi) for v in t)
    return ChiEstimate(chi, "numeric", residual)


@dataclass(frozen=True)
class WeightFlags:
    bounded: bool
    strictly_positive: bool
    decreasing: bool  # non-strict: w_{n+1} <= w_n throughout the scan
    bounded_below: bool | None = None  # inf w_k > 0 (then c0(w) is plain c0); None if unknown


def verify_weight(w: SequenceSpec, n_max: int = 4096) -> WeightFlags:
    """Check the weight hypotheses: bounded, strictly positive, decreasing.

    Boundedness comes from the growth class when one is attached, else
    from the scan; monotonicity is always an adjacent-comparison scan.
    """
    if n_max < 2:
        raise TerraspecError("index-out-of-range", "n_max must be >= 2")
    vals = w.values(n_max)
    # Parametric families are positive by construction; the scan only needs
    # to reject bad tables/callables (and must not trip on float underflow
    # of, say, geometric weights at large n).
    if w.family in ("table", "custom") and np.any(vals <= 0.0):
        bad = int(np.argmax(vals <= 0.0)) + 1
        raise TerraspecError("weight-not-positive", f"w_{bad} = {vals[bad - 1]!r} <= 0")
    with np.errstate(invalid="ignore"):  # inf - inf in overflowed tails
        decreasing = bool(np.all(np.diff(vals) <= 0.0))
    bounded_below: bool | None = None
    if w.asym is not None:
        lim = limit_class(w.asym)
        bounded = lim is not Limit.INFINITE
        bounded_below = lim is Limit.FINITE_NONZERO
    else:
        from .numerics import classify_limit_trend, dyadic_probes

        probe_vals = vals[np.array(dyadic_probes(2, n_max)) - 1]
        trend = classify_limit_trend(probe_vals)
        bounded = trend is not Limit.INFINITE if trend is not None else bool(vals.max() < 1e12)
        if trend is Limit.FINITE_NONZERO:
            bounded_below = True
    return WeightFlags(bounded, True, decreasing, bounded_below)
