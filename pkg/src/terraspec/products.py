"""Stable evaluation of the products prod_k (1 - a_k / lambda).

For lambda off the diagonal set, |prod_{k=m+1}^n (1 - a_k/lambda)| decays
like n**(-alpha*chi) with alpha = Re(1/lambda); eigenvector entries and
resolvent columns inherit that rate.  The magnitudes span hundreds of
orders, so everything is accumulated as log magnitude plus argument, with
exactly-rounded (fsum) summation.  ``ratio_band`` is the numeric check of
the equivalence: it multiplies the product back by n**(alpha*chi) and
verifies the result stays in a bounded band with no log-log drift.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import TerraspecError
from .sequences import SequenceSpec

#: relative tolerance for flagging a factor as numerically near-singular
NEAR_SINGULAR_RTOL = 1e-12

#: default verdict thresholds for ratio_band
SLOPE_TOL = 0.02
BAND_TOL = 1e3


def alpha(lam: complex) -> float:
    """Re(1/lambda), the exponent driver; undefined at 0."""
    lam = complex(lam)
    if lam == 0:
        raise TerraspecError("alpha-undefined-at-zero")
    return lam.real / (lam.real**2 + lam.imag**2)


@dataclass(frozen=True)
class LogProduct:
    """prod_{k=m+1}^n (1 - a_k/lambda) in log form.

    ``argument`` is the factor-by-factor sum of principal arguments (not
    reduced mod 2*pi, so winding survives).  ``exact_zero`` marks a factor
    that vanished exactly; the log magnitude is -inf then and finite
    otherwise.
    """

    log_magnitude: float
    argument: float
    m: int
    n: int
    exact_zero: bool
    warnings: tuple[str, ...] = ()


def log_product(a: SequenceSpec, lam: complex, m: int, n: int) -> LogProduct:
    """Accumulate the tail product over k = m+1 .. n."""
    if not (0 <= m < n):
        raise TerraspecError("invalid-index-range", f"need 0 <= m < n, got m={m}, n={n}")
    lam = complex(lam)
    if lam == 0:
        raise TerraspecError("lambda-zero", "product factors are undefined at lambda = 0")
    vals = a.values(n)[m:n]
    warnings: tuple[str, ...] = ()
    close = np.abs(lam - vals) <= NEAR_SINGULAR_RTOL * np.abs(vals)
    if lam.imag == 0.0:
        f = 1.0 - vals / lam.real
        if np.any(f == 0.0):
            return LogProduct(-math.inf, 0.0, m, n, True, warnings)
        if np.any(close):
            warnings = ("near-singular-factor",)
        log_mag = math.fsum(np.log(np.abs(f)))
        arg = float(np.count_nonzero(f < 0.0)) * math.pi
        return LogProduct(log_mag, arg, m, n, False, warnings)
    f = 1.0 - vals / lam
    mags = np.abs(f)
    if np.any(mags == 0.0):
        return LogProduct(-math.inf, 0.0, m, n, True, warnings)
    if np.any(close):
        warnings = ("near-singular-factor",)
    log_mag = math.fsum(np.log(mags))
    arg = math.fsum(np.angle(f))
    return LogProduct(log_mag, arg, m, n, False, warnings)


@dataclass(frozen=True)
class BandReport:
    """Ratios P_n * n**e at dyadic n with a least-squares drift verdict."""

    ratios: tuple[tuple[int, float], ...]
    band: tuple[float, float]
    log_log_slope: float
    verdict: str  # "bounded_band" | "drifting" | "degenerate"
    exponent: float


def ratio_band(
    a: SequenceSpec,
    lam: complex,
    chi: float,
    n_range: tuple[int, int],
    *,
    exponent: float | None = None,
    slope_tol: float = SLOPE_TOL,
    band_tol: float = BAND_TOL,
) -> BandReport:
    """Check prod_{k<=n} |1 - a_k/lambda| ~ n**(-alpha*chi) over dyadic n.

    ``exponent`` overrides alpha(lam) * chi, which is how a deliberately
    wrong exponent is probed: the mismatch reappears as the log-log slope.
    """
    n_lo, n_hi = n_range
    if not (1 <= n_lo < n_hi):
        raise TerraspecError("invalid-index-range", f"bad range {n_range}")
    if not chi > 0.0:
        raise TerraspecError("invalid-chi", f"chi must be positive, got {chi}")
    lam = complex(lam)
    if lam == 0:
        raise TerraspecError("lambda-zero")
    vals = a.values(n_hi)
    if np.any(np.abs(lam - vals) <= NEAR_SINGULAR_RTOL * np.abs(vals)) or np.any(lam == vals):
        k = int(np.argmin(np.abs(lam - vals))) + 1
        raise TerraspecError("lambda-in-S", f"lambda matches a_{k}")
    e = alpha(lam) * chi if exponent is None else float(exponent)

    from .numerics import dyadic_probes

    probes = dyadic_probes(n_lo, n_hi)
    ratios: list[tuple[int, float]] = []
    log_ratios: list[float] = []
    prev = 0
    log_p = 0.0
    for n in probes:
        seg = log_product(a, lam, prev, n)
        if seg.exact_zero:
            raise TerraspecError("lambda-in-S", f"product vanished between {prev} and {n}")
        log_p += seg.log_magnitude
        prev = n
        lr = log_p + e * math.log(n)
        log_ratios.append(lr)
        ratios.append((n, math.exp(lr)))

    finite = [lr for lr in log_ratios if math.isfinite(lr)]
    if len(ratios) < 3 or len(finite) != len(log_ratios):
        return BandReport(tuple(ratios), (math.nan, math.nan), math.nan, "degenerate", e)
    log_ns = np.log([n for n, _ in ratios])
    slope = float(np.polyfit(log_ns, np.array(log_ratios), 1)[0])
    lo = math.exp(min(log_ratios))
    hi = math.exp(max(log_ratios))
    if abs(slope) < slope_tol and hi / lo < band_tol:
        verdict = "bounded_band"
    else:
        verdict = "drifting"
    return BandReport(tuple(ratios), (lo, hi), slope, verdict, e)
