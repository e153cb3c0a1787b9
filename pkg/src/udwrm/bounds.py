"""Closed-form bounds on history-conditioned excitation probabilities.

Everything here is driven by the kernel ratios gamma_ij: the correlator
evaluated at the closest approach of two interaction windows, normalized by
its value at one window duration.  Loose bounds use only the worst-case
(adjacent-window) ratio and a crossing-pairing count, so they depend on the
history length alone; tight bounds use the per-pair ratios of an explicit
history.  Both are only meaningful while the correlator magnitude decreases
with window separation, which is checked numerically.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np
from scipy.special import gammaln, logsumexp

from .combinatorics import crossing_count
from .kernel import WightmanKernel, extreme_point_value
from .schedule import RepetitionSchedule

N_LIMIT_CAP = 10_000


class HorizonExceededError(RuntimeError):
    """Requested a bound where its defining denominator is non-positive."""


class MonotonicityError(RuntimeError):
    """The correlator magnitude failed to decrease with window separation."""


@dataclass(frozen=True)
class BoundPair:
    lower: float
    upper: float
    kind: str  # "tight" | "loose"

    def __post_init__(self) -> None:
        if self.lower > self.upper:
            raise ValueError(f"lower {self.lower} exceeds upper {self.upper}")
        if self.kind not in ("tight", "loose"):
            raise ValueError(f"unknown bound kind {self.kind!r}")

    def contains(self, value: float) -> bool:
        return self.lower <= value <= self.upper


class GammaProfile:
    """Pairwise window-separation ratios gamma_ij, with gamma = gamma(adjacent).

    Built either from a kernel and schedule (ratios of correlator values at
    the windows' closest approach to the single-window value) or from a
    constant worst-case gamma.
    """

    def __init__(self, gamma: float, pair_fn=None) -> None:
        if not 0.0 < gamma < 1.0:
            raise ValueError("gamma must lie in (0, 1)")
        self._gamma = gamma
        self._pair_fn = pair_fn

    @classmethod
    def from_kernel(
        cls,
        kern: WightmanKernel,
        sched: RepetitionSchedule,
        *,
        check_separations: int = 16,
    ) -> "GammaProfile":
        reference = abs(kern.limit(sched.t_on))

        def pair(i: int, j: int) -> float:
            return abs(extreme_point_value(kern, sched, i, j)) / reference

        gamma = pair(0, 1)
        ratios = [pair(0, j) for j in range(1, check_separations + 1)]
        if any(b >= a for a, b in zip(ratios, ratios[1:])):
            raise MonotonicityError(
                "correlator magnitude does not decrease with window separation"
            )
        return cls(gamma, pair_fn=pair)

    @classmethod
    def constant(cls, gamma: float) -> "GammaProfile":
        return cls(gamma)

    @property
    def gamma(self) -> float:
        return self._gamma

    def pair(self, i: int, j: int) -> float:
        if self._pair_fn is None:
            return self._gamma
        value = self._pair_fn(i, j)
        if not 0.0 < value <= self._gamma:
            raise MonotonicityError(
                f"gamma_({i},{j}) = {value} outside (0, gamma]"
            )
        return value


def _log_crossing_counts(n: int) -> np.ndarray:
    """log of the no-fixed-pairing counts, iteratively, safe for large n."""
    lc = np.full(n + 1, -np.inf)
    lc[0] = 0.0
    for k in range(2, n + 1):
        lc[k] = math.log(2 * (k - 1)) + np.logaddexp(lc[k - 1], lc[k - 2])
    return lc


def _log_parity_sum(n: int, gamma: float, parity: int, lc: np.ndarray) -> float:
    """log of sum over k = 2..n with k % 2 == parity of C(n,k) c(k) gamma^k."""
    ks = np.arange(2, n + 1)
    ks = ks[ks % 2 == parity]
    if len(ks) == 0:
        return -np.inf
    log_binom = gammaln(n + 1) - gammaln(ks + 1) - gammaln(n - ks + 1)
    return float(logsumexp(log_binom + lc[ks] + ks * math.log(gamma)))


def parity_correction_sum(n: int, gamma: float, parity: int) -> float:
    """Worst-case correction-sum magnitude over n windows, split by the
    parity of the number of cross-paired windows (even: positive
    contributions, odd: negative)."""
    if n < 1:
        raise ValueError("n must be >= 1")
    if not 0.0 < gamma < 1.0:
        raise ValueError("gamma must lie in (0, 1)")
    if parity not in (0, 1):
        raise ValueError("parity must be 0 (even) or 1 (odd)")
    log_val = _log_parity_sum(n, gamma, parity, _log_crossing_counts(n))
    return math.exp(log_val) if log_val < 700 else math.inf


def loose_bounds(n: int, q: float, gamma: float) -> BoundPair:
    """History-independent bounds on the n-th conditional excitation.

    Upper: q (1 + even-sum(n)) / (1 - odd-sum(n-1));
    lower: q (1 - odd-sum(n)) / (1 + even-sum(n-1)).
    Values may exceed 1 for large n (that is the validity horizon's job);
    a non-positive denominator or negative numerator raises instead.
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    if not 0.0 < q < 1.0:
        raise ValueError("q must lie in (0, 1)")
    if n == 1:
        return BoundPair(q, q, kind="loose")
    lc = _log_crossing_counts(n)

    def parity_sum(m: int, parity: int) -> float:
        log_val = _log_parity_sum(m, gamma, parity, lc)
        return math.exp(log_val) if log_val < 700 else math.inf

    up_den = 1.0 - parity_sum(n - 1, 1)
    lo_num = 1.0 - parity_sum(n, 1)
    if up_den <= 0.0 or lo_num < 0.0:
        raise HorizonExceededError(
            f"loose bounds undefined at n={n}: odd correction sums reach 1"
        )
    upper = q * (1.0 + parity_sum(n, 0)) / up_den
    lower = q * lo_num / (1.0 + parity_sum(n - 1, 0))
    return BoundPair(lower, upper, kind="loose")


def n_limit(q: float, gamma: float, cap: int = N_LIMIT_CAP) -> int:
    """Validity horizon of the loose bounds: the first n at which they fail.

    Conditional probabilities are trustworthy only for histories strictly
    below the returned value.  A window count n fails once an odd correction
    sum (at n or n-1) reaches 1 or the upper bound reaches 1; all three
    conditions are monotone in n, so the scan stops at the first failure.
    """
    if not 0.0 < q < 1.0 or not 0.0 < gamma < 1.0:
        raise ValueError("q and gamma must lie in (0, 1)")
    lc = _log_crossing_counts(cap)
    for n in range(2, cap + 1):
        odd_n = _log_parity_sum(n, gamma, 1, lc)
        odd_prev = _log_parity_sum(n - 1, gamma, 1, lc)
        if odd_n >= 0.0 or odd_prev >= 0.0:
            return n
        even_n = _log_parity_sum(n, gamma, 0, lc)
        upper = q * (1.0 + math.exp(even_n)) / (1.0 - math.exp(odd_prev))
        if upper >= 1.0:
            return n
    warnings.warn(f"validity horizon exceeds the search cap {cap}", stacklevel=2)
    return cap


def _pair_bound(g: float) -> float:
    return 2.0 * g * g


def _triple_bound(ga: float, gb: float, gc: float) -> float:
    return 8.0 * ga * gb * gc


def _quad_bound(gp: GammaProfile, ints: tuple[int, int, int, int]) -> float:
    """Upper bound on a four-window correction fraction: cyclic monomials
    (weight 16 each) plus squared-pair monomials (weight 4 each)."""
    i, j, k, l = ints
    g = gp.pair
    cyclic = (
        g(i, j) * g(j, l) * g(l, k) * g(k, i)
        + g(i, l) * g(l, k) * g(k, j) * g(j, i)
        + g(i, k) * g(k, j) * g(j, l) * g(l, i)
    )
    squared = (
        g(i, j) ** 2 * g(k, l) ** 2
        + g(i, k) ** 2 * g(j, l) ** 2
        + g(i, l) ** 2 * g(j, k) ** 2
    )
    return 16.0 * cyclic + 4.0 * squared


def tight_bounds(
    history: tuple[int, ...],
    query: int,
    q: float,
    gp: GammaProfile,
) -> BoundPair:
    """History-specific bounds from per-pair ratios, n = len(history) + 1.

    Uses the sign pattern of the correction fractions (even window count:
    in [0, bound]; odd: in [-bound, 0]) on the conditional-probability
    ratio.  Beyond n = 4 the pairing enumeration is not closed-form here,
    so the result degrades to the loose bounds with a warning.  The result
    is always intersected with the loose bounds, which are occasionally
    narrower on one side.
    """
    if list(history) != sorted(set(history)):
        raise ValueError("history must be strictly increasing")
    if history and query <= history[-1]:
        raise ValueError("query must follow the history")
    n = len(history) + 1
    if not 0.0 < q < 1.0:
        raise ValueError("q must lie in (0, 1)")
    loose = loose_bounds(n, q, gp.gamma)
    if n > 4:
        warnings.warn(
            f"tight bounds implemented for n <= 4; history of order {n} "
            "falls back to loose bounds",
            stacklevel=2,
        )
        return BoundPair(loose.lower, loose.upper, kind="tight")
    if n == 1:
        return BoundPair(q, q, kind="tight")

    g = gp.pair
    if n == 2:
        (n1,) = history
        lower, upper = q, q * (1.0 + _pair_bound(g(n1, query)))
    elif n == 3:
        n1, n2 = history
        pair_sq = (
            _pair_bound(g(n1, n2))
            + _pair_bound(g(n1, query))
            + _pair_bound(g(n2, query))
        )
        lower = q * (1.0 - _triple_bound(g(n1, n2), g(n2, query), g(n1, query))) / (
            1.0 + _pair_bound(g(n1, n2))
        )
        upper = q * (1.0 + pair_sq)
    else:
        n1, n2, n3 = history
        ints = (n1, n2, n3, query)
        pairs = [(a, b) for idx, a in enumerate(ints) for b in ints[idx + 1 :]]
        pair_sum = sum(_pair_bound(g(a, b)) for a, b in pairs)
        from itertools import combinations

        triple_sum = sum(
            _triple_bound(g(a, b), g(b, c), g(a, c))
            for a, b, c in combinations(ints, 3)
        )
        lower = q / (1.0 + sum(_pair_bound(g(a, b)) for a, b in pairs if query not in (a, b)))
        upper = (
            q
            * (1.0 + pair_sum + triple_sum + _quad_bound(gp, ints))
            / (1.0 - _triple_bound(g(n1, n2), g(n2, n3), g(n1, n3)))
        )
    # guarantee tight within loose even where the closed forms cross
    return BoundPair(max(lower, loose.lower), min(upper, loose.upper), kind="tight")
