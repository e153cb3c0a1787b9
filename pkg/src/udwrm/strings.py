"""Bit-string outcome model: Born product law versus the history-conditioned
chain law, plus ratio bounds and excitation-rate summaries.

Probabilities of individual strings differ from the Born products by parts
in 10^7 or less at weak coupling, so comparisons are carried as log-ratio
corrections accumulated with log1p rather than as raw differences.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .kernel import Worldline
from .response import HistoryRecord, ResponseModel


@dataclass(frozen=True)
class BitString:
    """Measurement record b_1..b_L; b_1 is the most significant base-10 bit."""

    bits: tuple[int, ...]

    def __post_init__(self) -> None:
        if not self.bits:
            raise ValueError("bit string must be non-empty")
        if any(b not in (0, 1) for b in self.bits):
            raise ValueError("bits must be 0 or 1")

    @classmethod
    def from_int(cls, value: int, length: int) -> "BitString":
        if value < 0 or value >= 1 << length:
            raise ValueError(f"{value} does not fit in {length} bits")
        return cls(tuple((value >> (length - 1 - i)) & 1 for i in range(length)))

    @property
    def length(self) -> int:
        return len(self.bits)

    @property
    def ones(self) -> tuple[int, ...]:
        """1-based positions of the excited outcomes."""
        return tuple(i + 1 for i, b in enumerate(self.bits) if b == 1)

    @property
    def popcount(self) -> int:
        return sum(self.bits)

    def to_int(self) -> int:
        out = 0
        for b in self.bits:
            out = (out << 1) | b
        return out

    def __str__(self) -> str:
        return "".join(str(b) for b in self.bits)


@dataclass(frozen=True)
class RateReport:
    """Excitation-rate ratios: sampled from the string, single-window
    theoretical, and the infinite-interaction-time reference."""

    sampled: float
    theoretical: float
    reference: float

    def __post_init__(self) -> None:
        for name in ("sampled", "theoretical", "reference"):
            if getattr(self, name) < 0:
                raise ValueError(f"{name} ratio must be >= 0")


def born_string_prob(q: float, b: BitString) -> float:
    """q^n (1-q)^(L-n): outcome-order independent product law."""
    if not 0.0 <= q <= 1.0:
        raise ValueError("q must lie in [0, 1]")
    n = b.popcount
    return q**n * (1.0 - q) ** (b.length - n)


@dataclass(frozen=True)
class StringProbability:
    value: float
    log_ratio_correction: float  # log(value / born_string_prob)
    abs_error: float


def rm_string_prob(b: BitString, model: ResponseModel) -> StringProbability:
    """Chain-law string probability, each factor conditioned on the ones
    recorded before it.

    Windows are numbered 0..L-1; bit j (1-based) is the outcome of window
    j-1.  The result also carries log(P_rm / P_born) assembled from the
    per-factor correction ratios, which stays accurate when the correction
    is far below the probability's double-precision resolution.
    """
    q = model.q
    log_ratio = 0.0
    err = 0.0
    prior_ones: list[int] = []
    for j, bit in enumerate(b.bits):
        if prior_ones:
            h = HistoryRecord(excitations=tuple(prior_ones), query=j)
            ratio, ratio_err = model.correction_ratio(h)
        else:
            ratio, ratio_err = 0.0, 0.0
        if bit == 1:
            # P(1|h)/q = 1 + ratio
            log_ratio += math.log1p(ratio)
            err += ratio_err
            prior_ones.append(j)
        else:
            # (1 - P(1|h))/(1 - q) = 1 - q*ratio/(1-q)
            log_ratio += math.log1p(-q * ratio / (1.0 - q))
            err += q * ratio_err / (1.0 - q)
    value = born_string_prob(q, b) * math.exp(log_ratio)
    return StringProbability(
        value=value, log_ratio_correction=log_ratio, abs_error=value * err
    )


def ratio_bounds(
    b: BitString, upper_eps: float, lower_delta: float, excitation_ratio: float
) -> tuple[float, float]:
    """Interval guaranteed to contain P_rm(B) / P_born(B).

    upper_eps and lower_delta are the worst-case relative deviations of the
    conditional excitation probability (from the bounds module); the
    excitation ratio is q/(1-q).
    """
    if upper_eps < 0 or lower_delta < 0 or excitation_ratio < 0:
        raise ValueError("deviations and the excitation ratio must be >= 0")
    n = b.popcount
    zeros = b.length - n
    lower = (1.0 - lower_delta) ** n * (1.0 - excitation_ratio * upper_eps) ** zeros
    upper = (1.0 + upper_eps) ** n * (1.0 + excitation_ratio * lower_delta) ** zeros
    return lower, upper


def rate_report(b: BitString, q: float, w: Worldline, omega: float) -> RateReport:
    """Sampled n/(L-n) against q/(1-q) and the infinite-time thermal ratio.

    The reference is the detailed-balance ratio at the worldline's
    equilibrium temperature: exp(-2 pi omega / alpha) when accelerated,
    zero (no excitations survive infinite interaction) when inertial.
    """
    if omega <= 0:
        raise ValueError("omega must be > 0")
    n = b.popcount
    if n == b.length:
        sampled = math.inf
    else:
        sampled = n / (b.length - n)
    theoretical = q / (1.0 - q)
    if w.kind == "accelerated":
        reference = math.exp(-2.0 * math.pi * omega / w.alpha)
    else:
        reference = 0.0
    return RateReport(sampled=sampled, theoretical=theoretical, reference=reference)
