"""Sequential Bayesian discrimination between an exact Born hypothesis
family H1(q) and a corrected family H2(q) = Born + epsilon * correction,
with a for-all-practical-purposes verdict.

Both families are continuous in q; the posterior lives on a uniform q-grid
and is integrated with the trapezoid rule.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .strings import BitString, born_string_prob

GRID_SIZE = 1024
NORMALIZATION_TOL = 1e-12


class DegenerateEvidenceError(RuntimeError):
    """Every hypothesis assigned zero likelihood to the observed data."""


@dataclass(frozen=True)
class CorrectionModel:
    """Order-epsilon (or epsilon^2) deviation from the Born string law.

    ``delta_p(q, B)`` must accept a grid of q values and return the
    correction Delta P_q(B) on that grid; the likelihood under H2 is
    Born + epsilon^order * delta_p.
    """

    coupling_epsilon: float
    delta_p: Callable[[np.ndarray, BitString], np.ndarray]
    order: str = "first"

    def __post_init__(self) -> None:
        if self.coupling_epsilon < 0:
            raise ValueError("coupling_epsilon must be >= 0")
        if self.order not in ("first", "second"):
            raise ValueError("order must be 'first' or 'second'")

    @property
    def epsilon_power(self) -> float:
        return (
            self.coupling_epsilon
            if self.order == "first"
            else self.coupling_epsilon**2
        )


class Posterior:
    """Joint density over (hypothesis family, q) on a uniform grid.

    Stored as two density arrays; the total mass (trapezoid over q, summed
    over families) is kept at 1.
    """

    def __init__(
        self, h1: np.ndarray | None = None, h2: np.ndarray | None = None,
        grid_size: int = GRID_SIZE,
    ) -> None:
        self.q = np.linspace(0.0, 1.0, grid_size)
        if h1 is None:
            h1 = np.full(grid_size, 0.5)
        if h2 is None:
            h2 = np.full(grid_size, 0.5)
        self.h1 = np.asarray(h1, dtype=float)
        self.h2 = np.asarray(h2, dtype=float)
        if self.h1.shape != self.q.shape or self.h2.shape != self.q.shape:
            raise ValueError("density arrays must match the grid")
        if np.any(self.h1 < 0) or np.any(self.h2 < 0):
            raise ValueError("densities must be non-negative")
        if abs(self.total_mass() - 1.0) > 1e-9:
            raise ValueError(f"posterior mass {self.total_mass()} is not 1")

    def total_mass(self) -> float:
        return float(np.trapezoid(self.h1, self.q) + np.trapezoid(self.h2, self.q))

    def family_mass(self, i: int) -> float:
        if i not in (1, 2):
            raise ValueError("family index must be 1 or 2")
        return float(np.trapezoid(self.h1 if i == 1 else self.h2, self.q))

    def q_marginal(self) -> np.ndarray:
        return self.h1 + self.h2


def update_posterior(p: Posterior, b: BitString, m: CorrectionModel) -> Posterior:
    """One Bayes step: multiply by the per-family string likelihoods and
    renormalize over the whole (family, q) product space."""
    n = b.popcount
    zeros = b.length - n
    like1 = p.q**n * (1.0 - p.q) ** zeros
    like2 = like1 + m.epsilon_power * np.asarray(m.delta_p(p.q, b), dtype=float)
    like2 = np.clip(like2, 0.0, None)  # an order-eps model can dip below zero
    new1 = p.h1 * like1
    new2 = p.h2 * like2
    evidence = float(np.trapezoid(new1, p.q) + np.trapezoid(new2, p.q))
    if evidence <= 0.0:
        raise DegenerateEvidenceError(
            "all hypotheses assign zero probability to the observed string"
        )
    return Posterior(new1 / evidence, new2 / evidence, grid_size=len(p.q))


def fapp_verdict(
    q: float, b: BitString, m: CorrectionModel, kappa: float = 1.0
) -> str:
    """'h2_selected' when the correction is resolvable against the Born
    probability at the given coupling, else 'indistinguishable' (the Born
    rule is usable for all practical purposes).

    Resolvability threshold: |Delta P| / P >= kappa / epsilon^order.
    """
    if kappa <= 0:
        raise ValueError("kappa must be > 0")
    born = born_string_prob(q, b)
    if born <= 0.0:
        raise ValueError("Born probability of the observed string vanishes")
    if m.epsilon_power == 0.0:
        return "indistinguishable"
    delta = float(np.asarray(m.delta_p(np.array([q]), b))[0])
    if abs(delta) / born >= kappa / m.epsilon_power:
        return "h2_selected"
    return "indistinguishable"


def delta_p_first_order(q, step_corrections, b: BitString):
    """First-order string-probability correction from per-step outcome
    corrections: sum over steps j of Q(1)_{b_j}(j) times the Born product
    over the other steps.

    ``step_corrections[j]`` is the first-order correction to the probability
    of the outcome actually recorded at step j.  Accepts scalar or gridded q.
    """
    if len(step_corrections) != b.length:
        raise ValueError(
            f"{len(step_corrections)} step corrections for {b.length} bits"
        )
    q_arr = np.asarray(q, dtype=float)
    p_bit = [q_arr if bit == 1 else 1.0 - q_arr for bit in b.bits]
    total = np.zeros_like(q_arr)
    for j in range(b.length):
        prod = np.ones_like(q_arr) * step_corrections[j]
        for j2 in range(b.length):
            if j2 != j:
                prod = prod * p_bit[j2]
        total = total + prod
    return total if total.shape else float(total)
