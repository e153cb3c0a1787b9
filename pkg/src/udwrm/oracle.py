"""Exact state-vector oracle for the repeated-measurement protocol on a
finite detector+environment system.

A two-level detector is coupled to a d-dimensional environment through
per-step hermitian generators; each step applies a dense unitary, projects
the detector on the recorded outcome, and resets it to the ground state.
This gives brute-force ground truth for the perturbative outcome formulas
and for the Bayesian machinery, at dimensions where everything is cheap.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.integrate import solve_ivp
from scipy.linalg import expm

from .strings import BitString

MAX_ENV_DIM = 64
HERMITICITY_TOL = 1e-12
UNITARITY_TOL = 1e-10


class ModelError(ValueError):
    """The model data violate a structural invariant."""


def _check_hermitian(h: np.ndarray, what: str) -> None:
    if h.ndim != 2 or h.shape[0] != h.shape[1]:
        raise ModelError(f"{what} is not square")
    if np.max(np.abs(h - h.conj().T)) > HERMITICITY_TOL * max(1.0, np.max(np.abs(h))):
        raise ModelError(f"{what} is not hermitian")


def _check_unitary(u: np.ndarray, what: str, tol: float = UNITARITY_TOL) -> None:
    eye = np.eye(u.shape[0])
    if np.max(np.abs(u.conj().T @ u - eye)) > tol:
        raise ModelError(f"{what} is not unitary")


def operator_schmidt(op: np.ndarray, d_left: int, d_right: int):
    """Decompose an operator on a product space into sum_l L_l (x) R_l.

    Reshape to (d_left, d_right, d_left, d_right), group the left and right
    factor indices, and SVD; singular values are absorbed symmetrically.
    """
    m = op.reshape(d_left, d_right, d_left, d_right)
    m = m.transpose(0, 2, 1, 3).reshape(d_left * d_left, d_right * d_right)
    u, s, vh = np.linalg.svd(m)
    left, right = [], []
    for l, sv in enumerate(s):
        if sv < 1e-14 * s[0]:
            break
        root = np.sqrt(sv)
        left.append(root * u[:, l].reshape(d_left, d_left))
        right.append(root * vh[l].reshape(d_right, d_right))
    return left, right


@dataclass(frozen=True)
class WeakStructure:
    """Expansion of a step unitary around a detector-only unitary:
    U_k(eps) = U (x) I + eps sum_l A_l (x) B_l(k) + eps^2 sum_l C_l (x) D_l(k).

    Built from per-step generators G_k via U_k = expm(-i eps G_k)(U (x) I),
    which is exactly unitary at every eps.
    """

    u_detector: np.ndarray
    generators: tuple[np.ndarray, ...]
    coupling_epsilon: float

    def __post_init__(self) -> None:
        _check_unitary(self.u_detector, "detector unitary")
        for k, g in enumerate(self.generators):
            _check_hermitian(g, f"weak generator {k}")
        if self.coupling_epsilon < 0:
            raise ModelError("coupling_epsilon must be >= 0")

    @property
    def steps(self) -> int:
        return len(self.generators)

    def step_unitary(self, k: int, epsilon: float | None = None) -> np.ndarray:
        eps = self.coupling_epsilon if epsilon is None else epsilon
        g = self.generators[k]
        d_env = g.shape[0] // 2
        base = np.kron(self.u_detector, np.eye(d_env))
        return expm(-1j * eps * g) @ base

    def expansion_terms(self, k: int):
        """(A_l, B_l) and (C_l, D_l) term lists for step k."""
        g = self.generators[k]
        d_env = g.shape[0] // 2
        base = np.kron(self.u_detector, np.eye(d_env))
        first = operator_schmidt(-1j * g @ base, 2, d_env)
        second = operator_schmidt((-1j * g) @ (-1j * g) @ base / 2.0, 2, d_env)
        return first, second


@dataclass(frozen=True)
class FiniteRmModel:
    """Detector (x) environment model executed step by step.

    ``generators[k]`` is the hermitian interaction generator of step k on
    the 2d-dimensional product space; the step propagator is
    expm(-i lam w_k H_k).  If a weak structure is attached, it must
    reproduce the same step unitaries.
    """

    omega: float
    env_dim: int
    generators: tuple[np.ndarray, ...]
    lam: float
    weights: tuple[float, ...]
    env_initial: np.ndarray
    weak: WeakStructure | None = None

    def __post_init__(self) -> None:
        if not 1 <= self.env_dim <= MAX_ENV_DIM:
            raise ModelError(f"environment dimension must be in [1, {MAX_ENV_DIM}]")
        if len(self.weights) != len(self.generators):
            raise ModelError("need one window weight per step generator")
        for k, g in enumerate(self.generators):
            if g.shape != (2 * self.env_dim, 2 * self.env_dim):
                raise ModelError(f"generator {k} has wrong dimension")
            _check_hermitian(g, f"generator {k}")
        if abs(np.linalg.norm(self.env_initial) - 1.0) > 1e-12:
            raise ModelError("initial environment state must be normalized")

    @property
    def steps(self) -> int:
        return len(self.generators)

    def step_unitary(self, k: int) -> np.ndarray:
        if self.weak is not None:
            u = self.weak.step_unitary(k)
        else:
            u = expm(-1j * self.lam * self.weights[k] * self.generators[k])
        _check_unitary(u, f"step {k} propagator")
        return u


@dataclass
class TrajectoryState:
    """Environment vector plus the outcomes and probability accumulated so
    far along one branch of the measurement tree."""

    env: np.ndarray
    bits: tuple[int, ...] = ()
    probability: float = 1.0

    def __post_init__(self) -> None:
        if abs(np.linalg.norm(self.env) - 1.0) > 1e-10:
            raise ModelError("trajectory environment state must be normalized")


def step_distribution(m: FiniteRmModel, t: TrajectoryState, k: int):
    """Outcome distribution of step k and the post-measurement states.

    Returns (p0, p1, state_for_0, state_for_1); the post-states have the
    detector already reset to the ground state, so only the environment
    vector survives.  A branch of probability zero carries a None state.
    """
    d = m.env_dim
    u = m.step_unitary(k)
    psi = u @ np.kron(np.array([1.0, 0.0]), t.env)
    blocks = psi.reshape(2, d)
    probs = [float(np.sum(np.abs(blocks[b]) ** 2)) for b in (0, 1)]
    if abs(probs[0] + probs[1] - 1.0) > 1e-12:
        raise ModelError(f"step {k} outcome probabilities sum to {sum(probs)}")
    states = []
    for b in (0, 1):
        if probs[b] <= 0.0:
            states.append(None)
            continue
        env = blocks[b] / np.sqrt(probs[b])
        states.append(
            TrajectoryState(
                env=env, bits=t.bits + (b,), probability=t.probability * probs[b]
            )
        )
    return probs[0], probs[1], states[0], states[1]


def exact_string_prob(m: FiniteRmModel, b: BitString) -> float:
    """Chain-rule probability of the full outcome string."""
    if b.length > m.steps:
        raise ModelError(f"string of length {b.length} exceeds {m.steps} steps")
    if b.length > 20:
        raise ModelError("string length capped at 20")
    t = TrajectoryState(env=m.env_initial.astype(complex))
    prob = 1.0
    for k, bit in enumerate(b.bits):
        p0, p1, s0, s1 = step_distribution(m, t, k)
        p = p1 if bit == 1 else p0
        if p <= 0.0:
            return 0.0
        prob *= p
        t = s1 if bit == 1 else s0
    return prob


def string_distribution(m: FiniteRmModel, length: int) -> dict[int, float]:
    """Probabilities of every outcome string of the given length."""
    out = {}
    for v in range(1 << length):
        out[v] = exact_string_prob(m, BitString.from_int(v, length))
    return out


def perturbative_corrections(m: FiniteRmModel, k: int, env: np.ndarray):
    """Born part and the first/second order outcome corrections at step k.

    Returns (p, q1, q2) as length-2 arrays over outcomes; the exact step
    probability is p + eps q1 + eps^2 q2 + O(eps^3).
    """
    if m.weak is None:
        raise ModelError("model carries no weak-structure decomposition")
    w = m.weak
    d = m.env_dim
    ket0 = np.array([1.0, 0.0], dtype=complex)
    u0 = w.u_detector @ ket0
    (a_ops, b_ops), (c_ops, d_ops) = w.expansion_terms(k)

    p = np.abs(u0) ** 2
    q1 = np.zeros(2)
    q2 = np.zeros(2)
    for outcome in (0, 1):
        proj = np.zeros((2, 2), dtype=complex)
        proj[outcome, outcome] = 1.0
        first = 0.0 + 0.0j
        for a, b_env in zip(a_ops, b_ops):
            det = ket0.conj() @ (a.conj().T @ proj @ w.u_detector) @ ket0
            envv = env.conj() @ (b_env.conj().T @ env)
            first += det * envv
        q1[outcome] = float(2.0 * first.real)

        second = 0.0 + 0.0j
        for a, b_env in zip(a_ops, b_ops):
            for a2, b2 in zip(a_ops, b_ops):
                det = ket0.conj() @ (a.conj().T @ proj @ a2) @ ket0
                envv = env.conj() @ (b_env.conj().T @ b2 @ env)
                second += det * envv
        cross = 0.0 + 0.0j
        for c, d_env in zip(c_ops, d_ops):
            det = ket0.conj() @ (c.conj().T @ proj @ w.u_detector) @ ket0
            envv = env.conj() @ (d_env.conj().T @ env)
            cross += det * envv
        q2[outcome] = float(second.real + 2.0 * cross.real)
    return p, q1, q2


def exact_step_probability(
    m: FiniteRmModel, k: int, env: np.ndarray, epsilon: float | None = None
) -> np.ndarray:
    """Outcome probabilities of step k from the full unitary, optionally at
    a rescaled weak coupling."""
    if m.weak is None:
        raise ModelError("model carries no weak-structure decomposition")
    u = m.weak.step_unitary(k, epsilon)
    psi = u @ np.kron(np.array([1.0, 0.0]), env)
    blocks = psi.reshape(2, m.env_dim)
    return np.array([float(np.sum(np.abs(blocks[b]) ** 2)) for b in (0, 1)])


def propagator_consistency(m: FiniteRmModel, k: int, rtol: float = 1e-10) -> float:
    """Max deviation between the matrix exponential and an ODE integration
    of the same step propagator."""
    h = m.lam * m.weights[k] * m.generators[k]
    n = h.shape[0]
    direct = expm(-1j * h)

    def rhs(_, y):
        psi = y[:n] + 1j * y[n:]
        dpsi = -1j * (h @ psi)
        return np.concatenate([dpsi.real, dpsi.imag])

    cols = []
    for j in range(n):
        y0 = np.zeros(2 * n)
        y0[j] = 1.0
        sol = solve_ivp(rhs, (0.0, 1.0), y0, rtol=rtol, atol=1e-13, method="DOP853")
        yf = sol.y[:, -1]
        cols.append(yf[:n] + 1j * yf[n:])
    integrated = np.stack(cols, axis=1)
    return float(np.max(np.abs(direct - integrated)))


def _random_hermitian(rng: np.random.Generator, n: int) -> np.ndarray:
    a = rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))
    return (a + a.conj().T) / 2.0


def _random_unitary(rng: np.random.Generator, n: int) -> np.ndarray:
    a = rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))
    q, r = np.linalg.qr(a)
    return q * (np.diag(r) / np.abs(np.diag(r)))


def _random_env_state(rng: np.random.Generator, d: int) -> np.ndarray:
    v = rng.normal(size=d) + 1j * rng.normal(size=d)
    return v / np.linalg.norm(v)


def random_model(
    env_dim: int, steps: int, seed: int, omega: float = 0.2, lam: float = 0.05
) -> FiniteRmModel:
    """Generic coupled instance: independent hermitian generator per step."""
    rng = np.random.default_rng(seed)
    gens = tuple(_random_hermitian(rng, 2 * env_dim) for _ in range(steps))
    return FiniteRmModel(
        omega=omega,
        env_dim=env_dim,
        generators=gens,
        lam=lam,
        weights=(1.0,) * steps,
        env_initial=_random_env_state(rng, env_dim),
    )


def random_weak_model(
    env_dim: int, steps: int, epsilon: float, seed: int, omega: float = 0.2
) -> FiniteRmModel:
    """Weakly coupled instance built as expm(-i eps G_k)(U (x) I)."""
    rng = np.random.default_rng(seed)
    u = _random_unitary(rng, 2)
    gens = tuple(_random_hermitian(rng, 2 * env_dim) for _ in range(steps))
    weak = WeakStructure(u_detector=u, generators=gens, coupling_epsilon=epsilon)
    # effective hermitian generators of the exact step unitaries, for the
    # generic code paths (logm is overkill; step_unitary short-circuits)
    placeholder = tuple(np.zeros((2 * env_dim, 2 * env_dim)) for _ in range(steps))
    return FiniteRmModel(
        omega=omega,
        env_dim=env_dim,
        generators=placeholder,
        lam=0.0,
        weights=(1.0,) * steps,
        env_initial=_random_env_state(rng, env_dim),
        weak=weak,
    )


def iid_model(env_dim: int, steps: int, seed: int, omega: float = 0.2) -> FiniteRmModel:
    """Detector-only dynamics: every step applies the same product unitary,
    so outcomes are independent and identically distributed."""
    rng = np.random.default_rng(seed)
    u = _random_unitary(rng, 2)
    weak = WeakStructure(
        u_detector=u,
        generators=tuple(
            np.zeros((2 * env_dim, 2 * env_dim)) for _ in range(steps)
        ),
        coupling_epsilon=0.0,
    )
    placeholder = tuple(np.zeros((2 * env_dim, 2 * env_dim)) for _ in range(steps))
    return FiniteRmModel(
        omega=omega,
        env_dim=env_dim,
        generators=placeholder,
        lam=0.0,
        weights=(1.0,) * steps,
        env_initial=_random_env_state(rng, env_dim),
        weak=weak,
    )
