"""Compile a symmetric target state into Protocol-2 gates from the vacuum.

The target's generating polynomial Q(x) = sum_i psi_i / sqrt(i!(n-i)!) x^i
factors as prod_l (x - x_l) up to a constant, so the target is proportional to
prod_l P2(gamma_l, delta_l)|D_0^0> with x_l = -gamma_l / delta_l. Missing top
powers of Q (deg Q < n) are roots at infinity and become (gamma, delta) = (1, 0).
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .algebra import GateParams
from .dicke_space import SymmetricState, vacuum
from .errors import DegenerateStateError, DomainError, NumericError
from .protocols import protocol2_exact, protocol2_sample

ZERO_COEFF_TOL = 1e-14
ROOT_RESIDUAL_TOL = 1e-6


@dataclass(frozen=True)
class PreparationSchedule:
    steps: tuple
    finite_roots: tuple
    infinity_count: int
    residuals: tuple = ()

    @property
    def n(self):
        return len(self.steps)

    def to_json(self):
        return [[g.first.real, g.first.imag, g.second.real, g.second.imag] for g in self.steps]


@dataclass
class PreparationResult:
    state: Optional[SymmetricState]
    cumulative_probability: float
    step_probabilities: list = field(default_factory=list)
    failed_step: Optional[int] = None

    @property
    def completed(self):
        return self.failed_step is None


def target_polynomial(state: SymmetricState) -> np.ndarray:
    """Ascending coefficients of Q(x)."""
    if state.is_zero:
        raise DegenerateStateError("the zero vector has no generating polynomial")
    n = state.n
    scale = np.array([math.sqrt(math.factorial(i) * math.factorial(n - i)) for i in range(n + 1)])
    return state.amps / scale


def _companion_roots(coeffs):
    """Roots of sum_i coeffs[i] x^i (nonzero leading coefficient) via the companion matrix."""
    d = len(coeffs) - 1
    if d == 0:
        return np.zeros(0, dtype=complex)
    monic = np.asarray(coeffs[:-1], dtype=complex) / coeffs[-1]
    C = np.zeros((d, d), dtype=complex)
    C[1:, :-1] = np.eye(d - 1)
    C[:, -1] = -monic
    # LAPACK geev balances the matrix before the QR iteration
    return np.linalg.eigvals(C)


def _polish(coeffs, roots):
    """One Newton step per root, kept only when it lowers |Q(x)|."""
    poly = np.polynomial.Polynomial(coeffs)
    deriv = poly.deriv()
    out = []
    for x in roots:
        fx, dfx = poly(x), deriv(x)
        if dfx != 0:
            cand = x - fx / dfx
            if np.isfinite(cand) and abs(poly(cand)) < abs(fx):
                x = cand
        out.append(complex(x))
    return np.array(out, dtype=complex)


def find_roots(coeffs, tol=ZERO_COEFF_TOL):
    """Return ``(finite_roots, infinity_count, residuals)`` for Q given ascending coefficients.

    Coefficients below ``tol * max|coeff|`` at the top count as roots at
    infinity and those at the bottom as roots at x = 0. Residuals are the
    relative backward errors |Q(x)| / sum_k |c_k| |x|^k at each finite root.
    """
    coeffs = np.asarray(coeffs, dtype=complex)
    n = len(coeffs) - 1
    scale = float(np.max(np.abs(coeffs)))
    if scale == 0.0:
        raise DegenerateStateError("zero polynomial")
    coeffs = coeffs / scale
    top = n
    while top > 0 and abs(coeffs[top]) <= tol:
        top -= 1
    infinity_count = n - top
    trimmed = coeffs[: top + 1].copy()
    low = 0
    while low < top and abs(trimmed[low]) <= tol:
        low += 1
    trimmed[:low] = 0
    reduced = trimmed[low:]
    roots = _polish(reduced, _companion_roots(reduced))
    roots = np.concatenate([np.zeros(low, dtype=complex), roots])
    poly = np.polynomial.Polynomial(trimmed)
    bound = np.polynomial.Polynomial(np.abs(trimmed))
    residuals = np.zeros(roots.size)
    if roots.size:
        num, den = np.abs(poly(roots)), bound(np.abs(roots))
        # |Q(x)| <= bound, so a zero bound means an exact root
        np.divide(num, den, out=residuals, where=den > 0)
    if not np.all(np.isfinite(roots)):
        raise NumericError("root finding produced non-finite roots", residual=float("inf"))
    return roots, infinity_count, residuals


def _root_to_gate(x):
    # x = -gamma/delta with |gamma|^2 + |delta|^2 = 1
    norm = math.sqrt(1.0 + abs(x) ** 2)
    # adding 0.0 turns a negative zero into +0.0
    return GateParams(-x / norm + 0.0, 1.0 / norm)


def compile_schedule(state: SymmetricState) -> PreparationSchedule:
    if not state.is_normalized:
        raise DomainError("target state must be normalized")
    roots, inf_count, residuals = find_roots(target_polynomial(state))
    worst = float(np.max(residuals)) if residuals.size else 0.0
    if worst > ROOT_RESIDUAL_TOL:
        raise NumericError(f"root residual {worst:.3g} exceeds {ROOT_RESIDUAL_TOL}", residual=worst)
    steps = [_root_to_gate(x) for x in roots] + [GateParams(1.0, 0.0)] * inf_count
    return PreparationSchedule(tuple(steps), tuple(complex(x) for x in roots), inf_count, tuple(residuals))


def run_schedule(schedule: PreparationSchedule, mode="exact", rng=None) -> PreparationResult:
    """Apply the schedule's Protocol-2 steps to the vacuum in order."""
    if mode not in ("exact", "sampled"):
        raise DomainError(f"mode must be 'exact' or 'sampled', got {mode!r}")
    if mode == "sampled" and rng is None:
        raise DomainError("sampled mode needs an explicit rng")
    state = vacuum()
    result = PreparationResult(state, 1.0)
    for k, g in enumerate(schedule.steps):
        if mode == "exact":
            prob, nxt = protocol2_exact(state, g)
            if nxt is None:
                raise NumericError(f"step {k} has zero success probability", residual=0.0)
        else:
            outcome = protocol2_sample(state, g, rng)
            if not outcome.success:
                result.failed_step = k
                result.state = None
                result.cumulative_probability *= outcome.probability
                return result
            prob, nxt = outcome.probability, outcome.state
        result.step_probabilities.append(prob)
        result.cumulative_probability *= prob
        state = nxt
    result.state = state
    return result
