"""Protocol 1 (gate + measure one qubit) and Protocol 2 (add a qubit + measure total j).

Exact variants return branch probabilities computed from amplitudes. Sampled
variants draw the branch from an explicit ``numpy.random.Generator`` and are
bitwise reproducible for a given seed.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import NamedTuple, Optional

import mpmath
import numpy as np

from . import algebra
from .algebra import ANNIHILATED, GateParams
from .dicke_space import SymmetricState, normalize
from .errors import DegenerateRunError, DomainError

RNG_ALGORITHM = "numpy.random.Generator(PCG64)"
CHI_TOL = 1e-12


def make_rng(seed=None):
    """Seedable generator; ``rng.spawn(k)`` gives independent child streams."""
    return np.random.Generator(np.random.PCG64(seed))


class Protocol1Branches(NamedTuple):
    success_prob: float
    success_state: Optional[SymmetricState]
    failure_state: Optional[SymmetricState]


class Protocol2Branches(NamedTuple):
    success_prob: float
    success_state: Optional[SymmetricState]


@dataclass(frozen=True)
class ProtocolOutcome:
    success: bool
    state: Optional[SymmetricState]
    probability: float

    def to_json(self):
        return {
            "success": self.success,
            "probability": self.probability,
            "state": None if self.state is None else self.state.to_json(),
        }


@dataclass
class IterationLog:
    rounds: int
    probabilities: list = field(default_factory=list)
    cumulative_probability: float = 1.0
    final_state: Optional[SymmetricState] = None
    completed: bool = True
    failed_round: Optional[int] = None
    order: str = "p1_first"
    mode: str = "exact"
    rng_algorithm: Optional[str] = None

    def to_json(self):
        return {
            "rounds": self.rounds,
            "completed": self.completed,
            "failed_round": self.failed_round,
            "order": self.order,
            "mode": self.mode,
            "rng_algorithm": self.rng_algorithm,
            "probabilities": list(self.probabilities),
            "cumulative_probability": self.cumulative_probability,
            "final_state": None if self.final_state is None else self.final_state.to_json(),
        }


def _check_input(state, g):
    g.require_physical()
    if not state.is_normalized:
        raise DomainError("protocol input state must be normalized")


def _unit_or_none(state):
    if state.norm == 0.0:
        return None
    return normalize(state)[0]


def protocol1_exact(state: SymmetricState, g: GateParams) -> Protocol1Branches:
    """Both measurement branches of Protocol 1 applied to the last qubit."""
    _check_input(state, g)
    n = state.n
    if n == 0:
        raise DomainError("Protocol 1 needs at least one qubit to measure")
    success = algebra.apply_p1(g, state)
    p_success = min(1.0, success.norm ** 2 / n)
    alpha, beta = g.first, g.second
    i = np.arange(n)
    fail_amps = (
        np.conj(beta) * np.sqrt((n - i) / n) * state.amps[:n]
        - np.conj(alpha) * np.sqrt((i + 1) / n) * state.amps[1:]
    )
    failure = SymmetricState(n - 1, fail_amps)
    return Protocol1Branches(p_success, _unit_or_none(success), _unit_or_none(failure))


def protocol2_exact(state: SymmetricState, g: GateParams) -> Protocol2Branches:
    """Maximal-j branch of Protocol 2 (new qubit appended last)."""
    _check_input(state, g)
    success = algebra.apply_p2(g, state)
    p_success = min(1.0, success.norm ** 2 / (state.n + 1))
    return Protocol2Branches(p_success, _unit_or_none(success))


def protocol1_sample(state, g, rng) -> ProtocolOutcome:
    branches = protocol1_exact(state, g)
    success = bool(rng.random() < branches.success_prob)
    if success:
        return ProtocolOutcome(True, branches.success_state, branches.success_prob)
    return ProtocolOutcome(False, branches.failure_state, 1.0 - branches.success_prob)


def protocol2_sample(state, g, rng) -> ProtocolOutcome:
    """On failure the (n+1)-qubit state lies outside the symmetric subspace; ``state`` is None."""
    branches = protocol2_exact(state, g)
    success = bool(rng.random() < branches.success_prob)
    if success:
        return ProtocolOutcome(True, branches.success_state, branches.success_prob)
    return ProtocolOutcome(False, None, 1.0 - branches.success_prob)


def _round_steps(order, p1, p2):
    if order == "p1_first":
        return (("p1", p1), ("p2", p2))
    if order == "p2_first":
        return (("p2", p2), ("p1", p1))
    raise DomainError(f"order must be one of {algebra.ORDERS}, got {order!r}")


def iterate_composed(state, p1, p2, rounds, mode="exact", rng=None, order="p1_first") -> IterationLog:
    """Alternate both protocols ``rounds`` times with fixed gates.

    ``mode="exact"`` post-selects success every round and logs each round's
    success probability (product of its two steps). ``mode="sampled"`` draws
    every measurement from ``rng`` and stops at the first failure, returning a
    partial log with ``completed=False``.
    """
    if rounds < 0:
        raise DomainError("rounds must be nonnegative")
    if mode not in ("exact", "sampled"):
        raise DomainError(f"mode must be 'exact' or 'sampled', got {mode!r}")
    if mode == "sampled" and rng is None:
        raise DomainError("sampled mode needs an explicit rng")
    steps = _round_steps(order, p1, p2)
    log = IterationLog(
        rounds=0,
        final_state=state,
        order=order,
        mode=mode,
        rng_algorithm=RNG_ALGORITHM if mode == "sampled" else None,
    )
    current = state
    for r in range(rounds):
        round_prob = 1.0
        for name, g in steps:
            if mode == "exact":
                if name == "p1":
                    if current.n == 0:
                        raise DegenerateRunError(f"round {r}: Protocol 1 on the vacuum", r)
                    prob, nxt, _ = protocol1_exact(current, g)
                else:
                    prob, nxt = protocol2_exact(current, g)
                if nxt is None:
                    raise DegenerateRunError(f"round {r}: success branch of {name} has zero probability", r)
            else:
                sample = protocol1_sample if name == "p1" else protocol2_sample
                outcome = sample(current, g, rng)
                if not outcome.success:
                    log.completed = False
                    log.failed_round = r
                    log.cumulative_probability *= round_prob * outcome.probability
                    return log
                prob, nxt = outcome.probability, outcome.state
            round_prob *= prob
            current = nxt
        log.probabilities.append(round_prob)
        log.cumulative_probability *= round_prob
        log.rounds = r + 1
        log.final_state = current
    return log


def iterate_protocol(state, protocol, g, rounds, mode="exact", rng=None) -> IterationLog:
    """Apply one protocol ``rounds`` times with a fixed gate.

    Protocol 1 removes a qubit per round, so at most ``state.n`` rounds are
    allowed; Protocol 2 adds one. Logging and failure semantics follow
    :func:`iterate_composed`.
    """
    if protocol not in (1, 2):
        raise DomainError(f"protocol must be 1 or 2, got {protocol!r}")
    if rounds < 0:
        raise DomainError("rounds must be nonnegative")
    if protocol == 1 and rounds > state.n:
        raise DomainError(f"Protocol 1 can run at most n={state.n} rounds, got {rounds}")
    if mode not in ("exact", "sampled"):
        raise DomainError(f"mode must be 'exact' or 'sampled', got {mode!r}")
    if mode == "sampled" and rng is None:
        raise DomainError("sampled mode needs an explicit rng")
    log = IterationLog(
        rounds=0,
        final_state=state,
        order=f"p{protocol}",
        mode=mode,
        rng_algorithm=RNG_ALGORITHM if mode == "sampled" else None,
    )
    current = state
    for r in range(rounds):
        if mode == "exact":
            prob, nxt = (protocol1_exact if protocol == 1 else protocol2_exact)(current, g)[:2]
            if nxt is None:
                raise DegenerateRunError(f"round {r}: success branch has zero probability", r)
        else:
            outcome = (protocol1_sample if protocol == 1 else protocol2_sample)(current, g, rng)
            if not outcome.success:
                log.completed = False
                log.failed_round = r
                log.cumulative_probability *= outcome.probability
                return log
            prob, nxt = outcome.probability, outcome.state
        log.probabilities.append(prob)
        log.cumulative_probability *= prob
        log.rounds = r + 1
        log.final_state = current = nxt
    return log


def asymptotic_prediction(state, p1, p2, tol=CHI_TOL):
    """Limit ray of the iterated composite: ``(k, B|D_n^k>)``.

    ``k`` is the smallest index whose coefficient in the fixed-point expansion
    of ``state`` exceeds ``tol``. The same ray is the limit for both round
    orders, since the two composites differ by a multiple of the identity.
    """
    from .spectral import build_fixed_point_basis

    basis = build_fixed_point_basis(state.n, p1, p2)
    chi = np.linalg.solve(basis.B, state.amps)
    big = np.nonzero(np.abs(chi) > tol)[0]
    assert big.size, "a normalized state has a nonzero fixed-point coefficient"
    k = int(big[0])
    return k, normalize(SymmetricState(state.n, basis.B[:, k]))[0]


def convergence_trace(state, p1, p2, rounds, k, order="p1_first", dps=60):
    """Per-round infidelity with the limit ray, in ``dps``-digit arithmetic.

    Double precision cannot resolve infidelities below ~1e-30, which the
    iterated map reaches within a couple of hundred rounds. This routine runs
    the post-selected iteration with mpmath and measures against the
    eigenvector of the composite whose eigenvalue is the one attached to
    index ``k``. Returns a list of ``rounds + 1`` floats (round 0 included).
    """
    n = state.n
    with mpmath.workdps(dps):
        a, b = mpmath.mpc(p1.first), mpmath.mpc(p1.second)
        g, d = mpmath.mpc(p2.first), mpmath.mpc(p2.second)
        c = a * g + b * d
        shift = 0 if order == "p1_first" else 1
        M = mpmath.matrix(n + 1, n + 1)
        for i in range(n + 1):
            M[i, i] = a * g * (n - i + shift) + d * b * (i + shift)
            if i < n:
                M[i, i + 1] = g * b * mpmath.sqrt((n - i) * (i + 1))
            if i > 0:
                M[i, i - 1] = a * d * mpmath.sqrt(i * (n - i + 1))
        evals, evecs = mpmath.eig(M)
        target = c * (n - k + shift)
        idx = min(range(n + 1), key=lambda j: abs(evals[j] - target))
        limit = evecs[:, idx]
        limit = limit / mpmath.norm(limit)
        psi = mpmath.matrix([mpmath.mpc(z) for z in state.amps])
        trace = []
        for r in range(rounds + 1):
            psi = psi / mpmath.norm(psi)
            overlap = sum(mpmath.conj(limit[i]) * psi[i] for i in range(n + 1))
            trace.append(float(1 - abs(overlap) ** 2))
            if r < rounds:
                psi = M * psi
    return trace


def contraction_ratio(trace, window):
    """Geometric decay rate of the last ``window`` entries (log-linear fit)."""
    tail = np.asarray(trace[-window:], dtype=float)
    if np.any(tail <= 0):
        raise DomainError("trace must stay positive over the fit window")
    x = np.arange(tail.size)
    slope = np.polyfit(x, np.log(tail), 1)[0]
    return math.exp(slope)
