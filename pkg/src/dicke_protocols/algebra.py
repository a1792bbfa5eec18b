"""Ladder operators, protocol maps and su(2) generators on the Dicke spaces.

Operators act on :class:`SymmetricState` values directly (O(n) per call).
Matrix forms are built on demand by :func:`operator_matrix`.

Convention for composites of the two protocol maps: ``order="p1_first"``
means Protocol 1 acts first and Protocol 2 second, i.e. the operator product
``P2(g, d) @ P1(a, b)``. Its matrix on D_n is

    gamma*beta*sqrt((n-i)(i+1)) psi_{i+1} + (alpha*gamma*(n-i) + delta*beta*i) psi_i
        + alpha*delta*sqrt(i(n-i+1)) psi_{i-1},

it equals ``v_x Jx + v_y Jy + v_z Jz + v_0 N`` and has eigenvalues
``(alpha*gamma + beta*delta)(n - i)``. This is the composite whose fixed points
are studied in :mod:`dicke_protocols.spectral`. ``order="p2_first"`` is the
operator product ``P1 @ P2``; it differs from the former by
``(alpha*gamma + beta*delta) * Id``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .dicke_space import SymmetricState
from .errors import DomainError, NonPhysicalGateError

PHYSICAL_TOL = 1e-12
ORDERS = ("p1_first", "p2_first")


class Annihilated:
    """Result of a lowering operator applied to the vacuum |D_0^0>."""

    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self):
        return "ANNIHILATED"

    def __bool__(self):
        return False


ANNIHILATED = Annihilated()


@dataclass(frozen=True)
class GateParams:
    """Complex pair parametrizing a protocol gate.

    For Protocol 1 the pair is (alpha, beta) of U(alpha, beta) = [[a, b], [b*, -a*]].
    For Protocol 2 it is (gamma, delta), the gate being U(gamma, delta*), so the
    fresh qubit is prepared in gamma|0> + delta|1>. As elements of the linear
    span of the protocol maps any complex pair is allowed; :meth:`require_physical`
    enforces unit norm at protocol boundaries.
    """

    first: complex
    second: complex

    def __post_init__(self):
        object.__setattr__(self, "first", complex(self.first))
        object.__setattr__(self, "second", complex(self.second))

    @property
    def is_physical(self) -> bool:
        return abs(abs(self.first) ** 2 + abs(self.second) ** 2 - 1.0) <= PHYSICAL_TOL

    def require_physical(self):
        if not self.is_physical:
            norm2 = abs(self.first) ** 2 + abs(self.second) ** 2
            raise NonPhysicalGateError(f"|first|^2 + |second|^2 = {norm2!r}, expected 1")
        return self

    def normalized(self) -> "GateParams":
        norm = math.hypot(abs(self.first), abs(self.second))
        if norm == 0.0:
            raise DomainError("cannot normalize the zero gate pair")
        return GateParams(self.first / norm, self.second / norm)

    @classmethod
    def hadamard(cls) -> "GateParams":
        s = 1 / math.sqrt(2)
        return cls(s, s)

    @classmethod
    def random(cls, rng) -> "GateParams":
        z = rng.normal(size=2) + 1j * rng.normal(size=2)
        z /= np.linalg.norm(z)
        return cls(z[0], z[1])

    @classmethod
    def parse(cls, text: str) -> "GateParams":
        """Parse ``"a,b"`` with Python complex literals, e.g. ``"0.6,0.8j"``."""
        parts = text.split(",")
        if len(parts) != 2:
            raise DomainError(f"expected two comma-separated numbers, got {text!r}")
        try:
            return cls(complex(parts[0].strip()), complex(parts[1].strip()))
        except ValueError:
            raise DomainError(f"cannot parse gate parameters {text!r}") from None


@dataclass(frozen=True)
class SymmetryCoeffs:
    v_x: complex
    v_y: complex
    v_z: complex
    v_0: complex


# ---------------------------------------------------------------------------
# ladder operators

def _lower(state):
    if state is ANNIHILATED:
        return None
    if state.n == 0:
        return None
    return state


def apply_a1(state):
    """a1 |D_n^i> = sqrt(n-i) |D_{n-1}^i>."""
    if _lower(state) is None:
        return ANNIHILATED
    n = state.n
    i = np.arange(n)
    return SymmetricState(n - 1, np.sqrt(n - i) * state.amps[:n])


def apply_a2(state):
    """a2 |D_n^i> = sqrt(i) |D_{n-1}^{i-1}>."""
    if _lower(state) is None:
        return ANNIHILATED
    n = state.n
    i = np.arange(1, n + 1)
    return SymmetricState(n - 1, np.sqrt(i) * state.amps[1:])


def apply_a1_dag(state):
    """a1^dag |D_n^i> = sqrt(n+1-i) |D_{n+1}^i>."""
    if state is ANNIHILATED:
        return ANNIHILATED
    n = state.n
    out = np.zeros(n + 2, dtype=complex)
    out[: n + 1] = np.sqrt(n + 1 - np.arange(n + 1)) * state.amps
    return SymmetricState(n + 1, out)


def apply_a2_dag(state):
    """a2^dag |D_n^i> = sqrt(i+1) |D_{n+1}^{i+1}>."""
    if state is ANNIHILATED:
        return ANNIHILATED
    n = state.n
    out = np.zeros(n + 2, dtype=complex)
    out[1:] = np.sqrt(np.arange(1, n + 2)) * state.amps
    return SymmetricState(n + 1, out)


def apply_number(state):
    """N |D_n^i> = n |D_n^i>."""
    if state is ANNIHILATED:
        return ANNIHILATED
    return SymmetricState(state.n, state.n * state.amps)


def apply_p1(g: GateParams, state):
    """P1(alpha, beta) = alpha a1 + beta a2 (unnormalized Protocol-1 success map)."""
    if _lower(state) is None:
        return ANNIHILATED
    n = state.n
    i = np.arange(n)
    amps = g.first * np.sqrt(n - i) * state.amps[:n] + g.second * np.sqrt(i + 1) * state.amps[1:]
    return SymmetricState(n - 1, amps)


def apply_p2(g: GateParams, state):
    """P2(gamma, delta) = gamma a1^dag + delta a2^dag (unnormalized Protocol-2 success map)."""
    if state is ANNIHILATED:
        return ANNIHILATED
    n = state.n
    out = np.zeros(n + 2, dtype=complex)
    out[: n + 1] += g.first * np.sqrt(n + 1 - np.arange(n + 1)) * state.amps
    out[1:] += g.second * np.sqrt(np.arange(1, n + 2)) * state.amps
    return SymmetricState(n + 1, out)


def apply_composed(state, p1: GateParams, p2: GateParams, order="p1_first"):
    """Apply both protocol maps in sequence; see the module docstring for ``order``."""
    if order == "p1_first":
        return apply_p2(p2, apply_p1(p1, state))
    if order == "p2_first":
        return apply_p1(p1, apply_p2(p2, state))
    raise DomainError(f"order must be one of {ORDERS}, got {order!r}")


# ---------------------------------------------------------------------------
# su(2) generators restricted to D_n

def _raise_coeffs(n):
    # sqrt((i+1)(n-i)) for i = 0..n-1: the |D^i> -> |D^{i+1}> matrix element of 2Jx
    i = np.arange(n)
    return np.sqrt((i + 1) * (n - i))


def apply_jx(state):
    """Jx = A/2 with A|D^i> = sqrt((i+1)(n-i))|D^{i+1}> + sqrt(i(n-i+1))|D^{i-1}>."""
    n = state.n
    c = _raise_coeffs(n)
    out = np.zeros(n + 1, dtype=complex)
    out[1:] += c * state.amps[:n]
    out[:n] += c * state.amps[1:]
    return SymmetricState(n, out / 2)


def apply_jy(state):
    """Jy = i[Jx, Jz]."""
    n = state.n
    c = _raise_coeffs(n)
    out = np.zeros(n + 1, dtype=complex)
    out[1:] += 1j * c * state.amps[:n]
    out[:n] += -1j * c * state.amps[1:]
    return SymmetricState(n, out / 2)


def apply_jz(state):
    """Jz = A*/2 with A*|D^i> = (n - 2i)|D^i>."""
    n = state.n
    return SymmetricState(n, (n - 2 * np.arange(n + 1)) * state.amps / 2)


def jx_matrix(n):
    return operator_matrix(apply_jx, n)


def jy_matrix(n):
    return operator_matrix(apply_jy, n)


def jz_matrix(n):
    return operator_matrix(apply_jz, n)


def symmetry_coeffs(p1: GateParams, p2: GateParams) -> SymmetryCoeffs:
    """Coefficients of the p1-first composite in the basis (Jx, Jy, Jz, N)."""
    a, b = p1.first, p1.second
    g, d = p2.first, p2.second
    return SymmetryCoeffs(
        v_x=a * d + g * b,
        v_y=1j * (g * b - a * d),
        v_z=a * g - d * b,
        v_0=(a * g + d * b) / 2,
    )


def coupling(p1: GateParams, p2: GateParams) -> complex:
    """<0|U(alpha, beta) U(gamma, delta*)|0> = alpha*gamma + delta*beta."""
    return p1.first * p2.first + p2.second * p1.second


# ---------------------------------------------------------------------------
# matrices and commutators

def operator_matrix(op, n, out_dim=None):
    """Materialize ``op`` on D_n column by column.

    ``op`` maps a SymmetricState on n qubits to one on any fixed qubit count.
    Annihilated columns are zero. If every column is annihilated and
    ``out_dim`` is not given, the result is a 0 x (n+1) array.
    """
    cols = []
    for i in range(n + 1):
        basis = np.zeros(n + 1, dtype=complex)
        basis[i] = 1.0
        image = op(SymmetricState(n, basis))
        if image is ANNIHILATED:
            cols.append(None)
            continue
        out_dim = image.n + 1
        cols.append(image.amps)
    if out_dim is None:
        return np.zeros((0, n + 1), dtype=complex)
    return np.column_stack([c if c is not None else np.zeros(out_dim, complex) for c in cols])


def composed_matrix(n, p1: GateParams, p2: GateParams, order="p1_first"):
    return operator_matrix(lambda s: apply_composed(s, p1, p2, order), n, out_dim=n + 1)


def commutator(op_a, op_b, state):
    """[A, B]|psi> = A(B(psi)) - B(A(psi)); both orderings must land on one n."""
    ab = op_a(op_b(state))
    ba = op_b(op_a(state))
    if ab is ANNIHILATED and ba is ANNIHILATED:
        return ANNIHILATED
    if ab is ANNIHILATED:
        return -ba
    if ba is ANNIHILATED:
        return ab
    return ab - ba
