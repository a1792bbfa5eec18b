"""Permutation-symmetric qubit states in the Dicke basis.

A :class:`SymmetricState` on ``n`` qubits stores the ``n + 1`` amplitudes
``psi_i = <D_n^i|psi>``. States on different qubit counts never mix; operators
that add or remove qubits return a state with the new ``n``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from numbers import Integral

import numpy as np

from .errors import DegenerateStateError, DimensionError, DomainError

NORM_TOL = 1e-10
FORMAT_VERSION = 1


@dataclass(frozen=True)
class DickeIndex:
    n: int
    i: int

    def __post_init__(self):
        if not isinstance(self.n, Integral) or self.n < 0:
            raise DomainError(f"qubit count must be a nonnegative integer, got {self.n!r}")
        if not isinstance(self.i, Integral) or not 0 <= self.i <= self.n:
            raise DomainError(f"excitation number {self.i!r} outside 0..{self.n}")


class SymmetricState:
    """Immutable vector in the (n+1)-dimensional symmetric subspace D_n.

    Unnormalized vectors are legal (they are the images of the linear maps in
    :mod:`dicke_protocols.algebra`); :attr:`is_normalized` reports the flag.
    """

    __slots__ = ("n", "amps")

    def __init__(self, n, amps):
        if not isinstance(n, Integral) or n < 0:
            raise DomainError(f"qubit count must be a nonnegative integer, got {n!r}")
        arr = np.array(amps, dtype=complex).reshape(-1)
        if arr.shape[0] != n + 1:
            raise DimensionError(f"expected {n + 1} amplitudes for n={n}, got {arr.shape[0]}")
        arr.setflags(write=False)
        object.__setattr__(self, "n", int(n))
        object.__setattr__(self, "amps", arr)

    def __setattr__(self, name, value):
        raise AttributeError("SymmetricState is immutable")

    def __repr__(self):
        return f"SymmetricState(n={self.n}, amps={np.array2string(self.amps, precision=6)})"

    def __eq__(self, other):
        if not isinstance(other, SymmetricState):
            return NotImplemented
        return self.n == other.n and np.array_equal(self.amps, other.amps)

    __hash__ = None

    # linear-space helpers; all require matching n
    def _check(self, other):
        if not isinstance(other, SymmetricState):
            return NotImplemented
        if other.n != self.n:
            raise DimensionError(f"cannot combine states on {self.n} and {other.n} qubits")
        return None

    def __add__(self, other):
        bad = self._check(other)
        if bad is NotImplemented:
            return bad
        return SymmetricState(self.n, self.amps + other.amps)

    def __sub__(self, other):
        bad = self._check(other)
        if bad is NotImplemented:
            return bad
        return SymmetricState(self.n, self.amps - other.amps)

    def __mul__(self, scalar):
        if not np.isscalar(scalar):
            return NotImplemented
        return SymmetricState(self.n, self.amps * scalar)

    __rmul__ = __mul__

    def __neg__(self):
        return SymmetricState(self.n, -self.amps)

    @property
    def norm(self) -> float:
        return float(np.linalg.norm(self.amps))

    @property
    def is_normalized(self) -> bool:
        return abs(float(np.vdot(self.amps, self.amps).real) - 1.0) <= NORM_TOL

    @property
    def is_zero(self) -> bool:
        return not np.any(self.amps)

    def to_json(self) -> dict:
        return state_to_json(self)


def dicke_state(n, i) -> SymmetricState:
    """The basis vector |D_n^i>."""
    idx = DickeIndex(n, i)
    amps = np.zeros(idx.n + 1, dtype=complex)
    amps[idx.i] = 1.0
    return SymmetricState(idx.n, amps)


def vacuum() -> SymmetricState:
    """|D_0^0>, the state with no qubits."""
    return dicke_state(0, 0)


def zero_state(n) -> SymmetricState:
    return SymmetricState(n, np.zeros(n + 1, dtype=complex))


def inner_product(a: SymmetricState, b: SymmetricState) -> complex:
    """<a|b>, antilinear in ``a``."""
    if a.n != b.n:
        raise DimensionError(f"inner product between n={a.n} and n={b.n}")
    return complex(np.vdot(a.amps, b.amps))


def fidelity(a: SymmetricState, b: SymmetricState) -> float:
    """|<a|b>|^2 / (<a|a><b|b>): overlap of the two rays."""
    na = float(np.vdot(a.amps, a.amps).real)
    nb = float(np.vdot(b.amps, b.amps).real)
    if na == 0.0 or nb == 0.0:
        raise DegenerateStateError("fidelity undefined for a zero vector")
    return abs(inner_product(a, b)) ** 2 / (na * nb)


def last_qubit_split_coeffs(n, i):
    """Coefficients of |D_{n-1}^{i-1}>|1> and |D_{n-1}^i>|0> in |D_n^i>."""
    idx = DickeIndex(n, i)
    if idx.n == 0:
        raise DomainError("the vacuum has no qubit to split off")
    return math.sqrt(idx.i / idx.n), math.sqrt((idx.n - idx.i) / idx.n)


def normalize(state: SymmetricState):
    """Return ``(unit_state, original_norm)``."""
    norm = state.norm
    if norm == 0.0:
        raise DegenerateStateError(f"cannot normalize the zero vector on n={state.n}")
    return SymmetricState(state.n, state.amps / norm), norm


def random_state(n, rng) -> SymmetricState:
    """Haar-like random normalized state (complex Gaussian amplitudes)."""
    amps = rng.normal(size=n + 1) + 1j * rng.normal(size=n + 1)
    return normalize(SymmetricState(n, amps))[0]


def state_to_json(state: SymmetricState) -> dict:
    # float() round-trips exactly through json (repr uses 17 significant digits)
    return {
        "format_version": FORMAT_VERSION,
        "n": state.n,
        "amplitudes": [[float(z.real), float(z.imag)] for z in state.amps],
    }


def state_from_json(data) -> SymmetricState:
    """Parse ``{"n": int, "amplitudes": [[re, im], ...]}``.

    Raises :class:`DomainError` / :class:`DimensionError` on malformed input.
    """
    if not isinstance(data, dict):
        raise DomainError("state JSON must be an object")
    try:
        n = data["n"]
        raw = data["amplitudes"]
    except KeyError as exc:
        raise DomainError(f"state JSON missing field {exc.args[0]!r}") from None
    if isinstance(n, bool) or not isinstance(n, int):
        raise DomainError(f"'n' must be an integer, got {n!r}")
    if not isinstance(raw, list):
        raise DomainError("'amplitudes' must be a list of [re, im] pairs")
    amps = []
    for entry in raw:
        if (
            not isinstance(entry, (list, tuple))
            or len(entry) != 2
            or not all(isinstance(v, (int, float)) and not isinstance(v, bool) for v in entry)
        ):
            raise DomainError(f"malformed amplitude entry {entry!r}")
        amps.append(complex(entry[0], entry[1]))
    if not np.all(np.isfinite(amps)):
        raise DomainError("amplitudes must be finite")
    return SymmetricState(n, amps)
