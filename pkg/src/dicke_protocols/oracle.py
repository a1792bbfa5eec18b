"""Brute-force reference: dense 2^m statevectors and the hypercube scheme matrices.

Conventions: qubits are numbered 0..m-1 from the left, so qubit 0 is the most
significant bit of the basis index. Internally a state of ``m`` qubits is a
tensor of shape ``(2,) * m`` with axis ``k`` belonging to qubit ``k``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from math import comb
from typing import NamedTuple, Optional

import numpy as np
import scipy.sparse

from .algebra import GateParams
from .dicke_space import SymmetricState, normalize
from .errors import DegenerateStateError, DomainError, SizeError

MAX_QUBITS = 14
SCHEME_MAX_N = 10
DENSE_SPIN_MAX_N = 10
MAX_ANCILLAS = 8
SECTOR_TOL = 1e-8

PAULI = {
    "x": np.array([[0, 1], [1, 0]], dtype=complex),
    "y": np.array([[0, -1j], [1j, 0]], dtype=complex),
    "z": np.array([[1, 0], [0, -1]], dtype=complex),
}
HADAMARD = np.array([[1, 1], [1, -1]], dtype=complex) / math.sqrt(2)


def _check_size(m, cap=MAX_QUBITS):
    if m > cap:
        raise SizeError(f"{m} qubits exceeds the cap of {cap}")


class FullState:
    """Dense statevector on ``num_qubits`` qubits (qubit 0 leftmost)."""

    __slots__ = ("num_qubits", "amps")

    def __init__(self, num_qubits, amps):
        _check_size(num_qubits)
        arr = np.array(amps, dtype=complex).reshape(-1)
        if arr.shape[0] != 2 ** num_qubits:
            raise DomainError(f"expected {2 ** num_qubits} amplitudes, got {arr.shape[0]}")
        arr.setflags(write=False)
        object.__setattr__(self, "num_qubits", int(num_qubits))
        object.__setattr__(self, "amps", arr)

    def __setattr__(self, name, value):
        raise AttributeError("FullState is immutable")

    @classmethod
    def from_tensor(cls, tensor):
        return cls(tensor.ndim, tensor.reshape(-1))

    @classmethod
    def basis(cls, bits: str):
        """Computational basis state from a bitstring such as ``"0110"``."""
        m = len(bits)
        amps = np.zeros(2 ** m, dtype=complex)
        amps[int(bits, 2) if bits else 0] = 1.0
        return cls(m, amps)

    def tensor(self):
        return self.amps.reshape((2,) * self.num_qubits)

    @property
    def norm(self):
        return float(np.linalg.norm(self.amps))

    def __repr__(self):
        return f"FullState(num_qubits={self.num_qubits})"


def full_fidelity(a: FullState, b: FullState) -> float:
    na, nb = a.norm, b.norm
    if na == 0.0 or nb == 0.0:
        raise DegenerateStateError("fidelity undefined for a zero vector")
    return abs(np.vdot(a.amps, b.amps)) ** 2 / (na * nb) ** 2


def random_full_state(m, rng) -> FullState:
    amps = rng.normal(size=2 ** m) + 1j * rng.normal(size=2 ** m)
    return FullState(m, amps / np.linalg.norm(amps))


def hamming_weights(m):
    """Popcount of every basis index 0..2^m - 1."""
    idx = np.arange(2 ** m)
    return np.array([int(v).bit_count() for v in idx]) if m else np.zeros(1, dtype=int)


# ---------------------------------------------------------------------------
# symmetric subspace

def embed(state: SymmetricState) -> FullState:
    """sum_i psi_i C(n,i)^{-1/2} sum_{|x|=i} |x>."""
    n = state.n
    _check_size(n)
    w = hamming_weights(n)
    scale = np.array([1 / math.sqrt(comb(n, i)) for i in range(n + 1)])
    return FullState(n, state.amps[w] * scale[w])


def project_symmetric(full: FullState):
    """Return ``(component in D_m as a SymmetricState, norm of the orthogonal rest)``."""
    m = full.num_qubits
    w = hamming_weights(m)
    sums = np.bincount(w, weights=full.amps.real, minlength=m + 1) + 1j * np.bincount(
        w, weights=full.amps.imag, minlength=m + 1
    )
    coeffs = sums / np.sqrt([comb(m, i) for i in range(m + 1)])
    rest = full.norm ** 2 - float(np.sum(np.abs(coeffs) ** 2))
    return SymmetricState(m, coeffs), math.sqrt(max(rest, 0.0))


# ---------------------------------------------------------------------------
# gates and measurement

def gate_matrix(g: GateParams) -> np.ndarray:
    """U(a, b) = [[a, b], [b*, -a*]]."""
    a, b = g.first, g.second
    return np.array([[a, b], [np.conj(b), -np.conj(a)]], dtype=complex)


def _check_target(full, target):
    if not 0 <= target < full.num_qubits:
        raise DomainError(f"qubit {target} outside 0..{full.num_qubits - 1}")


def apply_gate(full: FullState, target, matrix) -> FullState:
    _check_target(full, target)
    t = np.tensordot(np.asarray(matrix, dtype=complex), full.tensor(), axes=([1], [target]))
    return FullState.from_tensor(np.moveaxis(t, 0, target))


def apply_single_qubit_gate(full: FullState, target, g: GateParams) -> FullState:
    return apply_gate(full, target, gate_matrix(g))


def apply_hadamard_all(full: FullState) -> FullState:
    for q in range(full.num_qubits):
        full = apply_gate(full, q, HADAMARD)
    return full


class Measurement(NamedTuple):
    outcome: int
    post: FullState
    probability: float


def measure_qubit(full: FullState, target, rng=None, forced=None) -> Measurement:
    """Projective Z measurement of ``target``; the qubit stays in the register.

    Pass ``forced=0`` or ``forced=1`` to condition on a branch, otherwise an
    explicit ``rng`` draws the outcome.
    """
    _check_target(full, target)
    t = full.tensor()
    branches = [np.take(t, b, axis=target) for b in (0, 1)]
    total = full.norm ** 2
    probs = [float(np.vdot(x, x).real) / total for x in branches]
    if forced is None:
        if rng is None:
            raise DomainError("measure_qubit needs an rng or a forced outcome")
        outcome = int(rng.random() >= probs[0])
    else:
        outcome = int(forced)
        if outcome not in (0, 1):
            raise DomainError(f"forced outcome must be 0 or 1, got {forced!r}")
    if probs[outcome] == 0.0:
        raise DegenerateStateError(f"outcome {outcome} of qubit {target} has probability 0")
    post = np.zeros_like(t)
    idx = [slice(None)] * t.ndim
    idx[target] = outcome
    post[tuple(idx)] = branches[outcome] / math.sqrt(probs[outcome] * total)
    return Measurement(outcome, FullState.from_tensor(post), probs[outcome])


def remove_qubit(full: FullState, target, value) -> FullState:
    """Drop ``target`` from a state in which it is known to be |value>."""
    _check_target(full, target)
    return FullState.from_tensor(np.take(full.tensor(), value, axis=target))


def append_qubit(full: FullState, qubit) -> FullState:
    """Tensor a single-qubit vector on the right (it becomes the last qubit)."""
    _check_size(full.num_qubits + 1)
    return FullState(full.num_qubits + 1, np.kron(full.amps, np.asarray(qubit, dtype=complex)))


def swap_qubits(full: FullState, a, b) -> FullState:
    _check_target(full, a)
    _check_target(full, b)
    return FullState.from_tensor(np.swapaxes(full.tensor(), a, b))


# ---------------------------------------------------------------------------
# Hamming scheme

@dataclass(frozen=True)
class SchemeMatrix:
    n: int
    kind: str  # "adjacency", "dual", "distance" or "all_ones"
    index: Optional[int]
    entries: scipy.sparse.csr_matrix

    def dense(self):
        return self.entries.toarray()


def distance_table(n):
    """Hamming distances between all pairs of n-bit strings."""
    x = np.arange(2 ** n)
    return hamming_weights(n)[x[:, None] ^ x[None, :]]


def scheme_matrix(n, kind, i=None) -> SchemeMatrix:
    """Integer matrices of the hypercube scheme on 2^n vertices."""
    _check_size(n, SCHEME_MAX_N)
    size = 2 ** n
    if kind == "adjacency":
        i = None
        mat = scipy.sparse.csr_matrix((distance_table(n) == 1).astype(np.int64))
    elif kind == "distance":
        if i is None or not 0 <= i <= n:
            raise DomainError(f"distance matrix index {i!r} outside 0..{n}")
        mat = scipy.sparse.csr_matrix((distance_table(n) == i).astype(np.int64))
    elif kind == "dual":
        i = None
        mat = scipy.sparse.diags(n - 2 * hamming_weights(n), format="csr", dtype=np.int64)
    elif kind == "all_ones":
        i = None
        mat = scipy.sparse.csr_matrix(np.ones((size, size), dtype=np.int64))
    else:
        raise DomainError(f"unknown scheme matrix kind {kind!r}")
    return SchemeMatrix(n, kind, i, mat)


def bose_mesner_coefficients(n):
    """Intersection numbers ``p[i, j, k]`` with A_i A_j = sum_k p[i,j,k] A_k.

    They are read off the first row and then checked on the whole matrix.
    Returns ``(p, max_abs_residual)``; the residual is an exact integer.
    """
    A = [scheme_matrix(n, "distance", k).dense() for k in range(n + 1)]
    w = hamming_weights(n)
    rep = [int(np.argmax(w == k)) for k in range(n + 1)]  # one vertex per distance
    p = np.zeros((n + 1, n + 1, n + 1), dtype=np.int64)
    worst = 0
    for i in range(n + 1):
        for j in range(n + 1):
            prod = A[i] @ A[j]
            p[i, j] = [prod[0, rep[k]] for k in range(n + 1)]
            recon = sum(p[i, j, k] * A[k] for k in range(n + 1))
            worst = max(worst, int(np.max(np.abs(prod - recon))))
    return p, worst


def krawtchouk_polynomial_coeffs(i, n, p=Fraction(1, 2)):
    """Exact coefficients ``c_k`` of K_i(x) = sum_k c_k (-x)_k."""
    coeffs = []
    c = Fraction(1)
    for k in range(i + 1):
        coeffs.append(c)
        if k < i:
            c = c * (k - i) / ((k - n) * (k + 1) * p)
    return coeffs


def distance_from_adjacency(n, i):
    """C(n,i) K_i((n - A)/2; 1/2, n) evaluated in exact rational arithmetic."""
    A = scheme_matrix(n, "adjacency").dense()
    size = 2 ** n
    ident = np.eye(size, dtype=np.int64)
    X = (n * ident - A).astype(object) * Fraction(1, 2)
    result = np.zeros((size, size), dtype=object)
    result[:] = Fraction(0)
    rising = ident.astype(object)  # (-X)_0 = I
    for k, ck in enumerate(krawtchouk_polynomial_coeffs(i, n)):
        result = result + ck * rising
        rising = rising.dot(-X + k * ident)
    return comb(n, i) * result


def dicke_from_distance(n, i) -> FullState:
    """A_i |0...0> / sqrt(C(n,i))."""
    col = scheme_matrix(n, "distance", i).entries[:, 0].toarray().reshape(-1)
    return FullState(n, col / math.sqrt(comb(n, i)))


# ---------------------------------------------------------------------------
# total angular momentum

def _site_operator(op, site, n):
    out = np.ones((1, 1), dtype=complex)
    for k in range(n):
        out = np.kron(out, op if k == site else np.eye(2))
    return out


def total_angular_momentum_matrix(n, axis) -> np.ndarray:
    """J^a = sum over sites of sigma^a / 2, as a dense 2^n matrix."""
    _check_size(n, DENSE_SPIN_MAX_N)
    if axis not in PAULI:
        raise DomainError(f"axis must be 'x', 'y' or 'z', got {axis!r}")
    return sum((_site_operator(PAULI[axis] / 2, k, n) for k in range(n)), np.zeros((2 ** n,) * 2, complex))


def casimir_matrix(n) -> np.ndarray:
    out = np.zeros((2 ** n, 2 ** n), dtype=complex)
    for axis in "xyz":
        J = total_angular_momentum_matrix(n, axis)
        out += J @ J
    return out


def hadamard_all_matrix(n) -> np.ndarray:
    out = np.ones((1, 1), dtype=complex)
    for _ in range(n):
        out = np.kron(out, HADAMARD)
    return out


def angular_momentum_sectors(m, tol=SECTOR_TOL):
    """Orthonormal bases of the total-j eigenspaces, keyed by 2j."""
    w, V = np.linalg.eigh(casimir_matrix(m))
    sectors = {}
    for two_j in range(m % 2, m + 1, 2):
        j = two_j / 2
        mask = np.abs(w - j * (j + 1)) <= tol * max(1.0, j * (j + 1))
        if mask.any():
            sectors[two_j] = V[:, mask]
    return sectors


def sector_weights(full: FullState, sectors=None):
    """Squared norm of ``full`` in each total-j sector (keys are 2j)."""
    if sectors is None:
        sectors = angular_momentum_sectors(full.num_qubits)
    return {k: float(np.sum(np.abs(V.conj().T @ full.amps) ** 2)) for k, V in sectors.items()}


# ---------------------------------------------------------------------------
# cyclic shift and phase estimation

def cyclic_shift(full: FullState, fast=False) -> FullState:
    """|x_1 x_2 ... x_m> -> |x_m x_1 ... x_{m-1}>.

    The circuit form is the SWAP chain (m-1, m), (m-2, m-1), ..., (1, 2);
    ``fast=True`` relabels the tensor axes in one step instead.
    """
    m = full.num_qubits
    if m < 2:
        return full
    if fast:
        return FullState.from_tensor(np.moveaxis(full.tensor(), m - 1, 0))
    for q in range(m - 2, -1, -1):
        full = swap_qubits(full, q, q + 1)
    return full


def _controlled_swap(t, control, a, b):
    """Fredkin gate on tensor axes (in place on a copy)."""
    out = t.copy()
    idx = [slice(None)] * t.ndim
    idx[control] = 1
    a2, b2 = a - (a > control), b - (b > control)
    out[tuple(idx)] = np.swapaxes(t[tuple(idx)], a2, b2)
    return out


def _controlled_shift_power(t, control, sys_axes, power, fast):
    """Apply sigma^power to the system axes, conditioned on ``control`` = 1."""
    m = len(sys_axes)
    if fast:
        out = t.copy()
        idx = [slice(None)] * t.ndim
        idx[control] = 1
        sub = t[tuple(idx)]
        shifted = [ax - (ax > control) for ax in sys_axes]
        # sigma^p moves the content of system position (j - p) mod m to position j
        perm = list(range(sub.ndim))
        for j in range(m):
            perm[shifted[j]] = shifted[(j - power) % m]
        out[tuple(idx)] = np.transpose(sub, perm)
        return out
    for _ in range(power):
        for q in range(m - 2, -1, -1):
            t = _controlled_swap(t, control, sys_axes[q], sys_axes[q + 1])
    return t


def inverse_qft_matrix(t):
    dim = 2 ** t
    k = np.arange(dim)
    return np.exp(-2j * np.pi * np.outer(k, k) / dim) / math.sqrt(dim)


class QPEResult(NamedTuple):
    accepted: bool
    post: Optional[FullState]
    probability: float  # exact probability of the all-zero (accepting) readout
    outcome: int
    outcome_probability: float


def qpe_angular_momentum(full: FullState, t, rng=None, forced=None, fast=False) -> QPEResult:
    """Phase estimation of the cyclic shift with ``t`` ancillas.

    Ancilla ``a`` (most significant first) controls sigma^(2^(t-1-a)). After
    the inverse QFT the ancillas are read out; the run accepts iff they all
    read 0. ``forced`` fixes the readout (an integer, 0 meaning accept).
    """
    m = full.num_qubits
    if t < 1 or t > MAX_ANCILLAS:
        raise DomainError(f"ancilla count t={t} outside 1..{MAX_ANCILLAS}")
    _check_size(m + t)
    dim = 2 ** t
    # ancillas after the Hadamard layer: uniform superposition
    tensor = np.multiply.outer(np.full((2,) * t, 1 / math.sqrt(dim)), full.tensor())
    sys_axes = list(range(t, t + m))
    for a in range(t):
        tensor = _controlled_shift_power(tensor, a, sys_axes, 2 ** (t - 1 - a), fast)
    flat = inverse_qft_matrix(t) @ tensor.reshape(dim, -1)
    total = full.norm ** 2
    probs = np.sum(np.abs(flat) ** 2, axis=1) / total
    if forced is None:
        if rng is None:
            raise DomainError("qpe_angular_momentum needs an rng or a forced outcome")
        outcome = int(rng.choice(dim, p=probs / probs.sum()))
    else:
        outcome = int(forced)
        if not 0 <= outcome < dim:
            raise DomainError(f"forced outcome {forced!r} outside 0..{dim - 1}")
    p_out = float(probs[outcome])
    post = None
    if p_out > 0.0:
        post = FullState(m, flat[outcome] / math.sqrt(p_out * total))
    return QPEResult(outcome == 0, post, float(probs[0]), outcome, p_out)


def zero_readout_probability(phase, t):
    """|2^-t sum_{k<2^t} exp(2 pi i phase k)|^2."""
    k = np.arange(2 ** t)
    return float(abs(np.mean(np.exp(2j * np.pi * phase * k))) ** 2)


def shift_eigenspace_weights(full: FullState):
    """Weights of ``full`` on the eigenspaces of the cyclic shift.

    Entry ``l`` is ||P_l psi||^2 where sigma acts as exp(2 pi i l / m) on the
    range of P_l = (1/m) sum_k exp(-2 pi i l k / m) sigma^k.
    """
    m = max(full.num_qubits, 1)
    powers = [full.amps]
    cur = full
    for _ in range(1, m):
        cur = cyclic_shift(cur, fast=True)
        powers.append(cur.amps)
    powers = np.array(powers)
    k = np.arange(m)
    weights = []
    for ell in range(m):
        proj = np.exp(-2j * np.pi * ell * k / m) @ powers / m
        weights.append(float(np.vdot(proj, proj).real))
    return np.array(weights)


def predicted_acceptance(full: FullState, t):
    """Exact accept probability: eigenspace weights times the zero-readout sums."""
    m = max(full.num_qubits, 1)
    w = shift_eigenspace_weights(full) / full.norm ** 2
    return float(sum(w[ell] * zero_readout_probability(ell / m, t) for ell in range(m)))


# ---------------------------------------------------------------------------
# protocols at the qubit level

class Protocol1Oracle(NamedTuple):
    success_prob: float
    success_state: Optional[SymmetricState]
    failure_state: Optional[SymmetricState]
    residual: float  # norm outside the symmetric subspace after the measurement
    target: int


def _unit(state):
    return None if state.norm == 0.0 else normalize(state)[0]


def protocol1_oracle(state: SymmetricState, g: GateParams, target=None) -> Protocol1Oracle:
    """Gate ``g`` on one qubit, measure it, keep the rest; default target is the last qubit."""
    n = state.n
    if n == 0:
        raise DomainError("Protocol 1 needs at least one qubit")
    target = n - 1 if target is None else target
    full = apply_single_qubit_gate(embed(state), target, g)
    t = full.tensor()
    out = {}
    residual = 0.0
    for bit in (0, 1):
        branch = FullState.from_tensor(np.take(t, bit, axis=target)) if n > 1 else FullState(0, t[bit : bit + 1])
        sym, res = project_symmetric(branch)
        residual = max(residual, res)
        out[bit] = (branch.norm ** 2, sym)
    return Protocol1Oracle(out[0][0], _unit(out[0][1]), _unit(out[1][1]), residual, target)


class Protocol2Oracle(NamedTuple):
    success_prob: float
    success_state: Optional[SymmetricState]
    residual: float  # norm of the accepted post-state outside D_{n+1}


def protocol2_oracle(state: SymmetricState, g: GateParams, t=None, mode="projector", fast=False):
    """Append gamma|0> + delta|1> and keep the maximal-j part.

    ``mode="projector"`` projects exactly onto the symmetric subspace;
    ``mode="qpe"`` runs :func:`qpe_angular_momentum` with ``t`` ancillas and
    conditions on acceptance, so its success probability includes false accepts.
    """
    fresh = gate_matrix(GateParams(g.first, np.conj(g.second)))[:, 0]
    full = append_qubit(embed(state), fresh)
    if mode == "projector":
        sym, res = project_symmetric(full)
        return Protocol2Oracle(sym.norm ** 2, _unit(sym), 0.0)
    if mode == "qpe":
        if t is None:
            raise DomainError("qpe mode needs an ancilla count t")
        run = qpe_angular_momentum(full, t, forced=0, fast=fast)
        if run.post is None:
            return Protocol2Oracle(run.probability, None, 0.0)
        sym, res = project_symmetric(run.post)
        return Protocol2Oracle(run.probability, _unit(sym), res)
    raise DomainError(f"mode must be 'projector' or 'qpe', got {mode!r}")
