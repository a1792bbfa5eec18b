"""Hadamard transform on D_n and the fixed-point basis of the composite protocol map.

The composite studied here is the p1-first product (see :mod:`algebra`),
``M = v_x Jx + v_y Jy + v_z Jz + v_0 N``. With ``c = alpha*gamma + beta*delta``
the change of basis ``B = exp(i theta Jz) exp(i phi Jy)`` satisfies
``B^-1 M B = c (Jz + n/2)``, so column ``i`` of ``B`` is a fixed point with
eigenvalue ``c (n - i)``.
"""
from __future__ import annotations

import cmath
import math
import warnings
from dataclasses import dataclass
from math import comb
from typing import Optional

import mpmath
import numpy as np
import scipy.linalg

from . import algebra
from .algebra import GateParams
from .dicke_space import SymmetricState, normalize, vacuum
from .errors import DomainError, SpectralError
from .krawtchouk import krawtchouk_series, krawtchouk_values

DIAG_TOL = 1e-8
REAL_TOL = 1e-10
DEGENERATE_TOL = 1e-12
MP_BASIS_MAX_N = 40


@dataclass(frozen=True)
class Angles:
    theta: complex
    phi: complex

    @property
    def is_real(self) -> bool:
        return abs(self.theta.imag) <= REAL_TOL and abs(self.phi.imag) <= REAL_TOL


@dataclass(frozen=True)
class FixedPointBasis:
    n: int
    B: np.ndarray
    eigenvalues: np.ndarray
    angles: Optional[Angles]
    method: str  # "exponential" or "eigendecomposition"
    residual: float


# ---------------------------------------------------------------------------
# Hadamard transform

def hadamard_matrix(n):
    """H^{(x)n} restricted to D_n: 2^{-n/2} sqrt(C(n,i)C(n,k)) K_i(k; 1/2, n)."""
    sq = np.sqrt([comb(n, i) for i in range(n + 1)], dtype=float)
    # column k holds K_i(k) for i = 0..n
    kraw = np.column_stack([krawtchouk_values(k, 0.5, n) for k in range(n + 1)])
    return np.outer(sq, sq) * kraw / 2 ** (n / 2)


def hadamard_transform(state: SymmetricState) -> SymmetricState:
    return SymmetricState(state.n, hadamard_matrix(state.n) @ state.amps)


def adjacency_eigenvector(n, i) -> SymmetricState:
    """Symmetric eigenvector of the hypercube adjacency 2Jx with eigenvalue n - 2i."""
    if not 0 <= i <= n:
        raise DomainError(f"index i={i} outside 0..{n}")
    sq = np.sqrt([comb(n, k) for k in range(n + 1)], dtype=float)
    # K_k(i) for k = 0..n
    coeffs = sq * krawtchouk_values(i, 0.5, n)
    return normalize(SymmetricState(n, coeffs))[0]


# ---------------------------------------------------------------------------
# angles and the fixed-point basis

def angles(p1: GateParams, p2: GateParams) -> Angles:
    """Principal-branch angles from tan(theta) = v_y / v_x and cos(phi) = v_z / c.

    The branch is not guaranteed to diagonalize; :func:`build_fixed_point_basis`
    validates it and searches the sign / pi-shift alternatives.
    """
    c = algebra.coupling(p1, p2)
    if abs(c) <= DEGENERATE_TOL:
        raise SpectralError("alpha*gamma + delta*beta = 0: the composite has a single eigenvalue")
    v = algebra.symmetry_coeffs(p1, p2)
    if abs(v.v_x) > DEGENERATE_TOL:
        ratio = complex(v.v_y / v.v_x)
        if abs(ratio * ratio + 1) <= DEGENERATE_TOL:
            # tan(theta) = +-i: exactly one of alpha*delta, gamma*beta vanishes
            raise SpectralError("tan(theta) = +-i has no finite solution")
        theta = cmath.atan(ratio)
    elif abs(v.v_y) > DEGENERATE_TOL:
        theta = math.pi / 2  # tan(theta) infinite
    else:
        theta = 0.0
    phi = cmath.acos(complex(v.v_z / c))
    return Angles(complex(theta), phi)


def exponential_basis(n, ang: Angles) -> np.ndarray:
    """exp(i theta Jz) exp(i phi Jy) on D_n.

    For n <= MP_BASIS_MAX_N the matrix is the symmetric power of the 2x2
    group element, summed in extended precision and rounded once, so every
    entry is accurate to round-off. Complex angles make the entries span many
    orders of magnitude, and a double-precision matrix exponential is only
    accurate relative to the largest one.
    """
    if n <= MP_BASIS_MAX_N:
        return _exponential_basis_mp(n, ang)
    jz = np.diag((n - 2 * np.arange(n + 1)) / 2).astype(complex)
    left = np.diag(np.exp(1j * ang.theta * np.diag(jz)))
    if abs(ang.phi.imag) <= REAL_TOL:
        # Jy is hermitian: exponentiate through its eigendecomposition
        w, V = np.linalg.eigh(algebra.jy_matrix(n))
        right = (V * np.exp(1j * ang.phi.real * w)) @ V.conj().T
    else:
        right = scipy.linalg.expm(1j * ang.phi * algebra.jy_matrix(n))
    return left @ right


def _exponential_basis_mp(n, ang: Angles) -> np.ndarray:
    """Entry (k, i) is sqrt(k!(n-k)!/(i!(n-i)!)) [x^k] (u00 + u10 x)^(n-i) (u01 + u11 x)^i."""
    spread = n * (abs(ang.theta.imag) + abs(ang.phi.imag)) / math.log(10)
    with mpmath.workdps(30 + int(spread)):
        th, ph = mpmath.mpc(ang.theta), mpmath.mpc(ang.phi)
        cos, sin = mpmath.cos(ph / 2), mpmath.sin(ph / 2)
        up, down = mpmath.exp(1j * th / 2), mpmath.exp(-1j * th / 2)
        col0 = [up * cos, -down * sin]
        col1 = [up * sin, down * cos]

        def power(lin, e):
            out = [mpmath.mpc(1)]
            for _ in range(e):
                out = [(out[k] if k < len(out) else 0) * lin[0] + (out[k - 1] * lin[1] if k > 0 else 0)
                       for k in range(len(out) + 1)]
            return out

        fact = [mpmath.factorial(k) for k in range(n + 1)]
        B = np.empty((n + 1, n + 1), dtype=complex)
        for i in range(n + 1):
            a, b = power(col0, n - i), power(col1, i)
            col = [mpmath.fsum(a[r] * b[k - r] for r in range(max(0, k - i), min(k, n - i) + 1)) for k in range(n + 1)]
            col = [col[k] * mpmath.sqrt(fact[k] * fact[n - k] / (fact[i] * fact[n - i])) for k in range(n + 1)]
            norm = mpmath.sqrt(mpmath.fsum(abs(v) ** 2 for v in col))
            B[:, i] = [complex(v / norm) for v in col]
    return B


def _branches(ang: Angles):
    th, ph = ang.theta, ang.phi
    for t in (th, -th, th + math.pi, -th + math.pi):
        for p in (ph, -ph):
            yield Angles(complex(t), complex(p))


def _phase_fix(B):
    """Unit-norm columns with first nonzero entry positive real."""
    B = B / np.linalg.norm(B, axis=0)
    for j in range(B.shape[1]):
        col = B[:, j]
        nz = np.nonzero(np.abs(col) > 1e-14)[0]
        if nz.size:
            B[:, j] = col * abs(col[nz[0]]) / col[nz[0]]
    return B


def _diag_residual(M, B, target):
    D = np.linalg.solve(B, M @ B)
    scale = max(1.0, float(np.max(np.abs(target))))
    return float(np.max(np.abs(D - np.diag(target)))) / scale


def select_branch(p1: GateParams, p2: GateParams) -> Optional[Angles]:
    """The (theta, phi) branch that diagonalizes the composite on D_1, or ``None``.

    ``B`` is a group element and the conjugation identity holds in the Lie
    algebra, so a branch valid in the two-dimensional representation is valid
    on every D_n. Checking on D_1 avoids the growth of cond(B) with n.
    """
    M = algebra.composed_matrix(1, p1, p2)
    eig = algebra.coupling(p1, p2) * np.array([1.0, 0.0])
    best = None
    try:
        principal = angles(p1, p2)
    except SpectralError:
        return None
    for ang in _branches(principal):
        B = exponential_basis(1, ang)
        if not np.all(np.isfinite(B)):
            continue
        try:
            res = _diag_residual(M, B, eig)
        except np.linalg.LinAlgError:
            continue
        if res <= DIAG_TOL and (best is None or res < best[0]):
            best = (res, ang)
    return None if best is None else best[1]


def build_fixed_point_basis(n, p1: GateParams, p2: GateParams) -> FixedPointBasis:
    """Columns B|D_n^i> are eigenvectors with eigenvalue c (n - i).

    Uses the exponential construction with the branch from
    :func:`select_branch`. When no branch exists (tan(theta) infinite, i.e.
    exactly one of alpha*delta and gamma*beta vanishes) it falls back to a
    direct eigendecomposition and emits a :class:`RuntimeWarning`.

    ``residual`` is the double-precision value of max |B^-1 M B - diag|
    relative to max(1, max|lambda|). It grows like cond(B) * eps, and cond(B)
    can be huge for strongly non-normal composites (|v| >> |c|); see
    :func:`diagonalization_residual_mp` for an extended-precision check.
    """
    c = algebra.coupling(p1, p2)
    if abs(c) <= DEGENERATE_TOL:
        raise SpectralError("alpha*gamma + delta*beta = 0: no fixed-point basis of the required form")
    M = algebra.composed_matrix(n, p1, p2)
    eig = c * (n - np.arange(n + 1))
    ang = select_branch(p1, p2)
    if ang is not None:
        B = _phase_fix(exponential_basis(n, ang))
        if np.all(np.isfinite(B)):
            return FixedPointBasis(n, B, eig, ang, "exponential", _diag_residual(M, B, eig))
    warnings.warn(
        "exponential construction did not diagonalize the composite; using eigendecomposition",
        RuntimeWarning,
        stacklevel=2,
    )
    w, V = np.linalg.eig(M)
    order = []
    for lam in eig:
        dist = np.abs(w - lam)
        dist[order] = np.inf
        order.append(int(np.argmin(dist)))
    B = _phase_fix(V[:, order])
    if not np.all(np.isfinite(B)) or np.linalg.cond(B) > 1 / np.finfo(float).eps:
        raise SpectralError("composite operator is numerically not diagonalizable")
    return FixedPointBasis(n, B, eig, None, "eigendecomposition", _diag_residual(M, B, eig))


def diagonalization_residual_mp(n, p1: GateParams, p2: GateParams, ang: Optional[Angles] = None, dps=50):
    """max |B^-1 M B - diag(c (n - i))| / max(1, max|lambda|) in ``dps``-digit arithmetic.

    ``B = exp(i theta Jz) exp(i phi Jy)`` is rebuilt in mpmath from the same
    angles (by default those of :func:`select_branch`), so the result measures
    the construction itself rather than double-precision round-off amplified
    by cond(B).
    """
    if ang is None:
        ang = select_branch(p1, p2)
        if ang is None:
            raise SpectralError("no exponential branch exists for these parameters")
    with mpmath.workdps(dps):
        a, b = mpmath.mpc(p1.first), mpmath.mpc(p1.second)
        g, d = mpmath.mpc(p2.first), mpmath.mpc(p2.second)
        c = a * g + b * d
        M = mpmath.matrix(n + 1, n + 1)
        jy = mpmath.matrix(n + 1, n + 1)
        for i in range(n + 1):
            M[i, i] = a * g * (n - i) + d * b * i
            if i < n:
                root = mpmath.sqrt((n - i) * (i + 1))
                M[i, i + 1] = g * b * root
                jy[i, i + 1] = -1j * root / 2
                jy[i + 1, i] = 1j * root / 2
            if i > 0:
                M[i, i - 1] = a * d * mpmath.sqrt(i * (n - i + 1))
        theta, phi = mpmath.mpc(ang.theta), mpmath.mpc(ang.phi)
        left = mpmath.diag([mpmath.exp(1j * theta * (n - 2 * i) / 2) for i in range(n + 1)])
        B = left * mpmath.expm(1j * phi * jy)
        D = mpmath.inverse(B) * M * B
        worst = mpmath.mpf(0)
        for i in range(n + 1):
            for j in range(n + 1):
                target = c * (n - i) if i == j else 0
                worst = max(worst, abs(D[i, j] - target))
        scale = max(mpmath.mpf(1), abs(c) * n)
        return float(worst / scale)


def fixed_point_coefficients(n, j, p1: GateParams, p2: GateParams) -> np.ndarray:
    """Closed-form Krawtchouk expansion of the fixed point with eigenvalue c (n - j).

    psi_i proportional to (delta/gamma)^i sqrt(C(n,i)) K_i(j; beta*delta/c, n),
    scaled to unit norm with the first nonzero entry positive real. The
    Krawtchouk values come from the terminating series in extended precision;
    the forward recurrence is unstable for complex p far from 1/2.
    """
    if not 0 <= j <= n:
        raise DomainError(f"index j={j} outside 0..{n}")
    b = p1.second
    g, d = p2.first, p2.second
    c = algebra.coupling(p1, p2)
    if abs(g) <= DEGENERATE_TOL:
        raise DomainError("gamma = 0: closed form invalid, use build_fixed_point_basis")
    if abs(c) <= DEGENERATE_TOL:
        raise DomainError("alpha*gamma + beta*delta = 0: closed form invalid")
    p = b * d / c
    if abs(p) <= DEGENERATE_TOL:
        raise DomainError("beta*delta = 0: Krawtchouk parameter vanishes, use build_fixed_point_basis")
    # the series terms grow like |p|^-k and cancel, so sum them with enough guard digits
    digits = 30 + int(n * max(0.0, math.log10(1 / abs(p))))
    with mpmath.workdps(digits):
        mp_p = mpmath.mpc(p)
        kraw = np.array([complex(krawtchouk_series(i, j, mp_p, n)) for i in range(n + 1)])
    i = np.arange(n + 1)
    coeffs = (d / g) ** i * np.sqrt([comb(n, k) for k in i]) * kraw
    return _phase_fix(coeffs.reshape(-1, 1)).reshape(-1)


def fixed_point_recurrence_residual(n, j, p1, p2, coeffs) -> float:
    """Max residual of  lambda_j psi_i = (composite psi)_i  over i."""
    M = algebra.composed_matrix(n, p1, p2)
    lam = algebra.coupling(p1, p2) * (n - j)
    return float(np.max(np.abs(M @ coeffs - lam * coeffs)))


# ---------------------------------------------------------------------------
# unitary case: B as a tensor power of one single-qubit gate

def unitary_case_gate(p1: GateParams, p2: GateParams):
    """``(mu, nu)`` with B = (-i U(mu, nu))^{(x)n}, or ``None`` for complex angles.

    Uses the angle branch chosen by :func:`select_branch`.
    """
    ang = select_branch(p1, p2)
    if ang is None or not ang.is_real:
        return None
    theta, phi = ang.theta.real, ang.phi.real
    mu = 1j * cmath.exp(1j * theta / 2) * math.cos(phi / 2)
    nu = 1j * cmath.exp(1j * theta / 2) * math.sin(phi / 2)
    return mu, nu


def gate_matrix(first, second) -> np.ndarray:
    """U(a, b) = [[a, b], [b*, -a*]]."""
    return np.array([[first, second], [np.conj(second), -np.conj(first)]], dtype=complex)


def symmetric_power(gate, n) -> np.ndarray:
    """Restriction of gate^{(x)n} to D_n, built with the creation operators.

    gate^{(x)n} |D_n^i> = P2(G01, G11)^i P2(G00, G10)^{n-i} |D_0^0> / sqrt(i!(n-i)!).
    """
    gate = np.asarray(gate, dtype=complex)
    col0 = GateParams(gate[0, 0], gate[1, 0])
    col1 = GateParams(gate[0, 1], gate[1, 1])
    out = np.zeros((n + 1, n + 1), dtype=complex)
    for i in range(n + 1):
        s = vacuum()
        for _ in range(n - i):
            s = algebra.apply_p2(col0, s)
        for _ in range(i):
            s = algebra.apply_p2(col1, s)
        out[:, i] = s.amps / math.sqrt(math.factorial(i) * math.factorial(n - i))
    return out


def tensor_power_basis(n, mu, nu) -> np.ndarray:
    return symmetric_power(-1j * gate_matrix(mu, nu), n)
