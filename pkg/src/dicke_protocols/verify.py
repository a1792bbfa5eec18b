"""Invariant suites run by ``dicke-protocols verify``.

Each check returns one measured residual and compares it with a named
tolerance. Tolerances can be overridden per name, or with ``"*"`` for all.
"""
from __future__ import annotations

import json
import math
import os
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from . import algebra, oracle, preparation, protocols, spectral
from .algebra import GateParams
from .dicke_space import FORMAT_VERSION, dicke_state, fidelity, random_state
from .errors import DomainError
from .krawtchouk import krawtchouk_series, krawtchouk_values, recurrence_residual

TOLERANCE_ENV = "DICKE_PROTOCOLS_TOLERANCES"

DEFAULT_TOLERANCES = {
    "weyl_commutators": 1e-10,
    "number_ladder": 1e-10,
    "composite_offset": 1e-10,
    "symmetry_identification": 1e-10,
    "su2_relations": 1e-10,
    "casimir": 1e-10,
    "diagonalization": 1e-8,
    "closed_form_overlap": 1e-8,
    "hadamard_oracle": 1e-10,
    "hadamard_involution": 1e-10,
    "bose_mesner": 0.0,
    "p_polynomial": 0.0,
    "dicke_from_distance": 1e-12,
    "hadamard_conjugation": 1e-10,
    "adjacency_spin": 1e-10,
    "clebsch_gordan": 1e-10,
    "qpe_zero_phase": 1e-12,
    "qpe_singlet": 1e-12,
    "qpe_geometric_sum": 1e-10,
    "qpe_fredkin_fast": 1e-12,
    "qpe_false_accept_gap": 1e-10,
    "qpe_symmetric_weight": 1e-10,
    "protocol1_oracle": 1e-10,
    "protocol2_oracle": 1e-10,
    "branch_sum": 1e-10,
    "preparation_roundtrip": 1e-8,
    "krawtchouk_duality": 1e-10,
    "krawtchouk_recurrence": 1e-10,
}

SUITES = ("all", "algebra", "spectral", "scheme", "qpe", "protocols", "preparation", "krawtchouk")


@dataclass
class CheckResult:
    name: str
    residual: float
    tolerance: float

    @property
    def passed(self):
        return bool(np.isfinite(self.residual) and self.residual <= self.tolerance)

    def to_json(self):
        return {"name": self.name, "residual": self.residual, "tolerance": self.tolerance, "passed": self.passed}


def load_tolerances(overrides=None, env=None):
    """Defaults, then the JSON file named by ``$DICKE_PROTOCOLS_TOLERANCES``, then ``overrides``."""
    tol = dict(DEFAULT_TOLERANCES)
    env = os.environ if env is None else env
    path = env.get(TOLERANCE_ENV)
    layers = []
    if path:
        try:
            with open(path) as fh:
                layers.append(json.load(fh))
        except (OSError, json.JSONDecodeError) as exc:
            raise DomainError(f"cannot read tolerance file {path!r}: {exc}") from None
    if overrides:
        layers.append(overrides)
    for layer in layers:
        if not isinstance(layer, dict):
            raise DomainError("tolerance overrides must map names to numbers")
        for name, value in layer.items():
            if isinstance(value, bool) or not isinstance(value, (int, float)) or value < 0:
                raise DomainError(f"tolerance {name!r} must be a nonnegative number")
            if name == "*":
                tol = {k: float(value) for k in tol}
            elif name in tol:
                tol[name] = float(value)
            else:
                raise DomainError(f"unknown tolerance name {name!r}")
    return tol


def _draws(rng, k):
    return [(GateParams.random(rng), GateParams.random(rng)) for _ in range(k)]


def _basis(n):
    return [dicke_state(n, i) for i in range(n + 1)]


def _sub(a, b):
    """Residual norm between two operator images, treating ANNIHILATED as zero."""
    if a is algebra.ANNIHILATED and b is algebra.ANNIHILATED:
        return 0.0
    if a is algebra.ANNIHILATED:
        return b.norm
    if b is algebra.ANNIHILATED:
        return a.norm
    return (a - b).norm


# ---------------------------------------------------------------------------
# algebra

def check_weyl(max_n, rng, draws=5):
    ops = {"a1": algebra.apply_a1, "a2": algebra.apply_a2}
    daggers = {"a1": algebra.apply_a1_dag, "a2": algebra.apply_a2_dag}
    worst = 0.0
    for n in range(max_n + 1):
        for s in _basis(n):
            for x, lower in ops.items():
                for y, raise_ in daggers.items():
                    expected = s if x == y else 0 * s
                    worst = max(worst, _sub(algebra.commutator(lower, raise_, s), expected))
            worst = max(worst, _sub(algebra.commutator(algebra.apply_a1, algebra.apply_a2, s), algebra.ANNIHILATED))
            worst = max(worst, algebra.commutator(algebra.apply_a1_dag, algebra.apply_a2_dag, s).norm)
    return worst


def check_number_ladder(max_n, rng, draws=5):
    worst = 0.0
    for p1, p2 in _draws(rng, draws):
        P1 = lambda s, g=p1: algebra.apply_p1(g, s)  # noqa: E731
        P2 = lambda s, g=p2: algebra.apply_p2(g, s)  # noqa: E731
        for n in range(max_n + 1):
            for s in _basis(n):
                worst = max(worst, _sub(algebra.commutator(algebra.apply_number, P2, s), P2(s)))
                minus_p1 = P1(s)
                minus_p1 = minus_p1 if minus_p1 is algebra.ANNIHILATED else -minus_p1
                worst = max(worst, _sub(algebra.commutator(algebra.apply_number, P1, s), minus_p1))
    return worst


def check_composite_offset(max_n, rng, draws=5):
    """p2_first composite minus p1_first composite equals (alpha gamma + beta delta) Id."""
    worst = 0.0
    for p1, p2 in _draws(rng, draws):
        c = algebra.coupling(p1, p2)
        for n in range(max_n + 1):
            diff = algebra.composed_matrix(n, p1, p2, "p2_first") - algebra.composed_matrix(n, p1, p2, "p1_first")
            worst = max(worst, float(np.max(np.abs(diff - c * np.eye(n + 1)))))
    return worst


def symmetry_matrix(n, p1, p2):
    v = algebra.symmetry_coeffs(p1, p2)
    return (
        v.v_x * algebra.jx_matrix(n)
        + v.v_y * algebra.jy_matrix(n)
        + v.v_z * algebra.jz_matrix(n)
        + v.v_0 * n * np.eye(n + 1)
    )


def check_symmetry_identification(max_n, rng, draws=5):
    worst = 0.0
    for p1, p2 in _draws(rng, draws):
        for n in range(max_n + 1):
            diff = algebra.composed_matrix(n, p1, p2) - symmetry_matrix(n, p1, p2)
            worst = max(worst, float(np.max(np.abs(diff))))
    return worst


def check_su2(max_n, rng=None):
    worst = 0.0
    for n in range(max_n + 1):
        X, Y, Z = algebra.jx_matrix(n), algebra.jy_matrix(n), algebra.jz_matrix(n)
        for A, B, C in ((X, Y, Z), (Y, Z, X), (Z, X, Y)):
            worst = max(worst, float(np.max(np.abs(A @ B - B @ A - 1j * C))))
    return worst


def check_casimir(max_n, rng=None):
    worst = 0.0
    for n in range(max_n + 1):
        X, Y, Z = algebra.jx_matrix(n), algebra.jy_matrix(n), algebra.jz_matrix(n)
        cas = X @ X + Y @ Y + Z @ Z
        worst = max(worst, float(np.max(np.abs(cas - (n / 2) * (n / 2 + 1) * np.eye(n + 1)))))
    return worst


# ---------------------------------------------------------------------------
# spectral

def check_diagonalization(max_n, rng, draws=5):
    """B^-1 M B against diag(c (n - i)), evaluated in extended precision.

    The double-precision value is limited by cond(B) * eps, which is
    unbounded for strongly non-normal composites.
    """
    worst = 0.0
    for p1, p2 in _draws(rng, draws):
        for n in range(1, max_n + 1):
            worst = max(worst, spectral.diagonalization_residual_mp(n, p1, p2))
    return worst


def check_closed_form(max_n, rng, draws=5):
    worst = 0.0
    for p1, p2 in _draws(rng, draws):
        for n in range(1, max_n + 1):
            B = spectral.build_fixed_point_basis(n, p1, p2).B
            for j in range(n + 1):
                coeffs = spectral.fixed_point_coefficients(n, j, p1, p2)
                overlap = abs(np.vdot(B[:, j], coeffs)) ** 2 / (
                    np.vdot(B[:, j], B[:, j]).real * np.vdot(coeffs, coeffs).real
                )
                worst = max(worst, 1 - overlap)
    return worst


def check_hadamard_oracle(max_n, rng):
    worst = 0.0
    for n in range(max_n + 1):
        s = random_state(n, rng)
        mine = spectral.hadamard_transform(s)
        ref, _ = oracle.project_symmetric(oracle.apply_hadamard_all(oracle.embed(s)))
        worst = max(worst, 1 - fidelity(mine, ref), abs(mine.norm - 1))
    return worst


def check_hadamard_involution(max_n, rng=None):
    worst = 0.0
    for n in range(max_n + 1):
        H = spectral.hadamard_matrix(n)
        worst = max(worst, float(np.max(np.abs(H @ H - np.eye(n + 1)))))
    return worst


# ---------------------------------------------------------------------------
# Hamming scheme and angular momentum on the full space

def check_bose_mesner(max_n, rng=None):
    return float(max(oracle.bose_mesner_coefficients(n)[1] for n in range(1, max_n + 1)))


def check_p_polynomial(max_n, rng=None):
    """Count of entries where A_i differs from C(n,i) K_i((n - A)/2) (exact)."""
    bad = 0
    for n in range(1, max_n + 1):
        for i in range(n + 1):
            exact = oracle.distance_from_adjacency(n, i)
            bad += int(np.sum(exact != oracle.scheme_matrix(n, "distance", i).dense()))
    return float(bad)


def check_dicke_from_distance(max_n, rng=None):
    worst = 0.0
    for n in range(1, max_n + 1):
        for i in range(n + 1):
            diff = oracle.dicke_from_distance(n, i).amps - oracle.embed(dicke_state(n, i)).amps
            worst = max(worst, float(np.max(np.abs(diff))))
    return worst


def check_hadamard_conjugation(max_n, rng=None):
    worst = 0.0
    for n in range(1, max_n + 1):
        H = oracle.hadamard_all_matrix(n)
        A = oracle.scheme_matrix(n, "adjacency").dense()
        D = oracle.scheme_matrix(n, "dual").dense()
        worst = max(worst, float(np.max(np.abs(H @ A @ H - D))))
    return worst


def check_adjacency_spin(max_n, rng=None):
    worst = 0.0
    for n in range(1, max_n + 1):
        A = oracle.scheme_matrix(n, "adjacency").dense()
        D = oracle.scheme_matrix(n, "dual").dense()
        worst = max(worst, float(np.max(np.abs(2 * oracle.total_angular_momentum_matrix(n, "x") - A))))
        worst = max(worst, float(np.max(np.abs(2 * oracle.total_angular_momentum_matrix(n, "z") - D))))
    return worst


def clebsch_gordan_expected(n, i, bit):
    """Squared weights (maximal j, j - 1) of |D_n^i>|bit>."""
    if bit == 0:
        return (n + 1 - i) / (n + 1), i / (n + 1)
    return (i + 1) / (n + 1), (n - i) / (n + 1)


def check_clebsch_gordan(max_n, rng=None):
    worst = 0.0
    for n in range(1, max_n + 1):
        sectors = oracle.angular_momentum_sectors(n + 1)
        for i in range(n + 1):
            for bit in (0, 1):
                qubit = np.eye(2)[bit]
                full = oracle.append_qubit(oracle.embed(dicke_state(n, i)), qubit)
                w = oracle.sector_weights(full, sectors)
                hi, lo = clebsch_gordan_expected(n, i, bit)
                worst = max(worst, abs(w.get(n + 1, 0.0) - hi), abs(w.get(n - 1, 0.0) - lo))
                # the maximal-j component is the expected Dicke state itself
                sym, _ = oracle.project_symmetric(full)
                target = np.zeros(n + 2)
                target[i + bit] = math.sqrt(hi)
                worst = max(worst, float(np.max(np.abs(sym.amps - target))))
    return worst


# ---------------------------------------------------------------------------
# phase estimation

def check_qpe_zero_phase(max_m, rng, max_t=4):
    worst = 0.0
    for m in range(1, max_m + 1):
        s = random_state(m, rng)
        for t in range(1, max_t + 1):
            if m + t > oracle.MAX_QUBITS:
                continue
            worst = max(worst, 1 - oracle.qpe_angular_momentum(oracle.embed(s), t, forced=0, fast=True).probability)
    return worst


def singlet():
    return oracle.FullState(2, np.array([0, 1, -1, 0]) / math.sqrt(2))


def check_qpe_singlet(max_m=None, rng=None):
    return oracle.qpe_angular_momentum(singlet(), 1, forced=0).probability


def shift_eigenvector(m, ell):
    """(1/sqrt m) sum_k exp(-2 pi i ell k / m) sigma^k |10...0>, eigenvalue exp(2 pi i ell / m)."""
    base = oracle.FullState.basis("1" + "0" * (m - 1))
    amps = np.zeros(2 ** m, dtype=complex)
    cur = base
    for k in range(m):
        amps += np.exp(-2j * np.pi * ell * k / m) * cur.amps
        cur = oracle.cyclic_shift(cur)
    return oracle.FullState(m, amps / math.sqrt(m))


def check_qpe_geometric_sum(max_m=None, rng=None):
    state = shift_eigenvector(3, 1)
    measured = oracle.qpe_angular_momentum(state, 2, forced=0).probability
    return abs(measured - 1 / 16)


def check_qpe_fredkin_fast(max_m, rng, max_t=3):
    worst = 0.0
    for m in range(2, max_m + 1):
        f = oracle.random_full_state(m, rng)
        for t in range(1, max_t + 1):
            if m + t > oracle.MAX_QUBITS:
                continue
            slow = oracle.qpe_angular_momentum(f, t, forced=0)
            fast = oracle.qpe_angular_momentum(f, t, forced=0, fast=True)
            worst = max(worst, abs(slow.probability - fast.probability), 1 - oracle.full_fidelity(slow.post, fast.post))
    return worst


def check_qpe_false_accept_gap(max_m, rng, t=2):
    """QPE-mode Protocol 2 exceeds the exact success probability by the geometric-sum mass."""
    worst = 0.0
    for m in range(2, max_m + 1):
        s = random_state(m - 1, rng)
        g = GateParams.random(rng)
        exact = protocols.protocol2_exact(s, g).success_prob
        qpe = oracle.protocol2_oracle(s, g, t=t, mode="qpe").success_prob
        fresh = np.array([g.first, g.second])
        full = oracle.append_qubit(oracle.embed(s), fresh)
        w = oracle.shift_eigenspace_weights(full)
        gap = sum(w[ell] * oracle.zero_readout_probability(ell / m, t) for ell in range(1, m))
        worst = max(worst, abs((qpe - exact) - gap))
    return worst


def check_qpe_symmetric_weight(max_m, rng):
    """In the Protocol-2 intermediate, the phase-0 weight equals the symmetric weight."""
    worst = 0.0
    for m in range(2, max_m + 1):
        s = random_state(m - 1, rng)
        g = GateParams.random(rng)
        full = oracle.append_qubit(oracle.embed(s), np.array([g.first, g.second]))
        w0 = oracle.shift_eigenspace_weights(full)[0]
        worst = max(worst, abs(w0 - protocols.protocol2_exact(s, g).success_prob))
    return worst


# ---------------------------------------------------------------------------
# protocols, preparation, Krawtchouk

def check_protocol1_oracle(max_n, rng, draws=3):
    worst = 0.0
    for n in range(1, max_n + 1):
        for _ in range(draws):
            s, g = random_state(n, rng), GateParams.random(rng)
            ex = protocols.protocol1_exact(s, g)
            target = int(rng.integers(n))
            orc = oracle.protocol1_oracle(s, g, target)
            worst = max(worst, abs(ex.success_prob - orc.success_prob))
            for a, b in ((ex.success_state, orc.success_state), (ex.failure_state, orc.failure_state)):
                if (a is None) != (b is None):
                    return 1.0
                if a is not None:
                    worst = max(worst, 1 - fidelity(a, b))
    return worst


def check_protocol2_oracle(max_n, rng, draws=3):
    worst = 0.0
    for n in range(0, max_n):
        for _ in range(draws):
            s, g = random_state(n, rng), GateParams.random(rng)
            ex = protocols.protocol2_exact(s, g)
            orc = oracle.protocol2_oracle(s, g)
            worst = max(worst, abs(ex.success_prob - orc.success_prob), 1 - fidelity(ex.success_state, orc.success_state))
    return worst


def check_branch_sum(max_n, rng, draws=3):
    worst = 0.0
    for n in range(1, max_n + 1):
        for _ in range(draws):
            s, g = random_state(n, rng), GateParams.random(rng)
            ex = protocols.protocol1_exact(s, g)
            orc = oracle.protocol1_oracle(s, g)
            fail_prob = 1 - orc.success_prob
            worst = max(worst, abs(ex.success_prob + fail_prob - 1))
    return worst


def check_preparation(max_n, rng, draws=5):
    worst = 0.0
    for n in range(1, max_n + 1):
        for _ in range(draws):
            s = random_state(n, rng)
            out = preparation.run_schedule(preparation.compile_schedule(s))
            worst = max(worst, 1 - fidelity(s, out.state))
    return worst


def check_krawtchouk_duality(max_n, rng=None, p=0.5):
    worst = 0.0
    for n in range(max_n + 1):
        K = np.array([krawtchouk_values(x, p, n) for x in range(n + 1)])  # K[x, i]
        worst = max(worst, float(np.max(np.abs(K - K.T))))
    return worst


def check_krawtchouk_recurrence(max_n, rng=None, ps=(0.5, 0.3)):
    """Recurrence residual on the direct series, summed exactly in rationals and then rounded."""
    worst = 0.0
    for p in ps:
        for n in range(2, max_n + 1):
            for x in range(n + 1):
                vals = [float(krawtchouk_series(i, x, Fraction(p), n)) for i in range(n + 1)]
                scale = max(1.0, max(abs(v) for v in vals))
                for i in range(1, n):
                    worst = max(worst, recurrence_residual(i, x, p, n, vals) / scale)
    return worst


SUITE_CHECKS = {
    "algebra": [
        ("weyl_commutators", check_weyl),
        ("number_ladder", check_number_ladder),
        ("composite_offset", check_composite_offset),
        ("symmetry_identification", check_symmetry_identification),
        ("su2_relations", check_su2),
        ("casimir", check_casimir),
    ],
    "spectral": [
        ("diagonalization", check_diagonalization),
        ("closed_form_overlap", check_closed_form),
        ("hadamard_oracle", check_hadamard_oracle),
        ("hadamard_involution", check_hadamard_involution),
    ],
    "scheme": [
        ("bose_mesner", check_bose_mesner),
        ("p_polynomial", check_p_polynomial),
        ("dicke_from_distance", check_dicke_from_distance),
        ("hadamard_conjugation", check_hadamard_conjugation),
        ("adjacency_spin", check_adjacency_spin),
        ("clebsch_gordan", check_clebsch_gordan),
    ],
    "qpe": [
        ("qpe_zero_phase", check_qpe_zero_phase),
        ("qpe_singlet", check_qpe_singlet),
        ("qpe_geometric_sum", check_qpe_geometric_sum),
        ("qpe_fredkin_fast", check_qpe_fredkin_fast),
        ("qpe_false_accept_gap", check_qpe_false_accept_gap),
        ("qpe_symmetric_weight", check_qpe_symmetric_weight),
    ],
    "protocols": [
        ("protocol1_oracle", check_protocol1_oracle),
        ("protocol2_oracle", check_protocol2_oracle),
        ("branch_sum", check_branch_sum),
    ],
    "preparation": [("preparation_roundtrip", check_preparation)],
    "krawtchouk": [
        ("krawtchouk_duality", check_krawtchouk_duality),
        ("krawtchouk_recurrence", check_krawtchouk_recurrence),
    ],
}

# the dense full-space suites grow like 4^n; keep them small whatever max_n says
SUITE_SIZE_CAP = {"scheme": 5, "qpe": 6, "protocols": 8}


def run_suite(suite="all", max_n=6, seed=0, tolerances=None):
    """Run a suite and return the JSON-ready report."""
    if suite not in SUITES:
        raise DomainError(f"suite must be one of {SUITES}, got {suite!r}")
    if max_n < 1:
        raise DomainError("max_n must be at least 1")
    tol = load_tolerances() if tolerances is None else tolerances
    rng = protocols.make_rng(seed)
    names = list(SUITE_CHECKS) if suite == "all" else [suite]
    results = []
    for name in names:
        n_here = min(max_n, SUITE_SIZE_CAP.get(name, max_n))
        for check_name, fn in SUITE_CHECKS[name]:
            residual = float(fn(n_here, rng))
            results.append(CheckResult(check_name, residual, tol[check_name]))
    return {
        "format_version": FORMAT_VERSION,
        "suite": suite,
        "max_n": max_n,
        "seed": seed,
        "rng_algorithm": protocols.RNG_ALGORITHM,
        "passed": all(r.passed for r in results),
        "checks": [r.to_json() for r in results],
    }
