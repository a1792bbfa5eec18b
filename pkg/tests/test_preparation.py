import math

import numpy as np
import pytest
from hypothesis import given

from dicke_protocols.algebra import GateParams
from dicke_protocols.dicke_space import SymmetricState, dicke_state, fidelity, normalize, random_state, vacuum
from dicke_protocols.errors import DegenerateStateError, DomainError, NumericError
from dicke_protocols.preparation import (
    compile_schedule,
    find_roots,
    run_schedule,
    target_polynomial,
)
from dicke_protocols.protocols import make_rng, protocol2_exact

from strategies import unit_states


def test_vacuum_target():
    sched = compile_schedule(vacuum())
    assert sched.n == 0 and sched.to_json() == []
    res = run_schedule(sched)
    assert res.completed and res.state == vacuum() and res.cumulative_probability == 1.0


def test_single_qubit_target():
    target = SymmetricState(1, [0.6, 0.8j])
    sched = compile_schedule(target)
    assert sched.n == 1
    res = run_schedule(sched)
    assert fidelity(res.state, target) == pytest.approx(1.0, abs=1e-14)
    assert res.cumulative_probability == pytest.approx(1.0)


def test_all_zeros_target_uses_roots_at_infinity():
    sched = compile_schedule(dicke_state(4, 0))
    assert sched.infinity_count == 4 and len(sched.finite_roots) == 0
    assert all(g == GateParams(1, 0) for g in sched.steps)
    assert run_schedule(sched).cumulative_probability == pytest.approx(1.0)


def test_all_ones_target_uses_zero_roots():
    sched = compile_schedule(dicke_state(3, 3))
    assert sched.infinity_count == 0
    np.testing.assert_array_equal(sched.finite_roots, [0, 0, 0])
    assert sched.to_json() == [[0.0, 0.0, 1.0, 0.0]] * 3


def test_w_state():
    target = dicke_state(3, 1)
    sched = compile_schedule(target)
    # Q(x) = x / sqrt(2): one root at zero, two at infinity
    assert sched.infinity_count == 2 and sched.finite_roots == (0j,)
    res = run_schedule(sched)
    assert fidelity(res.state, target) == pytest.approx(1.0, abs=1e-14)
    # probabilities 1, 1/2, 2/3 multiply to 1/3
    assert res.cumulative_probability == pytest.approx(1 / 3, abs=1e-14)


def test_target_polynomial_coefficients():
    coeffs = target_polynomial(dicke_state(3, 1))
    np.testing.assert_allclose(coeffs, [0, 1 / math.sqrt(2), 0, 0])


def test_find_roots_known_polynomial():
    # (x - 1)(x + 2i) = x^2 + (2i - 1) x - 2i
    roots, inf, res = find_roots([-2j, 2j - 1, 1])
    assert inf == 0
    assert sorted(roots, key=lambda z: z.imag) == pytest.approx([-2j, 1])
    assert np.max(res) <= 1e-14


def test_find_roots_degree_deficient():
    roots, inf, _ = find_roots([1, 1, 0, 0])
    assert inf == 2 and roots == pytest.approx([-1])


def test_find_roots_triple_root():
    # (x - 0.5)^3
    roots, inf, res = find_roots([-0.125, 0.75, -1.5, 1])
    assert inf == 0
    assert np.max(np.abs(roots - 0.5)) <= 1e-4
    assert np.max(res) <= 1e-12


def test_find_roots_zero_polynomial():
    with pytest.raises(DegenerateStateError):
        find_roots([0, 0])


@given(unit_states(min_n=1, max_n=8))
def test_roundtrip(target):
    sched = compile_schedule(target)
    assert sched.n == target.n
    assert len(sched.finite_roots) + sched.infinity_count == target.n
    assert all(abs(abs(g.first) ** 2 + abs(g.second) ** 2 - 1) <= 1e-12 for g in sched.steps)
    res = run_schedule(sched)
    assert fidelity(res.state, target) >= 1 - 1e-8
    assert 0 < res.cumulative_probability <= 1 + 1e-12


def test_step_order_does_not_change_the_state():
    rng = make_rng(21)
    target = random_state(5, rng)
    sched = compile_schedule(target)
    state = vacuum()
    for g in reversed(sched.steps):
        state = protocol2_exact(state, g).success_state
    assert fidelity(state, target) >= 1 - 1e-10


def test_cumulative_probability_is_product():
    sched = compile_schedule(random_state(6, make_rng(22)))
    res = run_schedule(sched)
    assert res.cumulative_probability == pytest.approx(math.prod(res.step_probabilities), rel=1e-12)


def test_degenerate_targets():
    for n in range(1, 8):
        for i in range(n + 1):
            res = run_schedule(compile_schedule(dicke_state(n, i)))
            assert fidelity(res.state, dicke_state(n, i)) >= 1 - 1e-8
    # repeated root: (x - 1)^4 gives binomially weighted amplitudes
    n = 4
    amps = [math.sqrt(math.factorial(i) * math.factorial(n - i)) * math.comb(n, i) * (-1) ** (n - i) for i in range(n + 1)]
    target = normalize(SymmetricState(n, amps))[0]
    res = run_schedule(compile_schedule(target))
    assert fidelity(res.state, target) >= 1 - 1e-8


def test_sampled_run_is_reproducible():
    sched = compile_schedule(random_state(5, make_rng(23)))
    a = run_schedule(sched, "sampled", make_rng(4))
    b = run_schedule(sched, "sampled", make_rng(4))
    assert a.failed_step == b.failed_step and a.step_probabilities == b.step_probabilities


def test_sampled_run_failure_reports_step():
    sched = compile_schedule(dicke_state(6, 3))
    results = [run_schedule(sched, "sampled", make_rng(s)) for s in range(30)]
    failed = [r for r in results if not r.completed]
    assert failed
    assert all(r.state is None and 0 <= r.failed_step < 6 for r in failed)
    done = [r for r in results if r.completed]
    assert all(fidelity(r.state, dicke_state(6, 3)) >= 1 - 1e-10 for r in done)


def test_argument_checks():
    with pytest.raises(DomainError):
        compile_schedule(SymmetricState(2, [1, 1, 0]))
    with pytest.raises(DomainError):
        run_schedule(compile_schedule(vacuum()), "sampled")
    with pytest.raises(DomainError):
        run_schedule(compile_schedule(vacuum()), "bogus")


def test_residual_guard(monkeypatch):
    from dicke_protocols import preparation

    monkeypatch.setattr(preparation, "ROOT_RESIDUAL_TOL", -1.0)
    with pytest.raises(NumericError):
        compile_schedule(random_state(3, make_rng(1)))
