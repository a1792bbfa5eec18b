"""Shared hypothesis strategies."""
import numpy as np
from hypothesis import strategies as st

from dicke_protocols.algebra import GateParams
from dicke_protocols.dicke_space import SymmetricState

finite = st.floats(min_value=-1.0, max_value=1.0, allow_nan=False, allow_infinity=False)
complexes = st.builds(complex, finite, finite)


@st.composite
def physical_gates(draw):
    z = np.array([draw(complexes), draw(complexes)])
    norm = np.linalg.norm(z)
    if norm < 1e-3:
        z = np.array([1.0, 0.0])
        norm = 1.0
    return GateParams(*(z / norm))


@st.composite
def unit_states(draw, min_n=0, max_n=8):
    n = draw(st.integers(min_n, max_n))
    amps = np.array([draw(complexes) for _ in range(n + 1)])
    norm = np.linalg.norm(amps)
    if norm < 1e-3:
        amps = np.zeros(n + 1, dtype=complex)
        amps[0] = 1.0
        norm = 1.0
    return SymmetricState(n, amps / norm)
