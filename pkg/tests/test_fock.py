"""Level bases and operator actions on Verma (x) Fock tensor products.

Oracles: partition-counting dimensions, the Heisenberg and Virasoro
commutation relations checked as matrix identities on whole level spaces.
"""

import numpy as np
import pytest

from iombench.fock import (
    LevelBasis,
    OscillatorSpec,
    State,
    VermaSpec,
    apply_heisenberg,
    apply_virasoro,
    fock_level_basis,
    heisenberg_action,
    tensor_level_basis,
    virasoro_action,
)
from iombench.partitions import enumerate_partitions


def p_of(n):
    return len(enumerate_partitions(n))


SIMPLE = OscillatorSpec(1, lambda i, j, m: float(m))
TWO_FAM = OscillatorSpec(2, lambda i, j, m: float(m) if i == j else 0.5 * m)
VERMA = VermaSpec(central_charge=0.7 - 6.0, highest_weight=0.31)


def test_fock_dimensions_single_family():
    for level in range(7):
        assert fock_level_basis(SIMPLE, level).dimension == p_of(level)


def test_fock_dimensions_two_families():
    for level in range(6):
        expected = sum(p_of(k) * p_of(level - k) for k in range(level + 1))
        assert fock_level_basis(TWO_FAM, level).dimension == expected


def test_tensor_dimensions():
    for level in range(6):
        basis = tensor_level_basis(VERMA, SIMPLE, level)
        expected = sum(p_of(k) * p_of(level - k) for k in range(level + 1))
        assert basis.dimension == expected
        assert all(s.level == level for s in basis.states)


def test_tensor_requires_a_factor():
    with pytest.raises(ValueError):
        tensor_level_basis(None, None, 2)
    with pytest.raises(ValueError):
        tensor_level_basis(VERMA, None, -1)


def test_index_round_trip():
    basis = tensor_level_basis(VERMA, SIMPLE, 3)
    for i, state in enumerate(basis.states):
        assert basis.index_of(state) == i
        assert state in basis


def test_heisenberg_creation_then_annihilation():
    vac = State(None, ((),))
    created = apply_heisenberg(SIMPLE, 1, -3, vac)
    assert created == {State(None, ((3,),)): 1.0 + 0.0j}
    [(one, _)] = created.items()
    back = apply_heisenberg(SIMPLE, 1, 3, one)
    # contraction [b_3, b_{-3}] = pairing(1,1,3) = 3
    assert back == {vac: 3.0 + 0.0j}


def test_heisenberg_counts_multiplicity():
    state = State(None, ((2, 2, 2),))
    out = apply_heisenberg(SIMPLE, 1, 2, state)
    [(reduced, coeff)] = out.items()
    assert reduced == State(None, ((2, 2),))
    assert coeff == pytest.approx(3 * 2.0)


def test_heisenberg_mode_validation():
    vac = State(None, ((),))
    with pytest.raises(ValueError):
        apply_heisenberg(SIMPLE, 1, 0, vac)
    with pytest.raises(ValueError):
        apply_heisenberg(SIMPLE, 2, 1, vac)


def test_heisenberg_commutator_matrix_identity():
    # [b_m, b_{-m}] = m on every level space (simple pairing)
    m = 2
    for level in range(4):
        src = fock_level_basis(SIMPLE, level)
        up = fock_level_basis(SIMPLE, level + m)
        down = fock_level_basis(SIMPLE, max(level - m, 0))
        create = heisenberg_action(SIMPLE, 1, -m, src, up)
        annihilate_up = heisenberg_action(SIMPLE, 1, m, up, src)
        lhs = annihilate_up @ create
        if level >= m:
            annihilate = heisenberg_action(SIMPLE, 1, m, src, down)
            create_back = heisenberg_action(SIMPLE, 1, -m, down, src)
            lhs = lhs - create_back @ annihilate
        # [b_m, b_{-m}] = pairing(1,1,m) = m here
        assert np.max(np.abs(lhs - m * np.eye(src.dimension))) < 1e-12


def test_virasoro_l0_is_graded():
    for level in range(4):
        basis = tensor_level_basis(VERMA, None, level)
        l0 = virasoro_action(VERMA, 0, basis, basis)
        want = (complex(VERMA.highest_weight) + level) * np.eye(basis.dimension)
        assert np.max(np.abs(l0 - want)) < 1e-12


@pytest.mark.parametrize("m,n", [(1, -1), (2, -2), (2, -1), (3, -2)])
def test_virasoro_commutator_identity(m, n):
    # [L_m, L_n] = (m - n) L_{m+n} + c/12 m (m^2-1) delta_{m+n,0}
    level = 4
    c = complex(VERMA.central_charge)
    src = tensor_level_basis(VERMA, None, level)
    mid_a = tensor_level_basis(VERMA, None, level - n)
    mid_b = tensor_level_basis(VERMA, None, level - m)
    tgt = tensor_level_basis(VERMA, None, level - m - n)
    lm_after = virasoro_action(VERMA, m, mid_a, tgt)
    ln_first = virasoro_action(VERMA, n, src, mid_a)
    ln_after = virasoro_action(VERMA, n, mid_b, tgt)
    lm_first = virasoro_action(VERMA, m, src, mid_b)
    comm = lm_after @ ln_first - ln_after @ lm_first
    want = (m - n) * virasoro_action(VERMA, m + n, src, tgt)
    if m + n == 0:
        want = want + (c / 12.0) * m * (m * m - 1) * np.eye(src.dimension)
    assert np.max(np.abs(comm - want)) < 1e-10


def test_virasoro_creation_reordering():
    # L_{-1} L_{-2}|h> = L_{-2} L_{-1}|h> + L_{-3}|h> read off from the
    # normal-ordered coefficients
    state = State((2,), ())
    out = apply_virasoro(VERMA, -1, state)
    assert out == {State((2, 1), ()): 1.0 + 0.0j, State((3,), ()): 1.0 + 0.0j}


def test_virasoro_requires_verma_factor():
    with pytest.raises(ValueError):
        apply_virasoro(VERMA, -1, State(None, ((),)))


def test_action_level_mismatch_rejected():
    src = fock_level_basis(SIMPLE, 2)
    with pytest.raises(ValueError):
        heisenberg_action(SIMPLE, 1, -1, src, src)
    vsrc = tensor_level_basis(VERMA, None, 2)
    with pytest.raises(ValueError):
        virasoro_action(VERMA, -1, vsrc, vsrc)
