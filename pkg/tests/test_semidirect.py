import pytest

from coadjoint.liealg import classical_algebra, fingerprint, index
from coadjoint.qlinalg import Q0, Q1, QQ, SampleConfig, sample_vector
from coadjoint.repn import adjoint_rep, standard_rep, trivial_rep
from coadjoint.semidirect import (
    codim2_evidence,
    direct_index,
    generic_stabiliser_in_V,
    rais_index,
    semidirect,
    split_stabiliser_dim,
    stabiliser_full,
    stabiliser_in_V,
)

CFG = SampleConfig(seed=3, height=5, rounds=8)


def S_sp4k4():
    L = classical_algebra("sp", 4)
    return semidirect(L, standard_rep(L))


def test_semidirect_dims():
    L = classical_algebra("sl", 2)
    assert semidirect(L, adjoint_rep(L)).dim == 6      # Takiff sl2
    assert S_sp4k4().dim == 14
    L5 = classical_algebra("so", 5)
    from coadjoint.repn import build_module

    S = semidirect(L5, build_module("so", 5, [("phi1", 2)], L=L5))
    assert S.dim == 20


def test_semidirect_brackets_jacobi():
    S = S_sp4k4()
    S.total.check_jacobi()
    # [V, V] = 0
    for i in range(S.dim_g, S.dim):
        for j in range(i + 1, S.dim):
            assert not S.total.bracket_basis(i, j)


def test_stabiliser_at_zero_is_everything():
    S = S_sp4k4()
    st = stabiliser_in_V(S, [0, 0, 0, 0])
    assert st.dim == S.dim_g and st.dim_orbit == 0


def test_stabiliser_orbit_dimension_sum():
    S = S_sp4k4()
    for t in range(5):
        x = sample_vector(SampleConfig(50 + t, 6, 1), S.dim_V, 0, "x")
        st = stabiliser_in_V(S, x)
        assert st.dim + st.dim_orbit == S.dim_g


def test_generic_stabiliser_so5_k5():
    L = classical_algebra("so", 5)
    S = semidirect(L, standard_rep(L))
    st = generic_stabiliser_in_V(S, CFG)
    assert st.dim == 6
    assert fingerprint(st.algebra, CFG) == fingerprint(
        classical_algebra("so", 4), CFG)


def test_generic_stabiliser_sp4_k4():
    from coadjoint.atlas import sp_heis_algebra

    st = generic_stabiliser_in_V(S_sp4k4(), CFG)
    assert st.dim == 6
    assert fingerprint(st.algebra, CFG) == fingerprint(sp_heis_algebra(1), CFG)


def test_rais_examples():
    L5 = classical_algebra("so", 5)
    S5 = semidirect(L5, standard_rep(L5))
    assert int(rais_index(S5, CFG)) == 3
    assert int(direct_index(S5, CFG)) == 3
    assert int(rais_index(S_sp4k4(), CFG)) == 2


def test_rais_zero_module():
    L = classical_algebra("sp", 6)
    S = semidirect(L, trivial_rep(L, 0))
    assert S.dim == L.dim
    assert int(rais_index(S, CFG)) == int(index(L, CFG)) == 3


def test_stabiliser_full_zero():
    S = S_sp4k4()
    st = stabiliser_full(S, [0] * S.dim)
    assert st.dim == S.dim


def test_stabiliser_full_generic_sp2k2():
    L = classical_algebra("sp", 2)
    S = semidirect(L, standard_rep(L))
    xi = sample_vector(SampleConfig(8, 7, 1), S.dim, 0, "xi")
    assert stabiliser_full(S, xi).dim == 1


def test_split_stabiliser_formula():
    S = S_sp4k4()
    for t in range(20):
        gamma = sample_vector(SampleConfig(100 + t, 7, 1), S.dim_g, 0, "g")
        y = sample_vector(SampleConfig(200 + t, 7, 1), S.dim_V, 0, "y")
        lhs = stabiliser_full(S, S.split_point(gamma, y)).dim
        assert lhs == split_stabiliser_dim(S, gamma, y)


def test_codim2_partial_evidence():
    L = classical_algebra("sp", 2)
    S = semidirect(L, standard_rep(L))
    rep = codim2_evidence(S, [], CFG)
    assert rep.partial and rep.divisor_verdicts == []


def test_codim2_quadric_point_so5():
    L = classical_algebra("so", 5)
    S = semidirect(L, standard_rep(L))
    # split form: (y, y) = 2(y1 y5 + y2 y4) + y3^2; y = e1 is isotropic
    rep = codim2_evidence(S, [[1, 0, 0, 0, 0]], CFG)
    assert not rep.partial
    assert rep.all_hold
    assert rep.generic_stab_fingerprint_reductive


def test_codim2_takiff_generic_point():
    from coadjoint.constructions import takiff

    S = takiff(classical_algebra("sl", 2))
    y = sample_vector(SampleConfig(5, 5, 1), S.dim_V, 0, "tak")
    rep = codim2_evidence(S, [y], CFG)
    assert rep.all_hold
