import pytest

from coadjoint.liealg import classical_algebra, fingerprint
from coadjoint.qlinalg import QMatrix, QQ, SampleConfig, kernel_basis
from coadjoint.repn import (
    FormNotInvariantError,
    adjoint_rep,
    build_module,
    check_representation,
    contraction_kernel,
    dual_rep,
    exterior_power,
    spin_rep,
    standard_rep,
    symmetric_power,
    symplectic_form,
    trivial_rep,
)

CFG = SampleConfig(seed=13, height=5, rounds=8)


def test_standard_dims():
    assert standard_rep(classical_algebra("sp", 4)).dim_V == 4
    assert standard_rep(classical_algebra("so", 7)).dim_V == 7
    assert standard_rep(classical_algebra("sl", 3)).dim_V == 3


def test_standard_requires_matrix_algebra():
    from coadjoint.liealg import abelian_algebra

    with pytest.raises(ValueError):
        standard_rep(abelian_algebra(3))


def test_exterior_dims():
    R4 = standard_rep(classical_algebra("sl", 4))
    assert exterior_power(R4, 2).dim_V == 6
    R6 = standard_rep(classical_algebra("sl", 6))
    assert exterior_power(R6, 2).dim_V == 15
    assert exterior_power(R6, 3).dim_V == 20


def test_symmetric_dims():
    R3 = standard_rep(classical_algebra("sl", 3))
    assert symmetric_power(R3, 2).dim_V == 6
    R2 = standard_rep(classical_algebra("sl", 2))
    assert symmetric_power(R2, 4).dim_V == 5


def test_s2_of_k2_is_adjoint():
    L = classical_algebra("sl", 2)
    S2 = symmetric_power(standard_rep(L), 2)
    check_representation(S2)
    # the image algebra of sl2 on S^2(k^2) is again sl2: compare fingerprints
    # of the abstract algebra acting faithfully (structure is unchanged)
    from coadjoint.semidirect import semidirect
    from coadjoint.liealg import index

    s_ad = semidirect(L, adjoint_rep(L))
    s_s2 = semidirect(L, S2)
    assert fingerprint(s_ad.total, CFG) == fingerprint(s_s2.total, CFG)


@pytest.mark.parametrize("family,n,k", [
    ("sl", 4, 2), ("sl", 6, 3), ("sl", 2, 4), ("sp", 4, 2), ("so", 7, 2),
])
def test_power_representation_property(family, n, k):
    R = standard_rep(classical_algebra(family, n))
    P = exterior_power(R, min(k, n)) if k <= n else symmetric_power(R, k)
    check_representation(P)
    S = symmetric_power(R, 2)
    check_representation(S)


def test_dual_examples():
    L = classical_algebra("sl", 3)
    T = trivial_rep(L, 2)
    D = dual_rep(T)
    assert all(m.is_zero() for m in D.action)
    R = standard_rep(L)
    DD = dual_rep(dual_rep(R))
    assert all((a - b).is_zero() for a, b in zip(DD.action, R.action))


def test_sp_standard_self_dual_via_J():
    L = classical_algebra("sp", 6)
    R = standard_rep(L)
    D = dual_rep(R)
    J = symplectic_form(6)
    assert all((J * R.action[i] - D.action[i] * J).is_zero()
               for i in range(L.dim))


def test_contraction_kernel_dims():
    L4 = classical_algebra("sp", 4)
    P = contraction_kernel(standard_rep(L4), symplectic_form(4), 2)
    assert P.dim_V == 5     # 2 n^2 - n - 1 at n = 2
    check_representation(P)
    L6 = classical_algebra("sp", 6)
    P3 = contraction_kernel(standard_rep(L6), symplectic_form(6), 3)
    assert P3.dim_V == 14
    check_representation(P3)
    P2 = contraction_kernel(standard_rep(L6), symplectic_form(6), 2)
    assert P2.dim_V == 14


def test_contraction_kernel_rejects_noninvariant_form():
    L4 = classical_algebra("sp", 4)
    bad = QMatrix.identity(4)
    with pytest.raises(FormNotInvariantError) as err:
        contraction_kernel(standard_rep(L4), bad, 2)
    assert isinstance(err.value.witness, int)


@pytest.mark.parametrize("n,half,dim", [
    (7, None, 8), (9, None, 16), (11, None, 32), (13, None, 64),
    (8, "even", 8), (8, "odd", 8), (10, "odd", 16), (12, "even", 32),
    (14, "odd", 64),
])
def test_spin_dimensions_and_property(n, half, dim):
    S = spin_rep(n, half)
    assert S.dim_V == dim
    check_representation(S)


def test_spin_chirality_errors():
    with pytest.raises(ValueError):
        spin_rep(7, "even")
    with pytest.raises(ValueError):
        spin_rep(8)


def test_spin7_invariant_bilinear_form():
    # the image of so_7 on the 8-dim spinor space preserves a symmetric form
    S = spin_rep(7)
    N = S.dim_V
    rows = []
    for m in S.action:
        for a in range(N):
            for b in range(N):
                row = [0] * (N * N)
                for c in range(N):
                    row[c * N + b] += m.data[c][a]
                    row[a * N + c] += m.data[c][b]
                rows.append(row)
    ker = kernel_basis(QMatrix.from_rows(rows))
    assert len(ker) == 1
    F = ker[0]
    assert all(F[a * N + b] == F[b * N + a] for a in range(N) for b in range(N))


def test_build_module_dims():
    assert build_module("so", 9, [("phi1", 2), ("phi4", 1)]).dim_V == 34
    assert build_module("so", 10, [("phi1", 1), ("phi4", 1)]).dim_V == 26
    assert build_module("sp", 6, [("phi1", 1), ("phi2", 1)]).dim_V == 20
    assert build_module("so", 14, [("phi6", 1)]).dim_V == 64
    assert build_module("so", 3, [("phi1", 2)]).dim_V == 6


def test_build_module_unknown_label():
    with pytest.raises(ValueError):
        build_module("sp", 4, [("phi9", 1)])


def test_multiplicity_blocks_are_independent():
    M = build_module("sp", 4, [("phi1", 2)])
    assert M.dim_V == 8
    assert [b[2] for b in M.blocks] == [4, 4]
    check_representation(M)
