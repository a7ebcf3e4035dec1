import pytest

from coadjoint.liealg import (
    NotClosedError,
    abelian_algebra,
    b_of,
    classical_algebra,
    direct_sum,
    fingerprint,
    fingerprint_sum,
    heisenberg_algebra,
    index,
    killing_matrix,
    subalgebra,
)
from coadjoint.qlinalg import SampleConfig, rank

CFG = SampleConfig(seed=11, height=5, rounds=8)


def test_classical_dimensions():
    assert classical_algebra("sl", 2).dim == 3
    assert classical_algebra("so", 9).dim == 36
    assert classical_algebra("sp", 6).dim == 21
    assert classical_algebra("gl", 4).dim == 16


def test_sp_rejects_odd_size():
    with pytest.raises(ValueError):
        classical_algebra("sp", 5)


@pytest.mark.parametrize("family,n", [
    ("sl", 2), ("sl", 4), ("so", 5), ("so", 8), ("so", 9),
    ("sp", 4), ("sp", 6), ("gl", 3),
])
def test_jacobi_classical(family, n):
    classical_algebra(family, n).check_jacobi()


def test_jacobi_larger():
    classical_algebra("so", 14).check_jacobi()


def test_index_sl2():
    assert int(index(classical_algebra("sl", 2), CFG)) == 1


def test_index_abelian():
    for d in (1, 4, 7):
        assert int(index(abelian_algebra(d), CFG)) == d


@pytest.mark.parametrize("family,top,expected", [
    ("sl", 12, lambda n: n - 1),
    ("so", 20, lambda n: n // 2),
    ("sp", 20, lambda n: n // 2),
])
def test_reductive_index_is_rank(family, top, expected):
    lo = 2 if family != "so" else 3
    for n in range(lo, top + 1):
        if family == "sp" and n % 2:
            continue
        ind = index(classical_algebra(family, n), CFG)
        assert ind.stabilised
        assert int(ind) == expected(n), (family, n)


def test_reductive_index_large_sl():
    # the top of the <= 20 sweep for sl, exercised separately (heaviest ranks)
    for n in (16, 20):
        ind = index(classical_algebra("sl", n), CFG)
        assert ind.stabilised and int(ind) == n - 1


def test_index_parity():
    for L in (classical_algebra("sl", 3), classical_algebra("so", 7),
              heisenberg_algebra(2), abelian_algebra(5)):
        ind = index(L, CFG)
        assert (int(ind) - L.dim) % 2 == 0


def test_killing_rank_semisimple():
    for family, n in [("sl", 2), ("sl", 5), ("so", 5), ("so", 9),
                      ("sp", 4), ("sp", 8), ("so", 14)]:
        L = classical_algebra(family, n)
        assert rank(killing_matrix(L)) == L.dim, (family, n)


def test_b_of():
    assert int(b_of(classical_algebra("sl", 2), CFG)) == 2


def test_fingerprint_sl2():
    fp = fingerprint(classical_algebra("sl", 2), CFG)
    assert fp.dim == 3 and fp.index == 1
    assert fp.derived_series_dims[:2] == (3, 3)
    assert fp.killing_rank == 3 and fp.center_dim == 0


def test_fingerprint_heisenberg():
    fp = fingerprint(heisenberg_algebra(1), CFG)
    assert fp.dim == 3 and fp.index == 1
    assert fp.derived_series_dims == (3, 1, 0)
    assert fp.killing_rank == 0 and fp.center_dim == 1


def test_fingerprint_sum():
    a = fingerprint(classical_algebra("sl", 2), CFG)
    s = fingerprint_sum(a, a)
    b = fingerprint(direct_sum(classical_algebra("sl", 2),
                               classical_algebra("sl", 2)), CFG)
    assert s == b


def test_subalgebra_full_span():
    L = classical_algebra("sl", 2)
    sub = subalgebra(L, [[1, 0, 0], [0, 1, 0], [0, 0, 1]])
    assert sub.dim == 3
    assert int(index(sub, CFG)) == 1


def test_subalgebra_cartan_and_nilpotent():
    L = classical_algebra("sl", 2)  # basis H, E12, E21
    cartan = subalgebra(L, [[1, 0, 0]])
    assert cartan.dim == 1 and not cartan.brackets
    nil = subalgebra(L, [[0, 1, 0]])
    assert nil.dim == 1 and not nil.brackets


def test_subalgebra_not_closed_witness():
    L = classical_algebra("sl", 2)
    with pytest.raises(NotClosedError) as err:
        subalgebra(L, [[0, 1, 0], [0, 0, 1]])  # e and f
    assert err.value.witness == (0, 1)


def test_takiff_fingerprints_agree_so3_sl2():
    # so_3 and sl_2 are isomorphic over the split forms
    from coadjoint.constructions import takiff

    f1 = fingerprint(takiff(classical_algebra("sl", 2)).total, CFG)
    f2 = fingerprint(takiff(classical_algebra("so", 3)).total, CFG)
    assert f1 == f2
