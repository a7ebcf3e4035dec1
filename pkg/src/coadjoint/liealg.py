"""Lie algebras as rational structure-constant tables.

Constructors for the split classical algebras gl, sl, so (antidiagonal
symmetric form) and sp (standard block form J = [[0, I], [-I, 0]]), plus the
index, b(q), Killing form, derived series, and the isomorphism fingerprint
used to recognise generic stabilisers.

The index is computed per its definition: ind q = dim q - max rank B_gamma
over sampled covectors gamma, with height escalation; the result carries a
`stabilised` flag recording whether two consecutive rounds agreed.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .qlinalg import (
    Q0,
    Q1,
    QQ,
    QMatrix,
    SampleConfig,
    as_q,
    kernel_basis,
    rank,
    sample_vector,
)


class NotClosedError(ValueError):
    """A span fails to be bracket-closed; carries a witness pair."""

    def __init__(self, i, j):
        self.witness = (i, j)
        super().__init__(f"span not closed under bracket: witness pair ({i}, {j})")


class LieAlgebraData:
    """Structure constants c[i][j] -> sparse vector of [x_i, x_j].

    brackets maps (i, j) with i < j to {k: coefficient}; antisymmetry fills the
    rest.  metadata carries optional construction hints (matrix realisation,
    Cartan indices, ad-weights) used by downstream fast paths; none of it is
    required for correctness.
    """

    def __init__(self, dim, basis_labels=None, brackets=None, metadata=None):
        self.dim = dim
        self.basis_labels = basis_labels or [f"x{i}" for i in range(dim)]
        assert len(self.basis_labels) == dim
        self.brackets = brackets or {}
        self.metadata = metadata or {}

    def bracket_basis(self, i, j):
        """[x_i, x_j] as {k: coeff}."""
        if i == j:
            return {}
        if i < j:
            return self.brackets.get((i, j), {})
        b = self.brackets.get((j, i), {})
        return {k: -c for k, c in b.items()}

    def bracket(self, u, v):
        """[u, v] for coefficient vectors u, v.

        Iterates the sparse structure table once: cost is O(#table entries),
        independent of the density of u and v.
        """
        out = {}
        for (i, j), vec in self.brackets.items():
            coef = u[i] * v[j] - u[j] * v[i]
            if coef:
                for k, c in vec.items():
                    out[k] = out.get(k, Q0) + coef * c
        res = [Q0] * self.dim
        for k, c in out.items():
            if c != 0:
                res[k] = c
        return res

    def ad(self, i):
        """Matrix of ad(x_i) in the basis."""
        m = QMatrix.zero(self.dim, self.dim)
        for j in range(self.dim):
            for k, c in self.bracket_basis(i, j).items():
                m.data[k][j] = c
        return m

    def set_bracket(self, i, j, vec):
        assert i < j
        vec = {k: as_q(c) for k, c in vec.items() if c != 0}
        if vec:
            self.brackets[(i, j)] = vec
        else:
            self.brackets.pop((i, j), None)

    def kirillov_form(self, gamma):
        """The antisymmetric matrix B_gamma(x_i, x_j) = gamma([x_i, x_j])."""
        n = self.dim
        m = QMatrix.zero(n, n)
        for (i, j), vec in self.brackets.items():
            s = Q0
            for k, c in vec.items():
                g = gamma[k]
                if g:
                    s += c * g
            if s != 0:
                m.data[i][j] = s
                m.data[j][i] = -s
        return m

    def check_jacobi(self, max_dim=200):
        """Exhaustive Jacobi check; raises AssertionError with a witness triple."""
        if self.dim > max_dim:
            return
        n = self.dim
        for i in range(n):
            for j in range(i + 1, n):
                bij = self.bracket_basis(i, j)
                for k in range(j + 1, n):
                    acc = {}
                    for l, c in bij.items():
                        for mth, d in self.bracket_basis(l, k).items():
                            acc[mth] = acc.get(mth, Q0) + c * d
                    for l, c in self.bracket_basis(j, k).items():
                        for mth, d in self.bracket_basis(l, i).items():
                            acc[mth] = acc.get(mth, Q0) + c * d
                    for l, c in self.bracket_basis(k, i).items():
                        for mth, d in self.bracket_basis(l, j).items():
                            acc[mth] = acc.get(mth, Q0) + c * d
                    assert all(
                        v == 0 for v in acc.values()
                    ), f"Jacobi fails at triple ({i},{j},{k})"

    def __repr__(self):
        name = self.metadata.get("name", "lie algebra")
        return f"<{name}, dim {self.dim}>"


# ---------------------------------------------------------------------------
# classical constructors
# ---------------------------------------------------------------------------


def _matrix_units_to_basis(mats, labels, n, metadata):
    """LieAlgebraData from explicit matrix generators (assumed independent)."""
    dim = len(mats)
    alg = LieAlgebraData(dim, labels, metadata=metadata)
    alg.metadata["matrices"] = mats
    alg.metadata["matrix_size"] = n
    expand = make_expander(mats, n)
    alg.metadata["expand"] = expand
    sparse = [
        {(i, j): m.data[i][j] for i in range(n) for j in range(n) if m.data[i][j]}
        for m in mats
    ]
    for a in range(dim):
        for b in range(a + 1, dim):
            comm = _commutator_sparse(sparse[a], sparse[b])
            if not comm:
                continue
            coeffs = expand(comm)
            alg.set_bracket(a, b, {k: c for k, c in coeffs.items() if c != 0})
    return alg


def _commutator_sparse(a, b):
    """[A, B] for sparse {(i,j): v} matrices."""
    out = {}
    for (i, k), va in a.items():
        for (k2, j), vb in b.items():
            if k == k2:
                out[(i, j)] = out.get((i, j), Q0) + va * vb
    for (i, k), vb in b.items():
        for (k2, j), va in a.items():
            if k == k2:
                out[(i, j)] = out.get((i, j), Q0) - vb * va
    return {p: v for p, v in out.items() if v != 0}


def make_expander(mats, n):
    """Return a function expanding a sparse n x n matrix in the span of mats.

    Positions owned by a single basis matrix are peeled off greedily (all
    off-diagonal positions of the classical bases); whatever remains is solved
    against the small subspace of multiply-owned positions.
    """
    dim = len(mats)
    owners = {}
    sparse = []
    for b, m in enumerate(mats):
        entries = {(i, j): m.data[i][j] for i in range(n) for j in range(n)
                   if m.data[i][j]}
        sparse.append(entries)
        for pos in entries:
            owners.setdefault(pos, []).append(b)
    single = {pos: bs[0] for pos, bs in owners.items() if len(bs) == 1}
    multi_idx = sorted({b for bs in owners.values() if len(bs) > 1 for b in bs})
    multi_pos = sorted({pos for pos, bs in owners.items() if len(bs) > 1})
    from .qlinalg import QMatrix as _QM, solve_right as _solve

    multi_mat = _QM(
        len(multi_pos),
        len(multi_idx),
        [[sparse[b].get(pos, Q0) for b in multi_idx] for pos in multi_pos],
    )

    def expand(target):
        """target: sparse {(i,j): value}; returns {basis_idx: coeff}."""
        work = dict(target)
        coeffs = {}
        for pos in list(work):
            b = single.get(pos)
            if b is None or work.get(pos, Q0) == 0:
                continue
            f = work[pos] / sparse[b][pos]
            coeffs[b] = coeffs.get(b, Q0) + f
            for p2, v2 in sparse[b].items():
                r = work.get(p2, Q0) - f * v2
                if r == 0:
                    work.pop(p2, None)
                else:
                    work[p2] = r
        residue = {p for p, v in work.items() if v != 0}
        if residue:
            assert residue <= set(multi_pos), f"matrix not in span: {residue}"
            rhs = [work.get(pos, Q0) for pos in multi_pos]
            sol = _solve(multi_mat, rhs)
            assert sol is not None, "matrix not in span of basis"
            for b_local, c in enumerate(sol):
                if c != 0:
                    b = multi_idx[b_local]
                    coeffs[b] = coeffs.get(b, Q0) + c
        return coeffs

    return expand


def _unit_matrix(n, i, j, c=1):
    m = QMatrix.zero(n, n)
    m.data[i][j] = as_q(c)
    return m


def gl_algebra(n):
    mats, labels = [], []
    for i in range(n):
        for j in range(n):
            mats.append(_unit_matrix(n, i, j))
            labels.append(f"E{i + 1}{j + 1}")
    md = {"name": f"gl{n}", "family": "gl", "size": n,
          "cartan": list(range(0, n * n, n + 1))}
    return _matrix_units_to_basis(mats, labels, n, md)


def sl_algebra(n):
    mats, labels = [], []
    for i in range(n - 1):
        m = QMatrix.zero(n, n)
        m.data[i][i] = Q1
        m.data[i + 1][i + 1] = -Q1
        mats.append(m)
        labels.append(f"H{i + 1}")
    for i in range(n):
        for j in range(n):
            if i != j:
                mats.append(_unit_matrix(n, i, j))
                labels.append(f"E{i + 1}{j + 1}")
    md = {"name": f"sl{n}", "family": "sl", "size": n, "cartan": list(range(n - 1))}
    return _matrix_units_to_basis(mats, labels, n, md)


def so_algebra(n):
    """so_n for the split symmetric form with ones on the antidiagonal."""
    bar = lambda i: n - 1 - i
    mats, labels, seen = [], [], set()
    cartan = []
    for i in range(n):
        for j in range(n):
            if (i, j) in seen or (bar(j), bar(i)) in seen:
                continue
            if i == bar(i) and j == bar(j):
                continue
            m = _unit_matrix(n, i, j)
            m.data[bar(j)][bar(i)] -= Q1
            if m.is_zero():
                continue
            seen.add((i, j))
            if i == j:
                cartan.append(len(mats))
            mats.append(m)
            labels.append(f"F{i + 1}{j + 1}")
    md = {"name": f"so{n}", "family": "so", "size": n, "cartan": cartan}
    return _matrix_units_to_basis(mats, labels, n, md)


def sp_algebra(n, form="standard"):
    """sp_n (n even) for J = [[0, I], [-I, 0]] or the consecutive-pairs form."""
    if n % 2 != 0:
        raise ValueError("sp requires an even matrix size")
    m0 = n // 2
    if form == "standard":
        pair = lambda i: (i + m0) if i < m0 else (i - m0)
        sign = lambda i: 1 if i < m0 else -1
    elif form == "nested":
        pair = lambda i: i + 1 if i % 2 == 0 else i - 1
        sign = lambda i: 1 if i % 2 == 0 else -1
    else:
        raise ValueError(form)
    # omega(e_i, e_pair(i)) = sign(i); X in sp iff X^T Om + Om X = 0
    mats, labels, seen = [], [], []
    cartan = []
    for i in range(n):
        for j in range(n):
            # basis element supported at (i, j) and its symplectic partner
            pi, pj = pair(i), pair(j)
            key = (i, j)
            pkey = (pj, pi)
            if pkey in seen or key in seen:
                continue
            m = _unit_matrix(n, i, j)
            c = -as_q(sign(i) * sign(j))
            if (pj, pi) == (i, j):
                pass  # self-paired entry, coefficient condition is automatic
            else:
                m.data[pj][pi] += c
            seen.append(key)
            if i == j:
                cartan.append(len(mats))
            mats.append(m)
            labels.append(f"S{i + 1}{j + 1}")
    md = {"name": f"sp{n}", "family": "sp", "size": n, "cartan": cartan,
          "form": form}
    alg = _matrix_units_to_basis(mats, labels, n, md)
    assert alg.dim == m0 * (2 * m0 + 1)
    return alg


def classical_algebra(family: str, n: int) -> LieAlgebraData:
    """Matrix Lie algebra of the stated size over Q (split forms)."""
    if n < 1:
        raise ValueError("size must be >= 1")
    if family == "gl":
        return gl_algebra(n)
    if family == "sl":
        return sl_algebra(n)
    if family == "so":
        return so_algebra(n)
    if family == "sp":
        return sp_algebra(n)
    raise ValueError(f"unknown family {family!r}")


def abelian_algebra(n):
    return LieAlgebraData(n, [f"a{i + 1}" for i in range(n)],
                          metadata={"name": f"abelian{n}"})


def heisenberg_algebra(n):
    """heis_n: dimension 2n+1, [p_i, q_i] = z, z central."""
    labels = [f"p{i + 1}" for i in range(n)] + [f"q{i + 1}" for i in range(n)] + ["z"]
    alg = LieAlgebraData(2 * n + 1, labels, metadata={"name": f"heis{n}"})
    for i in range(n):
        alg.set_bracket(i, n + i, {2 * n: Q1})
    return alg


def direct_sum(a: LieAlgebraData, b: LieAlgebraData) -> LieAlgebraData:
    labels = [f"L.{s}" for s in a.basis_labels] + [f"R.{s}" for s in b.basis_labels]
    out = LieAlgebraData(a.dim + b.dim, labels,
                         metadata={"name": f"{a.metadata.get('name')}+{b.metadata.get('name')}"})
    for (i, j), vec in a.brackets.items():
        out.set_bracket(i, j, dict(vec))
    for (i, j), vec in b.brackets.items():
        out.set_bracket(a.dim + i, a.dim + j, {a.dim + k: c for k, c in vec.items()})
    return out


# ---------------------------------------------------------------------------
# index, b(q), fingerprint
# ---------------------------------------------------------------------------


class IndexResult(int):
    """The index as an int, plus a flag recording sampling stabilisation."""

    def __new__(cls, value, stabilised=True, samples=()):
        obj = super().__new__(cls, value)
        obj.stabilised = stabilised
        obj.samples = tuple(samples)
        return obj


def index(L: LieAlgebraData, cfg: SampleConfig = SampleConfig()) -> IndexResult:
    """ind L = dim L - max_gamma rank B_gamma over sampled gamma, escalating.

    Two consecutive rounds with the same maximal rank stabilise the result;
    otherwise the height doubles, up to cfg.rounds escalations.
    """
    if L.dim == 0:
        return IndexResult(0, True)
    height = cfg.height
    best = -1
    agreed = False
    ranks = []
    for rnd in range(cfg.rounds):
        c = SampleConfig(cfg.seed, height, cfg.rounds)
        gamma = sample_vector(c, L.dim, round_idx=rnd, tag="index")
        r = rank(L.kirillov_form(gamma))
        ranks.append(r)
        if r == best:
            agreed = True
            break
        if r > best:
            best = r
        height *= 2
    return IndexResult(L.dim - best, stabilised=agreed, samples=ranks)


def b_of(L: LieAlgebraData, cfg: SampleConfig = SampleConfig()):
    """b(q) = (ind q + dim q)/2, exact integer."""
    ind = index(L, cfg)
    assert (int(ind) + L.dim) % 2 == 0
    return IndexResult((int(ind) + L.dim) // 2, stabilised=ind.stabilised)


@dataclass(frozen=True)
class Fingerprint:
    """Isomorphism surrogate: cheap exact invariants of a Lie algebra."""

    dim: int
    index: int
    derived_series_dims: tuple
    killing_rank: int
    center_dim: int

    def __post_init__(self):
        ds = self.derived_series_dims
        assert all(ds[i] >= ds[i + 1] for i in range(len(ds) - 1))
        assert (self.index - self.dim) % 2 == 0

    def __str__(self):
        return (f"(dim={self.dim}, ind={self.index}, "
                f"derived={list(self.derived_series_dims)}, "
                f"killing={self.killing_rank}, center={self.center_dim})")


def _ad_sparse(L: LieAlgebraData):
    """ad(x_i) for every i, as sparse {(row k, col j): c} dicts."""
    ads = [dict() for _ in range(L.dim)]
    for (i, j), vec in L.brackets.items():
        for k, c in vec.items():
            ads[i][(k, j)] = ads[i].get((k, j), Q0) + c
            ads[j][(k, i)] = ads[j].get((k, i), Q0) - c
    return ads


def killing_matrix(L: LieAlgebraData) -> QMatrix:
    ads = _ad_sparse(L)
    n = L.dim
    m = QMatrix.zero(n, n)
    for i in range(n):
        ai = ads[i]
        for j in range(i, n):
            aj = ads[j]
            if len(aj) < len(ai):
                ai_, aj_ = aj, ai
            else:
                ai_, aj_ = ai, aj
            s = Q0
            for (r, c), v in ai_.items():
                w = aj_.get((c, r))
                if w is not None:
                    s += v * w
            m.data[i][j] = s
            m.data[j][i] = s
    return m


def derived_series_dims(L: LieAlgebraData):
    """Dims of L, [L, L], [[L,L],[L,L]], ... until stable or zero."""
    dims = [L.dim]
    # first derived algebra straight from the sparse table
    span_rows = []
    for vec in L.brackets.values():
        row = [Q0] * L.dim
        for k, c in vec.items():
            row[k] = c
        span_rows.append(row)
    while True:
        if not span_rows:
            dims.append(0)
            break
        current = _span_basis(span_rows)
        r = len(current)
        dims.append(r)
        if r == dims[-2] or r == 0:
            break
        span_rows = []
        for a in range(r):
            for b in range(a + 1, r):
                v = L.bracket(current[a], current[b])
                if any(x != 0 for x in v):
                    span_rows.append(v)
    return tuple(dims)


def _span_basis(rows, expected_rank=None):
    """Reduced echelon basis of the row span."""
    red = []
    pivots = []
    for row in rows:
        row = row[:]
        for p, rr in zip(pivots, red):
            if row[p] != 0:
                f = row[p]
                row = [a - f * b for a, b in zip(row, rr)]
        nz = next((c for c in range(len(row)) if row[c] != 0), None)
        if nz is None:
            continue
        inv = Q1 / row[nz]
        row = [a * inv for a in row]
        # back-reduce earlier rows
        for idx, (p, rr) in enumerate(zip(pivots, red)):
            if rr[nz] != 0:
                f = rr[nz]
                red[idx] = [a - f * b for a, b in zip(rr, row)]
        pivots.append(nz)
        red.append(row)
    order = sorted(range(len(pivots)), key=lambda t: pivots[t])
    basis = [red[t] for t in order]
    if expected_rank is not None:
        assert len(basis) == expected_rank
    return basis


def center_dim(L: LieAlgebraData) -> int:
    """dim of the center = common kernel of all ad maps.

    Rank of the stacked ad rows, accumulated by online echelon over the sparse
    rows actually present in the structure table.
    """
    rows = {}
    for (i, j), vec in L.brackets.items():
        for k, c in vec.items():
            rows.setdefault((i, k), [Q0] * L.dim)[j] = c
            rows.setdefault((j, k), [Q0] * L.dim)[i] = -c
    if not rows:
        return L.dim
    basis = _span_basis(list(rows.values()))
    return L.dim - len(basis)


def fingerprint(L: LieAlgebraData, cfg: SampleConfig = SampleConfig()) -> Fingerprint:
    ind = index(L, cfg)
    return Fingerprint(
        dim=L.dim,
        index=int(ind),
        derived_series_dims=derived_series_dims(L),
        killing_rank=rank(killing_matrix(L)),
        center_dim=center_dim(L),
    )


def fingerprint_sum(a: Fingerprint, b: Fingerprint) -> Fingerprint:
    """Fingerprint of a direct sum, combined componentwise."""
    la, lb = list(a.derived_series_dims), list(b.derived_series_dims)
    n = max(len(la), len(lb))
    la += [la[-1]] * (n - len(la))
    lb += [lb[-1]] * (n - len(lb))
    return Fingerprint(
        dim=a.dim + b.dim,
        index=a.index + b.index,
        derived_series_dims=tuple(x + y for x, y in zip(la, lb)),
        killing_rank=a.killing_rank + b.killing_rank,
        center_dim=a.center_dim + b.center_dim,
    )


# ---------------------------------------------------------------------------
# subalgebras
# ---------------------------------------------------------------------------


def subalgebra(L: LieAlgebraData, span, labels=None, check=True) -> LieAlgebraData:
    """Structure constants of a bracket-closed span, in the echelonised basis.

    span: list of coefficient vectors in the basis of L.  Raises
    NotClosedError with a witness pair if a bracket leaves the span.
    """
    rows = [[as_q(x) for x in v] for v in span]
    basis = _span_basis(rows)
    k = len(basis)
    pivots = [next(c for c in range(L.dim) if b[c] != 0) for b in basis]

    def expand(vec):
        v = vec[:]
        coeffs = [Q0] * k
        for idx in range(k):
            p = pivots[idx]
            if v[p] != 0:
                f = v[p] / basis[idx][p]
                coeffs[idx] = f
                v = [a - f * b for a, b in zip(v, basis[idx])]
        if any(x != 0 for x in v):
            return None
        return coeffs

    sub = LieAlgebraData(k, labels or [f"y{i + 1}" for i in range(k)],
                         metadata={"name": "subalgebra", "parent": L,
                                   "embedding": basis})
    for i in range(k):
        for j in range(i + 1, k):
            v = L.bracket(basis[i], basis[j])
            coeffs = expand(v)
            if coeffs is None:
                if check:
                    raise NotClosedError(i, j)
                continue
            sub.set_bracket(i, j, {t: c for t, c in enumerate(coeffs) if c != 0})
    return sub
