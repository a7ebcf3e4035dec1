"""Construction of the g-modules appearing in the verification tables.

Every representation is a list of exact rational action matrices, one per
basis element of the algebra, together with per-summand block bookkeeping and
(when the Cartan acts diagonally) the list of weights of the chosen module
basis.  The commutator compatibility check `check_representation` is the
ground truth every constructor is tested against.

The spin representations use the fermionic Fock model: so_n in the split form
acts through the Clifford algebra on the exterior algebra of a maximal
isotropic subspace, which keeps all matrix entries in 1/2 Z.
"""

from __future__ import annotations

import itertools

from .liealg import LieAlgebraData, classical_algebra
from .qlinalg import QMatrix, Q0, Q1, QQ, as_q


class RepresentationData:
    """Action matrices of a basis of g on a module V."""

    def __init__(self, algebra: LieAlgebraData, action, label="", blocks=None,
                 weights=None):
        self.algebra = algebra
        self.action = action
        assert len(action) == algebra.dim
        self.dim_V = action[0].rows if action else 0
        for m in action:
            assert m.rows == m.cols == self.dim_V
        self.label = label
        # blocks: list of (label, offset, size) covering [0, dim_V)
        self.blocks = blocks or [(label or "V", 0, self.dim_V)]
        self.weights = weights

    def __repr__(self):
        return f"<module {self.label!r} of {self.algebra!r}, dim {self.dim_V}>"

    def act(self, i, v):
        return self.action[i].matvec(v)


def check_representation(R: RepresentationData, max_cost=10 ** 7):
    """Exhaustive commutator compatibility, cost-capped.

    [rho(x_i), rho(x_j)] must equal rho([x_i, x_j]) for all basis pairs.  Runs
    on integer-scaled numpy matrices when the entries fit in int64 (exact),
    with per-pair rational fallback otherwise.
    """
    import math

    import numpy as np

    L = R.algebra
    n = R.dim_V
    if L.dim * n ** 2 > max_cost:
        return

    def to_int(m):
        den = 1
        for row in m.data:
            for x in row:
                d = int(x.denominator)
                if d != 1:
                    den = den * d // math.gcd(den, d)
        return (np.array([[int(x * den) for x in row] for row in m.data],
                         dtype=np.int64), den)

    scaled = [to_int(m) for m in R.action]
    amax = max((int(np.abs(a).max()) if a.size else 0) for a, _ in scaled)
    use_np = n * amax * amax < 2 ** 62
    for i in range(L.dim):
        for j in range(i + 1, L.dim):
            if use_np:
                ai, di = scaled[i]
                aj, dj = scaled[j]
                comm = ai @ aj - aj @ ai
                expect = np.zeros((n, n), dtype=np.int64)
                ok = True
                for k, c in L.bracket_basis(i, j).items():
                    ak, dk = scaled[k]
                    num = int(c.numerator) * di * dj
                    den = int(c.denominator) * dk
                    if num % den != 0:
                        ok = False
                        break
                    expect = expect + ak * (num // den)
                if ok:
                    assert np.array_equal(comm, expect), (
                        f"representation property fails at pair ({i},{j})")
                    continue
            _comm_check_rational(R, i, j)


def _comm_check_rational(R, i, j):
    L = R.algebra
    m = R.action[i] * R.action[j] - R.action[j] * R.action[i]
    e = QMatrix.zero(R.dim_V, R.dim_V)
    for k, c in L.bracket_basis(i, j).items():
        e = e + R.action[k].scale(c)
    assert (m - e).is_zero(), f"representation property fails at pair ({i},{j})"


def _diag_weights(R: RepresentationData):
    """Weights of the module basis under the algebra's Cartan indices.

    Requires every Cartan action matrix to be diagonal (true for all the
    constructors in this module); returns a tuple per basis vector.
    """
    cartan = R.algebra.metadata.get("cartan")
    if cartan is None:
        return None
    weights = []
    for v in range(R.dim_V):
        w = []
        for ci in cartan:
            m = R.action[ci]
            for r in range(R.dim_V):
                if r != v and m.data[r][v] != 0:
                    return None  # not diagonal, no weight bookkeeping
            w.append(m.data[v][v])
        weights.append(tuple(w))
    return weights


# ---------------------------------------------------------------------------
# constructors
# ---------------------------------------------------------------------------


def standard_rep(L: LieAlgebraData) -> RepresentationData:
    """The defining module k^n of a matrix-constructed algebra."""
    mats = L.metadata.get("matrices")
    if mats is None:
        raise ValueError("standard_rep requires a matrix-constructed algebra")
    R = RepresentationData(L, [m.copy() for m in mats], label="phi1")
    R.weights = _diag_weights(R)
    return R


def trivial_rep(L: LieAlgebraData, d=1) -> RepresentationData:
    R = RepresentationData(L, [QMatrix.zero(d, d) for _ in range(L.dim)],
                           label="trivial")
    R.weights = [tuple(Q0 for _ in L.metadata.get("cartan", []))] * d
    return R


def dual_rep(R: RepresentationData) -> RepresentationData:
    """Dual module: action matrices are negated transposes."""
    out = RepresentationData(R.algebra, [m.transpose().scale(-1) for m in R.action],
                             label=f"({R.label})*")
    if R.weights is not None:
        out.weights = [tuple(-w for w in ws) for ws in R.weights]
    return out


def direct_sum_rep(*reps, labels=None) -> RepresentationData:
    alg = reps[0].algebra
    assert all(r.algebra is alg for r in reps)
    n = sum(r.dim_V for r in reps)
    action = []
    for i in range(alg.dim):
        m = QMatrix.zero(n, n)
        off = 0
        for r in reps:
            a = r.action[i]
            for x in range(r.dim_V):
                row = a.data[x]
                mrow = m.data[off + x]
                for y in range(r.dim_V):
                    if row[y]:
                        mrow[off + y] = row[y]
            off += r.dim_V
        action.append(m)
    blocks = []
    off = 0
    for idx, r in enumerate(reps):
        lbl = labels[idx] if labels else f"{r.label}#{idx}"
        blocks.append((lbl, off, r.dim_V))
        off += r.dim_V
    out = RepresentationData(alg, action, label="+".join(r.label for r in reps),
                             blocks=blocks)
    if all(r.weights is not None for r in reps):
        out.weights = [w for r in reps for w in r.weights]
    return out


def exterior_power(R: RepresentationData, k: int) -> RepresentationData:
    """Lambda^k of a module, derivation action on the wedge basis."""
    n = R.dim_V
    if k > n:
        raise ValueError("k exceeds the module dimension")
    basis = list(itertools.combinations(range(n), k))
    idx = {b: i for i, b in enumerate(basis)}
    N = len(basis)
    action = []
    for a in range(R.algebra.dim):
        m = QMatrix.zero(N, N)
        mat = R.action[a]
        for b, col in idx.items():
            for pos in range(k):
                v = b[pos]
                for w in range(n):
                    c = mat.data[w][v]
                    if not c:
                        continue
                    if w in b and w != v:
                        continue
                    newb = list(b)
                    newb[pos] = w
                    sign = 1
                    # sort newb, tracking the permutation sign
                    arr = newb[:]
                    for x in range(1, k):
                        y = x
                        while y > 0 and arr[y - 1] > arr[y]:
                            arr[y - 1], arr[y] = arr[y], arr[y - 1]
                            sign = -sign
                            y -= 1
                    row = idx[tuple(arr)]
                    m.data[row][col] += c * sign
        action.append(m)
    out = RepresentationData(R.algebra, action, label=f"L{k}({R.label})")
    if R.weights is not None:
        out.weights = [tuple(sum(ws) for ws in zip(*(R.weights[i] for i in b)))
                       if k else tuple(Q0 for _ in R.weights[0]) for b in basis]
    out.basis_tags = basis
    return out


def symmetric_power(R: RepresentationData, k: int) -> RepresentationData:
    """S^k of a module, derivation action on the monomial basis."""
    n = R.dim_V
    basis = list(itertools.combinations_with_replacement(range(n), k))
    idx = {b: i for i, b in enumerate(basis)}
    N = len(basis)
    action = []
    for a in range(R.algebra.dim):
        m = QMatrix.zero(N, N)
        mat = R.action[a]
        for b, col in idx.items():
            for pos in range(k):
                if pos > 0 and b[pos] == b[pos - 1]:
                    continue  # derivation on equal slots handled by multiplicity
                mult = b.count(b[pos])
                v = b[pos]
                for w in range(n):
                    c = mat.data[w][v]
                    if not c:
                        continue
                    newb = tuple(sorted(b[:pos] + (w,) + b[pos + 1:]))
                    m.data[idx[newb]][col] += c * mult
        action.append(m)
    out = RepresentationData(R.algebra, action, label=f"S{k}({R.label})")
    if R.weights is not None:
        out.weights = [tuple(sum(ws) for ws in zip(*(R.weights[i] for i in b)))
                       if k else tuple(Q0 for _ in R.weights[0]) for b in basis]
    out.basis_tags = basis
    return out


class FormNotInvariantError(ValueError):
    def __init__(self, witness):
        self.witness = witness
        super().__init__(f"form not invariant: witness basis index {witness}")


def check_form_invariant(R: RepresentationData, form: QMatrix):
    """form(Xu, v) + form(u, Xv) = 0 for every basis action X."""
    for i, m in enumerate(R.action):
        c = m.transpose() * form + form * m
        if not c.is_zero():
            raise FormNotInvariantError(i)


def contraction_kernel(R: RepresentationData, form: QMatrix, k: int
                       ) -> RepresentationData:
    """Primitive part of Lambda^k: kernel of contraction with the form.

    The contraction sends v_1 ^ ... ^ v_k to
    sum_{a<b} (-1)^{a+b-1} form(v_a, v_b) v_1 ^ ... (drop a, b) ... ^ v_k;
    its kernel is a submodule because the form is invariant (verified).
    The kernel basis is computed weight block by weight block, so the result
    keeps diagonal Cartan actions.
    """
    check_form_invariant(R, form)
    ext = exterior_power(R, k)
    if k < 2:
        return ext
    small = exterior_power(R, k - 2)
    basis_k = ext.basis_tags
    basis_s = {b: i for i, b in enumerate(small.basis_tags)}
    # matrix of the contraction map
    C = QMatrix.zero(len(basis_s), len(basis_k))
    for col, b in enumerate(basis_k):
        for a in range(k):
            for c in range(a + 1, k):
                f = form.data[b[a]][b[c]]
                if not f:
                    continue
                rest = tuple(x for t, x in enumerate(b) if t not in (a, c))
                sign = (-1) ** (a + c - 1)
                C.data[basis_s[rest]][col] += f * sign
    kernel_vectors = _kernel_by_weight(C, ext)
    return _submodule(ext, kernel_vectors, label=f"L{k}0({R.label})")


def _kernel_by_weight(C: QMatrix, ext: RepresentationData):
    """Kernel basis of C, block-diagonalised by module weights when known."""
    from .qlinalg import kernel_basis

    if ext.weights is None:
        return kernel_basis(C)
    groups = {}
    for i, w in enumerate(ext.weights):
        groups.setdefault(w, []).append(i)
    vectors = []
    for w in sorted(groups):
        cols = groups[w]
        sub = QMatrix(C.rows, len(cols),
                      [[C.data[r][c] for c in cols] for r in range(C.rows)])
        for v in kernel_basis(sub):
            full = [Q0] * C.cols
            for c, x in zip(cols, v):
                full[c] = x
            vectors.append(full)
    return vectors


def _submodule(R: RepresentationData, vectors, label):
    """Restrict the action to the span of `vectors` (assumed invariant)."""
    from .qlinalg import solve_right

    k = len(vectors)
    basis_mat = QMatrix(R.dim_V, k, [[vectors[j][i] for j in range(k)]
                                     for i in range(R.dim_V)])
    action = []
    for m in R.action:
        cols = []
        for v in vectors:
            img = m.matvec(v)
            sol = solve_right(basis_mat, img)
            assert sol is not None, "span is not invariant under the action"
            cols.append(sol)
        action.append(QMatrix(k, k, [[cols[j][i] for j in range(k)]
                                     for i in range(k)]))
    out = RepresentationData(R.algebra, action, label=label)
    if R.weights is not None:
        ws = []
        for v in vectors:
            support = [i for i, x in enumerate(v) if x != 0]
            w0 = R.weights[support[0]]
            assert all(R.weights[i] == w0 for i in support)
            ws.append(w0)
        out.weights = ws
    return out


# ---------------------------------------------------------------------------
# spin representations
# ---------------------------------------------------------------------------


def _clifford_generators(n):
    """Gamma maps for the split form on k^n, acting on Lambda(U).

    U = span(e_1 .. e_m) is maximal isotropic, the pairing is with
    e_bar(i) = e_{n+1-i}; convention gamma(v) gamma(w) + gamma(w) gamma(v)
    = 2 B(v, w).  Odd n has a middle vector acting as the parity involution.
    Each gamma is stored sparsely as {col: (row, coeff)} (at most one entry
    per column), so products compose in O(dim).
    """
    m = n // 2
    basis = [s for r in range(m + 1) for s in itertools.combinations(range(m), r)]
    idx = {s: i for i, s in enumerate(basis)}

    def creation(i):
        g = {}
        for s, col in idx.items():
            if i in s:
                continue
            new = tuple(sorted(s + (i,)))
            sign = (-1) ** sum(1 for x in s if x < i)
            g[col] = (idx[new], QQ(sign))
        return g

    def annihilation(i):
        g = {}
        for s, col in idx.items():
            if i not in s:
                continue
            new = tuple(x for x in s if x != i)
            sign = (-1) ** sum(1 for x in s if x < i)
            g[col] = (idx[new], QQ(2 * sign))
        return g

    gammas = [None] * n
    for i in range(m):
        gammas[i] = creation(i)
        gammas[n - 1 - i] = annihilation(i)
    if n % 2 == 1:
        gammas[m] = {col: (col, QQ((-1) ** len(s))) for s, col in idx.items()}
    return gammas, basis


def _gamma_commutator(gi, gj, N):
    """[gamma_i, gamma_j] as a sparse {(row, col): coeff} dict."""
    out = {}
    for col in range(N):
        hit = gj.get(col)
        if hit is not None:
            mid, c1 = hit
            hit2 = gi.get(mid)
            if hit2 is not None:
                row, c2 = hit2
                out[(row, col)] = out.get((row, col), Q0) + c1 * c2
        hit = gi.get(col)
        if hit is not None:
            mid, c1 = hit
            hit2 = gj.get(mid)
            if hit2 is not None:
                row, c2 = hit2
                out[(row, col)] = out.get((row, col), Q0) - c1 * c2
    return {p: v for p, v in out.items() if v != 0}


def spin_rep(n: int, half: str | None = None, L=None) -> RepresentationData:
    """Spin (n odd) or half-spin (n even) representation of so_n.

    half: 'even' or 'odd' selects the chirality for even n (the parity of the
    Fock degree); must be None for odd n.
    """
    if n < 3:
        raise ValueError("spin_rep requires n >= 3")
    if n % 2 == 1 and half is not None:
        raise ValueError("chirality only exists for even n")
    if n % 2 == 0 and half not in ("even", "odd"):
        raise ValueError("even n requires half='even' or half='odd'")
    if L is None:
        L = classical_algebra("so", n)
    else:
        assert L.metadata.get("family") == "so" and L.metadata.get("size") == n
    gammas, basis = _clifford_generators(n)
    N = len(basis)
    mats = L.metadata["matrices"]
    n_sq = L.metadata["matrix_size"]
    action = []
    quarter = QQ(1, 4)
    for bm in mats:
        # bm = E_ij - E_{bar j, bar i} = R_{e_i, e_bar(j)}, and
        # sigma(R_{v,w}) = 1/4 [gamma(v), gamma(w)]; walk each antisymmetric
        # entry pair once
        acc = {}
        seenpairs = set()
        for p in range(n_sq):
            row = bm.data[p]
            for q in range(n_sq):
                c = row[q]
                if not c:
                    continue
                if (n_sq - 1 - q, n_sq - 1 - p) in seenpairs:
                    continue
                seenpairs.add((p, q))
                comm = _gamma_commutator(gammas[p], gammas[n_sq - 1 - q], N)
                f = c * quarter
                for pos, v in comm.items():
                    acc[pos] = acc.get(pos, Q0) + f * v
        m_out = QMatrix.zero(N, N)
        for (r, col), v in acc.items():
            if v != 0:
                m_out.data[r][col] = v
        action.append(m_out)
    if n % 2 == 1:
        out = RepresentationData(L, action, label=f"spin({n})")
        out.weights = _spin_weights(L, basis, n)
        return out
    # even: project onto the chosen parity
    want = 0 if half == "even" else 1
    keep = [i for i, s in enumerate(basis) if len(s) % 2 == want]
    sub_action = []
    for m in action:
        sub = QMatrix(len(keep), len(keep),
                      [[m.data[r][c] for c in keep] for r in keep])
        # verify the complementary block vanishes
        drop = [i for i in range(len(basis)) if i not in keep]
        for r in drop:
            for c in keep:
                assert m.data[r][c] == 0, "chirality block is not invariant"
        sub_action.append(sub)
    out = RepresentationData(L, sub_action, label=f"spin({n},{half})")
    out.weights = _spin_weights(L, [basis[i] for i in keep], n)
    return out


def _spin_weights(L, basis, n):
    # sigma(F_ii) = 1/4 [gamma_i, gamma_bar(i)] has eigenvalue +1/2 on Fock
    # states occupied at i and -1/2 otherwise
    m = len(L.metadata["cartan"])
    return [tuple(QQ(1, 2) if i in s else QQ(-1, 2) for i in range(m))
            for s in basis]


# ---------------------------------------------------------------------------
# module specs (table column V)
# ---------------------------------------------------------------------------


def adjoint_rep(L: LieAlgebraData) -> RepresentationData:
    action = [L.ad(i) for i in range(L.dim)]
    out = RepresentationData(L, action, label="adjoint")
    cartan = L.metadata.get("cartan")
    if cartan is not None:
        out.weights = _diag_weights(out)
    return out


def symplectic_form(n: int) -> QMatrix:
    """J = [[0, I], [-I, 0]] on k^n, n even."""
    assert n % 2 == 0
    m0 = n // 2
    J = QMatrix.zero(n, n)
    for i in range(m0):
        J.data[i][m0 + i] = Q1
        J.data[m0 + i][i] = -Q1
    return J


def orthogonal_form(n: int) -> QMatrix:
    """Split symmetric form: antidiagonal ones."""
    B = QMatrix.zero(n, n)
    for i in range(n):
        B.data[i][n - 1 - i] = Q1
    return B


def weight_module(family: str, n: int, label: str, L=None) -> RepresentationData:
    """Resolve one fundamental-weight label for the given family and size.

    Implements exactly the constructors the tables need: phi1 everywhere,
    spin/half-spin weights for so, primitive exterior powers for sp.
    """
    L = L or classical_algebra(family, n)
    if label == "trivial":
        return trivial_rep(L)
    assert label.startswith("phi")
    k = int(label[3:])
    if k == 1:
        # phi1 is always the defining module in the tables, also for the tiny
        # ranks where the fundamental-weight label would collide with a spin
        return standard_rep(L)
    if family == "so":
        rank_ = n // 2
        if n % 2 == 1:
            if k == rank_:
                return spin_rep(n, L=L)
            if k < rank_:
                return exterior_power(standard_rep(L), k)
        else:
            if k == rank_:
                return spin_rep(n, "odd", L=L)
            if k == rank_ - 1:
                return spin_rep(n, "even", L=L)
            if k < rank_ - 1:
                return exterior_power(standard_rep(L), k)
    elif family == "sp":
        if k == 1:
            return standard_rep(L)
        return contraction_kernel(standard_rep(L), symplectic_form(n), k)
    elif family in ("sl", "gl"):
        if k == 1:
            return standard_rep(L)
        return exterior_power(standard_rep(L), k)
    raise ValueError(f"unsupported weight label {label} for {family}{n}")


def build_module(family: str, n: int, summands, L=None) -> RepresentationData:
    """Direct sum with multiplicities; summands: list of (label, multiplicity)."""
    L = L or classical_algebra(family, n)
    reps = []
    labels = []
    cache = {}
    for label, mult in summands:
        assert mult >= 1
        if label not in cache:
            cache[label] = weight_module(family, n, label, L=L)
        for c in range(mult):
            reps.append(cache[label])
            labels.append(f"{label}.{c}" if mult > 1 else label)
    return direct_sum_rep(*reps, labels=labels)
