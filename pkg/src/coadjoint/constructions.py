"""Explicit invariant constructions.

Principal-minor sums Delta_k and Pfaffians (numeric evaluators and symbolic
expansions), the two nilpotent-centraliser matrix layouts for sp together with
the extraction of the highest graded components of Delta_k restricted to them,
the restriction homomorphism psi_x, Z2-contractions with their highest-
component generators, Takiff algebras, and the lift of quadratic-in-g
invariants through the copy of g inside S^2 of the standard symplectic module.

Matrix realisations identify g with g* through the trace form <X, Y> = tr XY;
on a layout the coordinates are read in the dual basis of the drawn basis of
the centraliser, and the scalar t scaling the constant f-block tracks the
f-degree, so the coefficient of t^d is the highest f-component when d is the
top power.
"""

from __future__ import annotations

from dataclasses import dataclass

from .invariants import MultiPoly, is_invariant, lie_derivative
from .liealg import LieAlgebraData, classical_algebra, subalgebra
from .qlinalg import (
    Q0,
    Q1,
    QQ,
    QMatrix,
    SampleConfig,
    as_q,
    inverse,
    kernel_basis,
    sample_vector,
)
from .repn import (
    RepresentationData,
    adjoint_rep,
    direct_sum_rep,
    standard_rep,
    symplectic_form,
)
from .semidirect import SemiDirectProduct, semidirect, stabiliser_in_V


# ---------------------------------------------------------------------------
# numeric evaluators
# ---------------------------------------------------------------------------


def principal_minor_sums(M: QMatrix):
    """[E_0 .. E_N]: E_k = sum of principal k x k minors, exact.

    Faddeev-LeVerrier on the characteristic polynomial:
    det(lambda I - M) = sum lambda^{N-k} (-1)^k E_k.
    """
    n = M.rows
    assert n == M.cols
    coeffs = [Q1]  # char poly coefficients a_0 = 1, a_k
    Mk = QMatrix.identity(n)
    for k in range(1, n + 1):
        Mk = M * Mk
        tr = sum((Mk.data[i][i] for i in range(n)), Q0)
        ak = -tr / QQ(k)
        coeffs.append(ak)
        if k < n:
            for i in range(n):
                Mk.data[i][i] += ak
    return [coeffs[k] * (-1) ** k for k in range(n + 1)]


def delta_k_matrix(M: QMatrix, k: int):
    """Sum of the principal k-minors of M.

    Sign convention: for the characteristic polynomial
    det(lambda I - M) = lambda^N - c_1 lambda^{N-1} + c_2 lambda^{N-2} - ...,
    Delta_k(M) = c_k.
    """
    if k > M.rows:
        raise ValueError("k exceeds the matrix size")
    return principal_minor_sums(M)[k]


def pfaffian(M: QMatrix):
    """Pfaffian of an antisymmetric matrix of even size, exact."""
    n = M.rows
    if n != M.cols or n % 2 != 0:
        raise ValueError("pfaffian requires an antisymmetric matrix of even size")
    if not M.is_antisymmetric():
        raise ValueError("matrix is not antisymmetric")
    memo = {}

    def pf(idx):
        if not idx:
            return Q1
        if idx in memo:
            return memo[idx]
        i0 = idx[0]
        total = Q0
        for pos in range(1, len(idx)):
            c = M.data[i0][idx[pos]]
            if c != 0:
                rest = idx[1:pos] + idx[pos + 1:]
                total += c * pf(rest) * (-1) ** (pos - 1)
        memo[idx] = total
        return total

    return pf(tuple(range(n)))


@dataclass
class EvaluatorPoly:
    """Black-box exact polynomial: evaluation plus a total-degree bound."""

    fn: object
    nvars: int
    degree_bound: int
    label: str = ""

    def evaluate(self, coords):
        assert len(coords) == self.nvars
        return self.fn([as_q(c) for c in coords])

    def spot_check(self, cfg: SampleConfig = SampleConfig(), trials=3):
        """Interpolation along random rays reproduces repeated evaluation."""
        from .qlinalg import interpolate_coeffs

        for t in range(trials):
            c = SampleConfig(cfg.seed + t, cfg.height, cfg.rounds)
            base = sample_vector(c, self.nvars, 0, "spotbase")
            nodes = [QQ(i + 1) for i in range(self.degree_bound + 1)]
            vals = [self.evaluate([x * s for x in base]) for s in nodes]
            poly = interpolate_coeffs(vals)
            probe = QQ(self.degree_bound + 5)
            direct = self.evaluate([x * probe for x in base])
            horner = Q0
            for a in reversed(poly):
                horner = horner * probe + a
            assert horner == direct, "degree bound too small for this evaluator"
        return True


# ---------------------------------------------------------------------------
# matrix realisations (layouts)
# ---------------------------------------------------------------------------


@dataclass
class LayoutCoord:
    kind: str             # "C" (top grade), "A" (so_m part), "v", "sp"
    label: str
    generator: QMatrix    # centraliser basis element the coordinate is dual to
    eval_matrix: QMatrix  # trace-dual inside the opposite centraliser
    target: int | None    # variable index in the target semi-direct product


class MatrixRealisation:
    """Coordinates of a centraliser dual drawn inside an N x N matrix space.

    evaluate(coords, t) returns t * const + sum coords[i] * eval_matrix[i].
    The eval matrices are trace-dual to the generator basis (they live in the
    opposite centraliser), so the point represents the functional
    <matrix, .> on the centraliser whose value on generator i is coords[i],
    and t reads the complementary sl2-direction: the t-degree of a restricted
    invariant is its f-degree.
    """

    def __init__(self, N, const, coords, target: SemiDirectProduct | None,
                 meta=None):
        self.N = N
        self.const = const
        self.coords = coords
        self.target = target
        self.meta = meta or {}

    @property
    def n_coords(self):
        return len(self.coords)

    def evaluate(self, values, t=1) -> QMatrix:
        assert len(values) == self.n_coords
        out = self.const.scale(as_q(t))
        for v, c in zip(values, self.coords):
            if v:
                out = out + c.eval_matrix.scale(as_q(v))
        return out

    @staticmethod
    def plain(N):
        """The full matrix space: one coordinate per entry."""
        coords = []
        for i in range(N):
            for j in range(N):
                m = QMatrix.zero(N, N)
                m.data[i][j] = Q1
                coords.append(LayoutCoord("entry", f"x{i + 1}{j + 1}", m, m, None))
        return MatrixRealisation(N, QMatrix.zero(N, N), coords, None)


def delta_k(layout: MatrixRealisation, k: int, t=1) -> EvaluatorPoly:
    """Delta_k restricted to the layout, as a black-box exact evaluator."""
    if k > layout.N:
        raise ValueError("k exceeds the layout size")

    def fn(coords):
        return delta_k_matrix(layout.evaluate(coords, t=t), k)

    return EvaluatorPoly(fn=fn, nvars=layout.n_coords, degree_bound=k,
                         label=f"Delta_{k}")


# ---------------------------------------------------------------------------
# symbolic minors
# ---------------------------------------------------------------------------


def symbolic_matrix_det(entries, nvars, prune=None):
    """Determinant of a matrix of MultiPolys by column-subset expansion.

    prune: optional function MultiPoly -> MultiPoly applied after each
    accumulation (used to drop graded parts that cannot contribute).
    """
    N = len(entries)
    states = {(): MultiPoly.constant(nvars, 1)}
    for i in range(N):
        new = {}
        for cols, val in states.items():
            used = set(cols)
            for j in range(N):
                if j in used:
                    continue
                a = entries[i][j]
                if a.is_zero():
                    continue
                sign = (-1) ** sum(1 for c in cols if c > j)
                term = val * a
                if sign < 0:
                    term = -term
                key = tuple(sorted(cols + (j,)))
                if key in new:
                    new[key] = new[key] + term
                else:
                    new[key] = term
        if prune:
            new = {k: prune(v) for k, v in new.items()}
        states = {k: v for k, v in new.items() if not v.is_zero()}
        if not states:
            return MultiPoly(nvars)
    return states.get(tuple(range(N)), MultiPoly(nvars))


def symbolic_minor_sum(entries, nvars, k, prune=None):
    """E_k of a symbolic matrix: det(lambda I + X) via one extra variable.

    The prune hook sees polynomials in the widened ring (lambda last) so the
    hook supplied by callers is wrapped to act on the original variables.
    """
    N = len(entries)
    if k == N:
        return symbolic_matrix_det(entries, nvars, prune=prune)
    lam = nvars  # extra variable index
    ext = []
    for i in range(N):
        row = []
        for j in range(N):
            p = _widen(entries[i][j], nvars + 1)
            if i == j:
                p = p + MultiPoly.variable(nvars + 1, lam)
            row.append(p)
        ext.append(row)

    def prune_ext(P):
        keep = {m: c for m, c in P.terms.items() if m[lam] <= N - k}
        Q = MultiPoly(nvars + 1, keep)
        if prune is None:
            return Q
        return prune(Q)

    det = symbolic_matrix_det(ext, nvars + 1, prune=prune_ext)
    out = {}
    for m, c in det.terms.items():
        if m[lam] == N - k:
            out[m[:lam]] = c
    return MultiPoly(nvars, out)


def _widen(P, nvars):
    return MultiPoly(nvars, {m + (0,) * (nvars - P.nvars): c
                             for m, c in P.terms.items()})


def symbolic_pfaffian(entries, nvars):
    """Pfaffian of an antisymmetric matrix of MultiPolys."""
    n = len(entries)
    assert n % 2 == 0
    memo = {}

    def pf(idx):
        if not idx:
            return MultiPoly.constant(nvars, 1)
        if idx in memo:
            return memo[idx]
        i0 = idx[0]
        total = MultiPoly(nvars)
        for pos in range(1, len(idx)):
            a = entries[i0][idx[pos]]
            if a.is_zero():
                continue
            rest = idx[1:pos] + idx[pos + 1:]
            term = a * pf(rest)
            if (pos - 1) % 2 == 1:
                term = -term
            total = total + term
        memo[idx] = total
        return total

    return pf(tuple(range(n)))


# ---------------------------------------------------------------------------
# highest graded components
# ---------------------------------------------------------------------------


def highest_component(P, S: SemiDirectProduct, block):
    """(top component, degree) of P in the chosen grading direction.

    P: MultiPoly on S.total; block: a block label or index of S.blocks.  The
    top component is the multi-homogeneous part of highest degree in the
    block's variables.
    """
    if isinstance(P, EvaluatorPoly):
        raise TypeError("use highest_component_evaluator for black boxes")
    if P.is_zero():
        raise ValueError("zero polynomial has no highest component")
    bidx = _block_index(S, block)
    off, sz = S.blocks[bidx][1], S.blocks[bidx][2]
    best = -1
    for m in P.terms:
        d = sum(m[off:off + sz])
        if d > best:
            best = d
    return P.coefficient_of_block_degree(off, sz, best), best


def _block_index(S, block):
    if isinstance(block, int):
        return block
    for i, (lbl, off, sz) in enumerate(S.blocks):
        if lbl == block:
            return i
    raise KeyError(block)


def highest_component_evaluator(E: EvaluatorPoly, block_indices,
                                cfg: SampleConfig = SampleConfig()):
    """(EvaluatorPoly of the top block-graded part, top degree d).

    The degree d is read off by exact interpolation of t -> E(scaled point)
    at sampled points with escalation (the degree can only drop on a proper
    closed subset); the returned evaluator re-interpolates per call, exactly.
    """
    from .qlinalg import interpolate_coeffs

    block_indices = list(block_indices)

    def t_expand(point):
        nodes = [QQ(i + 1) for i in range(E.degree_bound + 1)]
        vals = []
        for t in nodes:
            scaled = list(point)
            for i in block_indices:
                scaled[i] = scaled[i] * t
            vals.append(E.evaluate(scaled))
        return interpolate_coeffs(vals)

    d = -1
    height = cfg.height
    for rnd in range(cfg.rounds):
        c = SampleConfig(cfg.seed, height, cfg.rounds)
        pt = sample_vector(c, E.nvars, rnd, "topdeg")
        coeffs = t_expand(pt)
        top = max((i for i, a in enumerate(coeffs) if a != 0), default=-1)
        if top == d:
            break
        d = max(d, top)
        height *= 2
    if d < 0:
        raise ValueError("zero polynomial has no highest component")

    def fn(point):
        return t_expand(point)[d]

    return EvaluatorPoly(fn=fn, nvars=E.nvars, degree_bound=E.degree_bound,
                         label=f"{E.label}^top"), d


# ---------------------------------------------------------------------------
# centraliser layouts (Figures: minimal nilpotent, and partition (2^m, 1^{2n}))
# ---------------------------------------------------------------------------


def _unit(N, i, j, c=1):
    m = QMatrix.zero(N, N)
    m.data[i][j] = as_q(c)
    return m


def _ambient_sp_form(m, q):
    """Omega for coordinates (1..m | m+1..2m | 2m+1..2m+2q):
    group1/group2 dual isotropic, group3 standard symplectic."""
    N = 2 * m + 2 * q
    Om = QMatrix.zero(N, N)
    for a in range(m):
        Om.data[a][m + a] = Q1
        Om.data[m + a][a] = -Q1
    for r in range(q):
        Om.data[2 * m + r][2 * m + q + r] = Q1
        Om.data[2 * m + q + r][2 * m + r] = -Q1
    return Om


def _in_sp(X: QMatrix, Om: QMatrix) -> bool:
    return (X.transpose() * Om + Om * X).is_zero()


def centraliser_layout(m: int, q: int) -> MatrixRealisation:
    """Layout of f + g_e inside sp_{2m+2q} for e of partition (2^m, 1^{2q}).

    g_e = (so_m + sp_{2q}) |x (k^m x k^{2q} (+) S^2 k^m); the coordinates are
    ordered C (grade 2), A (so_m), v (m copies of the standard sp_{2q}-module,
    matched on the nose to the target semi-direct product), sp block.
    m = 1 is the minimal nilpotent case of the first figure.
    """
    assert m >= 1 and q >= 1
    N = 2 * m + 2 * q
    Om = _ambient_sp_form(m, q)
    sp_small = classical_algebra("sp", 2 * q)
    target = semidirect(
        sp_small,
        direct_sum_rep(*[standard_rep(sp_small) for _ in range(m)],
                       labels=[f"V{a + 1}" for a in range(m)])
        if m > 1 else standard_rep(sp_small),
    )
    e_mat = QMatrix.zero(N, N)
    f_mat = QMatrix.zero(N, N)
    for a in range(m):
        e_mat.data[a][m + a] = Q1
        f_mat.data[m + a][a] = Q1
    assert _in_sp(e_mat, Om) and _in_sp(f_mat, Om)
    gens = []
    # C: S^2 k^m at block (group1, group2), grade 2; contains e on the diagonal
    for a in range(m):
        for b in range(a, m):
            if a == b:
                mat = _unit(N, a, m + a)
            else:
                mat = _unit(N, a, m + b) + _unit(N, b, m + a)
            gens.append(("C", f"C{a + 1}{b + 1}", mat, None))
    # A: so_m, diagonally in blocks (1,1) and (2,2)
    for a in range(m):
        for b in range(a + 1, m):
            mat = (_unit(N, a, b) - _unit(N, b, a)
                   + _unit(N, m + a, m + b) - _unit(N, m + b, m + a))
            gens.append(("A", f"A{a + 1}{b + 1}", mat, None))
    # v: for copy a and standard index r: w_{a,r} = sgn(pair(r)) u_{a, pair(r)}
    # with u_{a,t} = E_{a, 2m+t} - sgn(t) E_{2m+pair(t), m+a}; this choice makes
    # the bracket with the sp block the standard action on each copy.
    def pair(r):
        return r + q if r < q else r - q

    def sgn(r):
        return 1 if r < q else -1

    def u_mat(a, t):
        return _unit(N, a, 2 * m + t) - _unit(N, 2 * m + pair(t), m + a, sgn(t))

    for a in range(m):
        for r in range(2 * q):
            mat = u_mat(a, pair(r)).scale(sgn(pair(r)))
            tgt = target.dim_g + a * 2 * q + r
            gens.append(("v", f"v{a + 1},{r + 1}", mat, tgt))
    # sp block: the classical sp_{2q} basis embedded at group3
    for bi, small in enumerate(sp_small.metadata["matrices"]):
        mat = QMatrix.zero(N, N)
        for i in range(2 * q):
            for j in range(2 * q):
                c = small.data[i][j]
                if c:
                    mat.data[2 * m + i][2 * m + j] = c
        gens.append(("sp", sp_small.basis_labels[bi], mat, bi))
    # sanity: every generator is in sp(Om) and commutes with e
    for kind, label, mat, tgt in gens:
        assert _in_sp(mat, Om), label
        assert (e_mat * mat - mat * e_mat).is_zero(), (
            f"{label} does not centralise e")
    # bracket match: [sp, v] realises the standard action on each copy
    vmats = {_v_tag(label): mat for kind, label, mat, tgt in gens if kind == "v"}
    spmats = [mat for kind, label, mat, tgt in gens if kind == "sp"]
    for bi, zemb in enumerate(spmats):
        zmat = sp_small.metadata["matrices"][bi]
        for a in range(m):
            for r in range(2 * q):
                comm = zemb * vmats[(a, r)] - vmats[(a, r)] * zemb
                expect = QMatrix.zero(N, N)
                for s in range(2 * q):
                    cc = zmat.data[s][r]
                    if cc:
                        expect = expect + vmats[(a, s)].scale(cc)
                assert (comm - expect).is_zero(), (
                    f"layout/semidirect bracket mismatch at sp#{bi}, v{a},{r}")
    # evaluation matrices: trace-duals of the generators inside the opposite
    # centraliser g_f = sigma(g_e), sigma the swap within every omega-pair
    # (an antisymplectic involution, so conjugation preserves sp(Om))
    perm = list(range(N))
    for a in range(m):
        perm[a], perm[m + a] = perm[m + a], perm[a]
    for r in range(q):
        perm[2 * m + r], perm[2 * m + q + r] = perm[2 * m + q + r], perm[2 * m + r]

    def mirror(X):
        return QMatrix(N, N, [[X.data[perm[i]][perm[j]] for j in range(N)]
                              for i in range(N)])

    assert (mirror(e_mat) - f_mat).is_zero()
    zs = [g[2] for g in gens]
    ms = [mirror(z) for z in zs]
    for mmat in ms:
        assert _in_sp(mmat, Om)
        assert (f_mat * mmat - mmat * f_mat).is_zero()
    k = len(zs)
    gram = QMatrix(k, k, [[_trace_pair(ms[i], zs[j]) for j in range(k)]
                          for i in range(k)])
    ginv = inverse(gram)
    coords = []
    for j, (kind, label, zmat, tgt) in enumerate(gens):
        dual = QMatrix.zero(N, N)
        for kidx in range(k):
            c = ginv.data[j][kidx]
            if c != 0:
                dual = dual + ms[kidx].scale(c)
        coords.append(LayoutCoord(kind, label, zmat, dual, tgt))
    layout = MatrixRealisation(N, e_mat, coords, target,
                               meta={"m": m, "q": q, "e": e_mat, "f": f_mat,
                                     "omega": Om})
    return layout


def _trace_pair(A: QMatrix, B: QMatrix):
    n = A.rows
    s = Q0
    for i in range(n):
        ra = A.data[i]
        for j in range(n):
            if ra[j]:
                b = B.data[j][i]
                if b:
                    s += ra[j] * b
    return s


def _v_tag(label):
    a, r = label[1:].split(",")
    return int(a) - 1, int(r) - 1


def minimal_nilpotent_centraliser_layout(n: int) -> MatrixRealisation:
    """Figure layout for the minimal nilpotent e in sp_{2n} (n >= 2):
    g_e = sp_{2n-2} |x heis_{n-1}."""
    if n < 2:
        raise ValueError("need n >= 2")
    return centraliser_layout(1, n - 1)


def two_block_centraliser_layout(m: int, n: int) -> MatrixRealisation:
    """Figure layout for e of partition (2^m, 1^{2n}) in sp_{2m+2n}."""
    return centraliser_layout(m, n)


def centraliser_dim(layout: MatrixRealisation) -> int:
    """dim g_e computed independently as the kernel of ad(e) on sp(Omega)."""
    m, q = layout.meta["m"], layout.meta["q"]
    N = layout.N
    Om = layout.meta["omega"]
    e = layout.meta["e"]
    # basis of sp(Omega): solve the linear condition on full matrix space
    rows = []
    for i in range(N):
        for j in range(N):
            row = [Q0] * (N * N)
            # (X^T Om + Om X)_{ij} as a linear functional of X entries
            for k in range(N):
                if Om.data[k][j] != 0:
                    row[k * N + i] += Om.data[k][j]
                if Om.data[i][k] != 0:
                    row[k * N + j] += Om.data[i][k]
            rows.append(row)
    sp_basis = kernel_basis(QMatrix.from_rows(rows))
    # ad(e) on that basis: kernel dimension
    rows2 = []
    for i in range(N):
        for j in range(N):
            row = []
            for v in sp_basis:
                X = QMatrix(N, N, [[v[r * N + c] for c in range(N)]
                                   for r in range(N)])
                comm = e * X - X * e
                row.append(comm.data[i][j])
            rows2.append(row)
    ker = kernel_basis(QMatrix.from_rows(rows2))
    return len(ker)


# ---------------------------------------------------------------------------
# restriction of Delta_k to the layouts (the lemma constructions)
# ---------------------------------------------------------------------------


class RestrictionEscapes(ValueError):
    def __init__(self, label):
        self.coordinate = label
        super().__init__(f"restriction escapes the target: coordinate {label}")


@dataclass
class EDeltaResult:
    layout: MatrixRealisation
    k: int
    H: MultiPoly                # invariant on the target semi-direct product
    f_degree: int
    delta_prime: MultiPoly | None   # m = 1 only: the e-coefficient, in S(sp)


def e_delta_restricted(layout: MatrixRealisation, k: int,
                       verify=True) -> EDeltaResult:
    """Restriction of the highest f-component of Delta_k to the annihilator of
    the S^2 k^m part, remapped onto the target semi-direct product.

    m = 1 (minimal nilpotent, ambient sp_{2n}): k = 2i+2 with 1 <= i <= n-1;
    the t-linear coefficient splits as e * Delta'_{2i} + H_i and both parts
    are returned.  m >= 3 odd: k = 3m + 2i - 1 with 1 <= i <= q - (m-1)/2;
    only H~_i exists.  The result is re-verified as an invariant of the target.
    """
    m, q = layout.meta["m"], layout.meta["q"]
    N = layout.N
    if k % 2 != 0 or k > N:
        raise ValueError("k must be even and at most the ambient size")
    if m == 1:
        if not (k >= 4 and (k - 2) // 2 <= q):
            raise ValueError(f"k = {k} out of range for the minimal layout")
    else:
        if m % 2 == 0:
            raise ValueError("the two-block extraction requires odd m")
        i = (k - 3 * m + 1) // 2
        if not (k == 3 * m + 2 * i - 1 and 1 <= i <= q - (m - 1) // 2):
            raise ValueError(f"k = {k} out of range for m = {m}, n = {q}")
    # symbolic variables: layout coords + t (last); C coords are kept for
    # m = 1 (they carry the centre e) and zeroed upfront otherwise
    keep = []
    for ci, c in enumerate(layout.coords):
        if c.kind == "C" and m > 1:
            continue
        keep.append(ci)
    nv = len(keep) + 1
    tvar = len(keep)
    entries = [[MultiPoly(nv) for _ in range(N)] for _ in range(N)]
    for r in range(N):
        for s in range(N):
            if layout.const.data[r][s] != 0:
                entries[r][s] = entries[r][s] + MultiPoly.variable(
                    nv, tvar, layout.const.data[r][s])
    for vi, ci in enumerate(keep):
        mat = layout.coords[ci].eval_matrix
        for r in range(N):
            for s in range(N):
                if mat.data[r][s] != 0:
                    entries[r][s] = entries[r][s] + MultiPoly.variable(
                        nv, vi, mat.data[r][s])

    cvars = [vi for vi, ci in enumerate(keep) if layout.coords[ci].kind == "C"]

    cmax = 1 if m == 1 else 0

    def prune(P):
        keep_terms = {}
        for mono, c in P.terms.items():
            if mono[tvar] > m:
                continue
            if sum(mono[cv] for cv in cvars) > cmax:
                continue
            keep_terms[mono] = c
        return MultiPoly(P.nvars, keep_terms)

    poly = symbolic_minor_sum(entries, nv, k, prune=prune)
    # top f-degree = degree in t; the lemmas give exactly m for even k >= 2m
    fdeg = 0
    for mono in poly.terms:
        fdeg = max(fdeg, mono[tvar])
    assert fdeg == m, f"f-degree of Delta_{k} on the layout is {fdeg}, not {m}"
    top = MultiPoly(nv, {mono: c for mono, c in poly.terms.items()
                         if mono[tvar] == m})
    # split off the centre coefficient (m = 1) and check escapes
    target = layout.target
    images = []
    delta_prime = None
    h_terms = {}
    dp_terms = {}
    for mono, c in top.terms.items():
        cdeg = sum(mono[cv] for cv in cvars)
        if cdeg == 0:
            h_terms[mono] = c
        elif cdeg == 1 and m == 1:
            dp_terms[mono] = c
        else:
            raise RestrictionEscapes("C block")
    # map layout variables onto target variables
    def remap(terms):
        out = {}
        for mono, c in terms.items():
            exp = [0] * target.dim
            for vi, e in enumerate(mono[:-1]):
                if not e:
                    continue
                ci = keep[vi]
                coord = layout.coords[ci]
                if coord.target is None:
                    if coord.kind == "C":
                        continue  # centre variable, dropped on the hyperplane
                    raise RestrictionEscapes(coord.label)
                exp[coord.target] += e
            out[tuple(exp)] = out.get(tuple(exp), Q0) + c
        return MultiPoly(target.dim, {mm: c for mm, c in out.items() if c != 0})

    H = remap(h_terms)
    if m == 1 and dp_terms:
        # drop the single centre power, keep the sp part
        delta_prime = remap(dp_terms)
        for mono in delta_prime.terms:
            if any(mono[i] for i in range(target.dim_g, target.dim)):
                raise RestrictionEscapes("Delta' involves module coordinates")
    if verify:
        assert is_invariant(target, H), (
            f"extracted H for Delta_{k} is not an invariant of the target")
    return EDeltaResult(layout=layout, k=k, H=H, f_degree=fdeg,
                        delta_prime=delta_prime)


# ---------------------------------------------------------------------------
# psi_x: restriction to q* + x
# ---------------------------------------------------------------------------


def restrict_psi(S: SemiDirectProduct, H: MultiPoly, x, adapted_basis=None,
                 verify_invariant=True):
    """psi_x(H): substitute the V*-coordinates of x, express in a basis adapted
    to q_x, and check the result lies in S(q_x).

    Returns (polynomial in the q_x coordinates, q_x as a LieAlgebraData whose
    structure constants are w.r.t. exactly those coordinates, the basis).
    Raises RestrictionEscapes when a complement coordinate survives, which
    signals a non-generic x or a non-invariant H.
    """
    if verify_invariant:
        assert is_invariant(S, H), "psi_x requires an s-invariant"
    x = [as_q(c) for c in x]
    # substitute: g variables stay, V variables become the numbers x_j
    images = []
    for i in range(S.dim_g):
        images.append(MultiPoly.variable(S.dim_g, i))
    for j in range(S.dim_V):
        images.append(MultiPoly.constant(S.dim_g, x[j]))
    P = H.substitute_linear(images)
    st = stabiliser_in_V(S, x)
    basis = adapted_basis if adapted_basis is not None else st.basis
    kdim = len(basis)
    # complement: unit vectors at coordinates off the span's echelon pivots
    from .liealg import _span_basis

    echelon = _span_basis([list(map(as_q, b)) for b in basis])
    assert len(echelon) == kdim, "adapted basis is dependent"
    pivots = {next(i for i in range(S.dim_g) if b[i] != 0) for b in echelon}
    comp = [i for i in range(S.dim_g) if i not in pivots][: S.dim_g - kdim]
    B_rows = [list(map(as_q, b)) for b in basis]
    for i in comp:
        row = [Q0] * S.dim_g
        row[i] = Q1
        B_rows.append(row)
    B = QMatrix.from_rows(B_rows)
    # new generators y = B x, so the old generators substitute as x = B^{-1} y
    Binv = inverse(B)
    target_n = S.dim_g
    sub_images = []
    for i in range(S.dim_g):
        p = MultiPoly(target_n)
        for a in range(S.dim_g):
            c = Binv.data[i][a]
            if c != 0:
                p = p + MultiPoly.variable(target_n, a, c)
        sub_images.append(p)
    Q = P.substitute_linear(sub_images)
    for mono in Q.terms:
        for a in range(kdim, S.dim_g):
            if mono[a]:
                raise RestrictionEscapes(f"complement coordinate y{a + 1}")
    out = MultiPoly(kdim, {mono[:kdim]: c for mono, c in Q.terms.items()})
    sub = _subalgebra_in_basis(S.algebra, basis)
    if verify_invariant:
        for i in range(sub.dim):
            assert _derive(sub, i, out).is_zero(), (
                "psi_x image is not a q_x-invariant")
    return out, sub, basis


def _subalgebra_in_basis(L: LieAlgebraData, basis):
    """Structure constants w.r.t. the given (independent, closed) basis."""
    from .qlinalg import solve_right

    k = len(basis)
    Bmat = QMatrix(L.dim, k, [[as_q(basis[j][i]) for j in range(k)]
                              for i in range(L.dim)])
    sub = LieAlgebraData(k, [f"y{i + 1}" for i in range(k)],
                         metadata={"name": "stabiliser", "embedding": basis})
    for i in range(k):
        for j in range(i + 1, k):
            v = L.bracket(basis[i], basis[j])
            sol = solve_right(Bmat, v)
            assert sol is not None, "basis is not bracket-closed"
            sub.set_bracket(i, j, {t: c for t, c in enumerate(sol) if c != 0})
    return sub


def _derive(L: LieAlgebraData, i, P: MultiPoly) -> MultiPoly:
    class _Shim:
        total = L
        dim = L.dim

    return lie_derivative(_Shim, i, P)


# ---------------------------------------------------------------------------
# Takiff algebras and Z2-contractions
# ---------------------------------------------------------------------------


def takiff(L: LieAlgebraData) -> SemiDirectProduct:
    """g |x g^ab: the adjoint module made into an abelian ideal."""
    name = L.metadata.get("name", "g")
    return semidirect(L, adjoint_rep(L), name=f"takiff({name})")


SUPPORTED_PAIRS = ("so-so", "sp-sp", "sl-sp", "so-gl")


@dataclass(frozen=True)
class ContractionSpec:
    """One of the supported symmetric pairs.

    kind 'so-so': (so_{n+m}, so_n + so_m), params (n, m);
    kind 'sp-sp': (sp_{2n+m}, sp_{2n} + sp_m), params (2n, m), m even;
    kind 'sl-sp': (sl_{2n}, sp_{2n}), params (2n,);
    kind 'so-gl': (so_{2n}, gl_n), params (n,).
    """

    kind: str
    params: tuple

    def __post_init__(self):
        if self.kind not in SUPPORTED_PAIRS:
            raise ValueError(f"unsupported pair kind {self.kind!r}")
        if self.kind == "sp-sp" and self.params[1] % 2 != 0:
            raise ValueError("sp-sp contraction requires even m")


def _theta_matrix(L: LieAlgebraData, theta_on_matrices):
    """Matrix of an involution on the algebra, in the chosen basis."""
    mats = L.metadata["matrices"]
    expand = L.metadata["expand"]
    n = L.metadata["matrix_size"]
    cols = []
    for mth in mats:
        img = theta_on_matrices(mth)
        sparse = {(i, j): img.data[i][j] for i in range(n) for j in range(n)
                  if img.data[i][j]}
        coeffs = expand(sparse)
        cols.append(coeffs)
    T = QMatrix.zero(L.dim, L.dim)
    for j, coeffs in enumerate(cols):
        for i, c in coeffs.items():
            T.data[i][j] = c
    return T


def _eig_split(T: QMatrix):
    n = T.rows
    plus = kernel_basis(T - QMatrix.identity(n))
    minus = kernel_basis(T + QMatrix.identity(n))
    assert len(plus) + len(minus) == n, "involution failed to split the algebra"
    return plus, minus


def _ambient_invariants(kind, L: LieAlgebraData):
    """Basic symmetric invariants of the ambient simple algebra, as MultiPolys
    in the ambient basis variables.

    A functional with coordinates x_i (dual basis) is represented through the
    trace form by the matrix sum x_i D_i with {D_i} the trace-dual basis;
    evaluating conjugation-invariant matrix functions there gives honest
    coadjoint invariants in the x variables.
    """
    n = L.metadata["matrix_size"]
    fam = L.metadata["family"]
    mats = L.metadata["matrices"]
    nv = L.dim
    gram = QMatrix(nv, nv, [[_trace_pair(mats[i], mats[j]) for j in range(nv)]
                            for i in range(nv)])
    ginv = inverse(gram)
    duals = []
    for i in range(nv):
        acc = QMatrix.zero(n, n)
        for j in range(nv):
            c = ginv.data[i][j]
            if c != 0:
                acc = acc + mats[j].scale(c)
        duals.append(acc)
    entries = [[MultiPoly(nv) for _ in range(n)] for _ in range(n)]
    for bi, mth in enumerate(duals):
        for i in range(n):
            for j in range(n):
                c = mth.data[i][j]
                if c:
                    entries[i][j] = entries[i][j] + MultiPoly.variable(nv, bi, c)
    out = []
    degrees = []
    if fam == "sl":
        degrees = list(range(2, n + 1))
    elif fam == "sp":
        degrees = list(range(2, n + 1, 2))
    elif fam == "so":
        degrees = list(range(2, n, 2)) if n % 2 == 0 else list(range(2, n, 2))
        if n % 2 == 1:
            degrees = list(range(2, n + 1, 2))
    for k in degrees:
        out.append((k, symbolic_minor_sum(entries, nv, k)))
    if fam == "so" and n % 2 == 0:
        B = QMatrix.zero(n, n)
        for i in range(n):
            B.data[i][n - 1 - i] = Q1
        xb = [[MultiPoly(nv) for _ in range(n)] for _ in range(n)]
        for i in range(n):
            for j in range(n):
                acc = MultiPoly(nv)
                for t in range(n):
                    if not entries[i][t].is_zero() and B.data[t][j] != 0:
                        acc = acc + entries[i][t] * B.data[t][j]
                xb[i][j] = acc
        out.append((n // 2, symbolic_pfaffian(xb, nv)))
    return out


def z2_contraction(spec: ContractionSpec):
    """The contraction g_0 |x g_1^ab and the highest g_1-components of the
    ambient basic invariants (after the corrections that keep them
    algebraically independent, i.e. for well-chosen ambient generators)."""
    if spec.kind == "so-so":
        n, m = spec.params
        N = n + m
        if m > N // 2:
            raise ValueError("so-so contraction needs m <= (n+m)/2")
        L = classical_algebra("so", N)
        # sigma = reflection in the span of w_i = e_i + e_{bar i}, i < m:
        # an orthogonal involution with eigenspace dims (n, m), valid for
        # every parity (a -1-diagonal needs a bar-stable index window)
        from .repn import orthogonal_form

        Bform = orthogonal_form(N)
        sigma = QMatrix.identity(N)
        for i in range(m):
            w = [Q0] * N
            w[i] = Q1
            w[N - 1 - i] = Q1
            # sigma -= w w^T B   (B(w,w) = 2, so the factor 2/B(w,w) is 1)
            for r in range(N):
                if w[r] == 0:
                    continue
                for c in range(N):
                    bc = sum((w[t] * Bform.data[t][c] for t in range(N)), Q0)
                    if bc != 0:
                        sigma.data[r][c] -= w[r] * bc

        sigma_inv = sigma  # involution

        def theta(X):
            return sigma * X * sigma_inv
    elif spec.kind == "sp-sp":
        two_n, m = spec.params
        N = two_n + m
        L = classical_algebra("sp", N)
        # -1 on the last m/2 symplectic pairs of the standard form
        half = N // 2
        signs = [Q1] * N
        for i in range(half - m // 2, half):
            signs[i] = -Q1
            signs[half + i] = -Q1

        def theta(X):
            return QMatrix(N, N, [[X.data[i][j] * signs[i] * signs[j]
                                   for j in range(N)] for i in range(N)])
    elif spec.kind == "sl-sp":
        (N,) = spec.params
        L = classical_algebra("sl", N)
        J = symplectic_form(N)
        Jinv = inverse(J)

        def theta(X):
            return (J * X.transpose() * Jinv).scale(-1)
    elif spec.kind == "so-gl":
        (nhalf,) = spec.params
        N = 2 * nhalf
        L = classical_algebra("so", N)
        signs = [Q1] * N
        for i in range(nhalf, N):
            signs[i] = -Q1

        def theta(X):
            return QMatrix(N, N, [[X.data[i][j] * signs[i] * signs[j]
                                   for j in range(N)] for i in range(N)])
    else:  # pragma: no cover
        raise ValueError(spec.kind)

    T = _theta_matrix(L, theta)
    plus, minus = _eig_split(T)
    g0 = subalgebra(L, plus, labels=None)
    # carry matrices for downstream constructions
    emb = g0.metadata["embedding"]
    mats = L.metadata["matrices"]
    nmat = L.metadata["matrix_size"]
    g0_m = []
    for row in emb:
        acc = QMatrix.zero(nmat, nmat)
        for i, c in enumerate(row):
            if c != 0:
                acc = acc + mats[i].scale(c)
        g0_m.append(acc)
    g0.metadata["matrices"] = g0_m
    g0.metadata["matrix_size"] = nmat
    g0.metadata["name"] = f"fix({L.metadata['name']})"
    # g1 as a g0-module: echelonised minus-basis, action by bracket
    from .liealg import _span_basis

    g1 = _span_basis([list(map(as_q, v)) for v in minus])
    g1_mat = QMatrix(L.dim, len(g1), [[g1[j][i] for j in range(len(g1))]
                                      for i in range(L.dim)])
    from .qlinalg import solve_right

    action = []
    for b0 in g0.metadata["embedding"]:
        cols = []
        for b1 in g1:
            img = L.bracket(b0, b1)
            sol = solve_right(g1_mat, img)
            assert sol is not None, "g1 is not g0-stable"
            cols.append(sol)
        action.append(QMatrix(len(g1), len(g1),
                              [[cols[j][i] for j in range(len(g1))]
                               for i in range(len(g1))]))
    rep = RepresentationData(g0, action, label="g1")
    S = semidirect(g0, rep, name=f"contraction({L.metadata['name']})")
    # transport ambient invariants into the contraction coordinates
    full_basis = [list(map(as_q, b)) for b in g0.metadata["embedding"]] + g1
    B = QMatrix.from_rows(full_basis)
    Binv = inverse(B)
    images = []
    for i in range(L.dim):
        p = MultiPoly(S.dim)
        for a in range(S.dim):
            c = Binv.data[i][a]
            if c != 0:
                p = p + MultiPoly.variable(S.dim, a, c)
        images.append(p)
    tops = []
    accepted_tops = []
    accepted_ambient = []
    for k, amb in _ambient_invariants(spec.kind, L):
        P = amb.substitute_linear(images)
        P_amb = P
        for _ in range(40):
            top, d = highest_component(P, S, 1)
            combo = _decompose_in_products(top, accepted_tops, S)
            if combo is None:
                break
            # subtract the matching product of ambient counterparts
            corr = MultiPoly(S.dim)
            for coeff, idxs in combo:
                prod = MultiPoly.constant(S.dim, coeff)
                for t in idxs:
                    prod = prod * accepted_ambient[t]
                corr = corr + prod
            P = P - corr
            assert not P.is_zero(), "ambient invariant fully decomposed"
        top, d = highest_component(P, S, 1)
        accepted_tops.append(top)
        accepted_ambient.append(P)
        tops.append(top)
    return S, tops


def _decompose_in_products(top, accepted, S):
    """top as sum of coefficient * products of accepted polys, or None.

    Products are filtered to the multidegree of `top`; returns a list of
    (coefficient, indices) with indices into `accepted`.
    """
    if not accepted:
        return None
    md = top.multidegree(S.blocks)
    if md is None:
        return None
    degs = [P.multidegree(S.blocks) for P in accepted]
    prods = []
    combos = []

    def rec(start, remaining, chosen):
        if all(x == 0 for x in remaining):
            if chosen:
                prods.append(list(chosen))
            return
        for t in range(start, len(accepted)):
            d = degs[t]
            if d is None:
                continue
            if all(r >= x for r, x in zip(remaining, d)) and sum(d) > 0:
                chosen.append(t)
                rec(t, tuple(r - x for r, x in zip(remaining, d)), chosen)
                chosen.pop()

    rec(0, md, [])
    if not prods:
        return None
    polys = []
    for idxs in prods:
        P = MultiPoly.constant(S.dim, 1)
        for t in idxs:
            P = P * accepted[t]
        polys.append(P)
    monos = sorted({mth for P in polys + [top] for mth in P.terms}, reverse=True)
    mat = QMatrix(len(monos), len(polys),
                  [[P.terms.get(mth, Q0) for P in polys] for mth in monos])
    rhs = [top.terms.get(mth, Q0) for mth in monos]
    from .qlinalg import solve_right

    sol = solve_right(mat, rhs)
    if sol is None:
        return None
    return [(c, prods[i]) for i, c in enumerate(sol) if c != 0]


# ---------------------------------------------------------------------------
# the lift through the copy of g in S^2(V_1)   (symplectic item 3)
# ---------------------------------------------------------------------------


@dataclass
class Item3Result:
    S: SemiDirectProduct          # sp_{2n} |x (k^{2n} (+) Lambda^2_0-model)
    S2: SemiDirectProduct         # sp_{2n} |x Lambda^2_0-model
    lifted: list                  # H_i on S
    quadratic: list               # h_i on S2 (degree 2 in g)
    B_quadrics: list              # q_b(xi): coordinates of B(xi) in the g basis


def item3_lift(n: int) -> Item3Result:
    """Lift the deg_g = 2 contraction invariants h_i of sp_{2n} |x g_1 to
    invariants H_i of sp_{2n} |x (k^{2n} (+) g_1) through the copy of g inside
    S^2(k^{2n}); deg H_i = deg h_i + 1 and H_i(A + xi + v) = h_i(A, B(xi), v)
    with B(xi) the image of xi^2 under S^2(k^{2n}) ~ g.
    """
    if n < 2:
        raise ValueError("need n >= 2")
    S2, tops = z2_contraction(ContractionSpec("sl-sp", (2 * n,)))
    g0 = S2.algebra
    hs = []
    for P in tops:
        md = P.multidegree(S2.blocks)
        if md is not None and md[0] == 2:
            hs.append(P)
    assert len(hs) == n, f"expected {n} quadratic-in-g generators, got {len(hs)}"
    # target: V1 = standard 2n-dim module of g0 (embedded matrices), V2 = g1
    std_action = [m for m in g0.metadata["matrices"]]
    V1 = RepresentationData(g0, std_action, label="phi1")
    V2 = S2.rep
    S = semidirect(g0, direct_sum_rep(V1, V2, labels=["V1", "V2"]),
                   name=f"sp{2 * n}|x(k{2 * n}+L20)")
    # B(xi) for xi in V1* written in dual coordinates: the self-duality of the
    # standard module twists xi through J, giving the equivariant quadric map
    # B(xi) = 2 J xi xi^T (a matrix in sp(J)); expand in the g0 basis
    J = symplectic_form(2 * n)
    N = 2 * n
    expand = _matrix_expander_for(g0)
    q_polys = [MultiPoly(N) for _ in range(g0.dim)]  # polynomials in xi coords
    for r in range(N):
        for s in range(r, N):
            # coefficient matrix of xi_r xi_s in 2 J xi xi^T
            M = QMatrix.zero(N, N)
            for irow in range(N):
                if J.data[irow][r] != 0:
                    M.data[irow][s] += QQ(2) * J.data[irow][r]
                if r != s and J.data[irow][s] != 0:
                    M.data[irow][r] += QQ(2) * J.data[irow][s]
            coeffs = expand(M)
            mono = tuple(2 if t == r and r == s else
                         (1 if t in (r, s) else 0) for t in range(N))
            for b, c in coeffs.items():
                if c != 0:
                    q_polys[b] = q_polys[b] + MultiPoly(N, {mono: c})
    # lower the free index through the trace form on g0: the coordinates of
    # B(xi) transform contragradiently to the g variables, and the invariant
    # contraction in the lift pairs them through g ~ g* (trace form)
    gm = g0.metadata["matrices"]
    gram0 = QMatrix(g0.dim, g0.dim,
                    [[_trace_pair(gm[b], gm[c]) for c in range(g0.dim)]
                     for b in range(g0.dim)])
    q_low = []
    for b in range(g0.dim):
        acc = MultiPoly(N)
        for c in range(g0.dim):
            w = gram0.data[b][c]
            if w != 0:
                acc = acc + q_polys[c] * w
        q_low.append(acc)
    q_polys = q_low
    # embed the quadrics into S variables (V1 block)
    off_v1 = S.dim_g
    q_in_S = []
    for qp in q_polys:
        terms = {}
        for mono, c in qp.terms.items():
            exp = [0] * S.dim
            for t, e in enumerate(mono):
                exp[off_v1 + t] = e
            terms[tuple(exp)] = c
        q_in_S.append(MultiPoly(S.dim, terms))
    # lift each h: replace the quadratic g-part via polarisation with one slot
    # sent to the quadrics
    off_v2 = S.dim_g + N
    lifted = []
    for h in hs:
        H = MultiPoly(S.dim)
        for mono, c in h.terms.items():
            gpart = [(i, e) for i, e in enumerate(mono[:S2.dim_g]) if e]
            vpart = mono[S2.dim_g:]
            tot = sum(e for _, e in gpart)
            assert tot == 2
            base_exp = [0] * S.dim
            for j, e in enumerate(vpart):
                base_exp[off_v2 + j] = e
            base = MultiPoly(S.dim, {tuple(base_exp): c})
            if len(gpart) == 1:
                a = gpart[0][0]
                xa = MultiPoly.variable(S.dim, a)
                H = H + base * xa * q_in_S[a]
            else:
                (a, _), (b, _) = gpart
                xa = MultiPoly.variable(S.dim, a)
                xb = MultiPoly.variable(S.dim, b)
                H = H + base * (xa * q_in_S[b] + xb * q_in_S[a]) * QQ(1, 2)
        lifted.append(H)
    return Item3Result(S=S, S2=S2, lifted=lifted, quadratic=hs,
                       B_quadrics=q_polys)


def _matrix_expander_for(g0: LieAlgebraData):
    """Expand a matrix in the g0 basis (dense exact solve, cached pivots)."""
    mats = g0.metadata["matrices"]
    n = g0.metadata["matrix_size"]
    cols = [[mth.data[i][j] for mth in mats] for i in range(n) for j in range(n)]
    coord = QMatrix(n * n, g0.dim, cols)
    from .qlinalg import solve_right

    def expand(M):
        rhs = [M.data[i][j] for i in range(n) for j in range(n)]
        sol = solve_right(coord, rhs)
        assert sol is not None, "matrix not in the span of the algebra"
        return {b: c for b, c in enumerate(sol)}

    return expand


def item3_evaluation_identity(res: Item3Result, trials=20, seed=77):
    """Check H_i(A + xi + v) = h_i(A, B(xi), v) at random split points.

    The right side polarises the quadratic g-part of h_i: monomial x_a x_b
    evaluates to (A_a B_b + A_b B_a)/2.
    """
    S, S2 = res.S, res.S2
    N = S.blocks[1][2]
    for t in range(trials):
        cfg = SampleConfig(seed + t, 7, 1)
        A = sample_vector(cfg, S.dim_g, 0, "A")
        xi = sample_vector(cfg, N, 0, "xi")
        v = sample_vector(cfg, S2.dim_V, 0, "v")
        point = list(A) + list(xi) + list(v)
        # B(xi) coordinates via the quadrics
        Bco = [qp.evaluate(xi) for qp in res.B_quadrics]
        for H, h in zip(res.lifted, res.quadratic):
            lhs = H.evaluate(point)
            rhs = Q0
            for mono, c in h.terms.items():
                gpart = [(i, e) for i, e in enumerate(mono[:S2.dim_g]) if e]
                val = c
                for j, e in enumerate(mono[S2.dim_g:]):
                    if e:
                        val = val * v[j] ** e
                if len(gpart) == 1:
                    a = gpart[0][0]
                    val = val * A[a] * Bco[a]
                else:
                    (a, _), (b, _) = gpart
                    val = val * (A[a] * Bco[b] + A[b] * Bco[a]) / QQ(2)
                rhs += val
            if lhs != rhs:
                return False
    return True
