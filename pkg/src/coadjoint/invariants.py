"""Multigraded polynomial invariants on the dual of a semi-direct product.

MultiPoly is a sparse exact polynomial in coordinates dual to the basis of s
(the coordinate functions are the basis elements themselves, so S(s) is the
polynomial ring on the basis labels).  Invariant spaces are kernels of the
basis derivations

    D_i x_j = [x_i, x_j] = sum_k c_{ij}^k x_k,

computed one multidegree block at a time.  For a reductive g-block with
recorded weights the kernel is taken inside the zero-weight subspace with
raising-operator conditions only, which keeps the linear algebra desk-sized;
the resulting basis is re-verified against every derivation afterwards.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field

from .liealg import index as algebra_index
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
from .semidirect import SemiDirectProduct


class ComponentTooLarge(ValueError):
    def __init__(self, count, cap):
        self.count = count
        self.cap = cap
        super().__init__(f"graded component has {count} monomials (cap {cap})")


class MultiPoly:
    """Sparse polynomial over Q; monomials are exponent tuples."""

    __slots__ = ("nvars", "terms")

    def __init__(self, nvars, terms=None):
        self.nvars = nvars
        self.terms = terms or {}

    # -- constructors ------------------------------------------------------
    @staticmethod
    def zero(nvars):
        return MultiPoly(nvars)

    @staticmethod
    def constant(nvars, c):
        c = as_q(c)
        return MultiPoly(nvars, {(0,) * nvars: c} if c != 0 else {})

    @staticmethod
    def variable(nvars, i, c=1):
        mono = tuple(1 if j == i else 0 for j in range(nvars))
        return MultiPoly(nvars, {mono: as_q(c)})

    def copy(self):
        return MultiPoly(self.nvars, dict(self.terms))

    # -- ring operations ----------------------------------------------------
    def __add__(self, other):
        if not isinstance(other, MultiPoly):
            other = MultiPoly.constant(self.nvars, other)
        out = dict(self.terms)
        for m, c in other.terms.items():
            s = out.get(m, Q0) + c
            if s == 0:
                out.pop(m, None)
            else:
                out[m] = s
        return MultiPoly(self.nvars, out)

    def __neg__(self):
        return MultiPoly(self.nvars, {m: -c for m, c in self.terms.items()})

    def __sub__(self, other):
        return self + (-other if isinstance(other, MultiPoly)
                       else MultiPoly.constant(self.nvars, -as_q(other)))

    def __mul__(self, other):
        if not isinstance(other, MultiPoly):
            c = as_q(other)
            if c == 0:
                return MultiPoly(self.nvars)
            return MultiPoly(self.nvars, {m: v * c for m, v in self.terms.items()})
        out = {}
        for m1, c1 in self.terms.items():
            for m2, c2 in other.terms.items():
                m = tuple(a + b for a, b in zip(m1, m2))
                s = out.get(m, Q0) + c1 * c2
                if s == 0:
                    out.pop(m, None)
                else:
                    out[m] = s
        return MultiPoly(self.nvars, out)

    __rmul__ = __mul__

    def __pow__(self, k):
        assert k >= 0
        out = MultiPoly.constant(self.nvars, 1)
        base = self
        while k:
            if k & 1:
                out = out * base
            base = base * base if k > 1 else base
            k >>= 1
        return out

    def __eq__(self, other):
        return isinstance(other, MultiPoly) and self.terms == other.terms

    def is_zero(self):
        return not self.terms

    # -- structure ----------------------------------------------------------
    def total_degree(self):
        return max((sum(m) for m in self.terms), default=0)

    def multidegree(self, blocks):
        """Per-block degree when multi-homogeneous, else None.

        blocks: list of (label, offset, size).
        """
        seen = None
        for m in self.terms:
            d = tuple(sum(m[off:off + sz]) for (_, off, sz) in blocks)
            if seen is None:
                seen = d
            elif seen != d:
                return None
        return seen

    def components(self, blocks):
        """Split into multi-homogeneous components {multidegree: poly}."""
        out = {}
        for m, c in self.terms.items():
            d = tuple(sum(m[off:off + sz]) for (_, off, sz) in blocks)
            out.setdefault(d, {})[m] = c
        return {d: MultiPoly(self.nvars, t) for d, t in out.items()}

    def evaluate(self, point):
        assert len(point) == self.nvars
        point = [as_q(x) for x in point]
        total = Q0
        for m, c in self.terms.items():
            v = c
            for x, e in zip(point, m):
                if e:
                    if x == 0:
                        v = Q0
                        break
                    v = v * x ** e
            total += v
        return total

    def partial(self, i):
        out = {}
        for m, c in self.terms.items():
            e = m[i]
            if e:
                m2 = m[:i] + (e - 1,) + m[i + 1:]
                out[m2] = out.get(m2, Q0) + c * e
        return MultiPoly(self.nvars, {m: c for m, c in out.items() if c != 0})

    def substitute_linear(self, images):
        """Substitute x_i -> images[i], a MultiPoly in the target variables."""
        assert len(images) == self.nvars
        tgt = images[0].nvars if images else 0
        out = MultiPoly(tgt)
        cache = {}
        for m, c in self.terms.items():
            term = MultiPoly.constant(tgt, c)
            for i, e in enumerate(m):
                if e:
                    key = (i, e)
                    if key not in cache:
                        cache[key] = images[i] ** e
                    term = term * cache[key]
            out = out + term
        return out

    def scale_block(self, offset, size, factor):
        """Multiply every variable in [offset, offset+size) by factor."""
        f = as_q(factor)
        out = {}
        for m, c in self.terms.items():
            d = sum(m[offset:offset + size])
            out[m] = c * f ** d
        return MultiPoly(self.nvars, {m: c for m, c in out.items() if c != 0})

    def coefficient_of_block_degree(self, offset, size, degree):
        """The part of exact degree `degree` in the block's variables."""
        out = {m: c for m, c in self.terms.items()
               if sum(m[offset:offset + size]) == degree}
        return MultiPoly(self.nvars, out)

    def render(self, labels):
        if not self.terms:
            return "0"
        bits = []
        for m in sorted(self.terms, reverse=True):
            c = self.terms[m]
            factors = [f"{labels[i]}^{e}" if e > 1 else labels[i]
                       for i, e in enumerate(m) if e]
            mono = "*".join(factors) if factors else "1"
            bits.append(f"({c})*{mono}")
        return " + ".join(bits)

    def __repr__(self):
        n = len(self.terms)
        return f"<MultiPoly {self.nvars} vars, {n} terms, deg {self.total_degree()}>"


# ---------------------------------------------------------------------------
# derivations
# ---------------------------------------------------------------------------


def _derivation_table(total, i):
    """[x_i, x_j] for all j, as {j: [(k, c), ...]}."""
    out = {}
    for j in range(total.dim):
        b = total.bracket_basis(i, j)
        if b:
            out[j] = list(b.items())
    return out


def lie_derivative(S: SemiDirectProduct, xi_index: int, P: MultiPoly) -> MultiPoly:
    """Derivation of P by the basis element x_{xi_index} of s."""
    total = S.total
    table = _derivation_table(total, xi_index)
    out = {}
    for m, c in P.terms.items():
        for j, e in enumerate(m):
            if not e or j not in table:
                continue
            base = c * e
            m_low = m[:j] + (e - 1,) + m[j + 1:]
            for k, coef in table[j]:
                m2 = m_low[:k] + (m_low[k] + 1,) + m_low[k + 1:]
                s = out.get(m2, Q0) + base * coef
                if s == 0:
                    out.pop(m2, None)
                else:
                    out[m2] = s
    return MultiPoly(P.nvars, out)


def is_invariant(S: SemiDirectProduct, P: MultiPoly) -> bool:
    return all(lie_derivative(S, i, P).is_zero() for i in range(S.dim))


# ---------------------------------------------------------------------------
# graded components and invariant spaces
# ---------------------------------------------------------------------------


def monomials_of_block_degrees(S: SemiDirectProduct, mdeg):
    """All exponent tuples with the given per-block degrees, graded-lex sorted."""
    blocks = S.blocks
    assert len(mdeg) == len(blocks)
    per_block = []
    for (label, off, sz), d in zip(blocks, mdeg):
        monos = []
        for comb in itertools.combinations_with_replacement(range(sz), d):
            exp = [0] * sz
            for c in comb:
                exp[c] += 1
            monos.append(tuple(exp))
        per_block.append(monos)
    out = []
    for pieces in itertools.product(*per_block):
        exp = []
        for p in pieces:
            exp.extend(p)
        out.append(tuple(exp))
    out.sort(reverse=True)
    return out


def component_size(S: SemiDirectProduct, mdeg):
    import math

    n = 1
    for (label, off, sz), d in zip(S.blocks, mdeg):
        if sz == 0:
            if d > 0:
                return 0
            continue
        n *= math.comb(sz + d - 1, d)
    return n


DEFAULT_COMPONENT_CAP = 5 * 10 ** 6


def _weight_data(S: SemiDirectProduct):
    """(weights per variable, positive g indices) or None.

    Positive indices are the g-basis elements of nonzero ad-weight whose first
    nonzero weight coordinate is positive; for a reductive g-block acting
    completely reducibly, zero weight + killed by all positive root vectors
    characterises g-invariance.
    """
    w = S.v_weights()
    if w is None:
        return None
    cartan = set(S.algebra.metadata.get("cartan", []))
    positive = []
    for i in range(S.dim_g):
        wi = w[i]
        nz = next((x for x in wi if x != 0), None)
        if nz is None:
            if i not in cartan:
                return None  # zero-weight non-Cartan element: no fast path
        elif nz > 0:
            positive.append(i)
    return w, positive


def invariant_space(S: SemiDirectProduct, mdeg, cap=DEFAULT_COMPONENT_CAP,
                    verify=True):
    """Basis of s-invariants of the given multidegree, reduced echelon form.

    mdeg is one degree per block of the splitting (g first, then each
    V-summand).  Raises ComponentTooLarge when the monomial count exceeds cap.
    """
    count = component_size(S, mdeg)
    if count > cap:
        raise ComponentTooLarge(count, cap)
    monos = monomials_of_block_degrees(S, mdeg)
    wdata = _weight_data(S)
    if wdata is not None:
        basis = _invariants_weight_path(S, mdeg, monos, wdata)
    else:
        basis = _invariants_direct_path(S, monos)
    if verify:
        for P in basis:
            for i in range(S.dim):
                assert lie_derivative(S, i, P).is_zero(), (
                    "invariant space vector fails re-verification")
    return basis


def _mono_weight(m, weights):
    n = len(weights[0]) if weights else 0
    acc = [Q0] * n
    for i, e in enumerate(m):
        if e:
            wi = weights[i]
            for t in range(n):
                if wi[t]:
                    acc[t] += e * wi[t]
    return tuple(acc)


def _invariants_weight_path(S, mdeg, monos, wdata):
    weights, positive = wdata
    zero_w = tuple(Q0 for _ in (weights[0] if weights else ()))
    w0 = [m for m in monos if _mono_weight(m, weights) == zero_w]
    if not w0:
        return []
    polys = [MultiPoly(S.dim, {m: Q1}) for m in w0]
    # conditions: raising derivations, then V-derivations (which leave the
    # component); both are imposed on the coefficient vectors of `polys`
    cond_rows = []
    derivs = list(positive) + list(range(S.dim_g, S.dim))
    images = []
    for P in polys:
        images.append([lie_derivative(S, i, P) for i in derivs])
    target_monos = {}
    for imgs in images:
        for img in imgs:
            for m in img.terms:
                target_monos.setdefault(m, len(target_monos))
    nrows = len(derivs) * len(target_monos)
    if target_monos:
        # row index: (derivation slot, target monomial)
        mat = [[Q0] * len(polys) for _ in range(nrows)]
        for col, imgs in enumerate(images):
            for di, img in enumerate(imgs):
                for m, c in img.terms.items():
                    r = di * len(target_monos) + target_monos[m]
                    mat[r][col] = c
        ker = kernel_basis(QMatrix(nrows, len(polys), mat))
    else:
        ker = [[Q1 if i == j else Q0 for j in range(len(polys))]
               for i in range(len(polys))]
    basis = []
    for v in ker:
        P = MultiPoly(S.dim)
        for c, m in zip(v, w0):
            if c != 0:
                P = P + MultiPoly(S.dim, {m: c})
        basis.append(P)
    return _echelonise(basis, monos)


def _invariants_direct_path(S, monos):
    if not monos:
        return []
    idx_cache = {}
    polys = [MultiPoly(S.dim, {m: Q1}) for m in monos]
    target = {}
    images = []
    for P in polys:
        imgs = [lie_derivative(S, i, P) for i in range(S.dim)]
        images.append(imgs)
        for img in imgs:
            for m in img.terms:
                target.setdefault(m, len(target))
    nrows = S.dim * len(target)
    if not target:
        return _echelonise(polys, monos)
    mat = [[Q0] * len(polys) for _ in range(nrows)]
    for col, imgs in enumerate(images):
        for di, img in enumerate(imgs):
            for m, c in img.terms.items():
                mat[di * len(target) + target[m]][col] = c
    ker = kernel_basis(QMatrix(nrows, len(polys), mat))
    basis = []
    for v in ker:
        P = MultiPoly(S.dim)
        for c, m in zip(v, monos):
            if c != 0:
                P = P + MultiPoly(S.dim, {m: c})
        basis.append(P)
    return _echelonise(basis, monos)


def _echelonise(polys, monos):
    """Reduced echelon normal form w.r.t. the graded-lex monomial order."""
    order = {m: i for i, m in enumerate(monos)}
    rows = []
    for P in polys:
        if not P.is_zero():
            rows.append([P.terms.get(m, Q0) for m in monos])
    red, piv = [], []
    for row in rows:
        row = row[:]
        for p, rr in zip(piv, red):
            if row[p] != 0:
                f = row[p]
                row = [a - f * b for a, b in zip(row, rr)]
        nz = next((c for c in range(len(row)) if row[c] != 0), None)
        if nz is None:
            continue
        inv = Q1 / row[nz]
        row = [a * inv for a in row]
        for i, (p, rr) in enumerate(zip(piv, red)):
            if rr[nz] != 0:
                f = rr[nz]
                red[i] = [a - f * b for a, b in zip(rr, row)]
        piv.append(nz)
        red.append(row)
    pairs = sorted(zip(piv, red))
    out = []
    for p, row in pairs:
        P = MultiPoly(len(monos[0]) if monos else 0,
                      {m: c for m, c in zip(monos, row) if c != 0})
        out.append(P)
    return out


# ---------------------------------------------------------------------------
# generator ledger
# ---------------------------------------------------------------------------


@dataclass
class LedgerEntry:
    multidegree: tuple
    dim_invariant: int
    dim_decomposable: int
    new_generators: int
    skipped: bool = False

    def __post_init__(self):
        if not self.skipped:
            assert self.new_generators == self.dim_invariant - self.dim_decomposable
            assert self.new_generators >= 0


@dataclass
class GeneratorLedger:
    entries: list
    bases: dict = field(repr=False, default_factory=dict)

    def generator_degrees(self):
        out = []
        for e in self.entries:
            if not e.skipped:
                out.extend([sum(e.multidegree)] * e.new_generators)
        return sorted(out)

    def generators(self):
        gens = []
        for e in self.entries:
            if e.new_generators and not e.skipped:
                basis = self.bases[e.multidegree]
                dec = self.bases.get(("dec",) + e.multidegree, [])
                gens.extend(_complement(basis, dec))
        return gens

    def skipped_entries(self):
        return [e for e in self.entries if e.skipped]


def _complement(basis, dec):
    """Basis vectors extending span(dec) to span(basis)."""
    taken = list(dec)
    out = []
    for P in basis:
        if _in_span(P, taken):
            continue
        out.append(P)
        taken.append(P)
    return out


def _in_span(P, polys):
    if not polys:
        return P.is_zero()
    monos = sorted({m for Q in polys + [P] for m in Q.terms}, reverse=True)
    rows = [[Q.terms.get(m, Q0) for m in monos] for Q in polys]
    target = [P.terms.get(m, Q0) for m in monos]
    m1 = QMatrix(len(monos), len(polys),
                 [[rows[j][i] for j in range(len(polys))] for i in range(len(monos))])
    from .qlinalg import solve_right

    return solve_right(m1, target) is not None


def _compositions(total, parts):
    if parts == 1:
        yield (total,)
        return
    for first in range(total + 1):
        for rest in _compositions(total - first, parts - 1):
            yield (first,) + rest


def generator_ledger(S: SemiDirectProduct, cap: int,
                     component_cap=DEFAULT_COMPONENT_CAP) -> GeneratorLedger:
    """Invariant dimensions, decomposable parts, and new-generator counts
    for every multidegree of total degree <= cap.

    Components over the monomial cap are recorded as skipped entries instead
    of being attempted.
    """
    nblocks = len(S.blocks)
    entries = []
    bases = {}
    for total in range(1, cap + 1):
        for mdeg in sorted(_compositions(total, nblocks), reverse=True):
            try:
                basis = invariant_space(S, mdeg, cap=component_cap)
            except ComponentTooLarge:
                entries.append(LedgerEntry(mdeg, -1, -1, -1, skipped=True))
                continue
            bases[mdeg] = basis
            dec = _decomposable_products(S, mdeg, bases)
            bases[("dec",) + mdeg] = dec
            dim_dec = _span_dim(dec)
            entries.append(LedgerEntry(mdeg, len(basis), dim_dec,
                                       len(basis) - dim_dec))
    return GeneratorLedger(entries=entries, bases=bases)


def _decomposable_products(S, mdeg, bases):
    """Products of lower-degree invariant bases with multidegrees summing to mdeg."""
    out = []
    items = [k for k in bases if isinstance(k[0], int) and sum(k) < sum(mdeg)]
    for d1 in items:
        d2 = tuple(a - b for a, b in zip(mdeg, d1))
        if any(x < 0 for x in d2):
            continue
        if d2 not in bases or sum(d2) == 0:
            continue
        if d2 < d1:
            continue  # unordered pairs once
        for P in bases[d1]:
            for Q in bases[d2]:
                out.append(P * Q)
    return out


def _span_dim(polys):
    polys = [P for P in polys if not P.is_zero()]
    if not polys:
        return 0
    monos = sorted({m for P in polys for m in P.terms}, reverse=True)
    rows = [[P.terms.get(m, Q0) for m in monos] for P in polys]
    return rank(QMatrix.from_rows(rows))


# ---------------------------------------------------------------------------
# independence and the freeness checklist
# ---------------------------------------------------------------------------


def jacobian_independent(polys, S: SemiDirectProduct,
                         cfg: SampleConfig = SampleConfig()) -> bool:
    """True iff the differentials at some sampled point have full rank.

    Full rank at any single point is sufficient for algebraic independence.
    """
    if not polys:
        return True
    n = S.dim
    height = cfg.height
    for rnd in range(cfg.rounds):
        c = SampleConfig(cfg.seed, height, cfg.rounds)
        pt = sample_vector(c, n, round_idx=rnd, tag="jacobian")
        rows = [[P.partial(i).evaluate(pt) for i in range(n)] for P in polys]
        if rank(QMatrix.from_rows(rows)) == len(polys):
            return True
        height *= 2
    return False


@dataclass
class FreenessVerdict:
    """Checklist for the sum-of-degrees freeness criterion."""

    all_invariant: bool
    independent: bool
    count: int
    index_s: int
    count_matches_index: bool
    degree_sum: int
    b_s: int
    degrees: list
    degree_sum_matches_b: bool
    codim2_attached: bool
    codim2_all_hold: bool

    @property
    def passes(self):
        return (self.all_invariant and self.independent
                and self.count_matches_index and self.degree_sum_matches_b)

    def summary(self):
        lines = [
            f"invariance: {'ok' if self.all_invariant else 'FAIL'}",
            f"independence: {'ok' if self.independent else 'FAIL'}",
            f"count = {self.count}, ind s = {self.index_s}: "
            f"{'ok' if self.count_matches_index else 'FAIL'}",
            f"sum deg = {'+'.join(map(str, self.degrees))} = {self.degree_sum}, "
            f"b(s) = {self.b_s}: {'ok' if self.degree_sum_matches_b else 'FAIL'}",
            f"codim-2 evidence: "
            + ("attached, all points hold" if self.codim2_attached
               and self.codim2_all_hold else
               "attached, FAILURES" if self.codim2_attached else "none (partial)"),
        ]
        return "\n".join(lines)


def freeness_checklist(S: SemiDirectProduct, candidates, cfg: SampleConfig,
                       codim2=None) -> FreenessVerdict:
    """Check the hypotheses of the sum-of-degrees criterion for `candidates`.

    Verifies each candidate is an s-invariant, samples a Jacobian for
    independence, counts against ind s, and compares the degree sum with
    b(s) = (dim s + ind s)/2.  codim2: an optional Codim2Report to attach.
    """
    inv = all(is_invariant(S, P) for P in candidates)
    indep = jacobian_independent(candidates, S, cfg)
    ind_s = algebra_index(S.total, cfg)
    degrees = sorted(P.total_degree() for P in candidates)
    dsum = sum(degrees)
    b_s = (S.dim + int(ind_s)) // 2
    return FreenessVerdict(
        all_invariant=inv,
        independent=indep,
        count=len(candidates),
        index_s=int(ind_s),
        count_matches_index=len(candidates) == int(ind_s),
        degree_sum=dsum,
        b_s=b_s,
        degrees=degrees,
        degree_sum_matches_b=dsum == b_s,
        codim2_attached=codim2 is not None,
        codim2_all_hold=codim2.all_hold if codim2 is not None else False,
    )
