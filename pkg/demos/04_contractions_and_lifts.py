"""Z2-contractions, Takiff algebras, and the lift through S^2 of the
standard symplectic module.

A symmetric pair (g, g0) degenerates to g0 |x g1^ab; the highest
g1-components of well-chosen basic invariants of g are invariants of the
contraction.  The quadratic-in-g invariants of sp_{2n} |x Lambda^2_0 lift to
sp_{2n} |x (k^{2n} (+) Lambda^2_0) through the copy of g inside S^2(k^{2n}),
raising each degree by one.
"""

from coadjoint import (
    ContractionSpec,
    SampleConfig,
    classical_algebra,
    index,
    is_invariant,
    item3_lift,
    takiff,
    z2_contraction,
)
from coadjoint.constructions import item3_evaluation_identity

cfg = SampleConfig(seed=2024, height=5, rounds=8)

print("== Takiff sl2 = sl2 |x sl2^ab ==")
S = takiff(classical_algebra("sl", 2))
print(f"  dim {S.dim}, index {int(index(S.total, cfg))} (generators in degrees 2, 2)")

for spec, blurb in [
    (ContractionSpec("sp-sp", (4, 2)), "(sp6, sp4 + sp2)"),
    (ContractionSpec("so-so", (3, 1)), "(so4, so3 + so1), i.e. so3 |x k3"),
    (ContractionSpec("sl-sp", (4,)), "(sl4, sp4)"),
    (ContractionSpec("so-gl", (2,)), "(so4, gl2)"),
]:
    S, tops = z2_contraction(spec)
    degs = [(P.total_degree(), P.multidegree(S.blocks)) for P in tops]
    ok = all(is_invariant(S, P) for P in tops)
    print(f"\n== contraction {blurb} ==")
    print(f"  dim {S.dim}; highest components (degree, multidegree): {degs}")
    print(f"  all are invariants of the contraction: {ok}")

print("\n== the lift for sp4 |x (k4 + Lambda^2_0) ==")
res = item3_lift(2)
print(f"  s has dim {res.S.dim}; lifted degrees "
      f"{[(h.total_degree(), H.total_degree()) for h, H in zip(res.quadratic, res.lifted)]}")
print(f"  lifted polynomials invariant: "
      f"{[is_invariant(res.S, H) for H in res.lifted]}")
print(f"  H(A + xi + v) = h(A, B(xi), v) at 20 random split points: "
      f"{item3_evaluation_identity(res, trials=20)}")
