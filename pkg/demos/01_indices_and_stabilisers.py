"""Indices and generic stabilisers of semi-direct products.

Builds a few s = g |x V, computes the index two ways (rank of the Kirillov
form at sampled generic covectors, and the Rais formula through the generic
stabiliser in V*), and identifies stabilisers by fingerprint.
"""

from coadjoint import (
    SampleConfig,
    classical_algebra,
    direct_index,
    fingerprint,
    generic_stabiliser_in_V,
    index,
    rais_index,
    semidirect,
    standard_rep,
)

cfg = SampleConfig(seed=2024, height=5, rounds=8)

print("== reductive indices are ranks ==")
for fam, n in [("sl", 4), ("so", 9), ("sp", 6)]:
    L = classical_algebra(fam, n)
    print(f"  ind {fam}{n} = {int(index(L, cfg))}   (dim {L.dim})")

print("\n== so5 |x k5 ==")
L = classical_algebra("so", 5)
S = semidirect(L, standard_rep(L))
st = generic_stabiliser_in_V(S, cfg)
print(f"  dim s = {S.dim}")
print(f"  generic stabiliser: dim {st.dim}, fingerprint {fingerprint(st.algebra, cfg)}")
print(f"  matches so4: {fingerprint(st.algebra, cfg) == fingerprint(classical_algebra('so', 4), cfg)}")
print(f"  index direct = {int(direct_index(S, cfg))}, Rais = {int(rais_index(S, cfg))}")

print("\n== sp4 |x k4: the stabiliser is sp2 |x heis1 ==")
L = classical_algebra("sp", 4)
S = semidirect(L, standard_rep(L))
st = generic_stabiliser_in_V(S, cfg)
from coadjoint.atlas import sp_heis_algebra

print(f"  stabiliser fingerprint: {fingerprint(st.algebra, cfg)}")
print(f"  sp2 |x heis1 fingerprint: {fingerprint(sp_heis_algebra(1), cfg)}")
print(f"  index direct = {int(direct_index(S, cfg))}, Rais = {int(rais_index(S, cfg))}")
