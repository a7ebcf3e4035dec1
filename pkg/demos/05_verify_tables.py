"""Re-derive the symplectic verification table from scratch.

Loads the shipped table file (whose internal arithmetic is re-checked on
load), rebuilds every instance, and compares the module dimension, the
generic stabiliser dimension and fingerprint, and the index computed along
both routes.  The full orthogonal table runs the same way:

    python -m coadjoint.cli verify --table 1
"""

from coadjoint import SampleConfig, run_suite

cfg = SampleConfig(seed=2024, height=5, rounds=8)
suite = run_suite(tables=(2,), cfg=cfg)
print(suite.render_text())
