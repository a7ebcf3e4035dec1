"""Machine-readable verification tables and the row verifier.

The tables ship as a human-editable record file (one record per row, see
data/tables.tbl for the schema).  Loading re-derives two columns of every row
from the others:

    dim V // G = dim V - dim g + dim h,      ind s = dim V // G + ind h,

so internal inconsistencies are load-time failures.  verify_row then rebuilds
everything from scratch: the module dimension, the generic stabiliser and its
fingerprint, and the index along both the direct and the Rais route.
"""

from __future__ import annotations

import math
import re
import time
from dataclasses import dataclass, field
from importlib import resources

from .liealg import (
    Fingerprint,
    classical_algebra,
    fingerprint,
    fingerprint_sum,
)
from .qlinalg import SampleConfig
from .repn import build_module, spin_rep
from .semidirect import (
    direct_index,
    generic_stabiliser_in_V,
    rais_index,
    semidirect,
)


class AtlasError(ValueError):
    pass


# ---------------------------------------------------------------------------
# expressions
# ---------------------------------------------------------------------------

_EXPR_TOKEN = re.compile(r"\s*(\d+|[A-Za-z_][A-Za-z_0-9]*|//|<=|>=|==|[-+*%(),])")


def eval_expr(expr, env):
    """Tiny integer expression evaluator: + - * // % ( ) binom(a,b), names."""
    tokens = []
    pos = 0
    while pos < len(expr):
        m = _EXPR_TOKEN.match(expr, pos)
        if not m:
            raise AtlasError(f"bad expression {expr!r} at {pos}")
        tokens.append(m.group(1))
        pos = m.end()
    out = []
    i = 0

    def parse_expr():
        node = parse_term()
        nonlocal i
        while i < len(tokens) and tokens[i] in ("+", "-"):
            op = tokens[i]
            i += 1
            rhs = parse_term()
            node = (node + rhs) if op == "+" else (node - rhs)
        return node

    def parse_term():
        nonlocal i
        node = parse_atom()
        while i < len(tokens) and tokens[i] in ("*", "//", "%"):
            op = tokens[i]
            i += 1
            rhs = parse_atom()
            if op == "*":
                node = node * rhs
            elif op == "//":
                node = node // rhs
            else:
                node = node % rhs
        return node

    def parse_atom():
        nonlocal i
        tok = tokens[i]
        if tok == "(":
            i += 1
            node = parse_expr()
            assert tokens[i] == ")"
            i += 1
            return node
        if tok == "-":
            i += 1
            return -parse_atom()
        i += 1
        if tok.isdigit():
            return int(tok)
        if tok == "binom":
            assert tokens[i] == "("
            i += 1
            a = parse_expr()
            assert tokens[i] == ","
            i += 1
            b = parse_expr()
            assert tokens[i] == ")"
            i += 1
            return math.comb(a, b)
        if tok in env:
            return env[tok]
        raise AtlasError(f"unknown name {tok!r} in expression {expr!r}")

    node = parse_expr()
    if i != len(tokens):
        raise AtlasError(f"trailing tokens in expression {expr!r}")
    return node


def _splice(template, env):
    """Replace {expr} parts of a name template by evaluated integers."""
    out = ""
    pos = 0
    while True:
        j = template.find("{", pos)
        if j < 0:
            out += template[pos:]
            return out
        k = template.index("}", j)
        out += template[pos:j] + str(eval_expr(template[j + 1:k], env))
        pos = k + 1


# ---------------------------------------------------------------------------
# expected stabiliser fingerprints
# ---------------------------------------------------------------------------

# G2 is never constructed (exceptional constructors are out of scope); its
# fingerprint ships as a constant: a 14-dimensional perfect algebra of rank 2
# with nondegenerate Killing form and no centre.
G2_FINGERPRINT = Fingerprint(dim=14, index=2, derived_series_dims=(14, 14),
                             killing_rank=14, center_dim=0)

_fp_cache = {}


def named_fingerprint(name, cfg: SampleConfig) -> Fingerprint:
    """Fingerprint of a named algebra; sums with +, j*name multiplicities."""
    name = name.strip()
    key = (name, cfg.seed, cfg.height)
    if key in _fp_cache:
        return _fp_cache[key]
    parts = _split_sum(name)
    if len(parts) > 1:
        fps = [named_fingerprint(p, cfg) for p in parts]
        out = fps[0]
        for f in fps[1:]:
            out = fingerprint_sum(out, f)
        _fp_cache[key] = out
        return out
    m = re.fullmatch(r"(\d+)\*(.+)", name)
    if m:
        k = int(m.group(1))
        f1 = named_fingerprint(m.group(2), cfg)
        out = f1
        for _ in range(k - 1):
            out = fingerprint_sum(out, f1)
        _fp_cache[key] = out
        return out
    out = _atom_fingerprint(name, cfg)
    _fp_cache[key] = out
    return out


def _split_sum(name):
    parts = []
    depth = 0
    cur = ""
    for ch in name:
        if ch == "(":
            depth += 1
        elif ch == ")":
            depth -= 1
        if ch == "+" and depth == 0:
            parts.append(cur)
            cur = ""
        else:
            cur += ch
    parts.append(cur)
    return [p.strip() for p in parts if p.strip()]


def _atom_fingerprint(name, cfg):
    if name == "G2":
        return G2_FINGERPRINT
    m = re.fullmatch(r"(so|sl|sp|gl)\((\d+)\)", name)
    if m:
        fam, k = m.group(1), int(m.group(2))
        if fam == "so" and k <= 1:
            return Fingerprint(0, 0, (0, 0), 0, 0)
        return fingerprint(classical_algebra(fam, k), cfg)
    m = re.fullmatch(r"heis\((\d+)\)", name)
    if m:
        from .liealg import heisenberg_algebra

        return fingerprint(heisenberg_algebra(int(m.group(1))), cfg)
    m = re.fullmatch(r"ab\((\d+)\)", name)
    if m:
        k = int(m.group(1))
        ds = (k, 0) if k else (0, 0)
        return Fingerprint(k, k, ds, 0, k)
    m = re.fullmatch(r"sphs\((\d+)\)", name)
    if m:
        return fingerprint(sp_heis_algebra(int(m.group(1))), cfg)
    if name == "sospin7":
        so7 = classical_algebra("so", 7)
        S = semidirect(so7, spin_rep(7, L=so7))
        return fingerprint(S.total, cfg)
    raise AtlasError(f"unknown algebra name {name!r}")


def sp_heis_algebra(k):
    """sp_{2k} |x heis_k, realised as the centraliser of a minimal nilpotent
    element inside sp_{2k+2} (one-dimensional abelian when k = 0)."""
    from .liealg import abelian_algebra

    if k == 0:
        return abelian_algebra(1)
    from .constructions import minimal_nilpotent_centraliser_layout

    lay = minimal_nilpotent_centraliser_layout(k + 1)
    amb = lay.meta["omega"].rows
    # centraliser basis is carried by the layout generators
    span = []
    N = lay.N
    # express each generator inside the full matrix space, then cut the
    # structure constants directly via matrix commutators
    gens = [c.generator for c in lay.coords]
    from .liealg import LieAlgebraData
    from .qlinalg import QMatrix, solve_right

    dim = len(gens)
    coord = QMatrix(N * N, dim, [[g.data[i][j] for g in gens]
                                 for i in range(N) for j in range(N)])
    alg = LieAlgebraData(dim, [c.label for c in lay.coords],
                         metadata={"name": f"sp{2 * k}|x heis{k}"})
    for a in range(dim):
        for b in range(a + 1, dim):
            comm = gens[a] * gens[b] - gens[b] * gens[a]
            rhs = [comm.data[i][j] for i in range(N) for j in range(N)]
            sol = solve_right(coord, rhs)
            assert sol is not None
            alg.set_bracket(a, b, {t: c for t, c in enumerate(sol) if c != 0})
    return alg


# ---------------------------------------------------------------------------
# table records
# ---------------------------------------------------------------------------


@dataclass
class TableRowSpec:
    table: int
    label: str
    family: str
    size_expr: str
    module: list              # [(mult_expr, weight label)]
    params: list              # [dict] (one empty dict when not parametrised)
    dim_v_expr: str
    dim_v_mod_g_expr: str
    stab_template: str
    ind_expr: str
    fa: str
    line: int = 0

    def instances(self):
        return self.params


@dataclass
class RowCheck:
    check: str
    expected: object
    computed: object
    passed: bool
    millis: int


@dataclass
class RowReport:
    table: int
    label: str
    params: dict
    checks: list = field(default_factory=list)
    skipped: str = ""

    @property
    def passed(self):
        return all(c.passed for c in self.checks)

    def record(self, check, expected, computed, t0):
        self.checks.append(RowCheck(check, expected, computed,
                                    expected == computed,
                                    int((time.time() - t0) * 1000)))

    def as_dict(self):
        return {
            "table": self.table,
            "row": self.label,
            "params": self.params,
            "skipped": self.skipped,
            "checks": [
                {"check": c.check, "expected": str(c.expected),
                 "computed": str(c.computed), "pass": c.passed,
                 "millis": c.millis}
                for c in self.checks
            ],
            "pass": self.passed,
        }


_MODULE_TERM = re.compile(r"^(?:(.+?)\*)?phi(\d+)$")


def _parse_module(text, line):
    out = []
    for term in text.split("+"):
        term = term.strip()
        m = _MODULE_TERM.match(term)
        if not m:
            raise AtlasError(f"line {line}: bad module term {term!r}")
        out.append((m.group(1) or "1", f"phi{m.group(2)}"))
    return out


def _parse_params(text, line):
    out = []
    for inst in text.split(";"):
        inst = inst.strip()
        if not inst:
            continue
        env = {}
        for binding in inst.split(","):
            k, _, v = binding.partition("=")
            k, v = k.strip(), v.strip()
            if not k.isidentifier() or not re.fullmatch(r"-?\d+", v):
                raise AtlasError(f"line {line}: bad binding {binding!r}")
            env[k] = int(v)
        out.append(env)
    return out


def default_atlas_path():
    return resources.files("coadjoint") / "data" / "tables.tbl"


def load_atlas(path=None, cfg: SampleConfig = SampleConfig()):
    """Parse the table file and run the load-time arithmetic checks."""
    if path is None:
        text = default_atlas_path().read_text()
    else:
        with open(path) as fh:
            text = fh.read()
    rows = []
    current = None
    fields = {}
    header_line = 0

    def finish():
        if current is None:
            return
        table, label = current
        required = ["family", "module", "dim_v", "dim_v_mod_g", "stab", "ind",
                    "fa", "size"]
        for f in required:
            if f not in fields:
                raise AtlasError(
                    f"line {header_line}: row {table}/{label} missing {f!r}")
        rows.append(TableRowSpec(
            table=table,
            label=label,
            family=fields["family"][0],
            size_expr=fields["size"][0],
            module=_parse_module(*fields["module"]),
            params=_parse_params(*fields["params"]) if "params" in fields
            else [{}],
            dim_v_expr=fields["dim_v"][0],
            dim_v_mod_g_expr=fields["dim_v_mod_g"][0],
            stab_template=fields["stab"][0],
            ind_expr=fields["ind"][0],
            fa=fields["fa"][0],
            line=header_line,
        ))

    for ln, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].rstrip()
        if not line.strip():
            continue
        m = re.fullmatch(r"\[(\d+)/([^\]]+)\]", line.strip())
        if m:
            finish()
            current = (int(m.group(1)), m.group(2))
            fields = {}
            header_line = ln
            continue
        if current is None:
            raise AtlasError(f"line {ln}: field outside a record")
        k, eq, v = line.partition("=")
        if not eq:
            raise AtlasError(f"line {ln}: expected key = value")
        fields[k.strip()] = (v.strip(), ln)
    finish()

    # load-time consistency of the two derivable columns, every instance
    for row in rows:
        for env in row.instances():
            exp = row_expectations(row, env, cfg)
            g_dim = _family_dim(row.family, exp["size"])
            lhs = exp["dim_v"] - g_dim + exp["stab_fp"].dim
            if lhs != exp["dim_v_mod_g"]:
                raise AtlasError(
                    f"line {row.line}: row {row.table}/{row.label} {env}: "
                    f"dim V//G = {exp['dim_v_mod_g']} but dim V - dim g + "
                    f"dim h = {lhs}")
            if exp["dim_v_mod_g"] + exp["stab_fp"].index != exp["ind"]:
                raise AtlasError(
                    f"line {row.line}: row {row.table}/{row.label} {env}: "
                    f"ind = {exp['ind']} but dim V//G + ind h = "
                    f"{exp['dim_v_mod_g'] + exp['stab_fp'].index}")
    return rows


def _family_dim(family, n):
    return {"so": n * (n - 1) // 2, "sp": n * (n + 1) // 2,
            "sl": n * n - 1, "gl": n * n}[family]


def row_expectations(row: TableRowSpec, env, cfg):
    """Evaluate all expected values of one instance.

    dimstab/indstab are available to the arithmetic expressions once the
    stabiliser name has been resolved.
    """
    size = eval_expr(row.size_expr, env)
    stab_name = _splice(row.stab_template, dict(env, size=size))
    stab_fp = named_fingerprint(stab_name, cfg)
    env2 = dict(env, size=size, dimstab=stab_fp.dim, indstab=stab_fp.index)
    env2["dim_v"] = eval_expr(row.dim_v_expr, env2)
    env2["dim_v_mod_g"] = eval_expr(row.dim_v_mod_g_expr, env2)
    return {
        "size": size,
        "dim_v": env2["dim_v"],
        "dim_v_mod_g": env2["dim_v_mod_g"],
        "ind": eval_expr(row.ind_expr, env2),
        "stab_name": stab_name,
        "stab_fp": stab_fp,
        "module": [(eval_expr(me, env2), lbl) for me, lbl in row.module],
    }


# ---------------------------------------------------------------------------
# verification
# ---------------------------------------------------------------------------


def verify_row(row: TableRowSpec, env, cfg: SampleConfig, max_dim=400,
               validate=False) -> RowReport:
    """Rebuild one instance and compare every checkable column."""
    report = RowReport(table=row.table, label=row.label, params=dict(env))
    exp = row_expectations(row, env, cfg)
    g_dim = _family_dim(row.family, exp["size"])
    dim_s = g_dim + exp["dim_v"]
    if dim_s > max_dim:
        report.skipped = f"dim s = {dim_s} exceeds the bound {max_dim}"
        return report
    t0 = time.time()
    L = classical_algebra(row.family, exp["size"])
    summands = [(lbl, mult) for mult, lbl in exp["module"] if mult > 0]
    R = build_module(row.family, exp["size"], summands, L=L)
    report.record("dim V", exp["dim_v"], R.dim_V, t0)
    S = semidirect(L, R)
    if validate:
        t0 = time.time()
        S.total.check_jacobi()
        from .repn import check_representation

        check_representation(R)
        report.record("jacobi+rep property", True, True, t0)
    t0 = time.time()
    st = generic_stabiliser_in_V(S, cfg)
    report.record("generic stabiliser dim", exp["stab_fp"].dim, st.dim, t0)
    t0 = time.time()
    stab_fp = fingerprint(st.algebra, cfg)
    report.record("stabiliser fingerprint", str(exp["stab_fp"]), str(stab_fp), t0)
    t0 = time.time()
    d_ind = direct_index(S, cfg)
    report.record("index (direct)",
                  exp["ind"], int(d_ind) if d_ind.stabilised else "unstable", t0)
    t0 = time.time()
    r_ind = rais_index(S, cfg)
    report.record("index (Rais)",
                  exp["ind"], int(r_ind) if r_ind.stabilised else "unstable", t0)
    return report


@dataclass
class SuiteReport:
    reports: list
    seed: int

    @property
    def passed(self):
        return all(r.passed for r in self.reports if not r.skipped)

    def as_dict(self):
        return {"seed": self.seed, "pass": self.passed,
                "rows": [r.as_dict() for r in self.reports]}

    def render_text(self):
        lines = []
        for r in self.reports:
            tag = f"[{r.table}/{r.label}] {r.params or ''}"
            if r.skipped:
                lines.append(f"SKIP {tag}: {r.skipped}")
                continue
            status = "pass" if r.passed else "FAIL"
            lines.append(f"{status} {tag}")
            for c in r.checks:
                mark = "ok " if c.passed else "BAD"
                lines.append(f"   {mark} {c.check}: expected {c.expected}, "
                             f"computed {c.computed} ({c.millis} ms)")
        lines.append("overall: " + ("PASS" if self.passed else "FAIL"))
        return "\n".join(lines)


def run_suite(tables=(1, 2), row_label=None, cfg: SampleConfig = SampleConfig(),
              max_dim=400, path=None, validate=False) -> SuiteReport:
    rows = load_atlas(path, cfg)
    reports = []
    for row in rows:
        if row.table not in tables:
            continue
        if row_label is not None and row.label != row_label:
            continue
        for env in row.instances():
            reports.append(verify_row(row, env, cfg, max_dim=max_dim,
                                      validate=validate))
    reports.sort(key=lambda r: (r.table, r.label, sorted(r.params.items())))
    return SuiteReport(reports=reports, seed=cfg.seed)
