"""Symmetry-reduced N-copy feasibility hierarchy and its dual witness problem.

The primal at level N asks for an N-copy extension supported on the
symmetric subspace whose per-copy marginals reproduce the target
marginals. For collective-unitary-invariant (uniform) specs this is a
small block SDP over the permutation-tensor coefficients.

The dual problem optimizes a two-party operator W = sum_l w_l
P{V^l x 1^(n-l)} subject to the compression of W x 1 onto the N-copy
symmetric subspace being PSD blockwise. A strictly negative optimum is
an entanglement witness: the level is infeasible and no AME(n, d)
exists. Keeping only the one-dimensional blocks yields an LP relaxation
that we solve in exact arithmetic; candidate witnesses from the LP are
then verified against every block exactly, adding violated directions
as cutting planes until the answer is certified either way.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from math import comb

import numpy as np

from . import exactla
from .blocks import IrrepBlock, SlotSystem, SymbolicOperator, ame_system, irrep_block, witness_blocks
from .errors import InvalidInputError, UnsupportedFeatureError
from .solve import LinearProgram, SdpBlock, SdpProblem, lp_solve_exact, psd_check_exact, sdp_solve

F0 = Fraction(0)
F1 = Fraction(1)

CONST = -1  # pseudo-variable index for constant terms in constraint rows


# ---------------------------------------------------------------------------
# marginal specifications


@dataclass
class MarginalSpec:
    """Which subsets carry prescribed marginals, and what they are.

    Only the uniform case (every marginal maximally mixed, all subsets of
    one size) is accepted by the symmetry-reduced assembly; it covers the
    AME problem and m-uniform states. `dims` overrides the per-slot local
    dimension for systems with an auxiliary slot (quantum codes).
    """

    n: int
    d: int
    marginals: dict
    uniform: bool = False
    dims: tuple | None = None

    def subset_size(self) -> int:
        sizes = {len(s) for s in self.marginals}
        if len(sizes) != 1:
            raise UnsupportedFeatureError("mixed marginal subset sizes are not supported")
        return sizes.pop()


def ame_marginal_spec(n: int, d: int) -> MarginalSpec:
    """All floor(n/2)-body marginals maximally mixed."""
    from itertools import combinations

    r = n // 2
    marginals = {frozenset(c): "maximally_mixed" for c in combinations(range(n), r)}
    return MarginalSpec(n, d, marginals, uniform=True)


# ---------------------------------------------------------------------------
# primal assembly


@dataclass
class BlockSdp:
    """Equality system plus PSD blocks over the coefficient variables."""

    system: SlotSystem
    keys: list
    rows: list  # dicts var->Fraction, CONST carrying constants
    blocks: list  # IrrepBlock
    objective: dict | None = None
    meta: dict = field(default_factory=dict)

    @property
    def nvars(self) -> int:
        return len(self.keys)


def _normalize_row(row: dict) -> tuple | None:
    items = sorted((v, c) for v, c in row.items() if c)
    if not items or all(v == CONST for v, _ in items):
        if any(c for v, c in items):
            return ("inconsistent",)
        return None
    lead = next(c for v, c in items if v != CONST)
    return tuple((v, c / lead) for v, c in items)


def _rows_from_operator(op: SymbolicOperator, tests) -> list[dict]:
    out = []
    for g in tests:
        row = op.pairing_row(g)
        if row:
            out.append(row)
    return out


def assemble_primal(spec: MarginalSpec, copies: int, strong: bool = True, cap: int = 512) -> BlockSdp:
    """Level-`copies` feasibility system for a uniform marginal spec.

    Equality rows: unit trace, hermiticity, symmetric-subspace support
    (via the two copy-permutation generators), and the marginal
    conditions for one representative subset (slot symmetry supplies the
    rest). Positivity lives in the per-partition-tuple blocks.
    """
    if not spec.uniform:
        raise UnsupportedFeatureError("only collective-unitary-invariant (uniform) specs are supported")
    if copies < 2:
        raise InvalidInputError("need at least two copies")
    n, d = spec.n, spec.d
    r = spec.subset_size()
    system = ame_system(n, d, copies)
    g = system.group
    keys = system.keys()
    phi = SymbolicOperator.variable_expansion(system, keys)

    rows: list[dict] = []
    trace_row = phi.trace_row()
    trace_row[CONST] = trace_row.get(CONST, F0) - 1
    rows.append(trace_row)

    canon_tests = keys  # canonical tuples as test elements
    rows += _rows_from_operator(phi.sub(phi.adjoint()), canon_tests)

    from .symgroup import Permutation

    for gen in (Permutation.transposition(copies, 0, 1), Permutation.full_cycle(copies)):
        gi = g.index[gen.images]
        moved = phi.slotwise_multiply((gi,) * n, side="left")
        rows += _rows_from_operator(moved.sub(phi), canon_tests)

    kept = tuple(range(n - r, n))
    traced_slots = tuple(range(n - r))
    if strong:
        lhs = phi.ptrace(traced_slots, 0)
        rhs = phi.ptrace(range(n), 0).untrace({(i, 0) for i in kept}).scale(Fraction(1, d**r))
        diff = lhs.sub(rhs)
        tests = _marginal_tests(system, traced_slots, kept)
        rows += _rows_from_operator(diff, tests)
    else:
        lhs = phi
        for c in range(copies):
            lhs = lhs.ptrace(traced_slots, c)
        ident_key = (g.identity,) * n
        target = Fraction(1, d ** (r * copies))
        tests = _marginal_tests(system, traced_slots, kept, traced_all_copies=True)
        for t in tests:
            row = lhs.pairing_row(t)
            w = F1
            for s in kept:
                w *= Fraction(d) ** g.cycles[t[s]]
            row[CONST] = row.get(CONST, F0) - target * w
            rows.append(row)

    # dedupe
    seen = {}
    for row in rows:
        norm = _normalize_row(row)
        if norm == ("inconsistent",):
            raise InvalidInputError("inconsistent constant row in assembly")
        if norm is not None and norm not in seen:
            seen[norm] = dict(norm)
    rows = list(seen.values())

    blocks = []
    for tpl in system.partition_tuples():
        blk = irrep_block(system, tpl, keys, cap=cap)
        if blk is not None:
            blocks.append(blk)
    return BlockSdp(system, keys, rows, blocks, meta={"n": n, "d": d, "copies": copies, "r": r, "strong": strong})


def _marginal_tests(system: SlotSystem, traced_slots, kept, traced_all_copies: bool = False):
    g = system.group
    opts = []
    for s in range(system.slots):
        if s in traced_slots:
            opts.append([g.identity] if traced_all_copies else g.fixing[0])
        else:
            opts.append(range(len(g.elements)))
    import itertools

    return list(itertools.product(*opts))


@dataclass
class PrimalVerdict:
    status: str  # "feasible" | "infeasible"
    exact: bool
    margin: float | None = None
    x: list | None = None
    nullity: int = 0
    witness_block: tuple | None = None


def solve_primal(problem: BlockSdp, tol: float = 1e-8) -> PrimalVerdict:
    """Decide feasibility of an assembled primal system.

    When the equalities pin the coefficients uniquely the answer is an
    exact PSD test of every block. Otherwise the remaining freedom goes
    through the float margin-maximization SDP.
    """
    nv = problem.nvars
    dense_rows, rhs = [], []
    for row in problem.rows:
        dense_rows.append([row.get(v, F0) for v in range(nv)])
        rhs.append(-row.get(CONST, F0))
    sol = exactla.solve_affine(dense_rows, rhs, ncols=nv)
    if sol is None:
        return PrimalVerdict("infeasible", exact=True, nullity=0)
    x0, basis = sol

    if not basis:
        for blk in problem.blocks:
            z = blk.z_at(x0)
            res = psd_check_exact(z)
            if not res.psd:
                return PrimalVerdict(
                    "infeasible",
                    exact=True,
                    x=x0,
                    witness_block=tuple(getattr(p, "parts", p) for p in blk.partitions),
                )
        return PrimalVerdict("feasible", exact=True, x=x0)

    # keep only directions that move some block
    active = []
    for vec in basis:
        if any(any(vec[v] for v in blk.z_per_var) for blk in problem.blocks):
            active.append(vec)
    if not active:
        for blk in problem.blocks:
            if not psd_check_exact(blk.z_at(x0)).psd:
                return PrimalVerdict("infeasible", exact=True, nullity=len(basis))
        return PrimalVerdict("feasible", exact=True, x=x0, nullity=len(basis))

    if all(blk.k == 1 for blk in problem.blocks):
        # every sector is scalar: feasibility is an exact rational LP
        lp = LinearProgram(c=[F0] * len(active), bounds=[(None, None)] * len(active))
        for blk in problem.blocks:
            base = blk.z_at(x0)[0][0]
            coeffs = [blk.z_at(vec)[0][0] for vec in active]
            lp.add_row([-c for c in coeffs], "<=", base)
        res = lp_solve_exact(lp)
        if res.status == "optimal":
            x = [x0[v] + sum((Fraction(res.x[j]) * active[j][v] for j in range(len(active))), start=F0) for v in range(nv)]
            return PrimalVerdict("feasible", exact=True, x=x, nullity=len(basis))
        return PrimalVerdict("infeasible", exact=True, nullity=len(basis))

    sdp_blocks = []
    for blk in problem.blocks:
        f0 = -_float_block(blk, x0)
        fs = [_float_block(blk, vec) for vec in active]
        sdp_blocks.append(SdpBlock(blk.k, f0, fs))
    res = sdp_solve(SdpProblem(len(active), sdp_blocks, None), tol=tol)
    if res.status == "max-iter" or res.margin is None:
        from .errors import SolverConvergenceError

        raise SolverConvergenceError("margin maximization did not converge")
    feasible = res.margin >= -max(tol, 1e-7)
    return PrimalVerdict(
        "feasible" if feasible else "infeasible",
        exact=False,
        margin=res.margin,
        nullity=len(basis),
    )


def _float_block(blk: IrrepBlock, coeffs) -> np.ndarray:
    out = np.zeros((blk.k, blk.k))
    for v, y in blk.y_per_var.items():
        c = coeffs[v]
        if c:
            out += float(c) * y
    return out


# ---------------------------------------------------------------------------
# dual witness problem


def swap_overlaps(n: int, d: int) -> list[Fraction]:
    """a_l = Tr(X_l Phi) = binom(n,l)/min(d^l, d^{n-l}) for the candidate."""
    return [Fraction(comb(n, l), min(d**l, d ** (n - l))) for l in range(n + 1)]


def fold(values, n: int):
    """Collapse l and n-l (the witness coefficients are palindromic)."""
    r = n // 2
    out = []
    for l in range(r + 1):
        v = values[l]
        if n - l != l:
            v = v + values[n - l]
        out.append(v)
    return out


def unfold(w, n: int):
    return [w[l] if l <= n // 2 else w[n - l] for l in range(n + 1)]


def witness_value(w, n: int, d: int) -> Fraction:
    """Objective sum_l a_l w_l on folded coefficients."""
    r = n // 2
    if len(w) != r + 1:
        raise InvalidInputError(f"need {r + 1} folded coefficients, got {len(w)}")
    folded = fold(swap_overlaps(n, d), n)
    return sum((Fraction(w[l]) * folded[l] for l in range(r + 1)), start=F0)


@dataclass
class WitnessLp:
    """Rank-one-block LP relaxation of the dual witness problem."""

    n: int
    d: int
    copies: int
    objective: list  # folded objective coefficients
    rows: list  # (label, folded coefficient list); constraint is coeffs.w >= 0
    box: Fraction = F1

    def to_linear_program(self) -> LinearProgram:
        lp = LinearProgram(c=list(self.objective), bounds=[(-self.box, self.box)] * len(self.objective))
        for _, coeffs in self.rows:
            lp.add_row(coeffs, ">=", F0)
        return lp


@dataclass
class DualWitnessSdp:
    """Full blockwise dual witness problem at one hierarchy level."""

    n: int
    d: int
    copies: int
    objective: list
    blocks: list  # WitnessBlock

    def to_sdp_problem(self) -> SdpProblem:
        r = self.n // 2
        m = r + 1
        sdp_blocks = []
        for blk in self.blocks:
            folded = [_fold_mats_float(blk.y_per_l, self.n)[l] for l in range(m)]
            sdp_blocks.append(SdpBlock(blk.k, np.zeros((blk.k, blk.k)), folded))
        # box block: 1 - w_l >= 0 and w_l + 1 >= 0
        size = 2 * m
        f0 = -np.eye(size)
        fs = []
        for l in range(m):
            f = np.zeros((size, size))
            f[2 * l, 2 * l] = -1.0
            f[2 * l + 1, 2 * l + 1] = 1.0
            fs.append(f)
        sdp_blocks.append(SdpBlock(size, f0, fs, diagonal=True))
        return SdpProblem(m, sdp_blocks, np.array([float(v) for v in self.objective]))


def _fold_mats_float(mats, n: int):
    r = n // 2
    out = []
    for l in range(r + 1):
        m = mats[l].copy()
        if n - l != l:
            m = m + mats[n - l]
        out.append(m)
    return out


def _fold_mats_exact(mats, n: int):
    r = n // 2
    out = []
    for l in range(r + 1):
        m = mats[l]
        if n - l != l:
            m = exactla.mat_add(m, mats[n - l])
        out.append(m)
    return out


def assemble_dual_witness(n: int, d: int, copies: int, rank1_only: bool = False, cap: int = 512):
    """Dual witness problem at level `copies`.

    rank1_only keeps the partition tuples whose symmetric component is
    one-dimensional, turning every block into a scalar inequality (an LP
    with exact rational data). Otherwise all blocks are returned.
    """
    blocks = witness_blocks(n, d, copies, cap=cap)
    objective = fold(swap_overlaps(n, d), n)
    if not rank1_only:
        return DualWitnessSdp(n, d, copies, objective, blocks)
    rows = []
    for blk in blocks:
        if blk.k != 1:
            continue
        coeffs = fold([z[0][0] for z in blk.z_per_l], n)
        rows.append((tuple(p.parts for p in blk.partitions), coeffs))
    return WitnessLp(n, d, copies, objective, rows)


@dataclass
class Certificate:
    """Outcome of one dual-witness computation."""

    n: int
    d: int
    copies: int
    method: str  # "lp-exact" | "lp-exact+cuts" | "sdp-float"
    optimum_float: float
    verdict: str  # "no-ame" | "inconclusive"
    optimum: Fraction | None = None
    w: list | None = None  # folded witness coefficients
    note: str = ""

    def to_dict(self) -> dict:
        return {
            "n": self.n,
            "d": self.d,
            "copies": self.copies,
            "method": self.method,
            "optimum": None if self.optimum is None else str(self.optimum),
            "optimum_float": self.optimum_float,
            "w": None if self.w is None else [str(Fraction(v)) if not isinstance(v, float) else v for v in self.w],
            "verdict": self.verdict,
            "note": self.note,
        }


def certify(optimum, n: int, d: int, copies: int, w=None, method: str = "sdp-float", tol: float = 1e-8) -> Certificate:
    """Interpret a dual optimum: strictly negative means no AME(n, d).

    Values inside (-tol, 0) stay inconclusive and are flagged; the exact
    method uses the strict sign.
    """
    exact = isinstance(optimum, Fraction)
    opt_f = float(optimum)
    threshold = 0 if exact else -tol
    if opt_f < threshold and (not exact or optimum < 0):
        return Certificate(n, d, copies, method, opt_f, "no-ame", optimum if exact else None, w)
    note = "within tolerance" if (not exact and -tol <= opt_f < 0) else ""
    return Certificate(n, d, copies, method, opt_f, "inconclusive", optimum if exact else None, w, note)


@dataclass
class LevelReport:
    """Feasibility verdict for one hierarchy level."""

    n: int
    d: int
    copies: int
    feasible: bool
    exact: bool
    optimum_float: float
    optimum: Fraction | None = None
    certificate: Certificate | None = None

    def to_dict(self) -> dict:
        return {
            "n": self.n,
            "d": self.d,
            "copies": self.copies,
            "feasible": self.feasible,
            "exact": self.exact,
            "optimum": None if self.optimum is None else str(self.optimum),
            "optimum_float": self.optimum_float,
            "certificate": None if self.certificate is None else self.certificate.to_dict(),
        }


def witness_optimize_exact(n: int, d: int, copies: int, cap: int = 512, max_rounds: int = 12):
    """Exact dual optimum via the rank-one LP plus cutting planes.

    Returns (status, optimum, folded w, rounds): status "passed" when the
    optimum is certified nonnegative (level feasible), "witness" when a
    fully verified negative witness exists, "undecided" when the round
    limit was hit.
    """
    blocks = witness_blocks(n, d, copies, cap=cap)
    objective = fold(swap_overlaps(n, d), n)
    m = len(objective)
    rows: list[list] = []
    for blk in blocks:
        if blk.k == 1:
            rows.append(fold([z[0][0] for z in blk.z_per_l], n))
    big = [blk for blk in blocks if blk.k > 1]
    folded_big = [(_fold_mats_exact(blk.z_per_l, n), blk) for blk in big]

    for round_no in range(max_rounds):
        lp = LinearProgram(c=list(objective), bounds=[(-F1, F1)] * m)
        for coeffs in rows:
            lp.add_row(coeffs, ">=", F0)
        res = lp_solve_exact(lp)
        if res.status != "optimal":
            raise InvalidInputError("witness LP must be bounded and feasible")  # pragma: no cover
        if res.value >= 0:
            return "passed", res.value, res.x, round_no
        violated = False
        for folded_mats, blk in folded_big:
            z = exactla.zeros(blk.k, blk.k)
            for l in range(m):
                if res.x[l]:
                    z = exactla.mat_add(z, folded_mats[l], scale=res.x[l])
            check = psd_check_exact(z)
            if not check.psd:
                v = check.witness
                cut = [exactla.quadratic_form(folded_mats[l], v) for l in range(m)]
                rows.append(cut)
                violated = True
        if not violated:
            return "witness", res.value, res.x, round_no
    return "undecided", res.value, res.x, max_rounds


def level_check(n: int, d: int, copies: int, method: str = "auto", tol: float = 1e-8, cap: int = 512) -> LevelReport:
    """Decide one hierarchy level through the dual witness problem."""
    if method in ("auto", "exact"):
        status, opt, w, rounds = witness_optimize_exact(n, d, copies, cap=cap)
        label = "lp-exact+cuts" if rounds else "lp-exact"
        if status == "passed":
            cert = certify(opt, n, d, copies, w, method=label)
            return LevelReport(n, d, copies, True, True, float(opt), opt, cert)
        if status == "witness":
            cert = certify(opt, n, d, copies, w, method=label)
            return LevelReport(n, d, copies, False, True, float(opt), opt, cert)
        if method == "exact":
            from .errors import SolverConvergenceError

            raise SolverConvergenceError("cutting-plane rounds exhausted without a certificate")
    dual = assemble_dual_witness(n, d, copies, cap=cap)
    res = sdp_solve(dual.to_sdp_problem(), y0=_interior_w(dual), tol=tol)
    if res.status != "optimal":
        from .errors import SolverConvergenceError

        raise SolverConvergenceError(f"dual witness solve ended with status {res.status}")
    cert = certify(res.value, n, d, copies, list(res.y), method="sdp-float", tol=max(tol, 1e-7))
    feasible = cert.verdict != "no-ame"
    return LevelReport(n, d, copies, feasible, False, res.value, None, cert)


def _interior_w(dual: DualWitnessSdp) -> np.ndarray:
    y0 = np.zeros(len(dual.objective))
    y0[0] = 0.5
    return y0


def export_dual_sdpa(n: int, d: int, copies: int, path, cap: int = 512) -> None:
    """Write the level-`copies` dual witness SDP in sparse SDPA form."""
    dual = assemble_dual_witness(n, d, copies, cap=cap)
    from .solve import export_sdpa

    export_sdpa(dual.to_sdp_problem(), path)
