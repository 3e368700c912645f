"""Optimization back ends.

Three solvers, deliberately self-contained:

* an exact two-phase simplex over rationals with Bland's rule, for
  linear programs whose sign decisions must not depend on tolerances;
* an exact PSD test via symmetric elimination, returning a rational
  witness vector when the matrix is not PSD;
* a small dense log-barrier solver for linear matrix inequalities in
  SDPA form: minimize c.y subject to sum_i y_i F_i - F_0 >= 0 per block.

Plus a writer/parser pair for the sparse SDPA ".dat-s" interchange
format with deterministic, byte-stable output.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from . import exactla
from .errors import InvalidInputError, SolverConvergenceError

F0 = Fraction(0)
F1 = Fraction(1)


# ---------------------------------------------------------------------------
# exact linear programming


@dataclass
class LinearProgram:
    """minimize c.x subject to rows (coeffs, rel, rhs) and variable bounds."""

    c: list
    rows: list = field(default_factory=list)
    bounds: list | None = None  # per-variable (lo, hi), None entries = unbounded

    @property
    def nvars(self) -> int:
        return len(self.c)

    def add_row(self, coeffs, rel: str, rhs):
        if rel not in ("<=", "=", ">="):
            raise InvalidInputError(f"bad relation {rel!r}")
        if len(coeffs) != self.nvars:
            raise InvalidInputError("row length mismatch")
        self.rows.append(([Fraction(v) for v in coeffs], rel, Fraction(rhs)))


@dataclass
class LpResult:
    status: str  # "optimal" | "infeasible" | "unbounded"
    value: Fraction | None = None
    x: list | None = None


def _pivot(tableau, basis, row, col):
    piv = tableau[row][col]
    tableau[row] = [v / piv for v in tableau[row]]
    prow = tableau[row]
    for i in range(len(tableau)):
        if i != row and tableau[i][col]:
            f = tableau[i][col]
            tableau[i] = [a - f * b for a, b in zip(tableau[i], prow)]
    if basis is not None:
        basis[row] = col


def _run_simplex(tableau, basis, costs):
    """Minimize costs.x on a canonical tableau (rhs >= 0, identity basis).

    Bland's rule throughout, so termination is guaranteed. The objective
    row is carried as the last tableau row.
    """
    m = len(tableau)
    n = len(tableau[0]) - 1 if m else len(costs)
    obj = list(costs) + [F0]
    for i, b in enumerate(basis):
        if obj[b]:
            f = obj[b]
            obj = [a - f * t for a, t in zip(obj, tableau[i])]
    while True:
        col = next((j for j in range(n) if obj[j] < 0), None)
        if col is None:
            x = [F0] * n
            for i, b in enumerate(basis):
                x[b] = tableau[i][n]
            return "optimal", x, -obj[n], obj
        best = None
        for i in range(m):
            if tableau[i][col] > 0:
                ratio = tableau[i][n] / tableau[i][col]
                if best is None or ratio < best[0] or (ratio == best[0] and basis[i] < basis[best[1]]):
                    best = (ratio, i)
        if best is None:
            return "unbounded", None, None, obj
        _pivot(tableau, basis, best[1], col)
        f = obj[col]
        if f:
            obj = [a - f * b for a, b in zip(obj, tableau[best[1]])]


def lp_solve_exact(lp: LinearProgram) -> LpResult:
    """Exact rational optimum of a linear program (two-phase simplex)."""
    nv = lp.nvars
    bounds = lp.bounds if lp.bounds is not None else [(None, None)] * nv
    if len(bounds) != nv:
        raise InvalidInputError("bounds length mismatch")
    for coeffs, _, _ in lp.rows:
        if len(coeffs) != nv:
            raise InvalidInputError("row length mismatch")

    # substitute every variable by nonnegative ones:
    #   lo <= x       -> x = lo + u
    #   x <= hi (only)-> x = hi - u
    #   free          -> x = u - v
    # upper bounds with a lower bound become extra rows.
    subs = []  # per variable: ("lo", lo, col) | ("hi", hi, col) | ("free", col_pos, col_neg)
    extra_rows = []
    ncols = 0
    for j, (lo, hi) in enumerate(bounds):
        if lo is not None:
            subs.append(("lo", Fraction(lo), ncols))
            ncols += 1
            if hi is not None:
                row = [F0] * nv
                row[j] = F1
                extra_rows.append((row, "<=", Fraction(hi)))
        elif hi is not None:
            subs.append(("hi", Fraction(hi), ncols))
            ncols += 1
        else:
            subs.append(("free", ncols, ncols + 1))
            ncols += 2

    def translate(coeffs, rhs):
        out = [F0] * ncols
        r = Fraction(rhs)
        for j, cj in enumerate(coeffs):
            if not cj:
                continue
            kind = subs[j]
            if kind[0] == "lo":
                out[kind[2]] += cj
                r -= cj * kind[1]
            elif kind[0] == "hi":
                out[kind[2]] -= cj
                r -= cj * kind[1]
            else:
                out[kind[1]] += cj
                out[kind[2]] -= cj
        return out, r

    rows = []
    for coeffs, rel, rhs in list(lp.rows) + extra_rows:
        row, r = translate(coeffs, rhs)
        if r < 0:
            row = [-v for v in row]
            r = -r
            rel = {"<=": ">=", ">=": "<=", "=": "="}[rel]
        rows.append((row, rel, r))

    nslack = sum(1 for _, rel, _ in rows if rel != "=")
    nart = len(rows)
    total = ncols + nslack + nart
    tableau = []
    basis = []
    si = ncols
    ai = ncols + nslack
    art_cols = set(range(ai, ai + nart))
    for row, rel, r in rows:
        line = list(row) + [F0] * (nslack + nart) + [r]
        if rel == "<=":
            line[si] = F1
            si += 1
        elif rel == ">=":
            line[si] = -F1
            si += 1
        line[ai] = F1
        basis.append(ai)
        ai += 1
        tableau.append(line)

    # phase 1: minimize the artificial total
    phase1 = [F0] * total
    for j in art_cols:
        phase1[j] = F1
    status, _, value, _ = _run_simplex(tableau, basis, phase1)
    if status != "optimal" or value > 0:
        return LpResult("infeasible")
    # drive leftover artificials out of the basis
    for i in range(len(basis)):
        if basis[i] in art_cols:
            col = next((j for j in range(ncols + nslack) if tableau[i][j]), None)
            if col is not None:
                _pivot(tableau, basis, i, col)
    keep = [i for i in range(len(basis)) if basis[i] not in art_cols]
    tableau = [
        [tableau[i][j] for j in range(ncols + nslack)] + [tableau[i][-1]] for i in keep
    ]
    basis = [basis[i] for i in keep]

    phase2 = [F0] * (ncols + nslack)
    for j, cj in enumerate(lp.c):
        if not cj:
            continue
        kind = subs[j]
        if kind[0] == "lo":
            phase2[kind[2]] += Fraction(cj)
        elif kind[0] == "hi":
            phase2[kind[2]] -= Fraction(cj)
        else:
            phase2[kind[1]] += Fraction(cj)
            phase2[kind[2]] -= Fraction(cj)
    status, u, value, _ = _run_simplex(tableau, basis, phase2)
    if status == "unbounded":
        return LpResult("unbounded")

    x = [F0] * nv
    offset = F0
    for j, (lo, hi) in enumerate(bounds):
        kind = subs[j]
        cj = Fraction(lp.c[j])
        if kind[0] == "lo":
            x[j] = kind[1] + u[kind[2]]
            offset += cj * kind[1]
        elif kind[0] == "hi":
            x[j] = kind[1] - u[kind[2]]
            offset += cj * kind[1]
        else:
            x[j] = u[kind[1]] - u[kind[2]]
    return LpResult("optimal", value + offset, x)


# ---------------------------------------------------------------------------
# exact PSD test


@dataclass
class PsdResult:
    psd: bool
    witness: list | None = None  # rational v with v^T M v < 0 when not PSD


def psd_check_exact(matrix) -> PsdResult:
    """Exact positive-semidefiniteness of a symmetric rational matrix."""
    n = len(matrix)
    m = [[Fraction(x) for x in row] for row in matrix]
    for i in range(n):
        for j in range(i + 1, n):
            if m[i][j] != m[j][i]:
                raise InvalidInputError("matrix is not symmetric")
    ok, witness = exactla.ldlt_psd_witness(m)
    if ok:
        return PsdResult(True)
    value = exactla.quadratic_form(m, witness)
    if value >= 0:
        raise InvalidInputError("internal witness failure")  # pragma: no cover
    return PsdResult(False, witness)


# ---------------------------------------------------------------------------
# dense LMI barrier solver


@dataclass
class SdpBlock:
    """One constraint block: sum_i y_i fs[i] - f0 >= 0."""

    size: int
    f0: np.ndarray
    fs: list
    diagonal: bool = False


@dataclass
class SdpProblem:
    """minimize c.y over the intersection of the blocks' LMI cones.

    c None means a pure feasibility question; it is answered by
    maximizing the smallest eigenvalue margin over all blocks.
    """

    m: int
    blocks: list
    c: np.ndarray | None = None


@dataclass
class SdpResult:
    status: str  # "optimal" | "infeasible" | "max-iter"
    y: np.ndarray | None = None
    value: float | None = None
    gap: float | None = None
    margin: float | None = None


def _block_s(block: SdpBlock, y: np.ndarray) -> np.ndarray:
    s = -block.f0.copy()
    for i, f in enumerate(block.fs):
        if y[i]:
            s = s + y[i] * f
    return 0.5 * (s + s.T)


def _is_pd(s: np.ndarray) -> bool:
    try:
        np.linalg.cholesky(s + 0.0)
        return True
    except np.linalg.LinAlgError:
        return False


def _barrier(blocks, c, y, tol, max_iter):
    """Damped Newton on c.y - mu sum logdet S_b(y), mu -> 0."""
    mval = len(c)
    nu = sum(b.size for b in blocks)
    mu = max(1.0, float(np.linalg.norm(c))) if nu else 1.0
    iters = 0
    while mu * nu > tol:
        mu *= 0.2
        for _ in range(80):
            iters += 1
            if iters > max_iter:
                return SdpResult("max-iter", y, float(c @ y), mu * nu)
            grad = c.astype(float).copy()
            hess = np.zeros((mval, mval))
            for b in blocks:
                s = _block_s(b, y)
                sinv = np.linalg.inv(s)
                sinv = 0.5 * (sinv + sinv.T)
                ts = [sinv @ f for f in b.fs]
                for i in range(mval):
                    grad[i] -= mu * np.trace(ts[i])
                    for j in range(i, mval):
                        v = mu * np.sum(ts[i] * ts[j].T)
                        hess[i, j] += v
                        if j != i:
                            hess[j, i] += v
            ridge = 1e-12 * max(1.0, np.trace(hess) / mval)
            try:
                dy = np.linalg.solve(hess + ridge * np.eye(mval), -grad)
            except np.linalg.LinAlgError:
                dy = -grad
            decrement = float(-grad @ dy)
            if decrement < 1e-16:
                break
            alpha = 1.0
            for _ in range(60):
                cand = y + alpha * dy
                if all(_is_pd(_block_s(b, cand)) for b in blocks):
                    break
                alpha *= 0.5
            else:
                break
            y = y + alpha * dy
            if decrement < 1e-12:
                break
    return SdpResult("optimal", y, float(c @ y), mu * nu)


def _margin_problem(problem: SdpProblem, cap: float) -> SdpProblem:
    """Augment with a margin variable s: S_b(y) - s I >= 0, s <= cap."""
    blocks = []
    for b in problem.blocks:
        fs = [f.copy() for f in b.fs] + [-np.eye(b.size)]
        blocks.append(SdpBlock(b.size, b.f0.copy(), fs, b.diagonal))
    bound = SdpBlock(1, np.array([[-cap]]), [np.zeros((1, 1))] * problem.m + [-np.ones((1, 1))], True)
    blocks.append(bound)
    c = np.zeros(problem.m + 1)
    c[-1] = -1.0  # maximize the margin
    return SdpProblem(problem.m + 1, blocks, c)


def _feasible_start(problem: SdpProblem, y: np.ndarray) -> np.ndarray:
    """Strictly feasible start for the margin-augmented problem."""
    margins = [float(np.linalg.eigvalsh(_block_s(b, y)).min()) for b in problem.blocks]
    s0 = min(margins) - 1.0
    return np.concatenate([y, [s0]])


def sdp_solve(problem: SdpProblem, y0=None, tol: float = 1e-8, max_iter: int = 4000) -> SdpResult:
    """Solve the LMI problem; feasibility questions get a margin certificate.

    For objective problems, a strictly feasible start is found by margin
    maximization first. Feasibility problems report "infeasible" only
    when the best achievable margin is clearly negative.
    """
    for b in problem.blocks:
        if len(b.fs) != problem.m:
            raise InvalidInputError("block coefficient count mismatch")
    y_init = np.zeros(problem.m) if y0 is None else np.asarray(y0, dtype=float)

    if problem.c is None:
        aug = _margin_problem(problem, cap=10.0)
        start = _feasible_start(problem, y_init)
        res = _barrier(aug.blocks, aug.c, start, tol, max_iter)
        margin = float(res.y[-1])
        status = res.status
        if status == "optimal":
            status = "infeasible" if margin < -max(tol, res.gap or 0.0) else "optimal"
        return SdpResult(status, res.y[:-1], margin, res.gap, margin)

    y = y_init
    if not all(_is_pd(_block_s(b, y)) for b in problem.blocks):
        aug = _margin_problem(problem, cap=10.0)
        start = _feasible_start(problem, y)

        res = _barrier(aug.blocks, aug.c, start, max(tol, 1e-6), max_iter)
        if res.y is None or float(res.y[-1]) <= 0:
            return SdpResult("infeasible", None, None, res.gap, float(res.y[-1]) if res.y is not None else None)
        # re-center strictly inside before optimizing the real objective
        y = res.y[:-1]
        if not all(_is_pd(_block_s(b, y)) for b in problem.blocks):
            raise SolverConvergenceError("phase-1 produced a non-interior point")
    res = _barrier(problem.blocks, np.asarray(problem.c, dtype=float), y, tol, max_iter)
    return res


# ---------------------------------------------------------------------------
# SDPA sparse format


def _fmt(v: float) -> str:
    if v == 0:
        v = 0.0
    return format(float(v), ".17g")


def export_sdpa(problem: SdpProblem, path) -> None:
    """Write the problem as sparse SDPA ".dat-s" with deterministic layout.

    Line 1: number of constraint matrices m; line 2: number of blocks;
    line 3: block sizes (negative marks a diagonal block); line 4: the
    objective vector; then quintuples "matno blkno i j value" with
    i <= j, matno 0 for the constant matrix F_0.
    """
    lines = [str(problem.m), str(len(problem.blocks))]
    lines.append(" ".join(str(-b.size if b.diagonal else b.size) for b in problem.blocks))
    c = problem.c if problem.c is not None else np.zeros(problem.m)
    lines.append(" ".join(_fmt(v) for v in c))
    for matno in range(problem.m + 1):
        for bi, b in enumerate(problem.blocks):
            mat = b.f0 if matno == 0 else b.fs[matno - 1]
            for i in range(b.size):
                for j in range(i, b.size):
                    v = mat[i, j]
                    if v != 0:
                        lines.append(f"{matno} {bi + 1} {i + 1} {j + 1} {_fmt(v)}")
    with open(path, "w") as fh:
        fh.write("\n".join(lines) + "\n")


def parse_sdpa(path) -> SdpProblem:
    """Parse a sparse SDPA file written by :func:`export_sdpa`."""
    with open(path) as fh:
        lines = [line.rstrip("\n") for line in fh if not line.startswith(("*", '"'))]
    m = int(lines[0])
    sizes = [int(tok) for tok in lines[2].split()]
    if len(sizes) != int(lines[1]):
        raise InvalidInputError("block size line disagrees with the block count")
    c = np.array([float(tok) for tok in lines[3].split()])
    if len(c) not in (0, m):
        raise InvalidInputError("objective vector length disagrees with m")
    blocks = [
        SdpBlock(abs(s), np.zeros((abs(s), abs(s))), [np.zeros((abs(s), abs(s))) for _ in range(m)], s < 0)
        for s in sizes
    ]
    for line in lines[4:]:
        if not line.strip():
            continue
        matno_s, blk_s, i_s, j_s, val_s = line.split()
        matno, blk, i, j = int(matno_s), int(blk_s) - 1, int(i_s) - 1, int(j_s) - 1
        val = float(val_s)
        mat = blocks[blk].f0 if matno == 0 else blocks[blk].fs[matno - 1]
        mat[i, j] = val
        mat[j, i] = val
    return SdpProblem(m, blocks, c if len(c) else None)


def parse_sdpa_solution(path) -> dict:
    """Parse the solution vectors of an SDPA-style output file.

    Understands lines of the form `xVec = {v1, v2, ...}` (and `yVec`,
    `objValPrimal = v`, `objValDual = v`), the common layout of
    SDPA-family result files. Returns whatever of those was found.
    """
    out: dict = {}
    with open(path) as fh:
        text = fh.read()
    for key in ("objValPrimal", "objValDual"):
        idx = text.find(key)
        if idx >= 0:
            tail = text[idx:].split("=", 1)[1].strip().split()[0].rstrip(",;")
            out[key] = float(tail)
    for key, name in (("xVec", "x"), ("yVec", "y")):
        idx = text.find(key)
        if idx < 0:
            continue
        start = text.index("{", idx)
        end = text.index("}", start)
        body = text[start + 1 : end].replace(",", " ").split()
        out[name] = [float(tok) for tok in body]
    return out
