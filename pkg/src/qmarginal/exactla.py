"""Dense exact linear algebra over `fractions.Fraction`.

Matrices are lists of lists of Fractions. Everything here is small and
dense; these routines back the exact solver paths where floating point
would blur a sign decision.
"""

from fractions import Fraction

F0 = Fraction(0)
F1 = Fraction(1)


def zeros(rows, cols):
    return [[F0] * cols for _ in range(rows)]


def identity(n):
    out = zeros(n, n)
    for i in range(n):
        out[i][i] = F1
    return out


def mat_mul(a, b):
    rows, inner, cols = len(a), len(b), len(b[0])
    out = zeros(rows, cols)
    for i in range(rows):
        ai = a[i]
        oi = out[i]
        for k in range(inner):
            aik = ai[k]
            if aik:
                bk = b[k]
                for j in range(cols):
                    if bk[j]:
                        oi[j] += aik * bk[j]
    return out


def mat_vec(a, v):
    return [sum((row[j] * v[j] for j in range(len(v)) if v[j]), start=F0) for row in a]


def mat_add(a, b, scale=F1):
    return [[a[i][j] + scale * b[i][j] for j in range(len(a[0]))] for i in range(len(a))]


def mat_scale(a, s):
    return [[s * x for x in row] for row in a]


def transpose(a):
    return [list(col) for col in zip(*a)]


def kron(a, b):
    ra, ca, rb, cb = len(a), len(a[0]), len(b), len(b[0])
    out = zeros(ra * rb, ca * cb)
    for i in range(ra):
        for j in range(ca):
            aij = a[i][j]
            if aij:
                for k in range(rb):
                    for l in range(cb):
                        if b[k][l]:
                            out[i * rb + k][j * cb + l] = aij * b[k][l]
    return out


def kron_all(mats):
    out = [[F1]]
    for m in mats:
        out = kron(out, m)
    return out


def rref(matrix, ncols=None):
    """Reduced row echelon form in place; returns pivot column list.

    Row updates only touch entries from the pivot column rightward and
    skip zeros in the pivot row, which matters for the large sparse
    constraint systems fed in here.
    """
    m = matrix
    rows = len(m)
    if rows == 0:
        return []
    width = len(m[0])
    cols = ncols if ncols is not None else width
    pivots = []
    r = 0
    for c in range(cols):
        pivot = next((i for i in range(r, rows) if m[i][c]), None)
        if pivot is None:
            continue
        m[r], m[pivot] = m[pivot], m[r]
        mr = m[r]
        inv = F1 / mr[c]
        if inv != 1:
            for j in range(c, width):
                if mr[j]:
                    mr[j] *= inv
        support = [j for j in range(c, width) if mr[j]]
        for i in range(rows):
            mi = m[i]
            if i != r and mi[c]:
                f = mi[c]
                for j in support:
                    mi[j] -= f * mr[j]
        pivots.append(c)
        r += 1
        if r == rows:
            break
    return pivots


def solve_affine(a, b, ncols=None):
    """Solve a x = b exactly.

    Returns (particular, nullspace_basis) or None when inconsistent.
    The nullspace basis spans all homogeneous solutions.
    """
    if ncols is None:
        n = len(a[0]) if a else 0
    else:
        n = ncols
    aug = [list(row) + [b[i]] for i, row in enumerate(a)]
    pivots = rref(aug, ncols=n)
    rank = len(pivots)
    for i in range(rank, len(aug)):
        if aug[i][n]:
            return None
    particular = [F0] * n
    for r, c in enumerate(pivots):
        particular[c] = aug[r][n]
    free = [c for c in range(n) if c not in set(pivots)]
    basis = []
    for fc in free:
        v = [F0] * n
        v[fc] = F1
        for r, c in enumerate(pivots):
            v[c] = -aug[r][fc]
        basis.append(v)
    return particular, basis


def nullspace(a, ncols=None):
    """Exact right nullspace basis of a (list of row vectors)."""
    if not a:
        return []
    n = ncols if ncols is not None else len(a[0])
    work = [list(row) for row in a]
    pivots = rref(work, ncols=n)
    free = [c for c in range(n) if c not in set(pivots)]
    basis = []
    for fc in free:
        v = [F0] * n
        v[fc] = F1
        for r, c in enumerate(pivots):
            v[c] = -work[r][fc]
        basis.append(v)
    return basis


def solve_unique(a, b):
    """Solve a square nonsingular system exactly; None if singular/inconsistent."""
    res = solve_affine(a, b)
    if res is None or res[1]:
        return None
    return res[0]


def ldlt_psd_witness(m):
    """Decide positive semidefiniteness of a symmetric rational matrix.

    Returns (True, None) when PSD, else (False, v) with a rational vector
    v such that v^T m v < 0. Uses symmetric elimination with diagonal
    pivoting; on a zero diagonal with nonzero off-diagonal row, a 2x2
    indefinite witness is built instead.
    """
    n = len(m)
    a = [[Fraction(x) for x in row] for row in m]
    # track the congruence: after eliminating pivot p, rows are combined;
    # we keep the elimination multipliers to map witnesses back.
    steps = []  # (pivot_index, {row: multiplier})
    active = list(range(n))
    while active:
        neg = next((i for i in active if a[i][i] < 0), None)
        if neg is not None:
            v = [F0] * n
            v[neg] = F1
            return False, _undo_elimination(v, steps)
        piv = next((i for i in active if a[i][i] > 0), None)
        if piv is None:
            # all remaining diagonal entries are zero
            for i in active:
                for j in active:
                    if i != j and a[i][j]:
                        v = [F0] * n
                        v[i] = F1
                        v[j] = -F1 if a[i][j] > 0 else F1
                        return False, _undo_elimination(v, steps)
            return True, None
        mults = {}
        for i in active:
            if i != piv and a[i][piv]:
                f = a[i][piv] / a[piv][piv]
                mults[i] = f
                for j in active:
                    if a[piv][j]:
                        a[i][j] -= f * a[piv][j]
        steps.append((piv, mults))
        active.remove(piv)
    return True, None


def _undo_elimination(v, steps):
    # elimination applied row_i -= f * row_piv both sides; the congruence is
    # a -> L a L^T with L = I - f E_{i,piv}, so witnesses map back via L^T.
    out = list(v)
    for piv, mults in reversed(steps):
        for i, f in mults.items():
            out[piv] -= f * out[i]
    return out


def quadratic_form(m, v):
    return sum(v[i] * sum(m[i][j] * v[j] for j in range(len(v)) if v[j]) for i in range(len(v)) if v[i])


def to_float(a):
    import numpy as np

    return np.array([[float(x) for x in row] for row in a], dtype=float)
