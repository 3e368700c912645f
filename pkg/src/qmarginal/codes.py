"""Quantum code existence as a marginal problem.

A pure ((n, K, m+1))_d code corresponds to a state on an auxiliary
K-dimensional system plus n qudits whose marginals on the auxiliary
system and any m qudits are maximally mixed; general codes only require
the auxiliary part of those marginals to be maximally mixed and
uncorrelated. Both become two-party separability problems, and after
symmetrization the candidate operator has the two-block form

    Phi = 1_{K^2} (x) sum_i x_i P{V^i 1^(n-i)} + V_aux (x) sum_i y_i P{...}.

At two copies every positivity and PPT sector of this ansatz is scalar,
so relaxation-level feasibility is an exact rational LP. The N-copy
extension reuses the generic slot-class machinery.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from math import comb

import numpy as np

from .blocks import SlotSystem, SymbolicOperator, irrep_block
from .errors import InvalidInputError, ResourceCapError
from .hierarchy import CONST, BlockSdp, MarginalSpec, assemble_primal, solve_primal
from .symgroup import Partition

F0 = Fraction(0)
F1 = Fraction(1)

DENSE_STATE_CAP = 4096


@dataclass(frozen=True)
class CodeParams:
    """((n, K, m+1))_d code parameters; m is the uniformity."""

    n: int
    K: int
    m: int
    d: int
    pure: bool = False

    def __post_init__(self):
        if self.n < 1 or self.K < 1 or self.m < 0 or self.d < 2:
            raise InvalidInputError("need n >= 1, K >= 1, m >= 0, d >= 2")
        if self.m > self.n:
            raise InvalidInputError("uniformity m cannot exceed n")

    @property
    def distance(self) -> int:
        return self.m + 1

    def label(self) -> str:
        return f"(({self.n},{self.K},{self.m + 1}))_{self.d}"


def singleton_check(params: CodeParams) -> str:
    """"pass" unless K > d^(n-2m); big-integer arithmetic throughout."""
    return "fail" if params.K * params.d ** (2 * params.m) > params.d**params.n else "pass"


def purecode_marginal_spec(params: CodeParams) -> MarginalSpec:
    """Marginal spec on the auxiliary+qudits system for a pure code.

    Every subset {aux} u I with |I| = m carries the maximally mixed
    marginal of dimension K d^m. Rejected when the Singleton bound
    already rules the code out.
    """
    if not params.pure:
        raise InvalidInputError("marginal spec of this form needs the pure flag")
    if singleton_check(params) == "fail":
        raise InvalidInputError(
            f"{params.label()} violates the Singleton bound K <= d^(n-2m); "
            "the rank of any kept marginal would exceed the dimension of the traced side"
        )
    marginals = {
        frozenset({0}) | {i + 1 for i in c}: "maximally_mixed"
        for c in itertools.combinations(range(params.n), params.m)
    }
    dims = (params.K,) + (params.d,) * params.n
    return MarginalSpec(params.n + 1, params.d, marginals, uniform=True, dims=dims)


def uniform_marginal_spec(n: int, d: int, size: int) -> MarginalSpec:
    """All size-body marginals maximally mixed (m-uniform states)."""
    marginals = {frozenset(c): "maximally_mixed" for c in itertools.combinations(range(n), size)}
    return MarginalSpec(n, d, marginals, uniform=True)


# ---------------------------------------------------------------------------
# state fixtures and direct verification


def ghz_state(n: int, d: int) -> np.ndarray:
    psi = np.zeros(d**n)
    step = (d**n - 1) // (d - 1)
    for k in range(d):
        psi[k * step] = 1.0
    return psi / np.sqrt(d)


def five_qubit_code_state() -> np.ndarray:
    """Logical-basis entangled state of the ((5,2,3))_2 stabilizer code.

    Generators XZZXI and its cyclic shifts; the logical operators are
    X^x5 and Z^x5. Returns the 64-dimensional vector on aux (x) 5 qubits.
    """
    x = np.array([[0.0, 1.0], [1.0, 0.0]])
    z = np.array([[1.0, 0.0], [0.0, -1.0]])
    eye = np.eye(2)

    def pauli_string(s: str) -> np.ndarray:
        out = np.array([[1.0]])
        for ch in s:
            out = np.kron(out, {"X": x, "Z": z, "I": eye}[ch])
        return out

    base = "XZZXI"
    gens = [base[-k:] + base[:-k] for k in range(4)]
    proj = np.eye(32)
    for gstr in gens:
        proj = proj @ (np.eye(32) + pauli_string(gstr)) / 2
    zero = np.zeros(32)
    zero[0] = 1.0
    logical0 = proj @ zero
    logical0 /= np.linalg.norm(logical0)
    logical1 = pauli_string("XXXXX") @ logical0
    logical1 /= np.linalg.norm(logical1)
    state = np.concatenate([logical0, logical1]) / np.sqrt(2)
    return state


@dataclass
class CodeStateReport:
    params: CodeParams
    max_deviation: float
    ok: bool
    tol: float

    def to_dict(self) -> dict:
        return {
            "params": self.params.label(),
            "n": self.params.n,
            "K": self.params.K,
            "m": self.params.m,
            "d": self.params.d,
            "max_deviation": self.max_deviation,
            "ok": self.ok,
            "tol": self.tol,
        }


def verify_code_state(state, params: CodeParams, tol: float = 1e-10) -> CodeStateReport:
    """Check the defining marginals of a candidate code state directly.

    The state lives on C^K (x) (C^d)^n; for every m-subset I of the
    qudits, the marginal on {aux} u I must be maximally mixed. Reports
    the largest spectral-norm deviation.
    """
    n, K, m, d = params.n, params.K, params.m, params.d
    dim = K * d**n
    if dim > DENSE_STATE_CAP:
        raise ResourceCapError(f"state dimension {dim} exceeds {DENSE_STATE_CAP}")
    psi = np.asarray(state, dtype=complex).reshape([K] + [d] * n)
    if abs(np.linalg.norm(psi) - 1.0) > 1e-9:
        raise InvalidInputError("state vector must be normalized")
    target_dim = K * d**m
    worst = 0.0
    for subset in itertools.combinations(range(1, n + 1), m):
        traced = [ax for ax in range(1, n + 1) if ax not in subset]
        rho = np.tensordot(psi, psi.conj(), axes=(traced, traced)).reshape(target_dim, target_dim)
        dev = np.linalg.norm(rho - np.eye(target_dim) / target_dim, 2)
        worst = max(worst, float(dev))
    return CodeStateReport(params, worst, worst <= tol, tol)


@dataclass
class TracelessBasis:
    """Hermitian traceless basis of the auxiliary operator space."""

    K: int
    elements: list = field(default_factory=list)

    def __post_init__(self):
        if not self.elements:
            self.elements = _gell_mann(self.K)

    def __len__(self) -> int:
        return len(self.elements)


def _gell_mann(k: int) -> list:
    out = []
    for i in range(k):
        for j in range(i + 1, k):
            sym = np.zeros((k, k), dtype=complex)
            sym[i, j] = sym[j, i] = 1.0
            out.append(sym)
            asym = np.zeros((k, k), dtype=complex)
            asym[i, j] = -1.0j
            asym[j, i] = 1.0j
            out.append(asym)
    for l in range(1, k):
        diag = np.zeros((k, k), dtype=complex)
        for i in range(l):
            diag[i, i] = 1.0
        diag[l, l] = -float(l)
        out.append(diag)
    return out


# ---------------------------------------------------------------------------
# two-party (two-copy) constraint systems in closed form


@dataclass
class ScalarBlock:
    """1x1 positivity sector of the code ansatz; solve_primal-compatible."""

    partitions: tuple
    kind: str  # "pos" | "ppt"
    k: int
    z_per_var: dict
    y_per_var: dict = field(default_factory=dict)

    def __post_init__(self):
        if not self.y_per_var:
            self.y_per_var = {v: np.array([[float(c[0][0])]]) for v, c in self.z_per_var.items()}

    def z_at(self, x) -> list:
        total = sum((Fraction(x[v]) * m[0][0] for v, m in self.z_per_var.items() if x[v]), start=F0)
        return [[total]]


def _pattern_eigencoeff(n: int, j: int, l: int) -> int:
    """Value contribution of P{V^l 1^(n-l)} on a j-antisymmetric-slot eigenvector."""
    return sum((-1) ** k * comb(j, k) * comb(n - j, l - k) for k in range(max(0, l - (n - j)), min(j, l) + 1))


def _ppt_coeff(n: int, j: int, i: int, d: int) -> int:
    """Value of the partially transposed P{V^i 1^(n-i)} on a j-orthogonal-slot eigenvector."""
    return comb(n - j, i) * d**i if i <= n - j else 0


def code_two_party_constraints(params: CodeParams, level: str = "ppt") -> BlockSdp:
    """Equalities and scalar positivity/PPT sectors of the symmetrized
    two-party code operator.

    For K = 1 the auxiliary factor is trivial and the system collapses to
    the single coefficient family of an m-uniform state problem. For
    K >= 2 the swap-invariance of the support couples the two families as
    y_i = x_{n-i}; pure codes additionally fix the kept marginal, while
    general codes only constrain the auxiliary (traceless) directions.
    """
    if level not in ("pos", "ppt"):
        raise InvalidInputError(f"unknown relaxation level {level!r}")
    n, K, m, d = params.n, params.K, params.m, params.d
    aux_free = params.K == 1
    nx = n + 1
    keys = [("x", i) for i in range(nx)] + ([] if aux_free else [("y", i) for i in range(nx)])

    def xv(i):
        return i

    def yv(i):
        return i if aux_free else nx + i

    rows: list[dict] = []
    # normalization: K^2 tr(x-part) + K tr(y-part) = 1; single family for K=1
    if aux_free:
        row = {xv(i): Fraction(comb(n, i) * d ** (2 * n - i)) for i in range(nx)}
    else:
        row = {}
        for i in range(nx):
            t = comb(n, i) * d ** (2 * n - i)
            row[xv(i)] = Fraction(K * K * t)
            row[yv(i)] = Fraction(K * t)
    row[CONST] = -F1
    rows.append(row)

    # swap-invariant support: y_i = x_{n-i} (K>=2) or z_i = z_{n-i} (K=1)
    for i in range(nx):
        if aux_free:
            if i < n - i:
                rows.append({xv(i): F1, xv(n - i): -F1})
        elif yv(i) != xv(n - i):
            rows.append({yv(i): F1, xv(n - i): -F1})

    # marginal families: c_w(v) = sum_t binom(n-m,t) d^(n-m-t) v_{w+t}
    def family(vfun, w):
        row = {}
        for t in range(n - m + 1):
            if w + t <= n:
                row[vfun(w + t)] = row.get(vfun(w + t), F0) + comb(n - m, t) * d ** (n - m - t)
        return row

    if not aux_free:
        for w in range(m + 1):
            rows.append(family(yv, w))
    if params.pure:
        for w in range(1, m + 1):
            rows.append(family(xv, w))
        # the identity component ties to the total trace of the one-party marginal
        row = family(xv, 0)
        scale = Fraction(1, K * d**m)
        for i in range(nx):
            t = comb(n, i) * d ** (n - i)
            if aux_free:
                row[xv(i)] = row.get(xv(i), F0) - scale * t
            else:
                row[xv(i)] = row.get(xv(i), F0) - scale * K * t
                row[yv(i)] = row.get(yv(i), F0) - scale * t
        rows.append(row)

    # dedupe / drop zero rows
    cleaned = []
    seen = set()
    for r in rows:
        r = {v: c for v, c in r.items() if c}
        if not r:
            continue
        keyed = tuple(sorted(r.items()))
        if keyed not in seen:
            seen.add(keyed)
            cleaned.append(r)

    blocks = []
    sym2 = Partition((2,))
    anti2 = Partition((1, 1))
    for j in range(n + 1):
        coeffs = {xv(l): _pattern_eigencoeff(n, j, l) for l in range(nx)}
        if aux_free:
            if j % 2 == 0:
                z = {v: [[Fraction(c)]] for v, c in coeffs.items() if c}
                blocks.append(ScalarBlock((sym2, ("pattern", j)), "pos", 1, z))
        else:
            # aux symmetric sector needs total sign parity even: j even
            if j % 2 == 0:
                z = {}
                for l in range(nx):
                    c = coeffs[xv(l)]
                    if c:
                        z[xv(l)] = [[Fraction(c)]]
                        z[yv(l)] = [[Fraction(c)]]
                blocks.append(ScalarBlock((sym2, ("pattern", j)), "pos", 1, z))
            elif params.K >= 2:
                z = {}
                for l in range(nx):
                    c = coeffs[xv(l)]
                    if c:
                        z[xv(l)] = [[Fraction(c)]]
                        z[yv(l)] = [[Fraction(-c)]]
                blocks.append(ScalarBlock((anti2, ("pattern", j)), "pos", 1, z))
    if level == "ppt":
        for j in range(n + 1):
            base = {i: _ppt_coeff(n, j, i, d) for i in range(nx)}
            z = {}
            for i, c in base.items():
                if c:
                    z[xv(i)] = [[Fraction(c)]]
                    if not aux_free:
                        z[yv(i)] = [[Fraction(K * c)]]
            blocks.append(ScalarBlock((("phi-sector",), ("pattern", j)), "ppt", 1, z))
            if not aux_free:
                z2 = {xv(i): [[Fraction(c)]] for i, c in base.items() if c}
                blocks.append(ScalarBlock((("perp-sector",), ("pattern", j)), "ppt", 1, z2))

    system = SlotSystem(2, (params.K,) + (d,) * n, (0,) + (1,) * n)
    return BlockSdp(system, keys, cleaned, blocks, meta={"params": params, "level": level})


def generalcode_constraints(params: CodeParams, level: str = "ppt") -> BlockSdp:
    """Constraint system when the code marginals are free (general codes)."""
    general = CodeParams(params.n, params.K, params.m, params.d, pure=False)
    bs = code_two_party_constraints(general, level)
    bs.meta["traceless_families_per_subset"] = params.K**2 - 1
    return bs


def purecode_two_party_constraints(params: CodeParams, level: str = "ppt") -> BlockSdp:
    """Constraint system with the kept marginal pinned to maximally mixed."""
    if not params.pure:
        raise InvalidInputError("pure-code assembly needs the pure flag")
    if singleton_check(params) == "fail":
        raise InvalidInputError(f"{params.label()} fails the Singleton bound; not assembling")
    return code_two_party_constraints(params, level)


# ---------------------------------------------------------------------------
# N-copy extension


def code_extension_blocksdp(params: CodeParams, copies: int, cap: int = 512) -> BlockSdp:
    """Level-`copies` system for a code problem via the slot-class machinery.

    K = 1 reduces to the m-uniform problem on the qudits alone. For
    K >= 2 the auxiliary slot is its own symmetry class; pure codes pin
    the kept marginal, general codes only remove the auxiliary
    correlations (marginals otherwise free).
    """
    n, K, m, d = params.n, params.K, params.m, params.d
    if K == 1:
        return assemble_primal(uniform_marginal_spec(n, d, m), copies, cap=cap)
    if params.pure and singleton_check(params) == "fail":
        raise InvalidInputError(f"{params.label()} fails the Singleton bound; not assembling")
    system = SlotSystem(copies, (K,) + (d,) * n, (0,) + (1,) * n)
    g = system.group
    keys = system.keys()
    phi = SymbolicOperator.variable_expansion(system, keys)

    rows: list[dict] = []
    trace_row = phi.trace_row()
    trace_row[CONST] = trace_row.get(CONST, F0) - 1
    rows.append(trace_row)
    rows += [phi.sub(phi.adjoint()).pairing_row(t) for t in keys]
    from .symgroup import Permutation

    for gen in (Permutation.transposition(copies, 0, 1), Permutation.full_cycle(copies)):
        gi = g.index[gen.images]
        moved = phi.slotwise_multiply((gi,) * (n + 1), side="left")
        rows += [moved.sub(phi).pairing_row(t) for t in keys]

    kept_qudits = tuple(range(n + 1 - m, n + 1))
    traced_qudits = tuple(range(1, n + 1 - m))
    tests = _code_marginal_tests(system, traced_qudits)
    if params.pure:
        lhs = phi.ptrace(traced_qudits, 0)
        rhs = (
            phi.ptrace(range(n + 1), 0)
            .untrace({(s, 0) for s in (0,) + kept_qudits})
            .scale(Fraction(1, K * d**m))
        )
        diff = lhs.sub(rhs)
    else:
        reduced = phi.ptrace(traced_qudits, 0)
        projected = reduced.ptrace((0,), 0).untrace({(0, 0)}).scale(Fraction(1, K))
        diff = reduced.sub(projected)
    rows += [diff.pairing_row(t) for t in tests]

    seen = {}
    for row in rows:
        norm = _norm_row(row)
        if norm is not None and norm not in seen:
            seen[norm] = dict(norm)
    rows = list(seen.values())

    blocks = []
    for tpl in system.partition_tuples():
        blk = irrep_block(system, tpl, keys, cap=cap)
        if blk is not None:
            blocks.append(blk)
    return BlockSdp(system, keys, rows, blocks, meta={"params": params, "copies": copies})


def _norm_row(row: dict):
    items = sorted((v, c) for v, c in row.items() if c)
    if not items or all(v == CONST for v, _ in items):
        return None
    lead = next(c for v, c in items if v != CONST)
    return tuple((v, c / lead) for v, c in items)


def _code_marginal_tests(system: SlotSystem, traced_qudits):
    g = system.group
    opts = []
    for s in range(system.slots):
        opts.append(g.fixing[0] if s in traced_qudits else range(len(g.elements)))
    return list(itertools.product(*opts))


# ---------------------------------------------------------------------------
# feasibility driver


@dataclass
class CodeFeasibilityReport:
    params: CodeParams
    level: str
    verdict: str  # "feasible" | "infeasible"
    reason: str = ""
    exact: bool = True
    margin: float | None = None
    nullity: int = 0

    def to_dict(self) -> dict:
        return {
            "params": self.params.label(),
            "n": self.params.n,
            "K": self.params.K,
            "m": self.params.m,
            "d": self.params.d,
            "pure": self.params.pure,
            "level": self.level,
            "verdict": self.verdict,
            "reason": self.reason,
            "exact": self.exact,
            "margin": self.margin,
            "nullity": self.nullity,
        }


def code_check(params: CodeParams, level: str = "ppt", copies: int = 3, cap: int = 512) -> CodeFeasibilityReport:
    """Necessary-condition feasibility of a code's two-party extension."""
    if params.pure and singleton_check(params) == "fail":
        return CodeFeasibilityReport(params, "singleton", "infeasible", "Singleton bound K <= d^(n-2m) violated")
    if level in ("pos", "ppt"):
        bs = (
            purecode_two_party_constraints(params, level)
            if params.pure
            else generalcode_constraints(params, level)
        )
    elif level == "extension":
        bs = code_extension_blocksdp(params, copies, cap=cap)
    else:
        raise InvalidInputError(f"unknown relaxation level {level!r}")
    verdict = solve_primal(bs)
    return CodeFeasibilityReport(
        params,
        level,
        verdict.status,
        "" if verdict.status == "feasible" else "no PSD solution at this relaxation level",
        verdict.exact,
        verdict.margin,
        verdict.nullity,
    )
