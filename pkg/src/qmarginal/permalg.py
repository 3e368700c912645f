"""Exact algebra of permutation-operator tensor products.

Operators here are rational linear combinations of basis elements
V_{sigma_1} x ... x V_{sigma_n}, where slot i carries the operator
permuting the N copies of its local C^d factor. Two coefficient layouts
are used:

* :class:`SymmetrizedOperator` stores one coefficient per multiset of
  slot permutations; the operator it denotes is the sum of that
  coefficient times every distinct arrangement of the multiset. This is
  the natural layout for operators invariant under permuting slots.
* :class:`PermTensorOperator` stores ordered slot tuples. Partial traces
  over a copy break slot symmetry, so they land here.

All coefficients are `fractions.Fraction`; nothing in this module uses
floating point.
"""

from __future__ import annotations

import itertools
from collections import Counter
from dataclasses import dataclass, field
from fractions import Fraction
from math import comb, factorial

from .errors import InvalidInputError
from .symgroup import Permutation

F0 = Fraction(0)
F1 = Fraction(1)


def perm_trace(sigma: Permutation, d: int) -> int:
    """Trace of the copy-permutation operator on (C^d)^{otimes N}: d^{#cycles}."""
    return d ** sigma.n_cycles()


def partial_trace_copy(sigma: Permutation, copy: int, d: int) -> tuple[int, Permutation]:
    """Partial trace of V_sigma over one copy, re-embedded with that copy fixed.

    Returns (factor, reduced): tracing a fixed point gives a factor d and
    leaves sigma unchanged; otherwise the copy is deleted from its cycle
    (factor 1) and reinserted as a fixed point.
    """
    if not 0 <= copy < sigma.n:
        raise InvalidInputError(f"copy {copy} out of range for N={sigma.n}")
    if sigma.fixes(copy):
        return d, sigma
    images = list(sigma.images)
    pre = images.index(copy)
    images[pre] = images[copy]
    images[copy] = copy
    return 1, Permutation(tuple(images))


def canonical_key(perms) -> tuple[Permutation, ...]:
    """Multiset representative: slot permutations sorted by one-line notation."""
    return tuple(sorted(perms, key=lambda p: p.images))


def arrangement_count(key) -> int:
    counts = Counter(p.images for p in key)
    out = factorial(len(key))
    for c in counts.values():
        out //= factorial(c)
    return out


def distinct_arrangements(key):
    return set(itertools.permutations(key))


@dataclass(frozen=True)
class PermTensorBasisElement:
    """One basis operator V_{sigma_1} x ... x V_{sigma_n}."""

    slots: tuple[Permutation, ...]
    d: int

    @property
    def n(self) -> int:
        return len(self.slots)

    @property
    def copies(self) -> int:
        return self.slots[0].n

    def canonical(self) -> "PermTensorBasisElement":
        return PermTensorBasisElement(canonical_key(self.slots), self.d)

    def trace(self) -> int:
        out = 1
        for p in self.slots:
            out *= perm_trace(p, self.d)
        return out


@dataclass
class PermTensorOperator:
    """Rational combination of ordered permutation tensor basis elements.

    `traced` records (slot, copy) cells that have been traced out and
    re-embedded as fixed points: those cells contribute no dimension
    factor to traces and pairings.
    """

    copies: int
    slots: int
    d: int
    coeffs: dict = field(default_factory=dict)
    traced: frozenset = frozenset()

    def _check(self, other):
        if (self.copies, self.slots, self.d, self.traced) != (other.copies, other.slots, other.d, other.traced):
            raise InvalidInputError("operator shapes differ")

    def _like(self, coeffs=None):
        return PermTensorOperator(self.copies, self.slots, self.d, coeffs or {}, self.traced)

    def add_term(self, key, value):
        if not value:
            return
        cur = self.coeffs.get(key, F0) + value
        if cur:
            self.coeffs[key] = cur
        else:
            self.coeffs.pop(key, None)

    def __add__(self, other):
        self._check(other)
        out = self._like(dict(self.coeffs))
        for k, v in other.coeffs.items():
            out.add_term(k, v)
        return out

    def __sub__(self, other):
        return self + other.scale(-F1)

    def scale(self, s):
        s = Fraction(s)
        if not s:
            return self._like()
        return self._like({k: s * v for k, v in self.coeffs.items()})

    def __eq__(self, other):
        return (
            isinstance(other, PermTensorOperator)
            and (self.copies, self.slots, self.d, self.traced) == (other.copies, other.slots, other.d, other.traced)
            and self.coeffs == other.coeffs
        )

    def trace(self) -> Fraction:
        d = self.d
        scale = Fraction(1, d ** len(self.traced))
        return sum((v * prod_traces(k, d) for k, v in self.coeffs.items()), start=F0) * scale

    def pairing(self, other) -> Fraction:
        """Hilbert-Schmidt pairing Tr(self @ other) on the reduced space."""
        self._check(other)
        d = self.d
        total = F0
        for k1, v1 in self.coeffs.items():
            for k2, v2 in other.coeffs.items():
                w = v1 * v2
                for a, b in zip(k1, k2):
                    w *= d ** a.compose(b).n_cycles()
                total += w
        return total / d ** len(self.traced)

    def ptrace_copy(self, traced_slots, copy: int) -> "PermTensorOperator":
        """Trace the given copy out of the given slots (fixed-point re-embedding)."""
        new_cells = {(s, copy) for s in traced_slots}
        if new_cells & self.traced:
            raise InvalidInputError("cell traced twice")
        out = PermTensorOperator(self.copies, self.slots, self.d, {}, self.traced | new_cells)
        traced = tuple(traced_slots)
        for key, v in self.coeffs.items():
            factor = F1
            new_key = list(key)
            for s in traced:
                f, reduced = partial_trace_copy(key[s], copy, self.d)
                factor *= f
                new_key[s] = reduced
            out.add_term(tuple(new_key), v * factor)
        return out

    def slotwise_multiply(self, taus, side: str = "left") -> "PermTensorOperator":
        """Multiply by V_{tau_1} x ... x V_{tau_n} on the given side."""
        out = self._like()
        for key, v in self.coeffs.items():
            if side == "left":
                new_key = tuple(t.compose(k) for t, k in zip(taus, key))
            else:
                new_key = tuple(k.compose(t) for k, t in zip(taus, key))
            out.add_term(new_key, v)
        return out

    def adjoint(self) -> "PermTensorOperator":
        out = self._like()
        for key, v in self.coeffs.items():
            out.add_term(tuple(p.inverse() for p in key), v)
        return out


def prod_traces(key, d: int) -> int:
    out = 1
    for p in key:
        out *= perm_trace(p, d)
    return out


@dataclass
class SymmetrizedOperator:
    """Slot-permutation invariant operator with multiset coefficient keys."""

    copies: int
    slots: int
    d: int
    coeffs: dict = field(default_factory=dict)

    def __post_init__(self):
        fixed = {}
        for key, v in self.coeffs.items():
            v = Fraction(v)
            if not v:
                continue
            ckey = canonical_key(key)
            fixed[ckey] = fixed.get(ckey, F0) + v
        self.coeffs = {k: v for k, v in fixed.items() if v}

    # -- construction -------------------------------------------------

    @staticmethod
    def zero(copies: int, slots: int, d: int) -> "SymmetrizedOperator":
        return SymmetrizedOperator(copies, slots, d, {})

    @staticmethod
    def from_x(x, n: int, d: int) -> "SymmetrizedOperator":
        """Sum_i x_i P{V^{x i} x 1^{x (n-i)}} on two copies."""
        if len(x) != n + 1:
            raise InvalidInputError("need n+1 coefficients")
        coeffs = {_xi_key(n, i): Fraction(xi) for i, xi in enumerate(x) if xi}
        return SymmetrizedOperator(2, n, d, coeffs)

    def _check(self, other):
        if (self.copies, self.slots, self.d) != (other.copies, other.slots, other.d):
            raise InvalidInputError("operator shapes differ")

    def __add__(self, other):
        self._check(other)
        merged = dict(self.coeffs)
        for k, v in other.coeffs.items():
            merged[k] = merged.get(k, F0) + v
        return SymmetrizedOperator(self.copies, self.slots, self.d, merged)

    def __sub__(self, other):
        return self + other.scale(-F1)

    def scale(self, s) -> "SymmetrizedOperator":
        s = Fraction(s)
        return SymmetrizedOperator(self.copies, self.slots, self.d, {k: s * v for k, v in self.coeffs.items()})

    def __eq__(self, other):
        return (
            isinstance(other, SymmetrizedOperator)
            and (self.copies, self.slots, self.d) == (other.copies, other.slots, other.d)
            and self.coeffs == other.coeffs
        )

    # -- operations ----------------------------------------------------

    def op_trace(self) -> Fraction:
        total = F0
        for key, v in self.coeffs.items():
            total += v * arrangement_count(key) * prod_traces(key, self.d)
        return total

    def left_multiply_swap(self, sigma: Permutation) -> "SymmetrizedOperator":
        """Multiply by V_sigma^{otimes n} on the left."""
        out = {}
        for key, v in self.coeffs.items():
            nk = canonical_key(tuple(sigma.compose(p) for p in key))
            out[nk] = out.get(nk, F0) + v
        return SymmetrizedOperator(self.copies, self.slots, self.d, out)

    def right_multiply_swap(self, sigma: Permutation) -> "SymmetrizedOperator":
        out = {}
        for key, v in self.coeffs.items():
            nk = canonical_key(tuple(p.compose(sigma) for p in key))
            out[nk] = out.get(nk, F0) + v
        return SymmetrizedOperator(self.copies, self.slots, self.d, out)

    def adjoint(self) -> "SymmetrizedOperator":
        out = {}
        for key, v in self.coeffs.items():
            nk = canonical_key(tuple(p.inverse() for p in key))
            out[nk] = out.get(nk, F0) + v
        return SymmetrizedOperator(self.copies, self.slots, self.d, out)

    def to_ordered(self) -> PermTensorOperator:
        out = PermTensorOperator(self.copies, self.slots, self.d)
        for key, v in self.coeffs.items():
            for arr in distinct_arrangements(key):
                out.add_term(arr, v)
        return out

    def op_trace_via_marginals(self, copy: int = 0) -> Fraction:
        return self.marginal_of(range(self.slots), copy).trace()

    def marginal_of(self, traced_slots, traced_copy: int) -> PermTensorOperator:
        """Partial trace of the given copy over the given slots.

        The result is an ordered-key operator: slots stop being
        interchangeable once some of them have been traced.
        """
        return self.to_ordered().ptrace_copy(traced_slots, traced_copy)

    def pairing(self, other) -> Fraction:
        """Tr(self @ other) for two slot-symmetric operators."""
        self._check(other)
        return self.to_ordered().pairing(other.to_ordered())


def _xi_key(n: int, i: int) -> tuple[Permutation, ...]:
    if not 0 <= i <= n:
        raise InvalidInputError(f"index {i} outside 0..{n}")
    swap = Permutation.transposition(2, 0, 1)
    ident = Permutation.identity(2)
    return canonical_key((swap,) * i + (ident,) * (n - i))


def xi_element(i: int, n: int, d: int) -> SymmetrizedOperator:
    """X_i = P{V^{x i} x 1^{x (n-i)}} on two copies of n qudits."""
    return SymmetrizedOperator(2, n, d, {_xi_key(n, i): F1})


@dataclass(frozen=True)
class XiBasis:
    """Index card for the swap-pattern basis X_i and its dual."""

    n: int
    d: int
    index: int
    dual: bool = False

    def __post_init__(self):
        if not 0 <= self.index <= self.n:
            raise InvalidInputError(f"index {self.index} outside 0..{self.n}")

    def element(self) -> SymmetrizedOperator:
        if self.dual:
            return dual_basis_element(self.index, self.n, self.d)
        return xi_element(self.index, self.n, self.d)


def dual_basis_element(i: int, n: int, d: int) -> SymmetrizedOperator:
    """The dual element with Tr(dual_i X_j) = delta_ij.

    Expansion of P{(1 - V/d)^{x (n-i)} x (V - 1/d)^{x i}} divided by
    binom(n,i) (d^2-1)^n into the X_j coordinates. Per slot,
    Tr[(1 - V/d) 1] = d^2 - 1 and Tr[(1 - V/d) V] = 0, and dually for
    (V - 1/d), so the pairing with X_j singles out j = i.
    """
    if not 0 <= i <= n:
        raise InvalidInputError(f"index {i} outside 0..{n}")
    a = n - i  # slots carrying (1 - V/d); the other i slots carry (V - 1/d)
    denom = comb(n, i) * Fraction(d * d - 1) ** n
    coeffs = {}
    for j in range(n + 1):
        beta = F0
        for m in range(max(0, a + j - n), min(a, j) + 1):
            beta += comb(j, m) * comb(n - j, a - m) * Fraction(-1, d) ** (n - a - j + 2 * m)
        beta /= denom
        if beta:
            coeffs[_xi_key(n, j)] = beta
    return SymmetrizedOperator(2, n, d, coeffs)


# ---------------------------------------------------------------------------
# dense oracle (exact Kronecker matrices, for tests and small certificates)


def dense_perm_matrix(sigma: Permutation, d: int):
    """Dense 0/1 matrix of the copy permutation on (C^d)^{otimes N}."""
    n = sigma.n
    dim = d**n
    m = [[F0] * dim for _ in range(dim)]
    inv = sigma.inverse()
    for idx in range(dim):
        digits = _digits(idx, d, n)
        out = tuple(digits[inv(j)] for j in range(n))
        m[_index(out, d)][idx] = F1
    return m


DENSE_SIDE_CAP = 2**14


def dense_operator(op) -> list:
    """Dense matrix of an operator, slot-major cell ordering (exact)."""
    from . import exactla
    from .errors import ResourceCapError

    ordered = op.to_ordered() if isinstance(op, SymmetrizedOperator) else op
    dim = (op.d**op.copies) ** op.slots
    if dim > DENSE_SIDE_CAP:
        raise ResourceCapError(f"dense side {dim} exceeds {DENSE_SIDE_CAP}")
    total = exactla.zeros(dim, dim)
    for key, v in ordered.coeffs.items():
        mats = [dense_perm_matrix(p, op.d) for p in key]
        term = exactla.kron_all(mats)
        total = exactla.mat_add(total, term, scale=v)
    return total


def dense_ptrace_copy(matrix, copies: int, slots: int, d: int, traced_slots, copy: int):
    """Partial trace of a dense slot-major matrix over one copy of some slots."""
    from . import exactla

    traced = sorted(traced_slots)
    dims = [d] * (copies * slots)  # cell (slot s, copy c) at position s*copies + c
    traced_cells = [s * copies + copy for s in traced]
    keep = [i for i in range(len(dims)) if i not in traced_cells]
    dim_keep = d ** len(keep)
    out = exactla.zeros(dim_keep, dim_keep)
    dim_tr = d ** len(traced_cells)
    for kr in range(dim_keep):
        rk = _digits(kr, d, len(keep))
        for kc in range(dim_keep):
            ck = _digits(kc, d, len(keep))
            acc = F0
            for t in range(dim_tr):
                td = _digits(t, d, len(traced_cells))
                row = [0] * len(dims)
                col = [0] * len(dims)
                for pos, cell in enumerate(keep):
                    row[cell], col[cell] = rk[pos], ck[pos]
                for pos, cell in enumerate(traced_cells):
                    row[cell] = col[cell] = td[pos]
                acc += matrix[_index(tuple(row), d)][_index(tuple(col), d)]
            out[kr][kc] = acc
    return out


def _digits(idx: int, d: int, n: int) -> tuple[int, ...]:
    out = []
    for _ in range(n):
        out.append(idx % d)
        idx //= d
    return tuple(reversed(out))


def _index(digits, d: int) -> int:
    idx = 0
    for v in digits:
        idx = idx * d + v
    return idx
