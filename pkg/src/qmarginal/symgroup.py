"""Representation theory of the symmetric group S_N.

Provides partitions, characters (Murnaghan-Nakayama), irreducible
representation matrices in Young's seminormal form (exact rationals) and
Young's orthogonal form (floats), multiplicities of irreps inside the
natural action on (C^d)^{otimes N}, and projectors onto the subspace of
an irrep tensor product that transforms trivially under the diagonal
action.

Conventions, fixed here and asserted by the test suite:

* permutations act on {0..N-1} and compose as (sigma o tau)(x) = sigma(tau(x));
* partitions are weakly decreasing tuples, enumerated in descending
  lexicographic order;
* standard Young tableaux are ordered by last-letter order (position of
  the largest letter first, ties broken recursively).
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from math import factorial, prod

import numpy as np

from .errors import InternalConsistencyError, InvalidInputError, ResourceCapError

__all__ = [
    "Partition",
    "Permutation",
    "IrrepMatrix",
    "BlockProjector",
    "enumerate_partitions",
    "irrep_dimension",
    "character",
    "irrep_matrix",
    "gl_multiplicity",
    "trivial_multiplicity",
    "block_projector",
    "invariant_basis_exact",
    "conjugacy_classes",
    "class_size",
]

F0 = Fraction(0)
F1 = Fraction(1)


@dataclass(frozen=True, order=True)
class Partition:
    """Integer partition labeling an irreducible representation of S_N."""

    parts: tuple[int, ...]

    def __post_init__(self):
        parts = tuple(int(p) for p in self.parts)
        object.__setattr__(self, "parts", parts)
        if any(p <= 0 for p in parts):
            raise InvalidInputError(f"partition parts must be positive: {parts}")
        if any(parts[i] < parts[i + 1] for i in range(len(parts) - 1)):
            raise InvalidInputError(f"partition parts must be weakly decreasing: {parts}")

    @property
    def n(self) -> int:
        return sum(self.parts)

    def __len__(self) -> int:
        return len(self.parts)

    def __iter__(self):
        return iter(self.parts)

    def conjugate(self) -> "Partition":
        parts = self.parts
        return Partition(tuple(sum(1 for p in parts if p > j) for j in range(parts[0])) if parts else ())

    def hooks(self) -> list[list[int]]:
        parts = self.parts
        conj = self.conjugate().parts
        return [[parts[i] - j + conj[j] - i - 1 for j in range(parts[i])] for i in range(len(parts))]

    def __repr__(self) -> str:
        return f"Partition({self.parts})"


def _as_parts(lam) -> tuple[int, ...]:
    if isinstance(lam, Partition):
        return lam.parts
    return tuple(lam)


def enumerate_partitions(n: int, max_len: int) -> list[Partition]:
    """All partitions of n with at most max_len parts, descending lex order."""
    if n < 1 or max_len < 1:
        raise InvalidInputError("n and max_len must be positive")

    def gen(remaining, largest, slots):
        if remaining == 0:
            yield ()
            return
        if slots == 0:
            return
        for first in range(min(remaining, largest), 0, -1):
            for rest in gen(remaining - first, first, slots - 1):
                yield (first,) + rest

    return [Partition(p) for p in gen(n, n, max_len)]


@lru_cache(maxsize=None)
def _dimension(parts: tuple[int, ...]) -> int:
    if not parts:
        return 1
    n = sum(parts)
    hook_prod = prod(itertools.chain.from_iterable(Partition(parts).hooks()))
    return factorial(n) // hook_prod


def irrep_dimension(lam) -> int:
    """Dimension of the irrep labeled by lam, by the hook length formula."""
    return _dimension(_as_parts(lam))


@lru_cache(maxsize=None)
def _character(parts: tuple[int, ...], cycle_type: tuple[int, ...]) -> int:
    # Murnaghan-Nakayama recursion on first-column hook (beta) numbers.
    if not cycle_type:
        return 1 if not parts else 0
    t = cycle_type[0]
    rest = cycle_type[1:]
    k = len(parts)
    beta = [parts[i] + (k - 1 - i) for i in range(k)]
    beta_set = set(beta)
    total = 0
    for i, b in enumerate(beta):
        nb = b - t
        if nb < 0 or nb in beta_set:
            continue
        height = sum(1 for c in beta if nb < c < b)
        new_beta = sorted((beta[:i] + [nb] + beta[i + 1 :]), reverse=True)
        new_parts = tuple(nb2 - (k - 1 - j) for j, nb2 in enumerate(new_beta))
        new_parts = tuple(p for p in new_parts if p > 0)
        total += (-1) ** height * _character(new_parts, rest)
    return total


def character(lam, cycle_type) -> int:
    """Irreducible character chi_lam evaluated on a conjugacy class."""
    lp, cp = _as_parts(lam), _as_parts(cycle_type)
    if sum(lp) != sum(cp):
        raise InvalidInputError(f"partition {lp} and cycle type {cp} must partition the same N")
    return _character(lp, tuple(sorted(cp, reverse=True)))


def conjugacy_classes(n: int) -> list[Partition]:
    """Cycle types of S_n (all partitions of n)."""
    return enumerate_partitions(n, n)


def class_size(cycle_type) -> int:
    parts = _as_parts(cycle_type)
    n = sum(parts)
    z = 1
    for j in set(parts):
        m = parts.count(j)
        z *= j**m * factorial(m)
    return factorial(n) // z


def gl_multiplicity(lam, d: int) -> int:
    """Multiplicity of the irrep lam inside the permutation action on (C^d)^{otimes N}.

    Hook content formula; zero exactly when the partition is longer than d.
    """
    parts = _as_parts(lam)
    p = Partition(parts)
    hooks = p.hooks()
    out = F1
    for i in range(len(parts)):
        for j in range(parts[i]):
            out *= Fraction(d + j - i, hooks[i][j])
            if out == 0:
                return 0
    if out.denominator != 1:
        raise InternalConsistencyError(f"hook content gave non-integer for {parts}, d={d}")
    return int(out)


def trivial_multiplicity(lams) -> int:
    """Multiplicity of the trivial irrep in M_{lam_1} x ... x M_{lam_n}.

    Character inner product with the trivial character, summed over
    conjugacy classes weighted by class size.
    """
    parts = [_as_parts(l) for l in lams]
    if not parts:
        raise InvalidInputError("need at least one partition")
    n = sum(parts[0])
    if any(sum(p) != n for p in parts):
        raise InvalidInputError("all partitions must have the same weight")
    total = 0
    for cls in conjugacy_classes(n):
        total += class_size(cls) * prod(character(p, cls) for p in parts)
    q, r = divmod(total, factorial(n))
    if r:
        raise InternalConsistencyError("non-integer trivial multiplicity")
    return q


# ---------------------------------------------------------------------------
# permutations


@dataclass(frozen=True)
class Permutation:
    """A bijection of {0..N-1}, stored in one-line notation."""

    images: tuple[int, ...]

    def __post_init__(self):
        images = tuple(int(i) for i in self.images)
        object.__setattr__(self, "images", images)
        if sorted(images) != list(range(len(images))):
            raise InvalidInputError(f"not a permutation: {images}")

    @property
    def n(self) -> int:
        return len(self.images)

    def __call__(self, x: int) -> int:
        return self.images[x]

    def compose(self, other: "Permutation") -> "Permutation":
        """(self o other)(x) = self(other(x))."""
        return Permutation(tuple(self.images[other.images[x]] for x in range(self.n)))

    def __mul__(self, other):
        return self.compose(other)

    def inverse(self) -> "Permutation":
        inv = [0] * self.n
        for i, img in enumerate(self.images):
            inv[img] = i
        return Permutation(tuple(inv))

    def is_identity(self) -> bool:
        return all(i == img for i, img in enumerate(self.images))

    def cycles(self) -> list[tuple[int, ...]]:
        seen = [False] * self.n
        out = []
        for start in range(self.n):
            if seen[start]:
                continue
            cyc = [start]
            seen[start] = True
            x = self.images[start]
            while x != start:
                cyc.append(x)
                seen[x] = True
                x = self.images[x]
            out.append(tuple(cyc))
        return out

    def n_cycles(self) -> int:
        return len(self.cycles())

    def cycle_type(self) -> Partition:
        return Partition(tuple(sorted((len(c) for c in self.cycles()), reverse=True)))

    def fixes(self, x: int) -> bool:
        return self.images[x] == x

    def adjacent_factorization(self) -> list[int]:
        """Indices k such that self = s_{k_r} o ... o s_{k_1} with s_k = (k, k+1)."""
        w = list(self.images)
        ks = []
        while True:
            k = next((i for i in range(len(w) - 1) if w[i] > w[i + 1]), None)
            if k is None:
                break
            w[k], w[k + 1] = w[k + 1], w[k]
            ks.append(k)
        return ks

    @staticmethod
    def identity(n: int) -> "Permutation":
        return Permutation(tuple(range(n)))

    @staticmethod
    def transposition(n: int, a: int, b: int) -> "Permutation":
        images = list(range(n))
        images[a], images[b] = images[b], images[a]
        return Permutation(tuple(images))

    @staticmethod
    def full_cycle(n: int) -> "Permutation":
        """The cycle 0 -> 1 -> ... -> n-1 -> 0."""
        return Permutation(tuple((i + 1) % n for i in range(n)))

    @staticmethod
    def from_cycles(n: int, cycles) -> "Permutation":
        images = list(range(n))
        for cyc in cycles:
            for i, x in enumerate(cyc):
                images[x] = cyc[(i + 1) % len(cyc)]
        return Permutation(tuple(images))


@lru_cache(maxsize=None)
def group_elements(n: int) -> tuple[Permutation, ...]:
    """All of S_n in lexicographic one-line order (n <= 8 guarded)."""
    if n > 8:
        raise ResourceCapError(f"refusing to materialize S_{n}")
    return tuple(Permutation(p) for p in itertools.permutations(range(n)))


# ---------------------------------------------------------------------------
# Young's seminormal / orthogonal representations


def _standard_tableaux(parts: tuple[int, ...]) -> list[tuple[tuple[int, ...], ...]]:
    n = sum(parts)
    if n == 0:
        return [()]

    def corners(shape):
        return [i for i in range(len(shape)) if shape[i] > 0 and (i == len(shape) - 1 or shape[i] > shape[i + 1])]

    def build(shape, letter):
        if letter < 0:
            yield tuple(() for _ in parts)
            return
        for i in corners(shape):
            reduced = list(shape)
            reduced[i] -= 1
            for smaller in build(tuple(reduced), letter - 1):
                rows = list(smaller)
                rows[i] = rows[i] + (letter,)
                yield tuple(rows)

    tabs = [tuple(r for r in t if r) for t in build(parts, n - 1)]

    def last_letter_key(tab):
        pos = {}
        for r, row in enumerate(tab):
            for c, v in enumerate(row):
                pos[v] = r
        return tuple(pos[v] for v in range(n - 1, -1, -1))

    tabs.sort(key=last_letter_key)
    return tabs


class _Rep:
    """Cached seminormal representation data for one partition."""

    def __init__(self, parts: tuple[int, ...]):
        self.parts = parts
        self.n = sum(parts)
        self.tableaux = _standard_tableaux(parts)
        self.dim = len(self.tableaux)
        if self.dim != _dimension(parts):
            raise InternalConsistencyError(f"tableau count disagrees with hook formula for {parts}")
        self._pos = []
        for tab in self.tableaux:
            pos = {}
            for r, row in enumerate(tab):
                for c, v in enumerate(row):
                    pos[v] = (r, c)
            self._pos.append(pos)
        self._index = {tab: i for i, tab in enumerate(self.tableaux)}
        self.generators = [self._generator(k) for k in range(self.n - 1)]
        self.weights = self._orth_weights()
        self._semi_cache: dict[tuple[int, ...], tuple] = {}
        self._orth_cache: dict[tuple[int, ...], np.ndarray] = {}

    def _swap_letters(self, ti: int, k: int) -> int:
        tab = self.tableaux[ti]
        swapped = tuple(tuple(k + 1 if v == k else k if v == k + 1 else v for v in row) for row in tab)
        return self._index[swapped]

    def _generator(self, k: int):
        d = self.dim
        m = [[F0] * d for _ in range(d)]
        done = set()
        for ti in range(d):
            if ti in done:
                continue
            (r1, c1) = self._pos[ti][k]
            (r2, c2) = self._pos[ti][k + 1]
            if r1 == r2:
                m[ti][ti] = F1
                done.add(ti)
            elif c1 == c2:
                m[ti][ti] = -F1
                done.add(ti)
            else:
                tj = self._swap_letters(ti, k)
                lo, hi = (ti, tj) if ti < tj else (tj, ti)
                (ra, ca) = self._pos[lo][k]
                (rb, cb) = self._pos[lo][k + 1]
                axial = (cb - rb) - (ca - ra)
                rho = Fraction(1, axial)
                m[lo][lo] = rho
                m[hi][hi] = -rho
                m[hi][lo] = F1
                m[lo][hi] = 1 - rho * rho
                done.update((lo, hi))
        return tuple(tuple(row) for row in m)

    def _orth_weights(self) -> list[Fraction]:
        # ratio delta_hi/delta_lo = 1 - rho^2 along every swap edge; the
        # tableau graph is connected, so propagate from the first tableau.
        weights: list = [None] * self.dim
        weights[0] = F1
        queue = [0]
        while queue:
            ti = queue.pop()
            for k in range(self.n - 1):
                (r1, c1) = self._pos[ti][k]
                (r2, c2) = self._pos[ti][k + 1]
                if r1 == r2 or c1 == c2:
                    continue
                tj = self._swap_letters(ti, k)
                lo, hi = (ti, tj) if ti < tj else (tj, ti)
                (ra, ca) = self._pos[lo][k]
                (rb, cb) = self._pos[lo][k + 1]
                rho = Fraction(1, (cb - rb) - (ca - ra))
                ratio = 1 - rho * rho
                w_lo = weights[lo] if weights[lo] is not None else (weights[hi] / ratio if weights[hi] is not None else None)
                if w_lo is None:
                    continue
                for idx, val in ((lo, w_lo), (hi, w_lo * ratio)):
                    if weights[idx] is None:
                        weights[idx] = val
                        queue.append(idx)
                    elif weights[idx] != val:
                        raise InternalConsistencyError("inconsistent orthogonalization weights")
        if any(w is None for w in weights):
            raise InternalConsistencyError("tableau swap graph not connected")
        return weights

    def seminormal(self, perm: Permutation):
        key = perm.images
        cached = self._semi_cache.get(key)
        if cached is not None:
            return cached
        d = self.dim
        out = [[F1 if i == j else F0 for j in range(d)] for i in range(d)]
        for k in perm.adjacent_factorization():
            gen = self.generators[k]
            out = [[sum(gen[i][l] * out[l][j] for l in range(d) if out[l][j]) for j in range(d)] for i in range(d)]
        out = tuple(tuple(row) for row in out)
        if len(self._semi_cache) < 50000:
            self._semi_cache[key] = out
        return out

    def orthogonal(self, perm: Permutation) -> np.ndarray:
        key = perm.images
        cached = self._orth_cache.get(key)
        if cached is not None:
            return cached
        semi = self.seminormal(perm)
        sq = np.sqrt(np.array([float(w) for w in self.weights]))
        out = sq[:, None] * np.array([[float(x) for x in row] for row in semi]) / sq[None, :]
        if len(self._orth_cache) < 50000:
            self._orth_cache[key] = out
        return out


@lru_cache(maxsize=None)
def _rep(parts: tuple[int, ...]) -> _Rep:
    return _Rep(parts)


@dataclass(frozen=True)
class IrrepMatrix:
    """Representation matrix of one group element in a fixed irrep."""

    partition: Partition
    element: Permutation
    entries: object  # tuple-of-tuples of Fractions, or float ndarray
    form: str


def irrep_matrix(lam, perm: Permutation, form: str = "seminormal") -> IrrepMatrix:
    """Matrix of perm in the irrep lam.

    form="seminormal" gives exact rational entries; form="orthogonal"
    gives the real orthogonal version (floats).
    """
    parts = _as_parts(lam)
    if sum(parts) != perm.n:
        raise InvalidInputError("partition weight and permutation degree differ")
    rep = _rep(parts)
    if form == "seminormal":
        entries = rep.seminormal(perm)
    elif form == "orthogonal":
        entries = rep.orthogonal(perm)
    else:
        raise InvalidInputError(f"unknown form {form!r}")
    return IrrepMatrix(Partition(parts), perm, entries, form)


def orthogonalization_weights(lam) -> list[Fraction]:
    """Diagonal W with W^{1/2} S(sigma) W^{-1/2} orthogonal for all sigma."""
    return list(_rep(_as_parts(lam)).weights)


# ---------------------------------------------------------------------------
# projectors onto the diagonal-trivial component


@dataclass
class BlockProjector:
    """Projector onto the trivially-transforming subspace of an irrep tensor product."""

    partitions: tuple[Partition, ...]
    basis: np.ndarray
    rank: int
    matrix: np.ndarray | None = None

    @property
    def dim(self) -> int:
        return self.basis.shape[0]


def _twirl(mats_per_slot: list[list[np.ndarray]], vectors: np.ndarray, dims: list[int]) -> np.ndarray:
    """Average of (M_1(sigma) x ... x M_n(sigma)) @ vectors over the group."""
    nslots = len(dims)
    shape = tuple(dims) + (vectors.shape[1],)
    acc = np.zeros(shape)
    for si in range(len(mats_per_slot[0])):
        t = vectors.reshape(shape)
        for ax in range(nslots):
            t = np.moveaxis(np.tensordot(mats_per_slot[ax][si], t, axes=(1, ax)), 0, ax)
        acc += t
    acc /= len(mats_per_slot[0])
    return acc.reshape(vectors.shape)


def block_projector(
    lams,
    *,
    method: str = "twirl",
    materialize: bool = False,
    cap: int = 512,
    seed: int = 0,
    tol: float = 1e-8,
) -> BlockProjector:
    """Orthonormal basis (and optionally the dense matrix) of the subspace fixed
    by the diagonal group action on an irrep tensor product.

    Twirling seeded random vectors is tried first (up to 5 draws); the
    kernel of the two-generator expression is the deterministic fallback.
    """
    parts = tuple(Partition(_as_parts(l)) for l in lams)
    n = parts[0].n
    if any(p.n != n for p in parts):
        raise InvalidInputError("all partitions must have the same weight")
    dims = [irrep_dimension(p) for p in parts]
    total = prod(dims)
    k = trivial_multiplicity(parts)
    if materialize and total > cap:
        raise ResourceCapError(f"block dimension {total} exceeds cap {cap}")

    reps = [_rep(p.parts) for p in parts]
    basis = None
    if k == 0:
        basis = np.zeros((total, 0))
    elif method == "twirl":
        elements = group_elements(n)
        mats = [[rep.orthogonal(sigma) for sigma in elements] for rep in reps]
        rng = np.random.default_rng(seed)
        for _ in range(5):
            vecs = rng.standard_normal((total, k + 4))
            tw = _twirl(mats, vecs, dims)
            u, s, _ = np.linalg.svd(tw, full_matrices=False)
            rank = int(np.sum(s > tol * max(1.0, s[0])))
            if rank == k:
                basis = u[:, :k]
                break
        if basis is None:
            method = "kernel"
    if basis is None and method == "kernel":
        if total > 4096:
            raise ResourceCapError(f"kernel method needs {total}x{total} dense matrices")
        gen_s = Permutation.transposition(n, 0, 1)
        gen_c = Permutation.full_cycle(n)
        rows = []
        for g in (gen_s, gen_c):
            m = np.array([[1.0]])
            for rep in reps:
                m = np.kron(m, rep.orthogonal(g))
            rows.append(m - np.eye(total))
        stacked = np.vstack(rows)
        _, s, vt = np.linalg.svd(stacked)
        s = np.concatenate([s, np.zeros(total - len(s))])
        rank = int(np.sum(s <= tol))
        basis = vt[total - rank :].T if rank else np.zeros((total, 0))
    if basis is None:
        raise InvalidInputError(f"unknown method {method!r}")

    if basis.shape[1] != k:
        raise InternalConsistencyError(
            f"projector rank {basis.shape[1]} disagrees with character formula {k} for {parts}"
        )

    matrix = None
    if materialize:
        elements = group_elements(n)
        matrix = np.zeros((total, total))
        for sigma in elements:
            m = np.array([[1.0]])
            for rep in reps:
                m = np.kron(m, rep.orthogonal(sigma))
            matrix += m
        matrix /= len(elements)
    return BlockProjector(parts, basis, k, matrix)


def invariant_basis_exact(lams, cap: int = 512):
    """Exact rational basis of the diagonal-trivial subspace, seminormal picture.

    Returns (vectors, weights): vectors are Fraction lists spanning the
    kernel of S(sigma_s) x ... + S(sigma_c) x ... - 2, and weights is the
    diagonal of the tensor-product orthogonalization metric. A vector v
    in this picture corresponds to W^{1/2} v in the orthogonal picture.
    """
    from . import exactla

    parts = tuple(Partition(_as_parts(l)) for l in lams)
    n = parts[0].n
    dims = [irrep_dimension(p) for p in parts]
    total = prod(dims)
    if total > cap:
        raise ResourceCapError(f"block dimension {total} exceeds cap {cap}")
    reps = [_rep(p.parts) for p in parts]
    gen_s = Permutation.transposition(n, 0, 1)
    gen_c = Permutation.full_cycle(n)
    a = exactla.zeros(total, total)
    for g in (gen_s, gen_c):
        m = exactla.kron_all([[list(row) for row in rep.seminormal(g)] for rep in reps])
        a = exactla.mat_add(a, m)
    for i in range(total):
        a[i][i] -= 2
    vectors = exactla.nullspace(a, ncols=total)
    weights = [F1]
    for rep in reps:
        weights = [w * rw for w in weights for rw in rep.weights]
    k = trivial_multiplicity(parts)
    if len(vectors) != k:
        raise InternalConsistencyError("exact kernel dimension disagrees with character formula")
    return vectors, weights
