import itertools
from fractions import Fraction
from math import factorial

import numpy as np
import pytest
from hypothesis import given, strategies as st

from qmarginal import symgroup as sg
from qmarginal.errors import InvalidInputError


def test_partition_enumeration_examples():
    assert [p.parts for p in sg.enumerate_partitions(4, 4)] == [(4,), (3, 1), (2, 2), (2, 1, 1), (1, 1, 1, 1)]
    assert [p.parts for p in sg.enumerate_partitions(4, 2)] == [(4,), (3, 1), (2, 2)]
    assert len(sg.enumerate_partitions(7, 6)) == 14  # all 15 partitions of 7 except 1^7


def brute_force_partitions(n, max_len):
    out = set()
    for cuts in itertools.product(range(n + 1), repeat=n):
        parts = tuple(sorted((c for c in cuts if c), reverse=True))
        if sum(parts) == n and len(parts) <= max_len:
            out.add(parts)
    return out


def test_partition_enumeration_bruteforce():
    for n in range(1, 7):
        for max_len in range(1, n + 1):
            got = [p.parts for p in sg.enumerate_partitions(n, max_len)]
            assert set(got) == brute_force_partitions(n, max_len)
            assert got == sorted(got, reverse=True)
            assert len(got) == len(set(got))


def test_partition_validation():
    with pytest.raises(InvalidInputError):
        sg.Partition((1, 2))
    with pytest.raises(InvalidInputError):
        sg.Partition((2, 0))


def count_syt(parts):
    """Brute-force count of standard fillings."""
    n = sum(parts)
    cells = [(r, c) for r, row in enumerate(parts) for c in range(row)]

    def grow(placed, nxt):
        if nxt == n:
            return 1
        total = 0
        for (r, c) in cells:
            if (r, c) in placed:
                continue
            if (r == 0 or (r - 1, c) in placed) and (c == 0 or (r, c - 1) in placed):
                total += grow(placed | {(r, c)}, nxt + 1)
        return total

    return grow(frozenset(), 0)


def test_dimension_examples():
    assert sg.irrep_dimension((2, 1)) == 2
    assert sg.irrep_dimension((5,)) == 1
    assert sg.irrep_dimension((4, 3)) == 14
    assert sg.irrep_dimension((4, 3)) == count_syt((4, 3))
    for parts in [(3, 1), (2, 2), (3, 2, 1), (2, 2, 1)]:
        assert sg.irrep_dimension(parts) == count_syt(parts)


def test_dimension_squares_sum_to_group_order():
    for n in range(1, 9):
        assert sum(sg.irrep_dimension(p) ** 2 for p in sg.enumerate_partitions(n, n)) == factorial(n)


def test_character_examples():
    assert sg.character((3,), (3,)) == 1
    assert sg.character((1, 1, 1), (2, 1)) == -1
    assert sg.character((2, 1), (3,)) == -1
    with pytest.raises(InvalidInputError):
        sg.character((2, 1), (2, 2))


def test_character_on_identity_is_dimension():
    for n in range(1, 8):
        for lam in sg.enumerate_partitions(n, n):
            assert sg.character(lam, (1,) * n) == sg.irrep_dimension(lam)


def test_character_orthogonality_s5():
    # first orthogonality relation distinguishes irreps
    classes = sg.conjugacy_classes(5)
    parts = sg.enumerate_partitions(5, 5)
    for a in parts:
        for b in parts:
            inner = sum(sg.class_size(c) * sg.character(a, c) * sg.character(b, c) for c in classes)
            assert inner == (factorial(5) if a == b else 0)


@given(st.integers(min_value=1, max_value=6), st.data())
def test_permutation_compose_inverse(n, data):
    images = data.draw(st.permutations(range(n)))
    p = sg.Permutation(tuple(images))
    assert p.compose(p.inverse()).is_identity()
    assert p.inverse().compose(p).is_identity()
    assert sorted(len(c) for c in p.cycles()) == sorted(p.cycle_type().parts)


@given(st.data())
def test_adjacent_factorization_reconstructs(data):
    n = data.draw(st.integers(min_value=1, max_value=6))
    images = data.draw(st.permutations(range(n)))
    p = sg.Permutation(tuple(images))
    out = sg.Permutation.identity(n)
    for k in p.adjacent_factorization():
        out = sg.Permutation.transposition(n, k, k + 1).compose(out)
    assert out == p


def _mat_mul_exact(a, b):
    d = len(a)
    return tuple(tuple(sum(a[i][k] * b[k][j] for k in range(d)) for j in range(d)) for i in range(d))


def test_seminormal_homomorphism_exact_s4():
    els = sg.group_elements(4)
    rng = np.random.default_rng(0)
    for lam in sg.enumerate_partitions(4, 4):
        for _ in range(30):
            a, b = els[rng.integers(24)], els[rng.integers(24)]
            ma = sg.irrep_matrix(lam, a).entries
            mb = sg.irrep_matrix(lam, b).entries
            assert _mat_mul_exact(ma, mb) == sg.irrep_matrix(lam, a.compose(b)).entries


def test_seminormal_identity_and_trace():
    for lam in sg.enumerate_partitions(4, 4):
        dim = sg.irrep_dimension(lam)
        ident = sg.irrep_matrix(lam, sg.Permutation.identity(4)).entries
        assert ident == tuple(tuple(Fraction(int(i == j)) for j in range(dim)) for i in range(dim))
        for s in sg.group_elements(4):
            tr = sum(sg.irrep_matrix(lam, s).entries[i][i] for i in range(dim))
            assert tr == sg.character(lam, s.cycle_type())


def test_orthogonal_form_s5():
    rng = np.random.default_rng(1)
    els = sg.group_elements(5)
    pairs = [(els[rng.integers(120)], els[rng.integers(120)]) for _ in range(100)]
    for lam in sg.enumerate_partitions(5, 5):
        for a, b in pairs[:20]:
            ma = sg.irrep_matrix(lam, a, "orthogonal").entries
            mb = sg.irrep_matrix(lam, b, "orthogonal").entries
            mab = sg.irrep_matrix(lam, a.compose(b), "orthogonal").entries
            assert np.max(np.abs(ma @ mb - mab)) < 1e-10
            assert np.max(np.abs(ma @ ma.T - np.eye(len(ma)))) < 1e-10


def test_gl_multiplicity_examples():
    assert sg.gl_multiplicity((2,), 2) == 3
    assert sg.gl_multiplicity((1, 1, 1), 2) == 0
    assert sg.gl_multiplicity((2, 1), 3) == 8


def test_gl_multiplicity_dimension_sum():
    for n in range(1, 7):
        for d in range(1, 5):
            total = sum(sg.gl_multiplicity(p, d) * sg.irrep_dimension(p) for p in sg.enumerate_partitions(n, n))
            assert total == d**n


def test_gl_multiplicity_dense_schur_weyl():
    # diagonalize the commutant dimension directly: multiplicity of lam in
    # the permutation action equals (1/N!) sum_sigma chi_lam(sigma) d^{cycles}
    for n, d in [(3, 3), (4, 2), (3, 2)]:
        for lam in sg.enumerate_partitions(n, n):
            acc = 0
            for sigma in sg.group_elements(n):
                acc += sg.character(lam, sigma.cycle_type()) * d ** sigma.n_cycles()
            assert acc % factorial(n) == 0
            assert acc // factorial(n) == sg.gl_multiplicity(lam, d)


def test_trivial_multiplicity_examples():
    assert sg.trivial_multiplicity([(3,), (3,), (3,)]) == 1
    assert sg.trivial_multiplicity([(2, 1), (2, 1)]) == 1
    with pytest.raises(InvalidInputError):
        sg.trivial_multiplicity([(2, 1), (2, 2)])


def test_trivial_multiplicity_bruteforce_s3():
    # direct average of the tensored representation matrices
    for tpl in itertools.combinations_with_replacement(sg.enumerate_partitions(3, 3), 2):
        acc = None
        for sigma in sg.group_elements(3):
            m = np.array([[1.0]])
            for lam in tpl:
                m = np.kron(m, sg.irrep_matrix(lam, sigma, "orthogonal").entries)
            acc = m if acc is None else acc + m
        acc /= 6
        rank = int(round(np.trace(acc)))
        assert rank == sg.trivial_multiplicity(tpl)


def test_block_projector_trivial_tuple():
    bp = sg.block_projector([(4,), (4,), (4,)], materialize=True)
    assert bp.rank == 1 and bp.matrix.shape == (1, 1) and abs(bp.matrix[0, 0] - 1) < 1e-14


def test_block_projector_twirl_vs_kernel():
    tpl = [(2, 1), (2, 1)]
    bt = sg.block_projector(tpl, method="twirl", materialize=True)
    bk = sg.block_projector(tpl, method="kernel", materialize=True)
    assert bt.rank == bk.rank == 1
    assert bt.matrix.shape == (4, 4)
    pt = bt.basis @ bt.basis.T
    pk = bk.basis @ bk.basis.T
    assert np.max(np.abs(pt - pk)) < 1e-10
    assert np.max(np.abs(bt.matrix - pt)) < 1e-10


def test_block_projector_idempotent_s4():
    for tpl in itertools.combinations_with_replacement(sg.enumerate_partitions(4, 4), 3):
        if sg.irrep_dimension(tpl[0]) * sg.irrep_dimension(tpl[1]) * sg.irrep_dimension(tpl[2]) > 64:
            continue
        bp = sg.block_projector(tpl, materialize=True)
        assert np.max(np.abs(bp.matrix @ bp.matrix - bp.matrix)) < 1e-12
        assert np.max(np.abs(bp.matrix - bp.matrix.T)) < 1e-12
        assert bp.rank == sg.trivial_multiplicity(tpl)


def test_block_projector_rank_grid():
    for n in range(2, 5):
        for r in range(1, 4):
            for tpl in itertools.combinations_with_replacement(sg.enumerate_partitions(n, n), r):
                bp = sg.block_projector(tpl)
                assert bp.rank == sg.trivial_multiplicity(tpl), tpl


def test_invariant_basis_exact_matches_float():
    vecs, weights = sg.invariant_basis_exact([(2, 1), (2, 1)])
    assert len(vecs) == 1
    v = np.array([float(x) for x in vecs[0]]) * np.sqrt(np.array([float(w) for w in weights]))
    v /= np.linalg.norm(v)
    bp = sg.block_projector([(2, 1), (2, 1)])
    overlap = abs(float(bp.basis[:, 0] @ v))
    assert abs(overlap - 1) < 1e-10


def test_resource_cap():
    from qmarginal.errors import ResourceCapError

    with pytest.raises(ResourceCapError):
        sg.block_projector([(3, 1, 1)] * 4, materialize=True, cap=10)
