import json
from fractions import Fraction

import numpy as np
import pytest

from qmarginal import ame, exactla, permalg as pa
from qmarginal.errors import InvalidInputError, ResourceCapError
from qmarginal.solve import psd_check_exact


def test_candidate_x_two_party_closed_form():
    # n=2: x_2 = 1/(d^2(d^2-1)), x_0 = x_2, x_1 = -x_2/d
    for d in range(2, 6):
        x = ame.candidate_x(2, d)
        x2 = Fraction(1, d * d * (d * d - 1))
        assert x == [x2, -x2 / d, x2]


def test_candidate_x_equals_oracle_full_grid():
    for n in range(2, 11):
        for d in range(2, 11):
            assert ame.candidate_x(n, d) == ame.candidate_x_oracle(n, d)


def test_candidate_invariants():
    for n, d in [(2, 2), (3, 2), (4, 2), (4, 6), (5, 3), (7, 2)]:
        x = ame.candidate_x(n, d)
        assert x == x[::-1]  # palindrome
        from math import comb

        assert sum(comb(n, i) * d ** (2 * n - i) * x[i] for i in range(n + 1)) == 1
        assert ame.candidate(n, d).operator().op_trace() == 1


def test_eigenvalues_fixtures_qubits4():
    assert ame.eigenvalues_p(4, 2) == [Fraction(5, 864), 0, Fraction(1, 96), 0, Fraction(-1, 32)]


def test_eigenvalues_fixtures_46():
    p = ame.eigenvalues_p(4, 6)
    q = ame.eigenvalues_q(4, 6)
    base = 2 * 6**4
    assert p == [Fraction(1, base * 343), 0, Fraction(1, base * 315), 0, Fraction(1, base * 375)]
    assert q == [Fraction(1, 1296), 0, 0, Fraction(1, 1296 * 35**2), Fraction(33, 1296 * 35**3)]


def test_eigenvalues_fixtures_72():
    p = ame.eigenvalues_p(7, 2)
    q = ame.eigenvalues_q(7, 2)
    assert p == [
        Fraction(113, 1119744), 0, Fraction(17, 124416), 0,
        Fraction(1, 13824), 0, Fraction(1, 1536), 0,
    ]
    assert q == [
        Fraction(1, 128), 0, 0, 0,
        Fraction(1, 10368), Fraction(1, 15552), Fraction(1, 23328), Fraction(11, 139968),
    ]
    assert all(v >= 0 for v in p) and all(v >= 0 for v in q)


def test_eigenvalue_transforms_match_closed_forms():
    for n, d in [(2, 2), (3, 3), (4, 2), (4, 6), (5, 2), (6, 3), (7, 2)]:
        x = ame.candidate_x(n, d)
        assert ame.eigenvalues_from_x(x, n, d) == ame.eigenvalues_p(n, d)
        assert ame.ppt_eigenvalues_from_x(x, n, d) == ame.eigenvalues_q(n, d)


def test_marginal_pairing_identity():
    for n, d in [(3, 2), (4, 2), (4, 6), (5, 3)]:
        op = ame.candidate(n, d).operator()
        for i in range(n + 1):
            want = Fraction(ame.binom(n, i), min(d**i, d ** (n - i)))
            assert op.pairing(pa.xi_element(i, n, d)) == want


def test_symmetry_pairing_identity():
    op = ame.candidate(5, 2).operator()
    for i in range(6):
        assert op.pairing(pa.xi_element(i, 5, 2)) == op.pairing(pa.xi_element(5 - i, 5, 2))


def test_candidate_marginal_is_maximally_mixed():
    cand = ame.candidate(4, 2)
    marg = cand.operator().marginal_of([0, 1], 0)
    assert all(all(p.is_identity() for p in key) for key in marg.coeffs)
    assert marg.trace() == 1


def test_ppt_trivial_half():
    for n in range(2, 13):
        for d in range(2, 10):
            q = ame.eigenvalues_q(n, d)
            for i in range(n // 2 + 1):
                assert q[i] >= 0, (n, d, i)


def test_check_existence_examples():
    rep = ame.check_existence(4, 2)
    assert rep.verdict == "infeasible"
    assert rep.violated_condition == "positivity(4)"
    assert rep.witness_value == Fraction(-1, 32)
    assert ame.check_existence(7, 2).verdict == "inconclusive"
    for d in range(2, 6):
        assert ame.check_existence(2, d).verdict == "inconclusive"
        assert ame.check_existence(3, d).verdict == "inconclusive"


def test_check_existence_never_says_exists():
    for n in range(2, 9):
        for d in (2, 3):
            assert ame.check_existence(n, d).verdict in ("infeasible", "inconclusive")


def test_validation():
    with pytest.raises(InvalidInputError):
        ame.check_existence(1, 2)
    with pytest.raises(InvalidInputError):
        ame.candidate_x(4, 1)


def test_dense_candidate_psd_and_trace():
    m = ame.dense_candidate(2, 2)
    assert sum(m[i][i] for i in range(len(m))) == 1
    assert psd_check_exact(m).psd


def test_dense_candidate_spectra():
    for n, d in [(2, 2), (2, 3), (3, 2)]:
        m = exactla.to_float(ame.dense_candidate(n, d))
        evs = np.sort(np.linalg.eigvalsh(m))
        expected = []
        for val, mult in ame.expected_dense_spectrum(n, d):
            expected.extend([float(val)] * mult)
        assert len(evs) == len(expected)
        assert np.allclose(evs, np.sort(np.array(expected)), atol=1e-12)


def test_dense_candidate_negative_eigenvalue_42():
    m = ame.dense_candidate(4, 2)
    evs = np.linalg.eigvalsh(exactla.to_float(m))
    assert abs(evs.min() - (-1 / 32)) < 1e-12
    # exact witness on the fully antisymmetric pattern
    cell = [Fraction(0), Fraction(1), Fraction(-1), Fraction(0)]
    vec = [Fraction(1)]
    for _ in range(4):
        vec = [a * b for a in vec for b in cell]
    val = exactla.quadratic_form(m, vec)
    norm4 = sum(v * v for v in vec)
    assert val == Fraction(-1, 32) * norm4
    # restriction to the support of that vector is not PSD, with a rational witness
    support = [i for i, v in enumerate(vec) if v]
    sub = [[m[i][j] for j in support] for i in support]
    res = psd_check_exact(sub)
    assert not res.psd
    assert exactla.quadratic_form(sub, res.witness) < 0


def test_dense_candidate_cap():
    with pytest.raises(ResourceCapError):
        ame.dense_candidate(4, 6)


def test_scan_grid_and_serialization():
    reports = ame.scan(range(4, 13), [2])
    verdicts = {r.n: r.verdict for r in reports}
    assert verdicts == {
        4: "infeasible", 5: "inconclusive", 6: "inconclusive", 7: "inconclusive",
        8: "infeasible", 9: "infeasible", 10: "infeasible", 11: "infeasible", 12: "infeasible",
    }
    reports2 = ame.scan([4], range(2, 8))
    assert [r.verdict for r in reports2] == ["infeasible"] + ["inconclusive"] * 5
    assert ame.scan([], []) == []

    text = ame.reports_to_tsv(reports2)
    lines = text.strip().split("\n")
    assert lines[0] == "\t".join(ame.TSV_COLUMNS)
    assert len(lines) == 7
    data = json.loads(ame.reports_to_json(reports2))
    assert data[0]["witness_value"] == "-1/32"
    assert data[0]["witness_value_float"] == -0.03125


def test_scan_parallel_matches_serial():
    serial = ame.scan(range(4, 7), (2, 3))
    parallel = ame.scan(range(4, 7), (2, 3), jobs=2)
    assert [r.to_dict() for r in serial] == [r.to_dict() for r in parallel]


def _pair_state_overlaps(psi, n, d):
    """<psi x psi| V_U |psi x psi> for every swap subset U, exact.

    psi is a rational vector on (C^d)^n; the two-party extension of the
    projector onto psi is paired with each elementary swap pattern.
    """
    dim = d**n
    outer = [[a * b for b in psi] for a in psi]  # psi psi^T, rank one, rational
    overlaps = {}
    import itertools as it

    for size in range(n + 1):
        total = {}
        for subset in it.combinations(range(n), size):
            acc = Fraction(0)
            for row in range(dim):
                rd = pa._digits(row, d, n)
                for col in range(dim):
                    cdg = pa._digits(col, d, n)
                    # V_U maps |a>|b> -> |a'>|b'> swapping cells in U
                    ad = tuple(cdg[i] if i in subset else rd[i] for i in range(n))
                    bd = tuple(rd[i] if i in subset else cdg[i] for i in range(n))
                    acc += outer[row][pa._index(ad, d)] * outer[col][pa._index(bd, d)]
            total[subset] = acc
        overlaps[size] = total
    return overlaps


def _project_to_candidate(psi, n, d):
    """Coefficients of the symmetrized two-party extension of |psi><psi|."""
    overlaps = _pair_state_overlaps(psi, n, d)
    sums = [sum(overlaps[l].values(), start=Fraction(0)) for l in range(n + 1)]
    xs = []
    for i in range(n + 1):
        dual = pa.dual_basis_element(i, n, d)
        acc = Fraction(0)
        for key, beta in dual.coeffs.items():
            l = sum(1 for p in key if not p.is_identity())
            acc += beta * sums[l]
        xs.append(acc)
    return xs


def test_golden_states_reproduce_candidate():
    """The symmetrized extension of an actual maximally entangled state
    equals the closed-form candidate, coefficient by coefficient."""
    # Bell pairs, any d: psi = sum_k |kk>/sqrt(d); work with the rank-one
    # projector so everything stays rational
    for d in (2, 3):
        dim = d * d
        psi = [Fraction(0)] * dim
        for k in range(d):
            psi[k * d + k] = Fraction(1)
        # normalize the projector, not the vector: scale overlaps by 1/d^2
        xs = _project_to_candidate(psi, 2, d)
        norm = Fraction(d) ** 2  # <psi|psi>^2 for the unnormalized vector
        assert [v / norm for v in xs] == ame.candidate_x(2, d)
    # GHZ on three qubits
    psi = [Fraction(0)] * 8
    psi[0] = psi[7] = Fraction(1)
    xs = _project_to_candidate(psi, 3, 2)
    norm = Fraction(4)  # (<psi|psi>)^2 = 4
    assert [v / norm for v in xs] == ame.candidate_x(3, 2)


def test_golden_state_marginal_overlaps():
    # the defining overlap values hold for the honest state, not just the
    # symmetrized candidate: Tr(X_i Phi) = binom(n,i)/min(d^i, d^{n-i})
    psi = [Fraction(0)] * 8
    psi[0] = psi[7] = Fraction(1)
    overlaps = _pair_state_overlaps(psi, 3, 2)
    for i in range(4):
        total = sum(overlaps[i].values(), start=Fraction(0))
        assert total / 4 == Fraction(ame.binom(3, i), min(2**i, 2 ** (3 - i)))
