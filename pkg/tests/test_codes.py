from fractions import Fraction

import numpy as np
import pytest

from qmarginal import ame, codes as cd, hierarchy as hi
from qmarginal.errors import InvalidInputError

F = Fraction

P523 = cd.CodeParams(5, 2, 2, 2, pure=True)
P423 = cd.CodeParams(4, 2, 2, 2, pure=True)


def test_params_validation():
    with pytest.raises(InvalidInputError):
        cd.CodeParams(3, 1, 4, 2)
    with pytest.raises(InvalidInputError):
        cd.CodeParams(3, 0, 1, 2)
    assert cd.CodeParams(5, 2, 2, 2).distance == 3
    assert P523.label() == "((5,2,3))_2"


def test_singleton_examples():
    assert cd.singleton_check(P423) == "fail"
    assert cd.singleton_check(P523) == "pass"
    assert cd.singleton_check(cd.CodeParams(6, 1, 3, 2)) == "pass"
    # big integers stay exact
    assert cd.singleton_check(cd.CodeParams(40, 11**10, 10, 11)) == "pass"
    assert cd.singleton_check(cd.CodeParams(40, 11**20 + 1, 10, 11)) == "fail"


def test_purecode_marginal_spec():
    spec = cd.purecode_marginal_spec(P523)
    assert spec.uniform and spec.n == 6
    assert spec.dims == (2, 2, 2, 2, 2, 2)
    assert len(spec.marginals) == 10
    for subset in spec.marginals:
        assert 0 in subset and len(subset) == 3
    with pytest.raises(InvalidInputError):
        cd.purecode_marginal_spec(P423)
    # m = 0: only the auxiliary marginal remains
    spec0 = cd.purecode_marginal_spec(cd.CodeParams(2, 2, 0, 2, pure=True))
    assert list(spec0.marginals) == [frozenset({0})]
    # K = 1 reduces to the m-uniform spec on the qudits
    spec1 = cd.uniform_marginal_spec(4, 2, 2)
    assert len(spec1.marginals) == 6 and all(len(s) == 2 for s in spec1.marginals)


def test_five_qubit_code_state_verifies():
    state = cd.five_qubit_code_state()
    rep = cd.verify_code_state(state, P523, tol=1e-12)
    assert rep.ok and rep.max_deviation <= 1e-12


def test_product_state_fails_with_known_deviation():
    state = np.zeros(4)
    state[0] = 1.0
    rep = cd.verify_code_state(state, cd.CodeParams(2, 1, 1, 2, pure=True))
    assert not rep.ok
    assert abs(rep.max_deviation - 0.5) < 1e-12  # (d-1)/d for d = 2


def test_ghz_is_one_uniform():
    rep = cd.verify_code_state(cd.ghz_state(3, 2), cd.CodeParams(3, 1, 1, 2, pure=True), tol=1e-12)
    assert rep.ok
    rep = cd.verify_code_state(cd.ghz_state(3, 3), cd.CodeParams(3, 1, 1, 3, pure=True), tol=1e-12)
    assert rep.ok


def test_verify_rejects_unnormalized():
    with pytest.raises(InvalidInputError):
        cd.verify_code_state(np.ones(4), cd.CodeParams(2, 1, 1, 2, pure=True))


def test_traceless_basis():
    for k in (2, 3, 4):
        tb = cd.TracelessBasis(k)
        assert len(tb) == k * k - 1
        flat = []
        for e in tb.elements:
            assert abs(np.trace(e)) < 1e-14
            assert np.allclose(e, e.conj().T)
            flat.append(e.reshape(-1))
        assert np.linalg.matrix_rank(np.array(flat)) == k * k - 1


def test_traceless_family_count_in_meta():
    bs = cd.generalcode_constraints(cd.CodeParams(5, 3, 2, 2), "ppt")
    assert bs.meta["traceless_families_per_subset"] == 8


def test_k1_purecode_equals_ame_system():
    params = cd.CodeParams(4, 1, 2, 2, pure=True)
    bs = cd.purecode_two_party_constraints(params, "pos")
    verdict = hi.solve_primal(bs)
    assert verdict.exact and verdict.nullity == 0
    assert verdict.x == list(ame.candidate_x(4, 2))
    assert verdict.status == "infeasible"

    params = cd.CodeParams(5, 1, 2, 2, pure=True)
    verdict = hi.solve_primal(cd.purecode_two_party_constraints(params, "ppt"))
    assert verdict.exact and verdict.nullity == 0
    assert verdict.x == list(ame.candidate_x(5, 2))
    assert verdict.status == "feasible"


def test_code_check_singleton_rejection():
    rep = cd.code_check(P423, "ppt")
    assert rep.verdict == "infeasible" and rep.level == "singleton"
    with pytest.raises(InvalidInputError):
        cd.purecode_two_party_constraints(P423)


def test_523_feasible_at_pos_and_ppt():
    for level in ("pos", "ppt"):
        rep = cd.code_check(P523, level)
        assert rep.verdict == "feasible" and rep.exact, level


def test_general_code_underdetermined():
    bs = cd.generalcode_constraints(cd.CodeParams(5, 2, 2, 2), "ppt")
    verdict = hi.solve_primal(bs)
    assert verdict.nullity > 0
    assert verdict.status == "feasible"


def test_impure_k1_codes_always_pass():
    rep = cd.code_check(cd.CodeParams(3, 1, 1, 2), "ppt")
    assert rep.verdict == "feasible"


def test_extension_level_k1():
    rep = cd.code_check(cd.CodeParams(3, 1, 1, 2, pure=True), "extension", copies=3)
    assert rep.verdict == "feasible"


def test_extension_level_k2_small():
    rep = cd.code_check(cd.CodeParams(2, 2, 0, 2, pure=True), "extension", copies=3)
    assert rep.verdict == "feasible"


def test_extension_singleton_still_rejected():
    rep = cd.code_check(P423, "extension", copies=3)
    assert rep.verdict == "infeasible" and rep.level == "singleton"


def test_code_report_serialization():
    rep = cd.code_check(P523, "ppt")
    d = rep.to_dict()
    assert d["params"] == "((5,2,3))_2" and d["verdict"] == "feasible"
    assert set(d) >= {"level", "exact", "nullity", "reason"}


def _exact_five_qubit_pair():
    """|Q> (x) |Q> with exact rational entries (the aux-ordering of the fixture)."""
    import itertools as it

    # stabilizer projector applied to |00000>, exact
    def pauli_vec_action(label, vec):
        out = [F(0)] * 32
        for idx, amp in enumerate(vec):
            if not amp:
                continue
            bits = [(idx >> (4 - q)) & 1 for q in range(5)]
            phase = F(1)
            for q, ch in enumerate(label):
                if ch == "Z" and bits[q]:
                    phase = -phase
                elif ch == "X":
                    bits[q] ^= 1
            j = 0
            for b in bits:
                j = (j << 1) | b
            out[j] += phase * amp
        return out

    base = "XZZXI"
    vec = [F(0)] * 32
    vec[0] = F(1)
    for k in range(4):
        g = base[-k:] + base[:-k] if k else base
        gv = pauli_vec_action(g, vec)
        vec = [(a + b) / 2 for a, b in zip(vec, gv)]
    norm2 = sum(v * v for v in vec)
    assert norm2 == F(1, 16)
    logical0 = [4 * v for v in vec]
    logical1 = pauli_vec_action("XXXXX", logical0)
    q_unnorm = logical0 + logical1  # aux index major: |0>|0_L> + |1>|1_L>, norm^2 = 2
    pair = [[a * b for b in q_unnorm] for a in q_unnorm]  # |QQ><QQ| entries times 2
    return q_unnorm, pair


def _swap_overlap(q_unnorm, aux_swap, subset):
    """<QQ| (V_aux^e (x) V_subset) |QQ> / <QQ|QQ> exactly."""
    n_cells = 6  # aux + 5 qubits per party
    dim = 64
    total = F(0)
    for a_idx in range(dim):
        amp_a = q_unnorm[a_idx]
        if not amp_a:
            continue
        for b_idx in range(dim):
            amp_b = q_unnorm[b_idx]
            if not amp_b:
                continue
            a_cells = [(a_idx >> (5 - c)) & 1 for c in range(6)]
            b_cells = [(b_idx >> (5 - c)) & 1 for c in range(6)]
            new_a, new_b = list(a_cells), list(b_cells)
            if aux_swap:
                new_a[0], new_b[0] = b_cells[0], a_cells[0]
            for s in subset:
                new_a[s + 1], new_b[s + 1] = b_cells[s + 1], a_cells[s + 1]
            ia = 0
            for bit in new_a:
                ia = (ia << 1) | bit
            ib = 0
            for bit in new_b:
                ib = (ib << 1) | bit
            total += amp_a * amp_b * q_unnorm[ia] * q_unnorm[ib]
    return total / 4  # <Q|Q>^2 = 4 for the unnormalized vector


def test_five_qubit_pair_satisfies_assembled_system():
    """The honest ((5,2,3))_2 code state solves the symmetrized two-party
    system: its invariant-algebra projection satisfies every equality row
    and every positivity/PPT sector."""
    import itertools as it

    q_unnorm, _ = _exact_five_qubit_pair()
    n, K, d = 5, 2, 2
    # elementary overlaps, grouped by swap-pattern size and aux sector
    sums = {}
    for aux in (0, 1):
        for size in range(n + 1):
            acc = F(0)
            for subset in it.combinations(range(n), size):
                acc += _swap_overlap(q_unnorm, aux, subset)
            sums[(aux, size)] = acc
    # x_i, y_i from the dual pairing: a = K^2 x + K y, b = K x + K^2 y
    from qmarginal import permalg as pa

    xs, ys = [], []
    for i in range(n + 1):
        dual = pa.dual_basis_element(i, n, d)
        a = F(0)
        b = F(0)
        for key, beta in dual.coeffs.items():
            l = sum(1 for p in key if not p.is_identity())
            a += beta * sums[(0, l)]
            b += beta * sums[(1, l)]
        det = F(K**4 - K**2)
        xs.append((K * K * a - K * b) / det)
        ys.append((K * K * b - K * a) / det)
    assert ys == xs[::-1]  # swap-invariance of the support

    bs = cd.purecode_two_party_constraints(P523, "ppt")
    values = {("x", i): xs[i] for i in range(n + 1)}
    values.update({("y", i): ys[i] for i in range(n + 1)})
    vec = [values[k] for k in bs.keys]
    for row in bs.rows:
        total = sum(coeff * (F(1) if v == hi.CONST else vec[v]) for v, coeff in row.items())
        assert total == 0, row
    for blk in bs.blocks:
        assert blk.z_at(vec)[0][0] >= 0, blk.partitions
