from fractions import Fraction

import pytest

from primspf.boolmat import BinaryMatrix, BinaryVector, MatrixSet
from primspf.errors import CapExceededError
from primspf.families import cerny_nz, builtin_example, perturbed_permutation
from primspf.semigroup import HtMatrix, first_dominating_time
from primspf.spf import (
    build_subset_multigraph,
    check_pt_containment,
    check_stagnation_theorems,
    game_value,
    layer_at,
    optimal_basis_set,
    solve_layer,
    spf_k,
    spf_kbar,
    spf_keq,
    stagnations,
)

F = Fraction


@pytest.mark.parametrize("name", ["ex1.1", "ex3.1", "M1", "ex3.2", "ex3.3"])
def test_k_series_basics(name):
    M = builtin_example(name)
    K = spf_k(M)
    n = M.n
    assert K[0] == F(1, n)
    assert all(a <= b for a, b in zip(K.values, K.values[1:]))
    assert K.values[-1] == 1 and not K.truncated
    assert stagnations(K).l0 <= n - 1


def test_known_series_prefix():
    K = spf_k(builtin_example("ex1.1"))
    assert K.values[:5] == (F(1, 3), F(1, 3), F(1, 3), F(5, 9), F(17, 27))
    assert K.first_one() == 8


def test_kbar_closed_form_values():
    M = builtin_example("ex3.3")
    Kb = spf_kbar(M, 10)
    K = spf_k(M, 10)
    assert Kb[0] == F(1, 4)
    assert all(kb >= k for kb, k in zip(Kb.values, K.values))
    assert all((v * 4).denominator == 1 for v in Kb.values)


def test_kbar_reaches_one_before_exponent():
    for name, exp in (("M1", 9), ("M2", 13)):
        assert spf_kbar(builtin_example(name)).first_one() <= exp


def test_keq_equals_k_with_permutation_dominating_matrix():
    M = builtin_example("ex1.1")
    assert first_dominating_time(M, 3) == 1
    assert spf_keq(M, 10).values == spf_k(M, 10).values


def test_keq_differs_without_permutation_dominance():
    M = builtin_example("ex3.2")
    assert spf_keq(M, 8).values != spf_k(M, 8).values


def test_keq_sandwich():
    M = builtin_example("ex3.2")
    K, E = spf_k(M, 12), spf_keq(M, 12)
    s = first_dominating_time(M, 12)
    for t in range(s + 1, 13):
        assert K[t] >= E[t] >= K[t - s]


def test_truncation_on_layer_cap():
    K = spf_k(builtin_example("M2"), cap=30)
    assert K.truncated and K.first_one() is None
    assert "cap" in K.reason


def test_non_primitive_closes():
    M = MatrixSet.of([BinaryMatrix.from_map([1, 2, 0]), BinaryMatrix.from_map([0, 2, 1])])
    K = spf_k(M)
    assert not K.truncated and K.reason == "semigroup closed"
    assert set(K.values) == {F(1, 3)}
    assert check_stagnation_theorems(M, spf_kbar(M), primitive=False) == []


def test_stagnations_synthetic():
    r = stagnations([F(1, 3), F(1, 2), F(2, 3), 1])
    assert r.intervals == () and r.l0 == 0
    r = stagnations([F(1, 4)] * 4 + [F(1, 2)])
    assert r.intervals == ((0, 3),) and r.l0 == 3 and not r.open_end
    r = stagnations([F(1, 4), F(1, 2), F(1, 2), F(1, 2)])
    assert r.intervals == ((1, 2),) and r.open_end


def test_initial_stagnation_of_slow_start_set():
    assert stagnations(spf_k(builtin_example("ex3.3"))).l0 == 3


def test_optimal_basis_set():
    assert optimal_basis_set(HtMatrix.from_rows([[1, 2], [3, 2], [3, 1]])).indices == {0}
    same = optimal_basis_set(HtMatrix.from_rows([[1, 2]] * 3))
    assert len(same) == 3 and same.value == F(2, 3)
    assert len(optimal_basis_set(HtMatrix.from_columns([[1, 1, 1, 1]]))) == 4


def test_stagnation_bounds_on_examples():
    for name in ("ex1.1", "ex3.1", "M1", "M2", "ex3.2", "ex3.3"):
        M = builtin_example(name)
        checks = check_stagnation_theorems(M)
        assert checks and all(c.holds for c in checks), name


def test_pt_containment_small_pair():
    M = builtin_example("ex1.1")
    K = spf_k(M)
    points = [t for t in range(len(K) - 1) if K[t] == K[t + 1]]
    assert points
    assert all(check_pt_containment(M, t) for t in points)
    with pytest.raises(ValueError):
        check_pt_containment(M, 3)


def test_pt_containment_random():
    tried = 0
    for seed in range(30):
        M = perturbed_permutation(4, 2, seed)
        K = spf_k(M, 12)
        if K.first_one() is None:
            continue
        for t in range(len(K) - 1):
            if K[t] == K[t + 1] < 1:
                tried += 1
                assert check_pt_containment(M, t)
    assert tried > 0


def test_subset_multigraph_4x4_pair():
    M = builtin_example("ex3.1")
    G = build_subset_multigraph(M)
    assert len(G.vertices) == 15
    assert all(G.out_degree(v) == 2 for v in G.vertices)
    e1 = BinaryVector.basis(4, 0)
    assert G.successor(e1, 0) == BinaryVector.basis(4, 3)
    e = BinaryVector.ones(4)
    assert G.successor(e, 0) == e and G.successor(e, 1) == e


def test_subset_multigraph_edge_cases():
    G = build_subset_multigraph(MatrixSet.of([BinaryMatrix.identity(1)]))
    assert list(G.vertices) == [1] and G.edges[(1, 0)] == 1
    P = MatrixSet.of([BinaryMatrix.from_map([1, 2, 0])])
    G = build_subset_multigraph(P)
    basis = {1, 2, 4}
    assert {G.edges[(v, 0)] for v in basis} == basis
    with pytest.raises(CapExceededError):
        build_subset_multigraph(cerny_nz(5), cap=4)


def test_game_value():
    M = builtin_example("ex1.1")
    layer = layer_at(M, 4)
    sol = solve_layer(layer)
    assert game_value(sol.p_opt, sol.q_opt, layer) == sol.value
    full = layer_at(M, 8)
    ones = [int(P.is_all_ones()) for P in full.products]
    assert game_value([1, 0, 0], ones, full) == 1
    A = layer.products[1]
    q = [0] * len(layer)
    q[1] = 1
    assert game_value([0, 1, 0], q, layer) == F(A.rows[1].bit_count(), 3)
    with pytest.raises(ValueError):
        game_value([1, 0], q, layer)
