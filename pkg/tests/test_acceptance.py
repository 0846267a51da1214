"""Acceptance criteria 1-13.

Each ``criterion_N`` returns ``(passed, detail)``.  Under pytest every
criterion is its own test and a summary line per criterion is printed at
the end of the session; ``python tests/test_acceptance.py`` prints the
same lines directly.
"""

import random
import sys
import time
from fractions import Fraction
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from corpus import primitive_corpus  # noqa: E402
from primspf.automata import (  # noqa: E402
    aut_of,
    eppstein,
    exponent_bfs,
    reset_threshold_exact,
    sg_diameter,
)
from primspf.approx import r1_estimate, r2_estimate  # noqa: E402
from primspf.families import cerny_nz, builtin_example  # noqa: E402
from primspf.lp import reduce_columns, solve_dual, solve_primal  # noqa: E402
from primspf.semigroup import build_ht, first_dominating_time, iter_layers, prune_ht_columns  # noqa: E402
from primspf.spf import (  # noqa: E402
    check_stagnation_theorems,
    game_value,
    layer_at,
    solve_layer,
    spf_k,
    spf_kbar,
    spf_keq,
    stagnations,
)

RESULTS: dict[int, tuple[bool, str]] = {}


def criterion_1():
    got = {}
    for name, want in (("M1", 9), ("M2", 13)):
        M = builtin_example(name)
        got[name] = (exponent_bfs(M).exp, spf_k(M).first_one())
    ok = got == {"M1": (9, 9), "M2": (13, 13)}
    return ok, f"(bfs, K=1 at) M1={got['M1']} M2={got['M2']}"


def criterion_2():
    M = builtin_example("ex1.1")
    rt = reset_threshold_exact(aut_of(M)).rt
    rt_t = reset_threshold_exact(aut_of(M.transpose())).rt
    exp = exponent_bfs(M).exp
    ok = rt == 4 and rt_t == 2 and exp in (7, 8) and rt <= exp <= rt + rt_t + M.n - 1
    return ok, f"rt={rt} rt_T={rt_t} exp={exp} (sandwich {rt}..{rt + rt_t + M.n - 1})"


def criterion_3():
    M = builtin_example("ex3.2")
    s = first_dominating_time(M, 10)
    exp = exponent_bfs(M).exp
    horizon = 12
    K = spf_k(M, horizon)
    E = spf_keq(M, horizon)
    keq_one = E.first_one()
    shifted_one = next((t for t in range(horizon - s + 1) if E[t + s] == 1), None)
    sandwich = all(K[t] >= E[t] >= K[t - s] for t in range(s + 1, horizon + 1))
    ok = s == 3 and exp == 6 and keq_one == 7 and shifted_one == 4 and sandwich
    return ok, (f"s={s} exp={exp} min K=(t)=1 at {keq_one} (want 7), "
                f"min K=(t+s)=1 at {shifted_one} (want 4), sandwich={sandwich}")


def criterion_4():
    M = builtin_example("ex3.3")
    K = spf_k(M)
    l0 = stagnations(K).l0
    r1 = r1_estimate(K, 3, 8).estimate
    r2 = r2_estimate(K, 3, 8).estimate
    ok = l0 == 3 and K.first_one() == 19 and 16 < r1 < 17 and 16 < r2 < 17
    return ok, f"l0={l0} exp={K.first_one()} r1={float(r1):.4f} r2={float(r2):.4f}"


def criterion_5():
    bad = []
    for n in range(4, 9):
        M = cerny_nz(n)
        rt = reset_threshold_exact(aut_of(M)).rt
        if rt != (n - 1) ** 2:
            bad.append(f"rt(n={n})={rt}")
        if n <= 6:
            exp = exponent_bfs(M).exp
            rt_t = reset_threshold_exact(aut_of(M.transpose())).rt
            if not rt <= exp <= rt + rt_t + n - 1:
                bad.append(f"sandwich(n={n}): {rt} <= {exp} <= {rt + rt_t + n - 1}")
    return not bad, "rt=(n-1)^2 for n=4..8, sandwich n<=6" if not bad else "; ".join(bad)


def criterion_6():
    bad, count = [], 0
    for n, seed, M, exp in primitive_corpus():
        for layer in iter_layers(M, exp, prune=False):
            H = build_ht(layer)
            a, b = solve_primal(H).value, solve_dual(H).value
            count += 1
            if a != b:
                bad.append((n, seed, layer.t, a, b))
    return not bad, f"{len(primitive_corpus())} sets, {count} programs, mismatches={bad[:3]}"


def _corpus_series():
    return [(n, seed, M, exp, spf_k(M, exp)) for n, seed, M, exp in primitive_corpus()]


def criterion_7():
    bad = []
    for n, seed, M, exp, K in _corpus_series():
        low, high = Fraction(n + 1, n * n), Fraction(n * n - 1, n * n)
        Kn = spf_k(M, n)[n] if n > exp else K[n]
        if K[0] != Fraction(1, n):
            bad.append((n, seed, "K(0)"))
        if not Kn > Fraction(1, n):
            bad.append((n, seed, "K(n)"))
        for t, v in K.items():
            if v > Fraction(1, n) and v < low:
                bad.append((n, seed, t, "gap above 1/n"))
            if v < 1 and v > high:
                bad.append((n, seed, t, "gap below 1"))
    return not bad, f"violations={bad[:5]}"


def criterion_8():
    bad = []
    for n, seed, M, exp, K in _corpus_series():
        Kb = spf_kbar(M)
        for t in range(len(K)):
            kb = Kb.value_at(t)
            if kb < K[t]:
                bad.append((n, seed, t, "Kbar<K"))
            if (kb * n).denominator != 1:
                bad.append((n, seed, t, "Kbar not j/n"))
        bad += [(n, seed, c.t, c.rule) for c in check_stagnation_theorems(M, Kb) if not c.holds]
    return not bad, f"violations={bad[:5]}"


def criterion_9():
    bad = []
    for n, seed, M, exp in primitive_corpus():
        a = spf_k(M, exp, prune=True).values
        b = spf_k(M, exp, prune=False).values
        if a != b:
            bad.append((n, seed))
    return not bad, f"mismatched sets={bad[:5]}"


def criterion_10():
    bad, count = [], 0
    for n, seed, M, exp in primitive_corpus():
        for layer in iter_layers(M, exp, prune=True):
            H = prune_ht_columns(build_ht(layer))
            sol = solve_dual(H)
            H2, q2 = reduce_columns(H, sol.q_opt)
            k = min(sum(qj * c[i] for qj, c in zip(q2, H2.columns)) for i in range(H2.num_rows))
            count += 1
            if H2.h > n or k != sol.k or sum(q2) != 1 or any(v < 0 for v in q2):
                bad.append((n, seed, layer.t))
    return not bad, f"{count} reductions, failures={bad[:5]}"


def criterion_11():
    bad = []
    for n, seed, M, exp in primitive_corpus():
        A, AT = aut_of(M), aut_of(M.transpose())
        diam = sg_diameter(A)
        rt = reset_threshold_exact(A).rt
        rt_t = reset_threshold_exact(AT).rt
        epp = eppstein(A).rt
        if not diam <= rt:
            bad.append((n, seed, f"diam {diam} > rt {rt}"))
        if not rt <= epp:
            bad.append((n, seed, f"rt {rt} > epp {epp}"))
        if not rt <= exp <= rt + rt_t + n - 1:
            bad.append((n, seed, f"exp {exp} outside [{rt}, {rt + rt_t + n - 1}]"))
    return not bad, f"{len(bad)} violations: {bad[:4]}"


def criterion_12():
    bad = []
    for n, seed, M, exp in primitive_corpus():
        a = spf_kbar(M).first_one()
        b = spf_kbar(M.transpose()).first_one()
        if a is None or b is None or exp > a + b:
            bad.append((n, seed, exp, a, b))
    return not bad, f"violations={bad[:5]}"


def _random_policy(rng, size):
    w = [rng.randint(0, 20) for _ in range(size)]
    if not any(w):
        w[rng.randrange(size)] = 1
    total = sum(w)
    return [Fraction(x, total) for x in w]


def criterion_13():
    rng = random.Random(13)
    bad, checks = [], 0
    corpus = primitive_corpus()
    picks = corpus[:: max(1, len(corpus) // 10)][:10]
    for n, seed, M, exp in picks:
        for t in sorted({1, max(1, exp // 2), max(1, exp - 1)}):
            layer = layer_at(M, t, prune=False)
            sol = solve_layer(layer, prune=False)
            if game_value(sol.p_opt, sol.q_opt, layer) != sol.value:
                bad.append((n, seed, t, "value"))
            for _ in range(100):
                p = _random_policy(rng, n)
                q = _random_policy(rng, len(layer))
                checks += 1
                if not game_value(sol.p_opt, q, layer) <= sol.value <= game_value(p, sol.q_opt, layer):
                    bad.append((n, seed, t))
    return not bad, f"{len(picks)} sets, {checks} random pairs, failures={bad[:5]}"


CRITERIA = {i: globals()[f"criterion_{i}"] for i in range(1, 14)}


def _run(i):
    start = time.perf_counter()
    ok, detail = CRITERIA[i]()
    RESULTS[i] = (ok, f"{detail} [{time.perf_counter() - start:.1f}s]")
    return ok, detail


@pytest.mark.parametrize("i", list(CRITERIA))
def test_criterion(i):
    ok, detail = _run(i)
    assert ok, detail


def summary_line(i):
    ok, detail = RESULTS[i]
    return f"criterion {i:2d}: {'PASS' if ok else 'FAIL'}  {detail}"


def summary_lines():
    return [summary_line(i) for i in sorted(RESULTS)]


if __name__ == "__main__":
    for i in CRITERIA:
        _run(i)
        print(summary_line(i), flush=True)
