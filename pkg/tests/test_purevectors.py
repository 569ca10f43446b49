import itertools
import random
from fractions import Fraction

import pytest

from qsle import linalg
from qsle.linkpatterns import (
    allowable_orderings,
    enumerate_patterns,
    parse_pattern,
    rainbow,
    remove_link,
)
from qsle.purevectors import (
    PureVectorTable,
    build_table,
    cached_table,
    check_recursion_all_j,
    check_system,
    dual_functional,
    rainbow_vector,
    rank_of_vectors,
    recursion_step,
    symmetric_vector,
    theta,
    theta_append_left,
    theta_append_right,
)
from qsle.qfield import ONE, ZERO, Q, QRat, qnum
from qsle.uqsl2 import SPECIALIZATIONS, TensorVector, act_generator, singlet_project, singlet_project_hat

P = parse_pattern


@pytest.fixture(scope="module")
def table():
    return cached_table(5)


def e(*idx):
    return TensorVector.basis((2,) * len(idx), idx)


def solve_system_at(alpha, lower, q):
    """Oracle: solve E v = 0, K v = v and the projection conditions directly at q.

    lower maps patterns of size N-1 to their specialized vectors (dicts).
    Returns the unique solution as a dict, or raises if not unique.
    """
    n = 2 * alpha.N
    cols = [idx for idx in itertools.product((0, 1), repeat=n) if sum(idx) == alpha.N]
    columns = []
    for idx in cols:
        v = TensorVector.basis((2,) * n, idx)
        col = {}
        for k, c in act_generator("E", v).terms.items():
            col[("E",) + k] = c.at(q)
        for j in range(1, n):
            for k, c in singlet_project_hat(v, j).terms.items():
                col[("P", j) + k] = c.at(q)
        columns.append(col)
    target = {}
    for j in range(1, n):
        if alpha.has_link(j, j + 1):
            for k, c in lower[remove_link(alpha, j)].items():
                target[("P", j) + k] = c
    x = linalg.solve(columns, target)
    assert x is not None
    # uniqueness: the columns are independent
    assert linalg.rank([dict(c) for c in columns]) == len(cols)
    return {idx: c for idx, c in zip(cols, x) if c != 0}


def specialize(v, q):
    return {k: c.at(q) for k, c in v.terms.items()}


def test_theta_examples():
    assert theta(2, 0) == e(0, 0)
    assert theta(2, 1) == e(0, 1) + e(1, 0).scale(Q ** -1)
    assert theta(3, 4).is_zero() and theta(3, -1).is_zero()


@pytest.mark.parametrize("N", range(0, 6))
def test_theta_three_routes(N):
    for l in range(-1, N + 2):
        assert theta_append_right(N, l) == theta(N, l)
        assert theta_append_left(N, l) == theta(N, l)


def test_rainbow_one_closed_form():
    want = (e(1, 0) - e(0, 1).scale(Q ** -1)).scale((Q ** -2 - 1).inverse())
    assert rainbow_vector(1) == want
    assert singlet_project_hat(want, 1) == TensorVector.scalar(ONE)
    assert rainbow_vector(0) == TensorVector.scalar(ONE)


def test_rainbow_three_projections():
    v = rainbow_vector(3)
    assert singlet_project_hat(v, 3) == rainbow_vector(2)
    for j in (1, 2, 4, 5):
        assert singlet_project_hat(v, j).is_zero()


def test_two_link_recursion(table):
    a = P("1-2,3-4")
    w = rainbow_vector(2)
    # tying at 2 is the only way up to the rainbow; its fiber is exactly {a, rainbow}
    assert table[a] == (w - singlet_project(w, 2)).scale(qnum(2))
    assert check_system(table, a) == []


@pytest.mark.parametrize("N", range(0, 4))
def test_against_direct_solve(table, N):
    # independent route: linear solve of the defining system at rational q
    for q in SPECIALIZATIONS:
        lower = {a: specialize(table[a], q) for a in enumerate_patterns(max(N - 1, 0))}
        for a in enumerate_patterns(N):
            if N == 0:
                continue
            assert solve_system_at(a, lower, q) == specialize(table[a], q)


@pytest.mark.parametrize("N", range(0, 6))
def test_system_holds(table, N):
    for a in enumerate_patterns(N):
        assert check_system(table, a) == []


def test_system_spot_check_six():
    t = build_table(6)
    rng = random.Random(6)
    for a in rng.sample(list(enumerate_patterns(6)), 4) + [rainbow(6)]:
        assert check_system(t, a) == []


@pytest.mark.parametrize("N", range(0, 5))
def test_recursion_independent_of_j(table, N):
    for a in enumerate_patterns(N):
        assert check_recursion_all_j(table, a) == []


@pytest.mark.parametrize("N", range(0, 6))
def test_basis_rank(table, N):
    vecs = [table[a] for a in enumerate_patterns(N)]
    assert rank_of_vectors(vecs) == len(vecs)


def test_dual_basis_lp4(table):
    pats = enumerate_patterns(4)
    for a in pats:
        for b in pats:
            assert dual_functional(a, table[b]) == (ONE if a == b else ZERO)


def test_dual_independent_of_ordering_on_invariants(table):
    rng = random.Random(3)
    coefs = [ONE, -ONE, Q, qnum(2), QRat(5), Q ** -3]
    for N in (3, 4):
        v = TensorVector.zero((2,) * (2 * N))
        for b in enumerate_patterns(N):
            v = v + table[b].scale(rng.choice(coefs))
        for a in enumerate_patterns(N):
            values = {dual_functional(a, v, o) for o in allowable_orderings(a)}
            assert len(values) == 1


def test_fig6_orderings_agree():
    alpha = P("1-8,2-5,3-4,6-7,9-14,10-13,11-12")
    rng = random.Random(7)
    terms = {}
    for _ in range(40):
        idx = tuple(rng.randint(0, 1) for _ in range(14))
        terms[idx] = QRat.monomial(rng.randint(-3, 3), rng.choice([-2, -1, 1, 3]))
    v = TensorVector((2,) * 14, terms)
    orders = list(itertools.islice(allowable_orderings(alpha), 30))
    assert len(orders) > 1
    values = {dual_functional(alpha, v, o) for o in orders}
    assert len(values) == 1


def test_perturbation_breaks_system(table):
    # adding any nonzero invariant vector to v_alpha violates some projection condition
    rng = random.Random(11)
    for N in (2, 3):
        pats = enumerate_patterns(N)
        for a in pats:
            for _ in range(3):
                w = TensorVector.zero((2,) * (2 * N))
                for b in pats:
                    w = w + table[b].scale(QRat(rng.randint(-3, 3)))
                if w.is_zero():
                    continue
                perturbed = dict(table.entries)
                perturbed[a] = table[a] + w
                assert check_system(PureVectorTable(perturbed, table.max_N), a) != []


@pytest.mark.parametrize("N", range(1, 6))
def test_symmetric_cascade(table, N):
    v, w = symmetric_vector(N, table), symmetric_vector(N - 1, table)
    for j in range(1, 2 * N):
        assert singlet_project_hat(v, j) == w


def test_symmetric_small(table):
    assert symmetric_vector(0, table) == TensorVector.scalar(ONE)
    assert symmetric_vector(1, table) == table[P("1-2")]


def test_table_limits():
    with pytest.raises(ValueError):
        build_table(9)


def test_recursion_step_needs_fiber_members():
    with pytest.raises(ArithmeticError):
        # the fiber over 1-6,2-3,4-5 also contains the rainbow, which is withheld here
        t = cached_table(3)
        recursion_step({P("1-6,2-3,4-5"): t[P("1-6,2-3,4-5")]}, P("1-2,3-6,4-5"), 2)


def test_specializations_are_generic():
    assert all(Fraction(q) not in (0, 1, -1) for q in SPECIALIZATIONS)


def test_cached_table_is_cut_to_requested_size():
    big = cached_table(4)
    small = cached_table(2)
    assert small.max_N == 2
    assert len(small.entries) == 1 + 1 + 2
    assert small == build_table(2)
    assert big.max_N == 4
