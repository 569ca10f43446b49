"""Pure partition vectors v_alpha in M_2^{2N}, their dual functionals and sums.

v_alpha is the unique vector with K v = v, E v = 0 and
    singlet_project_hat(v_alpha, j) = v_{alpha minus (j,j+1)}  if (j, j+1) is a link,
                                       0                       otherwise,
normalized by v_empty = 1. The maximally nested pattern has a closed form;
every other pattern is reached by descending the partial order with the
tying recursion.
"""

from __future__ import annotations

from fractions import Fraction
from functools import lru_cache
from typing import Sequence

from . import linalg
from .linkpatterns import (
    LinkPattern,
    admissible_indices,
    enumerate_patterns,
    first_allowable_ordering,
    format_pattern,
    linear_extension,
    rainbow,
    remove_link,
    tie,
    tie_fiber,
)
from .qfield import ONE, Q, QRat, qfact, qnum
from .uqsl2 import (
    SPECIALIZATIONS,
    TensorVector,
    act_generator,
    singlet_project,
    singlet_project_hat,
)

MAX_TABLE_N = 8


@lru_cache(maxsize=None)
def theta(N: int, l: int) -> TensorVector:
    """F^l applied to e_0 x ... x e_0 in M_2^N; zero outside 0 <= l <= N."""
    if l < 0 or l > N:
        return TensorVector.zero((2,) * N)
    if l == 0:
        return TensorVector.basis((2,) * N, (0,) * N)
    return act_generator("F", theta(N, l - 1))


def _e(l: int) -> TensorVector:
    return TensorVector.basis((2,), (l,))


def theta_append_right(N: int, l: int) -> TensorVector:
    """theta from the N-1 case by splitting off the rightmost factor."""
    if l < 0 or l > N:
        return TensorVector.zero((2,) * N)
    if N == 0:
        return TensorVector.scalar(ONE)
    a = theta_append_right(N - 1, l).tensor(_e(0)) if l <= N - 1 else TensorVector.zero((2,) * N)
    if l >= 1:
        b = theta_append_right(N - 1, l - 1).tensor(_e(1)).scale(qnum(l).shift(l - N))
        a = a + b
    return a


def theta_append_left(N: int, l: int) -> TensorVector:
    """theta from the N-1 case by splitting off the leftmost factor."""
    if l < 0 or l > N:
        return TensorVector.zero((2,) * N)
    if N == 0:
        return TensorVector.scalar(ONE)
    a = _e(0).tensor(theta_append_left(N - 1, l)).scale(Q ** (-l)) if l <= N - 1 else TensorVector.zero((2,) * N)
    if l >= 1:
        a = a + _e(1).tensor(theta_append_left(N - 1, l - 1)).scale(qnum(l))
    return a


@lru_cache(maxsize=None)
def rainbow_vector(N: int) -> TensorVector:
    """Closed form of the vector for the fully nested pattern of size N."""
    if N == 0:
        return TensorVector.scalar(ONE)
    pref = qnum(2) ** N / (qfact(N + 1) * (Q ** (-2) - 1) ** N)
    out = TensorVector.zero((2,) * (2 * N))
    for l in range(N + 1):
        term = theta(N, l).tensor(theta(N, N - l))
        c = QRat.monomial(l * (N - l - 1), -1 if l % 2 else 1)
        out = out + term.scale(c)
    return out.scale(pref)


class PureVectorTable:
    """Map LinkPattern -> TensorVector for all patterns up to max_N."""

    def __init__(self, entries: dict, max_N: int):
        self.entries = entries
        self.max_N = max_N

    def __getitem__(self, alpha: LinkPattern) -> TensorVector:
        return self.entries[alpha]

    def __contains__(self, alpha):
        return alpha in self.entries

    def patterns(self, N: int) -> tuple[LinkPattern, ...]:
        return enumerate_patterns(N)

    def restricted(self, max_N: int) -> "PureVectorTable":
        """The sub-table of patterns with at most max_N links."""
        if max_N >= self.max_N:
            return self
        keep = {a: v for a, v in self.entries.items() if a.N <= max_N}
        return PureVectorTable(keep, max_N)

    def __eq__(self, other):
        return (
            isinstance(other, PureVectorTable)
            and self.max_N == other.max_N
            and self.entries.keys() == other.entries.keys()
            and all(v == other.entries[k] for k, v in self.entries.items())
        )


def recursion_step(entries: dict, alpha: LinkPattern, j: int) -> TensorVector:
    """[2] (id - pi_j)(v_tied) minus the other fiber members, pi_j re-inserting the singlet."""
    tied = tie(alpha, j)
    w = entries[tied]
    out = (w - singlet_project(w, j)).scale(qnum(2))
    for beta in tie_fiber(alpha, j):
        if beta != alpha and beta != tied:
            if beta not in entries:
                raise ArithmeticError(f"{format_pattern(beta)} needed before {format_pattern(alpha)}")
            out = out - entries[beta]
    return out


def build_table(max_N: int) -> PureVectorTable:
    if max_N > MAX_TABLE_N:
        raise ValueError(f"max_N is limited to {MAX_TABLE_N}")
    entries: dict = {}
    for N in range(max_N + 1):
        top = rainbow(N)
        entries[top] = rainbow_vector(N)
        for alpha in linear_extension(N):
            if alpha == top:
                continue
            j = min(admissible_indices(alpha))
            entries[alpha] = recursion_step(entries, alpha, j)
    return PureVectorTable(entries, max_N)


_TABLES: dict[int, PureVectorTable] = {}


def cached_table(max_N: int) -> PureVectorTable:
    """Shared table; cut down from a larger one when that has been built."""
    for n, t in _TABLES.items():
        if n >= max_N:
            return t.restricted(max_N)
    t = build_table(max_N)
    _TABLES[max_N] = t
    return t


def dual_functional(alpha: LinkPattern, v: TensorVector, ordering=None) -> QRat:
    """Remove alpha's links in an allowable order by singlet projections."""
    if v.dims != (2,) * (2 * alpha.N):
        raise ValueError("vector has the wrong number of factors")
    if ordering is None:
        ordering = first_allowable_ordering(alpha)
    for _link, a in ordering:
        v = singlet_project_hat(v, a)
    return v.scalar_value()


def symmetric_vector(N: int, table: PureVectorTable) -> TensorVector:
    if N > table.max_N:
        raise ValueError("table too small")
    out = TensorVector.zero((2,) * (2 * N))
    for alpha in enumerate_patterns(N):
        out = out + table[alpha]
    return out


# verification


def check_system(table: PureVectorTable, alpha: LinkPattern) -> list[str]:
    """Failed conditions (empty if alpha's vector solves the defining system)."""
    v = table[alpha]
    fails = []
    if act_generator("K", v) != v:
        fails.append("K")
    if not act_generator("E", v).is_zero():
        fails.append("E")
    for j in range(1, 2 * alpha.N):
        got = singlet_project_hat(v, j)
        if alpha.has_link(j, j + 1):
            want = table[remove_link(alpha, j)]
        else:
            want = TensorVector.zero((2,) * (2 * alpha.N - 2))
        if got != want:
            fails.append(f"proj{j}")
    return fails


def check_recursion_all_j(table: PureVectorTable, alpha: LinkPattern) -> list[int]:
    """Admissible j for which the recursion does not reproduce the stored vector."""
    return [j for j in admissible_indices(alpha) if recursion_step(table.entries, alpha, j) != table[alpha]]


def dual_matrix(table: PureVectorTable, N: int) -> list[list[QRat]]:
    pats = enumerate_patterns(N)
    return [[dual_functional(a, table[b]) for b in pats] for a in pats]


def rank_of_vectors(vectors: Sequence[TensorVector], via=SPECIALIZATIONS) -> int:
    ranks = set()
    for q in via:
        q = Fraction(q)
        rows = [{k: c.at(q) for k, c in v.terms.items()} for v in vectors]
        ranks.add(linalg.rank(rows))
    if len(ranks) != 1:
        raise ArithmeticError(f"specializations disagree: {sorted(ranks)}")
    return ranks.pop()
