"""Boundary-visit vectors.

A visit order is a string over {-, +}; L and R count the two symbols. The
vector for an order lives in M_3^R x M_2 x M_3^L. With positions counted from
the right, the left points occupy 1..L (the m-th nearest at L+1-m), the start
point x is at L+1 and the m-th nearest right point at L+1+m.

In M_2^{2N} (N = L+R+1) the same points are index pairs: the m-th left point
is (2L+1-2m, 2L+2-2m), x is 2L+1, the m-th right point (2L+2m, 2L+2m+1), and
the auxiliary point at infinity is 2N.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from functools import lru_cache

from .linkpatterns import LinkPattern, remove_link
from .purevectors import PureVectorTable, cached_table
from .qfield import ONE, Q, QRat, qnum
from .uqsl2 import (
    SPECIALIZATIONS,
    TensorVector,
    act_generator,
    cg_highest_weight,
    embed_triplet,
    general_project,
    kernel_dim,
    singlet_project_hat,
)

TRIPLET_22 = (3, 2, 2)
SINGLET_33 = (1, 3, 3)
TRIPLET_33 = (3, 3, 3)
DOUBLET_RIGHT = (2, 2, 3)  # M_3 x M_2, the M_3 on the left
DOUBLET_LEFT = (2, 3, 2)   # M_2 x M_3, the M_3 on the right


@dataclass(frozen=True)
class VisitOrder:
    signs: tuple[int, ...]  # +1 or -1

    @classmethod
    def parse(cls, text: str) -> "VisitOrder":
        try:
            return cls(tuple({"+": 1, "-": -1}[c] for c in text.strip()))
        except KeyError:
            raise ValueError(f"visit order must consist of '+' and '-': {text!r}") from None

    def __str__(self):
        return "".join("+" if s > 0 else "-" for s in self.signs)

    @property
    def L(self) -> int:
        return sum(1 for s in self.signs if s < 0)

    @property
    def R(self) -> int:
        return sum(1 for s in self.signs if s > 0)

    def __len__(self):
        return len(self.signs)

    def drop(self, j: int) -> "VisitOrder":
        """Remove the j-th symbol (1-based)."""
        return VisitOrder(self.signs[: j - 1] + self.signs[j:])


def all_orders(n: int) -> list[VisitOrder]:
    return [VisitOrder(s) for s in itertools.product((-1, 1), repeat=n)]


def endpoints(omega: VisitOrder) -> list[tuple[int, int]]:
    """The pairs (a_j, b_j): a_j leaves a point, b_j enters the next one."""
    w = omega.signs
    n = len(w) + 1
    a = [2 * omega.L + 1]
    b = []
    for j in range(1, n + 1):
        if j > 1:
            a.append(b[-1] + w[j - 2])
        if j == 1 and n > 1:
            b.append(a[0] + w[0])
        elif j == n:
            b.append(2 * n)
        elif w[j - 1] > 0:
            b.append(max(a) + 1)
        else:
            b.append(min(a) - 1)
    return list(zip(a, b))


def visit_to_pattern(omega: VisitOrder) -> LinkPattern:
    return LinkPattern(endpoints(omega))


def successive_visits(omega: VisitOrder) -> list[tuple[int, int, int]]:
    """(side, m, j): the m-th and m+1-st points on that side are visited at steps j, j+1."""
    out = []
    count = {1: 0, -1: 0}
    w = omega.signs
    for j in range(1, len(w) + 1):
        count[w[j - 1]] += 1
        if j < len(w) and w[j] == w[j - 1]:
            out.append((w[j - 1], count[w[j - 1]], j))
    return out


def successive_visits_scan(omega: VisitOrder, side: int, m: int) -> bool:
    """Brute force: the m-th and m+1-st symbols of that side are adjacent in omega."""
    where = [i for i, s in enumerate(omega.signs) if s == side]
    return m + 1 <= len(where) and where[m] - where[m - 1] == 1


def collapse_consistency(omega: VisitOrder) -> list[str]:
    """Check that collapsing visits removes the expected link; returns failures."""
    fails = []
    alpha = visit_to_pattern(omega)
    ab = endpoints(omega)
    if len(omega) >= 1:
        a1, b1 = ab[0]
        got = visit_to_pattern(omega.drop(1))
        if remove_link(alpha, min(a1, b1)) != got:
            fails.append(f"{omega}: first visit")
    for side, m, j in successive_visits(omega):
        a, b = ab[j]  # the (j+1)-st link
        got = visit_to_pattern(omega.drop(j))
        if remove_link(alpha, min(a, b)) != got:
            fails.append(f"{omega}: successive {side:+d} {m}")
    return fails


# positions of the projections in M_3^R x M_2 x M_3^L


def doublet_position(L: int, R: int, side: int) -> int:
    if side > 0:
        if R < 1:
            raise ValueError("no right point")
        return L + 1
    if L < 1:
        raise ValueError("no left point")
    return L


def pair_position(L: int, R: int, side: int, m: int) -> int:
    """Lower position of the M_3 x M_3 pair holding the m-th and m+1-st points of a side."""
    count = R if side > 0 else L
    if not 1 <= m < count:
        raise ValueError("no such pair of points")
    return L + 1 + m if side > 0 else L - m


def singlet_index(L: int, side: int, m: int) -> int:
    """Index k in M_2^{2N} of the singlet between the m-th and m+1-st points of a side."""
    return 2 * L + 2 * m + 1 if side > 0 else 2 * L - 2 * m


def target_dims(L: int, R: int) -> tuple[int, ...]:
    return (3,) * L + (2,) + (3,) * R


# building the vectors


def project_to_visits(v: TensorVector, L: int, R: int) -> TensorVector:
    """Apply triplet projections to the pairs of every visited point."""
    # process from the top so lower positions are unaffected
    for mp in range(R, 0, -1):
        v = general_project(TRIPLET_22, v, 2 * L + 2 * mp)
    for m in range(1, L + 1):
        v = general_project(TRIPLET_22, v, 2 * L + 1 - 2 * m)
    return v


def embed_from_visits(v: TensorVector, L: int, R: int) -> TensorVector:
    """Inverse direction: replace every M_3 by the triplet inside M_2 x M_2."""
    for p in range(L + R + 1, 0, -1):
        if v.dims[p - 1] == 3:
            v = embed_triplet(v, p)
    return v


def split_top_doublet(v: TensorVector):
    """Write v = -q e_0 x F(tau) + e_1 x tau, with the M_2 factor on top; returns tau.

    Raises ArithmeticError if v is not of that form.
    """
    if v.dims[-1] != 2:
        raise ValueError("top factor must be M_2")
    dims = v.dims[:-1]
    tau = TensorVector(dims, {k[:-1]: c for k, c in v.terms.items() if k[-1] == 1}, check=False)
    rest = TensorVector(dims, {k[:-1]: c for k, c in v.terms.items() if k[-1] == 0}, check=False)
    if rest != act_generator("F", tau).scale(-Q):
        raise ArithmeticError("vector is not in the image of the doublet isomorphism")
    return tau


def join_top_doublet(tau: TensorVector) -> TensorVector:
    top0 = act_generator("F", tau).scale(-Q)
    out = {k + (0,): c for k, c in top0.terms.items()}
    out.update({k + (1,): c for k, c in tau.terms.items()})
    return TensorVector(tau.dims + (2,), out, check=False)


# the doublet isomorphism of the single-link case gives e_0/(q - 1/q); rescale to e_0
NORMALIZATION = Q - Q.inverse()


@dataclass
class BVisitVector:
    order: VisitOrder
    vector: TensorVector

    def to_json(self) -> dict:
        d = self.vector.to_json()
        d["order"] = str(self.order)
        return d


def build_bvisit(omega: VisitOrder, table: PureVectorTable | None = None) -> BVisitVector:
    alpha = visit_to_pattern(omega)
    if table is None:
        table = cached_table(alpha.N)
    if alpha.N > table.max_N:
        raise ValueError("table too small for this visit order")
    projected = project_to_visits(table[alpha], omega.L, omega.R)
    tau = split_top_doublet(projected)
    return BVisitVector(omega, tau.scale(NORMALIZATION))


@lru_cache(maxsize=None)
def bvisit_vector(order: str) -> TensorVector:
    return build_bvisit(VisitOrder.parse(order)).vector


# constants


def derive_constants() -> dict[str, QRat]:
    """Scalars relating projections on M_3 factors to singlet projections on M_2 pairs."""
    # doublet: M_3 (left) x M_2 (right)
    t = cg_highest_weight(*DOUBLET_RIGHT)
    via = singlet_project_hat(embed_triplet(t, 2), 1)
    c2 = ONE / via.coef((0,))
    # triplet on M_3 x M_3
    t = cg_highest_weight(*TRIPLET_33)
    w = embed_triplet(embed_triplet(t, 2), 1)
    via = general_project(TRIPLET_22, singlet_project_hat(w, 2), 1)
    c3 = ONE / via.coef((0,))
    # singlet on M_3 x M_3
    t = cg_highest_weight(*SINGLET_33)
    w = embed_triplet(embed_triplet(t, 2), 1)
    via = singlet_project_hat(singlet_project_hat(w, 2), 1)
    c1 = ONE / via.scalar_value()
    return {"C2": c2, "C3": c3, "C1": c1}


def stated_constants() -> dict[str, QRat]:
    return {
        "C2": qnum(2) ** 2 / qnum(3),
        "C3": qnum(2) ** 2 / (Q ** 2 + Q ** (-2)),
        "C1": qnum(2) ** 3 / qnum(3),
    }


# verification


def check_bvisit(omega: VisitOrder, constants: dict | None = None) -> list[tuple[str, TensorVector]]:
    """Failed conditions with residual vectors; empty when the full system holds."""
    if constants is None:
        constants = stated_constants()
    v = bvisit_vector(str(omega))
    L, R = omega.L, omega.R
    fails = []

    def expect(name, got, want):
        if got != want:
            fails.append((name, got - want))

    expect("K", act_generator("K", v), v.scale(Q))
    expect("E", act_generator("E", v), TensorVector.zero(v.dims))
    succ = {(side, m): j for side, m, j in successive_visits(omega)}
    for side, count in ((1, R), (-1, L)):
        for m in range(1, count):
            pos = pair_position(L, R, side, m)
            got1 = general_project(SINGLET_33, v, pos)
            expect(f"singlet{side:+d};{m}", got1, TensorVector.zero(got1.dims))
            got3 = general_project(TRIPLET_33, v, pos)
            if (side, m) in succ:
                want = bvisit_vector(str(omega.drop(succ[(side, m)]))).scale(constants["C3"])
            else:
                want = TensorVector.zero(got3.dims)
            expect(f"triplet{side:+d};{m}", got3, want)
    for side, count in ((1, R), (-1, L)):
        if count == 0:
            continue
        kind = DOUBLET_RIGHT if side > 0 else DOUBLET_LEFT
        got2 = general_project(kind, v, doublet_position(L, R, side))
        if omega.signs and omega.signs[0] == side:
            want = bvisit_vector(str(omega.drop(1))).scale(constants["C2"])
        else:
            want = TensorVector.zero(got2.dims)
        expect(f"doublet{side:+d}", got2, want)
    return fails


def verify_bvisit_system(max_nprime: int) -> dict[str, list]:
    if max_nprime > 5:
        raise ValueError("max_nprime is limited to 5")
    report = {}
    for n in range(max_nprime + 1):
        for omega in all_orders(n):
            report[str(omega)] = [name for name, _ in check_bvisit(omega)]
    return report


def homogeneous_operators(L: int, R: int) -> list:
    """Linear maps whose common kernel must vanish by uniqueness."""
    ops = [
        lambda v: act_generator("E", v),
        lambda v: act_generator("K", v) - v.scale(Q),
    ]
    for side, count in ((1, R), (-1, L)):
        if count:
            kind = DOUBLET_RIGHT if side > 0 else DOUBLET_LEFT
            pos = doublet_position(L, R, side)
            ops.append(lambda v, kind=kind, pos=pos: general_project(kind, v, pos))
        for m in range(1, count):
            pos = pair_position(L, R, side, m)
            ops.append(lambda v, pos=pos: general_project(SINGLET_33, v, pos))
            ops.append(lambda v, pos=pos: general_project(TRIPLET_33, v, pos))
    return ops


def homogeneous_kernel_dim(L: int, R: int) -> int:
    dims = target_dims(L, R)
    ops = homogeneous_operators(L, R)
    dims_found = {kernel_dim(ops, dims, q) for q in SPECIALIZATIONS}
    if len(dims_found) != 1:
        raise ArithmeticError(f"specializations disagree: {sorted(dims_found)}")
    return dims_found.pop()
