"""Representations M_d of quantum sl2 and their tensor products.

Conventions. A tensor product is displayed as M_{d_n} x ... x M_{d_1}; factor
positions are counted from the RIGHT, so a basis tensor is stored as the index
tuple (l_1, ..., l_n) with l_1 the label of the rightmost factor.

On M_d with basis e_0 .. e_{d-1}:
    K e_l = q^(d-1-2l) e_l,  F e_l = e_{l+1},  E e_l = [l][d-l] e_{l-1}.
On tensor products (coproduct E -> E x K + 1 x E, F -> F x 1 + K^-1 x F):
E acting on factor p picks up K from every factor to its right, F acting on
factor p picks up K^-1 from every factor to its left.
"""

from __future__ import annotations

import json
from fractions import Fraction
from functools import lru_cache
from typing import Iterable, Mapping, Sequence

from . import linalg
from .qfield import ONE, ZERO, Q, QRat, qfact, qnum, qsum

GENERATORS = ("E", "F", "K", "Kinv")


class TensorVector:
    """Sparse vector in a tensor product of M_d's with QRat coefficients."""

    __slots__ = ("dims", "terms")

    def __init__(self, dims: Sequence[int], terms: Mapping[tuple, QRat] | None = None, check: bool = True):
        self.dims = tuple(dims)
        clean = {}
        if terms:
            for idx, c in terms.items():
                if isinstance(c, int):
                    c = QRat(c)
                if c.is_zero():
                    continue
                idx = tuple(idx)
                if check:
                    if len(idx) != len(self.dims) or any(not 0 <= l < d for l, d in zip(idx, self.dims)):
                        raise ValueError(f"index {idx} out of range for dims {self.dims}")
                clean[idx] = c
        self.terms = clean
        if check and any(d < 1 for d in self.dims):
            raise ValueError("dimensions must be positive")

    @classmethod
    def basis(cls, dims: Sequence[int], idx: Sequence[int], coef: QRat = ONE) -> "TensorVector":
        return cls(dims, {tuple(idx): coef})

    @classmethod
    def scalar(cls, c) -> "TensorVector":
        return cls((), {(): c})

    @classmethod
    def zero(cls, dims: Sequence[int]) -> "TensorVector":
        return cls(dims, {})

    @property
    def n(self) -> int:
        return len(self.dims)

    def is_zero(self) -> bool:
        return not self.terms

    def coef(self, idx: Sequence[int]) -> QRat:
        return self.terms.get(tuple(idx), ZERO)

    def scalar_value(self) -> QRat:
        if self.dims:
            raise ValueError("not a scalar")
        return self.terms.get((), ZERO)

    def __eq__(self, other):
        if not isinstance(other, TensorVector):
            return NotImplemented
        if self.dims != other.dims or self.terms.keys() != other.terms.keys():
            return False
        return all(c == other.terms[k] for k, c in self.terms.items())

    def __repr__(self):
        body = ", ".join(f"{k}: {c}" for k, c in sorted(self.terms.items()))
        return f"TensorVector(dims={self.dims}, {{{body}}})"

    def _check_same(self, other):
        if self.dims != other.dims:
            raise ValueError(f"shape mismatch {self.dims} vs {other.dims}")

    def __add__(self, other: "TensorVector") -> "TensorVector":
        self._check_same(other)
        out = dict(self.terms)
        for k, c in other.terms.items():
            out[k] = out[k] + c if k in out else c
        return TensorVector(self.dims, out, check=False)

    def __neg__(self):
        return TensorVector(self.dims, {k: -c for k, c in self.terms.items()}, check=False)

    def __sub__(self, other):
        return self + (-other)

    def scale(self, c: QRat) -> "TensorVector":
        if isinstance(c, int):
            c = QRat(c)
        if c.is_zero():
            return TensorVector(self.dims)
        if c == ONE:
            return self
        return TensorVector(self.dims, {k: x * c for k, x in self.terms.items()}, check=False)

    def __rmul__(self, c):
        return self.scale(c)

    def tensor(self, right: "TensorVector") -> "TensorVector":
        """Display-order product self x right; right occupies the low positions."""
        out = {}
        for ki, ci in right.terms.items():
            for kj, cj in self.terms.items():
                out[ki + kj] = ci * cj
        return TensorVector(right.dims + self.dims, out, check=False)

    def weight(self, idx: Sequence[int]) -> int:
        """K-eigenvalue exponent of a basis tensor."""
        return sum(d - 1 - 2 * l for l, d in zip(idx, self.dims))

    def to_json(self) -> dict:
        return {
            "dims": list(self.dims),
            "terms": [{"idx": list(k), "coef": self.terms[k].to_json()} for k in sorted(self.terms)],
        }

    @classmethod
    def from_json(cls, obj: dict) -> "TensorVector":
        terms = {tuple(t["idx"]): QRat.from_json(t["coef"]) for t in obj["terms"]}
        return cls(obj["dims"], terms)

    def dumps(self) -> str:
        return json.dumps(self.to_json(), sort_keys=True, separators=(",", ":"))


def _collect(dims, contributions: Iterable[tuple[tuple, QRat]]) -> TensorVector:
    acc: dict[tuple, list] = {}
    for idx, c in contributions:
        acc.setdefault(idx, []).append(c)
    out = {}
    for idx, cs in acc.items():
        s = cs[0] if len(cs) == 1 else qsum(cs)
        if not s.is_zero():
            out[idx] = s
    return TensorVector(dims, out, check=False)


# single-factor data


@lru_cache(maxsize=None)
def _e_coef(d: int, l: int) -> QRat:
    return qnum(l) * qnum(d - l)


def _k_exp(d: int, l: int) -> int:
    return d - 1 - 2 * l


def act_generator(g: str, v: TensorVector) -> TensorVector:
    """Action of E, F, K or Kinv on a tensor product vector."""
    dims = v.dims
    if g in ("K", "Kinv"):
        sgn = 1 if g == "K" else -1
        return TensorVector(dims, {k: c.shift(sgn * v.weight(k)) for k, c in v.terms.items()}, check=False)
    if g not in ("E", "F"):
        raise ValueError(f"unknown generator {g!r}")
    contribs = []
    n = len(dims)
    for idx, c in v.terms.items():
        exps = [_k_exp(d, l) for l, d in zip(idx, dims)]
        if g == "E":
            right = 0  # K exponent of factors at positions < p
            for p in range(n):
                l = idx[p]
                if l > 0:
                    new = idx[:p] + (l - 1,) + idx[p + 1:]
                    contribs.append((new, (c * _e_coef(dims[p], l)).shift(right)))
                right += exps[p]
        else:
            left = sum(exps)  # K exponent of factors at positions > p, updated below
            for p in range(n):
                left -= exps[p]
                l = idx[p]
                if l < dims[p] - 1:
                    new = idx[:p] + (l + 1,) + idx[p + 1:]
                    contribs.append((new, c.shift(-left)))
    return _collect(dims, contribs)


def act_word(word: str, v: TensorVector) -> TensorVector:
    """Apply generators right to left, e.g. 'EF' means E(F(v))."""
    for g in reversed(word):
        v = act_generator({"k": "Kinv"}.get(g, g), v)
    return v


def _split(v: TensorVector, k: int):
    """Yield (coef, right index, left index) splitting after the first k positions."""
    for idx, c in v.terms.items():
        yield c, idx[:k], idx[k:]


def act_generator_nested(g: str, v: TensorVector, nesting: str = "left") -> TensorVector:
    """Same action, computed literally by recursive two-factor coproducts.

    nesting='left' peels the leftmost factor off first, 'right' the rightmost.
    Used as an independent route for the coassociativity check.
    """
    dims = v.dims
    n = len(dims)
    if n <= 1:
        return _act_single(g, v)
    k = n - 1 if nesting == "left" else 1
    rdims, ldims = dims[:k], dims[k:]
    out = TensorVector.zero(dims)
    for c, ridx, lidx in _split(v, k):
        right = TensorVector(rdims, {ridx: c}, check=False)
        left = TensorVector.basis(ldims, lidx)
        if g == "E":
            t1 = act_generator_nested("E", left, nesting).tensor(act_generator_nested("K", right, nesting))
            t2 = left.tensor(act_generator_nested("E", right, nesting))
            out = out + t1 + t2
        elif g == "F":
            t1 = act_generator_nested("F", left, nesting).tensor(right)
            t2 = act_generator_nested("Kinv", left, nesting).tensor(act_generator_nested("F", right, nesting))
            out = out + t1 + t2
        else:
            out = out + act_generator_nested(g, left, nesting).tensor(act_generator_nested(g, right, nesting))
    return out


def _act_single(g: str, v: TensorVector) -> TensorVector:
    if not v.dims:
        if g in ("E", "F"):
            return TensorVector(())
        return v
    (d,) = v.dims
    out = {}
    for (l,), c in v.terms.items():
        if g == "K":
            out[(l,)] = c.shift(_k_exp(d, l))
        elif g == "Kinv":
            out[(l,)] = c.shift(-_k_exp(d, l))
        elif g == "E" and l > 0:
            out[(l - 1,)] = c * _e_coef(d, l)
        elif g == "F" and l < d - 1:
            out[(l + 1,)] = c
    return TensorVector((d,), out, check=False)


# Clebsch-Gordan highest weight vectors


def _cg_depth(d: int, d1: int, d2: int) -> int:
    twice = d1 + d2 - 1 - d
    if twice % 2 or not 0 <= twice // 2 <= min(d1, d2) - 1 or d < 1:
        raise ValueError(f"({d};{d1},{d2}) is not a component of M_{d1} x M_{d2}")
    return twice // 2


@lru_cache(maxsize=None)
def cg_highest_weight(d: int, d1: int, d2: int) -> TensorVector:
    """Highest weight vector of the M_d component inside M_{d2} x M_{d1} (d1 on the right)."""
    m = _cg_depth(d, d1, d2)
    gap = (Q - Q.inverse()) ** m
    terms = {}
    for l1 in range(m + 1):
        l2 = m - l1
        c = (
            qfact(d1 - 1 - l1) * qfact(d2 - 1 - l2)
            / (qfact(l1) * qfact(d1 - 1) * qfact(l2) * qfact(d2 - 1))
        ).shift(l1 * (d1 - l1)) / gap
        terms[(l1, l2)] = -c if l1 % 2 else c
    return TensorVector((d1, d2), terms)


@lru_cache(maxsize=None)
def cg_vector(d: int, d1: int, d2: int, l: int) -> TensorVector:
    """F^l applied to the highest weight vector."""
    v = cg_highest_weight(d, d1, d2)
    for _ in range(l):
        v = act_generator("F", v)
    return v


def singlet() -> TensorVector:
    return cg_highest_weight(1, 2, 2)


# local operator plumbing


def replace_factors(v: TensorVector, position: int, width: int, new_dims: Sequence[int], local) -> TensorVector:
    """Apply a local linear map on factors position .. position+width-1.

    local(idx_segment) returns a list of (new segment, QRat factor).
    """
    p = position - 1
    if p < 0 or p + width > v.n:
        raise ValueError(f"position {position} out of range for {v.n} factors")
    dims = v.dims[:p] + tuple(new_dims) + v.dims[p + width:]
    contribs = []
    cache: dict = {}
    for idx, c in v.terms.items():
        seg = idx[p:p + width]
        images = cache.get(seg)
        if images is None:
            images = cache[seg] = local(seg)
        for new, f in images:
            contribs.append((idx[:p] + tuple(new) + idx[p + width:], _mulf(c, f)))
    return _collect(dims, contribs)


def _mulf(c: QRat, f) -> QRat:
    # factors are often signed monomials; avoid gcd work for those
    if isinstance(f, tuple):
        sign, k = f
        c = c.shift(k)
        return -c if sign < 0 else c
    return c * f


def _require(v: TensorVector, position: int, dims: Sequence[int]):
    p = position - 1
    got = v.dims[p:p + len(dims)]
    if p < 0 or tuple(got) != tuple(dims):
        raise ValueError(f"factors at position {position} are {tuple(got)}, expected {tuple(dims)}")


# the common factor of the two nonzero singlet projection values
_SINGLET_SCALE = (Q - Q.inverse()) / qnum(2)
# local values as (sign, q-power) multiples of _SINGLET_SCALE, keyed by (l_j, l_{j+1})
_SINGLET_LOCAL = {(1, 0): [((), (-1, 0))], (0, 1): [((), (1, -1))]}


def singlet_project_hat(v: TensorVector, j: int) -> TensorVector:
    """Project factors j, j+1 (both M_2) onto the singlet, identified with the scalars.

    Values: e_0 x e_1 -> (q^-1 - q)/[2], e_1 x e_0 -> (1 - q^-2)/[2], others -> 0.
    """
    _require(v, j, (2, 2))
    out = replace_factors(v, j, 2, (), lambda seg: _SINGLET_LOCAL.get(seg, []))
    return out.scale(_SINGLET_SCALE)


def insert_vector(v: TensorVector, w: TensorVector, j: int) -> TensorVector:
    """Place w so that its factors occupy positions j .. j+w.n-1 of the result."""
    p = j - 1
    if not 0 <= p <= v.n:
        raise ValueError("insertion position out of range")
    dims = v.dims[:p] + w.dims + v.dims[p:]
    out = {}
    for idx, c in v.terms.items():
        for widx, wc in w.terms.items():
            out[idx[:p] + widx + idx[p:]] = c * wc
    return TensorVector(dims, out, check=False)


def singlet_project(v: TensorVector, j: int) -> TensorVector:
    """The projection onto the singlet at j, j+1, as an endomorphism."""
    return insert_vector(singlet_project_hat(v, j), singlet(), j)


# general Clebsch-Gordan projections

PROJECTION_KINDS = ((1, 3, 3), (3, 3, 3), (2, 2, 3), (2, 3, 2), (3, 2, 2), (1, 2, 2))


@lru_cache(maxsize=None)
def _projection_table(kind: tuple[int, int, int]):
    """Local map (l1, l2) -> [(l,), coefficient] for the projection onto M_d."""
    d, d1, d2 = kind
    if kind not in PROJECTION_KINDS:
        raise ValueError(f"unsupported projection kind {kind}")
    basis = []
    labels = []
    for dp in range(abs(d1 - d2) + 1, d1 + d2, 2):
        for l in range(dp):
            basis.append(cg_vector(dp, d1, d2, l).terms)
            labels.append((dp, l))
    if len(basis) != d1 * d2:
        raise ArithmeticError("Clebsch-Gordan basis has the wrong size")
    table = {}
    for l1 in range(d1):
        for l2 in range(d2):
            x = linalg.solve(basis, {(l1, l2): ONE})
            if x is None:
                raise ArithmeticError("Clebsch-Gordan basis does not span")
            table[(l1, l2)] = [((l,), c) for (dp, l), c in zip(labels, x) if dp == d and c != 0]
    return table


def general_project(kind: Sequence[int], v: TensorVector, position: int) -> TensorVector:
    """Project factors position, position+1 (M_{d1} on the right, M_{d2} on the left)
    onto the M_d component, sending F^l of its highest weight vector to e_l."""
    kind = tuple(kind)
    d, d1, d2 = kind
    _require(v, position, (d1, d2))
    table = _projection_table(kind)
    return replace_factors(v, position, 2, (d,), lambda seg: table[seg])


@lru_cache(maxsize=None)
def _triplet_images():
    return {(l,): list(cg_vector(3, 2, 2, l).terms.items()) for l in range(3)}


def embed_triplet(v: TensorVector, position: int) -> TensorVector:
    """Replace the M_3 factor at position by M_2 x M_2, e_l -> F^l(e_0 x e_0)."""
    _require(v, position, (3,))
    images = _triplet_images()
    return replace_factors(v, position, 1, (2, 2), lambda seg: images[seg])


# trivial subspace

SPECIALIZATIONS = (Fraction(7, 5), Fraction(11, 3))


def operator_rows(op, dims: Sequence[int], basis_idx: Sequence[tuple], q) -> list[dict]:
    """Columns of op on the given basis tensors, specialized at q, as rows of the transpose."""
    rows = []
    for idx in basis_idx:
        img = op(TensorVector.basis(dims, idx))
        rows.append({k: c.at(q) for k, c in img.terms.items()})
    return rows


def _all_indices(dims):
    import itertools

    return list(itertools.product(*[range(d) for d in dims]))


def kernel_dim(ops, dims: Sequence[int], q) -> int:
    """dim of the common kernel of linear maps ops (functions TensorVector -> TensorVector) at q."""
    basis = _all_indices(dims)
    pos = {idx: i for i, idx in enumerate(basis)}
    # matrix with one row per (op, output index) and one column per basis tensor
    rows: dict = {}
    for oi, op in enumerate(ops):
        for idx in basis:
            img = op(TensorVector.basis(dims, idx))
            for k, c in img.terms.items():
                val = c.at(q)
                if val:
                    rows.setdefault((oi, k), {})[pos[idx]] = val
    return len(basis) - linalg.rank(rows.values())


def trivial_subspace_dim(n: int, via: Sequence = SPECIALIZATIONS) -> int:
    """dim {v in M_2^n : E v = 0, K v = v}, computed at each specialization in via."""
    if n < 0:
        raise ValueError("n must be non-negative")
    dims = (2,) * n
    results = set()
    for q in via:
        q = Fraction(q)
        # K - 1 is diagonal: its kernel is spanned by basis tensors with eigenvalue 1 at q
        basis = [idx for idx in _all_indices(dims) if q ** (n - 2 * sum(idx)) == 1]
        pos = {idx: i for i, idx in enumerate(basis)}
        rows: dict = {}
        for idx in basis:
            img = act_generator("E", TensorVector.basis(dims, idx))
            for k, c in img.terms.items():
                val = c.at(q)
                if val:
                    rows.setdefault(k, {})[pos[idx]] = val
        results.add(len(basis) - linalg.rank(rows.values()))
    if len(results) != 1:
        raise ArithmeticError(f"specializations disagree: {sorted(results)}")
    return results.pop()
