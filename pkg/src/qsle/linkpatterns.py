"""Planar pair partitions of {1, ..., 2N} (link patterns).

A pattern is stored as a sorted tuple of links (a, b) with a < b. Walks give
a bijection with Dyck paths; the pointwise order on walks is the partial
order used to organise the recursion for pure vectors.
"""

from __future__ import annotations

from functools import lru_cache
from typing import Iterable, Iterator, Sequence


class LinkPattern:
    __slots__ = ("links", "_partner")

    def __init__(self, links: Iterable[Sequence[int]]):
        norm = []
        for link in links:
            a, b = link
            a, b = int(a), int(b)
            if a > b:
                a, b = b, a
            norm.append((a, b))
        norm.sort()
        self.links: tuple[tuple[int, int], ...] = tuple(norm)
        n2 = 2 * len(norm)
        ends = sorted(x for l in norm for x in l)
        if ends != list(range(1, n2 + 1)):
            raise ValueError(f"links {norm} do not partition 1..{n2}")
        partner = [0] * (n2 + 1)
        for a, b in norm:
            if a == b:
                raise ValueError("a link needs two distinct endpoints")
            partner[a], partner[b] = b, a
        self._partner = tuple(partner)
        if not is_planar(norm):
            raise ValueError(f"links {norm} cross")

    @property
    def N(self) -> int:
        return len(self.links)

    def __len__(self):
        return len(self.links)

    def partner(self, i: int) -> int:
        return self._partner[i]

    def has_link(self, a: int, b: int) -> bool:
        return 1 <= a <= 2 * self.N and self._partner[a] == b

    def __eq__(self, other):
        return isinstance(other, LinkPattern) and self.links == other.links

    def __hash__(self):
        return hash(self.links)

    def __lt__(self, other):
        return self.links < other.links

    def __repr__(self):
        return f"LinkPattern({format_pattern(self)!r})"

    def __str__(self):
        return format_pattern(self)


def is_planar(links: Sequence[tuple[int, int]]) -> bool:
    for i, (a1, b1) in enumerate(links):
        for a2, b2 in links[i + 1:]:
            if (a1 - a2) * (b1 - b2) * (b1 - a2) * (a1 - b2) <= 0:
                return False
    return True


def format_pattern(alpha: LinkPattern) -> str:
    return ",".join(f"{a}-{b}" for a, b in alpha.links)


def parse_pattern(text: str) -> LinkPattern:
    """Read 'a1-b1,a2-b2,...' (1-based); empty string is the empty pattern."""
    text = text.strip()
    if not text:
        return LinkPattern([])
    links = []
    for part in text.split(","):
        a, sep, b = part.strip().partition("-")
        if not sep:
            raise ValueError(f"bad link {part!r}")
        links.append((int(a), int(b)))
    return LinkPattern(links)


def pattern_to_json(alpha: LinkPattern) -> list:
    return [list(l) for l in alpha.links]


def pattern_from_json(obj) -> LinkPattern:
    return LinkPattern(obj)


def rainbow(N: int) -> LinkPattern:
    return LinkPattern([(k, 2 * N + 1 - k) for k in range(1, N + 1)])


def to_walk(alpha: LinkPattern) -> tuple[int, ...]:
    w = [0]
    for t in range(1, 2 * alpha.N + 1):
        w.append(w[-1] + (1 if alpha.partner(t) > t else -1))
    return tuple(w)


def from_walk(walk: Sequence[int]) -> LinkPattern:
    walk = list(walk)
    if not walk or walk[0] != 0 or walk[-1] != 0 or min(walk) < 0:
        raise ValueError("not a Dyck walk")
    stack, links = [], []
    for t in range(1, len(walk)):
        step = walk[t] - walk[t - 1]
        if step == 1:
            stack.append(t)
        elif step == -1:
            links.append((stack.pop(), t))
        else:
            raise ValueError("walk steps must be +-1")
    return LinkPattern(links)


def leq(alpha: LinkPattern, beta: LinkPattern) -> bool:
    if alpha.N != beta.N:
        raise ValueError("patterns of different sizes are not comparable")
    return all(x <= y for x, y in zip(to_walk(alpha), to_walk(beta)))


@lru_cache(maxsize=None)
def enumerate_patterns(N: int) -> tuple[LinkPattern, ...]:
    """All of LP_N, lexicographic by walk."""
    if N < 0:
        raise ValueError("N must be non-negative")
    out = []

    def grow(walk):
        t = len(walk) - 1
        if t == 2 * N:
            if walk[-1] == 0:
                out.append(from_walk(walk))
            return
        h = walk[-1]
        # down steps before up steps gives lexicographic order
        if h > 0:
            grow(walk + [h - 1])
        if h + 1 <= 2 * N - t - 1:
            grow(walk + [h + 1])

    grow([0])
    return tuple(out)


def linear_extension(N: int) -> list[LinkPattern]:
    """LP_N ordered so that every pattern comes after all patterns above it."""
    pats = enumerate_patterns(N)
    return sorted(pats, key=lambda a: (-sum(to_walk(a)), to_walk(a)))


def remove_link(alpha: LinkPattern, j: int) -> LinkPattern:
    """Delete the link (j, j+1) and relabel the later indices down by two."""
    if not alpha.has_link(j, j + 1):
        raise ValueError(f"({j},{j + 1}) is not a link of {alpha}")

    def rl(x):
        return x - 2 if x > j + 1 else x

    return LinkPattern([(rl(a), rl(b)) for a, b in alpha.links if a != j])


def tie(alpha: LinkPattern, j: int) -> LinkPattern:
    """Make (j, j+1) a link, reconnecting the former partners to each other."""
    if not 1 <= j <= 2 * alpha.N - 1:
        raise ValueError("tie index out of range")
    if alpha.has_link(j, j + 1):
        return alpha
    l1, l2 = alpha.partner(j), alpha.partner(j + 1)
    links = [l for l in alpha.links if j not in l and j + 1 not in l]
    links += [(j, j + 1), (min(l1, l2), max(l1, l2))]
    return LinkPattern(links)


def tie_fiber(alpha: LinkPattern, j: int) -> list[LinkPattern]:
    """All patterns with the same image as alpha under tying at j (brute force)."""
    target = tie(alpha, j)
    return [b for b in enumerate_patterns(alpha.N) if tie(b, j) == target]


def tie_fiber_constructive(alpha: LinkPattern, j: int) -> list[LinkPattern]:
    """Same fiber by cutting (j, j+1) and one other link and reconnecting."""
    target = tie(alpha, j)
    out = {target}
    for a, b in target.links:
        if a == j:
            continue
        rest = [l for l in target.links if l != (j, j + 1) and l != (a, b)]
        for x, y in (((j, a), (j + 1, b)), ((j, b), (j + 1, a))):
            links = rest + [tuple(sorted(x)), tuple(sorted(y))]
            if is_planar(sorted(links)):
                cand = LinkPattern(links)
                if tie(cand, j) == target:
                    out.add(cand)
    return sorted(out, key=to_walk)


def admissible_indices(alpha: LinkPattern) -> list[int]:
    """j with links (l1, j) and (j+1, l2), l1 < j < j+1 < l2; these are the
    ties that strictly raise alpha in the partial order."""
    out = []
    for j in range(1, 2 * alpha.N):
        l1, l2 = alpha.partner(j), alpha.partner(j + 1)
        if l1 < j and l2 > j + 1:
            out.append(j)
    return out


def allowable_orderings(alpha: LinkPattern) -> Iterator[list[tuple[tuple[int, int], int]]]:
    """Orders in which the links can be removed one by one, each being
    consecutive at its turn. Yields lists of (original link, current left index)."""
    if alpha.N == 0:
        yield []
        return

    def rec(remaining: tuple[tuple[int, int], ...], labels: dict):
        if not remaining:
            yield []
            return
        for link in remaining:
            a, b = labels[link[0]], labels[link[1]]
            if b == a + 1:
                new = {}
                for x, y in labels.items():
                    if x in link:
                        continue
                    new[x] = y - 2 if y > b else y
                rest = tuple(l for l in remaining if l != link)
                for tail in rec(rest, new):
                    yield [(link, a)] + tail

    labels = {x: x for x in range(1, 2 * alpha.N + 1)}
    yield from rec(alpha.links, labels)


def first_allowable_ordering(alpha: LinkPattern) -> list[tuple[tuple[int, int], int]]:
    """Greedy ordering: always remove the leftmost consecutive link."""
    links = list(alpha.links)
    labels = {x: x for x in range(1, 2 * alpha.N + 1)}
    out = []
    while links:
        for link in sorted(links, key=lambda l: labels[l[0]]):
            a, b = labels[link[0]], labels[link[1]]
            if b == a + 1:
                break
        else:
            raise ArithmeticError("pattern admits no allowable ordering")
        out.append((link, a))
        links.remove(link)
        labels = {x: (y - 2 if y > b else y) for x, y in labels.items() if x not in link}
    return out


def is_allowable(alpha: LinkPattern, order: Sequence[tuple[int, int]]) -> bool:
    if sorted(tuple(sorted(l)) for l in order) != list(alpha.links):
        return False
    labels = {x: x for x in range(1, 2 * alpha.N + 1)}
    for link in order:
        a, b = sorted(link)
        la, lb = labels[a], labels[b]
        if lb != la + 1:
            return False
        labels = {x: (y - 2 if y > lb else y) for x, y in labels.items() if x not in (a, b)}
    return True


def catalan(N: int) -> int:
    from math import comb

    return comb(2 * N, N) // (N + 1)
