"""Permutation groups on vertex sets.

A permutation is a tuple of images, ``p[v]`` being the image of ``v``.
Products read left to right: ``compose(p, q)`` applies ``p`` first, so
``v^(pq) = (v^p)^q`` and ``g -> R(g)`` is a homomorphism.
"""

from __future__ import annotations

import functools
import math
from collections import deque
from dataclasses import dataclass, field
from typing import Iterable, Optional, Sequence

from .errors import CapExceeded
from .groups import GroupSpec, tables

DEFAULT_MATERIALIZE_CAP = 10**6

Permutation = tuple


def identity(degree: int) -> Permutation:
    return tuple(range(degree))


def compose(p: Permutation, q: Permutation) -> Permutation:
    return tuple(map(q.__getitem__, p))


def invert(p: Permutation) -> Permutation:
    out = [0] * len(p)
    for v, w in enumerate(p):
        out[w] = v
    return tuple(out)


def conjugate(r: Permutation, c: Permutation) -> Permutation:
    """``c^-1 r c``: the image of r under conjugation by c."""
    cinv = invert(c)
    return tuple(c[r[cinv[v]]] for v in range(len(r)))


def power(p: Permutation, k: int) -> Permutation:
    if k < 0:
        p, k = invert(p), -k
    out = identity(len(p))
    base = p
    while k:
        if k & 1:
            out = compose(out, base)
        base = compose(base, base)
        k >>= 1
    return out


def is_identity(p: Permutation) -> bool:
    return all(v == w for v, w in enumerate(p))


def cycles(p: Permutation) -> list[tuple[int, ...]]:
    seen, out = set(), []
    for v in range(len(p)):
        if v in seen:
            continue
        cyc = [v]
        seen.add(v)
        w = p[v]
        while w != v:
            cyc.append(w)
            seen.add(w)
            w = p[w]
        out.append(tuple(cyc))
    return out


def cycle_type(p: Permutation) -> tuple[int, ...]:
    return tuple(sorted((len(c) for c in cycles(p)), reverse=True))


def order(p: Permutation) -> int:
    return math.lcm(*cycle_type(p)) if p else 1


def from_cycles(degree: int, cyc: Iterable[Sequence[int]]) -> Permutation:
    out = list(range(degree))
    for c in cyc:
        for i, v in enumerate(c):
            out[v] = c[(i + 1) % len(c)]
    return tuple(out)


@dataclass(frozen=True)
class PermGroup:
    degree: int
    generators: tuple
    order: int
    elements: Optional[frozenset] = field(default=None, compare=False, repr=False)

    @property
    def materialized(self) -> bool:
        return self.elements is not None

    def __contains__(self, p):
        if self.elements is None:
            raise ValueError("membership needs a materialised group")
        return tuple(p) in self.elements

    def materialize(self, cap: int = DEFAULT_MATERIALIZE_CAP) -> "PermGroup":
        if self.elements is not None:
            return self
        if self.order > cap:
            raise CapExceeded("materialisation", self.order, cap)
        return closure(list(self.generators), cap, self.degree)

    def to_json(self) -> dict:
        return {"degree": self.degree, "order": self.order, "generators": [list(g) for g in self.generators]}


def closure(gens: Sequence[Permutation], cap: int = DEFAULT_MATERIALIZE_CAP, degree: Optional[int] = None) -> PermGroup:
    """Materialise <gens>; CapExceeded as soon as more than ``cap`` elements appear."""
    gens = [tuple(g) for g in gens]
    if degree is None:
        if not gens:
            raise ValueError("degree is required for an empty generator list")
        degree = len(gens[0])
    if any(len(g) != degree for g in gens):
        raise ValueError("generators have different degrees")
    e = identity(degree)
    seen = {e}
    frontier = [e]
    while frontier:
        nxt = []
        for x in frontier:
            for g in gens:
                y = compose(x, g)
                if y not in seen:
                    seen.add(y)
                    nxt.append(y)
        if len(seen) > cap:
            raise CapExceeded("closure", len(seen), cap)
        frontier = nxt
    gens_kept = tuple(sorted(g for g in set(gens) if g != e))
    return PermGroup(degree, gens_kept, len(seen), frozenset(seen))


def subgroup_from_elements(degree: int, elements: Iterable[Permutation], generators=()) -> PermGroup:
    els = frozenset(tuple(x) for x in elements)
    return PermGroup(degree, tuple(generators), len(els), els)


def right_multiplication(G: GroupSpec, g) -> Permutation:
    """R(g): x -> x g on vertex indices."""
    mul, _ = tables(G)
    gi = G.index(g)
    return tuple(mul[x][gi] for x in range(G.order))


def right_regular_representation(G: GroupSpec) -> PermGroup:
    gens = [right_multiplication(G, G.a)] + ([right_multiplication(G, G.b)] if G.is_dihedral else [])
    els = frozenset(right_multiplication(G, g) for g in G.elements())
    return PermGroup(G.order, tuple(gens), len(els), els)


def orbit(A: PermGroup, v: int) -> set[int]:
    seen = {v}
    stack = [v]
    while stack:
        u = stack.pop()
        for g in A.generators:
            w = g[u]
            if w not in seen:
                seen.add(w)
                stack.append(w)
    return seen


def is_transitive(A: PermGroup) -> bool:
    return A.degree == 0 or len(orbit(A, 0)) == A.degree


def is_regular(A: PermGroup) -> bool:
    return is_transitive(A) and A.order == A.degree


def point_stabilizer(A: PermGroup, v: int, cap: int = DEFAULT_MATERIALIZE_CAP) -> PermGroup:
    A = A.materialize(cap)
    stab = [x for x in A.elements if x[v] == v]
    return subgroup_from_elements(A.degree, stab)


def _semiregular_powers(x: Permutation, n: int) -> Optional[list[Permutation]]:
    """Powers x^0..x^(n-1) if x has order n and every cycle has length n."""
    d = len(x)
    e = identity(d)
    pw = [e, x]
    for _ in range(2, n):
        pw.append(compose(pw[-1], x))
    for k in range(1, n):
        q = pw[k]
        if any(q[v] == v for v in range(d)):
            return None
    if compose(pw[-1], x) != e:
        return None
    return pw


def regular_subgroups(A: PermGroup, shape: GroupSpec, cap: int = DEFAULT_MATERIALIZE_CAP) -> list[PermGroup]:
    """All regular subgroups of A isomorphic to ``shape`` (D_2n or Z_n).

    Dihedral case: every order-n element x with two n-cycles, then every
    involution y inverting x that swaps the two <x>-orbits.  Given x, such a
    y is fixed by the image u of vertex 0, so only n candidates are built and
    tested for membership in A.
    """
    if A.degree != shape.order:
        raise ValueError(f"degree {A.degree} does not match |{shape}| = {shape.order}")
    if shape.is_dihedral and shape.n < 3:
        raise ValueError("regular dihedral search needs n >= 3")
    A = A.materialize(cap)
    n = shape.n
    els = A.elements
    found: dict[frozenset, PermGroup] = {}
    done_cyclic: set[Permutation] = set()
    for x in sorted(els):
        if x in done_cyclic or (shape.order > 1 and any(x[v] == v for v in range(A.degree))):
            continue
        pw = _semiregular_powers(x, n) if n > 1 else [x]
        if pw is None:
            continue
        for k in range(1, n):
            if math.gcd(k, n) == 1:
                done_cyclic.add(pw[k])
        if not shape.is_dihedral:
            key = frozenset(pw)
            found.setdefault(key, PermGroup(A.degree, (x,), n, key))
            continue
        o0 = [q[0] for q in pw]
        in_o0 = set(o0)
        for u in range(A.degree):
            if u in in_o0:
                continue
            y = [0] * A.degree
            for i in range(n):
                inv_i = pw[(n - i) % n]
                y[o0[i]] = inv_i[u]
                y[pw[i][u]] = o0[(n - i) % n]
            y = tuple(y)
            if y not in els:
                continue
            key = frozenset(pw + [compose(q, y) for q in pw])
            found.setdefault(key, PermGroup(A.degree, (x, y), 2 * n, key))
    return [found[k] for k in sorted(found, key=lambda s: sorted(s))]


def conjugacy_orbit(A: PermGroup, R: PermGroup, cap: int = DEFAULT_MATERIALIZE_CAP) -> dict:
    """Orbit of R under conjugation by A, as {element-set: transporter c with R^c = it}."""
    if R.elements is None:
        raise ValueError("conjugacy orbit needs R materialised")
    return _conjugacy_orbit(A.degree, tuple(A.generators), R.elements, cap)


@functools.lru_cache(maxsize=32)
def _conjugacy_orbit(degree, generators, start, cap):
    trans = {start: identity(degree)}
    queue = deque([start])
    gens = [(g, invert(g)) for g in generators]
    while queue:
        cur = queue.popleft()
        c = trans[cur]
        for g, ginv in gens:
            img = frozenset(tuple(g[r[ginv[v]]] for v in range(degree)) for r in cur)
            if img not in trans:
                trans[img] = compose(c, g)
                queue.append(img)
        if len(trans) > cap:
            raise CapExceeded("conjugacy orbit", len(trans), cap)
    return trans


def are_conjugate_subgroups(
    A: PermGroup, R1: PermGroup, R2: PermGroup, cap: int = DEFAULT_MATERIALIZE_CAP
) -> Optional[Permutation]:
    """Some c in A with R1^c = R2, or None.  Orbit-transporter search over
    conjugation by A's generators, so A itself is never enumerated."""
    if R1.elements is None or R2.elements is None:
        raise ValueError("R1 and R2 must be materialised")
    if R1.order != R2.order:
        return None
    if R1.elements == R2.elements:
        return identity(A.degree)
    # the orbit of R2 is cached, so repeated queries against one target are cheap
    c = conjugacy_orbit(A, R2, cap).get(R1.elements)
    return None if c is None else invert(c)


def cyclic_core(R: PermGroup, n: int) -> PermGroup:
    """The unique cyclic subgroup of order n of a dihedral group R of order 2n (n >= 3)."""
    for x in sorted(R.elements):
        if order(x) == n:
            pw = [power(x, k) for k in range(n)]
            return subgroup_from_elements(R.degree, pw, (x,))
    raise ValueError("R has no element of order n")


def dihedral_conjugacy_via_cyclic(
    A: PermGroup, R: PermGroup, n: int, reference_core: Optional[PermGroup] = None,
    cap: int = DEFAULT_MATERIALIZE_CAP,
) -> bool:
    """Is the order-n cyclic subgroup of R conjugate in A to <R(a)>?

    ``reference_core`` defaults to <R(a)> on the standard vertex labelling,
    i.e. ``x -> x a`` on indices ``ref * n + rot``.
    """
    if n < 3:
        raise ValueError("needs n >= 3")
    if reference_core is None:
        ra = right_multiplication(GroupSpec.dihedral(n), (1, 0))
        reference_core = subgroup_from_elements(2 * n, [power(ra, k) for k in range(n)], (ra,))
    core = cyclic_core(R, n)
    return are_conjugate_subgroups(A, core, reference_core, cap) is not None
