"""Exact arithmetic in dihedral and cyclic groups.

Elements are stored in the normal form ``a^rot * b^ref`` of the presentation
``<a, b | a^n = b^2 = 1, b a b = a^-1>``.  Cyclic groups ``Z_n`` reuse the same
encoding with ``ref`` pinned to 0.  Everything here is a pure function of its
inputs; multiplication tables are memoised per group.
"""

from __future__ import annotations

import functools
import itertools
import math
import re
from dataclasses import dataclass, field
from typing import Iterable, Mapping, NamedTuple

from .errors import NoExtension

DIHEDRAL = "dihedral"
CYCLIC = "cyclic"


class GroupElement(NamedTuple):
    rot: int
    ref: int = 0


@dataclass(frozen=True, order=True)
class GroupSpec:
    kind: str
    n: int

    def __post_init__(self):
        if self.kind not in (DIHEDRAL, CYCLIC):
            raise ValueError(f"unknown group kind {self.kind!r}")
        if self.n < 1:
            raise ValueError("n must be positive")

    @classmethod
    def dihedral(cls, n: int) -> "GroupSpec":
        return cls(DIHEDRAL, n)

    @classmethod
    def cyclic(cls, n: int) -> "GroupSpec":
        return cls(CYCLIC, n)

    @classmethod
    def parse(cls, text: str) -> "GroupSpec":
        """Parse ``"D18"`` (dihedral of order 18) or ``"Z9"``."""
        m = re.fullmatch(r"\s*([DZ])_?(\d+)\s*", text)
        if not m:
            raise ValueError(f"cannot parse group {text!r}")
        order = int(m.group(2))
        if m.group(1) == "Z":
            return cls.cyclic(order)
        if order % 2 or order < 2:
            raise ValueError(f"dihedral group order must be even, got {order}")
        return cls.dihedral(order // 2)

    @property
    def is_dihedral(self) -> bool:
        return self.kind == DIHEDRAL

    @property
    def order(self) -> int:
        return 2 * self.n if self.is_dihedral else self.n

    @property
    def name(self) -> str:
        return f"{'D' if self.is_dihedral else 'Z'}{self.order}"

    def __str__(self):
        return self.name

    @property
    def identity(self) -> GroupElement:
        return GroupElement(0, 0)

    @property
    def a(self) -> GroupElement:
        return GroupElement(1 % self.n, 0)

    @property
    def b(self) -> GroupElement:
        if not self.is_dihedral:
            raise ValueError("cyclic groups have no reflection b")
        return GroupElement(0, 1)

    def elements(self) -> tuple[GroupElement, ...]:
        """All elements, sorted by ``(ref, rot)``, which is also vertex order."""
        return _elements(self)

    def index(self, g: GroupElement) -> int:
        return g[1] * self.n + g[0]

    def element(self, i: int) -> GroupElement:
        return GroupElement(i % self.n, i // self.n)

    def contains(self, g) -> bool:
        return (
            isinstance(g, tuple)
            and len(g) == 2
            and 0 <= g[0] < self.n
            and g[1] in ((0, 1) if self.is_dihedral else (0,))
        )


def sort_key(g: GroupElement):
    return (g.ref, g.rot)


@functools.lru_cache(maxsize=None)
def _elements(G: GroupSpec) -> tuple[GroupElement, ...]:
    refs = (0, 1) if G.is_dihedral else (0,)
    return tuple(GroupElement(i, d) for d in refs for i in range(G.n))


@functools.lru_cache(maxsize=64)
def tables(G: GroupSpec) -> tuple[tuple[tuple[int, ...], ...], tuple[int, ...]]:
    """Multiplication table and inverse table over element indices."""
    elems = G.elements()
    mul = tuple(tuple(G.index(_mul(G.n, g, h)) for h in elems) for g in elems)
    inv = tuple(G.index(_inv(G.n, g)) for g in elems)
    return mul, inv


def _mul(n: int, g: GroupElement, h: GroupElement) -> GroupElement:
    if g.ref == 0:
        return GroupElement((g.rot + h.rot) % n, h.ref)
    return GroupElement((g.rot - h.rot) % n, 1 ^ h.ref)


def _inv(n: int, g: GroupElement) -> GroupElement:
    if g.ref:
        return g
    return GroupElement((-g.rot) % n, 0)


def multiply(G: GroupSpec, g: GroupElement, h: GroupElement) -> GroupElement:
    return _mul(G.n, GroupElement(*g), GroupElement(*h))


def inverse(G: GroupSpec, g: GroupElement) -> GroupElement:
    return _inv(G.n, GroupElement(*g))


def product(G: GroupSpec, *gs: GroupElement) -> GroupElement:
    out = G.identity
    for g in gs:
        out = multiply(G, out, g)
    return out


def power(G: GroupSpec, g: GroupElement, k: int) -> GroupElement:
    g = GroupElement(*g)
    if g.ref:
        return g if k % 2 else G.identity
    return GroupElement((g.rot * k) % G.n, 0)


def element_order(G: GroupSpec, g: GroupElement) -> int:
    g = GroupElement(*g)
    if g.ref:
        return 2
    return G.n // math.gcd(G.n, g.rot)


# --- automorphisms --------------------------------------------------------


class GroupAutomorphism(NamedTuple):
    """``a -> a^r``, ``b -> a^s b``.  For cyclic groups ``s`` is always 0."""

    r: int
    s: int = 0


def apply(G: GroupSpec, alpha: GroupAutomorphism, g: GroupElement) -> GroupElement:
    rot = (alpha.r * g[0]) % G.n
    if g[1]:
        return GroupElement((rot + alpha.s) % G.n, 1)
    return GroupElement(rot, 0)


def apply_set(G: GroupSpec, alpha: GroupAutomorphism, X: Iterable[GroupElement]) -> frozenset:
    return frozenset(apply(G, alpha, g) for g in X)


def compose(G: GroupSpec, alpha: GroupAutomorphism, beta: GroupAutomorphism) -> GroupAutomorphism:
    """The automorphism "alpha first, then beta"."""
    n = G.n
    return GroupAutomorphism((alpha.r * beta.r) % n, (alpha.s * beta.r + beta.s) % n if G.is_dihedral else 0)


def invert(G: GroupSpec, alpha: GroupAutomorphism) -> GroupAutomorphism:
    n = G.n
    rinv = pow(alpha.r, -1, n) if n > 1 else 0
    return GroupAutomorphism(rinv, (-alpha.s * rinv) % n if G.is_dihedral else 0)


def index_map(G: GroupSpec, alpha: GroupAutomorphism) -> tuple[int, ...]:
    return tuple(G.index(apply(G, alpha, g)) for g in G.elements())


def _is_automorphism(G: GroupSpec, images: tuple[int, ...]) -> bool:
    if len(set(images)) != len(images):
        return False
    mul, _ = tables(G)
    N = len(images)
    for i in range(N):
        fi = images[i]
        row, frow = mul[i], mul[fi]
        for j in range(N):
            if images[row[j]] != frow[images[j]]:
                return False
    return True


@functools.lru_cache(maxsize=64)
def automorphisms(G: GroupSpec) -> tuple[GroupAutomorphism, ...]:
    """All of Aut(G), sorted by ``(r, s)``.

    Every candidate of the parametric family is checked against the full
    multiplication table instead of being trusted.
    """
    if G.is_dihedral and G.n < 3:
        raise ValueError("automorphisms of D_2 and D_4 fall outside the (r, s) family")
    n = G.n
    units = [r for r in range(n) if math.gcd(r, n) == 1] if n > 1 else [0]
    shifts = range(n) if G.is_dihedral else (0,)
    out = []
    for r in units:
        for s in shifts:
            alpha = GroupAutomorphism(r, s)
            if _is_automorphism(G, index_map(G, alpha)):
                out.append(alpha)
    return tuple(out)


# --- subsets and subgroups ------------------------------------------------

ConnectionSet = frozenset


def connection_set(G: GroupSpec, elements: Iterable) -> frozenset:
    """Validate and freeze a connection set (identity-free subset of G)."""
    S = frozenset(GroupElement(*g) for g in elements)
    for g in S:
        if not G.contains(g):
            raise ValueError(f"{g} is not an element of {G}")
    if G.identity in S:
        raise ValueError("a connection set may not contain the identity")
    return S


def complement_set(G: GroupSpec, S: Iterable[GroupElement]) -> frozenset:
    S = frozenset(S)
    return frozenset(g for g in G.elements() if g != G.identity and g not in S)


def sorted_elements(X: Iterable[GroupElement]) -> list[GroupElement]:
    return sorted(X, key=sort_key)


@dataclass(frozen=True)
class Subgroup:
    members: frozenset
    generators: tuple = field(default=(), compare=False)

    @property
    def order(self) -> int:
        return len(self.members)

    def __contains__(self, g):
        return g in self.members

    def __iter__(self):
        return iter(sorted_elements(self.members))


def subgroup_generated(G: GroupSpec, X: Iterable[GroupElement]) -> Subgroup:
    gens = tuple(sorted_elements({GroupElement(*x) for x in X}))
    members = {G.identity}
    frontier = [G.identity]
    while frontier:
        nxt = []
        for h in frontier:
            for g in gens:
                k = multiply(G, h, g)
                if k not in members:
                    members.add(k)
                    nxt.append(k)
        frontier = nxt
    return Subgroup(frozenset(members), gens)


def is_normal(G: GroupSpec, H: Subgroup) -> bool:
    gens = [G.a] + ([G.b] if G.is_dihedral else [])
    for g in gens:
        gi = inverse(G, g)
        for h in H.members:
            if product(G, gi, h, g) not in H.members:
                return False
    return True


def subgroups(G: GroupSpec) -> list[Subgroup]:
    """Every subgroup of G: the rotation subgroups <a^d> and, for dihedral G,
    the dihedral subgroups <a^d, a^j b>."""
    n = G.n
    out = []
    for d in (d for d in range(1, n + 1) if n % d == 0):
        rot = GroupElement(d % n, 0)
        out.append(subgroup_generated(G, [rot] if d < n else []))
        if G.is_dihedral:
            for j in range(d):
                gens = ([rot] if d < n else []) + [GroupElement(j, 1)]
                out.append(subgroup_generated(G, gens))
    return out


def subgroup_shape(G: GroupSpec, H: Subgroup) -> GroupSpec:
    """The abstract group (cyclic or dihedral) isomorphic to H."""
    refl = sum(1 for h in H.members if h.ref)
    if refl == 0 or H.order <= 2:
        return GroupSpec.cyclic(H.order)
    return GroupSpec.dihedral(H.order // 2)


def homomorphism_from_generators(
    G: GroupSpec, gens: Iterable[GroupElement], images: Iterable[GroupElement]
) -> dict:
    """Extend ``gens[i] -> images[i]`` to a homomorphism on ``<gens>``.

    Raises ValueError when the assignment is not well defined.
    """
    gens = [GroupElement(*g) for g in gens]
    images = [GroupElement(*g) for g in images]
    if len(gens) != len(images):
        raise ValueError("gens and images differ in length")
    f = {G.identity: G.identity}
    frontier = [G.identity]
    while frontier:
        nxt = []
        for x in frontier:
            for g, img in zip(gens, images):
                y = multiply(G, x, g)
                fy = multiply(G, f[x], img)
                if y in f:
                    if f[y] != fy:
                        raise ValueError("generator images do not define a homomorphism")
                else:
                    f[y] = fy
                    nxt.append(y)
        frontier = nxt
    # consistency on every (element, generator) edge, including closing edges
    for x in f:
        for g, img in zip(gens, images):
            if f[multiply(G, x, g)] != multiply(G, f[x], img):
                raise ValueError("generator images do not define a homomorphism")
    return f


def subgroup_isomorphisms(G: GroupSpec, H: Subgroup, K: Subgroup):
    """Yield every isomorphism H -> K as a dict (brute force over generator images)."""
    if H.order != K.order:
        return
    gens = list(H.generators) or []
    if not gens:
        if H.order == 1:
            yield {G.identity: G.identity}
        return
    seen = set()
    for imgs in itertools.product(sorted_elements(K.members), repeat=len(gens)):
        try:
            f = homomorphism_from_generators(G, gens, imgs)
        except ValueError:
            continue
        if len(f) != H.order or set(f.values()) != K.members:
            continue
        key = tuple(sorted(f.items()))
        if key not in seen:
            seen.add(key)
            yield f


def extend_subgroup_isomorphism(
    G: GroupSpec, H: Subgroup, K: Subgroup, f: Mapping
) -> GroupAutomorphism:
    """First automorphism of G (in (r, s) order) that agrees with f on H."""
    items = [(GroupElement(*h), GroupElement(*fh)) for h, fh in f.items()]
    for alpha in automorphisms(G):
        if all(apply(G, alpha, h) == fh for h, fh in items):
            return alpha
    raise NoExtension(f"no automorphism of {G} extends the given map on a subgroup of order {H.order}")


# --- text form ------------------------------------------------------------

_FACTOR = re.compile(r"\s*(?:(a)(?:\^\{?(-?\d+)\}?)?|(b)|(e)|(1))\s*\*?")


def parse_element(G: GroupSpec, text: str) -> GroupElement:
    """Parse ``e``, ``a``, ``a^3``, ``b``, ``b*a^2``, ``a^2*b`` ... as a product.

    For cyclic groups a bare integer ``k`` means ``a^k``.
    """
    s = text.strip()
    if not G.is_dihedral and re.fullmatch(r"-?\d+", s):
        return GroupElement(int(s) % G.n, 0)
    if not s:
        raise ValueError("empty element string")
    pos, g = 0, G.identity
    while pos < len(s):
        m = _FACTOR.match(s, pos)
        if not m or m.end() == pos:
            raise ValueError(f"cannot parse element {text!r} in {G}")
        if m.group(1):
            k = int(m.group(2)) if m.group(2) is not None else 1
            g = multiply(G, g, GroupElement(k % G.n, 0))
        elif m.group(3):
            if not G.is_dihedral:
                raise ValueError(f"{G} has no element b")
            g = multiply(G, g, G.b)
        pos = m.end()
    return g


def format_element(G: GroupSpec, g: GroupElement) -> str:
    """``a^i`` for rotations and ``b*a^i`` for reflections (``b*a^i = a^-i b``)."""
    g = GroupElement(*g)
    if g.ref == 0:
        if g.rot == 0:
            return "e"
        return "a" if g.rot == 1 else f"a^{g.rot}"
    i = (-g.rot) % G.n
    if i == 0:
        return "b"
    return "b*a" if i == 1 else f"b*a^{i}"


def format_set(G: GroupSpec, X: Iterable[GroupElement]) -> list[str]:
    return [format_element(G, g) for g in sorted_elements(X)]


def least_prime_divisor(n: int) -> int:
    for p in range(2, math.isqrt(n) + 1):
        if n % p == 0:
            return p
    return n


def is_prime(n: int) -> bool:
    return n >= 2 and least_prime_divisor(n) == n


def totient(n: int) -> int:
    return sum(1 for k in range(1, n + 1) if math.gcd(k, n) == 1)
