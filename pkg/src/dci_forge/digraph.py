"""Digraphs, Cayley digraphs, colour refinement, isomorphism and canonical forms.

Two independent search routines live here:

* ``find_isomorphism`` runs a direct refinement-guided backtracking search
  between two digraphs (no automorphism pruning, no certificates).
* ``canonical_search`` walks the individualisation-refinement tree of one
  digraph with orbit pruning and back-jumping, returning the least leaf
  certificate, a generating set of Aut and its exact order.

They share only ``refine_colors``.
"""

from __future__ import annotations

import functools
import math
from dataclasses import dataclass, field
from typing import Iterable, Optional, Sequence

from .errors import CapExceeded
from .groups import GroupSpec, format_element, parse_element, tables
from .permgroup import PermGroup

DEFAULT_ORDER_CAP = 10**7


@dataclass(frozen=True)
class Digraph:
    vcount: int
    out: tuple  # out[u] = sorted tuple of out-neighbours
    labels: Optional[tuple] = field(default=None, compare=False)
    group: Optional[GroupSpec] = field(default=None, compare=False)

    def __post_init__(self):
        if len(self.out) != self.vcount:
            raise ValueError("out-neighbour table has the wrong length")
        inn = [[] for _ in range(self.vcount)]
        masks = []
        for u, nbrs in enumerate(self.out):
            mask = 0
            for v in nbrs:
                if v == u:
                    raise ValueError(f"loop at vertex {u}")
                if not 0 <= v < self.vcount:
                    raise ValueError(f"arc ({u},{v}) leaves the vertex range")
                inn[v].append(u)
                mask |= 1 << v
            masks.append(mask)
        object.__setattr__(self, "inn", tuple(tuple(x) for x in inn))
        object.__setattr__(self, "masks", tuple(masks))

    @classmethod
    def from_arcs(cls, vcount: int, arcs: Iterable[tuple[int, int]], labels=None, group=None) -> "Digraph":
        out = [set() for _ in range(vcount)]
        for u, v in arcs:
            out[u].add(v)
        return cls(vcount, tuple(tuple(sorted(s)) for s in out), labels, group)

    def has_arc(self, u: int, v: int) -> bool:
        return bool(self.masks[u] >> v & 1)

    def arcs(self) -> list[tuple[int, int]]:
        return [(u, v) for u in range(self.vcount) for v in self.out[u]]

    @property
    def arc_count(self) -> int:
        return sum(len(x) for x in self.out)

    def relabel(self, f: Sequence[int]) -> "Digraph":
        """The digraph with arcs (f[u], f[v])."""
        return Digraph.from_arcs(self.vcount, ((f[u], f[v]) for u, v in self.arcs()))

    def complement(self) -> "Digraph":
        V = self.vcount
        return Digraph.from_arcs(
            V, ((u, v) for u in range(V) for v in range(V) if u != v and not self.has_arc(u, v)),
            self.labels, self.group,
        )

    def to_json(self) -> dict:
        labels = None
        if self.labels is not None and self.group is not None:
            labels = [format_element(self.group, g) for g in self.labels]
        return {"vcount": self.vcount, "arcs": [list(a) for a in self.arcs()], "labels": labels}

    @classmethod
    def from_json(cls, data: dict, group: Optional[GroupSpec] = None) -> "Digraph":
        labels = data.get("labels")
        if labels is not None and group is not None:
            labels = tuple(parse_element(group, s) for s in labels)
        elif labels is not None:
            labels = None
        return cls.from_arcs(data["vcount"], (tuple(a) for a in data["arcs"]), labels, group)


def cayley_digraph(G: GroupSpec, S: Iterable) -> Digraph:
    """Cay(G, S): vertex i is ``G.element(i)``; arcs (g, s g) for s in S."""
    mul, _ = tables(G)
    s_idx = sorted({G.index(s) for s in S})
    if 0 in s_idx:
        raise ValueError("connection set contains the identity")
    out = tuple(tuple(sorted(mul[s][u] for s in s_idx)) for u in range(G.order))
    return Digraph(G.order, out, G.elements(), G)


def is_isomorphism(gamma: Digraph, sigma: Digraph, f: Sequence[int]) -> bool:
    """True iff f is a bijection with (u,v) an arc of gamma <=> (f u, f v) an arc of sigma."""
    V = gamma.vcount
    if sigma.vcount != V or len(f) != V or sorted(f) != list(range(V)):
        return False
    if gamma.arc_count != sigma.arc_count:
        return False
    return all(sigma.has_arc(f[u], f[v]) for u, v in gamma.arcs())


def is_automorphism(gamma: Digraph, f: Sequence[int]) -> bool:
    return is_isomorphism(gamma, gamma, f)


def coset_bipartite_check(gamma: Digraph, U: Iterable[int], W: Iterable[int]) -> bool:
    """True iff every (u, w) with u in U, w in W is an arc of gamma."""
    U, W = set(U), set(W)
    if U & W or len(U) != len(W):
        raise ValueError("U and W must be disjoint and of equal size")
    if not U:
        return True
    wmask = sum(1 << w for w in W)
    return all(gamma.masks[u] & wmask == wmask for u in U)


# --- colour refinement ----------------------------------------------------


def _normalise(colors: Sequence[int]) -> list[int]:
    rank = {c: i for i, c in enumerate(sorted(set(colors)))}
    return [rank[c] for c in colors]


def _refine(out, inn, colors: list[int]) -> list[int]:
    k = len(set(colors))
    V = len(colors)
    while True:
        sigs = [
            (colors[v], tuple(sorted([colors[w] for w in out[v]])), tuple(sorted([colors[w] for w in inn[v]])))
            for v in range(V)
        ]
        uniq = sorted(set(sigs))
        if len(uniq) == k:
            return colors
        rank = {s: i for i, s in enumerate(uniq)}
        colors = [rank[s] for s in sigs]
        k = len(uniq)


def refine_colors(gamma: Digraph, initial: Optional[Sequence[int]] = None) -> list[int]:
    """Coarsest equitable refinement of ``initial`` (in- and out-neighbour colour multisets).

    Colours are ranks of label-free signatures, so the result is
    isomorphism-invariant and uses the contiguous range 0..k-1.
    """
    if initial is None:
        initial = [0] * gamma.vcount
    return _refine(gamma.out, gamma.inn, _normalise(initial))


def _individualise(colors: list[int], v: int) -> list[int]:
    # v is split off in front of the rest of its cell
    keyed = [(c, 0 if u == v else 1) for u, c in enumerate(colors)]
    rank = {key: i for i, key in enumerate(sorted(set(keyed)))}
    return [rank[key] for key in keyed]


def _target_cell(colors: Sequence[int], vertices: Iterable[int]) -> Optional[list[int]]:
    """Smallest non-singleton cell (ties to the smallest colour), members ascending."""
    cells: dict[int, list[int]] = {}
    for v in vertices:
        cells.setdefault(colors[v], []).append(v)
    best = None
    for c in sorted(cells):
        cell = cells[c]
        if len(cell) > 1 and (best is None or len(cell) < len(best)):
            best = cell
    return best


# --- direct isomorphism search ---------------------------------------------


def find_isomorphism(gamma: Digraph, sigma: Digraph) -> Optional[list[int]]:
    """A vertex bijection gamma -> sigma preserving arcs both ways, or None.

    Refinement runs on the disjoint union so that colours are comparable
    between the two sides; branches whose colour histograms differ are cut.
    """
    V = gamma.vcount
    if sigma.vcount != V or gamma.arc_count != sigma.arc_count:
        return None
    out = gamma.out + tuple(tuple(w + V for w in nb) for nb in sigma.out)
    inn = gamma.inn + tuple(tuple(w + V for w in nb) for nb in sigma.inn)
    left = range(V)

    def balanced(colors):
        counts: dict[int, int] = {}
        for v in range(V):
            counts[colors[v]] = counts.get(colors[v], 0) + 1
        for v in range(V, 2 * V):
            counts[colors[v]] = counts.get(colors[v], 0) - 1
        return not any(counts.values())

    def search(colors):
        if not balanced(colors):
            return None
        cell = _target_cell(colors, left)
        if cell is None:
            where = {colors[v]: v - V for v in range(V, 2 * V)}
            f = [where[colors[u]] for u in range(V)]
            return f if is_isomorphism(gamma, sigma, f) else None
        v = cell[0]
        for w in range(V, 2 * V):
            if colors[w] != colors[v]:
                continue
            keyed = [(c, 0 if u in (v, w) else 1) for u, c in enumerate(colors)]
            rank = {key: i for i, key in enumerate(sorted(set(keyed)))}
            child = _refine(out, inn, [rank[key] for key in keyed])
            found = search(child)
            if found is not None:
                return found
        return None

    return search(_refine(out, inn, [0] * (2 * V)))


# --- canonical labelling with automorphism pruning ------------------------


class _UnionFind:
    def __init__(self, n):
        self.parent = list(range(n))

    def find(self, x):
        p = self.parent
        while p[x] != x:
            p[x] = p[p[x]]
            x = p[x]
        return x

    def union(self, x, y) -> bool:
        rx, ry = self.find(x), self.find(y)
        if rx == ry:
            return False
        self.parent[max(rx, ry)] = min(rx, ry)
        return True


@dataclass
class CanonicalResult:
    certificate: tuple  # rows of the relabelled adjacency matrix, as ints
    labeling: tuple  # labeling[v] = canonical position of vertex v
    generators: list  # generating set of Aut
    order: int
    leaves: int


class _CanonSearch:
    def __init__(self, out, inn):
        self.out, self.inn = out, inn
        self.V = len(out)
        self.leaves = {}
        self.gens = []
        self.best = None
        self.first_path = None
        self.visited = 0

    def gens_fixing(self, prefix):
        return [g for g in self.gens if all(g[v] == v for v in prefix)]

    def orbits(self, prefix):
        uf = _UnionFind(self.V)
        for g in self.gens_fixing(prefix):
            for v in range(self.V):
                uf.union(v, g[v])
        return uf

    def certificate(self, lab):
        inv = [0] * self.V
        for v, p in enumerate(lab):
            inv[p] = v
        rows = []
        for p in range(self.V):
            row = 0
            for w in self.out[inv[p]]:
                row |= 1 << lab[w]
            rows.append(row)
        return tuple(rows), inv

    def leaf(self, lab, path):
        self.visited += 1
        if self.first_path is None:
            self.first_path = path
        cert, inv = self.certificate(lab)
        hit = self.leaves.get(cert)
        if hit is None:
            self.leaves[cert] = (inv, path)
            if self.best is None or cert < self.best[0]:
                self.best = (cert, tuple(lab))
            return None
        other_inv, other_path = hit
        gamma = tuple(other_inv[lab[v]] for v in range(self.V))
        if all(gamma[v] == v for v in range(self.V)):
            return None
        j = 0
        while j < min(len(path), len(other_path)) and path[j] == other_path[j]:
            j += 1
        uf = self.orbits(path[:j])
        if any(uf.find(v) != uf.find(gamma[v]) for v in range(self.V)):
            self.gens.append(gamma)
        if len(path) == len(other_path) and all(gamma[a] == b for a, b in zip(path, other_path)):
            return j
        return None

    def explore(self, colors, path):
        d = len(path)
        cell = _target_cell(colors, range(self.V))
        if cell is None:
            return self.leaf(colors, path)
        explored = []
        ngens = -1
        uf = None
        for w in cell:
            if explored:
                if ngens != len(self.gens):
                    uf, ngens = self.orbits(path), len(self.gens)
                rw = uf.find(w)
                if any(uf.find(e) == rw for e in explored):
                    continue
            explored.append(w)
            child = _refine(self.out, self.inn, _individualise(colors, w))
            r = self.explore(child, path + (w,))
            if r is not None and r < d:
                return r
        return None

    def run(self, initial):
        self.explore(_refine(self.out, self.inn, _normalise(initial)), ())
        order = 1
        fp = self.first_path
        for k in range(len(fp)):
            uf = self.orbits(fp[:k])
            root = uf.find(fp[k])
            order *= sum(1 for v in range(self.V) if uf.find(v) == root)
        cert, lab = self.best
        return CanonicalResult(cert, lab, list(self.gens), order, self.visited)


@functools.lru_cache(maxsize=1 << 16)
def _canonical_cached(out, inn, initial):
    return _CanonSearch(out, inn).run(list(initial))


def canonical_search(gamma: Digraph, initial: Optional[Sequence[int]] = None) -> CanonicalResult:
    if initial is None:
        initial = (0,) * gamma.vcount
    return _canonical_cached(gamma.out, gamma.inn, tuple(initial))


def canonical_labeling(gamma: Digraph) -> tuple:
    return canonical_search(gamma).labeling


def canonical_form(gamma: Digraph) -> bytes:
    """Isomorphism-class fingerprint: vertex count, then adjacency rows of the canonical relabelling."""
    res = canonical_search(gamma)
    width = max(1, (gamma.vcount + 7) // 8)
    return gamma.vcount.to_bytes(4, "big") + b"".join(r.to_bytes(width, "big") for r in res.certificate)


def automorphism_group(gamma: Digraph, order_cap: int = DEFAULT_ORDER_CAP) -> PermGroup:
    """Generators and exact order of Aut(gamma); CapExceeded above ``order_cap``."""
    res = canonical_search(gamma)
    if res.order > order_cap:
        raise CapExceeded("Aut(digraph)", res.order, order_cap)
    gens = tuple(sorted(res.generators))
    return PermGroup(gamma.vcount, gens, res.order)


def is_connected(gamma: Digraph) -> bool:
    """Weak connectivity (equivalent to strong connectivity for Cayley digraphs)."""
    V = gamma.vcount
    if V == 0:
        return True
    seen = {0}
    stack = [0]
    while stack:
        u = stack.pop()
        for w in gamma.out[u] + gamma.inn[u]:
            if w not in seen:
                seen.add(w)
                stack.append(w)
    return len(seen) == V


