import itertools

from hypothesis import HealthCheck, settings

from dci_forge.groups import GroupSpec

settings.register_profile("default", deadline=None, suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")


def brute_isomorphism(gamma, sigma):
    """First bijection (in lexicographic order) carrying arcs onto arcs.

    Plain depth-first search over all bijections; a partial map is dropped as
    soon as two assigned vertices disagree on adjacency.
    """
    V = gamma.vcount
    if V != sigma.vcount or gamma.arc_count != sigma.arc_count:
        return None
    f = []
    used = [False] * V

    def extend():
        u = len(f)
        if u == V:
            return True
        for x in range(V):
            if used[x]:
                continue
            if gamma.has_arc(u, u) != sigma.has_arc(x, x):
                continue
            if any(gamma.has_arc(u, w) != sigma.has_arc(x, f[w]) or gamma.has_arc(w, u) != sigma.has_arc(f[w], x)
                   for w in range(u)):
                continue
            f.append(x)
            used[x] = True
            if extend():
                return True
            f.pop()
            used[x] = False
        return False

    return tuple(f) if extend() else None


def brute_automorphisms(gamma):
    arcs = gamma.arcs()
    return [f for f in itertools.permutations(range(gamma.vcount)) if all(gamma.has_arc(f[u], f[v]) for u, v in arcs)]


def brute_group_automorphisms(G: GroupSpec):
    """Automorphisms as index maps, found by sending the generators anywhere
    and keeping the images that extend to bijective homomorphisms."""
    gens = [G.a, G.b] if G.is_dihedral else [G.a]
    found = []
    for imgs in itertools.product(G.elements(), repeat=len(gens)):
        f = {G.identity: G.identity}
        frontier = [G.identity]
        ok = True
        while frontier and ok:
            nxt = []
            for x in frontier:
                for g, h in zip(gens, imgs):
                    y = _mul(G, x, g)
                    fy = _mul(G, f[x], h)
                    if y in f:
                        if f[y] != fy:
                            ok = False
                            break
                    else:
                        f[y] = fy
                        nxt.append(y)
                if not ok:
                    break
            frontier = nxt
        if ok and len(set(f.values())) == G.order:
            if all(f[_mul(G, x, y)] == _mul(G, f[x], f[y]) for x in G.elements() for y in G.elements()):
                found.append(tuple(G.index(f[x]) for x in G.elements()))
    return found


def _affine(G, g):
    # a^i b^d acts on Z_n as x -> (-1)^d x + i
    return tuple(((-1) ** g[1] * x + g[0]) % G.n for x in range(G.n))


def _mul(G, g, h):
    """Product read off by composing affine maps of Z_n (independent of the package tables)."""
    if not G.is_dihedral:
        return type(g)((g[0] + h[0]) % G.n, 0)
    fg, fh = _affine(G, g), _affine(G, h)
    comp = tuple(fg[fh[x]] for x in range(G.n))
    for c in G.elements():
        if _affine(G, c) == comp:
            return c
    raise AssertionError("not closed")


SMALL_GROUPS = [GroupSpec.cyclic(n) for n in range(3, 9)] + [GroupSpec.dihedral(n) for n in (3, 4, 5)]
