"""Explicit pairs (S, T) with Cay(G,S) isomorphic to Cay(G,T) but no
automorphism of G taking S to T, built from coset-wise twisting maps.

Every pair carries its vertex isomorphism ``phi`` and is re-checked
mechanically by ``verify_witness`` before anyone relies on it.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from typing import Iterable, Mapping, Optional

from .ci import Budget, cayley_isomorphism, is_ci_definition, orbit_representatives
from .digraph import cayley_digraph, is_isomorphism
from .errors import InvalidConstruction, OutOfRange, VerificationFailed
from .groups import (
    GroupElement,
    GroupSpec,
    Subgroup,
    apply,
    automorphisms,
    complement_set,
    format_set,
    homomorphism_from_generators,
    inverse,
    is_normal,
    is_prime,
    multiply,
    sort_key,
    sorted_elements,
    subgroup_generated,
    subgroups,
)


@dataclass(frozen=True)
class WitnessPair:
    G: GroupSpec
    S: frozenset
    T: frozenset
    phi: tuple
    non_ci_checked: bool
    case: str = ""

    @property
    def m(self) -> int:
        return len(self.S)

    def to_json(self) -> dict:
        return {
            "group": self.G.name,
            "S": format_set(self.G, self.S),
            "T": format_set(self.G, self.T),
            "phi": list(self.phi),
            "non_ci_checked": self.non_ci_checked,
            "case": self.case,
        }

    def complement(self) -> "WitnessPair":
        """Complements in G minus 1 share phi, and stay non-CI."""
        return WitnessPair(
            self.G, complement_set(self.G, self.S), complement_set(self.G, self.T),
            self.phi, self.non_ci_checked, self.case + "/complement",
        )


@dataclass(frozen=True)
class CosetConstruction:
    G: GroupSpec
    H: Subgroup
    M: Subgroup
    C: frozenset
    S_M: frozenset
    T_M: frozenset
    alpha: Mapping = field(hash=False)
    transversal: tuple = ()

    def __post_init__(self):
        if not self.transversal:
            object.__setattr__(self, "transversal", right_transversal(self.G, self.M))


def right_transversal(G: GroupSpec, M: Subgroup) -> tuple:
    """Least element (in vertex order) of every right coset M g."""
    seen, reps = set(), []
    for g in G.elements():
        if g in seen:
            continue
        coset = {multiply(G, m, g) for m in M.members}
        reps.append(min(coset, key=sort_key))
        seen |= coset
    return tuple(reps)


def _coset_of(G: GroupSpec, H: Subgroup, x: GroupElement) -> frozenset:
    return frozenset(multiply(G, h, x) for h in H.members)


def check_coset_construction(cc: CosetConstruction) -> list[str]:
    """Names of the violated invariants (empty when cc is valid)."""
    G, H, M = cc.G, cc.H, cc.M
    bad = []
    for name, K in (("H", H), ("M", M)):
        if subgroup_generated(G, K.members).members != K.members:
            bad.append(f"{name} is not a subgroup")
    if not H.members <= M.members:
        bad.append("H is not contained in M")
    if not is_normal(G, H):
        bad.append("H is not normal in G")
    if cc.C & H.members:
        bad.append("C meets H")
    if any(_coset_of(G, H, c) - cc.C for c in cc.C):
        bad.append("C is not a union of H-cosets")
    for name, X in (("S_M", cc.S_M), ("T_M", cc.T_M)):
        if not X <= M.members - {G.identity}:
            bad.append(f"{name} is not a subset of M minus 1")
    alpha = dict(cc.alpha)
    if set(alpha) != M.members or set(alpha.values()) != M.members:
        bad.append("alpha is not a bijection of M")
    else:
        if any(alpha[multiply(G, x, y)] != multiply(G, alpha[x], alpha[y]) for x in M.members for y in M.members):
            bad.append("alpha is not a homomorphism")
        if frozenset(alpha[s] for s in cc.S_M) != cc.T_M:
            bad.append("S_M^alpha != T_M")
        if any(multiply(G, alpha[x], inverse(G, x)) not in H.members for x in M.members):
            bad.append("alpha moves an H-coset of M")
    covered = set()
    for g in cc.transversal:
        coset = {multiply(G, m, g) for m in M.members}
        if coset & covered:
            bad.append("transversal repeats an M-coset")
            break
        covered |= coset
    if len(covered) != G.order:
        bad.append("transversal does not cover G")
    return bad


def lemma31_pair(cc: CosetConstruction) -> WitnessPair:
    """S = C u S_M, T = C u T_M with phi: m g_k -> m^alpha g_k."""
    bad = check_coset_construction(cc)
    if bad:
        raise InvalidConstruction(bad)
    G = cc.G
    S = frozenset(cc.C | cc.S_M)
    T = frozenset(cc.C | cc.T_M)
    if G.identity in S or G.identity in T:
        raise InvalidConstruction("identity in S or T")
    phi = [None] * G.order
    for g in cc.transversal:
        for m in cc.M.members:
            phi[G.index(multiply(G, m, g))] = G.index(multiply(G, cc.alpha[m], g))
    phi = tuple(phi)
    for x in G.elements():
        if G.element(phi[G.index(x)]) not in _coset_of(G, cc.H, x):
            raise VerificationFailed("coset-fixing", f"phi moves {x} out of its H-coset")
    if not is_isomorphism(cayley_digraph(G, S), cayley_digraph(G, T), phi):
        raise VerificationFailed("arc-preservation", "phi is not an isomorphism")
    return WitnessPair(G, S, T, phi, False, "lemma31")


def _aut_scan(w: WitnessPair) -> WitnessPair:
    if cayley_isomorphism(w.G, w.S, w.T) is not None:
        raise VerificationFailed("aut-scan", f"{w.case}: T is an automorphic image of S")
    return WitnessPair(w.G, w.S, w.T, w.phi, True, w.case)


# --- even n ------------------------------------------------------------------


def lemma32_pair(n: int, H: Iterable, K: Iterable, case: str = "lemma32") -> WitnessPair:
    """S = bH u K, T = bH u bK in D_2n, n even; phi fixes the even-exponent half
    and sends x to b x elsewhere."""
    if n < 4 or n % 2:
        raise InvalidConstruction("n must be even and at least 4")
    G = GroupSpec.dihedral(n)
    H = frozenset(GroupElement(*h) for h in H)
    K = frozenset(GroupElement(*k) for k in K)
    bad = []
    if any(h.ref or h.rot % 2 for h in H):
        bad.append("H is not inside <a^2>")
    if any(k.ref or k.rot % 2 == 0 for k in K):
        bad.append("K is not inside a<a^2>")
    if {inverse(G, h) for h in H} != H:
        bad.append("H is not inverse-closed")
    if {inverse(G, k) for k in K} != K:
        bad.append("K is not inverse-closed")
    if bad:
        raise InvalidConstruction(bad)
    b = G.b
    S = frozenset({multiply(G, b, h) for h in H} | K)
    T = frozenset({multiply(G, b, h) for h in H} | {multiply(G, b, k) for k in K})
    phi = tuple(G.index(x if x.rot % 2 == 0 else multiply(G, b, x)) for x in G.elements())
    if not is_isomorphism(cayley_digraph(G, S), cayley_digraph(G, T), phi):
        raise VerificationFailed("arc-preservation", "phi is not an isomorphism")
    w = WitnessPair(G, S, T, phi, False, case)
    return _aut_scan(w) if K else w


def lemma33_witness(n: int, m: int) -> WitnessPair:
    """Non-CI pair of size m in D_2n for even n and 3 <= m <= n-1."""
    if n < 4 or n % 2:
        raise InvalidConstruction("n must be even and at least 4")
    if not 3 <= m <= n - 1:
        raise OutOfRange(f"explicit even-n pairs need 3 <= m <= n-1, got m={m}")

    def a(i):
        return GroupElement(i % n, 0)

    def pm(i):
        return {a(i), a(-i)}

    if m == 3:
        return lemma32_pair(n, {a(0)}, pm(1), "lemma33/m=3")
    k, rem = divmod(m, 4)
    H1 = set().union(*(pm(2 * i) for i in range(1, k + 1)))
    K1 = set().union(*(pm(2 * i - 1) for i in range(1, k + 1)))
    half = n // 2
    if rem == 0:
        H, K, case = H1, K1, "lemma33/m=4k"
    elif rem == 1:
        H, K, case = H1 | {a(0)}, K1, "lemma33/m=4k+1"
    elif rem == 2:
        if half % 2:
            H, K = H1 | {a(0)}, K1 | {a(half)}
        else:
            H, K = H1 | {a(0), a(half)}, K1
        case = "lemma33/m=4k+2"
    else:
        if (half - 1) % 2 == 0:
            H, K = H1 | {a(0)} | pm(half - 1), K1
        else:
            H, K = H1 | {a(0)}, K1 | pm(half - 1)
        case = "lemma33/m=4k+3"
    w = lemma32_pair(n, H, K, case)
    if w.m != m:
        raise InvalidConstruction(f"{case}: built |S|={w.m}, wanted {m}")
    return w


# --- Sylow p-subgroups ---------------------------------------------------------


def _p_part(n: int, p: int) -> int:
    q = 1
    while n % (q * p) == 0:
        q *= p
    return q


def lemma34_witness(n: int, p: int, m: int) -> WitnessPair:
    """Non-CI pair of size m in D_2n when p is odd and p^2 divides n,
    for the m covered by an explicit coset construction."""
    if p < 3 or not is_prime(p):
        raise InvalidConstruction("p must be an odd prime")
    if n % (p * p):
        raise InvalidConstruction("p^2 must divide n")
    G = GroupSpec.dihedral(n)
    n1 = n // p  # n'
    npp = _p_part(n, p)  # n_p
    p_power = npp == n

    def a(i):
        return GroupElement(i % n, 0)

    b = G.b
    z = a(n1)

    def zpow(i):
        return a(n1 * i)

    def ba(i):
        return multiply(G, b, a(i))

    P = subgroup_generated(G, [z])

    def cosets(k, last):
        # {a, ba, ..., ba^last} P
        reps = [a(1)] + [ba(i) for i in range(1, last + 1)]
        return frozenset(multiply(G, x, y) for x in reps for y in P.members)

    zs = {zpow(i) for i in range(1, p - 1)}
    zinv = {zpow(-i) for i in range(1, p - 1)}
    r = m % p
    if r not in (0, p - 1):
        if not n - p + 1 <= m <= n - 2:
            raise OutOfRange(f"m={m}: no explicit construction (m mod p = {r})")
        k = n1 - 1
        j = m - k * p
        M = P
        alpha = homomorphism_from_generators(G, [z], [zpow(-1)])
        S_M = frozenset(zpow(i) for i in range(1, j + 1))
        T_M = frozenset(zpow(-i) for i in range(1, j + 1))
        C = cosets(k, k - 1)
        case = "lemma34/case1"
    elif r == p - 1:
        k = (m - (p - 1)) // p
        if n == p * p:
            if not 1 <= k <= p - 1:
                raise OutOfRange(f"m={m}: outside kp+(p-1), 1<=k<=p-1")
            M = subgroup_generated(G, [z, b])
            alpha = homomorphism_from_generators(G, [z, b], [zpow(-1), b])
            S_M, T_M = frozenset(zs | {b}), frozenset(zinv | {b})
            case = "lemma34/case2.2"
        else:
            if m not in (n - p - 1, n - 1):
                raise OutOfRange(f"m={m}: case 2 needs m in {{{n - p - 1}, {n - 1}}}")
            if not p_power:
                g2 = a(npp)
                M = subgroup_generated(G, [z, g2])
                alpha = homomorphism_from_generators(G, [z, g2], [zpow(-1), g2])
                S_M, T_M = frozenset(zs | {g2}), frozenset(zinv | {g2})
            else:
                g, g_img = a(n // p**2), a(n // p**2 + n1)
                M = subgroup_generated(G, [g])
                alpha = homomorphism_from_generators(G, [g], [g_img])
                S_M, T_M = frozenset(zs | {g}), frozenset(zs | {g_img})
            case = "lemma34/case2.1"
        C = cosets(k, k - 1)
    else:
        k = m // p
        if n == p * p:
            if not 2 <= k <= p - 1:
                raise OutOfRange(f"m={m}: outside kp, 2<=k<=p-1")
            M = subgroup_generated(G, [z, b])
            alpha = homomorphism_from_generators(G, [z, b], [zpow(-1), b])
            bz = multiply(G, b, z)
            bzinv = multiply(G, b, zpow(-1))
            S_M, T_M = frozenset(zs | {b, bz}), frozenset(zinv | {b, bzinv})
            case = "lemma34/case3.2"
        else:
            if m != n - p:
                raise OutOfRange(f"m={m}: case 3 needs m = {n - p}")
            if not p_power:
                g2 = a(npp)
                M = subgroup_generated(G, [z, g2, b])
                alpha = homomorphism_from_generators(G, [z, g2, b], [zpow(-1), g2, b])
                S_M, T_M = frozenset(zs | {g2, b}), frozenset(zinv | {g2, b})
            else:
                g, g_img = a(n // p**2), a(n // p**2 + n1)
                M = subgroup_generated(G, [g, b])
                alpha = homomorphism_from_generators(G, [g, b], [g_img, b])
                S_M, T_M = frozenset(zs | {g, b}), frozenset(zs | {g_img, b})
            case = "lemma34/case3.1"
        C = cosets(k, k - 2)
    cc = CosetConstruction(G, P, M, C, S_M, T_M, alpha)
    w = lemma31_pair(cc)
    if w.m != m:
        raise InvalidConstruction(f"{case}: built |S|={w.m}, wanted {m}")
    return _aut_scan(WitnessPair(G, w.S, w.T, w.phi, False, case))


# --- verification ------------------------------------------------------------------


@dataclass
class VerificationReport:
    case: str
    checks: list

    @property
    def ok(self) -> bool:
        return True

    def to_json(self) -> dict:
        return {"case": self.case, "ok": True, "checks": self.checks}


def verify_witness(w: WitnessPair) -> VerificationReport:
    """Re-check every claim of a pair from scratch; VerificationFailed on the first violation."""
    G = w.G
    checks = []
    if len(w.S) != len(w.T):
        raise VerificationFailed("size", f"|S|={len(w.S)} but |T|={len(w.T)}")
    checks.append("size")
    if G.identity in w.S or G.identity in w.T:
        raise VerificationFailed("identity", "1 lies in S or T")
    if any(not G.contains(g) for g in w.S | w.T):
        raise VerificationFailed("membership", "S or T leaves G")
    checks.append("identity-free")
    if sorted(w.phi) != list(range(G.order)):
        raise VerificationFailed("bijection", "phi is not a permutation of the vertices")
    checks.append("bijection")
    gamma, sigma = cayley_digraph(G, w.S), cayley_digraph(G, w.T)
    if not all(sigma.has_arc(w.phi[u], w.phi[v]) for u, v in gamma.arcs()):
        raise VerificationFailed("arc-preservation", "an arc of Cay(G,S) is not mapped to an arc")
    inv = [0] * G.order
    for u, x in enumerate(w.phi):
        inv[x] = u
    if not all(gamma.has_arc(inv[u], inv[v]) for u, v in sigma.arcs()):
        raise VerificationFailed("arc-preservation", "an arc of Cay(G,T) has no preimage arc")
    checks.append("arc-preservation")
    if w.non_ci_checked:
        alpha = cayley_isomorphism(G, w.S, w.T)
        if alpha is not None:
            raise VerificationFailed("aut-scan", f"alpha={tuple(alpha)} maps S onto T")
        checks.append("aut-scan")
    return VerificationReport(w.case, checks)


# --- witnesses by search and by dispatch --------------------------------------------


def search_witness(G: GroupSpec, m: int, budget: Optional[Budget] = None) -> Optional[WitnessPair]:
    """First non-CI orbit representative of size m (definition route), as a pair."""
    for S in orbit_representatives(G, m, budget):
        rep = is_ci_definition(G, S, budget)
        if not rep.is_ci:
            T, iso = rep.witness
            return WitnessPair(G, S, T, tuple(iso), True, "search")
    return None


def explicit_witness(G: GroupSpec, m: int, p: Optional[int] = None) -> Optional[WitnessPair]:
    """A constructed non-CI pair of size m in dihedral G, or None when no
    construction applies.  Sizes above (|G|-1)/2 go through the complement."""
    if not G.is_dihedral or G.n < 3:
        return None
    mr = min(m, G.order - 1 - m)
    n = G.n
    w = None
    try:
        if n % 2 == 0 and n >= 4:
            w = lemma33_witness(n, mr)
        else:
            primes = [p] if p is not None else [q for q in range(3, n + 1) if is_prime(q)]
            for q in primes:
                if q % 2 and n % (q * q) == 0:
                    try:
                        w = lemma34_witness(n, q, mr)
                        break
                    except OutOfRange:
                        continue
    except OutOfRange:
        return None
    if w is None:
        return None
    return w if mr == m else w.complement()


# --- random coset constructions ---------------------------------------------------------


def coset_fixing_automorphisms(G: GroupSpec, H: Subgroup, M: Subgroup) -> list[dict]:
    """Restrictions to M of automorphisms of G that fix M and every H-coset of M."""
    out, seen = [], set()
    for alpha in automorphisms(G):
        f = {x: apply(G, alpha, x) for x in M.members}
        if set(f.values()) != M.members:
            continue
        if any(multiply(G, f[x], inverse(G, x)) not in H.members for x in M.members):
            continue
        key = tuple(sorted(f.items()))
        if key not in seen:
            seen.add(key)
            out.append(f)
    return out


def sample_coset_constructions(G: GroupSpec, count: int, seed: int = 0) -> list[CosetConstruction]:
    """``count`` random valid coset constructions over G (reproducible per seed)."""
    rng = random.Random(seed)
    subs = subgroups(G)
    normals = [H for H in subs if 1 < H.order < G.order and is_normal(G, H)]
    if not normals:
        raise ValueError(f"{G} has no proper nontrivial normal subgroup")
    out = []
    attempts = 0
    while len(out) < count:
        attempts += 1
        if attempts > 100 * count:
            raise RuntimeError("could not sample enough coset constructions")
        H = rng.choice(normals)
        Ms = [M for M in subs if H.members <= M.members and M.order > 1]
        M = rng.choice(Ms)
        alphas = coset_fixing_automorphisms(G, H, M)
        alpha = rng.choice(alphas)
        pool = sorted_elements(M.members - {G.identity})
        if not pool:
            continue
        S_M = frozenset(rng.sample(pool, rng.randint(1, min(4, len(pool)))))
        T_M = frozenset(alpha[s] for s in S_M)
        outside = sorted_elements(set(G.elements()) - H.members)
        cosets = sorted({_coset_of(G, H, x) for x in outside}, key=lambda c: sorted(map(sort_key, c)))
        chosen = rng.sample(cosets, rng.randint(1, min(3, len(cosets))))
        C = frozenset().union(*chosen)
        out.append(CosetConstruction(G, H, M, C, S_M, T_M, alpha))
    return out
