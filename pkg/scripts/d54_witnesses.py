"""Build and verify every p-power witness pair for D54 (n = 27, p = 3).

A full m-sweep of D54 is out of reach, so each witness is checked on its own:
phi is an arc-exact isomorphism and no automorphism of D54 maps S to T.
"""

from dci_forge.constructions import lemma34_witness, verify_witness
from dci_forge.errors import OutOfRange
from dci_forge.groups import GroupSpec, automorphisms


def main():
    G = GroupSpec.dihedral(27)
    print(f"{G.name}: |Aut| = {len(automorphisms(G))}")
    for m in range(1, 27):
        try:
            w = lemma34_witness(27, 3, m)
        except OutOfRange:
            print(f"m={m:>2}  not covered")
            continue
        rep = verify_witness(w)
        print(f"m={m:>2}  {w.case:<18} checks={','.join(rep.checks)}")


if __name__ == "__main__":
    main()
