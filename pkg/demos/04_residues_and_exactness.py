"""Residues of p dq: the obstruction that kills whole solution families.

For even k, integrating y^(k) y' around a pole shows that p dq must have
zero residue at every place a pole can reach.  A single nonzero residue
therefore rules out all pole-bearing solutions, no series needed.  The
residues live in the partial-fraction structure of R = p(q) and are computed
exactly.  Run:

    python demos/04_residues_and_exactness.py
"""

from bbsolve import branches_at_infinity, exactness_check, parse_equation, residue_pdq

GALLERY = [
    "y'' = 6*y^2",            # polynomial: s = 2 q^3, trivially exact
    "y'' = 4*y^3 + 1/y",      # residue -1 at infinity: obstructed
    "y'' = y^3 + 1/y^2",      # double pole but residue 0: exact, s rational
    "y'' = (y^2 + 1/2)/(y^2 - 1)",   # simple poles at q = +-1
]

for text in GALLERY:
    eq = parse_equation(text)
    branches = branches_at_infinity(eq.P, depth=10)
    ev = exactness_check(branches, resolved=eq.resolved)
    print(f"== {text}")
    for b in branches:
        print(f"   branch {b.id}: residue of p dq at q=infinity: {residue_pdq(b)}")
    for row in ev.residues:
        flag = "zero" if row.certified_zero else "NONZERO"
        print(f"   residue at {row.place}: {row.value}   [{flag}]")
    if ev.exact:
        print(f"   p dq = ds with s = {ev.s_string()}")
    else:
        print("   p dq is NOT exact: no pole-bearing meromorphic solutions (even k)")
    print()
