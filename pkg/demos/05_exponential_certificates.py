"""From a numerically detected period to an exact closed form.

A rank-1 pole lattice suggests y = R(e^(az)) with a = 2 pi i / T.  The
multiplier is recognised as an exact number, R is fitted rationally at
sampled trajectory points, the coefficients are recognised exactly, and the
candidate is certified by back-substitution through the operator expansion
(w d/dw)^k = sum_j S(k, j) w^j d^j/dw^j  (Stirling numbers of the second
kind).  Only certified identities are reported as exact.  Run:

    python demos/05_exponential_certificates.py
"""

from bbsolve.cli import Options, analyze

for text in ("y' = y^2 - 1",        # +-coth(z - z0): poles on pi i Z
             "y''' = y",            # pure modes e^(az), a^3 = 1 (entire)
             "y' = y^2"):           # rational, NOT exponential: no certificate
    rep, _code = analyze(text, Options())
    v = rep["classification"]
    print(f"== {text}")
    print(f"   verdict: {v['label']}   (confidence {v['confidence']})")
    for e in v["evidence"]:
        if "exponential" in e or "closed form" in e or "lattice" in e:
            print(f"   {e}")
    print()
