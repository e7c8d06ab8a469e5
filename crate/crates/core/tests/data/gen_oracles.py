"""Reference values for the integration tests, computed with mpmath at 50 digits.

Run from this directory: python3 gen_oracles.py > oracles.json
"""
import json

from mpmath import mp, mpf, gamma, loggamma, beta, digamma, psi, rf, hyp1f1, hyp2f1, zeta

mp.dps = 50

P = [0.5, 1.0, 2.0, 3.5]
K = [0.5, 1.0, 2.0, 3.0]
X = [0.3, 0.7, 1.1, 2.5, 4.9, 7.3]


def f(v):
    return float(v)


def pk_gamma(p, k, x):
    p, k, x = mpf(p), mpf(k), mpf(x)
    return p ** (x / k) * gamma(x / k) / k


out = {
    # pΓk(x) over the default grid
    "pk_gamma": [
        {"p": p, "k": k, "x": x, "value": f(pk_gamma(p, k, x))} for p in P for k in K for x in X
    ],
    # Γk(x) = k^(x/k - 1) Γ(x/k)
    "k_gamma": [
        {"k": k, "x": x, "value": f(mpf(k) ** (mpf(x) / k - 1) * gamma(mpf(x) / k))}
        for k in K
        for x in X
    ],
    # pψk(x) = ln(p)/k + ψ(x/k)/k
    "pk_psi": [
        {"p": p, "k": k, "x": x, "value": f(mp.log(p) / k + digamma(mpf(x) / k) / k)}
        for p in P
        for k in K
        for x in X
    ],
    "classical": {
        "gamma": [{"x": x, "value": f(gamma(mpf(x)))} for x in X + [-0.5, -1.5, -2.5, 10.0]],
        "ln_gamma": [{"x": x, "value": f(loggamma(mpf(x)))} for x in [0.3, 7.3, 50.5, 500.0]],
        "beta": [
            {"x": x, "y": y, "value": f(beta(mpf(x), mpf(y)))}
            for x in [0.3, 1.1, 4.9]
            for y in [0.7, 2.5, 7.3]
        ],
        "digamma": [{"x": x, "value": f(digamma(mpf(x)))} for x in X + [-0.5, -2.5]],
        # r-th derivative of ln Γ, r >= 2
        "polygamma": [
            {"x": x, "r": r, "value": f(psi(r - 1, mpf(x)))} for x in X for r in [2, 3, 4]
        ],
        "rising": [
            {"x": x, "n": n, "value": f(rf(mpf(x), n))} for x in X for n in [0, 1, 2, 5, 11, 20]
        ],
        "hurwitz_zeta": [
            {"s": s, "a": a, "value": f(zeta(s, mpf(a)))} for s in [2, 3, 5] for a in [0.3, 1.0, 7.3]
        ],
        "hyp1f1": [
            {"a": a, "b": b, "x": x, "value": f(hyp1f1(mpf(a), mpf(b), mpf(x)))}
            for (a, b) in [(0.5, 2.0), (1.1, 2.6), (2.5, 1.7)]
            for x in [-1.5, 0.5, 2.0]
        ],
        "hyp2f1": [
            {"a": a, "b": b, "c": c, "x": x, "value": f(hyp2f1(mpf(a), mpf(b), mpf(c), mpf(x)))}
            for (a, b, c) in [(0.7, 1.5, 2.5), (1.0, 1.0, 2.0), (2.5, 0.3, 4.9)]
            for x in [-0.5, 0.25, 0.9]
        ],
    },
}

print(json.dumps(out, indent=1))
