"""Independent reference implementations used as test oracles.

Polynomials here are plain dicts ``exponents -> (Fraction re, Fraction im)``
with no truncation bookkeeping beyond an explicit ``k`` argument.
"""
from fractions import Fraction
from itertools import product
from math import comb


def cmul(a, b):
    return (a[0] * b[0] - a[1] * b[1], a[0] * b[1] + a[1] * b[0])


def poly(series):
    """Dict form of a TruncatedSeries with Fraction coefficients."""
    return {
        exps: (Fraction(int(c.re.numerator), int(c.re.denominator)),
               Fraction(int(c.im.numerator), int(c.im.denominator)))
        for exps, c in series.terms.items()
    }


def clean(p):
    return {e: c for e, c in p.items() if c != (0, 0)}


def padd(p, q):
    out = dict(p)
    for e, c in q.items():
        old = out.get(e, (Fraction(0), Fraction(0)))
        out[e] = (old[0] + c[0], old[1] + c[1])
    return clean(out)


def pmul(p, q, k=None):
    out = {}
    for (e1, c1), (e2, c2) in product(p.items(), q.items()):
        e = tuple(x + y for x, y in zip(e1, e2))
        if k is not None and sum(e) > k:
            continue
        c = cmul(c1, c2)
        old = out.get(e, (Fraction(0), Fraction(0)))
        out[e] = (old[0] + c[0], old[1] + c[1])
    return clean(out)


def ppow(p, n, nvars, k=None):
    out = {(0,) * nvars: (Fraction(1), Fraction(0))}
    for _ in range(n):
        out = pmul(out, p, k)
    return out


def compose(p, images, nvars_out, k):
    """``p(images[0], images[1], ...)`` truncated at total degree ``k``."""
    total = {}
    for exps, c in p.items():
        term = {(0,) * nvars_out: c}
        for img, e in zip(images, exps):
            term = pmul(term, ppow(img, e, nvars_out, k), k)
        total = padd(total, term)
    return total


def brute_force_monomials(nvars, lo, hi):
    """Count exponent vectors with ``lo <= |e| <= hi`` by enumeration."""
    return sum(1 for e in product(range(hi + 1), repeat=nvars) if lo <= sum(e) <= hi)


def catalan_series(k):
    """Coefficients of ``(1 - sqrt(1 - 4t)) / 2`` in ``t = x^2``, via the binomial series.

    ``sqrt(1 - 4t) = sum_j binom(1/2, j) (-4t)^j``; the generalized binomial
    is evaluated with Fractions, independent of the Catalan recursion.
    """
    out = {}
    for j in range(1, k // 2 + 1):
        binom = Fraction(1)
        for i in range(j):
            binom *= (Fraction(1, 2) - i) / (i + 1)
        out[2 * j] = -binom * (-4) ** j / 2
    return out


def falling_binomial_count(n, k):
    return comb(n + k, k)
