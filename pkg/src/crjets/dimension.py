"""Dimension counts for the jet spaces of maps, models and graph germs.

All counts are real dimensions.  Alongside the exact binomial counts the
report carries the asymptotic estimates ``2n'(k+1)^n`` for maps and
``d(nu+1)^n'`` for models, plus the alternative model estimate with the
exponent ``2n'`` (one factor per real coordinate of C^n').
"""
from __future__ import annotations

from dataclasses import asdict, dataclass
from fractions import Fraction
from math import comb, factorial

from .errors import ValidationError

__all__ = [
    "count_monomials",
    "dim_target",
    "dim_source_maps",
    "dim_source_models",
    "DimensionReport",
    "dimension_report",
    "crossover_order",
]


def count_monomials(nvars: int, lo: int, hi: int) -> int:
    """Number of monomials in ``nvars`` variables with ``lo <= degree <= hi``."""
    if hi < lo or hi < 0:
        return 0
    below = comb(nvars + lo - 1, lo - 1) if lo > 0 else 0
    return comb(nvars + hi, hi) - below


def dim_target(m: int, d: int, k: int) -> int:
    """``dim R_k``: ``d`` real series in ``2m + d`` variables, degrees ``2..k``."""
    return d * count_monomials(2 * m + d, 2, k)


def dim_source_maps(m: int, d: int, mprime: int, k: int) -> int:
    """Real dimension of order-k jets ``(f, w + g~)`` with ``f(0) = 0``, ``g~ = O(2)``."""
    n = m + d
    return 2 * (mprime * count_monomials(n, 1, k) + d * count_monomials(n, 2, k))


def dim_source_models(d: int, mprime: int, nu: int) -> int:
    """Real parameters of ``d`` real polynomials ``rho~`` of degree ``2..nu`` on C^n'."""
    return d * count_monomials(2 * (mprime + d), 2, nu)


@dataclass(frozen=True)
class DimensionReport:
    m: int
    d: int
    mprime: int
    nu: int
    k: int
    dim_R_k: int
    dim_H_k: int
    dim_A: int
    estimate_H: int
    estimate_A: int
    estimate_A_real_exponent: int
    growth_constant_c: Fraction
    target_growth_bound: int
    source_total: int
    source_constant_C: Fraction
    crossover: bool

    @property
    def n(self) -> int:
        return self.m + self.d

    @property
    def nprime(self) -> int:
        return self.mprime + self.d

    def to_dict(self) -> dict:
        out = asdict(self)
        for key in ("growth_constant_c", "source_constant_C"):
            value = out[key]
            out[key] = {"num": value.numerator, "den": value.denominator}
        return out

    def to_table(self) -> str:
        rows = [
            ("m, d, m', nu, k", f"{self.m}, {self.d}, {self.mprime}, {self.nu}, {self.k}"),
            ("dim R_k (target, exact)", str(self.dim_R_k)),
            ("  lower bound floor(c k^(2m+d))", str(self.target_growth_bound)),
            ("  c", str(self.growth_constant_c)),
            ("dim H_k (map jets, exact)", str(self.dim_H_k)),
            ("  estimate 2n'(k+1)^n", str(self.estimate_H)),
            ("dim A (models, exact)", str(self.dim_A)),
            ("  estimate d(nu+1)^n'", str(self.estimate_A)),
            ("  estimate d(nu+1)^(2n')", str(self.estimate_A_real_exponent)),
            ("source total", str(self.source_total)),
            ("  C = total / estimates", str(self.source_constant_C)),
            ("target exceeds source", "yes" if self.crossover else "no"),
        ]
        width = max(len(label) for label, _ in rows)
        return "\n".join(f"{label:<{width}}  {value:>12}" for label, value in rows)


def dimension_report(m: int, d: int, mprime: int, nu: int, k: int) -> DimensionReport:
    if m < 0 or d < 1 or mprime < m or nu < 0 or k < 0:
        raise ValidationError("need m >= 0, d >= 1, mprime >= m, nu >= 0, k >= 0")
    n, nprime = m + d, mprime + d
    nreal = 2 * m + d
    r_k = dim_target(m, d, k)
    h_k = dim_source_maps(m, d, mprime, k)
    a = dim_source_models(d, mprime, nu)
    est_h = 2 * nprime * (k + 1) ** n
    est_a = d * (nu + 1) ** nprime
    c = Fraction(d, factorial(nreal))
    return DimensionReport(
        m=m,
        d=d,
        mprime=mprime,
        nu=nu,
        k=k,
        dim_R_k=r_k,
        dim_H_k=h_k,
        dim_A=a,
        estimate_H=est_h,
        estimate_A=est_a,
        estimate_A_real_exponent=d * (nu + 1) ** (2 * nprime),
        growth_constant_c=c,
        target_growth_bound=int(c * k**nreal),
        source_total=h_k + a,
        source_constant_C=Fraction(h_k + a, est_h + est_a),
        crossover=r_k > h_k + a,
    )


def crossover_order(m: int, d: int, mprime: int, nu: int, k_max: int) -> DimensionReport | None:
    """Report at the smallest ``k <= k_max`` with ``dim R_k > dim H_k + dim A``.

    Returns ``None`` when no such ``k`` exists up to ``k_max``.
    """
    if m < 1:
        raise ValidationError("no crossover for m = 0: 2m + d = n, the target never outgrows the source")
    for k in range(1, k_max + 1):
        report = dimension_report(m, d, mprime, nu, k)
        if report.crossover:
            return report
    return None
