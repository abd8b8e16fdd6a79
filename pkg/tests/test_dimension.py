import itertools
import math
from fractions import Fraction

import pytest

from crjets import errors
from crjets.dimension import (
    count_monomials,
    crossover_order,
    dim_source_maps,
    dim_source_models,
    dim_target,
    dimension_report,
)
from crjets.experiments import source_coordinates, target_coordinates
from crjets.jets import CrSignature

from oracles import brute_force_monomials


def test_dim_target_examples():
    assert dim_target(1, 1, 2) == 6
    assert dim_target(1, 1, 10) == 282 == math.comb(13, 3) - 4
    assert all(dim_target(m, d, 1) == 0 for m in range(3) for d in range(1, 3))


def test_dim_source_maps_examples():
    assert dim_source_maps(1, 1, 1, 2) == 16
    assert dim_source_maps(1, 1, 1, 10) == 2 * (65 + 63) == 256
    for m, d, mp in [(1, 1, 1), (1, 2, 3), (2, 1, 2)]:
        assert dim_source_maps(m, d, mp, 1) == 2 * mp * (m + d)


def test_dim_source_models_examples():
    assert dim_source_models(1, 1, 2) == 10
    # n' = mprime + d = 2 in both cases: linear in d
    assert dim_source_models(2, 0, 2) == 2 * dim_source_models(1, 1, 2) == 20
    assert all(dim_source_models(d, mp, 1) == 0 for d in range(1, 3) for mp in range(3))


def test_crossover_example():
    report = crossover_order(1, 1, 1, 2, 50)
    assert report.k == 10
    assert (report.dim_R_k, report.dim_H_k, report.dim_A) == (282, 256, 10)
    before = dimension_report(1, 1, 1, 2, 9)
    assert (before.dim_R_k, before.dim_H_k, before.dim_A) == (216, 212, 10)
    assert not before.crossover


def test_crossover_needs_positive_cr_dimension():
    with pytest.raises(errors.ValidationError):
        crossover_order(0, 1, 1, 2, 50)


def test_crossover_none_when_kmax_too_small():
    assert crossover_order(1, 1, 1, 2, 9) is None


@pytest.mark.parametrize("k", range(0, 7))
def test_counts_match_enumeration(k):
    for m in range(0, 3):
        for d in range(1, 6 - 2 * m):
            nreal = 2 * m + d
            if nreal > 5:
                continue
            assert dim_target(m, d, k) == d * brute_force_monomials(nreal, 2, k)
            for mp in range(m, m + 2):
                n = m + d
                expected = 2 * (mp * brute_force_monomials(n, 1, k) + d * brute_force_monomials(n, 2, k))
                assert dim_source_maps(m, d, mp, k) == expected
                if 2 * (mp + d) <= 6:
                    assert dim_source_models(d, mp, k) == d * brute_force_monomials(2 * (mp + d), 2, k)


def test_counts_match_experiment_coordinates():
    for sig in [CrSignature(1, 1, 1, 2, 4), CrSignature(1, 2, 1, 3, 3), CrSignature(2, 1, 3, 2, 3)]:
        coords = source_coordinates(sig)
        assert len(coords) == dim_source_maps(sig.m, sig.d, sig.mprime, sig.k) + dim_source_models(
            sig.d, sig.mprime, sig.nu
        )
        assert len(target_coordinates(sig)) == dim_target(sig.m, sig.d, sig.k)


def test_count_monomials_edges():
    assert count_monomials(3, 0, 0) == 1
    assert count_monomials(3, 2, 1) == 0
    assert count_monomials(2, 1, 2) == 5


def test_monotone_and_bounded():
    for m, d, mp in [(1, 1, 1), (1, 2, 2), (2, 1, 2), (1, 1, 3)]:
        n, nreal = m + d, 2 * m + d
        c = Fraction(d, math.factorial(nreal))
        values = [dim_target(m, d, k) for k in range(1, 40)]
        assert all(a < b for a, b in zip(values[1:], values[2:]))
        for k in range(1, 40):
            assert dim_source_maps(m, d, mp, k) <= 2 * (mp + d) * (k + 1) ** n
            if k >= nreal:
                assert dim_target(m, d, k) >= c * k**nreal


def test_crossover_terminates_on_grid():
    for m, d in itertools.product(range(1, 3), range(1, 3)):
        if m + d > 3:
            continue
        for mp in range(m, 5 - d):
            previous = 0
            for nu in range(2, 5):
                report = crossover_order(m, d, mp, nu, 2000)
                assert report is not None
                assert report.k >= previous
                previous = report.k


def test_report_fields():
    report = dimension_report(1, 1, 1, 2, 10)
    assert report.estimate_H == 2 * 2 * 11**2
    assert report.estimate_A == 9
    assert report.estimate_A_real_exponent == 81
    assert report.growth_constant_c == Fraction(1, 6)
    assert report.target_growth_bound == 166
    assert report.source_total == 266
    assert report.to_dict()["growth_constant_c"] == {"num": 1, "den": 6}
    table = report.to_table()
    for value in ("282", "256", "10"):
        assert value in table
