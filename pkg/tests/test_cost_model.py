from fractions import Fraction

import numpy as np
import pytest

from fecpareto.bch import design_bch
from fecpareto.cost_model import (KP4, GeometryError, OuterSpec, build_geometry,
                                  complexity_per_bit, geometry_from_strips, inner_ops, latency_bits,
                                  make_geometry, overall_rate)
from fecpareto.galois import ParameterError

# (N, T, n, b, t, J) -> (M, m, latency)
TABLE = [
    ((544, 15, 57, 6, 1, 2), (10, 544, 58208)),
    ((544, 15, 125, 7, 2, 4), (22, 544, 127840)),
    ((544, 15, 142, 8, 2, 6), (25, 544, 145248)),
    ((689, 14, 47, 6, 1, 5), (8, 689, 59943)),
    ((752, 10, 90, 7, 2, 6), (15, 752, 124080)),
    ((857, 15, 95, 7, 2, 6), (16, 857, 149975)),
]


@pytest.mark.parametrize("params,expected", TABLE)
def test_published_geometries(params, expected):
    N, T, n, b, t, J = params
    g = make_geometry("MLC", N, T, b, t, n)
    assert (g.M, g.m, latency_bits(g)) == expected
    assert abs(overall_rate(g) - 0.88) <= 0.005
    assert g.strip_matrix().shape == (g.M, g.m) and (g.strip_matrix() == 1).all()


def test_rate_examples():
    assert make_geometry("MLC", 544, 15, 6, 1, 57).rate_fraction == Fraction(514, 544) * Fraction(100, 107)
    assert round(make_geometry("MLC", 752, 10, 7, 2, 90).rate, 4) == 0.8849


@pytest.mark.parametrize("scheme,N,T,b,t,n", [("MLC", 544, 15, 6, 1, 57), ("BICM", 544, 15, 7, 1, 118),
                                              ("BICM", 300, 7, 8, 2, 197), ("MLC", 31, 2, 5, 1, 31)])
def test_rate_times_latency_is_information_bits(scheme, N, T, b, t, n):
    g = make_geometry(scheme, N, T, b, t, n)
    assert g.rate_fraction * latency_bits(g) == g.M * g.outer.K * g.outer.B
    assert g.m * g.info_bits_per_inner == g.M * N * g.outer.B


def test_bicm_latency_and_rate():
    g = make_geometry("BICM", 544, 15, 7, 1, 118)
    assert latency_bits(g) == 544 * 118
    assert g.rate_fraction == Fraction(514, 544) * Fraction(110, 118)


def test_no_admissible_geometry():
    with pytest.raises(GeometryError, match="no admissible geometry"):
        build_geometry(KP4, design_bch(6, 1, 58), "MLC")       # k=51


def test_outer_spec_validation():
    with pytest.raises(ParameterError):
        OuterSpec(544, 500, 15)
    with pytest.raises(ParameterError):
        OuterSpec.from_NT(1024, 10)
    with pytest.raises(ParameterError):
        OuterSpec.from_NT(20, 10)


def test_explicit_strip_matrix():
    outer = OuterSpec.from_NT(8, 1)
    inner = design_bch(5, 1, 26)      # k=20: MLC carries 40 bits = 4 RS symbols per word
    g = geometry_from_strips(outer, inner, "MLC", np.full((2, 4), 2))
    assert g.strips == (((2, 4),), ((2, 4),))
    with pytest.raises(GeometryError):
        geometry_from_strips(outer, inner, "MLC", [[3, 1, 2, 2], [1, 3, 2, 2]])


def test_complexity_row1_value():
    g = make_geometry("MLC", 544, 15, 6, 1, 57)
    assert round(complexity_per_bit(g, 2), 2) == 18.21


def test_complexity_monotone():
    g = make_geometry("MLC", 544, 15, 6, 1, 57)
    cx = [complexity_per_bit(g, J) for J in range(7)]
    assert all(b > a for a, b in zip(cx, cx[1:]))
    assert inner_ops(57, 1, 2) < inner_ops(57, 2, 2) < inner_ops(57, 3, 2)
    a = make_geometry("MLC", 544, 14, 6, 1, 57)
    b = make_geometry("MLC", 544, 16, 6, 1, 57)
    assert complexity_per_bit(a, 2) < complexity_per_bit(g, 2) < complexity_per_bit(b, 2)
