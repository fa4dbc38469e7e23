"""Semi-analytic frame error rate and Pareto code search for concatenated
outer Reed-Solomon / inner Chase-decoded BCH codes over PAM4-AWGN."""

__version__ = "0.1.0"

from .bch import BchSpec, SoftWord, bd_decode, chase_decode, design_bch, encode
from .cost_model import (FrameGeometry, OuterSpec, build_geometry, complexity_per_bit,
                         latency_bits, make_geometry, overall_rate)
from .fer_analysis import (fer_curve, gap_to_csl, genfunc_coeff, pam4_capacity, snr_at_fer,
                           strip_conditional)
from .galois import FieldSpec, build_field, gf_mul
from .inner_mc import DistributionCache, Scheme, SchemeConfig, UDistribution, simulate_u

__all__ = [
    "BchSpec", "SoftWord", "bd_decode", "chase_decode", "design_bch", "encode",
    "FrameGeometry", "OuterSpec", "build_geometry", "complexity_per_bit", "latency_bits",
    "make_geometry", "overall_rate", "fer_curve", "gap_to_csl", "genfunc_coeff",
    "pam4_capacity", "snr_at_fer", "strip_conditional", "FieldSpec", "build_field", "gf_mul",
    "DistributionCache", "Scheme", "SchemeConfig", "UDistribution", "simulate_u",
]
