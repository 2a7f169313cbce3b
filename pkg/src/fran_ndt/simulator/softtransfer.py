"""Finite-SNR model of quantized fronthaul transfer."""

from __future__ import annotations

import math
from fractions import Fraction
from typing import Union

Number = Union[int, Fraction, float]


def log2_exact(P: Number) -> int:
    """log2 of a power of two, as an integer."""
    P = Fraction(P)
    if P.denominator != 1 or P.numerator < 2 or P.numerator & (P.numerator - 1):
        raise ValueError(f"P must be a power of two >= 2, got {P}")
    return P.numerator.bit_length() - 1


def effective_snr(P: Number, B_bits: Number, G: Number) -> Number:
    """SNR left after quantizing precoded samples with B_bits bits each.

    The quantization noise has power P * 2^-B and is amplified by the gain
    sum G at each receiver. Exact when all inputs are rational and B_bits is
    an integer; floating point otherwise.
    """
    if P <= 1 or B_bits <= 0 or G < 0:
        raise ValueError("need P > 1, B_bits > 0 and G >= 0")
    exact = (not isinstance(P, float) and not isinstance(G, float)
             and (isinstance(B_bits, int) or (isinstance(B_bits, Fraction) and B_bits.denominator == 1)))
    if exact:
        q = Fraction(1, 2 ** int(B_bits))
        P, G = Fraction(P), Fraction(G)
        return P * (1 - q) / (1 + q * P * G)
    q = 2.0 ** (-float(B_bits))
    return float(P) * (1 - q) / (1 + q * float(P) * float(G))


def rate_factor(P: Number, G: Number) -> float:
    """Per-user rate with soft transfer at B = log2 P, relative to log2 P."""
    lp = log2_exact(P)
    snr = effective_snr(Fraction(P), lp, G)
    return math.log2(snr) / lp
