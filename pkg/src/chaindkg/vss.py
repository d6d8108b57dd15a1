"""Feldman verifiable secret sharing over the alt_bn128 scalar field."""
from __future__ import annotations

import random
from dataclasses import dataclass
from typing import Iterable, Optional, Sequence

from .group_math import G1, IDENTITY, Q, G1Point, Scalar, point_mul, scalar_random

CommitmentVector = tuple[G1Point, ...]


@dataclass(frozen=True)
class SharePolynomial:
    # coefficients[0] is the dealer's secret
    coefficients: tuple[Scalar, ...]

    @property
    def degree(self) -> int:
        return len(self.coefficients) - 1

    @property
    def secret(self) -> Scalar:
        return self.coefficients[0]


@dataclass(frozen=True)
class Share:
    issuer: int
    receiver: int
    value: Scalar


def generate_polynomial(threshold_degree: int, rng: random.Random) -> SharePolynomial:
    if threshold_degree < 1:
        raise ValueError(f"threshold degree must be >= 1, got {threshold_degree}")
    return SharePolynomial(tuple(scalar_random(rng) for _ in range(threshold_degree + 1)))


def eval_polynomial(poly: SharePolynomial, x: int) -> Scalar:
    if x < 0:
        raise ValueError("evaluation point must be non-negative")
    acc = 0
    for c in reversed(poly.coefficients):
        acc = (acc * x + c) % Q
    return acc


def commit_polynomial(poly: SharePolynomial) -> CommitmentVector:
    return tuple(point_mul(G1, c) for c in poly.coefficients)


def eval_commitments(commitments: Sequence[G1Point], j: int) -> G1Point:
    """Public image of f(j): sum over k of j^k * C_k, evaluated Horner-style."""
    if j < 1:
        raise ValueError("node index must be >= 1")
    acc = IDENTITY
    for c in reversed(commitments):
        acc = point_mul(acc, j) + c
    return acc


def verify_share(share_value: int, commitments: Sequence[G1Point], j: int) -> bool:
    """Check G1 * share == F(j). Values outside [0, q) never verify."""
    if not 0 <= share_value < Q:
        return False
    return point_mul(G1, share_value) == eval_commitments(commitments, j)


def lagrange_coefficients(xs: Sequence[int]) -> list[Scalar]:
    """Coefficients interpolating at zero for the given distinct x values."""
    if len(set(xs)) != len(xs):
        raise ValueError("duplicate x values")
    if any(x < 1 for x in xs):
        raise ValueError("x values must be >= 1")
    coeffs = []
    for xj in xs:
        num, den = 1, 1
        for xm in xs:
            if xm == xj:
                continue
            num = num * xm % Q
            den = den * (xm - xj) % Q
        coeffs.append(num * pow(den, -1, Q) % Q)
    return coeffs


def lagrange_reconstruct(
    points: Iterable[tuple[int, Scalar]], threshold: Optional[int] = None
) -> Scalar:
    """Interpolate f(0) from (x, f(x)) pairs.

    If ``threshold`` (the polynomial degree t) is given, at least t + 1 points
    are required.
    """
    points = list(points)
    if not points:
        raise ValueError("no points to interpolate")
    if threshold is not None and len(points) < threshold + 1:
        raise ValueError(f"need {threshold + 1} points, got {len(points)}")
    xs = [x for x, _ in points]
    lam = lagrange_coefficients(xs)
    return sum(y * l for (_, y), l in zip(points, lam)) % Q
