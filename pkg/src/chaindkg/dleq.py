"""Chaum-Pedersen discrete-log equality proofs with the EVM challenge encoding.

The challenge is keccak256 over twelve packed uint256 words: the affine
coordinates of a1, a2, x1, y1, x2, y2 in that order. It is kept as a full
256-bit integer and never reduced, because the on-chain verifier compares
it as a uint256.
"""
from __future__ import annotations

import random
from dataclasses import dataclass

from .group_math import Q, UINT256_MAX, G1Point, keccak_uint, point_mul, scalar_random


@dataclass(frozen=True)
class DleqProof:
    challenge: int
    response: int

    def __post_init__(self):
        if not 0 <= self.challenge <= UINT256_MAX:
            raise ValueError("challenge must fit in uint256")
        if not 0 <= self.response < Q:
            raise ValueError("response must be reduced mod q")

    def to_bytes(self) -> bytes:
        return self.challenge.to_bytes(32, "big") + self.response.to_bytes(32, "big")

    @classmethod
    def from_bytes(cls, data: bytes) -> DleqProof:
        if len(data) != 64:
            raise ValueError(f"expected 64 bytes, got {len(data)}")
        return cls(int.from_bytes(data[:32], "big"), int.from_bytes(data[32:], "big"))


def dleq_challenge(
    a1: G1Point, a2: G1Point, x1: G1Point, y1: G1Point, x2: G1Point, y2: G1Point
) -> int:
    words = []
    for pt in (a1, a2, x1, y1, x2, y2):
        words += [pt.x, pt.y]
    return keccak_uint(words)


def dleq_prove(
    x1: G1Point, y1: G1Point, x2: G1Point, y2: G1Point, alpha: int, rng: random.Random
) -> DleqProof:
    """Prove knowledge of alpha with y1 = alpha*x1 and y2 = alpha*x2."""
    if any(p.is_identity for p in (x1, y1, x2, y2)):
        raise ValueError("DLEQ statement must not contain the identity")
    w = scalar_random(rng)
    a1 = point_mul(x1, w)
    a2 = point_mul(x2, w)
    c = dleq_challenge(a1, a2, x1, y1, x2, y2)
    r = (w - alpha * c) % Q
    return DleqProof(c, r)


def dleq_verify(x1: G1Point, y1: G1Point, x2: G1Point, y2: G1Point, proof: DleqProof) -> bool:
    a1 = point_mul(x1, proof.response) + point_mul(y1, proof.challenge)
    a2 = point_mul(x2, proof.response) + point_mul(y2, proof.challenge)
    return dleq_challenge(a1, a2, x1, y1, x2, y2) == proof.challenge
