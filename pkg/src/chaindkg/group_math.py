"""alt_bn128 (BN254) G1 arithmetic, scalar helpers and EVM-style hashing.

Points are stored in canonical affine form; the identity is encoded as
``(0, 0)``, which is what the EVM precompiles 0x06/0x07 return for the point
at infinity. Scalar multiplication runs in Jacobian coordinates internally.
"""
from __future__ import annotations

import random
from dataclasses import dataclass
from typing import Iterable

from Crypto.Hash import keccak

# y^2 = x^3 + 3 over F_p, prime-order group of order Q (EIP-196).
P = 21888242871839275222246405745257275088696311157297823662689037894645226208583
Q = 21888242871839275222246405745257275088548364400416034343698204186575808495617
B = 3

UINT256_MAX = (1 << 256) - 1

Scalar = int


class InvalidPoint(ValueError):
    pass


@dataclass(frozen=True)
class G1Point:
    x: int
    y: int

    def __post_init__(self):
        if not (0 <= self.x < P and 0 <= self.y < P):
            raise InvalidPoint(f"coordinate out of range: ({self.x}, {self.y})")
        if (self.x, self.y) != (0, 0) and (self.y * self.y - self.x**3 - B) % P:
            raise InvalidPoint(f"({self.x}, {self.y}) is not on alt_bn128")

    @property
    def is_identity(self) -> bool:
        return self.x == 0 and self.y == 0

    def __add__(self, other: G1Point) -> G1Point:
        return point_add(self, other)

    def __neg__(self) -> G1Point:
        if self.is_identity:
            return self
        return G1Point(self.x, P - self.y)

    def __sub__(self, other: G1Point) -> G1Point:
        return point_add(self, -other)

    def __mul__(self, k: int) -> G1Point:
        return point_mul(self, k)

    __rmul__ = __mul__

    def to_bytes(self) -> bytes:
        return self.x.to_bytes(32, "big") + self.y.to_bytes(32, "big")

    @classmethod
    def from_bytes(cls, data: bytes) -> G1Point:
        if len(data) != 64:
            raise InvalidPoint(f"expected 64 bytes, got {len(data)}")
        return cls(int.from_bytes(data[:32], "big"), int.from_bytes(data[32:], "big"))

    def hex(self) -> str:
        return "0x" + self.to_bytes().hex()

    def __repr__(self):
        if self.is_identity:
            return "G1Point(identity)"
        return f"G1Point(0x{self.x:064x}, 0x{self.y:064x})"


IDENTITY = G1Point(0, 0)
G1 = G1Point(1, 2)
# Auxiliary generator carried over from the reference DLEQ code.
H1 = G1Point(
    9727523064272218541460723335320998459488975639302513747055235660443850046724,
    5031696974169251245229961296941447383441169981934237515842977230762345915487,
)
# G2 constant, stored as ((x_re, x_im), (y_re, y_im)); never operated on.
H2 = (
    (
        9110522554455888802745409460679507850660709404525090688071718755658817738702,
        14120302265976430476300156362541817133873389322564306174224598966336605751189,
    ),
    (
        8015061597608194114184122605728732604411275728909990814600934336120589400179,
        21550838471174089343030649382112381550278244756451022825185015902639198926789,
    ),
)


@dataclass(frozen=True)
class CurveParams:
    p: int
    q: int
    g1: G1Point
    h1: G1Point
    h2: tuple


ALT_BN128 = CurveParams(p=P, q=Q, g1=G1, h1=H1, h2=H2)


# -- Jacobian internals ------------------------------------------------------
# (X, Y, Z) represents (X/Z^2, Y/Z^3); Z == 0 is the point at infinity.

_JAC_INF = (1, 1, 0)


def _to_jac(pt: G1Point):
    return _JAC_INF if pt.is_identity else (pt.x, pt.y, 1)


def _from_jac(j) -> G1Point:
    x, y, z = j
    if z == 0:
        return IDENTITY
    zinv = pow(z, -1, P)
    zinv2 = zinv * zinv % P
    return G1Point(x * zinv2 % P, y * zinv2 * zinv % P)


def _jac_double(j):
    x, y, z = j
    if z == 0 or y == 0:
        return _JAC_INF
    yy = y * y % P
    s = 4 * x * yy % P
    m = 3 * x * x % P  # a = 0
    x3 = (m * m - 2 * s) % P
    y3 = (m * (s - x3) - 8 * yy * yy) % P
    z3 = 2 * y * z % P
    return x3, y3, z3


def _jac_add(j1, j2):
    x1, y1, z1 = j1
    x2, y2, z2 = j2
    if z1 == 0:
        return j2
    if z2 == 0:
        return j1
    z1z1 = z1 * z1 % P
    z2z2 = z2 * z2 % P
    u1 = x1 * z2z2 % P
    u2 = x2 * z1z1 % P
    s1 = y1 * z2 * z2z2 % P
    s2 = y2 * z1 * z1z1 % P
    if u1 == u2:
        if s1 != s2:
            return _JAC_INF
        return _jac_double(j1)
    h = (u2 - u1) % P
    r = (s2 - s1) % P
    hh = h * h % P
    hhh = h * hh % P
    v = u1 * hh % P
    x3 = (r * r - hhh - 2 * v) % P
    y3 = (r * (v - x3) - s1 * hhh) % P
    z3 = h * z1 * z2 % P
    return x3, y3, z3


def _jac_mul(j, k: int):
    acc = _JAC_INF
    for bit in bin(k)[2:]:
        acc = _jac_double(acc)
        if bit == "1":
            acc = _jac_add(acc, j)
    return acc


# -- public operations -------------------------------------------------------


def point_add(a: G1Point, b: G1Point) -> G1Point:
    """Group addition, the semantics of the 0x06 precompile."""
    return _from_jac(_jac_add(_to_jac(a), _to_jac(b)))


def point_mul(p: G1Point, k: int) -> G1Point:
    """Scalar multiplication, the semantics of the 0x07 precompile.

    ``k`` may be any non-negative integer (a full 256-bit challenge, say);
    it is reduced modulo the group order first.
    """
    if k < 0:
        raise ValueError("scalar must be non-negative")
    k %= Q
    if k == 0 or p.is_identity:
        return IDENTITY
    return _from_jac(_jac_mul(_to_jac(p), k))


def point_sum(points: Iterable[G1Point]) -> G1Point:
    acc = _JAC_INF
    for pt in points:
        acc = _jac_add(acc, _to_jac(pt))
    return _from_jac(acc)


def point_normalize(p: G1Point) -> tuple[int, int]:
    return p.x, p.y


def point_from_affine(x: int, y: int) -> G1Point:
    return G1Point(x % P, y % P)


def point_from_projective(x: int, y: int, z: int) -> G1Point:
    """Convert a homogeneous projective triple (x/z, y/z), as printed by py_ecc's
    optimized_bn128, to a canonical point."""
    if z % P == 0:
        return IDENTITY
    zinv = pow(z, -1, P)
    return G1Point(x * zinv % P, y * zinv % P)


def scalar_random(rng: random.Random) -> Scalar:
    return rng.randrange(Q)


def scalar_to_bytes(s: int) -> bytes:
    return (s % Q).to_bytes(32, "big")


def scalar_from_bytes(data: bytes) -> Scalar:
    if len(data) != 32:
        raise ValueError(f"expected 32 bytes, got {len(data)}")
    return int.from_bytes(data, "big") % Q


def keccak256(data: bytes) -> bytes:
    """Keccak-256 with the original (pre-NIST) padding, as used by the EVM."""
    return keccak.new(digest_bits=256, data=bytes(data)).digest()


def pack_uint256(values: Iterable[int]) -> bytes:
    """``abi.encodePacked`` for a sequence of ``uint256`` values."""
    out = bytearray()
    for v in values:
        if not 0 <= v <= UINT256_MAX:
            raise ValueError(f"value does not fit in uint256: {v}")
        out += v.to_bytes(32, "big")
    return bytes(out)


def keccak_uint(values: Iterable[int]) -> int:
    return int.from_bytes(keccak256(pack_uint256(values)), "big")
