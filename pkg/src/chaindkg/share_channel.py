"""Node keys, Diffie-Hellman shared keys and the keccak-XOR share cipher.

The pad for a share sent to node ``j`` under shared key ``k`` is::

    uint256(keccak256(abi.encodePacked(k.x, j)))

i.e. only the affine x-coordinate of the shared point is hashed, so the
contract can re-derive it from two uint256 words. Change ``derive_pad`` to
flip that convention.
"""
from __future__ import annotations

import random
from dataclasses import dataclass

from .group_math import G1, Q, UINT256_MAX, G1Point, Scalar, keccak_uint, point_mul, scalar_random
from .vss import Share

ENCRYPTED_SHARE_SIZE = 36


@dataclass(frozen=True)
class KeyPair:
    secret: Scalar
    public: G1Point

    def __post_init__(self):
        if not 0 < self.secret < Q:
            raise ValueError("secret key must be in [1, q)")
        if point_mul(G1, self.secret) != self.public:
            raise ValueError("public key does not match secret")

    def __repr__(self):
        return f"KeyPair(public={self.public!r})"


@dataclass(frozen=True)
class SharedKey:
    point: G1Point


@dataclass(frozen=True)
class EncryptedShare:
    issuer: int
    receiver: int
    ciphertext: int

    def __post_init__(self):
        if not 0 <= self.ciphertext <= UINT256_MAX:
            raise ValueError("ciphertext must fit in uint256")
        for idx in (self.issuer, self.receiver):
            if not 0 <= idx < 1 << 16:
                raise ValueError(f"node index out of u16 range: {idx}")

    def to_bytes(self) -> bytes:
        return (
            self.issuer.to_bytes(2, "big")
            + self.receiver.to_bytes(2, "big")
            + self.ciphertext.to_bytes(32, "big")
        )

    @classmethod
    def from_bytes(cls, data: bytes) -> EncryptedShare:
        if len(data) != ENCRYPTED_SHARE_SIZE:
            raise ValueError(f"expected {ENCRYPTED_SHARE_SIZE} bytes, got {len(data)}")
        return cls(
            int.from_bytes(data[0:2], "big"),
            int.from_bytes(data[2:4], "big"),
            int.from_bytes(data[4:], "big"),
        )


def keygen(rng: random.Random) -> KeyPair:
    sk = 0
    while sk == 0:
        sk = scalar_random(rng)
    return KeyPair(sk, point_mul(G1, sk))


def derive_shared_key(my_secret: Scalar, their_public: G1Point) -> SharedKey:
    if their_public.is_identity:
        raise ValueError("cannot derive a shared key from the identity")
    return SharedKey(point_mul(their_public, my_secret))


def derive_pad(key: SharedKey, receiver: int) -> int:
    if receiver < 1:
        raise ValueError("receiver index must be >= 1")
    return keccak_uint([key.point.x, receiver])


def encrypt_share(share: Share, key: SharedKey) -> EncryptedShare:
    ct = share.value ^ derive_pad(key, share.receiver)
    return EncryptedShare(share.issuer, share.receiver, ct)


def recover_plaintext(enc: EncryptedShare, key: SharedKey) -> int:
    """The raw XOR-decrypted integer, before any reduction mod q.

    This is what share verification and dispute adjudication must look at;
    a value >= q is a malformed share even if it reduces to a valid one.
    """
    return enc.ciphertext ^ derive_pad(key, enc.receiver)


def decrypt_share(enc: EncryptedShare, key: SharedKey) -> Scalar:
    return recover_plaintext(enc, key) % Q
