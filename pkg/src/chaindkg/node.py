"""A DKG participant driven phase by phase against a :class:`Bulletin`.

Nodes never talk to each other directly: everything they learn comes from
the board's event log, and everything they publish goes through a board
transaction.
"""
from __future__ import annotations

import enum
import logging
import random
from dataclasses import dataclass, field
from typing import Callable, Iterable, Optional

from .bulletin import (
    Bulletin,
    Phase,
    Verdict,
    WrongPhase,
    adjudicate,
    decode_dispute,
    decode_distribution,
)
from .dleq import dleq_prove, dleq_verify
from .group_math import G1, Q, G1Point, Scalar, keccak_uint, point_mul, point_sum
from .share_channel import (
    EncryptedShare,
    KeyPair,
    derive_shared_key,
    encrypt_share,
    keygen,
    recover_plaintext,
)
from .vss import (
    Share,
    SharePolynomial,
    commit_polynomial,
    eval_commitments,
    eval_polynomial,
    generate_polynomial,
    verify_share,
)

log = logging.getLogger(__name__)

# (receiver, honest value) -> value actually sent
ShareHook = Callable[[int, Scalar], Scalar]


class InconsistentShare(Exception):
    pass


class ShareStatus(enum.Enum):
    VALID = "VALID"
    INVALID = "INVALID"


@dataclass(frozen=True)
class DecryptedShare:
    value: Optional[Scalar]
    status: ShareStatus


@dataclass(frozen=True)
class DkgConfig:
    n: int
    t: int
    seed: int

    def __post_init__(self):
        if not 1 <= self.t < self.n:
            raise ValueError(f"need 1 <= t < n, got t={self.t}, n={self.n}")
        if not 0 <= self.seed < 1 << 64:
            raise ValueError("seed must be a 64-bit unsigned integer")


def node_rng(seed: int, index: int) -> random.Random:
    """Per-node generator seeded with keccak256(seed || index)."""
    return random.Random(keccak_uint([seed, index]))


@dataclass
class Node:
    index: int
    config: DkgConfig
    rng: random.Random = field(repr=False)
    keys: Optional[KeyPair] = None
    polynomial: Optional[SharePolynomial] = field(default=None, repr=False)
    commitments: tuple[G1Point, ...] = ()
    peer_pks: dict[int, G1Point] = field(default_factory=dict)
    decrypted: dict[int, DecryptedShare] = field(default_factory=dict)
    disputed_nodes: set[int] = field(default_factory=set)
    # verdicts this node computed itself, keyed by dispute tx index
    dispute_verdicts: dict[int, Verdict] = field(default_factory=dict)
    warnings: list[str] = field(default_factory=list)
    key_share: Optional[Scalar] = field(default=None, repr=False)
    key_share_public: Optional[G1Point] = None

    @classmethod
    def create(cls, index: int, config: DkgConfig) -> Node:
        return cls(index=index, config=config, rng=node_rng(config.seed, index))

    # -- registration -------------------------------------------------------

    def phase_register(self, bulletin: Bulletin) -> None:
        self.keys = keygen(self.rng)
        bulletin.register(self.index, self.keys.public)

    def _load_peers(self, bulletin: Bulletin) -> None:
        self.peer_pks = {
            i: pk for i, pk in bulletin.state.registrations.items() if i != self.index
        }

    # -- share creation and distribution -----------------------------------

    def phase_distribute(self, bulletin: Bulletin, share_hook: Optional[ShareHook] = None) -> None:
        if bulletin.phase is not Phase.SHARE_DISTRIBUTION:
            raise WrongPhase("distribution requires the ShareDistribution phase")
        self._load_peers(bulletin)
        self.polynomial = generate_polynomial(self.config.t, self.rng)
        self.commitments = commit_polynomial(self.polynomial)
        encrypted = []
        for j in sorted(self.peer_pks):
            value = eval_polynomial(self.polynomial, j)
            if share_hook is not None:
                value = share_hook(j, value)
            key = derive_shared_key(self.keys.secret, self.peer_pks[j])
            encrypted.append(encrypt_share(Share(self.index, j, value), key))
        bulletin.distribute_shares(self.index, encrypted, self.commitments)

    def _distributions(self, bulletin: Bulletin):
        out = {}
        for ev in bulletin.read_events(0):
            if ev.type == "distribute":
                out[ev.sender] = decode_distribution(ev.payload)
        return out

    def phase_load_shares(self, bulletin: Bulletin) -> None:
        """Decrypt and check every inbound share; anything missing is INVALID."""
        self._load_peers(bulletin)
        dists = self._distributions(bulletin)
        self.decrypted = {}
        for issuer in sorted(self.peer_pks):
            if issuer not in dists:
                self.decrypted[issuer] = DecryptedShare(None, ShareStatus.INVALID)
                continue
            shares, commitments = dists[issuer]
            mine = [s for s in shares if s.receiver == self.index]
            if not mine:
                self.decrypted[issuer] = DecryptedShare(None, ShareStatus.INVALID)
                continue
            key = derive_shared_key(self.keys.secret, self.peer_pks[issuer])
            raw = recover_plaintext(mine[0], key)
            ok = verify_share(raw, commitments, self.index)
            self.decrypted[issuer] = DecryptedShare(
                raw % Q, ShareStatus.VALID if ok else ShareStatus.INVALID
            )

    # -- disputes -----------------------------------------------------------

    def invalid_issuers(self) -> list[int]:
        return sorted(i for i, d in self.decrypted.items() if d.status is ShareStatus.INVALID)

    def phase_submit_disputes(
        self, bulletin: Bulletin, extra_targets: Iterable[int] = ()
    ) -> list:
        """Dispute every issuer whose share failed verification.

        Issuers that never distributed are skipped: there is no ciphertext to
        adjudicate and the board already leaves them out of the qualified set.
        ``extra_targets`` lets a test adversary dispute honest issuers too.
        """
        if bulletin.phase is not Phase.DISPUTE:
            raise WrongPhase("disputes require the Dispute phase")
        dists = self._distributions(bulletin)
        targets = [i for i in self.invalid_issuers() if i in dists]
        targets += [i for i in extra_targets if i not in targets]
        results = []
        for issuer in targets:
            pk_issuer = self.peer_pks[issuer]
            shared = derive_shared_key(self.keys.secret, pk_issuer).point
            proof = dleq_prove(G1, self.keys.public, pk_issuer, shared, self.keys.secret, self.rng)
            assert dleq_verify(G1, self.keys.public, pk_issuer, shared, proof)
            results.append(bulletin.submit_dispute(self.index, issuer, shared, proof))
        return results

    def phase_load_disputes(self, bulletin: Bulletin) -> None:
        """Re-judge every logged dispute from public data alone."""
        dists = self._distributions(bulletin)
        pks = dict(bulletin.state.registrations)
        for ev in bulletin.read_events(0):
            if ev.type != "dispute":
                continue
            issuer, shared, proof, logged = decode_dispute(ev.payload)
            disputer = ev.sender
            try:
                shares, commitments = dists[issuer]
                ct = next(s for s in shares if s.receiver == disputer)
                mine = adjudicate(disputer, pks[disputer], pks[issuer], shared, proof, ct, commitments)
            except (KeyError, StopIteration):
                msg = f"tx {ev.tx_index}: dispute references missing data, ignored"
                log.warning(msg)
                self.warnings.append(msg)
                continue
            self.dispute_verdicts[ev.tx_index] = mine
            if mine is not logged:
                msg = (
                    f"tx {ev.tx_index}: board verdict {logged.name} "
                    f"disagrees with local verdict {mine.name}"
                )
                log.warning(msg)
                self.warnings.append(msg)
            if mine is Verdict.ISSUER_EXPELLED:
                self.disputed_nodes.add(issuer)

    # -- key derivation -----------------------------------------------------

    def derive_key_share(self, bulletin: Bulletin) -> Scalar:
        qual = bulletin.qualified_set()
        if not qual:
            raise InconsistentShare("qualified set is empty")
        if qual & self.disputed_nodes:
            raise InconsistentShare(f"convicted issuers {sorted(qual & self.disputed_nodes)} are qualified")
        total = 0
        for i in sorted(qual):
            if i == self.index:
                total += eval_polynomial(self.polynomial, self.index)
                continue
            got = self.decrypted.get(i)
            if got is None or got.status is not ShareStatus.VALID:
                raise InconsistentShare(f"no valid share from qualified issuer {i}")
            total += got.value
        total %= Q
        expected = point_sum(
            eval_commitments(bulletin.state.commitments_log[i], self.index) for i in sorted(qual)
        )
        if point_mul(G1, total) != expected:
            raise InconsistentShare(f"node {self.index}: key share does not match commitments")
        self.key_share = total
        self.key_share_public = expected
        return total
