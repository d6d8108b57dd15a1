"""Simulated DKG contract: an ordered, append-only transaction log.

Every accepted transaction becomes an :class:`Event` carrying its raw
payload, so a fresh board fed the same events ends in the same state
(see :meth:`Bulletin.replay`). Rejected transactions raise and leave no
trace, like a reverted call.

Payload layouts (all integers big-endian)::

    deploy      n:u16 | t:u16
    register    pk:64
    distribute  count:u16 | count * share:36 | t+1:u16 | (t+1) * commitment:64
    dispute     issuer:u16 | shared_key:64 | proof:64 | verdict:u8
    advance     new_phase:u8
"""
from __future__ import annotations

import enum
import threading
from dataclasses import dataclass, field
from typing import Iterable, Optional, Sequence

from .dleq import DleqProof, dleq_verify
from .group_math import G1, G1Point, keccak256, point_sum
from .share_channel import ENCRYPTED_SHARE_SIZE, EncryptedShare, SharedKey, recover_plaintext
from .vss import verify_share

ZERO_HASH = bytes(32)


class Phase(enum.IntEnum):
    REGISTRATION = 0
    SHARE_DISTRIBUTION = 1
    DISPUTE = 2
    KEY_DERIVATION = 3
    FINISHED = 4


class Verdict(enum.IntEnum):
    ISSUER_EXPELLED = 0
    DISPUTER_EXPELLED = 1
    REJECTED = 2


class BulletinError(Exception):
    pass


class WrongPhase(BulletinError):
    pass


class DuplicateRegistration(BulletinError):
    pass


class InvalidPublicKey(BulletinError):
    pass


class NotRegistered(BulletinError):
    pass


class MalformedPayload(BulletinError):
    pass


class AlreadyDistributed(BulletinError):
    pass


class UnknownParty(BulletinError):
    pass


class NoSharesOnRecord(BulletinError):
    pass


class AlreadyFinished(BulletinError):
    pass


class EmptyQualifiedSet(BulletinError):
    pass


class CorruptLog(BulletinError):
    pass


@dataclass(frozen=True)
class Event:
    tx_index: int
    phase: Phase
    type: str
    sender: int
    payload: bytes

    def to_json(self) -> dict:
        return {
            "tx_index": self.tx_index,
            "phase": self.phase.name,
            "type": self.type,
            "sender": self.sender,
            "payload_hex": "0x" + self.payload.hex(),
        }

    @classmethod
    def from_json(cls, obj: dict) -> Event:
        try:
            payload_hex = obj["payload_hex"]
            if not payload_hex.startswith("0x"):
                raise ValueError("payload_hex must be 0x-prefixed")
            return cls(
                tx_index=int(obj["tx_index"]),
                phase=Phase[obj["phase"]],
                type=str(obj["type"]),
                sender=int(obj["sender"]),
                payload=bytes.fromhex(payload_hex[2:]),
            )
        except (KeyError, ValueError, TypeError, AttributeError) as exc:
            raise CorruptLog(f"malformed event {obj!r}: {exc}") from exc


@dataclass(frozen=True)
class DisputeEvent:
    disputer: int
    issuer: int
    shared_key: G1Point
    proof: DleqProof
    verdict: Verdict
    tx_index: int


@dataclass
class ContractState:
    n: int
    t: int
    phase: Phase = Phase.REGISTRATION
    registrations: dict[int, G1Point] = field(default_factory=dict)
    share_distribution_hashes: dict[int, bytes] = field(default_factory=dict)
    commitments_log: dict[int, tuple[G1Point, ...]] = field(default_factory=dict)
    encrypted_shares_log: dict[int, list[EncryptedShare]] = field(default_factory=dict)
    dispute_log: list[DisputeEvent] = field(default_factory=list)
    expelled: set[int] = field(default_factory=set)
    tx_counter: int = 0


def encode_distribution(
    shares: Sequence[EncryptedShare], commitments: Sequence[G1Point]
) -> bytes:
    return (
        len(shares).to_bytes(2, "big")
        + b"".join(s.to_bytes() for s in shares)
        + len(commitments).to_bytes(2, "big")
        + b"".join(c.to_bytes() for c in commitments)
    )


def decode_distribution(payload: bytes) -> tuple[list[EncryptedShare], tuple[G1Point, ...]]:
    try:
        count = int.from_bytes(payload[0:2], "big")
        end = 2 + count * ENCRYPTED_SHARE_SIZE
        shares = [
            EncryptedShare.from_bytes(payload[off:off + ENCRYPTED_SHARE_SIZE])
            for off in range(2, end, ENCRYPTED_SHARE_SIZE)
        ]
        ncom = int.from_bytes(payload[end:end + 2], "big")
        body = payload[end + 2:]
        if len(body) != 64 * ncom or len(payload) < end + 2:
            raise ValueError("commitment section has the wrong length")
        commitments = tuple(G1Point.from_bytes(body[k:k + 64]) for k in range(0, len(body), 64))
    except ValueError as exc:
        raise MalformedPayload(f"cannot decode distribution payload: {exc}") from exc
    return shares, commitments


def distribution_hash(shares: Sequence[EncryptedShare], commitments: Sequence[G1Point]) -> bytes:
    return keccak256(
        b"".join(s.to_bytes() for s in shares) + b"".join(c.to_bytes() for c in commitments)
    )


def encode_dispute(issuer: int, shared_key: G1Point, proof: DleqProof, verdict: Verdict) -> bytes:
    return issuer.to_bytes(2, "big") + shared_key.to_bytes() + proof.to_bytes() + bytes([verdict])


def decode_dispute(payload: bytes) -> tuple[int, G1Point, DleqProof, Verdict]:
    if len(payload) != 2 + 64 + 64 + 1:
        raise MalformedPayload(f"dispute payload has length {len(payload)}")
    try:
        return (
            int.from_bytes(payload[0:2], "big"),
            G1Point.from_bytes(payload[2:66]),
            DleqProof.from_bytes(payload[66:130]),
            Verdict(payload[130]),
        )
    except ValueError as exc:
        raise MalformedPayload(f"cannot decode dispute payload: {exc}") from exc


def adjudicate(
    disputer: int,
    pk_disputer: G1Point,
    pk_issuer: G1Point,
    shared_key: G1Point,
    proof: DleqProof,
    ciphertext: EncryptedShare,
    commitments: Sequence[G1Point],
) -> Verdict:
    """Decide a dispute the way the contract does.

    The disputer proves that ``shared_key`` is sk_disputer * pk_issuer; given
    that, anyone can decrypt the logged share and check it against the
    issuer's commitments.
    """
    if not dleq_verify(G1, pk_disputer, pk_issuer, shared_key, proof):
        return Verdict.REJECTED
    value = recover_plaintext(ciphertext, SharedKey(shared_key))
    if verify_share(value, commitments, disputer):
        return Verdict.DISPUTER_EXPELLED
    return Verdict.ISSUER_EXPELLED


class Bulletin:
    """Single-writer bulletin board; all mutations are serialized by a lock."""

    def __init__(self, n: int, t: int):
        if not 1 <= t < n < 1 << 16:
            raise ValueError(f"invalid parameters n={n}, t={t}")
        self.state = ContractState(n=n, t=t)
        self._events: list[Event] = []
        self._lock = threading.RLock()
        self._append("deploy", 0, n.to_bytes(2, "big") + t.to_bytes(2, "big"))

    # -- helpers ------------------------------------------------------------

    def _append(self, type_: str, sender: int, payload: bytes) -> Event:
        ev = Event(self.state.tx_counter, self.state.phase, type_, sender, payload)
        self._events.append(ev)
        self.state.tx_counter += 1
        return ev

    def _require_phase(self, *phases: Phase) -> None:
        if self.state.phase not in phases:
            names = ", ".join(p.name for p in phases)
            raise WrongPhase(f"operation requires phase {names}, board is in {self.state.phase.name}")

    @property
    def n(self) -> int:
        return self.state.n

    @property
    def t(self) -> int:
        return self.state.t

    @property
    def phase(self) -> Phase:
        return self.state.phase

    # -- transactions -------------------------------------------------------

    def register(self, node: int, pk: G1Point) -> None:
        with self._lock:
            self._require_phase(Phase.REGISTRATION)
            if not 1 <= node <= self.state.n:
                raise UnknownParty(f"node index {node} outside [1, {self.state.n}]")
            if node in self.state.registrations:
                raise DuplicateRegistration(f"node {node} already registered")
            if pk.is_identity:
                raise InvalidPublicKey("public key is the identity")
            self.state.registrations[node] = pk
            self._append("register", node, pk.to_bytes())

    def distribute_shares(
        self, issuer: int, encrypted: Sequence[EncryptedShare], commitments: Sequence[G1Point]
    ) -> bytes:
        with self._lock:
            st = self.state
            self._require_phase(Phase.SHARE_DISTRIBUTION)
            if issuer not in st.registrations:
                raise NotRegistered(f"node {issuer} is not registered")
            if issuer in st.commitments_log:
                raise AlreadyDistributed(f"node {issuer} already distributed shares")
            expected = set(st.registrations) - {issuer}
            receivers = [e.receiver for e in encrypted]
            if len(receivers) != len(expected) or set(receivers) != expected:
                raise MalformedPayload(
                    f"expected one share for each of {sorted(expected)}, got {receivers}"
                )
            if any(e.issuer != issuer for e in encrypted):
                raise MalformedPayload("share issuer does not match sender")
            if len(commitments) != st.t + 1:
                raise MalformedPayload(f"expected {st.t + 1} commitments, got {len(commitments)}")
            digest = distribution_hash(encrypted, commitments)
            st.share_distribution_hashes[issuer] = digest
            st.commitments_log[issuer] = tuple(commitments)
            st.encrypted_shares_log[issuer] = list(encrypted)
            self._append("distribute", issuer, encode_distribution(encrypted, commitments))
            return digest

    def submit_dispute(
        self, disputer: int, issuer: int, shared_key: G1Point, proof: DleqProof
    ) -> DisputeEvent:
        with self._lock:
            st = self.state
            self._require_phase(Phase.DISPUTE)
            for party in (disputer, issuer):
                if party not in st.registrations:
                    raise UnknownParty(f"node {party} is not registered")
            if disputer == issuer:
                raise MalformedPayload("a node cannot dispute itself")
            record = [e for e in st.encrypted_shares_log.get(issuer, ()) if e.receiver == disputer]
            if not record:
                raise NoSharesOnRecord(f"no share from {issuer} to {disputer} on record")
            verdict = adjudicate(
                disputer,
                st.registrations[disputer],
                st.registrations[issuer],
                shared_key,
                proof,
                record[0],
                st.commitments_log[issuer],
            )
            if verdict is Verdict.ISSUER_EXPELLED:
                self._expel(issuer)
            elif verdict is Verdict.DISPUTER_EXPELLED:
                self._expel(disputer)
            ev = self._append("dispute", disputer, encode_dispute(issuer, shared_key, proof, verdict))
            dispute = DisputeEvent(disputer, issuer, shared_key, proof, verdict, ev.tx_index)
            st.dispute_log.append(dispute)
            return dispute

    def _expel(self, node: int) -> None:
        self.state.expelled.add(node)
        if node in self.state.share_distribution_hashes:
            self.state.share_distribution_hashes[node] = ZERO_HASH

    def advance_phase(self) -> Phase:
        with self._lock:
            if self.state.phase is Phase.FINISHED:
                raise AlreadyFinished("protocol already finished")
            nxt = Phase(self.state.phase + 1)
            self._append("advance", 0, bytes([nxt]))
            self.state.phase = nxt
            return nxt

    # -- views --------------------------------------------------------------

    def qualified_set(self) -> frozenset[int]:
        self._require_phase(Phase.KEY_DERIVATION, Phase.FINISHED)
        st = self.state
        return frozenset(
            i for i in st.registrations if i in st.commitments_log and i not in st.expelled
        )

    def master_public_key(self) -> G1Point:
        qual = self.qualified_set()
        if not qual:
            raise EmptyQualifiedSet("no node qualified")
        return point_sum(self.state.commitments_log[i][0] for i in sorted(qual))

    def read_events(self, since_tx: int = 0) -> list[Event]:
        with self._lock:
            return [e for e in self._events if e.tx_index >= since_tx]

    def export_events(self) -> list[dict]:
        return [e.to_json() for e in self.read_events(0)]

    def log_digest(self) -> bytes:
        """keccak256 over every event, binding the whole transaction history."""
        parts = []
        for e in self.read_events(0):
            kind = e.type.encode()
            parts.append(
                e.tx_index.to_bytes(8, "big")
                + bytes([e.phase, len(kind)])
                + kind
                + e.sender.to_bytes(2, "big")
                + len(e.payload).to_bytes(4, "big")
                + e.payload
            )
        return keccak256(b"".join(parts))

    # -- replay -------------------------------------------------------------

    @classmethod
    def replay(cls, events: Iterable[Event]) -> Optional[Bulletin]:
        """Re-apply a logged transaction sequence to a fresh board.

        Returns ``None`` for an empty log. Any event that does not decode,
        does not apply cleanly, or whose recomputed dispute verdict differs
        from the logged one raises :class:`CorruptLog`.
        """
        events = list(events)
        if not events:
            return None
        head = events[0]
        if head.type != "deploy" or head.tx_index != 0 or len(head.payload) != 4:
            raise CorruptLog("log must start with a deploy event")
        try:
            board = cls(int.from_bytes(head.payload[:2], "big"), int.from_bytes(head.payload[2:], "big"))
        except ValueError as exc:
            raise CorruptLog(str(exc)) from exc
        for ev in events[1:]:
            if ev.tx_index != board.state.tx_counter:
                raise CorruptLog(f"expected tx {board.state.tx_counter}, found {ev.tx_index}")
            if ev.phase is not board.state.phase:
                raise CorruptLog(f"tx {ev.tx_index} logged in {ev.phase.name}, board is in {board.phase.name}")
            try:
                board._apply(ev)
            except (BulletinError, ValueError) as exc:
                if isinstance(exc, CorruptLog):
                    raise
                raise CorruptLog(f"tx {ev.tx_index} does not apply: {exc}") from exc
        return board

    def _apply(self, ev: Event) -> None:
        if ev.type == "register":
            self.register(ev.sender, G1Point.from_bytes(ev.payload))
        elif ev.type == "distribute":
            shares, commitments = decode_distribution(ev.payload)
            self.distribute_shares(ev.sender, shares, commitments)
        elif ev.type == "dispute":
            issuer, key, proof, logged = decode_dispute(ev.payload)
            result = self.submit_dispute(ev.sender, issuer, key, proof)
            if result.verdict is not logged:
                raise CorruptLog(
                    f"tx {ev.tx_index}: verdict diverges, logged {logged.name}, "
                    f"recomputed {result.verdict.name}"
                )
        elif ev.type == "advance":
            if len(ev.payload) != 1 or ev.payload[0] != self.state.phase + 1:
                raise CorruptLog(f"tx {ev.tx_index}: bad phase transition")
            self.advance_phase()
        else:
            raise CorruptLog(f"tx {ev.tx_index}: unknown event type {ev.type!r}")
