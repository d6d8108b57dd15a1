"""Deterministic end-to-end scenarios over one bulletin board.

Nodes act in index order inside each phase, so the board's transaction
order (and therefore the event log) is a pure function of the scenario.
"""
from __future__ import annotations

import itertools
import json
import random
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional, Sequence

from .bulletin import Bulletin, CorruptLog, EmptyQualifiedSet, Event, Phase, WrongPhase
from .dleq import DleqProof, dleq_prove, dleq_verify
from .group_math import G1, H1, Q, G1Point, keccak256, point_from_projective, point_mul, point_sum
from .node import DkgConfig, InconsistentShare, Node
from .share_channel import derive_pad, derive_shared_key, encrypt_share, keygen
from .vss import Share, eval_commitments, lagrange_coefficients, lagrange_reconstruct

BEHAVIORS = ("bad-share", "no-distribute", "false-dispute")
# upper bound on (t+1)-subsets examined by the reconstruction check
MAX_SUBSETS = 64


class InvalidConfig(ValueError):
    pass


@dataclass(frozen=True)
class Adversary:
    index: int
    behavior: str
    target: Optional[int] = None

    @classmethod
    def parse(cls, text: str) -> Adversary:
        parts = text.split(":")
        if len(parts) not in (2, 3):
            raise InvalidConfig(f"adversary must be IDX:BEHAVIOR[:TARGET], got {text!r}")
        try:
            index = int(parts[0])
            target = int(parts[2]) if len(parts) == 3 else None
        except ValueError as exc:
            raise InvalidConfig(f"bad adversary spec {text!r}") from exc
        return cls(index, parts[1], target)


@dataclass(frozen=True)
class ScenarioConfig:
    n: int
    t: int
    seed: int
    adversaries: tuple[Adversary, ...] = ()

    def validate(self) -> None:
        try:
            DkgConfig(self.n, self.t, self.seed)
        except ValueError as exc:
            raise InvalidConfig(str(exc)) from exc
        for adv in self.adversaries:
            if adv.behavior not in BEHAVIORS:
                raise InvalidConfig(f"unknown behavior {adv.behavior!r}")
            if not 1 <= adv.index <= self.n:
                raise InvalidConfig(f"adversary index {adv.index} outside [1, {self.n}]")
            if adv.behavior == "no-distribute":
                if adv.target is not None:
                    raise InvalidConfig("no-distribute takes no target")
            elif adv.target is None or adv.target == adv.index or not 1 <= adv.target <= self.n:
                raise InvalidConfig(f"{adv.behavior} needs a target in [1, {self.n}] other than itself")

    def behaviors(self, index: int, behavior: str) -> list[Optional[int]]:
        return [a.target for a in self.adversaries if a.index == index and a.behavior == behavior]


@dataclass
class ScenarioReport:
    n: Optional[int] = None
    t: Optional[int] = None
    finished: bool = False
    qualified: list[int] = field(default_factory=list)
    master_public_key: Optional[str] = None
    key_share_publics: dict[str, str] = field(default_factory=dict)
    disputes: list[dict] = field(default_factory=list)
    share_distribution_hashes: dict[str, str] = field(default_factory=dict)
    reconstruction_ok: Optional[bool] = None
    log_digest: Optional[str] = None
    event_log: Optional[str] = None

    def to_dict(self) -> dict:
        return {
            "n": self.n,
            "t": self.t,
            "finished": self.finished,
            "qualified": self.qualified,
            "master_public_key": self.master_public_key,
            "key_share_publics": self.key_share_publics,
            "disputes": self.disputes,
            "share_distribution_hashes": self.share_distribution_hashes,
            "reconstruction_ok": self.reconstruction_ok,
            "log_digest": self.log_digest,
            "event_log": self.event_log,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True) + "\n"


@dataclass
class ScenarioResult:
    """A report plus the white-box artefacts only the simulator can see."""

    report: ScenarioReport
    bulletin: Bulletin
    nodes: dict[int, Node]
    violations: list[str]

    @property
    def ok(self) -> bool:
        return bool(self.report.reconstruction_ok) and not self.violations


def _subsets(members: Sequence[int], t: int):
    return list(itertools.islice(itertools.combinations(sorted(members), t + 1), MAX_SUBSETS))


def _public_report(board: Bulletin, event_log: Optional[str]) -> ScenarioReport:
    """Everything in a report that can be recomputed from the board alone."""
    st = board.state
    rep = ScenarioReport(n=st.n, t=st.t, event_log=event_log)
    rep.finished = st.phase is Phase.FINISHED
    rep.log_digest = "0x" + board.log_digest().hex()
    rep.disputes = [
        {"tx_index": d.tx_index, "disputer": d.disputer, "issuer": d.issuer, "verdict": d.verdict.name}
        for d in st.dispute_log
    ]
    rep.share_distribution_hashes = {
        str(i): "0x" + h.hex() for i, h in sorted(st.share_distribution_hashes.items())
    }
    try:
        qual = board.qualified_set()
    except WrongPhase:
        return rep
    rep.qualified = sorted(qual)
    try:
        rep.master_public_key = board.master_public_key().hex()
    except EmptyQualifiedSet:
        pass
    for j in rep.qualified:
        pub = point_sum(eval_commitments(st.commitments_log[i], j) for i in rep.qualified)
        rep.key_share_publics[str(j)] = pub.hex()
    return rep


def _public_reconstruction_check(board: Bulletin, rep: ScenarioReport) -> bool:
    """Interpolate the key-share publics in the exponent and compare to the
    master public key over every examined (t+1)-subset."""
    if rep.master_public_key is None or len(rep.qualified) < board.t + 1:
        return False
    mpk = board.master_public_key()
    pubs = {int(j): G1Point.from_bytes(bytes.fromhex(h[2:])) for j, h in rep.key_share_publics.items()}
    for subset in _subsets(rep.qualified, board.t):
        lam = lagrange_coefficients(subset)
        if point_sum(point_mul(pubs[j], l) for j, l in zip(subset, lam)) != mpk:
            return False
    return True


def run_scenario(config: ScenarioConfig, out: Optional[str | Path] = None) -> ScenarioResult:
    config.validate()
    dkg = DkgConfig(config.n, config.t, config.seed)
    board = Bulletin(config.n, config.t)
    nodes = {i: Node.create(i, dkg) for i in range(1, config.n + 1)}
    violations: list[str] = []

    for node in nodes.values():
        node.phase_register(board)
    board.advance_phase()

    for i, node in nodes.items():
        if config.behaviors(i, "no-distribute"):
            continue
        targets = set(config.behaviors(i, "bad-share"))
        hook = None
        if targets:
            def hook(j, value, targets=targets):
                return (value + 1) % Q if j in targets else value
        node.phase_distribute(board, share_hook=hook)
    board.advance_phase()

    for node in nodes.values():
        node.phase_load_shares(board)
    for i, node in nodes.items():
        node.phase_submit_disputes(board, extra_targets=config.behaviors(i, "false-dispute"))
    board.advance_phase()

    for node in nodes.values():
        node.phase_load_disputes(board)
        violations.extend(f"node {node.index}: {w}" for w in node.warnings)

    qual = board.qualified_set()
    for i in sorted(qual):
        try:
            nodes[i].derive_key_share(board)
        except InconsistentShare as exc:
            violations.append(str(exc))
    board.advance_phase()

    rep = _public_report(board, str(out) if out is not None else None)
    rep.reconstruction_ok = not violations and _white_box_check(board, nodes, rep)

    if out is not None:
        write_event_log(board, out)
    return ScenarioResult(rep, board, nodes, violations)


def _white_box_check(board: Bulletin, nodes: dict[int, Node], rep: ScenarioReport) -> bool:
    qual = rep.qualified
    if rep.master_public_key is None or len(qual) < board.t + 1:
        return False
    group_secret = sum(nodes[i].polynomial.secret for i in qual) % Q
    if point_mul(G1, group_secret) != board.master_public_key():
        return False
    for j in qual:
        if nodes[j].key_share_public is None or nodes[j].key_share_public.hex() != rep.key_share_publics[str(j)]:
            return False
    for subset in _subsets(qual, board.t):
        pts = [(j, nodes[j].key_share) for j in subset]
        if lagrange_reconstruct(pts, board.t) != group_secret:
            return False
    return True


def write_event_log(board: Bulletin, path: str | Path) -> None:
    Path(path).write_text(json.dumps(board.export_events(), indent=2) + "\n")


def load_event_log(path: str | Path) -> list[Event]:
    try:
        raw = json.loads(Path(path).read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise CorruptLog(f"cannot read event log {path}: {exc}") from exc
    if not isinstance(raw, list):
        raise CorruptLog("event log must be a JSON array")
    return [Event.from_json(obj) for obj in raw]


def replay(event_log_path: str | Path) -> ScenarioReport:
    board = Bulletin.replay(load_event_log(event_log_path))
    if board is None:
        return ScenarioReport(event_log=str(event_log_path))
    rep = _public_report(board, str(event_log_path))
    if rep.finished:
        rep.reconstruction_ok = _public_reconstruction_check(board, rep)
    return rep


# -- golden vectors ------------------------------------------------------------

SAMPLE_RUN_DLEQ = {
    "x1": G1,
    "y1": (
        19264659997498337231621849020324059839727633018344333818406571209706203133187,
        12311200540645983074100160614979827101793507198593933504549623882564840726866,
        20670726114001654463056991634829687089002941232072263069935333565317103573495,
    ),
    "x2": H1,
    "y2": (
        14945644336923121346342859944168545416458423597018613969345084948695366548579,
        6287194924561282354354695364050405821231283221714798271249840862954991383974,
        9769023299891292075968207384775446300063615377412681646013428758993263180405,
    ),
    "challenge": 51608323136266335612692795096660702882832975771701719531287921368851758992301,
    "response": 5697936578451188395987467431508950282667773400761457095498679147707605201421,
}


def _h(v: int) -> str:
    return f"0x{v:064x}"


def emit_vectors(seed: int = 0) -> dict:
    """Golden vectors in the documented schema (see README)."""
    rng = random.Random(seed)
    vectors: dict = {"seed": seed}
    vectors["keccak256"] = [
        {"input_hex": "0x" + data.hex(), "digest": "0x" + keccak256(data).hex()}
        for data in (b"", b"abc")
    ]

    a, b = keygen(rng), keygen(rng)
    key = derive_shared_key(a.secret, b.public)
    vectors["pads"] = [
        {"shared_key": key.point.hex(), "receiver": j, "pad": _h(derive_pad(key, j))}
        for j in (1, 2, 3)
    ]

    dleq = []
    y1 = point_from_projective(*SAMPLE_RUN_DLEQ["y1"])
    y2 = point_from_projective(*SAMPLE_RUN_DLEQ["y2"])
    sample_proof = DleqProof(SAMPLE_RUN_DLEQ["challenge"], SAMPLE_RUN_DLEQ["response"])
    dleq.append(_dleq_entry("sample-run", G1, y1, H1, y2, sample_proof))
    alpha = keygen(rng).secret
    fy1, fy2 = point_mul(G1, alpha), point_mul(H1, alpha)
    proof = dleq_prove(G1, fy1, H1, fy2, alpha, rng)
    dleq.append(_dleq_entry("roundtrip", G1, fy1, H1, fy2, proof))
    vectors["dleq"] = dleq

    issuer, receiver = keygen(rng), keygen(rng)
    value = rng.randrange(Q)
    j = 2
    k = derive_shared_key(issuer.secret, receiver.public)
    enc = encrypt_share(Share(1, j, value), k)
    vectors["share_encryption"] = [{
        "issuer_secret": _h(issuer.secret),
        "issuer_public": issuer.public.hex(),
        "receiver_secret": _h(receiver.secret),
        "receiver_public": receiver.public.hex(),
        "receiver": j,
        "share": _h(value),
        "shared_key": k.point.hex(),
        "pad": _h(derive_pad(k, j)),
        "ciphertext": _h(enc.ciphertext),
    }]
    return vectors


def _dleq_entry(name, x1, y1, x2, y2, proof) -> dict:
    return {
        "name": name,
        "x1": x1.hex(),
        "y1": y1.hex(),
        "x2": x2.hex(),
        "y2": y2.hex(),
        "challenge": _h(proof.challenge),
        "response": _h(proof.response),
        "valid": dleq_verify(x1, y1, x2, y2, proof),
    }
