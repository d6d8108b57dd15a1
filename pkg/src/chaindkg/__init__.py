"""Distributed key generation mediated by a simulated smart contract."""
from .bulletin import Bulletin, Phase, Verdict
from .dleq import DleqProof, dleq_prove, dleq_verify
from .group_math import G1, H1, IDENTITY, P, Q, G1Point, keccak256, point_add, point_mul
from .node import DkgConfig, Node
from .simulator import Adversary, ScenarioConfig, replay, run_scenario

__all__ = [
    "Adversary",
    "Bulletin",
    "DkgConfig",
    "DleqProof",
    "G1",
    "G1Point",
    "H1",
    "IDENTITY",
    "Node",
    "P",
    "Phase",
    "Q",
    "ScenarioConfig",
    "Verdict",
    "dleq_prove",
    "dleq_verify",
    "keccak256",
    "point_add",
    "point_mul",
    "replay",
    "run_scenario",
]
