import json
import random

import pytest

from chaindkg.bulletin import CorruptLog
from chaindkg.cli import main
from chaindkg.dleq import DleqProof, dleq_verify
from chaindkg.group_math import G1Point
from chaindkg.simulator import (
    Adversary,
    InvalidConfig,
    ScenarioConfig,
    emit_vectors,
    replay,
    run_scenario,
)
from oracles import affine_mul, pad_ref


def cfg(*adversaries, n=4, t=2, seed=1):
    return ScenarioConfig(n, t, seed, tuple(Adversary.parse(a) for a in adversaries))


def test_honest_scenario(tmp_path):
    res = run_scenario(cfg(), tmp_path / "log.json")
    assert res.report.qualified == [1, 2, 3, 4]
    assert res.report.reconstruction_ok is True
    assert res.ok


def test_bad_share_scenario(tmp_path):
    res = run_scenario(cfg("3:bad-share:2"), tmp_path / "log.json")
    assert res.report.qualified == [1, 2, 4]
    assert [(d["issuer"], d["verdict"]) for d in res.report.disputes] == [(3, "ISSUER_EXPELLED")]
    assert res.ok


def test_false_dispute_scenario(tmp_path):
    res = run_scenario(cfg("2:false-dispute:1"), tmp_path / "log.json")
    assert res.report.qualified == [1, 3, 4]
    assert [(d["disputer"], d["verdict"]) for d in res.report.disputes] == [(2, "DISPUTER_EXPELLED")]
    assert res.ok


def test_no_distribute_scenario(tmp_path):
    res = run_scenario(cfg("4:no-distribute"), tmp_path / "log.json")
    assert res.report.qualified == [1, 2, 3]
    assert res.report.disputes == []
    assert "4" not in res.report.share_distribution_hashes
    assert res.ok


def test_too_few_qualified_fails_check(tmp_path):
    res = run_scenario(cfg("3:no-distribute", "4:no-distribute"), tmp_path / "log.json")
    assert res.report.qualified == [1, 2]
    assert res.report.reconstruction_ok is False
    assert not res.ok


@pytest.mark.parametrize(
    "config",
    [
        ScenarioConfig(4, 4, 1),
        ScenarioConfig(4, 2, -1),
        ScenarioConfig(4, 2, 1, (Adversary(5, "bad-share", 1),)),
        ScenarioConfig(4, 2, 1, (Adversary(2, "bad-share", 2),)),
        ScenarioConfig(4, 2, 1, (Adversary(2, "bad-share", None),)),
        ScenarioConfig(4, 2, 1, (Adversary(2, "no-distribute", 3),)),
        ScenarioConfig(4, 2, 1, (Adversary(2, "eavesdrop", 3),)),
    ],
)
def test_invalid_configs(config):
    with pytest.raises(InvalidConfig):
        run_scenario(config)


def test_adversary_parse():
    assert Adversary.parse("3:bad-share:2") == Adversary(3, "bad-share", 2)
    assert Adversary.parse("4:no-distribute") == Adversary(4, "no-distribute", None)
    with pytest.raises(InvalidConfig):
        Adversary.parse("x:bad-share:2")
    with pytest.raises(InvalidConfig):
        Adversary.parse("3")


def test_report_stable(tmp_path):
    path = tmp_path / "log.json"
    first = run_scenario(cfg("3:bad-share:2"), path).report.to_json()
    log1 = path.read_bytes()
    second = run_scenario(cfg("3:bad-share:2"), path).report.to_json()
    assert first == second
    assert path.read_bytes() == log1


def test_replay_matches(tmp_path):
    path = tmp_path / "log.json"
    res = run_scenario(cfg("2:false-dispute:1"), path)
    rep = replay(path)
    assert rep.to_json() == res.report.to_json()
    assert rep.master_public_key == res.report.master_public_key


def test_replay_empty_log(tmp_path):
    path = tmp_path / "empty.json"
    path.write_text("[]")
    rep = replay(path)
    assert rep.qualified == []
    assert rep.reconstruction_ok is None


def test_replay_malformed(tmp_path):
    path = tmp_path / "bad.json"
    path.write_text("{not json")
    with pytest.raises(CorruptLog):
        replay(path)
    path.write_text(json.dumps([{"tx_index": 0}]))
    with pytest.raises(CorruptLog):
        replay(path)


def test_replay_detects_flipped_bytes(tmp_path):
    path = tmp_path / "log.json"
    original = run_scenario(cfg("3:bad-share:2"), path).report.to_json()
    events = json.loads(path.read_text())
    rng = random.Random(5)
    candidates = [i for i, e in enumerate(events) if len(e["payload_hex"]) > 2]
    for trial in range(12):
        idx = rng.choice(candidates)
        mutated = json.loads(json.dumps(events))
        payload = bytearray(bytes.fromhex(mutated[idx]["payload_hex"][2:]))
        pos = rng.randrange(len(payload))
        payload[pos] ^= 1 << rng.randrange(8)
        mutated[idx]["payload_hex"] = "0x" + payload.hex()
        bad = tmp_path / f"mut{trial}.json"
        bad.write_text(json.dumps(mutated))
        try:
            rep = replay(bad)
        except CorruptLog:
            continue
        # the log path differs, so compare everything else
        got = rep.to_dict()
        want = json.loads(original)
        got.pop("event_log"), want.pop("event_log")
        assert got != want, f"flip at event {idx} byte {pos} went unnoticed"


def test_emit_vectors():
    vec = emit_vectors(0)
    digests = {v["digest"] for v in vec["keccak256"]}
    assert "0xc5d2460186f7233c927e7db2dcc703c0e500b653ca82273b7bfad8045d85a470" in digests
    assert "0x4e03657aea45a94fc7d47ba826c8d667c0d1e6e33a64a036ec44f58fa12d6c45" in digests
    for d in vec["dleq"]:
        pts = [G1Point.from_bytes(bytes.fromhex(d[k][2:])) for k in ("x1", "y1", "x2", "y2")]
        proof = DleqProof(int(d["challenge"], 16), int(d["response"], 16))
        assert d["valid"] and dleq_verify(*pts, proof)
    enc = vec["share_encryption"][0]
    sk_i, sk_j = int(enc["issuer_secret"], 16), int(enc["receiver_secret"], 16)
    kx, _ = affine_mul(*affine_mul(1, 2, sk_j), sk_i)
    assert int(enc["pad"], 16) == pad_ref(kx, enc["receiver"])
    assert int(enc["ciphertext"], 16) == int(enc["share"], 16) ^ int(enc["pad"], 16)
    for p in vec["pads"]:
        assert int(p["pad"], 16) == pad_ref(int(p["shared_key"][2:66], 16), p["receiver"])
    assert json.dumps(emit_vectors(0)) == json.dumps(vec)


def test_cli_run_and_replay(tmp_path, capsys):
    log = tmp_path / "log.json"
    rc = main(["run", "--nodes", "4", "--threshold", "2", "--seed", "1",
               "--adversary", "3:bad-share:2", "--out", str(log)])
    assert rc == 0
    run_out = capsys.readouterr().out
    assert json.loads(run_out)["qualified"] == [1, 2, 4]
    assert main(["replay", "--log", str(log)]) == 0
    assert capsys.readouterr().out == run_out


def test_cli_failures(tmp_path, capsys):
    log = tmp_path / "log.json"
    assert main(["run", "--nodes", "4", "--threshold", "2", "--seed", "1",
                 "--adversary", "9:bad-share:1", "--out", str(log)]) == 2
    assert main(["run", "--nodes", "4", "--threshold", "2", "--seed", "1",
                 "--adversary", "3:no-distribute", "--adversary", "4:no-distribute",
                 "--out", str(log)]) == 1
    bad = tmp_path / "bad.json"
    bad.write_text("[1, 2]")
    assert main(["replay", "--log", str(bad)]) == 3


def test_cli_vectors(tmp_path):
    out = tmp_path / "v.json"
    assert main(["vectors", "--out", str(out)]) == 0
    first = out.read_bytes()
    assert main(["vectors", "--out", str(out)]) == 0
    assert out.read_bytes() == first
    assert json.loads(first)["keccak256"][0]["input_hex"] == "0x"
