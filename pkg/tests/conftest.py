import pytest

from chaindkg.bulletin import Bulletin, Phase
from chaindkg.group_math import Q
from chaindkg.node import DkgConfig, Node


def build_board(n=4, t=2, seed=1, until=Phase.DISPUTE, bad=None, skip=()):
    """Drive honest nodes up to ``until``.

    ``bad`` maps issuer -> set of receivers that get f(j)+1; ``skip`` lists
    nodes that never distribute.
    """
    bad = bad or {}
    board = Bulletin(n, t)
    cfg = DkgConfig(n, t, seed)
    nodes = {i: Node.create(i, cfg) for i in range(1, n + 1)}
    for node in nodes.values():
        node.phase_register(board)
    if until is Phase.REGISTRATION:
        return board, nodes
    board.advance_phase()
    for i, node in nodes.items():
        if i in skip:
            continue
        targets = bad.get(i, set())
        hook = (lambda j, v, tg=targets: (v + 1) % Q if j in tg else v) if targets else None
        node.phase_distribute(board, share_hook=hook)
    if until is Phase.SHARE_DISTRIBUTION:
        return board, nodes
    board.advance_phase()
    for node in nodes.values():
        node.phase_load_shares(board)
    return board, nodes


@pytest.fixture
def board_factory():
    return build_board


# -- acceptance reporting ------------------------------------------------------

_ACCEPTANCE = []


def pytest_configure(config):
    config.addinivalue_line("markers", "acceptance(num, title): acceptance criterion")


def pytest_runtest_makereport(item, call):
    marker = item.get_closest_marker("acceptance")
    if marker is None or call.when != "call":
        return
    status = "PASS" if call.excinfo is None else "FAIL"
    _ACCEPTANCE.append((marker.args[0], marker.args[1], item.name, status))


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for num, title, name, status in sorted(_ACCEPTANCE):
        terminalreporter.write_line(f"[{status}] AC{num} {title} ({name})")
