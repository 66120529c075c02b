import numpy as np
import pytest

from hypercpd.hypergraph import Hypergraph


def random_hypergraph(rng, n_max, m_max, unit=False, cover=True, n_min=2):
    """Random hypergraph; with ``cover`` every node lies in some edge."""
    while True:
        n = int(rng.integers(n_min, n_max + 1))
        m = int(rng.integers(1, m_max + 1))
        edges = [rng.choice(n, size=int(rng.integers(2, n + 1)), replace=False) for _ in range(m)]
        if cover and len(set(np.concatenate(edges).tolist())) < n:
            continue
        if unit:
            w = np.ones(m)
        else:
            # mix exact ones with fractional weights
            w = np.where(rng.random(m) < 0.3, 1.0, rng.uniform(0.05, 1.0, m))
        return Hypergraph(n, edges, w)


def connected_random_hypergraph(rng, n_max, m_max, unit=False):
    while True:
        h = random_hypergraph(rng, n_max, m_max, unit=unit)
        if h.is_connected():
            return h


@pytest.fixture
def two_edge():
    # nodes 1..4 of the worked example are indices 0..3
    return Hypergraph(4, [[0, 1, 2], [2, 3]], [1.0, 1.0])


@pytest.fixture
def rng():
    return np.random.default_rng(20240517)


_ACCEPTANCE = pytest.StashKey[list]()


@pytest.fixture
def acceptance(request):
    """Record one pass/fail line per acceptance criterion, then assert it."""
    lines = request.config.stash.setdefault(_ACCEPTANCE, [])

    def record(name, ok, detail=""):
        lines.append(f"{'PASS' if ok else 'FAIL'}  {name}: {detail}")
        print(lines[-1])
        assert ok, f"{name}: {detail}"

    return record


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    lines = config.stash.get(_ACCEPTANCE, [])
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in lines:
            terminalreporter.write_line(line)
