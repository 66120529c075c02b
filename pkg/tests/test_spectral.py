import numpy as np
import pytest
import scipy.linalg
import scipy.sparse

from hypercpd.hypergraph import Hypergraph
from hypercpd.reduction import adapted_cb_gadget, clique_expansion, star_expansion, transition_matrix
from hypercpd.spectral import (
    ConvergenceError,
    SymmetricLaplacian,
    combinatorial_laplacian,
    normalized_laplacian,
    pad_spectrum,
    stationary_distribution,
    stationary_residual,
    top_k_eigenvalues,
    undirected_normalized_laplacian,
    write_spectra_csv,
)

from conftest import connected_random_hypergraph


def _walk(h):
    return transition_matrix(adapted_cb_gadget(h))


def _null_space_oracle(p):
    """Stationary vector from the null space of P^T - I (SVD based)."""
    dense = p.toarray()
    ns = scipy.linalg.null_space(dense.T - np.eye(dense.shape[0]))
    assert ns.shape[1] == 1
    v = ns[:, 0]
    return v / v.sum()


def test_stationary_two_edge_closed_form(two_edge):
    phi = stationary_distribution(_walk(two_edge))
    np.testing.assert_allclose(phi, np.array([1, 1, 2, 1, 3, 2, 3, 2]) / 15, atol=1e-12)


def test_stationary_single_edge():
    phi = stationary_distribution(_walk(Hypergraph(2, [[0, 1]])))
    np.testing.assert_allclose(phi, np.array([1, 1, 2, 2]) / 6, atol=1e-12)


def test_stationary_matches_null_space_oracle(rng):
    for _ in range(30):
        h = connected_random_hypergraph(rng, 12, 8)
        p = _walk(h)
        phi = stationary_distribution(p)
        assert stationary_residual(p, phi) <= 1e-10
        assert phi.min() > 0
        assert abs(phi.sum() - 1) <= 1e-12
        np.testing.assert_allclose(phi, _null_space_oracle(p), atol=1e-9)


def test_lazy_chain_has_same_fixed_point(rng):
    for _ in range(10):
        p = _walk(connected_random_hypergraph(rng, 10, 6))
        lazy = 0.5 * (p + scipy.sparse.identity(p.shape[0]))
        np.testing.assert_allclose(
            stationary_distribution(lazy), stationary_distribution(p), atol=1e-10
        )


def test_stationary_reducible_raises():
    p = scipy.sparse.csr_matrix(np.eye(3))
    with pytest.raises(ConvergenceError) as info:
        stationary_distribution(p, max_iter=5)
    assert info.value.residual is not None


def test_combinatorial_laplacian_structure(two_edge):
    p = _walk(two_edge)
    phi = stationary_distribution(p)
    lap = combinatorial_laplacian(p, phi)
    dense = lap.toarray()
    assert np.array_equal(dense, dense.T)
    # direct matrix arithmetic oracle
    expected = np.diag(phi) - (np.diag(phi) @ p.toarray() + p.toarray().T @ np.diag(phi)) / 2
    np.testing.assert_allclose(dense, expected, atol=1e-15)
    assert np.abs(dense.sum(axis=1)).max() <= 1e-10
    vals, vecs = np.linalg.eigh(dense)
    assert abs(vals[0]) <= 1e-12
    ones = np.ones(len(phi)) / np.sqrt(len(phi))
    assert abs(abs(vecs[:, 0] @ ones) - 1) <= 1e-8


def test_combinatorial_laplacian_dimension_mismatch(two_edge):
    with pytest.raises(ValueError, match="dimension mismatch"):
        combinatorial_laplacian(_walk(two_edge), np.ones(3) / 3)


def _block_oracle(h):
    """Assemble [[I, -A/2, -A/2], [-A^T/2, I, -I/2], [-A^T/2, -I/2, I]]."""
    inc = h.incidence_matrix().toarray()
    d = inc.sum(axis=1)
    delta = inc.sum(axis=0)
    a = inc / np.sqrt(d)[:, None] / np.sqrt(delta)[None, :]
    n, m = inc.shape
    i_n, i_m = np.eye(n), np.eye(m)
    return np.block([
        [i_n, -a / 2, -a / 2],
        [-a.T / 2, i_m, -i_m / 2],
        [-a.T / 2, -i_m / 2, i_m],
    ]), a


def test_normalized_laplacian_block_form(rng):
    cases = [Hypergraph(3, [[0, 1, 2]])] + [
        connected_random_hypergraph(rng, 10, 5, unit=True) for _ in range(10)
    ]
    for h in cases:
        p = _walk(h)
        phi = stationary_distribution(p)
        norm = normalized_laplacian(combinatorial_laplacian(p, phi), phi).toarray()
        expected, _ = _block_oracle(h)
        np.testing.assert_allclose(norm, expected, atol=1e-10)


def test_single_edge_block_entries():
    h = Hypergraph(3, [[0, 1, 2]])
    p = _walk(h)
    phi = stationary_distribution(p)
    norm = normalized_laplacian(combinatorial_laplacian(p, phi), phi).toarray()
    np.testing.assert_allclose(norm[:3, 3], -0.5 / np.sqrt(3), atol=1e-12)


def _eig_relation_residual(h):
    p = _walk(h)
    phi = stationary_distribution(p)
    norm = normalized_laplacian(combinatorial_laplacian(p, phi), phi).toarray()
    _, a = _block_oracle(h)
    vals, vecs = np.linalg.eigh(norm)
    n = h.num_nodes
    worst, checked = 0.0, 0
    for lam, x in zip(vals, vecs.T):
        xv = x[:n]
        if np.linalg.norm(xv) < 1e-6:
            continue
        checked += 1
        lhs = a @ a.T @ xv
        worst = max(worst, np.linalg.norm(lhs - (1 - lam) * (1 - 2 * lam) * xv))
    return worst, checked


def test_eigenvalue_correspondence(rng):
    for _ in range(30):
        h = connected_random_hypergraph(rng, 10, 5, unit=True)
        worst, checked = _eig_relation_residual(h)
        assert checked >= 1
        assert worst <= 1e-8


def test_spectral_map_into_incidence_spectrum(rng):
    for _ in range(10):
        h = connected_random_hypergraph(rng, 10, 5, unit=True)
        p = _walk(h)
        phi = stationary_distribution(p)
        norm = normalized_laplacian(combinatorial_laplacian(p, phi), phi).toarray()
        _, a = _block_oracle(h)
        target = np.linalg.eigvalsh(a @ a.T)
        vals, vecs = np.linalg.eigh(norm)
        for lam, x in zip(vals, vecs.T):
            if np.linalg.norm(x[:h.num_nodes]) < 1e-6:
                continue
            mapped = (1 - lam) * (1 - 2 * lam)
            assert np.abs(target - mapped).min() <= 1e-8


def _star_relation_residual(h, unit):
    g = star_expansion(h, unit_weights=unit)
    lap = undirected_normalized_laplacian(g).toarray()
    adj = g.adjacency.toarray()
    n = h.num_nodes
    deg = adj.sum(axis=1)
    a_star = adj[:n, n:] / np.sqrt(deg[:n])[:, None] / np.sqrt(deg[n:])[None, :]
    vals, vecs = np.linalg.eigh(lap)
    worst = 0.0
    for lam, x in zip(vals, vecs.T):
        xv = x[:n]
        if np.linalg.norm(xv) < 1e-6:
            continue
        worst = max(worst, np.linalg.norm(a_star @ a_star.T @ xv - (lam - 1) ** 2 * xv))
    return worst, a_star


def test_star_eigen_relation(rng):
    for _ in range(20):
        h = connected_random_hypergraph(rng, 10, 5, unit=True)
        worst, a_star = _star_relation_residual(h, unit=True)
        assert worst <= 1e-8
        _, a = _block_oracle(h)
        np.testing.assert_allclose(a_star, a, atol=1e-14)
        worst, _ = _star_relation_residual(h, unit=False)
        assert worst <= 1e-8


def test_undirected_normalized_laplacian_examples():
    tri = undirected_normalized_laplacian(clique_expansion(Hypergraph(3, [[0, 1, 2]])))
    np.testing.assert_allclose(np.linalg.eigvalsh(tri.toarray()), [0, 1.5, 1.5], atol=1e-12)
    edge = undirected_normalized_laplacian(clique_expansion(Hypergraph(2, [[0, 1]])))
    np.testing.assert_allclose(np.linalg.eigvalsh(edge.toarray()), [0, 2], atol=1e-12)
    iso = undirected_normalized_laplacian(clique_expansion(Hypergraph(3, [[0, 1]])))
    assert iso.toarray()[2, 2] == 1
    assert not iso.toarray()[2, :2].any()


def test_undirected_laplacian_psd_bounds(rng):
    for _ in range(20):
        h = connected_random_hypergraph(rng, 10, 6)
        for g in (clique_expansion(h), star_expansion(h)):
            vals = np.linalg.eigvalsh(undirected_normalized_laplacian(g).toarray())
            assert vals.min() >= -1e-10 and vals.max() <= 2 + 1e-10


def test_top_k_trivial():
    np.testing.assert_array_equal(top_k_eigenvalues(np.eye(4), 3), [1, 1, 1])
    np.testing.assert_allclose(top_k_eigenvalues(np.diag([5.0, 4, 3, 2, 1]), 2), [5, 4])
    assert len(top_k_eigenvalues(np.eye(3), 10)) == 3


def test_top_k_dense_random(rng):
    x = rng.standard_normal((50, 50))
    sym = (x + x.T) / 2
    oracle = np.sort(np.linalg.eigvalsh(sym))[::-1][:7]
    got = top_k_eigenvalues(sym, 7)
    np.testing.assert_allclose(got, oracle, rtol=1e-8, atol=1e-12)


def test_top_k_lanczos_path():
    # large sparse instance pushes past the dense cutoff
    mat = scipy.sparse.random(700, 700, density=0.01, random_state=3, format="csr")
    sym = ((mat + mat.T) * 0.5).tocsr()
    lap = SymmetricLaplacian(sym, "test")
    got = top_k_eigenvalues(lap, 10)
    oracle = np.sort(np.linalg.eigvalsh(sym.toarray()))[::-1][:10]
    np.testing.assert_allclose(got, oracle, rtol=1e-8, atol=1e-10)
    np.testing.assert_array_equal(got, top_k_eigenvalues(lap, 10))


def test_pad_and_csv(tmp_path):
    np.testing.assert_array_equal(pad_spectrum(np.array([3.0, 1.0]), 4), [3, 1, 0, 0])
    path = tmp_path / "spec.csv"
    write_spectra_csv(path, [0, 1], [np.array([2.0, 1.0]), np.array([3.0])])
    lines = path.read_text().splitlines()
    assert lines[0] == "t,lambda_1,lambda_2"
    assert lines[2] == "1,3.0,0.0"


def test_laplacian_structure_random(rng):
    for _ in range(30):
        h = connected_random_hypergraph(rng, 10, 6)
        p = _walk(h)
        phi = stationary_distribution(p)
        lap = combinatorial_laplacian(p, phi)
        dense = lap.toarray()
        assert np.array_equal(dense, dense.T)
        assert np.abs(dense @ np.ones(len(phi))).max() <= 1e-10
        assert np.linalg.eigvalsh(dense).min() >= -1e-10
        assert np.isrealobj(np.linalg.eigvalsh(normalized_laplacian(lap, phi).toarray()))
