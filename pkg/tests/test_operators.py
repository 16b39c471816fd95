import math

import numpy as np
import pytest

from helpers import clique_mix_cover, random_covers, random_params, tournament_cover
from oqw.graph import (
    InputError,
    OrientedGraph,
    Tessellation,
    Tile,
    build_oriented_lattice,
    build_oriented_line,
    transpose,
)
from oqw.operators import (
    WalkParams,
    evolution_step_plan,
    hamiltonian_block,
    involutory_hamiltonian,
    local_unitary,
    plan_matrix,
)
from oqw.oracle import dense_hamiltonian, series_expm


def single_arc():
    g = OrientedGraph(2, ((0, 1),))
    return g, Tessellation((Tile((0, 1)),))


class TestHamiltonianBlock:
    def test_single_arc(self):
        g, _ = single_arc()
        a = 0.37
        H = hamiltonian_block(g, Tile((0, 1)), a).matrix
        expected = np.array([[0, np.exp(1j * a)], [np.exp(-1j * a), 0]])
        np.testing.assert_allclose(H, expected, atol=0)

    def test_alpha_zero_is_symmetric_adjacency(self):
        cover = tournament_cover(5)
        g = cover.host
        H = hamiltonian_block(g, Tile(tuple(range(5))), 0.0).matrix
        A = g.adjacency_matrix()
        assert np.array_equal(H, A + A.T)

    def test_three_cycle(self):
        g = OrientedGraph(3, ((0, 1), (1, 2), (2, 0)))
        H = hamiltonian_block(g, Tile((0, 1, 2)), math.pi / 2).matrix
        expected = np.array([[0, 1j, -1j], [-1j, 0, 1j], [1j, -1j, 0]])
        np.testing.assert_allclose(H, expected, atol=1e-15)
        assert np.abs(H - H.conj().T).max() == 0

    def test_non_clique(self):
        g = OrientedGraph(3, ((0, 1), (1, 2)))
        with pytest.raises(InputError):
            hamiltonian_block(g, Tile((0, 1, 2)), 0.1)

    def test_oversized_tile(self):
        d = 65
        g = OrientedGraph(d, tuple((u, v) for u in range(d) for v in range(u + 1, d)))
        with pytest.raises(InputError, match="cap"):
            hamiltonian_block(g, Tile(tuple(range(d))), 0.1)

    @pytest.mark.parametrize("alpha", [0.0, 0.4, 1.3, math.pi / 2, 2.9, -1.1])
    def test_hermitian_zero_diagonal_and_conjugation(self, alpha):
        cover = tournament_cover(6, seed=3)
        tile = Tile(tuple(range(6)))
        H = hamiltonian_block(cover.host, tile, alpha).matrix
        assert np.abs(H - H.conj().T).max() == 0
        assert np.all(np.diag(H) == 0)
        Hneg = hamiltonian_block(cover.host, tile, -alpha).matrix
        assert np.abs(Hneg - H.conj()).max() <= 1e-15
        Ht = hamiltonian_block(transpose(cover.host), tile, alpha).matrix
        assert np.abs(Ht - Hneg).max() <= 1e-15


class TestLocalUnitary:
    def test_theta_zero_identity(self):
        _, cover = build_oriented_line("uniform", 4)
        for op in evolution_step_plan(cover, WalkParams(0.7, 0.0)):
            for block in op.blocks:
                np.testing.assert_array_equal(block, np.eye(block.shape[0]))

    @pytest.mark.parametrize("alpha,theta", [(0.3, 0.8), (2.0, 2.5), (-1.0, 0.1)])
    def test_two_by_two_closed_form(self, alpha, theta):
        g, t = single_arc()
        block = local_unitary(g, t, WalkParams(alpha, theta)).blocks[0]
        c, s = math.cos(theta), math.sin(theta)
        closed = np.array([[c, 1j * s * np.exp(1j * alpha)], [1j * s * np.exp(-1j * alpha), c]])
        assert np.abs(block - closed).max() <= 1e-12
        oracle = series_expm(1j * theta * dense_hamiltonian(g, t, alpha))
        assert np.abs(block - oracle).max() <= 1e-12

    def test_half_pi(self):
        g, t = single_arc()
        block = local_unitary(g, t, WalkParams(0.0, math.pi / 2)).blocks[0]
        np.testing.assert_allclose(block, [[0, 1j], [1j, 0]], atol=1e-15)

    def test_singletons_identity(self):
        cover = clique_mix_cover()
        op = local_unitary(cover.host, cover.tessellations[1], WalkParams(0.5, 0.9))
        sizes = [b.shape[0] for b in op.blocks]
        assert sizes == [2, 3, 1, 1]
        assert op.blocks[2][0, 0] == 1

    def test_unitarity(self):
        params = random_params(np.random.default_rng(7), 10)
        covers = list(random_covers(11, 10)) + [clique_mix_cover(), tournament_cover(9)]
        for cover, p in zip(covers, params * 2):
            for op in evolution_step_plan(cover, p):
                for block in op.blocks:
                    gram = block.conj().T @ block
                    assert np.abs(gram - np.eye(len(block))).max() <= 1e-12

    def test_alpha_zero_matches_symmetrized(self):
        cover = clique_mix_cover(2)
        g = cover.host
        sym = OrientedGraph(g.vertex_count, g.arcs)  # same edges, orientation irrelevant at alpha=0
        A = g.adjacency_matrix()
        theta = 0.77
        for tess in cover.tessellations:
            op = local_unitary(g, tess, WalkParams(0.0, theta))
            for tile, block in zip(tess.tiles, op.blocks):
                idx = np.array(tile.vertices)
                Hs = (A + A.T)[np.ix_(idx, idx)]
                w, V = np.linalg.eigh(Hs)
                ref = (V * np.exp(1j * theta * w)) @ V.conj().T
                assert np.abs(block - ref).max() <= 1e-15
        assert sym == g

    def test_locality(self):
        cover = clique_mix_cover(4)
        for tess in cover.tessellations:
            op = local_unitary(cover.host, tess, WalkParams(1.1, 0.6))
            tile_of = tess.tile_of()
            for v in range(cover.host.vertex_count):
                psi = np.zeros(7, complex)
                psi[v] = 1
                support = set(np.flatnonzero(np.abs(op.apply(psi)) > 0))
                assert support <= set(tile_of[v].vertices)

    def test_dimension_mismatch(self):
        g, t = single_arc()
        op = local_unitary(g, t, WalkParams(0, 1))
        with pytest.raises(InputError):
            op.apply(np.zeros(3, complex))


class TestInvolutory:
    def test_d1(self):
        np.testing.assert_array_equal(involutory_hamiltonian(1), [[1.0]])

    def test_d2(self):
        np.testing.assert_array_equal(involutory_hamiltonian(2), [[0, 1], [1, 0]])

    def test_d4(self):
        J = np.ones((4, 4))
        assert np.allclose(J @ J, 4 * J)
        np.testing.assert_allclose(involutory_hamiltonian(4), 0.5 * J - np.eye(4), atol=1e-15)

    @pytest.mark.parametrize("d", range(1, 9))
    def test_squares_to_identity(self, d):
        H = involutory_hamiltonian(Tile(tuple(range(d))))
        assert np.abs(H @ H - np.eye(d)).max() <= 1e-12
        assert np.array_equal(H, H.T)


class TestPlan:
    def test_line_two(self):
        _, cover = build_oriented_line("uniform", 4)
        assert len(evolution_step_plan(cover, WalkParams(0.1, 0.2))) == 2

    def test_lattice_four(self):
        _, cover = build_oriented_lattice(2)
        plan = evolution_step_plan(cover, WalkParams(0.1, 0.2))
        assert [op.tessellation.name[:2] for op in plan] == ["x+", "y+", "x-", "y-"]

    def test_theta_zero(self):
        _, cover = build_oriented_lattice(2)
        U = plan_matrix(evolution_step_plan(cover, WalkParams(1.0, 0.0)), 16)
        np.testing.assert_array_equal(U, np.eye(16))


def test_oracle_equivalence_random_graphs():
    rng = np.random.default_rng(2024)
    worst = 0.0
    for cover in random_covers(99, 30):
        p = random_params(rng)
        N = cover.host.vertex_count
        prod = plan_matrix(evolution_step_plan(cover, p), N)
        ref = np.eye(N, dtype=complex)
        for tess in cover.tessellations:
            ref = series_expm(1j * p.theta * dense_hamiltonian(cover.host, tess, p.alpha)) @ ref
        worst = max(worst, np.abs(prod - ref).max())
    assert worst <= 1e-10


@pytest.mark.parametrize("cover_fn", [clique_mix_cover, lambda: tournament_cover(8, 5)])
def test_oracle_equivalence_larger_cliques(cover_fn):
    cover = cover_fn()
    rng = np.random.default_rng(1)
    for p in random_params(rng, 5):
        N = cover.host.vertex_count
        prod = plan_matrix(evolution_step_plan(cover, p), N)
        ref = np.eye(N, dtype=complex)
        for tess in cover.tessellations:
            ref = series_expm(1j * p.theta * dense_hamiltonian(cover.host, tess, p.alpha)) @ ref
        assert np.abs(prod - ref).max() <= 1e-10
