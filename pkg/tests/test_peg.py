"""Edge placement engine: subtree expansion, selection, mask compliance."""

import numpy as np
import pytest

from rootldpc.gf2 import BitMatrix, girth, make_circulant
from rootldpc.peg import (
    NoCandidateError,
    NonDivisibleDimensionsError,
    PlacementState,
    candidate_checks,
    expand_subtree,
    peg_construct,
    qc_peg_construct,
    select_check,
)


def all_ones(m):
    return np.ones(m, dtype=bool)


class TestExpandSubtree:
    def test_fresh_node(self):
        state = PlacementState(4, 6, None, 0)
        reached, depth = expand_subtree(state, 0, all_ones(4))
        assert reached == set() and depth == 0

    def test_two_hop_chain(self):
        # v0 - c0 - v1 - c1, plus an isolated check c2
        state = PlacementState(3, 2, None, 0)
        state.add_edge(0, 0)
        state.add_edge(0, 1)
        state.add_edge(1, 1)
        reached, depth = expand_subtree(state, 0, all_ones(3))
        assert reached == {0, 1}
        assert candidate_checks(state, 0, all_ones(3)) == [2]

    def test_mask_excludes_checks_from_tree(self):
        # same chain, but c0 masked out: nothing is reachable through it
        state = PlacementState(3, 2, None, 0)
        state.add_edge(0, 0)
        state.add_edge(0, 1)
        state.add_edge(1, 1)
        mask = np.array([False, True, True])
        reached, _ = expand_subtree(state, 0, mask)
        assert reached == set()
        assert sorted(candidate_checks(state, 0, mask)) == [1, 2]

    def test_complete_coverage_backs_up_one_level(self):
        # v0's subtree would cover both checks; candidates = last level only
        state = PlacementState(2, 2, None, 0)
        state.add_edge(0, 0)
        state.add_edge(0, 1)
        state.add_edge(1, 1)
        reached, _ = expand_subtree(state, 0, all_ones(2))
        assert reached == {0}
        assert candidate_checks(state, 0, all_ones(2)) == [1]

    @pytest.mark.parametrize("seed", range(5))
    def test_reach_matches_bfs_oracle(self, seed):
        rng = np.random.default_rng(seed)
        m, n = 10, 14
        state = PlacementState(m, n, None, 0)
        for c in range(n):
            for r in rng.choice(m, size=2, replace=False):
                if r not in state.var_adj[c]:
                    state.add_edge(int(r), c)
        mask = rng.random(m) < 0.8
        reached, _ = expand_subtree(state, 0, mask)
        # oracle: plain BFS over the bipartite graph, masked checks removed
        seen_v, seen_c = {0}, set()
        frontier = [0]
        while frontier:
            new_c = {
                c
                for v in frontier
                for c in state.var_adj[v]
                if mask[c] and c not in seen_c
            }
            seen_c |= new_c
            frontier = [
                u
                for c in new_c
                for u in state.check_adj[c]
                if u not in seen_v and not seen_v.add(u)
            ]
        # reach is the oracle component, possibly minus the final level
        assert reached <= seen_c
        missing = seen_c - reached
        if missing:
            assert missing == set(candidate_checks(state, 0, mask))


class TestSelectCheck:
    def test_single_candidate(self):
        state = PlacementState(3, 1, None, 0)
        assert select_check(state, [2]) == 2

    def test_unique_minimum_weight(self):
        state = PlacementState(2, 3, None, 0)
        state.add_edge(0, 0)
        state.add_edge(0, 1)
        state.add_edge(1, 2)  # weights: c0=2, c1=1
        assert select_check(state, [0, 1]) == 1

    def test_tie_break_uniform(self):
        # frequencies over many draws within 3 sigma of binomial expectation
        draws = 10_000
        state = PlacementState(4, 1, None, 42)
        counts = np.zeros(4)
        for _ in range(draws):
            counts[select_check(state, [0, 1, 2, 3])] += 1
        p = 1 / 4
        sigma = np.sqrt(draws * p * (1 - p))
        assert np.all(np.abs(counts - draws * p) < 3 * sigma)

    def test_empty_raises(self):
        state = PlacementState(2, 1, None, 0)
        with pytest.raises(NoCandidateError):
            select_check(state, [])


class TestPegConstruct:
    def test_zero_degrees_return_init(self):
        init = make_circulant(4, {1})
        out = peg_construct(4, 4, [0] * 4, [all_ones(4)] * 4, init, rng=1)
        assert out == init

    def test_degree_compliance(self):
        m, n = 12, 24
        masks = [all_ones(m)] * n
        out = peg_construct(m, n, [3] * n, masks, None, rng=7)
        assert out.col_weights().tolist() == [3] * n

    def test_mask_compliance(self):
        m, n = 8, 10
        mask = np.zeros(m, dtype=bool)
        mask[4:] = True
        out = peg_construct(m, n, [2] * n, [mask] * n, None, rng=3)
        for r in range(4):
            assert out.row(r) == ()

    def test_masked_row_gets_no_edge(self):
        m, n = 6, 4
        mask = all_ones(m).copy()
        mask[2] = False
        out = peg_construct(m, n, [3] * n, [mask] * n, None, rng=5)
        assert out.row(2) == ()

    def test_four_cycle_avoidance(self):
        # M=4, N=8, all weights 2: only 6 distinct check pairs exist, so at
        # most 2 column pairs may collide; PEG must not exceed that
        out = peg_construct(4, 8, [2] * 8, [all_ones(4)] * 8, None, rng=11)
        pairs = {}
        collisions = 0
        for c in range(8):
            key = tuple(out.col(c))
            collisions += key in pairs
            pairs[key] = c
        assert collisions <= 2

    def test_determinism(self):
        m, n = 16, 32
        a = peg_construct(m, n, [3] * n, [all_ones(m)] * n, None, rng=123)
        b = peg_construct(m, n, [3] * n, [all_ones(m)] * n, None, rng=123)
        c = peg_construct(m, n, [3] * n, [all_ones(m)] * n, None, rng=124)
        assert a == b
        assert a != c

    def test_overconstrained_raises_with_column(self):
        mask = np.zeros(4, dtype=bool)
        mask[0] = True
        with pytest.raises(NoCandidateError) as exc:
            peg_construct(4, 2, [2] * 2, [mask] * 2, None, rng=0)
        assert exc.value.column in (0, 1)

    def test_init_preserved_and_no_duplicates(self):
        init = BitMatrix(4, 6, [(0, 0), (1, 1)])
        out = peg_construct(4, 6, [1] * 6, [all_ones(4)] * 6, init, rng=9)
        assert init.edge_set() <= out.edge_set()
        assert out.col_weights().tolist() == [2, 2, 1, 1, 1, 1]

    @pytest.mark.slow
    def test_regular_half_rate_girth_regression(self):
        # standard PEG behavior: (3,6)-regular N=512 reaches girth >= 6
        m, n = 256, 512
        out = peg_construct(m, n, [3] * n, [all_ones(m)] * n, None, rng=2024)
        assert out.col_weights().tolist() == [3] * n
        assert girth(out).global_girth >= 6


class TestQcPegConstruct:
    def test_single_placement_is_circulant(self):
        nb = 4
        out = qc_peg_construct(4, 4, nb, [1], [all_ones(4)], None, rng=3)
        d = out.to_dense()
        # circulant permutation: row i is row 0 rolled by i
        for i in range(nb):
            assert np.array_equal(d[i], np.roll(d[0], i))
        assert d.sum(axis=0).tolist() == [1] * nb

    def test_every_block_circulant(self):
        nb = 5
        m, n = 4 * nb, 6 * nb
        out = qc_peg_construct(
            m, n, nb, [2] * 6, [all_ones(m)] * 6, None, rng=17
        )
        d = out.to_dense()
        for bi in range(4):
            for bj in range(6):
                blk = d[bi * nb : (bi + 1) * nb, bj * nb : (bj + 1) * nb]
                for i in range(nb):
                    assert np.array_equal(blk[i], np.roll(blk[0], i))

    def test_group_degree_and_nulling(self):
        nb = 3
        m, n = 4 * nb, 2 * nb
        out = qc_peg_construct(m, n, nb, [2, 3], [all_ones(m)] * 2, None, rng=8)
        assert out.col_weights().tolist() == [2] * nb + [3] * nb
        # no sub-block may hold more than one placement
        d = out.to_dense()
        for bi in range(4):
            for bj in range(2):
                blk = d[bi * nb : (bi + 1) * nb, bj * nb : (bj + 1) * nb]
                assert blk.sum() in (0, nb)

    def test_parity_branch_picks_minimum_weight_block(self):
        nb = 4
        m, n = 3 * nb, 2 * nb
        # pre-load block row 0 so its total weight is higher
        init = BitMatrix(m, n, [(i, i) for i in range(nb)])
        out = qc_peg_construct(
            m,
            n,
            nb,
            [0, 1],
            [all_ones(m)] * 2,
            init,
            rng=5,
            parity_start=nb,
        )
        new_edges = out.edge_set() - init.edge_set()
        touched_blocks = {r // nb for r, _ in new_edges}
        assert len(touched_blocks) == 1
        assert touched_blocks.pop() in (1, 2)  # block 0 is heavier

    def test_init_blocks_are_retired(self):
        nb = 4
        m, n = 2 * nb, nb
        init = BitMatrix(m, n, [(i, i) for i in range(nb)])  # block (0, 0)
        out = qc_peg_construct(m, n, nb, [1], [all_ones(m)], init, rng=2)
        # the single new placement must avoid block row 0
        new_edges = out.edge_set() - init.edge_set()
        assert all(r >= nb for r, _ in new_edges)

    def test_non_divisible_raises(self):
        with pytest.raises(NonDivisibleDimensionsError):
            qc_peg_construct(6, 9, 4, [1], [all_ones(6)], None, rng=0)

    def test_determinism(self):
        nb = 5
        args = (4 * nb, 3 * nb, nb, [2] * 3, [all_ones(4 * nb)] * 3, None)
        assert qc_peg_construct(*args, rng=77) == qc_peg_construct(*args, rng=77)
