import random

import numpy as np
import pytest

from brute import raw_step_wintop
from mtgames import _kernels
from mtgames.core import compile_tables
from mtgames.generate import random_mtg, random_profile, random_strategy
from mtgames.strategy import Profile, StrategyBlock, wintop

BACKENDS = ["numpy"] + (["numba"] if _kernels.HAS_NUMBA else [])


class TestCodecs:
    def test_decode_encode_roundtrip(self):
        rng = np.random.default_rng(0)
        idx = rng.integers(0, 3 ** 6, size=200, dtype=np.int64)
        digits = _kernels.decode_tables(idx, 6, 3)
        assert np.array_equal(_kernels.encode_tables(digits, 3), idx)

    def test_decode_is_most_significant_first(self):
        digits = _kernels.decode_tables(np.array([5], dtype=np.int64), 3, 2)
        assert digits.tolist() == [[1, 0, 1]]

    def test_canonical_mask_small(self):
        # memory 3, single state: update cell per memory state
        m, cells = 3, 3
        total = (3 ** cells) * (2 ** cells)
        idx = np.arange(total, dtype=np.int64)
        upd = _kernels.decode_tables(idx // (2 ** cells), cells, m)
        act = _kernels.decode_tables(idx % (2 ** cells), cells, 2)
        keep = _kernels.canonical_mask(upd, act, m, 2)
        # brute check: a row is kept iff no relabeling is smaller
        phis, invs = _kernels.renaming_perms(m)
        for row in range(0, total, 37):
            u = upd[row].reshape(m, 1)
            a = act[row].reshape(m, 1)
            minimal = True
            for phi, inv in zip(phis, invs):
                rel_u = phi[u[inv]].ravel()
                rel_a = a[inv].ravel()
                key = tuple(rel_u) + tuple(rel_a)
                orig = tuple(u.ravel()) + tuple(a.ravel())
                if key < orig:
                    minimal = False
            assert keep[row] == minimal


@pytest.mark.parametrize("backend", BACKENDS)
class TestSimulate:
    def test_matches_lasso_wintop(self, backend):
        rng = random.Random(13)
        for _ in range(25):
            game = random_mtg(rng, n_players=rng.randint(1, 2), n_states=rng.randint(2, 4))
            idx = compile_tables(game)
            profile = random_profile(rng, game, memory=2)
            tables = [s.tables(game) for s in profile.by_player]
            wins = _kernels.simulate_min_even(idx.delta, idx.prio, tables,
                                              idx.initial, idx.n_actions, backend=backend)
            for ti, t in enumerate(game.topologies):
                for pi, p in enumerate(game.players):
                    assert wins[0, ti, pi] == (t in wintop(game, profile, p))

    def test_batched_equals_individual(self, backend):
        rng = random.Random(14)
        game = random_mtg(rng, n_players=2, n_states=3)
        idx = compile_tables(game)
        strategies = [random_strategy(rng, game, 2) for _ in range(6)]
        fixed = random_strategy(rng, game, 2)
        batch_upd = np.concatenate([s.tables(game)[0] for s in strategies])
        batch_act = np.concatenate([s.tables(game)[1] for s in strategies])
        wins = _kernels.simulate_min_even(
            idx.delta, idx.prio, [(batch_upd, batch_act), fixed.tables(game)],
            idx.initial, idx.n_actions, backend=backend)
        for i, strat in enumerate(strategies):
            profile = Profile((strat, fixed))
            for ti, t in enumerate(game.topologies):
                for pi, p in enumerate(game.players):
                    assert wins[i, ti, pi] == (t in wintop(game, profile, p)), (i, t, p)

    def test_tail_window_equals_raw_simulation(self, backend):
        rng = random.Random(15)
        game = random_mtg(rng, n_players=1, n_states=4)
        idx = compile_tables(game)
        strat = random_strategy(rng, game, 3)
        wins = _kernels.simulate_min_even(idx.delta, idx.prio, [strat.tables(game)],
                                          idx.initial, idx.n_actions, backend=backend)
        brute = raw_step_wintop(game, Profile((strat,)), game.players[0])
        for ti, t in enumerate(game.topologies):
            assert wins[0, ti, 0] == (t in brute)


@pytest.mark.skipif(not _kernels.HAS_NUMBA, reason="numba unavailable")
class TestBackendEquivalence:
    def test_simulate_identical(self):
        rng = random.Random(16)
        for _ in range(10):
            game = random_mtg(rng, n_players=rng.randint(1, 2), n_states=rng.randint(2, 4))
            idx = compile_tables(game)
            block = StrategyBlock(game, 2)
            n = min(block.total, 512)
            indices = np.arange(n, dtype=np.int64)
            upd, act = block.decode(indices)
            others = [random_strategy(rng, game, 2).tables(game)
                      for _ in range(len(game.players) - 1)]
            tables = [(upd, act)] + others
            a = _kernels.simulate_min_even(idx.delta, idx.prio, tables,
                                           idx.initial, idx.n_actions, backend="numba")
            b = _kernels.simulate_min_even(idx.delta, idx.prio, tables,
                                           idx.initial, idx.n_actions, backend="numpy")
            assert np.array_equal(a, b)

    def test_sweep_identical(self):
        rng = random.Random(17)
        for _ in range(8):
            game = random_mtg(rng, n_players=rng.randint(1, 2), n_states=3)
            idx = compile_tables(game)
            fixed = [None] + [random_strategy(rng, game, 2).tables(game)
                              for _ in range(len(game.players) - 1)]
            for m in (1, 2, 3):
                block = StrategyBlock(game, m)
                hi = min(block.total, 2048)
                ka, ba = _kernels.sweep_block(idx.delta, idx.prio, fixed, 0, m, 0, hi,
                                              idx.initial, idx.n_actions, backend="numba")
                kb, bb = _kernels.sweep_block(idx.delta, idx.prio, fixed, 0, m, 0, hi,
                                              idx.initial, idx.n_actions, backend="numpy")
                assert np.array_equal(ka, kb)
                assert np.array_equal(ba, bb)

    def test_env_flag_selects_backend(self, monkeypatch):
        monkeypatch.setenv("MTGAMES_KERNEL", "numpy")
        assert _kernels.active_backend() == "numpy"
        monkeypatch.setenv("MTGAMES_KERNEL", "numba")
        assert _kernels.active_backend() == "numba"
        monkeypatch.setenv("MTGAMES_KERNEL", "auto")
        assert _kernels.active_backend() == "numba"
        monkeypatch.setenv("MTGAMES_KERNEL", "bogus")
        with pytest.raises(ValueError):
            _kernels.active_backend()
