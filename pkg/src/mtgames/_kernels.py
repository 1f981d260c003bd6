"""Batched finite-memory strategy simulation kernels.

Everything expensive in this package funnels through one operation: simulate a
large batch of Moore strategy combinations over the indexed transition tables
and decide, per strategy and topology, whether each player's minimum
infinitely-visited priority is even. The brute-force oracles and the bounded
search both ride on it.

Two implementations are provided: a numba ``@njit`` kernel (default when numba
imports) and a pure-numpy fallback. Selection is controlled by the
``MTGAMES_KERNEL`` environment variable: ``auto`` (default), ``numba`` or
``numpy``. ``benchmarks/bench_kernels.py`` compares the two.

The simulation avoids explicit cycle detection: with ``window`` at least the
number of product states, the trajectory is guaranteed periodic after
``window`` steps, and any ``window``-length tail covers the full cycle. The
tail's minimum priority therefore equals the lasso-based computation; the
lasso path in ``strategy.outcome`` stays an independent implementation and the
two are cross-checked in the tests.
"""

from __future__ import annotations

import itertools
import os

import numpy as np

try:
    from numba import njit, prange

    HAS_NUMBA = True
except ImportError:  # pragma: no cover - numba is a declared dependency
    HAS_NUMBA = False

    def njit(*args, **kwargs):  # type: ignore[misc]
        def wrap(f):
            return f
        return wrap

    prange = range  # type: ignore[assignment]

_INT_MAX = np.int32(2147483647)


def active_backend(override: str | None = None) -> str:
    """Resolve the kernel backend: 'numba' or 'numpy'."""
    choice = override or os.environ.get("MTGAMES_KERNEL", "auto")
    if choice not in ("auto", "numba", "numpy"):
        raise ValueError(f"MTGAMES_KERNEL must be auto, numba or numpy, got {choice!r}")
    if choice == "numpy":
        return "numpy"
    if choice == "numba" and not HAS_NUMBA:
        raise RuntimeError("MTGAMES_KERNEL=numba but numba is not importable")
    return "numba" if HAS_NUMBA else "numpy"


@njit(parallel=True, nogil=True, cache=True)
def _sim_numba(delta, prio, upd, act, init_mems, s0, n_actions, window):  # pragma: no cover - jitted
    n_top, n_pla, _ = prio.shape
    batch = upd.shape[1]
    wins = np.zeros((batch, n_top, n_pla), dtype=np.bool_)
    for b in prange(batch):
        mem = np.empty(n_pla, dtype=np.int32)
        minp = np.empty(n_pla, dtype=np.int32)
        for t in range(n_top):
            for p in range(n_pla):
                mem[p] = init_mems[p]
                minp[p] = 2147483647
            s = s0
            for step_i in range(2 * window):
                j = 0
                for p in range(n_pla):
                    j = j * n_actions + act[p, b, mem[p], s]
                for p in range(n_pla):
                    mem[p] = upd[p, b, mem[p], s]
                s = delta[t, s, j]
                if step_i >= window:
                    for p in range(n_pla):
                        v = prio[t, p, s]
                        if v < minp[p]:
                            minp[p] = v
            for p in range(n_pla):
                wins[b, t, p] = (minp[p] % 2) == 0
    return wins


def _sim_numpy(delta, prio, upd, act, init_mems, s0, n_actions, window):
    n_top, n_pla, _ = prio.shape
    batch = upd.shape[1]
    wins = np.zeros((batch, n_top, n_pla), dtype=bool)
    rows = np.arange(batch)
    for t in range(n_top):
        s = np.full(batch, s0, dtype=np.int32)
        mems = [np.full(batch, init_mems[p], dtype=np.int32) for p in range(n_pla)]
        minp = [np.full(batch, _INT_MAX, dtype=np.int32) for p in range(n_pla)]
        for step_i in range(2 * window):
            j = np.zeros(batch, dtype=np.int64)
            for p in range(n_pla):
                j = j * n_actions + act[p, rows, mems[p], s]
            for p in range(n_pla):
                mems[p] = upd[p, rows, mems[p], s]
            s = delta[t][s, j]
            if step_i >= window:
                for p in range(n_pla):
                    np.minimum(minp[p], prio[t, p][s], out=minp[p])
        for p in range(n_pla):
            wins[:, t, p] = (minp[p] % 2) == 0
    return wins


def simulate_min_even(delta: np.ndarray, prio: np.ndarray,
                      tables: list[tuple[np.ndarray, np.ndarray]],
                      s0: int, n_actions: int, backend: str | None = None) -> np.ndarray:
    """Simulate a batch of strategy combinations; return win flags (batch, top, player).

    ``tables`` holds one ``(update, act)`` pair per player, each of shape
    ``(B_p, M_p, S)`` with ``B_p`` either 1 (fixed strategy, broadcast) or the
    common batch size. Entry ``wins[b, t, p]`` is True iff under combination
    ``b`` in topology ``t`` the minimum priority player ``p`` sees infinitely
    often is even.
    """
    n_pla = prio.shape[1]
    if len(tables) != n_pla:
        raise ValueError(f"expected {n_pla} strategy tables, got {len(tables)}")
    batch = max(u.shape[0] for u, _ in tables)
    n_states = delta.shape[1]
    mem_sizes = [u.shape[1] for u, _ in tables]
    window = n_states
    for m in mem_sizes:
        window *= m
    m_max = max(mem_sizes)

    upd = np.zeros((n_pla, batch, m_max, n_states), dtype=np.int32)
    act = np.zeros((n_pla, batch, m_max, n_states), dtype=np.int32)
    for p, (u, a) in enumerate(tables):
        if u.shape[0] not in (1, batch) or a.shape[0] != u.shape[0]:
            raise ValueError("strategy table batch dimensions must be 1 or the common batch size")
        upd[p, :, : u.shape[1], :] = u
        act[p, :, : a.shape[1], :] = a
    init_mems = np.zeros(n_pla, dtype=np.int32)

    which = active_backend(backend)
    fn = _sim_numba if which == "numba" else _sim_numpy
    return fn(np.ascontiguousarray(delta.astype(np.int32)),
              np.ascontiguousarray(prio.astype(np.int32)),
              upd, act, init_mems, np.int32(s0), np.int32(n_actions), np.int32(window))


def decode_tables(indices: np.ndarray, cells: int, base: int) -> np.ndarray:
    """Decode integers to digit rows of length ``cells`` in ``base``, first digit most significant."""
    indices = np.asarray(indices, dtype=np.int64)
    out = np.empty((indices.shape[0], cells), dtype=np.int32)
    rem = indices.copy()
    for c in range(cells - 1, -1, -1):
        out[:, c] = rem % base
        rem //= base
    return out


def encode_tables(digits: np.ndarray, base: int) -> np.ndarray:
    """Inverse of :func:`decode_tables`."""
    out = np.zeros(digits.shape[0], dtype=np.int64)
    for c in range(digits.shape[1]):
        out = out * base + digits[:, c]
    return out


def renaming_perms(m: int) -> tuple[np.ndarray, np.ndarray]:
    """Non-identity permutations of memory states fixing state 0, with inverses."""
    phis = []
    invs = []
    for tail in itertools.permutations(range(1, m)):
        phi = np.array((0,) + tail, dtype=np.int32)
        if all(int(phi[i]) == i for i in range(m)):
            continue
        inv = np.empty(m, dtype=np.int32)
        inv[phi] = np.arange(m, dtype=np.int32)
        phis.append(phi)
        invs.append(inv)
    if not phis:
        return np.zeros((0, max(m, 1)), dtype=np.int32), np.zeros((0, max(m, 1)), dtype=np.int32)
    return np.stack(phis), np.stack(invs)


def canonical_mask(upd_digits: np.ndarray, act_digits: np.ndarray, m: int,
                   n_actions: int | None = None) -> np.ndarray:
    """Rows that are lexicographically minimal under memory-state renaming.

    The initial memory state 0 is fixed; renamings permute states 1..m-1.
    Digit layout: ``upd_digits[b]`` lists update targets cell by cell
    ((mem 0, state 0), (mem 0, state 1), ..., (mem 1, state 0), ...), and the
    comparison key is the update digits followed by the act digits. Comparison
    runs on re-encoded integers, one per table, so the whole batch is a few
    vector operations per renaming.
    """
    batch = upd_digits.shape[0]
    keep = np.ones(batch, dtype=bool)
    if m <= 2 or batch == 0:
        return keep
    if n_actions is None:
        n_actions = int(act_digits.max(initial=0)) + 1
    n_states = upd_digits.shape[1] // m
    phis, invs = renaming_perms(m)
    enc_u = encode_tables(upd_digits, m)
    enc_a = encode_tables(act_digits, n_actions)
    u3 = upd_digits.reshape(batch, m, n_states)
    a3 = act_digits.reshape(batch, m, n_states)
    for phi, inv in zip(phis, invs):
        rel_u = phi[u3[:, inv, :]].reshape(batch, -1)
        rel_a = a3[:, inv, :].reshape(batch, -1)
        rel_enc_u = encode_tables(rel_u, m)
        rel_enc_a = encode_tables(rel_a, n_actions)
        keep &= (rel_enc_u > enc_u) | ((rel_enc_u == enc_u) & (rel_enc_a >= enc_a))
    return keep


@njit(parallel=True, nogil=True, cache=True)
def _sweep_numba(delta, prio, fixed_upd, fixed_act, var_player, m_var, lo, hi,
                 s0, n_actions, n_act_tables, phis, invs, window):  # pragma: no cover - jitted
    n_top, n_pla, n_states = prio.shape
    count = hi - lo
    keep = np.zeros(count, dtype=np.uint8)
    bits = np.zeros(count, dtype=np.int64)
    cells = m_var * n_states
    for i in prange(count):
        idx = lo + i
        u_idx = idx // n_act_tables
        a_idx = idx % n_act_tables
        u = np.empty((m_var, n_states), dtype=np.int32)
        a = np.empty((m_var, n_states), dtype=np.int32)
        rem_u = u_idx
        rem_a = a_idx
        for c in range(cells - 1, -1, -1):
            u[c // n_states, c % n_states] = rem_u % m_var
            rem_u //= m_var
            a[c // n_states, c % n_states] = rem_a % n_actions
            rem_a //= n_actions
        ok = True
        for pi in range(phis.shape[0]):
            cmp = 0
            for c in range(cells):
                mm = c // n_states
                s = c % n_states
                rel = phis[pi, u[invs[pi, mm], s]]
                if rel != u[mm, s]:
                    cmp = 1 if rel > u[mm, s] else -1
                    break
            if cmp == 0:
                for c in range(cells):
                    mm = c // n_states
                    s = c % n_states
                    rel = a[invs[pi, mm], s]
                    if rel != a[mm, s]:
                        cmp = 1 if rel > a[mm, s] else -1
                        break
            if cmp == -1:
                ok = False
                break
        if not ok:
            continue
        keep[i] = 1
        mask = 0
        mem = np.empty(n_pla, dtype=np.int32)
        for t in range(n_top):
            for p in range(n_pla):
                mem[p] = 0
            s = s0
            minp = 2147483647
            for step_i in range(2 * window):
                j = 0
                for p in range(n_pla):
                    if p == var_player:
                        j = j * n_actions + a[mem[p], s]
                    else:
                        j = j * n_actions + fixed_act[p, mem[p], s]
                for p in range(n_pla):
                    if p == var_player:
                        mem[p] = u[mem[p], s]
                    else:
                        mem[p] = fixed_upd[p, mem[p], s]
                s = delta[t, s, j]
                if step_i >= window:
                    v = prio[t, var_player, s]
                    if v < minp:
                        minp = v
            if minp % 2 == 0:
                mask |= 1 << t
        bits[i] = mask
    return keep, bits


def sweep_block(delta: np.ndarray, prio: np.ndarray,
                fixed_tables: list[tuple[np.ndarray, np.ndarray] | None],
                var_player: int, m_var: int, lo: int, hi: int,
                s0: int, n_actions: int, backend: str | None = None
                ) -> tuple[np.ndarray, np.ndarray]:
    """Enumerate-and-simulate a contiguous index range of one player's strategy block.

    All players except ``var_player`` play the fixed strategies; the varying
    player's strategy is decoded from each index in ``[lo, hi)``. Returns
    ``(keep, bits)``: ``keep[i]`` flags canonical representatives and
    ``bits[i]`` holds the varying player's winning-topology bitmask. Entries
    with ``keep[i] == 0`` are renamings of earlier strategies and carry no
    simulation result. This is the hot path of the bounded searches and the
    brute-force deviation oracle; the numba variant fuses decoding, the
    canonicity test and the simulation into one pass.
    """
    n_pla = prio.shape[1]
    n_states = delta.shape[1]
    cells = m_var * n_states
    n_act_tables = n_actions ** cells
    window = n_states * m_var
    for p, tabs in enumerate(fixed_tables):
        if p == var_player:
            continue
        window *= tabs[0].shape[1]
    which = active_backend(backend)
    if which == "numba":
        m_fixed = max((tabs[0].shape[1] for p, tabs in enumerate(fixed_tables)
                       if p != var_player), default=1)
        fixed_upd = np.zeros((n_pla, m_fixed, n_states), dtype=np.int32)
        fixed_act = np.zeros((n_pla, m_fixed, n_states), dtype=np.int32)
        for p, tabs in enumerate(fixed_tables):
            if p == var_player:
                continue
            fixed_upd[p, : tabs[0].shape[1], :] = tabs[0][0]
            fixed_act[p, : tabs[1].shape[1], :] = tabs[1][0]
        phis, invs = renaming_perms(m_var)
        return _sweep_numba(np.ascontiguousarray(delta.astype(np.int32)),
                            np.ascontiguousarray(prio.astype(np.int32)),
                            fixed_upd, fixed_act, np.int64(var_player),
                            np.int64(m_var), np.int64(lo), np.int64(hi),
                            np.int64(s0), np.int64(n_actions),
                            np.int64(n_act_tables), phis, invs, np.int64(window))
    return _sweep_numpy(delta.astype(np.int32), prio.astype(np.int32), fixed_tables,
                        var_player, m_var, lo, hi, s0, n_actions, n_act_tables)


def _sweep_numpy(delta, prio, fixed_tables, var_player, m_var, lo, hi,
                 s0, n_actions, n_act_tables):
    """Vectorized fallback sweep.

    Canonicity depends only on the update/act tables; consecutive indices share
    one update table per ``n_act_tables`` block, so the renaming test runs on
    the distinct update tables and act digits are only decoded for ties and
    for surviving rows. The simulation walks a per-candidate product automaton
    over (co-memories, own memory, state) with one gather per step.
    """
    n_top, n_pla, n_states = prio.shape
    count = hi - lo
    cells = m_var * n_states
    indices = np.arange(lo, hi, dtype=np.int64)
    u_idx = indices // n_act_tables
    a_idx = indices % n_act_tables

    keep = np.ones(count, dtype=bool)
    u_lo = lo // n_act_tables
    u_hi = (hi - 1) // n_act_tables
    distinct = np.arange(u_lo, u_hi + 1, dtype=np.int64)
    ud = decode_tables(distinct, cells, m_var)
    row_of = u_idx - u_lo
    if m_var > 2:
        phis, invs = renaming_perms(m_var)
        for phi, inv in zip(phis, invs):
            phi64 = phi.astype(np.int64)
            pow_u = np.array([m_var ** (cells - 1 - (int(phi[c // n_states]) * n_states
                                                     + c % n_states))
                              for c in range(cells)], dtype=np.int64)
            rel_u = (phi64[ud] * pow_u).sum(axis=1)
            keep &= (rel_u >= distinct)[row_of]
            ties = np.nonzero((rel_u == distinct)[row_of] & keep)[0]
            if len(ties):
                pow_a = np.array([n_actions ** (cells - 1 - (int(phi[c // n_states])
                                                             * n_states + c % n_states))
                                  for c in range(cells)], dtype=np.int64)
                ad_t = decode_tables(a_idx[ties], cells, n_actions)
                rel_a = (ad_t * pow_a).sum(axis=1)
                keep[ties[rel_a < a_idx[ties]]] = False

    bits = np.zeros(count, dtype=np.int64)
    kept = np.nonzero(keep)[0]
    batch = len(kept)
    if batch == 0:
        return keep.astype(np.uint8), bits

    u = ud[row_of[kept]].reshape(batch, m_var, n_states)
    a = decode_tables(a_idx[kept], cells, n_actions).reshape(batch, m_var, n_states)

    # fold the fixed co-strategies into one automaton over combined co-memory
    co = [(p, tabs) for p, tabs in enumerate(fixed_tables) if p != var_player]
    co_sizes = [tabs[0].shape[1] for _, tabs in co]
    cm_total = 1
    for size in co_sizes:
        cm_total *= size
    var_factor = n_actions ** (n_pla - 1 - var_player)
    co_contrib = np.zeros((cm_total, n_states), dtype=np.int64)
    co_next = np.zeros((cm_total, n_states), dtype=np.int64)
    for cm in range(cm_total):
        parts = []
        rest = cm
        for size in reversed(co_sizes):
            parts.append(rest % size)
            rest //= size
        parts.reverse()
        for s in range(n_states):
            j_part = 0
            nxt = 0
            for (p, tabs), mem, size in zip(co, parts, co_sizes):
                j_part += int(tabs[1][0, mem, s]) * (n_actions ** (n_pla - 1 - p))
                nxt = nxt * size + int(tabs[0][0, mem, s])
            co_contrib[cm, s] = j_part
            co_next[cm, s] = nxt

    # product positions: ((cm * m_var) + vm) * n_states + s
    n_pos = cm_total * m_var * n_states
    cm_g, vm_g, s_g = np.meshgrid(np.arange(cm_total), np.arange(m_var),
                                  np.arange(n_states), indexing="ij")
    cm_f, vm_f, s_f = cm_g.ravel(), vm_g.ravel(), s_g.ravel()
    pos0 = (0 * m_var + 0) * n_states + s0
    row_base = np.arange(batch, dtype=np.int64) * n_pos

    window = n_pos
    joint = co_contrib[cm_f, s_f] + a[:, vm_f, s_f].astype(np.int64) * var_factor
    prefix = (co_next[cm_f, s_f] * m_var + u[:, vm_f, s_f]) * n_states
    # all topologies walk together as one stacked functional graph, one gather
    # per step on absolute flat indices
    rows_all = np.arange(batch * n_top, dtype=np.int64) * n_pos
    flat = np.empty(batch * n_top * n_pos, dtype=np.int32)
    prio_all = np.empty(batch * n_top * n_pos, dtype=np.int32)
    for t in range(n_top):
        next_pos = prefix + delta[t][s_f, joint]
        seg = slice(t * batch * n_pos, (t + 1) * batch * n_pos)
        flat[seg] = (next_pos + rows_all[t * batch:(t + 1) * batch, None]).ravel()
        prio_all[seg] = np.tile(prio[t, var_player][s_f].astype(np.int32), batch)
    pos = (rows_all + pos0).astype(np.int32)
    minp = np.full(batch * n_top, _INT_MAX, dtype=np.int32)
    for step_i in range(2 * window):
        pos = np.take(flat, pos)
        if step_i >= window:
            np.minimum(minp, np.take(prio_all, pos), out=minp)
    even = (minp % 2 == 0).reshape(n_top, batch)
    for t in range(n_top):
        bits[kept] |= even[t].astype(np.int64) << t
    return keep.astype(np.uint8), bits


def warmup(backend: str | None = None) -> None:
    """Trigger JIT compilation on a tiny instance so later timings are steady."""
    delta = np.zeros((1, 1, 1), dtype=np.int32)
    prio = np.zeros((1, 1, 1), dtype=np.int32)
    tables = [(np.zeros((2, 1, 1), dtype=np.int32), np.zeros((2, 1, 1), dtype=np.int32))]
    simulate_min_even(delta, prio, tables, 0, 1, backend=backend)
    sweep_block(delta, prio, [None], 0, 1, 0, 1, 0, 1, backend=backend)
