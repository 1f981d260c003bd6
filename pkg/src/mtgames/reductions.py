"""Partial-information challenge games certifying CNE/GNE with fixed target sets.

Given intended winning-topology sets, one per player, two games are built:

* the conservative (CNE) instance has three roles: a coalition player
  suggesting a full action profile each round, a deviator controller that
  first commits to a player and a challenge set of topologies and then plays
  that player's actions, and a resolver that secretly fixes the concrete
  topology. The coalition and the deviator observe only the projected game
  state; the resolver has perfect information.
* the greedy (GNE) instance drops the resolver: the deviator controller picks
  the player and a single topology up front.

Interior states carry the projected game state, the committed choices, and an
obedience bit that turns false forever the first time the deviator's action
differs from the coalition's suggestion. Each instance carries a rank
function; on every play the conjunction of the defining objective clauses
holds iff the minimum rank seen infinitely often is even, which the
agreement oracle in :mod:`mtgames.oracles` checks exhaustively on small
instances.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .core import InputError, Lasso, Mtg
from .strategy import MooreStrategy, Profile, outcome

START = "start"

COALITION = "coalition"
DEVIATOR = "deviator"
RESOLVER = "resolver"


@dataclass(frozen=True)
class HState:
    """Interior state of a challenge game; ``T`` is None in greedy instances."""

    s: str
    p: str
    T: frozenset[str] | None
    t: str
    b: bool


@dataclass(frozen=True)
class HLasso:
    """Ultimately periodic play of a challenge game; prefix starts at ``start``."""

    prefix: tuple
    cycle: tuple


@dataclass
class PartialInfoGame:
    kind: str
    players: tuple[str, ...]
    states: list
    initial: str
    transitions: dict
    rank: dict
    observations: dict[str, list[frozenset]]
    game: Mtg
    targets: dict[str, frozenset[str]]

    def successor_sets(self) -> dict:
        succ: dict = {q: set() for q in self.states}
        for (q, _), q2 in self.transitions.items():
            succ[q].add(q2)
        return succ

    def start_choices(self) -> list[tuple]:
        return sorted((key[1] for key in self.transitions if key[0] == START),
                      key=lambda c: str(c))


def target_tuple(game: Mtg, targets: dict[str, set[str] | frozenset[str]]
                 ) -> dict[str, frozenset[str]]:
    """Validate and normalize an intended winning-topology set per player."""
    if set(targets) != set(game.players):
        raise InputError("targets must name exactly the game's players")
    out = {}
    for p, ts in targets.items():
        ts = frozenset(ts)
        if not ts <= set(game.topologies):
            raise InputError(f"unknown topologies in targets of {p}: {sorted(ts)}")
        out[p] = ts
    return out


def challenge_sets(game: Mtg, targets: dict[str, frozenset[str]]
                   ) -> tuple[dict[str, list[frozenset[str]]], list[frozenset[str]]]:
    """Per-player challenge sets (target set plus one topology, and singletons).

    Restricting to these keeps the state space polynomial: a deviation that
    grows the winning set grows it by one topology in particular, and the
    singletons force the coalition to actually win the intended topologies.
    """
    singles = [frozenset({t}) for t in game.topologies]
    per_player: dict[str, list[frozenset[str]]] = {}
    family: list[frozenset[str]] = []
    for p in game.players:
        opts: list[frozenset[str]] = []
        for t in game.topologies:
            cand = targets[p] | {t}
            if cand not in opts:
                opts.append(cand)
        for s in singles:
            if s not in opts:
                opts.append(s)
        per_player[p] = opts
        for T in opts:
            if T not in family:
                family.append(T)
    return per_player, family


def _cne_rank(game: Mtg, targets: dict[str, frozenset[str]], q: HState) -> int:
    if q.t not in q.T:
        return 1
    tp = targets[q.p]
    strict = tp < q.T
    base = game.priority[(q.t, q.p, q.s)]
    if q.b and q.t in tp:
        # obeying run on an intended topology: contradictory with a strict
        # challenge, otherwise the player's own objective applies
        return 1 if strict else base
    return base + 1 if strict else 0


def _gne_rank(game: Mtg, targets: dict[str, frozenset[str]], q: HState) -> int:
    tp = targets[q.p]
    if q.t not in tp:
        return game.priority[(q.t, q.p, q.s)] + 1
    if q.b:
        return game.priority[(q.t, q.p, q.s)]
    return 0


def _build(game: Mtg, targets: dict[str, frozenset[str]], kind: str) -> PartialInfoGame:
    targets = target_tuple(game, targets)
    di = {p: i for i, p in enumerate(game.players)}
    transitions: dict = {}
    states: list = [START]
    index = {START: 0}

    def intern(q: HState) -> HState:
        if q not in index:
            index[q] = len(states)
            states.append(q)
        return q

    if kind == "cne":
        per_player, family = challenge_sets(game, targets)
        for p in game.players:
            for T in per_player[p]:
                for t in game.topologies:
                    q = intern(HState(game.initial, p, T, t, True))
                    transitions[(START, (p, T, t))] = q
    elif kind == "gne":
        for p in game.players:
            for t in game.topologies:
                q = intern(HState(game.initial, p, None, t, True))
                transitions[(START, (p, t))] = q
    else:
        raise InputError(f"unknown reduction kind {kind!r}")

    profiles = game.action_profiles()
    frontier = 1
    while frontier < len(states):
        q = states[frontier]
        frontier += 1
        for prof in profiles:
            for a in game.actions:
                played = list(prof)
                played[di[q.p]] = a
                s2 = game.transition[(q.t, q.s, tuple(played))]
                b2 = q.b and (prof[di[q.p]] == a)
                q2 = intern(HState(s2, q.p, q.T, q.t, b2))
                transitions[(q, (prof, a))] = q2

    rank: dict = {START: 0}
    rank_fn = _cne_rank if kind == "cne" else _gne_rank
    for q in states[1:]:
        rank[q] = rank_fn(game, targets, q)

    interior = states[1:]
    obs_shared: list[frozenset] = [frozenset({START})]
    for s in game.states:
        cls = frozenset(q for q in interior if q.s == s)
        if cls:
            obs_shared.append(cls)
    observations = {COALITION: obs_shared, DEVIATOR: obs_shared}
    players: tuple[str, ...] = (COALITION, DEVIATOR)
    if kind == "cne":
        observations[RESOLVER] = [frozenset({START})] + [frozenset({q}) for q in interior]
        players = (COALITION, DEVIATOR, RESOLVER)

    n_s, n_p, n_t = len(game.states), len(game.players), len(game.topologies)
    if kind == "cne":
        _, family = challenge_sets(game, targets)
        if len(family) > 2 * n_p * n_t:
            raise AssertionError("challenge-set family exceeded its size bound")
        if len(interior) > 2 * n_s * n_p * len(family) * n_t:
            raise AssertionError("reachable state count exceeded its size bound")
    else:
        if len(interior) > 2 * n_s * n_p * n_t:
            raise AssertionError("reachable state count exceeded its size bound")

    return PartialInfoGame(kind=kind, players=players, states=states, initial=START,
                           transitions=transitions, rank=rank, observations=observations,
                           game=game, targets=targets)


def build_cne_game(game: Mtg, targets: dict[str, frozenset[str]]) -> PartialInfoGame:
    """Three-role challenge game whose coalition wins iff a CNE with these targets exists."""
    return _build(game, targets, "cne")


def build_gne_game(game: Mtg, targets: dict[str, frozenset[str]]) -> PartialInfoGame:
    """Two-role challenge game whose coalition wins iff a GNE with these targets exists."""
    return _build(game, targets, "gne")


def check_h_lasso(h: PartialInfoGame, lasso: HLasso) -> None:
    """Raise InputError unless the lasso is a legal play of the challenge game."""
    if not lasso.cycle:
        raise InputError("lasso cycle is empty")
    seq = list(lasso.prefix) + list(lasso.cycle)
    if seq[0] != START:
        raise InputError("challenge-game plays start at the start state")
    if START in lasso.cycle:
        raise InputError("the start state cannot repeat")
    succ = h.successor_sets()
    pairs = list(zip(seq, seq[1:])) + [(lasso.cycle[-1], lasso.cycle[0])]
    for u, v in pairs:
        if v not in succ[u]:
            raise InputError(f"lasso edge {u!r} -> {v!r} not realizable")


def semantic_objective(h: PartialInfoGame, lasso: HLasso) -> bool:
    """Evaluate the defining objective clauses directly, independent of the rank.

    Conservative instances: the resolver must have picked a challenged
    topology; an obeying run on an intended topology must win the projected
    play; a strict challenge must lose it. Greedy instances: an obeying run on
    an intended topology must win; a non-intended topology must lose.
    """
    check_h_lasso(h, lasso)
    interior = [q for q in list(lasso.prefix) + list(lasso.cycle) if q != START]
    first = interior[0]
    p, T, t = first.p, first.T, first.t
    obey = all(q.b for q in interior)
    tp = h.targets[p]
    proj_win = min(h.game.priority[(t, p, q.s)] for q in lasso.cycle) % 2 == 0
    if h.kind == "cne":
        psi1 = t in T
        psi2 = (not (obey and t in tp)) or proj_win
        psi3 = (not (tp < T)) or (not proj_win)
        return psi1 and psi2 and psi3
    psi1 = (not (obey and t in tp)) or proj_win
    psi2 = (t in tp) or (not proj_win)
    return psi1 and psi2


def rank_parity(h: PartialInfoGame, lasso: HLasso) -> bool:
    """True iff the minimum rank on the lasso's cycle is even."""
    return min(h.rank[q] for q in lasso.cycle) % 2 == 0


@dataclass(frozen=True)
class DeviationChoice:
    """The deviator controller's commitment: player, strategy, and challenge.

    ``topologies`` is the challenge set in conservative instances;
    ``topology`` the single topology in greedy ones.
    """

    player: str
    strategy: MooreStrategy
    topologies: frozenset[str] | None = None
    topology: str | None = None


@dataclass
class RoundtripReport:
    obey: bool
    proj_matches_deviated: bool
    deviated_mismatch_index: int | None
    proj_matches_suggested: bool | None
    suggested_mismatch_index: int | None

    def ok(self) -> bool:
        if not self.proj_matches_deviated:
            return False
        if self.obey and self.proj_matches_suggested is not True:
            return False
        return True


def _up_equal(pa: list[str], ca: list[str], pb: list[str], cb: list[str]
              ) -> tuple[bool, int | None]:
    """Exact equality of two ultimately periodic sequences, with first mismatch."""
    horizon = max(len(pa), len(pb)) + math.lcm(len(ca), len(cb))
    a = Lasso(tuple(pa), tuple(ca)).unroll(horizon)
    b = Lasso(tuple(pb), tuple(cb)).unroll(horizon)
    for i, (x, y) in enumerate(zip(a, b)):
        if x != y:
            return False, i
    return True, None


def simulate_h(h: PartialInfoGame, profile: Profile, deviation: DeviationChoice,
               resolved: str | None = None) -> HLasso:
    """Deterministic play of the challenge game under transported strategies.

    The coalition plays the profile's action suggestions on the projected
    state history; the deviator controller plays its strategy the same way.
    Inputs are observation-based by construction; commitments that the start
    state does not offer are rejected.
    """
    game = h.game
    profile.check(game)
    deviation.strategy.check(game)
    if deviation.player not in game.players:
        raise InputError(f"unknown player {deviation.player!r}")
    if h.kind == "cne":
        if deviation.topologies is None or resolved is None:
            raise InputError("conservative instances need a challenge set and a resolved topology")
        start_key = (deviation.player, frozenset(deviation.topologies), resolved)
    else:
        if deviation.topology is None:
            raise InputError("greedy instances need a single committed topology")
        start_key = (deviation.player, deviation.topology)
    if (START, start_key) not in h.transitions:
        raise InputError("commitment is not an available start choice of this instance")

    q = h.transitions[(START, start_key)]
    mems = [strat.init for strat in profile.by_player]
    dev_mem = deviation.strategy.init
    seq = [q]
    seen: dict = {(q, tuple(mems), dev_mem): 0}
    while True:
        s = q.s
        prof = tuple(strat.action(m, s) for strat, m in zip(profile.by_player, mems))
        a = deviation.strategy.action(dev_mem, s)
        mems = [strat.advance(m, s) for strat, m in zip(profile.by_player, mems)]
        dev_mem = deviation.strategy.advance(dev_mem, s)
        q = h.transitions[(q, (prof, a))]
        key = (q, tuple(mems), dev_mem)
        if key in seen:
            i = seen[key]
            return HLasso(prefix=(START,) + tuple(seq[:i]), cycle=tuple(seq[i:]))
        seen[key] = len(seq)
        seq.append(q)


def gamma_roundtrip(game: Mtg, h: PartialInfoGame, profile: Profile,
                    deviation: DeviationChoice, resolved: str | None = None
                    ) -> RoundtripReport:
    """Compare the challenge-game play with the plays it is meant to mirror.

    The projected play must equal the outcome of the profile with the
    deviating strategy substituted, always; and when the deviator obeys the
    coalition it must also equal the outcome of the unmodified profile.
    """
    rho = simulate_h(h, profile, deviation, resolved)
    interior = [q for q in list(rho.prefix) + list(rho.cycle) if q != START]
    t = interior[0].t
    obey = all(q.b for q in interior)
    proj_prefix = [q.s for q in rho.prefix if q != START]
    proj_cycle = [q.s for q in rho.cycle]

    di = game.players.index(deviation.player)
    deviated = outcome(game, t, profile.substitute(di, deviation.strategy))
    ok_dev, idx_dev = _up_equal(proj_prefix, proj_cycle,
                                list(deviated.prefix), list(deviated.cycle))
    ok_sug: bool | None = None
    idx_sug: int | None = None
    if obey:
        suggested = outcome(game, t, profile)
        ok_sug, idx_sug = _up_equal(proj_prefix, proj_cycle,
                                    list(suggested.prefix), list(suggested.cycle))
    return RoundtripReport(obey=obey, proj_matches_deviated=ok_dev,
                           deviated_mismatch_index=idx_dev,
                           proj_matches_suggested=ok_sug,
                           suggested_mismatch_index=idx_sug)
