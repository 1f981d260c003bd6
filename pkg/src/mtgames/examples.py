"""Bundled example games: the two-port router, the one-player reach game with
swapped wiring, and the symmetric XOR game. The same instances ship as data
files for the command line (``mtgames.data``)."""

from __future__ import annotations

from importlib import resources

from .core import Mtg
from .strategy import Profile, periodic_strategy


def data_path(name: str):
    """Filesystem path of a bundled data file (context-manager free for CPython)."""
    return resources.files("mtgames.data").joinpath(name)


def _total(topology_rows: dict[str, dict[tuple[str, tuple[str, ...]], str]]):
    transition = {}
    for top, rows in topology_rows.items():
        for (s, prof), target in rows.items():
            transition[(top, s, prof)] = target
    return transition


def router_base_game() -> Mtg:
    """Single-topology router with the first player wired to port 1.

    Both players may send (1) or wait (0); a lone sender reaches its port's
    send state, simultaneous sends favor port 1, and send states bounce back
    to ready. Each player needs its own send state infinitely often.
    """
    states = ("ready", "send1", "send2")
    rows = {}
    rows[("ready", ("0", "0"))] = "ready"
    rows[("ready", ("1", "0"))] = "send1"
    rows[("ready", ("1", "1"))] = "send1"
    rows[("ready", ("0", "1"))] = "send2"
    for s in ("send1", "send2"):
        for prof in (("0", "0"), ("0", "1"), ("1", "0"), ("1", "1")):
            rows[(s, prof)] = "ready"
    transition = _total({"base": rows})
    priority = {}
    for s in states:
        priority[("base", "blue", s)] = 0 if s == "send1" else 1
        priority[("base", "red", s)] = 0 if s == "send2" else 1
    return Mtg(players=("blue", "red"), states=states, initial="ready",
               actions=("0", "1"), topologies=("base",),
               transition=transition, priority=priority)


def router_game() -> Mtg:
    """Two-topology router: port assignment unknown to the players.

    Topology A wires blue to port 1; topology B swaps the assignment (so the
    lone-sender and tie-breaking rules act on the other player's action).
    """
    base = router_base_game()
    states = base.states
    rows_a = {k[1:]: v for k, v in base.transition.items()}
    rows_b = {}
    rows_b[("ready", ("0", "0"))] = "ready"
    rows_b[("ready", ("0", "1"))] = "send1"
    rows_b[("ready", ("1", "1"))] = "send1"
    rows_b[("ready", ("1", "0"))] = "send2"
    for s in ("send1", "send2"):
        for prof in (("0", "0"), ("0", "1"), ("1", "0"), ("1", "1")):
            rows_b[(s, prof)] = "ready"
    transition = _total({"A": rows_a, "B": rows_b})
    priority = {}
    for s in states:
        priority[("A", "blue", s)] = 0 if s == "send1" else 1
        priority[("A", "red", s)] = 0 if s == "send2" else 1
        priority[("B", "blue", s)] = 0 if s == "send2" else 1
        priority[("B", "red", s)] = 0 if s == "send1" else 1
    return Mtg(players=("blue", "red"), states=states, initial="ready",
               actions=("0", "1"), topologies=("A", "B"),
               transition=transition, priority=priority)


def example_turn_taking_profile(game: Mtg) -> Profile:
    """Blue plays (0,0,1,1) forever, red plays (1,1,0,0); both win both topologies."""
    return Profile((periodic_strategy(game, ["0", "0", "1", "1"]),
                    periodic_strategy(game, ["1", "1", "0", "0"])))


def fig3_game() -> Mtg:
    """One player, two topologies that swap which first action reaches the goal.

    The goal state s1 must be reached (priority 0, everything else odd);
    the first action decides the entire play.
    """
    states = ("s0", "s1", "s2")
    rows_t1 = {("s0", ("1",)): "s1", ("s0", ("2",)): "s2"}
    rows_t2 = {("s0", ("1",)): "s2", ("s0", ("2",)): "s1"}
    for rows in (rows_t1, rows_t2):
        for s in ("s1", "s2"):
            for a in ("1", "2"):
                rows[(s, (a,))] = s
    transition = _total({"t1": rows_t1, "t2": rows_t2})
    priority = {}
    for t in ("t1", "t2"):
        for s in states:
            priority[(t, "solo", s)] = 0 if s == "s1" else 1
    return Mtg(players=("solo",), states=states, initial="s0",
               actions=("1", "2"), topologies=("t1", "t2"),
               transition=transition, priority=priority)


def xor_game() -> Mtg:
    """Symmetric XOR: equal actions reach s1, differing actions reach s2, both absorbing.

    In topology t1 blue wants s1 and red wants s2; topology t2 swaps the
    objectives. Exactly one player wins in each topology under any profile.
    """
    states = ("s0", "s1", "s2")
    rows = {}
    rows[("s0", ("0", "0"))] = "s1"
    rows[("s0", ("1", "1"))] = "s1"
    rows[("s0", ("0", "1"))] = "s2"
    rows[("s0", ("1", "0"))] = "s2"
    for s in ("s1", "s2"):
        for prof in (("0", "0"), ("0", "1"), ("1", "0"), ("1", "1")):
            rows[(s, prof)] = s
    transition = _total({"t1": dict(rows), "t2": dict(rows)})
    priority = {}
    for s in states:
        priority[("t1", "blue", s)] = 0 if s == "s1" else 1
        priority[("t1", "red", s)] = 0 if s == "s2" else 1
        priority[("t2", "blue", s)] = 0 if s == "s2" else 1
        priority[("t2", "red", s)] = 0 if s == "s1" else 1
    return Mtg(players=("blue", "red"), states=states, initial="s0",
               actions=("0", "1"), topologies=("t1", "t2"),
               transition=transition, priority=priority)
