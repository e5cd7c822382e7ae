"""Two-player graph games: arenas, plays, strategies, parity solving.

Positions belong to Exists or Forall; a player stuck at a dead end
loses.  Infinite plays are decided by the parity of the highest
priority occurring infinitely often, even meaning a win for Exists.
The solver is the classic recursive region decomposition; dead ends
are handled by totalising the arena with two sink loops before the
recursion and dropping them from the result.
"""

from __future__ import annotations

import sys
from dataclasses import dataclass, field
from enum import Enum
from typing import Dict, FrozenSet, List, Optional, Sequence, Set, Tuple

from .errors import UndefinedStrategyAt


class Player(Enum):
    EXISTS = "E"
    FORALL = "A"

    @property
    def other(self) -> "Player":
        return Player.FORALL if self is Player.EXISTS else Player.EXISTS


@dataclass(eq=False)
class Arena:
    owners: Tuple[Player, ...]
    priorities: Tuple[int, ...]
    tags: Tuple[object, ...]
    moves: Tuple[Tuple[int, ...], ...]

    def __post_init__(self):
        n = len(self.owners)
        assert len(self.priorities) == len(self.tags) == len(self.moves) == n
        for succs in self.moves:
            assert all(0 <= s < n for s in succs), "dangling move"
        assert all(p >= 0 for p in self.priorities)

    @property
    def n(self) -> int:
        return len(self.owners)

    def edge_count(self) -> int:
        return sum(len(s) for s in self.moves)

    def positions_of(self, player: Player):
        return [v for v in range(self.n) if self.owners[v] is player]


@dataclass
class Strategy:
    """History-free partial map from owned positions to chosen moves."""

    owner: Player
    moves: Dict[int, int] = field(default_factory=dict)


@dataclass
class Play:
    positions: List[int]
    status: str  # "stuck" | "cycle" | "ongoing"
    loser: Optional[Player] = None
    cycle_start: Optional[int] = None

    def winner(self, arena: Arena) -> Optional[Player]:
        if self.status == "stuck":
            return self.loser.other
        if self.status == "cycle":
            top = max(arena.priorities[v] for v in self.positions[self.cycle_start:])
            return Player.EXISTS if top % 2 == 0 else Player.FORALL
        return None


@dataclass
class SolveResult:
    win_exists: FrozenSet[int]
    win_forall: FrozenSet[int]
    strat_exists: Strategy
    strat_forall: Strategy

    def region(self, player: Player) -> FrozenSet[int]:
        return self.win_exists if player is Player.EXISTS else self.win_forall

    def strategy(self, player: Player) -> Strategy:
        return self.strat_exists if player is Player.EXISTS else self.strat_forall


def _attractor(active: Set[int], target: Set[int], player: Player,
               moves, owners, rev) -> Tuple[Set[int], Dict[int, int]]:
    """Player's attractor of target within active, with attached moves."""
    attr = set(target)
    strategy: Dict[int, int] = {}
    pending = list(target)
    out_count = {v: sum(1 for w in moves[v] if w in active) for v in active}
    while pending:
        v = pending.pop()
        for u in rev[v]:
            if u not in active or u in attr:
                continue
            if owners[u] is player:
                attr.add(u)
                strategy[u] = v
                pending.append(u)
            else:
                out_count[u] -= 1
                if out_count[u] == 0:
                    attr.add(u)
                    pending.append(u)
    return attr, strategy


def solve_parity(arena: Arena) -> SolveResult:
    """Winning regions and positional winning strategies for both players."""
    n = arena.n
    # Totalise: dead ends of a player get a single move into a sink loop
    # that loses for them; sinks are stripped from the result.
    sink_odd, sink_even = n, n + 1
    owners = list(arena.owners) + [Player.EXISTS, Player.FORALL]
    priorities = list(arena.priorities) + [1, 0]
    moves: List[List[int]] = [list(s) for s in arena.moves]
    for v in range(n):
        if not moves[v]:
            moves[v] = [sink_odd if arena.owners[v] is Player.EXISTS else sink_even]
    moves.append([sink_odd])
    moves.append([sink_even])

    total = n + 2
    rev: List[List[int]] = [[] for _ in range(total)]
    for v in range(total):
        for w in moves[v]:
            rev[w].append(v)

    limit = max(sys.getrecursionlimit(), 4 * total + 128)
    sys.setrecursionlimit(limit)

    def zielonka(active: Set[int]):
        regions = {Player.EXISTS: set(), Player.FORALL: set()}
        strategies = {Player.EXISTS: {}, Player.FORALL: {}}
        if not active:
            return regions, strategies
        top = max(priorities[v] for v in active)
        i = Player.EXISTS if top % 2 == 0 else Player.FORALL
        j = i.other
        target = {v for v in active if priorities[v] == top}
        attr_i, strat_i = _attractor(active, target, i, moves, owners, rev)
        sub_regions, sub_strats = zielonka(active - attr_i)
        if not sub_regions[j]:
            strategy_i = dict(sub_strats[i])
            strategy_i.update(strat_i)
            for v in target:
                if owners[v] is i and v not in strategy_i:
                    # any move staying inside the region is fine here
                    strategy_i[v] = next(w for w in moves[v] if w in active)
            regions[i] = set(active)
            strategies[i] = strategy_i
            return regions, strategies
        attr_j, strat_j = _attractor(active, sub_regions[j], j, moves, owners, rev)
        rest_regions, rest_strats = zielonka(active - attr_j)
        strategy_j = dict(rest_strats[j])
        strategy_j.update(strat_j)
        strategy_j.update(sub_strats[j])
        regions[j] = rest_regions[j] | attr_j
        regions[i] = rest_regions[i]
        strategies[j] = strategy_j
        strategies[i] = rest_strats[i]
        return regions, strategies

    regions, strategies = zielonka(set(range(total)))

    def trim(player: Player) -> Strategy:
        kept = {v: w for v, w in strategies[player].items()
                if v < n and w < n and arena.moves[v]}
        return Strategy(player, kept)

    return SolveResult(
        win_exists=frozenset(v for v in regions[Player.EXISTS] if v < n),
        win_forall=frozenset(v for v in regions[Player.FORALL] if v < n),
        strat_exists=trim(Player.EXISTS),
        strat_forall=trim(Player.FORALL),
    )


def verify_strategy(arena: Arena, strategy: Strategy,
                    region: Sequence[int], owner: Player) -> bool:
    """True iff every strategy-compliant play from the region is won by
    the owner.  Checks the strategy-restricted reachable graph: the
    owner must never be stuck, and no reachable cycle may have a top
    priority of the opponent's parity."""
    region = set(region)
    if not region:
        return True
    restricted: Dict[int, Tuple[int, ...]] = {}
    frontier = list(region)
    reach: Set[int] = set(region)
    while frontier:
        v = frontier.pop()
        if arena.owners[v] is owner:
            if not arena.moves[v]:
                return False  # owner stuck
            choice = strategy.moves.get(v)
            if choice is None or choice not in arena.moves[v]:
                return False  # undefined or illegal where the owner must move
            succs: Tuple[int, ...] = (choice,)
        else:
            succs = arena.moves[v]  # opponent stuck is a win
        restricted[v] = succs
        for w in succs:
            if w not in reach:
                reach.add(w)
                frontier.append(w)

    bad_parity = 1 if owner is Player.EXISTS else 0

    def on_cycle(v: int, cap: int) -> bool:
        # can v return to itself using only priorities <= cap?
        stack = [w for w in restricted.get(v, ()) if arena.priorities[w] <= cap]
        seen = set(stack)
        while stack:
            u = stack.pop()
            if u == v:
                return True
            for w in restricted.get(u, ()):
                if arena.priorities[w] <= cap and w not in seen:
                    seen.add(w)
                    stack.append(w)
        return False

    for v in reach:
        p = arena.priorities[v]
        if p % 2 == bad_parity and on_cycle(v, p):
            return False
    return True


def play_match(arena: Arena, strat_exists: Strategy, strat_forall: Strategy,
               start: int, max_steps: int = 10_000) -> Play:
    """Deterministic replay of two positional strategies; stops at the
    first repeated position (plays under positional strategies are
    eventually cyclic)."""
    seen = {start: 0}
    positions = [start]
    current = start
    for _ in range(max_steps):
        if not arena.moves[current]:
            return Play(positions, "stuck", loser=arena.owners[current])
        s = strat_exists if arena.owners[current] is Player.EXISTS else strat_forall
        nxt = s.moves.get(current)
        if nxt is None:
            raise UndefinedStrategyAt(current)
        if nxt not in arena.moves[current]:
            raise ValueError(f"illegal move {current} -> {nxt}")
        positions.append(nxt)
        if nxt in seen:
            return Play(positions, "cycle", cycle_start=seen[nxt])
        seen[nxt] = len(positions) - 1
        current = nxt
    return Play(positions, "ongoing")


# ---------------------------------------------------------------------------
# arena text format


def export_arena(arena: Arena) -> str:
    """One position per line: ``id owner priority tag -> succ,succ``."""
    lines = []
    for v in range(arena.n):
        succs = ",".join(str(w) for w in arena.moves[v])
        lines.append(f"{v} {arena.owners[v].value} {arena.priorities[v]} "
                     f"{arena.tags[v]} -> {succs}")
    return "\n".join(lines) + "\n"


def import_arena(text: str) -> Arena:
    owners, priorities, tags, moves = [], [], [], []
    for line in text.splitlines():
        if not line.strip():
            continue
        head, _, succ_part = line.partition(" -> ")
        vid, owner, priority, tag = head.split(" ", 3)
        assert int(vid) == len(owners), "ids must be dense and ordered"
        owners.append(Player(owner))
        priorities.append(int(priority))
        tags.append(tag)
        moves.append(tuple(int(t) for t in succ_part.split(",") if t.strip()))
    return Arena(tuple(owners), tuple(priorities), tuple(tags), tuple(moves))
