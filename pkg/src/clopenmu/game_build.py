"""Builders for the fixpoint games and the evaluation game.

Finite carriers get exhaustive arenas solvable by the parity solver.
On the symbolic carrier the arenas would be infinite (set choices are
unbounded), so no arena is built there; instead the canonical
strategies extracted from an approximation trace are exposed as
playable fragments (:class:`MuDepthStrategy`, :class:`NuGreedyStrategy`)
and correctness is checked denotationally.

Arena position tags:

* ``("state", x)`` for carrier points,
* ``("set", C)``, ``("aset", U)``, ``("eset", U)`` for set positions
  (the latter two are the marked positions of the second least-fixpoint
  game),
* ``("form", psi, x)`` for evaluation positions,
* ``("uset", p, U)`` for unfold positions of a bound variable.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import count
from typing import Callable, Dict, FrozenSet, List, Optional, Tuple

from . import formula as fm
from . import space as sp
from .algebra import (
    FiniteCarrier,
    FiniteSet,
    LimitParams,
    Point,
    SetDescriptor,
    point_key,
)
from .errors import (
    NotClean,
    NotWinningAt,
    PointOutsideGfp,
    PointOutsideLfp,
    SymbolicNotSupported,
    UnboundVariable,
)
from .game_core import Arena, Player, Play, SolveResult, Strategy
from .semantics import ApproxTrace, eval_den, operator_of


@dataclass(eq=False)
class Operator:
    """A monotone map on descriptors, by formula body or explicit table."""

    carrier: object
    fn: Callable[[SetDescriptor], SetDescriptor]
    label: str = "F"

    def __call__(self, U: SetDescriptor) -> SetDescriptor:
        return self.fn(U)

    @classmethod
    def from_formula(cls, model: sp.Model, var: str, body: fm.Formula,
                     env=None, params: LimitParams = LimitParams()) -> "Operator":
        fn = operator_of(model, var, body, env, params)
        return cls(model.carrier, fn, f"{var} -> {fm.show(body)}")

    @classmethod
    def from_table(cls, carrier: FiniteCarrier,
                   table: Dict[FrozenSet[int], FrozenSet[int]]) -> "Operator":
        def fn(U: SetDescriptor) -> SetDescriptor:
            return FiniteSet(carrier, table[U.members])

        return cls(carrier, fn, "table")


class _ArenaBuilder:
    def __init__(self):
        self.owners: List[Player] = []
        self.priorities: List[int] = []
        self.tags: List[object] = []
        self.moves: List[List[int]] = []
        self.index: Dict[object, int] = {}

    def add(self, tag, owner: Player, priority: int) -> int:
        if tag in self.index:
            return self.index[tag]
        vid = len(self.owners)
        self.index[tag] = vid
        self.owners.append(owner)
        self.priorities.append(priority)
        self.tags.append(tag)
        self.moves.append([])
        return vid

    def connect(self, src: int, dst: int):
        if dst not in self.moves[src]:
            self.moves[src].append(dst)

    def build(self) -> Arena:
        return Arena(tuple(self.owners), tuple(self.priorities),
                     tuple(self.tags), tuple(self.moves))


def _require_finite(carrier) -> FiniteCarrier:
    if not isinstance(carrier, FiniteCarrier):
        raise SymbolicNotSupported(
            "exhaustive arenas exist only over finite carriers")
    return carrier


def _subsets(n: int):
    for mask in range(1 << n):
        yield frozenset(i for i in range(n) if mask >> i & 1)


def _op_table(op: Operator, carrier: FiniteCarrier) -> Dict[FrozenSet[int], FrozenSet[int]]:
    return {s: op(FiniteSet(carrier, s)).members for s in _subsets(carrier.size)}


def build_tarski_game(op: Operator, polarity: str) -> Arena:
    """The plain powerset fixpoint game: at a state the existential
    player names a set whose image contains it; the universal player
    answers with an element."""
    carrier = _require_finite(op.carrier)
    prio = 1 if polarity == "mu" else 0
    table = _op_table(op, carrier)
    b = _ArenaBuilder()
    for x in carrier.points:
        b.add(("state", x), Player.EXISTS, prio)
    for s in _subsets(carrier.size):
        b.add(("set", s), Player.FORALL, prio)
    for x in carrier.points:
        for s in _subsets(carrier.size):
            if x in table[s]:
                b.connect(b.index[("state", x)], b.index[("set", s)])
    for s in _subsets(carrier.size):
        for x in sorted(s):
            b.connect(b.index[("set", s)], b.index[("state", x)])
    return b.build()


def build_clopen_game_i(op: Operator, polarity: str) -> Arena:
    """First clopen fixpoint game.  The move condition is evaluated
    literally: a set C is playable at x iff x lies in the image of every
    clopen superset of C (mu) or of Int(C) (nu).  On a finite carrier
    this collapses to membership in the image of C itself; the collapse
    is asserted by the arena-isomorphism test, not assumed here."""
    carrier = _require_finite(op.carrier)
    prio = 1 if polarity == "mu" else 0
    table = _op_table(op, carrier)
    n = carrier.size
    points = frozenset(carrier.points)

    bad = {x: {s for s in _subsets(n) if x not in table[s]} for x in carrier.points}

    def playable(x: int, c: FrozenSet[int]) -> bool:
        core = c  # Int(C) = C on a discrete carrier
        return not any(core <= s for s in bad[x])

    b = _ArenaBuilder()
    for x in carrier.points:
        b.add(("state", x), Player.EXISTS, prio)
    for s in _subsets(n):
        b.add(("set", s), Player.FORALL, prio)
    for x in carrier.points:
        for s in _subsets(n):
            if playable(x, s):
                b.connect(b.index[("state", x)], b.index[("set", s)])
    for s in _subsets(n):
        for x in sorted(s):
            b.connect(b.index[("set", s)], b.index[("state", x)])
    return b.build()


def build_clopen_game_ii(op: Operator, polarity: str) -> Arena:
    """Second clopen fixpoint game.  The mu board interleaves marked set
    positions: the existential player claims a clopen U with x in F(U),
    the universal player challenges with any clopen U' meeting U, and
    the existential player answers with a point of U'.  The nu board
    needs no markers: the universal player walks into the claimed set."""
    carrier = _require_finite(op.carrier)
    table = _op_table(op, carrier)
    n = carrier.size
    b = _ArenaBuilder()
    if polarity == "mu":
        for x in carrier.points:
            b.add(("state", x), Player.EXISTS, 1)
        for s in _subsets(n):
            b.add(("aset", s), Player.FORALL, 1)
            b.add(("eset", s), Player.EXISTS, 1)
        for x in carrier.points:
            for s in _subsets(n):
                if x in table[s]:
                    b.connect(b.index[("state", x)], b.index[("aset", s)])
        for s in _subsets(n):
            for sp_ in _subsets(n):
                if s & sp_:
                    b.connect(b.index[("aset", s)], b.index[("eset", sp_)])
            for x in sorted(s):
                b.connect(b.index[("eset", s)], b.index[("state", x)])
    else:
        for x in carrier.points:
            b.add(("state", x), Player.EXISTS, 0)
        for s in _subsets(n):
            b.add(("set", s), Player.FORALL, 0)
        for x in carrier.points:
            for s in _subsets(n):
                if x in table[s]:
                    b.connect(b.index[("state", x)], b.index[("set", s)])
        for s in _subsets(n):
            for x in sorted(s):
                b.connect(b.index[("set", s)], b.index[("state", x)])
    return b.build()


# ---------------------------------------------------------------------------
# canonical strategies


@dataclass(eq=False)
class MuDepthStrategy:
    """Existential strategy for the second mu game, driven by first
    appearance depths in the approximation trace.

    At a state of successor depth the move is the previous approximant;
    at limit depth it is the limit value itself.  At a challenged set
    the reply is a member of least depth (least point breaking ties).
    Every compliant round strictly decreases the depth, so all
    compliant plays are finite and lost by the universal player.
    """

    op: Operator
    trace: ApproxTrace

    def depth(self, x: Point):
        return self.trace.depth_of(x)

    def move_at_state(self, x: Point) -> SetDescriptor:
        d = self.depth(x)
        if d is None:
            raise PointOutsideLfp(f"{x} is not in the least fixpoint")
        b, i = d
        if i > 0:
            return self.trace.stage_at((b, i - 1))
        return self.trace.stage_at((b, 0))  # limit depth: play the limit value

    def move_at_challenge(self, u_prime: SetDescriptor) -> Point:
        """Member of the challenged set from the earliest approximant it
        meets, least point first.

        A legal challenge meets the previously claimed approximant; a
        clopen challenge meeting a limit value also meets the union
        below it, so the chosen point always has a strictly smaller
        depth than the state that opened the round.
        """
        for _b, _i, stage in self.trace.stages():
            hit = stage.inter(u_prime)
            if not hit.is_empty():
                return hit.min_point()
        raise PointOutsideLfp("challenge does not meet any approximant")


@dataclass(eq=False)
class NuGreedyStrategy:
    """Existential strategy for both nu games: always claim the greatest
    fixpoint; every compliant play is infinite and therefore won."""

    op: Operator
    gfp: SetDescriptor

    def move_at_state(self, x: Point) -> SetDescriptor:
        if x not in self.gfp:
            raise PointOutsideGfp(f"{x} is not in the greatest fixpoint")
        return self.gfp


def mu_depth_strategy(op: Operator, trace: ApproxTrace) -> MuDepthStrategy:
    assert trace.polarity == "mu"
    return MuDepthStrategy(op, trace)


def nu_greedy_strategy(op: Operator, gfp: SetDescriptor) -> NuGreedyStrategy:
    return NuGreedyStrategy(op, gfp)


def as_arena_strategy(fragment, arena: Arena) -> Strategy:
    """Adapt a canonical strategy fragment to a concrete finite arena of
    the matching game shape."""
    index = {tag: v for v, tag in enumerate(arena.tags)}
    moves: Dict[int, int] = {}
    for v, tag in enumerate(arena.tags):
        if arena.owners[v] is not Player.EXISTS:
            continue
        kind = tag[0]
        if kind == "state":
            x = tag[1]
            try:
                target = fragment.move_at_state(x)
            except (PointOutsideLfp, PointOutsideGfp):
                continue
            key = ("aset", target.members) if ("aset", target.members) in index \
                else ("set", target.members)
            moves[v] = index[key]
        elif kind == "eset" and isinstance(fragment, MuDepthStrategy):
            u_prime = FiniteSet(fragment.op.carrier, tag[1])
            if tag[1]:
                try:
                    point = fragment.move_at_challenge(u_prime)
                except PointOutsideLfp:
                    continue
                moves[v] = index[("state", point)]
    return Strategy(Player.EXISTS, moves)


# ---------------------------------------------------------------------------
# evaluation game


def build_eval_game(f: fm.Formula, model: sp.Model,
                    analysis: Optional[fm.FormulaAnalysis] = None) -> Arena:
    """The evaluation game over a finite model.

    Positions are pairs of a subformula and a point, plus unfold
    positions pairing a bound variable with a clopen set containing the
    point at which it was unfolded.  Unfold positions carry the parity
    priority of their variable; everything else has priority zero,
    which is sound because every infinite play unfolds some variable
    infinitely often.
    """
    carrier = _require_finite(model.carrier)
    if not fm.is_clean(f):
        raise NotClean(fm.show(f))
    analysis = analysis or fm.analyze(f)
    for p in analysis.free:
        if p not in model.valuation:
            raise UnboundVariable(p)

    n = carrier.size
    b = _ArenaBuilder()

    def owner_of(node: fm.Formula, x: int) -> Player:
        if isinstance(node, fm.Prop):
            if node.name in analysis.bound:
                return Player.FORALL if analysis.is_mu(node.name) else Player.EXISTS
            return Player.FORALL if x in model.valuation[node.name] else Player.EXISTS
        if isinstance(node, fm.NegProp):
            return Player.EXISTS if x in model.valuation[node.name] else Player.FORALL
        if isinstance(node, fm.Top):
            return Player.FORALL  # dead end lost by its owner
        if isinstance(node, fm.Bot):
            return Player.EXISTS
        if isinstance(node, (fm.And, fm.Box)):
            return Player.FORALL
        return Player.EXISTS  # Or, Dia, binders (binder moves are forced)

    def prio_of(node: fm.Formula) -> int:
        if isinstance(node, fm.Prop) and node.name in analysis.bound:
            return analysis.priority[node.name]
        return 0

    # Seed every (subformula, point) pair; moves close the position set.
    node_set = []
    for node in f.subformulas():
        if node not in node_set:
            node_set.append(node)
    for node in node_set:
        for x in carrier.points:
            b.add(("form", node, x), owner_of(node, x), prio_of(node))

    for node in node_set:
        for x in carrier.points:
            src = b.index[("form", node, x)]
            if isinstance(node, (fm.And, fm.Or)):
                b.connect(src, b.index[("form", node.left, x)])
                b.connect(src, b.index[("form", node.right, x)])
            elif isinstance(node, (fm.Dia, fm.Box)):
                for y in sp.successor_points(model, x):
                    b.connect(src, b.index[("form", node.sub, y)])
            elif isinstance(node, (fm.Mu, fm.Nu)):
                b.connect(src, b.index[("form", node.body, x)])
            elif isinstance(node, fm.Prop) and node.name in analysis.bound:
                var = node.name
                prio = analysis.priority[var]
                unfold_owner = Player.EXISTS if analysis.is_mu(var) else Player.FORALL
                body = analysis.body_of(var)
                for s in _subsets(n):
                    if x not in s:
                        continue
                    uset = b.add(("uset", var, s), unfold_owner, prio)
                    b.connect(src, uset)
                    for y in sorted(s):
                        b.connect(uset, b.index[("form", body, y)])
    return b.build()


def eval_positions(arena: Arena, node: fm.Formula) -> Dict[int, int]:
    """Map each point x to the arena id of position (node, x)."""
    out = {}
    for v, tag in enumerate(arena.tags):
        if tag[0] == "form" and tag[1] == node:
            out[tag[2]] = v
    return out


def render_tag(tag) -> str:
    """Human-readable position labels for exports and the interactive
    session, e.g. ``(mu q. (p .., x=3)`` or ``(q, U={0,1})``."""
    kind = tag[0]
    if kind == "form":
        text = fm.show(tag[1])
        if len(text) > 24:
            text = text[:22] + ".."
        return f"({text}, x={tag[2]})"
    if kind == "uset":
        return f"({tag[1]}, U={{{','.join(str(i) for i in sorted(tag[2]))}}})"
    if kind in ("set", "aset", "eset"):
        mark = {"set": "", "aset": "forall,", "eset": "exists,"}[kind]
        return f"({mark}{{{','.join(str(i) for i in sorted(tag[1]))}}})"
    return f"(x={tag[1]})"


def split_at_unfolds(arena: Arena, play: Play, var: str) -> List[List[int]]:
    """Cut a play into its maximal unfold-full fragments for one bound
    variable: each fragment ends at the first position pairing the
    variable with a point; concatenation restores the play."""
    segments: List[List[int]] = []
    current: List[int] = []
    for v in play.positions:
        current.append(v)
        tag = arena.tags[v]
        if tag[0] == "form" and isinstance(tag[1], fm.Prop) and tag[1].name == var:
            segments.append(current)
            current = []
    if current:
        segments.append(current)
    return segments


def compute_c_of_x(f: fm.Formula, model: sp.Model, arena: Arena,
                   result: SolveResult, x: int,
                   params: LimitParams = LimitParams()) -> FrozenSet[int]:
    """The set gathered from the winning strategy's unfold replies.

    Starting from the body position at x, follow the solved existential
    strategy against all adversary moves, stopping at the first unfold
    of the top variable; collect, over every clopen set the adversary
    may then present, the point the strategy answers with.  The defining
    property is checked before returning: x lies in the operator image
    of every clopen superset of the result.
    """
    if not isinstance(f, fm.Mu):
        raise ValueError("defined for top-level least fixpoints")
    var, body = f.var, f.body
    carrier = _require_finite(model.carrier)
    start_ids = eval_positions(arena, body)
    if x not in start_ids or start_ids[x] not in result.win_exists:
        raise NotWinningAt(("form", body, x))
    strat = result.strat_exists.moves

    reached_unfold_points = set()
    frontier = [start_ids[x]]
    seen = {start_ids[x]}
    while frontier:
        v = frontier.pop()
        tag = arena.tags[v]
        if tag[0] == "form" and isinstance(tag[1], fm.Prop) and tag[1].name == var:
            reached_unfold_points.add(tag[2])
            continue  # unfold-full plays stop here
        if arena.owners[v] is Player.EXISTS:
            if not arena.moves[v]:
                continue
            succs = (strat[v],)
        else:
            succs = arena.moves[v]
        for w in succs:
            if w not in seen:
                seen.add(w)
                frontier.append(w)

    gathered = set()
    for y in sorted(reached_unfold_points):
        for s in _subsets(carrier.size):
            if y not in s:
                continue
            uset = ("uset", var, s)
            reply = strat[_index_of(arena, uset)]
            rtag = arena.tags[reply]
            assert rtag[0] == "form" and rtag[1] == body
            gathered.add(rtag[2])

    c = frozenset(gathered)
    op = operator_of(model, var, body, params=params)
    for s in _subsets(carrier.size):
        if c <= s and x not in op(FiniteSet(carrier, s)):
            raise AssertionError(
                f"C({x}) = {sorted(c)} fails its defining property at {sorted(s)}")
    return c


def compute_c_map(f: fm.Formula, model: sp.Model, arena: Arena,
                  result: SolveResult,
                  params: LimitParams = LimitParams()) -> Dict[int, FrozenSet[int]]:
    """C(x) for every point whose body position is won by the
    existential player."""
    body_ids = eval_positions(arena, f.body)
    out = {}
    for x, vid in body_ids.items():
        if vid in result.win_exists:
            out[x] = compute_c_of_x(f, model, arena, result, x, params)
    return out


def _index_of(arena: Arena, tag) -> int:
    for v, t in enumerate(arena.tags):
        if t == tag:
            return v
    raise KeyError(tag)
