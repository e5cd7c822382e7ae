"""Brute-force reference semantics on finite models.

Everything here works on plain frozensets of point indices and naive
iteration, independent of the descriptor algebra and the approximation
engine, so it can serve as an oracle for both.
"""

from __future__ import annotations

from typing import Callable, Dict, FrozenSet, Optional

from . import formula as fm
from .space import FiniteRelation, Model


def eval_naive(model: Model, f: fm.Formula,
               env: Optional[Dict[str, FrozenSet[int]]] = None) -> FrozenSet[int]:
    """Standard Kripke semantics by direct set computation and naive
    fixpoint iteration over the full powerset lattice."""
    assert isinstance(model.relation, FiniteRelation)
    points = frozenset(model.carrier.points)
    edges = model.relation.edges
    env = dict(env or {})

    def dia(s: FrozenSet[int]) -> FrozenSet[int]:
        return frozenset(x for x in points if any((x, y) in edges for y in s))

    def ev(node: fm.Formula, env: Dict[str, FrozenSet[int]]) -> FrozenSet[int]:
        if isinstance(node, fm.Prop):
            if node.name in env:
                return env[node.name]
            return frozenset(model.valuation[node.name].members)
        if isinstance(node, fm.NegProp):
            base = env[node.name] if node.name in env else model.valuation[node.name].members
            return points - base
        if isinstance(node, fm.Top):
            return points
        if isinstance(node, fm.Bot):
            return frozenset()
        if isinstance(node, fm.And):
            return ev(node.left, env) & ev(node.right, env)
        if isinstance(node, fm.Or):
            return ev(node.left, env) | ev(node.right, env)
        if isinstance(node, fm.Dia):
            return dia(ev(node.sub, env))
        if isinstance(node, fm.Box):
            return points - dia(points - ev(node.sub, env))
        if isinstance(node, (fm.Mu, fm.Nu)):
            current = frozenset() if isinstance(node, fm.Mu) else points
            while True:
                nxt = ev(node.body, {**env, node.var: current})
                if nxt == current:
                    return current
                current = nxt
        raise TypeError(node)

    return ev(f, env)


def naive_lfp(op: Callable[[FrozenSet[int]], FrozenSet[int]]) -> FrozenSet[int]:
    current = frozenset()
    while True:
        nxt = op(current)
        if nxt == current:
            return current
        current = nxt


def naive_gfp(op: Callable[[FrozenSet[int]], FrozenSet[int]],
              points: FrozenSet[int]) -> FrozenSet[int]:
    current = frozenset(points)
    while True:
        nxt = op(current)
        if nxt == current:
            return current
        current = nxt
