"""Seeded random generators for the cross-check suites.

Formulas come out clean by construction: binder variables are drawn
from a fresh namespace and bound variables are only ever used
positively, as the logic requires.
"""

from __future__ import annotations

import random
from typing import Dict, FrozenSet, List, Optional

from . import formula as fm
from .algebra import FiniteCarrier, FiniteSet, OMEGA, OmegaSet, SetDescriptor
from .space import FiniteRelation, Model


def random_clean_formula(rng: random.Random,
                         props=("p", "r"),
                         max_depth: int = 4,
                         max_binders: int = 2) -> fm.Formula:
    counter = [0]
    budget = [max_binders]

    def leaf(scope: List[str]) -> fm.Formula:
        choices = ["prop", "negprop", "top", "bot"]
        if scope:
            choices += ["bound", "bound"]  # favour using bound variables
        kind = rng.choice(choices)
        if kind == "prop":
            return fm.Prop(rng.choice(props))
        if kind == "negprop":
            return fm.NegProp(rng.choice(props))
        if kind == "top":
            return fm.Top()
        if kind == "bot":
            return fm.Bot()
        return fm.Prop(rng.choice(scope))

    def grow(depth: int, scope: List[str]) -> fm.Formula:
        if depth <= 0:
            return leaf(scope)
        options = ["leaf", "and", "or", "dia", "dia", "box"]
        if budget[0] > 0:
            options += ["mu", "nu", "mu", "nu"]
        kind = rng.choice(options)
        if kind == "leaf":
            return leaf(scope)
        if kind == "and":
            return fm.And(grow(depth - 1, scope), grow(depth - 1, scope))
        if kind == "or":
            return fm.Or(grow(depth - 1, scope), grow(depth - 1, scope))
        if kind == "dia":
            return fm.Dia(grow(depth - 1, scope))
        if kind == "box":
            return fm.Box(grow(depth - 1, scope))
        budget[0] -= 1
        var = f"v{counter[0]}"
        counter[0] += 1
        body = grow(depth - 1, scope + [var])
        return fm.Mu(var, body) if kind == "mu" else fm.Nu(var, body)

    out = grow(max_depth, [])
    assert fm.is_clean(out)
    return out


def random_finite_model(rng: random.Random, n: int,
                        props=("p", "r"), edge_p: float = 0.35) -> Model:
    carrier = FiniteCarrier(n)
    edges = frozenset((a, b) for a in range(n) for b in range(n)
                      if rng.random() < edge_p)
    valuation = {
        p: FiniteSet(carrier, frozenset(x for x in range(n) if rng.random() < 0.5))
        for p in props
    }
    return Model(carrier, FiniteRelation(edges), valuation)


def random_monotone_table(rng: random.Random, n: int,
                          extra_p: float = 0.3) -> Dict[FrozenSet[int], FrozenSet[int]]:
    """A monotone operator on the powerset of n points, sampled by
    filling the subset lattice bottom-up: each value must contain the
    values of all immediate predecessors."""
    subsets = sorted(
        (frozenset(i for i in range(n) if m >> i & 1) for m in range(1 << n)),
        key=lambda s: (len(s), sorted(s)))
    table: Dict[FrozenSet[int], FrozenSet[int]] = {}
    for s in subsets:
        lower = frozenset()
        for x in s:
            lower |= table[s - {x}]
        extra = frozenset(x for x in range(n) if rng.random() < extra_p)
        table[s] = lower | extra
    return table


def random_descriptor(rng: random.Random, carrier) -> SetDescriptor:
    if isinstance(carrier, FiniteCarrier):
        members = frozenset(x for x in carrier.points if rng.random() < 0.5)
        return FiniteSet(carrier, members)
    k = rng.randint(0, 5)
    exceptions = frozenset(rng.randint(0, 12) for _ in range(k))
    return OmegaSet(rng.random() < 0.5, exceptions, rng.random() < 0.5)
