"""Denotational evaluation with transfinite fixpoint approximation.

Fixpoints are computed as stage chains.  Within a block the operator is
applied up to ``finite_budget`` times; if the chain does not stabilise,
a limit stage is taken in the clopen algebra (closure of the union for
least fixpoints, interior of the intersection for greatest ones) and a
new block starts from it.  Every returned fixpoint L is certified by
one further application: F(L) = L exactly.

``eval_standard`` runs the same clauses but takes plain unions and
intersections at limits, which is the powerset semantics; its limit may
leave the descriptor class, in which case NotRepresentable is raised.

The chain of stages is kept in an :class:`ApproxTrace`, which also
retains the detected translation pattern of each limit block so that
stage values and first-appearance depths beyond the computed budget can
still be reconstructed exactly.  Strategy synthesis relies on this.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Dict, Iterator, List, Optional, Tuple

from . import formula as fm
from . import space as sp
from .algebra import (
    Carrier,
    LimitParams,
    OmegaSet,
    Point,
    SetDescriptor,
    TranslationPattern,
    empty_set,
    full_set,
    inter_of_chain,
    join_of_chain,
    meet_of_chain,
    union_of_chain,
)
from .errors import BudgetExhausted, MonotonicityViolation, UnboundVariable

Env = Dict[str, SetDescriptor]

Depth = Tuple[int, int]  # (block index, stage index): block b stage i is ordinal omega*b + i


@dataclass
class ApproxTrace:
    """Stage record of one fixpoint computation.

    ``blocks[b][i]`` is the approximant at ordinal omega * b + i; the
    first stage of block b > 0 is the limit taken after block b - 1.
    ``patterns[b]`` holds the translation pattern detected when that
    limit was taken (None for finite carriers and stabilised blocks).
    """

    polarity: str  # "mu" | "nu"
    blocks: List[List[SetDescriptor]] = field(default_factory=list)
    patterns: List[Optional[TranslationPattern]] = field(default_factory=list)
    final: SetDescriptor = None

    def stages(self) -> Iterator[Tuple[int, int, SetDescriptor]]:
        for b, block in enumerate(self.blocks):
            for i, desc in enumerate(block):
                yield b, i, desc

    def n_stages(self) -> int:
        return sum(len(b) for b in self.blocks)

    def n_limits(self) -> int:
        return max(len(self.blocks) - 1, 0)

    def stage_at(self, depth: Depth) -> SetDescriptor:
        """Stage value at an ordinal, reconstructing past the budget.

        Pattern-based reconstruction reads the chain directly and is
        only meaningful for increasing (mu) traces; nu patterns describe
        the complemented chain.
        """
        b, i = depth
        block = self.blocks[b]
        if i < len(block):
            return block[i]
        pattern = self.patterns[b] if b < len(self.patterns) else None
        if pattern is None or self.polarity != "mu":
            raise IndexError(f"stage {depth} was not computed")
        return pattern.stage(i - pattern.n0)

    def depth_of(self, x: Point) -> Optional[Depth]:
        """Least ordinal at which x enters (mu) the approximants.

        Points that first appear past the computed budget of a block are
        located through the block's translation pattern, so the result
        is exact whenever the trace is.  None when x never appears.
        """
        for b, block in enumerate(self.blocks):
            for i, desc in enumerate(block):
                if x in desc:
                    return (b, i)
            pattern = self.patterns[b] if b < len(self.patterns) else None
            if pattern is not None and self.polarity == "mu" and isinstance(x, int):
                j = pattern.union_stage_of(x)
                if j is not None:
                    return (b, j)
        return None


def _approx(op: Callable[[SetDescriptor], SetDescriptor],
            carrier: Carrier,
            polarity: str,
            params: LimitParams,
            clopen_limits: bool) -> Tuple[SetDescriptor, ApproxTrace]:
    increasing = polarity == "mu"
    trace = ApproxTrace(polarity)
    current = empty_set(carrier) if increasing else full_set(carrier)

    for b in range(params.limit_budget + 1):
        stages = [current]
        trace.blocks.append(stages)
        for _ in range(params.finite_budget):
            nxt = op(current)
            lo, hi = (current, nxt) if increasing else (nxt, current)
            if not lo.leq(hi):
                raise MonotonicityViolation(
                    f"stage order violated: {lo.show()} vs {hi.show()}")
            stages.append(nxt)
            if nxt == current:
                trace.final = nxt  # the equality is the F(L) = L certificate
                return nxt, trace
            current = nxt
        if b == params.limit_budget:
            raise BudgetExhausted(
                f"no fixpoint within {params.limit_budget} limit blocks")
        if increasing:
            limit_fn = join_of_chain if clopen_limits else _plain_join
        else:
            limit_fn = meet_of_chain if clopen_limits else _plain_meet
        limit, pattern = limit_fn(stages, params)
        trace.patterns.append(pattern)
        current = limit


def _plain_join(stages, params):
    value = union_of_chain(stages, params)
    from .algebra import detect_translation  # local: reuse detection for the trace
    return value, detect_translation(stages, params)


def _plain_meet(stages, params):
    value = inter_of_chain(stages, params)
    comp = [s.complement() for s in stages]
    from .algebra import detect_translation
    return value, detect_translation(comp, params)


def lfp_approx(op: Callable[[SetDescriptor], SetDescriptor],
               carrier: Carrier,
               params: LimitParams = LimitParams()) -> Tuple[SetDescriptor, ApproxTrace]:
    """Least clopen fixpoint of a monotone operator, with its trace."""
    return _approx(op, carrier, "mu", params, clopen_limits=True)


def gfp_approx(op: Callable[[SetDescriptor], SetDescriptor],
               carrier: Carrier,
               params: LimitParams = LimitParams()) -> Tuple[SetDescriptor, ApproxTrace]:
    """Greatest clopen fixpoint of a monotone operator, with its trace."""
    return _approx(op, carrier, "nu", params, clopen_limits=True)


# ---------------------------------------------------------------------------
# formula evaluation


def _lookup(model: sp.Model, env: Env, name: str) -> SetDescriptor:
    if name in env:
        return env[name]
    if name in model.valuation:
        return model.valuation[name]
    raise UnboundVariable(name)


def _eval(model: sp.Model, node: fm.Formula, env: Env,
          params: LimitParams, clopen_limits: bool,
          traces: Optional[Dict[int, ApproxTrace]]) -> SetDescriptor:
    if isinstance(node, fm.Prop):
        return _lookup(model, env, node.name)
    if isinstance(node, fm.NegProp):
        return _lookup(model, env, node.name).complement()
    if isinstance(node, fm.Top):
        return full_set(model.carrier)
    if isinstance(node, fm.Bot):
        return empty_set(model.carrier)
    if isinstance(node, fm.And):
        return _eval(model, node.left, env, params, clopen_limits, traces).inter(
            _eval(model, node.right, env, params, clopen_limits, traces))
    if isinstance(node, fm.Or):
        return _eval(model, node.left, env, params, clopen_limits, traces).union(
            _eval(model, node.right, env, params, clopen_limits, traces))
    if isinstance(node, fm.Dia):
        return sp.diamond(model, _eval(model, node.sub, env, params, clopen_limits, traces))
    if isinstance(node, fm.Box):
        return sp.box(model, _eval(model, node.sub, env, params, clopen_limits, traces))
    if isinstance(node, (fm.Mu, fm.Nu)):
        var, body = node.var, node.body

        def op(U: SetDescriptor) -> SetDescriptor:
            inner = dict(env)
            inner[var] = U
            return _eval(model, body, inner, params, clopen_limits, traces)

        polarity = "mu" if isinstance(node, fm.Mu) else "nu"
        value, trace = _approx(op, model.carrier, polarity, params, clopen_limits)
        if traces is not None:
            traces[node.nid] = trace
        return value
    raise TypeError(node)


def eval_den(model: sp.Model, f: fm.Formula, env: Optional[Env] = None,
             params: LimitParams = LimitParams()
             ) -> Tuple[SetDescriptor, Dict[int, ApproxTrace]]:
    """Clopen denotation of a clean formula, plus per-binder traces."""
    if not fm.is_clean(f):
        from .errors import NotClean
        raise NotClean(fm.show(f))
    traces: Dict[int, ApproxTrace] = {}
    value = _eval(model, f, dict(env or {}), params, True, traces)
    assert value.is_clopen(), "clopen semantics produced a non-clopen set"
    return value, traces


def eval_standard(model: sp.Model, f: fm.Formula, env: Optional[Env] = None,
                  params: LimitParams = LimitParams()) -> SetDescriptor:
    """Powerset (standard) denotation; may be non-clopen, may fail with
    NotRepresentable when a limit leaves the descriptor class."""
    if not fm.is_clean(f):
        from .errors import NotClean
        raise NotClean(fm.show(f))
    return _eval(model, f, dict(env or {}), params, False, None)


def operator_of(model: sp.Model, var: str, body: fm.Formula,
                env: Optional[Env] = None,
                params: LimitParams = LimitParams()
                ) -> Callable[[SetDescriptor], SetDescriptor]:
    """The monotone map U |-> [[body]] with var bound to U."""
    base = dict(env or {})

    def op(U: SetDescriptor) -> SetDescriptor:
        inner = dict(base)
        inner[var] = U
        return _eval(model, body, inner, params, True, None)

    return op
