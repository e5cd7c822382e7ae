"""Mu-calculus formulas: AST, parser, canonical printer, static analysis.

Formulas are in negation normal form by construction: the grammar only
admits negation on atoms, and a fixpoint binder rejects any negated
occurrence of its own variable inside the body.

Grammar (binders extend maximally to the right)::

    form  ::= "mu" ID "." form | "nu" ID "." form | disj
    disj  ::= conj ("\\/" conj)*
    conj  ::= unary ("/\\" unary)*
    unary ::= "<>" unary | "[]" unary | "~" ID | ID | "true" | "false"
            | "(" form ")"
"""

from __future__ import annotations

import itertools
import re
from dataclasses import dataclass, field
from typing import Dict, FrozenSet, Iterator, List, Tuple

from .errors import FormulaSyntaxError, NegativeBoundVar, NotClean

_ids = itertools.count()


def _next_id() -> int:
    return next(_ids)


@dataclass(frozen=True)
class Formula:
    """Base node.  ``nid`` is a per-instance id, excluded from equality,
    so structurally equal occurrences still compare and hash alike."""

    nid: int = field(default_factory=_next_id, init=False,
                     compare=False, repr=False)

    def children(self) -> Tuple["Formula", ...]:
        return ()

    def subformulas(self) -> Iterator["Formula"]:
        """Preorder traversal of all occurrences, self first."""
        yield self
        for c in self.children():
            yield from c.subformulas()

    def free_vars(self) -> FrozenSet[str]:
        out = set()
        _free_vars(self, frozenset(), out)
        return frozenset(out)

    def bound_vars(self) -> FrozenSet[str]:
        return frozenset(n.var for n in self.subformulas()
                         if isinstance(n, (Mu, Nu)))

    def __str__(self):
        return show(self)


@dataclass(frozen=True)
class Prop(Formula):
    name: str


@dataclass(frozen=True)
class NegProp(Formula):
    name: str


@dataclass(frozen=True)
class Top(Formula):
    pass


@dataclass(frozen=True)
class Bot(Formula):
    pass


@dataclass(frozen=True)
class And(Formula):
    left: Formula
    right: Formula

    def children(self):
        return (self.left, self.right)


@dataclass(frozen=True)
class Or(Formula):
    left: Formula
    right: Formula

    def children(self):
        return (self.left, self.right)


@dataclass(frozen=True)
class Dia(Formula):
    sub: Formula

    def children(self):
        return (self.sub,)


@dataclass(frozen=True)
class Box(Formula):
    sub: Formula

    def children(self):
        return (self.sub,)


@dataclass(frozen=True)
class Mu(Formula):
    var: str
    body: Formula

    def children(self):
        return (self.body,)


@dataclass(frozen=True)
class Nu(Formula):
    var: str
    body: Formula

    def children(self):
        return (self.body,)


def _free_vars(node: Formula, bound: FrozenSet[str], out: set):
    if isinstance(node, (Prop, NegProp)):
        if node.name not in bound:
            out.add(node.name)
    elif isinstance(node, (Mu, Nu)):
        _free_vars(node.body, bound | {node.var}, out)
    else:
        for c in node.children():
            _free_vars(c, bound, out)


# ---------------------------------------------------------------------------
# parsing

_TOKEN_RE = re.compile(r"\s*(<>|\[\]|/\\|\\/|[().~]|[A-Za-z_][A-Za-z0-9_']*)")
_KEYWORDS = {"mu", "nu", "true", "false"}


def _tokenize(text: str) -> List[Tuple[str, int]]:
    tokens = []
    pos = 0
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        if not m:
            if text[pos:].strip():
                raise FormulaSyntaxError(f"unexpected character {text[pos]!r}", pos)
            break
        tokens.append((m.group(1), m.start(1)))
        pos = m.end()
    return tokens


class _Parser:
    def __init__(self, text: str):
        self.text = text
        self.tokens = _tokenize(text)
        self.i = 0

    def peek(self):
        return self.tokens[self.i][0] if self.i < len(self.tokens) else None

    def pos(self):
        return self.tokens[self.i][1] if self.i < len(self.tokens) else len(self.text)

    def take(self, expected=None):
        tok = self.peek()
        if tok is None or (expected is not None and tok != expected):
            want = expected or "a token"
            raise FormulaSyntaxError(f"expected {want}, found {tok!r}", self.pos())
        self.i += 1
        return tok

    def ident(self):
        tok = self.peek()
        if tok is None or tok in _KEYWORDS or not re.fullmatch(r"[A-Za-z_][A-Za-z0-9_']*", tok):
            raise FormulaSyntaxError(f"expected an identifier, found {tok!r}", self.pos())
        self.i += 1
        return tok

    def form(self) -> Formula:
        tok = self.peek()
        if tok in ("mu", "nu"):
            self.take()
            var = self.ident()
            self.take(".")
            body = self.form()
            _check_positive(body, var)
            return Mu(var, body) if tok == "mu" else Nu(var, body)
        return self.disj()

    def disj(self) -> Formula:
        node = self.conj()
        while self.peek() == "\\/":
            self.take()
            node = Or(node, self.conj())
        return node

    def conj(self) -> Formula:
        node = self.unary()
        while self.peek() == "/\\":
            self.take()
            node = And(node, self.unary())
        return node

    def unary(self) -> Formula:
        tok = self.peek()
        if tok == "<>":
            self.take()
            return Dia(self.unary())
        if tok == "[]":
            self.take()
            return Box(self.unary())
        if tok == "~":
            self.take()
            return NegProp(self.ident())
        if tok == "(":
            self.take()
            node = self.form()
            self.take(")")
            return node
        if tok == "true":
            self.take()
            return Top()
        if tok == "false":
            self.take()
            return Bot()
        return Prop(self.ident())


def _check_positive(body: Formula, var: str):
    """Reject any negated occurrence of ``var`` in its binder's scope."""
    if isinstance(body, NegProp) and body.name == var:
        raise NegativeBoundVar(var)
    if isinstance(body, (Mu, Nu)) and body.var == var:
        return  # rebound: inner occurrences refer to the inner binder
    for c in body.children():
        _check_positive(c, var)


def parse(text: str) -> Formula:
    p = _Parser(text)
    node = p.form()
    if p.peek() is not None:
        raise FormulaSyntaxError(f"trailing input {p.peek()!r}", p.pos())
    return node


# ---------------------------------------------------------------------------
# printing

_LEVEL_BINDER, _LEVEL_OR, _LEVEL_AND, _LEVEL_UNARY, _LEVEL_ATOM = range(5)


def _level(node: Formula) -> int:
    if isinstance(node, (Mu, Nu)):
        return _LEVEL_BINDER
    if isinstance(node, Or):
        return _LEVEL_OR
    if isinstance(node, And):
        return _LEVEL_AND
    if isinstance(node, (Dia, Box)):
        return _LEVEL_UNARY
    return _LEVEL_ATOM


def _show(node: Formula, required: int) -> str:
    if isinstance(node, Prop):
        return node.name
    if isinstance(node, NegProp):
        return f"~{node.name}"
    if isinstance(node, Top):
        return "true"
    if isinstance(node, Bot):
        return "false"
    if isinstance(node, (Mu, Nu)):
        kw = "mu" if isinstance(node, Mu) else "nu"
        text = f"{kw} {node.var}. ({_show(node.body, _LEVEL_BINDER)})"
    elif isinstance(node, Or):
        text = f"{_show(node.left, _LEVEL_OR)} \\/ {_show(node.right, _LEVEL_AND)}"
    elif isinstance(node, And):
        text = f"{_show(node.left, _LEVEL_AND)} /\\ {_show(node.right, _LEVEL_UNARY)}"
    elif isinstance(node, Dia):
        text = f"<> {_show(node.sub, _LEVEL_UNARY)}"
    elif isinstance(node, Box):
        text = f"[] {_show(node.sub, _LEVEL_UNARY)}"
    else:
        raise TypeError(node)
    if _level(node) < required:
        return f"({text})"
    return text


def show(f: Formula) -> str:
    """Canonical text; parse(show(f)) is structurally equal to f."""
    return _show(f, _LEVEL_BINDER)


# ---------------------------------------------------------------------------
# clean form

def is_clean(f: Formula) -> bool:
    """Each binder binds a distinct variable, none of them free in f."""
    seen = []
    for n in f.subformulas():
        if isinstance(n, (Mu, Nu)):
            seen.append(n.var)
    return len(seen) == len(set(seen)) and not (set(seen) & f.free_vars())


def to_clean(f: Formula) -> Formula:
    """Alpha-rename binders so the result is clean.

    Names are kept when possible; clashes get primes appended, so the
    output is deterministic and already-clean input is returned
    structurally unchanged.
    """
    used = set(f.free_vars())

    def fresh(name: str) -> str:
        candidate = name
        while candidate in used:
            candidate += "'"
        return candidate

    def go(node: Formula, env: Dict[str, str]) -> Formula:
        if isinstance(node, Prop):
            return Prop(env.get(node.name, node.name))
        if isinstance(node, NegProp):
            return NegProp(env.get(node.name, node.name))
        if isinstance(node, Top):
            return Top()
        if isinstance(node, Bot):
            return Bot()
        if isinstance(node, And):
            return And(go(node.left, env), go(node.right, env))
        if isinstance(node, Or):
            return Or(go(node.left, env), go(node.right, env))
        if isinstance(node, Dia):
            return Dia(go(node.sub, env))
        if isinstance(node, Box):
            return Box(go(node.sub, env))
        if isinstance(node, (Mu, Nu)):
            new = fresh(node.var)
            used.add(new)
            body = go(node.body, {**env, node.var: new})
            return Mu(new, body) if isinstance(node, Mu) else Nu(new, body)
        raise TypeError(node)

    return go(f, {})


# ---------------------------------------------------------------------------
# analysis

@dataclass
class FormulaAnalysis:
    """Binding structure of a clean formula.

    ``binding_of`` maps each bound variable to its binder subformula,
    ``below`` holds the strict dependency pairs (p, q) with p's binder a
    proper subformula of q's, and ``priority`` realises the parity
    encoding: odd for mu-bound, even for nu-bound, strictly increasing
    along the dependency order.
    """

    formula: Formula
    free: FrozenSet[str]
    bound: FrozenSet[str]
    binding_of: Dict[str, Formula]
    below: FrozenSet[Tuple[str, str]]
    priority: Dict[str, int]
    order: List[str]

    def body_of(self, var: str) -> Formula:
        return self.binding_of[var].body

    def is_mu(self, var: str) -> bool:
        return isinstance(self.binding_of[var], Mu)


def analyze(f: Formula) -> FormulaAnalysis:
    if not is_clean(f):
        raise NotClean(f"formula is not clean: {show(f)}")
    binding: Dict[str, Formula] = {}
    below = set()
    binder_pos: Dict[str, int] = {}
    depth: Dict[str, int] = {}

    def walk(node: Formula, enclosing: Tuple[str, ...], idx: List[int]):
        idx[0] += 1
        here = idx[0]
        if isinstance(node, (Mu, Nu)):
            binding[node.var] = node
            binder_pos[node.var] = here
            depth[node.var] = len(enclosing)
            for outer in enclosing:
                below.add((node.var, outer))
            enclosing = enclosing + (node.var,)
        for c in node.children():
            walk(c, enclosing, idx)

    walk(f, (), [0])

    # Linear extension of the dependency order, innermost first; ties
    # broken by binder position so priorities are reproducible.
    order = sorted(binding, key=lambda v: (-depth[v], binder_pos[v]))
    priority = {}
    for k, var in enumerate(order):
        wants_odd = isinstance(binding[var], Mu)
        p = 2 * k
        if (p % 2 == 1) != wants_odd:
            p += 1
        priority[var] = p

    return FormulaAnalysis(
        formula=f,
        free=f.free_vars(),
        bound=frozenset(binding),
        binding_of=binding,
        below=frozenset(below),
        priority=priority,
        order=order,
    )
