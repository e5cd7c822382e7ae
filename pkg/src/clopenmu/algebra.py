"""Exact set descriptors over the two supported carriers.

Two carriers are available:

* ``FiniteCarrier(n)``: n isolated points, discrete topology.  Every
  subset is clopen, closure and interior are the identity.

* ``OMEGA`` (the one-point compactification of discrete naturals): the
  points are the naturals plus a single limit point ``INF``.  Clopen
  sets are the finite subsets of the naturals and the cofinite ones
  that contain ``INF``.  A descriptor stores a finite exception list
  together with a mode flag (finite / cofinite within the naturals)
  and a separate flag for ``INF``, so Boolean operations, closure and
  interior are all exact, closed-form case tables.

The clopen algebra over ``OMEGA`` is *not* complete: an increasing
chain of clopens need not have a least clopen upper bound.  The chain
operations therefore either certify a limit or raise one of the
explicit errors from :mod:`clopenmu.errors`; they never approximate
silently.  Chains that eventually grow by a fixed translation step
(the shape produced by fixpoint iteration on chain-like frames) are
recognised exactly and their limits computed in closed form.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Iterator, Optional, Union

from .errors import (
    CarrierMismatch,
    InfiniteEnumeration,
    JoinUndefined,
    ModelFormatError,
    NoLeastClopenSuperset,
    NotMonotone,
    NotRepresentable,
    PatternUndetected,
)


class _Infinity:
    """The limit point of the OMEGA carrier; a unique sentinel."""

    _instance = None
    __slots__ = ()

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self):
        return "inf"


INF = _Infinity()

Point = Union[int, _Infinity]


def point_key(p: Point):
    """Sort key placing naturals in order and INF last."""
    return (1, 0) if p is INF else (0, p)


def parse_point(token: str) -> Point:
    if token == "inf":
        return INF
    try:
        value = int(token)
    except ValueError:
        raise ModelFormatError(f"bad point token {token!r}") from None
    if value < 0:
        raise ModelFormatError(f"negative point {token!r}")
    return value


def show_point(p: Point) -> str:
    return "inf" if p is INF else str(p)


@dataclass(frozen=True)
class FiniteCarrier:
    """Discrete space on the points 0 .. size-1."""

    size: int

    def __post_init__(self):
        if self.size < 1:
            raise ValueError("finite carrier needs at least one point")

    @property
    def points(self) -> range:
        return range(self.size)


@dataclass(frozen=True)
class OmegaCarrier:
    """The naturals plus one limit point INF."""


OMEGA = OmegaCarrier()

Carrier = Union[FiniteCarrier, OmegaCarrier]


# ---------------------------------------------------------------------------
# descriptors


@dataclass(frozen=True)
class FiniteSet:
    """Subset of a finite discrete carrier, stored as a member set."""

    carrier: FiniteCarrier
    members: frozenset

    def __post_init__(self):
        if not all(0 <= m < self.carrier.size for m in self.members):
            raise ValueError("member outside carrier")

    # Boolean algebra -------------------------------------------------------

    def complement(self) -> "FiniteSet":
        return FiniteSet(self.carrier, frozenset(self.carrier.points) - self.members)

    def union(self, other: "FiniteSet") -> "FiniteSet":
        _same_carrier(self, other)
        return FiniteSet(self.carrier, self.members | other.members)

    def inter(self, other: "FiniteSet") -> "FiniteSet":
        _same_carrier(self, other)
        return FiniteSet(self.carrier, self.members & other.members)

    def diff(self, other: "FiniteSet") -> "FiniteSet":
        return self.inter(other.complement())

    def leq(self, other: "FiniteSet") -> bool:
        _same_carrier(self, other)
        return self.members <= other.members

    def __contains__(self, p: Point) -> bool:
        return p in self.members

    # topology: discrete, so Cl = Int = id ----------------------------------

    def cl(self) -> "FiniteSet":
        return self

    def interior(self) -> "FiniteSet":
        return self

    def is_clopen(self) -> bool:
        return True

    def is_closed(self) -> bool:
        return True

    # queries ---------------------------------------------------------------

    def is_empty(self) -> bool:
        return not self.members

    def is_full(self) -> bool:
        return len(self.members) == self.carrier.size

    def enumerable(self) -> bool:
        return True

    def points(self) -> Iterator[Point]:
        return iter(sorted(self.members))

    def min_point(self) -> Point:
        if not self.members:
            raise ValueError("empty descriptor has no member")
        return min(self.members)

    def show(self) -> str:
        if self.is_full():
            return "all"
        if self.is_empty():
            return "empty"
        return "{" + ",".join(str(m) for m in sorted(self.members)) + "}"

    def __repr__(self):
        return f"FiniteSet({self.show()})"


@dataclass(frozen=True)
class OmegaSet:
    """Subset of OMEGA that is finite or cofinite within the naturals.

    ``cofinite=False``: the natural part is exactly ``exceptions``.
    ``cofinite=True``: the natural part is the naturals minus
    ``exceptions``.  ``has_inf`` tracks the limit point separately.
    Exception lists are frozensets, so structural equality is set
    equality.
    """

    cofinite: bool
    exceptions: frozenset
    has_inf: bool

    def __post_init__(self):
        if not all(isinstance(e, int) and e >= 0 for e in self.exceptions):
            raise ValueError("exceptions must be naturals")

    @property
    def carrier(self) -> OmegaCarrier:
        return OMEGA

    # Boolean algebra: the four mode combinations ---------------------------

    def complement(self) -> "OmegaSet":
        return OmegaSet(not self.cofinite, self.exceptions, not self.has_inf)

    def union(self, other: "OmegaSet") -> "OmegaSet":
        _same_carrier(self, other)
        inf = self.has_inf or other.has_inf
        if not self.cofinite and not other.cofinite:
            return OmegaSet(False, self.exceptions | other.exceptions, inf)
        if self.cofinite and other.cofinite:
            return OmegaSet(True, self.exceptions & other.exceptions, inf)
        fin, cof = (self, other) if not self.cofinite else (other, self)
        return OmegaSet(True, cof.exceptions - fin.exceptions, inf)

    def inter(self, other: "OmegaSet") -> "OmegaSet":
        return self.complement().union(other.complement()).complement()

    def diff(self, other: "OmegaSet") -> "OmegaSet":
        return self.inter(other.complement())

    def leq(self, other: "OmegaSet") -> bool:
        _same_carrier(self, other)
        return self.inter(other) == self

    def __contains__(self, p: Point) -> bool:
        if p is INF:
            return self.has_inf
        if not isinstance(p, int) or p < 0:
            return False
        return (p not in self.exceptions) if self.cofinite else (p in self.exceptions)

    # topology ---------------------------------------------------------------
    # Naturals are isolated; the neighbourhoods of INF are the cofinite
    # sets containing it.  Hence: a set accumulates at INF exactly when
    # its natural part is infinite, and INF is interior exactly when the
    # natural part is cofinite and INF present.

    def cl(self) -> "OmegaSet":
        if self.cofinite:
            return OmegaSet(True, self.exceptions, True)
        return self

    def interior(self) -> "OmegaSet":
        if not self.cofinite:
            return OmegaSet(False, self.exceptions, False)
        return self

    def is_clopen(self) -> bool:
        return self.cofinite == self.has_inf

    def is_closed(self) -> bool:
        return self.has_inf or not self.cofinite

    # queries ----------------------------------------------------------------

    def is_empty(self) -> bool:
        return not self.cofinite and not self.exceptions and not self.has_inf

    def is_full(self) -> bool:
        return self.cofinite and not self.exceptions and self.has_inf

    def enumerable(self) -> bool:
        """True when the descriptor has finitely many points."""
        return not self.cofinite

    def points(self) -> Iterator[Point]:
        if self.cofinite:
            raise InfiniteEnumeration("cofinite descriptor is not enumerable")
        yield from sorted(self.exceptions)
        if self.has_inf:
            yield INF

    def min_point(self) -> Point:
        """Least member: smallest natural, with INF only as a last resort."""
        if self.cofinite:
            n = 0
            while n in self.exceptions:
                n += 1
            return n
        if self.exceptions:
            return min(self.exceptions)
        if self.has_inf:
            return INF
        raise ValueError("empty descriptor has no member")

    def nat_bound(self) -> int:
        """A natural strictly above every exception."""
        return max(self.exceptions, default=-1) + 1

    def show(self) -> str:
        if self.is_full():
            return "all"
        if self.is_empty():
            return "empty"
        body = "{" + ",".join(str(e) for e in sorted(self.exceptions)) + "}"
        text = ("co" + body) if self.cofinite else body
        return text + "+inf" if self.has_inf else text

    def __repr__(self):
        return f"OmegaSet({self.show()})"


SetDescriptor = Union[FiniteSet, OmegaSet]


def _same_carrier(a: SetDescriptor, b: SetDescriptor):
    if a.carrier != b.carrier:
        raise CarrierMismatch(f"{a.carrier} vs {b.carrier}")


# ---------------------------------------------------------------------------
# constructors


def empty_set(carrier: Carrier) -> SetDescriptor:
    if isinstance(carrier, FiniteCarrier):
        return FiniteSet(carrier, frozenset())
    return OmegaSet(False, frozenset(), False)


def full_set(carrier: Carrier) -> SetDescriptor:
    if isinstance(carrier, FiniteCarrier):
        return FiniteSet(carrier, frozenset(carrier.points))
    return OmegaSet(True, frozenset(), True)


def descriptor_of(carrier: Carrier, points: Iterable[Point]) -> SetDescriptor:
    """Finite-member descriptor (finite mode on OMEGA)."""
    pts = list(points)
    if isinstance(carrier, FiniteCarrier):
        return FiniteSet(carrier, frozenset(pts))
    nats = frozenset(p for p in pts if p is not INF)
    return OmegaSet(False, nats, INF in pts)


def parse_descriptor(carrier: Carrier, text: str) -> SetDescriptor:
    """Parse the descriptor syntax: {0,1,2}, co{0,2}+inf, {}+inf, all, empty."""
    raw = text.strip()
    if raw == "all":
        return full_set(carrier)
    if raw == "empty":
        return empty_set(carrier)
    body = raw
    has_inf = False
    if body.endswith("+inf"):
        has_inf = True
        body = body[: -len("+inf")]
    cofinite = False
    if body.startswith("co"):
        cofinite = True
        body = body[2:]
    if not (body.startswith("{") and body.endswith("}")):
        raise ModelFormatError(f"bad descriptor {text!r}")
    inner = body[1:-1].strip()
    items = frozenset(int(t) for t in inner.split(",") if t.strip()) if inner else frozenset()
    if isinstance(carrier, OmegaCarrier):
        return OmegaSet(cofinite, items, has_inf)
    if has_inf:
        raise ModelFormatError("finite carrier has no point inf")
    if not all(0 <= m < carrier.size for m in items):
        raise ModelFormatError(f"point outside carrier in {text!r}")
    members = frozenset(carrier.points) - items if cofinite else items
    return FiniteSet(carrier, members)


def enumerate_clopens(carrier: Carrier) -> Iterator[SetDescriptor]:
    """All clopen subsets of a finite carrier, in mask order."""
    if isinstance(carrier, OmegaCarrier):
        raise InfiniteEnumeration("OMEGA has infinitely many clopens")
    n = carrier.size
    for mask in range(1 << n):
        yield FiniteSet(carrier, frozenset(i for i in range(n) if mask >> i & 1))


# ---------------------------------------------------------------------------
# least clopen superset


def least_clopen_superset(s: SetDescriptor) -> SetDescriptor:
    """The least clopen T with S <= T, when the algebra has one.

    On a finite carrier everything is clopen.  On OMEGA the only failing
    shape is a finite natural part together with INF: its clopen
    supersets are the cofinite-with-INF sets and that family has no
    least element.
    """
    if isinstance(s, FiniteSet):
        return s
    if s.is_clopen():
        return s
    if s.cofinite:
        return s.cl()
    raise NoLeastClopenSuperset(s.show())


# ---------------------------------------------------------------------------
# chains


@dataclass(frozen=True)
class LimitParams:
    """Budgets for transfinite approximation.

    ``finite_budget`` successor steps are taken per block; at most
    ``limit_budget`` limit stages are attempted, so the iteration
    explores ordinals up to omega * limit_budget + finite_budget.
    Pattern detection looks for a stabilisation point n0 <= n0_max and
    a translation step d in [1, d_max].
    """

    finite_budget: int = 64
    limit_budget: int = 4
    n0_max: int = 16
    d_max: int = 8

    def __post_init__(self):
        if min(self.finite_budget, self.limit_budget, self.n0_max, self.d_max) < 1:
            raise ValueError("all limit parameters must be positive")


@dataclass(frozen=True)
class TranslationPattern:
    """Detected eventual-translation shape of an increasing chain.

    From stage index ``n0`` on, consecutive differences are finite sets
    of naturals translating by ``step`` each stage.  ``base`` is the
    stage at ``n0``; ``delta`` the difference into stage ``n0 + 1``.
    Enough to reconstruct any later stage and the eventual union.
    """

    n0: int
    step: int
    base: OmegaSet
    delta: frozenset
    has_inf: bool

    def stage(self, j: int) -> OmegaSet:
        """The chain value at index n0 + j, reconstructed."""
        extra = frozenset(x + t * self.step for x in self.delta for t in range(j))
        return OmegaSet(self.base.cofinite,
                        self.base.exceptions | extra if not self.base.cofinite
                        else self.base.exceptions - extra,
                        self.has_inf)

    def residues(self) -> frozenset:
        return frozenset(x % self.step for x in self.delta)

    def full_coverage(self) -> bool:
        return self.base.cofinite or self.residues() == frozenset(range(self.step))

    def union(self) -> OmegaSet:
        """The union of the whole chain; requires representability."""
        if self.base.cofinite:
            alive = set()
            for e in self.base.exceptions:
                r = e % self.step
                filled = any(x % self.step == r and x <= e for x in self.delta)
                if not filled:
                    alive.add(e)
            return OmegaSet(True, frozenset(alive), self.has_inf)
        if not self.full_coverage():
            raise NotRepresentable("chain union is neither finite nor cofinite")
        first = {r: min(x for x in self.delta if x % self.step == r)
                 for r in self.residues()}
        bound = max(first.values())
        holes = frozenset(
            m for m in range(bound)
            if m not in self.base.exceptions and m < first[m % self.step]
        )
        return OmegaSet(True, holes, self.has_inf)

    def union_stage_of(self, x: int) -> Optional[int]:
        """Chain index at which natural x first appears, or None.

        Only consulted for points beyond the materialised stages, where
        membership is governed by the translated deltas.
        """
        for base_x in self.delta:
            if x >= base_x and (x - base_x) % self.step == 0:
                j = (x - base_x) // self.step
                return self.n0 + j + 1
        return None


def _consume_chain(stages: Iterable[SetDescriptor], params: LimitParams):
    """Pull stages until stabilisation, exhaustion, or budget.

    Returns (sequence, stabilised).  Consecutive equality is treated as
    stabilisation, which is sound for the operator-orbit chains this
    package produces.  Finite carriers ignore the budget: a strictly
    increasing chain there is bounded by the carrier size.
    """
    it = iter(stages)
    try:
        first = next(it)
    except StopIteration:
        raise ValueError("empty chain") from None
    seq = [first]
    finite = isinstance(first, FiniteSet)
    while True:
        if not finite and len(seq) > params.finite_budget:
            return seq, False
        try:
            nxt = next(it)
        except StopIteration:
            return seq, True  # finite chain: the last element is the lub
        if not seq[-1].leq(nxt):
            raise NotMonotone(f"stage {len(seq) - 1} not below stage {len(seq)}")
        if nxt == seq[-1]:
            return seq, True
        seq.append(nxt)


def detect_translation(seq, params: LimitParams) -> Optional[TranslationPattern]:
    """Find the eventual-translation pattern of an increasing OmegaSet chain."""
    deltas = []
    for a, b in zip(seq, seq[1:]):
        d = b.diff(a)
        if d.cofinite:
            return None  # an infinite jump cannot be a translated finite delta
        deltas.append(d)
    if len(deltas) < 2:
        return None
    for step in range(1, params.d_max + 1):
        for n0 in range(0, min(params.n0_max, len(deltas) - 2) + 1):
            window = deltas[n0:]
            if any(d.has_inf for d in window):
                continue
            nats = [d.exceptions for d in window]
            if any(not s for s in nats):
                continue
            if all(nats[i + 1] == frozenset(x + step for x in nats[i])
                   for i in range(len(nats) - 1)):
                return TranslationPattern(
                    n0=n0, step=step, base=seq[n0], delta=nats[0],
                    has_inf=seq[n0].has_inf)
    return None


def _chain_union(stages, params: LimitParams):
    """Union of an increasing chain, as (descriptor, pattern-or-None).

    Raises NotRepresentable / PatternUndetected when the union cannot
    be produced exactly within the descriptor class and budgets.
    """
    seq, stabilised = _consume_chain(stages, params)
    if stabilised:
        return seq[-1], None
    pattern = detect_translation(seq, params)
    if pattern is None:
        raise PatternUndetected(
            f"no translation pattern within {len(seq)} stages")
    return pattern.union(), pattern


def union_of_chain(stages: Iterable[SetDescriptor],
                   params: LimitParams = LimitParams()) -> SetDescriptor:
    """Plain (powerset) union of an increasing chain; may be non-clopen."""
    value, _ = _chain_union(stages, params)
    return value


def inter_of_chain(stages: Iterable[SetDescriptor],
                   params: LimitParams = LimitParams()) -> SetDescriptor:
    """Plain intersection of a decreasing chain, via complement duality."""
    try:
        value, _ = _chain_union((s.complement() for s in stages), params)
    except NotRepresentable:
        raise NotRepresentable("chain intersection leaves the descriptor class") from None
    return value.complement()


def join_of_chain(stages: Iterable[SetDescriptor],
                  params: LimitParams = LimitParams()):
    """Least clopen upper bound Cl(union) of an increasing chain.

    Returns (descriptor, pattern-or-None); the pattern is kept so
    callers can reconstruct stages past the budget.  Raises
    JoinUndefined when the union has no least clopen upper bound,
    PatternUndetected when the chain shape is not recognised.
    """
    try:
        value, pattern = _chain_union(stages, params)
    except NotRepresentable:
        # Union exists in the powerset but has no least clopen bound:
        # its clopen supersets form a strictly descending family.
        raise JoinUndefined("chain union has no least clopen upper bound") from None
    join = value.cl() if isinstance(value, OmegaSet) else value
    assert join.is_clopen()
    return join, pattern


def meet_of_chain(stages: Iterable[SetDescriptor],
                  params: LimitParams = LimitParams()):
    """Greatest clopen lower bound Int(intersection) of a decreasing chain.

    Dual of join_of_chain under complementation; failures surface as the
    same error classes.
    """
    join, pattern = join_of_chain((s.complement() for s in stages), params)
    return join.complement(), pattern
