"""Clopen bisimulations: checking, computing, and invariance harness.

A relation between two models is given either as an explicit pair set
(finite backend) or as a schema mirroring the relation presentations:
explicit pairs, an optional tail rule pairing every natural n with n
or n + d, and an optional inf-inf pair.  Schema form keeps forward and
backward images of descriptors exactly computable.

On finite carriers every relation has clopen images, so a Kripke
bisimulation is automatically a clopen one; the symbolic check
additionally computes images of the generator clopens on both sides.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Dict, List, Optional, Tuple

from . import formula as fm
from . import space as sp
from .algebra import (
    INF,
    OMEGA,
    FiniteCarrier,
    LimitParams,
    OmegaCarrier,
    OmegaSet,
    Point,
    empty_set,
    full_set,
    parse_point,
    show_point,
)
from .errors import ModelFormatError, SymbolicNotSupported
from .semantics import eval_den


@dataclass(frozen=True)
class BisimRelation:
    """Pairs plus optional tail/inf schema (schema parts are only
    meaningful over the OMEGA carrier)."""

    pairs: frozenset = frozenset()
    tail: Optional[str] = None  # None | "identity" | "shift"
    shift_d: int = 0
    inf_pair: bool = False

    def contains(self, x: Point, y: Point) -> bool:
        if (x, y) in self.pairs:
            return True
        if self.inf_pair and x is INF and y is INF:
            return True
        if self.tail and isinstance(x, int) and isinstance(y, int):
            if self.tail == "identity":
                return x == y
            return y == x + self.shift_d
        return False

    def inverse(self) -> "BisimRelation":
        return BisimRelation(
            pairs=frozenset((y, x) for x, y in self.pairs),
            tail=self.tail,
            shift_d=-self.shift_d,
            inf_pair=self.inf_pair,
        )

    def image(self, U: OmegaSet) -> OmegaSet:
        """Forward image Z[U] over the OMEGA carrier."""
        out = empty_set(OMEGA)
        explicit_nats = set()
        explicit_inf = False
        for a, b in self.pairs:
            if a in U:
                if b is INF:
                    explicit_inf = True
                else:
                    explicit_nats.add(b)
        out = out.union(OmegaSet(False, frozenset(explicit_nats), explicit_inf))
        if self.inf_pair and INF in U:
            out = out.union(OmegaSet(False, frozenset(), True))
        if self.tail:
            d = 0 if self.tail == "identity" else self.shift_d
            out = out.union(_shift_nat_part(U, d))
        return out

    def preimage(self, U: OmegaSet) -> OmegaSet:
        return self.inverse().image(U)


def _shift_nat_part(U: OmegaSet, d: int) -> OmegaSet:
    """{n + d : n in U natural, n + d >= 0} as a descriptor."""
    if not U.cofinite:
        return OmegaSet(False, frozenset(x + d for x in U.exceptions if x + d >= 0), False)
    holes = set(range(0, d))  # below d nothing is reached when shifting up
    for e in U.exceptions:
        if e + d >= 0:
            holes.add(e + d)
    return OmegaSet(True, frozenset(holes), False)


def relation_points(z: BisimRelation, m1: sp.Model, m2: sp.Model,
                    extra_bound: int = 0) -> List[Tuple[Point, Point]]:
    """Finite list of pairs that decides the schema: all explicit pairs
    plus tail representatives up to a bound covering thresholds, shifts
    and valuation exceptions on both sides."""
    pairs = sorted(z.pairs, key=lambda p: (point_sort(p[0]), point_sort(p[1])))
    if not isinstance(m1.carrier, OmegaCarrier):
        return pairs
    bound = extra_bound + 2
    for m in (m1, m2):
        rel = m.relation
        bound = max(bound, rel.threshold + 2 * rel.max_shift + 2)
        for desc in m.valuation.values():
            bound = max(bound, desc.nat_bound() + 1)
    bound += abs(z.shift_d)
    if z.tail:
        for n in range(bound):
            y = n if z.tail == "identity" else n + z.shift_d
            if y >= 0:
                pairs.append((n, y))
    if z.inf_pair:
        pairs.append((INF, INF))
    return pairs


def point_sort(p: Point):
    return (1, 0) if p is INF else (0, p)


@dataclass
class BisimCheck:
    ok: bool
    witness: Optional[str] = None


def is_kripke_bisimulation(z: BisimRelation, m1: sp.Model, m2: sp.Model) -> BisimCheck:
    """Atom agreement plus back-and-forth, checked on explicit pairs and
    tail representatives (rule uniformity decides the rest)."""
    props = sorted(set(m1.valuation) | set(m2.valuation))
    for p in props:
        if p not in m1.valuation or p not in m2.valuation:
            return BisimCheck(False, f"proposition {p!r} valued on one side only")
    for x, y in relation_points(z, m1, m2):
        for p in props:
            if (x in m1.valuation[p]) != (y in m2.valuation[p]):
                return BisimCheck(False, f"atom {p!r} differs on pair "
                                         f"({show_point(x)},{show_point(y)})")
        for x2 in sp.successor_points(m1, x):
            if not any(z.contains(x2, y2) for y2 in sp.successor_points(m2, y)):
                return BisimCheck(False, f"forth fails at ({show_point(x)},"
                                         f"{show_point(y)}) via {show_point(x2)}")
        for y2 in sp.successor_points(m2, y):
            if not any(z.contains(x2, y2) for x2 in sp.successor_points(m1, x)):
                return BisimCheck(False, f"back fails at ({show_point(x)},"
                                         f"{show_point(y)}) via {show_point(y2)}")
    return BisimCheck(True)


def _generator_clopens(m: sp.Model):
    if isinstance(m.carrier, FiniteCarrier):
        return []  # discrete: images are trivially clopen
    rel = m.relation
    hi = rel.threshold + 2 * rel.max_shift + 2
    for desc in m.valuation.values():
        hi = max(hi, desc.nat_bound() + 1)
    gens = [empty_set(OMEGA), full_set(OMEGA)]
    for v in range(hi + 1):
        gens.append(OmegaSet(False, frozenset({v}), False))
        gens.append(OmegaSet(True, frozenset(range(v)), True))
    return gens


def is_clopen_bisimulation(z: BisimRelation, m1: sp.Model, m2: sp.Model) -> BisimCheck:
    """Kripke conditions plus clopenness of images of generator clopens
    in both directions.  Vacuous on finite carriers."""
    base = is_kripke_bisimulation(z, m1, m2)
    if not base.ok:
        return base
    if isinstance(m1.carrier, FiniteCarrier) != isinstance(m2.carrier, FiniteCarrier):
        return BisimCheck(False, "mixed carrier kinds are not supported")
    if isinstance(m1.carrier, FiniteCarrier):
        return BisimCheck(True)
    for U in _generator_clopens(m1):
        img = z.image(U)
        if not img.is_clopen():
            return BisimCheck(False, f"forward image of {U.show()} is "
                                     f"{img.show()}, not clopen")
    for U in _generator_clopens(m2):
        img = z.preimage(U)
        if not img.is_clopen():
            return BisimCheck(False, f"backward image of {U.show()} is "
                                     f"{img.show()}, not clopen")
    return BisimCheck(True)


def largest_bisimulation(m1: sp.Model, m2: sp.Model) -> BisimRelation:
    """Greatest Kripke bisimulation between finite models, by naive
    refinement from the atom-agreeing pair set."""
    if not (isinstance(m1.carrier, FiniteCarrier) and isinstance(m2.carrier, FiniteCarrier)):
        raise SymbolicNotSupported("largest bisimulation needs finite carriers")
    props = sorted(set(m1.valuation) | set(m2.valuation))
    for p in props:
        if p not in m1.valuation or p not in m2.valuation:
            raise ModelFormatError(f"proposition {p!r} valued on one side only")
    current = {
        (x, y)
        for x in m1.carrier.points
        for y in m2.carrier.points
        if all((x in m1.valuation[p]) == (y in m2.valuation[p]) for p in props)
    }
    while True:
        def alive(x, y):
            for x2 in sp.successor_points(m1, x):
                if not any((x2, y2) in current for y2 in sp.successor_points(m2, y)):
                    return False
            for y2 in sp.successor_points(m2, y):
                if not any((x2, y2) in current for x2 in sp.successor_points(m1, x)):
                    return False
            return True

        refined = {(x, y) for (x, y) in current if alive(x, y)}
        if refined == current:
            return BisimRelation(pairs=frozenset(current))
        current = refined


@dataclass
class InvarianceReport:
    pairs_checked: int = 0
    formulas_checked: int = 0
    violations: List[str] = field(default_factory=list)
    errors: List[str] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.violations


def invariance_suite(m1: sp.Model, m2: sp.Model, z: BisimRelation,
                     formulas: List[fm.Formula],
                     params: LimitParams = LimitParams()) -> InvarianceReport:
    """Membership agreement across the relation for each formula.

    Evaluation errors (for example an undefined limit on the symbolic
    carrier) are recorded per formula, not fatal.  Any disagreement
    would contradict invariance and hence indicates an implementation
    bug; the report lists it verbatim.
    """
    report = InvarianceReport()
    pairs = relation_points(z, m1, m2)
    report.pairs_checked = len(pairs)
    for f in formulas:
        report.formulas_checked += 1
        try:
            d1, _ = eval_den(m1, f, params=params)
            d2, _ = eval_den(m2, f, params=params)
        except Exception as e:  # recorded, not fatal
            report.errors.append(f"{fm.show(f)}: {type(e).__name__}: {e}")
            continue
        for x, y in pairs:
            if (x in d1) != (y in d2):
                report.violations.append(
                    f"{fm.show(f)} disagrees on ({show_point(x)},{show_point(y)})")
    return report


# ---------------------------------------------------------------------------
# relation files: `pair <a> <b>`, `tail identity|shift <d>`, `infpair`


def parse_relation(text: str) -> BisimRelation:
    pairs = set()
    tail = None
    shift_d = 0
    inf_pair = False
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        try:
            if parts[0] == "pair":
                pairs.add((parse_point(parts[1]), parse_point(parts[2])))
            elif parts[0] == "tail":
                if parts[1] == "identity":
                    tail = "identity"
                elif parts[1] == "shift":
                    tail = "shift"
                    shift_d = int(parts[2])
                else:
                    raise ModelFormatError(f"unknown tail rule {parts[1]!r}")
            elif parts[0] == "infpair":
                inf_pair = True
            else:
                raise ModelFormatError(f"unknown directive {parts[0]!r}")
        except (IndexError, ValueError) as e:
            raise ModelFormatError(f"line {lineno}: {e}") from None
    return BisimRelation(frozenset(pairs), tail, shift_d, inf_pair)


def load_relation(path) -> BisimRelation:
    with open(path, "r", encoding="utf-8") as fh:
        return parse_relation(fh.read())
