"""Modal space models: relation presentations, diamond/box, validation.

A relation over the OMEGA carrier is presented by a threshold k,
explicit edges among {0..k-1, inf}, and translation-type tail rules
(shift by d, tail self loop, loop at inf).  Within this class the
diamond of a descriptor is computable by finite case analysis: rules
act uniformly beyond a bound, so membership of large tail points in
the diamond image is eventually constant.

Richer tail rules (an edge from every tail point to inf, or from inf
into the tail) are deliberately not expressible: they can break
clopen-preservation of the diamond in ways a finite generator check
cannot certify.  Point-closedness, by contrast, holds for every
presentation in this class, because successor sets are always finite
apart from the possible point inf.

Model files::

    carrier finite <n>        |  carrier omega k=<k>
    edge <a> <b>              # a, b point indices or "inf"
    shift <d>  |  tailloop  |  infloop
    val <prop> <descriptor>   # descriptor syntax from the algebra module
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Dict, List, Tuple, Union

from .algebra import (
    INF,
    OMEGA,
    Carrier,
    FiniteCarrier,
    FiniteSet,
    OmegaCarrier,
    OmegaSet,
    Point,
    SetDescriptor,
    descriptor_of,
    empty_set,
    full_set,
    parse_descriptor,
    parse_point,
    show_point,
)
from .errors import CarrierMismatch, ModalSpaceViolation, ModelFormatError


@dataclass(frozen=True)
class FiniteRelation:
    edges: frozenset  # of (int, int)


@dataclass(frozen=True)
class OmegaRelation:
    threshold: int
    edges: frozenset  # of (Point, Point); endpoints < threshold or INF
    shifts: frozenset  # of int: n -> n + d for n >= threshold, n + d >= 0
    tail_self_loop: bool = False
    inf_loop: bool = False

    def __post_init__(self):
        for a, b in self.edges:
            for p in (a, b):
                if p is not INF and not (0 <= p < self.threshold):
                    raise ModelFormatError(
                        f"explicit edge endpoint {p} not below threshold "
                        f"{self.threshold} and not inf")

    @property
    def max_shift(self) -> int:
        return max((abs(d) for d in self.shifts), default=0)


Relation = Union[FiniteRelation, OmegaRelation]


@dataclass(eq=False)
class Model:
    """A carrier, a relation presentation and a clopen valuation."""

    carrier: Carrier
    relation: Relation
    valuation: Dict[str, SetDescriptor] = field(default_factory=dict)

    def __post_init__(self):
        for prop, desc in self.valuation.items():
            if desc.carrier != self.carrier:
                raise CarrierMismatch(f"valuation of {prop!r} lives elsewhere")
            if not desc.is_clopen():
                raise ModelFormatError(f"valuation of {prop!r} is not clopen")

    def with_valuation(self, prop: str, desc: SetDescriptor) -> "Model":
        updated = dict(self.valuation)
        updated[prop] = desc
        return Model(self.carrier, self.relation, updated)

    def points(self):
        """Finite carrier only: iterate the points."""
        return self.carrier.points


def successor_points(m: Model, x: Point) -> List[Point]:
    """R(x) as an explicit point list (always finite in this class)."""
    rel = m.relation
    if isinstance(rel, FiniteRelation):
        return sorted(b for a, b in rel.edges if a == x)
    out = []
    if x is INF:
        out.extend(b for a, b in rel.edges if a is INF)
        if rel.inf_loop:
            out.append(INF)
    elif x < rel.threshold:
        out.extend(b for a, b in rel.edges if a == x)
    else:
        for d in rel.shifts:
            if x + d >= 0:
                out.append(x + d)
        if rel.tail_self_loop:
            out.append(x)
    seen = []
    for p in out:
        if p not in seen:
            seen.append(p)
    return seen


def successors(m: Model, x: Point) -> SetDescriptor:
    """R(x) as a descriptor; closed by construction."""
    return descriptor_of(m.carrier, successor_points(m, x))


def _omega_bound(m: Model, U: OmegaSet) -> int:
    """A natural B such that for all n >= B membership of n in the
    diamond image depends only on U's mode and the presence of tail
    rules."""
    rel = m.relation
    hi = max(U.exceptions, default=-1)
    for a, b in rel.edges:
        if b is not INF:
            hi = max(hi, b)
    return max(rel.threshold, 1) + rel.max_shift + hi + 2


def diamond(m: Model, U: SetDescriptor) -> SetDescriptor:
    """{x : R(x) meets U}; raises if a clopen input yields a non-clopen
    image, which would mean the presentation is not a modal space."""
    if U.carrier != m.carrier:
        raise CarrierMismatch("diamond argument over a different carrier")
    if isinstance(m.carrier, FiniteCarrier):
        hit = [x for x in m.carrier.points
               if any(y in U for y in successor_points(m, x))]
        return FiniteSet(m.carrier, frozenset(hit))

    rel = m.relation
    bound = _omega_bound(m, U)
    member = {n: any(y in U for y in successor_points(m, n))
              for n in range(bound)}
    inf_in = any(y in U for y in successor_points(m, INF))
    has_tail = bool(rel.shifts) or rel.tail_self_loop
    # Beyond the bound every shift target avoids U's exception list, so
    # a tail point is in the image iff U is cofinite and a rule exists.
    tail_const = has_tail and U.cofinite
    if tail_const:
        result = OmegaSet(True, frozenset(n for n in range(bound) if not member[n]), inf_in)
    else:
        result = OmegaSet(False, frozenset(n for n in range(bound) if member[n]), inf_in)
    if U.is_clopen() and not result.is_clopen():
        raise ModalSpaceViolation(
            f"diamond of clopen {U.show()} is {result.show()}, not clopen")
    return result


def box(m: Model, U: SetDescriptor) -> SetDescriptor:
    """{x : R(x) inside U} = complement of diamond of complement."""
    return diamond(m, U.complement()).complement()


# ---------------------------------------------------------------------------
# validation


@dataclass
class CheckResult:
    name: str
    ok: bool
    detail: str = ""


@dataclass
class ValidationReport:
    checks: List[CheckResult]

    @property
    def ok(self) -> bool:
        return all(c.ok for c in self.checks)

    def failures(self) -> List[CheckResult]:
        return [c for c in self.checks if not c.ok]

    def render(self) -> str:
        lines = []
        for c in self.checks:
            mark = "pass" if c.ok else "FAIL"
            suffix = f"  ({c.detail})" if c.detail and not c.ok else ""
            lines.append(f"{mark}  {c.name}{suffix}")
        return "\n".join(lines)


def validate(m: Model) -> ValidationReport:
    """Check the modal-space axioms on representatives and generators.

    Point-closedness is checked at every explicit point, at inf, and at
    a generic tail point.  Clopen-preservation of the diamond is checked
    on the generator family: singletons, tail clopens co{0..k-1}+inf,
    the empty set and the full space.  Tail rules act by translation, so
    the generator family up to threshold + 2 * maxshift + 2 decides the
    general case; on top of that every diamond application re-checks
    clopenness dynamically.
    """
    checks: List[CheckResult] = []

    if isinstance(m.carrier, FiniteCarrier):
        n = m.carrier.size
        ok = all(0 <= a < n and 0 <= b < n for a, b in m.relation.edges)
        checks.append(CheckResult("edges within carrier", ok))
        checks.append(CheckResult("R(x) closed (discrete)", True))
        checks.append(CheckResult("diamond preserves clopens (discrete)", True))
    else:
        rel = m.relation
        reps = list(range(rel.threshold)) + [rel.threshold + rel.max_shift + 1, INF]
        for x in reps:
            r = successors(m, x)
            checks.append(CheckResult(
                f"R({show_point(x)}) closed", r.is_closed(), r.show()))
        hi = rel.threshold + 2 * rel.max_shift + 2
        generators = [empty_set(OMEGA), full_set(OMEGA)]
        for v in range(hi + 1):
            generators.append(OmegaSet(False, frozenset({v}), False))
            generators.append(OmegaSet(True, frozenset(range(v)), True))
        for U in generators:
            try:
                img = diamond(m, U)
                checks.append(CheckResult(
                    f"diamond clopen on {U.show()}", img.is_clopen(), img.show()))
            except ModalSpaceViolation as e:
                checks.append(CheckResult(f"diamond clopen on {U.show()}", False, str(e)))

    for prop, desc in sorted(m.valuation.items()):
        checks.append(CheckResult(
            f"valuation of {prop!r} clopen", desc.is_clopen(), desc.show()))

    return ValidationReport(checks)


# ---------------------------------------------------------------------------
# model files


def parse_model(text: str) -> Model:
    carrier: Carrier = None
    fin_edges = set()
    omega_edges = set()
    shifts = set()
    tailloop = False
    infloop = False
    valuation: Dict[str, SetDescriptor] = {}
    threshold = 0

    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        head = parts[0]
        try:
            if head == "carrier":
                if parts[1] == "finite":
                    carrier = FiniteCarrier(int(parts[2]))
                elif parts[1] == "omega":
                    if not parts[2].startswith("k="):
                        raise ModelFormatError("expected k=<k>")
                    threshold = int(parts[2][2:])
                    carrier = OMEGA
                else:
                    raise ModelFormatError(f"unknown carrier {parts[1]!r}")
            elif head == "edge":
                a, b = parse_point(parts[1]), parse_point(parts[2])
                if isinstance(carrier, FiniteCarrier):
                    fin_edges.add((a, b))
                else:
                    omega_edges.add((a, b))
            elif head == "shift":
                shifts.add(int(parts[1]))
            elif head == "tailloop":
                tailloop = True
            elif head == "infloop":
                infloop = True
            elif head == "val":
                valuation[parts[1]] = parse_descriptor(carrier, " ".join(parts[2:]))
            else:
                raise ModelFormatError(f"unknown directive {head!r}")
        except ModelFormatError as e:
            raise ModelFormatError(f"line {lineno}: {e}") from None
        except (IndexError, ValueError) as e:
            raise ModelFormatError(f"line {lineno}: {e}") from None

    if carrier is None:
        raise ModelFormatError("missing carrier line")
    if isinstance(carrier, FiniteCarrier):
        relation: Relation = FiniteRelation(frozenset(fin_edges))
    else:
        relation = OmegaRelation(threshold, frozenset(omega_edges),
                                 frozenset(shifts), tailloop, infloop)
    return Model(carrier, relation, valuation)


def load_model(path) -> Model:
    with open(path, "r", encoding="utf-8") as fh:
        return parse_model(fh.read())


def figure_one_model() -> Model:
    """The descending chain on the naturals with a loop at inf and the
    proposition p true exactly at 0."""
    rel = OmegaRelation(0, frozenset(), frozenset({-1}), False, True)
    return Model(OMEGA, rel, {"p": OmegaSet(False, frozenset({0}), False)})


def two_way_chain_model() -> Model:
    """Shifts by +1 and -1 with a loop at inf; p true exactly at 0."""
    rel = OmegaRelation(0, frozenset(), frozenset({1, -1}), False, True)
    return Model(OMEGA, rel, {"p": OmegaSet(False, frozenset({0}), False)})
