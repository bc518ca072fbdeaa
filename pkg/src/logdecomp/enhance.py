"""Transverse pre-logarithmic maps: node invariants, pre-log checks, base order, the group G and enhancement counts."""

from __future__ import annotations

from collections.abc import Mapping, Sequence
from dataclasses import dataclass
from enum import Enum
from fractions import Fraction
from functools import reduce
from itertools import product
from math import gcd, lcm, prod
from typing import Any

import attrs
import networkx as nx
import structlog

from .complex import ZERO_CELL, BaseMap, Cell, ConeComplex, FaceMap
from .config import get_settings
from .curve import CombType, Edge, Graph, Leg
from .errors import ArgumentError, StructuralError
from .lattice import Cone
from .linalg import IntMatrix, Vector, dot, integral_length, primitive, smith_normal_form

logger = structlog.get_logger("logdecomp.enhance")


class TorsorFlag(str, Enum):
    YES = "yes"
    NO = "no"
    AUTO = "auto"


class TorsorStatus(str, Enum):
    YES = "yes"
    NO = "no"
    UNKNOWN = "unknown"


class Verdict(str, Enum):
    COUNTED = "counted"
    TORSOR_EMPTY = "torsor-empty"
    REFUSED = "refused"
    INVALID = "invalid"


def _vec(value: Sequence[int]) -> Vector:
    return tuple(int(x) for x in value)


@attrs.frozen
class Component:
    """Irreducible component of the domain, mapping onto the central-fibre component ``target``."""

    id: str
    multiplicity: int
    genus: int = 0
    target: str | None = None

    @property
    def target_id(self) -> str:
        return self.target if self.target is not None else self.id


@attrs.frozen
class ConstrainedNode:
    """Node mapping to a double locus, in a rank-2 chart: P_q = ⟨m1, m2⟩ with ρ_q ∈ P_q."""

    id: str
    branches: tuple[str, str] = attrs.field(converter=tuple)
    m1: Vector = attrs.field(converter=_vec)
    m2: Vector = attrs.field(converter=_vec)
    rho: Vector = attrs.field(converter=_vec)
    w: tuple[int, int] = attrs.field(converter=tuple)


@attrs.frozen
class FreeNode:
    """Node mapping to the smooth locus of a single central-fibre component."""

    id: str
    branches: tuple[str, str] = attrs.field(converter=tuple)


@attrs.frozen
class ConstrainedMarking:
    """Marked point on ``component`` meeting a horizontal divisor with contact w1."""

    id: str
    component: str
    m1: Vector = attrs.field(converter=_vec)
    m2: Vector = attrs.field(converter=_vec)
    w1: int
    rho: Vector | None = attrs.field(default=None, converter=attrs.converters.optional(_vec))
    smooth_point: bool = True


@attrs.frozen
class FreeMarking:
    id: str
    component: str


@attrs.frozen
class TransverseMapData:
    components: tuple[Component, ...] = attrs.field(converter=tuple)
    nodes: tuple[ConstrainedNode, ...] = attrs.field(converter=tuple, factory=tuple)
    free_nodes: tuple[FreeNode, ...] = attrs.field(converter=tuple, factory=tuple)
    markings: tuple[ConstrainedMarking, ...] = attrs.field(converter=tuple, factory=tuple)
    free_markings: tuple[FreeMarking, ...] = attrs.field(converter=tuple, factory=tuple)
    torsor: TorsorFlag = attrs.field(default=TorsorFlag.AUTO, converter=TorsorFlag)
    markings_complete: bool = True

    def component(self, component_id: str) -> Component:
        for c in self.components:
            if c.id == component_id:
                return c
        raise StructuralError(f"unknown component {component_id!r}")

    def validate(self) -> None:
        """Raise on malformed data: unknown ids, nonpositive weights, bad charts, disconnected curves."""
        ids = [c.id for c in self.components]
        if len(set(ids)) != len(ids):
            raise StructuralError("duplicate component ids")
        targets: dict[str, int] = {}
        for c in self.components:
            if c.multiplicity <= 0 or c.genus < 0:
                raise StructuralError(f"component {c.id!r} needs positive multiplicity and nonnegative genus")
            previous = targets.setdefault(c.target_id, c.multiplicity)
            if previous != c.multiplicity:
                raise StructuralError(f"components over target {c.target_id!r} disagree on its multiplicity")
        for node in self.nodes:
            for branch in node.branches:
                self.component(branch)
            if len(node.w) != 2 or min(node.w) <= 0:
                raise StructuralError(f"node {node.id!r} needs two positive weights")
            node_invariants(node)
        for free in self.free_nodes:
            a, b = (self.component(x) for x in free.branches)
            if a.target_id != b.target_id:
                raise StructuralError(f"free node {free.id!r} joins components over different targets")
        for marking in self.markings:
            self.component(marking.component)
            if marking.w1 <= 0:
                raise StructuralError(f"marking {marking.id!r} needs a positive contact order")
            marking_invariants(marking, self.component(marking.component).multiplicity)
        for marking in self.free_markings:
            self.component(marking.component)
        if not self.dual_graph().number_of_nodes() or not nx.is_connected(self.dual_graph()):
            raise StructuralError("dual graph of the domain is not connected")

    def dual_graph(self) -> nx.MultiGraph:
        g = nx.MultiGraph()
        g.add_nodes_from(c.id for c in self.components)
        for node in (*self.nodes, *self.free_nodes):
            g.add_edge(*node.branches, key=node.id)
        return g


# ---------------------------------------------------------------------------
# Rank-2 charts
# ---------------------------------------------------------------------------


def _perp(m: Vector, other: Vector) -> Vector:
    n = primitive((-m[1], m[0]))
    return n if dot(n, other) > 0 else (-n[0], -n[1])


def dual_primitives(m1: Sequence[int], m2: Sequence[int]) -> tuple[Vector, Vector]:
    """Extremal primitives n1 ⊥ m1, n2 ⊥ m2 of the dual cone."""
    a, b = _vec(m1), _vec(m2)
    if len(a) != 2 or len(b) != 2:
        raise StructuralError("node monoids are given in a rank-2 chart")
    if integral_length(a) != 1 or integral_length(b) != 1:
        raise StructuralError(f"extremal generators {list(a)}, {list(b)} must be primitive")
    if a[0] * b[1] - a[1] * b[0] == 0:
        raise StructuralError("extremal generators are parallel; the monoid is not strictly convex of rank 2")
    return _perp(a, b), _perp(b, a)


@dataclass(slots=True, frozen=True)
class NodeInvariants:
    n1: Vector
    n2: Vector
    index: int
    mu1: int
    mu2: int
    rho_length: int
    lam: Fraction | None

    def to_dict(self) -> dict[str, Any]:
        return {
            "n1": list(self.n1),
            "n2": list(self.n2),
            "index": self.index,
            "mu": [self.mu1, self.mu2],
            "rho_length": self.rho_length,
            "lambda": self.lam,
        }


def _chart_invariants(m1: Vector, m2: Vector, rho: Vector) -> NodeInvariants:
    n1, n2 = dual_primitives(m1, m2)
    index = dot(n1, m2)
    if dot(n2, m1) != index:
        raise ArithmeticError("⟨n1, m2⟩ and ⟨n2, m1⟩ disagree")
    if not any(rho):
        raise StructuralError("ρ must be nonzero")
    mu1, mu2 = dot(n1, rho), dot(n2, rho)
    if mu1 < 0 or mu2 < 0:
        raise StructuralError(f"ρ = {list(rho)} is outside the monoid ⟨{list(m1)}, {list(m2)}⟩")
    length = integral_length(rho)
    lam = Fraction(length * index, mu1 * mu2) if mu1 and mu2 else None
    return NodeInvariants(n1=n1, n2=n2, index=index, mu1=mu1, mu2=mu2, rho_length=length, lam=lam)


def node_invariants(node: ConstrainedNode) -> NodeInvariants:
    inv = _chart_invariants(node.m1, node.m2, node.rho)
    if inv.mu1 == 0 or inv.mu2 == 0:
        raise StructuralError(f"ρ of node {node.id!r} must lie in the interior of its monoid")
    return inv


def index_and_length(node: ConstrainedNode) -> tuple[int, Fraction]:
    """(Ind_q, λ(q)) with λ(q) = ℓ(ρ_q)·Ind_q/(μ1μ2)."""
    inv = node_invariants(node)
    assert inv.lam is not None
    return inv.index, inv.lam


def chart_identities(node: ConstrainedNode) -> list[str]:
    """Names of the rank-2 identities that fail for ``node``; empty on valid data."""
    inv = node_invariants(node)
    failed = []
    lhs = tuple(inv.index * x for x in node.rho)
    rhs = tuple(inv.mu2 * a + inv.mu1 * b for a, b in zip(node.m1, node.m2, strict=True))
    if lhs != rhs:
        failed.append("index·ρ = μ2·m1 + μ1·m2")
    if (dot(inv.n1, node.rho), dot(inv.n2, node.rho)) != (inv.mu1, inv.mu2):
        failed.append("μi = ⟨ni, ρ⟩")
    if inv.lam != Fraction(inv.rho_length * inv.index, inv.mu1 * inv.mu2):
        failed.append("λ = ℓ(ρ)·index/(μ1μ2)")
    return failed


def node_from_chart(node_id: str, branches: tuple[str, str], r: int, s: int, a: int, c: int, w: Sequence[int]) -> ConstrainedNode:
    """Node in the standard chart m1 = (1,0), m2 = (r,s), ρ = (a,c); then μ1 = c, μ2 = as − cr, Ind = s."""
    return ConstrainedNode(id=node_id, branches=branches, m1=(1, 0), m2=(r, s), rho=(a, c), w=tuple(w))


@dataclass(slots=True, frozen=True)
class MarkingInvariants:
    n1: Vector
    n2: Vector
    index: int
    mu1: int
    mu2: int
    rho: Vector


def marking_invariants(marking: ConstrainedMarking, multiplicity: int | None = None) -> MarkingInvariants:
    """Invariants of a marking chart; ρ_p defaults to μ1·m2/Ind_p."""
    n1, n2 = dual_primitives(marking.m1, marking.m2)
    index = dot(n1, marking.m2)
    if marking.rho is not None:
        rho = marking.rho
    else:
        if multiplicity is None:
            raise StructuralError(f"marking {marking.id!r} needs ρ or the component multiplicity")
        scaled = [multiplicity * x for x in marking.m2]
        if any(x % index for x in scaled):
            raise StructuralError(f"μ1·m2 is not divisible by the index at marking {marking.id!r}")
        rho = tuple(x // index for x in scaled)
    return MarkingInvariants(n1=n1, n2=n2, index=index, mu1=dot(n1, rho), mu2=dot(n2, rho), rho=rho)


def _marking(d: TransverseMapData, marking: ConstrainedMarking) -> MarkingInvariants:
    return marking_invariants(marking, d.component(marking.component).multiplicity)


# ---------------------------------------------------------------------------
# Pre-log conditions
# ---------------------------------------------------------------------------


@dataclass(slots=True, frozen=True)
class PrelogVerdict:
    element: str
    kind: str
    valid: bool
    reasons: tuple[str, ...] = ()


@dataclass(slots=True, frozen=True)
class PrelogReport:
    verdicts: tuple[PrelogVerdict, ...]

    @property
    def valid(self) -> bool:
        return all(v.valid for v in self.verdicts)

    def reasons(self) -> list[str]:
        return [f"{v.kind} {v.element}: {r}" for v in self.verdicts for r in v.reasons]

    def to_dict(self) -> dict[str, Any]:
        return {
            "valid": self.valid,
            "verdicts": [
                {"element": v.element, "kind": v.kind, "valid": v.valid, "reasons": list(v.reasons)} for v in self.verdicts
            ],
        }


def reduced_branching_order(node: ConstrainedNode) -> Fraction:
    """w̄_q = (w1/μ1)·ℓ(ρ_q)."""
    inv = node_invariants(node)
    return Fraction(node.w[0], inv.mu1) * inv.rho_length


def _node_reasons(d: TransverseMapData, node: ConstrainedNode) -> list[str]:
    inv = node_invariants(node)
    first, second = (d.component(b) for b in node.branches)
    reasons = []
    if first.target_id == second.target_id:
        reasons.append("both branches map to the same component")
    if inv.mu1 != first.multiplicity or inv.mu2 != second.multiplicity:
        reasons.append(
            f"chart multiplicities ({inv.mu1}, {inv.mu2}) differ from component multiplicities "
            f"({first.multiplicity}, {second.multiplicity})"
        )
    w1, w2 = node.w
    if inv.mu1 * w2 != inv.mu2 * w1:
        reasons.append(f"μ1·w2 = {inv.mu1 * w2} differs from μ2·w1 = {inv.mu2 * w1}")
    elif reduced_branching_order(node).denominator != 1:
        reasons.append(f"reduced branching order {reduced_branching_order(node)} is not integral")
    return reasons


def _marking_reasons(d: TransverseMapData, marking: ConstrainedMarking) -> list[str]:
    inv = _marking(d, marking)
    reasons = []
    if not marking.smooth_point or inv.mu2 != 0:
        reasons.append("marking does not map to a smooth point of the central fibre")
    if inv.mu1 != d.component(marking.component).multiplicity:
        reasons.append(f"chart multiplicity {inv.mu1} differs from the component multiplicity")
    if marking.w1 % inv.index:
        reasons.append(f"index {inv.index} does not divide w1 = {marking.w1}")
    return reasons


def check_prelog(d: TransverseMapData) -> PrelogReport:
    """Per node and constrained marking, whether the pre-log integrality conditions hold."""
    d.validate()
    verdicts = []
    for node in d.nodes:
        reasons = _node_reasons(d, node)
        verdicts.append(PrelogVerdict(node.id, "node", not reasons, tuple(reasons)))
    for marking in d.markings:
        reasons = _marking_reasons(d, marking)
        verdicts.append(PrelogVerdict(marking.id, "marking", not reasons, tuple(reasons)))
    return PrelogReport(tuple(verdicts))


def _require_prelog(d: TransverseMapData) -> None:
    report = check_prelog(d)
    if not report.valid:
        raise ArgumentError("transverse data is not pre-logarithmic", data={"reasons": report.reasons()})


def node_contact_order(node: ConstrainedNode) -> tuple[Vector, int]:
    """u_q = (w1·n2 − w2·n1)/Ind_q and its integral length."""
    inv = node_invariants(node)
    w1, w2 = node.w
    if inv.mu1 * w2 != inv.mu2 * w1:
        raise ArgumentError(f"node {node.id!r} violates μ1·w2 = μ2·w1")
    numerator = tuple(w1 * b - w2 * a for a, b in zip(inv.n1, inv.n2, strict=True))
    if any(x % inv.index for x in numerator):
        raise ArithmeticError(f"contact order of node {node.id!r} is not integral")
    u = tuple(x // inv.index for x in numerator)
    return u, integral_length(u)


def marking_contact_order(d: TransverseMapData, marking: ConstrainedMarking) -> Vector:
    """u_p = (w1/Ind_p)·n2."""
    inv = _marking(d, marking)
    if marking.w1 % inv.index:
        raise ArgumentError(f"index does not divide w1 at marking {marking.id!r}")
    return tuple(marking.w1 // inv.index * x for x in inv.n2)


# ---------------------------------------------------------------------------
# Base order, edge lengths and the group G
# ---------------------------------------------------------------------------


def _touched(d: TransverseMapData) -> list[Component]:
    used = {b for node in (*d.nodes, *d.free_nodes) for b in node.branches}
    used |= {m.component for m in (*d.markings, *d.free_markings)}
    return [c for c in d.components if c.id in used] or list(d.components)


def base_order(d: TransverseMapData) -> int:
    """lcm of the touched multiplicities and μ1·w2/gcd(Ind, μ1·w2) over constrained nodes."""
    _require_prelog(d)
    terms = [c.multiplicity for c in _touched(d)]
    for node in d.nodes:
        inv = node_invariants(node)
        q = inv.mu1 * node.w[1]
        terms.append(q // gcd(inv.index, q))
    return reduce(lcm, terms, 1)


def edge_lengths(d: TransverseMapData, b: int | None = None) -> dict[str, int]:
    """e_q = b·Ind_q/(μ1·w2) per constrained node."""
    b = b if b is not None else base_order(d)
    lengths = {}
    for node in d.nodes:
        inv = node_invariants(node)
        value = Fraction(b * inv.index, inv.mu1 * node.w[1])
        if value.denominator != 1:
            raise ArithmeticError(f"edge length of node {node.id!r} is not integral for base order {b}")
        lengths[node.id] = int(value)
    return lengths


@dataclass(slots=True, frozen=True)
class GroupOrder:
    order: int
    domain: tuple[int, ...]
    codomain: tuple[int, ...]
    brute_force: int | None = None
    elements: tuple[tuple[int, ...], ...] | None = None

    def to_dict(self) -> dict[str, Any]:
        return {
            "order": self.order,
            "domain": list(self.domain),
            "codomain": list(self.codomain),
            "brute_force": self.brute_force,
        }


def _boundary(d: TransverseMapData) -> tuple[list[int], list[int], list[list[int]]]:
    components = [c.id for c in d.components]
    position = {c: i for i, c in enumerate(components)}
    mus = [c.multiplicity for c in d.components]
    lengths = []
    rows = []
    for node in d.nodes:
        ell = node_invariants(node).rho_length
        row = [0] * len(components)
        a, b = (position[x] for x in node.branches)
        for i in (a, b):
            if mus[i] % ell:
                raise ArithmeticError(f"ℓ(ρ) = {ell} does not divide the multiplicity at node {node.id!r}")
        row[a] += 1
        row[b] -= 1
        lengths.append(ell)
        rows.append(row)
    return mus, lengths, rows


def _kernel_elements(mus: Sequence[int], lengths: Sequence[int], rows: Sequence[Sequence[int]]) -> list[tuple[int, ...]]:
    return [
        a
        for a in product(*(range(m) for m in mus))
        if all(dot(row, a) % ell == 0 for row, ell in zip(rows, lengths, strict=True))
    ]


def group_order(d: TransverseMapData, *, with_elements: bool = False, limit: int | None = None) -> GroupOrder:
    """|ker ∂| for ∂: ∏ ℤ/μ_η → ∏ ℤ/ℓ(ρ_q), (a_η) ↦ (a_η(q) − a_η′(q) mod ℓ(ρ_q)).

    The order is read off the Smith form of [∂ | diag ℓ]; small domains are
    also enumerated and must agree.
    """
    mus, lengths, rows = _boundary(d)
    domain = prod(mus)
    if rows:
        columns = len(mus) + len(rows)
        matrix = IntMatrix.from_rows(
            [[*row, *(ell if j == i else 0 for j in range(len(rows)))] for i, (row, ell) in enumerate(zip(rows, lengths, strict=True))],
            ncols=columns,
        )
        cokernel = prod(abs(x) for x in smith_normal_form(matrix).diagonal if x)
        order = Fraction(domain * cokernel, prod(lengths))
        if order.denominator != 1:
            raise ArithmeticError("kernel order is not an integer")
        value = int(order)
    else:
        value = domain
    cap = limit if limit is not None else get_settings().lattice.group_bruteforce_limit
    brute = None
    elements = None
    if domain <= cap:
        found = _kernel_elements(mus, lengths, rows)
        brute = len(found)
        if brute != value:
            raise ArithmeticError(f"Smith-form kernel order {value} disagrees with enumeration {brute}")
        if with_elements:
            elements = tuple(found)
    logger.debug("group.order", order=value, domain=domain, brute_force=brute)
    return GroupOrder(order=value, domain=tuple(mus), codomain=tuple(lengths), brute_force=brute, elements=elements)


def torsor_nonempty(d: TransverseMapData) -> TorsorStatus:
    """Yes for reduced central fibres or rational tree-shaped domains; otherwise the user's flag."""
    if all(c.multiplicity == 1 for c in d.components):
        return TorsorStatus.YES
    edges = len(d.nodes) + len(d.free_nodes)
    if all(c.genus == 0 for c in d.components) and edges == len(d.components) - 1 and nx.is_connected(d.dual_graph()):
        return TorsorStatus.YES
    if d.torsor is TorsorFlag.AUTO:
        return TorsorStatus.UNKNOWN
    return TorsorStatus(d.torsor.value)


@dataclass(slots=True, frozen=True)
class EnhancementCount:
    verdict: Verdict
    count: int | None
    reason: str = ""

    def to_dict(self) -> dict[str, Any]:
        return {"verdict": self.verdict.value, "count": self.count, "reason": self.reason}


def enhancement_count(d: TransverseMapData) -> EnhancementCount:
    """|G|/b · ∏ w̄_q, or a verdict explaining why no count is given."""
    prelog = check_prelog(d)
    if not prelog.valid:
        return EnhancementCount(Verdict.INVALID, None, "; ".join(prelog.reasons()))
    if not d.markings_complete:
        return EnhancementCount(Verdict.REFUSED, None, "markings are not attested to cover the smooth preimages of the singular locus")
    status = torsor_nonempty(d)
    if status is TorsorStatus.UNKNOWN:
        return EnhancementCount(Verdict.REFUSED, None, "torsor status is unknown; set the torsor flag to yes or no")
    if status is TorsorStatus.NO:
        return EnhancementCount(Verdict.TORSOR_EMPTY, 0, "the torsor of compatible root choices has no section")
    b = base_order(d)
    g = group_order(d).order
    product_w = prod((reduced_branching_order(node) for node in d.nodes), start=Fraction(1))
    count = Fraction(g, b) * product_w
    if count.denominator != 1 or count <= 0:
        raise ArithmeticError(f"enhancement count {count} is not a positive integer")
    return EnhancementCount(Verdict.COUNTED, int(count))


# ---------------------------------------------------------------------------
# Reports
# ---------------------------------------------------------------------------


@dataclass(slots=True, frozen=True)
class NodeReport:
    id: str
    invariants: NodeInvariants
    contact_order: Vector | None
    contact_length: int | None
    reduced_order: Fraction | None
    edge_length: int | None

    def to_dict(self) -> dict[str, Any]:
        return {
            "id": self.id,
            **self.invariants.to_dict(),
            "u": list(self.contact_order) if self.contact_order is not None else None,
            "u_length": self.contact_length,
            "w_bar": self.reduced_order,
            "e": self.edge_length,
        }


@dataclass(slots=True, frozen=True)
class EnhancementReport:
    nodes: tuple[NodeReport, ...]
    markings: Mapping[str, Vector | None]
    prelog: PrelogReport
    base_order: int | None
    group: GroupOrder
    torsor: TorsorStatus
    result: EnhancementCount

    def to_dict(self) -> dict[str, Any]:
        return {
            "nodes": [n.to_dict() for n in self.nodes],
            "markings": {k: (list(v) if v is not None else None) for k, v in self.markings.items()},
            "prelog": self.prelog.to_dict(),
            "base_order": self.base_order,
            "group": self.group.to_dict(),
            "torsor": self.torsor.value,
            **self.result.to_dict(),
        }


def enhancement_report(d: TransverseMapData) -> EnhancementReport:
    """Every intermediate of the enhancement count."""
    prelog = check_prelog(d)
    valid = {v.element for v in prelog.verdicts if v.valid}
    b = base_order(d) if prelog.valid else None
    lengths = edge_lengths(d, b) if b is not None else {}
    nodes = []
    for node in d.nodes:
        inv = node_invariants(node)
        failed = chart_identities(node)
        if failed:
            raise ArithmeticError(f"rank-2 identities fail at node {node.id!r}: {failed}")
        u, ell = node_contact_order(node) if node.id in valid else (None, None)
        w_bar = reduced_branching_order(node) if node.id in valid else None
        if w_bar is not None and ell != w_bar:
            raise ArithmeticError(f"ℓ(u_q) = {ell} differs from w̄_q = {w_bar} at node {node.id!r}")
        nodes.append(NodeReport(node.id, inv, u, ell, w_bar, lengths.get(node.id)))
    markings = {m.id: (marking_contact_order(d, m) if m.id in valid else None) for m in d.markings}
    return EnhancementReport(
        nodes=tuple(nodes),
        markings=markings,
        prelog=prelog,
        base_order=b,
        group=group_order(d),
        torsor=torsor_nonempty(d),
        result=enhancement_count(d),
    )


# ---------------------------------------------------------------------------
# The tropical type forced by a transverse map
# ---------------------------------------------------------------------------


def _column(v: Vector) -> IntMatrix:
    return IntMatrix.from_columns([v], len(v))


def transverse_type(d: TransverseMapData) -> tuple[ConeComplex, BaseMap, CombType]:
    """Complex, base map and combinatorial type of a pre-log transverse map."""
    _require_prelog(d)
    cells = [Cell(ZERO_CELL, Cone.from_generators(0, []))]
    face_maps: list[FaceMap] = []
    covectors: dict[str, Vector] = {ZERO_CELL: ()}
    empty = IntMatrix.zeros(1, 0)
    for target in dict.fromkeys(c.target_id for c in d.components):
        cell_id = f"D:{target}"
        mu = next(c.multiplicity for c in d.components if c.target_id == target)
        cells.append(Cell(cell_id, Cone.orthant(1)))
        face_maps.append(FaceMap(ZERO_CELL, cell_id, empty))
        covectors[cell_id] = (mu,)

    edges: list[Edge] = []
    edge_cells: dict[str, str] = {}
    edge_u: dict[str, Vector] = {}
    for node in d.nodes:
        inv = node_invariants(node)
        cell_id = f"q:{node.id}"
        first, second = (d.component(b) for b in node.branches)
        cells.append(Cell(cell_id, Cone.from_generators(2, [inv.n1, inv.n2])))
        face_maps.append(FaceMap(f"D:{first.target_id}", cell_id, _column(inv.n1)))
        face_maps.append(FaceMap(f"D:{second.target_id}", cell_id, _column(inv.n2)))
        covectors[cell_id] = node.rho
        edges.append(Edge(node.id, first.id, second.id))
        edge_cells[node.id] = cell_id
        edge_u[node.id] = node_contact_order(node)[0]
    for free in d.free_nodes:
        edges.append(Edge(free.id, *free.branches))
        edge_cells[free.id] = f"D:{d.component(free.branches[0]).target_id}"
        edge_u[free.id] = (0,)

    legs: list[Leg] = []
    leg_cells: dict[str, str] = {}
    leg_u: dict[str, Vector] = {}
    for marking in d.markings:
        inv = _marking(d, marking)
        cell_id = f"p:{marking.id}"
        horizontal = f"H:{marking.id}"
        component = d.component(marking.component)
        cells.append(Cell(horizontal, Cone.orthant(1)))
        cells.append(Cell(cell_id, Cone.from_generators(2, [inv.n1, inv.n2])))
        face_maps.append(FaceMap(ZERO_CELL, horizontal, empty))
        face_maps.append(FaceMap(f"D:{component.target_id}", cell_id, _column(inv.n1)))
        face_maps.append(FaceMap(horizontal, cell_id, _column(inv.n2)))
        covectors[horizontal] = (0,)
        covectors[cell_id] = inv.rho
        legs.append(Leg(marking.id, component.id))
        leg_cells[marking.id] = cell_id
        leg_u[marking.id] = marking_contact_order(d, marking)
    for marking in d.free_markings:
        component = d.component(marking.component)
        legs.append(Leg(marking.id, component.id))
        leg_cells[marking.id] = f"D:{component.target_id}"
        leg_u[marking.id] = (0,)

    complex_ = ConeComplex(cells, face_maps)
    t = CombType(
        graph=Graph(vertices=[c.id for c in d.components], edges=edges, legs=legs),
        genera={c.id: c.genus for c in d.components},
        vertex_cells={c.id: f"D:{c.target_id}" for c in d.components},
        edge_cells=edge_cells,
        edge_u=edge_u,
        leg_cells=leg_cells,
        leg_u=leg_u,
    )
    return complex_, BaseMap(covectors), t
