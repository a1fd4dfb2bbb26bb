"""
Exhaustive enumeration of every (matching, retention mask) pair on a tiny
configuration model.

PURPOSE:
    Ground truth for the exploration and Monte Carlo code. Nothing here
    imports the graph or exploration packages: pairing, simplicity and
    components are recomputed from scratch.

DESIGN:
    Matchings are listed by always pairing the lowest unpaired stub, which
    visits each of the (dn-1)!! perfect matchings once. Matchings are
    collapsed to their vertex multigraph (sorted edge list) with integer
    multiplicities; each distinct multigraph is then swept over its 2^E
    retention masks, accumulating integer counts per retained-edge count k.
    Probabilities come out as sum_k count_k p^k (1-p)^(E-k) / total, exact
    whenever p is rational. The first pairing choice is the unit of work
    for the process pool; merges are integer additions, so the result does
    not depend on worker count.
"""

from __future__ import annotations

import logging
from collections import Counter
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from fractions import Fraction
from numbers import Rational
from typing import Iterator

import networkx as nx

from src.config import settings
from src.errors import InfeasibleParametersError, OracleSizeError
from src.schemas import ExactDistributionRecord, ExhaustiveRecord

logger = logging.getLogger("regulus")

Edges = tuple[tuple[int, int], ...]


# ---------------------------------------------------------------------------
# Matchings
# ---------------------------------------------------------------------------


def _check_size(n: int, d: int) -> None:
    if n < 1 or d < 1:
        raise InfeasibleParametersError("need n >= 1 and d >= 1")
    if (n * d) % 2:
        raise InfeasibleParametersError(f"dn = {n * d} is odd")
    if n * d > settings.ORACLE_MAX_STUBS:
        raise OracleSizeError(
            f"dn = {n * d} exceeds the enumeration cap {settings.ORACLE_MAX_STUBS}"
        )


def _complete(free: list[int]) -> Iterator[list[tuple[int, int]]]:
    if not free:
        yield []
        return
    a = free[0]
    for idx in range(1, len(free)):
        b = free[idx]
        rest = free[1:idx] + free[idx + 1 :]
        for tail in _complete(rest):
            yield [(a, b), *tail]


def enumerate_matchings(n: int, d: int) -> Iterator[list[tuple[int, int]]]:
    """Every perfect matching of the dn stubs, as stub pairs (lo, hi)."""
    _check_size(n, d)
    yield from _complete(list(range(n * d)))


def _multigraph(pairs: list[tuple[int, int]], d: int) -> Edges:
    return tuple(sorted(tuple(sorted((a // d, b // d))) for a, b in pairs))


def _simple(edges: Edges) -> bool:
    if any(u == v for u, v in edges):
        return False
    return len(set(edges)) == len(edges)


def _census_from(first_partner: int, n: int, d: int) -> Counter:
    """Multigraph multiplicities over matchings that pair stub 0 with first_partner."""
    rest = [s for s in range(1, n * d) if s != first_partner]
    census: Counter = Counter()
    for tail in _complete(rest):
        census[_multigraph([(0, first_partner), *tail], d)] += 1
    return census


def multigraph_census(n: int, d: int, workers: int | None = None) -> Counter:
    """Number of matchings inducing each vertex multigraph."""
    _check_size(n, d)
    partners = list(range(1, n * d))
    workers = workers or 1
    census: Counter = Counter()
    if workers <= 1 or len(partners) <= 1:
        for b in partners:
            census.update(_census_from(b, n, d))
        return census
    with ProcessPoolExecutor(max_workers=workers) as pool:
        for part in pool.map(_census_from, partners, [n] * len(partners), [d] * len(partners)):
            census.update(part)
    return census


# ---------------------------------------------------------------------------
# Components
# ---------------------------------------------------------------------------


def _component_sizes(n: int, edges: Edges, mask: int) -> tuple[int, int]:
    """(size of vertex 0's component, largest component size) under a mask."""
    adjacency: list[list[int]] = [[] for _ in range(n)]
    for idx, (u, v) in enumerate(edges):
        if mask >> idx & 1:
            adjacency[u].append(v)
            adjacency[v].append(u)
    label = [-1] * n
    sizes: list[int] = []
    for root in range(n):
        if label[root] >= 0:
            continue
        label[root] = len(sizes)
        stack, size = [root], 0
        while stack:
            x = stack.pop()
            size += 1
            for y in adjacency[x]:
                if label[y] < 0:
                    label[y] = label[root]
                    stack.append(y)
        sizes.append(size)
    return sizes[0], max(sizes)


# ---------------------------------------------------------------------------
# Distributions
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class ExactDistribution:
    """Distribution on positive integer sizes."""

    probabilities: dict[int, Fraction | float]
    exact: bool

    @property
    def support(self) -> list[int]:
        return sorted(self.probabilities)

    @property
    def total_mass(self) -> Fraction | float:
        return sum(self.probabilities.values(), Fraction(0) if self.exact else 0.0)

    def tail(self, threshold: float) -> Fraction | float:
        """P(size > threshold)."""
        zero = Fraction(0) if self.exact else 0.0
        return sum((q for s, q in self.probabilities.items() if s > threshold), zero)

    def mean(self) -> Fraction | float:
        zero = Fraction(0) if self.exact else 0.0
        return sum((s * q for s, q in self.probabilities.items()), zero)

    def to_record(self) -> ExactDistributionRecord:
        return ExactDistributionRecord(
            support=self.support,
            probabilities=[_fmt(self.probabilities[s]) for s in self.support],
            total_mass=_fmt(self.total_mass),
            exact=self.exact,
        )


def _fmt(value: Fraction | float) -> str:
    if isinstance(value, Fraction):
        return str(value)
    return f"{value:.{settings.FLOAT_DIGITS}g}"


@dataclass(frozen=True)
class ExhaustiveResult:
    n: int
    d: int
    p: Fraction | float
    condition_on_simple: bool
    matchings: int
    simple_matchings: int
    component_of_start: ExactDistribution
    max_component: ExactDistribution

    @property
    def p_simple(self) -> Fraction:
        return Fraction(self.simple_matchings, self.matchings)

    def to_record(self) -> ExhaustiveRecord:
        return ExhaustiveRecord(
            n=self.n,
            d=self.d,
            p=_fmt(self.p),
            condition_on_simple=self.condition_on_simple,
            p_simple=str(self.p_simple),
            component_of_start=self.component_of_start.to_record(),
            max_component=self.max_component.to_record(),
        )


def exhaustive_small_graph(
    n: int,
    d: int,
    p,
    condition_on_simple: bool = False,
    workers: int | None = None,
) -> ExhaustiveResult:
    """
    Exact laws of |C(v0)| (v0 = vertex 0) and |C_max| under bond percolation
    with retention p, optionally conditioned on the multigraph being simple.
    """
    if not 0 <= p <= 1:
        raise InfeasibleParametersError(f"p = {p} outside [0, 1]")
    exact = isinstance(p, Rational)
    p = Fraction(p) if exact else float(p)
    census = multigraph_census(n, d, workers)
    total = sum(census.values())
    simple_total = sum(w for g, w in census.items() if _simple(g))
    logger.info(
        f"enumerated {total} matchings ({len(census)} multigraphs, {simple_total} simple) "
        f"for n={n} d={d}"
    )
    if condition_on_simple:
        if simple_total == 0:
            raise InfeasibleParametersError(f"no simple {d}-regular graph on {n} vertices")
        census = Counter({g: w for g, w in census.items() if _simple(g)})

    edge_count = n * d // 2
    start_counts: dict[int, list[int]] = {}
    max_counts: dict[int, list[int]] = {}
    for edges, weight in census.items():
        for mask in range(1 << edge_count):
            k = mask.bit_count()
            start_size, max_size = _component_sizes(n, edges, mask)
            start_counts.setdefault(start_size, [0] * (edge_count + 1))[k] += weight
            max_counts.setdefault(max_size, [0] * (edge_count + 1))[k] += weight

    denominator = simple_total if condition_on_simple else total
    powers = [p**k * (1 - p) ** (edge_count - k) for k in range(edge_count + 1)]

    def collapse(counts: dict[int, list[int]]) -> ExactDistribution:
        probs = {}
        for size, by_k in counts.items():
            mass = sum(c * w for c, w in zip(by_k, powers))
            probs[size] = mass / denominator if exact else float(mass) / denominator
            if not probs[size]:
                del probs[size]
        return ExactDistribution(probabilities=probs, exact=exact)

    return ExhaustiveResult(
        n=n,
        d=d,
        p=p,
        condition_on_simple=condition_on_simple,
        matchings=total,
        simple_matchings=simple_total,
        component_of_start=collapse(start_counts),
        max_component=collapse(max_counts),
    )


def multigraph_connectivity_probability(n: int, d: int) -> Fraction:
    """Fraction of matchings whose full multigraph is connected, via networkx."""
    census = multigraph_census(n, d)
    connected = 0
    for edges, weight in census.items():
        graph = nx.MultiGraph()
        graph.add_nodes_from(range(n))
        graph.add_edges_from(edges)
        if nx.is_connected(graph):
            connected += weight
    return Fraction(connected, sum(census.values()))
