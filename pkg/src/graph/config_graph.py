"""
Configuration-model multigraphs with p-bond percolation.

PURPOSE:
    Sample uniform perfect matchings of the dn stubs, test simplicity, attach a
    retention mask (one bit per pair) and compute the retained-edge component
    structure with a disjoint-set forest. The component structure is the
    reference the exploration process is validated against.

DESIGN:
    Stub (v, i) has flat id v*d + i.
    Matchings are immutable numpy-backed dataclasses; a mask is attached by
    returning a new Matching, never by mutation.
    Self-loops and multi-edges are kept everywhere; simplicity is a filter
    (rejection via tenacity), never a repair.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field, replace
from pathlib import Path

import numpy as np
from tenacity import RetryError, Retrying, retry_if_result, stop_after_attempt

from src.config import settings
from src.errors import IncompleteMatchingError, InfeasibleParametersError
from src.graph.kernels import UNMATCHED, pair_stubs
from src.graph.union_find import UnionFind
from src.schemas import Params
from src.shared.streams import RandomStream
from src.utils.metrics import SIMPLE_REJECTIONS

logger = logging.getLogger("regulus")


def stub_id(vertex: int, slot: int, d: int) -> int:
    return vertex * d + slot


def stub_vertex(stub: int, d: int) -> int:
    return stub // d


def stub_slot(stub: int, d: int) -> int:
    return stub % d


@dataclass(frozen=True)
class Matching:
    """
    Pairing of the dn stubs plus an optional percolation mask.

    partner[s] is the stub matched to s, or UNMATCHED.
    pair_of[s] indexes the pair containing s; retained[k] is pair k's bit.
    """

    n: int
    d: int
    partner: np.ndarray
    pair_of: np.ndarray
    retained: np.ndarray | None = field(default=None)

    def __post_init__(self):
        if len(self.partner) != self.n * self.d:
            raise ValueError(
                f"partner has {len(self.partner)} entries, expected {self.n * self.d}"
            )
        matched = np.flatnonzero(self.partner != UNMATCHED)
        mates = self.partner[matched]
        if np.any(mates == matched) or np.any(self.partner[mates] != matched):
            raise ValueError("partner must be a fixed-point-free involution")
        if self.retained is not None and len(self.retained) != self.pairs:
            raise ValueError("retention mask needs one bit per pair")

    @classmethod
    def from_pairs(
        cls,
        n: int,
        d: int,
        pairs: list[tuple[int, int]],
        retained: list[bool] | np.ndarray | None = None,
    ) -> Matching:
        """Build from explicit stub pairs; pair k is pairs[k]. Partial pairings allowed."""
        partner = np.full(n * d, UNMATCHED, np.int64)
        pair_of = np.full(n * d, UNMATCHED, np.int64)
        for k, (s, t) in enumerate(pairs):
            if partner[s] != UNMATCHED or partner[t] != UNMATCHED:
                raise ValueError(f"stub paired twice in pair {k}")
            partner[s], partner[t] = t, s
            pair_of[s] = pair_of[t] = k
        mask = None if retained is None else np.asarray(retained, dtype=bool)
        if mask is not None and len(mask) != len(pairs):
            raise ValueError("retention mask needs one bit per listed pair")
        if mask is not None and len(pairs) != (n * d) // 2:
            raise IncompleteMatchingError("a mask requires a complete matching")
        return cls(n=n, d=d, partner=partner, pair_of=pair_of, retained=mask)

    @property
    def stubs(self) -> int:
        return self.n * self.d

    @property
    def pairs(self) -> int:
        return self.stubs // 2

    @property
    def complete(self) -> bool:
        return bool(np.all(self.partner != UNMATCHED))

    def require_complete(self) -> None:
        if not self.complete:
            missing = int(np.sum(self.partner == UNMATCHED))
            raise IncompleteMatchingError(f"{missing} stubs are unmatched")

    def edges(self) -> tuple[np.ndarray, np.ndarray]:
        """Stub endpoints (lo, hi) of every pair, ordered by pair index."""
        self.require_complete()
        lo = np.empty(self.pairs, np.int64)
        hi = np.empty(self.pairs, np.int64)
        stubs = np.arange(self.stubs)
        first = stubs < self.partner
        lo[self.pair_of[first]] = stubs[first]
        hi[self.pair_of[first]] = self.partner[first]
        return lo, hi


def sample_matching(params: Params, stream: RandomStream) -> Matching:
    """Uniform perfect matching of the dn stubs, one uniform per pair."""
    stubs = params.n * params.d
    if stubs % 2:
        raise InfeasibleParametersError(f"d*n = {stubs} is odd; no perfect matching")
    partner, pair_of = pair_stubs(stubs, stream.uniforms(stubs // 2))
    return Matching(n=params.n, d=params.d, partner=partner, pair_of=pair_of)


def is_simple(m: Matching) -> bool:
    """No self-loop and no two pairs joining the same vertex pair."""
    lo, hi = m.edges()
    u = lo // m.d
    v = hi // m.d
    if np.any(u == v):
        return False
    a = np.minimum(u, v)
    b = np.maximum(u, v)
    keys = a * m.n + b
    return len(np.unique(keys)) == len(keys)


def sample_mask(m: Matching, p: float, stream: RandomStream) -> Matching:
    """Retain each of the dn/2 pairs independently with probability p."""
    m.require_complete()
    return replace(m, retained=stream.bernoulli(p, m.pairs))


def sample_simple_matching(
    params: Params, stream: RandomStream, max_attempts: int | None = None
) -> tuple[Matching, int]:
    """
    Rejection-sample until the matching is simple.

    Returns the matching and the number of attempts it took.
    Raises InfeasibleParametersError when the attempt cap is reached.
    """
    attempts = settings.SIMPLE_MAX_ATTEMPTS if max_attempts is None else max_attempts
    if attempts < 1:
        raise InfeasibleParametersError(f"max_attempts must be >= 1, got {attempts}")
    retryer = Retrying(
        stop=stop_after_attempt(attempts),
        retry=retry_if_result(lambda matching: not is_simple(matching)),
    )
    try:
        matching = retryer(sample_matching, params, stream)
    except RetryError as e:
        SIMPLE_REJECTIONS.inc(attempts)
        raise InfeasibleParametersError(
            f"no simple matching in {attempts} attempts (n={params.n}, d={params.d})"
        ) from e
    used = retryer.statistics.get("attempt_number", 1)
    if used > 1:
        SIMPLE_REJECTIONS.inc(used - 1)
    return matching, used


@dataclass(frozen=True)
class ComponentSummary:
    sizes: tuple[int, ...]  # descending
    max_size: int
    size_of: np.ndarray  # vertex -> size of its component

    @property
    def count(self) -> int:
        return len(self.sizes)


def components(m: Matching) -> ComponentSummary:
    """Retained-edge components via union-find."""
    m.require_complete()
    if m.retained is None:
        raise IncompleteMatchingError("components need a retention mask")
    uf = UnionFind(m.n)
    lo, hi = m.edges()
    for k in np.flatnonzero(m.retained):
        uf.union(int(lo[k]) // m.d, int(hi[k]) // m.d)
    sizes = tuple(sorted(uf.component_sizes(), reverse=True))
    size_of = np.array([uf.size_of(v) for v in range(m.n)], dtype=np.int64)
    return ComponentSummary(sizes=sizes, max_size=sizes[0], size_of=size_of)


# ---------------------------------------------------------------------------
# Text dump: header "n d p seed", then one "u.i v.j r" line per pair
# ---------------------------------------------------------------------------


def dump_matching(m: Matching, path: str | Path, p: float, seed: int) -> None:
    m.require_complete()
    lo, hi = m.edges()
    retained = m.retained if m.retained is not None else np.zeros(m.pairs, bool)
    lines = [f"{m.n} {m.d} {p!r} {seed}"]
    for k in range(m.pairs):
        s, t = int(lo[k]), int(hi[k])
        lines.append(
            f"{s // m.d}.{s % m.d} {t // m.d}.{t % m.d} {int(bool(retained[k]))}"
        )
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")
    logger.debug(f"Matching with {m.pairs} pairs written to {path}")


def load_matching(path: str | Path) -> tuple[Matching, float, int]:
    """Inverse of dump_matching; returns (matching, p, seed)."""
    header, *rows = Path(path).read_text(encoding="utf-8").strip().splitlines()
    n_s, d_s, p_s, seed_s = header.split()
    n, d = int(n_s), int(d_s)
    pairs: list[tuple[int, int]] = []
    bits: list[bool] = []
    for row in rows:
        left, right, r = row.split()
        u, i = left.split(".")
        v, j = right.split(".")
        pairs.append((stub_id(int(u), int(i), d), stub_id(int(v), int(j), d)))
        bits.append(r == "1")
    return Matching.from_pairs(n, d, pairs, bits), float(p_s), int(seed_s)
