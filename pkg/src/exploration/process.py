"""
Stub-level exploration of a percolated configuration-model graph.

PURPOSE:
    Runs the active/unseen/explored state machine that reveals the matching
    pair by pair, starting from one vertex, and records every step together
    with the per-phase counters (tau, sigma_UR, sigma_UNR, sigma_A, sigma_NF,
    N_m). Phase one explores the start vertex's component; later phases are
    started by reseeding at a uniformly chosen unseen stub.

RULES (one step, e = next active stub, h = its partner):
    h unseen, edge retained     -> e, h explored; the other unseen stubs of v(h) become active
    h unseen, edge not retained -> e, h explored
    h active                    -> e, h explored
    no active stub              -> reseed (not a step), or stop

DESIGN:
    LAZY mode draws h uniformly among unexplored stubs other than e and draws
    R fresh; FIXED mode reads both from a complete Matching with mask.
    All randomness comes from one uniform buffer consumed in a fixed order:
    one uniform for a UNIFORM start, two per LAZY step (partner, retention),
    one per reseed. The numba kernel in exploration.kernels consumes the
    buffer identically, so a trace and a kernel run on the same buffer agree.
    Counters are accumulated during the run, not reconstructed afterwards.
"""

from __future__ import annotations

import logging
from collections import deque
from dataclasses import dataclass, field
from enum import Enum, IntEnum

import numpy as np

from src.errors import IncompleteMatchingError, InfeasibleParametersError
from src.graph.config_graph import Matching
from src.schemas import Params
from src.shared.streams import RandomStream, uniform_index
from src.utils.metrics import EXPLORATION_STEPS

logger = logging.getLogger("regulus")


class StubStatus(IntEnum):
    ACTIVE = 0
    UNSEEN = 1
    EXPLORED = 2


class HitClass(IntEnum):
    """What h_t was when the step revealed it."""

    ACTIVE = 0
    UNSEEN_FRESH = 1  # v(h) had all d stubs unseen
    UNSEEN_FULL = 2  # v(h) had exactly d-1 unseen stubs
    UNSEEN_DEPLETED = 3  # v(h) had at most d-2 unseen stubs


class ActivePolicy(str, Enum):
    FIFO = "fifo"
    LIFO = "lifo"


class StopRule(str, Enum):
    FIRST_COMPONENT = "first_component"
    FULL_GRAPH = "full_graph"


class Start(str, Enum):
    UNIFORM = "uniform"


def buffer_size(n: int, d: int, lazy: bool) -> int:
    """Uniforms an exploration can consume: start, steps, reseeds."""
    return d * n + n + 2 if lazy else n + 2


def classify(m: int, d: int) -> HitClass:
    if m == d:
        return HitClass.UNSEEN_FRESH
    if m == d - 1:
        return HitClass.UNSEEN_FULL
    return HitClass.UNSEEN_DEPLETED


@dataclass
class PhaseStats:
    """Counters of one phase; a phase ends when no stub is active."""

    index: int
    start_vertex: int
    start_step: int  # steps completed before the phase began
    initial_active: int
    d: int
    tau: int | None = None  # None while the phase is incomplete
    sigma_ur: int = 0
    sigma_unr: int = 0
    sigma_a: int = 0
    sigma_nf: int = 0
    n_m: list[int] = field(default_factory=list)  # n_m[m], m in 0..d; n_m[0] stays 0

    def __post_init__(self):
        if not self.n_m:
            self.n_m = [0] * (self.d + 1)

    @property
    def complete(self) -> bool:
        return self.tau is not None

    @property
    def size(self) -> int:
        """Component size sigma_UR + 1 (a lower bound while incomplete)."""
        return self.sigma_ur + 1

    @property
    def steps(self) -> int:
        return self.sigma_ur + self.sigma_unr + self.sigma_a


@dataclass(frozen=True)
class ExplorationTrace:
    """
    Step columns are aligned numpy arrays; entry t-1 describes step t.

    `unseen_before` is m, the unseen-stub count of v(h_t) before the step
    (0 on active hits). `phase` is the phase index of each step.
    """

    n: int
    d: int
    p: float | None
    mode: str  # "lazy" | "fixed"
    policy: ActivePolicy
    stop: StopRule
    start_vertex: int
    e: np.ndarray
    h: np.ndarray
    retained: np.ndarray
    hit_class: np.ndarray
    unseen_before: np.ndarray
    phase: np.ndarray
    active_after: np.ndarray
    unseen_after: np.ndarray
    fresh_after: np.ndarray
    depleted_after: np.ndarray
    phases: tuple[PhaseStats, ...]
    uniforms_used: int

    @property
    def steps(self) -> int:
        return len(self.e)

    @property
    def tau(self) -> int | None:
        return self.phases[0].tau

    @property
    def phase_one_steps(self) -> int:
        """Steps belonging to phase one (tau once phase one is complete)."""
        first = self.phases[0]
        return first.tau if first.complete else first.steps

    @property
    def finished(self) -> bool:
        """True when the run ended by its stop rule (not by max_steps)."""
        return all(ph.complete for ph in self.phases)

    def component_sizes(self) -> list[int]:
        """All component sizes, descending; needs a finished FULL_GRAPH trace."""
        if self.stop is not StopRule.FULL_GRAPH or not self.finished:
            raise ValueError("component sizes need a finished FULL_GRAPH trace")
        sizes = [ph.size for ph in self.phases]
        sizes += [1] * (self.n - sum(sizes))
        return sorted(sizes, reverse=True)


class _StubPool:
    """Unexplored stubs in items[:size]; swap-remove keeps choice uniform and O(1)."""

    def __init__(self, stubs: int):
        self.items = list(range(stubs))
        self.pos = list(range(stubs))
        self.size = stubs

    def remove(self, s: int) -> None:
        i = self.pos[s]
        last = self.items[self.size - 1]
        self.items[i] = last
        self.pos[last] = i
        self.items[self.size - 1] = s
        self.pos[s] = self.size - 1
        self.size -= 1

    def choose(self, u: float) -> int:
        return self.items[uniform_index(u, self.size)]


class _ActiveContainer:
    """FIFO or LIFO over stubs, with lazy deletion of entries that are no longer active."""

    def __init__(self, policy: ActivePolicy):
        self._queue: deque[int] = deque()
        self._lifo = policy is ActivePolicy.LIFO

    def push(self, s: int) -> None:
        self._queue.append(s)

    def pop(self, status: list[int]) -> int:
        while self._queue:
            s = self._queue.pop() if self._lifo else self._queue.popleft()
            if status[s] == StubStatus.ACTIVE:
                return s
        return -1


def explore(
    source: Params | Matching,
    start: int | Start = Start.UNIFORM,
    stop: StopRule = StopRule.FIRST_COMPONENT,
    policy: ActivePolicy = ActivePolicy.FIFO,
    stream: RandomStream | None = None,
    max_steps: int | None = None,
    uniforms: np.ndarray | None = None,
) -> ExplorationTrace:
    """
    Run the exploration on a LAZY source (Params) or a FIXED one (Matching).

    Randomness comes from `uniforms` if given, else from a buffer drawn from
    `stream`. A FIXED source needs a complete matching with a retention mask.
    """
    lazy = isinstance(source, Params)
    if lazy:
        n, d, p = source.n, source.d, source.p
        partner = pair_of = mask = None
    else:
        source.require_complete()
        if source.retained is None:
            raise IncompleteMatchingError("FIXED exploration needs a retention mask")
        n, d, p = source.n, source.d, None
        partner = source.partner.tolist()
        pair_of = source.pair_of.tolist()
        mask = source.retained.tolist()

    if uniforms is None:
        if stream is None:
            raise ValueError("explore needs a stream or a uniform buffer")
        uniforms = stream.uniforms(buffer_size(n, d, lazy))
    u = uniforms.tolist() if isinstance(uniforms, np.ndarray) else list(uniforms)

    stubs = n * d
    status = [int(StubStatus.UNSEEN)] * stubs
    unseen_count = [d] * n
    pool = _StubPool(stubs)
    container = _ActiveContainer(policy)
    cursor = 0

    if isinstance(start, Start):
        start_vertex = uniform_index(u[cursor], n)
        cursor += 1
    else:
        start_vertex = int(start)
        if not 0 <= start_vertex < n:
            raise InfeasibleParametersError(f"start vertex {start_vertex} outside [0, {n})")

    active = 0
    unseen = stubs
    fresh = n
    depleted = 0

    def is_depleted(count: int) -> bool:
        return 1 <= count <= d - 2

    def activate_vertex(v: int) -> int:
        nonlocal active, unseen, fresh, depleted
        old = unseen_count[v]
        for s in range(v * d, v * d + d):
            if status[s] == StubStatus.UNSEEN:
                status[s] = int(StubStatus.ACTIVE)
                container.push(s)
        active += old
        unseen -= old
        unseen_count[v] = 0
        if old == d:
            fresh -= 1
        if is_depleted(old):
            depleted -= 1
        return old

    columns: dict[str, list] = {
        key: []
        for key in (
            "e",
            "h",
            "retained",
            "hit_class",
            "unseen_before",
            "phase",
            "active_after",
            "unseen_after",
            "fresh_after",
            "depleted_after",
        )
    }

    phases: list[PhaseStats] = []
    current = PhaseStats(
        index=0, start_vertex=start_vertex, start_step=0, initial_active=d, d=d
    )
    activate_vertex(start_vertex)
    phases.append(current)
    t = 0

    while True:
        if active == 0:
            current.tau = current.steps
            if stop is StopRule.FIRST_COMPONENT or pool.size == 0:
                break
            s = pool.choose(u[cursor])
            cursor += 1
            v = s // d
            current = PhaseStats(
                index=len(phases),
                start_vertex=v,
                start_step=t,
                initial_active=unseen_count[v],
                d=d,
            )
            phases.append(current)
            activate_vertex(v)
            continue
        if max_steps is not None and t >= max_steps:
            break

        e = container.pop(status)
        pool.remove(e)
        if lazy:
            h = pool.choose(u[cursor])
            r = u[cursor + 1] < p
            cursor += 2
        else:
            h = partner[e]
            r = bool(mask[pair_of[e]])
        pool.remove(h)
        status[e] = int(StubStatus.EXPLORED)

        if status[h] == StubStatus.ACTIVE:
            status[h] = int(StubStatus.EXPLORED)
            hit = HitClass.ACTIVE
            m = 0
            active -= 2
            current.sigma_a += 1
        else:
            status[h] = int(StubStatus.EXPLORED)
            v = h // d
            m = unseen_count[v]
            hit = classify(m, d)
            unseen -= 1
            active -= 1
            unseen_count[v] = m - 1
            if m < d:
                current.sigma_nf += 1
            if m == d:
                fresh -= 1
            if r:
                current.sigma_ur += 1
                current.n_m[m] += 1
                for s in range(v * d, v * d + d):
                    if status[s] == StubStatus.UNSEEN:
                        status[s] = int(StubStatus.ACTIVE)
                        container.push(s)
                active += m - 1
                unseen -= m - 1
                unseen_count[v] = 0
            else:
                current.sigma_unr += 1
            depleted += int(is_depleted(unseen_count[v])) - int(is_depleted(m))

        t += 1
        columns["e"].append(e)
        columns["h"].append(h)
        columns["retained"].append(r)
        columns["hit_class"].append(int(hit))
        columns["unseen_before"].append(m)
        columns["phase"].append(current.index)
        columns["active_after"].append(active)
        columns["unseen_after"].append(unseen)
        columns["fresh_after"].append(fresh)
        columns["depleted_after"].append(depleted)

    EXPLORATION_STEPS.labels(mode="lazy" if lazy else "fixed").inc(t)

    dtypes = {"retained": bool, "hit_class": np.int8, "unseen_before": np.int8}
    arrays = {
        key: np.asarray(values, dtype=dtypes.get(key, np.int64))
        for key, values in columns.items()
    }
    return ExplorationTrace(
        n=n,
        d=d,
        p=p,
        mode="lazy" if lazy else "fixed",
        policy=policy,
        stop=stop,
        start_vertex=start_vertex,
        phases=tuple(phases),
        uniforms_used=cursor,
        **arrays,
    )


# ---------------------------------------------------------------------------
# Component sizes read off a trace
# ---------------------------------------------------------------------------


def component_size_of_start(trace: ExplorationTrace) -> int:
    """|C(start)| = sigma_UR + 1 of phase one."""
    first = trace.phases[0]
    if not first.complete:
        raise ValueError("trace does not cover phase one")
    return first.size


def phase_sizes(trace: ExplorationTrace) -> list[int]:
    return [ph.size for ph in trace.phases]


def max_component_size(trace: ExplorationTrace) -> int:
    """Largest sigma_UR + 1 over the phases of a finished FULL_GRAPH trace."""
    if trace.stop is not StopRule.FULL_GRAPH or not trace.finished:
        raise ValueError("max_component_size needs a finished FULL_GRAPH trace")
    return max(phase_sizes(trace))
