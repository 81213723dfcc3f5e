"""
Round-based simulator for mobile agents deploying as cooperative guards.

Model
-----
Agents have unique integer IDs and start at a common point of the
polygon. Every round has three ordered stages:

    LOOK    each active agent observes from its current position
    ACT     agents broadcast short messages or halt for good
    MOVE    agents move along segments visible at look time

A broadcast reaches every non-terminated agent mutually visible to the
sender at look time, and is read in the next round. Each broadcast
carries a kind tag and at most :data:`PAYLOAD_WORDS` words; longer
messages are sent as several broadcasts in the same round, each
counted. Persistent memory is charged in words against a per-agent
budget.

Two protocols run on top of the engine:

* ``warmup``: one leader with O(n) memory maps the polygon by a
  vertex DFS, solves centrally, then walks the others to their posts.
* ``small-memory``: every agent holds O(1) words; the group explores
  the dual of a triangulation it builds on the fly, storing five
  triangle records per agent, then deploys guards in a post-order pass.
"""

from __future__ import annotations

import contextlib
import enum
import logging
import math
from dataclasses import dataclass, field
from typing import NamedTuple, Sequence

import networkx as nx
import numpy as np

from coopguards.errors import (
    InsufficientAgentsError,
    MemoryBudgetExceeded,
    ModelViolation,
    UnreachableStartError,
)
from coopguards.geometry import (
    Location,
    Point,
    PolygonWithHoles,
    angle_key,
    cross,
    locate_point,
    mutually_visible,
    triangles_overlap,
    vertex_limited_vp,
)
from coopguards.guards import GuardSet, Triplet, compute_cover, place_guards, solve
from coopguards.triangulation import (
    RootedTree,
    Triangle,
    Triangulation,
    expected_triangle_count,
    fits,
)
from coopguards.utils import polygon_digest

logger = logging.getLogger(__name__)

# ── Constants ────────────────────────────────────────────────────────

PAYLOAD_WORDS = 4
SMALL_MEMORY_WORDS = 128
TRIANGLES_PER_AGENT = 5
RECORD_WORDS = 22
BASE_WORDS = 13
FOLLOWER_WORDS = 4


def leader_words(n: int) -> int:
    """Word budget for a warmup agent on a polygon with n vertices."""
    return 12 * n + 32


class Mode(str, enum.Enum):
    WARMUP = 'warmup'
    SMALL_MEMORY = 'small-memory'


class Role(enum.Enum):
    EXPLORER = 'explorer'
    LEADER = 'leader'
    GUARD = 'guard'


# ── Agents and memory ────────────────────────────────────────────────


@dataclass
class MemoryStore:
    """Named slots of persistent words, checked against a budget on every charge."""

    agent_id: int
    budget: int
    slots: dict[str, int] = field(default_factory=dict)
    peak: int = 0

    @property
    def used(self) -> int:
        return sum(self.slots.values())

    def charge(self, key: str, words: int) -> None:
        if words:
            self.slots[key] = words
        else:
            self.slots.pop(key, None)
        used = self.used
        if used > self.budget:
            raise MemoryBudgetExceeded(
                f'agent {self.agent_id} needs {used} words, budget is {self.budget}')
        self.peak = max(self.peak, used)

    def release(self, key: str) -> None:
        self.slots.pop(key, None)


@dataclass
class Agent:
    id: int
    position: Point
    role: Role
    store: MemoryStore
    terminated: bool = False


# ── Events and traces ────────────────────────────────────────────────


@dataclass(frozen=True)
class Look:
    agent: int
    position: Point


@dataclass(frozen=True)
class Broadcast:
    sender: int
    kind: str
    words: tuple = ()
    receivers: tuple[int, ...] = ()


@dataclass(frozen=True)
class Halt:
    agent: int


@dataclass(frozen=True)
class Move:
    agent: int
    origin: Point
    target: Point


@dataclass(frozen=True)
class Prox:
    """A proximity-model exploration step; not tied to a single agent."""

    kind: str
    words: tuple = ()


_STAGE = {Look: 0, Broadcast: 1, Halt: 1, Prox: 1, Move: 2}


@dataclass
class Round:
    index: int
    events: list = field(default_factory=list)

    @property
    def broadcasts(self) -> list[Broadcast]:
        return [e for e in self.events if isinstance(e, Broadcast)]

    @property
    def moves(self) -> list[Move]:
        return [e for e in self.events if isinstance(e, Move)]


@dataclass
class SimTrace:
    mode: str
    polygon_digest: str
    seed: int
    agent_ids: tuple[int, ...]
    rounds: list[Round] = field(default_factory=list)
    budgets: dict[int, int] = field(default_factory=dict)
    peak_memory: dict[int, int] = field(default_factory=dict)
    guards: GuardSet | None = None

    @property
    def total_rounds(self) -> int:
        return self.rounds[-1].index if self.rounds else 0

    @property
    def total_broadcasts(self) -> int:
        return sum(len(r.broadcasts) for r in self.rounds)

    @property
    def max_peak_memory(self) -> int:
        return max(self.peak_memory.values(), default=0)


class SimResult(NamedTuple):
    guards: GuardSet
    trace: SimTrace


# ── Engine ───────────────────────────────────────────────────────────


class Simulator:
    """Lockstep engine enforcing look-time visibility, payload and memory rules."""

    def __init__(self, polygon: PolygonWithHoles, agent_ids: Sequence[int],
                 start: Point, budget: int):
        if locate_point(polygon, start) is Location.EXTERIOR:
            raise UnreachableStartError(f'start ({start}) lies outside the polygon')
        self.polygon = polygon
        self.agents = {
            aid: Agent(aid, start, Role.EXPLORER, MemoryStore(aid, budget))
            for aid in sorted(agent_ids)
        }
        self.rounds: list[Round] = []
        self.current: Round | None = None
        self._visible: dict[tuple[Point, Point], bool] = {}
        self._inbox: dict[int, list[Broadcast]] = {aid: [] for aid in self.agents}
        self._outbox: dict[int, list[Broadcast]] = {aid: [] for aid in self.agents}
        self._looks: dict[int, Point] = {}
        self._moves: dict[int, Move] = {}

    def visible(self, a: Point, b: Point) -> bool:
        key = (a, b) if a <= b else (b, a)
        if key not in self._visible:
            self._visible[key] = mutually_visible(self.polygon, a, b)
        return self._visible[key]

    def active(self) -> list[Agent]:
        return [a for a in self.agents.values() if not a.terminated]

    @contextlib.contextmanager
    def round(self):
        self._begin()
        yield self.current
        self._end()

    def _begin(self) -> None:
        self.current = Round(len(self.rounds) + 1)
        self._inbox, self._outbox = self._outbox, {aid: [] for aid in self.agents}
        self._looks = {a.id: a.position for a in self.active()}
        self._moves = {}
        for aid, pos in self._looks.items():
            self.current.events.append(Look(aid, pos))

    def _end(self) -> None:
        for aid in sorted(self._moves):
            move = self._moves[aid]
            self.current.events.append(move)
            self.agents[aid].position = move.target
        self.rounds.append(self.current)
        self.current = None

    def inbox(self, agent_id: int, kind: str | None = None) -> list[Broadcast]:
        return [b for b in self._inbox[agent_id] if kind is None or b.kind == kind]

    def _require_active(self, agent: Agent) -> None:
        if self.current is None:
            raise ModelViolation('action outside a round')
        if agent.terminated or agent.id not in self._looks:
            raise ModelViolation(f'agent {agent.id} is not active')

    def broadcast(self, sender: Agent, kind: str, *words) -> Broadcast:
        self._require_active(sender)
        if len(words) > PAYLOAD_WORDS:
            raise ModelViolation(f'payload of {len(words)} words exceeds {PAYLOAD_WORDS}')
        origin = self._looks[sender.id]
        receivers = tuple(
            aid for aid, pos in self._looks.items()
            if aid != sender.id and self.visible(origin, pos)
        )
        event = Broadcast(sender.id, kind, tuple(words), receivers)
        self.current.events.append(event)
        for aid in receivers:
            self._outbox[aid].append(event)
        return event

    def broadcast_words(self, sender: Agent, kind: str, words: Sequence) -> int:
        """Send ``words`` in as many broadcasts as needed; returns how many."""
        chunks = [tuple(words[k:k + PAYLOAD_WORDS])
                  for k in range(0, len(words), PAYLOAD_WORDS)] or [()]
        for chunk in chunks:
            self.broadcast(sender, kind, *chunk)
        return len(chunks)

    def halt(self, agent: Agent) -> None:
        self._require_active(agent)
        agent.terminated = True
        self.current.events.append(Halt(agent.id))

    def move(self, agent: Agent, target: Point) -> None:
        self._require_active(agent)
        if agent.id in self._moves:
            raise ModelViolation(f'agent {agent.id} moves twice in one round')
        origin = self._looks[agent.id]
        if target == origin:
            return
        if locate_point(self.polygon, target) is Location.EXTERIOR or not self.visible(origin, target):
            raise ModelViolation(f'agent {agent.id} cannot see ({target}) from ({origin})')
        self._moves[agent.id] = Move(agent.id, origin, target)

    def trace(self, mode: Mode, seed: int, guards: GuardSet | None) -> SimTrace:
        return SimTrace(
            mode=mode.value,
            polygon_digest=polygon_digest(self.polygon),
            seed=seed,
            agent_ids=tuple(self.agents),
            rounds=self.rounds,
            budgets={aid: a.store.budget for aid, a in self.agents.items()},
            peak_memory={aid: a.store.peak for aid, a in self.agents.items()},
            guards=guards,
        )


def _agent_ids(count: int, seed: int) -> list[int]:
    rng = np.random.default_rng(seed)
    return sorted(int(x) + 1 for x in rng.choice(10 * count, size=count, replace=False))


# ── Warmup protocol ──────────────────────────────────────────────────


START = -1


class _WarmupRun:
    def __init__(self, sim: Simulator, start: Point):
        self.sim = sim
        self.P = sim.polygon
        self.start = start
        idx = self.P.index_of(start)
        self.root = START if idx is None else idx
        self.tree_parent = {self.root: self.root}
        self.succ: dict[int, int] = {}
        self.stack: list[int] = []

    def where(self, key: int) -> Point:
        return self.start if key == START else self.P.vertices[key]

    def run(self) -> GuardSet:
        sim = self.sim
        agents = list(sim.agents.values())
        with sim.round():
            for a in agents:
                sim.broadcast(a, 'ID', a.id)

        with sim.round():
            leader = None
            for a in agents:
                ids = {b.words[0] for b in sim.inbox(a.id, 'ID')} | {a.id}
                if a.id == min(ids):
                    leader = a
                    a.role = Role.LEADER
            for a in agents:
                if a is not leader:
                    a.store.budget = FOLLOWER_WORDS
                a.store.charge('state', FOLLOWER_WORDS)
            x, done = self._explore_step(leader, self.root)
        while not done:
            with sim.round():
                x, done = self._explore_step(leader, x)

        followers = [a for a in agents if a is not leader]
        return self._deploy(leader, followers, x)

    # Phase 2: vertex DFS by the leader alone, one hop per round.

    def _explore_step(self, leader: Agent, x: int) -> tuple[int, bool]:
        P = self.P
        if x != START:
            self.succ[x] = P.succ[x]
        for v in vertex_limited_vp(P, self.where(x)):
            if v not in self.tree_parent:
                self.tree_parent[v] = x
                self.stack.append(v)
        leader.store.charge('map', 3 * len(self.tree_parent) + 2 * len(self.succ))
        leader.store.charge('dfs', len(self.tree_parent) + 2 * len(self.stack))
        if not self.stack:
            return x, True
        top = self.stack[-1]
        if self.tree_parent[top] == x:
            self.stack.pop()
            dest = top
        else:
            dest = self.tree_parent[x]
        self.sim.move(leader, self.where(dest))
        return dest, False

    def _rebuild(self) -> PolygonWithHoles:
        rings = []
        placed: set[int] = set()
        for first in sorted(self.succ):
            if first in placed:
                continue
            ring = [first]
            placed.add(first)
            v = self.succ[first]
            while v != first:
                ring.append(v)
                placed.add(v)
                v = self.succ[v]
            rings.append([self.P.vertices[i] for i in ring])
        rebuilt = PolygonWithHoles.from_rings(rings[0], rings[1:])
        if rebuilt != self.P:
            raise ModelViolation('leader map does not match the polygon')
        return rebuilt

    # Phase 3: plan centrally, walk the followers to their posts.

    def _deploy(self, leader: Agent, followers: list[Agent], x: int) -> GuardSet:
        sim, P = self.sim, self.P
        solution = solve(self._rebuild())
        targets = list(solution.guards.vertices)
        if len(targets) > len(sim.agents):
            raise InsufficientAgentsError(len(targets), len(sim.agents))

        path_back = []
        node = x
        while node != self.root:
            node = self.tree_parent[node]
            path_back.append(node)

        tour = self._tour(set(targets))
        leader.store.charge('dfs', len(self.tree_parent))
        leader.store.charge('plan', len(tour) + 2 * len(targets))

        order: list[int] = []
        for key in tour:
            if key in targets and key not in order:
                order.append(key)
        posts = dict(zip(order[:-1], sorted((f.id for f in followers), reverse=True)))
        unused = sorted(f.id for f in followers if f.id not in posts.values())
        logger.debug('Warmup plan: %d guards, tour of %d stops', len(targets), len(tour))
        if unused:
            logger.warning('%d agents are not needed and stop at the start', len(unused))

        for key in path_back:
            with sim.round():
                sim.move(leader, self.where(key))

        for i, key in enumerate(tour):
            with sim.round():
                self._followers_act(followers)
                if i > 0:
                    sim.move(leader, self.where(key))
                if i == 0 and unused:
                    sim.broadcast(leader, 'HALT_BELOW', unused[-1])
                if key in posts and tour.index(key) == i:
                    sim.broadcast(leader, 'STAY', posts[key])
                if i + 1 < len(tour):
                    nxt = self.where(tour[i + 1])
                    sim.broadcast(leader, 'GOTO', nxt.x, nxt.y)
        with sim.round():
            self._followers_act(followers)
            leader.role = Role.GUARD
            sim.halt(leader)
        if any(not f.terminated for f in followers):
            raise ModelViolation('followers left without instructions')

        placed = [P.index_of(a.position) for a in sim.agents.values() if a.role is Role.GUARD]
        guards = GuardSet.from_vertices(P, placed)
        if guards != solution.guards:
            raise ModelViolation('deployed guards differ from the planned set')
        return guards

    def _followers_act(self, followers: list[Agent]) -> None:
        sim = self.sim
        for f in followers:
            if f.terminated:
                continue
            inbox = sim.inbox(f.id)
            if any(b.kind == 'STAY' and b.words[0] == f.id for b in inbox):
                f.role = Role.GUARD
                sim.halt(f)
            elif any(b.kind == 'HALT_BELOW' and f.id <= b.words[0] for b in inbox):
                sim.halt(f)
            else:
                for b in inbox:
                    if b.kind == 'GOTO':
                        sim.move(f, Point(*b.words))

    def _tour(self, targets: set[int]) -> list[int]:
        """Euler tour of a BFS tree over DFS-tree edges plus guard sightlines.

        Only subtrees holding a guard are entered, and the tour stops at
        the first visit of the last guard it reaches.
        """
        edges = {tuple(sorted((v, p))) for v, p in self.tree_parent.items() if v != p}
        ordered = sorted(targets)
        for i, a in enumerate(ordered):
            for b in ordered[i + 1:]:
                if self.sim.visible(self.where(a), self.where(b)):
                    edges.add((a, b))
        graph = nx.Graph()
        graph.add_nodes_from(sorted(self.tree_parent))
        graph.add_edges_from(sorted(edges))
        bfs = nx.bfs_tree(graph, self.root)

        keep: set[int] = set()
        for node in reversed(list(nx.dfs_preorder_nodes(bfs, self.root))):
            if node in targets or any(c in keep for c in bfs.successors(node)):
                keep.add(node)

        def kept_children(node: int):
            return iter(sorted(c for c in bfs.successors(node) if c in keep))

        tour = [self.root]
        stack = [(self.root, kept_children(self.root))]
        while stack:
            node, children = stack[-1]
            child = next(children, None)
            if child is None:
                stack.pop()
                if stack:
                    tour.append(stack[-1][0])
                continue
            tour.append(child)
            stack.append((child, kept_children(child)))

        last = max(tour.index(t) for t in targets)
        return tour[:last + 1]


# ── Small-memory protocol ────────────────────────────────────────────


@dataclass
class TriangleRecord:
    """What one agent stores about one triangle of the exploration tree."""

    node: int
    triangle: Triangle
    parent: int | None = None
    parent_side: int | None = None
    children: dict[int, int] = field(default_factory=dict)
    explored: set[int] = field(default_factory=set)
    visited: set[int] = field(default_factory=set)
    covers_parent: dict[int, bool] = field(default_factory=dict)
    triplet: Triplet | None = None
    done: bool = False

    def words(self) -> list[int]:
        out = [self.node, -1 if self.parent is None else self.parent,
               -1 if self.parent_side is None else self.parent_side,
               *self.triangle.vertices, int(self.done)]
        for side in range(3):
            child = self.children.get(side, -1)
            out += [child, int(side in self.explored), int(child in self.visited),
                    int(self.covers_parent.get(child, False))]
        return (out + [0] * RECORD_WORDS)[:RECORD_WORDS]

    def side_with(self, other: Triangle) -> int:
        keys = self.triangle.side_keys()
        for k, key in enumerate(keys):
            if key in other.side_keys():
                return k
        raise ModelViolation(f'triangles {self.triangle} and {other} share no side')


class _SmallMemoryRun:
    def __init__(self, sim: Simulator, start: Point):
        self.sim = sim
        self.P = sim.polygon
        self.start = start
        self.ids = sorted(sim.agents)
        self.group = list(self.ids)
        self.owner: dict[int, int] = {}
        self.records: dict[int, dict[int, TriangleRecord]] = {aid: {} for aid in self.ids}
        self.at: int | None = None
        self.counter = 0
        self.built: dict[int, Triangle] = {}
        self.built_parent: dict[int, int] = {}
        self.deployed: dict[int, int] = {}
        self.ranks: dict[int, tuple[int, int, int]] = {}
        self._to_halt: list[int] = []

    # ── helpers ──

    @contextlib.contextmanager
    def _round(self):
        with self.sim.round() as rnd:
            for aid in self._to_halt:
                agent = self.sim.agents[aid]
                agent.role = Role.GUARD
                self.sim.halt(agent)
            self._to_halt = []
            yield rnd

    def agent(self, aid: int) -> Agent:
        return self.sim.agents[aid]

    def record(self, node: int) -> TriangleRecord:
        return self.records[self.owner[node]][node]

    def _charge(self, aid: int) -> None:
        self.agent(aid).store.charge('records', RECORD_WORDS * len(self.records[aid]))

    def _store(self, aid: int, rec: TriangleRecord) -> None:
        self.records[aid][rec.node] = rec
        if rec.node not in self.built:
            self.built[rec.node] = rec.triangle
            if rec.parent is not None:
                self.built_parent[rec.node] = rec.parent
        self.owner[rec.node] = aid
        self._charge(aid)

    def _discard(self, node: int) -> None:
        aid = self.owner.pop(node)
        del self.records[aid][node]
        self._charge(aid)

    def _group_move(self, target: int) -> None:
        if self.at == target:
            return
        with self._round():
            for aid in self.group:
                self.sim.move(self.agent(aid), self.P.vertices[target])
        self.at = target

    def _shared_vertex(self, side: tuple[int, int]) -> int:
        return self.at if self.at in side else min(side)

    def _coords(self, *indices: int) -> list:
        out = []
        for i in indices:
            p = self.P.vertices[i]
            out += [p.x, p.y]
        return out

    # ── phases ──

    def run(self) -> GuardSet:
        self._elect()
        self._explore()
        self._deploy()
        return self._finish()

    def _elect(self) -> None:
        sim, P = self.sim, self.P
        with self._round():
            for aid in self.ids:
                sim.broadcast(self.agent(aid), 'ID', aid)
        with self._round():
            by_rank: list[int] = []
            for aid in self.ids:
                heard = sorted({b.words[0] for b in sim.inbox(aid, 'ID')} | {aid})
                rank = heard.index(aid)
                pred = heard[rank - 1] if rank > 0 else -1
                succ = heard[rank + 1] if rank + 1 < len(heard) else -1
                self.ranks[aid] = (rank, pred, succ)
                if rank == 0:
                    leader = self.agent(aid)
                by_rank = heard
                self.agent(aid).store.charge('base', BASE_WORDS)
                sim.broadcast(self.agent(aid), 'RANK', rank, pred, succ)
            self.ids = by_rank
            leader.role = Role.LEADER
            first = min(vertex_limited_vp(P, self.start))
            target = P.vertices[first]
            sim.broadcast(leader, 'GOTO', target.x, target.y)
        if self.start == P.vertices[first]:
            self.at = first
        else:
            self.at = None
            with self._round():
                for aid in self.group:
                    sim.move(self.agent(aid), target)
            self.at = first

        with self._round():
            u, v = first, P.succ[first]
            apex = min(q for q in vertex_limited_vp(P, P.vertices[u])
                       if q not in (u, v) and cross(P.vertices[u], P.vertices[v], P.vertices[q]) > 0
                       and fits(P, u, v, q))
            tri = Triangle.from_vertices(P, u, v, apex)
            self._store(self.ids[0], TriangleRecord(0, tri))
            self.counter = 1
            sim.broadcast_words(leader, 'TRI', [0, *self._coords(*tri.vertices)])

    def _open_side(self, rec: TriangleRecord) -> int | None:
        for k, (i, j) in enumerate(rec.triangle.sides):
            if k in rec.explored or k == rec.parent_side or self.P.is_side(i, j):
                continue
            return k
        return None

    def _explore(self) -> None:
        sim, P = self.sim, self.P
        cur = 0
        while True:
            rec = self.record(cur)
            owner = self.agent(self.owner[cur])
            k = self._open_side(rec)
            if k is None:
                if rec.parent is None:
                    with self._round():
                        sim.broadcast(owner, 'PHASE3')
                    return
                parent = self.record(rec.parent)
                shared = self._shared_vertex(rec.triangle.sides[rec.parent_side])
                with self._round():
                    p = P.vertices[shared]
                    sim.broadcast(owner, 'UP', rec.parent, p.x, p.y)
                self._group_move(shared)
                cur = parent.node
                continue

            rec.explored.add(k)
            u, v = rec.triangle.sides[k]
            if self.at == v:
                u, v = v, u
            with self._round():
                sim.broadcast(owner, 'SIDE', *self._coords(u, v))
            self._group_move(u)

            w = rec.triangle.opposite(u, v)
            pu, pv = P.vertices[u], P.vertices[v]
            far = -1 if cross(pu, pv, P.vertices[w]) > 0 else 1
            # ranks run by angle from uv around u
            candidates = sorted(
                (q for q in vertex_limited_vp(P, pu)
                 if q not in (u, v) and far * cross(pu, pv, P.vertices[q]) > 0),
                key=lambda q: (angle_key(P.vertices[q] - pu, pv - pu), q))
            banned: set[int] = set()
            with self._round():
                for aid in self.group:
                    ranks = self._invalid_ranks(aid, u, v, candidates)
                    banned |= set(ranks)
                    sim.broadcast_words(self.agent(aid), 'BAN', _runs(ranks))

            with self._round():
                choice = next((q for r, q in enumerate(candidates)
                               if r not in banned and fits(P, u, v, q)), None)
                if choice is None:
                    sim.broadcast(owner, 'NONE', cur)
                    continue
                node = self.counter
                rank = node // TRIANGLES_PER_AGENT
                if rank >= len(self.ids):
                    needed = math.ceil(expected_triangle_count(P) / TRIANGLES_PER_AGENT)
                    raise InsufficientAgentsError(needed, len(self.ids))
                tri = Triangle.from_vertices(P, u, v, choice)
                child = TriangleRecord(node, tri, parent=cur)
                child.parent_side = child.side_with(rec.triangle)
                rec.children[k] = node
                self._store(self.ids[rank], child)
                self._charge(owner.id)
                self.counter += 1
                sim.broadcast_words(owner, 'NEW', [node, cur, k, *self._coords(u, v, choice)])
            cur = node

    def _invalid_ranks(self, aid: int, u: int, v: int, candidates: list[int]) -> list[int]:
        P = self.P
        stored = [rec.triangle.points(P) for rec in self.records[aid].values()]
        out = []
        for r, q in enumerate(candidates):
            new = (P.vertices[u], P.vertices[v], P.vertices[q])
            if any(triangles_overlap(new, t) for t in stored):
                out.append(r)
        return out

    def _deploy(self) -> None:
        sim, P = self.sim, self.P
        cur = 0
        while self.group:
            rec = self.record(cur)
            owner = self.agent(self.owner[cur])
            pending = [c for _, c in sorted(rec.children.items()) if c not in rec.visited]
            if pending:
                child = pending[0]
                rec.visited.add(child)
                side = self._side_to(rec, child)
                shared = self._shared_vertex(side)
                with self._round():
                    p = P.vertices[shared]
                    sim.broadcast(owner, 'VISIT', child, p.x, p.y)
                self._group_move(shared)
                cur = child
                continue

            triplet = self._local_triplet(rec)
            rec.triplet = triplet
            rec.done = True
            flag = int(triplet is not None and rec.parent is not None and rec.parent in triplet.nodes)
            up = None
            if rec.parent is not None:
                up = self._shared_vertex(rec.triangle.sides[rec.parent_side])
            post = None
            with self._round():
                words = [cur, flag]
                if up is not None:
                    words += self._coords(up)
                sim.broadcast_words(owner, 'DONE', words)
                if rec.parent is not None:
                    self.record(rec.parent).covers_parent[cur] = bool(flag)
                self._discard(cur)
                g = triplet.guard_vertex if triplet is not None else None
                if g is not None and g not in self.deployed.values():
                    post = self._pick_guard(owner)
                    p = P.vertices[g]
                    sim.broadcast(owner, 'STAY', post, p.x, p.y)
            if post is not None:
                self._group_move(g)
                self.group.remove(post)
                self.deployed[post] = g
                self._to_halt.append(post)
            if rec.parent is None or not self.group:
                return
            self._group_move(up)
            cur = rec.parent

    def _side_to(self, rec: TriangleRecord, child: int) -> tuple[int, int]:
        for k, c in rec.children.items():
            if c == child:
                return rec.triangle.sides[k]
        raise ModelViolation(f'node {child} is not a child of {rec.node}')

    def _local_triplet(self, rec: TriangleRecord) -> Triplet | None:
        """Same rule as :func:`coopguards.guards.find_triplet`, from one record."""
        children = [(k, c) for k, c in sorted(rec.children.items())]
        uncovered = [(k, c) for k, c in children if not rec.covers_parent.get(c, False)]
        sides = rec.triangle.sides
        if len(uncovered) == 1 and rec.parent is not None:
            (k, c), = uncovered
            nodes = frozenset({c, rec.node, rec.parent})
            shared = set(sides[k]) & set(sides[rec.parent_side])
        elif len(uncovered) == 1:
            (k, c), = uncovered
            nodes = frozenset({c, rec.node})
            shared = set(sides[k])
        elif len(uncovered) == 2:
            (k1, c1), (k2, c2) = uncovered
            nodes = frozenset({c1, c2, rec.node})
            shared = set(sides[k1]) & set(sides[k2])
        elif rec.parent is None and not children:
            return Triplet(frozenset({rec.node}), min(rec.triangle.vertices))
        else:
            return None
        return Triplet(nodes, min(shared))

    def _pick_guard(self, owner: Agent) -> int:
        free = [aid for aid in self.group if not self.records[aid]]
        if free:
            return max(free)
        leaving = max(self.group)
        for node in sorted(self.records[leaving]):
            rec = self.records[leaving][node]
            takers = [aid for aid in self.group
                      if aid != leaving and len(self.records[aid]) < TRIANGLES_PER_AGENT]
            if not takers:
                needed = math.ceil(expected_triangle_count(self.P) / 2)
                raise InsufficientAgentsError(needed, len(self.ids))
            taker = min(takers)
            self.sim.broadcast_words(self.agent(leaving), 'HAND', [taker, *rec.words()])
            del self.records[leaving][node]
            self._charge(leaving)
            self._store(taker, rec)
        return leaving

    def _finish(self) -> GuardSet:
        sim, P = self.sim, self.P
        with self._round():
            for aid in list(self.group):
                sim.halt(self.agent(aid))
            self.group = []
        expected = self._expected_guards()
        placed = GuardSet.from_vertices(P, self.deployed.values())
        if placed != expected:
            if len(expected) > len(self.ids):
                raise InsufficientAgentsError(len(expected), len(self.ids))
            raise ModelViolation('deployed guards differ from the cover of the explored tree')
        return placed

    def _expected_guards(self) -> GuardSet:
        tree = RootedTree.single(0)
        for node in sorted(self.built):
            if node != 0:
                tree.attach(self.built_parent[node], node)
        tri = Triangulation(self.P, tuple(self.built[v] for v in sorted(self.built)), ())
        return place_guards(compute_cover(tree, tri), tri)


def _runs(ranks: list[int]) -> list[int]:
    """Compress sorted ranks into flat [lo, hi, lo, hi, ...] intervals."""
    out: list[int] = []
    for r in ranks:
        if out and out[-1] == r - 1:
            out[-1] = r
        else:
            out += [r, r]
    return out


# ── Entry points ─────────────────────────────────────────────────────


def simulate(polygon: PolygonWithHoles, agent_count: int, start: Point | None = None,
             mode: Mode | str = Mode.SMALL_MEMORY, seed: int = 0) -> SimResult:
    """Run one protocol to completion and return the guards with the full trace."""
    mode = Mode(mode)
    if agent_count < 1:
        raise InsufficientAgentsError(1, agent_count)
    start = polygon.vertices[0] if start is None else start
    ids = _agent_ids(agent_count, seed)
    if mode is Mode.WARMUP:
        sim = Simulator(polygon, ids, start, leader_words(polygon.n))
        guards = _WarmupRun(sim, start).run()
    else:
        sim = Simulator(polygon, ids, start, SMALL_MEMORY_WORDS)
        guards = _SmallMemoryRun(sim, start).run()
    trace = sim.trace(mode, seed, guards)
    logger.info('Simulated %s with %d agents: %d rounds, %d broadcasts, %d guards',
                mode.value, agent_count, trace.total_rounds, trace.total_broadcasts, len(guards))
    return SimResult(guards, trace)


def simulate_warmup(polygon: PolygonWithHoles, agent_count: int,
                    start: Point | None = None, seed: int = 0) -> SimResult:
    return simulate(polygon, agent_count, start, Mode.WARMUP, seed)


def simulate_small_memory(polygon: PolygonWithHoles, agent_count: int,
                          start: Point | None = None, seed: int = 0) -> SimResult:
    return simulate(polygon, agent_count, start, Mode.SMALL_MEMORY, seed)


# ── Model checking ───────────────────────────────────────────────────


@dataclass
class CheckResult:
    ok: bool
    rule: str | None = None
    round: int | None = None

    def __bool__(self) -> bool:
        return self.ok


def model_check(trace: SimTrace, polygon: PolygonWithHoles) -> CheckResult:
    """Replay a trace and report the first broken rule, if any."""
    visible: dict[tuple[Point, Point], bool] = {}

    def sees(a: Point, b: Point) -> bool:
        key = (a, b) if a <= b else (b, a)
        if key not in visible:
            visible[key] = mutually_visible(polygon, a, b)
        return visible[key]

    positions: dict[int, Point] = {}
    halted: set[int] = set()
    for rnd in trace.rounds:
        stage = 0
        looks: dict[int, Point] = {}
        pending: dict[int, Point] = {}
        for ev in rnd.events:
            s = _STAGE[type(ev)]
            if s < stage:
                return CheckResult(False, 'stage-order', rnd.index)
            stage = s
            if isinstance(ev, Look):
                if ev.agent in halted:
                    return CheckResult(False, 'halted-agent-acts', rnd.index)
                if ev.agent in positions and positions[ev.agent] != ev.position:
                    return CheckResult(False, 'look-position', rnd.index)
                if locate_point(polygon, ev.position) is Location.EXTERIOR:
                    return CheckResult(False, 'outside-polygon', rnd.index)
                looks[ev.agent] = ev.position
            elif isinstance(ev, Broadcast):
                if ev.sender not in looks or ev.sender in halted:
                    return CheckResult(False, 'inactive-agent', rnd.index)
                if len(ev.words) > PAYLOAD_WORDS:
                    return CheckResult(False, 'payload-size', rnd.index)
                origin = looks[ev.sender]
                expected = tuple(sorted(a for a, pos in looks.items()
                                        if a != ev.sender and sees(origin, pos)))
                if tuple(sorted(ev.receivers)) != expected:
                    return CheckResult(False, 'delivery', rnd.index)
            elif isinstance(ev, Halt):
                if ev.agent not in looks or ev.agent in halted:
                    return CheckResult(False, 'inactive-agent', rnd.index)
                halted.add(ev.agent)
            elif isinstance(ev, Move):
                if ev.agent not in looks or ev.agent in halted:
                    return CheckResult(False, 'inactive-agent', rnd.index)
                if ev.agent in pending:
                    return CheckResult(False, 'double-move', rnd.index)
                if ev.origin != looks[ev.agent]:
                    return CheckResult(False, 'move-origin', rnd.index)
                if locate_point(polygon, ev.target) is Location.EXTERIOR \
                        or not sees(ev.origin, ev.target):
                    return CheckResult(False, 'move-visibility', rnd.index)
                pending[ev.agent] = ev.target
        missing = [a for a in positions if a not in halted and a not in looks]
        if missing:
            return CheckResult(False, 'missing-look', rnd.index)
        positions.update(looks)
        positions.update(pending)
    for aid, peak in trace.peak_memory.items():
        if peak > _word_budget(trace, polygon, aid):
            return CheckResult(False, 'memory-budget', None)
    return CheckResult(True)


def _word_budget(trace: SimTrace, polygon: PolygonWithHoles, aid: int) -> int:
    """Budget the mode allows; the budgets recorded in the trace are not trusted."""
    if trace.mode == Mode.WARMUP.value:
        leader = min(trace.agent_ids, default=None)
        return leader_words(polygon.n) if aid == leader else FOLLOWER_WORDS
    if trace.mode == Mode.SMALL_MEMORY.value:
        return SMALL_MEMORY_WORDS
    return 0
