"""Discrete-time mine world: tunnels, workers, CO/temperature fields,
seeded-noise sensors, emergencies, and actuator effects.

Tunnels are edges between junctions; two tunnels are adjacent when they share
a junction. Each step applies, in order: event emission, field diffusion and
decay, worker movement, mine-evacuation enforcement, tick increment. All
randomness (worker walks, sensor noise) flows through one seeded generator,
so a seed plus a command/event sequence fixes the whole trajectory.
"""

from __future__ import annotations

import random
from collections import deque
from dataclasses import dataclass, replace
from typing import Iterable, Mapping

from .rdf import NUMBER, Graph, Iri, Literal, Triple, format_number
from .vocab import (
    DEFAULT_BASE,
    RDF_TYPE,
    SOSA_HAS_FEATURE_OF_INTEREST,
    SOSA_HAS_RESULT,
    SOSA_OBSERVED_PROPERTY,
    default_prefixes,
)

WORKING = "working"
EVACUATING = "evacuating"
SURFACED = "surfaced"

CO = "CO"
TEMPERATURE = "temperature"
LOCATION = "location"
_SENSOR_KINDS = (CO, TEMPERATURE, LOCATION)

GAS_LEAK = "GasLeak"
FIRE = "Fire"

# Sensor kind → observed-property local name in the deployment vocabulary.
PROPERTY_LOCAL_NAMES = {CO: "CO", TEMPERATURE: "Temperature", LOCATION: "Location"}


@dataclass(frozen=True)
class Junction:
    id: str
    x: float
    y: float


@dataclass(frozen=True)
class Tunnel:
    id: str
    ends: tuple[str, str]
    length: float
    is_exit: bool = False


@dataclass
class Worker:
    id: str
    tunnel: str
    status: str = WORKING


@dataclass(frozen=True)
class Sensor:
    id: str
    kind: str
    attach: str
    period: int = 1
    sigma: float = 0.0

    def __post_init__(self):
        if self.kind not in _SENSOR_KINDS:
            raise ValueError(f"sensor {self.id}: unknown kind {self.kind!r}")
        if self.period < 1:
            raise ValueError(f"sensor {self.id}: period must be >= 1")


@dataclass(frozen=True)
class WorldEvent:
    kind: str
    tunnel: str
    co_rate: float = 0.0
    heat_rate: float = 0.0
    duration: int = 1
    start: int | None = None

    def __post_init__(self):
        if self.kind not in (GAS_LEAK, FIRE):
            raise ValueError(f"unknown event kind {self.kind!r}")
        if self.duration < 1:
            raise ValueError("event duration must be >= 1")
        if self.co_rate < 0 or self.heat_rate < 0:
            raise ValueError("event rates must be >= 0")

    def active_at(self, tick: int) -> bool:
        return self.start is not None and self.start <= tick < self.start + self.duration


def event_from_doc(doc: Mapping[str, object]) -> WorldEvent:
    """Event in JSON form: kind, tunnel, rate/heat+co_rate, duration."""
    kind = str(doc.get("kind", ""))
    tunnel = str(doc.get("tunnel", ""))
    duration = int(doc.get("duration", 1))  # type: ignore[arg-type]
    if kind == GAS_LEAK:
        return WorldEvent(kind=kind, tunnel=tunnel, co_rate=float(doc.get("rate", 0)),  # type: ignore[arg-type]
                          duration=duration)
    return WorldEvent(kind=kind, tunnel=tunnel,
                      co_rate=float(doc.get("co_rate", 0)),  # type: ignore[arg-type]
                      heat_rate=float(doc.get("heat", 0)),  # type: ignore[arg-type]
                      duration=duration)


@dataclass(frozen=True)
class WorldConstants:
    delta: float = 0.1  # diffusion toward neighbor mean, per tick
    lam: float = 0.05  # decay toward ambient, per tick
    ambient_co: float = 2.0
    ambient_temp: float = 18.0
    p_move: float = 0.3


class MineWorld:
    """Full simulator state; owned by one loop, exported by value snapshots."""

    def __init__(
        self,
        junctions: Iterable[Junction],
        tunnels: Iterable[Tunnel],
        workers: Iterable[Worker],
        sensors: Iterable[Sensor],
        constants: WorldConstants = WorldConstants(),
        seed: int = 0,
        base: str = DEFAULT_BASE,
    ):
        self.junctions = {j.id: j for j in junctions}
        self.tunnels = {t.id: t for t in tunnels}
        self.tunnel_order = list(self.tunnels)
        self.workers = list(workers)
        self.sensors = list(sensors)
        self.constants = constants
        self.base = base
        self.seed = seed
        self.rng = random.Random(seed)
        self.tick = 0
        self.geofenced: set[str] = set()
        self.mine_evacuation = False
        self.events: list[WorldEvent] = []
        self._workers_by_id = {w.id: w for w in self.workers}
        self._validate()
        self.adjacency = self._build_adjacency()
        self.co = {tid: constants.ambient_co for tid in self.tunnels}
        self.temp = {tid: constants.ambient_temp for tid in self.tunnels}

    def _validate(self) -> None:
        for t in self.tunnels.values():
            for j in t.ends:
                if j not in self.junctions:
                    raise ValueError(f"tunnel {t.id}: unknown junction {j!r}")
        for w in self.workers:
            if w.tunnel not in self.tunnels:
                raise ValueError(f"worker {w.id}: unknown tunnel {w.tunnel!r}")
        for s in self.sensors:
            if s.kind == LOCATION:
                if s.attach not in self._workers_by_id:
                    raise ValueError(f"sensor {s.id}: unknown worker {s.attach!r}")
            elif s.attach not in self.tunnels:
                raise ValueError(f"sensor {s.id}: unknown tunnel {s.attach!r}")

    def _build_adjacency(self) -> dict[str, list[str]]:
        by_junction: dict[str, set[str]] = {}
        for t in self.tunnels.values():
            for j in t.ends:
                by_junction.setdefault(j, set()).add(t.id)
        adjacency: dict[str, list[str]] = {}
        for t in self.tunnels.values():
            neighbors: set[str] = set()
            for j in t.ends:
                neighbors.update(by_junction[j])
            neighbors.discard(t.id)
            adjacency[t.id] = sorted(neighbors)
        return adjacency

    @classmethod
    def from_config(cls, config: Mapping[str, object], seed: int | None = None) -> "MineWorld":
        raw_constants = dict(config.get("constants", {}))  # type: ignore[arg-type]
        constants = WorldConstants(
            delta=float(raw_constants.get("delta", 0.1)),
            lam=float(raw_constants.get("lambda", 0.05)),
            ambient_co=float(raw_constants.get("ambient_co", 2.0)),
            ambient_temp=float(raw_constants.get("ambient_temp", 18.0)),
            p_move=float(raw_constants.get("p_move", 0.3)),
        )
        junctions = [Junction(str(j["id"]), float(j.get("x", 0)), float(j.get("y", 0)))
                     for j in config.get("junctions", [])]  # type: ignore[union-attr]
        tunnels = [
            Tunnel(
                id=str(t["id"]),
                ends=(str(t["ends"][0]), str(t["ends"][1])),
                length=float(t.get("length", 100)),
                is_exit=bool(t.get("exit", False)),
            )
            for t in config.get("tunnels", [])  # type: ignore[union-attr]
        ]
        workers = [Worker(str(w["id"]), str(w["tunnel"]))
                   for w in config.get("workers", [])]  # type: ignore[union-attr]
        sensors = [
            Sensor(
                id=str(s["id"]),
                kind=str(s["kind"]),
                attach=str(s["attach"]),
                period=int(s.get("period", 1)),
                sigma=float(s.get("sigma", 0.0)),
            )
            for s in config.get("sensors", [])  # type: ignore[union-attr]
        ]
        if seed is None:
            seed = int(config.get("seed", 0))  # type: ignore[arg-type]
        return cls(
            junctions,
            tunnels,
            workers,
            sensors,
            constants,
            seed=seed,
            base=str(config.get("base", DEFAULT_BASE)),
        )

    # ------------------------------------------------------------------
    # Dynamics
    # ------------------------------------------------------------------

    def step(self) -> "MineWorld":
        c = self.constants
        # 1. Active events pour into their tunnel's fields.
        for e in self.events:
            if e.active_at(self.tick):
                self.co[e.tunnel] += e.co_rate
                self.temp[e.tunnel] += e.heat_rate
        # 2. Diffusion toward the neighbor mean, then decay toward ambient.
        for fields, ambient in ((self.co, c.ambient_co), (self.temp, c.ambient_temp)):
            if c.delta > 0:
                before = dict(fields)
                for tid in self.tunnel_order:
                    neighbors = self.adjacency[tid]
                    if neighbors:
                        mean = sum(before[n] for n in neighbors) / len(neighbors)
                        fields[tid] = before[tid] + c.delta * (mean - before[tid])
            for tid in self.tunnel_order:
                v = fields[tid] + c.lam * (ambient - fields[tid])
                fields[tid] = max(0.0, v)
        for tid in self.tunnel_order:
            self.temp[tid] = max(c.ambient_temp, self.temp[tid])
        # 3. Worker movement, in roster order so the rng stream is stable.
        for w in self.workers:
            if w.status == WORKING:
                if self.rng.random() < c.p_move:
                    options = [n for n in self.adjacency[w.tunnel] if n not in self.geofenced]
                    if options:
                        w.tunnel = self.rng.choice(options)
            elif w.status == EVACUATING:
                if self.tunnels[w.tunnel].is_exit:
                    w.status = SURFACED
                    continue
                path = self._evacuation_path(w.tunnel)
                if path:
                    w.tunnel = path[0]
                    if self.tunnels[w.tunnel].is_exit:
                        w.status = SURFACED
        # 4. A declared mine evacuation keeps catching working workers.
        if self.mine_evacuation:
            for w in self.workers:
                if w.status == WORKING:
                    w.status = EVACUATING
        # 5.
        self.tick += 1
        self.events = [e for e in self.events if self.tick < (e.start or 0) + e.duration]
        return self

    def _evacuation_path(self, start: str) -> list[str]:
        """Tunnels to walk (hop by hop) to the nearest exit; [] when trapped.

        Geofenced tunnels are avoided; when that cuts off every exit, the
        fence is ignored rather than leaving the worker underground.
        """
        for avoid_fence in (True, False):
            parent: dict[str, str | None] = {start: None}
            queue = deque([start])
            while queue:
                current = queue.popleft()
                if self.tunnels[current].is_exit:
                    hops: list[str] = []
                    at: str | None = current
                    while at is not None and parent[at] is not None:
                        hops.append(at)
                        at = parent[at]
                    return list(reversed(hops))
                for n in self.adjacency[current]:
                    if n in parent:
                        continue
                    if avoid_fence and n in self.geofenced:
                        continue
                    parent[n] = current
                    queue.append(n)
        return []

    # ------------------------------------------------------------------
    # Sensing
    # ------------------------------------------------------------------

    def _iri(self, local: str) -> Iri:
        return Iri(self.base + local)

    def take_readings(self) -> list[tuple[str, tuple[Triple, ...]]]:
        """One observation per due sensor, as (sensor id, four triples).

        Each call is a fresh measurement: noisy sensors draw from the world
        rng, so sample at most once per tick.
        """
        readings: list[tuple[str, tuple[Triple, ...]]] = []
        for s in self.sensors:
            if self.tick % s.period != 0:
                continue
            observation = self._iri(f"obs-{s.id}-{self.tick}")
            prop = self._iri(PROPERTY_LOCAL_NAMES[s.kind])
            if s.kind == LOCATION:
                worker = self._workers_by_id[s.attach]
                feature, feature_type = self._iri(worker.id), self._iri("Worker")
                result: Iri | Literal = self._iri(worker.tunnel)
            else:
                value = self.co[s.attach] if s.kind == CO else self.temp[s.attach]
                if s.sigma > 0:
                    value += self.rng.gauss(0.0, s.sigma)
                feature, feature_type = self._iri(s.attach), self._iri("Tunnel")
                result = Literal(format_number(max(0.0, value)), NUMBER)
            readings.append(
                (
                    s.id,
                    (
                        Triple(observation, SOSA_OBSERVED_PROPERTY, prop),
                        Triple(observation, SOSA_HAS_RESULT, result),
                        Triple(observation, SOSA_HAS_FEATURE_OF_INTEREST, feature),
                        Triple(feature, RDF_TYPE, feature_type),
                    ),
                )
            )
        return readings

    # ------------------------------------------------------------------
    # External effects
    # ------------------------------------------------------------------

    def require_tunnel(self, tunnel_id: str) -> None:
        if tunnel_id not in self.tunnels:
            raise ValueError(f"unknown tunnel id {tunnel_id!r}")

    def snapshot(self) -> dict:
        """JSON-shaped view of the whole state, stable across identical runs."""
        return {
            "tick": self.tick,
            "mineEvacuation": self.mine_evacuation,
            "junctions": [{"id": j.id, "x": j.x, "y": j.y} for j in self.junctions.values()],
            "tunnels": [
                {
                    "id": t.id,
                    "ends": list(t.ends),
                    "length": t.length,
                    "exit": t.is_exit,
                    "co": self.co[t.id],
                    "temperature": self.temp[t.id],
                    "geofenced": t.id in self.geofenced,
                }
                for t in self.tunnels.values()
            ],
            "workers": [{"id": w.id, "tunnel": w.tunnel, "status": w.status} for w in self.workers],
            "events": [
                {
                    "kind": e.kind,
                    "tunnel": e.tunnel,
                    "coRate": e.co_rate,
                    "heatRate": e.heat_rate,
                    "start": e.start,
                    "duration": e.duration,
                }
                for e in self.events
                if e.active_at(self.tick)
            ],
        }

    # ------------------------------------------------------------------
    # Schema bootstrap
    # ------------------------------------------------------------------

    def bootstrap_graph(self) -> Graph:
        """Synthetic probe data covering every sensor and actuator shape.

        Used to extract a schema before any real tick has run; draws no
        randomness, so it never perturbs the simulation trajectory.
        """
        graph = Graph(prefixes=default_prefixes(self.base))
        for s in self.sensors:
            observation = self._iri(f"probe-{s.id}")
            prop = self._iri(PROPERTY_LOCAL_NAMES[s.kind])
            if s.kind == LOCATION:
                worker = self._workers_by_id[s.attach]
                feature, feature_type = self._iri(worker.id), self._iri("Worker")
                result: Iri | Literal = self._iri(worker.tunnel)
            else:
                value = self.co[s.attach] if s.kind == CO else self.temp[s.attach]
                feature, feature_type = self._iri(s.attach), self._iri("Tunnel")
                result = Literal(format_number(value), NUMBER)
            graph.update(
                [
                    Triple(observation, SOSA_OBSERVED_PROPERTY, prop),
                    Triple(observation, SOSA_HAS_RESULT, result),
                    Triple(observation, SOSA_HAS_FEATURE_OF_INTEREST, feature),
                    Triple(feature, RDF_TYPE, feature_type),
                ]
            )
        if self.tunnels:
            target = self._iri(self.tunnel_order[0])
            targets = self._iri("targets")
            for local, command_class in (
                ("cap-evacuate-tunnel", "EvacuateTunnelCommand"),
                ("cap-geofence-tunnel", "GeofenceTunnelCommand"),
            ):
                command = self._iri(local)
                graph.update(
                    [
                        Triple(command, RDF_TYPE, self._iri(command_class)),
                        Triple(command, targets, target),
                        Triple(target, RDF_TYPE, self._iri("Tunnel")),
                    ]
                )
            graph.add(Triple(self._iri("cap-evacuate-mine"), RDF_TYPE, self._iri("EvacuateMineCommand")))
        return graph


def emit_observations(world: MineWorld) -> Graph:
    """This tick's due observations merged into one graph."""
    graph = Graph(prefixes=default_prefixes(world.base))
    for _, triples in world.take_readings():
        graph.update(triples)
    return graph


def inject_event(world: MineWorld, event: WorldEvent) -> MineWorld:
    """Activate an event now; it contributes for the next `duration` steps."""
    world.require_tunnel(event.tunnel)
    world.events.append(replace(event, start=world.tick))
    return world


def apply_actuator(world: MineWorld, command) -> MineWorld:
    """Execute an actuator command; actuator state never auto-reverts."""
    if command.kind == "EvacuateTunnel":
        world.require_tunnel(command.target)
        for w in world.workers:
            if w.tunnel == command.target and w.status == WORKING:
                w.status = EVACUATING
    elif command.kind == "GeofenceTunnel":
        world.require_tunnel(command.target)
        world.geofenced.add(command.target)
    elif command.kind == "EvacuateMine":
        world.mine_evacuation = True
        for w in world.workers:
            if w.status == WORKING:
                w.status = EVACUATING
    else:
        raise ValueError(f"unknown actuator command kind {command.kind!r}")
    return world
