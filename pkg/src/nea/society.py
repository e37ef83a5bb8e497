"""Society harness: runs a set of agents against a scenario, tick by tick.

The harness owns everything outside a single agent's head: the shared clock,
the message bus (delivery at tick boundaries, one fresh id per delivered
copy), scheduled percept pulses, and the observation fabric — compliance and
violation announcements are routed to the issuing authority, whose reaction
policy answers the actor with an appraisal-carrying reply; watching agents
get a per-tick view of the public state and answer norm-deviant states with
social feedback.

Runs are deterministic for a given scenario and seed: agents are processed
in roster order, policies are pure, and the run seed's only consumer is the
shuffle applied to messages delivered to the same recipient in the same tick.
"""

from __future__ import annotations

import csv
import itertools
import json
import random
from dataclasses import dataclass, field
from pathlib import Path

from .affect import render_feedback
from .core import (
    AgentConfig,
    Ilf,
    Message,
    agent_from_program,
)
from .cycle import OBSERVER_CHANNEL, EnvironmentView, TraceEntry, tick as agent_tick
from .lang import Literal, parse_agent_program, parse_literal_text, render_literal

#: Broadcast pseudo-recipient: everyone except the sender.
BROADCAST = "ALL"

METRICS_COLUMNS = (
    "tick",
    "agent",
    "pleasure",
    "arousal",
    "norm_id",
    "relevance",
    "action",
    "variant",
    "society_pleasure",
    "society_arousal",
)


class ScenarioError(ValueError):
    """The scenario file is malformed or inconsistent."""


@dataclass
class PerceptPulse:
    agents: tuple[str, ...]
    literal: Literal
    at: int | None = None  # one-shot tick
    start: int | None = None  # periodic: first tick
    period: int | None = None

    def fires(self, t: int) -> bool:
        if self.at is not None:
            return t == self.at
        return t >= self.start and (t - self.start) % self.period == 0


@dataclass
class ObserverPolicy:
    """Harness-level observation fabric configuration."""

    public: tuple[str, ...] = ()  # functors visible in the public digest
    authority: str | None = None  # agent answering norm announcements
    reactions: dict = field(default_factory=dict)  # variant -> appraisal pair
    observers: tuple[str, ...] = ()  # agents judging the public state
    condition: tuple[str, ...] = ()  # literal texts of the punished state
    pair: tuple[float, float] = (0.0, 0.0)  # feedback appraisal
    target_roles: tuple[str, ...] = ()  # roles whose holders are watched


@dataclass
class ScenarioConfig:
    name: str
    ticks: int
    seed: int
    agents: list[dict]  # {"id", "program" (source text), "roles"}
    pulses: list[PerceptPulse]
    observation: ObserverPolicy
    delta: float = 0.1
    relevance_weight: float = 1.0
    relevance_threshold: float = 25.0
    decay_affect: float = 0.05
    decay_relevance: float = 0.05
    deviation_threshold: tuple[float, float] = (0.5, 0.5)

    @classmethod
    def load(cls, path: str | Path) -> "ScenarioConfig":
        path = Path(path)
        try:
            raw = json.loads(path.read_text(encoding="utf-8"))
        except json.JSONDecodeError as exc:
            raise ScenarioError(f"{path}: not valid JSON: {exc}") from exc
        return cls.from_dict(raw, base=path.parent)

    @classmethod
    def from_dict(cls, raw: dict, base: Path | None = None) -> "ScenarioConfig":
        def need(key, typ):
            if key not in raw:
                raise ScenarioError(f"scenario is missing {key!r}")
            value = raw[key]
            if not isinstance(value, typ):
                raise ScenarioError(f"scenario {key!r} must be {typ.__name__}")
            return value

        agents_raw = need("agents", list)
        if not agents_raw:
            raise ScenarioError("scenario declares no agents")
        agents: list[dict] = []
        seen: set[str] = set()
        for spec in agents_raw:
            if not isinstance(spec, dict) or "id" not in spec or "program" not in spec:
                raise ScenarioError("each agent needs an id and a program")
            if spec["id"] in seen:
                raise ScenarioError(f"duplicate agent id {spec['id']!r}")
            seen.add(spec["id"])
            source = spec["program"]
            if isinstance(source, str) and source.endswith(".nea"):
                if base is None:
                    raise ScenarioError("program file paths need a scenario directory")
                source = (base / source).read_text(encoding="utf-8")
            agents.append(
                {"id": spec["id"], "program": source, "roles": tuple(spec.get("roles", ()))}
            )

        pulses: list[PerceptPulse] = []
        for p in raw.get("percepts", ()):
            targets = tuple(p.get("agents", ()))
            unknown = [a for a in targets if a not in seen]
            if unknown:
                raise ScenarioError(f"percept pulse targets unknown agents {unknown}")
            lit = parse_literal_text(p["literal"])
            if "at" in p:
                pulses.append(PerceptPulse(targets, lit, at=int(p["at"])))
            elif "from" in p and "period" in p:
                period = int(p["period"])
                if period <= 0:
                    raise ScenarioError("percept period must be positive")
                pulses.append(
                    PerceptPulse(targets, lit, start=int(p["from"]), period=period)
                )
            else:
                raise ScenarioError("percept pulse needs 'at' or 'from'+'period'")

        obs_raw = raw.get("observation", {})
        feedback = obs_raw.get("feedback", {})
        observation = ObserverPolicy(
            public=tuple(obs_raw.get("public", ())),
            authority=obs_raw.get("authority"),
            reactions={k: tuple(v) for k, v in obs_raw.get("reactions", {}).items()},
            observers=tuple(feedback.get("observers", ())),
            condition=tuple(feedback.get("condition", ())),
            pair=tuple(feedback.get("pair", (0.0, 0.0))),
            target_roles=tuple(feedback.get("targets_roles", ())),
        )
        if observation.authority is not None and observation.authority not in seen:
            raise ScenarioError(f"observation authority {observation.authority!r} is not an agent")
        for obs in observation.observers:
            if obs not in seen:
                raise ScenarioError(f"observer {obs!r} is not an agent")

        params = raw.get("params", {})
        return cls(
            name=str(raw.get("name", "scenario")),
            ticks=int(need("ticks", int)),
            seed=int(raw.get("seed", 0)),
            agents=agents,
            pulses=pulses,
            observation=observation,
            delta=float(params.get("delta", 0.1)),
            relevance_weight=float(params.get("relevance_weight", 1.0)),
            relevance_threshold=float(params.get("relevance_threshold", 25.0)),
            decay_affect=float(params.get("decay_affect", 0.05)),
            decay_relevance=float(params.get("decay_relevance", 0.05)),
            deviation_threshold=tuple(params.get("deviation_threshold", (0.5, 0.5))),
        )


# ----------------------------------------------------------------------
# the running society


def fraction_affected(roster: dict[str, AgentConfig], roles) -> float:
    """Fraction of the society holding one of the affected roles."""
    if roles == "ALL":
        return 1.0
    wanted = set(roles)
    hit = sum(1 for agent in roster.values() if wanted & set(agent.roles))
    return hit / len(roster)


def society_mood(roster: dict[str, AgentConfig]) -> tuple[float, float]:
    n = len(roster)
    p = sum(agent.Ta.sigma[0] for agent in roster.values()) / n
    a = sum(agent.Ta.sigma[1] for agent in roster.values()) / n
    return p, a


@dataclass
class RunResult:
    trace: list[TraceEntry]
    metrics: list[dict]
    roster: dict[str, AgentConfig]
    seed: int
    meta: dict


class Society:
    def __init__(self, config: ScenarioConfig, *, seed: int | None = None):
        self.config = config
        self.seed = config.seed if seed is None else seed
        self.rng = random.Random(self.seed)
        self.roster: dict[str, AgentConfig] = {}
        for spec in config.agents:
            program = parse_agent_program(spec["program"])
            self.roster[spec["id"]] = agent_from_program(
                spec["id"],
                program,
                roles=spec["roles"],
                relevance_threshold=config.relevance_threshold,
            )
        self._mids = itertools.count(1)
        self._pending: dict[str, list[Message]] = {aid: [] for aid in self.roster}
        self._edge: dict[tuple[str, str], bool] = {}
        self._frac_cache: dict = {}

    # -- routing -------------------------------------------------------

    def _fraction(self, roles) -> float:
        key = roles if isinstance(roles, str) else tuple(roles)
        if key not in self._frac_cache:
            self._frac_cache[key] = fraction_affected(self.roster, roles)
        return self._frac_cache[key]

    def _deliver_copy(self, message: Message, recipient: str) -> None:
        copy = Message(
            mid=next(self._mids),
            sender=message.sender,
            ilf=message.ilf,
            content=message.content,
            norm=message.norm,
            appraisal=message.appraisal,
            recipient=recipient,
        )
        self._pending[recipient].append(copy)

    def _route(self, outbound: list[Message], announcements: list[Message]) -> None:
        for message in outbound:
            if message.recipient == OBSERVER_CHANNEL:
                announcements.append(message)
            elif message.recipient == BROADCAST:
                for aid in self.roster:
                    if aid != message.sender:
                        self._deliver_copy(message, aid)
            elif message.recipient in self.roster:
                self._deliver_copy(message, message.recipient)
            else:
                raise ScenarioError(
                    f"message from {message.sender} to unknown recipient {message.recipient!r}"
                )

    # -- observation fabric ---------------------------------------------

    def _authority_react(self, announcements: list[Message]) -> None:
        policy = self.config.observation
        if policy.authority is None:
            return
        for message in announcements:
            if message.sender == policy.authority:
                continue
            variant = _announced_variant(message)
            pair = policy.reactions.get(variant)
            if pair is None:
                continue
            reply = Message(
                mid=-1,
                sender=policy.authority,
                ilf=Ilf.Tell,
                content=f'norm_feedback("{variant}")',
                norm=message.norm,
                appraisal=pair,
            )
            self._deliver_copy(reply, message.sender)

    def _observers_react(self) -> None:
        policy = self.config.observation
        if not policy.observers or not policy.condition:
            return
        wanted = set(policy.target_roles)
        condition = [(text, True) for text in policy.condition]
        lits = [parse_literal_text(text) for text in policy.condition]
        for observer in policy.observers:
            for target_id, target in self.roster.items():
                if target_id == observer or (wanted and not (wanted & set(target.roles))):
                    continue
                state = all(target.holds(lit) for lit in lits)
                key = (observer, target_id)
                if state and not self._edge.get(key, False):
                    feedback = Message(
                        mid=-1,
                        sender=observer,
                        ilf=Ilf.Tell,
                        content=render_feedback(condition, policy.pair),
                    )
                    self._deliver_copy(feedback, target_id)
                self._edge[key] = state
        return

    # -- one tick --------------------------------------------------------

    def _percepts_for(self, agent_id: str, t: int) -> set:
        out: set = set()
        for pulse in self.config.pulses:
            if agent_id in pulse.agents and pulse.fires(t):
                out.add(pulse.literal)
        return out

    def _env(self, t: int) -> EnvironmentView:
        cfg = self.config
        return EnvironmentView(
            tick=t,
            n_agents=len(self.roster),
            fraction=self._fraction,
            relevance_weight=cfg.relevance_weight,
            delta=cfg.delta,
            decay_affect=cfg.decay_affect,
            decay_relevance=cfg.decay_relevance,
            deviation_threshold=cfg.deviation_threshold,
        )

    def run_tick(self, t: int, executor=None) -> tuple[list[TraceEntry], list[dict]]:
        # 1. deliver last tick's mail; same-tick batches arrive in an order
        #    drawn from the run seed
        for aid in self.roster:
            batch = self._pending[aid]
            if batch:
                self.rng.shuffle(batch)
                self.roster[aid].M.In.extend(batch)
                self._pending[aid] = []

        # 2. each agent runs one full tick (independent: mail and observation
        #    land at tick boundaries, so parallel execution must match serial)
        results: dict[str, tuple[list[TraceEntry], list[Message]]] = {}
        actions_before = {aid: len(agent.C.A) for aid, agent in self.roster.items()}
        if executor is None:
            for aid, agent in self.roster.items():
                env = self._env(t)
                env.percepts = self._percepts_for(aid, t)
                results[aid] = agent_tick(agent, env)
        else:
            futures = {}
            for aid, agent in self.roster.items():
                env = self._env(t)
                env.percepts = self._percepts_for(aid, t)
                futures[aid] = executor.submit(agent_tick, agent, env)
            for aid in self.roster:
                results[aid] = futures[aid].result()

        # 3. route outbound mail and announcements, then let the observation
        #    fabric react to what this tick produced
        trace: list[TraceEntry] = []
        announcements: list[Message] = []
        announced: dict[str, str] = {}
        for aid in self.roster:
            entries, outbound = results[aid]
            trace.extend(entries)
            for message in outbound:
                if message.recipient == OBSERVER_CHANNEL:
                    announced[aid] = _announced_variant(message)
            self._route(outbound, announcements)
        self._authority_react(announcements)
        self._observers_react()

        # 4. metrics rows
        mood = society_mood(self.roster)
        rows: list[dict] = []
        for aid, agent in self.roster.items():
            nb = agent.NB[0] if agent.NB else None
            new_actions = agent.C.A[actions_before[aid]:]
            rows.append(
                {
                    "tick": t,
                    "agent": aid,
                    "pleasure": f"{agent.Ta.sigma[0]:.6f}",
                    "arousal": f"{agent.Ta.sigma[1]:.6f}",
                    "norm_id": nb.id if nb else "",
                    "relevance": f"{nb.relevance:.6f}" if nb else "",
                    "action": render_literal(new_actions[-1]) if new_actions else "",
                    "variant": announced.get(aid, ""),
                    "society_pleasure": f"{mood[0]:.6f}",
                    "society_arousal": f"{mood[1]:.6f}",
                }
            )
        return trace, rows

    def run(self, *, ticks: int | None = None, parallel: bool = False) -> RunResult:
        total = self.config.ticks if ticks is None else ticks
        trace: list[TraceEntry] = []
        metrics: list[dict] = []
        executor = None
        try:
            if parallel:
                from concurrent.futures import ThreadPoolExecutor

                executor = ThreadPoolExecutor(max_workers=min(len(self.roster), 8))
            for t in range(total):
                tick_trace, rows = self.run_tick(t, executor)
                trace.extend(tick_trace)
                metrics.extend(rows)
        finally:
            if executor is not None:
                executor.shutdown()
        meta = {
            "scenario": self.config.name,
            "seed": self.seed,
            "ticks": total,
            "agents": list(self.roster),
        }
        return RunResult(trace=trace, metrics=metrics, roster=self.roster, seed=self.seed, meta=meta)


def _announced_variant(message: Message) -> str:
    lit = parse_literal_text(message.content)
    if lit.functor != "norm_result" or len(lit.args) != 2:
        return ""
    return str(lit.args[1])


# ----------------------------------------------------------------------
# writers


def write_metrics(rows: list[dict], path: Path) -> None:
    with path.open("w", encoding="utf-8", newline="") as fh:
        writer = csv.DictWriter(fh, fieldnames=METRICS_COLUMNS)
        writer.writeheader()
        writer.writerows(rows)


def write_trace_text(trace: list[TraceEntry], path: Path) -> None:
    with path.open("w", encoding="utf-8") as fh:
        for entry in trace:
            fh.write(entry.text() + "\n")


def write_trace_structured(trace: list[TraceEntry], meta: dict, path: Path) -> None:
    with path.open("w", encoding="utf-8") as fh:
        fh.write(json.dumps({"meta": meta}, sort_keys=True) + "\n")
        for entry in trace:
            record = {
                "tick": entry.tick,
                "agent": entry.agent,
                "step": entry.step,
                "summary": entry.summary,
                "payload": entry.payload,
            }
            fh.write(json.dumps(record, sort_keys=True) + "\n")
