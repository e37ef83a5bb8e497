"""The interpreter: one reasoning tick = normative pass + affective pass + decay.

The normative pass is a step machine over the labels in ``StepLabel``.  Each
call to ``step`` executes the label the agent is currently at and moves it to
a successor allowed by ``EDGES``:

* the default path visits every label once, in declaration order;
* ``ProcMsg`` jumps straight to ``AffModB`` after consuming a norm-feedback
  reply, so societal responses reach the affective state without waiting for
  plan work;
* ``ExecInt`` jumps to ``AffModB`` after any appraisal-producing step, so the
  emotion lands in memory within the same tick.

The affective pass (``run_affective_cycle``) appraises fresh memory, folds
unapplied responses into the affective state, revises plans punished by
social feedback, and queues coping actions.  ``run_decay`` then pulls the
affective state toward neutral and erodes the relevance of unreinforced
norms.  ``tick`` strings the three passes together.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field

from .affect import (
    affect_decay,
    appraise,
    cope,
    detect_social_norm,
    accumulate_feedback,
    parse_feedback,
    queue_belief_add,
    queue_belief_del,
    revise_plan,
    select_coping,
    sync_beliefs,
    update_affect,
)
from .core import (
    AffectiveStepLabel,
    AffectPair,
    AgentConfig,
    DECAY_STEP,
    Event,
    Ilf,
    IntendedMeans,
    Intention,
    MemKind,
    MemoryEvent,
    Message,
    NormativeBelief,
    SOURCE_PERCEPT,
    SOURCE_SELF,
    StepLabel,
    UbEntry,
    UbKind,
    clamp_pair,
    norm_id,
    scalar_mood,
)
from .lang import (
    LangError,
    Literal,
    NotANorm,
    StepKind,
    Sym,
    TriggerEvent,
    TriggerKind,
    TriggerType,
    norm_from_literal,
    parse_literal_text,
    parse_norm_literal,
    render_literal,
    render_plan,
)
from .norms import (
    BREAK,
    COMPLY,
    UtilityInputs,
    comply_to_norm,
    compliance_utility,
    eval_percepts,
    gen_norm_plans,
    increment_relevance,
    order_applicable_plans,
    relevance_decay,
    select_intention,
)

#: Pseudo-recipient for compliance/violation announcements.  The society
#: harness routes messages addressed here to watching agents instead of
#: delivering them to a mailbox.
OBSERVER_CHANNEL = "__observers__"

#: Allowed successor labels of the normative step machine.
EDGES: dict[StepLabel, frozenset[StepLabel]] = {
    StepLabel.Perceive: frozenset({StepLabel.ProcMsg}),
    StepLabel.ProcMsg: frozenset({StepLabel.SelEv, StepLabel.AffModB}),
    StepLabel.SelEv: frozenset({StepLabel.RelPl}),
    StepLabel.RelPl: frozenset({StepLabel.ApplPl}),
    StepLabel.ApplPl: frozenset({StepLabel.SelAppl}),
    StepLabel.SelAppl: frozenset({StepLabel.AddIM}),
    StepLabel.AddIM: frozenset({StepLabel.SelInt}),
    StepLabel.SelInt: frozenset({StepLabel.ExecInt}),
    StepLabel.ExecInt: frozenset({StepLabel.ClrInt, StepLabel.AffModB}),
    StepLabel.ClrInt: frozenset({StepLabel.AffModB}),
    StepLabel.AffModB: frozenset({StepLabel.Perceive}),
}

#: Execution order of the affective pass.
AST_ORDER: tuple[AffectiveStepLabel, ...] = (
    AffectiveStepLabel.Appr,
    AffectiveStepLabel.UpAs,
    AffectiveStepLabel.SelCs,
    AffectiveStepLabel.Cope,
)


class InterpreterFault(RuntimeError):
    """An interpreter invariant was violated; carries agent id and step."""

    def __init__(self, agent_id: str, step: str, reason: str) -> None:
        super().__init__(f"[{agent_id} @ {step}] {reason}")
        self.agent_id = agent_id
        self.step = step
        self.reason = reason


@dataclass
class EnvironmentView:
    """What one agent can see of the world during a single tick.

    ``fraction`` maps a norm's affected-roles spec ("ALL" or a role tuple)
    to the fraction of society holding one of those roles; when absent the
    whole society counts as affected.  ``socacc`` is the message-acceptance
    test applied before a mailbox message is processed (default: accept).
    """

    tick: int = 0
    n_agents: int = 1
    percepts: set = field(default_factory=set)
    fraction: object = None  # callable: roles-spec -> float
    socacc: object = None  # callable: (agent, message) -> bool
    relevance_weight: float = 1.0
    delta: float = 0.1
    decay_affect: float = 0.05
    decay_relevance: float = 0.05
    deviation_threshold: AffectPair = (0.5, 0.5)

    def fraction_affected(self, roles) -> float:
        if self.fraction is None:
            return 1.0
        return self.fraction(roles)

    def accepts(self, agent: AgentConfig, message: Message) -> bool:
        if self.socacc is None:
            return True
        return self.socacc(agent, message)


@dataclass
class TraceEntry:
    """One executed step, for the run trace."""

    tick: int
    agent: str
    step: str
    summary: str
    payload: dict = field(default_factory=dict)

    def text(self) -> str:
        return f"{self.tick}\t{self.agent}\t{self.step}\t{self.summary}"


def _entry(agent: AgentConfig, env: EnvironmentView, step_name: str, summary: str, **payload) -> TraceEntry:
    return TraceEntry(tick=env.tick, agent=agent.id, step=step_name, summary=summary, payload=payload)


# ----------------------------------------------------------------------
# normative pass: one function per step label


def _adopt_norm(agent: AgentConfig, decl) -> str | None:
    """Register a norm declaration; returns its id, or None when already held."""
    nid = norm_id(decl)
    if agent.find_norm(nid) is not None:
        return None
    nb = NormativeBelief.from_decl(decl, cycle=agent.cycle)
    agent.NB.append(nb)
    gen_norm_plans(agent.ps, nb)
    return nid


def _step_perceive(agent: AgentConfig, env: EnvironmentView) -> TraceEntry:
    agent.T.reset()
    new_p, rem_p = eval_percepts(env.percepts, agent.percept_literals())
    adopted: list[str] = []
    for lit in sorted(new_p, key=render_literal):
        queue_belief_add(agent, lit, SOURCE_PERCEPT, StepLabel.Perceive)
        if lit.functor == "norm":
            try:
                decl = norm_from_literal(lit)
            except LangError as exc:
                raise InterpreterFault(agent.id, "Perceive", f"bad norm percept: {exc}") from exc
            nid = _adopt_norm(agent, decl)
            if nid:
                adopted.append(nid)
    for lit in sorted(rem_p, key=render_literal):
        queue_belief_del(agent, lit, SOURCE_PERCEPT, StepLabel.Perceive)
    agent.s = StepLabel.ProcMsg
    summary = f"+{len(new_p)}/-{len(rem_p)} percepts"
    if adopted:
        summary += f", adopted {','.join(adopted)}"
    return _entry(
        agent,
        env,
        "Perceive",
        summary,
        new=sorted(render_literal(l) for l in new_p),
        removed=sorted(render_literal(l) for l in rem_p),
        adopted=adopted,
    )


def process_message(
    agent: AgentConfig, message: Message, env: EnvironmentView
) -> tuple[str, StepLabel, dict]:
    """Apply one mailbox message; returns (summary, next step, payload).

    Four cases:

    * Untell — retract the sender's copy of the content belief;
    * Tell annotated with a norm id — a societal response to this agent's
      own compliance/violation: reinforce the norm, shift the affective
      state by appraisal/n, remember it, and jump to AffModB;
    * Tell whose content is social feedback ``(±lit;...),[p,a]`` — judgment
      of an observed state: accumulate it under its belief condition and
      shift the affective state;
    * Tell with a norm literal — adopt the norm; any other Tell adds the
      content as a belief sourced from the sender.
    """
    content = message.content

    if message.ilf is Ilf.Untell:
        lit = _content_literal(agent, content)
        if agent.remove_belief(lit, message.sender):
            agent.C.E.append(Event(_del_trigger(lit)))
        return f"untell {content} from {message.sender}", StepLabel.SelEv, {}

    if message.norm is not None:
        nb = agent.find_norm(message.norm)
        if nb is None:
            return f"feedback for unknown norm {message.norm}", StepLabel.SelEv, {}
        before = nb.relevance
        nb.relevance = increment_relevance(nb.relevance, env.n_agents, env.delta)
        nb.reinforced_tick = env.tick
        pair = message.appraisal or (0.0, 0.0)
        agent.Ta.sigma = update_affect(agent.Ta.sigma, pair, env.n_agents)
        agent.Mem.append(
            MemoryEvent(
                tick=env.tick,
                kind=MemKind.NORM_FEEDBACK,
                pair=pair,
                norm_id=message.norm,
                source=message.sender,
                divisor=env.n_agents,
                applied=True,
            )
        )
        return (
            f"norm feedback {message.norm} rel {before:g}->{nb.relevance:g}",
            StepLabel.AffModB,
            {"norm": message.norm, "pair": list(pair), "relevance": nb.relevance},
        )

    if content.startswith("("):
        condition, pair = parse_feedback(content)
        record = accumulate_feedback(agent.feedback, condition, pair)
        agent.Ta.sigma = update_affect(agent.Ta.sigma, pair, env.n_agents)
        agent.Mem.append(
            MemoryEvent(
                tick=env.tick,
                kind=MemKind.SOCIAL_FEEDBACK,
                pair=pair,
                source=message.sender,
                divisor=env.n_agents,
                applied=True,
                payload={"condition": sorted(("+" if f else "-") + t for t, f in condition)},
            )
        )
        return (
            f"social feedback from {message.sender} acc [{record.accumulated[0]:g},{record.accumulated[1]:g}]",
            StepLabel.SelEv,
            {"accumulated": list(record.accumulated), "count": record.count},
        )

    if content.startswith("norm("):
        try:
            decl = parse_norm_literal(content)
        except NotANorm:
            decl = None
        if decl is not None:
            nid = _adopt_norm(agent, decl)
            lit = _content_literal(agent, content)
            if agent.add_belief(lit, message.sender):
                agent.C.E.append(Event(_add_trigger(lit)))
            summary = f"norm from {message.sender}: " + (nid or "already held")
            return summary, StepLabel.SelEv, {"adopted": nid}

    lit = _content_literal(agent, content)
    if agent.add_belief(lit, message.sender):
        agent.C.E.append(Event(_add_trigger(lit)))
    return f"tell {content} from {message.sender}", StepLabel.SelEv, {}


def _content_literal(agent: AgentConfig, content: str) -> Literal:
    try:
        return parse_literal_text(content)
    except LangError as exc:
        raise InterpreterFault(agent.id, "ProcMsg", f"bad message content {content!r}: {exc}") from exc


def _add_trigger(lit: Literal) -> TriggerEvent:
    return TriggerEvent(TriggerKind.ADD, TriggerType.BELIEF, lit)


def _del_trigger(lit: Literal) -> TriggerEvent:
    return TriggerEvent(TriggerKind.DEL, TriggerType.BELIEF, lit)


def _step_procmsg(agent: AgentConfig, env: EnvironmentView) -> TraceEntry:
    if not agent.M.In:
        agent.s = StepLabel.SelEv
        return _entry(agent, env, "ProcMsg", "idle")
    message = agent.M.In.pop(0)
    if not env.accepts(agent, message):
        agent.s = StepLabel.SelEv
        return _entry(agent, env, "ProcMsg", f"rejected mid {message.mid}")
    summary, nxt, payload = process_message(agent, message, env)
    agent.s = nxt
    payload["mid"] = message.mid
    return _entry(agent, env, "ProcMsg", summary, **payload)


def _step_selev(agent: AgentConfig, env: EnvironmentView) -> TraceEntry:
    agent.s = StepLabel.RelPl
    if not agent.C.E:
        return _entry(agent, env, "SelEv", "idle")
    agent.T.epsilon = agent.C.E.pop(0)
    trig = agent.T.epsilon.trigger
    text = trig.kind.value + ("!" if trig.type is TriggerType.GOAL else "") + render_literal(trig.literal)
    return _entry(agent, env, "SelEv", text)


def _step_relpl(agent: AgentConfig, env: EnvironmentView) -> TraceEntry:
    agent.s = StepLabel.ApplPl
    ev = agent.T.epsilon
    if ev is None:
        return _entry(agent, env, "RelPl", "idle")
    agent.T.R = [p for p in agent.ps if p.trigger == ev.trigger]
    if not agent.T.R:
        return _entry(agent, env, "RelPl", "no relevant plans; event dropped")
    return _entry(agent, env, "RelPl", f"{len(agent.T.R)} relevant")


def context_holds(agent: AgentConfig, context: tuple) -> bool:
    """A context conjunction holds when every positive literal is believed
    (role(r) checks the agent's roles) and every negated one is not."""
    for cl in context:
        lit = cl.literal
        if lit.functor == "role" and len(lit.args) == 1:
            arg = lit.args[0]
            name = arg.name if isinstance(arg, Sym) else str(arg)
            held = name in agent.roles
        else:
            held = agent.holds(lit)
        if held == cl.negated:
            return False
    return True


def _step_applpl(agent: AgentConfig, env: EnvironmentView) -> TraceEntry:
    agent.s = StepLabel.SelAppl
    agent.T.Ap = [p for p in agent.T.R if context_holds(agent, p.context)]
    if agent.T.epsilon is None:
        return _entry(agent, env, "ApplPl", "idle")
    return _entry(agent, env, "ApplPl", f"{len(agent.T.Ap)} applicable")


def _step_selappl(agent: AgentConfig, env: EnvironmentView) -> TraceEntry:
    agent.s = StepLabel.AddIM
    if not agent.T.Ap:
        return _entry(agent, env, "SelAppl", "idle")

    decisions: dict[str, dict] = {}

    def choose(nb: NormativeBelief) -> str:
        sigma = agent.Ta.sigma
        anticipated = clamp_pair(
            (sigma[0] + nb.pre_appraisal[0], sigma[1] + nb.pre_appraisal[1])
        )
        inputs = UtilityInputs(
            reb=agent.P.rebelliousness,
            frac_affected=env.fraction_affected(nb.roles),
            s=scalar_mood(sigma),
            s_new=scalar_mood(anticipated),
            relevance=nb.relevance,
        )
        follow, breach = compliance_utility(inputs, relevance_weight=env.relevance_weight)
        variant = COMPLY if follow >= breach else BREAK
        decisions[nb.id] = {"comply": follow, "break": breach, "chosen": variant}
        return variant

    agent.T.Ap = order_applicable_plans(
        agent.T.Ap, agent.NB, agent.cycle, agent.relevance_threshold, choose
    )
    agent.T.rho = agent.T.Ap[0]
    rho = agent.T.rho
    summary = render_plan_head(rho)
    if rho.norm_id and rho.norm_id in decisions:
        summary += f" [{decisions[rho.norm_id]['chosen']}]"
    return _entry(agent, env, "SelAppl", summary, decisions=decisions)


def render_plan_head(plan) -> str:
    trig = plan.trigger
    head = trig.kind.value + ("!" if trig.type is TriggerType.GOAL else "") + render_literal(trig.literal)
    return head


def _step_addim(agent: AgentConfig, env: EnvironmentView) -> TraceEntry:
    agent.s = StepLabel.SelInt
    rho, ev = agent.T.rho, agent.T.epsilon
    if rho is None or ev is None:
        return _entry(agent, env, "AddIM", "idle")
    means = IntendedMeans(plan=rho, remaining=list(rho.body))
    if ev.intention is None:
        intent = agent.new_intention(means)
        agent.C.I.append(intent)
        return _entry(agent, env, "AddIM", f"new intention {intent.iid}")
    ev.intention.stack.append(means)
    return _entry(agent, env, "AddIM", f"pushed onto intention {ev.intention.iid}")


def _step_selint(agent: AgentConfig, env: EnvironmentView) -> TraceEntry:
    agent.s = StepLabel.ExecInt
    agent.T.iota = select_intention(agent.C.I, agent.NB, agent.cycle, agent.relevance_threshold)
    if agent.T.iota is None:
        return _entry(agent, env, "SelInt", "idle")
    return _entry(agent, env, "SelInt", f"intention {agent.T.iota.iid}")


def _finish_means(agent: AgentConfig, intent: Intention) -> None:
    """Pop the finished plan and any finished callers; drop empty intentions."""
    intent.stack.pop()
    while intent.stack and not intent.top().remaining:
        intent.stack.pop()
    if not intent.stack:
        if intent in agent.C.I:
            agent.C.I.remove(intent)
        if agent.T.iota is intent:
            agent.T.iota = None


def _rotate(agent: AgentConfig, intent: Intention) -> None:
    if intent in agent.C.I and len(agent.C.I) > 1:
        agent.C.I.remove(intent)
        agent.C.I.append(intent)


def _announce(agent: AgentConfig, nid: str, variant: str) -> None:
    agent.M.Out.append(
        Message(
            mid=-1,
            sender=agent.id,
            ilf=Ilf.Tell,
            content=f'norm_result("{nid}","{variant}")',
            norm=nid,
            recipient=OBSERVER_CHANNEL,
        )
    )


def _step_execint(agent: AgentConfig, env: EnvironmentView) -> TraceEntry:
    intent = agent.T.iota
    if intent is None or not intent.stack:
        agent.s = StepLabel.ClrInt
        return _entry(agent, env, "ExecInt", "idle")

    means = intent.top()
    if not means.remaining:
        _finish_means(agent, intent)
        agent.s = StepLabel.ClrInt
        return _entry(agent, env, "ExecInt", f"intention {intent.iid}: plan finished")

    step_ = means.remaining.pop(0)
    appraised = False
    payload: dict = {"intention": intent.iid}

    if step_.kind is StepKind.ADD:
        queue_belief_add(agent, step_.literal, SOURCE_SELF, StepLabel.ExecInt)
        summary = "+" + render_literal(step_.literal)
    elif step_.kind is StepKind.DEL:
        queue_belief_del(agent, step_.literal, None, StepLabel.ExecInt)
        summary = "-" + render_literal(step_.literal)
    elif step_.kind is StepKind.SEND:
        recipient = step_.recipient.name if isinstance(step_.recipient, Sym) else str(step_.recipient)
        content = render_literal(step_.content)
        agent.M.Out.append(
            Message(mid=-1, sender=agent.id, ilf=Ilf.Tell, content=content, recipient=recipient)
        )
        summary = f".sendMsg({recipient}, {content})"
    elif step_.is_affect_update():
        pair = step_.affect_pair()
        agent.Ta.Ub.append(
            UbEntry(
                UbKind.APPRAISE,
                StepLabel.ExecInt,
                pair=pair,
                norm_id=means.plan.norm_id,
                variant=means.plan.variant,
            )
        )
        if means.plan.norm_id is not None:
            _announce(agent, means.plan.norm_id, means.plan.variant or COMPLY)
        appraised = True
        summary = f"affect[{pair[0]:g},{pair[1]:g}]"
        payload["norm"] = means.plan.norm_id
        payload["variant"] = means.plan.variant
    else:  # plain action
        agent.C.A.append(step_.literal)
        summary = render_literal(step_.literal)
        # Attribution: an action can comply with / violate a norm other than
        # the one that generated the executing plan (that norm's own variant
        # already carries its appraisal in the trailing affect step).
        others = [nb for nb in agent.NB if nb.id != means.plan.norm_id]
        hit = comply_to_norm(step_.literal, others, agent.cycle)
        if hit is not None:
            pair, nb = hit
            variant = COMPLY if nb.deontic == "obligation" else BREAK
            agent.Ta.Ub.append(
                UbEntry(
                    UbKind.APPRAISE,
                    StepLabel.ExecInt,
                    pair=pair,
                    norm_id=nb.id,
                    variant=variant,
                )
            )
            _announce(agent, nb.id, variant)
            appraised = True
            summary += f" [{variant} {nb.id}]"
            payload["norm"] = nb.id
            payload["variant"] = variant

    if intent.stack and not means.remaining:
        _finish_means(agent, intent)
    _rotate(agent, intent)

    agent.s = StepLabel.AffModB if appraised else StepLabel.ClrInt
    return _entry(agent, env, "ExecInt", summary, **payload)


def _step_clrint(agent: AgentConfig, env: EnvironmentView) -> TraceEntry:
    agent.s = StepLabel.AffModB
    stale = [i for i in agent.C.I if not i.stack or all(not m.remaining for m in i.stack)]
    for intent in stale:
        agent.C.I.remove(intent)
        if agent.T.iota is intent:
            agent.T.iota = None
    if not stale:
        return _entry(agent, env, "ClrInt", "idle")
    return _entry(agent, env, "ClrInt", f"cleared {len(stale)}")


def _step_affmodb(agent: AgentConfig, env: EnvironmentView) -> TraceEntry:
    changes = sync_beliefs(agent, env.tick)
    agent.s = StepLabel.Perceive
    summary = f"+{len(changes['added'])}/-{len(changes['removed'])} beliefs"
    if changes["appraised"]:
        summary += f", {len(changes['appraised'])} appraisals"
    return _entry(agent, env, "AffModB", summary, **changes)


_STEP_FUNCS = {
    StepLabel.Perceive: _step_perceive,
    StepLabel.ProcMsg: _step_procmsg,
    StepLabel.SelEv: _step_selev,
    StepLabel.RelPl: _step_relpl,
    StepLabel.ApplPl: _step_applpl,
    StepLabel.SelAppl: _step_selappl,
    StepLabel.AddIM: _step_addim,
    StepLabel.SelInt: _step_selint,
    StepLabel.ExecInt: _step_execint,
    StepLabel.ClrInt: _step_clrint,
    StepLabel.AffModB: _step_affmodb,
}


def step(agent: AgentConfig, env: EnvironmentView) -> TraceEntry:
    """Execute the label the agent is at; advance to an allowed successor."""
    label = agent.s
    entry = _STEP_FUNCS[label](agent, env)
    if agent.s not in EDGES[label]:
        raise InterpreterFault(agent.id, label.value, f"illegal transition to {agent.s.value}")
    check_invariants(agent, label.value)
    return entry


# ----------------------------------------------------------------------
# affective pass


def run_affective_cycle(agent: AgentConfig, env: EnvironmentView) -> list[TraceEntry]:
    """Appr -> UpAs -> SelCs -> Cope over memory entries not yet appraised."""
    entries: list[TraceEntry] = []
    batch = [ev for ev in agent.Mem if not ev.appraised]

    # Appr: derive appraisal variables from fresh memory.
    agent.ast = AffectiveStepLabel.Appr
    appraised_n = 0
    for ev in batch:
        av = appraise(ev, agent.cc, agent.P)
        if av is not None:
            agent.Ta.Av = av
            appraised_n += 1
        ev.appraised = True
    entries.append(_entry(agent, env, "Appr", f"{appraised_n}/{len(batch)} appraised"))

    # UpAs: fold responses not already applied into the affective state.
    agent.ast = AffectiveStepLabel.UpAs
    applied_n = 0
    for ev in batch:
        if not ev.applied:
            agent.Ta.sigma = update_affect(agent.Ta.sigma, ev.pair, ev.divisor)
            ev.applied = True
            applied_n += 1
    sig = agent.Ta.sigma
    entries.append(
        _entry(agent, env, "UpAs", f"{applied_n} applied, sigma [{sig[0]:.3f},{sig[1]:.3f}]")
    )

    # SelCs: revise plans punished by accumulated social feedback, then pick
    # the coping strategies matching the current affective state.
    agent.ast = AffectiveStepLabel.SelCs
    revised: list[str] = []
    for key in list(agent.feedback):
        record = agent.feedback[key]
        flagged = detect_social_norm(
            record, agent.ps, agent.literals(), env.deviation_threshold
        )
        for plan in flagged:
            replacement = revise_plan(plan, record, agent.literals())
            agent.ps[agent.ps.index(plan)] = replacement
            revised.append(render_plan(replacement))
    agent.Ta.Cs = select_coping(agent.P.coping, agent.Ta.sigma)
    summary = f"{len(agent.Ta.Cs)} coping"
    if revised:
        summary += f", revised {len(revised)} plan(s)"
    entries.append(_entry(agent, env, "SelCs", summary, revised=revised))

    # Cope: queue one intention per selected coping action.
    agent.ast = AffectiveStepLabel.Cope
    added = cope(agent.Ta.Cs, agent)
    entries.append(_entry(agent, env, "Cope", f"{len(added)} coping intentions"))

    agent.ast = AffectiveStepLabel.Appr
    return entries


# ----------------------------------------------------------------------
# temporal-dynamics pass


def run_decay(agent: AgentConfig, env: EnvironmentView) -> TraceEntry:
    """Affect decays toward neutral; unreinforced norm relevance erodes."""
    agent.Ta.sigma = affect_decay(agent.Ta.sigma, agent.P.traits, env.decay_affect)
    relevance_decay(agent.NB, agent.Mem, env.decay_relevance, tick=env.tick)
    sig = agent.Ta.sigma
    return _entry(
        agent,
        env,
        DECAY_STEP,
        f"sigma [{sig[0]:.3f},{sig[1]:.3f}]",
        sigma=[sig[0], sig[1]],
        relevance={nb.id: nb.relevance for nb in agent.NB},
        beliefs=sorted(render_literal(l) for l in agent.literals()),
        feedback={
            "|".join(sorted(("+" if f else "-") + t for t, f in key)): list(rec.accumulated)
            for key, rec in agent.feedback.items()
        },
    )


# ----------------------------------------------------------------------
# one full tick


def tick(agent: AgentConfig, env: EnvironmentView) -> tuple[list[TraceEntry], list[Message]]:
    """Run one complete reasoning tick; returns (trace entries, outbound).

    The normative pass starts at Perceive and runs until AffModB completes;
    the affective pass and the decay step follow.  Outbound messages are
    drained from the mailbox for the harness to deliver.
    """
    if agent.s is not StepLabel.Perceive:
        raise InterpreterFault(agent.id, agent.s.value, "tick must start at Perceive")
    entries: list[TraceEntry] = []
    for guard in itertools.count():
        if guard > len(EDGES):
            raise InterpreterFault(agent.id, agent.s.value, "normative pass did not terminate")
        label = agent.s
        entries.append(step(agent, env))
        if label is StepLabel.AffModB:
            break
    entries.extend(run_affective_cycle(agent, env))
    entries.append(run_decay(agent, env))
    agent.cycle += 1
    outbound = agent.M.Out
    agent.M.Out = []
    return entries, outbound


# ----------------------------------------------------------------------
# invariants


def check_invariants(agent: AgentConfig, at: str) -> None:
    sig = agent.Ta.sigma
    if not (-1.0 <= sig[0] <= 1.0 and -1.0 <= sig[1] <= 1.0):
        raise InterpreterFault(agent.id, at, f"affective state out of range: {sig}")
    for nb in agent.NB:
        if nb.relevance < 0:
            raise InterpreterFault(agent.id, at, f"negative relevance on {nb.id}")
    known = {nb.id for nb in agent.NB}
    for plan in agent.ps:
        if plan.norm_id is not None and plan.norm_id not in known:
            raise InterpreterFault(agent.id, at, f"plan references unknown norm {plan.norm_id}")
    for intent in agent.C.I:
        if not intent.stack:
            raise InterpreterFault(agent.id, at, f"empty intention {intent.iid} in C.I")
    if agent.T.R and agent.T.Ap:
        rel_ids = {id(p) for p in agent.T.R}
        if any(id(p) not in rel_ids for p in agent.T.Ap):
            raise InterpreterFault(agent.id, at, "applicable plans not drawn from relevant plans")
    mids = [m.mid for m in agent.M.In if m.mid >= 0]
    if len(mids) != len(set(mids)):
        raise InterpreterFault(agent.id, at, "duplicate message ids in In")
    if len(agent.Mem) >= 2 and agent.Mem[-1].tick < agent.Mem[-2].tick:
        raise InterpreterFault(agent.id, at, "memory ticks not monotone")
