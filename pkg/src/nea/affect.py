"""Affect engine: appraisal, affective-state updates and decay, coping,
belief synchronisation, and social-feedback accumulation with plan revision.
"""

from __future__ import annotations

from .core import (
    AffectPair,
    AgentConfig,
    AppraisalVariables,
    Event,
    FeedbackRecord,
    IntendedMeans,
    Intention,
    MemKind,
    MemoryEvent,
    SOURCE_SELF,
    StepLabel,
    UbEntry,
    UbKind,
    clamp_pair,
)
from .lang import (
    BodyStep,
    CopingStrategy,
    Literal,
    ParseError,
    PersonalityDecl,
    PlanDef,
    StepKind,
    TriggerEvent,
    TriggerKind,
    TriggerType,
    render_literal,
    tokenize,
)
from .lang.tokens import TokenType

# ----------------------------------------------------------------------
# appraisal and affective state


def appraise(
    event: MemoryEvent,
    concerns: tuple = (),
    personality: PersonalityDecl | None = None,
) -> AppraisalVariables | None:
    """Appraisal variables for a memory event; None for a zero pair.

    Desirability maps the pleasure component into [0,1]; a self-caused event
    attributes causality to the agent.  Likelihood/controllability default to
    certainty for realized events, expectedness to 0 (the event already
    surprised the agent into memory).
    """
    pleasure, _arousal = event.pair
    if event.pair == (0.0, 0.0):
        return None
    self_caused = event.kind in (
        MemKind.OWN_COMPLIANCE,
        MemKind.OWN_VIOLATION,
        MemKind.SELF_APPRAISAL,
    )
    return AppraisalVariables(
        desirability=(pleasure + 1.0) / 2.0,
        likelihood=1.0,
        expectedness=0.0,
        controllability=1.0,
        causal_attribution=1 if self_caused else 0,
    )


def update_affect(sigma: AffectPair, response: AffectPair, n_agents: int) -> AffectPair:
    """Shift the affective state by response/n, clamped to [-1,1]^2."""
    return clamp_pair((sigma[0] + response[0] / n_agents, sigma[1] + response[1] / n_agents))


def affect_decay(sigma: AffectPair, traits: tuple = (), rate: float = 0.05) -> AffectPair:
    """Multiplicative per-tick pull toward the neutral state."""
    return (sigma[0] * (1.0 - rate), sigma[1] * (1.0 - rate))


# ----------------------------------------------------------------------
# coping


def select_coping(coping: tuple[CopingStrategy, ...], sigma: AffectPair) -> list[CopingStrategy]:
    """Strategies whose pleasure x arousal rectangle contains sigma."""
    return [c for c in coping if c.matches(sigma)]


def cope(strategies: list[CopingStrategy], agent: AgentConfig) -> list[Intention]:
    """Queue one intention per strategy action at the tail of C.I."""
    added: list[Intention] = []
    for strategy in strategies:
        for action in strategy.actions:
            plan = PlanDef(
                trigger=TriggerEvent(TriggerKind.ADD, TriggerType.GOAL, Literal("cope")),
                body=(BodyStep(StepKind.ACT, action),),
            )
            intent = agent.new_intention(IntendedMeans(plan=plan, remaining=list(plan.body)))
            agent.C.I.append(intent)
            added.append(intent)
    return added


# ----------------------------------------------------------------------
# belief synchronisation (AffModB)


def sync_beliefs(agent: AgentConfig, tick: int) -> dict:
    """Apply the pending belief updates, queueing an event per actual change
    and converting queued appraisals into memory events.  Returns a summary
    of what changed (for the trace)."""
    added: list[str] = []
    removed: list[str] = []
    appraised: list[str] = []

    for entry in agent.Ta.Ub:
        if entry.kind is UbKind.ADD:
            if agent.add_belief(entry.literal, entry.source):
                agent.C.E.append(
                    Event(TriggerEvent(TriggerKind.ADD, TriggerType.BELIEF, entry.literal))
                )
                added.append(render_literal(entry.literal))
        elif entry.kind is UbKind.DEL:
            source = entry.source if entry.source else None
            if agent.remove_belief(entry.literal, source):
                agent.C.E.append(
                    Event(TriggerEvent(TriggerKind.DEL, TriggerType.BELIEF, entry.literal))
                )
                removed.append(render_literal(entry.literal))
        else:  # UbKind.APPRAISE
            if entry.variant == "comply":
                kind = MemKind.OWN_COMPLIANCE
            elif entry.variant == "break":
                kind = MemKind.OWN_VIOLATION
            else:
                kind = MemKind.SELF_APPRAISAL
            agent.Mem.append(
                MemoryEvent(
                    tick=tick,
                    kind=kind,
                    pair=entry.pair,
                    norm_id=entry.norm_id,
                    source=SOURCE_SELF,
                    divisor=1,
                )
            )
            appraised.append(entry.variant or "?")

    agent.Ta.Ub = []
    return {"added": added, "removed": removed, "appraised": appraised}


def queue_belief_add(agent: AgentConfig, literal: Literal, source: str, step: StepLabel) -> None:
    agent.Ta.Ub.append(UbEntry(UbKind.ADD, step, literal=literal, source=source))


def queue_belief_del(
    agent: AgentConfig, literal: Literal, source: str | None, step: StepLabel
) -> None:
    agent.Ta.Ub.append(UbEntry(UbKind.DEL, step, literal=literal, source=source or ""))


# ----------------------------------------------------------------------
# social feedback: wire format, accumulation, emergence


def render_feedback(condition, pair: AffectPair) -> str:
    """Wire form of a feedback message: ``(+lit;+lit),[p,a]``.

    *condition* is an iterable of (literal text, present) pairs, emitted in
    the given order.
    """
    lits = ";".join(("+" if present else "-") + text for text, present in condition)
    return f"({lits}),[{pair[0]!r},{pair[1]!r}]"


def parse_feedback(text: str) -> tuple[tuple[tuple[str, bool], ...], AffectPair]:
    """Parse the feedback wire format; inverse of ``render_feedback``."""
    tokens = tokenize(text)
    pos = 0

    def expect(ttype: TokenType) -> str:
        nonlocal pos
        tok = tokens[pos]
        if tok.type is not ttype:
            raise ParseError(f"malformed feedback: expected {ttype.value!r}", tok.line, tok.col)
        pos += 1
        return tok.value

    def number() -> float:
        nonlocal pos
        sign = 1.0
        if tokens[pos].type is TokenType.MINUS:
            sign, pos = -1.0, pos + 1
        elif tokens[pos].type is TokenType.PLUS:
            pos += 1
        return sign * float(expect(TokenType.NUMBER))

    expect(TokenType.LPAREN)
    condition: list[tuple[str, bool]] = []
    while True:
        tok = tokens[pos]
        if tok.type is TokenType.PLUS:
            present = True
        elif tok.type is TokenType.MINUS:
            present = False
        else:
            raise ParseError("malformed feedback: condition literals carry a sign", tok.line, tok.col)
        pos += 1
        name = expect(TokenType.IDENT)
        condition.append((name, present))
        if tokens[pos].type is TokenType.SEMICOLON:
            pos += 1
            continue
        break
    expect(TokenType.RPAREN)
    expect(TokenType.COMMA)
    expect(TokenType.LBRACKET)
    p = number()
    expect(TokenType.COMMA)
    a = number()
    expect(TokenType.RBRACKET)
    if tokens[pos].type is not TokenType.EOF:
        tok = tokens[pos]
        raise ParseError("malformed feedback: trailing input", tok.line, tok.col)
    return tuple(condition), (p, a)


def accumulate_feedback(
    store: dict,
    condition,
    pair: AffectPair,
) -> FeedbackRecord:
    """Fold one feedback receipt into the record for its condition set.

    Records are keyed by set equality of the condition, so literal order in
    the wire format does not matter.
    """
    key = frozenset(condition)
    record = store.get(key)
    if record is None:
        record = FeedbackRecord(condition=key)
        store[key] = record
    record.accumulated = (record.accumulated[0] + pair[0], record.accumulated[1] + pair[1])
    record.count += 1
    return record


# ----------------------------------------------------------------------
# emergent social norms: detection and plan revision


def _condition_parts(condition: frozenset) -> tuple[set, set]:
    present = {text for text, flag in condition if flag}
    absent = {text for text, flag in condition if not flag}
    return present, absent


def _satisfies(state: set, present: set, absent: set) -> bool:
    return present <= state and not (absent & state)


def _simulation_seed(plan: PlanDef, present: set, bs_literals: set) -> set:
    """Start state for post-state simulation.

    Seeded with the avoid literals currently believed — except those the
    plan itself adds (they are the plan's doing, not lingering state, so a
    deletion inserted for them would be undone by the plan anyway) — then
    constrained by the plan's context: positive non-role context literals
    hold, negated ones do not.
    """
    held = {render_literal(lit) for lit in bs_literals}
    plan_adds = {
        render_literal(step.literal) for step in plan.body if step.kind is StepKind.ADD
    }
    state = set((present & held) - plan_adds)
    for cl in plan.context:
        text = render_literal(cl.literal)
        if cl.negated:
            state.discard(text)
        elif cl.literal.functor != "role":
            state.add(text)
    return state


def _apply_step(state: set, step: BodyStep) -> None:
    if step.kind is StepKind.ADD:
        state.add(render_literal(step.literal))
    elif step.kind is StepKind.DEL:
        state.discard(render_literal(step.literal))


def detect_social_norm(
    record: FeedbackRecord,
    ps: list,
    bs_literals: set,
    threshold: AffectPair = (0.5, 0.5),
) -> list:
    """Plans whose execution can leave the agent in the record's condition,
    once the accumulated feedback deviates negatively beyond *threshold*
    on either component.  Positive deviations never trigger."""
    acc_p, acc_a = record.accumulated
    if not (acc_p <= -threshold[0] or acc_a <= -threshold[1]):
        return []

    present, absent = _condition_parts(record.condition)
    flagged = []
    for plan in ps:
        state = _simulation_seed(plan, present, bs_literals)
        for step in plan.body:
            _apply_step(state, step)
        if _satisfies(state, present, absent):
            flagged.append(plan)
    return flagged


def revise_plan(
    plan: PlanDef,
    record: FeedbackRecord,
    bs_literals: set,
) -> PlanDef:
    """Copy of *plan* that deletes, immediately before the body step that
    completes the avoid condition, the avoid literals still true at that
    point — so executing the plan no longer lands in the punished state."""
    present, absent = _condition_parts(record.condition)
    state = _simulation_seed(plan, present, bs_literals)

    completing_index = 0 if _satisfies(state, present, absent) else None
    before_state = set(state)
    for idx, step in enumerate(plan.body):
        prior = set(state)
        _apply_step(state, step)
        if completing_index is None and _satisfies(state, present, absent):
            completing_index = idx
            before_state = prior
            break

    if completing_index is None:
        raise ValueError("plan does not reach the avoid condition; nothing to revise")

    to_delete = sorted(present & before_state)
    deletions = tuple(BodyStep(StepKind.DEL, _literal_from_text(t)) for t in to_delete)
    body = plan.body[:completing_index] + deletions + plan.body[completing_index:]
    return PlanDef(
        trigger=plan.trigger,
        context=plan.context,
        body=body,
        label=plan.label,
        normative=plan.normative,
        norm_id=plan.norm_id,
        variant=plan.variant,
    )


def _literal_from_text(text: str) -> Literal:
    # condition literals are bare names in the wire format
    return Literal(text)
