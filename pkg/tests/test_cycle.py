"""Interpreter step machine: transition discipline (with fuzzing), message
routing, intention execution, the affective pass, and the decay pass."""

from __future__ import annotations

import dataclasses
import random

import pytest

from nea.affect import accumulate_feedback
from nea.core import (
    AffectiveStepLabel,
    Ilf,
    MemKind,
    MemoryEvent,
    Message,
    SOURCE_PERCEPT,
    StepLabel,
    norm_id,
)
from nea.cycle import (
    AST_ORDER,
    EDGES,
    EnvironmentView,
    InterpreterFault,
    OBSERVER_CHANNEL,
    _adopt_norm,
    check_invariants,
    context_holds,
    process_message,
    run_affective_cycle,
    run_decay,
    step,
    tick,
)
from nea.lang import (
    Literal,
    StepKind,
    Sym,
    parse_literal_text,
    parse_norm_literal,
    parse_plan_text,
)
from nea.norms import BREAK, COMPLY

from conftest import PATROL_SOURCE, build_agent

MASK_NORM_MSG = (
    'norm("obligation", "np__enter_classroom : in_campus <- put_on(mask);'
    ' +wearing_mask.", 0, 4.0, ["professor"], [0.3,0.1])'
)


def make_env(**kw) -> EnvironmentView:
    return EnvironmentView(**kw)


def msg(content, sender="peer", ilf=Ilf.Tell, norm=None, appraisal=None, mid=1):
    return Message(mid=mid, sender=sender, ilf=ilf, content=content, norm=norm, appraisal=appraisal)


def adopt_mask_norm(agent, env) -> str:
    """Deliver the mask norm by message and return its id."""
    agent.M.In.append(msg(MASK_NORM_MSG, sender="rectorate", mid=999))
    agent.s = StepLabel.ProcMsg
    step(agent, env)
    agent.s = StepLabel.Perceive
    agent.C.E.clear()  # drop the adoption event; tests drive their own events
    return agent.NB[0].id


def set_rebelliousness(agent, value: float) -> None:
    agent.P = dataclasses.replace(agent.P, rebelliousness=value)


# ----------------------------------------------------------------------
# transition diagram


def test_edges_cover_all_labels():
    assert set(EDGES) == set(StepLabel)
    for successors in EDGES.values():
        assert successors


def test_edges_only_jump_forward_except_wraparound():
    rank = {label: i for i, label in enumerate(StepLabel)}
    for src, successors in EDGES.items():
        for dst in successors:
            if dst is StepLabel.Perceive:
                assert src is StepLabel.AffModB, "only AffModB wraps around"
            else:
                assert rank[dst] > rank[src], f"{src} -> {dst} goes backward"


def test_affective_order():
    assert [label.value for label in AST_ORDER] == ["Appr", "UpAs", "SelCs", "Cope"]


def test_tick_rejects_non_perceive_start():
    agent = build_agent(PATROL_SOURCE)
    agent.s = StepLabel.SelEv
    with pytest.raises(InterpreterFault, match="start at Perceive"):
        tick(agent, make_env())


# ----------------------------------------------------------------------
# fuzzing: 10^4 steps stay on the diagram and keep every invariant


def fuzz_step_machine(total_steps: int, seed: int) -> int:
    rng = random.Random(seed)
    env = make_env(n_agents=3, delta=0.4, decay_affect=0.1, decay_relevance=0.01)
    agent = build_agent(PATROL_SOURCE, threshold=3.0)
    nid = adopt_mask_norm(agent, env)

    percept_pool = [Literal("enter_classroom"), Literal("exit_classroom"), Literal("bell")]
    taken = 0
    while taken < total_steps:
        if agent.s is StepLabel.Perceive:
            env.tick += 1
            env.percepts = set(rng.sample(percept_pool, k=rng.randint(0, 2)))
            if rng.random() < 0.4:
                roll = rng.random()
                if roll < 0.3:
                    agent.M.In.append(msg("visitor_on_site", mid=1000 + taken))
                elif roll < 0.5:
                    agent.M.In.append(
                        msg(
                            'norm_result("x","comply")',
                            norm=nid,
                            appraisal=(rng.uniform(-0.6, 0.6), rng.uniform(-0.2, 0.2)),
                            mid=1000 + taken,
                        )
                    )
                elif roll < 0.7:
                    agent.M.In.append(
                        msg("(+wearing_mask;+in_campus),[-0.3,-0.1]", mid=1000 + taken)
                    )
                elif roll < 0.85:
                    agent.M.In.append(msg("visitor_on_site", ilf=Ilf.Untell, mid=1000 + taken))
                else:
                    agent.M.In.append(msg(MASK_NORM_MSG, mid=1000 + taken))
        before = agent.s
        entry = step(agent, env)
        assert agent.s in EDGES[before], f"{before} -> {agent.s}"
        assert entry.step == before.value
        check_invariants(agent, "fuzz")
        taken += 1
        # exercise the other two passes at the wrap-around point
        if agent.s is StepLabel.Perceive and rng.random() < 0.5:
            run_affective_cycle(agent, env)
            run_decay(agent, env)
            check_invariants(agent, "fuzz-passes")
            agent.M.Out = []
    return taken


def test_fuzz_transitions_and_invariants():
    assert fuzz_step_machine(10_000, seed=42) == 10_000


# ----------------------------------------------------------------------
# Perceive


def test_perceive_buffers_percept_changes_until_affmodb():
    agent = build_agent(PATROL_SOURCE)
    env = make_env(percepts={Literal("enter_classroom")})
    step(agent, env)  # Perceive
    assert agent.s is StepLabel.ProcMsg
    assert not agent.holds(Literal("enter_classroom")), "buffered until AffModB"
    agent.s = StepLabel.AffModB
    step(agent, env)
    assert agent.holds(Literal("enter_classroom"))
    assert agent.C.E[-1].trigger.literal == Literal("enter_classroom")

    # the percept disappears next tick -> deletion queued, applied at AffModB
    env.percepts = set()
    step(agent, env)  # Perceive (s wrapped around)
    agent.s = StepLabel.AffModB
    step(agent, env)
    assert not agent.holds(Literal("enter_classroom"))


def test_perceive_adopts_norm_percepts_inline():
    agent = build_agent(PATROL_SOURCE)
    env = make_env(percepts={parse_literal_text(MASK_NORM_MSG)})
    entry = step(agent, env)
    assert len(agent.NB) == 1
    assert agent.NB[0].id == norm_id(parse_norm_literal(MASK_NORM_MSG))
    assert len(agent.ps) == 4, "comply and break variants appended"
    assert "adopted" in entry.summary


def test_perceive_faults_on_malformed_norm_percept():
    agent = build_agent(PATROL_SOURCE)
    bad = 'norm("permission", "np__x <- +y.", 0, 50.0, "ALL", [0.5,0.5])'
    env = make_env(percepts={parse_literal_text(bad)})
    with pytest.raises(InterpreterFault, match="bad norm percept"):
        step(agent, env)


# ----------------------------------------------------------------------
# ProcMsg routing


def test_procmsg_idle_advances():
    agent = build_agent(PATROL_SOURCE)
    agent.s = StepLabel.ProcMsg
    entry = step(agent, make_env())
    assert entry.summary == "idle"
    assert agent.s is StepLabel.SelEv


def test_procmsg_social_acceptance_gate():
    agent = build_agent(PATROL_SOURCE)
    agent.M.In.append(msg("gossip"))
    agent.s = StepLabel.ProcMsg
    entry = step(agent, make_env(socacc=lambda a, m: False))
    assert "rejected" in entry.summary
    assert agent.s is StepLabel.SelEv
    assert not agent.holds(Literal("gossip"))


def test_plain_tell_adds_sender_sourced_belief():
    agent = build_agent(PATROL_SOURCE)
    summary, nxt, _ = process_message(agent, msg("visitor_on_site", sender="gate"), make_env())
    assert nxt is StepLabel.SelEv
    assert agent.holds(Literal("visitor_on_site"))
    sources = {b.source for b in agent.bs if b.literal == Literal("visitor_on_site")}
    assert sources == {"gate"}
    assert agent.C.E[-1].trigger.literal == Literal("visitor_on_site")


def test_untell_retracts_only_sender_copy():
    agent = build_agent(PATROL_SOURCE)
    env = make_env()
    process_message(agent, msg("rumor", sender="a"), env)
    process_message(agent, msg("rumor", sender="b"), env)
    process_message(agent, msg("rumor", sender="a", ilf=Ilf.Untell), env)
    sources = {b.source for b in agent.bs if b.literal == Literal("rumor")}
    assert sources == {"b"}
    assert agent.holds(Literal("rumor"))


def test_norm_tell_adopts_and_believes():
    agent = build_agent(PATROL_SOURCE)
    env = make_env()
    summary, nxt, payload = process_message(agent, msg(MASK_NORM_MSG, sender="rectorate"), env)
    assert nxt is StepLabel.SelEv
    assert len(agent.NB) == 1 and len(agent.ps) == 4
    assert payload["adopted"] == agent.NB[0].id
    assert agent.holds(parse_literal_text(MASK_NORM_MSG)), "the norm text is also believed"
    # a second adoption is a no-op
    summary, _, payload = process_message(agent, msg(MASK_NORM_MSG, sender="rectorate"), env)
    assert "already held" in summary
    assert payload["adopted"] is None
    assert len(agent.NB) == 1 and len(agent.ps) == 4


def test_norm_feedback_reinforces_and_shifts_sigma():
    agent = build_agent(PATROL_SOURCE)
    env = make_env(n_agents=1, delta=0.1)
    nid = adopt_mask_norm(agent, env)
    agent.NB[0].relevance = 50.0
    reply = msg('norm_result("x","comply")', norm=nid, appraisal=(0.1, 0.1))
    summary, nxt, payload = process_message(agent, reply, env)
    assert nxt is StepLabel.AffModB, "norm feedback shortcuts to AffModB"
    assert agent.NB[0].relevance == 50.1
    assert agent.NB[0].reinforced_tick == env.tick
    assert agent.Ta.sigma == (0.1, 0.1)
    mem = agent.Mem[-1]
    assert mem.kind is MemKind.NORM_FEEDBACK and mem.applied and mem.norm_id == nid


def test_norm_feedback_divides_by_society_size():
    agent = build_agent(PATROL_SOURCE)
    env = make_env(n_agents=4, delta=0.1)
    nid = adopt_mask_norm(agent, env)
    agent.NB[0].relevance = 50.0
    process_message(agent, msg("x", norm=nid, appraisal=(0.2, 0.4)), env)
    assert agent.NB[0].relevance == 50.0 + 0.1 / 4
    assert agent.Ta.sigma == (0.2 / 4, 0.4 / 4)


def test_norm_feedback_for_unknown_norm_is_ignored():
    agent = build_agent(PATROL_SOURCE)
    summary, nxt, _ = process_message(agent, msg("x", norm="deadbeef0000"), make_env())
    assert "unknown" in summary
    assert nxt is StepLabel.SelEv
    assert agent.Mem == []


def test_social_feedback_accumulates():
    agent = build_agent(PATROL_SOURCE)
    env = make_env(n_agents=4)
    text = "(+wearing_mask;+in_campus),[-0.3,-0.1]"
    summary, nxt, payload = process_message(agent, msg(text, sender="student"), env)
    assert nxt is StepLabel.SelEv
    assert payload["count"] == 1 and payload["accumulated"] == [-0.3, -0.1]
    assert agent.Ta.sigma == (-0.3 / 4, -0.1 / 4)
    assert agent.Mem[-1].kind is MemKind.SOCIAL_FEEDBACK
    process_message(agent, msg(text, sender="student2"), env)
    record = next(iter(agent.feedback.values()))
    assert record.count == 2
    assert record.condition == frozenset({("wearing_mask", True), ("in_campus", True)})


def test_malformed_content_faults():
    agent = build_agent(PATROL_SOURCE)
    with pytest.raises(InterpreterFault, match="bad message content"):
        process_message(agent, msg("??!"), make_env())


# ----------------------------------------------------------------------
# context evaluation


def test_context_holds_roles_and_negation():
    agent = build_agent(PATROL_SOURCE)  # roles: professor; believes in_campus
    ctx = parse_plan_text("+x : role(professor) & in_campus & not wearing_mask <- y.").context
    assert context_holds(agent, ctx)
    agent.add_belief(Literal("wearing_mask"), "self")
    assert not context_holds(agent, ctx)
    ctx_bad_role = parse_plan_text("+x : role(student) <- y.").context
    assert not context_holds(agent, ctx_bad_role)
    assert context_holds(agent, ())


# ----------------------------------------------------------------------
# full ticks: one body step at a time, comply/break decisions, attribution


def test_patrol_executes_one_body_step_per_tick():
    agent = build_agent(PATROL_SOURCE)
    env = make_env(percepts={Literal("enter_classroom")})
    entries, outbound = tick(agent, env)  # percept lands at AffModB
    assert outbound == []
    env.tick += 1
    entries, _ = tick(agent, env)  # event selected, first body step runs
    first = [e for e in entries if e.step == "ExecInt"]
    assert [e.summary for e in first] == ["-in_campus"]
    env.tick += 1
    entries, _ = tick(agent, env)  # second body step, one tick later
    second = [e for e in entries if e.step == "ExecInt"]
    assert [e.summary for e in second] == ["+in_classroom"]
    assert agent.holds(Literal("in_classroom"))
    assert not agent.holds(Literal("in_campus"))


def run_until_announcement(agent, env, limit=12):
    announced = []
    decisions = {}
    for _ in range(limit):
        entries, outbound = tick(agent, env)
        env.tick += 1
        for e in entries:
            if e.step == "SelAppl" and e.payload.get("decisions"):
                decisions.update(e.payload["decisions"])
        announced.extend(m for m in outbound if m.recipient == OBSERVER_CHANNEL)
        if announced:
            break
    return announced, decisions


def test_comply_variant_selected_and_announced():
    env = make_env(n_agents=5, fraction=lambda roles: 0.4, relevance_weight=0.0125)
    agent = build_agent(PATROL_SOURCE, threshold=3.0)
    set_rebelliousness(agent, 0.2)
    nid = adopt_mask_norm(agent, env)

    env.percepts = {Literal("enter_classroom")}
    tick(agent, env)
    env.percepts = set()
    env.tick += 1

    announced, decisions = run_until_announcement(agent, env)
    assert decisions[nid]["chosen"] == COMPLY
    assert decisions[nid]["comply"] > decisions[nid]["break"]
    assert len(announced) == 1, "the variant's own affect step announces exactly once"
    assert announced[0].norm == nid
    assert f'"{COMPLY}"' in announced[0].content
    assert announced[0].sender == agent.id
    assert Literal("put_on", (Sym("mask"),)) in agent.C.A
    assert agent.holds(Literal("wearing_mask"))
    assert agent.Ta.sigma[0] > 0, "pre-appraisal folded into the affective state"
    assert MemKind.OWN_COMPLIANCE in {m.kind for m in agent.Mem}


def test_rebel_breaks_and_announces_break():
    env = make_env(n_agents=5, fraction=lambda roles: 0.4, relevance_weight=0.0125)
    agent = build_agent(PATROL_SOURCE, threshold=3.0)
    set_rebelliousness(agent, 0.8)
    nid = adopt_mask_norm(agent, env)

    env.percepts = {Literal("enter_classroom")}
    tick(agent, env)
    env.percepts = set()
    env.tick += 1

    announced, decisions = run_until_announcement(agent, env)
    assert decisions[nid]["chosen"] == BREAK
    assert len(announced) == 1
    assert f'"{BREAK}"' in announced[0].content
    assert Literal("put_on", (Sym("mask"),)) not in agent.C.A
    assert not agent.holds(Literal("wearing_mask"))
    assert agent.Ta.sigma[0] < 0, "violation appraisal is the opposite emotion"
    assert MemKind.OWN_VIOLATION in {m.kind for m in agent.Mem}


def test_cross_norm_attribution_fires_for_other_norms():
    env = make_env()
    agent = build_agent("ready.\n\n+do_it : ready <- sing.", threshold=1.0)
    ban = parse_norm_literal(
        'norm("prohibition", "np__party : ready <- sing.", 0, 30.0, "ALL", [0.2,0.1])'
    )
    _adopt_norm(agent, ban)
    nid = agent.NB[0].id

    agent.M.In.append(msg("do_it", sender="peer"))
    announced, _ = run_until_announcement(agent, env, limit=6)
    assert announced and announced[0].norm == nid
    assert f'"{BREAK}"' in announced[0].content, "acting a prohibited step is a violation"
    assert Literal("sing") in agent.C.A
    assert MemKind.OWN_VIOLATION in {m.kind for m in agent.Mem}


def test_own_affect_step_files_as_self_appraisal():
    agent = build_agent("calm.\n\n!go.\n\n+!go <- affect(0.2, 0.1).")
    env = make_env()
    tick(agent, env)  # goal event was seeded at build time
    kinds = {m.kind for m in agent.Mem}
    assert MemKind.SELF_APPRAISAL in kinds
    assert MemKind.OWN_COMPLIANCE not in kinds and MemKind.OWN_VIOLATION not in kinds
    assert agent.Ta.sigma[0] > 0


def test_tick_drains_outbound():
    agent = build_agent("standby.\n\n+hail <- .sendMsg(ALL, greetings).")
    env = make_env()
    agent.M.In.append(msg("hail", sender="peer"))
    sent = []
    for _ in range(3):
        _, outbound = tick(agent, env)
        env.tick += 1
        sent.extend(outbound)
        assert agent.M.Out == [], "outbox drained every tick"
    assert any(m.content == "greetings" and m.recipient == "ALL" for m in sent)


# ----------------------------------------------------------------------
# affective pass


def test_affective_pass_applies_unapplied_memory_once():
    agent = build_agent(PATROL_SOURCE)
    env = make_env()
    agent.Mem.append(
        MemoryEvent(tick=0, kind=MemKind.SOCIAL_FEEDBACK, pair=(0.4, 0.2), divisor=2)
    )
    entries = run_affective_cycle(agent, env)
    assert [e.step for e in entries] == ["Appr", "UpAs", "SelCs", "Cope"]
    assert agent.Ta.sigma == (0.2, 0.1)
    assert agent.Mem[0].applied and agent.Mem[0].appraised
    assert agent.ast is AffectiveStepLabel.Appr, "pass rewinds for the next tick"
    # a second pass must not double-apply
    run_affective_cycle(agent, env)
    assert agent.Ta.sigma == (0.2, 0.1)


def test_affective_pass_revises_punished_plans():
    agent = build_agent(PATROL_SOURCE)
    env = make_env(deviation_threshold=(0.5, 0.5))
    agent.add_belief(Literal("wearing_mask"), SOURCE_PERCEPT)
    accumulate_feedback(
        agent.feedback,
        frozenset({("wearing_mask", True), ("in_campus", True)}),
        (-0.6, -0.2),
    )
    exit_before = agent.ps[1]
    entries = run_affective_cycle(agent, env)
    selcs = next(e for e in entries if e.step == "SelCs")
    assert selcs.payload["revised"], "punished exit plan rewritten"
    revised = agent.ps[1]
    assert revised != exit_before
    deletions = [s.literal.functor for s in revised.body if s.kind is StepKind.DEL]
    assert "wearing_mask" in deletions
    # the rewrite is stable: a second pass finds nothing left to revise
    entries = run_affective_cycle(agent, env)
    selcs = next(e for e in entries if e.step == "SelCs")
    assert not selcs.payload["revised"]


def test_coping_strategies_queue_intentions():
    source = """\
gloomy.

personality__: { [0.5,0.5,0.5,0.5,0.5], 0.9,
  [cope([-1.0,-0.2],[-1.0,1.0],[take_break])], 0.0 }.
"""
    agent = build_agent(source)
    env = make_env()
    agent.Ta.sigma = (-0.5, 0.0)
    entries = run_affective_cycle(agent, env)
    cope_entry = next(e for e in entries if e.step == "Cope")
    assert "1 coping intention" in cope_entry.summary
    assert len(agent.C.I) == 1
    means = agent.C.I[0].top()
    assert [s.literal.functor for s in means.remaining] == ["take_break"]


# ----------------------------------------------------------------------
# decay pass


def test_decay_pass_payload_and_effects():
    agent = build_agent(PATROL_SOURCE)
    env = make_env(decay_affect=0.5, decay_relevance=0.25)
    nid = adopt_mask_norm(agent, env)
    agent.Ta.sigma = (0.8, -0.4)
    rel0 = agent.NB[0].relevance
    entry = run_decay(agent, env)
    assert agent.Ta.sigma == (0.4, -0.2)
    assert agent.NB[0].relevance == rel0 - 0.25
    assert entry.step == "AsNrDecay"
    assert entry.payload["sigma"] == [0.4, -0.2]
    assert entry.payload["relevance"] == {nid: rel0 - 0.25}
    assert "in_campus" in entry.payload["beliefs"]
    assert entry.payload["feedback"] == {}


def test_decay_skips_norms_reinforced_this_tick():
    agent = build_agent(PATROL_SOURCE)
    env = make_env(n_agents=1, decay_relevance=0.25)
    nid = adopt_mask_norm(agent, env)
    rel0 = agent.NB[0].relevance
    process_message(agent, msg("x", norm=nid, appraisal=(0.0, 0.0)), env)
    run_decay(agent, env)
    assert agent.NB[0].relevance == rel0 + 0.1, "same-tick reinforcement blocks decay"
    env.tick += 1
    run_decay(agent, env)
    assert agent.NB[0].relevance == rel0 + 0.1 - 0.25
