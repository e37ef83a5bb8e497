"""Agent-definition language: tokenizer, parser, AST, canonical renderer."""

from .ast import (
    AFFECT_FUNCTOR,
    AgentProgram,
    BodyStep,
    ContextLiteral,
    CopingStrategy,
    Literal,
    NormDecl,
    PersonalityDecl,
    PlanDef,
    StepKind,
    Sym,
    TriggerEvent,
    TriggerKind,
    TriggerType,
)
from .errors import LangError, LexError, NotANorm, ParseError, SemanticError
from .parser import (
    DEONTIC_OPERATORS,
    NP_MARKER,
    norm_from_literal,
    parse_agent_program,
    parse_literal_text,
    parse_norm_literal,
    parse_plan_text,
)
from .render import render, render_literal, render_norm, render_plan
from .tokens import Token, TokenType, tokenize

__all__ = [
    "AFFECT_FUNCTOR",
    "AgentProgram",
    "BodyStep",
    "ContextLiteral",
    "CopingStrategy",
    "DEONTIC_OPERATORS",
    "LangError",
    "LexError",
    "Literal",
    "NormDecl",
    "NotANorm",
    "NP_MARKER",
    "ParseError",
    "PersonalityDecl",
    "PlanDef",
    "SemanticError",
    "StepKind",
    "Sym",
    "Token",
    "TokenType",
    "TriggerEvent",
    "TriggerKind",
    "TriggerType",
    "norm_from_literal",
    "parse_agent_program",
    "parse_literal_text",
    "parse_norm_literal",
    "parse_plan_text",
    "render",
    "render_literal",
    "render_norm",
    "render_plan",
    "tokenize",
]
