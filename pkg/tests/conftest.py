"""Shared fixtures: corpus discovery and small agent builders."""

from __future__ import annotations

from pathlib import Path

import pytest

from nea.core import agent_from_program
from nea.lang import parse_agent_program

CORPUS_DIR = Path(__file__).parent / "corpus"


def corpus_files() -> list[Path]:
    files = sorted(CORPUS_DIR.glob("*.nea"))
    assert len(files) >= 20, "grammar corpus must stay at 20+ files"
    return files


@pytest.fixture(scope="session")
def corpus() -> list[Path]:
    return corpus_files()


def build_agent(source: str, agent_id: str = "a1", threshold: float = 25.0):
    """Agent from inline source text."""
    return agent_from_program(
        agent_id, parse_agent_program(source), relevance_threshold=threshold
    )


PATROL_SOURCE = """\
in_campus.

+enter_classroom : not in_classroom <-
    -in_campus; +in_classroom; +teach_lesson; -exit_classroom.

+exit_classroom : in_classroom <-
    -in_classroom; +in_campus; +enjoy_freetime; +enter_classroom.

personality__: { [0.5,0.5,0.5,0.5,0.5], 0.8, 0.3 }.

roles__: { professor }.
"""

MASK_NORM_TEXT = (
    'norm("obligation", "np__enter_classroom:role(professor) & not wearing_mask'
    ' <- +wearing_mask.", 0, 50.0, "ALL", [0.5,0.5])'
)
