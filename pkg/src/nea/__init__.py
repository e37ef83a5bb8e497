"""nea: normative-emotional BDI agents.

An agent-definition language with norms, personality and concerns; a
three-cycle reasoning interpreter (normative, affective, temporal dynamics);
and a deterministic multi-agent society harness with a CLI front end.
"""

from importlib import resources as _resources
from pathlib import Path

__version__ = "0.1.0"


def builtin_scenario(name: str) -> Path:
    """Path of a scenario config shipped as package data (e.g. "mask")."""
    root = _resources.files(__name__) / "scenarios" / name / "scenario.json"
    path = Path(str(root))
    if not path.is_file():
        raise FileNotFoundError(f"no builtin scenario named {name!r}")
    return path
