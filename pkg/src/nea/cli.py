"""Command-line interface.

Subcommands:

* ``check``  — parse an agent file; print its canonical form.
* ``run``    — run a scenario; write metrics.csv and a trace file.
* ``sweep``  — tabulate the comply/break utilities over a parameter grid.

Exit codes: 0 success; 1 a run died on an interpreter fault; 2 bad usage,
unparseable input, or a malformed scenario.

The run seed is resolved in order: --seed flag, NEA_SEED environment
variable, the scenario file's seed, 0.
"""

from __future__ import annotations

import argparse
import csv
import os
import sys
import tempfile
from pathlib import Path

from . import __version__, builtin_scenario
from .cycle import InterpreterFault
from .lang import LangError, parse_agent_program, render
from .norms import UtilityInputs, compliance_utility
from .society import (
    ScenarioConfig,
    ScenarioError,
    Society,
    write_metrics,
    write_trace_structured,
    write_trace_text,
)


def _atomic_write(path: Path, write_fn) -> None:
    """Write via a sibling temp file and rename, so readers never see a
    half-written file."""
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp_name = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.", suffix=".tmp")
    os.close(fd)
    tmp = Path(tmp_name)
    try:
        write_fn(tmp)
        os.replace(tmp, path)
    except BaseException:
        tmp.unlink(missing_ok=True)
        raise


def _pair(text: str) -> tuple[float, float]:
    parts = text.split(",")
    if len(parts) != 2:
        raise argparse.ArgumentTypeError("expected two comma-separated numbers")
    return (float(parts[0]), float(parts[1]))


def _float_list(text: str) -> list[float]:
    if text.strip() == "":
        return []
    return [float(part) for part in text.split(",")]


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="nea",
        description="Normative-emotional agents: language checker, society runner, utility sweep.",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p_check = sub.add_parser("check", help="parse an agent file and print its canonical form")
    p_check.add_argument("file", help="agent program (.nea)")

    p_run = sub.add_parser("run", help="run a scenario")
    p_run.add_argument("scenario", help="builtin scenario name or path to a scenario.json")
    p_run.add_argument("--ticks", type=int, default=None, help="override the scenario tick count")
    p_run.add_argument("--seed", type=int, default=None, help="run seed (overrides NEA_SEED)")
    p_run.add_argument("--out", default="nea_out", help="output directory (default: nea_out)")
    p_run.add_argument(
        "--trace-format",
        choices=("text", "structured"),
        default="text",
        help="trace.txt (tab-separated) or trace.jsonl (default: text)",
    )
    p_run.add_argument("--parallel", action="store_true", help="run agents on a thread pool")
    p_run.add_argument("--delta", type=float, default=None, help="override relevance reinforcement step")
    p_run.add_argument("--decay-affect", type=float, default=None, help="override affect decay rate")
    p_run.add_argument(
        "--decay-relevance", type=float, default=None, help="override relevance decay rate"
    )
    p_run.add_argument(
        "--relevance-threshold", type=float, default=None, help="override the active-norm threshold"
    )
    p_run.add_argument(
        "--relevance-weight", type=float, default=None, help="override the utility relevance weight"
    )
    p_run.add_argument(
        "--deviation-threshold",
        type=_pair,
        default=None,
        metavar="P,A",
        help="override the social-feedback deviation threshold",
    )

    p_sweep = sub.add_parser("sweep", help="tabulate comply/break utilities over a grid")
    p_sweep.add_argument("--reb", type=_float_list, default=None, help="rebelliousness values (comma list)")
    p_sweep.add_argument("--frac", type=_float_list, default=None, help="affected-fraction values")
    p_sweep.add_argument("--relevance", type=_float_list, default=None, help="norm relevance values")
    p_sweep.add_argument(
        "--relevance-weight", type=_float_list, default=None, help="relevance weight values"
    )
    p_sweep.add_argument("--sigma", type=_pair, default=(0.0, 0.0), metavar="P,A", help="current affective state")
    p_sweep.add_argument(
        "--pre-appraisal", type=_pair, default=(0.3, 0.1), metavar="P,A", help="norm pre-appraisal pair"
    )
    p_sweep.add_argument("--out", default=None, help="CSV output path (default: stdout)")
    return parser


def cmd_check(args) -> int:
    path = Path(args.file)
    try:
        source = path.read_text(encoding="utf-8")
    except OSError as exc:
        print(f"nea check: {exc}", file=sys.stderr)
        return 2
    try:
        program = parse_agent_program(source)
    except LangError as exc:
        if exc.line is not None:
            print(f"{path}:{exc.line}:{exc.col}: {exc.message}", file=sys.stderr)
        else:
            print(f"{path}: {exc.message}", file=sys.stderr)
        return 2
    sys.stdout.write(render(program))
    if not render(program).endswith("\n"):
        sys.stdout.write("\n")
    return 0


def _resolve_scenario(arg: str) -> Path:
    candidate = Path(arg)
    if candidate.is_file():
        return candidate
    try:
        return builtin_scenario(arg)
    except FileNotFoundError as exc:
        raise ScenarioError(f"no scenario file or builtin named {arg!r}") from exc


def _resolve_seed(args, config: ScenarioConfig) -> int:
    if args.seed is not None:
        return args.seed
    env = os.environ.get("NEA_SEED")
    if env is not None:
        try:
            return int(env)
        except ValueError as exc:
            raise ScenarioError(f"NEA_SEED must be an integer, got {env!r}") from exc
    return config.seed


def cmd_run(args) -> int:
    try:
        config = ScenarioConfig.load(_resolve_scenario(args.scenario))
    except (ScenarioError, LangError, OSError) as exc:
        print(f"nea run: {exc}", file=sys.stderr)
        return 2

    for name in (
        "delta",
        "decay_affect",
        "decay_relevance",
        "relevance_threshold",
        "relevance_weight",
        "deviation_threshold",
    ):
        value = getattr(args, name)
        if value is not None:
            setattr(config, name, value)

    try:
        seed = _resolve_seed(args, config)
    except ScenarioError as exc:
        print(f"nea run: {exc}", file=sys.stderr)
        return 2

    society = Society(config, seed=seed)
    try:
        result = society.run(ticks=args.ticks, parallel=args.parallel)
    except InterpreterFault as exc:
        print(f"nea run: interpreter fault: {exc}", file=sys.stderr)
        return 1

    out = Path(args.out)
    metrics_path = out / "metrics.csv"
    _atomic_write(metrics_path, lambda p: write_metrics(result.metrics, p))
    if args.trace_format == "structured":
        trace_path = out / "trace.jsonl"
        _atomic_write(trace_path, lambda p: write_trace_structured(result.trace, result.meta, p))
    else:
        trace_path = out / "trace.txt"
        _atomic_write(trace_path, lambda p: write_trace_text(result.trace, p))

    ticks = args.ticks if args.ticks is not None else config.ticks
    print(
        f"{config.name}: {ticks} ticks, {len(result.roster)} agents, seed {seed} "
        f"-> {metrics_path}, {trace_path}"
    )
    return 0


SWEEP_COLUMNS = ("reb", "frac", "relevance", "relevance_weight", "comply", "break", "break_first")

_DEFAULT_REB = [round(0.1 * i, 1) for i in range(11)]
_DEFAULT_FRAC = [round(0.1 * i, 1) for i in range(11)]
_DEFAULT_RELEVANCE = [0.0, 1.0, 2.0, 4.0, 8.0, 16.0, 32.0]
_DEFAULT_WEIGHT = [1.0]


def cmd_sweep(args) -> int:
    rebs = _DEFAULT_REB if args.reb is None else args.reb
    fracs = _DEFAULT_FRAC if args.frac is None else args.frac
    relevances = _DEFAULT_RELEVANCE if args.relevance is None else args.relevance
    weights = _DEFAULT_WEIGHT if args.relevance_weight is None else args.relevance_weight

    sigma = args.sigma
    pre = args.pre_appraisal
    s = (sigma[0] + sigma[1]) / 2.0
    s_new = (
        min(1.0, max(-1.0, sigma[0] + pre[0])) + min(1.0, max(-1.0, sigma[1] + pre[1]))
    ) / 2.0

    rows = []
    for reb in rebs:
        for frac in fracs:
            for relevance in relevances:
                for weight in weights:
                    inputs = UtilityInputs(
                        reb=reb, frac_affected=frac, s=s, s_new=s_new, relevance=relevance
                    )
                    follow, breach = compliance_utility(inputs, relevance_weight=weight)
                    rows.append(
                        {
                            "reb": f"{reb:g}",
                            "frac": f"{frac:g}",
                            "relevance": f"{relevance:g}",
                            "relevance_weight": f"{weight:g}",
                            "comply": f"{follow:.6f}",
                            "break": f"{breach:.6f}",
                            "break_first": str(breach > follow).lower(),
                        }
                    )

    def write_rows(stream) -> None:
        writer = csv.DictWriter(stream, fieldnames=SWEEP_COLUMNS)
        writer.writeheader()
        writer.writerows(rows)

    if args.out is None:
        write_rows(sys.stdout)
    else:

        def write_to(path: Path) -> None:
            with path.open("w", encoding="utf-8", newline="") as fh:
                write_rows(fh)

        _atomic_write(Path(args.out), write_to)
    return 0


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.command == "check":
        return cmd_check(args)
    if args.command == "run":
        return cmd_run(args)
    return cmd_sweep(args)


if __name__ == "__main__":
    sys.exit(main())
