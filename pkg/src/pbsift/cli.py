"""
Command-line interface for pbsift
"""

import logging
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import replace
from math import ceil
from pathlib import Path
from typing import Any, Callable, List, NoReturn, Optional, Tuple, TypeVar

import click
import yaml
from rich.console import Console
from rich.panel import Panel
from rich.table import Table

from . import __version__
from .analysis import AnalysisMode
from .config import PbsiftSettings, default_config_path, load_settings, resolve_config_path, save_settings
from .constraint import normalize, slack
from .errors import PbsiftError, ReplayMismatchError, TraceFormatError
from .generators import GENERATORS
from .log import configure_logging
from .opb import (
    InstanceStats,
    OpbDocument,
    iter_trace,
    parse_constraint,
    parse_opb,
    read_trace,
    write_opb,
    write_stats_csv,
    write_trace,
)
from .relevance import DetectorConfig, EliminationStrategy, RelevanceVerdict, detect_all, eliminate
from .solver import PBSolver, SolveStatus
from .trace import Rule, replay

logger = logging.getLogger(__name__)
console = Console()

F = TypeVar("F", bound=Callable[..., Any])

_VERDICT_ICONS = {
    RelevanceVerdict.PROVEN_IRRELEVANT: "✂️ ",
    RelevanceVerdict.RELEVANT: "🔒",
    RelevanceVerdict.NOT_PROVEN: "❔",
}


def _parse_moduli(ctx: click.Context, param: click.Parameter, value: Optional[str]) -> Optional[Tuple[int, ...]]:
    if value is None:
        return None
    try:
        moduli = tuple(int(part) for part in value.split(",") if part.strip())
    except ValueError:
        raise click.BadParameter(f"expected comma-separated integers, got '{value}'")
    if not moduli or any(modulus < 2 for modulus in moduli):
        raise click.BadParameter("every modulus must be an integer >= 2")
    return moduli


def detector_options(func: F) -> F:
    func = click.option("--max-lits", type=click.IntRange(min=1), default=None,
                        help="Skip constraints with more literals (default 500)")(func)
    func = click.option("--p", "moduli", callback=_parse_moduli, default=None,
                        help="Comma-separated moduli for the detector (default 4547)")(func)
    return func


def _detector(ctx: click.Context, moduli: Optional[Tuple[int, ...]], max_lits: Optional[int]) -> DetectorConfig:
    detector = ctx.obj["settings"].detector
    if moduli is not None:
        detector = replace(detector, moduli=moduli)
    if max_lits is not None:
        detector = replace(detector, max_literals=max_lits)
    return detector


def _fail(error: Exception) -> NoReturn:
    raise click.ClickException(str(error))


@click.group()
@click.version_option(version=__version__, prog_name="pbsift")
@click.option("--config", "config_path", type=click.Path(dir_okay=False, path_type=Path), default=None,
              help="Settings file (default $PBSIFT_CONFIG or ~/.pbsift/config.yaml)")
@click.option("-v", "--verbose", count=True, help="Increase log verbosity (-v info, -vv debug)")
@click.pass_context
def main(ctx: click.Context, config_path: Optional[Path], verbose: int) -> None:
    """pbsift - irrelevant literals in pseudo-Boolean reasoning

    Quick Start Examples:
        pbsift check "+12 x1 +6 x2 +6 x3 +2 x4 +2 x5 >= 18" --p 6
        pbsift generate vertexcover-complete 8 -o vc8.opb
        pbsift solve vc8.opb --elim slack --dump vc8.jsonl
        pbsift analyze vc8.jsonl -o stats.csv
    """
    configure_logging(verbose)
    ctx.ensure_object(dict)
    try:
        if ctx.invoked_subcommand == "init-config" and config_path is not None and not config_path.exists():
            ctx.obj["settings"] = PbsiftSettings()
        else:
            ctx.obj["settings"] = load_settings(config_path)
    except PbsiftError as e:
        _fail(e)
    ctx.obj["config_path"] = config_path


@main.command()
@click.argument("constraint")
@detector_options
@click.option("--exact", is_flag=True, help="Use the exact subset-sum oracle instead of residues")
@click.pass_context
def check(
    ctx: click.Context, constraint: str, moduli: Optional[Tuple[int, ...]], max_lits: Optional[int], exact: bool
) -> None:
    """Report which literals of CONSTRAINT are irrelevant"""
    detector = _detector(ctx, moduli, max_lits)
    try:
        constraints = normalize(parse_constraint(constraint))
    except PbsiftError as e:
        _fail(e)

    for normalized in constraints:
        console.print(Panel.fit(f"🔎 {normalized}", style="bold blue"))
        try:
            report = detect_all(normalized, detector, oracle=exact)
        except PbsiftError as e:
            _fail(e)
        if report.skipped:
            console.print(f"⏭️  Skipped: more than {detector.max_literals} literals")
            continue
        for coef, literal in normalized:
            verdict = report.verdict(literal)
            console.print(f"{_VERDICT_ICONS[verdict]} {literal} (coefficient {coef}): {verdict.value}")
        console.print(f"Checks performed: {report.checks}")
        irrelevant = " ".join(str(lit) for lit in report.irrelevant) or "none"
        console.print(f"Proven irrelevant: {irrelevant}")


@main.command()
@click.argument("input_file", type=click.Path(exists=True, dir_okay=False, path_type=Path))
@click.option("--strategy", type=click.Choice(["weaken", "simple", "slack"]), default="slack",
              help="How irrelevant literals are removed")
@detector_options
@click.option("--exact", is_flag=True, help="Use the exact subset-sum oracle instead of residues")
@click.option("-o", "--output", type=click.Path(dir_okay=False, path_type=Path), required=True,
              help="Where to write the simplified instance")
@click.pass_context
def simplify(
    ctx: click.Context,
    input_file: Path,
    strategy: str,
    moduli: Optional[Tuple[int, ...]],
    max_lits: Optional[int],
    exact: bool,
    output: Path,
) -> None:
    """Remove irrelevant literals from every constraint of INPUT_FILE"""
    detector = _detector(ctx, moduli, max_lits)
    console.print(Panel.fit(f"✂️  Simplifying {input_file.name}", style="bold cyan"))
    try:
        document = parse_opb(input_file.read_text(encoding="latin-1"))
        simplified = []
        removed_total = 0
        for index, raw in enumerate(document.constraints, start=1):
            for constraint in normalize(raw):
                report = detect_all(constraint, detector, oracle=exact)
                irrelevant = report.irrelevant
                if not irrelevant:
                    simplified.append(constraint)
                    continue
                used, result = eliminate(constraint, irrelevant, EliminationStrategy(strategy))
                removed_total += len(irrelevant)
                names = " ".join(str(lit) for lit in irrelevant)
                console.print(
                    f"   constraint {index}: removed {names} ({used.value}), "
                    f"slack {slack(constraint)} -> {slack(result)}"
                )
                simplified.append(result)
    except PbsiftError as e:
        _fail(e)

    result_doc = OpbDocument.from_constraints(simplified, comments=[f"simplified from {input_file.name}"])
    result_doc.variables = document.num_variables
    output.write_text(write_opb(result_doc), encoding="latin-1")
    console.print(f"✅ Removed {removed_total} irrelevant literals")
    console.print(f"📁 Written to {output}")


@main.command()
@click.argument("input_file", type=click.Path(exists=True, dir_okay=False, path_type=Path))
@click.option("--mode", type=click.Choice(["gr", "div"]), default=None,
              help="Conflict analysis: generalized resolution or division")
@click.option("--elim", type=click.Choice(["none", "weaken", "simple", "slack"]), default=None,
              help="Irrelevant literal elimination during analysis")
@detector_options
@click.option("--dump", type=click.Path(dir_okay=False, path_type=Path), default=None,
              help="Write the derivation trace (JSON lines)")
@click.option("--stats-yaml", type=click.Path(dir_okay=False, path_type=Path), default=None,
              help="Write solver statistics as YAML")
@click.option("--max-conflicts", type=click.IntRange(min=0), default=None, help="Stop with UNKNOWN after N conflicts")
@click.option("--time-limit", type=click.FloatRange(min=0), default=None, help="Stop with UNKNOWN after N seconds")
@click.option("--luby/--no-luby", default=None, help="Luby restarts")
@click.option("--seedless", is_flag=True, help="Accepted for compatibility; runs are always deterministic")
@click.pass_context
def solve(
    ctx: click.Context,
    input_file: Path,
    mode: Optional[str],
    elim: Optional[str],
    moduli: Optional[Tuple[int, ...]],
    max_lits: Optional[int],
    dump: Optional[Path],
    stats_yaml: Optional[Path],
    max_conflicts: Optional[int],
    time_limit: Optional[float],
    luby: Optional[bool],
    seedless: bool,
) -> None:
    """Solve INPUT_FILE (exit 10 SAT, 20 UNSAT, 0 UNKNOWN)

    Decisions and tie-breaks are fixed, so two runs on the same input
    give the same trace; --seedless changes nothing.
    """
    settings = ctx.obj["settings"]
    config = replace(
        settings.analysis_config(),
        detector=_detector(ctx, moduli, max_lits),
        mode=AnalysisMode(mode) if mode else settings.mode,
        elimination=EliminationStrategy(elim) if elim else settings.elimination,
    )
    limits = settings.limits
    if max_conflicts is not None:
        limits = replace(limits, max_conflicts=max_conflicts)
    if time_limit is not None:
        limits = replace(limits, time_limit=time_limit)
    if luby is not None:
        limits = replace(limits, luby=luby)

    console.print(Panel.fit(f"🧮 Solving {input_file.name}", style="bold blue"))
    try:
        document = parse_opb(input_file.read_text(encoding="latin-1"))
        solver = PBSolver(document.normalized(), config, limits, record_trace=dump is not None,
                          num_variables=document.num_variables)
        result = solver.solve()
    except PbsiftError as e:
        _fail(e)

    console.print(f"s {result.status.value}")
    if result.status is SolveStatus.SAT:
        values = " ".join(f"x{var}" if value else f"-x{var}" for var, value in sorted(result.model.items()))
        console.print(f"v {values}", soft_wrap=True)
        console.print("✅ Model verified against every input constraint")
    elif result.status is SolveStatus.UNKNOWN:
        console.print(f"⏱️  Stopped: {result.reason}")

    table = Table(title="Solver statistics")
    table.add_column("counter")
    table.add_column("value", justify="right")
    for name, value in result.stats.to_dict().items():
        table.add_row(name, f"{value:.3f}" if isinstance(value, float) else str(value))
    console.print(table)

    if dump is not None:
        dump.write_text(write_trace(result.trace))
        console.print(f"📁 Trace written to {dump}")
    if stats_yaml is not None:
        with open(stats_yaml, "w") as f:
            yaml.safe_dump(result.stats.to_dict(), f, default_flow_style=False)
    sys.exit(result.exit_code)


def analyze_trace_file(path: Path, detector: DetectorConfig) -> Tuple[InstanceStats, List[TraceFormatError]]:
    """Run the detector on every derived constraint of a trace file"""
    row = InstanceStats(instance=path.stem, family=path.parent.name)
    errors: List[TraceFormatError] = []
    for _, item in iter_trace(path.read_text(encoding="latin-1")):
        if isinstance(item, TraceFormatError):
            errors.append(item)
            continue
        if item.rule is Rule.CANCEL:
            row.cancellations += 1
        if item.rule is Rule.INPUT:
            continue
        row.constraints_dumped += 1
        report = detect_all(item.result, detector)
        row.checks_performed += report.checks
        row.skipped_constraints += int(report.skipped)
        if report.irrelevant:
            row.constraints_with_irrelevant += 1
            row.irrelevant_literals_total += len(report.irrelevant)
    return row, errors


@main.command()
@click.argument("traces", nargs=-1, type=click.Path(exists=True, dir_okay=False, path_type=Path))
@detector_options
@click.option("-o", "--output", type=click.Path(dir_okay=False, path_type=Path), default=None,
              help="Where to write the statistics CSV (default: standard output)")
@click.option("--jobs", type=click.IntRange(min=1), default=1, help="Trace files processed in parallel")
@click.pass_context
def analyze(
    ctx: click.Context,
    traces: Tuple[Path, ...],
    moduli: Optional[Tuple[int, ...]],
    max_lits: Optional[int],
    output: Optional[Path],
    jobs: int,
) -> None:
    """Count irrelevant literals in dumped derivation TRACES"""
    detector = _detector(ctx, moduli, max_lits)
    paths = list(traces)
    if jobs > 1 and len(paths) > 1:
        with ProcessPoolExecutor(max_workers=jobs) as executor:
            results = list(executor.map(analyze_trace_file, paths, [detector] * len(paths)))
    else:
        results = [analyze_trace_file(path, detector) for path in paths]

    rows = []
    for path, (row, errors) in zip(paths, results):
        for error in errors:
            logger.warning("%s: %s", path.name, error)
        if errors:
            console.print(f"⚠️  {path.name}: {len(errors)} malformed records skipped")
        rows.append(row)

    csv_text = write_stats_csv(rows)
    if output is None:
        click.echo(csv_text, nl=False)
    else:
        output.write_text(csv_text)
        console.print(f"📁 Statistics written to {output}")

    console.print(Panel.fit("📊 Totals", style="bold green"))
    console.print(f"Constraints dumped: {sum(r.constraints_dumped for r in rows)}")
    console.print(f"Constraints with irrelevant literals: {sum(r.constraints_with_irrelevant for r in rows)}")
    console.print(f"Irrelevant literals: {sum(r.irrelevant_literals_total for r in rows)}")
    console.print(f"Checks performed: {sum(r.checks_performed for r in rows)}")
    console.print(f"Cancellations: {sum(r.cancellations for r in rows)}")


@main.command()
@click.argument("family", type=click.Choice(sorted(GENERATORS)))
@click.argument("n", type=int)
@click.option("--k", type=int, default=None, help="Cover size bound (default ceil(n/2) - 1)")
@click.option("-o", "--output", type=click.Path(dir_okay=False, path_type=Path), default=None,
              help="Where to write the instance (default: standard output)")
def generate(family: str, n: int, k: Optional[int], output: Optional[Path]) -> None:
    """Generate a benchmark instance of FAMILY with N vertices"""
    bound = ceil(n / 2) - 1 if k is None else k
    try:
        constraints = GENERATORS[family](n, bound)
    except PbsiftError as e:
        _fail(e)
    document = OpbDocument.from_constraints(constraints, comments=[f"{family} n={n} k={bound}"])
    text = write_opb(document)
    if output is None:
        click.echo(text, nl=False)
        return
    output.write_text(text)
    console.print(f"✅ {family} with n={n}: {len(constraints)} constraints written to {output}")


@main.command("replay")
@click.argument("trace_file", type=click.Path(exists=True, dir_okay=False, path_type=Path))
def replay_command(trace_file: Path) -> None:
    """Replay TRACE_FILE with the cutting-planes rules and compare every step"""
    try:
        trace = read_trace(trace_file.read_text(encoding="latin-1"))
        verified = replay(trace)
    except ReplayMismatchError as e:
        console.print(f"❌ {e}")
        sys.exit(1)
    except PbsiftError as e:
        _fail(e)
    console.print(f"✅ {verified} steps replayed, all constraints reproduced")


@main.command("init-config")
@click.option("--force", is_flag=True, help="Overwrite an existing settings file")
@click.pass_context
def init_config(ctx: click.Context, force: bool) -> None:
    """Write the current settings to the settings file"""
    path = resolve_config_path(ctx.obj["config_path"]) or default_config_path()
    if path.exists() and not force:
        console.print(f"❌ {path} already exists (use --force to overwrite)")
        sys.exit(1)
    save_settings(ctx.obj["settings"], path)
    console.print(f"✅ Settings written to {path}")


if __name__ == "__main__":
    main()
