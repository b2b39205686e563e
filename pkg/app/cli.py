"""Command-line front end: describe, check, solve, reproduce, serve."""
import functools
import logging
import os
import sys
from typing import Optional

import click

from app.config import configure_logging, settings
from app.errors import MagneticFieldError, StructureInputError
from app.services.parsing import parse_reals, parse_structure
from app.services.report import (
    FORMATS, check_report, describe_report, exit_code, render, reproduce_report,
    solve_report, timed,
)

logger = logging.getLogger("app.cli")

STRUCTURE_HINT = "'--unimodular' / '--nonunimodular'"


class Output:
    def __init__(self, fmt: str, tolerance: Optional[float], timing: bool):
        self.fmt = fmt
        self.tolerance = tolerance
        self.timing = timing

    def build(self, build, *args):
        if self.timing:
            return timed(build, *args, self.tolerance)
        return build(*args, self.tolerance)

    def emit(self, ctx: click.Context, report) -> None:
        color = self.fmt == "md" and not os.environ.get("NO_COLOR") and sys.stdout.isatty()
        click.echo(render(report, self.fmt, color=color), nl=False, color=color)
        ctx.exit(exit_code(report))


def output_options(command):
    @click.option("--format", "fmt", type=click.Choice(FORMATS), default="md", show_default=True)
    @click.option("--tolerance", type=click.FloatRange(min=0, min_open=True), default=None,
                  help="Residual tolerance [default: MAGNETIC_EPS_RES].")
    @click.option("--timing", is_flag=True, help="Record wall-clock time in the report.")
    @click.option("-v", "--verbose", is_flag=True, help="Debug logging on stderr.")
    @functools.wraps(command)
    def wrapper(*args, fmt: str, tolerance: Optional[float], timing: bool, verbose: bool, **kwargs):
        configure_logging("DEBUG" if verbose else None)
        return command(*args, output=Output(fmt, tolerance, timing), **kwargs)

    return wrapper


def structure_options(command):
    @click.option("--unimodular", metavar="C1,C2,C3", help="Milnor frame structure constants.")
    @click.option("--nonunimodular", metavar="ALPHA,BETA", help="Normalized non-unimodular parameters.")
    @functools.wraps(command)
    def wrapper(*args, unimodular: Optional[str], nonunimodular: Optional[str], **kwargs):
        try:
            structure = parse_structure(unimodular, nonunimodular)
        except StructureInputError as exc:
            raise click.BadParameter(str(exc), param_hint=STRUCTURE_HINT) from None
        return command(*args, structure=structure, **kwargs)

    return wrapper


@click.group()
def cli():
    """Left-invariant geometry and unit magnetic fields on 3-dimensional Lie groups."""


@cli.command()
@structure_options
@output_options
@click.pass_context
def describe(ctx: click.Context, structure, output: Output):
    """Connection, curvature and invariants of a structure."""
    output.emit(ctx, output.build(describe_report, structure))


@cli.command()
@structure_options
@output_options
@click.option("--x", "x_text", required=True, metavar="X1,X2,X3", help="Frame coefficients of a unit field.")
@click.option("--q", type=float, default=None, help="Charge; solved for when omitted.")
@click.pass_context
def check(ctx: click.Context, structure, output: Output, x_text: str, q: Optional[float]):
    """Check whether a unit left-invariant field is magnetic (exit 0) or not (exit 1)."""
    try:
        x = parse_reals(x_text, 3, "--x")
        report = output.build(check_report, structure, x, q)
    except (StructureInputError, MagneticFieldError) as exc:
        raise click.BadParameter(str(exc), param_hint="'--x'") from None
    output.emit(ctx, report)


@cli.command()
@structure_options
@output_options
@click.option("--grid-n", type=click.IntRange(min=16), default=None,
              help=f"Scan grid of grid_n^2 points [default: {settings.grid_n}].")
@click.option("--symbolic", "mode", flag_value="symbolic", default=True, help="Closed-form classification.")
@click.option("--numeric", "mode", flag_value="numeric", help="Numeric scan only.")
@click.option("--both", "mode", flag_value="both", help="Both, compared (exit 3 on mismatch).")
@click.pass_context
def solve(ctx: click.Context, structure, output: Output, grid_n: Optional[int], mode: str):
    """All unit magnetic left-invariant fields of a structure."""
    output.emit(ctx, output.build(solve_report, structure, mode, grid_n))


@cli.command()
@click.argument("which", type=click.Choice(["unimodular", "nonunimodular"]))
@output_options
@click.option("--samples", type=click.IntRange(min=1), default=None,
              help=f"Structures per table row [default: {settings.reproduce_samples}].")
@click.option("--seed", type=int, default=None, help=f"Sampling seed [default: {settings.reproduce_seed}].")
@click.option("--grid-n", type=click.IntRange(min=16), default=None,
              help=f"Scan grid of grid_n^2 points [default: {settings.reproduce_grid_n}].")
@click.pass_context
def reproduce(
    ctx: click.Context,
    which: str,
    output: Output,
    samples: Optional[int],
    seed: Optional[int],
    grid_n: Optional[int],
):
    """Verify every row of a classification table (exit 3 on any failure)."""
    output.emit(ctx, output.build(reproduce_report, which, samples, seed, grid_n))


@cli.command()
@click.option("--host", default="127.0.0.1", show_default=True)
@click.option("--port", type=int, default=8000, show_default=True)
@click.option("--reload", is_flag=True)
def serve(host: str, port: int, reload: bool):
    """Run the HTTP API."""
    import uvicorn

    logger.info("serving on %s:%d", host, port)
    uvicorn.run("app.main:app", host=host, port=port, reload=reload)


def main() -> None:
    cli(prog_name="magnetic-fields")


if __name__ == "__main__":
    main()
