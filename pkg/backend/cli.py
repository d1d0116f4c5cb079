"""Command line: one subcommand per verification command, plus ``replay``.

Standard output carries only the verdict line.  Exit codes: 0 successful,
1 failed (counterexample written), 2 usage or input error.
"""
import logging
import sys

import click
from pydantic import ValidationError

from backend import config
from backend.commands import COMMANDS, SS, Command, CommandParams, run_command
from backend.counterexample import ReplayResult, read_file, replay, write_file
from backend.errors import VerificationError
from backend.schemas import load_system

logger = logging.getLogger(__name__)

DEFAULT_CE_PATH = "counterexample.json"

_TABLE_OPTIONS = {
    "intbits": lambda req: click.option("--intbits", type=int, required=req, help="Integer bits I, sign included."),
    "fracbits": lambda req: click.option("--fracbits", type=int, required=req, help="Fractional bits F."),
    "max": lambda req: click.option("--max", "max_", type=float, required=req, help="Upper end of the dynamic range."),
    "min": lambda req: click.option("--min", "min_", type=float, required=req, help="Lower end of the dynamic range."),
    "bound": lambda req: click.option("--bound", type=click.IntRange(min=1), required=req, help="Number of steps k."),
    "cmode": lambda req: click.option(
        "--cmode", type=click.Choice(["series", "feedback"]), required=req,
        help="Controller placement in the loop; overrides the system file.",
    ),
    "error": lambda req: click.option("--error", type=click.FloatRange(min=0), required=req, help="Error bound."),
}

_EXTRA_OPTIONS = [
    click.option("--realization", type=click.Choice(["DFI", "DFII", "TDFII", "DDFI", "DDFII", "TDDFII"]),
                 default="DFI", show_default=True),
    click.option("--delta", type=float, default=None, help="Delta operator step (delta forms only)."),
    click.option("--overflow-mode", type=click.Choice(["wrap", "saturate"]), default="wrap", show_default=True),
    click.option("--rounding", type=click.Choice(["floor", "nearest-even"]), default="floor", show_default=True),
    click.option("--engine", type=click.Choice(["exhaustive", "random"]), default="exhaustive", show_default=True),
    click.option("--samples", type=click.IntRange(min=1), default=config.FALLBACK_SAMPLES, show_default=True,
                 help="Random-mode sample count."),
    click.option("--seed", type=int, default=config.FALLBACK_SEED, show_default=True),
    click.option("--grid", type=click.FloatRange(min=0, min_open=True), default=None,
                 help="Coarsen the nondeterministic input grid to multiples of this stride."),
    click.option("--workers", type=click.IntRange(min=1), default=config.WORKERS, show_default=True),
    click.option("--fallback/--no-fallback", default=True, show_default=True,
                 help="Fall back to random search when the exhaustive space exceeds the budget."),
    click.option("--count-saturation/--ignore-saturation", default=True, show_default=True,
                 help="Whether a saturating clamp counts as an overflow."),
    click.option("--ce-out", type=click.Path(dir_okay=False), default=DEFAULT_CE_PATH, show_default=True,
                 help="Where a counterexample is written."),
]


def _fail(message: str):
    click.echo(f"error: {message}", err=True)
    sys.exit(2)


def _internal(e: Exception):
    # exit 1 means FAILED; a crash must not look like a verdict
    logger.debug("unexpected error", exc_info=True)
    _fail(f"internal error: {type(e).__name__}: {e}")


def _make_command(command: Command) -> click.Command:
    def callback(system, ce_out, max_=None, min_=None, **flags):
        try:
            doc, _ = load_system(system)
            params = CommandParams(system=doc, max=max_, min=min_, **flags)
            verdict = run_command(command.name, params)
        except (VerificationError, ValidationError) as e:
            _fail(str(e))
        except Exception as e:
            _internal(e)

        click.echo(verdict.banner)
        for note in verdict.stats.notes:
            click.echo(f"note: {note}", err=True)
        if verdict.failed:
            try:
                path = write_file(verdict.counterexample, ce_out)
            except OSError as e:
                _fail(f"cannot write counterexample: {e}")
            click.echo(f"counterexample: {path}", err=True)
            sys.exit(1)

    params_decorators = [
        click.option("--system", type=click.Path(exists=True, dir_okay=False), required=True,
                     help="JSON system description."),
    ]
    for name, make in _TABLE_OPTIONS.items():
        if name in command.required:
            params_decorators.append(make(True))
        elif name in ("max", "min") and command.systems == SS:
            params_decorators.append(make(False))
    params_decorators.extend(_EXTRA_OPTIONS)

    for decorate in reversed(params_decorators):
        callback = decorate(callback)
    help_text = command.summary.capitalize() + "."
    if command.systems == SS:
        help_text += " --max/--min default to the representable range."
    return click.command(command.name, help=help_text)(callback)


@click.group()
@click.option("-v", "--verbose", count=True, help="-v for INFO, -vv for DEBUG on stderr.")
def cli(verbose):
    """Verify fixed-point digital systems under finite word length."""
    level = {0: None, 1: "INFO"}.get(verbose, "DEBUG")
    config.configure_logging(level)


for _command in COMMANDS.values():
    cli.add_command(_make_command(_command))


@cli.command("replay")
@click.option("--ce", "ce_path", type=click.Path(exists=True, dir_okay=False), required=True,
              help="Counterexample file to re-run.")
def replay_command(ce_path):
    """Re-run a counterexample and check that its violation reproduces."""
    try:
        result = replay(read_file(ce_path))
    except VerificationError as e:
        _fail(str(e))
    except Exception as e:
        _internal(e)
    click.echo(f"COUNTEREXAMPLE {result.value.upper()}")
    if result is ReplayResult.REFUTED:
        sys.exit(1)


if __name__ == "__main__":
    cli()
