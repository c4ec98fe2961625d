"""
Command line surface.

    python cli.py curve     [PROBLEM] --scheme rate-cr --from 0 --to 4 --points 41
    python cli.py table     [PROBLEM] [--check]
    python cli.py simulate  [PROBLEM] --scheme uncoded --power 1 --samples 1000000 --seed 7
    python cli.py summary   [PROBLEM]
    python cli.py schema    sweep

PROBLEM is a JSON problem file; without it the reference configuration
lambda = (2, 3, 1), lambda_hat = (3, 1, 1) is used.

Exit codes: 0 ok, 1 usage or input error, 2 failed check or gate.
"""

import sys
import logging

import click

from configs import simulation_config
from errors import CheckFailed, TransportError
from schemas import SCHEMAS, SweepScheme
from sweeps import (
    SIMULATION_SCHEMES,
    check_table,
    cmd_curve,
    cmd_simulate,
    cmd_table,
    is_reference_problem,
    make_sweep_config,
    summary,
)
from utils import (
    configure_logging,
    curve_to_csv,
    dumps_json,
    format_table,
    load_problem,
    load_problem_config,
    problem_specs,
    write_output,
)

logger = logging.getLogger(__name__)

problem_argument = click.argument("problem", required=False, type=click.Path(dir_okay=False))
out_option = click.option("--out", "out", default=None, type=click.Path(dir_okay=False), help="Output file (default stdout).")


class TransportGroup(click.Group):
    """Click group translating toolkit errors into exit codes"""

    def main(self, args=None, prog_name=None, complete_var=None, standalone_mode=True, **extra):
        try:
            rv = super().main(args=args, prog_name=prog_name, complete_var=complete_var, standalone_mode=False, **extra)
            code = rv if isinstance(rv, int) else 0
        except TransportError as e:
            click.echo(f"Error: {e}", err=True)
            code = e.exit_code
        except click.ClickException as e:
            e.show()
            code = 1
        except click.exceptions.Abort:
            click.echo("Aborted!", err=True)
            code = 1
        if standalone_mode:
            sys.exit(code)
        return code


@click.group(cls=TransportGroup)
@click.option("--log-level", default=None, help="Logging level (default from GWOT_LOG_LEVEL).")
def cli(log_level):
    """Constrained Gaussian optimal transport: distortion curves, allocations and simulations."""
    configure_logging(log_level)


# ---------------------------------------------------------------------
# curve
# ---------------------------------------------------------------------
@cli.command()
@problem_argument
@click.option("--scheme", required=True, type=click.Choice([s.value for s in SweepScheme]))
@click.option("--from", "start", required=True, type=float, help="First control value (R, Gamma or P).")
@click.option("--to", "stop", required=True, type=float, help="Last control value.")
@click.option("--points", default=21, show_default=True, type=int)
@click.option("--log", "log_spacing", is_flag=True, help="Geometric spacing of control values.")
@click.option("--format", "fmt", default="csv", show_default=True, type=click.Choice(["csv", "json"]))
@click.option("--jobs", default=1, show_default=True, type=int, help="Worker threads.")
@click.option("--threshold", is_flag=True, help="Add the hybrid power threshold P* to every point.")
@out_option
def curve(problem, scheme, start, stop, points, log_spacing, fmt, jobs, threshold, out):
    """Sweep a distortion curve and emit CSV or JSON."""
    p = load_problem(problem)
    config = make_sweep_config(
        scheme=scheme, start=start, stop=stop, points=points, spacing="log" if log_spacing else "linear"
    )
    result = cmd_curve(config, p, jobs=jobs, with_threshold=threshold)
    if fmt == "csv":
        write_output(curve_to_csv(result.points), out)
    else:
        write_output(dumps_json(result.model_dump(by_alias=True, mode="json")), out)


# ---------------------------------------------------------------------
# table
# ---------------------------------------------------------------------
@cli.command()
@problem_argument
@click.option("--check", is_flag=True, help="Compare with the known reference allocations (reference problem only).")
@click.option("--format", "fmt", default="text", show_default=True, type=click.Choice(["text", "json"]))
@out_option
def table(problem, check, fmt, out):
    """Print CR and NoCR rate allocations at R = 0.1, 2.1, 4.1."""
    p = load_problem(problem)
    rows = cmd_table(p)
    if fmt == "text":
        write_output(format_table(rows), out)
    else:
        write_output(dumps_json([row.model_dump(by_alias=True) for row in rows]), out)

    if check:
        if not is_reference_problem(p):
            logger.warning("--check only applies to the reference configuration; skipped")
            return
        check_table(rows)
        click.echo("Allocation table check passed", err=True)


# ---------------------------------------------------------------------
# simulate
# ---------------------------------------------------------------------
@cli.command()
@problem_argument
@click.option("--scheme", required=True, type=click.Choice(list(SIMULATION_SCHEMES)))
@click.option("--rate", type=float, default=None, help="Total rate for --scheme coupling.")
@click.option("--allocation", default="cr", show_default=True, type=click.Choice(["cr", "ncr"]))
@click.option("--power", type=float, default=None, help="Channel power for --scheme uncoded.")
@click.option("--keep", type=int, default=None, help="Encoder dimension K for --scheme dim.")
@click.option("--samples", default=simulation_config.default_samples, show_default=True, type=int)
@click.option("--seed", default=simulation_config.default_seed, show_default=True, type=int)
@click.option("--jobs", default=simulation_config.jobs, show_default=True, type=int)
@out_option
def simulate(problem, scheme, rate, allocation, power, keep, samples, seed, jobs, out):
    """Monte Carlo check of a scheme against its closed form; exit 2 if a gate fails."""
    p = load_problem(problem)
    specs = problem_specs(load_problem_config(problem)) if problem and scheme == "optimal-map" else None
    report = cmd_simulate(
        scheme, p, samples, seed, rate=rate, power=power, keep=keep,
        allocation=allocation, specs=specs, jobs=jobs,
    )
    write_output(dumps_json(report.model_dump(by_alias=True)), out)
    if not report.passed:
        raise CheckFailed(
            f"Simulation gate failed (distortion pass={report.distortion_pass}, marginal pass={report.marginal_pass})"
        )


# ---------------------------------------------------------------------
# summary / schema
# ---------------------------------------------------------------------
@cli.command(name="summary")
@problem_argument
@out_option
def summary_command(problem, out):
    """Print canonical eigenpairs, D_min, D_max, W2^2 and P*."""
    write_output(dumps_json(summary(load_problem(problem))), out)


@cli.command()
@click.argument("name", type=click.Choice(sorted(SCHEMAS)))
def schema(name):
    """Print the JSON schema of a wire model."""
    write_output(dumps_json(SCHEMAS[name].model_json_schema(by_alias=True)))


if __name__ == "__main__":
    cli()
