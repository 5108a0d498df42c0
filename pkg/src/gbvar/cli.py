"""Command-line surface.

Subcommands: simulate | fit | bootstrap | tune | bench | ingest.
Every flag is long-form; any flag may instead come from a JSON config
file (--config), with explicit command-line values taking precedence.
Exit codes: 0 success, 2 invalid input, 3 numerical failure. All file
outputs are byte-identical across repeated runs with the same flags.
"""

import functools
import io
import json
import sys

import click
import numpy as np

from . import __version__
from ._backend import backend_name
from ._util import fmt_float
from .bench import BenchConfig, bench_report_csv, run_bench
from .bootstrap import (BootstrapConfig, bootstrap_result_to_dict,
                        bootstrap_run, default_bandwidth, simultaneous_ci)
from .errors import NumericalError, UserInputError
from .estimate import fit_from_dict, fit_to_dict, post_select_fit
from .model import params_from_dict
from .moments import sample_moments
from .panel import (BinaryPanel, binarize_advance_decline,
                    binarize_growth_threshold, read_numeric_csv, read_panel,
                    write_panel, write_panel_csv)
from .simulate import PRESET_NAMES, SimConfig, dgp_preset, simulate
from .tuning import TuneGrid, tune


def cli_errors(fn):
    """Map domain exceptions to exit codes 2 (input) and 3 (numerics)."""
    @functools.wraps(fn)
    def wrapper(*args, **kwargs):
        try:
            return fn(*args, **kwargs)
        except UserInputError as exc:
            click.echo(f"{type(exc).__name__}: {exc}", err=True)
            sys.exit(2)
        except NumericalError as exc:
            click.echo(f"{type(exc).__name__}: {exc}", err=True)
            sys.exit(3)
    return wrapper


def merge_config(ctx: click.Context, config_path, values: dict) -> dict:
    """Fill defaults from a JSON config file; explicit flags win.

    Keys use flag spelling (dashes) or parameter spelling (underscores).
    """
    if not config_path:
        return values
    with open(config_path) as fh:
        doc = json.load(fh)
    if not isinstance(doc, dict):
        raise UserInputError("config file must hold a JSON object")
    for key, val in doc.items():
        name = key.replace("-", "_")
        if name not in values:
            raise UserInputError(f"config key {key!r} is not a flag of "
                                 f"this command")
        source = ctx.get_parameter_source(name)
        if source != click.core.ParameterSource.COMMANDLINE:
            values[name] = val
    return values


def emit(text: str, out_path) -> None:
    if out_path:
        with open(out_path, "w") as fh:
            fh.write(text)
    else:
        click.echo(text, nl=False)


def dump_json(doc: dict) -> str:
    return json.dumps(doc, indent=2, sort_keys=True) + "\n"


config_option = click.option(
    "--config", "config_path", type=click.Path(exists=True), default=None,
    help="JSON file supplying defaults for any flag of this command.")


@click.group()
@click.version_option(__version__, message=f"%(version)s (backend: {backend_name()})")
def main():
    """Simulation, sparse estimation, and bootstrap inference for
    high-dimensional binary vector autoregressions."""


# -- simulate -------------------------------------------------------------------

@main.command(name="simulate")
@click.option("--preset", type=str, default=None,
              help=f"Named parameter set: {', '.join(PRESET_NAMES)}.")
@click.option("--params", "params_path", type=click.Path(exists=True),
              default=None, help="JSON parameter file (alternative to --preset).")
@click.option("--n", type=int, required=True, help="Output length.")
@click.option("--d", type=int, default=None, help="Dimension (presets only).")
@click.option("--burn-in", type=int, default=1000, show_default=True)
@click.option("--seed", type=int, default=0, show_default=True)
@click.option("--innovation-mode", type=click.Choice(["independent", "gaussian-copula"]),
              default="independent", show_default=True)
@click.option("--innovation-corr", "corr_path", type=click.Path(exists=True),
              default=None, help="CSV correlation matrix (no header) for the copula mode.")
@click.option("--out", "out_path", type=click.Path(), default=None,
              help="Panel file (.csv or binary); stdout CSV when omitted.")
@config_option
@click.pass_context
@cli_errors
def cmd_simulate(ctx, **kwargs):
    """Simulate a binary panel from a preset or a parameter file."""
    kw = merge_config(ctx, kwargs.pop("config_path"), kwargs)
    if (kw["preset"] is None) == (kw["params_path"] is None):
        raise UserInputError("exactly one of --preset or --params is required")
    if kw["preset"] is not None:
        params = dgp_preset(kw["preset"], kw["d"])
    else:
        with open(kw["params_path"]) as fh:
            params = params_from_dict(json.load(fh))
    corr = None
    if kw["corr_path"] is not None:
        corr = np.loadtxt(kw["corr_path"], delimiter=",", ndmin=2)
    config = SimConfig(n=kw["n"], burn_in=kw["burn_in"], seed=kw["seed"],
                       innovation_mode=kw["innovation_mode"],
                       innovation_corr=corr)
    panel = simulate(params, config)
    _emit_panel(panel, kw["out_path"])


def _emit_panel(panel: BinaryPanel, out_path) -> None:
    if out_path:
        write_panel(panel, out_path)
    else:
        buf = io.StringIO()
        write_panel_csv(panel, buf)
        click.echo(buf.getvalue(), nl=False)


# -- fit ------------------------------------------------------------------------

@main.command(name="fit")
@click.option("--panel", "panel_path", type=click.Path(exists=True), required=True)
@click.option("--lambda", "lam", type=float, required=True,
              help="Lasso penalty (the 1/2d objective scaling is built in).")
@click.option("--bd", type=float, required=True, help="Selection threshold b_d.")
@click.option("--max-iter", type=int, default=100_000, show_default=True)
@click.option("--tol", type=float, default=1e-8, show_default=True)
@click.option("--out", "out_path", type=click.Path(), default=None,
              help="Fit JSON; stdout when omitted.")
@config_option
@click.pass_context
@cli_errors
def cmd_fit(ctx, **kwargs):
    """Post-selection fit of the transition matrix from a binary panel."""
    from .estimate import LassoConfig

    kw = merge_config(ctx, kwargs.pop("config_path"), kwargs)
    panel = read_panel(kw["panel_path"])
    cov = sample_moments(panel)
    config = LassoConfig(kw["lam"], kw["max_iter"], kw["tol"])
    fit = post_select_fit(cov, kw["lam"], kw["bd"], config)
    emit(dump_json(fit_to_dict(fit)), kw["out_path"])


# -- bootstrap --------------------------------------------------------------------

@main.command(name="bootstrap")
@click.option("--panel", "panel_path", type=click.Path(exists=True), required=True)
@click.option("--fit", "fit_path", type=click.Path(exists=True), required=True,
              help="Fit JSON produced by the fit subcommand.")
@click.option("--b", "n_boot", type=int, default=1000, show_default=True,
              help="Bootstrap replicate count B.")
@click.option("--alpha", type=float, default=0.05, show_default=True)
@click.option("--h-n", type=float, default=None,
              help="Multiplier correlation bandwidth; default n^(1/3).")
@click.option("--kernel", type=str, default="gaussian", show_default=True)
@click.option("--seed", type=int, default=0, show_default=True)
@click.option("--out", "out_path", type=click.Path(), default=None,
              help="Result JSON; stdout when omitted.")
@click.option("--ci-out", "ci_path", type=click.Path(), default=None,
              help="Optional CSV of per-entry simultaneous intervals.")
@config_option
@click.pass_context
@cli_errors
def cmd_bootstrap(ctx, **kwargs):
    """Wild-bootstrap critical value and simultaneous intervals."""
    kw = merge_config(ctx, kwargs.pop("config_path"), kwargs)
    panel = read_panel(kw["panel_path"])
    with open(kw["fit_path"]) as fh:
        fit = fit_from_dict(json.load(fh))
    cov = sample_moments(panel)
    h_n = kw["h_n"] if kw["h_n"] is not None else default_bandwidth(panel.n)
    config = BootstrapConfig(kw["n_boot"], kw["alpha"], h_n,
                             kw["kernel"], kw["seed"])
    result = bootstrap_run(panel, fit, cov, config)
    emit(dump_json(bootstrap_result_to_dict(result)), kw["out_path"])
    if kw["ci_path"]:
        ci = simultaneous_ci(result, fit, panel.n)
        lines = ["i,j,lower,upper,selected"]
        d = fit.d
        for i in range(d):
            for j in range(d):
                lines.append(
                    f"{i},{j},{fmt_float(ci['lower'][i, j])},"
                    f"{fmt_float(ci['upper'][i, j])},"
                    f"{1 if ci['selected'][i, j] else 0}")
        with open(kw["ci_path"], "w") as fh:
            fh.write("\n".join(lines) + "\n")


# -- tune -------------------------------------------------------------------------

def _parse_grid(text):
    if text is None:
        return None
    try:
        return np.array([float(v) for v in str(text).split(",") if v.strip() != ""])
    except ValueError:
        raise UserInputError(f"could not parse grid {text!r}; expected "
                             "comma-separated reals") from None


@main.command(name="tune")
@click.option("--panel", "panel_path", type=click.Path(exists=True), required=True)
@click.option("--lambda-grid", "lambda_grid", type=str, default=None,
              help="Comma-separated penalties; default log grid 1e-7..1e-1 (15 points).")
@click.option("--bd-grid", "bd_grid", type=str, default=None,
              help="Comma-separated thresholds; default 0..0.3 (16 points).")
@click.option("--criterion", type=click.Choice(["tau1", "tau2"]),
              default="tau2", show_default=True)
@click.option("--train-fraction", type=float, default=0.75, show_default=True)
@click.option("--out", "out_path", type=click.Path(), default=None,
              help="Chosen pair as JSON; stdout when omitted.")
@click.option("--table-out", "table_path", type=click.Path(), default=None,
              help="Optional CSV of the full score table.")
@config_option
@click.pass_context
@cli_errors
def cmd_tune(ctx, **kwargs):
    """Train/test search for the penalty and selection threshold."""
    kw = merge_config(ctx, kwargs.pop("config_path"), kwargs)
    panel = read_panel(kw["panel_path"])
    grid_args = {}
    lg = _parse_grid(kw["lambda_grid"])
    bg = _parse_grid(kw["bd_grid"])
    if lg is not None:
        grid_args["lambda_grid"] = lg
    if bg is not None:
        grid_args["bd_grid"] = bg
    grid = TuneGrid(criterion=kw["criterion"],
                    train_fraction=kw["train_fraction"], **grid_args)
    result = tune(panel, grid)
    emit(dump_json({"lambda": result.lam, "bd": result.bd,
                    "criterion": result.criterion, "score": result.score}),
         kw["out_path"])
    if kw["table_path"]:
        lines = ["lambda,bd,tau1,tau2"]
        for lam, bd, t1, t2 in result.table:
            lines.append(f"{fmt_float(lam)},{fmt_float(bd)},"
                         f"{fmt_float(t1)},{fmt_float(t2)}")
        with open(kw["table_path"], "w") as fh:
            fh.write("\n".join(lines) + "\n")


# -- bench ------------------------------------------------------------------------

@main.command(name="bench")
@click.option("--dgp", type=str, required=True,
              help="Preset to benchmark (dgp1, dgp2, dgp3, ...).")
@click.option("--n", type=int, default=1500, show_default=True)
@click.option("--d", type=int, default=80, show_default=True)
@click.option("--reps", type=int, default=50, show_default=True,
              help="Monte Carlo replicates.")
@click.option("--b", "n_boot", type=int, default=200, show_default=True,
              help="Bootstrap replicates per Monte Carlo replicate (0 = skip).")
@click.option("--alpha", type=float, default=0.05, show_default=True)
@click.option("--seed", type=int, default=0, show_default=True)
@click.option("--lambda", "lam", type=float, default=None,
              help="Override the preset's reference penalty.")
@click.option("--bd", type=float, default=None,
              help="Override the preset's reference threshold.")
@click.option("--h-n", type=float, default=None,
              help="Override the preset's reference bandwidth.")
@click.option("--methods", type=str, default="lasso,threshold,post",
              show_default=True, help="Comma-separated reporting methods.")
@click.option("--out", "out_path", type=click.Path(), default=None,
              help="Summary CSV; stdout when omitted.")
@config_option
@click.pass_context
@cli_errors
def cmd_bench(ctx, **kwargs):
    """Replicated estimation-error and coverage benchmark."""
    kw = merge_config(ctx, kwargs.pop("config_path"), kwargs)
    methods = tuple(m.strip() for m in str(kw["methods"]).split(",") if m.strip())
    config = BenchConfig(dgp=kw["dgp"], n=kw["n"], d=kw["d"], reps=kw["reps"],
                         B=kw["n_boot"], alpha=kw["alpha"], seed=kw["seed"],
                         lam=kw["lam"], bd=kw["bd"], h_n=kw["h_n"],
                         methods=methods)
    report = run_bench(config)
    emit(bench_report_csv(report), kw["out_path"])
    click.echo(f"bench: {config.reps} replicates in {report.wall_time:.1f}s",
               err=True)


# -- ingest -----------------------------------------------------------------------

@main.command(name="ingest")
@click.option("--input", "input_path", type=click.Path(exists=True), required=True,
              help="Real-valued CSV with a header row.")
@click.option("--mode", type=click.Choice(["advance-decline", "growth-threshold"]),
              required=True)
@click.option("--pct", type=float, default=10.0, show_default=True,
              help="Growth percentage for growth-threshold mode.")
@click.option("--out", "out_path", type=click.Path(), default=None,
              help="Panel file; stdout CSV when omitted.")
@config_option
@click.pass_context
@cli_errors
def cmd_ingest(ctx, **kwargs):
    """Binarize a numeric CSV into a 0/1 panel."""
    kw = merge_config(ctx, kwargs.pop("config_path"), kwargs)
    labels, values = read_numeric_csv(kw["input_path"])
    if kw["mode"] == "advance-decline":
        data = binarize_advance_decline(values)
    else:
        data = binarize_growth_threshold(values, kw["pct"])
    _emit_panel(BinaryPanel(data, labels=labels), kw["out_path"])


if __name__ == "__main__":  # pragma: no cover
    main()
