"""Command line front end: ``ddestab <command> [options]``.

Scalar results are written as JSON, curves and grids as CSV. Exit status is
0 on success, 2 on invalid options and 3 when a numeric routine fails; in
the last two cases a JSON error object goes to stderr.
"""

from __future__ import annotations

import csv
import io
import math
import sys

import click
import numpy as np

from .core import DdeProblem, reduce
from .delay import critical_delay
from .oracle import rightmost_roots
from .region import TOL_BOUNDARY, boundary_curve, classify_lemma2, membership
from .simulate import InsufficientData, decay_rate, integrate
from .sweep import sweep_grid

EXIT_VALIDATION = 2
EXIT_NUMERIC = 3


def _num(x):
    if x is None:
        return "null"
    if isinstance(x, bool):
        return "true" if x else "false"
    if isinstance(x, int):
        return str(x)
    x = float(x)
    if not math.isfinite(x):
        return "null"
    return format(x, ".17g")


def dumps(obj, indent=2, _level=0) -> str:
    """JSON with every float printed to 17 significant digits; non-finite -> null."""
    pad = " " * (indent * (_level + 1))
    end = " " * (indent * _level)
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        items = [f'{pad}"{k}": {dumps(v, indent, _level + 1)}' for k, v in obj.items()]
        return "{\n" + ",\n".join(items) + "\n" + end + "}"
    if isinstance(obj, (list, tuple)):
        if not obj:
            return "[]"
        items = [pad + dumps(v, indent, _level + 1) for v in obj]
        return "[\n" + ",\n".join(items) + "\n" + end + "]"
    if isinstance(obj, str):
        return '"' + obj.replace("\\", "\\\\").replace('"', '\\"') + '"'
    if isinstance(obj, (np.integer,)):
        return str(int(obj))
    return _num(obj)


def _cplx(z):
    return {"re": z.real, "im": z.imag}


def _emit(text: str, output):
    if output is None or output == "-":
        click.echo(text, nl=not text.endswith("\n"))
    else:
        with open(output, "w", newline="") as fh:
            fh.write(text if text.endswith("\n") else text + "\n")


def _csv_text(header, rows) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow([v if isinstance(v, str) else _num(v) for v in row])
    return buf.getvalue()


def _scalar_csv(d: dict) -> str:
    flat = {}
    for k, v in d.items():
        if isinstance(v, dict):
            for kk, vv in v.items():
                if isinstance(vv, dict):
                    for k3, v3 in vv.items():
                        flat[f"{k}_{kk}_{k3}"] = v3
                else:
                    flat[f"{k}_{kk}"] = vv
        elif isinstance(v, list):
            continue
        else:
            flat[k] = v
    return _csv_text(list(flat), [[v if v is not None else "" for v in flat.values()]])


def _write_scalar(d: dict, fmt: str, output):
    _emit(dumps(d) if fmt == "json" else _scalar_csv(d), output)


def _fail(code: int, kind: str, message: str):
    sys.stderr.write(dumps({"error": kind, "message": message}) + "\n")
    sys.exit(code)


def _problem(lambda_re, lambda_im, gamma_re, gamma_im, tau):
    try:
        return DdeProblem(complex(lambda_re, lambda_im), complex(gamma_re, gamma_im), tau)
    except (TypeError, ValueError) as exc:
        raise click.BadParameter(str(exc))


def _problem_options(fn):
    for name in ("gamma-im", "gamma-re", "lambda-im", "lambda-re"):
        fn = click.option(f"--{name}", type=float, default=0.0, show_default=True)(fn)
    return fn


def _output_options(default_format):
    def deco(fn):
        fn = click.option("--format", "fmt", type=click.Choice(["json", "csv"]),
                          default=default_format, show_default=True)(fn)
        fn = click.option("--output", "-o", type=click.Path(dir_okay=False), default=None,
                          help="Write to this file instead of stdout.")(fn)
        return fn
    return deco


@click.group()
def main():
    """Stability analysis of x'(t) = lambda x(t) + gamma x(t - tau)."""


@main.command()
@_problem_options
@click.option("--tau", type=float, required=True)
@click.option("--tol-boundary", type=float, default=TOL_BOUNDARY, show_default=True)
@_output_options("json")
def check(lambda_re, lambda_im, gamma_re, gamma_im, tau, tol_boundary, output, fmt):
    """Stable / Marginal / Unstable verdict for one equation."""
    red = reduce(_problem(lambda_re, lambda_im, gamma_re, gamma_im, tau))
    verdict = membership(red.eta, red.a, red.tau, tol=tol_boundary)
    d = verdict.to_dict()
    out = {
        "status": d["status"],
        "case_tag": d["case_tag"],
        "reduced": {"a": red.a, "eta": _cplx(red.eta), "tau": red.tau, "b": red.b},
        "witness": d["witness"],
    }
    _write_scalar(out, fmt, output)


@main.command("max-delay")
@_problem_options
@click.option("--a", "a", type=float, default=None, help="Reduced coefficient (with --eta-re/--eta-im).")
@click.option("--eta-re", type=float, default=None)
@click.option("--eta-im", type=float, default=None)
@_output_options("json")
def max_delay(lambda_re, lambda_im, gamma_re, gamma_im, a, eta_re, eta_im, output, fmt):
    """Critical delay tau*: stable for every 0 < tau < tau*."""
    if a is not None or eta_re is not None or eta_im is not None:
        if a is None:
            raise click.UsageError("--a is required with --eta-re/--eta-im")
        eta = complex(eta_re or 0.0, eta_im or 0.0)
    else:
        if lambda_im != 0:
            raise click.UsageError(
                "max-delay needs a real lambda: with Im lambda != 0 the rotated "
                "coefficient depends on tau; pass --a/--eta-re/--eta-im instead")
        a, eta = lambda_re, complex(gamma_re, gamma_im)
    _write_scalar(critical_delay(a, eta).to_dict(), fmt, output)


@main.command()
@click.option("--a", "a", type=float, required=True)
@click.option("--tau", type=float, required=True)
@click.option("--samples", type=click.IntRange(min=2), default=200, show_default=True)
@click.option("--output", "-o", type=click.Path(dir_okay=False), default=None)
def boundary(a, tau, samples, output):
    """CSV of the region boundary: upper arc, mirrored lower arc, disc circle."""
    if not tau > 0:
        raise click.BadParameter("tau must be positive")
    try:
        curve = boundary_curve(a, tau, samples)
    except ValueError as exc:
        raise click.BadParameter(str(exc))
    rows = []
    for w, p, ang in zip(curve.w_values, curve.points, curve.angles):
        rows.append([w, p.real, p.imag, ang, "upper"])
    for w, p, ang in zip(curve.w_values, curve.lower(), curve.angles):
        # the principal branch keeps +pi on the negative real axis
        rows.append([w, p.real, p.imag, ang if ang >= math.pi else 0.0 - ang, "lower"])
    if curve.closed_by_disc_arc:
        for phi in np.linspace(-math.pi, math.pi, samples)[1:]:
            z = abs(a) * complex(math.cos(phi), math.sin(phi))
            rows.append([abs(a), z.real, z.imag, phi, "disc"])
    _emit(_csv_text(["w", "re_eta", "im_eta", "arg_eta", "branch"], rows), output)


@main.command()
@_problem_options
@click.option("--tau", type=float, required=True)
@click.option("--k", type=click.IntRange(min=1), default=5, show_default=True)
@_output_options("json")
def roots(lambda_re, lambda_im, gamma_re, gamma_im, tau, k, output, fmt):
    """Rightmost characteristic roots and the closed right half-plane count."""
    red = reduce(_problem(lambda_re, lambda_im, gamma_re, gamma_im, tau))
    rep = rightmost_roots(red.a, red.eta, red.tau, k=k)
    if not rep.roots:
        _fail(EXIT_NUMERIC, "numeric", "Newton refinement did not converge from any seed")
    d = rep.to_dict()
    # undo the rotation: roots of the original equation are shifted by i*b
    d["roots"] = [_cplx(r + 1j * red.b) for r in rep.roots]
    if fmt == "json":
        _emit(dumps(d), output)
    else:
        rows = [[r.real, r.imag + red.b, res] for r, res in zip(rep.roots, rep.residuals)]
        _emit(_csv_text(["re_s", "im_s", "residual"], rows), output)


@main.command()
@click.option("--a", "a", type=float, required=True)
@click.option("--tau", type=float, required=True)
@click.option("--re-min", type=float, default=-3.0, show_default=True)
@click.option("--re-max", type=float, default=1.0, show_default=True)
@click.option("--im-min", type=float, default=-2.0, show_default=True)
@click.option("--im-max", type=float, default=2.0, show_default=True)
@click.option("--resolution", type=click.IntRange(min=2), default=41, show_default=True)
@click.option("--tol-boundary", type=float, default=TOL_BOUNDARY, show_default=True)
@click.option("--jobs", type=click.IntRange(min=1), default=1, show_default=True)
@click.option("--output", "-o", type=click.Path(dir_okay=False), default=None)
def sweep(a, tau, re_min, re_max, im_min, im_max, resolution, tol_boundary, jobs, output):
    """CSV grid of region verdicts next to oracle root counts."""
    if not tau > 0:
        raise click.BadParameter("tau must be positive")
    if re_min >= re_max or im_min >= im_max:
        raise click.BadParameter("window bounds must satisfy min < max")
    cells = sweep_grid(a, tau, (re_min, re_max), (im_min, im_max), resolution, tol_boundary, jobs)
    rows = [[c.re_eta, c.im_eta, c.verdict_code, c.oracle_count, "true" if c.agree else "false"]
            for c in cells]
    _emit(_csv_text(["re_eta", "im_eta", "verdict_code", "oracle_count", "agree_flag"], rows), output)


@main.command()
@_problem_options
@click.option("--tau", type=float, required=True)
@click.option("--horizon", type=float, default=60.0, show_default=True)
@click.option("--steps-per-delay", type=click.IntRange(min=16), default=64, show_default=True)
@click.option("--tail-fraction", type=click.FloatRange(0, 0.5, min_open=True), default=0.5,
              show_default=True)
@_output_options("csv")
def simulate(lambda_re, lambda_im, gamma_re, gamma_im, tau, horizon, steps_per_delay,
             tail_fraction, output, fmt):
    """Integrate from constant history 1 and estimate the decay rate.

    CSV (t, re_x, im_x, abs_x) goes to --output or stdout; with --format json
    only the summary is written. When the CSV goes to a file the JSON summary
    is printed to stdout.
    """
    if not horizon > 0:
        raise click.BadParameter("horizon must be positive")
    prob = _problem(lambda_re, lambda_im, gamma_re, gamma_im, tau)
    traj = integrate(prob, T=horizon, steps_per_delay=steps_per_delay)
    try:
        rate = decay_rate(traj, tail_fraction)
    except InsufficientData as exc:
        _fail(EXIT_NUMERIC, "numeric", str(exc))
    summary = {"decay_rate": rate, "diverged": traj.diverged, "t_end": float(traj.times[-1])}
    if fmt == "json":
        _emit(dumps(summary), output)
        return
    rows = [[t, x.real, x.imag, abs(x)] for t, x in zip(traj.times, traj.values)]
    _emit(_csv_text(["t", "re_x", "im_x", "abs_x"], rows), output)
    if output not in (None, "-"):
        click.echo(dumps(summary))


@main.command()
@click.option("--beta", type=float, required=True)
@_output_options("json")
def lemma2(beta, output, fmt):
    """Shape of {r >= 0 : r/(r^2+1) <= arctan(r) + beta}."""
    if not math.isfinite(beta):
        raise click.BadParameter("beta must be finite")
    _write_scalar(classify_lemma2(beta).to_dict(), fmt, output)


def run(argv=None) -> int:
    """Entry point with machine-readable errors and fixed exit codes."""
    try:
        main.main(args=argv, prog_name="ddestab", standalone_mode=False)
    except click.exceptions.Exit as exc:
        return exc.exit_code
    except click.exceptions.Abort:
        return 1
    except click.ClickException as exc:
        sys.stderr.write(dumps({"error": "validation", "message": exc.format_message()}) + "\n")
        return EXIT_VALIDATION
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else 1
    except (ArithmeticError, FloatingPointError) as exc:
        sys.stderr.write(dumps({"error": "numeric", "message": str(exc)}) + "\n")
        return EXIT_NUMERIC
    return 0


def console_main():
    sys.exit(run())


if __name__ == "__main__":
    console_main()
