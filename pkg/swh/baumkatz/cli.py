# Copyright (C) 2025-2026  The Software Heritage developers
# See the AUTHORS file at the top-level directory of this distribution
# License: GNU General Public License version 3, or any later version
# See top-level LICENSE file for more information

# WARNING: do not import unnecessary things here to keep cli startup time under
# control
import csv
import functools
import io
import logging
import os
from typing import Any, Dict, Iterable, List, Optional, Sequence

import click

from swh.core.cli import CONTEXT_SETTINGS
from swh.core.cli import swh as swh_cli_group

logger = logging.getLogger(__name__)


def reported(f):
    """Turn laboratory errors into a one-line reason on stderr and the exit
    code of their class."""

    @functools.wraps(f)
    def wrapper(ctx, *args, **kwargs):
        from swh.baumkatz.exception import BaumKatzError

        try:
            return f(ctx, *args, **kwargs)
        except BaumKatzError as e:
            click.echo(f"error: {e.reason}: {e}", err=True)
            ctx.exit(e.exit_code)

    return wrapper


def effective_config(ctx, command: str) -> Dict[str, Any]:
    from swh.baumkatz.config import merge

    conf = merge(ctx.obj["config"], command, ctx.obj["overrides"])
    logger.debug("%s config: %s", command, conf)
    return conf


def metadata(conf: Dict[str, Any], **extra: Any) -> Dict[str, Any]:
    """Reproducibility metadata of an output file; no timestamps."""
    import numpy
    import scipy

    from swh.baumkatz import __version__
    from swh.baumkatz.utils import config_hash

    # the number of worker threads does not change any result
    hashed = {key: value for key, value in conf.items() if key != "threads"}
    meta: Dict[str, Any] = {
        "config_hash": config_hash(hashed),
        "seed": conf.get("seed", "none"),
        "horizon": conf.get("horizon", "none"),
        "version": f"swh.baumkatz {__version__}, numpy {numpy.__version__}, "
        f"scipy {scipy.__version__}",
    }
    meta.update(extra)
    return meta


def render_csv(
    meta: Dict[str, Any], columns: Sequence[str], rows: Iterable[Sequence[Any]]
) -> str:
    """CSV text with ``# key=value`` metadata lines before the header."""
    from swh.baumkatz.utils import format_number

    def cell(value: Any) -> str:
        if isinstance(value, str):
            return value
        if value is None:
            return ""
        return format_number(value)

    buffer = io.StringIO()
    for key, value in meta.items():
        buffer.write(f"# {key}={cell(value)}\n")
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(columns)
    for row in rows:
        writer.writerow([cell(value) for value in row])
    return buffer.getvalue()


def emit(ctx, name: str, text: str) -> None:
    """Write ``text`` to ``<out>/<name>``, or to stdout without output directory."""
    out = ctx.obj.get("out")
    if not out:
        click.echo(text, nl=False)
        return
    os.makedirs(out, exist_ok=True)
    path = os.path.join(out, name)
    with open(path, "w", newline="") as f:
        f.write(text)
    logger.info("wrote %s", path)


@swh_cli_group.group(name="baumkatz", context_settings=CONTEXT_SETTINGS)
@click.option(
    "--config-file",
    "--config",
    "-C",
    default=None,
    type=click.Path(
        exists=True,
        dir_okay=False,
    ),
    help="Configuration file.",
)
@click.option(
    "--out",
    "-o",
    default=None,
    type=click.Path(file_okay=False),
    help="Output directory; results go to stdout without it.",
)
@click.option(
    "--seed",
    type=click.IntRange(0, 2**64 - 1),
    default=None,
    help="Seed, overriding the configuration.",
)
@click.option(
    "--threads",
    type=click.IntRange(min=1),
    default=None,
    help="Worker threads; results do not depend on it.",
)
@click.option(
    "--trials",
    type=click.IntRange(min=1),
    default=None,
    help="Monte Carlo replicas, overriding the configuration.",
)
@click.pass_context
def baumkatz(ctx, config_file, out, seed, threads, trials):
    """Complete convergence laboratory: critical exponents, counterexample
    processes, exact and Monte Carlo tails, maximal inequalities and series
    ledgers.

    """
    from swh.baumkatz.config import read
    from swh.baumkatz.exception import ConfigurationError

    ctx.ensure_object(dict)
    logger.debug("ctx: %s", ctx)

    if not config_file:
        config_file = os.environ.get("SWH_CONFIG_FILENAME")

    try:
        ctx.obj["config"] = read(config_file)
    except ConfigurationError as e:
        click.echo(f"error: {e.reason}: {e}", err=True)
        ctx.exit(e.exit_code)
    ctx.obj["out"] = out
    ctx.obj["overrides"] = {"seed": seed, "threads": threads, "trials": trials}
    logger.debug("config_file: %s", config_file)
    logger.debug("config: %s", ctx.obj["config"])


@baumkatz.command(name="exponent", context_settings=CONTEXT_SETTINGS)
@click.pass_context
@reported
def exponent(ctx):
    """Critical moment orders q(r, p) of the configured regimes.

    Expected configuration: ``regime``, ``r``, ``p``, or a list ``rows`` of
    such mappings.

    """
    from swh.baumkatz.config import parse_params

    conf = effective_config(ctx, "exponent")
    entries = conf.get("rows") or [conf]
    rows = []
    for entry in entries:
        params = parse_params(entry)
        rows.append([params.regime.value, params.r, params.p, params.q])
    columns = ["regime", "r", "p", "q"]
    emit(ctx, "exponent.csv", render_csv(metadata(conf), columns, rows))


@baumkatz.command(name="envelope", context_settings=CONTEXT_SETTINGS)
@click.pass_context
@reported
def envelope(ctx):
    """Run an envelope construction on ``f`` over ``horizon`` dyadic levels.

    ``construction`` is one of ``regularize`` (on ``1/(n ln^2(n+1))``),
    ``ratio_smooth``, ``smooth``, ``convex``, ``sqrt`` (with ``q_exp``),
    ``power_concave`` and ``power_convex`` (with ``q_exp``).

    """
    from swh.baumkatz.config import (
        number,
        parse_function,
        positive_int,
        require_seed,
    )
    from swh.baumkatz.funclib.constructions import DEFAULT_POINTS, run_construction

    conf = effective_config(ctx, "envelope")
    construction = str(conf.get("construction", "convex"))
    horizon = positive_int(conf, "horizon")
    result = run_construction(
        construction,
        parse_function(conf),
        horizon,
        q_exp=number(conf, "q_exp") if "q_exp" in conf else None,
        seed=require_seed(conf) if "seed" in conf else 0,
        points=positive_int(conf, "points", DEFAULT_POINTS),
    )
    meta = metadata(conf, construction=construction)
    meta.update({f"report.{key}": value for key, value in result.report.items()})
    emit(
        ctx,
        "envelope.csv",
        render_csv(meta, result.columns, result.rows),
    )


def _spec_rows(spec) -> List[List[Any]]:
    from swh.baumkatz.generators import block_formula, block_index, exact_moment
    from swh.baumkatz.generators.counterexamples import critical_moment_order

    q_exp = critical_moment_order(spec)
    rows: List[List[Any]] = []
    for k in range(1, block_index(spec.horizon) + 1):
        block = spec.block(k)
        if block is None:
            atom, prob = block_formula(spec.kind, spec.params, spec.f, k)
            rows.append([k, atom, prob, False, None, 0.0])
        else:
            moment = exact_moment(spec, min(block.start, spec.horizon), q_exp)
            rows.append([k, block.atom, block.prob, True, block.certified, moment])
    return rows


@baumkatz.command(name="spec", context_settings=CONTEXT_SETTINGS)
@click.pass_context
@reported
def spec(ctx):
    """Build a counterexample: block table with p_k, k0 and exact moments.

    Expected configuration: ``process.kind``, ``r``, ``p``, ``f``, ``horizon``.

    """
    from swh.baumkatz.config import parse_process
    from swh.baumkatz.exception import ValidationError
    from swh.baumkatz.generators import expected_moment

    conf = effective_config(ctx, "spec")
    process = parse_process(conf)
    if not process.kind.is_counterexample:
        raise ValidationError(f"{process.kind.value} is not a counterexample")
    meta = metadata(
        conf,
        kind=process.kind.value,
        k0=process.k0,
        c_const=process.c_const,
        moment=expected_moment(process),
    )
    logger.info("built %s with k0=%s", process.kind.value, process.k0)
    columns = ["k", "atom", "p_k", "active", "certified", "moment"]
    emit(ctx, "spec.csv", render_csv(meta, columns, _spec_rows(process)))


@baumkatz.command(name="moments", context_settings=CONTEXT_SETTINGS)
@click.pass_context
@reported
def moments(ctx):
    """Exact moments E|X|^q f(|X|) of every active block (``q_exp`` defaults to
    the critical order of the construction)."""
    from swh.baumkatz.config import number, parse_process
    from swh.baumkatz.generators import moment_table
    from swh.baumkatz.generators.counterexamples import critical_moment_order

    conf = effective_config(ctx, "moments")
    process = parse_process(conf)
    q_exp = number(conf, "q_exp", critical_moment_order(process))
    rows = [[r.k, r.atom, r.prob, r.moment] for r in moment_table(process, q_exp)]
    emit(
        ctx,
        "moments.csv",
        render_csv(metadata(conf, q_exp=q_exp), ["k", "atom", "p_k", "moment"], rows),
    )


def _thresholds(conf: Dict[str, Any], n: int) -> List[float]:
    from swh.baumkatz.classes import threshold
    from swh.baumkatz.config import number_list, parse_params

    if conf.get("t_grid"):
        return number_list(conf, "t_grid")
    return [threshold(parse_params(conf), n)]


@baumkatz.command(name="oracle", context_settings=CONTEXT_SETTINGS)
@click.pass_context
@reported
def oracle(ctx):
    """Exact tail probabilities on ``n_grid`` (at ``t_grid``, or eps n^{1/r}).

    ``statistic`` S uses the exact law of S_n; M enumerates every path and is
    limited to ``enumeration_limit`` variables.

    """
    from swh.baumkatz.config import index_list, parse_process, positive_int
    from swh.baumkatz.exact import exact_tail_M, exact_tail_S
    from swh.baumkatz.montecarlo import TAIL_COLUMNS, Statistic, TailEstimate

    conf = effective_config(ctx, "oracle")
    process = parse_process(conf)
    statistic = Statistic.parse(str(conf.get("statistic", "S")))
    rows = []
    for n in index_list(conf, "n_grid", [process.horizon]):
        for t in _thresholds(conf, n):
            if statistic is Statistic.S:
                cap = positive_int(conf, "support_cap", 10**6)
                value = exact_tail_S(process, n, t, support_cap=cap)
            else:
                limit = positive_int(conf, "enumeration_limit", 12)
                value = exact_tail_M(process, n, t, limit=limit)
            rows.append(TailEstimate.exact(n, t, statistic, value).as_row())
    emit(ctx, "oracle.csv", render_csv(metadata(conf), TAIL_COLUMNS, rows))


@baumkatz.command(name="simulate", context_settings=CONTEXT_SETTINGS)
@click.pass_context
@reported
def simulate(ctx):
    """Monte Carlo tail estimates on ``n_grid``, sharing replicas across
    ``t_grid`` within each n."""
    from swh.baumkatz.config import (
        DEFAULT_THREADS,
        DEFAULT_TRIALS,
        index_list,
        parse_process,
        positive_int,
        require_seed,
    )
    from swh.baumkatz.exception import ValidationError
    from swh.baumkatz.montecarlo import TAIL_COLUMNS, Statistic, estimate_tails

    conf = effective_config(ctx, "simulate")
    seed = require_seed(conf)
    process = parse_process(conf)
    statistic = Statistic.parse(str(conf.get("statistic", "M")))
    trials = positive_int(conf, "trials", DEFAULT_TRIALS)
    threads = positive_int(conf, "threads", DEFAULT_THREADS)
    grid = index_list(conf, "n_grid", [process.horizon])
    if any(b <= a for a, b in zip(grid, grid[1:])):
        raise ValidationError("n_grid must be sorted ascending")
    rows = []
    for n in grid:
        estimates = estimate_tails(
            process, n, _thresholds(conf, n), statistic, trials, seed, threads
        )
        rows.extend(estimate.as_row() for estimate in estimates)
    emit(ctx, "simulate.csv", render_csv(metadata(conf), TAIL_COLUMNS, rows))


@baumkatz.command(name="bounds-check", context_settings=CONTEXT_SETTINGS)
@click.pass_context
@reported
def bounds_check(ctx):
    """Compare Doob's (p=2) and Shao's bounds with Monte Carlo estimates of
    P(M_n > x) for an independent centered process.

    Expected configuration: ``process``, ``horizon``, ``n_grid``, ``x_grid``
    (20 points up to 5 sqrt(B_n) by default), ``a_factor`` (a = x a_factor,
    1/8 by default), ``alpha``, ``trials``, ``seed``.

    """
    import numpy as np

    from swh.baumkatz.bounds import (
        ShaoInputs,
        doob_bound,
        empirical_violation,
        p_max_exact,
        shao_bound,
    )
    from swh.baumkatz.config import (
        DEFAULT_THREADS,
        DEFAULT_TRIALS,
        index_list,
        number,
        number_list,
        parse_process,
        positive_int,
        require_seed,
    )
    from swh.baumkatz.exception import ValidationError
    from swh.baumkatz.montecarlo import TAIL_COLUMNS, Statistic, estimate_tails

    conf = effective_config(ctx, "bounds-check")
    seed = require_seed(conf)
    process = parse_process(conf)
    if not process.is_independent:
        raise ValidationError("bounds are checked on independent processes")
    if not process.is_centered:
        # B_n is E S_n^2 only for centered variables
        raise ValidationError(
            f"bounds are checked on centered processes, mean is {process.mean!r}"
        )
    trials = positive_int(conf, "trials", DEFAULT_TRIALS)
    threads = positive_int(conf, "threads", DEFAULT_THREADS)
    a_factor = number(conf, "a_factor", 1 / 8)
    alpha = number(conf, "alpha", 0.5)
    rows = []
    flags = 0
    for n in index_list(conf, "n_grid", [process.horizon]):
        b_n = process.second_moment_sum(n)
        if conf.get("x_grid"):
            xs = number_list(conf, "x_grid")
        else:
            xs = list(np.sqrt(b_n) * np.linspace(0.5, 5.0, 20))
        estimates = estimate_tails(process, n, xs, Statistic.M, trials, seed, threads)
        for x, estimate in zip(xs, estimates):
            # E S_n^2 = B_n for independent centered variables
            doob = empirical_violation(doob_bound(b_n, x, 2), estimate)
            a = x * a_factor
            shao = empirical_violation(
                shao_bound(ShaoInputs(x, a, alpha, b_n, p_max_exact(process, n, a))),
                estimate,
            )
            flags += doob.violated + shao.violated
            rows.append(
                estimate.as_row()
                + [doob.bound, doob.margin, doob.violated]
                + [shao.bound, shao.margin, shao.violated]
            )
    columns = list(TAIL_COLUMNS) + [
        "doob",
        "doob_margin",
        "doob_violated",
        "shao",
        "shao_margin",
        "shao_violated",
    ]
    meta = metadata(conf, flags=flags)
    emit(ctx, "bounds-check.csv", render_csv(meta, columns, rows))


@baumkatz.command(name="series", context_settings=CONTEXT_SETTINGS)
@click.pass_context
@reported
def series(ctx):
    """Series ledger on ``n_grid`` and divergence certificate up to block ``K``.

    Tails are exact for ``statistic`` S and Monte Carlo estimates (``trials``,
    ``seed``) for M. With ``target`` the ledger is labelled by the divergence
    diagnostic (``delta``, ``window``); with ``K_tail`` and a summable log tower
    the analytic certificate tail is reported.

    """
    from swh.baumkatz.classes import threshold
    from swh.baumkatz.config import (
        DEFAULT_THREADS,
        DEFAULT_TRIALS,
        index_list,
        number,
        parse_params,
        parse_process,
        positive_int,
        require_seed,
    )
    from swh.baumkatz.exact import exact_tail_S
    from swh.baumkatz.montecarlo import Statistic, TailEstimate, estimate_tail
    from swh.baumkatz.series import (
        LEDGER_COLUMNS,
        assemble,
        certificate_tail_bound,
        diagnose,
        divergence_certificate,
    )

    conf = effective_config(ctx, "series")
    params = parse_params(conf)
    process = parse_process(conf)
    statistic = Statistic.parse(str(conf.get("statistic", "S")))
    tails = []
    for n in index_list(conf, "n_grid", [process.horizon]):
        t = threshold(params, n)
        if statistic is Statistic.S:
            cap = positive_int(conf, "support_cap", 10**6)
            value = exact_tail_S(process, n, t, support_cap=cap)
            tails.append(TailEstimate.exact(n, t, statistic, value))
        else:
            tails.append(
                estimate_tail(
                    process,
                    n,
                    t,
                    statistic,
                    positive_int(conf, "trials", DEFAULT_TRIALS),
                    require_seed(conf),
                    positive_int(conf, "threads", DEFAULT_THREADS),
                )
            )
    ledger = assemble(params, tails)
    extra: Dict[str, Any] = {}
    if conf.get("target") is not None:
        diagnostic = diagnose(
            ledger,
            number(conf, "target"),
            number(conf, "delta", 0.1),
            positive_int(conf, "window", 8),
        )
        extra.update(slope=diagnostic.slope, label=diagnostic.label)
    rows = [row.as_row() for row in ledger.rows]
    emit(ctx, "ledger.csv", render_csv(metadata(conf, **extra), LEDGER_COLUMNS, rows))

    if process.kind.is_counterexample:
        certificate = divergence_certificate(process, positive_int(conf, "K", 64))
        extra = {"k0": process.k0, "total": certificate.total}
        if conf.get("K_tail") is not None:
            extra["tail_bound"] = certificate_tail_bound(
                process, positive_int(conf, "K_tail")
            )
        table = zip(certificate.k, certificate.terms, certificate.partial_sums)
        emit(
            ctx,
            "certificate.csv",
            render_csv(metadata(conf, **extra), ["k", "term", "partial_sum"], table),
        )


@baumkatz.command(name="statement1", context_settings=CONTEXT_SETTINGS)
@click.pass_context
@reported
def statement1(ctx):
    """Finite-horizon forms of the equivalent convergence statements.

    With p = r: ledger of P(M_{2^j} > eps 2^{j/p}) for j <= ``n_dyadic``. With
    p > r: windowed P(sup_{n<=k<=window} k^{-1/r}|S_k| > eps) at ``anchors``,
    lower bounds of the unbounded suprema.

    """
    from swh.baumkatz.config import (
        DEFAULT_THREADS,
        DEFAULT_TRIALS,
        index_list,
        parse_params,
        parse_process,
        positive_int,
        require_seed,
    )
    from swh.baumkatz.series import LEDGER_COLUMNS, statement1_dyadic, statement1_rate

    conf = effective_config(ctx, "statement1")
    seed = require_seed(conf)
    params = parse_params(conf)
    process = parse_process(conf)
    trials = positive_int(conf, "trials", DEFAULT_TRIALS)
    threads = positive_int(conf, "threads", DEFAULT_THREADS)
    if params.p == params.r:
        ledger = statement1_dyadic(
            process, params, trials, seed, positive_int(conf, "n_dyadic"), threads
        )
        rows: Iterable[Sequence[Any]] = [row.as_row() for row in ledger.rows]
        columns: Sequence[str] = LEDGER_COLUMNS
    else:
        estimates = statement1_rate(
            process,
            params,
            index_list(conf, "anchors"),
            positive_int(conf, "window"),
            trials,
            seed,
            threads,
        )
        columns = [
            "anchor",
            "window",
            "trials",
            "hits",
            "p_hat",
            "ci_low",
            "ci_high",
            "comparison",
            "normalized",
        ]
        rows = [
            [e.anchor, e.window, e.trials, e.hits, e.p_hat, e.ci_low, e.ci_high]
            + [e.comparison, e.normalized]
            for e in estimates
        ]
    emit(ctx, "statement1.csv", render_csv(metadata(conf), columns, rows))


@baumkatz.command(name="indep-proof", context_settings=CONTEXT_SETTINGS)
@click.pass_context
@reported
def indep_proof(ctx):
    """Shao's bound terms of the series for an independent process, next to
    n^{-p/r}."""
    from swh.baumkatz.bounds import indep_series_terms
    from swh.baumkatz.config import index_list, parse_params, parse_process

    conf = effective_config(ctx, "indep-proof")
    params = parse_params(conf)
    process = parse_process(conf)
    grid = index_list(conf, "n_grid", [process.horizon])
    terms = indep_series_terms(params, process, grid)
    columns = ["n", "x", "a", "B_n", "p_max", "bound", "weight", "term", "comparison"]
    rows = [
        [t.n, t.x, t.a, t.B_n, t.p_max, t.bound, t.weight, t.term, t.comparison]
        for t in terms
    ]
    emit(ctx, "indep-proof.csv", render_csv(metadata(conf), columns, rows))


def main(args: Optional[List[str]] = None):
    return baumkatz(args=args, auto_envvar_prefix="SWH_BAUMKATZ")


if __name__ == "__main__":
    main()
