"""Command-line front end.

    risnoma channel-cdf     --config run.toml --out cdf.csv
    risnoma coverage-sweep  --config run.toml --out coverage.csv
    risnoma validate        --config run.toml --out report.txt

Exit status: 0 on success, 1 when a validation check fails, 2 on a bad
configuration.
"""

from __future__ import annotations

import argparse
import csv
import io
import logging
import sys
import warnings
from dataclasses import replace
from pathlib import Path

import numpy as np

from . import acceptance, analytic, config, mcsim
from .channel import (
    EXACT_MAX_K,
    RisChannelSpec,
    exact_cdf_power,
    fit_for_analysis,
    fit_gamma,
    gamma_cdf,
    sample_smallscale_approx,
)
from .params import ConfigError
from .specfn import SpecialFunctionError

log = logging.getLogger("risnoma")

EXIT_OK, EXIT_FAILED, EXIT_CONFIG = 0, 1, 2
CDF_GRID_POINTS = 101


def _fmt(x) -> str:
    if isinstance(x, (int, np.integer)) and not isinstance(x, bool):
        return str(int(x))
    return repr(float(x))


def _write_text(path, text: str) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write(text)


def _csv_text(header, rows) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    writer.writerows(rows)
    return buf.getvalue()


# ---------------------------------------------------------------------------
# channel-cdf
# ---------------------------------------------------------------------------


def channel_cdf_rows(cfg: config.RunConfig) -> list[list[str]]:
    """Empirical, Gamma-fit and inverse-Laplace CDFs of the small-scale gain.

    Sweeps over ``n`` or ``beta`` produce one block per value; other sweep
    variables do not affect the channel and give a single block.
    """
    if cfg.sweep_variable in ("n", "beta"):
        points = [cfg.params_at(v) for v in cfg.sweep_values]
    else:
        points = [cfg.params]
    rows = []
    for block, p in enumerate(points):
        spec = RisChannelSpec(p.n, p.beta, p.A)
        fit = fit_gamma(spec, cfg.fit_mode)
        rng = np.random.default_rng(np.random.SeedSequence(entropy=cfg.seed, spawn_key=(block,)))
        draws = np.sort(sample_smallscale_approx(spec, rng, size=cfg.trials))
        grid = np.linspace(0.0, 3.0 * fit.mean, CDF_GRID_POINTS)
        empirical = np.searchsorted(draws, grid, side="right") / draws.size
        model = gamma_cdf(grid, fit)
        for x, emp, gam in zip(grid, empirical, model):
            if spec.K > EXACT_MAX_K:
                exact, status = "", "skipped"
            else:
                try:
                    exact, status = _fmt(exact_cdf_power(x, spec.amplitude_weight**2, spec.K)), "ok"
                except SpecialFunctionError as exc:
                    log.warning("exact CDF failed at n=%s x=%s: %s", p.n, x, exc)
                    exact, status = "", "failed"
            rows.append(
                [str(p.n), _fmt(p.beta), _fmt(fit.shape_a), _fmt(fit.scale_b), _fmt(x), _fmt(emp), _fmt(gam), exact, status]
            )
    return rows


CHANNEL_CDF_HEADER = ["n", "beta", "fit_shape", "fit_scale", "x", "cdf_empirical", "cdf_gamma", "cdf_exact", "exact_status"]


def cmd_channel_cdf(cfg: config.RunConfig) -> int:
    _write_text(cfg.output_path, _csv_text(CHANNEL_CDF_HEADER, channel_cdf_rows(cfg)))
    return EXIT_OK


# ---------------------------------------------------------------------------
# coverage-sweep
# ---------------------------------------------------------------------------

COVERAGE_HEADER = ["value", "p_t_analytic", "p_c_analytic", "p_t_mc", "p_t_ci", "p_c_mc", "p_c_ci", "flag"]


def coverage_rows(cfg: config.RunConfig) -> list[list[str]]:
    """One row per sweep value: analytic and simulated coverage of both users."""
    points = [cfg.params_at(v) for v in cfg.sweep_values]
    fits = [fit_for_analysis(RisChannelSpec(p.n, p.beta, p.A), cfg.fit_mode) for p in points]
    if cfg.sweep_variable == "p_t_dbm":
        # transmit power only rescales, so one set of draws serves every point
        mc_t = mcsim.estimate_coverage_typical_sweep(
            cfg.params, cfg.sweep_values, cfg.trials, cfg.fading_mode, cfg.seed, fits[0]
        )
        mc_c = mcsim.estimate_coverage_connected_sweep(cfg.params, cfg.sweep_values, cfg.trials, cfg.seed)
    else:
        mc_t = [mcsim.estimate_coverage_typical(p, cfg.trials, cfg.fading_mode, cfg.seed, f) for p, f in zip(points, fits)]
        mc_c = [mcsim.estimate_coverage_connected(p, cfg.trials, cfg.seed) for p in points]
    rows = []
    for v, p, f, et, ec in zip(cfg.sweep_values, points, fits, mc_t, mc_c):
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", analytic.InfeasibleThresholdWarning)
            pt, pc = analytic.coverage_typical(p, f), analytic.coverage_connected(p)
        flag = "infeasible" if p.infeasibilities() else "ok"
        rows.append(
            [_fmt(v), _fmt(pt), _fmt(pc), _fmt(et.probability), _fmt(et.ci_halfwidth_95), _fmt(ec.probability), _fmt(ec.ci_halfwidth_95), flag]
        )
    return rows


def cmd_coverage_sweep(cfg: config.RunConfig) -> int:
    if cfg.trials < mcsim.MIN_TRIALS:
        raise ConfigError(f"coverage-sweep needs trials >= {mcsim.MIN_TRIALS}")
    _write_text(cfg.output_path, _csv_text(COVERAGE_HEADER, coverage_rows(cfg)))
    return EXIT_OK


# ---------------------------------------------------------------------------
# validate
# ---------------------------------------------------------------------------


def cmd_validate(cfg: config.RunConfig) -> int:
    if cfg.trials < mcsim.MIN_TRIALS:
        raise ConfigError(f"validate needs trials >= {mcsim.MIN_TRIALS}")
    settings = acceptance.AcceptanceSettings(
        base=cfg.params, trials=cfg.trials, seed=cfg.seed, fit_mode=cfg.fit_mode, fading_mode=cfg.fading_mode
    )
    lines = []

    def report(line):
        print(line, flush=True)
        lines.append(line)

    results = acceptance.run_all(settings, report)
    failed = [r.number for r in results if not r.passed]
    summary = f"{len(results) - len(failed)}/{len(results)} criteria passed" + (f"; failed: {failed}" if failed else "")
    report(summary)
    _write_text(cfg.output_path, "\n".join(lines) + "\n")
    return EXIT_FAILED if failed else EXIT_OK


COMMANDS = {
    "channel-cdf": cmd_channel_cdf,
    "coverage-sweep": cmd_coverage_sweep,
    "validate": cmd_validate,
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="risnoma", description="Coverage analysis of RIS-aided NOMA downlinks.")
    parser.add_argument("-v", "--verbose", action="store_true", help="log progress to stderr")
    sub = parser.add_subparsers(dest="command", required=True)
    for name, help_text in (
        ("channel-cdf", "CDFs of the RIS-aided small-scale gain"),
        ("coverage-sweep", "analytic and Monte Carlo coverage over the sweep"),
        ("validate", "run the acceptance suite"),
    ):
        p = sub.add_parser(name, help=help_text)
        p.add_argument("--config", type=Path, help="TOML run configuration (defaults if omitted)")
        p.add_argument("--out", type=Path, help="output path (overrides output_path)")
        p.add_argument("--trials", type=int)
        p.add_argument("--seed", type=int)
        p.add_argument("--fit-mode", choices=config.FIT_MODES)
        p.add_argument("--fading-mode", choices=[m.value for m in mcsim.FadingMode])
    return parser


def resolve_config(args) -> config.RunConfig:
    cfg = config.load(args.config) if args.config else config.from_dict({})
    overrides = {}
    if args.out is not None:
        overrides["output_path"] = str(args.out)
    if args.trials is not None:
        overrides["trials"] = args.trials
    if args.seed is not None:
        overrides["seed"] = args.seed
    if args.fit_mode is not None:
        overrides["fit_mode"] = args.fit_mode
    if args.fading_mode is not None:
        overrides["fading_mode"] = args.fading_mode
    return replace(cfg, **overrides)


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s %(message)s")
    try:
        cfg = resolve_config(args)
        return COMMANDS[args.command](cfg)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
