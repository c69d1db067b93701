"""Command-line front end.

Subcommands and their outputs:

  tbe-correlation  CSV columns: phi1,phi2,theta1,theta2,C
  dte-fringe       CSV columns: ell1,ell2,P_pp,P_pm,P_mp,P_mm,visibility,engine_error
  chsh             JSON: settings, four correlations, S, violated, predicted_max_S, conditions
  conditions       feasibility report (text, or JSON with --format json)
  validate         closed form vs. quadrature on seeded random Gaussian scenarios

Exit codes: 0 success, 2 configuration error, 3 tolerance failure in validate.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
from dataclasses import replace

import numpy as np

from . import __version__
from .bell import (
    ChshSettings,
    chsh_dte,
    chsh_optimize_dte,
    chsh_tbe,
    feasibility_conditions,
    quoted_dte_settings,
    quoted_tbe_settings,
)
from .config import ConfigError, ScenarioConfig, load_config
from .cubature import ToleranceNotReachedError
from .dte import DteSettings, dte_fringe_scan
from .oracle import NormalizationError, dte_probabilities_quadrature, gaussian_distribution
from .tbe import TbeSettings, tbe_correlation
from .validation import GENERATOR, agreement_draws

TBE_COLUMNS = ["phi1", "phi2", "theta1", "theta2", "C"]
FRINGE_COLUMNS = ["ell1", "ell2", "P_pp", "P_pm", "P_mp", "P_mm", "visibility", "engine_error"]

EXIT_OK, EXIT_CONFIG, EXIT_TOLERANCE = 0, 2, 3


def fmt(x: float) -> str:
    """Full double precision, '.' decimal separator."""
    return format(float(x), ".17g")


def to_csv(columns, rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(columns)
    for row in rows:
        w.writerow([fmt(v) for v in row])
    return buf.getvalue()


def to_json(obj) -> str:
    return json.dumps(obj, indent=2, sort_keys=False, allow_nan=False) + "\n"


def _records(columns, rows):
    return [dict(zip(columns, map(float, row))) for row in rows]


def fringe_contrast(values) -> float:
    """Fitted contrast ``(max - min) / (max + min)`` of a sampled fringe."""
    v = np.asarray(values, dtype=float)
    hi, lo = v.max(), v.min()
    return float((hi - lo) / (hi + lo))


def cmd_tbe_correlation(cfg: ScenarioConfig):
    rows = []
    for phi1 in np.linspace(*cfg.tbe_phi1.as_tuple()):
        for phi2 in np.linspace(*cfg.tbe_phi2.as_tuple()):
            s = TbeSettings(float(phi1), float(phi2), cfg.tbe_theta1, cfg.tbe_theta2)
            rows.append((phi1, phi2, s.theta1, s.theta2, tbe_correlation(s, cfg.tbe_phi_tau)))
    if (cfg.format or "csv") == "json":
        return to_json(_records(TBE_COLUMNS, rows)), EXIT_OK
    return to_csv(TBE_COLUMNS, rows), EXIT_OK


def cmd_dte_fringe(cfg: ScenarioConfig):
    ell2, ell1_range = cfg.fringe_scan_range()
    rows = []
    if cfg.engine == "closed_form":
        for r in dte_fringe_scan(cfg.params, ell2, ell1_range):
            rows.append((r.ell1, ell2, r.P_pp, r.P_pm, r.P_mp, r.P_mm, r.visibility, 0.0))
    else:
        psi = gaussian_distribution(cfg.params)
        for ell1 in np.linspace(*ell1_range):
            probs, err, ov = dte_probabilities_quadrature(psi, cfg.params, DteSettings(float(ell1), ell2), cfg.quadrature)
            rows.append((ell1, ell2, *probs, abs(ov.value), err))
    print(f"fitted contrast of P_pp over scan: {fmt(fringe_contrast([r[2] for r in rows]))}", file=sys.stderr)
    if (cfg.format or "csv") == "json":
        return to_json(_records(FRINGE_COLUMNS, rows)), EXIT_OK
    return to_csv(FRINGE_COLUMNS, rows), EXIT_OK


def cmd_chsh(cfg: ScenarioConfig):
    if cfg.chsh_mode == "tbe":
        phi = cfg.tbe_phi_tau
        if cfg.chsh_settings is not None:
            settings = ChshSettings("tbe", *cfg.chsh_settings, cfg.tbe_theta1, cfg.tbe_theta2)
        else:
            settings = replace(quoted_tbe_settings(phi), theta1=cfg.tbe_theta1, theta2=cfg.tbe_theta2)
        result = chsh_tbe(phi, settings)
        report = result.as_dict()
        report["predicted_max_S"] = 2.0 * math.sqrt(2.0)
        report["conditions"] = None
    else:
        if cfg.chsh_settings is not None:
            result = chsh_dte(cfg.params, ChshSettings("dte", *cfg.chsh_settings), cfg.engine, spec=cfg.quadrature)
        elif cfg.chsh_optimize:
            result = chsh_optimize_dte(cfg.params, cfg.engine, spec=cfg.quadrature)
        else:
            result = chsh_dte(cfg.params, quoted_dte_settings(cfg.params), cfg.engine, spec=cfg.quadrature)
        feas = feasibility_conditions(cfg.params, cfg.threshold)
        report = result.as_dict()
        report["engine"] = cfg.engine.replace("_", "-")
        report["predicted_max_S"] = feas.predicted_max_S
        report["conditions"] = _json_safe(feas.as_dict())
    if cfg.format == "csv":
        flat = {k: v for k, v in report.items() if not isinstance(v, (dict, type(None)))}
        flat.update({f"setting_{k}": v for k, v in report["settings"].items()})
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(list(flat))
        w.writerow([fmt(v) if isinstance(v, float) else v for v in flat.values()])
        return buf.getvalue(), EXIT_OK
    return to_json(report), EXIT_OK


def _json_safe(d: dict) -> dict:
    return {k: (None if isinstance(v, float) and not math.isfinite(v) else v) for k, v in d.items()}


def cmd_conditions(cfg: ScenarioConfig):
    p = cfg.params
    feas = feasibility_conditions(p, cfg.threshold)
    if cfg.format == "json":
        out = _json_safe(feas.as_dict())
        out.update(T_cm=p.T_cm, T_rel=p.T_rel, lambdabar_rel=p.lambdabar_rel, separation=p.separation)
        return to_json(out), EXIT_OK
    ok = lambda flag: "PASS" if flag else "FAIL"
    lines = [
        f"T_cm            = {fmt(p.T_cm)} s   (tau/T_cm = {fmt(p.tau / p.T_cm)})",
        f"T_rel           = {fmt(p.T_rel)} s   (tau/T_rel = {fmt(p.tau / p.T_rel)})",
        f"lambdabar_rel   = {fmt(p.lambdabar_rel)} m",
        f"separation      = {fmt(p.separation)} m",
        f"fringe ratio    = {fmt(feas.fringe_ratio)}   (< {fmt(cfg.threshold)}) {ok(feas.fringe_condition)}",
        f"visibility prod = {fmt(feas.visibility_product)}   (< 4) {ok(feas.visibility_condition)}",
        f"matched V       = {fmt(feas.visibility_product ** -0.25)}   (threshold 1/sqrt(2))",
        f"predicted max S = {fmt(feas.predicted_max_S)}",
    ]
    lines += [f"note: {d}" for d in feas.diagnostics]
    return "\n".join(lines) + "\n", EXIT_OK


def cmd_validate(cfg: ScenarioConfig):
    draws = agreement_draws(cfg.validate_draws, cfg.seed, cfg.quadrature)
    worst = max(d.max_abs_diff for d in draws)
    passed = worst < cfg.validate_tolerance
    if cfg.format == "json":
        out = {
            "generator": GENERATOR,
            "seed": cfg.seed,
            "draws": cfg.validate_draws,
            "tolerance": cfg.validate_tolerance,
            "quadrature_tolerance": cfg.quadrature.tolerance,
            "results": [
                {
                    "index": d.index,
                    "tau_over_T_cm": d.tau_over_T_cm,
                    "tau_over_T_rel": d.tau_over_T_rel,
                    "ell1": d.settings.ell1,
                    "ell2": d.settings.ell2,
                    "max_abs_diff": d.max_abs_diff,
                    "error_estimate": d.error_estimate,
                }
                for d in draws
            ],
            "max_abs_diff": worst,
            "passed": passed,
        }
        text = to_json(out)
    else:
        header = [
            "# closed form vs quadrature agreement",
            f"# generator: {GENERATOR}",
            f"# seed: {cfg.seed}",
            f"# draws: {cfg.validate_draws}",
            f"# tolerance: {fmt(cfg.validate_tolerance)}",
            f"# quadrature tolerance: {fmt(cfg.quadrature.tolerance)}",
        ]
        cols = ["index", "tau_over_T_cm", "tau_over_T_rel", "ell1", "ell2", "max_abs_diff", "error_estimate"]
        body = to_csv(
            cols,
            [(d.index, d.tau_over_T_cm, d.tau_over_T_rel, d.settings.ell1, d.settings.ell2,
              d.max_abs_diff, d.error_estimate) for d in draws],
        )
        footer = f"# max_abs_diff: {fmt(worst)}\n# result: {'PASS' if passed else 'FAIL'}\n"
        text = "\n".join(header) + "\n" + body + footer
    return text, EXIT_OK if passed else EXIT_TOLERANCE


COMMANDS = {
    "tbe-correlation": (cmd_tbe_correlation, "TBE correlation over a (phi1, phi2) grid. CSV: " + ",".join(TBE_COLUMNS)),
    "dte-fringe": (cmd_dte_fringe, "DTE port probabilities along an ell1 scan. CSV: " + ",".join(FRINGE_COLUMNS)),
    "chsh": (cmd_chsh, "CHSH value (JSON report; exit 0 whether or not the inequality is violated)"),
    "conditions": (cmd_conditions, "fringe and visibility feasibility conditions"),
    "validate": (cmd_validate, "closed form vs quadrature on seeded random draws (exit 3 on failure)"),
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="dtebell",
        description=__doc__.split("\n\n")[0],
        epilog=__doc__.split("\n", 2)[2],
        formatter_class=argparse.RawDescriptionHelpFormatter,
    )
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)
    for name, (_, helptext) in COMMANDS.items():
        p = sub.add_parser(name, help=helptext, description=helptext)
        p.add_argument("--config", help="scenario file (INI-style key = value sections)")
        p.add_argument("--out", help="output file (default: stdout)")
        p.add_argument("--format", choices=("csv", "json"))
        p.add_argument("--engine", choices=("closed-form", "quadrature"))
        p.add_argument("--seed", type=int, help="64-bit seed for validation draws")
        p.add_argument("--threshold", type=float, help="operational bound for lambdabar_rel/(tau v_rel)")
        p.add_argument("--draws", type=int, help="number of validation draws")
        p.add_argument("--tolerance", type=float, help="validation tolerance on |closed form - quadrature|")
    return parser


def _apply_flags(cfg: ScenarioConfig, args) -> ScenarioConfig:
    changes = {}
    if args.out is not None:
        changes["out"] = args.out
    if args.format is not None:
        changes["format"] = args.format
    if args.engine is not None:
        changes["engine"] = args.engine.replace("-", "_")
    if args.seed is not None:
        if not 0 <= args.seed < 2**64:
            raise ConfigError("seed must be a 64-bit unsigned integer")
        changes["seed"] = args.seed
    if args.threshold is not None:
        if not args.threshold > 0:
            raise ConfigError("threshold must be > 0")
        changes["threshold"] = args.threshold
    if args.draws is not None:
        if args.draws < 1:
            raise ConfigError("draws must be >= 1")
        changes["validate_draws"] = args.draws
    if args.tolerance is not None:
        if not args.tolerance > 0:
            raise ConfigError("tolerance must be > 0")
        changes["validate_tolerance"] = args.tolerance
    return replace(cfg, **changes)


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0) and EXIT_CONFIG
    func = COMMANDS[args.command][0]
    try:
        cfg = _apply_flags(load_config(args.config), args)
        text, code = func(cfg)
    except ConfigError as exc:
        print(f"dtebell: config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (ToleranceNotReachedError, NormalizationError) as exc:
        print(f"dtebell: numerical error: {exc}", file=sys.stderr)
        return EXIT_TOLERANCE
    if cfg.out:
        with open(cfg.out, "w", newline="\n") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return code


if __name__ == "__main__":
    sys.exit(main())
