"""Command-line front end.

Subcommands::

    rate      one RatePoint at a single distance
    sweep     optimised asymptotic rate over a distance grid (CSV)
    finite    optimised finite-key rate over a distance grid (CSV)
    validate  analytic gains against the Fock-space oracle (CSV + summary)

Settings come from built-in defaults, then an optional ``--config`` file of
``key=value`` lines, then command-line flags. Exit codes: 0 ok, 1 validation
failure, 2 bad input, 3 I/O failure.
"""

from __future__ import annotations

import argparse
import csv
import dataclasses
import io
import math
import sys
from dataclasses import dataclass
from pathlib import Path
from typing import Callable, Sequence

from . import oracle
from .gains import gains
from .model import ParameterError, SystemParams
from .optimizer import OptimizeSpec, optimize_mu, sweep
from .security import RatePoint, rate_point

EXIT_OK, EXIT_VALIDATION, EXIT_INPUT, EXIT_IO = 0, 1, 2, 3

CSV_HEADER = ("L_km", "mu_opt", "p_x_opt", "Q_Z", "E_Z", "E_X", "E_ph", "Delta", "R", "R_plob")
VALIDATION_THRESHOLD = 1e-9


class ConfigError(ValueError):
    pass


def _parse_bool(text: str) -> bool:
    lowered = text.strip().lower()
    if lowered in ("1", "true", "yes", "on"):
        return True
    if lowered in ("0", "false", "no", "off"):
        return False
    raise ValueError(f"not a boolean: {text!r}")


def _parse_mode(text: str) -> str:
    if text not in ("ideal", "imperfect", "finite"):
        raise ValueError(f"mode must be ideal, imperfect or finite, got {text!r}")
    return text


@dataclass
class RunConfig:
    """Everything a run needs; field names double as config-file keys."""

    mu: float = 0.03
    L: float = 500.0
    pd: float = 1e-7
    eta_d: float = 0.85
    beta: float = 0.16
    f: float = 1.1
    ed: float = 0.03
    F2: float = 1.0
    epsilon: float = 0.0
    px: float = 0.1
    N: float = 1e14
    eps_sec: float = 1e-10
    eps_cor: float = 1e-15
    paper_literal: bool = False
    plob_with_detector: bool = False
    mode: str = "ideal"
    optimize: bool = False
    L_start: float = 0.0
    L_stop: float = 1100.0
    L_step: float = 25.0
    out: str | None = None

    def params(self) -> SystemParams:
        return SystemParams(
            mu=self.mu,
            p_d=self.pd,
            eta_d=self.eta_d,
            beta_db_per_km=self.beta,
            L_km=self.L,
            f_ec=self.f,
            e_d=self.ed,
            F2=self.F2,
            epsilon=self.epsilon,
            p_x=self.px,
            N_pulses=self.N,
            eps_sec=self.eps_sec,
            eps_cor=self.eps_cor,
            paper_literal=self.paper_literal,
            plob_with_detector=self.plob_with_detector,
        )

    def distances(self) -> list[float]:
        if not (self.L_step > 0 and self.L_stop >= self.L_start >= 0):
            raise ConfigError(
                f"empty or invalid distance grid: L_start={self.L_start}, "
                f"L_stop={self.L_stop}, L_step={self.L_step}"
            )
        n = int(math.floor((self.L_stop - self.L_start) / self.L_step + 1e-9)) + 1
        return [self.L_start + i * self.L_step for i in range(n)]


_FIELDS = {f.name: f for f in dataclasses.fields(RunConfig)}
_BOOL_KEYS = {"paper_literal", "plob_with_detector", "optimize"}


def _convert(key: str, text: str):
    if key in _BOOL_KEYS:
        return _parse_bool(text)
    if key == "mode":
        return _parse_mode(text)
    if key == "out":
        return text
    value = float(text)
    if math.isnan(value):
        raise ValueError("NaN is not allowed")
    return value


def parse_config_text(text: str, source: str = "<config>") -> dict:
    values = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"{source}:{lineno}: expected key=value, got {raw.strip()!r}")
        key, value = (part.strip() for part in line.split("=", 1))
        key = key.replace("-", "_")
        if key not in _FIELDS:
            raise ConfigError(f"{source}:{lineno}: unknown key {key!r}")
        try:
            values[key] = _convert(key, value)
        except ValueError as exc:
            raise ConfigError(f"{source}:{lineno}: invalid value for {key!r}: {exc}") from None
    return values


def build_config(file_values: dict, flag_values: dict) -> RunConfig:
    merged = {**file_values, **{k: v for k, v in flag_values.items() if v is not None}}
    return RunConfig(**merged)


def _fmt(x: float | None) -> str:
    if x is None:
        return "nan"
    return f"{x:.9e}"


def csv_row(point: RatePoint) -> list[str]:
    return [
        _fmt(v)
        for v in (
            point.L_km,
            point.mu,
            point.p_x,
            point.Q_Z,
            point.E_Z,
            point.E_X,
            point.E_ph,
            point.Delta,
            point.R,
            point.R_plob,
        )
    ]


def write_csv(points: Sequence[RatePoint], path: str | None, stdout) -> None:
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(CSV_HEADER)
    for point in sorted(points, key=lambda p: p.L_km):
        writer.writerow(csv_row(point))
    if path is None:
        stdout.write(buffer.getvalue())
    else:
        Path(path).write_text(buffer.getvalue())


def _spec_for(mode: str) -> OptimizeSpec:
    objective = {
        "ideal": "asymptotic_ideal",
        "imperfect": "asymptotic_imperfect",
        "finite": "finite_key",
    }[mode]
    return OptimizeSpec(objective=objective)


def cmd_rate(config: RunConfig, stdout=sys.stdout) -> int:
    params = config.params()
    if config.optimize:
        spec = _spec_for(config.mode)
        if config.mode == "finite":
            point = sweep(params, [params.L_km], spec)[0]
        else:
            point = optimize_mu(params, spec)[1]
    else:
        point = rate_point(params, config.mode)
    labels = dict(zip(CSV_HEADER, csv_row(point)))
    width = max(len(k) for k in labels)
    for key, value in labels.items():
        stdout.write(f"{key:<{width}} : {value}\n")
    for note in point.notes:
        stdout.write(f"# {note}\n")
    if config.out:
        write_csv([point], config.out, stdout)
    return EXIT_OK


def cmd_sweep(config: RunConfig, stdout=sys.stdout) -> int:
    points = sweep(config.params(), config.distances(), _spec_for(config.mode))
    write_csv(points, config.out, stdout)
    return EXIT_OK


def cmd_finite(config: RunConfig, stdout=sys.stdout) -> int:
    return cmd_sweep(dataclasses.replace(config, mode="finite"), stdout)


def cmd_validate(
    config: RunConfig,
    stdout=sys.stdout,
    analytic: Callable = gains,
    grid: dict | None = None,
) -> int:
    """Compare analytic gains with the oracle on the validation grid.

    ``analytic`` and ``grid`` exist so that tests can inject a broken formula
    or restrict the grid.
    """
    rows = oracle.validate_grid(analytic=analytic, **(grid or {}))
    buffer = io.StringIO()
    oracle.write_report(rows, buffer)
    if config.out:
        Path(config.out).write_text(buffer.getvalue())
    else:
        stdout.write(buffer.getvalue())
    worst = max(r.deviation for r in rows)
    bad = sorted((r for r in rows if r.deviation > VALIDATION_THRESHOLD), key=lambda r: -r.deviation)
    if not bad:
        stdout.write(f"PASS: {len(rows)} points, max deviation {worst:.3e}\n")
        return EXIT_OK
    stdout.write(f"FAIL: {len(bad)} of {len(rows)} points exceed {VALIDATION_THRESHOLD:.0e}\n")
    for r in bad[:10]:
        stdout.write(
            f"  {r.variant.value} {r.basis.value} mu={r.mu} eta={r.eta} p_d={r.p_d}"
            f" deviation={r.deviation:.3e}\n"
        )
    return EXIT_VALIDATION


COMMANDS = {"rate": cmd_rate, "sweep": cmd_sweep, "finite": cmd_finite, "validate": cmd_validate}

# flag -> (RunConfig field, converter)
_FLAGS = [
    ("--mu", "mu", float),
    ("--L", "L", float),
    ("--pd", "pd", float),
    ("--eta-d", "eta_d", float),
    ("--beta", "beta", float),
    ("--f", "f", float),
    ("--ed", "ed", float),
    ("--F2", "F2", float),
    ("--epsilon", "epsilon", float),
    ("--px", "px", float),
    ("--N", "N", float),
    ("--eps-sec", "eps_sec", float),
    ("--eps-cor", "eps_cor", float),
    ("--L-start", "L_start", float),
    ("--L-stop", "L_stop", float),
    ("--L-step", "L_step", float),
    ("--mode", "mode", _parse_mode),
    ("--out", "out", str),
]


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="flat key=value file; '#' starts a comment")
    for flag, dest, conv in _FLAGS:
        common.add_argument(flag, dest=dest, type=conv, default=None)
    for flag, dest in (
        ("--paper-literal", "paper_literal"),
        ("--plob-with-detector", "plob_with_detector"),
        ("--optimize", "optimize"),
    ):
        common.add_argument(flag, dest=dest, action="store_const", const=True, default=None)

    parser = argparse.ArgumentParser(prog="ecsqkd", description=__doc__.split("\n\n")[0])
    sub = parser.add_subparsers(dest="command", required=True)
    sub.add_parser("rate", parents=[common], help="key rate at one distance")
    sub.add_parser("sweep", parents=[common], help="optimised asymptotic rate vs distance")
    sub.add_parser("finite", parents=[common], help="optimised finite-key rate vs distance")
    sub.add_parser("validate", parents=[common], help="analytic gains vs Fock-space oracle")
    return parser


def main(argv: Sequence[str] | None = None, stdout=None, stderr=None) -> int:
    stdout = stdout or sys.stdout
    stderr = stderr or sys.stderr
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    flag_values = {k: v for k, v in vars(args).items() if k not in ("command", "config")}
    try:
        file_values = {}
        if args.config:
            try:
                text = Path(args.config).read_text()
            except OSError as exc:
                stderr.write(f"error: cannot read config {args.config}: {exc}\n")
                return EXIT_IO
            file_values = parse_config_text(text, args.config)
        config = build_config(file_values, flag_values)
        config.params()
        if args.command in ("sweep", "finite"):
            config.distances()
    except (ConfigError, ParameterError) as exc:
        stderr.write(f"error: {exc}\n")
        return EXIT_INPUT
    try:
        return COMMANDS[args.command](config, stdout)
    except OSError as exc:
        stderr.write(f"error: cannot write output: {exc}\n")
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
