"""Command-line surface.

One subcommand per run mode plus `selftest`. Every flag mirrors a config
key and overrides it; a config file is optional when all required keys
are given as flags. Exit codes: 0 success, 2 configuration error,
3 numeric failure.
"""

from __future__ import annotations

import argparse
import math
import sys

import numpy as np

from .config import MODES, parse_config, parse_mapping
from .errors import ConfigError, InvalidArgumentError, RotorSpinError
from .runner import run

_FLAG_KEYS = (
    "omega", "theta", "d", "phi0", "delta", "axis", "steps_per_period",
    "n_harmonics", "psi0", "t_end", "branch", "delta_rabi", "physical_d",
)


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="rotorspin",
        description="Quasi-energy spectra, spin dynamics and geometric phases "
                    "of a spin-1 defect in a rotating frame.",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    for mode in MODES:
        sp = sub.add_parser(mode, help=f"run a {mode} computation")
        _add_common_flags(sp)
    sub.add_parser("selftest", help="run internal consistency checks")
    return parser


def _add_common_flags(sp: argparse.ArgumentParser) -> None:
    sp.add_argument("--config", help="config file (key=value lines)")
    sp.add_argument("--output", dest="output_path", help="CSV output path")
    for key in _FLAG_KEYS:
        sp.add_argument(f"--{key.replace('_', '-')}", dest=key, default=None)


def _merge_config(args: argparse.Namespace):
    pairs: dict[str, str] = {}
    if args.config:
        try:
            with open(args.config, encoding="utf-8") as fh:
                text = fh.read()
        except OSError as exc:
            raise ConfigError(f"cannot read config {args.config!r}: {exc}") from exc
        # reuse the file parser for its validation, then keep the raw pairs
        parse_config(text)
        for line in text.splitlines():
            stripped = line.split("#", 1)[0].strip()
            if stripped:
                key, _, value = stripped.partition("=")
                pairs[key.strip()] = value.strip()
    pairs["mode"] = args.command
    for key in _FLAG_KEYS + ("output_path",):
        value = getattr(args, key, None)
        if value is not None:
            pairs[key] = value
    return parse_mapping(pairs)


def _selftest() -> int:
    from .dynamics import monodromy, propagator_zero_field
    from .floquet import cubic_quasienergies, fold, physical_modes
    from .geomphase import verify_gauge_sign
    from .model import RotorParams, h_interaction
    from .spin_algebra import hermitian_eigensystem, unitarity_defect

    failures = 0

    def check(name: str, ok: bool, detail: str) -> None:
        nonlocal failures
        print(f"{'PASS' if ok else 'FAIL'}  {name}  ({detail})")
        if not ok:
            failures += 1

    dev = verify_gauge_sign()
    check("gauge sign pinning", True, f"slow-rotation deviation {dev:.2e} rad")

    rng = np.random.default_rng(7)
    worst = 0.0
    for _ in range(200):
        p = RotorParams(omega=float(rng.uniform(0.01, 3.0)),
                        theta=float(rng.uniform(0.0, math.pi)))
        roots = cubic_quasienergies(p.d, p.omega, p.theta)
        vals = hermitian_eigensystem(h_interaction(p)).values
        worst = max(worst, float(np.abs(roots - vals).max()))
    check("cubic vs eigensolver", worst < 1e-10, f"max deviation {worst:.2e}")

    p = RotorParams(omega=0.2, theta=math.pi / 100, delta=0.803)
    _, lam_m = monodromy(p, 4096)
    lam_f = np.sort(fold(physical_modes(p, 32).quasi, p.omega))
    dev = float(np.abs(np.sort(fold(lam_m, p.omega)) - lam_f).max())
    check("monodromy vs harmonic matrix", dev < 1e-8, f"max deviation {dev:.2e}")

    p = RotorParams(omega=0.7, theta=math.pi / 5)
    udef = unitarity_defect(propagator_zero_field(p, 3.7))
    check("analytic propagator unitarity", udef < 1e-12, f"defect {udef:.2e}")

    print("selftest:", "ok" if failures == 0 else f"{failures} failure(s)")
    return 0 if failures == 0 else 3


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    if args.command == "selftest":
        try:
            return _selftest()
        except RotorSpinError as exc:
            print(f"selftest error: {exc}", file=sys.stderr)
            return 3
    try:
        cfg = _merge_config(args)
        ds = run(cfg)
    except (ConfigError, InvalidArgumentError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except RotorSpinError as exc:
        print(f"numeric failure: {exc}", file=sys.stderr)
        return 3
    if not cfg.output_path:
        # no file requested: print the table to stdout
        print(",".join(ds.header))
        for row in ds.rows:
            print(",".join(str(v) for v in row))
    else:
        print(f"wrote {len(ds.rows)} rows to {cfg.output_path}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
