"""Command-line front end.

    sdwaves ivp      --psi-minus 1.0 --alpha -2 --c 50          # CSV trajectory
    sdwaves alpha    --psi-minus 1.0 --c 1 10 100               # JSON alpha-hat(c)
    sdwaves waves    --psi-minus 0.9 --psi-plus 0.3             # JSON wave reports
    sdwaves profile  --psi-minus 1.2 --psi-plus 0.01 --index 2  # CSV profile
    sdwaves scaling  --psi-minus 1.0 --c-lo 1e3 --c-hi 1e6 --n 20
    sdwaves validate --psi-minus 0.9 --psi-plus 0.3
    sdwaves scan     --axis alpha --psi-minus 0.7 --c 100 --n 10000

Exit status: 0 success, 1 domain/usage error, 2 no wave found,
3 internal contradiction (a checked invariant failed).
"""

from __future__ import annotations

import argparse
import contextlib
import json
import logging
import math
import sys
from dataclasses import dataclass, field

import numpy as np

from . import __version__
from .alpha_shooting import alpha_hat_curve
from .c_shooting import C_MAX, GRID, solve_waves
from .errors import DomainError, InternalContradictionError, SDWaveError
from .geometry import integrate_xy, to_csv, write_rows
from .ode_core import HALF_PI, IvpParams, integrate_ivp
from .oracle import alpha_root_scan, c_root_scan
from .validation import fit_all_scaling, validate_wave, wave_report

log = logging.getLogger("sdwaves")

COMMANDS = ("ivp", "alpha", "waves", "profile", "scaling", "validate", "scan")


@dataclass
class RunConfig:
    command: str
    psi_minus: float | None = None
    psi_plus: float | None = None
    alpha: float | None = None
    c: list[float] = field(default_factory=list)
    c_max: float = C_MAX
    c_lo: float | None = None
    c_hi: float | None = None
    steps: int | None = None
    grid: int = GRID
    n: int | None = None
    index: int | None = None
    axis: str = "c"
    allow_negative_psi_plus: bool = False
    output_path: str | None = None
    format: str = "json"

    def validate(self) -> None:
        if self.psi_minus is not None and not 0 < self.psi_minus < HALF_PI:
            raise DomainError(f"--psi-minus must lie in (0, pi/2) radians, got {self.psi_minus!r}")
        if self.psi_plus is not None and not -HALF_PI < self.psi_plus < HALF_PI:
            raise DomainError(f"--psi-plus must lie in (-pi/2, pi/2) radians, got {self.psi_plus!r}")
        if self.psi_plus is not None and self.psi_plus < 0 and not self.allow_negative_psi_plus:
            raise DomainError("negative --psi-plus requires --allow-negative-psi-plus")
        if self.steps is not None and self.steps < 2:
            raise DomainError("--steps must be at least 2")
        if self.index is not None and self.index < 1:
            raise DomainError("--index counts from 1")
        for name in ("c_max", "c_lo", "c_hi"):
            v = getattr(self, name)
            if v is not None and not (v > 0 and math.isfinite(v)):
                raise DomainError(f"--{name.replace('_', '-')} must be positive and finite")


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        raise DomainError(f"{self.prog}: {message}")


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="sdwaves", description="Traveling-wave profiles for surface diffusion with contact angles.")
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def common(sp, fmt="json"):
        sp.add_argument("--psi-minus", type=float, required=True, help="left contact angle")
        sp.add_argument("--degrees", action="store_true", help="angles are given in degrees")
        sp.add_argument("-o", "--output", dest="output_path", help="output file (default: stdout)")
        sp.add_argument("--format", choices=("csv", "json"), default=fmt)
        sp.add_argument("-v", "--verbose", action="store_true")

    def wave_flags(sp):
        sp.add_argument("--psi-plus", type=float, required=True, help="right contact angle")
        sp.add_argument("--c-max", type=float, default=C_MAX)
        sp.add_argument("--grid", type=int, default=GRID)
        sp.add_argument("--allow-negative-psi-plus", action="store_true")

    sp = sub.add_parser("ivp", help="integrate one initial value problem")
    common(sp, "csv")
    sp.add_argument("--alpha", type=float, required=True)
    sp.add_argument("--c", type=float, nargs=1, required=True)
    sp.add_argument("--steps", type=int)

    sp = sub.add_parser("alpha", help="alpha-hat(c) on a list or log grid of speeds")
    common(sp)
    sp.add_argument("--c", type=float, nargs="+", default=[])
    sp.add_argument("--c-lo", type=float)
    sp.add_argument("--c-hi", type=float)
    sp.add_argument("--n", type=int)

    sp = sub.add_parser("waves", help="enumerate traveling waves")
    common(sp)
    wave_flags(sp)

    sp = sub.add_parser("profile", help="profile curve of one wave as CSV")
    common(sp, "csv")
    wave_flags(sp)
    sp.add_argument("--index", type=int, default=1, help="wave number, ordered by speed (from 1)")

    sp = sub.add_parser("scaling", help="fit the six c^(1/3) scaling exponents")
    common(sp)
    sp.add_argument("--c-lo", type=float, default=1e3)
    sp.add_argument("--c-hi", type=float, default=1e6)
    sp.add_argument("--n", type=int, default=20)

    sp = sub.add_parser("validate", help="run the invariant suite on enumerated waves")
    common(sp)
    wave_flags(sp)
    sp.add_argument("--index", type=int, help="only this wave (from 1)")

    sp = sub.add_parser("scan", help="brute-force oracle scans")
    common(sp)
    sp.add_argument("--axis", choices=("alpha", "c"), default="c")
    sp.add_argument("--psi-plus", type=float)
    sp.add_argument("--allow-negative-psi-plus", action="store_true")
    sp.add_argument("--c", type=float, nargs=1, default=[])
    sp.add_argument("--c-lo", type=float, default=1e-4)
    sp.add_argument("--c-hi", type=float, default=C_MAX)
    sp.add_argument("--n", type=int)
    return p


def parse_config(argv=None) -> tuple[RunConfig, bool]:
    ns = build_parser().parse_args(argv)
    d = vars(ns)
    verbose = d.pop("verbose", False)
    degrees = d.pop("degrees", False)
    if degrees:
        for k in ("psi_minus", "psi_plus"):
            if d.get(k) is not None:
                d[k] = math.radians(d[k])
    cfg = RunConfig(**{k: v for k, v in d.items() if v is not None or k in ("c_lo", "c_hi")})
    cfg.validate()
    return cfg, verbose


def _clean(obj):
    """JSON-safe copy: numpy scalars to Python, non-finite floats to None."""
    if isinstance(obj, dict):
        return {k: _clean(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_clean(v) for v in obj]
    if isinstance(obj, (np.floating, float)):
        v = float(obj)
        return v if math.isfinite(v) else None
    if isinstance(obj, np.integer):
        return int(obj)
    if isinstance(obj, np.bool_):
        return bool(obj)
    return obj


@contextlib.contextmanager
def _open_output(path):
    if path is None:
        yield sys.stdout
        return
    try:
        fh = open(path, "w", encoding="utf-8", newline="")
    except OSError as exc:
        raise DomainError(f"cannot write {path}: {exc.strerror}") from exc
    with fh:
        yield fh


def _emit_json(cfg: RunConfig, payload) -> None:
    with _open_output(cfg.output_path) as fh:
        json.dump(_clean(payload), fh, indent=2, sort_keys=False, allow_nan=False)
        fh.write("\n")


def _waves(cfg: RunConfig):
    return solve_waves(cfg.psi_minus, cfg.psi_plus, cfg.c_max, cfg.grid,
                       allow_negative=cfg.allow_negative_psi_plus)


def _pick(waves, index):
    if index > len(waves):
        raise DomainError(f"--index {index} but only {len(waves)} wave(s) found")
    return waves[index - 1]


def cmd_ivp(cfg: RunConfig) -> None:
    traj = integrate_ivp(IvpParams(cfg.psi_minus, cfg.alpha, cfg.c[0]), cfg.steps)
    if cfg.format == "csv":
        x, y = integrate_xy(traj.s, traj.theta)
        with _open_output(cfg.output_path) as fh:
            write_rows(np.column_stack([traj.s, x, y, traj.theta, traj.theta1, traj.theta2]), fh)
        return
    end = traj.endpoint
    _emit_json(cfg, {
        "psi_minus": cfg.psi_minus, "alpha": cfg.alpha, "c": cfg.c[0],
        "steps": round(1 / traj.step), "band_exit": traj.band_exit,
        "error_estimate": traj.error_estimate,
        "endpoint": {"s": end.s, "theta": end.theta, "theta1": end.theta1, "theta2": end.theta2},
    })


def cmd_alpha(cfg: RunConfig) -> None:
    cs = list(cfg.c)
    if cfg.c_lo is not None and cfg.c_hi is not None:
        cs += list(np.geomspace(cfg.c_lo, cfg.c_hi, cfg.n or 16))
    if not cs:
        raise DomainError("give --c values or --c-lo/--c-hi")
    results = alpha_hat_curve(cfg.psi_minus, sorted(set(cs)))
    _emit_json(cfg, [{"c": r.c, "alpha_hat": r.alpha_hat, "residual": r.residual,
                      "theta_end": r.theta_end, "resolved": r.resolved} for r in results])


def cmd_waves(cfg: RunConfig) -> None:
    waves = _waves(cfg)
    _emit_json(cfg, {"psi_minus": cfg.psi_minus, "psi_plus": cfg.psi_plus, "count": len(waves),
                     "waves": [wave_report(w) for w in waves]})


def cmd_profile(cfg: RunConfig) -> None:
    wave = _pick(_waves(cfg), cfg.index or 1)
    if cfg.format == "json":
        _emit_json(cfg, wave_report(wave))
        return
    with _open_output(cfg.output_path) as fh:
        to_csv(wave.profile, fh)


def cmd_scaling(cfg: RunConfig) -> None:
    fits = fit_all_scaling(cfg.psi_minus, cfg.c_lo, cfg.c_hi, cfg.n)
    _emit_json(cfg, {"psi_minus": cfg.psi_minus, "fits": [f.to_dict() for f in fits],
                     "all_within_tolerance": all(f.ok for f in fits)})


def cmd_validate(cfg: RunConfig) -> None:
    waves = _waves(cfg)
    chosen = [_pick(waves, cfg.index)] if cfg.index else waves
    out = []
    for w in chosen:
        checks = validate_wave(w)
        out.append({"c": w.c, "k_index": w.k_index, "checks": checks, "passed": all(checks.values())})
    _emit_json(cfg, {"psi_minus": cfg.psi_minus, "psi_plus": cfg.psi_plus, "waves": out})
    failed = [f"c={r['c']:.6g}: " + ", ".join(k for k, v in r["checks"].items() if not v)
              for r in out if not r["passed"]]
    if failed:
        raise InternalContradictionError("invariant violations: " + "; ".join(failed))


def cmd_scan(cfg: RunConfig) -> None:
    if cfg.axis == "alpha":
        if not cfg.c:
            raise DomainError("--axis alpha needs --c")
        report = alpha_root_scan(cfg.psi_minus, cfg.c[0], cfg.n or 10_000)
    else:
        if cfg.psi_plus is None:
            raise DomainError("--axis c needs --psi-plus")
        report = c_root_scan(cfg.psi_minus, cfg.psi_plus, cfg.c_lo, cfg.c_hi, cfg.n or 1000)
    _emit_json(cfg, report.to_dict())


DISPATCH = {
    "ivp": cmd_ivp, "alpha": cmd_alpha, "waves": cmd_waves, "profile": cmd_profile,
    "scaling": cmd_scaling, "validate": cmd_validate, "scan": cmd_scan,
}


def run(cfg: RunConfig) -> int:
    try:
        DISPATCH[cfg.command](cfg)
    except SDWaveError as exc:
        print(f"sdwaves {cfg.command}: {exc}", file=sys.stderr)
        return exc.exit_code
    return 0


def main(argv=None) -> int:
    try:
        cfg, verbose = parse_config(argv)
    except SDWaveError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exc.exit_code
    logging.basicConfig(level=logging.DEBUG if verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    return run(cfg)


if __name__ == "__main__":
    sys.exit(main())
