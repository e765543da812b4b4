"""Command-line harness: walk runs, preset experiments and consistency checks.

Every command writes flat CSV files plus a ``run.json`` carrying the full
configuration and program version. Exit codes: 0 success, 2 invalid
configuration, 3 I/O failure, 4 numerical failure.
"""

from __future__ import annotations

import argparse
import json
import logging
import math
import os
import sys
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, replace
from pathlib import Path

import numpy as np

from . import __version__, _backend
from .asymptotics import (
    HADAMARD,
    KickedRotorParams,
    bessel_moments,
    coin_from_kicked_rotor,
    default_effective_initials,
    hadamard_fourier_state,
)
from .errors import UsageError, WalkError
from .markov import run_master, step_master, step_position_twostep
from .moments import MomentSeries, fit_polynomial, moments_direct
from .walk import CoinAngle, make_initial, position_distribution, run_unitary, step_unitary

log = logging.getLogger("qwmarkov")

MODES = ("unitary", "markov", "twostep")
EMITS = ("distribution", "moments", "interference")
EXIT_OK, EXIT_CONFIG, EXIT_IO, EXIT_NUMERIC = 0, 2, 3, 4


class ConfigError(UsageError):
    pass


@dataclass
class RunConfig:
    theta: float | None = None
    K: float | None = None
    p: int | None = None
    steps: int = 1000
    initial: tuple = (0, 1 + 0j, 0j)
    mode: str = "unitary"
    fit_window: tuple | None = None
    output_path: str = "."
    emit: tuple = ("moments",)

    def validate(self) -> "RunConfig":
        if isinstance(self.steps, bool) or int(self.steps) != self.steps or self.steps < 1:
            raise ConfigError(f"steps must be an integer >= 1, got {self.steps!r}")
        has_theta = self.theta is not None
        has_rotor = self.K is not None or self.p is not None
        if has_theta == has_rotor:
            raise ConfigError("give exactly one of --theta or the pair --K/--p")
        if has_rotor and (self.K is None or self.p is None):
            raise ConfigError("--K and --p must be given together")
        if self.mode not in MODES:
            raise ConfigError(f"mode must be one of {MODES}")
        bad = set(self.emit) - set(EMITS)
        if bad:
            raise ConfigError(f"unknown emit targets {sorted(bad)}")
        if "interference" in self.emit and self.mode != "unitary":
            raise ConfigError("interference output requires unitary mode")
        if self.fit_window is not None:
            lo, hi = self.fit_window
            if not 0 <= lo < hi <= self.steps:
                raise ConfigError(f"fit window {self.fit_window} must lie within [0, {self.steps}]")
        make_initial(*self.initial)
        return self

    def coin(self) -> CoinAngle:
        if self.theta is not None:
            return CoinAngle(self.theta)
        return coin_from_kicked_rotor(KickedRotorParams(self.K, self.p))

    def to_dict(self) -> dict:
        d = asdict(self)
        site, aL, aR = self.initial
        d["initial"] = [int(site), [aL.real, aL.imag], [aR.real, aR.imag]]
        d["emit"] = list(self.emit)
        d["fit_window"] = list(self.fit_window) if self.fit_window is not None else None
        return d

    @classmethod
    def from_dict(cls, d: dict) -> "RunConfig":
        d = dict(d)
        unknown = set(d) - set(cls.__dataclass_fields__)
        if unknown:
            raise ConfigError(f"unknown config keys {sorted(unknown)}")
        if "initial" in d:
            site, aL, aR = d["initial"]
            d["initial"] = (int(site), _as_complex(aL), _as_complex(aR))
        if d.get("fit_window") is not None:
            d["fit_window"] = tuple(float(x) for x in d["fit_window"])
        if "emit" in d:
            d["emit"] = tuple(d["emit"])
        return cls(**d)


def _as_complex(v):
    if isinstance(v, (list, tuple)):
        return complex(float(v[0]), float(v[1]))
    return complex(v)


def _fmt(x):
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    return f"{float(x):.17g}"


def write_csv(path: Path, header, columns) -> None:
    with open(path, "w") as fh:
        fh.write(",".join(header) + "\n")
        for row in zip(*columns):
            fh.write(",".join(_fmt(v) for v in row) + "\n")


def write_run_json(out: Path, command: str, config: RunConfig | None, **extra) -> None:
    meta = {
        "program": "qwmarkov",
        "version": __version__,
        "command": command,
        "config": config.to_dict() if config is not None else None,
    }
    meta.update(extra)
    with open(out / "run.json", "w") as fh:
        json.dump(meta, fh, indent=2, sort_keys=True)
        fh.write("\n")


def _prepare_out(path) -> Path:
    out = Path(path)
    out.mkdir(parents=True, exist_ok=True)
    return out


def _fits(series: MomentSeries, window) -> dict:
    lo, hi = window
    res = {}
    for name, fld, deg in (("var_linear", "var", 1), ("var_quadratic", "var", 2),
                           ("m1_linear", "m1", 1)):
        f = fit_polynomial(series, fld, deg, (lo, hi))
        res[name] = {"coefficients": list(f.coefficients), "residual_rms": f.residual_rms,
                     "window": list(f.window)}
    return res


def simulate(config: RunConfig):
    """Run the configured evolution; returns (series, extra columns dict, final distribution)."""
    coin = config.coin()
    state = make_initial(*config.initial)
    steps = int(config.steps)
    if config.mode == "unitary":
        run = run_unitary(state, coin, steps)
        final = position_distribution(run.final)
        extra = {"sum_beta": run.sum_beta, "sum_i_beta": run.sum_i_beta}
        return run.moment_series(), extra, (final.sites, final.left, final.right, final.left + final.right)
    dist = position_distribution(state)
    if config.mode == "markov":
        run = run_master(dist, coin, steps)
        f = run.final
        return run.moment_series(), {}, (f.sites, f.left, f.right, f.left + f.right)
    # twostep: P(1) from one master step, then the position-only recursion without beta
    prev = dist.marginal()
    cur = step_master(dist, coin).marginal()
    records = [moments_direct(prev), moments_direct(cur)]
    for _ in range(steps - 1):
        nxt = step_position_twostep(cur, prev.padded(cur.origin, len(cur.probs)), None, coin)
        prev, cur = cur, nxt
        records.append(moments_direct(cur))
    # the position-only recursion carries no chirality resolution
    nan = np.full(len(cur.probs), np.nan)
    return MomentSeries(tuple(records)), {}, (cur.sites, nan, nan, cur.probs)


def cmd_evolve(config: RunConfig, command: str = "evolve", **meta) -> dict:
    config.validate()
    coin = config.coin()
    if coin.trivial:
        log.warning("theta = %.17g is a trivial walk (pure translation)", coin.theta)
    series, extra, (sites, pl, pr, ptot) = simulate(config)
    out = _prepare_out(config.output_path)
    t = series.t.astype(np.int64)
    write_csv(out / "moments.csv", ["t", "m1", "m2", "var"],
              [t, series.field("m1"), series.field("m2"), series.field("var")])
    if "distribution" in config.emit:
        write_csv(out / f"distribution_t{config.steps}.csv", ["site", "p_left", "p_right", "p_total"],
                  [sites.astype(np.int64), pl, pr, ptot])
    if "interference" in config.emit:
        write_csv(out / "interference.csv", ["t", "sum_beta", "sum_i_beta"],
                  [t, extra["sum_beta"], extra["sum_i_beta"]])
    fits = _fits(series, config.fit_window) if config.fit_window is not None else None
    write_run_json(out, command, config, theta=coin.theta, trivial=coin.trivial,
                   backend=_backend.NAME, fits=fits, **meta)
    if fits:
        for name, f in fits.items():
            print(f"{name}: " + " ".join(f"c{k}={c:.10g}" for k, c in enumerate(f["coefficients"])))
    return {"series": series, "fits": fits, "coin": coin}


def figure1_rows(steps: int):
    """Columns t, (sum beta - A)/A and (sum i beta + A t - B)/(-A t + B) of the Hadamard walk."""
    run = run_unitary(make_initial(0, 1, 0), CoinAngle.hadamard(), steps)
    A, B = HADAMARD.A, HADAMARD.B
    t = run.times.astype(np.int64)
    target1 = -A * t + B
    return t, (run.sum_beta - A) / A, (run.sum_i_beta - target1) / target1


def cmd_figure1(config: RunConfig) -> dict:
    if config.theta is None and config.K is None:
        config = replace(config, theta=math.pi / 4)
    config.validate()
    if not config.coin().is_hadamard:
        raise ConfigError("figure1 uses the Hadamard constants A and B; theta must be pi/4")
    if tuple(config.initial) != (0, 1, 0):
        raise ConfigError("figure1 requires the initial state a_0 = 1, b_0 = 0")
    t, dA, dB = figure1_rows(config.steps)
    out = _prepare_out(config.output_path)
    write_csv(out / "fig1.csv", ["t", "delta_A_over_A", "delta_Bp_over_Bp"], [t, dA, dB])
    write_run_json(out, "figure1", config, backend=_backend.NAME, A=HADAMARD.A, B=HADAMARD.B)
    return {"t": t, "delta_A": dA, "delta_Bp": dB}


def figure2_rows(coin: CoinAngle, steps: int, init=None):
    """Columns t, exact variance from a_0 = 1, Bessel variance, relative difference (t >= 1)."""
    init = init if init is not None else default_effective_initials()
    run = run_unitary(make_initial(0, 1, 0), coin, steps)
    t = run.times[1:].astype(np.int64)
    exact = run.var[1:]
    approx = np.array([bessel_moments(init, coin, float(tt)).var for tt in t])
    return t, exact, approx, (approx - exact) / exact


def _cmd_bessel_compare(config: RunConfig, name: str, filename: str) -> dict:
    config.validate()
    coin = config.coin()
    t, exact, approx, rel = figure2_rows(coin, config.steps)
    out = _prepare_out(config.output_path)
    write_csv(out / filename, ["t", "var_exact", "var_bessel", "delta_var_over_var"],
              [t, exact, approx, rel])
    late = np.abs(rel[t >= min(100, t[-1])])
    write_run_json(out, name, config, theta=coin.theta, backend=_backend.NAME,
                   initials="default_effective_initials", max_abs_rel_t_ge_100=float(late.max()))
    print(f"{name}: max |dvar/var| for t >= 100: {late.max():.6g}")
    return {"t": t, "var_exact": exact, "var_bessel": approx, "rel": rel}


def cmd_figure2(config: RunConfig) -> dict:
    if config.theta is None and config.K is None:
        config = replace(config, theta=math.pi / 4)
    return _cmd_bessel_compare(config, "figure2", "fig2.csv")


def cmd_bessel_check(config: RunConfig) -> dict:
    return _cmd_bessel_compare(config, "bessel-check", "bessel_check.csv")


def cmd_fourier_check(t_max: int, tol: float = 1e-6, max_t: int = 200, out_dir=None) -> int:
    """Compare quadrature amplitudes with the exact map for every t <= t_max."""
    if t_max < 0 or t_max > max_t:
        raise ConfigError(f"t_max must lie in [0, {max_t}] (raise --max-tmax to allow more)")
    coin = CoinAngle.hadamard()
    state = make_initial(0, 1, 0)
    devs = []
    for t in range(t_max + 1):
        if t:
            state = step_unitary(state, coin)
        four = hadamard_fourier_state(t)
        dev = max(float(np.max(np.abs(four.a - state.a))), float(np.max(np.abs(four.b - state.b))))
        devs.append(dev)
        print(f"t={t}\tmax_dev={dev:.3e}")
    if out_dir is not None:
        out = _prepare_out(out_dir)
        write_csv(out / "fourier_check.csv", ["t", "max_dev"],
                  [np.arange(t_max + 1), np.array(devs)])
        write_run_json(out, "fourier-check", None, t_max=t_max, tol=tol, backend=_backend.NAME)
    worst = max(devs)
    print(f"worst deviation {worst:.3e} (tolerance {tol:.1e})")
    return EXIT_OK if worst < tol else EXIT_NUMERIC


def cmd_rotor(K: float, p: int, steps: int, base: RunConfig | None = None) -> dict:
    params = KickedRotorParams(K, p)
    coin = coin_from_kicked_rotor(params)
    base = base if base is not None else RunConfig()
    config = replace(base, theta=None, K=K, p=p, steps=steps, mode="unitary")
    return cmd_evolve(config, command="rotor", rotor={"K": K, "p": p, "ratio": params.ratio,
                                                       "theta": coin.theta})


def parse_sweep(text: str):
    try:
        name, rng = text.split("=", 1)
        a, b, n = rng.split(":")
        a, b, n = float(a), float(b), int(n)
    except ValueError:
        raise ConfigError(f"--sweep expects theta=a:b:n, got {text!r}") from None
    if name != "theta" or n < 1:
        raise ConfigError("only theta=a:b:n sweeps with n >= 1 are supported")
    return np.linspace(a, b, n)


def cmd_sweep(config: RunConfig, thetas, workers: int | None = None) -> list:
    base = Path(config.output_path)
    configs = [replace(config, theta=float(th), K=None, p=None, output_path=str(base / f"theta_{k:03d}"))
               for k, th in enumerate(thetas)]
    for c in configs:
        c.validate()
    with ThreadPoolExecutor(max_workers=workers or os.cpu_count()) as pool:
        results = list(pool.map(lambda c: cmd_evolve(c, command="sweep"), configs))
    _prepare_out(base)
    write_csv(base / "sweep.csv", ["index", "theta", "var_final"],
              [np.arange(len(configs)), np.asarray(thetas, dtype=float),
               np.array([r["series"].field("var")[-1] for r in results])])
    return results


def _parse_initial(s):
    parts = s.split(",")
    if len(parts) != 5:
        raise ConfigError("--initial expects site,aL_re,aL_im,aR_re,aR_im")
    site = int(parts[0])
    v = [float(x) for x in parts[1:]]
    return site, complex(v[0], v[1]), complex(v[2], v[3])


def _parse_fit(s):
    try:
        lo, hi = s.split(":")
        return float(lo), float(hi)
    except ValueError:
        raise ConfigError(f"--fit expects tmin:tmax, got {s!r}") from None


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--theta", type=float, help="coin angle in radians")
    common.add_argument("--K", type=float, help="kicked-rotor strength (with --p)")
    common.add_argument("--p", type=int, help="kicked-rotor resonance order (with --K)")
    common.add_argument("--steps", type=int)
    common.add_argument("--mode", choices=MODES)
    common.add_argument("--initial", help="site,aL_re,aL_im,aR_re,aR_im")
    common.add_argument("--fit", help="fit window tmin:tmax")
    common.add_argument("--out", help="output directory")
    common.add_argument("--emit", help="comma list of distribution,moments,interference")
    common.add_argument("--config", help="JSON config file; flags override its values")

    parser = argparse.ArgumentParser(prog="qwmarkov", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"qwmarkov {__version__}")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)
    sub.add_parser("evolve", parents=[common], help="run one walk and write moments")
    sub.add_parser("figure1", parents=[common], help="interference-sum convergence (Hadamard)")
    sub.add_parser("figure2", parents=[common], help="Bessel vs exact variance")
    sub.add_parser("bessel-check", parents=[common], help="figure2 machinery at any theta")
    sub.add_parser("rotor", parents=[common], help="walk at the angle matching a kicked rotor")
    sw = sub.add_parser("sweep", parents=[common], help="independent runs over a theta grid")
    sw.add_argument("--sweep", required=True, help="theta=a:b:n")
    sw.add_argument("--workers", type=int)
    fc = sub.add_parser("fourier-check", help="Fourier amplitudes vs exact map")
    fc.add_argument("--tmax", type=int, default=50)
    fc.add_argument("--max-tmax", type=int, default=200)
    fc.add_argument("--tol", type=float, default=1e-6)
    fc.add_argument("--out")
    return parser


def config_from_args(args) -> RunConfig:
    base = {}
    if getattr(args, "config", None):
        with open(args.config) as fh:
            base = json.load(fh)
    config = RunConfig.from_dict(base)
    overrides = {}
    if args.theta is not None:
        overrides.update(theta=args.theta, K=None, p=None)
    if args.K is not None or args.p is not None:
        overrides.update(K=args.K, p=args.p)
        if args.theta is None:
            overrides["theta"] = None
    for flag, key in (("steps", "steps"), ("mode", "mode"), ("out", "output_path")):
        if getattr(args, flag) is not None:
            overrides[key] = getattr(args, flag)
    if args.initial is not None:
        overrides["initial"] = _parse_initial(args.initial)
    if args.fit is not None:
        overrides["fit_window"] = _parse_fit(args.fit)
    if args.emit is not None:
        overrides["emit"] = tuple(e for e in args.emit.split(",") if e)
    return replace(config, **overrides)


def run(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s: %(message)s")
    if args.command == "fourier-check":
        return cmd_fourier_check(args.tmax, args.tol, args.max_tmax, args.out)
    config = config_from_args(args)
    if args.command == "evolve":
        cmd_evolve(config)
    elif args.command == "figure1":
        cmd_figure1(config)
    elif args.command == "figure2":
        cmd_figure2(config)
    elif args.command == "bessel-check":
        cmd_bessel_check(config)
    elif args.command == "rotor":
        if config.K is None or config.p is None:
            raise ConfigError("rotor needs --K and --p")
        cmd_rotor(config.K, config.p, config.steps, base=config)
    elif args.command == "sweep":
        cmd_sweep(config, parse_sweep(args.sweep), args.workers)
    return EXIT_OK


def main(argv=None) -> int:
    try:
        code = run(argv)
    except WalkError as exc:
        print(f"qwmarkov: error: {exc}", file=sys.stderr)
        code = exc.exit_code
    except OSError as exc:
        print(f"qwmarkov: I/O error: {exc}", file=sys.stderr)
        code = EXIT_IO
    except (ValueError, TypeError) as exc:
        print(f"qwmarkov: error: invalid config: {exc}", file=sys.stderr)
        code = EXIT_CONFIG
    return code


if __name__ == "__main__":
    sys.exit(main())
