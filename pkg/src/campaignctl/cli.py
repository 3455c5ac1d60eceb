"""Command-line front end: config parsing, dispatch, CSV outputs.

Run configurations are line-oriented key = value files with INI-style
sections (see the README for the grammar). Exactly one model section,
``[sis]`` or ``[sir]``, must be present; every other section is optional
and missing keys take the documented defaults, which reproduce the
constant-rate baseline scenarios.

Exit codes: 0 success, 1 usage error, 2 configuration error,
3 non-convergence, 4 I/O error.
"""

from __future__ import annotations

import argparse
import configparser
import os
import sys
from dataclasses import dataclass, replace

from .abm import AbmConfig, simulate, write_abm_csv
from .experiments import SweepSpec, export_trajectories, run_sweep, write_sweep_csv
from .profiles import Constant, Cosine, SigmoidDown, SigmoidUp, Tabulated
from .sis_model import SisParams
from .sir_model import SirParams
from .solver import (
    METHOD_FBS,
    METHOD_SHOOTING,
    SolverOptions,
    solve,
    uniqueness_probe,
)
from .strategies import STRATEGY_KINDS, Strategy, evaluate_strategy

__all__ = ["ConfigError", "RunConfig", "parse_config", "dump_config", "main"]

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_CONFIG = 2
EXIT_NOT_CONVERGED = 3
EXIT_IO = 4


class ConfigError(ValueError):
    """A run configuration that cannot be accepted, with the offending key."""


@dataclass
class AbmSettings:
    n_agents: int = 100_000
    replications: int = 20
    dt_event: float | None = None


@dataclass
class RunConfig:
    """Validated, fully defaulted run configuration."""

    model: object
    solver: SolverOptions
    strategy: Strategy
    output_dir: str
    output_prefix: str
    abm: AbmSettings
    seed: int


_MODEL_KEYS = {
    "sis": ("gamma", "T", "b", "u_max", "i0"),
    "sir": ("gamma", "T", "b", "c", "u1_max", "u2_max", "i0"),
}
_PROFILE_KEYS = {
    "constant": ("rate",),
    "sigmoid_up": ("low", "high", "steepness", "center"),
    "sigmoid_down": ("low", "high", "steepness", "center"),
    "cosine": ("mean", "amplitude", "period"),
    "table": ("times", "values"),
}
_SOLVER_KEYS = (
    "method", "max_iters", "tol_residual", "tol_control", "relaxation",
    "n_steps", "initial_costate_guess", "multi_start",
)
_SECTION_KEYS = {
    "strategy": ("kind",),
    "output": ("directory", "prefix"),
    "abm": ("n_agents", "replications", "dt_event"),
    "flags": ("paper_literal_sir", "seed"),
}


def _section(parser, name):
    return dict(parser[name]) if parser.has_section(name) else {}


def _reject_unknown(section, keys, allowed):
    for key in keys:
        if key not in allowed:
            raise ConfigError(f"unknown key {key!r} in section [{section}]")


def _get_float(section, keys, name, default=None):
    if name not in keys:
        if default is None:
            raise ConfigError(f"missing key {name!r} in section [{section}]")
        return default
    try:
        return float(keys[name])
    except ValueError:
        raise ConfigError(f"key {name!r} in section [{section}] is not a number: {keys[name]!r}")


def _get_int(section, keys, name, default):
    if name not in keys:
        return default
    try:
        return int(keys[name])
    except ValueError:
        raise ConfigError(f"key {name!r} in section [{section}] is not an integer: {keys[name]!r}")


def _get_bool(section, keys, name, default):
    if name not in keys:
        return default
    text = keys[name].strip().lower()
    if text in ("true", "yes", "1", "on"):
        return True
    if text in ("false", "no", "0", "off"):
        return False
    raise ConfigError(f"key {name!r} in section [{section}] is not a boolean: {keys[name]!r}")


def _get_floats(section, keys, name):
    try:
        return tuple(float(piece) for piece in keys[name].split(",") if piece.strip())
    except ValueError:
        raise ConfigError(f"key {name!r} in section [{section}] is not a number list: {keys[name]!r}")


def _parse_profile(section, keys, default_period):
    variant = keys.get("variant", "constant")
    if variant not in _PROFILE_KEYS:
        raise ConfigError(
            f"unknown profile variant {variant!r} in section [{section}]; "
            f"expected one of {sorted(_PROFILE_KEYS)}"
        )
    _reject_unknown(section, keys, ("variant",) + _PROFILE_KEYS[variant])
    try:
        if variant == "constant":
            return Constant(_get_float(section, keys, "rate", 1.0))
        if variant in ("sigmoid_up", "sigmoid_down"):
            cls = SigmoidUp if variant == "sigmoid_up" else SigmoidDown
            return cls(
                low=_get_float(section, keys, "low"),
                high=_get_float(section, keys, "high"),
                steepness=_get_float(section, keys, "steepness"),
                center=_get_float(section, keys, "center"),
            )
        if variant == "cosine":
            return Cosine(
                mean=_get_float(section, keys, "mean"),
                amplitude=_get_float(section, keys, "amplitude"),
                period=_get_float(section, keys, "period", default_period),
            )
        return Tabulated(times=_get_floats(section, keys, "times"), values=_get_floats(section, keys, "values"))
    except ValueError as err:
        raise ConfigError(f"invalid profile in section [{section}]: {err}")


def parse_config(text):
    """Parse and validate a run configuration; all defaults are filled in."""
    parser = configparser.ConfigParser(interpolation=None)
    parser.optionxform = str  # keep key case (T vs t)
    try:
        parser.read_string(text)
    except configparser.Error as err:
        raise ConfigError(f"configuration syntax error: {err}")

    known_sections = {"sis", "sir", "beta", "gamma", "solver", "strategy", "output", "abm", "flags"}
    for name in parser.sections():
        if name not in known_sections:
            raise ConfigError(f"unknown section [{name}]")

    has_sis = parser.has_section("sis")
    has_sir = parser.has_section("sir")
    if has_sis and has_sir:
        raise ConfigError("configuration has both [sis] and [sir] sections; exactly one model is allowed")
    if not (has_sis or has_sir):
        raise ConfigError("configuration needs a model section, [sis] or [sir]")
    kind = "sis" if has_sis else "sir"
    model_keys = _section(parser, kind)
    _reject_unknown(kind, model_keys, _MODEL_KEYS[kind])

    horizon = _get_float(kind, model_keys, "T", 5.0)
    beta = _parse_profile("beta", _section(parser, "beta"), default_period=horizon)
    gamma_scalar = _get_float(kind, model_keys, "gamma", 0.1)
    gamma = (
        _parse_profile("gamma", _section(parser, "gamma"), default_period=horizon)
        if parser.has_section("gamma")
        else Constant(gamma_scalar)
    )

    flags = _section(parser, "flags")
    _reject_unknown("flags", flags, _SECTION_KEYS["flags"])
    paper_literal = _get_bool("flags", flags, "paper_literal_sir", False)
    seed = _get_int("flags", flags, "seed", 0)

    try:
        if kind == "sis":
            model = SisParams(
                beta=beta,
                gamma=gamma,
                T=horizon,
                b=_get_float(kind, model_keys, "b", 15.0),
                u_max=_get_float(kind, model_keys, "u_max", 0.06),
                i0=_get_float(kind, model_keys, "i0", 0.01),
            )
        else:
            model = SirParams(
                beta=beta,
                gamma=gamma,
                T=horizon,
                b=_get_float(kind, model_keys, "b", 15.0),
                c=_get_float(kind, model_keys, "c", 1.0),
                u1_max=_get_float(kind, model_keys, "u1_max", 0.06),
                u2_max=_get_float(kind, model_keys, "u2_max", 0.3),
                i0=_get_float(kind, model_keys, "i0", 0.01),
                paper_literal=paper_literal,
            )
    except ValueError as err:
        raise ConfigError(f"invalid [{kind}] parameters: {err}")

    solver_keys = _section(parser, "solver")
    _reject_unknown("solver", solver_keys, _SOLVER_KEYS)
    method = solver_keys.get("method", METHOD_FBS)
    if method not in (METHOD_FBS, METHOD_SHOOTING):
        raise ConfigError(f"unknown solver method {method!r}; expected 'fbs' or 'shooting'")
    n_steps = _get_int("solver", solver_keys, "n_steps", 0)
    guess = (
        _get_floats("solver", solver_keys, "initial_costate_guess")
        if "initial_costate_guess" in solver_keys
        else None
    )
    multi = None
    if "multi_start" in solver_keys:
        multi = tuple(
            tuple(float(x) for x in chunk.split(",") if x.strip())
            for chunk in solver_keys["multi_start"].split(";")
            if chunk.strip()
        )
    try:
        solver_opts = SolverOptions(
            method=method,
            max_iters=_get_int("solver", solver_keys, "max_iters", 500),
            tol_residual=_get_float("solver", solver_keys, "tol_residual", 1e-6),
            tol_control=_get_float("solver", solver_keys, "tol_control", 1e-6),
            relaxation=_get_float("solver", solver_keys, "relaxation", 0.5),
            initial_costate_guess=guess,
            multi_start=multi,
            n_steps=n_steps or None,
        )
    except ValueError as err:
        raise ConfigError(f"invalid [solver] parameters: {err}")

    strategy_keys = _section(parser, "strategy")
    _reject_unknown("strategy", strategy_keys, _SECTION_KEYS["strategy"])
    strategy_kind = strategy_keys.get("kind", "optimal")
    if strategy_kind not in STRATEGY_KINDS:
        raise ConfigError(f"unknown strategy kind {strategy_kind!r}; expected one of {STRATEGY_KINDS}")

    output_keys = _section(parser, "output")
    _reject_unknown("output", output_keys, _SECTION_KEYS["output"])

    abm_keys = _section(parser, "abm")
    _reject_unknown("abm", abm_keys, _SECTION_KEYS["abm"])
    abm = AbmSettings(
        n_agents=_get_int("abm", abm_keys, "n_agents", 100_000),
        replications=_get_int("abm", abm_keys, "replications", 20),
        dt_event=_get_float("abm", abm_keys, "dt_event", 0.0) or None,
    )
    if abm.n_agents < 1:
        raise ConfigError("key 'n_agents' in section [abm] must be >= 1")
    if abm.replications < 1:
        raise ConfigError("key 'replications' in section [abm] must be >= 1")

    return RunConfig(
        model=model,
        solver=solver_opts,
        strategy=Strategy(kind=strategy_kind, solver_opts=solver_opts),
        output_dir=output_keys.get("directory", "out"),
        output_prefix=output_keys.get("prefix", "run"),
        abm=abm,
        seed=seed,
    )


def _dump_profile(lines, section, profile):
    lines.append(f"[{section}]")
    if isinstance(profile, Constant):
        lines.append("variant = constant")
        lines.append(f"rate = {profile.rate!r}")
    elif isinstance(profile, (SigmoidUp, SigmoidDown)):
        lines.append(f"variant = {'sigmoid_up' if isinstance(profile, SigmoidUp) else 'sigmoid_down'}")
        lines.append(f"low = {profile.low!r}")
        lines.append(f"high = {profile.high!r}")
        lines.append(f"steepness = {profile.steepness!r}")
        lines.append(f"center = {profile.center!r}")
    elif isinstance(profile, Cosine):
        lines.append("variant = cosine")
        lines.append(f"mean = {profile.mean!r}")
        lines.append(f"amplitude = {profile.amplitude!r}")
        lines.append(f"period = {profile.period!r}")
    elif isinstance(profile, Tabulated):
        lines.append("variant = table")
        lines.append("times = " + ",".join(repr(t) for t in profile.times))
        lines.append("values = " + ",".join(repr(v) for v in profile.values))
    else:
        raise ConfigError(f"profile {type(profile).__name__} cannot be written to a config file")
    lines.append("")


def dump_config(cfg):
    """Normalized configuration text; parses back to an equal RunConfig."""
    lines = []
    model = cfg.model
    if isinstance(model, SisParams):
        lines.append("[sis]")
        lines.append(f"gamma = {_gamma_scalar(model)!r}")
        lines.append(f"T = {model.T!r}")
        lines.append(f"b = {model.b!r}")
        lines.append(f"u_max = {model.u_max!r}")
        lines.append(f"i0 = {model.i0!r}")
    else:
        lines.append("[sir]")
        lines.append(f"gamma = {_gamma_scalar(model)!r}")
        lines.append(f"T = {model.T!r}")
        lines.append(f"b = {model.b!r}")
        lines.append(f"c = {model.c!r}")
        lines.append(f"u1_max = {model.u1_max!r}")
        lines.append(f"u2_max = {model.u2_max!r}")
        lines.append(f"i0 = {model.i0!r}")
    lines.append("")
    _dump_profile(lines, "beta", model.beta)
    if not isinstance(model.gamma, Constant):
        _dump_profile(lines, "gamma", model.gamma)

    opts = cfg.solver
    lines.append("[solver]")
    lines.append(f"method = {opts.method}")
    lines.append(f"max_iters = {opts.max_iters}")
    lines.append(f"tol_residual = {opts.tol_residual!r}")
    lines.append(f"tol_control = {opts.tol_control!r}")
    lines.append(f"relaxation = {opts.relaxation!r}")
    if opts.n_steps is not None:
        lines.append(f"n_steps = {opts.n_steps}")
    if opts.initial_costate_guess is not None:
        lines.append("initial_costate_guess = " + ",".join(repr(x) for x in opts.initial_costate_guess))
    if opts.multi_start is not None:
        lines.append("multi_start = " + ";".join(",".join(repr(x) for x in g) for g in opts.multi_start))
    lines.append("")

    lines.append("[strategy]")
    lines.append(f"kind = {cfg.strategy.kind}")
    lines.append("")
    lines.append("[output]")
    lines.append(f"directory = {cfg.output_dir}")
    lines.append(f"prefix = {cfg.output_prefix}")
    lines.append("")
    lines.append("[abm]")
    lines.append(f"n_agents = {cfg.abm.n_agents}")
    lines.append(f"replications = {cfg.abm.replications}")
    if cfg.abm.dt_event is not None:
        lines.append(f"dt_event = {cfg.abm.dt_event!r}")
    lines.append("")
    lines.append("[flags]")
    paper_literal = isinstance(model, SirParams) and model.paper_literal
    lines.append(f"paper_literal_sir = {'true' if paper_literal else 'false'}")
    lines.append(f"seed = {cfg.seed}")
    lines.append("")
    return "\n".join(lines)


def _gamma_scalar(model):
    return model.gamma.rate if isinstance(model.gamma, Constant) else 0.1


class _Parser(argparse.ArgumentParser):
    # argparse exits 2 on usage errors by default; the documented code is 1
    def error(self, message):
        self.print_usage(sys.stderr)
        raise SystemExit(EXIT_USAGE)


def _build_parser():
    parser = _Parser(prog="campaignctl", description="Optimal campaign control for SIS/SIR information epidemics")
    sub = parser.add_subparsers(dest="command", required=True)

    solve_p = sub.add_parser("solve", help="solve one instance and export trajectories")
    solve_p.add_argument("--config", required=True)
    solve_p.add_argument("--method", choices=(METHOD_FBS, METHOD_SHOOTING))
    solve_p.add_argument("--out-dir", default=None)
    solve_p.add_argument("--dump-config", action="store_true", help="print the normalized config and exit")

    sweep_p = sub.add_parser("sweep", help="sweep one parameter across strategies")
    sweep_p.add_argument("--config", required=True)
    sweep_p.add_argument("--param", required=True, choices=("beta", "gamma", "T", "b", "c"))
    sweep_p.add_argument("--values", required=True, help="comma-separated parameter values")
    sweep_p.add_argument("--strategies", required=True, help="comma-separated strategy kinds")
    sweep_p.add_argument("--n-steps", type=int, default=None)
    sweep_p.add_argument("--out-dir", default=None)

    sim_p = sub.add_parser("simulate", help="agent-based mean trajectory under the configured strategy")
    sim_p.add_argument("--config", required=True)
    sim_p.add_argument("--out-dir", default=None)

    cmp_p = sub.add_parser("compare", help="strategy-vs-J table on one instance")
    cmp_p.add_argument("--config", required=True)
    cmp_p.add_argument("--out-dir", default=None)

    probe_p = sub.add_parser("probe-uniqueness", help="shooting from several costate guesses")
    probe_p.add_argument("--config", required=True)
    probe_p.add_argument("--guesses", default=None, help="semicolon-separated costate vectors")
    return parser


def _load_config(path):
    try:
        with open(path) as fh:
            text = fh.read()
    except OSError as err:
        raise ConfigError(f"cannot read configuration {path!r}: {err}")
    return parse_config(text)


def _ensure_dir(path):
    try:
        os.makedirs(path, exist_ok=True)
    except OSError as err:
        raise _IoFailure(f"cannot create output directory {path!r}: {err}")


class _IoFailure(RuntimeError):
    pass


def _strategy_names(text):
    names = tuple(name.strip() for name in text.split(",") if name.strip())
    for name in names:
        if name not in STRATEGY_KINDS:
            raise ConfigError(f"unknown strategy kind {name!r}; expected one of {STRATEGY_KINDS}")
    return names


def _cmd_solve(args):
    cfg = _load_config(args.config)
    if args.dump_config:
        print(dump_config(cfg), end="")
        return EXIT_OK
    opts = cfg.solver if args.method is None else replace(cfg.solver, method=args.method)
    sol = solve(cfg.model, opts)
    out_dir = args.out_dir or cfg.output_dir
    _ensure_dir(out_dir)
    traj_path = os.path.join(out_dir, f"{cfg.output_prefix}_trajectories.csv")
    cfg_path = os.path.join(out_dir, f"{cfg.output_prefix}_config.cfg")
    try:
        export_trajectories(sol, traj_path)
        with open(cfg_path, "w") as fh:
            fh.write(dump_config(cfg))
    except OSError as err:
        raise _IoFailure(str(err))
    print(f"method     {sol.method}")
    print(f"J          {sol.cost:.10f}")
    print(f"residual   {sol.residual:.3e}")
    print(f"iterations {sol.iterations}")
    print(f"converged  {str(sol.converged).lower()}")
    print(f"wrote      {traj_path}")
    if not sol.converged:
        print(f"error: {sol.message}", file=sys.stderr)
        return EXIT_NOT_CONVERGED
    return EXIT_OK


def _cmd_sweep(args):
    cfg = _load_config(args.config)
    try:
        values = tuple(float(v) for v in args.values.split(",") if v.strip())
    except ValueError:
        raise ConfigError(f"--values is not a number list: {args.values!r}")
    if not values:
        raise ConfigError("--values is empty")
    strategies = tuple(
        Strategy(kind=k, solver_opts=cfg.solver if k == "optimal" else None)
        for k in _strategy_names(args.strategies)
    )
    spec = SweepSpec(
        model_template=cfg.model,
        parameter=args.param,
        values=values,
        strategies=strategies,
        n_steps=args.n_steps,
    )
    rows = run_sweep(spec)
    out_dir = args.out_dir or cfg.output_dir
    _ensure_dir(out_dir)
    path = os.path.join(out_dir, f"{cfg.output_prefix}_sweep.csv")
    try:
        write_sweep_csv(rows, path)
    except OSError as err:
        raise _IoFailure(str(err))
    print(f"param,value,strategy,J,converged,iterations")
    for row in rows:
        print(f"{row.parameter},{row.value:g},{row.strategy},{row.J:.8g},{str(row.converged).lower()},{row.iterations}")
    print(f"wrote {path}")
    if any(not row.converged for row in rows):
        return EXIT_NOT_CONVERGED
    return EXIT_OK


def _cmd_simulate(args):
    cfg = _load_config(args.config)
    try:
        _, _, controls = evaluate_strategy(cfg.strategy, cfg.model, n_steps=cfg.solver.n_steps)
    except Exception as err:
        print(f"error: building controls failed: {err}", file=sys.stderr)
        return EXIT_NOT_CONVERGED
    try:
        abm_cfg = AbmConfig(
            model=cfg.model,
            controls=controls,
            n_agents=cfg.abm.n_agents,
            replications=cfg.abm.replications,
            seed=cfg.seed,
            dt_event=cfg.abm.dt_event,
        )
    except (ValueError, TypeError) as err:
        raise ConfigError(f"invalid [abm] settings: {err}")
    result = simulate(abm_cfg)
    out_dir = args.out_dir or cfg.output_dir
    _ensure_dir(out_dir)
    path = os.path.join(out_dir, f"{cfg.output_prefix}_abm.csv")
    try:
        write_abm_csv(result, path)
    except OSError as err:
        raise _IoFailure(str(err))
    print(f"agents       {result.n_agents}")
    print(f"replications {result.replications}")
    print(f"mean i(T)    {result.mean_infected[-1]:.6f}")
    print(f"wrote        {path}")
    return EXIT_OK


def _cmd_compare(args):
    cfg = _load_config(args.config)
    rows = []
    exit_code = EXIT_OK
    for kind in STRATEGY_KINDS:
        strategy = Strategy(kind=kind, solver_opts=cfg.solver if kind == "optimal" else None)
        try:
            cost, _, _ = evaluate_strategy(strategy, cfg.model, n_steps=cfg.solver.n_steps)
            rows.append((kind, cost, True))
        except Exception as err:
            rows.append((kind, float("nan"), False))
            print(f"error: strategy {kind} failed: {err}", file=sys.stderr)
            exit_code = EXIT_NOT_CONVERGED
    out_dir = args.out_dir or cfg.output_dir
    _ensure_dir(out_dir)
    path = os.path.join(out_dir, f"{cfg.output_prefix}_compare.csv")
    try:
        with open(path, "w") as fh:
            fh.write("strategy,J,converged\n")
            for kind, cost, ok in rows:
                fh.write(f"{kind},{cost!r},{str(ok).lower()}\n")
    except OSError as err:
        raise _IoFailure(str(err))
    print("strategy,J")
    for kind, cost, _ in rows:
        print(f"{kind},{cost:.8g}")
    print(f"wrote {path}")
    return exit_code


def _cmd_probe(args):
    cfg = _load_config(args.config)
    dim = 1 if isinstance(cfg.model, SisParams) else 2
    if args.guesses:
        try:
            guesses = [
                tuple(float(x) for x in chunk.split(",") if x.strip())
                for chunk in args.guesses.split(";")
                if chunk.strip()
            ]
        except ValueError:
            raise ConfigError(f"--guesses is not a list of costate vectors: {args.guesses!r}")
    else:
        scales = (0.0, 1.0, 2.0, 5.0)
        guesses = [tuple(s * v for v in ([1.0] if dim == 1 else [-1.0, 0.0])) for s in scales]
    for guess in guesses:
        if len(guess) != dim:
            raise ConfigError(f"guess {guess} has dimension {len(guess)}, model costate has dimension {dim}")
    report = uniqueness_probe(cfg.model, guesses, opts=replace(cfg.solver, method=METHOD_SHOOTING))
    print(f"starts            {len(report.starts)}")
    print(f"converged starts  {sum(1 for s in report.starts if s.converged)}")
    print(f"clusters          {report.n_clusters}")
    print(f"max root distance {report.max_root_distance:.3e}")
    for k, rep in enumerate(report.clusters):
        print(f"cluster {k}: lambda0 = {tuple(round(float(v), 8) for v in rep)}")
    for start in report.starts:
        status = "converged" if start.converged else "not converged"
        print(f"  guess {start.guess} -> {status}, residual {start.residual:.3e}")
    return EXIT_OK


def main(argv=None):
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return exc.code if exc.code is not None else EXIT_USAGE
    handlers = {
        "solve": _cmd_solve,
        "sweep": _cmd_sweep,
        "simulate": _cmd_simulate,
        "compare": _cmd_compare,
        "probe-uniqueness": _cmd_probe,
    }
    try:
        return handlers[args.command](args)
    except ConfigError as err:
        print(f"configuration error: {err}", file=sys.stderr)
        return EXIT_CONFIG
    except _IoFailure as err:
        print(f"i/o error: {err}", file=sys.stderr)
        return EXIT_IO
    except OSError as err:
        print(f"i/o error: {err}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
