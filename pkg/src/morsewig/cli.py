"""``morsewig`` command line: build states, evolve them, compute and export
Wigner grids, and run the verification suite.

Exit status: 0 ok, 1 usage, 2 numerical accuracy (or a failed check),
3 coverage.
"""

import argparse
import json
import re
import sys
import time
from dataclasses import asdict, dataclass, field
from fractions import Fraction

import numpy as np

from . import gridio, morse, states
from .checks import run_checks
from .errors import AccuracyError, CoverageError, DomainError
from .wigner import PhaseSpaceGrid, WignerConfig, auto_grid_spec, negativity, normalization, wigner_grid

EXIT_OK, EXIT_USAGE, EXIT_ACCURACY, EXIT_COVERAGE = 0, 1, 2, 3

# Keys accepted in a --config file, identical to the long flag names.
CONFIG_KEYS = (
    "N", "hbar", "omega", "mass", "zeta", "nbar", "phase", "eigen", "docs", "dpacs", "m",
    "time", "xmin", "xmax", "nx", "pmin", "pmax", "np", "method", "tol", "out",
)
METHOD_NAMES = {"closed": "closed_form", "quad": "quadrature"}


class UsageError(Exception):
    pass


@dataclass
class JobSpec:
    system: dict
    state: dict
    time: str = None
    grid: dict = field(default_factory=dict)
    config: dict = field(default_factory=dict)
    outputs: list = field(default_factory=list)


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _shared(p):
    g = p.add_argument_group("system")
    g.add_argument("--N", type=int, help="number of bound levels")
    g.add_argument("--hbar", type=float)
    g.add_argument("--omega", type=float)
    g.add_argument("--mass", type=float)
    g = p.add_argument_group("state")
    g.add_argument("--eigen", type=int, metavar="n", help="bound eigenstate |n>")
    g.add_argument("--docs", action="store_true", default=None, help="deformed coherent state")
    g.add_argument("--dpacs", action="store_true", default=None, help="photon-added deformed coherent state")
    g.add_argument("--m", type=int, help="photons added (with --dpacs)")
    g.add_argument("--zeta", help="coherent parameter as re[,im]")
    g.add_argument("--nbar", type=float, help="pick zeta so the coherent state has this mean level")
    g.add_argument("--phase", type=float, help="phase of zeta with --nbar (rad)")
    g.add_argument("--time", help='evolution time: a number or "p/q tau"')
    g = p.add_argument_group("grid")
    for name, kind in (("xmin", float), ("xmax", float), ("nx", int), ("pmin", float), ("pmax", float), ("np", int)):
        g.add_argument(f"--{name}", type=kind)
    g.add_argument("--method", choices=sorted(METHOD_NAMES))
    g.add_argument("--tol", type=float, help="Bessel relative tolerance")
    p.add_argument("--out", action="append", help="output path, format from extension (repeatable)")
    p.add_argument("--config", help="JSON file with defaults for any of the flags above")


def build_parser():
    p = _Parser(prog="morsewig", description="Wigner functions of Morse-oscillator coherent states.")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)
    for name, text in (
        ("state", "build a state and print its occupations"),
        ("evolve", "build a state, evolve it to --time and print it"),
        ("wigner", "compute a Wigner grid and write it out"),
    ):
        _shared(sub.add_parser(name, help=text))
    c = sub.add_parser("check", help="run the verification suite")
    c.add_argument("--tol", type=float, default=1e-10, help="Bessel relative tolerance to inject")
    c.add_argument("--only", type=int, action="append", help="run only this criterion (repeatable)")
    return p


def _merge_config(args):
    opts = {k: getattr(args, k, None) for k in CONFIG_KEYS}
    if args.config:
        try:
            with open(args.config, encoding="utf-8") as fh:
                doc = json.load(fh)
        except (OSError, ValueError) as exc:
            raise UsageError(f"cannot read config {args.config}: {exc}") from exc
        unknown = set(doc) - set(CONFIG_KEYS)
        if unknown:
            raise UsageError(f"unknown config keys: {sorted(unknown)}")
        for key, value in doc.items():
            if opts[key] is None:
                opts[key] = value
    if isinstance(opts["out"], str):
        opts["out"] = [opts["out"]]
    return opts


def parse_zeta(text):
    if isinstance(text, (int, float)):
        return complex(text)
    if isinstance(text, (list, tuple)):
        parts = list(text)
    else:
        parts = str(text).split(",")
    try:
        values = [float(v) for v in parts]
    except ValueError:
        raise UsageError(f"bad --zeta {text!r}; expected re[,im]") from None
    if len(values) not in (1, 2):
        raise UsageError(f"bad --zeta {text!r}; expected re[,im]")
    return complex(values[0], values[1] if len(values) == 2 else 0.0)


_TAU = re.compile(r"^\s*(?:([+-]?\d+)\s*(?:/\s*(\d+))?\s*\*?\s*)?tau(?:\s*/\s*(\d+))?\s*$")


def parse_time(text, system):
    """Seconds from a number or a rational multiple of the revival period."""
    if text is None:
        return 0.0
    if isinstance(text, (int, float)):
        return float(text)
    m = _TAU.match(str(text))
    if not m:
        try:
            return float(text)
        except ValueError:
            raise UsageError(f'bad --time {text!r}; expected a number or "p/q tau"') from None
    num, den, den2 = m.groups()
    if den and den2:
        raise UsageError(f"bad --time {text!r}")
    q = int(den or den2 or 1)
    if q == 0 or q > 64:
        raise UsageError(f"--time denominator must be 1..64, got {q}")
    frac = Fraction(int(num) if num else 1, q)
    return float(frac) * states.revival_period(system)


def build_state(opts):
    if opts["N"] is None:
        raise UsageError("--N is required")
    system = morse.make_system(
        opts["N"], opts["hbar"] or 1.0, opts["omega"] or 1.0, opts["mass"] or 1.0,
    )
    kinds = [k for k in ("eigen", "docs", "dpacs") if opts[k] is not None and opts[k] is not False]
    if len(kinds) != 1:
        raise UsageError("give exactly one of --eigen n, --docs, --dpacs")
    kind = kinds[0]
    recipe = {"kind": kind}
    if kind == "eigen":
        if opts["zeta"] is not None or opts["nbar"] is not None:
            raise UsageError("--eigen takes no --zeta/--nbar")
        recipe["n"] = opts["eigen"]
        return system, states.eigenstate(system, opts["eigen"]), recipe
    if (opts["zeta"] is None) == (opts["nbar"] is None):
        raise UsageError(f"--{kind} needs exactly one of --zeta or --nbar")
    if opts["zeta"] is not None:
        if opts["phase"] is not None:
            raise UsageError("--phase goes with --nbar")
        zeta = parse_zeta(opts["zeta"])
    else:
        zeta = states.solve_zeta_for_mean(system, opts["nbar"], opts["phase"] or 0.0)
        recipe.update(nbar=opts["nbar"], phase=opts["phase"] or 0.0)
    recipe["zeta"] = [zeta.real, zeta.imag]
    if kind == "docs":
        return system, states.docs(system, zeta), recipe
    if opts["m"] is None:
        raise UsageError("--dpacs needs --m")
    recipe["m"] = opts["m"]
    return system, states.dpacs(system, zeta, opts["m"]), recipe


def _occupation_table(state):
    occ = states.occupation(state)
    lines = [
        f"label    {state.label}",
        f"norm^2   {state.norm_sq:.15g}",
        f"<n>      {states.mean_n(state):.15g}",
        "  n   P(n)                   P(n)/norm^2",
    ]
    lines += [f"{n:3d}   {p:<22.15g} {p / state.norm_sq:.15g}" for n, p in enumerate(occ)]
    return "\n".join(lines)


def _wigner_config(opts):
    kw = {}
    if opts["method"]:
        kw["method"] = METHOD_NAMES.get(opts["method"], opts["method"])
    if opts["tol"] is not None:
        kw["bessel_rel_tol"] = opts["tol"]
    return WignerConfig(**kw)


def _grid_spec(opts, state, cfg):
    bounds = {k: opts[k] for k in ("xmin", "xmax", "pmin", "pmax")}
    nx, n_p = opts["nx"] or 201, opts["np"] or 201
    if any(v is None for v in bounds.values()):
        auto = auto_grid_spec(state, nx, n_p, cfg)
        defaults = {"xmin": auto.x_min, "xmax": auto.x_max, "pmin": auto.p_min, "pmax": auto.p_max}
        bounds = {k: defaults[k] if v is None else v for k, v in bounds.items()}
    return PhaseSpaceGrid(bounds["xmin"], bounds["xmax"], nx, bounds["pmin"], bounds["pmax"], n_p)


def _write_state(state, outputs):
    text = states.state_to_json(state)
    if not outputs:
        print(text)
    for path in outputs:
        if not path.lower().endswith(".json"):
            raise UsageError(f"states are written as JSON; got {path}")
        gridio.atomic_write(path, text + "\n")
        print(f"wrote {path}")


def cmd_state(opts, evolve=False):
    system, state, _ = build_state(opts)
    if evolve:
        if opts["time"] is None:
            raise UsageError("evolve needs --time")
        state = states.evolve(state, parse_time(opts["time"], system))
    elif opts["time"] is not None:
        raise UsageError("use the evolve command to apply --time")
    print(_occupation_table(state))
    _write_state(state, opts["out"] or [])
    return EXIT_OK


def cmd_wigner(opts):
    outputs = opts["out"] or []
    for path in outputs:
        ext = path.rsplit(".", 1)[-1].lower()
        if ext not in gridio.FORMATS:
            raise UsageError(f"unknown output format for {path}; expected one of {gridio.FORMATS}")
    system, state, recipe = build_state(opts)
    t = parse_time(opts["time"], system)
    if t:
        state = states.evolve(state, t)
    cfg = _wigner_config(opts)
    spec = _grid_spec(opts, state, cfg)
    job = JobSpec(system.params(), recipe, None if opts["time"] is None else str(opts["time"]),
                  {k: getattr(spec, k) for k in ("x_min", "x_max", "nx", "p_min", "p_max", "np")},
                  asdict(cfg), outputs)
    spec.meta.update(job=asdict(job), timestamp=time.strftime("%Y-%m-%dT%H:%M:%S%z"), time=t)
    grid = wigner_grid(state, spec, cfg)
    for path in outputs:
        gridio.write_grid(grid, path)
        print(f"wrote {path}")
    mn, mx, mp, vol = negativity(grid)
    print(f"grid {grid.nx}x{grid.np} x=[{grid.x_min:.6g}, {grid.x_max:.6g}] p=[{grid.p_min:.6g}, {grid.p_max:.6g}]")
    print(f"max W {np.max(grid.values):.6e}; min W {mn:.6e} at (x, p) = ({mx:.6g}, {mp:.6g}); negative volume {vol:.6e}")
    try:
        print(f"integral {normalization(grid):.12f} (norm^2 {state.norm_sq:.12f})")
    except CoverageError as exc:
        print(f"warning: window does not cover the state: {exc}", file=sys.stderr)
    return EXIT_OK


def cmd_check(args):
    results = run_checks(args.only, args.tol, report=lambda r: print(r.line(), flush=True))
    failed = [r for r in results if not r.passed]
    print(f"{len(results) - len(failed)}/{len(results)} criteria passed")
    return EXIT_ACCURACY if failed else EXIT_OK


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        if args.command == "check":
            return cmd_check(args)
        opts = _merge_config(args)
        if args.command == "wigner":
            return cmd_wigner(opts)
        return cmd_state(opts, evolve=args.command == "evolve")
    except (UsageError, DomainError) as exc:
        print(f"morsewig: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except CoverageError as exc:
        print(f"morsewig: coverage error: {exc}", file=sys.stderr)
        return EXIT_COVERAGE
    except AccuracyError as exc:
        where = f" at {exc.where}" if getattr(exc, "where", None) is not None else ""
        print(f"morsewig: accuracy error{where}: {exc}", file=sys.stderr)
        return EXIT_ACCURACY


if __name__ == "__main__":
    sys.exit(main())
