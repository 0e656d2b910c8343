"""Command-line interface.

Subcommands: ``simulate``, ``couple``, ``stability`` and ``cipher``.
Exit codes: 0 success, 1 usage or configuration error, 2 numeric failure.
Divergence is reported inside the output, never as an exit code.
"""

from __future__ import annotations

import argparse
import contextlib
import json
import re
import sys
from dataclasses import asdict, dataclass, field
from typing import List, Optional

import numpy as np

from . import __version__
from .analysis import classify_error, proposition_audit, stability_report
from .cipher import CipherSession, ExplicitKeys, SeededKeys, TrajectoryKeys, get_codec
from .core import SolverConfig, abm_solve
from .coupling import make_scheme, simulate_coupled
from .csvio import CsvTable, read_csv, write_csv
from .errors import FracsyncError, NumericError
from .systems import PAPER_ORDERS, registry_lookup

DEFAULT_H = 0.005
DEFAULT_T_END = 50.0

# options whose values may legitimately start with '-'
LIST_OPTIONS = ("--lambda", "--alpha", "--x0", "--drive-x0", "--response-x0", "--k", "--ciphertext")
_NUMBER_LIST = re.compile(r"^-[0-9.][0-9eE.+\-j,]*$")


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(1, f"{self.prog}: error: {message}\n")


@dataclass
class RunConfig:
    command: str
    options: dict = field(default_factory=dict)

    def to_json(self) -> str:
        return json.dumps(asdict(self), sort_keys=True)


def _floats(text: str, name: str, n: Optional[int] = None) -> List[float]:
    try:
        values = [float(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise UsageError(f"{name}: expected comma-separated numbers, got {text!r}") from None
    if n is not None and len(values) != n:
        raise UsageError(f"{name}: expected {n} values, got {len(values)}")
    return values


def _params(pairs) -> dict:
    out = {}
    for item in pairs or ():
        key, sep, value = item.partition("=")
        if not sep:
            raise UsageError(f"--param expects key=value, got {item!r}")
        try:
            out[key.strip()] = float(value)
        except ValueError:
            raise UsageError(f"--param {key}: not a number: {value!r}") from None
    return out


def _solver_config(args) -> SolverConfig:
    if args.h <= 0 or args.t_end <= 0:
        raise UsageError("--h and --t-end must be positive")
    return SolverConfig.from_horizon(
        args.h,
        args.t_end,
        corrector_sweeps=args.corrector_sweeps,
        divergence_threshold=args.divergence_threshold,
        memory_window=args.memory_window,
    )


@contextlib.contextmanager
def _output(path: str):
    if path == "-":
        yield sys.stdout
    else:
        with open(path, "w", newline="") as fh:
            yield fh


def _run_config(args) -> RunConfig:
    opts = {k: v for k, v in vars(args).items() if k not in ("func", "command")}
    return RunConfig(args.command, opts)


def _header(args) -> List[str]:
    return [f"fracsync {__version__}", f"config: {_run_config(args).to_json()}"]


# --- commands -------------------------------------------------------------------


def cmd_simulate(args) -> int:
    system = registry_lookup(args.system, _params(args.param))
    alpha = _floats(args.alpha, "--alpha", system.dimension)
    x0 = _floats(args.x0, "--x0", system.dimension)
    traj = abm_solve(system.field, alpha, x0, _solver_config(args))
    trailing = [f"status: {traj.status}"]
    if traj.diverged_at is not None:
        trailing.append(f"diverged_at: {traj.diverged_at}")
    table = CsvTable(
        ["t", "x", "y", "z"] if system.dimension == 3 else ["t"] + [f"x{i + 1}" for i in range(system.dimension)],
        np.column_stack([traj.times, traj.states]),
        _header(args),
        trailing,
    )
    with _output(args.out) as fh:
        write_csv(fh, table)
    return 0


def _scheme_from_args(args):
    params = _params(args.param)
    t_keys, r_keys = {"a1", "b1", "c1"}, {"a2", "b2", "c2"}
    unknown = set(params) - t_keys - r_keys
    if unknown:
        raise UsageError(f"unknown parameter(s): {', '.join(sorted(unknown))}")
    t_params = dict(registry_lookup("t", {k: v for k, v in params.items() if k in t_keys}).params)
    r_params = dict(registry_lookup("rossler", {k: v for k, v in params.items() if k in r_keys}).params)
    return make_scheme(
        args.scenario,
        gains=args.gains,
        k=_floats(args.k, "--k", 3),
        orders=_floats(args.alpha, "--alpha", 3),
        t_params=t_params,
        rossler_params=r_params,
    )


def cmd_couple(args) -> int:
    scheme = _scheme_from_args(args)
    d0 = _floats(args.drive_x0, "--drive-x0", 3)
    r0 = _floats(args.response_x0, "--response-x0", 3)
    config = _solver_config(args)
    drive, response, error = simulate_coupled(scheme, d0, r0, config)
    cls = classify_error(error, args.tolerance, args.tail_fraction, config.divergence_threshold)
    trailing = [f"status: {error.status}"]
    if error.diverged_at is not None:
        trailing.append(f"diverged_at: {error.diverged_at}")
    trailing += [
        f"verdict: {cls.verdict}",
        f"tail_sup: {cls.tail_sup!r}",
        f"tail_growing: {str(cls.tail_growing).lower()}",
    ]
    table = CsvTable(
        ["t", "xd", "yd", "zd", "xr", "yr", "zr", "e1", "e2", "e3"],
        np.column_stack([error.times, drive.states, response.states, error.states]),
        _header(args),
        trailing,
    )
    with _output(args.out) as fh:
        write_csv(fh, table)
    if args.out != "-":
        print(f"{scheme.name} gains={scheme.gains} status={error.status} verdict={cls.verdict} tail_sup={cls.tail_sup:.6g}")
    return 0


def cmd_stability(args) -> int:
    if args.scenario:
        scheme = _scheme_from_args(args)
        report = proposition_audit(scheme)
    else:
        if not args.lam:
            raise UsageError("give either --lambda or --scenario")
        try:
            lam = [complex(v.strip().replace(" ", "")) for v in args.lam.split(",") if v.strip()]
        except ValueError:
            raise UsageError(f"--lambda: cannot parse {args.lam!r}") from None
        alpha = _floats(args.alpha, "--alpha")
        if len(alpha) != len(lam):
            raise UsageError(f"--lambda has {len(lam)} values but --alpha has {len(alpha)}")
        report = stability_report(lam, alpha)
    if args.json:
        print(json.dumps(report.as_dict()))
    else:
        for i, (lam, a, v) in enumerate(zip(report.eigenvalues, report.orders, report.verdicts), 1):
            shown = f"{lam.real:g}" if lam.imag == 0 else str(lam)
            print(f"component {i}: lambda={shown} alpha={a:g} {v}")
        print("verdicts: " + ",".join(report.verdicts))
        print(f"overall: {report.overall}")
    return 0


def _read_keys_file(path: str) -> List[int]:
    keys = []
    with open(path) as fh:
        for lineno, line in enumerate(fh, 1):
            line = line.strip()
            if not line:
                continue
            try:
                keys.append(int(line))
            except ValueError:
                raise UsageError(f"{path}:{lineno}: not an integer: {line!r}") from None
    return keys


def _key_source(args):
    if args.keys_file:
        return ExplicitKeys(_read_keys_file(args.keys_file))
    if args.seed is not None:
        if not 0 <= args.seed < 2**64:
            raise UsageError("--seed must be a 64-bit unsigned integer")
        return SeededKeys(args.seed)
    try:
        path, column, t0 = args.keystream_from.split(",")
        t0 = int(t0)
    except ValueError:
        raise UsageError("--keystream-from expects CSV,COLUMN,T0_INDEX") from None
    with open(path) as fh:
        table = read_csv(fh)
    if column not in table.header:
        raise UsageError(f"column {column!r} not in {path} (have {', '.join(table.header)})")
    return TrajectoryKeys(table.column(column), t0, args.scale)


def cmd_cipher(args) -> int:
    session = CipherSession(get_codec(args.codec), _key_source(args))
    if args.action == "encrypt":
        if args.message_file:
            with open(args.message_file) as fh:
                message = fh.read().rstrip("\n")
        elif args.message is not None:
            message = args.message
        else:
            raise UsageError("encrypt needs --message or --message-file")
        print(",".join(str(c) for c in session.encrypt(message)))
    else:
        if args.ciphertext_file:
            with open(args.ciphertext_file) as fh:
                text = fh.read()
        elif args.ciphertext is not None:
            text = args.ciphertext
        else:
            raise UsageError("decrypt needs --ciphertext or --ciphertext-file")
        try:
            codes = [int(v) for v in re.split(r"[,\s]+", text.strip()) if v]
        except ValueError:
            raise UsageError("ciphertext must be comma-separated integers") from None
        print(session.decrypt(codes))
    return 0


# --- parser ---------------------------------------------------------------------


def _add_solver_args(p):
    p.add_argument("--h", type=float, default=DEFAULT_H, help="step size (default %(default)s)")
    p.add_argument("--t-end", type=float, default=DEFAULT_T_END, help="horizon (default %(default)s)")
    p.add_argument("--corrector-sweeps", type=int, default=1)
    p.add_argument("--divergence-threshold", type=float, default=1e12)
    p.add_argument("--memory-window", type=int, default=None, help="truncate history to this many steps")
    p.add_argument("--out", default="-", help="output path, '-' for stdout")


def _add_scheme_args(p, scenario_required):
    p.add_argument("--scenario", required=scenario_required, choices=["tt-sync", "tt-anti", "rt-sync", "rt-anti"])
    p.add_argument("--gains", default="paper", choices=["paper", "corrected", "stabilized"])
    p.add_argument("--k", default="1,1,1", help="stabilizing gains k1,k2,k3")
    p.add_argument("--param", action="append", metavar="KEY=VALUE", help="override a1,b1,c1,a2,b2,c2")


def build_parser() -> argparse.ArgumentParser:
    orders = ",".join(str(a) for a in PAPER_ORDERS)
    parser = _Parser(prog="fracsync", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"fracsync {__version__}")
    sub = parser.add_subparsers(dest="command", parser_class=_Parser)
    sub.required = True

    p = sub.add_parser("simulate", help="integrate a single system and write t,x,y,z CSV")
    p.add_argument("--system", required=True, help="t or rossler")
    p.add_argument("--alpha", default=orders)
    p.add_argument("--x0", default="0.01,0.01,0.01")
    p.add_argument("--param", action="append", metavar="KEY=VALUE")
    _add_solver_args(p)
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("couple", help="simulate a drive/response scenario")
    _add_scheme_args(p, True)
    p.add_argument("--alpha", default=orders)
    p.add_argument("--drive-x0", default="0.01,0.01,0.01")
    p.add_argument("--response-x0", default="0.5,0.5,0.5")
    p.add_argument("--tolerance", type=float, default=1e-3)
    p.add_argument("--tail-fraction", type=float, default=0.25)
    _add_solver_args(p)
    p.set_defaults(func=cmd_couple)

    p = sub.add_parser("stability", help="fractional stability verdicts")
    p.add_argument("--lambda", dest="lam", help="eigenvalues, e.g. 2.1,30,0.6 or -1+2j")
    p.add_argument("--alpha", default=orders)
    p.add_argument("--json", action="store_true")
    _add_scheme_args(p, False)
    p.set_defaults(func=cmd_stability)

    p = sub.add_parser("cipher", help="mod-m stream cipher")
    p.add_argument("action", choices=["encrypt", "decrypt"])
    p.add_argument("--codec", default="paper36", choices=["paper36", "base36", "ascii128"])
    p.add_argument("--message")
    p.add_argument("--message-file")
    p.add_argument("--ciphertext")
    p.add_argument("--ciphertext-file")
    src = p.add_mutually_exclusive_group(required=True)
    src.add_argument("--keys-file", help="one integer key per line")
    src.add_argument("--seed", type=int, help="64-bit unsigned PRNG seed")
    src.add_argument("--keystream-from", metavar="CSV,COLUMN,T0_INDEX")
    p.add_argument("--scale", type=float, default=1e6, help="key = floor(|z| * scale)")
    p.set_defaults(func=cmd_cipher)
    return parser


def _join_negative_lists(argv: List[str]) -> List[str]:
    out, i = [], 0
    while i < len(argv):
        tok = argv[i]
        if tok in LIST_OPTIONS and i + 1 < len(argv) and _NUMBER_LIST.match(argv[i + 1]):
            out.append(f"{tok}={argv[i + 1]}")
            i += 2
            continue
        out.append(tok)
        i += 1
    return out


def main(argv: Optional[List[str]] = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    try:
        args = parser.parse_args(_join_negative_lists(argv))
    except SystemExit as exc:
        return exc.code
    try:
        return args.func(args)
    except NumericError as exc:
        print(f"fracsync: numeric failure: {exc}", file=sys.stderr)
        return 2
    except (UsageError, FracsyncError, OSError) as exc:
        print(f"fracsync: error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
