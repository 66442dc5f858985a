"""Command-line front end.

Subcommands
-----------
trajectory  coefficients and partial sum of the hbar-expansion
renorm      renormalized sums for the minimal-sensitivity / fastest-convergence schemes
table       Martin-potential reference table with the eigen-solver as arbiter

Energies come from ``--E`` or from bound states ``--state n=1,l=0`` resolved
through the eigen-solver.  Exit codes: 0 success, 1 reference-table
tolerance violated, 2 invalid input, 3 numerical failure.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import logging
import sys
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

from .engine import expand
from .errors import DomainError, ReggeError
from .oracle import solve_eigenvalue
from .potential import PotentialSpec, PowerLaw
from .reference import MARTIN, MARTIN_ROWS, TOLERANCE, reproduce_row
from .renorm import SolverConfig, solve_scheme1, solve_scheme2

log = logging.getLogger("regge")

EXIT_OK, EXIT_TOLERANCE, EXIT_INVALID, EXIT_NUMERIC = 0, 1, 2, 3
SCHEMES = ("none", "pms", "fc", "both")
FORMATS = ("table", "csv", "json")


class InvalidInput(Exception):
    pass


@dataclass
class RunConfig:
    potential: PotentialSpec
    mass: float = 1.0
    hbar: float = 1.0
    N: int = 4
    n: int = 0
    energies: list = field(default_factory=list)
    states: list = field(default_factory=list)
    scheme: str = "both"
    output: str = "table"
    precision: int = 6
    tol: float = 1e-10
    max_iter: int = 100
    jobs: int = 1

    def __post_init__(self):
        if not 0 <= self.N <= 8:
            raise InvalidInput(f"order N={self.N} outside [0, 8]")
        if self.n < 0:
            raise InvalidInput(f"n={self.n} must be non-negative")
        if not self.mass > 0:
            raise InvalidInput(f"mass={self.mass} must be positive")
        if not self.hbar > 0:
            raise InvalidInput(f"hbar={self.hbar} must be positive")
        if self.scheme not in SCHEMES:
            raise InvalidInput(f"scheme must be one of {SCHEMES}")
        if self.output not in FORMATS:
            raise InvalidInput(f"format must be one of {FORMATS}")
        if self.precision < 1:
            raise InvalidInput("precision must be at least 1")

    @property
    def solver(self) -> SolverConfig:
        return SolverConfig(tol=self.tol, max_iter=self.max_iter)

    def items(self) -> list[tuple]:
        """Work items ``(E or None, n, l or None)`` in input order."""
        out = [(E, self.n, None) for E in self.energies]
        out += [(None, n, l) for n, l in self.states]
        return out


def parse_state(text: str) -> tuple[int, float]:
    try:
        parts = dict(p.split("=", 1) for p in text.replace(" ", "").split(","))
        return int(parts["n"]), float(parts["l"])
    except (KeyError, ValueError) as exc:
        raise InvalidInput(f"state must look like n=1,l=0, got {text!r}") from exc


def parse_row_filter(text: str) -> dict:
    try:
        return {k: float(v) for k, v in (p.split("=", 1) for p in text.split(","))}
    except ValueError as exc:
        raise InvalidInput(f"row filter must look like n=1 or n=1,l=0, got {text!r}") from exc


def read_config(path: str) -> dict:
    """Flat ``key = value`` file; ``#`` starts a comment."""
    out = {}
    with open(path) as fh:
        for lineno, raw in enumerate(fh, 1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise InvalidInput(f"{path}:{lineno}: expected key = value")
            key, value = (s.strip() for s in line.split("=", 1))
            out[key] = value
    return out


_CONFIG_KEYS = {
    "potential": str, "A": float, "v": float, "m": float, "mass": float,
    "hbar": float, "N": int, "n": int, "scheme": str, "format": str,
    "precision": int, "tol": float, "max_iter": int, "jobs": int,
}


def _merge_config(args: argparse.Namespace) -> None:
    if not args.config:
        return
    for key, value in read_config(args.config).items():
        if key in ("E", "energy"):
            if args.E is None:
                args.E = [float(x) for x in value.split(",") if x.strip()]
        elif key == "state":
            if args.state is None:
                args.state = [s for s in value.split(";") if s.strip()]
        elif key in _CONFIG_KEYS:
            dest = "mass" if key in ("m", "mass") else ("output" if key == "format" else key)
            if getattr(args, dest, None) is None:
                try:
                    setattr(args, dest, _CONFIG_KEYS[key](value))
                except ValueError as exc:
                    raise InvalidInput(f"config key {key}: bad value {value!r}") from exc
        else:
            raise InvalidInput(f"unknown config key {key!r}")


def _potential(args) -> PotentialSpec:
    kind = args.potential or "martin"
    if kind == "martin":
        return MARTIN
    if kind == "powerlaw":
        if args.v is None:
            raise InvalidInput("powerlaw potential needs --v")
        A = 1.0 if args.A is None else args.A
        try:
            return PowerLaw(A, args.v)
        except DomainError as exc:
            raise InvalidInput(str(exc)) from exc
    raise InvalidInput(f"unknown potential {kind!r}")


def _run_config(args) -> RunConfig:
    _merge_config(args)
    cfg = RunConfig(
        potential=_potential(args),
        mass=1.0 if args.mass is None else args.mass,
        hbar=1.0 if args.hbar is None else args.hbar,
        N=4 if args.N is None else args.N,
        n=0 if args.n is None else args.n,
        energies=list(args.E or []),
        states=[parse_state(s) for s in (args.state or [])],
        scheme=getattr(args, "scheme", None) or "both",
        output=args.output or "table",
        precision=6 if args.precision is None else args.precision,
        tol=1e-10 if args.tol is None else args.tol,
        max_iter=100 if args.max_iter is None else args.max_iter,
        jobs=1 if args.jobs is None else args.jobs,
    )
    return cfg


def _energy(cfg: RunConfig, E, n, l) -> float:
    if E is not None:
        return E
    return solve_eigenvalue(cfg.potential, cfg.mass, cfg.hbar, l, n).E


def _map(cfg: RunConfig, fn, items):
    if cfg.jobs > 1:
        with ThreadPoolExecutor(max_workers=cfg.jobs) as pool:
            return list(pool.map(fn, items))
    return [fn(it) for it in items]


def cmd_trajectory(cfg: RunConfig) -> list[dict]:
    if not cfg.items():
        raise InvalidInput("give at least one --E or --state")

    def one(item):
        E, n, l = item
        E = _energy(cfg, E, n, l)
        exp = expand(cfg.potential, E, cfg.mass, n, cfg.N)
        row = {"E": E, "n": n, "l_exact": l}
        row.update({f"alpha_{k}": float(c) for k, c in enumerate(exp.coeffs)})
        row["alpha"] = float(exp.evaluate(cfg.hbar))
        return row

    return _map(cfg, one, cfg.items())


def cmd_renorm(cfg: RunConfig) -> list[dict]:
    if not cfg.items():
        raise InvalidInput("give at least one --E or --state")
    schemes = {"none": ["none"], "pms": ["pms"], "fc": ["fc"], "both": ["pms", "fc"]}[cfg.scheme]

    def one(item):
        E, n, l = item
        E = _energy(cfg, E, n, l)
        rows = []
        for scheme in schemes:
            row = {"E": E, "n": n, "l_exact": l, "scheme": scheme}
            if scheme == "none":
                alpha = float(expand(cfg.potential, E, cfg.mass, n, cfg.N).evaluate(cfg.hbar))
                row.update(m1=0.0, m2=0.0, alpha=alpha, residuals=[0.0, 0.0], degenerate=False)
            else:
                solve = solve_scheme1 if scheme == "pms" else solve_scheme2
                res = solve(cfg.potential, E, cfg.mass, n, cfg.N, cfg.solver, cfg.hbar)
                row.update(
                    m1=res.m1, m2=res.m2, alpha=res.alpha_tilde,
                    residuals=list(res.residuals), degenerate=res.degenerate,
                )
            row["error"] = None if l is None else abs(row["alpha"] - l)
            rows.append(row)
        return rows

    return [r for group in _map(cfg, one, cfg.items()) for r in group]


def cmd_table(cfg: RunConfig, filters: list[dict]) -> tuple[list[dict], list[str]]:
    """Reference rows and the list of tolerance violations."""
    wanted = [
        (n, l) for n, l, *_ in MARTIN_ROWS
        if not filters or any(all({"n": n, "l": l}[k] == v for k, v in f.items()) for f in filters)
    ]
    if not wanted:
        raise InvalidInput("row filter matches no reference rows")

    results = _map(
        cfg, lambda s: reproduce_row(*s, mass=cfg.mass, hbar=cfg.hbar, solver_cfg=cfg.solver), wanted
    )
    rows, violations = [], []
    for res in results:
        ok = res.within_tolerance()
        rows.append({
            "E": res.E,
            "n": res.n,
            "l_exact": res.l_exact,
            "alpha_unren": res.alpha_unren,
            "alpha_pms": res.alpha_pms,
            "alpha_fc": res.alpha_fc,
            "m1": {"pms": res.pms.m1, "fc": res.fc.m1},
            "m2": {"pms": res.pms.m2, "fc": res.fc.m2},
            "residuals": {"pms": list(res.pms.residuals), "fc": list(res.fc.residuals)},
            "published": res.published,
            "errors": res.errors(),
            "within_tolerance": ok,
        })
        for col, good in ok.items():
            if not good:
                got = {"unren": res.alpha_unren, "pms": res.alpha_pms, "fc": res.alpha_fc}[col]
                msg = (
                    f"row n={res.n} l={res.l_exact:g} {col}: computed {got:.6g}, "
                    f"published {res.published[col]:.6g}, tolerance {TOLERANCE[col]:g}"
                )
                scheme = {"pms": res.pms, "fc": res.fc}.get(col)
                if scheme is not None:
                    roots = ", ".join(f"(m1={a:.5g}, m2={b:.5g}) -> {v:.6g}" for a, b, v in scheme.roots)
                    msg += f"; roots found: {roots}"
                violations.append(msg)
    return rows, violations


# -- output -----------------------------------------------------------------


def _num(x, precision: int):
    if x is None or isinstance(x, (bool, int, str)):
        return x
    return float(f"{x:.{precision}g}")


def _text(x, precision: int, missing: str = "") -> str:
    if x is None:
        return missing
    if isinstance(x, bool):
        return "true" if x else "false"
    if isinstance(x, (int, str)):
        return str(x)
    return f"{x:.{precision}g}"


def _flatten(row: dict, prefix: str = "") -> dict:
    """Nested dicts and lists become ``key_sub`` / ``key_1`` columns."""
    flat = {}
    for key, value in row.items():
        name = f"{prefix}{key}"
        if isinstance(value, dict):
            flat.update(_flatten(value, f"{name}_"))
        elif isinstance(value, list):
            flat.update(_flatten({str(i): v for i, v in enumerate(value, 1)}, f"{name}_"))
        else:
            flat[name] = value
    return flat


def _json_value(x, precision):
    if isinstance(x, dict):
        return {k: _json_value(v, precision) for k, v in x.items()}
    if isinstance(x, list):
        return [_json_value(v, precision) for v in x]
    return _num(x, precision)


def render(rows: list[dict], fmt: str, precision: int) -> str:
    if fmt == "json":
        return json.dumps([_json_value(r, precision) for r in rows], indent=2) + "\n"
    flat = [_flatten(r) for r in rows]
    columns = list(dict.fromkeys(k for r in flat for k in r))
    missing = "" if fmt == "csv" else "-"
    cells = [[_text(r.get(c), precision, missing) for c in columns] for r in flat]
    if fmt == "csv":
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\r\n")
        writer.writerow(columns)
        writer.writerows(cells)
        return buf.getvalue()
    widths = [max(len(c), *(len(row[i]) for row in cells)) for i, c in enumerate(columns)]
    lines = ["  ".join(c.rjust(w) for c, w in zip(columns, widths))]
    lines += ["  ".join(v.rjust(w) for v, w in zip(row, widths)) for row in cells]
    return "\n".join(lines) + "\n"


def parse_table_text(text: str) -> list[dict]:
    """Inverse of the aligned-table renderer (numbers as floats)."""
    lines = [ln.split() for ln in text.strip().splitlines()]
    header, body = lines[0], lines[1:]
    out = []
    for row in body:
        rec = {}
        for key, value in zip(header, row):
            if value == "-":
                rec[key] = None
                continue
            try:
                rec[key] = float(value)
            except ValueError:
                rec[key] = value
        out.append(rec)
    return out


# -- entry point --------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="flat key = value file with defaults")
    common.add_argument("--potential", choices=("powerlaw", "martin"))
    common.add_argument("--A", type=float, help="power-law coupling")
    common.add_argument("--v", type=float, help="power-law exponent")
    common.add_argument("--m", "--mass", dest="mass", type=float)
    common.add_argument("--hbar", type=float)
    common.add_argument("--N", type=int, help="expansion order")
    common.add_argument("--n", type=int, help="radial quantum number for --E inputs")
    common.add_argument("--E", type=float, nargs="+", action="extend", help="energies")
    common.add_argument("--state", action="append", help="bound state n=..,l=..")
    common.add_argument("--format", dest="output", choices=FORMATS)
    common.add_argument("--precision", type=int, help="significant digits (default 6)")
    common.add_argument("--tol", type=float, help="scheme residual tolerance")
    common.add_argument("--max-iter", dest="max_iter", type=int)
    common.add_argument("--jobs", type=int, help="parallel workers")
    common.add_argument("-v", "--verbose", action="store_true")

    parser = argparse.ArgumentParser(prog="regge", description=__doc__.split("\n\n")[0])
    sub = parser.add_subparsers(dest="command", required=True)
    sub.add_parser("trajectory", parents=[common], help="unrenormalized expansion")
    p_ren = sub.add_parser("renorm", parents=[common], help="renormalized schemes")
    p_ren.add_argument("--scheme", choices=SCHEMES)
    p_tab = sub.add_parser("table", parents=[common], help="Martin reference table")
    p_tab.add_argument("--rows", action="append", help="filter, e.g. n=1 or n=1,l=0")
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(
        level=logging.DEBUG if args.verbose else logging.WARNING,
        format="%(levelname)s %(name)s: %(message)s",
        stream=sys.stderr,
    )
    try:
        cfg = _run_config(args)
        violations = []
        if args.command == "trajectory":
            rows = cmd_trajectory(cfg)
        elif args.command == "renorm":
            rows = cmd_renorm(cfg)
        else:
            filters = [parse_row_filter(f) for f in (args.rows or [])]
            rows, violations = cmd_table(cfg, filters)
    except (InvalidInput, DomainError, OSError) as exc:
        print(f"regge: error: {exc}", file=sys.stderr)
        return EXIT_INVALID
    except ReggeError as exc:
        print(f"regge: numerical failure: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_NUMERIC

    sys.stdout.write(render(rows, cfg.output, cfg.precision))
    for msg in violations:
        print(f"regge: tolerance violated: {msg}", file=sys.stderr)
    return EXIT_TOLERANCE if violations else EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
