"""
Command-line interface::

    qtc-rotor simulate --config fluoromethane_000 [--config ...] [--jmax N] [--steps N]
                       [--initial J,K,M] [--out DIR] [--no-plots]
    qtc-rotor matrix-elements --jmax N --axis {X,Y,Z} [--j-range A:B] [--k-range A:B]
                       [--m-range A:B] [--delta-m D]
    qtc-rotor validate [--jmax N]

Exit codes: 0 success, 1 failed validation, 2 configuration / argument
error, 3 simulation aborted (partial record and summary still written).
"""

from __future__ import annotations

import argparse
import logging
import os
import sys
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path

from .angular import AXES, enumerate_basis, position_matrix
from .config import ConfigError, RunConfig, load_config, parse_state, resolve_config
from .errors import DomainError
from .records import write_record
from .simulator import SimulationAborted, run


EXIT_OK, EXIT_FAILED, EXIT_CONFIG, EXIT_ABORTED = 0, 1, 2, 3


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise SystemExit(EXIT_CONFIG)


def _range(text: str) -> tuple[int, int]:
    try:
        lo, _, hi = text.partition(":")
        lo, hi = int(lo), int(hi if hi else lo)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected A:B, got {text!r}") from None
    if lo > hi:
        raise argparse.ArgumentTypeError(f"empty range {text!r}")
    return lo, hi


def _state(text: str):
    try:
        return parse_state(text)
    except ConfigError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="qtc-rotor", description="Quantum tracking control of rotor orientation.")
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    s = sub.add_parser("simulate", help="run tracking-control simulations")
    s.add_argument("--config", action="append", default=None,
                   help="config file or bundled config name (repeatable)")
    s.add_argument("--jmax", type=int)
    s.add_argument("--steps", type=int)
    s.add_argument("--initial", type=_state, help="initial state J,K,M (or J,M for a linear rotor)")
    s.add_argument("--out", type=Path)
    s.add_argument("--no-plots", action="store_true")

    m = sub.add_parser("matrix-elements", help="dump position-operator matrix elements")
    m.add_argument("--jmax", type=int, required=True)
    m.add_argument("--axis", type=str.upper, choices=AXES, required=True)
    m.add_argument("--j-range", type=_range)
    m.add_argument("--k-range", type=_range)
    m.add_argument("--m-range", type=_range)
    m.add_argument("--delta-m", type=int, help="keep only elements with M' - M = D")

    v = sub.add_parser("validate", help="run the fast invariant checks")
    v.add_argument("--jmax", type=int, default=6)
    return p


# ---------------------------------------------------------------------------
# simulate


def simulate_one(cfg: RunConfig) -> tuple[str, int, str]:
    """Run one config and write its outputs; returns ``(name, exit code, message)``."""
    out = cfg.out_dir
    csv_path = out / f"{cfg.name}.csv"
    summary_path = out / f"{cfg.name}.summary.txt"
    try:
        record = run(cfg.simulation)
        code, msg = EXIT_OK, "ok"
    except SimulationAborted as exc:
        record = exc.record
        code, msg = EXIT_ABORTED, f"aborted: {exc.record.summary.get('failure')}"
    u = cfg.units
    record.summary.update(
        name=cfg.name, molecule=cfg.molecule, B_cm=u.B_cm, mu_debye=u.mu_debye,
        C_cm=u.energy_from_internal(cfg.simulation.rotor.C),
        time_unit_s=u.time_s, field_unit_V_per_m=u.field_V_per_m,
    )
    write_record(record, csv_path, summary_path)
    if cfg.plots and record.data.shape[0]:
        from .plotting import plot_fields, plot_orientation

        label = "|{}{}{}>".format(*cfg.simulation.initial_state)
        plot_orientation([record], [label], out / f"{cfg.name}_orientation.{cfg.plot_format}", cfg.plot_format)
        plot_fields([record], [label], out / f"{cfg.name}_fields.{cfg.plot_format}", cfg.plot_format)
    return cfg.name, code, msg


def _workers(n: int) -> int:
    cap = os.environ.get("QTC_ROTOR_THREADS")
    limit = os.cpu_count() or 1
    if cap:
        try:
            limit = max(1, int(cap))
        except ValueError:
            pass
    return max(1, min(n, limit))


def cmd_simulate(args) -> int:
    names = args.config or ["fluoromethane_000"]
    configs = []
    try:
        for name in names:
            configs.append(load_config(
                resolve_config(name), jmax=args.jmax, steps=args.steps, initial=args.initial,
                out_dir=args.out, plots=False if args.no_plots else None,
            ))
    except (ConfigError, DomainError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG

    workers = _workers(len(configs))
    if workers == 1:
        results = [simulate_one(c) for c in configs]
    else:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(simulate_one, configs))
    code = EXIT_OK
    for name, rc, msg in results:
        print(f"{name}: {msg}")
        code = max(code, rc)
    return code


# ---------------------------------------------------------------------------
# matrix-elements


def _inside(value, rng):
    return rng is None or rng[0] <= value <= rng[1]


def matrix_element_lines(jmax, axis, j_range=None, k_range=None, m_range=None, delta_m=None):
    mat = position_matrix(axis, enumerate_basis(jmax))
    for J, K, M, Jp, Kp, Mp, re, im in mat.dump_rows():
        if not all(_inside(a, r) for a, r in ((J, j_range), (Jp, j_range), (K, k_range),
                                               (Kp, k_range), (M, m_range), (Mp, m_range))):
            continue
        if delta_m is not None and Mp - M != delta_m:
            continue
        yield f"{J} {K} {M} {Jp} {Kp} {Mp} {re:.16g} {im:.16g}"


def cmd_matrix_elements(args) -> int:
    if args.jmax < 0:
        print("error: --jmax must be nonnegative", file=sys.stderr)
        return EXIT_CONFIG
    for line in matrix_element_lines(args.jmax, args.axis, args.j_range, args.k_range,
                                     args.m_range, args.delta_m):
        print(line)
    return EXIT_OK


# ---------------------------------------------------------------------------
# validate


def cmd_validate(args) -> int:
    from .validation import run_checks

    if args.jmax < 2:
        print("error: --jmax must be >= 2", file=sys.stderr)
        return EXIT_CONFIG
    results = run_checks(args.jmax)
    for r in results:
        print(f"{'PASS' if r.passed else 'FAIL'}  {r.name}: {r.detail}")
    return EXIT_OK if all(r.passed for r in results) else EXIT_FAILED


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    handler = {"simulate": cmd_simulate, "matrix-elements": cmd_matrix_elements,
               "validate": cmd_validate}[args.command]
    return handler(args)


if __name__ == "__main__":
    sys.exit(main())
