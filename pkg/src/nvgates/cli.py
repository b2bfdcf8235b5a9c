"""Command-line front end: ``nvgates <subcommand> ...``.

Exit codes: 0 success, 1 invalid input, 2 failed acceptance check (``verify``).
Complex amplitudes are given as ``re,im`` (a bare real ``re`` is also accepted).
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import logging
import re
import sys
from pathlib import Path

import numpy as np

from . import __version__, acceptance
from .circuits import MODELS, COHERENT, GateKind, effective_gate_matrix, oracle_matrix, run
from .emitter import coefficients_at
from .metrics import (
    BRANCH_MODES,
    DEFAULT_NODES,
    JOINT,
    QuadratureSpec,
    average_efficiency_sim,
    average_fidelity,
    closed_form_efficiency,
    grid_values,
    points_to_csv,
    points_to_json,
    sweep,
)
from .statevec import NOMINAL_BASIS, OUTCOMES, make_input_state, state_to_records

log = logging.getLogger("nvgates")

DEFAULT_STEPS = 10
_NEG_NUMBER = re.compile(r"^-[\d.]")


class CliError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise CliError(f"{self.prog}: {message}")


def parse_complex(text: str) -> complex:
    parts = text.strip().split(",")
    if len(parts) > 2 or not parts[0]:
        raise CliError(f"malformed complex literal {text.strip()!r}; expected 're,im'")
    try:
        vals = [float(p) for p in parts]
    except ValueError:
        raise CliError(f"malformed complex literal {text.strip()!r}; expected 're,im'") from None
    if not all(np.isfinite(vals)):
        raise CliError(f"non-finite complex literal {text.strip()!r}")
    return complex(vals[0], vals[1] if len(vals) == 2 else 0.0)


def _protect_negatives(argv: list[str]) -> list[str]:
    # argparse would read "-0.5,0" as an option; a leading space keeps it a value
    return [" " + a if _NEG_NUMBER.match(a) else a for a in argv]


def _nonneg(text: str) -> float:
    v = float(text.strip())
    if not np.isfinite(v) or v < 0:
        raise argparse.ArgumentTypeError(f"expected a non-negative number, got {text.strip()!r}")
    return v


def _real(text: str) -> float:
    v = float(text.strip())
    if not np.isfinite(v):
        raise argparse.ArgumentTypeError(f"expected a finite number, got {text.strip()!r}")
    return v


def _add_physics(p, required=True):
    p.add_argument("--gsq", type=_nonneg, required=required, help="cooperativity g^2/(kappa gamma)")
    p.add_argument("--ks", type=_nonneg, required=required, help="side leakage kappa_s/kappa")


def _add_metric_opts(p):
    p.add_argument("--nodes", type=int, default=DEFAULT_NODES, help="quadrature nodes per angle (>= 9)")
    p.add_argument("--model", choices=MODELS, default=COHERENT)


def _add_out(p, formats=("json", "csv")):
    p.add_argument("--format", choices=formats, default=formats[0])
    p.add_argument("--out", type=Path, help="write here instead of stdout")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="nvgates", description="NV-cavity photonic Toffoli/Fredkin gate simulator.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    parser.add_argument("--log-level", default="WARNING", choices=["DEBUG", "INFO", "WARNING", "ERROR"])
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("coeffs", help="reflection/transmission coefficients")
    _add_physics(p)
    p.add_argument("--cavity-detuning", type=_real, default=0.0, help="(omega_c - omega_p)/kappa")
    p.add_argument("--dipole-detuning", type=_real, default=0.0, help="(omega_0 - omega_p)/kappa")
    p.add_argument("--gamma-over-kappa", type=_nonneg, default=1.0)
    _add_out(p)

    p = sub.add_parser("run", help="run one input through a gate")
    p.add_argument("--gate", choices=[k.value for k in GateKind], required=True)
    p.add_argument(
        "--input",
        nargs=8,
        required=True,
        metavar="C",
        help="a1 a2 b1 b2 g1 g2 d1 d2 as re,im",
    )
    p.add_argument("--ideal", action="store_true", help="ideal emitter (default when no --gsq/--ks)")
    _add_physics(p, required=False)
    p.add_argument("--model", choices=MODELS, default=COHERENT)
    p.add_argument("--trace", action="store_true", help="emit every checkpoint, not just the output")
    p.add_argument("--out", type=Path)

    p = sub.add_parser("truth-table", help="print the target 16x16 gate matrix")
    p.add_argument("--gate", choices=[k.value for k in GateKind], required=True)
    p.add_argument("--check", action="store_true", help="also compare against the simulated ideal circuit")
    p.add_argument("--out", type=Path)

    p = sub.add_parser("fidelity", help="average gate fidelity")
    p.add_argument("--gate", choices=[k.value for k in GateKind] + ["both"], default="both")
    _add_physics(p)
    _add_metric_opts(p)
    p.add_argument("--branch-mode", choices=BRANCH_MODES, default=JOINT)
    _add_out(p)

    p = sub.add_parser("efficiency", help="average efficiency (closed form and simulated)")
    _add_physics(p)
    _add_metric_opts(p)
    _add_out(p)

    p = sub.add_parser("sweep", help="metrics over a (g^2/kappa gamma, kappa_s/kappa) grid")
    p.add_argument("--gsq-min", type=_nonneg, default=0.5)
    p.add_argument("--gsq-max", type=_nonneg, default=5.0)
    p.add_argument("--ks-min", type=_nonneg, default=0.0)
    p.add_argument("--ks-max", type=_nonneg, default=1.0)
    p.add_argument("--steps", type=int, action="append", help="given once: both axes; twice: gsq then ks")
    p.add_argument("--gsq-steps", type=int)
    p.add_argument("--ks-steps", type=int)
    _add_metric_opts(p)
    p.add_argument("--branch-mode", choices=BRANCH_MODES, default=JOINT)
    p.add_argument("--workers", type=int, default=1)
    _add_out(p, formats=("csv", "json"))

    p = sub.add_parser("verify", help="run the acceptance checks")
    p.add_argument("--only", type=int, nargs="+", metavar="N", help="criterion numbers to run")
    p.add_argument("--seed", type=int, default=acceptance.SEED, help="seed for random-state checks")
    return parser


def _emit(text: str, out: Path | None) -> None:
    if not text.endswith("\n"):
        text += "\n"
    if out is None:
        sys.stdout.write(text)
    else:
        out.write_text(text)


def _cnum(z: complex) -> dict:
    return {"re": float(z.real), "im": float(z.imag)}


def cmd_coeffs(args) -> str:
    c = coefficients_at(
        args.gsq,
        args.ks,
        cavity_detuning=args.cavity_detuning,
        dipole_detuning=args.dipole_detuning,
        gamma_over_kappa=args.gamma_over_kappa,
    )
    if args.format == "json":
        return json.dumps({k: {**_cnum(v), "abs": abs(v)} for k, v in c._asdict().items()}, indent=2)
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["name", "re", "im", "abs"])
    for k, v in c._asdict().items():
        w.writerow([k, f"{v.real:.12g}", f"{v.imag:.12g}", f"{abs(v):.12g}"])
    return buf.getvalue()


def _physical(args):
    given = args.gsq is not None or args.ks is not None
    if args.ideal and given:
        raise CliError("--ideal cannot be combined with --gsq/--ks")
    if given and (args.gsq is None or args.ks is None):
        raise CliError("--gsq and --ks must be given together")
    return coefficients_at(args.gsq, args.ks) if given else None


def cmd_run(args) -> str:
    coeffs = _physical(args)
    amps = [parse_complex(a) for a in args.input]
    try:
        state = make_input_state(*amps)
    except ValueError as exc:
        raise CliError(str(exc)) from None
    final, trace = run(args.gate, state, coeffs, args.model)
    if args.trace:
        return json.dumps(trace.to_records() + [{"tag": "final", "state": state_to_records(final), "norm_sq": final.norm_sq()}], indent=1)
    ideal, _ = run(args.gate, state)
    payload = {
        "gate": args.gate,
        "ideal": coeffs is None,
        "survival": final.norm_sq(),
        "branches": {o: final.restrict(spin=o).norm_sq() for o in OUTCOMES},
        "fidelity": _fidelity(final, ideal),
        "state": state_to_records(final),
    }
    return json.dumps(payload, indent=1)


def _fidelity(real, ideal) -> float:
    from .statevec import inner_product

    n = real.norm_sq()
    return 0.0 if n == 0 else abs(inner_product(real, ideal)) ** 2 / (n * ideal.norm_sq())


def _label(cfg) -> str:
    p1, q1, p2, q2 = cfg
    return f"{p1}{q1}{p2}{q2}"


def cmd_truth_table(args) -> tuple[str, int]:
    m = oracle_matrix(args.gate).real.astype(int)
    width = max(len(_label(c)) for c in NOMINAL_BASIS)
    lines = [" " * width + " " + " ".join(f"{_label(c):>{width}}" for c in NOMINAL_BASIS)]
    for cfg, row in zip(NOMINAL_BASIS, m):
        lines.append(f"{_label(cfg):>{width}} " + " ".join(f"{v:>{width}d}" for v in row))
    code = 0
    if args.check:
        oracle = oracle_matrix(args.gate)
        gate = effective_gate_matrix(args.gate)
        worst = 0.0
        for o, mat in gate.branches.items():
            # each branch is +-oracle/sqrt2 up to its fixed sign
            phase = np.vdot(oracle, mat) / abs(np.vdot(oracle, mat))
            worst = max(worst, float(np.abs(mat * np.sqrt(2) / phase - oracle).max()))
        ok = worst < 1e-10
        lines.append(f"simulated ideal circuit vs target: max deviation {worst:.2e} ({'ok' if ok else 'MISMATCH'})")
        code = 0 if ok else 2
    return "\n".join(lines), code


def _quad(args) -> QuadratureSpec:
    return QuadratureSpec(args.nodes)


def cmd_fidelity(args) -> str:
    c = coefficients_at(args.gsq, args.ks)
    kinds = list(GateKind) if args.gate == "both" else [GateKind(args.gate)]
    vals = {f"f_{k.value}": average_fidelity(k, c, _quad(args), args.model, args.branch_mode) for k in kinds}
    return _record({"gsq_over_kgamma": args.gsq, "ks_over_k": args.ks, **vals}, args.format)


def cmd_efficiency(args) -> str:
    c = coefficients_at(args.gsq, args.ks)
    vals = {
        "eta_closed": closed_form_efficiency(c),
        "eta_sim": average_efficiency_sim(GateKind.TOFFOLI, c, _quad(args), args.model),
    }
    return _record({"gsq_over_kgamma": args.gsq, "ks_over_k": args.ks, **vals}, args.format)


def _record(row: dict, fmt: str) -> str:
    if fmt == "json":
        return json.dumps({k: round(v, 6) for k, v in row.items()}, indent=2)
    return ",".join(row) + "\n" + ",".join(f"{v:.6f}" for v in row.values())


def _sweep_steps(args) -> tuple[int, int]:
    steps = args.steps or []
    if len(steps) > 2:
        raise CliError("--steps may be given at most twice (gsq, then ks)")
    gsq_steps = args.gsq_steps or (steps[0] if steps else DEFAULT_STEPS)
    ks_steps = args.ks_steps or (steps[-1] if steps else DEFAULT_STEPS)
    for name, n in (("gsq", gsq_steps), ("ks", ks_steps)):
        if n < 1:
            raise CliError(f"{name} steps must be >= 1")
    return gsq_steps, ks_steps


def cmd_sweep(args) -> str:
    gsq_steps, ks_steps = _sweep_steps(args)
    if args.workers < 1:
        raise CliError("--workers must be >= 1")
    gsq = grid_values(args.gsq_min, args.gsq_max, gsq_steps)
    ks = grid_values(args.ks_min, args.ks_max, ks_steps)
    points = sweep(gsq, ks, _quad(args), args.model, args.branch_mode, args.workers)
    return points_to_csv(points) if args.format == "csv" else points_to_json(points)


def cmd_verify(args) -> tuple[str, int]:
    acceptance.SEED = args.seed
    checks = acceptance.CRITERIA
    if args.only:
        unknown = set(args.only) - {c.number for c in checks}
        if unknown:
            raise CliError(f"unknown criterion numbers {sorted(unknown)}")
        checks = [c for c in checks if c.number in args.only]
    results = []
    for check in checks:
        res = check()
        results.append(res)
        print(res.line(), file=sys.stderr, flush=True)
    lines = [f"{'#':>2}  {'result':6}  {'seconds':>7}  criterion"]
    lines += [f"{r.number:>2}  {'PASS' if r.passed else 'FAIL':6}  {r.seconds:7.2f}  {r.name}" for r in results]
    failed = [r.number for r in results if not r.passed]
    lines.append(f"{len(results) - len(failed)}/{len(results)} passed" + (f"; failed: {failed}" if failed else ""))
    return "\n".join(lines), 2 if failed else 0


COMMANDS = {
    "coeffs": cmd_coeffs,
    "run": cmd_run,
    "truth-table": cmd_truth_table,
    "fidelity": cmd_fidelity,
    "efficiency": cmd_efficiency,
    "sweep": cmd_sweep,
    "verify": cmd_verify,
}


def main(argv: list[str] | None = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    try:
        args = parser.parse_args(_protect_negatives(argv))
        logging.basicConfig(level=args.log_level, format="%(levelname)s %(name)s: %(message)s")
        result = COMMANDS[args.command](args)
        text, code = result if isinstance(result, tuple) else (result, 0)
        _emit(text, getattr(args, "out", None))
        return code
    except (CliError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
