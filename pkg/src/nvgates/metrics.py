"""
Average fidelity and efficiency over the real four-angle input manifold.

Inputs are (cos a R1 + sin a L1)(cos b a1 + sin b a2)(cos c R2 + sin c L2)
(cos d b1 + sin d b2) with the four angles uniform on [0, 2pi). Averages use
the periodic trapezoid rule on an N^4 grid; every circuit is linear, so each
parameter point needs only the per-branch effective matrices (16 basis runs
per gate) and the grid is evaluated with dense matrix products.

Two branch conventions are available for fidelity:

``"joint"``
    overlap of the full recorded output (both spin outcomes, after their
    feed-forward) with the ideal recorded output. Since the corrections are
    unitary this equals the overlap of the spin-photon state just before
    readout.
``"weighted"``
    per-outcome overlap of normalized states, weighted by outcome probability.
"""

from __future__ import annotations

import csv
import io
import json
import logging
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass
from functools import lru_cache
from typing import Iterable, Sequence

import numpy as np

from .circuits import COHERENT, GateKind, effective_gate_matrix
from .emitter import ScatteringCoefficients, coefficients_at

log = logging.getLogger(__name__)

JOINT = "joint"
WEIGHTED = "weighted"
BRANCH_MODES = (JOINT, WEIGHTED)

DEFAULT_NODES = 16
MIN_NODES = 9
# survival below this is rounding residue (cos(pi/2)^2 ~ 4e-33), treated as zero
DEAD_SURVIVAL = 1e-24

CSV_FIELDS = ("gsq_over_kgamma", "ks_over_k", "f_toffoli", "f_fredkin", "eta_closed", "eta_sim")


@dataclass(frozen=True)
class QuadratureSpec:
    nodes_per_axis: int = DEFAULT_NODES
    rule: str = "periodic_trapezoid"

    def __post_init__(self):
        if self.rule != "periodic_trapezoid":
            raise ValueError(f"unsupported quadrature rule {self.rule!r}")
        if int(self.nodes_per_axis) != self.nodes_per_axis or self.nodes_per_axis < 2:
            raise ValueError("nodes_per_axis must be an integer >= 2")

    def nodes(self) -> tuple[np.ndarray, np.ndarray]:
        n = self.nodes_per_axis
        return 2 * np.pi * np.arange(n) / n, np.full(n, 2 * np.pi / n)


@lru_cache(maxsize=8)
def input_grid(nodes_per_axis: int) -> np.ndarray:
    """All N^4 product inputs as rows over the nominal basis."""
    theta, _ = QuadratureSpec(nodes_per_axis).nodes()
    q = np.stack([np.cos(theta), np.sin(theta)], axis=1)
    grid = np.einsum("ai,bj,ck,dl->abcdijkl", q, q, q, q).reshape(-1, 16)
    grid.setflags(write=False)
    return grid


def _check(quad: QuadratureSpec | None, branch_mode: str = JOINT) -> QuadratureSpec:
    quad = quad or QuadratureSpec()
    if quad.nodes_per_axis < MIN_NODES:
        raise ValueError(f"nodes_per_axis must be >= {MIN_NODES} for averaged metrics")
    if branch_mode not in BRANCH_MODES:
        raise ValueError(f"unknown branch mode {branch_mode!r}; expected one of {BRANCH_MODES}")
    return quad


def fidelity_samples(
    kind: GateKind | str,
    coeffs: ScatteringCoefficients | None,
    psi: np.ndarray,
    model: str = COHERENT,
    branch_mode: str = JOINT,
) -> tuple[np.ndarray, int]:
    """Per-input fidelity and the number of inputs with zero realistic output."""
    real = effective_gate_matrix(kind, coeffs, model).outputs(psi)
    ideal = effective_gate_matrix(kind, None).outputs(psi)
    survival = sum(np.sum(np.abs(v) ** 2, axis=-1) for v in real.values())
    alive = survival > DEAD_SURVIVAL
    f = np.zeros(psi.shape[0])
    if branch_mode == JOINT:
        ov = sum(np.sum(real[o].conj() * ideal[o], axis=-1) for o in real)
        ideal_norm = sum(np.sum(np.abs(v) ** 2, axis=-1) for v in ideal.values())
        f[alive] = np.abs(ov[alive]) ** 2 / (survival[alive] * ideal_norm[alive])
    else:
        acc = np.zeros(psi.shape[0])
        for o in real:
            ov = np.sum(real[o].conj() * ideal[o], axis=-1)
            acc += np.abs(ov) ** 2 / np.sum(np.abs(ideal[o]) ** 2, axis=-1)
        f[alive] = acc[alive] / survival[alive]
    return f, int(np.count_nonzero(~alive))


def average_fidelity(
    kind: GateKind | str,
    coeffs: ScatteringCoefficients | None = None,
    quad: QuadratureSpec | None = None,
    model: str = COHERENT,
    branch_mode: str = JOINT,
    diagnostics: dict | None = None,
) -> float:
    """Gate fidelity averaged over the four-angle input manifold."""
    quad = _check(quad, branch_mode)
    f, dead = fidelity_samples(kind, coeffs, input_grid(quad.nodes_per_axis), model, branch_mode)
    if dead:
        log.warning("%d quadrature nodes have zero realistic output; counted as fidelity 0", dead)
    if diagnostics is not None:
        diagnostics["zero_norm_nodes"] = dead
    # equal trapezoid weights (2pi/N)^4 against the 1/(2pi)^4 normalization
    return float(np.mean(f))


def average_efficiency_sim(
    kind: GateKind | str,
    coeffs: ScatteringCoefficients | None = None,
    quad: QuadratureSpec | None = None,
    model: str = COHERENT,
) -> float:
    """Mean photon survival probability, summed over both spin outcomes."""
    quad = _check(quad)
    psi = input_grid(quad.nodes_per_axis)
    probs = effective_gate_matrix(kind, coeffs, model).probabilities(psi)
    return float(np.mean(sum(probs.values())))


def closed_form_efficiency(coeffs: ScatteringCoefficients) -> float:
    r, t, r0, t0 = (abs(x) for x in coeffs)
    return (9 + 3 * (r0 - t0) ** 2 + (3 + (r - t) ** 2) * (1 - t - r0) ** 2) / 16


@dataclass(frozen=True)
class MetricsPoint:
    gsq_over_kgamma: float
    ks_over_k: float
    f_toffoli: float
    f_fredkin: float
    eta_closed: float
    eta_sim: float

    def row(self) -> list[str]:
        return [f"{getattr(self, k):.6f}" for k in CSV_FIELDS]


def evaluate_point(
    gsq_over_kgamma: float,
    ks_over_k: float,
    quad: QuadratureSpec | None = None,
    model: str = COHERENT,
    branch_mode: str = JOINT,
) -> MetricsPoint:
    """All four metrics at one resonant operating point."""
    c = coefficients_at(gsq_over_kgamma, ks_over_k)
    return MetricsPoint(
        gsq_over_kgamma=float(gsq_over_kgamma),
        ks_over_k=float(ks_over_k),
        f_toffoli=average_fidelity(GateKind.TOFFOLI, c, quad, model, branch_mode),
        f_fredkin=average_fidelity(GateKind.FREDKIN, c, quad, model, branch_mode),
        eta_closed=closed_form_efficiency(c),
        eta_sim=average_efficiency_sim(GateKind.TOFFOLI, c, quad, model),
    )


def _evaluate(args) -> MetricsPoint:
    return evaluate_point(*args)


def grid_values(lo: float, hi: float, steps: int) -> np.ndarray:
    if steps < 1:
        raise ValueError("steps must be >= 1")
    if hi < lo:
        raise ValueError(f"empty range [{lo}, {hi}]")
    return np.linspace(lo, hi, steps) if steps > 1 else np.array([float(lo)])


def sweep(
    gsq_values: Sequence[float],
    ks_values: Sequence[float],
    quad: QuadratureSpec | None = None,
    model: str = COHERENT,
    branch_mode: str = JOINT,
    workers: int = 1,
) -> list[MetricsPoint]:
    """Evaluate the (g^2/kappa gamma, kappa_s/kappa) grid, row-major in g^2/kappa gamma.

    With ``workers > 1`` points run in a process pool; results are still
    returned in grid order.
    """
    if any(v < 0 for v in gsq_values) or any(v < 0 for v in ks_values):
        raise ValueError("grid values must be non-negative")
    quad = _check(quad, branch_mode)
    jobs = [(g, k, quad, model, branch_mode) for g in gsq_values for k in ks_values]
    if workers > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            return list(pool.map(_evaluate, jobs, chunksize=max(1, len(jobs) // (4 * workers))))
    return [_evaluate(j) for j in jobs]


def points_to_csv(points: Iterable[MetricsPoint]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(CSV_FIELDS)
    for p in points:
        writer.writerow(p.row())
    return buf.getvalue()


def points_to_json(points: Iterable[MetricsPoint]) -> str:
    rows = [{k: round(v, 6) for k, v in asdict(p).items()} for p in points]
    return json.dumps(rows, indent=2)
