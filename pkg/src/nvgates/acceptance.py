"""
Acceptance checks, runnable from the CLI (``nvgates verify``) and pytest.

Every check returns a :class:`CriterionResult`; tolerances and runtime
budgets are fixed here.
"""

from __future__ import annotations

import time
from dataclasses import dataclass
from typing import Callable

import numpy as np

from . import reference as ref
from .circuits import (
    HERALDED,
    MEASURE_FEED_FORWARD,
    GateKind,
    apply_step,
    build_circuit,
    effective_gate_matrix,
    oracle_matrix,
    run,
)
from .emitter import coefficients_at, ideal_scattering_matrix, realistic_scatter
from .metrics import (
    WEIGHTED,
    QuadratureSpec,
    average_efficiency_sim,
    average_fidelity,
    closed_form_efficiency,
    input_grid,
)
from .statevec import (
    HE,
    HP,
    MINUS,
    NOMINAL_BASIS,
    OUTCOMES,
    PLUS,
    RY_MINUS,
    RY_PLUS,
    SIGMA_Z,
    SPINS,
    L,
    QuantumState,
    R,
    BasisConfig,
    basis_state,
    from_nominal_vector,
    input_from_angles,
    make_input_state,
    measure_spin_x,
    nominal_vector,
    norm_sq,
    overlap,
)

SEED = 20240917

# (ks/k, g^2/k gamma) -> quoted (F_T, F_F, eta)
QUOTED = {
    (0.1, 2.4): (0.980436, 0.979516, 0.847014),
    (1.0, 2.4): (0.884273, 0.868208, 0.63922),
}


@dataclass
class CriterionResult:
    number: int
    name: str
    passed: bool
    detail: str
    seconds: float = 0.0

    def line(self) -> str:
        mark = "PASS" if self.passed else "FAIL"
        return f"[{mark}] {self.number}. {self.name} ({self.seconds:.2f}s): {self.detail}"


def _timed(number: int, name: str, budget: float | None = None):
    def wrap(fn: Callable[[], tuple[bool, str]]):
        def check() -> CriterionResult:
            t0 = time.perf_counter()
            ok, detail = fn()
            dt = time.perf_counter() - t0
            if budget is not None and dt >= budget:
                ok = False
                detail += f"; runtime {dt:.2f}s exceeds {budget:g}s"
            return CriterionResult(number, name, ok, detail, dt)

        check.number = number
        check.criterion_name = name
        return check

    return wrap


def _random_pair(rng):
    v = rng.normal(size=2) + 1j * rng.normal(size=2)
    return v / np.linalg.norm(v)


def random_coefficients(rng) -> list[complex]:
    return [x for _ in range(4) for x in _random_pair(rng)]


@_timed(1, "ideal gates match oracle on basis + 100 random inputs", budget=1.0)
def criterion_1():
    rng = np.random.default_rng(SEED)
    worst = 1.0
    for kind in GateKind:
        oracle = oracle_matrix(kind)
        inputs = [np.eye(16)[j] for j in range(16)]
        for _ in range(100):
            c = random_coefficients(rng)
            vec = np.array([make_input_state(*c)[(*cfg, MINUS)] for cfg in NOMINAL_BASIS])
            inputs.append(vec)
        for vec in inputs:
            final, _ = run(kind, from_nominal_vector(vec))
            want = from_nominal_vector(oracle @ vec)
            for o in OUTCOMES:
                branch = final.restrict(spin=o)
                worst = min(worst, overlap(branch, _relabel(want, o)))
    return worst >= 1 - 1e-10, f"min overlap {worst:.15f}"


def _relabel(state: QuantumState, spin: str) -> QuantumState:
    return QuantumState({cfg._replace(spin=spin): a for cfg, a in state.items()})


@_timed(2, "traced checkpoints equal closed forms (50 angle tuples)", budget=1.0)
def criterion_2():
    rng = np.random.default_rng(SEED + 1)
    worst = 0.0
    for angles in rng.uniform(0, 2 * np.pi, size=(50, 4)):
        c = [f(x) for x in angles for f in (np.cos, np.sin)]
        state = input_from_angles(*angles)
        for kind, checkpoints, final_fn in (
            (GateKind.TOFFOLI, ref.TOFFOLI_CHECKPOINTS, ref.toffoli_psi3),
            (GateKind.FREDKIN, ref.FREDKIN_CHECKPOINTS, ref.fredkin_phi6),
        ):
            final, trace = run(kind, state)
            for tag, fn in checkpoints.items():
                worst = max(worst, 1 - overlap(trace[tag], fn(*c)))
            for o in OUTCOMES:
                branch = final.restrict(spin=o)
                worst = max(worst, 1 - overlap(branch, final_fn(*c, o)))
    return worst <= 1e-10, f"max (1 - overlap) {worst:.3e}"


@_timed(3, "closed-form efficiency matches quoted values (tol 1e-5)")
def criterion_3():
    parts, ok = [], True
    for (ks, gsq), (_, _, eta) in QUOTED.items():
        val = closed_form_efficiency(coefficients_at(gsq, ks))
        ok &= abs(val - eta) <= 1e-5
        parts.append(f"ks/k={ks}: {val:.7f} vs {eta}")
    return ok, "; ".join(parts)


@_timed(4, "average fidelities match quoted values (tol 5e-3)", budget=20.0)
def criterion_4():
    parts, ok = [], True
    for (ks, gsq), (ft, ff, _) in QUOTED.items():
        t0 = time.perf_counter()
        c = coefficients_at(gsq, ks)
        got_t = average_fidelity(GateKind.TOFFOLI, c)
        got_f = average_fidelity(GateKind.FREDKIN, c)
        dt = time.perf_counter() - t0
        ok &= abs(got_t - ft) <= 5e-3 and abs(got_f - ff) <= 5e-3 and dt < 10
        parts.append(f"ks/k={ks}: F_T={got_t:.6f} (quoted {ft}), F_F={got_f:.6f} (quoted {ff}), {dt:.2f}s")
    return ok, "; ".join(parts)


def alternative_models() -> list[str]:
    """Fidelities at the quoted points under the non-default conventions (informational)."""
    lines = []
    for (ks, gsq), (ft, ff, _) in QUOTED.items():
        c = coefficients_at(gsq, ks)
        for label, kw in (("heralded/joint", {"model": HERALDED}), ("coherent/weighted", {"branch_mode": WEIGHTED})):
            got = [average_fidelity(k, c, **kw) for k in GateKind]
            lines.append(
                f"ks/k={ks} {label}: F_T={got[0]:.6f} ({got[0] - ft:+.4f}), F_F={got[1]:.6f} ({got[1] - ff:+.4f})"
            )
    return lines


GRID_GSQ = np.linspace(0.5, 5.0, 10)
GRID_KS = np.linspace(0.0, 1.0, 10)


@_timed(5, "simulated vs closed-form efficiency on 10x10 grid (tol 5e-3)", budget=120.0)
def criterion_5():
    bad = []
    worst = 0.0
    for gsq in GRID_GSQ:
        for ks in GRID_KS:
            c = coefficients_at(gsq, ks)
            d = average_efficiency_sim(GateKind.TOFFOLI, c) - closed_form_efficiency(c)
            worst = max(worst, abs(d))
            if abs(d) > 5e-3:
                bad.append(f"(g2/kg={gsq:.2f}, ks/k={ks:.3f}): {d:+.5f}")
    detail = f"{len(bad)}/100 points beyond tolerance, max |diff| {worst:.5f}"
    if bad:
        alt = max(
            abs(average_efficiency_sim(GateKind.TOFFOLI, c, model=HERALDED) - closed_form_efficiency(c))
            for c in (coefficients_at(g, k) for g in GRID_GSQ for k in GRID_KS)
        )
        detail += f"; heralded model max |diff| {alt:.1e}; " + ", ".join(bad)
    return not bad, detail


@_timed(6, "9- vs 17-node quadrature agree to 1e-10")
def criterion_6():
    worst = {"F": 0.0, "eta": 0.0}
    q9, q17 = QuadratureSpec(9), QuadratureSpec(17)
    for ks, gsq in QUOTED:
        c = coefficients_at(gsq, ks)
        for kind in GateKind:
            worst["F"] = max(worst["F"], abs(average_fidelity(kind, c, q9) - average_fidelity(kind, c, q17)))
            worst["eta"] = max(
                worst["eta"], abs(average_efficiency_sim(kind, c, q9) - average_efficiency_sim(kind, c, q17))
            )
    ok = max(worst.values()) <= 1e-10
    detail = f"max |F9 - F17| {worst['F']:.3e}, max |eta9 - eta17| {worst['eta']:.3e}"
    if not ok:
        # survival is a trig polynomial, fidelity divides by it
        detail += "; eta exact, F integrand is a ratio of trig polynomials"
    return ok, detail


@_timed(7, "metrics nondecreasing in g^2/k gamma at ks/k = 0.1")
def criterion_7():
    gsqs = np.arange(1, 11) * 0.5
    rows = []
    for gsq in gsqs:
        c = coefficients_at(gsq, 0.1)
        rows.append(
            (
                average_fidelity(GateKind.TOFFOLI, c),
                average_fidelity(GateKind.FREDKIN, c),
                closed_form_efficiency(c),
                average_efficiency_sim(GateKind.TOFFOLI, c),
            )
        )
    steps = np.diff(np.array(rows), axis=0)
    ok = bool(np.all(steps >= 0))
    return ok, f"min step {steps.min():.3e}"


@_timed(8, "near-ideal limit (ks = 0, g^2/k gamma = 1e4)")
def criterion_8():
    c = coefficients_at(1e4, 0.0)
    vals = {
        "F_T": average_fidelity(GateKind.TOFFOLI, c),
        "F_F": average_fidelity(GateKind.FREDKIN, c),
        "eta_closed": closed_form_efficiency(c),
        "eta_sim": average_efficiency_sim(GateKind.TOFFOLI, c),
    }
    return all(v >= 0.999 for v in vals.values()), ", ".join(f"{k}={v:.6f}" for k, v in vals.items())


@_timed(9, "structural invariants")
def criterion_9():
    problems = []
    eye2 = np.eye(2)
    for name, m in (("Ry(+pi/2)", RY_PLUS), ("Ry(-pi/2)", RY_MINUS), ("Hp", HP), ("He", HE), ("sigma_z", SIGMA_Z)):
        if np.abs(m.conj().T @ m - eye2).max() > 1e-12:
            problems.append(f"{name} not unitary")
    s = ideal_scattering_matrix()
    if np.abs(s.conj().T @ s - np.eye(8)).max() > 1e-12:
        problems.append("ideal scattering not unitary")

    rng = np.random.default_rng(SEED + 9)
    port_map = {"in_a": "a", "in_c": "c"}
    outputs = {(p, q): f"out_{q}" for p in (R, L) for q in ("b", "d")}
    for gsq, ks in ((0.5, 0.0), (2.4, 0.1), (2.4, 1.0), (5.0, 0.7)):
        c = coefficients_at(gsq, ks)
        for _ in range(20):
            amps = rng.normal(size=8) + 1j * rng.normal(size=8)
            amps /= np.linalg.norm(amps)
            keys = [BasisConfig(p, q, R, "b1", s) for p in (R, L) for q in port_map for s in (PLUS, MINUS)]
            st = QuantumState(dict(zip(keys, amps)))
            out = realistic_scatter(st, 1, port_map, c, outputs)
            if norm_sq(out) > norm_sq(st) + 1e-12:
                problems.append(f"norm increase at ({gsq}, {ks})")

    for _ in range(20):
        st = make_input_state(*random_coefficients(rng))
        st = QuantumState({cfg._replace(spin=PLUS if rng.random() < 0.5 else MINUS): a for cfg, a in st.items()})
        total = sum(b.probability for b in measure_spin_x(st * (1 / np.sqrt(norm_sq(st)))))
        if abs(total - 1) > 1e-12:
            problems.append(f"branch probabilities sum to {total}")

    psi = input_grid(16)
    worst_eta = 0.0
    worst_branch = 0.0
    for gsq in GRID_GSQ:
        for ks in GRID_KS:
            c = coefficients_at(gsq, ks)
            etas = [average_efficiency_sim(k, c) for k in GateKind]
            worst_eta = max(worst_eta, abs(etas[0] - etas[1]))
    for ks, gsq in QUOTED:
        c = coefficients_at(gsq, ks)
        for kind in GateKind:
            gate = effective_gate_matrix(kind, c)
            probs = sum(gate.probabilities(psi).values())
            # survival before readout, from runs that stop short of the measurement
            pre = _pre_measurement_survival(kind, c, psi)
            worst_branch = max(worst_branch, float(np.abs(probs - pre).max()))
    if worst_eta > 1e-12:
        problems.append(f"eta_T != eta_F (max diff {worst_eta:.2e})")
    if worst_branch > 1e-12:
        problems.append(f"branch probabilities miss survival by {worst_branch:.2e}")
    detail = "; ".join(problems) or (
        f"all hold (max |eta_T - eta_F| {worst_eta:.1e}, max branch-sum error {worst_branch:.1e})"
    )
    return not problems, detail


def _pre_measurement_survival(kind, coeffs, psi):
    cols = {s: np.zeros((16, 16), dtype=complex) for s in SPINS}
    steps = [st for st in build_circuit(kind) if st.kind != MEASURE_FEED_FORWARD]
    for j, cfg in enumerate(NOMINAL_BASIS):
        state = basis_state(*cfg, MINUS)
        for st in steps:
            state = apply_step(state, st, coeffs)
        for s in SPINS:
            cols[s][:, j] = nominal_vector(state, s)
    return sum(np.sum(np.abs(psi @ m.T) ** 2, axis=-1) for m in cols.values())


CRITERIA = [
    criterion_1,
    criterion_2,
    criterion_3,
    criterion_4,
    criterion_5,
    criterion_6,
    criterion_7,
    criterion_8,
    criterion_9,
]


def run_all(echo: Callable[[str], None] | None = print) -> list[CriterionResult]:
    results = []
    for check in CRITERIA:
        res = check()
        results.append(res)
        if echo:
            echo(res.line())
    return results
