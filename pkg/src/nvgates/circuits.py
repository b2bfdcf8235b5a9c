"""
Two-photon four-qubit Toffoli (CCCPF) and Fredkin circuits.

Circuits are flat lists of :class:`CircuitStep`. Each NV block traversal is
spelled out as CPBS3 -> [P_pi1] -> NV -> [P_pi2] -> CPBS4, so the polarizing
routing that binds block ports to paths is explicit:

* CPBS3 sends R to cavity port a and L to port c;
* CPBS4 recombines R leaving port b with L leaving port d;
* L at b or R at d would leave CPBS4 through its unused face (loss label).

Photon 1 is split at CPBS1 (R bypasses, L visits the block) and recombined
at CPBS2. The spin is read out in the X basis at the end and the feed-forward
correction for each outcome is applied to that branch.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Iterator, NamedTuple

import numpy as np

from . import emitter
from .emitter import IDEAL, PORT_A, PORT_B, PORT_C, PORT_D, ScatteringCoefficients
from .statevec import (
    HP,
    MINUS,
    MINUS_X,
    NOMINAL_BASIS,
    OUTCOMES,
    PLUS_X,
    RY_MINUS,
    RY_PLUS,
    SIGMA_Z,
    L,
    QuantumState,
    R,
    apply_cpbs,
    apply_path_phase,
    apply_pol_gate,
    apply_spin_hadamard,
    basis_state,
    measure_spin_x,
    nominal_vector,
    state_to_records,
)


class GateKind(str, enum.Enum):
    TOFFOLI = "toffoli"
    FREDKIN = "fredkin"


COHERENT = "coherent"
HERALDED = "heralded"
MODELS = (COHERENT, HERALDED)

# step kinds
CPBS = "CPBS"
POL_GATE = "PolGate"
SPIN_HADAMARD = "SpinHadamard"
PATH_PHASE = "PathPhase"
EMITTER_BLOCK = "EmitterBlock"
SPIN_HERALD = "SpinHerald"
MEASURE_FEED_FORWARD = "MeasureFeedForward"

# internal arms and block port paths
ARM_BYPASS, ARM_BLOCK = "a2_r", "a2_l"
BLK_A, BLK_B, BLK_C, BLK_D = "blk_a", "blk_b", "blk_c", "blk_d"


def loss_label(kind: str, photon: int) -> str:
    return f"loss_{kind}_p{photon}"


@dataclass(frozen=True)
class CircuitStep:
    kind: str
    label: str
    payload: dict = field(default_factory=dict, compare=False)
    tag: str | None = None


class CircuitTrace:
    """Ordered (tag, state) checkpoints of one run."""

    def __init__(self):
        self._items: list[tuple[str, QuantumState]] = []

    def record(self, tag: str, state: QuantumState) -> None:
        if tag in self.tags():
            raise ValueError(f"duplicate checkpoint tag {tag!r}")
        self._items.append((tag, state))

    def tags(self) -> list[str]:
        return [t for t, _ in self._items]

    def __getitem__(self, tag: str) -> QuantumState:
        for t, s in self._items:
            if t == tag:
                return s
        raise KeyError(tag)

    def __iter__(self) -> Iterator[tuple[str, QuantumState]]:
        return iter(self._items)

    def __len__(self) -> int:
        return len(self._items)

    def to_records(self) -> list[dict]:
        return [
            {"tag": t, "state": state_to_records(s), "norm_sq": s.norm_sq()}
            for t, s in self._items
        ]


def _block(photon: int, arm: str, phase_shifters: bool, label: str, tag: str | None = None) -> list[CircuitStep]:
    loss = loss_label("block", photon)
    steps = [
        CircuitStep(CPBS, f"CPBS3[{label}]", {"photon": photon, "route": {(R, arm): BLK_A, (L, arm): BLK_C}})
    ]
    if phase_shifters:
        steps.append(CircuitStep(PATH_PHASE, f"Ppi1[{label}]", {"photon": photon, "path": BLK_A, "phase": -1}))
    steps.append(
        CircuitStep(
            EMITTER_BLOCK,
            f"NV[{label}]",
            {
                "photon": photon,
                "port_map": {BLK_A: PORT_A, BLK_C: PORT_C},
                "outputs": {(R, PORT_B): BLK_B, (L, PORT_D): BLK_D},
                "loss_policy": {(L, PORT_B): loss, (R, PORT_D): loss},
            },
        )
    )
    if phase_shifters:
        steps.append(CircuitStep(PATH_PHASE, f"Ppi2[{label}]", {"photon": photon, "path": BLK_D, "phase": -1}))
    steps.append(
        CircuitStep(
            CPBS, f"CPBS4[{label}]", {"photon": photon, "route": {(R, BLK_B): arm, (L, BLK_D): arm}}, tag=tag
        )
    )
    return steps


def _control_pass(pre, post, phase_shifters: bool, model: str, tag: str) -> list[CircuitStep]:
    """Photon 1: CPBS1 split, L arm through the block between two local gates, CPBS2."""
    loss = loss_label("cpbs", 1)
    steps = [
        CircuitStep(CPBS, "CPBS1", {"photon": 1, "route": {(R, "a2"): ARM_BYPASS, (L, "a2"): ARM_BLOCK}}),
        CircuitStep(POL_GATE, pre[0], {"photon": 1, "paths": (ARM_BLOCK,), "matrix": pre[1]}),
        CircuitStep(SPIN_HADAMARD, "He"),
        *_block(1, ARM_BLOCK, phase_shifters, "photon 1"),
        CircuitStep(POL_GATE, post[0], {"photon": 1, "paths": (ARM_BLOCK,), "matrix": post[1]}),
        CircuitStep(SPIN_HADAMARD, "He"),
    ]
    if model == HERALDED:
        # the block arm should now carry |+>; its |-> remainder is discarded
        steps.append(
            CircuitStep(
                SPIN_HERALD,
                "herald",
                {"photon": 1, "path": ARM_BLOCK, "spin": MINUS, "loss": loss_label("herald", 1)},
            )
        )
    steps.append(
        CircuitStep(
            CPBS,
            "CPBS2",
            {
                "photon": 1,
                "route": {
                    (R, ARM_BYPASS): "a2",
                    (L, ARM_BLOCK): "a2",
                    (L, ARM_BYPASS): loss,
                    (R, ARM_BLOCK): loss,
                },
            },
            tag=tag,
        )
    )
    return steps


def build_circuit(kind: GateKind | str, model: str = COHERENT) -> list[CircuitStep]:
    kind = GateKind(kind)
    if model not in MODELS:
        raise ValueError(f"unknown loss model {model!r}; expected one of {MODELS}")
    if kind is GateKind.TOFFOLI:
        steps = _control_pass(("Ry(-pi/2)", RY_MINUS), ("Ry(+pi/2)", RY_PLUS), False, model, "psi1")
        steps += [
            CircuitStep(POL_GATE, "Ry(-pi/2)", {"photon": 2, "paths": ("b2",), "matrix": RY_MINUS}),
            *_block(2, "b2", False, "photon 2"),
            CircuitStep(POL_GATE, "Ry(+pi/2)", {"photon": 2, "paths": ("b2",), "matrix": RY_PLUS}, tag="psi2"),
        ]
        pi_b2 = CircuitStep(PATH_PHASE, "P(pi) b2", {"photon": 2, "path": "b2", "phase": -1})
        sz_a2 = CircuitStep(POL_GATE, "sigma_z a2", {"photon": 1, "paths": ("a2",), "matrix": SIGMA_Z})
        ff = {PLUS_X: [pi_b2], MINUS_X: [pi_b2, sz_a2]}
        steps.append(CircuitStep(MEASURE_FEED_FORWARD, "measure X", {"feed_forward": ff}, tag="psi3"))
        return steps

    steps = _control_pass(("Hp1", HP), ("Hp2", HP), True, model, "phi1")
    # CPBS5/CPBS6 exchange the paths of the R component only
    swap_r = {(R, "b1"): "b2", (R, "b2"): "b1"}
    steps += [
        CircuitStep(CPBS, "CPBS5", {"photon": 2, "route": swap_r}, tag="phi3"),
        *_block(2, "b1", True, "photon 2", tag="phi4"),
    ]
    steps.append(CircuitStep(CPBS, "CPBS6", {"photon": 2, "route": swap_r}, tag="phi5"))
    sz_a2 = CircuitStep(POL_GATE, "sigma_z a2", {"photon": 1, "paths": ("a2",), "matrix": SIGMA_Z})
    ff = {PLUS_X: [sz_a2], MINUS_X: []}
    steps.append(CircuitStep(MEASURE_FEED_FORWARD, "measure X", {"feed_forward": ff}, tag="phi6"))
    return steps


def _spin_herald(state: QuantumState, photon: int, path: str, spin: str, loss: str) -> QuantumState:
    out = {}
    for cfg, amp in state.items():
        if cfg.path(photon) == path and cfg.spin == spin:
            cfg = cfg.with_photon(photon, cfg.pol(photon), loss)
        out[cfg] = out.get(cfg, 0j) + amp
    return QuantumState(out)


def apply_step(state: QuantumState, step: CircuitStep, coeffs: ScatteringCoefficients) -> QuantumState:
    p = step.payload
    if step.kind == CPBS:
        return apply_cpbs(state, p["photon"], p["route"])
    if step.kind == POL_GATE:
        return apply_pol_gate(state, p["photon"], p["paths"], p["matrix"])
    if step.kind == SPIN_HADAMARD:
        return apply_spin_hadamard(state)
    if step.kind == PATH_PHASE:
        return apply_path_phase(state, p["photon"], p["path"], p["phase"])
    if step.kind == EMITTER_BLOCK:
        return emitter.realistic_scatter(
            state, p["photon"], p["port_map"], coeffs, p["outputs"], p["loss_policy"]
        )
    if step.kind == SPIN_HERALD:
        return _spin_herald(state, p["photon"], p["path"], p["spin"], p["loss"])
    if step.kind == MEASURE_FEED_FORWARD:
        final = QuantumState()
        if state.norm_sq() == 0:
            # every photon was lost; nothing left to read out
            return final
        for branch in measure_spin_x(state):
            b = branch.state
            for correction in p["feed_forward"][branch.outcome]:
                b = apply_step(b, correction, coeffs)
            final = final + b
        return final
    raise ValueError(f"unknown step kind {step.kind!r}")


def initial_tag(kind: GateKind | str) -> str:
    return "psi0" if GateKind(kind) is GateKind.TOFFOLI else "phi0"


def run(
    kind: GateKind | str,
    state: QuantumState,
    coeffs: ScatteringCoefficients | None = None,
    model: str = COHERENT,
) -> tuple[QuantumState, CircuitTrace]:
    """Run a circuit; ``coeffs=None`` means the ideal emitter.

    The final state carries the spin readout as its spin record, so its
    squared norm is the survival probability summed over both outcomes.
    """
    coeffs = IDEAL if coeffs is None else coeffs
    if any(cfg.spin != MINUS for cfg in state):
        raise ValueError("circuits start with the NV spin in |->")
    trace = CircuitTrace()
    trace.record(initial_tag(kind), state)
    for step in build_circuit(kind, model):
        state = apply_step(state, step, coeffs)
        if step.tag:
            trace.record(step.tag, state)
    return state, trace


def oracle_matrix(kind: GateKind | str) -> np.ndarray:
    """16x16 target action over the nominal basis (p1pol, p1path, p2pol, p2path)."""
    kind = GateKind(kind)
    index = {cfg: i for i, cfg in enumerate(NOMINAL_BASIS)}
    m = np.zeros((16, 16), dtype=complex)
    for j, (p1, q1, p2, q2) in enumerate(NOMINAL_BASIS):
        control = (p1, q1) == (L, "a2")
        if kind is GateKind.TOFFOLI:
            m[j, j] = -1 if control and (p2, q2) == (L, "b2") else 1
        elif control:
            # swap photon 2's polarization qubit with its path qubit
            p2s = R if q2 == "b1" else L
            q2s = "b1" if p2 == R else "b2"
            m[index[(p1, q1, p2s, q2s)], j] = 1
        else:
            m[j, j] = 1
    return m


def toffoli_matrix(target: str = "path") -> np.ndarray:
    """Toffoli proper: CCCPF conjugated by a Hadamard on photon 2's path or polarization qubit."""
    h = HP.real
    eye = np.eye(2)
    if target == "path":
        hh = np.kron(np.eye(8), h)
    elif target == "pol":
        hh = np.kron(np.kron(np.eye(4), h), eye)
    else:
        raise ValueError("target must be 'path' or 'pol'")
    return hh @ oracle_matrix(GateKind.TOFFOLI) @ hh


class EffectiveGate(NamedTuple):
    """Linear map input -> post-feed-forward output on nominal modes, per spin outcome."""

    branches: dict

    def outputs(self, psi: np.ndarray) -> dict:
        """Branch outputs for a batch of inputs ``psi`` of shape (..., 16)."""
        return {o: psi @ m.T for o, m in self.branches.items()}

    def probabilities(self, psi: np.ndarray) -> dict:
        return {o: np.sum(np.abs(v) ** 2, axis=-1) for o, v in self.outputs(psi).items()}


@lru_cache(maxsize=256)
def _effective(kind: GateKind, coeffs: tuple, model: str) -> EffectiveGate:
    sc = ScatteringCoefficients(*coeffs)
    mats = {o: np.zeros((16, 16), dtype=complex) for o in OUTCOMES}
    for j, cfg in enumerate(NOMINAL_BASIS):
        final, _ = run(kind, basis_state(*cfg, MINUS), sc, model)
        for o in OUTCOMES:
            mats[o][:, j] = nominal_vector(final, o)
    for m in mats.values():
        m.setflags(write=False)
    return EffectiveGate(mats)


def effective_gate_matrix(
    kind: GateKind | str,
    coeffs: ScatteringCoefficients | None = None,
    model: str = COHERENT,
) -> EffectiveGate:
    coeffs = IDEAL if coeffs is None else coeffs
    return _effective(GateKind(kind), tuple(complex(c) for c in coeffs), model)
