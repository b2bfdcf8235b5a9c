"""
Sparse state vectors for two dual-rail photons and one NV electron spin.

A basis configuration is the tuple (p1pol, p1path, p2pol, p2path, spin).
Only occupied configurations are stored, so circuit-internal arms and loss
modes can be added on the fly without growing a dense tensor.

The spin slot holds ``"plus"``/``"minus"`` (the |+1>, |-1> ground states)
while the spin is coherent. After an X-basis readout it holds the classical
record ``"plus_x"``/``"minus_x"``; records are orthogonal, so a measured state
is still a single vector whose squared norm is the total survival.
"""

from __future__ import annotations

import json
import warnings
from types import MappingProxyType
from typing import Iterable, Mapping, NamedTuple

import numpy as np

R, L = "R", "L"
POLS = (R, L)

PLUS, MINUS = "plus", "minus"
PLUS_X, MINUS_X = "plus_x", "minus_x"
SPINS = (PLUS, MINUS)
OUTCOMES = (PLUS_X, MINUS_X)

PHOTON_PATHS = {1: ("a1", "a2"), 2: ("b1", "b2")}
LOSS_PREFIX = "loss_"

NORM_TOL = 1e-12
PAIR_TOL = 1e-10
# amplitudes below this are dropped; affects norms at the 1e-30 level only
PRUNE = 1e-15

SQRT_HALF = 1.0 / np.sqrt(2.0)

# Single-qubit matrices in the {R, L} basis.
RY_PLUS = SQRT_HALF * np.array([[1, -1], [1, 1]], dtype=complex)
RY_MINUS = SQRT_HALF * np.array([[1, 1], [-1, 1]], dtype=complex)
HP = SQRT_HALF * np.array([[1, 1], [1, -1]], dtype=complex)
SIGMA_Z = np.array([[1, 0], [0, -1]], dtype=complex)
# spin Hadamard in the {+, -} basis
HE = HP


class BasisConfig(NamedTuple):
    p1pol: str
    p1path: str
    p2pol: str
    p2path: str
    spin: str

    def pol(self, photon: int) -> str:
        return self.p1pol if photon == 1 else self.p2pol

    def path(self, photon: int) -> str:
        return self.p1path if photon == 1 else self.p2path

    def with_photon(self, photon: int, pol: str, path: str) -> "BasisConfig":
        if photon == 1:
            return self._replace(p1pol=pol, p1path=path)
        return self._replace(p2pol=pol, p2path=path)

    def photons(self) -> tuple[str, str, str, str]:
        return (self.p1pol, self.p1path, self.p2pol, self.p2path)


def is_loss(path: str) -> bool:
    return path.startswith(LOSS_PREFIX)


def _check_photon(photon: int) -> None:
    if photon not in (1, 2):
        raise ValueError(f"photon must be 1 or 2, got {photon!r}")


class QuantumState:
    """Immutable, possibly sub-normalized amplitude map over BasisConfig."""

    __slots__ = ("_amps",)

    def __init__(self, amplitudes: Mapping[BasisConfig, complex] | Iterable = ()):
        items = amplitudes.items() if isinstance(amplitudes, Mapping) else amplitudes
        amps: dict[BasisConfig, complex] = {}
        for cfg, amp in items:
            cfg = BasisConfig(*cfg)
            amps[cfg] = amps.get(cfg, 0j) + complex(amp)
        self._amps = {k: v for k, v in amps.items() if abs(v) > PRUNE}

    @property
    def amplitudes(self) -> Mapping[BasisConfig, complex]:
        return MappingProxyType(self._amps)

    def __getitem__(self, cfg) -> complex:
        return self._amps.get(BasisConfig(*cfg), 0j)

    def __len__(self) -> int:
        return len(self._amps)

    def __iter__(self):
        return iter(self._amps)

    def items(self):
        return self._amps.items()

    def __add__(self, other: "QuantumState") -> "QuantumState":
        merged = dict(self._amps)
        for k, v in other.items():
            merged[k] = merged.get(k, 0j) + v
        return QuantumState(merged)

    def __sub__(self, other: "QuantumState") -> "QuantumState":
        return self + (-1) * other

    def __mul__(self, scalar: complex) -> "QuantumState":
        return QuantumState({k: scalar * v for k, v in self._amps.items()})

    __rmul__ = __mul__

    def __repr__(self) -> str:
        terms = ", ".join(f"{tuple(k)}: {v:.6g}" for k, v in sorted(self._amps.items()))
        return f"QuantumState({{{terms}}})"

    def norm_sq(self) -> float:
        return norm_sq(self)

    def spin_labels(self) -> set[str]:
        return {k.spin for k in self._amps}

    def restrict(self, *, spin: str | None = None, nominal_only: bool = False) -> "QuantumState":
        """Keep only configurations with the given spin label and/or nominal paths."""
        out = {}
        for k, v in self._amps.items():
            if spin is not None and k.spin != spin:
                continue
            if nominal_only and not (
                k.p1path in PHOTON_PATHS[1] and k.p2path in PHOTON_PATHS[2]
            ):
                continue
            out[k] = v
        return QuantumState(out)


def basis_state(p1pol, p1path, p2pol, p2path, spin=MINUS) -> QuantumState:
    return QuantumState({BasisConfig(p1pol, p1path, p2pol, p2path, spin): 1.0})


def make_input_state(a1, a2, b1, b2, g1, g2, d1, d2, spin: str = MINUS) -> QuantumState:
    """Product input state.

    ``(a1 R1 + a2 L1) (b1 a1 + b2 a2) (g1 R2 + g2 L2) (d1 b1 + d2 b2) |spin>``
    where the spin is a computational label (``"plus"`` or ``"minus"``).
    """
    pairs = {"alpha": (a1, a2), "beta": (b1, b2), "gamma": (g1, g2), "delta": (d1, d2)}
    for name, (x, y) in pairs.items():
        n = abs(x) ** 2 + abs(y) ** 2
        if abs(n - 1.0) > PAIR_TOL:
            raise ValueError(f"coefficient pair {name} is not normalized: |{name}1|^2+|{name}2|^2 = {n!r}")
    if spin not in SPINS:
        raise ValueError(f"spin must be one of {SPINS}, got {spin!r}")
    amps = {}
    for p1, ca in zip(POLS, (a1, a2)):
        for q1, cb in zip(PHOTON_PATHS[1], (b1, b2)):
            for p2, cg in zip(POLS, (g1, g2)):
                for q2, cd in zip(PHOTON_PATHS[2], (d1, d2)):
                    amps[BasisConfig(p1, q1, p2, q2, spin)] = ca * cb * cg * cd
    return QuantumState(amps)


def input_from_angles(alpha, beta, gamma, delta, spin: str = MINUS) -> QuantumState:
    """Real product input with (x1, x2) = (cos x, sin x) for each register."""
    c = [(np.cos(x), np.sin(x)) for x in (alpha, beta, gamma, delta)]
    return make_input_state(*c[0], *c[1], *c[2], *c[3], spin=spin)


def apply_pol_gate(state: QuantumState, photon: int, paths: Iterable[str], m) -> QuantumState:
    """Apply the 2x2 matrix ``m`` to one photon's polarization on the given paths."""
    _check_photon(photon)
    paths = set(paths)
    if not paths:
        warnings.warn("apply_pol_gate called with an empty path set; no-op", stacklevel=2)
        return state
    bad = sorted(p for p in paths if is_loss(p))
    if bad:
        raise ValueError(f"cannot act on loss labels {bad}")
    m = np.asarray(m, dtype=complex)
    out: dict[BasisConfig, complex] = {}
    for cfg, amp in state.items():
        if cfg.path(photon) not in paths:
            out[cfg] = out.get(cfg, 0j) + amp
            continue
        j = POLS.index(cfg.pol(photon))
        for i, pol in enumerate(POLS):
            if m[i, j] != 0:
                key = cfg.with_photon(photon, pol, cfg.path(photon))
                out[key] = out.get(key, 0j) + m[i, j] * amp
    return QuantumState(out)


def apply_spin_hadamard(state: QuantumState) -> QuantumState:
    out: dict[BasisConfig, complex] = {}
    for cfg, amp in state.items():
        if cfg.spin not in SPINS:
            raise ValueError(f"spin already measured ({cfg.spin}); cannot apply He")
        j = SPINS.index(cfg.spin)
        for i, s in enumerate(SPINS):
            key = cfg._replace(spin=s)
            out[key] = out.get(key, 0j) + HE[i, j] * amp
    return QuantumState(out)


def apply_cpbs(state: QuantumState, photon: int, route: Mapping[tuple[str, str], str]) -> QuantumState:
    """Relabel one photon's path according to ``route[(pol, in_path)] = out_path``.

    Pairs absent from ``route`` pass through unchanged. Amplitudes are never
    modified, so this is a permutation of occupied configurations.
    """
    _check_photon(photon)
    for (pol, src), dst in route.items():
        if pol not in POLS:
            raise ValueError(f"unknown polarization {pol!r} in route")
        if is_loss(src):
            raise ValueError(f"route maps out of loss label {src!r}")
    out: dict[BasisConfig, complex] = {}
    origin: dict[BasisConfig, BasisConfig] = {}
    for cfg, amp in state.items():
        pol, path = cfg.pol(photon), cfg.path(photon)
        key = cfg.with_photon(photon, pol, route.get((pol, path), path))
        if key in out:
            raise ValueError(
                f"route collision: {tuple(origin[key])} and {tuple(cfg)} both map to {tuple(key)}"
            )
        out[key] = amp
        origin[key] = cfg
    return QuantumState(out)


def apply_path_phase(state: QuantumState, photon: int, path: str, phase: complex) -> QuantumState:
    _check_photon(photon)
    if abs(abs(phase) - 1.0) > NORM_TOL:
        raise ValueError(f"phase must have unit modulus, got |phase|={abs(phase)!r}")
    return QuantumState(
        {cfg: (phase * amp if cfg.path(photon) == path else amp) for cfg, amp in state.items()}
    )


class SpinBranch(NamedTuple):
    outcome: str
    state: QuantumState
    probability: float


def measure_spin_x(state: QuantumState) -> tuple[SpinBranch, SpinBranch]:
    """Project the spin onto (|+> +/- |->)/sqrt(2), returning both branches.

    Each branch state keeps its photon sub-norm (it is not renormalized) and
    carries the outcome as its spin record.
    """
    total = norm_sq(state)
    if total <= 0.0:
        raise ValueError("cannot measure a zero-norm state")
    branches = []
    for outcome, sign in ((PLUS_X, 1.0), (MINUS_X, -1.0)):
        amps: dict[BasisConfig, complex] = {}
        for cfg, amp in state.items():
            if cfg.spin not in SPINS:
                raise ValueError(f"spin already measured ({cfg.spin})")
            w = SQRT_HALF if cfg.spin == PLUS else sign * SQRT_HALF
            key = cfg._replace(spin=outcome)
            amps[key] = amps.get(key, 0j) + w * amp
        b = QuantumState(amps)
        branches.append(SpinBranch(outcome, b, norm_sq(b) / total))
    return tuple(branches)


def inner_product(a: QuantumState, b: QuantumState) -> complex:
    """<a|b>, antilinear in ``a``."""
    if len(a) > len(b):
        return np.conj(inner_product(b, a))
    bb = b.amplitudes
    return complex(sum(np.conj(v) * bb.get(k, 0j) for k, v in a.items()))


def norm_sq(state: QuantumState) -> float:
    return float(sum(abs(v) ** 2 for _, v in state.items()))


def renormalize(state: QuantumState) -> QuantumState:
    n = norm_sq(state)
    if n <= 0.0:
        raise ValueError("cannot renormalize a zero-norm state")
    return state * (1.0 / np.sqrt(n))


def overlap(a: QuantumState, b: QuantumState) -> float:
    """Global-phase-insensitive overlap |<a|b>| / (|a| |b|)."""
    na, nb = norm_sq(a), norm_sq(b)
    if na <= 0.0 or nb <= 0.0:
        raise ValueError("overlap undefined for zero-norm states")
    return abs(inner_product(a, b)) / np.sqrt(na * nb)


# Dense view over the 16 nominal two-photon modes, ordered (p1pol, p1path, p2pol, p2path).
NOMINAL_BASIS: tuple[tuple[str, str, str, str], ...] = tuple(
    (p1, q1, p2, q2)
    for p1 in POLS
    for q1 in PHOTON_PATHS[1]
    for p2 in POLS
    for q2 in PHOTON_PATHS[2]
)
NOMINAL_INDEX = {cfg: i for i, cfg in enumerate(NOMINAL_BASIS)}


def nominal_vector(state: QuantumState, spin: str) -> np.ndarray:
    vec = np.zeros(len(NOMINAL_BASIS), dtype=complex)
    for cfg, amp in state.items():
        if cfg.spin == spin:
            i = NOMINAL_INDEX.get(cfg.photons())
            if i is not None:
                vec[i] += amp
    return vec


def from_nominal_vector(vec, spin: str = MINUS) -> QuantumState:
    return QuantumState(
        {BasisConfig(*cfg, spin): complex(a) for cfg, a in zip(NOMINAL_BASIS, vec)}
    )


def state_to_records(state: QuantumState) -> list[dict]:
    return [
        {"config": cfg._asdict(), "re": amp.real, "im": amp.imag}
        for cfg, amp in sorted(state.items())
    ]


def state_from_records(records: Iterable[Mapping]) -> QuantumState:
    return QuantumState(
        {BasisConfig(**r["config"]): complex(r["re"], r["im"]) for r in records}
    )


def state_to_json(state: QuantumState, **kwargs) -> str:
    return json.dumps(state_to_records(state), **kwargs)
