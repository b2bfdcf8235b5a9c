"""NV-cavity scattering: reflection/transmission coefficients and the
photon-spin interface acting on (polarization, block port, spin)."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Mapping, NamedTuple

import numpy as np

from .statevec import MINUS, PLUS, POLS, BasisConfig, QuantumState, R, L, is_loss, _check_photon

PORT_A, PORT_B, PORT_C, PORT_D = "a", "b", "c", "d"
INPUT_PORTS = (PORT_A, PORT_C)
OUTPUT_PORTS = (PORT_B, PORT_D)


@dataclass(frozen=True)
class EmitterParams:
    """Cavity/NV rates. Only ratios matter; all share one angular-frequency unit."""

    g: float
    kappa: float
    kappa_s: float
    gamma: float
    omega_c: float = 0.0
    omega_0: float = 0.0
    omega_p: float = 0.0

    def __post_init__(self):
        # g = 0 is the bare cavity and is allowed
        if not (self.g >= 0 and self.kappa > 0 and self.gamma > 0):
            raise ValueError("need g >= 0, kappa > 0 and gamma > 0")
        if self.kappa_s < 0:
            raise ValueError("kappa_s must be non-negative")

    @classmethod
    def from_ratios(
        cls,
        gsq_over_kgamma: float,
        ks_over_k: float,
        cavity_detuning: float = 0.0,
        dipole_detuning: float = 0.0,
        gamma_over_kappa: float = 1.0,
    ) -> "EmitterParams":
        """Build parameters with kappa = 1.

        Detunings are (omega_c - omega_p)/kappa and (omega_0 - omega_p)/kappa.
        """
        if gsq_over_kgamma < 0:
            raise ValueError("g^2/(kappa gamma) must be non-negative")
        gamma = gamma_over_kappa
        return cls(
            g=math.sqrt(gsq_over_kgamma * gamma),
            kappa=1.0,
            kappa_s=ks_over_k,
            gamma=gamma,
            omega_c=cavity_detuning,
            omega_0=dipole_detuning,
            omega_p=0.0,
        )


class ScatteringCoefficients(NamedTuple):
    r: complex
    t: complex
    r0: complex
    t0: complex


IDEAL = ScatteringCoefficients(1.0, 0.0, 0.0, -1.0)


def _hot(p: EmitterParams, g: float) -> tuple[complex, complex]:
    dip = 1j * (p.omega_0 - p.omega_p) + p.gamma / 2
    cav = 1j * (p.omega_c - p.omega_p)
    den = dip * (cav + p.kappa + p.kappa_s / 2) + g**2
    if den == 0:
        raise ZeroDivisionError("degenerate scattering denominator")
    r = (dip * (cav + p.kappa_s / 2) + g**2) / den
    # single leading minus: t -> -1 for the empty cavity
    t = -p.kappa * dip / den
    return r, t


def coefficients(params: EmitterParams) -> ScatteringCoefficients:
    r, t = _hot(params, params.g)
    r0, t0 = _hot(params, 0.0)
    return ScatteringCoefficients(r, t, r0, t0)


def coefficients_at(gsq_over_kgamma: float, ks_over_k: float, **detuning) -> ScatteringCoefficients:
    return coefficients(EmitterParams.from_ratios(gsq_over_kgamma, ks_over_k, **detuning))


def scattering_rules(c: ScatteringCoefficients) -> dict[tuple[str, str, str], list[tuple[complex, str, str]]]:
    """(pol, in_port, spin) -> [(amplitude, out_pol, out_port), ...].

    Spin |+1> sees a hot cavity for R at port a and L at port c (reflection
    a->d, c->b flips helicity), a cold cavity otherwise; |-1> mirrors this.
    Transmission always maps a->b and c->d.
    """
    r, t, r0, t0 = c
    return {
        (R, PORT_A, PLUS): [(r, L, PORT_D), (t, R, PORT_B)],
        (R, PORT_A, MINUS): [(t0, R, PORT_B), (r0, L, PORT_D)],
        (L, PORT_C, PLUS): [(r, R, PORT_B), (t, L, PORT_D)],
        (L, PORT_C, MINUS): [(t0, L, PORT_D), (r0, R, PORT_B)],
        (R, PORT_C, PLUS): [(t0, R, PORT_D), (r0, L, PORT_B)],
        (R, PORT_C, MINUS): [(r, L, PORT_B), (t, R, PORT_D)],
        (L, PORT_A, PLUS): [(t0, L, PORT_B), (r0, R, PORT_D)],
        (L, PORT_A, MINUS): [(r, R, PORT_D), (t, L, PORT_B)],
    }


def realistic_scatter(
    state: QuantumState,
    photon: int,
    port_map: Mapping[str, str],
    coeffs: ScatteringCoefficients,
    outputs: Mapping[tuple[str, str], str],
    loss_policy: Mapping[tuple[str, str], str] | None = None,
) -> QuantumState:
    """Send one photon through the NV-cavity.

    ``port_map`` binds the photon's paths to input ports a/c; configurations on
    other paths are untouched. ``outputs`` binds the (pol, out_port) pairs the
    circuit continues to paths; every other generated pair must appear in
    ``loss_policy``, which sends it to an absorbing loss label.
    """
    _check_photon(photon)
    if not all(math.isfinite(abs(x)) for x in coeffs):
        raise ValueError("non-finite scattering coefficients")
    for path, port in port_map.items():
        if port not in INPUT_PORTS:
            raise ValueError(f"path {path!r} bound to non-input port {port!r}")
        if is_loss(path):
            raise ValueError(f"loss label {path!r} cannot feed the cavity")
    loss_policy = dict(loss_policy or {})
    for key, dst in loss_policy.items():
        if not is_loss(dst):
            raise ValueError(f"loss_policy target {dst!r} for {key} is not a loss label")
    rules = scattering_rules(coeffs)
    out: dict[BasisConfig, complex] = {}
    for cfg, amp in state.items():
        path = cfg.path(photon)
        port = port_map.get(path)
        if port is None:
            out[cfg] = out.get(cfg, 0j) + amp
            continue
        if cfg.spin not in (PLUS, MINUS):
            raise ValueError("spin must be unmeasured when a photon scatters")
        for coef, pol_out, port_out in rules[(cfg.pol(photon), port, cfg.spin)]:
            if coef == 0:
                continue
            dst = outputs.get((pol_out, port_out))
            if dst is None:
                dst = loss_policy.get((pol_out, port_out))
            if dst is None:
                raise ValueError(
                    f"no continuation or loss_policy entry for ({pol_out}, {port_out}) "
                    f"generated from ({cfg.pol(photon)}, {port}, {cfg.spin})"
                )
            key = cfg.with_photon(photon, pol_out, dst)
            out[key] = out.get(key, 0j) + coef * amp
    return QuantumState(out)


def ideal_scatter(
    state: QuantumState,
    photon: int,
    port_map: Mapping[str, str],
    outputs: Mapping[tuple[str, str], str],
    loss_policy: Mapping[tuple[str, str], str] | None = None,
    passthrough: Iterable[str] = (),
) -> QuantumState:
    """Lossless, phase-exact limit of :func:`realistic_scatter`.

    Every path the photon occupies must be bound in ``port_map`` or listed in
    ``passthrough`` (paths that bypass the cavity).
    """
    _check_photon(photon)
    allowed = set(port_map) | set(passthrough)
    stray = sorted({cfg.path(photon) for cfg in state if cfg.path(photon) not in allowed})
    if stray:
        raise ValueError(f"photon {photon} occupies paths {stray} not bound to a cavity port")
    return realistic_scatter(state, photon, port_map, IDEAL, outputs, loss_policy)


def ideal_scattering_matrix():
    """8x8 matrix of the ideal rules over (pol, port, spin) with ports a/c in, b/d out."""
    ins = [(p, q, s) for p in POLS for q in INPUT_PORTS for s in (PLUS, MINUS)]
    outs = [(p, q, s) for p in POLS for q in OUTPUT_PORTS for s in (PLUS, MINUS)]
    m = np.zeros((8, 8), dtype=complex)
    rules = scattering_rules(IDEAL)
    for j, (p, q, s) in enumerate(ins):
        for coef, po, qo in rules[(p, q, s)]:
            m[outs.index((po, qo, s)), j] += coef
    return m
