"""Closed-form checkpoint states of both circuits, written term by term.

These build states directly from the amplitude expressions and never touch
the circuit machinery, so they serve as an independent check on traced runs.
Arguments are the eight input amplitudes (a1, a2, b1, b2, g1, g2, d1, d2).
"""

from __future__ import annotations

from .statevec import MINUS, PLUS, BasisConfig, L, QuantumState, R


def _state(terms) -> QuantumState:
    amps: dict[BasisConfig, complex] = {}
    for coef, p1, q1, p2, q2, s in terms:
        key = BasisConfig(p1, q1, p2, q2, s)
        amps[key] = amps.get(key, 0j) + coef
    return QuantumState(amps)


def _photon2(g1, g2, d1, d2, sign_b2=1):
    """(g1 R2 + g2 L2)(d1 b1 + sign d2 b2) as (coef, pol, path) terms."""
    return [
        (g1 * d1, R, "b1"),
        (g1 * d2 * sign_b2, R, "b2"),
        (g2 * d1, L, "b1"),
        (g2 * d2 * sign_b2, L, "b2"),
    ]


def _swapped2(g1, g2, d1, d2):
    """(d1 R2 + d2 L2)(g1 b1 + g2 b2)."""
    return [(d1 * g1, R, "b1"), (d1 * g2, R, "b2"), (d2 * g1, L, "b1"), (d2 * g2, L, "b2")]


def _cross(photon1, photon2, spin):
    return [(c1 * c2, p1, q1, p2, q2, spin) for c1, p1, q1 in photon1 for c2, p2, q2 in photon2]


def _rest(a1, a2, b1, b2):
    """Photon-1 terms outside the control configuration L1 a2."""
    return [(a1 * b1, R, "a1"), (a1 * b2, R, "a2"), (a2 * b1, L, "a1")]


def input_state(a1, a2, b1, b2, g1, g2, d1, d2):
    p1 = _rest(a1, a2, b1, b2) + [(a2 * b2, L, "a2")]
    return _state(_cross(p1, _photon2(g1, g2, d1, d2), MINUS))


def toffoli_psi1(a1, a2, b1, b2, g1, g2, d1, d2):
    p2 = _photon2(g1, g2, d1, d2)
    return _state(
        _cross(_rest(a1, a2, b1, b2), p2, MINUS) + _cross([(a2 * b2, L, "a2")], p2, PLUS)
    )


def toffoli_psi2(a1, a2, b1, b2, g1, g2, d1, d2):
    flipped = _photon2(g1, g2, d1, d2, sign_b2=-1)
    ctrl = [(g1 * d1, R, "b1"), (-g1 * d2, R, "b2"), (g2 * d1, L, "b1"), (g2 * d2, L, "b2")]
    return _state(
        _cross(_rest(a1, a2, b1, b2), flipped, MINUS) + _cross([(a2 * b2, L, "a2")], ctrl, PLUS)
    )


def toffoli_psi3(a1, a2, b1, b2, g1, g2, d1, d2, spin):
    """Photon state after readout; ``spin`` is the outcome record to attach."""
    ctrl = [(g1 * d1, R, "b1"), (g1 * d2, R, "b2"), (g2 * d1, L, "b1"), (-g2 * d2, L, "b2")]
    return _state(
        _cross(_rest(a1, a2, b1, b2), _photon2(g1, g2, d1, d2), spin)
        + _cross([(a2 * b2, L, "a2")], ctrl, spin)
    )


def fredkin_phi1(a1, a2, b1, b2, g1, g2, d1, d2):
    p2 = _photon2(g1, g2, d1, d2)
    return _state(
        _cross(_rest(a1, a2, b1, b2), p2, MINUS) + _cross([(-a2 * b2, L, "a2")], p2, PLUS)
    )


def _after_cpbs5(g1, g2, d1, d2):
    return [(g1 * d1, R, "b2"), (g1 * d2, R, "b1"), (g2 * d1, L, "b1"), (g2 * d2, L, "b2")]


def fredkin_phi3(a1, a2, b1, b2, g1, g2, d1, d2):
    p2 = _after_cpbs5(g1, g2, d1, d2)
    return _state(
        _cross(_rest(a1, a2, b1, b2), p2, MINUS) + _cross([(-a2 * b2, L, "a2")], p2, PLUS)
    )


def fredkin_phi4(a1, a2, b1, b2, g1, g2, d1, d2):
    # the |-> part keeps L2 b2 for the g2 d2 term (printed as R2 b2)
    idle = _after_cpbs5(g1, g2, d1, d2)
    ctrl = [(g1 * d1, R, "b2"), (g1 * d2, L, "b1"), (g2 * d1, R, "b1"), (g2 * d2, L, "b2")]
    return _state(
        _cross(_rest(a1, a2, b1, b2), idle, MINUS) + _cross([(-a2 * b2, L, "a2")], ctrl, PLUS)
    )


def fredkin_phi5(a1, a2, b1, b2, g1, g2, d1, d2):
    return _state(
        _cross(_rest(a1, a2, b1, b2), _photon2(g1, g2, d1, d2), MINUS)
        + _cross([(-a2 * b2, L, "a2")], _swapped2(g1, g2, d1, d2), PLUS)
    )


def fredkin_phi6(a1, a2, b1, b2, g1, g2, d1, d2, spin):
    return _state(
        _cross(_rest(a1, a2, b1, b2), _photon2(g1, g2, d1, d2), spin)
        + _cross([(a2 * b2, L, "a2")], _swapped2(g1, g2, d1, d2), spin)
    )


TOFFOLI_CHECKPOINTS = {"psi1": toffoli_psi1, "psi2": toffoli_psi2}
FREDKIN_CHECKPOINTS = {"phi1": fredkin_phi1, "phi3": fredkin_phi3, "phi4": fredkin_phi4, "phi5": fredkin_phi5}
