import numpy as np
import pytest

from nvgates import reference as ref
from nvgates.circuits import (
    EMITTER_BLOCK,
    HERALDED,
    MEASURE_FEED_FORWARD,
    PATH_PHASE,
    GateKind,
    build_circuit,
    effective_gate_matrix,
    oracle_matrix,
    run,
    toffoli_matrix,
)
from nvgates.emitter import coefficients_at
from nvgates.statevec import (
    MINUS_X,
    NOMINAL_BASIS,
    NOMINAL_INDEX,
    OUTCOMES,
    PLUS,
    PLUS_X,
    L,
    R,
    basis_state,
    from_nominal_vector,
    input_from_angles,
    is_loss,
    nominal_vector,
    norm_sq,
    overlap,
)

KINDS = list(GateKind)
POINTS = [(2.4, 0.1), (2.4, 1.0), (0.7, 0.4)]


def basis_vec(*cfg):
    v = np.zeros(16)
    v[NOMINAL_INDEX[cfg]] = 1
    return v


def test_toffoli_structure():
    steps = build_circuit(GateKind.TOFFOLI)
    assert sum(s.kind == EMITTER_BLOCK for s in steps) == 2
    assert steps[-1].kind == MEASURE_FEED_FORWARD


def test_fredkin_structure():
    steps = build_circuit(GateKind.FREDKIN)
    assert sum(s.kind == EMITTER_BLOCK for s in steps) == 2
    assert steps[-1].kind == MEASURE_FEED_FORWARD
    # two phase shifters bracket each emitter
    blocks = [i for i, s in enumerate(steps) if s.kind == EMITTER_BLOCK]
    for i in blocks:
        assert steps[i - 1].kind == PATH_PHASE and steps[i + 1].kind == PATH_PHASE


def test_unknown_kind_and_model():
    with pytest.raises(ValueError):
        build_circuit("swap")
    with pytest.raises(ValueError):
        build_circuit(GateKind.TOFFOLI, model="magic")


def test_run_requires_minus_spin():
    with pytest.raises(ValueError):
        run(GateKind.TOFFOLI, basis_state(R, "a1", R, "b1", PLUS))


def test_trace_tags():
    st = input_from_angles(0.3, 0.9, 1.1, 2.0)
    _, tt = run(GateKind.TOFFOLI, st)
    _, tf = run(GateKind.FREDKIN, st)
    assert tt.tags() == ["psi0", "psi1", "psi2", "psi3"]
    assert tf.tags() == ["phi0", "phi1", "phi3", "phi4", "phi5", "phi6"]
    assert tt.to_records()[0]["norm_sq"] == pytest.approx(1)


def test_cccpf_flips_only_control_target():
    final, _ = run(GateKind.TOFFOLI, basis_state(L, "a2", L, "b2"))
    for o in OUTCOMES:
        branch = nominal_vector(final, o)
        assert overlap(from_nominal_vector(branch), from_nominal_vector(-basis_vec(L, "a2", L, "b2"))) == pytest.approx(1)
    m = effective_gate_matrix(GateKind.TOFFOLI).branches[PLUS_X] * np.sqrt(2)
    assert m[NOMINAL_INDEX[(L, "a2", L, "b2")], NOMINAL_INDEX[(L, "a2", L, "b2")]] == pytest.approx(-1)
    assert m[0, 0] == pytest.approx(1)


def test_fredkin_example():
    final, _ = run(GateKind.FREDKIN, basis_state(L, "a2", L, "b1"))
    for o in OUTCOMES:
        v = nominal_vector(final, o)
        assert np.count_nonzero(np.abs(v) > 1e-12) == 1
        assert abs(v[NOMINAL_INDEX[(L, "a2", R, "b2")]]) == pytest.approx(1 / np.sqrt(2))


def test_oracles():
    t = oracle_matrix(GateKind.TOFFOLI)
    f = oracle_matrix(GateKind.FREDKIN)
    assert np.trace(t).real == 14
    assert np.allclose(f @ f, np.eye(16))
    assert np.allclose(t.conj().T @ t, np.eye(16)) and np.allclose(f.T @ f, np.eye(16))
    # a single 4x4 block differs from identity
    moved = [i for i in range(16) if f[i, i] != 1]
    assert [NOMINAL_BASIS[i][:2] for i in moved] == [(L, "a2")] * 2


@pytest.mark.parametrize("target", ["path", "pol"])
def test_toffoli_proper_is_permutation(target):
    m = toffoli_matrix(target)
    assert np.allclose(np.abs(m).sum(axis=0), 1) and np.allclose(m, np.round(m))
    assert np.count_nonzero(np.abs(np.diag(m)) < 0.5) == 2


@pytest.mark.parametrize("kind", KINDS)
def test_oracle_equals_ideal_run_columnwise(kind):
    oracle = oracle_matrix(kind)
    for j, cfg in enumerate(NOMINAL_BASIS):
        final, _ = run(kind, basis_state(*cfg))
        assert norm_sq(final) == pytest.approx(1, abs=1e-12)
        for o, sign in ((PLUS_X, 1), (MINUS_X, -1)):
            # plus_x carries +1/sqrt2, minus_x -1/sqrt2 times the oracle column
            assert np.allclose(nominal_vector(final, o), sign * oracle[:, j] / np.sqrt(2), atol=1e-12)


@pytest.mark.parametrize("seed", range(10))
def test_checkpoints_match_closed_forms(seed):
    rng = np.random.default_rng(seed)
    angles = rng.uniform(0, 2 * np.pi, 4)
    c = [f(x) for x in angles for f in (np.cos, np.sin)]
    st = input_from_angles(*angles)
    assert norm_sq(st - ref.input_state(*c)) < 1e-24
    for kind, checkpoints, final_fn in (
        (GateKind.TOFFOLI, ref.TOFFOLI_CHECKPOINTS, ref.toffoli_psi3),
        (GateKind.FREDKIN, ref.FREDKIN_CHECKPOINTS, ref.fredkin_phi6),
    ):
        final, trace = run(kind, st)
        for tag, fn in checkpoints.items():
            assert norm_sq(trace[tag] - fn(*c)) < 1e-20, tag
        for o in OUTCOMES:
            assert overlap(final.restrict(spin=o), final_fn(*c, o)) == pytest.approx(1, abs=1e-10)


def test_complex_amplitudes_checkpoints():
    rng = np.random.default_rng(42)
    c = []
    for _ in range(4):
        v = rng.normal(size=2) + 1j * rng.normal(size=2)
        c.extend(v / np.linalg.norm(v))
    from nvgates.statevec import make_input_state

    _, trace = run(GateKind.FREDKIN, make_input_state(*c))
    assert norm_sq(trace["phi4"] - ref.fredkin_phi4(*c)) < 1e-20


def test_psi2_branches_reach_psi3():
    c = [np.cos(0.4), np.sin(0.4), np.cos(1.2), np.sin(1.2), np.cos(2.1), np.sin(2.1), np.cos(-0.6), np.sin(-0.6)]
    final, trace = run(GateKind.TOFFOLI, ref.input_state(*c))
    assert norm_sq(trace["psi2"] - ref.toffoli_psi2(*c)) < 1e-20
    for o in OUTCOMES:
        assert overlap(final.restrict(spin=o), ref.toffoli_psi3(*c, o)) == pytest.approx(1, abs=1e-12)


@pytest.mark.parametrize("kind", KINDS)
@pytest.mark.parametrize("gsq, ks", POINTS)
def test_realistic_norm_and_columns(kind, gsq, ks):
    c = coefficients_at(gsq, ks)
    gate = effective_gate_matrix(kind, c)
    cols = sum(np.sum(np.abs(m) ** 2, axis=0) for m in gate.branches.values())
    assert np.all(cols <= 1 + 1e-12)
    prev = 1.0
    _, trace = run(kind, input_from_angles(0.2, 1.3, 0.5, 2.5), c)
    for _, s in trace:
        assert norm_sq(s) <= prev + 1e-12
        prev = norm_sq(s)


@pytest.mark.parametrize("gsq, ks", POINTS)
def test_heralded_discards_more(gsq, ks):
    c = coefficients_at(gsq, ks)
    st = input_from_angles(0.2, 1.3, 0.5, 2.5)
    coherent, _ = run(GateKind.TOFFOLI, st, c)
    heralded, _ = run(GateKind.TOFFOLI, st, c, HERALDED)
    assert norm_sq(heralded) <= norm_sq(coherent) + 1e-12
    assert any(is_loss(cfg.p1path) for cfg in run(GateKind.TOFFOLI, st, c, HERALDED)[0])


@pytest.mark.parametrize("kind", KINDS)
def test_heralded_ideal_unchanged(kind):
    a = effective_gate_matrix(kind)
    b = effective_gate_matrix(kind, None, HERALDED)
    for o in OUTCOMES:
        assert np.allclose(a.branches[o], b.branches[o], atol=1e-14)


def test_effective_matrices_read_only():
    m = effective_gate_matrix(GateKind.TOFFOLI).branches[PLUS_X]
    with pytest.raises(ValueError):
        m[0, 0] = 5


@pytest.mark.parametrize("kind", KINDS)
def test_effective_matches_direct_runs(kind):
    c = coefficients_at(2.4, 0.1)
    st = input_from_angles(0.7, 2.2, 4.1, 5.0)
    final, _ = run(kind, st, c)
    psi = np.array([st[(*cfg, "minus")] for cfg in NOMINAL_BASIS])
    out = effective_gate_matrix(kind, c).outputs(psi)
    for o in OUTCOMES:
        assert np.allclose(out[o], nominal_vector(final, o), atol=1e-14)
