"""Single-pass scattering maps and the multi-pass atom/cavity protocols."""

import json
import math

import numpy as np
import pytest

from cavitypass.model import SystemState, decompose_product_state
from cavitypass.spectrum import boundary_states
from cavitypass.angle import unit_integral
from cavitypass.gates import (
    CavityPass,
    apply_protocol,
    basis_product,
    cnot_gate,
    concurrence,
    concurrence_traced,
    entangle_atoms,
    fidelity_scan,
    map_atom_to_atom,
    map_atom_to_cavity,
    map_cavity_to_atom,
    phase_gate,
    scattering_map,
    swap_factorization,
    swap_gate,
)

RNG = np.random.default_rng(404)
R2 = math.sqrt(0.5)


def _signs(label):  # "g1e2" -> ("g", "e")
    return label[0], label[2]


def test_scattering_map_matrix():
    phi = 1.234
    c, s = math.cos(phi), math.sin(phi)
    U = scattering_map(0, phi).matrix
    ref = np.array([
        [1, 0, 0, 0],
        [0, 0, c, -1j * s],
        [0, -1, 0, 0],
        [0, 0, -1j * s, c],
    ])
    np.testing.assert_allclose(U, ref, atol=1e-15)

    U1 = scattering_map(-1, phi).matrix
    ref1 = np.array([[0, c, -1j * s], [-1, 0, 0], [0, -1j * s, c]])
    np.testing.assert_allclose(U1, ref1, atol=1e-15)

    np.testing.assert_allclose(scattering_map(-2, phi).matrix, np.eye(1), atol=0)
    with pytest.raises(ValueError):
        scattering_map(-3, phi)


def test_scattering_map_unitary():
    for n in (-2, -1, 0, 4):
        for phi in RNG.uniform(0, 4 * math.pi, size=5):
            U = scattering_map(n, float(phi)).matrix
            np.testing.assert_allclose(U @ U.conj().T, np.eye(U.shape[0]),
                                       atol=1e-12)


def test_scattering_map_from_boundary_transport():
    """The map is adiabatic transport between the asymptotic frames.

    Outer branches pick up e^{-+ i phi} and never mix; the inner pair
    crosses, so a state entering on raw branch 1 exits on raw branch 2
    (and vice versa) with no net phase.  Building the map from that rule
    and the boundary frames must reproduce the closed form.
    """
    for n in (-1, 0, 2):
        B_in = boundary_states(n, "-inf")
        B_out = boundary_states(n, "+inf")
        for phi in (0.37, 2.0, math.pi):
            up, dn = np.exp(1j * phi), np.exp(-1j * phi)
            if n == -1:
                D = np.diag([1.0, up, dn])  # dark line, bright pair
            else:
                D = np.diag([0.0, 0.0, up, dn]).astype(complex)
                D[0, 1] = D[1, 0] = 1.0  # the crossing exchanges the pair
            U = B_out @ D @ B_in.T
            np.testing.assert_allclose(scattering_map(n, phi).matrix, U,
                                       atol=1e-12)


def test_swap_factorization():
    """Any angle factors as (photon rotation) x (signed atomic exchange)."""
    for n in (-1, 0, 3):
        for phi in RNG.uniform(0, 2 * math.pi, size=10):
            R, S = swap_factorization(n, float(phi))
            U = scattering_map(n, float(phi)).matrix
            np.testing.assert_allclose(R @ S, U, atol=1e-14)
            np.testing.assert_allclose(S, scattering_map(n, 0.0).matrix, atol=0)
            np.testing.assert_allclose(R @ R.conj().T, np.eye(U.shape[0]),
                                       atol=1e-12)
        # the residual rotation never touches the exchanged pair
        c, s = math.cos(0.9), math.sin(0.9)
        R, _ = swap_factorization(n, 0.9)
        if n >= 0:
            ref = np.array([
                [1, 0, 0, 0],
                [0, c, 0, -1j * s],
                [0, 0, 1, 0],
                [0, -1j * s, 0, c],
            ])
        else:
            ref = np.array([[c, 0, -1j * s], [0, 1, 0], [-1j * s, 0, c]])
        np.testing.assert_allclose(R, ref, atol=1e-14)


def test_swap_gate_ideal_table():
    report = swap_gate(mode="ideal")
    assert report.fidelity >= 1.0 - 1e-12
    assert report.leak <= 1e-12
    assert set(report.input_fidelities) == {"e1e2", "g1e2", "e1g2", "g1g2"}
    # signed exchange on the single-excitation pair
    out = report.truth_table["g1e2"].zero_photon_vector()
    np.testing.assert_allclose(out, [0, 0, -1, 0], atol=1e-12)
    out = report.truth_table["e1g2"].zero_photon_vector()
    np.testing.assert_allclose(out, [0, -1, 0, 0], atol=1e-12)


def test_phase_gate_ideal_table():
    report = phase_gate(mode="ideal")
    assert report.fidelity >= 1.0 - 1e-12
    assert report.leak <= 1e-12
    # minus sign on e1g2 only
    np.testing.assert_allclose(
        report.truth_table["e1g2"].zero_photon_vector(), [0, 0, -1, 0],
        atol=1e-12)
    np.testing.assert_allclose(
        report.truth_table["g1e2"].zero_photon_vector(), [0, 1, 0, 0],
        atol=1e-12)
    assert report.final.n_cavities == 2


def test_cnot_gate_ideal_table():
    report = cnot_gate(mode="ideal")
    assert report.fidelity >= 1.0 - 1e-12
    assert report.leak <= 1e-12
    # atom 1 flips when atom 2 stays ground
    expected = {"e1e2": "e1e2", "g1e2": "g1e2", "e1g2": "g1g2", "g1g2": "e1g2"}
    order = (("g", "g"), ("g", "e"), ("e", "g"), ("e", "e"))
    for label, target in expected.items():
        vec = report.truth_table[label].zero_photon_vector()
        k = order.index(_signs(target))
        assert abs(vec[k]) == pytest.approx(1.0, abs=1e-12)


def test_dynamics_tables():
    for report in (swap_gate(mode="dynamics"), phase_gate(mode="dynamics"),
                   cnot_gate(mode="dynamics")):
        assert report.norm == pytest.approx(1.0, abs=1e-8)
        for label, fid in report.input_fidelities.items():
            assert fid >= 0.99, (report.protocol, label, fid)
        for label, leak in report.input_leaks.items():
            assert leak <= 1e-3, (report.protocol, label, leak)


def test_swap_leak_budget():
    """Residual photon probability of the full-turn exchange.

    Known to fail: at the default coupling floor (g sigma = 30) the worst
    input leaks about 8e-4 of its population to the photon channel, not the
    1e-4 this budget asks for; the leak falls off as 1/(g sigma)^2, so the
    budget needs g sigma near 90.  Kept in its stated form.
    """
    report = swap_gate(mode="dynamics")
    assert report.leak <= 1e-4


def test_ideal_vs_dynamics_state_fidelity():
    init = decompose_product_state((R2, R2, 0.0), (R2, R2, 0.0), [1.0])
    steps = [CavityPass(phi=math.pi)]
    ideal = apply_protocol(init, steps, mode="ideal")
    dyn = apply_protocol(init, steps, mode="dynamics")
    assert abs(dyn.final.overlap(ideal.final)) ** 2 >= 0.998
    assert dyn.norm == pytest.approx(1.0, abs=1e-8)
    assert ideal.norm == pytest.approx(1.0, abs=1e-12)


def test_pass_preserves_block_weights():
    """A crossing never moves population between excitation blocks."""
    init = decompose_product_state((0.6, 0.8, 0.2), (R2, R2, -0.5), [1.0])

    def weights(state):
        acc = {}
        for (s1, s2, ph), a in state.items():
            N = sum(ph) + (s1 == "e") + (s2 == "e")
            acc[N] = acc.get(N, 0.0) + abs(a) ** 2
        return acc

    before = weights(init)
    out = apply_protocol(init, [CavityPass(phi=1.7)], mode="ideal")
    after = weights(out.final)
    assert set(before) == set(after)
    for N in before:
        assert after[N] == pytest.approx(before[N], abs=1e-12)


def test_entangle_closed_form_probability():
    """Ideal entangled fraction is 1 - b1^2 a2^2 sin^2 phi."""
    for b1 in (0.0, 0.3, R2, 1.0):
        a1 = math.sqrt(1 - b1 * b1)
        for a2 in (0.0, 0.5, R2, 1.0):
            b2 = math.sqrt(1 - a2 * a2)
            for phi in (0.5 * math.pi, math.pi, 2 * math.pi):
                res = entangle_atoms(a1, b1, 0.0, a2, b2, 0.0, phi,
                                     mode="ideal")
                expected = 1.0 - (b1 * a2 * math.sin(phi)) ** 2
                assert res.p_en == pytest.approx(expected, abs=1e-10)


def test_entangle_balanced_full_turn():
    theta1 = 0.7
    res = entangle_atoms(R2, R2, theta1, R2, R2, 0.0, 2 * math.pi,
                         mode="ideal")
    assert res.p_en == pytest.approx(1.0, abs=1e-12)
    assert res.concurrence == pytest.approx(1.0, abs=1e-10)
    assert res.report.fidelity == pytest.approx(1.0, abs=1e-10)
    # conditional state carries atom 1's phase on the g1 e2 branch
    target = np.array([0.0, np.exp(1j * theta1) * R2, R2, 0.0])
    phase = np.vdot(target, res.conditional)
    np.testing.assert_allclose(res.conditional, phase * target, atol=1e-10)


def test_entangle_dynamics_concurrence():
    res = entangle_atoms(R2, R2, 0.0, R2, R2, 0.0, 2 * math.pi,
                         mode="dynamics")
    assert res.p_en >= 0.995
    assert res.concurrence >= 0.99
    assert res.report.fidelity >= 0.995


def test_entangle_total_leak_case():
    # leading atom excited, trailing ground, quarter turn: the photon
    # always comes out, nothing entangles
    res = entangle_atoms(0.0, 1.0, 0.0, 1.0, 0.0, 0.0, 0.5 * math.pi,
                         mode="ideal")
    assert res.p_en == pytest.approx(0.0, abs=1e-12)
    assert res.concurrence == 0.0
    np.testing.assert_allclose(res.conditional, 0.0, atol=1e-12)


def test_map_atom_to_atom_ideal():
    alpha, beta, theta = 0.6, 0.8, 0.4
    report = map_atom_to_atom(alpha, beta, theta, mode="ideal")
    assert report.fidelity == pytest.approx(1.0, abs=1e-12)
    vec = report.final.zero_photon_vector()
    # atom 1 now carries the qubit, atom 2 ground: (gg, ge, eg, ee)
    phase = np.vdot([alpha, 0, beta * np.exp(1j * theta), 0], vec)
    np.testing.assert_allclose(vec, phase * np.array(
        [alpha, 0, beta * np.exp(1j * theta), 0]), atol=1e-12)
    # the transfer channel is angle independent
    report2 = map_atom_to_atom(alpha, beta, theta, mode="ideal", phi=2 * math.pi)
    assert report2.fidelity == pytest.approx(1.0, abs=1e-12)


def test_map_cavity_to_atom_ideal():
    c0, c1 = R2, R2 * 1j
    report = map_cavity_to_atom(c0, c1, mode="ideal")
    assert report.fidelity == pytest.approx(1.0, abs=1e-12)
    assert report.leak <= 1e-12
    # wrong angle degrades the transfer instead of raising
    off = map_cavity_to_atom(c0, c1, mode="ideal", phi=math.pi)
    assert off.fidelity < 0.999


def test_map_atom_to_cavity_ideal():
    report = map_atom_to_cavity(0.28, math.sqrt(1 - 0.28**2), -0.3,
                                mode="ideal")
    assert report.fidelity == pytest.approx(1.0, abs=1e-12)
    # atoms end in the ground state
    vec = report.final.zero_photon_vector()
    assert abs(vec[1]) <= 1e-12 and abs(vec[2]) <= 1e-12 and abs(vec[3]) <= 1e-12


def test_fidelity_scan_ideal_grid():
    report = fidelity_scan(mode="ideal", sigma_errors=(0.0, 0.02),
                           delay_errors=(0.0,))
    assert len(report.scan) == 2
    (x0, y0, f0, l0), (x1, y1, f1, l1) = report.scan
    assert (x0, y0) == (0.0, 0.0) and (x1, y1) == (0.02, 0.0)
    assert f0 == pytest.approx(1.0, abs=1e-10)
    assert l0 <= 1e-12
    assert f1 < f0 and l1 > 0.0
    header = report.scan_csv().splitlines()[0]
    assert header == "dσ_rel,dΔt_rel,fidelity,P_leak"
    with pytest.raises(ValueError):
        fidelity_scan(protocol="swap")


def test_gate_report_json():
    report = swap_gate(mode="ideal")
    data = json.loads(report.to_json())
    assert data["protocol"] == "swap"
    assert data["mode"] == "ideal"
    assert data["fidelity"] >= 1.0 - 1e-12
    assert len(data["passes"]) == 1
    assert data["passes"][0]["phi"] == pytest.approx(math.pi)
    assert data["passes"][0]["g_sigma"] >= 30.0


def test_concurrence_pure():
    assert concurrence([0, R2, R2, 0]) == pytest.approx(1.0)
    assert concurrence([R2, 0, 0, R2]) == pytest.approx(1.0)
    # product states never entangle
    a = np.kron([0.6, 0.8], [R2, R2])
    assert concurrence([a[0], a[1], a[2], a[3]]) == pytest.approx(0.0, abs=1e-12)
    # unnormalized input is scaled, zero input is rejected
    assert concurrence([0, 2 * R2, 2 * R2, 0]) == pytest.approx(1.0)
    with pytest.raises(ValueError):
        concurrence([0.0, 0.0, 0.0, 0.0])
    with pytest.raises(ValueError):
        concurrence([1.0, 0.0])


def test_concurrence_traced():
    bell = SystemState({("g", "e", (0,)): R2, ("e", "g", (0,)): R2})
    assert concurrence_traced(bell) == pytest.approx(1.0, abs=1e-10)
    assert concurrence_traced(basis_product("g", "e")) == pytest.approx(0.0,
                                                                        abs=1e-12)
    # photon admixture decoheres the pair: C = 1 - eps^2
    eps = 0.2
    w = R2 * math.sqrt(1 - eps * eps)
    mixed = SystemState({("g", "e", (0,)): w, ("e", "g", (0,)): w,
                         ("g", "g", (1,)): eps})
    assert concurrence_traced(mixed) == pytest.approx(1 - eps * eps, abs=1e-10)
