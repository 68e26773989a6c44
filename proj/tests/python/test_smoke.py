import json
import math

import numpy as np
import pytest

import vortex_re as vr


def test_triangle_is_linearly_stable():
    cc = vr.make_equilateral_triangle(1.0, 1.0, 1.0)
    assert cc.omega == pytest.approx(1.0)
    assert vr.classify(cc) == "LinearlyStable"
    rep = vr.check_theorem_b(cc)
    assert rep["verdict"] == "Holds"
    assert rep["inertia_ahat"]["n_minus"] == 0


def test_gradient_matches_finite_differences():
    g = [1.0, -0.7, 1.3]
    z = np.array([0.3, 0.1, -0.8, 0.5, 0.4, -1.2])
    h = 1e-6
    fd = np.array([(vr.hamiltonian(g, z + h * e) - vr.hamiltonian(g, z - h * e)) / (2 * h) for e in np.eye(6)])
    assert np.allclose(vr.grad_hamiltonian(g, z), fd, atol=1e-7)
    # dz/dt = M^{-1} K grad H
    v = vr.vector_field(g, z)
    gr = vr.grad_hamiltonian(g, z)
    expect = np.array([gr[2 * i + 1] / g[i] if k == 0 else -gr[2 * i] / g[i] for i in range(3) for k in range(2)])
    assert np.allclose(v, expect)


def test_rhombus_branches_and_spectrum():
    a = vr.make_rhombus(0.5, "A")
    assert vr.classify(a) == "LinearlyStable"
    b = vr.make_rhombus(-0.5, "B")
    spec = vr.nontrivial_spectrum(b)
    assert spec["classification"] == "Unstable"
    assert spec["signature"]["real_pairs"] == 2
    ms = vr.rhombus_b_transition()
    assert abs(9 * ms**3 + 3 * ms**2 + 7 * ms + 5) < 1e-12


def test_inertia_of_symmetric_matrix():
    assert vr.inertia(np.diag([1.0, -2.0, 0.0])) == {"n_minus": 1, "n_zero": 1, "n_plus": 1}


def test_find_cc_from_perturbed_guess():
    s3 = math.sqrt(3) / 2
    guess = np.array([1.001, 0.0, -0.5, s3 + 0.001, -0.5, -s3])
    cc = vr.find_cc([1.0, 1.0, 1.0], guess)
    assert cc.residual_norm <= 1e-12
    assert cc.iterations <= 10


def test_dynamics_and_monodromy():
    cc = vr.make_rhombus(1.0, "A")
    period = 2 * math.pi / cc.omega
    tr = vr.integrate(cc.circulations, cc.xi, period)
    assert np.linalg.norm(tr["states"][-1] - cc.xi) <= 1e-7
    mono = vr.monodromy(cc)
    assert mono["determinant"] == pytest.approx(1.0, abs=1e-6)
    assert mono["floquet_mismatch"] <= 1e-6


def test_errors_are_typed():
    with pytest.raises(vr.InputError, match="CollisionError"):
        vr.hamiltonian([1.0, 1.0], np.array([0.0, 0.0, 0.0, 0.0]))
    with pytest.raises(vr.InputError):
        vr.make_rhombus(0.5, "B")
    assert issubclass(vr.NumericalError, vr.VortexError)


def test_analysis_document_and_cli():
    doc = vr.analyze_dict({"family": "triangle", "gammas": [1, 1, 1]})
    assert doc["spectral"]["classification"] == "LinearlyStable"
    assert doc["morse_index"] == 0
    code, out, err = vr.run_cli(["analyze", "--family", "rhombus", "--m", "1"])
    assert code == 0 and err == ""
    assert json.loads(out)["central_configuration"]["omega"] == pytest.approx(1.5)
    code, _, err = vr.run_cli(["analyze"], '{"circulations":[1,1],"positions":[[0,0],[0,0]]}')
    assert code == 3 and "CollisionError" in err
