"""Smoke test for the defquad extension module.

Build and install first:  maturin develop -m crates/python/Cargo.toml
"""

import json
import math

import defquad


def close(a, b, tol):
    return abs(a - b) <= tol


def main():
    h = defquad.Deformation.harmonic()
    m = defquad.Deformation.math_q(0.9)
    ph = defquad.Deformation.physics_q(1.5)
    pq = defquad.Deformation.pq(1.5, 0.5)

    assert m.kind == "mathq" and close(m.Q, 0.81, 1e-15)
    assert pq.p == 1.5 and pq.q == 0.5
    assert m.brackets(2) == [0.0, 1.0, 1.81]
    assert close(ph.bracket(2), 1.5 + 1 / 1.5, 1e-15)
    try:
        defquad.Deformation.math_q(1.2)
    except ValueError as e:
        assert "0<q<1" in str(e)
    else:
        raise AssertionError("q=1.2 accepted")

    # J_2 of the harmonic oscillator is (4x^2 - 2) / sqrt(8)
    j = defquad.polynomials(h, 1.0, 2)
    assert close(j[2], 2 / math.sqrt(8), 1e-15)

    x = defquad.quadrature_matrix(m, 3, 0.4)
    assert close(abs(x[0][1]), math.sqrt(1.81) / 2, 1e-15)
    assert x[1][0] == x[0][1].conjugate()

    assert defquad.q_commutator_residual(pq, 8) <= 1e-13
    assert defquad.xp_commutator_residual(m, 10) <= 1e-12

    nodes, weights = defquad.gauss_measure(h, 20)
    assert close(sum(weights), 1.0, 1e-12)
    assert close(nodes[10], 0.24534070830090124, 1e-13)

    grid = [-4 + 0.01 * i for i in range(801)]
    d = defquad.probability_density(h, 0, grid, method="stieltjes", eta=1e-3)
    assert len(d) == 801 and d.method == "stieltjes"
    assert close(d.density[400], 1 / math.sqrt(math.pi), 2e-3)

    peaks = [defquad.probability_density(dd, 0, grid).peak() for dd in (m, h)]
    assert peaks[0] > peaks[1]

    psi = defquad.wavefunction(h, 1, grid, theta=0.5, levels=200)
    assert isinstance(psi[0], complex)

    lo, hi, bounded = defquad.support_estimate(defquad.Deformation.math_q(1e-8), 200)
    assert bounded and close(lo, -1, 0.02) and close(hi, 1, 0.02)

    nodes32, _ = defquad.gauss_measure(m, 32)
    assert defquad.eigenstate_residual(m, nodes32[5], 0.7, 32) <= 1e-8
    assert len(defquad.eigenstate_coefficients(m, nodes32[5], 0.7, 32)) == 32

    report = json.loads(defquad.verify("algebra", pq))
    assert report["passed"], report

    print("defquad smoke test: ok")


if __name__ == "__main__":
    main()
