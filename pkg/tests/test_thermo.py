"""First-law bookkeeping: entropies, work, heat, and the closed ledger."""

import itertools
import json
import math

import numpy as np
import pytest

from qledger.qcore import DensityMatrix, HermitianOperator, ValidationError
from qledger.sampling import random_density, random_hermitian, spectral_span_bound
from qledger.thermo import (
    ThermoLedger,
    adiabatic_work_gibbs,
    adiabatic_work_passive,
    delta_S_ir,
    delta_S_r,
    ergotropy,
    extractable_work,
    first_law_ledger,
    free_energy,
    gibbs_state,
    heat,
    operational_heat,
    passive_state,
    relative_entropy,
    von_neumann_entropy,
)

# thermal two-level fixture used throughout: H = diag(0, 1) at beta = 1.
# Z = 1 + e^-1, excited population p1 = 1/(1+e), so
#   S(pi)  = ln Z + <E>      = ln(1+e^-1) + 1/(1+e)
#   W_f(|1><1|) = F(|1><1|) - F(pi) = 1 + ln(1+e^-1)
#   Q(|1><1| -> pi) = <E>_pi - 1 = 1/(1+e) - 1
H2 = np.diag([0.0, 1.0])
S_THERMAL = math.log(1.0 + math.exp(-1.0)) + 1.0 / (1.0 + math.e)
WF_EXCITED = 1.0 + math.log(1.0 + math.exp(-1.0))
Q_THERMALIZE = 1.0 / (1.0 + math.e) - 1.0


def test_fixture_constants_are_the_frozen_digits():
    assert S_THERMAL == pytest.approx(0.5822031088882179, abs=1e-15)
    assert WF_EXCITED == pytest.approx(1.3132616875182228, abs=1e-15)
    assert Q_THERMALIZE == pytest.approx(-0.7310585786300049, abs=1e-15)


def test_entropy_known_values():
    assert von_neumann_entropy(DensityMatrix.from_pure(np.array([1.0, 0.0]))) == pytest.approx(0.0, abs=1e-14)
    assert von_neumann_entropy(np.eye(4) / 4) == pytest.approx(math.log(4), abs=1e-14)
    pi = gibbs_state(H2, 1.0).state
    assert von_neumann_entropy(pi) == pytest.approx(S_THERMAL, abs=1e-13)


def test_entropy_basis_invariance():
    rng = np.random.default_rng(301)
    for _ in range(50):
        dim = int(rng.integers(2, 7))
        rho = random_density(rng, dim)
        g = rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))
        u, _ = np.linalg.qr(g)
        rotated = u @ rho.matrix @ u.conj().T
        rotated = 0.5 * (rotated + rotated.conj().T)
        assert von_neumann_entropy(rotated) == pytest.approx(von_neumann_entropy(rho), abs=1e-11)


def test_relative_entropy_properties():
    rng = np.random.default_rng(302)
    for _ in range(100):
        dim = int(rng.integers(2, 6))
        rho = random_density(rng, dim)
        sigma = random_density(rng, dim)
        val = relative_entropy(rho, sigma)
        assert val >= -1e-12
    rho = random_density(rng, 3)
    assert relative_entropy(rho, rho) == pytest.approx(0.0, abs=1e-10)


def test_relative_entropy_commuting_closed_form():
    p = np.array([0.7, 0.2, 0.1])
    q = np.array([0.5, 0.25, 0.25])
    expected = float(np.sum(p * np.log(p / q)))
    got = relative_entropy(np.diag(p), np.diag(q))
    assert got == pytest.approx(expected, abs=1e-13)


def test_relative_entropy_divergent_support():
    ket0 = DensityMatrix.from_pure(np.array([1.0, 0.0]))
    ket1 = DensityMatrix.from_pure(np.array([0.0, 1.0]))
    assert relative_entropy(ket0, ket1) == math.inf
    # rank-deficient reference supporting the state is fine
    mixed = DensityMatrix(np.diag([0.5, 0.5, 0.0]))
    narrower = DensityMatrix(np.diag([0.3, 0.7, 0.0]))
    assert math.isfinite(relative_entropy(narrower, mixed))
    with pytest.raises(ValidationError):
        relative_entropy(np.eye(2) / 2, np.eye(3) / 3)


def test_gibbs_state_structure():
    rng = np.random.default_rng(303)
    for _ in range(30):
        dim = int(rng.integers(2, 6))
        h = random_hermitian(rng, dim)
        beta = float(10.0 ** rng.uniform(-1.0, 0.5))
        spec = gibbs_state(h, beta)
        pi = spec.state.matrix
        assert abs(pi.trace() - 1.0) <= 1e-12
        assert np.abs(pi @ h.matrix - h.matrix @ pi).max() <= 1e-12
        # populations follow the Boltzmann ratio on the spectrum
        w = np.linalg.eigvalsh(h.matrix)
        pops = np.sort(np.linalg.eigvalsh(pi))[::-1]
        expected = np.exp(-beta * (w - w[0]))
        expected /= expected.sum()
        assert np.abs(pops - expected).max() <= 1e-12
        assert spec.log_Z == pytest.approx(math.log(np.exp(-beta * w).sum()), abs=1e-12)
    with pytest.raises(ValidationError):
        gibbs_state(H2, 0.0)
    with pytest.raises(ValidationError):
        gibbs_state(H2, -1.0)


def test_ergotropy_against_permutation_search():
    """Brute-force minimum over spectrum-to-level assignments."""
    rng = np.random.default_rng(304)
    for _ in range(200):
        dim = int(rng.integers(2, 6))
        h = random_hermitian(rng, dim)
        rho = random_density(rng, dim)
        erg = ergotropy(rho, h)
        p_eig = np.linalg.eigvalsh(rho.matrix)
        h_eig = np.linalg.eigvalsh(h.matrix)
        e_now = float(np.einsum("ij,ji->", rho.matrix, h.matrix).real)
        best = min(
            float(np.dot(p_eig[list(perm)], h_eig))
            for perm in itertools.permutations(range(dim))
        )
        assert abs(erg - (e_now - best)) <= 1e-10
        assert erg >= -1e-12


def test_gibbs_is_passive():
    rng = np.random.default_rng(305)
    for _ in range(50):
        dim = int(rng.integers(2, 6))
        h = random_hermitian(rng, dim)
        beta = float(10.0 ** rng.uniform(-1.0, 0.5))
        assert ergotropy(gibbs_state(h, beta).state, h) <= 1e-10


def test_passive_state_properties():
    rng = np.random.default_rng(306)
    for _ in range(50):
        dim = int(rng.integers(2, 6))
        h = random_hermitian(rng, dim)
        rho = random_density(rng, dim)
        pas = passive_state(rho, h)
        # spectrum preserved
        assert np.abs(
            np.sort(np.linalg.eigvalsh(pas.matrix)) - np.sort(np.linalg.eigvalsh(rho.matrix))
        ).max() <= 1e-11
        # passive energy never exceeds the original
        e_rho = float(np.einsum("ij,ji->", rho.matrix, h.matrix).real)
        e_pas = float(np.einsum("ij,ji->", pas.matrix, h.matrix).real)
        assert e_pas <= e_rho + 1e-10
        # and a passive state has zero ergotropy
        assert ergotropy(pas, h) <= 1e-10


def test_extractable_work_dual_path():
    rng = np.random.default_rng(307)
    for _ in range(200):
        dim = int(rng.integers(2, 5))
        h = random_hermitian(rng, dim)
        rho = random_density(rng, dim)
        beta = float(10.0 ** rng.uniform(-1.0, 1.0))
        beta = min(beta, 10.0 / spectral_span_bound(h))
        spec = gibbs_state(h, beta)
        via_free_energy = extractable_work(rho, h, beta)
        via_relent = relative_entropy(rho, spec.state) / beta
        assert abs(via_free_energy - via_relent) <= 1e-10
        assert via_free_energy >= -1e-10
        # the Gibbs state itself has nothing left to give
        assert abs(extractable_work(spec.state, h, beta)) <= 1e-10


def test_free_energy_definition():
    rho = DensityMatrix(np.diag([0.25, 0.75]))
    beta = 2.0
    expected = 0.75 - von_neumann_entropy(rho) / beta
    assert free_energy(rho, H2, beta) == pytest.approx(expected, abs=1e-14)
    with pytest.raises(ValidationError):
        free_energy(rho, H2, 0.0)


def test_thermalization_fixture_values():
    excited = DensityMatrix(np.diag([0.0, 1.0]))
    pi = gibbs_state(H2, 1.0).state
    led = first_law_ledger(excited, H2, pi, H2, 1.0)
    assert led.deltaWf == pytest.approx(-WF_EXCITED, abs=1e-12)
    assert led.heat == pytest.approx(Q_THERMALIZE, abs=1e-12)
    assert led.deltaE == pytest.approx(Q_THERMALIZE, abs=1e-12)  # fixed H, no adiabatic work
    assert abs(led.residual_eq2) <= 1e-12
    assert abs(led.residual_eq7) <= 1e-12


def test_identity_process_all_zero():
    rng = np.random.default_rng(308)
    rho = random_density(rng, 3)
    h = random_hermitian(rng, 3)
    led = first_law_ledger(rho, h, rho, h, 1.3)
    for field in ("deltaE", "deltaWe", "deltaWf", "adiabaticWork", "operationalHeat",
                  "heat", "deltaS_rho", "deltaS_gibbs", "deltaS_ir", "deltaS_r"):
        assert abs(getattr(led, field)) <= 1e-10, field


def test_ledger_fuzz_closures():
    rng = np.random.default_rng(309)
    for _ in range(300):
        dim = int(rng.integers(2, 5))
        beta = float(10.0 ** rng.uniform(-1.0, 1.0))
        h0 = random_hermitian(rng, dim)
        h1 = random_hermitian(rng, dim)
        r0 = random_density(rng, dim)
        r1 = random_density(rng, dim)
        led = first_law_ledger(r0, h0, r1, h1, beta)
        assert abs(led.residual_eq2) <= 1e-9
        assert abs(led.residual_eq7) <= 1e-9
        # entropy split of the two closures
        assert abs((led.deltaS_rho - led.deltaS_gibbs) - (led.deltaS_ir - led.deltaS_r)) <= 1e-10
        # heat against the quench-work route
        assert abs(led.heat - (led.deltaE - adiabatic_work_gibbs(h0, h1, beta))) <= 1e-9
        # free-energy work against the irreversibility route
        assert abs(led.deltaWf + led.deltaS_ir / beta) <= 1e-10


def test_ledger_wire_format():
    rng = np.random.default_rng(310)
    led = first_law_ledger(random_density(rng, 2), H2, random_density(rng, 2), H2, 0.7)
    d = led.as_dict()
    assert sorted(d) == sorted([
        "deltaE", "deltaWe", "deltaWf", "adiabaticWork", "operationalHeat", "heat",
        "deltaS_rho", "deltaS_gibbs", "deltaS_ir", "deltaS_r",
        "residual_eq2", "residual_eq7",
    ])
    back = json.loads(led.to_json())
    assert back == d
    assert isinstance(led, ThermoLedger)


def test_component_routes_agree_with_ledger():
    rng = np.random.default_rng(311)
    dim = 3
    beta = 0.8
    h0 = random_hermitian(rng, dim)
    h1 = random_hermitian(rng, dim)
    r0 = random_density(rng, dim)
    r1 = random_density(rng, dim)
    led = first_law_ledger(r0, h0, r1, h1, beta)
    assert led.deltaS_ir == pytest.approx(delta_S_ir(r0, h0, r1, h1, beta), abs=1e-10)
    assert led.deltaS_r == pytest.approx(delta_S_r(r0, h0, r1, h1, beta), abs=1e-10)
    assert led.heat == pytest.approx(heat(r0, h0, r1, h1, beta), abs=1e-12)
    assert led.adiabaticWork == pytest.approx(adiabatic_work_passive(r1, h0, h1), abs=1e-12)
    assert led.operationalHeat == pytest.approx(operational_heat(r0, r1, h0), abs=1e-12)
    assert led.deltaWf == pytest.approx(
        extractable_work(r1, h1, beta) - extractable_work(r0, h0, beta), abs=1e-10
    )


def test_operational_heat_vanishes_for_unitary_processes():
    rng = np.random.default_rng(312)
    rho = random_density(rng, 4)
    g = rng.normal(size=(4, 4)) + 1j * rng.normal(size=(4, 4))
    u, _ = np.linalg.qr(g)
    rotated = u @ rho.matrix @ u.conj().T
    rotated = DensityMatrix(0.5 * (rotated + rotated.conj().T), check_psd=False)
    h = random_hermitian(rng, 4)
    assert abs(operational_heat(rho, rotated, h)) <= 1e-10


def test_validation_errors():
    rng = np.random.default_rng(313)
    rho = random_density(rng, 2)
    with pytest.raises(ValidationError):
        extractable_work(rho, H2, -2.0)
    with pytest.raises(ValidationError):
        delta_S_r(rho, H2, rho, H2, 0.0)
    with pytest.raises(ValidationError):
        first_law_ledger(rho, H2, random_density(rng, 3), np.eye(3), 1.0)
