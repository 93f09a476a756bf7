"""Equilibrium references, work and heat bookkeeping for finite systems.

Two closures of the first law are tracked side by side for a process
(rho_0, H_0) -> (rho_tau, H_tau) at inverse temperature beta:

  * an ergotropy split,  dE = dW_e + W_ad + Q_op,  whose adiabatic work and
    operational heat are built from passive states (eigenvalues of the state
    sorted descending against energies sorted ascending), and
  * a free-energy split,  dE = dW_f + W_ad + (dS(rho) - dS(gibbs)) / beta,
    whose adiabatic work connects the initial and final Gibbs states.

Both residuals are carried in the ledger and close to rounding error by
construction.  Entropies are in nats; hbar = k_B = 1 throughout.

The log of a Gibbs state is always evaluated in closed form,
ln(gibbs) = -beta H - ln(Z) I, never through a numerical matrix log.
"""

from __future__ import annotations

import json
import math
from dataclasses import asdict, dataclass

import numpy as np

from .qcore import (
    DensityMatrix,
    HermitianOperator,
    NumericError,
    ValidationError,
    _as_square,
    hermitian_eig,
    hermitian_eigvals,
)

# support cutoffs for relative entropy: sigma eigenvalues below
# SIGMA_SUPPORT_TOL are treated as outside the support; rho weight above
# RHO_WEIGHT_TOL on that null space makes the divergence infinite
SIGMA_SUPPORT_TOL = 1e-14
RHO_WEIGHT_TOL = 1e-12


@dataclass(frozen=True)
class GibbsSpec:
    """A thermal state exp(-beta H)/Z together with its construction data."""

    hamiltonian: HermitianOperator
    beta: float
    Z: float
    log_Z: float
    state: DensityMatrix

    def __post_init__(self):
        if not (self.beta > 0 and math.isfinite(self.beta)):
            raise ValidationError(f"GibbsSpec: beta must be positive and finite, got {self.beta}")


@dataclass(frozen=True)
class ThermoLedger:
    """First-law bookkeeping for one process; field names are the wire names.

    ``adiabaticWork`` is the passive-ordering variant that pairs with
    ``operationalHeat`` in the ergotropy closure.  The Gibbs-referenced
    adiabatic work of the free-energy closure is recoverable as
    ``deltaE - heat``.
    """

    deltaE: float
    deltaWe: float
    deltaWf: float
    adiabaticWork: float
    operationalHeat: float
    heat: float
    deltaS_rho: float
    deltaS_gibbs: float
    deltaS_ir: float
    deltaS_r: float
    residual_eq2: float
    residual_eq7: float

    def as_dict(self) -> dict:
        return asdict(self)

    def to_json(self, indent: int | None = 2) -> str:
        return json.dumps(self.as_dict(), indent=indent)


def _energy(rho: np.ndarray, h: np.ndarray) -> float:
    return float(np.einsum("ij,ji->", rho, h).real)


def _entropy_from_probs(p: np.ndarray) -> float:
    p = p[p > 0.0]
    return float(-(p * np.log(p)).sum())


def von_neumann_entropy(rho) -> float:
    """S(rho) = -Tr[rho ln rho] in nats; 0 ln 0 contributes nothing."""
    w = hermitian_eigvals(_as_square(rho, "von_neumann_entropy"))
    return _entropy_from_probs(w)


def relative_entropy(rho, sigma) -> float:
    """S(rho || sigma) in nats, or +inf when rho leaves the support of sigma.

    Divergence is declared when sigma has an eigenvalue below
    ``SIGMA_SUPPORT_TOL`` carrying rho-weight above ``RHO_WEIGHT_TOL``; the
    weight is never silently floored.
    """
    a = _as_square(rho, "relative_entropy rho")
    b = _as_square(sigma, "relative_entropy sigma")
    if a.shape != b.shape:
        raise ValidationError("relative_entropy: dimension mismatch")
    wr, vr = hermitian_eig(a)
    ws, vs = hermitian_eig(b)
    overlap = np.abs(vr.conj().T @ vs) ** 2  # overlap[i, j] = |<r_i|s_j>|^2
    wr = np.clip(wr, 0.0, None)
    weights = wr @ overlap  # rho weight on each sigma eigenvector
    unsupported = ws < SIGMA_SUPPORT_TOL
    if np.any(weights[unsupported] > RHO_WEIGHT_TOL):
        return math.inf
    tr_rho_log_sigma = float(weights[~unsupported] @ np.log(ws[~unsupported]))
    return -_entropy_from_probs(wr) - tr_rho_log_sigma


def _gibbs_probs(hvals: np.ndarray, beta: float) -> tuple[np.ndarray, float]:
    """Populations (in eigenvalue order) and log Z, shift-stabilized."""
    shifted = np.exp(-beta * (hvals - hvals[0]))
    zs = float(shifted.sum())
    return shifted / zs, math.log(zs) - beta * float(hvals[0])


def gibbs_state(hamiltonian, beta: float) -> GibbsSpec:
    """Thermal state of a Hamiltonian at inverse temperature beta > 0."""
    if not (isinstance(beta, (int, float)) and beta > 0 and math.isfinite(beta)):
        raise ValidationError(f"gibbs_state: beta must be positive and finite, got {beta!r}")
    h = hamiltonian if isinstance(hamiltonian, HermitianOperator) else HermitianOperator(hamiltonian)
    w, v = hermitian_eig(h)
    p, log_z = _gibbs_probs(w, beta)
    m = (v * p) @ v.conj().T
    state = DensityMatrix(0.5 * (m + m.conj().T), check_psd=False)
    z = math.exp(log_z)
    # with the ground energy at exactly 0 the bare sum already is Z, so the
    # shift convention requires Z >= 1
    if w[0] == 0.0 and z < 1.0 - 1e-12:
        raise NumericError(f"gibbs_state: Z = {z} < 1 with ground energy 0")
    return GibbsSpec(hamiltonian=h, beta=float(beta), Z=z, log_Z=log_z, state=state)


def passive_state(rho, hamiltonian) -> DensityMatrix:
    """State with the spectrum of rho rearranged passively along H.

    Eigenvalues of rho in decreasing order sit on energy levels in
    increasing order, which minimizes the energy over unitary orbits.
    """
    r = np.sort(hermitian_eigvals(_as_square(rho, "passive_state rho")))[::-1]
    w, v = hermitian_eig(hamiltonian)
    m = (v * r) @ v.conj().T
    return DensityMatrix(0.5 * (m + m.conj().T), check_psd=False)


def ergotropy(rho, hamiltonian) -> float:
    """Unitarily extractable work Tr[rho H] - Tr[passive(rho) H]."""
    a = _as_square(rho, "ergotropy rho")
    h = _as_square(hamiltonian, "ergotropy hamiltonian")
    if a.shape != h.shape:
        raise ValidationError("ergotropy: dimension mismatch")
    r = np.sort(hermitian_eigvals(a))[::-1]
    w = hermitian_eigvals(h)
    return _energy(a, h) - float(r @ w)


def free_energy(rho, hamiltonian, beta: float) -> float:
    """F(rho) = Tr[H rho] - S(rho)/beta."""
    if not beta > 0:
        raise ValidationError(f"free_energy: beta must be positive, got {beta}")
    a = _as_square(rho, "free_energy rho")
    h = _as_square(hamiltonian, "free_energy hamiltonian")
    return _energy(a, h) - von_neumann_entropy(a) / beta


def extractable_work(rho, hamiltonian, beta: float) -> float:
    """F(rho) - F(gibbs), the work extractable with a bath at beta.

    Evaluated through free energies; equals relative_entropy(rho, gibbs)/beta
    up to rounding, which is the dual path used in tests.
    """
    h = _as_square(hamiltonian, "extractable_work hamiltonian")
    w = hermitian_eigvals(h)
    p, _ = _gibbs_probs(w, beta)
    f_gibbs = float(p @ w) - _entropy_from_probs(p) / beta
    return free_energy(rho, h, beta) - f_gibbs


def delta_S_ir(rho0, h0, rho_tau, h_tau, beta: float) -> float:
    """Irreversible entropy change S(rho0||gibbs0) - S(rho_tau||gibbs_tau)."""
    g0 = gibbs_state(h0, beta)
    gt = gibbs_state(h_tau, beta)
    return relative_entropy(rho0, g0.state) - relative_entropy(rho_tau, gt.state)


def delta_S_r(rho0, h0, rho_tau, h_tau, beta: float) -> float:
    """Reversible entropy change, Gibbs-log weighted deviation difference.

    Uses ln(gibbs) = -beta H - ln(Z) I, under which the ln Z parts cancel
    against the traceless deviations and the value reduces to energy terms.
    """
    if not beta > 0:
        raise ValidationError(f"delta_S_r: beta must be positive, got {beta}")
    a0 = _as_square(rho0, "delta_S_r rho0")
    at = _as_square(rho_tau, "delta_S_r rho_tau")
    m0 = _as_square(h0, "delta_S_r h0")
    mt = _as_square(h_tau, "delta_S_r h_tau")
    dev0 = _energy(a0, m0) - _gibbs_energy(m0, beta)
    devt = _energy(at, mt) - _gibbs_energy(mt, beta)
    return -beta * (devt - dev0)


def _gibbs_energy(h: np.ndarray, beta: float) -> float:
    w = hermitian_eigvals(h)
    p, _ = _gibbs_probs(w, beta)
    return float(p @ w)


def heat(rho0, h0, rho_tau, h_tau, beta: float) -> float:
    """Heat exchanged, -delta_S_r/beta; equals dE minus Gibbs adiabatic work."""
    return -delta_S_r(rho0, h0, rho_tau, h_tau, beta) / beta


def adiabatic_work_gibbs(h0, h_tau, beta: float) -> float:
    """Tr[gibbs_tau H_tau] - Tr[gibbs_0 H_0], the Gibbs-referenced quench work."""
    if not beta > 0:
        raise ValidationError(f"adiabatic_work_gibbs: beta must be positive, got {beta}")
    return _gibbs_energy(_as_square(h_tau, "adiabatic_work_gibbs h_tau"), beta) - _gibbs_energy(
        _as_square(h0, "adiabatic_work_gibbs h0"), beta
    )


def adiabatic_work_passive(rho_tau, h0, h_tau) -> float:
    """Passive-ordering adiabatic work between the old and new energy ladder.

    The final-state spectrum, passively ordered, is priced on H_tau and on
    H_0; the difference is the work of the drive stripped of ergotropy flow.
    """
    r = np.sort(hermitian_eigvals(_as_square(rho_tau, "adiabatic_work_passive rho_tau")))[::-1]
    w0 = hermitian_eigvals(_as_square(h0, "adiabatic_work_passive h0"))
    wt = hermitian_eigvals(_as_square(h_tau, "adiabatic_work_passive h_tau"))
    return float(r @ wt) - float(r @ w0)


def operational_heat(rho0, rho_tau, h0) -> float:
    """Energy of the final spectrum minus the initial one, both passive on H_0."""
    r0 = np.sort(hermitian_eigvals(_as_square(rho0, "operational_heat rho0")))[::-1]
    rt = np.sort(hermitian_eigvals(_as_square(rho_tau, "operational_heat rho_tau")))[::-1]
    w0 = hermitian_eigvals(_as_square(h0, "operational_heat h0"))
    return float(rt @ w0) - float(r0 @ w0)


def first_law_ledger(rho0, h0, rho_tau, h_tau, beta: float) -> ThermoLedger:
    """Full two-closure ledger for one process at inverse temperature beta.

    Every eigendecomposition is computed once and shared between the
    entries.  ``deltaS_ir`` follows the relative-entropy path (eigenbasis
    overlaps), while ``deltaWf`` follows the free-energy path, so the
    identity deltaWf = -deltaS_ir/beta is a genuine cross-check rather
    than a tautology.
    """
    if not (isinstance(beta, (int, float)) and beta > 0 and math.isfinite(beta)):
        raise ValidationError(f"first_law_ledger: beta must be positive and finite, got {beta!r}")
    a0 = _as_square(rho0, "first_law_ledger rho0")
    at = _as_square(rho_tau, "first_law_ledger rho_tau")
    m0 = _as_square(h0, "first_law_ledger h0")
    mt = _as_square(h_tau, "first_law_ledger h_tau")
    if not (a0.shape == at.shape == m0.shape == mt.shape):
        raise ValidationError("first_law_ledger: all operators must share one dimension")

    wr0, vr0 = hermitian_eig(a0)
    wrt, vrt = hermitian_eig(at)
    wh0, vh0 = hermitian_eig(m0)
    wht, vht = hermitian_eig(mt)

    e0 = _energy(a0, m0)
    et = _energy(at, mt)
    delta_e = et - e0

    p0, log_z0 = _gibbs_probs(wh0, beta)
    pt, log_zt = _gibbs_probs(wht, beta)
    s_rho0 = _entropy_from_probs(np.clip(wr0, 0.0, None))
    s_rhot = _entropy_from_probs(np.clip(wrt, 0.0, None))
    s_g0 = _entropy_from_probs(p0)
    s_gt = _entropy_from_probs(pt)

    # ergotropy split, passive pricing of the spectra
    r0_desc = np.sort(wr0)[::-1]
    rt_desc = np.sort(wrt)[::-1]
    delta_we = (et - float(rt_desc @ wht)) - (e0 - float(r0_desc @ wh0))
    w_ad_passive = float(rt_desc @ wht) - float(rt_desc @ wh0)
    q_op = float(rt_desc @ wh0) - float(r0_desc @ wh0)

    # free-energy split
    f0 = e0 - s_rho0 / beta
    ft = et - s_rhot / beta
    fg0 = float(p0 @ wh0) - s_g0 / beta
    fgt = float(pt @ wht) - s_gt / beta
    delta_wf = (ft - fgt) - (f0 - fg0)
    w_ad_gibbs = float(pt @ wht) - float(p0 @ wh0)

    ds_r = -beta * ((et - float(pt @ wht)) - (e0 - float(p0 @ wh0)))
    q = -ds_r / beta

    # relative entropies through eigenbasis overlaps
    rel0 = _relent_from_spectra(wr0, vr0, p0, vh0)
    relt = _relent_from_spectra(wrt, vrt, pt, vht)
    ds_ir = rel0 - relt

    residual_eq2 = delta_e - (delta_we + w_ad_passive + q_op)
    residual_eq7 = delta_e - (delta_wf + w_ad_gibbs + (s_rhot - s_rho0 - (s_gt - s_g0)) / beta)

    return ThermoLedger(
        deltaE=delta_e,
        deltaWe=delta_we,
        deltaWf=delta_wf,
        adiabaticWork=w_ad_passive,
        operationalHeat=q_op,
        heat=q,
        deltaS_rho=s_rhot - s_rho0,
        deltaS_gibbs=s_gt - s_g0,
        deltaS_ir=ds_ir,
        deltaS_r=ds_r,
        residual_eq2=residual_eq2,
        residual_eq7=residual_eq7,
    )


def _relent_from_spectra(wr, vr, psigma, vsigma) -> float:
    overlap = np.abs(vr.conj().T @ vsigma) ** 2
    wr = np.clip(wr, 0.0, None)
    weights = wr @ overlap
    # Gibbs populations are strictly positive; the floor only guards exp underflow
    return -_entropy_from_probs(wr) - float(weights @ np.log(np.maximum(psigma, 1e-300)))
